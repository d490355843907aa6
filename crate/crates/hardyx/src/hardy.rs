//! Hardy-type quasi-norms over a ball quasi-Banach space: the Peetre maximal
//! definition, the Poisson / nontangential variants, the supremum-over-levels
//! norm of conjugate vectors and gradient tensors, and the Riesz-composition
//! norm, together with family-based equivalence experiments comparing them.
//!
//! An equivalence experiment evaluates a chosen pair of norms on every member
//! of a deterministic test family and reports the ratio statistics: the
//! theorems say the two norms are comparable with unspecified constants, so
//! what is checkable at desk scale is that the ratio spread across a
//! documented family stays within a configured bound (default 10).

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{sample, Grid, GridFunction, TLadder};
use crate::halfspace::{HarmonicVector, TensorField};
use crate::maximal::{
    nontangential_maximal, petree_maximal, poisson_maximal, RadiusSet, Template,
};
use crate::operators::{poisson_kernel, riesz_compose, HalfSpaceField};
use crate::spaces::{quasi_norm, range_validator, SpaceSpec, ValidityReport};

/// Default bound on the ratio spread accepted as "equivalent at desk scale";
/// recorded in every report (the underlying comparability constants are not
/// quantitative).
pub const DEFAULT_SPREAD_BOUND: f64 = 10.0;

/// Parameters shared by the maximal-function-based Hardy norms.
#[derive(Debug, Clone)]
pub struct HardyConfig {
    /// smoothing profile for the Peetre maximal function
    pub phi: Template,
    /// decay exponent of the Peetre weight (1 + |y|/t)^(-b)
    pub b: f64,
    /// vertical scales over which the maximal suprema run
    pub ladder: TLadder,
    /// ball radii for auxiliary Hardy-Littlewood style probes
    pub radii: RadiusSet,
    /// derivative-order cutoff of the grand-maximal test dictionary
    pub grand_order: usize,
}

impl HardyConfig {
    pub fn new(
        phi: Template,
        b: f64,
        ladder: TLadder,
        radii: RadiusSet,
        grand_order: usize,
    ) -> Result<HardyConfig> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "decay exponent b = {b} must be positive and finite"
            )));
        }
        Ok(HardyConfig {
            phi,
            b,
            ladder,
            radii,
            grand_order,
        })
    }

    /// Gaussian profile, b = 2n + 2, default ball radii, grand order 3.
    pub fn default_for(grid: &Grid, ladder: TLadder) -> HardyConfig {
        HardyConfig {
            phi: Template::Gaussian { width: 1.0 },
            b: 2.0 * grid.dim() as f64 + 2.0,
            ladder,
            radii: RadiusSet::default_for(grid),
            grand_order: 3,
        }
    }
}

/// Hardy quasi-norm: the space quasi-norm of the Peetre maximal function of f.
pub fn hardy_norm(f: &GridFunction, space: &SpaceSpec, cfg: &HardyConfig) -> Result<f64> {
    quasi_norm(&petree_maximal(f, &cfg.phi, cfg.b, &cfg.ladder)?, space)
}

/// Poisson variant: quasi-norm of the nontangential supremum of the Poisson
/// extension of f.
pub fn hardy_norm_poisson(f: &GridFunction, space: &SpaceSpec, cfg: &HardyConfig) -> Result<f64> {
    quasi_norm(&poisson_maximal(f, &cfg.ladder)?, space)
}

/// Quasi-norm of the nontangential supremum of an arbitrary half-space field;
/// applied to a Poisson extension this coincides with [`hardy_norm_poisson`].
pub fn halfspace_hardy_norm(u: &HalfSpaceField, space: &SpaceSpec) -> Result<f64> {
    quasi_norm(&nontangential_maximal(u), space)
}

fn level_supremum_norm(magnitude: &HalfSpaceField, space: &SpaceSpec) -> Result<f64> {
    let mut best = 0.0f64;
    for l in 0..magnitude.ladder().len() {
        best = best.max(quasi_norm(magnitude.slice(l), space)?);
    }
    Ok(best)
}

/// Norm of a conjugate harmonic vector: the largest quasi-norm of |F(., t)|
/// across the ladder levels (discrete sup over the vertical parameter).
pub fn vector_hardy_norm(v: &HarmonicVector, space: &SpaceSpec) -> Result<f64> {
    level_supremum_norm(&v.magnitude(), space)
}

/// Same supremum-over-levels norm for a gradient tensor field of any order.
pub fn tensor_hardy_norm(t: &TensorField, space: &SpaceSpec) -> Result<f64> {
    level_supremum_norm(&t.magnitude(), space)
}

/// All Riesz composition paths of length 1..=m over components {1..n},
/// shortest first, lexicographic within a length. Their count is
/// n + n^2 + ... + n^m.
pub fn riesz_paths(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for l in 1..=m {
        let mut idx = vec![1usize; l];
        loop {
            out.push(idx.clone());
            let mut pos = l;
            while pos > 0 {
                idx[pos - 1] += 1;
                if idx[pos - 1] <= n {
                    break;
                }
                idx[pos - 1] = 1;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    out
}

/// Riesz-characterization norm: ||f||_X plus the quasi-norm of every Riesz
/// composition of f up to order m (1 + n + ... + n^m terms in total), summed
/// in the fixed enumeration order of [`riesz_paths`].
pub fn riesz_hardy_norm(f: &GridFunction, space: &SpaceSpec, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "composition order m must be >= 1".into(),
        ));
    }
    let n = f.grid().dim();
    let mut total = quasi_norm(f, space)?;
    for path in riesz_paths(n, m) {
        total += quasi_norm(&riesz_compose(f, &path)?, space)?;
    }
    Ok(total)
}

/// The construction recipes for deterministic test families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// centered Gaussians with widths log-spaced across the scale range
    DilatedGaussians,
    /// mean-zero Gaussian bumps at seeded random lattice centers
    TranslatedAtoms,
    /// seeded random trigonometric polynomials supported on |k| <= N/8
    RandomBandlimited,
    /// periodized Poisson kernels with scales log-spaced across the range
    PoissonKernels,
}

impl FamilyKind {
    pub fn label(&self) -> &'static str {
        match self {
            FamilyKind::DilatedGaussians => "dilated-gaussians",
            FamilyKind::TranslatedAtoms => "translated-atoms",
            FamilyKind::RandomBandlimited => "random-bandlimited",
            FamilyKind::PoissonKernels => "poisson-kernels",
        }
    }
}

/// A realized list of test inputs, reproducible from (kind, count, seed).
#[derive(Debug, Clone)]
pub struct TestFamily {
    kind: FamilyKind,
    seed: u64,
    /// width/scale window [4h, L/8] the dilations were drawn from
    scale_range: (f64, f64),
    members: Vec<GridFunction>,
}

impl TestFamily {
    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn scale_range(&self) -> (f64, f64) {
        self.scale_range
    }

    pub fn members(&self) -> &[GridFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Combines several families into one (members concatenated in order).
    pub fn merged(kind_label_families: Vec<TestFamily>) -> Result<TestFamily> {
        let first = kind_label_families
            .first()
            .ok_or_else(|| Error::InvalidParameter("no families to merge".into()))?;
        let mut merged = TestFamily {
            kind: first.kind,
            seed: first.seed,
            scale_range: first.scale_range,
            members: Vec::new(),
        };
        for fam in kind_label_families {
            merged.members.extend(fam.members);
        }
        Ok(merged)
    }

    /// Every member with its mean subtracted.
    pub fn mean_zero(&self) -> TestFamily {
        let members = self
            .members
            .iter()
            .map(|f| {
                let mu = f.mean();
                f.map(|v| v - mu)
            })
            .collect();
        TestFamily {
            members,
            ..self.clone()
        }
    }

    /// Every member multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> TestFamily {
        TestFamily {
            members: self.members.iter().map(|f| f.map(|v| factor * v)).collect(),
            ..self.clone()
        }
    }

    /// Every member cyclically shifted by the same lattice offset.
    pub fn shifted(&self, offset: &[i64]) -> Result<TestFamily> {
        let members = self
            .members
            .iter()
            .map(|f| f.cyclic_shift(offset))
            .collect::<Result<Vec<_>>>()?;
        Ok(TestFamily {
            members,
            ..self.clone()
        })
    }
}

/// Gaussian bump exp(-pi dist(x, c)^2 / w^2) with the periodic min-image
/// distance.
fn gaussian_bump(grid: Grid, center: &[f64], width: f64) -> GridFunction {
    let c: Vec<f64> = center.to_vec();
    let l = grid.period();
    let n = grid.dim();
    sample(grid, move |x| {
        let mut d2 = 0.0;
        for a in 0..n {
            let mut d = (x[a] - c[a]).abs();
            if d > l / 2.0 {
                d = l - d;
            }
            d2 += d * d;
        }
        (-std::f64::consts::PI * d2 / (width * width)).exp()
    })
    .expect("gaussian samples are finite")
}

fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Builds a reproducible family of `count` test functions on the grid. The
/// dilation window is fixed to [4h, L/8] so every member is simultaneously
/// resolvable and well-localized; grids too coarse to have 4h < L/8 are
/// rejected.
pub fn make_test_family(
    kind: FamilyKind,
    count: usize,
    seed: u64,
    grid: &Grid,
) -> Result<TestFamily> {
    if count == 0 {
        return Err(Error::InvalidParameter("family count must be >= 1".into()));
    }
    let h = grid.spacing();
    let lo = 4.0 * h;
    let hi = grid.period() / 8.0;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "scale window [{lo}, {hi}] is empty: need 4h < L/8 (N >= 64 per axis)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.dim();
    let mut members = Vec::with_capacity(count);
    match kind {
        FamilyKind::DilatedGaussians => {
            let center = grid.center_point();
            for w in log_spaced(lo, hi, count) {
                members.push(gaussian_bump(*grid, &center[..n], w));
            }
        }
        FamilyKind::TranslatedAtoms => {
            let width = (lo * hi).sqrt();
            for _ in 0..count {
                let idx = rng.gen_range(0..grid.total_points());
                let center = grid.point(idx);
                let bump = gaussian_bump(*grid, &center[..n], width);
                let mu = bump.mean();
                members.push(bump.map(|v| v - mu));
            }
        }
        FamilyKind::RandomBandlimited => {
            let k_max = (grid.points_per_axis() / 8) as i64;
            let l = grid.period();
            let mut modes: Vec<Vec<i64>> = Vec::new();
            let mut k = vec![-k_max; n];
            'outer: loop {
                if k.iter().find(|&&v| v != 0).map_or(false, |&first| first > 0) {
                    modes.push(k.clone());
                }
                for a in (0..n).rev() {
                    k[a] += 1;
                    if k[a] <= k_max {
                        continue 'outer;
                    }
                    k[a] = -k_max;
                }
                break;
            }
            for _ in 0..count {
                let coeffs: Vec<(f64, f64)> = modes
                    .iter()
                    .map(|_| {
                        (
                            2.0 * rng.gen::<f64>() - 1.0,
                            2.0 * rng.gen::<f64>() - 1.0,
                        )
                    })
                    .collect();
                let modes_ref = modes.clone();
                members.push(
                    sample(*grid, |x| {
                        let mut acc = 0.0;
                        for (k, &(a, b)) in modes_ref.iter().zip(&coeffs) {
                            let mut phase = 0.0;
                            for (axis, &kk) in k.iter().enumerate() {
                                phase += 2.0 * std::f64::consts::PI * kk as f64 * x[axis] / l;
                            }
                            acc += a * phase.cos() + b * phase.sin();
                        }
                        acc
                    })
                    .expect("trigonometric samples are finite"),
                );
            }
        }
        FamilyKind::PoissonKernels => {
            for t in log_spaced(lo, hi, count) {
                members.push(poisson_kernel(grid, t)?);
            }
        }
    }
    Ok(TestFamily {
        kind,
        seed,
        scale_range: (lo, hi),
        members,
    })
}

/// Which pair of norms an equivalence experiment compares; `norm_a` is always
/// the Peetre-maximal Hardy norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormPair {
    /// hardy_norm vs hardy_norm_poisson
    Poisson,
    /// hardy_norm vs riesz_hardy_norm at the experiment's order m
    Riesz,
    /// hardy_norm vs vector_hardy_norm of the conjugate vector of f
    VectorIsometry,
}

impl NormPair {
    pub fn id(&self) -> &'static str {
        match self {
            NormPair::Poisson => "poisson-equiv",
            NormPair::Riesz => "riesz-equiv",
            NormPair::VectorIsometry => "isom-equiv",
        }
    }
}

/// One family member's norms in an equivalence experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemberStat {
    pub member_id: usize,
    pub norm_a: f64,
    pub norm_b: f64,
    /// norm_a / norm_b
    pub ratio: f64,
}

/// Ratio statistics of one norm pair across a family, together with the
/// hypothesis-validation outcome for the space.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub experiment: String,
    pub space: String,
    pub order: usize,
    pub rows: Vec<MemberStat>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// max_ratio / min_ratio (>= 1)
    pub spread: f64,
    pub spread_bound: f64,
    pub validity: ValidityReport,
}

impl EquivalenceReport {
    pub fn within_bound(&self) -> bool {
        self.spread <= self.spread_bound
    }

    /// CSV body with header `member_id,norm_a,norm_b,ratio`, LF line endings.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("member_id,norm_a,norm_b,ratio\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.member_id, row.norm_a, row.norm_b, row.ratio
            ));
        }
        out
    }

    /// Deterministic key: value summary embedding the hypothesis report.
    pub fn summary_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("experiment: {}\n", self.experiment));
        out.push_str(&format!("space: {}\n", self.space));
        out.push_str(&format!("order: {}\n", self.order));
        out.push_str(&format!("members: {}\n", self.rows.len()));
        out.push_str(&format!("min_ratio: {}\n", self.min_ratio));
        out.push_str(&format!("max_ratio: {}\n", self.max_ratio));
        out.push_str(&format!("spread: {}\n", self.spread));
        out.push_str(&format!("spread_bound: {}\n", self.spread_bound));
        out.push_str(&format!("within_bound: {}\n", self.within_bound()));
        out.push_str(&format!("hypothesis_valid: {}\n", self.validity.valid));
        for check in &self.validity.checks {
            out.push_str(&format!(
                "hypothesis: {} -> {} (margin {})\n",
                check.description,
                if check.holds { "holds" } else { "violated" },
                check.margin
            ));
        }
        out
    }
}

/// Number of worker threads: the HARDYX_THREADS environment variable when set
/// to a positive integer, otherwise the machine parallelism.
fn thread_cap() -> usize {
    std::env::var("HARDYX_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            thread::available_parallelism()
                .map(std::num::NonZeroUsize::get)
                .unwrap_or(1)
        })
}

/// Applies `f` to every item on up to [`thread_cap`] worker threads and
/// returns the results merged back into input order.
fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let workers = thread_cap().min(items.len()).max(1);
    if workers == 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let f = &f;
    let mut merged: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    let mut part = Vec::new();
                    let mut i = w;
                    while i < items.len() {
                        part.push((i, f(i, &items[i])));
                        i += workers;
                    }
                    part
                })
            })
            .collect();
        for handle in handles {
            for (i, r) in handle.join().expect("worker panicked") {
                merged[i] = Some(r);
            }
        }
    });
    merged.into_iter().map(|r| r.expect("index covered")).collect()
}

/// Evaluates the chosen norm pair on every family member (in parallel, merged
/// by member index) and reports the ratio statistics. The space hypotheses
/// are validated first; an out-of-hypothesis run is still performed and the
/// report carries the verdict.
pub fn equivalence_experiment(
    family: &TestFamily,
    space: &SpaceSpec,
    m: usize,
    cfg: &HardyConfig,
    pair: NormPair,
) -> Result<EquivalenceReport> {
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty test family".into()));
    }
    let n = family.members()[0].grid().dim();
    let validity = range_validator(space, m, n)?;
    let results = parallel_map(family.members(), |_, f| -> Result<(f64, f64)> {
        let a = hardy_norm(f, space, cfg)?;
        let b = match pair {
            NormPair::Poisson => hardy_norm_poisson(f, space, cfg)?,
            NormPair::Riesz => riesz_hardy_norm(f, space, m)?,
            NormPair::VectorIsometry => {
                let v = HarmonicVector::from_boundary(f, &cfg.ladder)?;
                vector_hardy_norm(&v, space)?
            }
        };
        Ok((a, b))
    });
    let mut rows = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        let (norm_a, norm_b) = r?;
        if !(norm_a > 0.0) || !(norm_b > 0.0) || !norm_a.is_finite() || !norm_b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "member {i} has a degenerate norm (a = {norm_a}, b = {norm_b})"
            )));
        }
        rows.push(MemberStat {
            member_id: i,
            norm_a,
            norm_b,
            ratio: norm_a / norm_b,
        });
    }
    let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(EquivalenceReport {
        experiment: pair.id().to_string(),
        space: space.label(),
        order: m,
        rows,
        min_ratio,
        max_ratio,
        spread: max_ratio / min_ratio,
        spread_bound: DEFAULT_SPREAD_BOUND,
        validity,
    })
}

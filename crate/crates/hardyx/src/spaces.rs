//! Function-space quasi-norms on the lattice: Lebesgue, weighted Lebesgue,
//! Lorentz, mixed-norm Lebesgue, local dyadic-weighted (Herz-type),
//! mixed-norm Herz-type and Morrey norms, plus Muckenhoupt-style weights,
//! growth-function indices and the theorem-hypothesis range validator.
//!
//! Conventions shared by all norms: the cell measure is h^n, dyadic annuli
//! and shells are centered at the canonical grid center, annulus k collects
//! distances in (2^(k-1), 2^k] with k clamped to [ceil(log2 h), floor(log2 L/2)]
//! (the lowest annulus absorbs the residual center ball, so annuli partition
//! the whole torus), and balls follow the open-ball cell-counting convention
//! of the maximal module.

use crate::error::{Error, Result};
use crate::grid::{discrete_lp_norm, Grid, GridFunction};
use crate::maximal::{hl_maximal, RadiusSet};

/// Dyadic growth function omega used by the Herz-type norm: either an exact
/// power law or log-log interpolated dyadic samples omega(2^k) for
/// k_min <= k <= k_min + values.len() - 1.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaSpec {
    PowerLaw { alpha: f64 },
    Sampled { k_min: i32, values: Vec<f64> },
}

impl OmegaSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            OmegaSpec::PowerLaw { alpha } => {
                if !alpha.is_finite() {
                    return Err(Error::InvalidParameter("power-law exponent not finite".into()));
                }
            }
            OmegaSpec::Sampled { values, .. } => {
                if values.is_empty() {
                    return Err(Error::InsufficientSamples("empty omega sample set".into()));
                }
                for &v in values {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(Error::InvalidParameter(format!(
                            "omega samples must be positive and finite, got {v}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// omega(2^k), clamping sampled specs to their endpoint values.
    pub fn eval_dyadic(&self, k: i32) -> f64 {
        match self {
            OmegaSpec::PowerLaw { alpha } => (k as f64 * alpha).exp2(),
            OmegaSpec::Sampled { k_min, values } => {
                let idx = (k - k_min).clamp(0, values.len() as i32 - 1) as usize;
                values[idx]
            }
        }
    }

    /// omega(t) for arbitrary t > 0; sampled specs interpolate log-linearly
    /// between dyadic nodes and refuse points outside their range.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("omega argument {t} must be positive")));
        }
        match self {
            OmegaSpec::PowerLaw { alpha } => Ok(t.powf(*alpha)),
            OmegaSpec::Sampled { k_min, values } => {
                let lo = *k_min as f64;
                let hi = (*k_min + values.len() as i32 - 1) as f64;
                let lt = t.log2();
                if lt < lo - 1e-9 || lt > hi + 1e-9 {
                    return Err(Error::InsufficientSamples(format!(
                        "omega sampled on [2^{lo}, 2^{hi}] queried at 2^{lt:.3}"
                    )));
                }
                if values.len() == 1 {
                    return Ok(values[0]);
                }
                let pos = (lt - lo).clamp(0.0, hi - lo);
                let i = (pos.floor() as usize).min(values.len() - 2);
                let frac = pos - i as f64;
                Ok((values[i].ln() * (1.0 - frac) + values[i + 1].ln() * frac).exp())
            }
        }
    }
}

/// Strictly positive weight on the lattice together with its measure
/// mu(E) = sum_E w h^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    values: GridFunction,
}

impl Weight {
    pub fn new(values: GridFunction) -> Result<Weight> {
        for &v in values.values() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "weight values must be strictly positive, got {v}"
                )));
            }
        }
        Ok(Weight { values })
    }

    /// Power-of-maximal weight w = (M(1_B(center,1)))^epsilon.
    pub fn muckenhoupt(grid: &Grid, epsilon: f64, radii: &RadiusSet) -> Result<Weight> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weight exponent {epsilon} must be positive"
            )));
        }
        if grid.period() <= 2.0 {
            return Err(Error::InvalidParameter(
                "period must exceed 2 so the unit ball fits".into(),
            ));
        }
        let center = grid.center_index();
        let mut ind = GridFunction::zeros(*grid);
        for i in 0..grid.total_points() {
            if grid.periodic_distance(i, center) < 1.0 {
                ind.values_mut()[i] = 1.0;
            }
        }
        let m = hl_maximal(&ind, radii);
        Weight::new(m.map(|v| v.powf(epsilon)))
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn grid(&self) -> &Grid {
        self.values.grid()
    }

    /// mu of the open ball B(x, r).
    pub fn ball_measure(&self, center: usize, r: f64) -> f64 {
        let grid = self.values.grid();
        let vol = grid.cell_volume();
        let mut s = 0.0;
        for (i, &w) in self.values.values().iter().enumerate() {
            if grid.periodic_distance(i, center) < r {
                s += w;
            }
        }
        s * vol
    }

    pub fn total_measure(&self) -> f64 {
        self.values.values().iter().sum::<f64>() * self.values.grid().cell_volume()
    }

    /// Largest ratio mu(B(x, 2r)) / mu(B(x, r)) over all centers and radii.
    pub fn doubling_probe(&self, radii: &RadiusSet) -> f64 {
        let grid = self.values.grid();
        let total = grid.total_points();
        let offs = crate::maximal::offsets_by_distance(grid);
        let mut boundaries: Vec<f64> = Vec::new();
        for &r in radii.radii() {
            boundaries.push(r);
            boundaries.push(2.0 * r);
        }
        boundaries.sort_by(|a, b| a.partial_cmp(b).unwrap());
        boundaries.dedup();
        let w = self.values.values();
        let mut accum = vec![0.0f64; total];
        let mut snapshots: Vec<Vec<f64>> = Vec::with_capacity(boundaries.len());
        let mut idx = 0usize;
        for &r in &boundaries {
            while idx < offs.len() && offs[idx].0 < r {
                crate::maximal::add_shifted(&mut accum, w, grid, offs[idx].1);
                idx += 1;
            }
            snapshots.push(accum.clone());
        }
        let mut worst = 0.0f64;
        for &r in radii.radii() {
            let i1 = boundaries.iter().position(|&b| b == r).unwrap();
            let i2 = boundaries.iter().position(|&b| b == 2.0 * r).unwrap();
            for x in 0..total {
                let small = snapshots[i1][x];
                let big = snapshots[i2][x];
                if small > 0.0 {
                    let q = big / small;
                    if q > worst {
                        worst = q;
                    }
                }
            }
        }
        worst
    }
}

/// Per-sample outcome of the kernel-tail weight probe.
#[derive(Debug, Clone, PartialEq)]
pub struct BpProbeReport {
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// Probes sum_y w(y) h^n / (t + dist(x,y))^(n p) against t^(-n p) mu(B(x, t))
/// at the given (center, scale) samples.
pub fn bp_condition_probe(
    weight: &Weight,
    p: f64,
    samples: &[(usize, f64)],
) -> Result<BpProbeReport> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent p = {p} must be positive")));
    }
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no probe samples".into()));
    }
    let grid = weight.grid();
    let np = grid.dim() as f64 * p;
    let vol = grid.cell_volume();
    let mut ratios = Vec::with_capacity(samples.len());
    for &(x, t) in samples {
        if x >= grid.total_points() || !(t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bad probe sample (x = {x}, t = {t})"
            )));
        }
        let mut lhs = 0.0;
        for (y, &w) in weight.values().values().iter().enumerate() {
            let d = grid.periodic_distance(y, x);
            lhs += w * vol / (t + d).powf(np);
        }
        let rhs = t.powf(-np) * weight.ball_measure(x, t);
        ratios.push(lhs / rhs);
    }
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(BpProbeReport { ratios, max_ratio })
}

/// Which quasi-norm to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    Lebesgue { p: f64 },
    WeightedLebesgue { p: f64, weight: Weight },
    Lorentz { p: f64, r: f64 },
    MixedLebesgue { p: Vec<f64> },
    LocalHerz { p: f64, r: f64, omega: OmegaSpec },
    MixedHerz { alpha: Vec<f64>, p: Vec<f64>, q: Vec<f64> },
    Morrey { p: f64, r: f64 },
}

impl SpaceSpec {
    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            SpaceSpec::Lebesgue { p } => format!("lebesgue(p={p})"),
            SpaceSpec::WeightedLebesgue { p, .. } => format!("weighted-lebesgue(p={p})"),
            SpaceSpec::Lorentz { p, r } => format!("lorentz(p={p},r={r})"),
            SpaceSpec::MixedLebesgue { p } => format!("mixed-lebesgue(p={p:?})"),
            SpaceSpec::LocalHerz { p, r, .. } => format!("local-herz(p={p},r={r})"),
            SpaceSpec::MixedHerz { alpha, p, q } => {
                format!("mixed-herz(alpha={alpha:?},p={p:?},q={q:?})")
            }
            SpaceSpec::Morrey { p, r } => format!("morrey(p={p},r={r})"),
        }
    }
}

fn check_exponent(name: &str, v: f64, allow_inf: bool) -> Result<()> {
    if v.is_nan() || v <= 0.0 || (!allow_inf && v.is_infinite()) {
        return Err(Error::InvalidParameter(format!(
            "exponent {name} = {v} out of range"
        )));
    }
    Ok(())
}

/// Evaluates the quasi-norm selected by `spec`.
pub fn quasi_norm(f: &GridFunction, spec: &SpaceSpec) -> Result<f64> {
    match spec {
        SpaceSpec::Lebesgue { p } => {
            check_exponent("p", *p, true)?;
            discrete_lp_norm(f, *p)
        }
        SpaceSpec::WeightedLebesgue { p, weight } => weighted_lebesgue_norm(f, *p, weight),
        SpaceSpec::Lorentz { p, r } => lorentz_norm(f, *p, *r),
        SpaceSpec::MixedLebesgue { p } => mixed_norm(f, p),
        SpaceSpec::LocalHerz { p, r, omega } => herz_norm_local(f, *p, *r, omega),
        SpaceSpec::MixedHerz { alpha, p, q } => mixed_herz_norm(f, alpha, p, q),
        SpaceSpec::Morrey { p, r } => {
            let radii = crate::grid::default_ball_radii(f.grid());
            morrey_norm(f, *p, *r, &radii)
        }
    }
}

/// Weighted Lebesgue quasi-norm (sum |f|^p w h^n)^(1/p).
pub fn weighted_lebesgue_norm(f: &GridFunction, p: f64, weight: &Weight) -> Result<f64> {
    check_exponent("p", p, false)?;
    if weight.grid() != f.grid() {
        return Err(Error::GridMismatch("weight lives on a different grid".into()));
    }
    let vol = f.grid().cell_volume();
    let s: f64 = f
        .values()
        .iter()
        .zip(weight.values().values())
        .map(|(&v, &w)| v.abs().powf(p) * w)
        .sum();
    Ok((s * vol).powf(1.0 / p))
}

/// Decreasing rearrangement: |f| values sorted descending, each carrying cell
/// measure h^n.
pub fn rearrangement(f: &GridFunction) -> Vec<f64> {
    let mut v: Vec<f64> = f.values().iter().map(|x| x.abs()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Lorentz quasi-norm via the exact step formula on the rearrangement:
/// finite r:  [ sum_i f*_i^r (p/r)(T_i^(r/p) - T_(i-1)^(r/p)) ]^(1/r),
/// r = inf:   sup_i T_i^(1/p) f*_i,  with T_i = i h^n.
pub fn lorentz_norm(f: &GridFunction, p: f64, r: f64) -> Result<f64> {
    check_exponent("p", p, false)?;
    check_exponent("r", r, true)?;
    let star = rearrangement(f);
    let vol = f.grid().cell_volume();
    if r.is_infinite() {
        let mut best = 0.0f64;
        for (i, &v) in star.iter().enumerate() {
            let t = (i + 1) as f64 * vol;
            best = best.max(t.powf(1.0 / p) * v);
        }
        return Ok(best);
    }
    let e = r / p;
    let mut sum = 0.0;
    let mut prev = 0.0;
    for (i, &v) in star.iter().enumerate() {
        let t = ((i + 1) as f64 * vol).powf(e);
        if v > 0.0 {
            sum += v.powf(r) * (p / r) * (t - prev);
        }
        prev = t;
    }
    Ok(sum.powf(1.0 / r))
}

/// Mixed-norm Lebesgue norm: iterated one-axis reductions, first axis
/// innermost; p[i] is the exponent for axis i.
pub fn mixed_norm(f: &GridFunction, p: &[f64]) -> Result<f64> {
    let grid = f.grid();
    let n = grid.dim();
    if p.len() != n {
        return Err(Error::GridMismatch(format!(
            "{} exponents for dimension {n}",
            p.len()
        )));
    }
    for (i, &pi) in p.iter().enumerate() {
        check_exponent(&format!("p[{i}]"), pi, true)?;
    }
    let np = grid.points_per_axis();
    let h = grid.spacing();
    let mut values: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    for &pi in p {
        // axis 0 of the current layout is the slowest index; reduce it
        let stride = values.len() / np;
        let mut out = vec![0.0f64; stride];
        if pi.is_infinite() {
            for (rest, slot) in out.iter_mut().enumerate() {
                let mut best = 0.0f64;
                for i0 in 0..np {
                    best = best.max(values[i0 * stride + rest]);
                }
                *slot = best;
            }
        } else {
            for (rest, slot) in out.iter_mut().enumerate() {
                let mut s = 0.0;
                for i0 in 0..np {
                    s += values[i0 * stride + rest].powf(pi);
                }
                *slot = (s * h).powf(1.0 / pi);
            }
        }
        values = out;
    }
    Ok(values[0])
}

/// Dyadic annulus index range for the grid: k in [ceil(log2 h), floor(log2 L/2)].
fn annulus_range(grid: &Grid) -> (i32, i32) {
    let k_min = (grid.spacing().log2() - 1e-9).ceil() as i32;
    let k_max = (0.5 * grid.period()).log2().floor() as i32;
    (k_min, k_max.max(k_min))
}

fn annulus_of(d: f64, k_min: i32, k_max: i32) -> i32 {
    if d <= 0.0 {
        return k_min;
    }
    ((d.log2() - 1e-12).ceil() as i32).clamp(k_min, k_max)
}

/// Local dyadic-weighted norm about the grid center:
/// ( sum_k [omega(2^k) || f 1_(A_k) ||_p]^r )^(1/r) over annuli
/// A_k = { 2^(k-1) < dist(x, center) <= 2^k }. The input must carry at most
/// a 1e-9 fraction of its mass outside B(center, L/4).
pub fn herz_norm_local(f: &GridFunction, p: f64, r: f64, omega: &OmegaSpec) -> Result<f64> {
    check_exponent("p", p, true)?;
    check_exponent("r", r, true)?;
    omega.validate()?;
    let grid = f.grid();
    let center = grid.center_index();
    let vol = grid.cell_volume();
    // support contract
    let mut inside = 0.0;
    let mut outside = 0.0;
    let quarter = grid.period() / 4.0;
    for (i, &v) in f.values().iter().enumerate() {
        if grid.periodic_distance(i, center) > quarter {
            outside += v.abs();
        } else {
            inside += v.abs();
        }
    }
    let total_mass = inside + outside;
    if total_mass > 0.0 && outside / total_mass > 1e-9 {
        return Err(Error::SupportViolation {
            fraction: outside / total_mass,
        });
    }
    let (k_min, k_max) = annulus_range(grid);
    let bins = (k_max - k_min + 1) as usize;
    // per-annulus p-th power sums (or sups for p = inf)
    let mut acc = vec![0.0f64; bins];
    for (i, &v) in f.values().iter().enumerate() {
        let d = grid.periodic_distance(i, center);
        let k = annulus_of(d, k_min, k_max);
        let bin = (k - k_min) as usize;
        if p.is_infinite() {
            acc[bin] = acc[bin].max(v.abs());
        } else {
            acc[bin] += v.abs().powf(p);
        }
    }
    let piece = |bin: usize| -> f64 {
        if p.is_infinite() {
            acc[bin]
        } else {
            (acc[bin] * vol).powf(1.0 / p)
        }
    };
    if r.is_infinite() {
        let mut best = 0.0f64;
        for bin in 0..bins {
            let k = k_min + bin as i32;
            best = best.max(omega.eval_dyadic(k) * piece(bin));
        }
        return Ok(best);
    }
    let mut sum = 0.0;
    for bin in 0..bins {
        let k = k_min + bin as i32;
        let t = omega.eval_dyadic(k) * piece(bin);
        if t > 0.0 {
            sum += t.powf(r);
        }
    }
    Ok(sum.powf(1.0 / r))
}

/// Mixed-norm Herz-type norm: per-axis dyadic shells R_k about the center,
/// reduced one axis at a time through
///   G_i = sum_k 2^(k p_i alpha_i) [ sum_(x_i in R_k) G_(i-1)^(q_i/p_(i-1)) h ]^(p_i/q_i)
/// with p_0 = 1, returning G_n^(1/p_n). With alpha = 0 and p = q the shells
/// telescope and this is the mixed-norm Lebesgue norm.
pub fn mixed_herz_norm(f: &GridFunction, alpha: &[f64], p: &[f64], q: &[f64]) -> Result<f64> {
    let grid = f.grid();
    let n = grid.dim();
    if alpha.len() != n || p.len() != n || q.len() != n {
        return Err(Error::GridMismatch(format!(
            "parameter vectors must have length {n}"
        )));
    }
    for i in 0..n {
        if !alpha[i].is_finite() {
            return Err(Error::InvalidParameter(format!("alpha[{i}] not finite")));
        }
        check_exponent(&format!("p[{i}]"), p[i], false)?;
        check_exponent(&format!("q[{i}]"), q[i], false)?;
    }
    let np = grid.points_per_axis();
    let h = grid.spacing();
    let half = (np / 2) as i64;
    let (k_min, k_max) = annulus_range(grid);
    let bins = (k_max - k_min + 1) as usize;
    // 1-D shell id of every axis position (same for all axes by symmetry)
    let shell_of: Vec<usize> = (0..np)
        .map(|i| {
            let d = grid.wrap_offset(i as i64 - half).abs() as f64 * h;
            (annulus_of(d, k_min, k_max) - k_min) as usize
        })
        .collect();
    let mut values: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let mut p_prev = 1.0f64;
    for i in 0..n {
        let stride = values.len() / np;
        let exp_inner = q[i] / p_prev;
        let exp_outer = p[i] / q[i];
        let mut out = vec![0.0f64; stride];
        let mut shell_sums = vec![0.0f64; bins];
        for (rest, slot) in out.iter_mut().enumerate() {
            shell_sums.iter_mut().for_each(|s| *s = 0.0);
            for i0 in 0..np {
                shell_sums[shell_of[i0]] += values[i0 * stride + rest].powf(exp_inner);
            }
            let mut g = 0.0;
            for (bin, &s) in shell_sums.iter().enumerate() {
                if s > 0.0 {
                    let k = (k_min + bin as i32) as f64;
                    g += (k * p[i] * alpha[i]).exp2() * (s * h).powf(exp_outer);
                }
            }
            *slot = g;
        }
        values = out;
        p_prev = p[i];
    }
    Ok(values[0].powf(1.0 / p_prev))
}

/// Morrey norm: sup over grid-centered periodic balls (and the full domain)
/// of |B|^(1/r - 1/p) (sum_B |f|^p h^n)^(1/p).
pub fn morrey_norm(f: &GridFunction, p: f64, r: f64, radii: &[f64]) -> Result<f64> {
    check_exponent("p", p, true)?;
    check_exponent("r", r, true)?;
    if p > r {
        return Err(Error::InvalidParameter(format!("need p <= r, got p = {p}, r = {r}")));
    }
    let grid = f.grid();
    if p.is_infinite() {
        return discrete_lp_norm(f, f64::INFINITY);
    }
    let h = grid.spacing();
    let max_r = grid.period() / 2.0;
    let mut rs: Vec<f64> = radii.to_vec();
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup();
    for &rad in &rs {
        if !rad.is_finite() || rad < h || rad > max_r {
            return Err(Error::InvalidParameter(format!(
                "morrey radius {rad} outside [{h}, {max_r}]"
            )));
        }
    }
    let n = grid.dim();
    let total = grid.total_points();
    let vol = grid.cell_volume();
    let powered: Vec<f64> = f.values().iter().map(|v| v.abs().powf(p)).collect();
    let offs = crate::maximal::offsets_by_distance(grid);
    let mut accum = vec![0.0f64; total];
    let mut best = 0.0f64;
    let mut idx = 0usize;
    let mut count = 0usize;
    let scale_exp = 1.0 / r - 1.0 / p;
    for &rad in &rs {
        while idx < offs.len() && offs[idx].0 < rad {
            crate::maximal::add_shifted(&mut accum, &powered, grid, offs[idx].1);
            count += 1;
            idx += 1;
        }
        if count == 0 {
            continue;
        }
        let ball_vol = count as f64 * vol;
        let scale = ball_vol.powf(scale_exp);
        for &a in accum.iter() {
            let term = scale * (a * vol).powf(1.0 / p);
            if term > best {
                best = term;
            }
        }
    }
    // full-domain candidate
    let full = grid.period().powi(n as i32);
    let total_sum: f64 = powered.iter().sum();
    let term = full.powf(scale_exp) * (total_sum * vol).powf(1.0 / p);
    Ok(best.max(term))
}

/// The four growth indices of a dyadic growth function: lower/upper at zero
/// and at infinity. Each pair satisfies lower <= upper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MOIndices {
    pub lower_zero: f64,
    pub upper_zero: f64,
    pub lower_inf: f64,
    pub upper_inf: f64,
}

/// Estimates the growth indices. Power laws are returned exactly; sampled
/// specs go through a brute-force scaling-ratio estimator (64 log-spaced
/// scale factors per branch, eight dyadic reference points in each tail) and
/// need samples covering at least [2^-20, 2^20]. The estimator's finite-tail
/// bias can invert a pair by a few thousandths, so each pair is reordered
/// before it is returned.
pub fn mo_indices(omega: &OmegaSpec) -> Result<MOIndices> {
    omega.validate()?;
    match omega {
        OmegaSpec::PowerLaw { alpha } => Ok(MOIndices {
            lower_zero: *alpha,
            upper_zero: *alpha,
            lower_inf: *alpha,
            upper_inf: *alpha,
        }),
        OmegaSpec::Sampled { k_min, values } => {
            let k_max = *k_min + values.len() as i32 - 1;
            if *k_min > -20 || k_max < 20 {
                return Err(Error::InsufficientSamples(format!(
                    "need samples covering [2^-20, 2^20], got [2^{k_min}, 2^{k_max}]"
                )));
            }
            // scale factors 2^(1/8) .. 2^8, 64 log-spaced points
            let t_grid: Vec<f64> = (0..64)
                .map(|i| {
                    let e = 0.125 + (8.0 - 0.125) * i as f64 / 63.0;
                    e.exp2()
                })
                .collect();
            // reference tails: eight smallest / largest usable dyadic points,
            // leaving 8 octaves of headroom for h*t
            let lo_start = *k_min + 8;
            let hi_end = k_max - 8;
            let h_small: Vec<f64> = (lo_start..lo_start + 8).map(|e| (e as f64).exp2()).collect();
            let h_large: Vec<f64> = (hi_end - 7..=hi_end).map(|e| (e as f64).exp2()).collect();
            let mut sup_zero = f64::NEG_INFINITY;
            let mut inf_zero = f64::INFINITY;
            let mut sup_inf = f64::NEG_INFINITY;
            let mut inf_inf = f64::INFINITY;
            for &tf in &t_grid {
                // zero branch uses t in (0,1): shrink by 1/tf
                let t0 = 1.0 / tf;
                let mut hi_ratio = f64::NEG_INFINITY;
                let mut lo_ratio = f64::INFINITY;
                for &h in &h_small {
                    let ratio = omega.eval(h * t0)? / omega.eval(h)?;
                    hi_ratio = hi_ratio.max(ratio);
                    lo_ratio = lo_ratio.min(ratio);
                }
                sup_zero = sup_zero.max(hi_ratio.ln() / t0.ln());
                inf_zero = inf_zero.min(lo_ratio.ln() / t0.ln());
                // infinity branch uses t in (1, inf)
                let mut hi_ratio = f64::NEG_INFINITY;
                let mut lo_ratio = f64::INFINITY;
                for &h in &h_large {
                    let ratio = omega.eval(h * tf)? / omega.eval(h)?;
                    hi_ratio = hi_ratio.max(ratio);
                    lo_ratio = lo_ratio.min(ratio);
                }
                sup_inf = sup_inf.max(lo_ratio.ln() / tf.ln());
                inf_inf = inf_inf.min(hi_ratio.ln() / tf.ln());
            }
            Ok(MOIndices {
                lower_zero: sup_zero.min(inf_zero),
                upper_zero: inf_zero.max(sup_zero),
                lower_inf: sup_inf.min(inf_inf),
                upper_inf: inf_inf.max(sup_inf),
            })
        }
    }
}

/// One arithmetic condition of a theorem hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub description: String,
    pub holds: bool,
    /// signed distance to the threshold (positive means satisfied strictly)
    pub margin: f64,
}

/// All conditions for one space variant at order m in dimension n.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub space: String,
    pub order: usize,
    pub dim: usize,
    pub checks: Vec<HypothesisCheck>,
    pub valid: bool,
}

fn open_above(desc: String, value: f64, threshold: f64) -> HypothesisCheck {
    let margin = value - threshold;
    HypothesisCheck {
        description: desc,
        holds: margin > 0.0,
        margin,
    }
}

/// Validates the characterization-theorem hypotheses for the given space,
/// Riesz composition order m and dimension n.
pub fn range_validator(spec: &SpaceSpec, m: usize, n: usize) -> Result<ValidityReport> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("need m >= 1 and n >= 1".into()));
    }
    let low = (n as f64 - 1.0) / (n as f64 + m as f64 - 1.0);
    let mut checks = Vec::new();
    let space = spec.label();
    match spec {
        SpaceSpec::Lebesgue { p } | SpaceSpec::WeightedLebesgue { p, .. } => {
            checks.push(open_above(
                format!("p > (n-1)/(n+m-1) = {low}"),
                *p,
                low,
            ));
        }
        SpaceSpec::Lorentz { p, r } => {
            checks.push(open_above(format!("p > (n-1)/(n+m-1) = {low}"), *p, low));
            checks.push(open_above("r > 0".into(), if r.is_infinite() { f64::MAX } else { *r }, 0.0));
        }
        SpaceSpec::MixedLebesgue { p } => {
            let p_min = p.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.push(open_above(
                format!("min p_i > (n-1)/(n+m-1) = {low}"),
                p_min,
                low,
            ));
        }
        SpaceSpec::LocalHerz { p, r, omega } => {
            checks.push(open_above("p > 0".into(), *p, 0.0));
            checks.push(open_above("r > 0".into(), if r.is_infinite() { f64::MAX } else { *r }, 0.0));
            let idx = mo_indices(omega)?;
            let bound = -(n as f64) / p;
            checks.push(open_above(
                format!("lower index at zero > -n/p = {bound}"),
                idx.lower_zero,
                bound,
            ));
            checks.push(open_above(
                format!("lower index at infinity > -n/p = {bound}"),
                idx.lower_inf,
                bound,
            ));
            let upper = idx.upper_zero.max(idx.upper_inf);
            let effective = n as f64 / (upper + n as f64 / p);
            checks.push(open_above(
                format!("n/(max upper index + n/p) > (n-1)/(n+m-1) = {low}"),
                effective,
                low,
            ));
        }
        SpaceSpec::MixedHerz { alpha, p, q } => {
            if alpha.len() != p.len() || p.len() != q.len() || p.is_empty() {
                return Err(Error::InvalidParameter(
                    "alpha, p, q must have equal nonzero length".into(),
                ));
            }
            let p_min = p.iter().cloned().fold(f64::INFINITY, f64::min);
            let q_min = q.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.push(open_above(
                format!("min p_i > (n-1)/(n+m-1) = {low}"),
                p_min,
                low,
            ));
            checks.push(open_above(
                format!("min q_i > (n-1)/(n+m-1) = {low}"),
                q_min,
                low,
            ));
            for i in 0..alpha.len() {
                checks.push(open_above(
                    format!("alpha_{} > -1/q_{}", i + 1, i + 1),
                    alpha[i],
                    -1.0 / q[i],
                ));
                let s = alpha[i] + 1.0 / q[i];
                let recip = if s > 0.0 { 1.0 / s } else { f64::NEG_INFINITY };
                checks.push(open_above(
                    format!("1/(alpha_{} + 1/q_{}) > (n-1)/(n+m-1) = {low}", i + 1, i + 1),
                    recip,
                    low,
                ));
            }
        }
        SpaceSpec::Morrey { p, r } => {
            checks.push(open_above(format!("p > (n-1)/(n+m-1) = {low}"), *p, low));
            let rv = if r.is_infinite() { f64::MAX } else { *r };
            let check = HypothesisCheck {
                description: "p <= r".into(),
                holds: *p <= rv,
                margin: rv - p,
            };
            checks.push(check);
        }
    }
    let valid = checks.iter().all(|c| c.holds);
    Ok(ValidityReport {
        space,
        order: m,
        dim: n,
        checks,
        valid,
    })
}

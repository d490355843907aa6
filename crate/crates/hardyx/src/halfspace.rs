//! Conjugate-harmonic structure on the discrete half-space slab: first-order
//! harmonic vectors, higher-order gradient tensor fields, the generalized
//! Cauchy-Riemann residual, trace cancellation, sphere mean-value
//! (subharmonicity) probes and Poisson majorization.
//!
//! Coordinates are (t, x_1, ..., x_n) with t the vertical slab direction;
//! index 0 always refers to t. Spatial derivatives are exact frequency
//! multipliers, vertical derivatives are three-point finite differences on
//! the (possibly nonuniform) ladder, second order including the one-sided
//! end stencils.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{forward_spectrum, inverse_spectrum, GridFunction, TLadder, MAX_DIM};
use crate::operators::{
    conjugate_poisson_extend, poisson_extend, poisson_extend_at, ExtensionPath, HalfSpaceField,
};

/// Conjugate harmonic vector (u_0, u_1, ..., u_n) generated by boundary data:
/// u_0 is the Poisson extension, u_j the j-th conjugate Poisson extension.
#[derive(Debug, Clone)]
pub struct HarmonicVector {
    components: Vec<HalfSpaceField>,
}

impl HarmonicVector {
    pub fn from_boundary(f: &GridFunction, ladder: &TLadder) -> Result<HarmonicVector> {
        let mut components = vec![poisson_extend(f, ladder)?];
        for j in 1..=f.grid().dim() {
            components.push(conjugate_poisson_extend(f, j, ladder, ExtensionPath::Spectral)?);
        }
        Ok(HarmonicVector { components })
    }

    /// Wraps precomputed components (u_0, u_1, ..., u_n); all must share the
    /// grid and ladder and there must be dim + 1 of them.
    pub fn from_components(components: Vec<HalfSpaceField>) -> Result<HarmonicVector> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty component list".into()))?;
        let n = first.grid().dim();
        if components.len() != n + 1 {
            return Err(Error::GridMismatch(format!(
                "{} components for dimension {n} (need n + 1)",
                components.len()
            )));
        }
        let grid = *first.grid();
        let ladder = first.ladder().clone();
        for c in &components {
            if c.grid() != &grid || c.ladder() != &ladder {
                return Err(Error::GridMismatch(
                    "components disagree on grid or ladder".into(),
                ));
            }
        }
        Ok(HarmonicVector { components })
    }

    pub fn components(&self) -> &[HalfSpaceField] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &HalfSpaceField {
        &self.components[i]
    }

    pub fn grid(&self) -> &crate::grid::Grid {
        self.components[0].grid()
    }

    pub fn ladder(&self) -> &TLadder {
        self.components[0].ladder()
    }

    /// Euclidean magnitude |u(x, t)| as a scalar half-space field.
    pub fn magnitude(&self) -> HalfSpaceField {
        magnitude_of(self.components.iter().map(|c| (1.0, c)))
    }
}

/// sqrt(sum_i w_i u_i^2) across weighted half-space fields.
fn magnitude_of<'a>(fields: impl Iterator<Item = (f64, &'a HalfSpaceField)> + Clone) -> HalfSpaceField {
    let (_, first) = fields.clone().next().expect("at least one field");
    let grid = *first.grid();
    let ladder = first.ladder().clone();
    let levels = ladder.len();
    let total = grid.total_points();
    let mut slices = Vec::with_capacity(levels);
    for l in 0..levels {
        let mut acc = vec![0.0f64; total];
        for (w, f) in fields.clone() {
            for (a, &v) in acc.iter_mut().zip(f.slice(l).values()) {
                *a += w * v * v;
            }
        }
        slices.push(
            GridFunction::new(grid, acc.into_iter().map(f64::sqrt).collect())
                .expect("magnitudes are finite"),
        );
    }
    HalfSpaceField::new(grid, ladder, slices).expect("slices match ladder")
}

/// Weights of the three-point first-derivative stencil on nodes `p`,
/// evaluated at `x` (derivatives of the Lagrange basis).
fn deriv3(p: [f64; 3], x: f64) -> [f64; 3] {
    [
        (2.0 * x - p[1] - p[2]) / ((p[0] - p[1]) * (p[0] - p[2])),
        (2.0 * x - p[0] - p[2]) / ((p[1] - p[0]) * (p[1] - p[2])),
        (2.0 * x - p[0] - p[1]) / ((p[2] - p[0]) * (p[2] - p[1])),
    ]
}

/// Vertical derivative of every slice by three-point differences (one-sided
/// at the ends). Needs at least three ladder levels.
fn vertical_derivative(field: &HalfSpaceField) -> Result<Vec<Vec<f64>>> {
    let levels = field.ladder().levels();
    let count = levels.len();
    if count < 3 {
        return Err(Error::InvalidLadder(
            "vertical derivative needs at least 3 ladder levels".into(),
        ));
    }
    let total = field.grid().total_points();
    let mut out = Vec::with_capacity(count);
    for l in 0..count {
        let base = l.clamp(1, count - 2) - 1;
        let nodes = [levels[base], levels[base + 1], levels[base + 2]];
        let w = deriv3(nodes, levels[l]);
        let mut d = vec![0.0f64; total];
        for (k, &wk) in w.iter().enumerate() {
            for (slot, &v) in d.iter_mut().zip(field.slice(base + k).values()) {
                *slot += wk * v;
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// Spatial derivative of every slice along `axis` (0-based) via the exact
/// frequency multiplier 2 pi i xi.
fn spatial_derivative(field: &HalfSpaceField, axis: usize) -> Vec<Vec<f64>> {
    field
        .slices()
        .iter()
        .map(|s| {
            let spec = forward_spectrum(s).apply_multiplier(|xi| {
                Complex::new(0.0, 2.0 * std::f64::consts::PI * xi[axis])
            });
            inverse_spectrum(&spec).into_values()
        })
        .collect()
}

/// Sup norms of the generalized Cauchy-Riemann residual of a vector field:
/// the divergence sum_i du_i/dx_i and the worst antisymmetric defect
/// du_i/dx_j - du_j/dx_i, both absolute and relative to the largest partial
/// derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrResidualReport {
    pub divergence: f64,
    pub symmetry: f64,
    /// sup of |partial derivative| over all entries (normalization scale)
    pub scale: f64,
    /// max(divergence, symmetry) / scale
    pub relative: f64,
}

/// Measures how well the vector satisfies the conjugate-system equations.
pub fn cauchy_riemann_residual(v: &HarmonicVector) -> Result<CrResidualReport> {
    let grid = *v.grid();
    let n = grid.dim();
    let total = grid.total_points();
    let levels = v.ladder().len();
    // partials[i][mu][l]: derivative of component i along coordinate mu
    // (mu = 0 is t), at ladder level l
    let mut partials: Vec<Vec<Vec<Vec<f64>>>> = Vec::with_capacity(n + 1);
    for comp in v.components() {
        let mut per_coord = vec![vertical_derivative(comp)?];
        for axis in 0..n {
            per_coord.push(spatial_derivative(comp, axis));
        }
        partials.push(per_coord);
    }
    let mut scale = 0.0f64;
    for comp in &partials {
        for coord in comp {
            for slice in coord {
                for &x in slice {
                    scale = scale.max(x.abs());
                }
            }
        }
    }
    let mut divergence = 0.0f64;
    let mut symmetry = 0.0f64;
    for l in 0..levels {
        for x in 0..total {
            let mut div = 0.0;
            for i in 0..=n {
                div += partials[i][i][l][x];
            }
            divergence = divergence.max(div.abs());
            for i in 0..=n {
                for j in (i + 1)..=n {
                    let defect = partials[i][j][l][x] - partials[j][i][l][x];
                    symmetry = symmetry.max(defect.abs());
                }
            }
        }
    }
    let relative = if scale > 0.0 {
        divergence.max(symmetry) / scale
    } else {
        0.0
    };
    Ok(CrResidualReport {
        divergence,
        symmetry,
        scale,
        relative,
    })
}

/// Symmetric tensor field of order m over the coordinates (t, x_1, ..., x_n):
/// one half-space field per sorted multi-index alpha with |alpha| = m,
/// built as the m-th partial derivatives of the Poisson extension of the
/// boundary data (frequency factors (-2 pi |xi|)^alpha_0 prod (2 pi i xi_j)^alpha_j).
#[derive(Debug, Clone)]
pub struct TensorField {
    order: usize,
    components: Vec<(Vec<u32>, HalfSpaceField)>,
}

/// All multi-indices over `coords` coordinates with total order `m`,
/// lexicographic.
pub fn multi_indices(coords: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; coords];
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v;
            rec(pos + 1, left - v, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, m as u32, &mut cur, &mut out);
    out
}

/// Number of ordered index tuples collapsing to the multi-index: m!/alpha!.
pub fn multiplicity(alpha: &[u32]) -> f64 {
    let m: u32 = alpha.iter().sum();
    let mut v = 1.0f64;
    let mut k = 1u32;
    for &a in alpha {
        for j in 1..=a {
            // build m!/prod(alpha_i!) incrementally as binomial factors
            v = v * k as f64 / j as f64;
            k += 1;
        }
    }
    let _ = m;
    v
}

impl TensorField {
    /// m-th gradient of the Poisson extension of `f` across the ladder.
    pub fn gradient_extension(
        f: &GridFunction,
        m: usize,
        ladder: &TLadder,
    ) -> Result<TensorField> {
        if m == 0 {
            return Err(Error::InvalidParameter("tensor order must be >= 1".into()));
        }
        let grid = *f.grid();
        let n = grid.dim();
        let spec = forward_spectrum(f);
        let indices = multi_indices(n + 1, m);
        let mut components = Vec::with_capacity(indices.len());
        use std::f64::consts::PI;
        for alpha in indices {
            let mut slices = Vec::with_capacity(ladder.len());
            for &t in ladder.levels() {
                let s = spec.apply_multiplier(|xi| {
                    let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let mut mult = Complex::new((-2.0 * PI * r).powi(alpha[0] as i32), 0.0);
                    for (j, &a) in alpha.iter().enumerate().skip(1) {
                        for _ in 0..a {
                            mult *= Complex::new(0.0, 2.0 * PI * xi[j - 1]);
                        }
                    }
                    mult * Complex::new((-2.0 * PI * t * r).exp(), 0.0)
                });
                slices.push(inverse_spectrum(&s));
            }
            components.push((alpha, HalfSpaceField::new(grid, ladder.clone(), slices)?));
        }
        Ok(TensorField {
            order: m,
            components,
        })
    }

    /// Wraps explicit components; there must be exactly one field per
    /// multi-index of order `m` over n + 1 coordinates, listed in the
    /// canonical order of [`multi_indices`], all on one grid and ladder.
    pub fn from_components(m: usize, components: Vec<(Vec<u32>, HalfSpaceField)>) -> Result<TensorField> {
        if m == 0 {
            return Err(Error::InvalidParameter("tensor order must be >= 1".into()));
        }
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty component list".into()))?;
        let grid = *first.1.grid();
        let ladder = first.1.ladder().clone();
        let expected = multi_indices(grid.dim() + 1, m);
        if components.len() != expected.len() {
            return Err(Error::InvalidParameter(format!(
                "{} components for order {m} in dimension {} (need {})",
                components.len(),
                grid.dim(),
                expected.len()
            )));
        }
        for ((alpha, f), want) in components.iter().zip(&expected) {
            if alpha != want {
                return Err(Error::InvalidParameter(format!(
                    "component multi-index {alpha:?} out of place (expected {want:?})"
                )));
            }
            if f.grid() != &grid || f.ladder() != &ladder {
                return Err(Error::GridMismatch(
                    "tensor components disagree on grid or ladder".into(),
                ));
            }
        }
        Ok(TensorField {
            order: m,
            components,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn components(&self) -> &[(Vec<u32>, HalfSpaceField)] {
        &self.components
    }

    pub fn component(&self, alpha: &[u32]) -> Option<&HalfSpaceField> {
        self.components
            .iter()
            .find(|(a, _)| a.as_slice() == alpha)
            .map(|(_, f)| f)
    }

    pub fn grid(&self) -> &crate::grid::Grid {
        self.components[0].1.grid()
    }

    pub fn ladder(&self) -> &TLadder {
        self.components[0].1.ladder()
    }

    /// |F(x, t)| summed over ordered index tuples: each stored component
    /// enters with its multiplicity m!/alpha!.
    pub fn magnitude(&self) -> HalfSpaceField {
        let weighted: Vec<(f64, &HalfSpaceField)> = self
            .components
            .iter()
            .map(|(a, f)| (multiplicity(a), f))
            .collect();
        magnitude_of(weighted.iter().map(|&(w, f)| (w, f)))
    }
}

/// Worst contraction residue of a tensor field: for every multi-index beta of
/// order m - 2 the trace sum_mu F_(beta + 2 e_mu) must vanish (the extension
/// is harmonic), so the sup of |trace| relative to the largest component
/// measures pure floating-point cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceReport {
    pub worst_trace: f64,
    pub scale: f64,
    pub relative: f64,
}

pub fn symmetry_trace_check(field: &TensorField) -> Result<TraceReport> {
    let m = field.order();
    let grid = *field.grid();
    let coords = grid.dim() + 1;
    let total = grid.total_points();
    let levels = field.ladder().len();
    let mut scale = 0.0f64;
    for (_, comp) in field.components() {
        for s in comp.slices() {
            for &v in s.values() {
                scale = scale.max(v.abs());
            }
        }
    }
    if m < 2 {
        // a rank-one tensor has no index pair to contract; it is of trace
        // zero by convention
        return Ok(TraceReport {
            worst_trace: 0.0,
            scale,
            relative: 0.0,
        });
    }
    let mut worst = 0.0f64;
    for beta in multi_indices(coords, m - 2) {
        let mut parts = Vec::with_capacity(coords);
        for mu in 0..coords {
            let mut alpha = beta.clone();
            alpha[mu] += 2;
            parts.push(
                field
                    .component(&alpha)
                    .ok_or_else(|| Error::InvalidParameter("missing tensor component".into()))?,
            );
        }
        for l in 0..levels {
            for x in 0..total {
                let tr: f64 = parts.iter().map(|f| f.slice(l).values()[x]).sum();
                worst = worst.max(tr.abs());
            }
        }
    }
    Ok(TraceReport {
        worst_trace: worst,
        scale,
        relative: if scale > 0.0 { worst / scale } else { 0.0 },
    })
}

/// Periodic multilinear interpolation of one slice at a physical point.
fn multilinear_periodic(slice: &GridFunction, x: &[f64]) -> f64 {
    let grid = slice.grid();
    let n = grid.dim();
    let h = grid.spacing();
    let mut base = [0i64; MAX_DIM];
    let mut frac = [0.0f64; MAX_DIM];
    for a in 0..n {
        let u = x[a] / h;
        let fl = u.floor();
        base[a] = fl as i64;
        frac[a] = u - fl;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut idx = [0i64; MAX_DIM];
        for a in 0..n {
            if corner >> a & 1 == 1 {
                w *= frac[a];
                idx[a] = base[a] + 1;
            } else {
                w *= 1.0 - frac[a];
                idx[a] = base[a];
            }
        }
        if w != 0.0 {
            acc += w * slice.values()[grid.flat_index(&idx[..n])];
        }
    }
    acc
}

/// Value of a half-space field at an arbitrary slab point: multilinear in
/// space, linear between ladder levels in t.
pub fn interpolate_value(field: &HalfSpaceField, x: &[f64], t: f64) -> Result<f64> {
    let levels = field.ladder().levels();
    let lo = levels[0];
    let hi = *levels.last().unwrap();
    if !(t >= lo && t <= hi) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside ladder range [{lo}, {hi}]"
        )));
    }
    let i = match levels.iter().position(|&l| l >= t) {
        Some(0) | None => return Ok(multilinear_periodic(field.slice(0), x)),
        Some(i) => i,
    };
    if levels[i] == t {
        return Ok(multilinear_periodic(field.slice(i), x));
    }
    let w = (t - levels[i - 1]) / (levels[i] - levels[i - 1]);
    let a = multilinear_periodic(field.slice(i - 1), x);
    let b = multilinear_periodic(field.slice(i), x);
    Ok((1.0 - w) * a + w * b)
}

/// Unit directions sampling the sphere in the (x, t) slab coordinates:
/// equally spaced on the circle for n = 1, a Fibonacci lattice on the
/// 2-sphere for n = 2.
fn sphere_directions(n: usize, count: usize) -> Result<Vec<([f64; MAX_DIM], f64)>> {
    let mut dirs = Vec::with_capacity(count);
    match n {
        1 => {
            for i in 0..count {
                let phi = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                let mut s = [0.0; MAX_DIM];
                s[0] = phi.cos();
                dirs.push((s, phi.sin()));
            }
        }
        2 => {
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            for i in 0..count {
                let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                let mut s = [0.0; MAX_DIM];
                s[0] = r * phi.cos();
                s[1] = r * phi.sin();
                dirs.push((s, z));
            }
        }
        _ => {
            return Err(Error::UnsupportedVariant(
                "sphere probe implemented for n = 1 and n = 2".into(),
            ))
        }
    }
    Ok(dirs)
}

/// Outcome of the sphere mean-value probe on g = |field|^q.
#[derive(Debug, Clone, PartialEq)]
pub struct SubharmonicReport {
    /// largest positive defect g(center) - mean_sphere(g) over all spheres
    pub worst_violation: f64,
    /// sup of g over the slab (normalization scale)
    pub scale: f64,
    pub spheres: usize,
}

/// Tests the sub-mean-value property of g = sign(v)|v|^q applied to the field
/// on spheres of the given radius centered at (lattice point, t); a
/// subharmonic g satisfies g(center) <= mean over `sphere_samples`
/// quasi-uniform directions, so positive defects are violations. The power is
/// odd so that sign-definite inputs (e.g. a concave negative bump) keep their
/// shape. Every sphere must fit inside the ladder slab.
pub fn subharmonic_mean_value_check(
    field: &HalfSpaceField,
    q: f64,
    centers: &[(usize, f64)],
    radius: f64,
    sphere_samples: usize,
) -> Result<SubharmonicReport> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent q = {q} must be positive")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sphere radius {radius} must be positive"
        )));
    }
    if centers.is_empty() {
        return Err(Error::InvalidParameter("no sphere centers".into()));
    }
    if sphere_samples < 8 {
        return Err(Error::InsufficientSamples(format!(
            "{sphere_samples} sphere directions (need >= 8)"
        )));
    }
    let grid = *field.grid();
    let n = grid.dim();
    let levels = field.ladder().levels();
    let (t_min, t_max) = (levels[0], *levels.last().unwrap());
    let g = field.map(|v| v.signum() * v.abs().powf(q));
    let mut scale = 0.0f64;
    for s in g.slices() {
        for &v in s.values() {
            scale = scale.max(v.abs());
        }
    }
    let dirs = sphere_directions(n, sphere_samples)?;
    let mut worst = 0.0f64;
    for &(center, t_c) in centers {
        if center >= grid.total_points() {
            return Err(Error::InvalidParameter(format!(
                "sphere center index {center} out of range"
            )));
        }
        if t_c - radius < t_min || t_c + radius > t_max {
            return Err(Error::SphereOutsideSlab {
                center_t: t_c,
                radius,
                t_min,
                t_max,
            });
        }
        let x_c = grid.point(center);
        let center_value = interpolate_value(&g, &x_c[..n], t_c)?;
        let mut mean = 0.0;
        for (sp, vt) in &dirs {
            let mut x = [0.0f64; MAX_DIM];
            for a in 0..n {
                x[a] = x_c[a] + radius * sp[a];
            }
            mean += interpolate_value(&g, &x[..n], t_c + radius * vt)?;
        }
        mean /= dirs.len() as f64;
        worst = worst.max(center_value - mean);
    }
    Ok(SubharmonicReport {
        worst_violation: worst,
        scale,
        spheres: centers.len(),
    })
}

/// Outcome of the Poisson majorization probe.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationReport {
    /// signed max over x of |F(x, t + a)|^q - (P_t * g_a^q)(x); values <= 0
    /// mean the majorization holds everywhere
    pub violation: f64,
    /// sup of g_a^q (normalization scale)
    pub scale: f64,
    pub relative: f64,
}

/// Checks the harmonic majorization |F(., t + a)|^q <= P_t * g_a^q, where
/// g_a = |F(., t_1 + a)| stands in for the boundary limit of the shifted
/// vector and t_1 is the smallest ladder level. Both t + a and t_1 + a must
/// lie within the ladder (values off the stored levels are interpolated
/// linearly, so a ladder with t_1 much smaller than the grid spacing keeps
/// the surrogate error below the probe tolerance). The reported violation
/// keeps its sign: large t flattens the right side toward the mean of g_a^q
/// and drives the violation strongly negative.
pub fn majorization_check(
    v: &HarmonicVector,
    q: f64,
    a: f64,
    t: f64,
) -> Result<MajorizationReport> {
    let n = v.grid().dim();
    let q_low = (n as f64 - 1.0) / n as f64;
    if !q.is_finite() || q < q_low || q > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "exponent q = {q} outside [{q_low}, 1] (n = {n})"
        )));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "level shift a = {a} must be nonnegative"
        )));
    }
    if !t.is_finite() || !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kernel scale t = {t} must be positive"
        )));
    }
    let magnitude = v.magnitude();
    let levels = magnitude.ladder().levels();
    let t1 = levels[0];
    let top = *levels.last().unwrap();
    for (label, level) in [("t_1 + a", t1 + a), ("t + a", t + a)] {
        if level > top * (1.0 + 1e-12) {
            return Err(Error::InvalidLadder(format!(
                "{label} = {level} exceeds the top ladder level {top}"
            )));
        }
    }
    let g_a_q = magnitude.interpolate_level(t1 + a)?.map(|g| g.powf(q));
    let lhs = magnitude.interpolate_level(t + a)?.map(|g| g.powf(q));
    let majorant = poisson_extend_at(&g_a_q, t)?;
    let scale = g_a_q.values().iter().cloned().fold(0.0, f64::max);
    let violation = lhs
        .values()
        .iter()
        .zip(majorant.values())
        .map(|(&l, &r)| l - r)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(MajorizationReport {
        violation,
        scale,
        relative: if scale > 0.0 { violation / scale } else { 0.0 },
    })
}

//! Maximal operators over periodic balls and cones: Hardy-Littlewood,
//! powered, radial, nontangential, Poisson, Peetre-type and grand maximal
//! functions, plus the vector-valued maximal probe.
//!
//! Ball conventions: a discrete ball B(x, r) collects the cells whose centers
//! lie at periodic distance strictly less than r from x, and its volume is
//! the counted cell volume (count * h^n). The radius-h ball is therefore the
//! cell itself, which keeps M(f) >= |f| pointwise.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{forward_spectrum, inverse_spectrum, Grid, GridFunction, TLadder, MAX_DIM};
use crate::operators::HalfSpaceField;
use crate::spaces::{quasi_norm, SpaceSpec};

/// Validated, ascending set of ball radii in [h, L/2].
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSet {
    radii: Vec<f64>,
}

impl RadiusSet {
    pub fn new(mut radii: Vec<f64>, grid: &Grid) -> Result<RadiusSet> {
        if radii.is_empty() {
            return Err(Error::InvalidParameter("empty radius set".into()));
        }
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
        let h = grid.spacing();
        let max = grid.period() / 2.0;
        for &r in &radii {
            if !r.is_finite() || r < h || r > max {
                return Err(Error::InvalidParameter(format!(
                    "radius {r} outside [{h}, {max}]"
                )));
            }
        }
        Ok(RadiusSet { radii })
    }

    /// Dyadic radii h, 2h, 4h, ... up to L/2 merged with the first 16
    /// multiples of h.
    pub fn default_for(grid: &Grid) -> RadiusSet {
        RadiusSet::new(crate::grid::default_ball_radii(grid), grid)
            .expect("default radii are valid")
    }

    /// Every multiple of h up to L/2 (exhaustive; for oracle-grade probes).
    pub fn dense_for(grid: &Grid) -> RadiusSet {
        let h = grid.spacing();
        let count = grid.points_per_axis() / 2;
        let radii = (1..=count).map(|m| m as f64 * h).collect();
        RadiusSet::new(radii, grid).expect("dense radii are valid")
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
}

/// All lattice offsets sorted by their minimum-image distance from zero.
pub(crate) fn offsets_by_distance(grid: &Grid) -> Vec<(f64, usize)> {
    let h = grid.spacing();
    let n = grid.dim();
    let mut v: Vec<(f64, usize)> = (0..grid.total_points())
        .map(|d| {
            let c = grid.coords(d);
            let mut s = 0.0;
            for axis in 0..n {
                let w = grid.wrap_offset(c[axis] as i64) as f64 * h;
                s += w * w;
            }
            (s.sqrt(), d)
        })
        .collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    v
}

/// dst[x] += src[(x - d) mod N] for a flat offset d.
pub(crate) fn add_shifted(dst: &mut [f64], src: &[f64], grid: &Grid, d: usize) {
    let np = grid.points_per_axis();
    match grid.dim() {
        1 => {
            for (x, slot) in dst.iter_mut().enumerate() {
                *slot += src[(x + np - d) % np];
            }
        }
        2 => {
            let (d0, d1) = (d / np, d % np);
            for x0 in 0..np {
                let r0 = ((x0 + np - d0) % np) * np;
                let o0 = x0 * np;
                for x1 in 0..np {
                    dst[o0 + x1] += src[r0 + (x1 + np - d1) % np];
                }
            }
        }
        _ => {
            let d2 = d % np;
            let d1 = (d / np) % np;
            let d0 = d / (np * np);
            for x0 in 0..np {
                let r0 = ((x0 + np - d0) % np) * np;
                let o0 = x0 * np;
                for x1 in 0..np {
                    let r1 = (r0 + (x1 + np - d1) % np) * np;
                    let o1 = (o0 + x1) * np;
                    for x2 in 0..np {
                        dst[o1 + x2] += src[r1 + (x2 + np - d2) % np];
                    }
                }
            }
        }
    }
}

/// dst[x] = max(dst[x], w * src[(x - d) mod N]).
fn max_shifted(dst: &mut [f64], src: &[f64], grid: &Grid, d: usize, w: f64) {
    let np = grid.points_per_axis();
    match grid.dim() {
        1 => {
            for (x, slot) in dst.iter_mut().enumerate() {
                let v = w * src[(x + np - d) % np];
                if v > *slot {
                    *slot = v;
                }
            }
        }
        2 => {
            let (d0, d1) = (d / np, d % np);
            for x0 in 0..np {
                let r0 = ((x0 + np - d0) % np) * np;
                let o0 = x0 * np;
                for x1 in 0..np {
                    let v = w * src[r0 + (x1 + np - d1) % np];
                    let slot = &mut dst[o0 + x1];
                    if v > *slot {
                        *slot = v;
                    }
                }
            }
        }
        _ => {
            let d2 = d % np;
            let d1 = (d / np) % np;
            let d0 = d / (np * np);
            for x0 in 0..np {
                let r0 = ((x0 + np - d0) % np) * np;
                let o0 = x0 * np;
                for x1 in 0..np {
                    let r1 = (r0 + (x1 + np - d1) % np) * np;
                    let o1 = (o0 + x1) * np;
                    for x2 in 0..np {
                        let v = w * src[r1 + (x2 + np - d2) % np];
                        let slot = &mut dst[o1 + x2];
                        if v > *slot {
                            *slot = v;
                        }
                    }
                }
            }
        }
    }
}

/// Hardy-Littlewood maximal function: the largest ball average of |f| over
/// the given radii.
pub fn hl_maximal(f: &GridFunction, radii: &RadiusSet) -> GridFunction {
    let grid = *f.grid();
    let absf: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    let sorted = offsets_by_distance(&grid);
    let mut accum = vec![0.0; grid.total_points()];
    let mut out = vec![0.0; grid.total_points()];
    let mut idx = 0usize;
    let mut count = 0usize;
    for &r in radii.radii() {
        while idx < sorted.len() && sorted[idx].0 < r {
            add_shifted(&mut accum, &absf, &grid, sorted[idx].1);
            count += 1;
            idx += 1;
        }
        if count == 0 {
            continue;
        }
        let inv = 1.0 / count as f64;
        for (o, &a) in out.iter_mut().zip(accum.iter()) {
            let v = a * inv;
            if v > *o {
                *o = v;
            }
        }
    }
    GridFunction::new(grid, out).expect("maximal values are finite")
}

/// Powered maximal operator M^(theta) f = (M(|f|^theta))^(1/theta).
pub fn powered_maximal(f: &GridFunction, theta: f64, radii: &RadiusSet) -> Result<GridFunction> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "power theta = {theta} must be positive and finite"
        )));
    }
    let powered = f.map(|v| v.abs().powf(theta));
    Ok(hl_maximal(&powered, radii).map(|v| v.powf(1.0 / theta)))
}

/// Smooth test profile known through its Fourier transform (for spectral
/// dilation) and its spatial values (for seminorm estimates).
#[derive(Debug, Clone, PartialEq)]
pub enum Template {
    /// exp(-pi |x|^2 / w^2); transform w^n exp(-pi w^2 |xi|^2)
    Gaussian { width: f64 },
    /// Poisson profile at unit scale; transform exp(-2 pi |xi|)
    Poisson,
    /// partial derivative of the Gaussian, one order per axis
    GaussianDerivative { width: f64, orders: [u32; MAX_DIM] },
}

impl Template {
    /// Fourier transform evaluated at a physical frequency.
    pub fn hat(&self, xi: &[f64], n: usize) -> Complex<f64> {
        use std::f64::consts::PI;
        let r2: f64 = xi.iter().map(|v| v * v).sum();
        match self {
            Template::Gaussian { width } => {
                let w = *width;
                Complex::new(w.powi(n as i32) * (-PI * w * w * r2).exp(), 0.0)
            }
            Template::Poisson => Complex::new((-2.0 * PI * r2.sqrt()).exp(), 0.0),
            Template::GaussianDerivative { width, orders } => {
                let w = *width;
                let mut m = Complex::new(w.powi(n as i32) * (-PI * w * w * r2).exp(), 0.0);
                for (axis, &ord) in orders.iter().enumerate().take(n) {
                    for _ in 0..ord {
                        m *= Complex::new(0.0, 2.0 * PI * xi[axis]);
                    }
                }
                m
            }
        }
    }

    /// Integral of the profile (the transform at zero frequency).
    pub fn integral(&self, n: usize) -> f64 {
        self.hat(&vec![0.0; n], n).re
    }

    /// Spatial value at x.
    pub fn spatial(&self, x: &[f64], n: usize) -> f64 {
        use std::f64::consts::PI;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            Template::Gaussian { width } => (-PI * r2 / (width * width)).exp(),
            Template::Poisson => {
                let c = crate::operators::poisson_constant(n).unwrap_or(1.0 / PI);
                c / (1.0 + r2).powf((n as f64 + 1.0) / 2.0)
            }
            Template::GaussianDerivative { width, orders } => {
                let a = PI / (width * width);
                let mut v = 1.0;
                for (axis, &ord) in orders.iter().enumerate().take(n) {
                    v *= gaussian_derivative_1d(a, ord, x[axis]);
                }
                v
            }
        }
    }
}

/// k-th derivative of exp(-a x^2) via the Hermite recursion
/// d^k/dx^k exp(-a x^2) = (-1)^k a^(k/2) H_k(sqrt(a) x) exp(-a x^2).
fn gaussian_derivative_1d(a: f64, k: u32, x: f64) -> f64 {
    let z = a.sqrt() * x;
    let mut h_prev = 1.0;
    let mut h = 2.0 * z;
    if k == 0 {
        return (-a * x * x).exp();
    }
    for m in 1..k {
        let next = 2.0 * z * h - 2.0 * m as f64 * h_prev;
        h_prev = h;
        h = next;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * a.powf(k as f64 / 2.0) * h * (-a * x * x).exp()
}

/// Radial maximal function sup_t |phi_t * f| over the ladder; the dilation
/// acts spectrally through hat(t xi). The profile must have nonzero integral.
pub fn radial_maximal(
    f: &GridFunction,
    template: &Template,
    ladder: &TLadder,
) -> Result<GridFunction> {
    let n = f.grid().dim();
    let integral = template.integral(n);
    if integral.abs() < 1e-12 {
        return Err(Error::ZeroMeanTemplate { integral });
    }
    let spec = forward_spectrum(f);
    let mut out = vec![0.0; f.grid().total_points()];
    for &t in ladder.levels() {
        let s = spec.apply_multiplier(|xi| {
            let scaled: Vec<f64> = xi.iter().map(|v| t * v).collect();
            template.hat(&scaled, n)
        });
        let conv = inverse_spectrum(&s);
        for (o, &v) in out.iter_mut().zip(conv.values()) {
            let v = v.abs();
            if v > *o {
                *o = v;
            }
        }
    }
    GridFunction::new(*f.grid(), out)
}

/// Nontangential supremum u*(x) = sup { |u(y, t)| : dist(y, x) < t } over the
/// field's own ladder (cone aperture one).
pub fn nontangential_maximal(u: &HalfSpaceField) -> GridFunction {
    let grid = *u.grid();
    let sorted = offsets_by_distance(&grid);
    let mut out = vec![0.0; grid.total_points()];
    for (l, &t) in u.ladder().levels().iter().enumerate() {
        let abs_slice: Vec<f64> = u.slice(l).values().iter().map(|v| v.abs()).collect();
        for &(dist, d) in sorted.iter() {
            if dist >= t {
                break;
            }
            max_shifted(&mut out, &abs_slice, &grid, d, 1.0);
        }
    }
    GridFunction::new(grid, out).expect("maximal values are finite")
}

/// Poisson maximal function: nontangential supremum of the Poisson extension.
pub fn poisson_maximal(f: &GridFunction, ladder: &TLadder) -> Result<GridFunction> {
    Ok(nontangential_maximal(&crate::operators::poisson_extend(f, ladder)?))
}

/// Peetre-type maximal function
/// sup over (y, t) of |phi_t * f(x - y)| / (1 + |y|/t)^b.
pub fn petree_maximal(
    f: &GridFunction,
    template: &Template,
    b: f64,
    ladder: &TLadder,
) -> Result<GridFunction> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "decay exponent b = {b} must be positive and finite"
        )));
    }
    let grid = *f.grid();
    let n = grid.dim();
    let spec = forward_spectrum(f);
    let sorted = offsets_by_distance(&grid);
    let mut out = vec![0.0; grid.total_points()];
    for &t in ladder.levels() {
        let s = spec.apply_multiplier(|xi| {
            let scaled: Vec<f64> = xi.iter().map(|v| t * v).collect();
            template.hat(&scaled, n)
        });
        let conv = inverse_spectrum(&s);
        let abs_conv: Vec<f64> = conv.values().iter().map(|v| v.abs()).collect();
        for &(dist, d) in sorted.iter() {
            let w = (1.0 + dist / t).powf(-b);
            max_shifted(&mut out, &abs_conv, &grid, d, w);
        }
    }
    GridFunction::new(grid, out)
}

/// Dictionary of normalized test profiles used by the grand maximal probe.
/// Each entry stores the profile together with its seminorm estimate; the
/// profiles are applied divided by that estimate.
#[derive(Debug, Clone)]
pub struct TestDictionary {
    order: usize,
    entries: Vec<(Template, f64)>,
}

impl TestDictionary {
    /// Gaussians and their derivatives up to total order min(order-1, 2) at
    /// widths 1/2, 1 and 2, each normalized by a sampled seminorm estimate.
    pub fn gaussian(order: usize, n: usize) -> Result<TestDictionary> {
        if order == 0 || n == 0 || n > MAX_DIM {
            return Err(Error::InvalidParameter(
                "dictionary needs order >= 1 and n in 1..=3".into(),
            ));
        }
        let max_deriv = (order - 1).min(2) as u32;
        let mut entries = Vec::new();
        for &w in &[0.5, 1.0, 2.0] {
            for orders in derivative_orders(n, max_deriv) {
                let template = if orders.iter().all(|&o| o == 0) {
                    Template::Gaussian { width: w }
                } else {
                    Template::GaussianDerivative { width: w, orders }
                };
                let p = estimate_seminorm(&template, order, n);
                if p > 0.0 && p.is_finite() {
                    entries.push((template, p));
                }
            }
        }
        Ok(TestDictionary { order, entries })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[(Template, f64)] {
        &self.entries
    }
}

fn derivative_orders(n: usize, max_total: u32) -> Vec<[u32; MAX_DIM]> {
    let mut out = Vec::new();
    let mut cur = [0u32; MAX_DIM];
    fn rec(axis: usize, n: usize, left: u32, cur: &mut [u32; MAX_DIM], out: &mut Vec<[u32; MAX_DIM]>) {
        if axis == n {
            out.push(*cur);
            return;
        }
        for v in 0..=left {
            cur[axis] = v;
            rec(axis + 1, n, left - v, cur, out);
        }
        cur[axis] = 0;
    }
    rec(0, n, max_total, &mut cur, &mut out);
    out
}

/// Sampled estimate of the Schwartz seminorm
/// sum over |alpha| < order of sup_x (1 + |x|)^order |d^alpha phi(x)|,
/// with derivatives capped at total order two.
pub fn estimate_seminorm(template: &Template, order: usize, n: usize) -> f64 {
    let max_deriv = (order.saturating_sub(1)).min(2) as u32;
    let mut total = 0.0;
    for orders in derivative_orders(n, max_deriv) {
        let derived = apply_orders(template, &orders, n);
        total += sup_weighted(&derived, order, n);
    }
    total
}

fn sup_weighted(template: &Template, order: usize, n: usize) -> f64 {
    let reach = 12.0;
    let steps = match n {
        1 => 801,
        2 => 161,
        _ => 41,
    };
    let mut sup = 0.0f64;
    let mut x = vec![0.0; n];
    let mut idx = vec![0usize; n];
    'outer: loop {
        for axis in 0..n {
            x[axis] = -reach + 2.0 * reach * idx[axis] as f64 / (steps - 1) as f64;
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let v = (1.0 + r).powi(order as i32) * template.spatial(&x, n).abs();
        if v > sup {
            sup = v;
        }
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < steps {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == n {
                break 'outer;
            }
        }
    }
    sup
}

fn apply_orders(template: &Template, orders: &[u32; MAX_DIM], n: usize) -> Template {
    if orders.iter().take(n).all(|&o| o == 0) {
        return template.clone();
    }
    match template {
        Template::Gaussian { width } => Template::GaussianDerivative {
            width: *width,
            orders: *orders,
        },
        Template::GaussianDerivative { width, orders: base } => {
            let mut merged = *base;
            for axis in 0..n {
                merged[axis] += orders[axis];
            }
            Template::GaussianDerivative {
                width: *width,
                orders: merged,
            }
        }
        Template::Poisson => Template::Poisson,
    }
}

/// Grand maximal probe: the largest cone supremum of |phi_t * f| over the
/// dictionary, with each profile divided by its seminorm estimate.
pub fn grand_maximal(
    f: &GridFunction,
    dict: &TestDictionary,
    ladder: &TLadder,
) -> Result<GridFunction> {
    if dict.entries.is_empty() {
        return Err(Error::InvalidParameter("empty dictionary".into()));
    }
    let grid = *f.grid();
    let n = grid.dim();
    let spec = forward_spectrum(f);
    let sorted = offsets_by_distance(&grid);
    let mut out = vec![0.0; grid.total_points()];
    for (template, p) in &dict.entries {
        let inv_p = 1.0 / p;
        for &t in ladder.levels() {
            let s = spec.apply_multiplier(|xi| {
                let scaled: Vec<f64> = xi.iter().map(|v| t * v).collect();
                template.hat(&scaled, n) * inv_p
            });
            let conv = inverse_spectrum(&s);
            let abs_conv: Vec<f64> = conv.values().iter().map(|v| v.abs()).collect();
            for &(dist, d) in sorted.iter() {
                if dist >= t {
                    break;
                }
                max_shifted(&mut out, &abs_conv, &grid, d, 1.0);
            }
        }
    }
    GridFunction::new(grid, out)
}

/// Exponent pair for the vector-valued maximal probe; requires
/// 0 < theta < s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionParams {
    pub theta: f64,
    pub s: f64,
}

impl AssumptionParams {
    pub fn new(theta: f64, s: f64) -> Result<AssumptionParams> {
        if !(theta > 0.0 && theta < s) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "need 0 < theta < s < inf, got theta = {theta}, s = {s}"
            )));
        }
        Ok(AssumptionParams { theta, s })
    }
}

/// Outcome of the vector-valued maximal probe.
#[derive(Debug, Clone, PartialEq)]
pub struct FsProbeReport {
    /// quasi-norm of the l^s aggregate of the powered maximal functions
    pub lhs: f64,
    /// quasi-norm of the l^s aggregate of the inputs
    pub rhs: f64,
    /// lhs / rhs
    pub ratio: f64,
}

/// Measures || (sum_j (M^(theta) f_j)^s)^(1/s) ||_X against
/// || (sum_j |f_j|^s)^(1/s) ||_X on a finite family.
pub fn fs_vector_probe(
    members: &[GridFunction],
    params: &AssumptionParams,
    space: &SpaceSpec,
    radii: &RadiusSet,
) -> Result<FsProbeReport> {
    let first = members
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty family".into()))?;
    let grid = *first.grid();
    for m in members {
        if m.grid() != &grid {
            return Err(Error::GridMismatch("family members on different grids".into()));
        }
    }
    let s = params.s;
    let mut lhs_agg = vec![0.0; grid.total_points()];
    let mut rhs_agg = vec![0.0; grid.total_points()];
    for m in members {
        let mf = powered_maximal(m, params.theta, radii)?;
        for (acc, &v) in lhs_agg.iter_mut().zip(mf.values()) {
            *acc += v.powf(s);
        }
        for (acc, &v) in rhs_agg.iter_mut().zip(m.values()) {
            *acc += v.abs().powf(s);
        }
    }
    let inv_s = 1.0 / s;
    let lhs_f = GridFunction::new(grid, lhs_agg.into_iter().map(|v| v.powf(inv_s)).collect())?;
    let rhs_f = GridFunction::new(grid, rhs_agg.into_iter().map(|v| v.powf(inv_s)).collect())?;
    let lhs = quasi_norm(&lhs_f, space)?;
    let rhs = quasi_norm(&rhs_f, space)?;
    Ok(FsProbeReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

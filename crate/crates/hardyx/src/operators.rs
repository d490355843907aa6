//! Singular integral and semigroup operators: Riesz transforms, Poisson and
//! conjugate Poisson kernels and extensions, and their composition.
//!
//! Primary paths are Fourier multipliers on the unitary spectrum:
//!   Riesz      R_j : -i xi_j / |xi|          (zero at xi = 0)
//!   Poisson    P_t : exp(-2 pi t |xi|)
//!   conjugate  Q_t^(j) : -i (xi_j/|xi|) exp(-2 pi t |xi|)
//!
//! Oracle paths are direct lattice quadratures against the spatial kernels.
//! On the torus the spatial kernels are the periodizations of their
//! whole-space counterparts; for n = 1 these have exact closed forms
//! (Poisson: sinh(a)/(L(cosh a - cos th)), conjugate: sin(th)/(L(cosh a - cos th)),
//! Riesz: cot(pi y / L)/L with a = 2 pi t/L, th = 2 pi y/L), and for n >= 2
//! they are computed by summing lattice images directly.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{
    forward_spectrum, inverse_spectrum, Grid, GridFunction, TLadder, MAX_DIM,
};

/// Normalization constant c_(n) = Gamma((n+1)/2) / pi^((n+1)/2) of the
/// Poisson and Riesz kernels.
pub fn poisson_constant(n: usize) -> Result<f64> {
    match n {
        // Gamma(1) = 1, Gamma(3/2) = sqrt(pi)/2, Gamma(2) = 1
        1 => Ok(1.0 / std::f64::consts::PI),
        2 => Ok(1.0 / (2.0 * std::f64::consts::PI)),
        3 => Ok(1.0 / (std::f64::consts::PI * std::f64::consts::PI)),
        _ => Err(Error::InvalidParameter(format!(
            "poisson constant only defined for n in 1..=3, got {n}"
        ))),
    }
}

/// Single-image (whole-space) Poisson kernel value
/// P_t(x) = c_(n) t / (t^2 + d^2)^((n+1)/2) at distance d.
pub fn poisson_point(n: usize, t: f64, distance: f64) -> Result<f64> {
    let c = poisson_constant(n)?;
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("scale t = {t} must be positive")));
    }
    let s = t * t + distance * distance;
    Ok(c * t / s.powf((n as f64 + 1.0) / 2.0))
}

fn check_scale(grid: &Grid, t: f64) -> Result<()> {
    let max = grid.period() / 2.0;
    if !(t > 0.0 && t <= max) {
        return Err(Error::KernelScale { t, max });
    }
    Ok(())
}

fn check_component(grid: &Grid, j: usize) -> Result<()> {
    if j == 0 || j > grid.dim() {
        return Err(Error::ComponentIndex { j, n: grid.dim() });
    }
    Ok(())
}

/// Number of image boxes summed per axis when periodizing kernels in n >= 2.
fn image_count(n: usize) -> i64 {
    match n {
        2 => 16,
        _ => 4,
    }
}

/// Mass of the whole-space Poisson kernel inside the centered box [-r, r]^n.
/// Used to fold the analytic exterior tail back into the image sum.
fn poisson_box_mass(n: usize, t: f64, r: f64) -> f64 {
    use std::f64::consts::PI;
    match n {
        // (2/pi) arctan(r/t)
        1 => (2.0 / PI) * (r / t).atan(),
        // solid-angle formula for a square seen from height t
        2 => (2.0 / PI) * (r * r / (t * (2.0 * r * r + t * t).sqrt())).atan(),
        // radial bound: mass inside the inscribed ball of radius r
        3 => (4.0 / PI) * (0.5 * (r / t).atan() - 0.5 * t * r / (t * t + r * r)),
        _ => 1.0,
    }
}

/// Periodized Poisson kernel sampled on the lattice, centered at the lattice
/// point nearest L/2 on every axis. Quadrature mass h^n * sum is 1 up to the
/// image-sum tail (closed form in n = 1, analytically corrected in n >= 2).
pub fn poisson_kernel(grid: &Grid, t: f64) -> Result<GridFunction> {
    check_scale(grid, t)?;
    let period = grid.period();
    let n = grid.dim();
    let center = grid.center_point();
    if n == 1 {
        let a = 2.0 * std::f64::consts::PI * t / period;
        let (sinh_a, cosh_a) = (a.sinh(), a.cosh());
        return crate::grid::sample(*grid, |x| {
            let th = 2.0 * std::f64::consts::PI * (x[0] - center[0]) / period;
            sinh_a / (period * (cosh_a - th.cos()))
        });
    }
    let c = poisson_constant(n)?;
    let m = image_count(n);
    let pow = (n as f64 + 1.0) / 2.0;
    // residual mass beyond the image box, spread uniformly over the cells
    let r_out = (m as f64 + 0.5) * period;
    let tail = (1.0 - poisson_box_mass(n, t, r_out)) / period.powi(n as i32);
    let mut values = vec![0.0; grid.total_points()];
    for (i, slot) in values.iter_mut().enumerate() {
        let x = grid.point(i);
        let mut d = [0.0; MAX_DIM];
        for axis in 0..n {
            // displacement folded to (-L/2, L/2] before image summation
            let mut v = (x[axis] - center[axis]).rem_euclid(period);
            if v > period / 2.0 {
                v -= period;
            }
            d[axis] = v;
        }
        let mut acc = 0.0;
        let mut img = [0i64; MAX_DIM];
        sum_images(n, m, &mut img, &mut |im| {
            let mut s = t * t;
            for axis in 0..n {
                let z = d[axis] + im[axis] as f64 * period;
                s += z * z;
            }
            acc += c * t / s.powf(pow);
        });
        *slot = acc + tail;
    }
    GridFunction::new(*grid, values)
}

/// Periodized conjugate Poisson kernel for component j (1-based).
pub fn conjugate_poisson_kernel(grid: &Grid, t: f64, j: usize) -> Result<GridFunction> {
    check_scale(grid, t)?;
    check_component(grid, j)?;
    let period = grid.period();
    let n = grid.dim();
    let center = grid.center_point();
    if n == 1 {
        let a = 2.0 * std::f64::consts::PI * t / period;
        let cosh_a = a.cosh();
        return crate::grid::sample(*grid, |x| {
            let th = 2.0 * std::f64::consts::PI * (x[0] - center[0]) / period;
            th.sin() / (period * (cosh_a - th.cos()))
        });
    }
    let c = poisson_constant(n)?;
    let m = image_count(n);
    let pow = (n as f64 + 1.0) / 2.0;
    let axis_j = j - 1;
    let mut values = vec![0.0; grid.total_points()];
    for (i, slot) in values.iter_mut().enumerate() {
        let x = grid.point(i);
        let mut d = [0.0; MAX_DIM];
        for axis in 0..n {
            let mut v = (x[axis] - center[axis]).rem_euclid(period);
            if v > period / 2.0 {
                v -= period;
            }
            d[axis] = v;
        }
        let mut acc = 0.0;
        let mut img = [0i64; MAX_DIM];
        // odd kernel: opposite images pair up, so the symmetric box converges
        sum_images(n, m, &mut img, &mut |im| {
            let mut s = t * t;
            for axis in 0..n {
                let z = d[axis] + im[axis] as f64 * period;
                s += z * z;
            }
            let zj = d[axis_j] + im[axis_j] as f64 * period;
            acc += c * zj / s.powf(pow);
        });
        *slot = acc;
    }
    GridFunction::new(*grid, values)
}

fn sum_images(n: usize, m: i64, img: &mut [i64; MAX_DIM], f: &mut impl FnMut(&[i64; MAX_DIM])) {
    fn rec(
        axis: usize,
        n: usize,
        m: i64,
        img: &mut [i64; MAX_DIM],
        f: &mut impl FnMut(&[i64; MAX_DIM]),
    ) {
        if axis == n {
            f(img);
            return;
        }
        for v in -m..=m {
            img[axis] = v;
            rec(axis + 1, n, m, img, f);
        }
    }
    rec(0, n, m, img, f);
}

/// Direct cyclic quadrature (f * kernel)(x) = h^n sum_y kernel(center + x - y) f(y)
/// for a kernel sampled with its origin at the canonical grid center.
pub fn convolve(f: &GridFunction, kernel: &GridFunction) -> Result<GridFunction> {
    if f.grid() != kernel.grid() {
        return Err(Error::GridMismatch("convolve on different grids".into()));
    }
    let grid = *f.grid();
    let n = grid.dim();
    let np = grid.points_per_axis();
    let vol = grid.cell_volume();
    let ker = kernel.values();
    let fv = f.values();
    let c = grid.coords(grid.center_index());
    let mut out = vec![0.0; grid.total_points()];
    match n {
        1 => {
            for d in 0..np {
                let w = vol * ker[(c[0] + d) % np];
                if w == 0.0 {
                    continue;
                }
                for (x, slot) in out.iter_mut().enumerate() {
                    *slot += w * fv[(x + np - d) % np];
                }
            }
        }
        2 => {
            for d0 in 0..np {
                let k0 = ((c[0] + d0) % np) * np;
                for d1 in 0..np {
                    let w = vol * ker[k0 + (c[1] + d1) % np];
                    if w == 0.0 {
                        continue;
                    }
                    for x0 in 0..np {
                        let r0 = ((x0 + np - d0) % np) * np;
                        let o0 = x0 * np;
                        for x1 in 0..np {
                            out[o0 + x1] += w * fv[r0 + (x1 + np - d1) % np];
                        }
                    }
                }
            }
        }
        _ => {
            for d0 in 0..np {
                let k0 = ((c[0] + d0) % np) * np;
                for d1 in 0..np {
                    let k1 = (k0 + (c[1] + d1) % np) * np;
                    for d2 in 0..np {
                        let w = vol * ker[k1 + (c[2] + d2) % np];
                        if w == 0.0 {
                            continue;
                        }
                        for x0 in 0..np {
                            let r0 = ((x0 + np - d0) % np) * np;
                            let o0 = x0 * np;
                            for x1 in 0..np {
                                let r1 = (r0 + (x1 + np - d1) % np) * np;
                                let o1 = (o0 + x1) * np;
                                for x2 in 0..np {
                                    out[o1 + x2] += w * fv[r1 + (x2 + np - d2) % np];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    GridFunction::new(grid, out)
}

/// Applies a frequency multiplier and returns the (real) result.
pub fn apply_multiplier(f: &GridFunction, m: impl Fn(&[f64]) -> Complex<f64>) -> GridFunction {
    let spec = forward_spectrum(f).apply_multiplier(m);
    inverse_spectrum(&spec)
}

fn xi_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Riesz transform R_j (j is 1-based) via the multiplier -i xi_j/|xi|; the
/// xi = 0 coefficient is set to zero.
pub fn riesz_transform(f: &GridFunction, j: usize) -> Result<GridFunction> {
    check_component(f.grid(), j)?;
    Ok(apply_multiplier(f, |xi| {
        let r = xi_norm(xi);
        if r == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(0.0, -xi[j - 1] / r)
        }
    }))
}

/// Composition R_{j_1} ... R_{j_l} applied as one fused multiplier pass.
/// An empty path is the identity.
pub fn riesz_compose(f: &GridFunction, path: &[usize]) -> Result<GridFunction> {
    for &j in path {
        check_component(f.grid(), j)?;
    }
    if path.is_empty() {
        return Ok(f.clone());
    }
    Ok(apply_multiplier(f, |xi| {
        let r = xi_norm(xi);
        if r == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let mut m = Complex::new(1.0, 0.0);
        for &j in path {
            m *= Complex::new(0.0, -xi[j - 1] / r);
        }
        m
    }))
}

/// Truncated principal-value quadrature of the Riesz kernel:
/// h^n sum over offsets with delta < |y| <= L/2 of K_j(y) f(x - y), where y is
/// the minimum-image displacement and K_j the periodized kernel.
pub fn riesz_truncated_oracle(f: &GridFunction, j: usize, delta: f64) -> Result<GridFunction> {
    let grid = *f.grid();
    check_component(&grid, j)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation radius {delta} must be positive"
        )));
    }
    let n = grid.dim();
    let np = grid.points_per_axis();
    let period = grid.period();
    let h = grid.spacing();
    let axis_j = j - 1;
    // kernel weights per offset cell, zero outside the truncation annulus
    let mut weights = vec![0.0; grid.total_points()];
    let c = poisson_constant(n)?;
    let m = image_count(n);
    for (d, w) in weights.iter_mut().enumerate() {
        let dc = grid.coords(d);
        let mut y = [0.0; MAX_DIM];
        let mut s = 0.0;
        for axis in 0..n {
            let v = grid.wrap_offset(dc[axis] as i64) as f64 * h;
            y[axis] = v;
            s += v * v;
        }
        let r = s.sqrt();
        if !(r > delta && r <= period / 2.0) {
            continue;
        }
        if n == 1 {
            // exact periodization of 1/(pi y)
            *w = 1.0 / ((std::f64::consts::PI * y[0] / period).tan() * period);
        } else {
            let mut acc = 0.0;
            let mut img = [0i64; MAX_DIM];
            sum_images(n, m, &mut img, &mut |im| {
                let mut q = 0.0;
                for axis in 0..n {
                    let z = y[axis] + im[axis] as f64 * period;
                    q += z * z;
                }
                let zj = y[axis_j] + im[axis_j] as f64 * period;
                acc += c * zj / q.powf((n as f64 + 1.0) / 2.0);
            });
            *w = acc;
        }
    }
    // reuse the cyclic quadrature with the weight field recentered at 0
    let fv = f.values();
    let mut out = vec![0.0; grid.total_points()];
    let vol = grid.cell_volume();
    match n {
        1 => {
            for (d, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let w = w * vol;
                for (x, slot) in out.iter_mut().enumerate() {
                    *slot += w * fv[(x + np - d) % np];
                }
            }
        }
        _ => {
            for (d, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let w = w * vol;
                let dc = grid.coords(d);
                for (x, slot) in out.iter_mut().enumerate() {
                    let xc = grid.coords(x);
                    let mut src = [0i64; MAX_DIM];
                    for axis in 0..n {
                        src[axis] = xc[axis] as i64 - dc[axis] as i64;
                    }
                    *slot += w * fv[grid.flat_index(&src[..n])];
                }
            }
        }
    }
    GridFunction::new(grid, out)
}

/// A scalar field on the discrete half-space: one lattice slice per ladder
/// level.
#[derive(Debug, Clone)]
pub struct HalfSpaceField {
    grid: Grid,
    ladder: TLadder,
    slices: Vec<GridFunction>,
}

impl HalfSpaceField {
    pub fn new(grid: Grid, ladder: TLadder, slices: Vec<GridFunction>) -> Result<HalfSpaceField> {
        if slices.len() != ladder.len() {
            return Err(Error::GridMismatch(format!(
                "{} slices for {} ladder levels",
                slices.len(),
                ladder.len()
            )));
        }
        for s in &slices {
            if s.grid() != &grid {
                return Err(Error::GridMismatch("slice grid differs".into()));
            }
        }
        Ok(HalfSpaceField { grid, ladder, slices })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ladder(&self) -> &TLadder {
        &self.ladder
    }

    pub fn slices(&self) -> &[GridFunction] {
        &self.slices
    }

    pub fn slice(&self, level: usize) -> &GridFunction {
        &self.slices[level]
    }

    /// Pointwise map over every slice.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HalfSpaceField {
        HalfSpaceField {
            grid: self.grid,
            ladder: self.ladder.clone(),
            slices: self.slices.iter().map(|s| s.map(&f)).collect(),
        }
    }

    /// Linear interpolation between ladder slices at vertical position t.
    /// t must lie within [t_1, t_J].
    pub fn interpolate_level(&self, t: f64) -> Result<GridFunction> {
        let levels = self.ladder.levels();
        let lo = levels[0];
        let hi = *levels.last().unwrap();
        if !(t >= lo && t <= hi) {
            return Err(Error::InvalidParameter(format!(
                "t = {t} outside ladder range [{lo}, {hi}]"
            )));
        }
        match levels.iter().position(|&l| l >= t) {
            Some(0) => Ok(self.slices[0].clone()),
            Some(i) => {
                if levels[i] == t {
                    return Ok(self.slices[i].clone());
                }
                let w = (t - levels[i - 1]) / (levels[i] - levels[i - 1]);
                self.slices[i - 1].zip(&self.slices[i], |a, b| (1.0 - w) * a + w * b)
            }
            None => Ok(self.slices.last().unwrap().clone()),
        }
    }
}

/// Poisson extension at a single scale via the multiplier exp(-2 pi t |xi|).
pub fn poisson_extend_at(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_scale(f.grid(), t)?;
    Ok(apply_multiplier(f, |xi| {
        Complex::new((-2.0 * std::f64::consts::PI * t * xi_norm(xi)).exp(), 0.0)
    }))
}

/// Poisson extension across a whole ladder.
pub fn poisson_extend(f: &GridFunction, ladder: &TLadder) -> Result<HalfSpaceField> {
    let spec = forward_spectrum(f);
    let mut slices = Vec::with_capacity(ladder.len());
    for &t in ladder.levels() {
        check_scale(f.grid(), t)?;
        let s = spec.apply_multiplier(|xi| {
            Complex::new((-2.0 * std::f64::consts::PI * t * xi_norm(xi)).exp(), 0.0)
        });
        slices.push(inverse_spectrum(&s));
    }
    HalfSpaceField::new(*f.grid(), ladder.clone(), slices)
}

/// Oracle path of the Poisson extension: direct quadrature against the
/// periodized kernel.
pub fn poisson_convolve_at(f: &GridFunction, t: f64) -> Result<GridFunction> {
    let kernel = poisson_kernel(f.grid(), t)?;
    convolve(f, &kernel)
}

/// Which route computes an extension: the fused frequency multiplier or the
/// direct kernel quadrature oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionPath {
    Spectral,
    KernelOracle,
}

/// Conjugate Poisson extension u_j(x, t) = (Q_t^(j) * f)(x). The spectral
/// path applies the fused multiplier -i (xi_j/|xi|) exp(-2 pi t |xi|); the
/// oracle path convolves with the sampled periodized kernel.
pub fn conjugate_poisson_extend(
    f: &GridFunction,
    j: usize,
    ladder: &TLadder,
    path: ExtensionPath,
) -> Result<HalfSpaceField> {
    check_component(f.grid(), j)?;
    let mut slices = Vec::with_capacity(ladder.len());
    match path {
        ExtensionPath::Spectral => {
            let spec = forward_spectrum(f);
            for &t in ladder.levels() {
                check_scale(f.grid(), t)?;
                let s = spec.apply_multiplier(|xi| {
                    let r = xi_norm(xi);
                    if r == 0.0 {
                        return Complex::new(0.0, 0.0);
                    }
                    let damp = (-2.0 * std::f64::consts::PI * t * r).exp();
                    Complex::new(0.0, -xi[j - 1] / r * damp)
                });
                slices.push(inverse_spectrum(&s));
            }
        }
        ExtensionPath::KernelOracle => {
            for &t in ladder.levels() {
                let kernel = conjugate_poisson_kernel(f.grid(), t, j)?;
                slices.push(convolve(f, &kernel)?);
            }
        }
    }
    HalfSpaceField::new(*f.grid(), ladder.clone(), slices)
}

//! Discrete periodic torus [0, L)^n, grid functions living on it, the
//! unitary spectral transform and the vertical scale ladder.
//!
//! Points per axis is a power of two so the transform stays a plain FFT and
//! dyadic constructions (annuli, shells, radii) land on exact boundaries.
//! All distances on the torus are periodic: each axis difference is reduced
//! to the minimum image before the Euclidean magnitude is formed.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 3;

/// Geometry of the discretized torus: `n` axes, `points_per_axis` samples per
/// axis and period `period` in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    points_per_axis: usize,
    period: f64,
}

impl Grid {
    pub fn new(n: usize, points_per_axis: usize, period: f64) -> Result<Grid> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        if points_per_axis < 8 || !points_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis {points_per_axis} must be a power of two >= 8"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidGrid(format!("period {period} must be positive")));
        }
        Ok(Grid {
            n,
            points_per_axis,
            period,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Lattice spacing h = L/N.
    pub fn spacing(&self) -> f64 {
        self.period / self.points_per_axis as f64
    }

    /// Volume h^n of one lattice cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Total number of lattice points N^n.
    pub fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.n as u32)
    }

    /// Decodes a flat row-major index into per-axis indices.
    pub fn coords(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut c = [0usize; MAX_DIM];
        for axis in (0..self.n).rev() {
            c[axis] = flat % self.points_per_axis;
            flat /= self.points_per_axis;
        }
        c
    }

    /// Encodes per-axis indices (wrapping each axis) into a flat index.
    pub fn flat_index(&self, coords: &[i64]) -> usize {
        let np = self.points_per_axis as i64;
        let mut flat = 0usize;
        for axis in 0..self.n {
            let w = coords[axis].rem_euclid(np) as usize;
            flat = flat * self.points_per_axis + w;
        }
        flat
    }

    /// Physical coordinates of the lattice point with the given flat index.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let c = self.coords(flat);
        let h = self.spacing();
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.n {
            x[axis] = c[axis] as f64 * h;
        }
        x
    }

    /// Minimum-image displacement of a single axis difference in index units.
    pub fn wrap_offset(&self, di: i64) -> i64 {
        let np = self.points_per_axis as i64;
        let r = di.rem_euclid(np);
        if r > np / 2 {
            r - np
        } else {
            r
        }
    }

    /// Periodic Euclidean distance between two lattice points.
    pub fn periodic_distance(&self, a: usize, b: usize) -> f64 {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let h = self.spacing();
        let mut s = 0.0;
        for axis in 0..self.n {
            let d = self.wrap_offset(ca[axis] as i64 - cb[axis] as i64) as f64 * h;
            s += d * d;
        }
        s.sqrt()
    }

    /// Periodic distance of a lattice point from an arbitrary physical point.
    pub fn periodic_distance_to(&self, flat: usize, target: &[f64]) -> f64 {
        let x = self.point(flat);
        let mut s = 0.0;
        for axis in 0..self.n {
            let mut d = (x[axis] - target[axis]).rem_euclid(self.period);
            if d > self.period / 2.0 {
                d = self.period - d;
            }
            s += d * d;
        }
        s.sqrt()
    }

    /// Index of the lattice point at L/2 on every axis (the canonical kernel
    /// and bump center; exact because N is even).
    pub fn center_index(&self) -> usize {
        let half = (self.points_per_axis / 2) as i64;
        let c = [half; MAX_DIM];
        self.flat_index(&c[..self.n])
    }

    /// Physical coordinates of the canonical center.
    pub fn center_point(&self) -> [f64; MAX_DIM] {
        self.point(self.center_index())
    }

    /// Signed frequency index for position `i` along one axis, in the
    /// symmetric range [-N/2, N/2).
    pub fn signed_freq(&self, i: usize) -> i64 {
        let np = self.points_per_axis as i64;
        let i = i as i64;
        if i < np / 2 {
            i
        } else {
            i - np
        }
    }
}

/// Real scalar field sampled on the lattice, stored row-major (last axis
/// fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.total_points() {
            return Err(Error::GridMismatch(format!(
                "value count {} does not match lattice size {}",
                values.len(),
                grid.total_points()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteSample {
                    coords: grid.coords(i)[..grid.dim()].to_vec(),
                });
            }
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> GridFunction {
        GridFunction {
            values: vec![0.0; grid.total_points()],
            grid,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Mean value h^n * sum / L^n.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Pointwise map to a new field.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination with another field on the same grid.
    pub fn zip(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<GridFunction> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("zip on different grids".into()));
        }
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        self.map(|v| c * v)
    }

    /// Cyclic translation by whole cells; `shift[axis]` may be negative.
    pub fn cyclic_shift(&self, shift: &[i64]) -> Result<GridFunction> {
        if shift.len() != self.grid.dim() {
            return Err(Error::GridMismatch("shift length != dimension".into()));
        }
        let mut out = vec![0.0; self.values.len()];
        let n = self.grid.dim();
        for (i, slot) in out.iter_mut().enumerate() {
            let c = self.grid.coords(i);
            let mut src = [0i64; MAX_DIM];
            for axis in 0..n {
                src[axis] = c[axis] as i64 - shift[axis];
            }
            *slot = self.values[self.grid.flat_index(&src[..n])];
        }
        Ok(GridFunction {
            grid: self.grid,
            values: out,
        })
    }
}

/// Samples a closure at every lattice point, rejecting non-finite values.
pub fn sample(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<GridFunction> {
    let mut values = vec![0.0; grid.total_points()];
    for (i, slot) in values.iter_mut().enumerate() {
        let x = grid.point(i);
        let v = f(&x[..grid.dim()]);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample {
                coords: grid.coords(i)[..grid.dim()].to_vec(),
            });
        }
        *slot = v;
    }
    Ok(GridFunction { grid, values })
}

/// Discrete L^p quasi-norm with the cell measure h^n; `p = inf` gives the sup
/// norm. Requires p > 0.
pub fn discrete_lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("lp exponent {p} must be > 0")));
    }
    if p.is_infinite() {
        return Ok(f.values().iter().fold(0.0, |m, &v| m.max(v.abs())));
    }
    let vol = f.grid().cell_volume();
    let s: f64 = f.values().iter().map(|&v| v.abs().powf(p)).sum();
    Ok((s * vol).powf(1.0 / p))
}

/// Default ball radii for averaging operators and the Morrey norm: all dyadic
/// multiples of h up to L/2 plus the first sixteen integer multiples of h,
/// sorted and deduplicated.
pub(crate) fn default_ball_radii(grid: &Grid) -> Vec<f64> {
    let h = grid.spacing();
    let max_r = grid.period() / 2.0;
    let mut rs = Vec::new();
    let mut r = h;
    while r <= max_r * (1.0 + 1e-12) {
        rs.push(r.min(max_r));
        r *= 2.0;
    }
    for m in 1..=16usize {
        let r = m as f64 * h;
        if r <= max_r {
            rs.push(r);
        }
    }
    rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rs.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * h);
    rs
}

/// Complex Fourier coefficients of a grid function, in standard FFT layout
/// (frequency index k at position k mod N per axis), unitary normalization.
#[derive(Debug, Clone)]
pub struct Spectrum {
    grid: Grid,
    coefficients: Vec<Complex<f64>>,
}

impl Spectrum {
    pub fn new(grid: Grid, coefficients: Vec<Complex<f64>>) -> Result<Spectrum> {
        if coefficients.len() != grid.total_points() {
            return Err(Error::GridMismatch(
                "coefficient count does not match lattice size".into(),
            ));
        }
        Ok(Spectrum { grid, coefficients })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex<f64>] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex<f64>] {
        &mut self.coefficients
    }

    /// Physical frequency vector xi = k/L of the coefficient at `flat`.
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let c = self.grid.coords(flat);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.grid.dim() {
            xi[axis] = self.grid.signed_freq(c[axis]) as f64 / self.grid.period();
        }
        xi
    }

    /// Multiplies every coefficient by `m(xi)` and returns the new spectrum.
    pub fn apply_multiplier(&self, m: impl Fn(&[f64]) -> Complex<f64>) -> Spectrum {
        let n = self.grid.dim();
        let mut out = self.coefficients.clone();
        for (i, c) in out.iter_mut().enumerate() {
            let xi = self.frequency(i);
            *c *= m(&xi[..n]);
        }
        Spectrum {
            grid: self.grid,
            coefficients: out,
        }
    }
}

fn fft_all_axes(grid: &Grid, data: &mut [Complex<f64>], forward: bool) {
    let np = grid.points_per_axis();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if forward {
        planner.plan_fft_forward(np)
    } else {
        planner.plan_fft_inverse(np)
    };
    let total = grid.total_points();
    let mut line = vec![Complex::new(0.0, 0.0); np];
    // Process one axis at a time: gather each line along the axis, transform
    // it in place, scatter it back.
    for axis in 0..grid.dim() {
        // stride between consecutive points along `axis` in the flat layout
        let stride = np.pow((grid.dim() - 1 - axis) as u32);
        let lines = total / np;
        for l in 0..lines {
            // Decompose the line id into the (outer, inner) block around the axis.
            let inner = l % stride;
            let outer = l / stride;
            let base = outer * stride * np + inner;
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = data[base + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride] = *v;
            }
        }
    }
    let scale = 1.0 / (total as f64).sqrt();
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Forward unitary transform of a real field.
pub fn forward_spectrum(f: &GridFunction) -> Spectrum {
    let mut data: Vec<Complex<f64>> = f.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    fft_all_axes(f.grid(), &mut data, true);
    Spectrum {
        grid: *f.grid(),
        coefficients: data,
    }
}

/// Inverse unitary transform, keeping the real part (imaginary residue of a
/// Hermitian spectrum is at rounding level).
pub fn inverse_spectrum(s: &Spectrum) -> GridFunction {
    let mut data = s.coefficients.clone();
    fft_all_axes(&s.grid, &mut data, false);
    GridFunction {
        grid: s.grid,
        values: data.into_iter().map(|c| c.re).collect(),
    }
}

/// Inverse unitary transform keeping complex values.
pub fn inverse_spectrum_complex(s: &Spectrum) -> (Grid, Vec<Complex<f64>>) {
    let mut data = s.coefficients.clone();
    fft_all_axes(&s.grid, &mut data, false);
    (s.grid, data)
}

/// Strictly increasing vertical scales 0 < t_1 < ... < t_J <= L/2 used for
/// half-space extensions and maximal-function ladders.
#[derive(Debug, Clone, PartialEq)]
pub struct TLadder {
    levels: Vec<f64>,
}

impl TLadder {
    pub fn new(levels: Vec<f64>, period: f64) -> Result<TLadder> {
        if levels.is_empty() {
            return Err(Error::InvalidLadder("empty ladder".into()));
        }
        if !(levels[0] > 0.0) {
            return Err(Error::InvalidLadder(format!(
                "lowest level {} must be positive",
                levels[0]
            )));
        }
        for w in levels.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidLadder(format!(
                    "levels not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        let top = *levels.last().unwrap();
        if top > period / 2.0 {
            return Err(Error::InvalidLadder(format!(
                "top level {top} exceeds half period {}",
                period / 2.0
            )));
        }
        Ok(TLadder { levels })
    }

    /// Geometric ladder with `count` levels from `t1` to `t_top` inclusive.
    pub fn geometric(t1: f64, t_top: f64, count: usize, period: f64) -> Result<TLadder> {
        if count < 2 || !(t_top > t1) {
            return Err(Error::InvalidLadder(
                "geometric ladder needs count >= 2 and t_top > t1".into(),
            ));
        }
        let q = (t_top / t1).powf(1.0 / (count - 1) as f64);
        let levels = (0..count).map(|i| t1 * q.powi(i as i32)).collect();
        TLadder::new(levels, period)
    }

    /// Uniform ladder t1, 2*t1, ..., count*t1.
    pub fn uniform(t1: f64, count: usize, period: f64) -> Result<TLadder> {
        if count < 1 {
            return Err(Error::InvalidLadder("uniform ladder needs count >= 1".into()));
        }
        let levels = (1..=count).map(|i| t1 * i as f64).collect();
        TLadder::new(levels, period)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(0, 16, 1.0).is_err());
        assert!(Grid::new(4, 16, 1.0).is_err());
        assert!(Grid::new(1, 12, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(1, 16, 0.0).is_err());
        assert!(Grid::new(2, 64, 8.0).is_ok());
    }

    #[test]
    fn flat_index_roundtrip() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        for i in 0..g.total_points() {
            let c = g.coords(i);
            let ci: Vec<i64> = c[..3].iter().map(|&v| v as i64).collect();
            assert_eq!(g.flat_index(&ci), i);
        }
    }

    #[test]
    fn periodic_distance_wraps() {
        let g = Grid::new(1, 16, 16.0).unwrap();
        // points 1 and 15 are 2 apart through the seam, not 14
        assert!((g.periodic_distance(1, 15) - 2.0).abs() < 1e-12);
        let g2 = Grid::new(2, 8, 8.0).unwrap();
        let a = g2.flat_index(&[0, 0]);
        let b = g2.flat_index(&[7, 7]);
        assert!((g2.periodic_distance(a, b) - (2.0f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sample_rejects_non_finite() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let r = sample(g, |x| 1.0 / (x[0] - 0.25));
        match r {
            Err(Error::NonFiniteSample { coords }) => assert_eq!(coords, vec![2]),
            other => panic!("expected non-finite error, got {other:?}"),
        }
    }

    #[test]
    fn ladder_validation() {
        assert!(TLadder::new(vec![], 16.0).is_err());
        assert!(TLadder::new(vec![0.0, 1.0], 16.0).is_err());
        assert!(TLadder::new(vec![1.0, 1.0], 16.0).is_err());
        assert!(TLadder::new(vec![1.0, 9.0], 16.0).is_err());
        assert!(TLadder::new(vec![0.5, 1.0, 8.0], 16.0).is_ok());
    }
}

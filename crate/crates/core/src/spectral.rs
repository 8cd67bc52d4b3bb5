//! Doubly periodic grids, real/spectral transforms and Fourier symbol operators.
//!
//! Samples are stored with x varying fastest (`j * nx + i`). Spectral coefficients use
//! the same layout in FFT order: index `k` in `0..nx` maps to the signed mode
//! `k` or `k - nx`, so the lattice is `[-nx/2, nx/2)`. The forward transform is scaled by
//! `1 / (nx * ny)`, which makes `u_hat(0, 0)` the field mean, and the Nyquist row and
//! column are zeroed on every transform.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{KpError, Result};

/// Relative tolerance used to decide that the `xi = 0` column vanishes.
pub const ZERO_MEAN_TOL: f64 = 1e-12;
/// Threshold on the imaginary residue accepted by [`from_spectrum`].
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Selects KP-I (`eps = -1`) or KP-II (`eps = +1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Equation {
    KpI,
    KpII,
}

impl Equation {
    pub fn eps(self) -> f64 {
        match self {
            Equation::KpI => -1.0,
            Equation::KpII => 1.0,
        }
    }

    pub fn from_eps(eps: f64) -> Option<Self> {
        if eps == -1.0 {
            Some(Equation::KpI)
        } else if eps == 1.0 {
            Some(Equation::KpII)
        } else {
            None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Equation::KpI => "kp1",
            Equation::KpII => "kp2",
        }
    }
}

struct Plans {
    xi: Vec<f64>,
    mu: Vec<f64>,
    x_fwd: Arc<dyn Fft<f64>>,
    x_inv: Arc<dyn Fft<f64>>,
    y_fwd: Arc<dyn Fft<f64>>,
    y_inv: Arc<dyn Fft<f64>>,
}

/// A doubly periodic grid on `[-Lx/2, Lx/2) x [-Ly/2, Ly/2)`.
#[derive(Clone)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid2D")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("lx", &self.lx)
            .field("ly", &self.ly)
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

fn signed_mode(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(KpError::InvalidGrid(format!(
                    "{name} = {n} must be a power of two >= 8"
                )));
            }
        }
        if !(lx.is_finite() && lx > 0.0 && ly.is_finite() && ly > 0.0) {
            return Err(KpError::InvalidGrid(format!(
                "periods must be positive, got Lx = {lx}, Ly = {ly}"
            )));
        }
        let xi = (0..nx)
            .map(|k| 2.0 * PI * signed_mode(k, nx) as f64 / lx)
            .collect();
        let mu = (0..ny)
            .map(|l| 2.0 * PI * signed_mode(l, ny) as f64 / ly)
            .collect();
        let mut planner = FftPlanner::new();
        let plans = Plans {
            xi,
            mu,
            x_fwd: planner.plan_fft_forward(nx),
            x_inv: planner.plan_fft_inverse(nx),
            y_fwd: planner.plan_fft_forward(ny),
            y_inv: planner.plan_fft_inverse(ny),
        };
        Ok(Grid2D {
            nx,
            ny,
            lx,
            ly,
            plans: Arc::new(plans),
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    /// Quadrature weight of one sample.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }
    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.lx + i as f64 * self.dx()
    }
    pub fn y(&self, j: usize) -> f64 {
        -0.5 * self.ly + j as f64 * self.dy()
    }
    pub fn xi(&self, k: usize) -> f64 {
        self.plans.xi[k]
    }
    pub fn mu(&self, l: usize) -> f64 {
        self.plans.mu[l]
    }
    pub fn xi_values(&self) -> &[f64] {
        &self.plans.xi
    }
    pub fn mu_values(&self) -> &[f64] {
        &self.plans.mu
    }
    pub fn kx(&self, k: usize) -> i64 {
        signed_mode(k, self.nx)
    }
    pub fn ky(&self, l: usize) -> i64 {
        signed_mode(l, self.ny)
    }
    /// Smallest nonzero |xi| on the lattice.
    pub fn xi_min(&self) -> f64 {
        2.0 * PI / self.lx
    }
    /// Largest |xi| carried by a non-Nyquist mode.
    pub fn xi_max(&self) -> f64 {
        (self.nx / 2 - 1) as f64 * 2.0 * PI / self.lx
    }
    pub fn is_nyquist(&self, k: usize, l: usize) -> bool {
        k == self.nx / 2 || l == self.ny / 2
    }
    /// Modes kept by the 2/3 rule in both directions.
    pub fn dealias_keeps(&self, k: usize, l: usize) -> bool {
        3 * (self.kx(k).unsigned_abs() as usize) < self.nx
            && 3 * (self.ky(l).unsigned_abs() as usize) < self.ny
    }
    pub fn same_shape(&self, nx: usize, ny: usize) -> bool {
        self.nx == nx && self.ny == ny
    }
    pub fn with_periods(&self, lx: f64, ly: f64) -> Result<Grid2D> {
        Grid2D::new(self.nx, self.ny, lx, ly)
    }
}

/// Physical-space samples of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid2D,
    data: Vec<f64>,
}

impl RealField {
    pub fn new(grid: &Grid2D, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(KpError::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.len(),
                data.len()
            )));
        }
        if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
            return Err(KpError::InvalidGrid(format!("sample {bad} is not finite")));
        }
        Ok(RealField {
            grid: grid.clone(),
            data,
        })
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        RealField {
            grid: grid.clone(),
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let y = grid.y(j);
            for i in 0..grid.nx() {
                data.push(f(grid.x(i), y));
            }
        }
        RealField {
            grid: grid.clone(),
            data,
        }
    }

    pub(crate) fn from_raw(grid: &Grid2D, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        RealField {
            grid: grid.clone(),
            data,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.nx() + i]
    }
    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.grid.nx();
        &self.data[j * nx..(j + 1) * nx]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField::from_raw(&self.grid, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> RealField {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        RealField::from_raw(
            &self.grid,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Quadrature integral `dx dy * sum`.
    pub fn integral(&self) -> f64 {
        self.grid.cell_area() * self.data.iter().sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.grid.cell_area() * self.data.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        (self.grid.cell_area() * self.data.iter().map(|v| v.abs().powf(p)).sum::<f64>())
            .powf(1.0 / p)
    }

    pub fn x_mean(&self, j: usize) -> f64 {
        self.row(j).iter().sum::<f64>() / self.grid.nx() as f64
    }

    /// Largest |u| on the x-boundary column `x = -Lx/2` (periodically equal to `+Lx/2`).
    pub fn boundary_amplitude(&self) -> f64 {
        (0..self.grid.ny())
            .map(|j| self.get(0, j).abs())
            .fold(0.0, f64::max)
    }

    /// The field `(x, y) -> u(-x, y)` on the same lattice.
    pub fn reflect_x(&self) -> RealField {
        let nx = self.grid.nx();
        let mut data = vec![0.0; self.data.len()];
        for j in 0..self.grid.ny() {
            for i in 0..nx {
                data[j * nx + (nx - i) % nx] = self.data[j * nx + i];
            }
        }
        RealField::from_raw(&self.grid, data)
    }

    /// Same samples reinterpreted on another grid with identical shape.
    pub fn on_grid(&self, grid: &Grid2D) -> Result<RealField> {
        if !grid.same_shape(self.grid.nx(), self.grid.ny()) {
            return Err(KpError::GridMismatch);
        }
        Ok(RealField::from_raw(grid, self.data.clone()))
    }
}

impl Add for &RealField {
    type Output = RealField;
    fn add(self, rhs: &RealField) -> RealField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &RealField {
    type Output = RealField;
    fn sub(self, rhs: &RealField) -> RealField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for &RealField {
    type Output = RealField;
    fn mul(self, rhs: f64) -> RealField {
        self.map(|v| v * rhs)
    }
}

/// Fourier coefficients of a real field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid2D,
    coeffs: Vec<Complex64>,
    zero_x_mean: bool,
}

impl Spectrum {
    /// Wraps raw coefficients (FFT order). Nyquist modes are zeroed.
    pub fn from_coeffs(grid: &Grid2D, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(KpError::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        zero_nyquist(grid, &mut coeffs);
        Ok(Spectrum {
            grid: grid.clone(),
            coeffs,
            zero_x_mean: false,
        })
    }

    pub fn zeros(grid: &Grid2D) -> Self {
        Spectrum {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            zero_x_mean: true,
        }
    }

    pub(crate) fn from_raw(grid: &Grid2D, coeffs: Vec<Complex64>, zero_x_mean: bool) -> Self {
        Spectrum {
            grid: grid.clone(),
            coeffs,
            zero_x_mean,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }
    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }
    /// Coefficient at FFT indices `(k, l)`.
    pub fn at(&self, k: usize, l: usize) -> Complex64 {
        self.coeffs[l * self.grid.nx() + k]
    }
    /// Coefficient at signed mode numbers.
    pub fn mode(&self, kx: i64, ky: i64) -> Complex64 {
        let k = kx.rem_euclid(self.grid.nx() as i64) as usize;
        let l = ky.rem_euclid(self.grid.ny() as i64) as usize;
        self.at(k, l)
    }

    /// Whether the zero-x-mean flag is set (the `xi = 0` column is exactly zero).
    pub fn zero_x_mean(&self) -> bool {
        self.zero_x_mean
    }

    /// Largest |u_hat(0, mu)|.
    pub fn x_mean_residue(&self) -> f64 {
        let nx = self.grid.nx();
        (0..self.grid.ny())
            .map(|l| self.coeffs[l * nx].norm())
            .fold(0.0, f64::max)
    }

    /// Checks the zero-x-mean contract within [`ZERO_MEAN_TOL`] relative to the largest
    /// coefficient and returns a copy with the flag set.
    pub fn require_zero_x_mean(&self) -> Result<Spectrum> {
        if self.zero_x_mean {
            return Ok(self.clone());
        }
        let scale = self.max_abs();
        let residue = self.x_mean_residue();
        if residue > ZERO_MEAN_TOL * scale {
            return Err(KpError::NotZeroXMean {
                max_coefficient: residue,
            });
        }
        Ok(self.project_zero_x_mean())
    }

    /// Zeroes the `xi = 0` column.
    pub fn project_zero_x_mean(&self) -> Spectrum {
        let nx = self.grid.nx();
        let mut coeffs = self.coeffs.clone();
        for l in 0..self.grid.ny() {
            coeffs[l * nx] = Complex64::new(0.0, 0.0);
        }
        Spectrum::from_raw(&self.grid, coeffs, true)
    }

    /// Applies the 2/3-rule mask.
    pub fn dealiased(&self) -> Spectrum {
        let grid = &self.grid;
        let nx = grid.nx();
        let mut coeffs = self.coeffs.clone();
        for l in 0..grid.ny() {
            for k in 0..nx {
                if !grid.dealias_keeps(k, l) {
                    coeffs[l * nx + k] = Complex64::new(0.0, 0.0);
                }
            }
        }
        Spectrum::from_raw(grid, coeffs, self.zero_x_mean)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Quadrature L2 norm of the represented field (Parseval).
    pub fn l2_norm(&self) -> f64 {
        (self.grid.area() * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `sqrt(Lx Ly sum w(xi, mu) |u_hat|^2)`.
    pub fn weighted_l2(&self, weight: impl Fn(f64, f64) -> f64) -> f64 {
        let grid = &self.grid;
        let nx = grid.nx();
        let mut acc = 0.0;
        for l in 0..grid.ny() {
            let mu = grid.mu(l);
            for k in 0..nx {
                let c = self.coeffs[l * nx + k];
                if c.re != 0.0 || c.im != 0.0 {
                    acc += weight(grid.xi(k), mu) * c.norm_sqr();
                }
            }
        }
        (grid.area() * acc).sqrt()
    }

    /// Multiplies every coefficient by `symbol(xi, mu)`. The zero-x-mean flag is kept.
    pub fn map_symbol(&self, symbol: impl Fn(f64, f64) -> Complex64) -> Spectrum {
        let grid = &self.grid;
        let nx = grid.nx();
        let mut coeffs = self.coeffs.clone();
        for l in 0..grid.ny() {
            let mu = grid.mu(l);
            for k in 0..nx {
                coeffs[l * nx + k] *= symbol(grid.xi(k), mu);
            }
        }
        Spectrum::from_raw(grid, coeffs, self.zero_x_mean)
    }

    pub fn scale(&self, factor: f64) -> Spectrum {
        Spectrum::from_raw(
            &self.grid,
            self.coeffs.iter().map(|c| c * factor).collect(),
            self.zero_x_mean,
        )
    }

    pub fn axpy(&self, a: f64, other: &Spectrum) -> Spectrum {
        assert_eq!(self.grid, other.grid, "spectra on different grids");
        Spectrum::from_raw(
            &self.grid,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(x, y)| x + y * a)
                .collect(),
            self.zero_x_mean && other.zero_x_mean,
        )
    }

    /// Largest violation of `u_hat(-xi, -mu) = conj(u_hat(xi, mu))`, relative to the largest
    /// coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let grid = &self.grid;
        let (nx, ny) = (grid.nx(), grid.ny());
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for l in 0..ny {
            for k in 0..nx {
                let a = self.coeffs[l * nx + k];
                let b = self.coeffs[((ny - l) % ny) * nx + (nx - k) % nx];
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst / scale
    }

    /// Translates the represented field by `(sx, sy)`: `u(x - sx, y - sy)`.
    pub fn translate(&self, sx: f64, sy: f64) -> Spectrum {
        self.map_symbol(|xi, mu| Complex64::from_polar(1.0, -(xi * sx + mu * sy)))
    }
}

impl Add for &Spectrum {
    type Output = Spectrum;
    fn add(self, rhs: &Spectrum) -> Spectrum {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Spectrum {
    type Output = Spectrum;
    fn sub(self, rhs: &Spectrum) -> Spectrum {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &Spectrum {
    type Output = Spectrum;
    fn neg(self) -> Spectrum {
        self.scale(-1.0)
    }
}

fn zero_nyquist(grid: &Grid2D, coeffs: &mut [Complex64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let zero = Complex64::new(0.0, 0.0);
    for l in 0..ny {
        coeffs[l * nx + nx / 2] = zero;
    }
    for k in 0..nx {
        coeffs[(ny / 2) * nx + k] = zero;
    }
}

fn fft_rows(data: &mut [Complex64], len: usize, plan: &Arc<dyn Fft<f64>>) {
    let scratch_len = plan.get_inplace_scratch_len();
    data.par_chunks_mut(len).for_each_init(
        || vec![Complex64::new(0.0, 0.0); scratch_len],
        |scratch, row| plan.process_with_scratch(row, scratch),
    );
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); src.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

/// Unnormalized in-place 2D transform.
pub(crate) fn fft2(grid: &Grid2D, data: &mut [Complex64], inverse: bool) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let plans = &grid.plans;
    let (px, py) = if inverse {
        (&plans.x_inv, &plans.y_inv)
    } else {
        (&plans.x_fwd, &plans.y_fwd)
    };
    fft_rows(data, nx, px);
    let mut cols = transpose(data, ny, nx);
    fft_rows(&mut cols, ny, py);
    let back = transpose(&cols, nx, ny);
    data.copy_from_slice(&back);
}

/// 1D transform of each x-row; y is untouched.
pub(crate) fn fft_x_rows(grid: &Grid2D, data: &mut [Complex64], inverse: bool) {
    let plan = if inverse {
        &grid.plans.x_inv
    } else {
        &grid.plans.x_fwd
    };
    fft_rows(data, grid.nx(), plan);
}

pub(crate) fn forward_raw(grid: &Grid2D, samples: &[f64]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(grid, &mut data, false);
    let norm = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= norm;
    }
    zero_nyquist(grid, &mut data);
    data
}

/// Inverse transform returning only the real part, without the symmetry check.
pub(crate) fn inverse_real(grid: &Grid2D, coeffs: &[Complex64]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    fft2(grid, &mut data, true);
    data.into_iter().map(|c| c.re).collect()
}

/// Forward transform: `u_hat = FFT(u) / (nx ny)` with Nyquist modes zeroed.
pub fn to_spectrum(f: &RealField) -> Spectrum {
    let coeffs = forward_raw(f.grid(), f.data());
    Spectrum::from_raw(f.grid(), coeffs, false)
}

/// Inverse transform. Fails when the spectrum is not Hermitian enough to represent a
/// real field.
pub fn from_spectrum(s: &Spectrum) -> Result<RealField> {
    let grid = s.grid();
    let mut data = s.coeffs().to_vec();
    fft2(grid, &mut data, true);
    let mut residue: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for c in &data {
        residue = residue.max(c.im.abs());
        scale = scale.max(c.re.abs());
    }
    if residue > SYMMETRY_TOL * scale {
        return Err(KpError::SymmetryViolation { residue });
    }
    Ok(RealField::from_raw(
        grid,
        data.into_iter().map(|c| c.re).collect(),
    ))
}

/// KP dispersion relation `omega(xi, mu) = xi^3 - eps mu^2 / xi`.
///
/// KP-I (`eps = -1`) gives `xi^3 + mu^2 / xi`; KP-II gives `xi^3 - mu^2 / xi`.
pub fn omega(eq: Equation, xi: f64, mu: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(KpError::ZeroXFrequency);
    }
    Ok(omega_unchecked(eq, xi, mu))
}

/// Dispersion relation with the `xi = 0` column mapped to 0.
pub fn omega_unchecked(eq: Equation, xi: f64, mu: f64) -> f64 {
    if xi == 0.0 {
        0.0
    } else {
        xi * xi * xi - eq.eps() * (mu * mu / xi)
    }
}

pub fn dx(s: &Spectrum) -> Spectrum {
    let mut out = s.map_symbol(|xi, _| Complex64::new(0.0, xi));
    out.zero_x_mean = true;
    out
}

pub fn dy(s: &Spectrum) -> Spectrum {
    s.map_symbol(|_, mu| Complex64::new(0.0, mu))
}

/// Antiderivative in x on the zero-x-mean subspace: divides by `i xi`.
pub fn dx_inverse(s: &Spectrum) -> Result<Spectrum> {
    let s = s.require_zero_x_mean()?;
    Ok(s.map_symbol(|xi, _| {
        if xi == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, -1.0 / xi)
        }
    }))
}

/// Multiplies by `(1 + xi^2)^(theta/2)` (Bessel) or `|xi|^theta` (homogeneous).
///
/// Homogeneous negative powers need zero-x-mean data and leave the `xi = 0` column at 0.
pub fn apply_x_power(s: &Spectrum, theta: f64, bessel: bool) -> Result<Spectrum> {
    if bessel {
        return Ok(s.map_symbol(|xi, _| Complex64::new((1.0 + xi * xi).powf(0.5 * theta), 0.0)));
    }
    if theta < 0.0 {
        let s = s.require_zero_x_mean()?;
        return Ok(s.map_symbol(|xi, _| {
            if xi == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(xi.abs().powf(theta), 0.0)
            }
        }));
    }
    if theta == 0.0 {
        return Ok(s.clone());
    }
    let mut out = s.map_symbol(|xi, _| Complex64::new(xi.abs().powf(theta), 0.0));
    out.zero_x_mean = true;
    Ok(out)
}

/// Removes the x-average of every y-row.
pub fn zero_x_mean_project(f: &RealField) -> RealField {
    let grid = f.grid();
    let nx = grid.nx();
    let mut data = f.data().to_vec();
    for row in data.chunks_mut(nx) {
        let mean = row.iter().sum::<f64>() / nx as f64;
        for v in row {
            *v -= mean;
        }
    }
    RealField::from_raw(grid, data)
}

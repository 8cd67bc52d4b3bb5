//! Littlewood–Paley projectors in the x-frequency, anisotropic and weighted norms,
//! frequency envelopes and bilinear Fourier multipliers.
//!
//! Dyadic scales are written as integer exponents: band `e` means `N = 2^e`.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::error::{KpError, Result};
use crate::spectral::{self, to_spectrum, Grid2D, RealField, Spectrum};

const PLATEAU: f64 = 5.0 / 4.0;
const SUPPORT: f64 = 8.0 / 5.0;

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// Smooth even cutoff: 1 on `|r| <= 5/4`, 0 on `|r| >= 8/5`, monotone in between.
pub fn eta(r: f64) -> f64 {
    let r = r.abs();
    if r <= PLATEAU {
        1.0
    } else if r >= SUPPORT {
        0.0
    } else {
        smooth_step((SUPPORT - r) / (SUPPORT - PLATEAU))
    }
}

/// The cutoff profile as a reusable function value.
pub fn build_bump() -> fn(f64) -> f64 {
    eta
}

/// `phi(r) = eta(r / 2) - eta(r)`, supported in `5/4 <= |r| <= 16/5`.
pub fn phi(r: f64) -> f64 {
    eta(0.5 * r) - eta(r)
}

/// `phi_N(xi) = phi(xi / N)` with `N = 2^exp`.
pub fn phi_n(exp: i32, xi: f64) -> f64 {
    phi(xi / 2f64.powi(exp))
}

/// `phi_{N/2} + phi_N + phi_{2N}`.
pub fn phi_tilde(exp: i32, xi: f64) -> f64 {
    phi_n(exp - 1, xi) + phi_n(exp, xi) + phi_n(exp + 1, xi)
}

/// Japanese bracket `<x> = sqrt(1 + x^2)`.
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Dyadic exponents whose bumps cover every nonzero lattice frequency of a grid.
///
/// The lowest band satisfies `N <= 5 xi_1 / 16` and the highest `N >= 4 xi_max / 5`, so
/// the telescoping sum of the `phi_N` is exactly 1 on the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicRange {
    pub min: i32,
    pub max: i32,
}

impl DyadicRange {
    pub fn for_grid(grid: &Grid2D) -> Self {
        let min = (5.0 * grid.xi_min() / 16.0).log2().floor() as i32;
        let max = (4.0 * grid.xi_max() / 5.0).log2().ceil() as i32;
        DyadicRange { min, max }
    }

    pub fn exponents(&self) -> impl Iterator<Item = i32> {
        self.min..=self.max
    }

    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.max < self.min
    }

    pub fn contains(&self, exp: i32) -> bool {
        (self.min..=self.max).contains(&exp)
    }

    fn check(&self, exp: i32) -> Result<()> {
        if self.contains(exp) {
            Ok(())
        } else {
            Err(KpError::BandOutOfRange {
                exponent: exp,
                min: self.min,
                max: self.max,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    /// `P_N`
    Exact,
    /// `P_{<=N}`
    Low,
    /// `P_{>=N}`
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicBand {
    pub exp: i32,
    pub kind: BandKind,
}

impl DyadicBand {
    pub fn exact(exp: i32) -> Self {
        DyadicBand {
            exp,
            kind: BandKind::Exact,
        }
    }
    pub fn low(exp: i32) -> Self {
        DyadicBand {
            exp,
            kind: BandKind::Low,
        }
    }
    pub fn high(exp: i32) -> Self {
        DyadicBand {
            exp,
            kind: BandKind::High,
        }
    }
    pub fn scale(&self) -> f64 {
        2f64.powi(self.exp)
    }

    /// Fourier multiplier of the projector, summing the bumps inside `range`.
    pub fn symbol(&self, range: &DyadicRange, xi: f64) -> f64 {
        match self.kind {
            BandKind::Exact => phi_n(self.exp, xi),
            BandKind::Low => (range.min..=self.exp).map(|e| phi_n(e, xi)).sum(),
            BandKind::High => (self.exp..=range.max).map(|e| phi_n(e, xi)).sum(),
        }
    }
}

/// Applies a band projector to a spectrum.
pub fn lp_project_spectrum(s: &Spectrum, band: DyadicBand) -> Result<Spectrum> {
    let range = DyadicRange::for_grid(s.grid());
    range.check(band.exp)?;
    Ok(s.map_symbol(|xi, _| Complex64::new(band.symbol(&range, xi), 0.0)))
}

/// `P_N f`, `P_{<=N} f` or `P_{>=N} f`, acting on the x-frequency only.
pub fn lp_project(f: &RealField, band: DyadicBand) -> Result<RealField> {
    spectral::from_spectrum(&lp_project_spectrum(&to_spectrum(f), band)?)
}

/// `sum_l |u_hat(k, l)|^2` for every x-mode `k`.
fn column_energy(s: &Spectrum) -> Vec<f64> {
    let nx = s.grid().nx();
    let mut col = vec![0.0; nx];
    for row in s.coeffs().chunks(nx) {
        for (c, v) in col.iter_mut().zip(row) {
            *c += v.norm_sqr();
        }
    }
    col
}

/// `(exp, ||P_N f||_{L2})` for every band in the grid's range.
pub fn band_norms(s: &Spectrum) -> Vec<(i32, f64)> {
    let grid = s.grid();
    let col = column_energy(s);
    DyadicRange::for_grid(grid)
        .exponents()
        .map(|e| {
            let acc: f64 = col
                .iter()
                .zip(grid.xi_values())
                .map(|(c, &xi)| {
                    let p = phi_n(e, xi);
                    p * p * c
                })
                .sum();
            (e, (grid.area() * acc).sqrt())
        })
        .collect()
}

/// `H^{s1,s2}` norm: `|| u_hat (1 + xi^2)^{s1/2} (1 + mu^2)^{s2/2} ||`.
pub fn anisotropic_norm_spectrum(s: &Spectrum, s1: f64, s2: f64) -> f64 {
    s.weighted_l2(|xi, mu| (1.0 + xi * xi).powf(s1) * (1.0 + mu * mu).powf(s2))
}

pub fn anisotropic_norm(f: &RealField, s1: f64, s2: f64) -> f64 {
    anisotropic_norm_spectrum(&to_spectrum(f), s1, s2)
}

/// `E^s` norm: `(||f||_{H^{s,0}}^2 + ||dx^{-1} f_y||_{H^{s-1,0}}^2)^{1/2}`.
pub fn es_norm_spectrum(s: &Spectrum, order: f64) -> Result<f64> {
    let s = s.require_zero_x_mean()?;
    Ok(s.weighted_l2(|xi, mu| {
        if xi == 0.0 {
            return 0.0;
        }
        let j = 1.0 + xi * xi;
        j.powf(order) + (mu / xi).powi(2) * j.powf(order - 1.0)
    }))
}

pub fn es_norm(f: &RealField, order: f64) -> Result<f64> {
    es_norm_spectrum(&to_spectrum(f), order)
}

/// Dyadic weight sequence `{omega_N}` on the bands of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    delta: f64,
    min_exp: i32,
    weights: Vec<f64>,
}

impl Envelope {
    pub fn from_weights(delta: f64, min_exp: i32, weights: Vec<f64>) -> Self {
        Envelope {
            delta,
            min_exp,
            weights,
        }
    }

    /// `omega_N = value` on every band of the grid.
    pub fn constant(grid: &Grid2D, delta: f64, value: f64) -> Self {
        let range = DyadicRange::for_grid(grid);
        Envelope::from_weights(delta, range.min, vec![value; range.len()])
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn min_exp(&self) -> i32 {
        self.min_exp
    }
    pub fn max_exp(&self) -> i32 {
        self.min_exp + self.weights.len() as i32 - 1
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `omega_N` for `N = 2^exp`; bands outside the stored range take the nearest
    /// stored value, or 1 below `N = 1`.
    pub fn weight(&self, exp: i32) -> f64 {
        if exp < self.min_exp {
            return if exp < 0 { 1.0 } else { self.weights[0] };
        }
        let idx = ((exp - self.min_exp) as usize).min(self.weights.len() - 1);
        self.weights[idx]
    }

    pub fn scaled(&self, factor: f64) -> Envelope {
        Envelope::from_weights(
            self.delta,
            self.min_exp,
            self.weights.iter().map(|w| w * factor).collect(),
        )
    }

    /// `omega_N = 1` for `N < 1` and `omega_N <= omega_{2N} <= delta omega_N`.
    pub fn is_acceptable(&self) -> bool {
        let below_one = (self.min_exp..0).zip(&self.weights).all(|(_, &w)| w == 1.0);
        let slowly_varying = self
            .weights
            .windows(2)
            .all(|w| w[0] <= w[1] && w[1] <= self.delta * w[0]);
        self.delta > 1.0 && below_one && slowly_varying
    }
}

/// `(sum_N omega_N^2 <N>^{2s} ||P_N f||^2)^{1/2}`.
pub fn weighted_norm_spectrum(s: &Spectrum, order: f64, env: &Envelope) -> f64 {
    band_norms(s)
        .into_iter()
        .map(|(e, b)| {
            let w = env.weight(e) * bracket(2f64.powi(e)).powf(order) * b;
            w * w
        })
        .sum::<f64>()
        .sqrt()
}

pub fn weighted_norm(f: &RealField, order: f64, env: &Envelope) -> f64 {
    weighted_norm_spectrum(&to_spectrum(f), order, env)
}

/// `sum_N <N>^{s-1} <1/N>^{3/4} ||P_N w||`.
pub fn hbar_norm_spectrum(s: &Spectrum, order: f64) -> f64 {
    band_norms(s)
        .into_iter()
        .map(|(e, b)| hbar_weight(e, order) * b)
        .sum()
}

pub fn hbar_norm(w: &RealField, order: f64) -> f64 {
    hbar_norm_spectrum(&to_spectrum(w), order)
}

/// `<N>^{s-1} <1/N>^{3/4}` for `N = 2^exp`.
pub fn hbar_weight(exp: i32, order: f64) -> f64 {
    let n = 2f64.powi(exp);
    bracket(n).powf(order - 1.0) * bracket(1.0 / n).powf(0.75)
}

/// Acceptable envelope adapted to `f`.
///
/// With `t_N` the share of `||f||_{H^{s,0}}^2` carried by bands `M >= N`, the weights are
/// `omega_N = 1` for `N < 1` and `omega_N = max(omega_{N/2}, min(t_N^{-1/4}, delta omega_{N/2}))`
/// above. They grow by exactly `delta` per band past the support of `f` and keep
/// `weighted_norm(f, s, omega)^2 <= 3 sum_N <N>^{2s} ||P_N f||^2`.
pub fn build_envelope(f: &RealField, order: f64, delta: f64) -> Result<Envelope> {
    build_envelope_spectrum(&to_spectrum(f), order, delta)
}

pub fn build_envelope_spectrum(s: &Spectrum, order: f64, delta: f64) -> Result<Envelope> {
    if !(delta > 1.0) {
        return Err(KpError::ParamConstraintViolated(format!(
            "envelope growth constant must exceed 1, got {delta}"
        )));
    }
    let bands = band_norms(s);
    let energy: Vec<f64> = bands
        .iter()
        .map(|&(e, b)| (bracket(2f64.powi(e)).powf(order) * b).powi(2))
        .collect();
    let total: f64 = energy.iter().sum();
    if total == 0.0 {
        return Err(KpError::ZeroField);
    }
    let mut tails = vec![0.0; energy.len()];
    let mut acc = 0.0;
    for i in (0..energy.len()).rev() {
        acc += energy[i];
        tails[i] = acc / total;
    }
    let mut weights = Vec::with_capacity(bands.len());
    let mut prev: f64 = 1.0;
    for (&(e, _), &tail) in bands.iter().zip(&tails) {
        let w = if e < 0 {
            1.0
        } else {
            let target = if tail > 0.0 {
                tail.powf(-0.25)
            } else {
                f64::INFINITY
            };
            prev.max(target.min(delta * prev))
        };
        weights.push(w);
        prev = w;
    }
    Ok(Envelope::from_weights(delta, bands[0].0, weights))
}

const SYMBOL_REALITY_TOL: f64 = 1e-12;

/// Bilinear x-multiplier applied row by row:
/// `F_x(Lambda_a(f, g))(xi) = sum_{xi1 + xi2 = xi} a(xi1, xi2) f_hat(xi1) g_hat(xi2)`.
///
/// The symbol is tabulated on the lattice product and rejected when `|a|` exceeds `cap`
/// or when `a(-xi1, -xi2) != conj(a(xi1, xi2))`, since the output would not be real.
/// The sum is a direct cyclic convolution in the x-mode index.
pub fn bilinear_multiplier(
    a: &(dyn Fn(f64, f64) -> Complex64 + Sync),
    f: &RealField,
    g: &RealField,
    cap: f64,
) -> Result<RealField> {
    let grid = f.grid();
    if grid != g.grid() {
        return Err(KpError::GridMismatch);
    }
    let nx = grid.nx();
    let xi = grid.xi_values();
    let mut table = vec![Complex64::new(0.0, 0.0); nx * nx];
    let mut largest: f64 = 0.0;
    for k1 in 0..nx {
        for k2 in 0..nx {
            let v = a(xi[k1], xi[k2]);
            largest = largest.max(v.norm());
            table[k1 * nx + k2] = v;
        }
    }
    if !(largest <= cap) {
        return Err(KpError::UnboundedSymbol {
            value: largest,
            cap,
        });
    }
    let mut residue: f64 = 0.0;
    for k1 in (0..nx).filter(|&k| k != nx / 2) {
        for k2 in (0..nx).filter(|&k| k != nx / 2) {
            let mirror = table[((nx - k1) % nx) * nx + (nx - k2) % nx];
            residue = residue.max((mirror - table[k1 * nx + k2].conj()).norm());
        }
    }
    if residue > SYMBOL_REALITY_TOL * largest.max(1.0) {
        return Err(KpError::SymmetryViolation { residue });
    }
    let fh = row_spectra(grid, f.data());
    let gh = row_spectra(grid, g.data());
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    out.par_chunks_mut(nx)
        .zip(fh.par_chunks(nx).zip(gh.par_chunks(nx)))
        .for_each(|(o, (fr, gr))| {
            for k1 in 0..nx {
                let a1 = fr[k1];
                if a1.re == 0.0 && a1.im == 0.0 {
                    continue;
                }
                let trow = &table[k1 * nx..(k1 + 1) * nx];
                for k2 in 0..nx {
                    o[(k1 + k2) % nx] += trow[k2] * a1 * gr[k2];
                }
            }
        });
    spectral::fft_x_rows(grid, &mut out, true);
    Ok(RealField::from_raw(
        grid,
        out.into_iter().map(|c| c.re).collect(),
    ))
}

/// Normalized x-transform of each row with the Nyquist mode removed.
fn row_spectra(grid: &Grid2D, data: &[f64]) -> Vec<Complex64> {
    let nx = grid.nx();
    let mut rows: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    spectral::fft_x_rows(grid, &mut rows, false);
    let norm = 1.0 / nx as f64;
    for row in rows.chunks_mut(nx) {
        for c in row.iter_mut() {
            *c *= norm;
        }
        row[nx / 2] = Complex64::new(0.0, 0.0);
    }
    rows
}

/// Commutator symbol
/// `a1(xi1, xi2) = N3^{-1} phi_{N3}(xi1) phi~_N(xi2) [phi_N(xi1 + xi2)(xi1 + xi2) - phi_N(xi2) xi2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommutatorSymbol {
    pub n: i32,
    pub n3: i32,
}

impl CommutatorSymbol {
    pub fn eval(&self, xi1: f64, xi2: f64) -> f64 {
        let p3 = phi_n(self.n3, xi1);
        if p3 == 0.0 {
            return 0.0;
        }
        let pt = phi_tilde(self.n, xi2);
        if pt == 0.0 {
            return 0.0;
        }
        let s = xi1 + xi2;
        p3 * pt * (phi_n(self.n, s) * s - phi_n(self.n, xi2) * xi2) / 2f64.powi(self.n3)
    }

    /// Largest |a1| over the lattice product of a grid.
    pub fn lattice_sup(&self, grid: &Grid2D) -> f64 {
        let xi = grid.xi_values();
        xi.par_iter()
            .map(|&x1| {
                xi.iter()
                    .fold(0.0f64, |m, &x2| m.max(self.eval(x1, x2).abs()))
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Builds `a1` for `N = 2^n`, `N3 = 2^n3`; requires `N3 <= N / 4`.
pub fn commutator_symbol_a1(n: i32, n3: i32) -> Result<CommutatorSymbol> {
    if n3 > n - 2 {
        return Err(KpError::BandsTooClose { n, n3 });
    }
    Ok(CommutatorSymbol { n, n3 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn bump_plateau_support_and_symmetry() {
        assert_eq!(eta(1.0), 1.0);
        assert_eq!(eta(1.7), 0.0);
        assert_eq!(eta(1.25), 1.0);
        assert_eq!(eta(1.6), 0.0);
        for i in 0..200 {
            let x = i as f64 * 0.01;
            assert_eq!(eta(-x), eta(x));
        }
        let mut last = 1.0;
        for i in 0..=100 {
            let v = eta(1.25 + 0.35 * i as f64 / 100.0);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn phi_equals_one_at_two() {
        assert_eq!(phi(2.0), 1.0);
        assert_eq!(phi_n(3, 16.0), 1.0);
        assert_eq!(phi_n(0, 16.0 / 5.0), 0.0);
        assert_eq!(phi(0.0), 0.0);
    }

    #[test]
    fn range_covers_lattice() {
        let g = Grid2D::new(64, 8, 2.0 * PI / 3.0, 1.0).unwrap();
        let r = DyadicRange::for_grid(&g);
        for &xi in g.xi_values().iter().filter(|x| **x != 0.0) {
            let s: f64 = r.exponents().map(|e| phi_n(e, xi)).sum();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn projection_of_pure_modes() {
        let g = Grid2D::new(64, 8, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, _| (4.0 * x).cos());
        let same = lp_project(&f, DyadicBand::exact(1)).unwrap();
        for (a, b) in same.data().iter().zip(f.data()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
        let killed = lp_project(&f, DyadicBand::exact(0)).unwrap();
        assert!(killed.max_abs() < 1e-15);
        assert!(matches!(
            lp_project(&f, DyadicBand::exact(40)),
            Err(KpError::BandOutOfRange { .. })
        ));
    }

    #[test]
    fn low_and_high_pass_close_the_telescope() {
        let g = Grid2D::new(64, 8, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, y| (3.0 * x + y).sin() + (11.0 * x).cos());
        let r = DyadicRange::for_grid(&g);
        let lo = lp_project(&f, DyadicBand::low(2)).unwrap();
        let hi = lp_project(&f, DyadicBand::high(3)).unwrap();
        let sum = &lo + &hi;
        for (a, b) in sum.data().iter().zip(f.data()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_eq!(
            DyadicBand::low(r.max).symbol(&r, 5.0),
            DyadicBand::high(r.min).symbol(&r, 5.0)
        );
    }

    #[test]
    fn anisotropic_norm_of_single_mode() {
        let g = Grid2D::new(32, 8, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, _| 0.7 * x.cos());
        let l2 = f.l2_norm();
        assert_abs_diff_eq!(anisotropic_norm(&f, 0.0, 0.0), l2, epsilon = 1e-13);
        assert_abs_diff_eq!(
            anisotropic_norm(&f, 1.0, 0.0),
            2f64.sqrt() * l2,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            anisotropic_norm(&f, 1.0, 3.0),
            2f64.sqrt() * l2,
            epsilon = 1e-13
        );
    }

    #[test]
    fn es_norm_examples() {
        let g = Grid2D::new(32, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let flat = RealField::from_fn(&g, |x, _| (2.0 * x).sin());
        assert_abs_diff_eq!(
            es_norm(&flat, 1.0).unwrap(),
            anisotropic_norm(&flat, 1.0, 0.0),
            epsilon = 1e-13
        );
        assert_eq!(es_norm(&RealField::zeros(&g), 1.0).unwrap(), 0.0);
        let shifted = RealField::from_fn(&g, |x, _| 1.0 + x.sin());
        assert!(matches!(
            es_norm(&shifted, 1.0),
            Err(KpError::NotZeroXMean { .. })
        ));
    }

    #[test]
    fn es_norm_of_oblique_mode_against_quadrature() {
        // f = cos(x + y): f_x = -sin, dx^{-1} f_y = cos(x + y); H^{1,0} = L2 + x-derivative.
        let g = Grid2D::new(32, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, y| (x + y).cos());
        let fx = RealField::from_fn(&g, |x, y| -(x + y).sin());
        let oracle = (2.0 * f.l2_norm().powi(2) + fx.l2_norm().powi(2)).sqrt();
        assert_abs_diff_eq!(es_norm(&f, 1.0).unwrap(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn hbar_weights() {
        assert_abs_diff_eq!(
            hbar_weight(0, 0.5),
            2f64.powf(-0.25) * 2f64.powf(0.375),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(hbar_weight(-2, 1.0), 17f64.powf(0.375), epsilon = 1e-13);
        let g = Grid2D::new(32, 8, 2.0 * PI, 2.0 * PI).unwrap();
        assert_eq!(hbar_norm(&RealField::zeros(&g), 0.5), 0.0);
        let f = RealField::from_fn(&g, |x, _| (2.0 * x).cos());
        assert_abs_diff_eq!(
            hbar_norm(&f, 0.5),
            hbar_weight(0, 0.5) * f.l2_norm(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn weighted_norm_examples() {
        let g = Grid2D::new(64, 8, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, y| (4.0 * x).cos() * (1.0 + 0.2 * y.sin()));
        let one = Envelope::constant(&g, 2.0, 1.0);
        let two = one.scaled(2.0);
        let a = weighted_norm(&f, 1.0, &one);
        assert_eq!(weighted_norm(&f, 1.0, &two), 2.0 * a);
        assert_abs_diff_eq!(a, bracket(2.0) * f.l2_norm(), epsilon = 1e-12);
    }

    #[test]
    fn envelope_grows_by_delta_past_support() {
        let g = Grid2D::new(256, 8, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, _| x.cos() + 0.3 * (5.0 * x).sin());
        let env = build_envelope(&f, 1.0, 1.5).unwrap();
        assert!(env.is_acceptable());
        for e in env.min_exp()..0 {
            assert_eq!(env.weight(e), 1.0);
        }
        // 5 lies in bands 1 and 2; bands from 3 on carry nothing.
        for e in 4..=env.max_exp() {
            assert_abs_diff_eq!(env.weight(e) / env.weight(e - 1), 1.5, epsilon = 1e-12);
        }
        assert!(matches!(
            build_envelope(&RealField::zeros(&g), 1.0, 1.5),
            Err(KpError::ZeroField)
        ));
    }

    #[test]
    fn bilinear_with_unit_symbol_is_product() {
        let g = Grid2D::new(32, 8, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, y| x.sin() + 0.5 * (3.0 * x + y).cos());
        let h = RealField::from_fn(&g, |x, y| (2.0 * x).cos() * y.sin() + 0.1);
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        let p = bilinear_multiplier(&one, &f, &h, 10.0).unwrap();
        let direct = f.zip_with(&h, |a, b| a * b);
        for (a, b) in p.data().iter().zip(direct.data()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        let deriv = |_: f64, x2: f64| Complex64::new(0.0, x2);
        let q = bilinear_multiplier(&deriv, &f, &h, 100.0).unwrap();
        let hx = RealField::from_fn(&g, |x, y| -2.0 * (2.0 * x).sin() * y.sin());
        let direct = f.zip_with(&hx, |a, b| a * b);
        for (a, b) in q.data().iter().zip(direct.data()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert!(matches!(
            bilinear_multiplier(&deriv, &f, &h, 1.0),
            Err(KpError::UnboundedSymbol { .. })
        ));
        let odd = |_: f64, x2: f64| Complex64::new(x2, 0.0);
        assert!(matches!(
            bilinear_multiplier(&odd, &f, &h, 100.0),
            Err(KpError::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn commutator_symbol_basics() {
        assert!(matches!(
            commutator_symbol_a1(4, 3),
            Err(KpError::BandsTooClose { .. })
        ));
        let a = commutator_symbol_a1(6, 0).unwrap();
        for x2 in [-100.0, -3.0, 0.0, 7.5, 128.0] {
            assert_eq!(a.eval(0.0, x2), 0.0);
        }
        // xi2 and xi1 + xi2 far below band N = 64
        assert_eq!(a.eval(2.0, 3.0), 0.0);
    }
}

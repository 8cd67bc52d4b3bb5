//! Exact solutions and background residuals: line solitons, the Zaitsev
//! x-localized y-periodic wave, traveling-frame residuals and the forcing `g` of a
//! background profile.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{KpError, Result};
use crate::evolution::{linear_rates, Nonlinearity};
use crate::spectral::{
    forward_raw, inverse_real, to_spectrum, zero_x_mean_project, Equation, Grid2D, RealField,
};

type C = Complex64;

/// Boundary-to-peak ratio above which a localized profile is rejected.
pub const DOMAIN_HARD_LIMIT: f64 = 1e-6;
/// Boundary-to-peak ratio above which a localized profile is flagged.
pub const DOMAIN_SOFT_LIMIT: f64 = 1e-10;
/// Smallest admissible denominator of the Zaitsev profile on the lattice.
pub const DENOMINATOR_FLOOR: f64 = 1e-8;

/// Amplitude convention of the line soliton.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonForm {
    /// `(3c/2) sech^2(sqrt(c) x / 2)`.
    Printed,
    /// `3c sech^2(sqrt(c) x / 2)`, the traveling wave of `u_t + u_xxx + u u_x = 0` with speed `c`.
    Traveling,
}

impl SolitonForm {
    pub fn amplitude(self, c: f64) -> f64 {
        match self {
            SolitonForm::Printed => 1.5 * c,
            SolitonForm::Traveling => 3.0 * c,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SolitonForm::Printed => "printed",
            SolitonForm::Traveling => "traveling",
        }
    }
}

/// Profile of a line soliton centred at `x = shift`, without grid checks.
pub fn soliton_profile(c: f64, form: SolitonForm, x: f64) -> f64 {
    form.amplitude(c) / (0.5 * c.sqrt() * x).cosh().powi(2)
}

/// Samples a y-independent line soliton centred at `x = shift`.
pub fn line_soliton_with(
    c: f64,
    grid: &Grid2D,
    form: SolitonForm,
    shift: f64,
) -> Result<RealField> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(KpError::ParamConstraintViolated(format!(
            "soliton speed must be positive, got {c}"
        )));
    }
    let period = grid.lx();
    let f = RealField::from_fn(grid, |x, _| {
        let d = (x - shift + 0.5 * period).rem_euclid(period) - 0.5 * period;
        soliton_profile(c, form, d)
    });
    check_localized(&f)?;
    Ok(f)
}

/// `phi_c = (3c/2) sech^2(sqrt(c) x / 2)` centred at the origin.
pub fn line_soliton(c: f64, grid: &Grid2D) -> Result<RealField> {
    line_soliton_with(c, grid, SolitonForm::Printed, 0.0)
}

/// Largest boundary value relative to the peak; errors past [`DOMAIN_HARD_LIMIT`].
pub fn check_localized(f: &RealField) -> Result<f64> {
    let peak = f.max_abs();
    if peak == 0.0 {
        return Ok(0.0);
    }
    let boundary = f.boundary_amplitude();
    if boundary > DOMAIN_HARD_LIMIT * peak {
        return Err(KpError::DomainTooSmall { boundary, peak });
    }
    Ok(boundary / peak)
}

/// How the Zaitsev profile is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZaitsevConvention {
    /// `12 a^2 (1 - b cosh(aX) cos(sqrt3 d y)) / (cosh(aX) - b cos(sqrt3 d y))^2`
    /// with `b = kappa^{-1/2}`, moving at speed `c / a`.
    Rescaled,
    /// Literal form `2 a^2 kappa (1 - k^{-1/2} cosh(aX) cos(d y)) / (k (cosh(aX) - cos(d y))^2)`
    /// with `k = kappa`.
    LiteralKappa,
    /// Literal form with `k = kappa^2`.
    LiteralKappaSquared,
}

impl ZaitsevConvention {
    pub fn name(self) -> &'static str {
        match self {
            ZaitsevConvention::Rescaled => "rescaled",
            ZaitsevConvention::LiteralKappa => "literal-k=kappa",
            ZaitsevConvention::LiteralKappaSquared => "literal-k=kappa^2",
        }
    }

    pub fn all() -> [ZaitsevConvention; 3] {
        [
            ZaitsevConvention::Rescaled,
            ZaitsevConvention::LiteralKappa,
            ZaitsevConvention::LiteralKappaSquared,
        ]
    }
}

/// Zaitsev parameters with `delta^2 > alpha^4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZaitsevParams {
    pub alpha: f64,
    pub delta: f64,
}

impl ZaitsevParams {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if alpha == 0.0 || delta == 0.0 || !(delta * delta > alpha.powi(4)) {
            return Err(KpError::ParamConstraintViolated(format!(
                "need alpha, delta nonzero and delta^2 > alpha^4, got alpha = {alpha}, delta = {delta}"
            )));
        }
        Ok(ZaitsevParams { alpha, delta })
    }

    /// `kappa = delta^2 / (delta^2 - alpha^4)`.
    pub fn kappa(&self) -> f64 {
        let d2 = self.delta * self.delta;
        d2 / (d2 - self.alpha.powi(4))
    }

    /// `c = alpha^3 + 3 delta^2 / alpha`.
    pub fn c(&self) -> f64 {
        self.alpha.powi(3) + 3.0 * self.delta * self.delta / self.alpha
    }

    /// Wavenumber of the y-modulation.
    pub fn y_wavenumber(&self, convention: ZaitsevConvention) -> f64 {
        match convention {
            ZaitsevConvention::Rescaled => 3f64.sqrt() * self.delta.abs(),
            _ => self.delta.abs(),
        }
    }

    pub fn y_period(&self, convention: ZaitsevConvention) -> f64 {
        2.0 * PI / self.y_wavenumber(convention)
    }

    /// Speed of the frame in which the profile is stationary.
    pub fn frame_speed(&self, convention: ZaitsevConvention) -> f64 {
        match convention {
            ZaitsevConvention::Rescaled => self.c() / self.alpha,
            _ => self.c(),
        }
    }

    fn numerator_and_denominator(
        &self,
        convention: ZaitsevConvention,
        x: f64,
        y: f64,
    ) -> (f64, f64) {
        let a = self.alpha;
        let kappa = self.kappa();
        let ch = (a * x).cosh();
        let cs = (self.y_wavenumber(convention) * y).cos();
        match convention {
            ZaitsevConvention::Rescaled => {
                let b = kappa.powf(-0.5);
                (12.0 * a * a * (1.0 - b * ch * cs), ch - b * cs)
            }
            ZaitsevConvention::LiteralKappa | ZaitsevConvention::LiteralKappaSquared => {
                let k = if convention == ZaitsevConvention::LiteralKappa {
                    kappa
                } else {
                    kappa * kappa
                };
                (
                    2.0 * a * a * kappa * (1.0 - k.powf(-0.5) * ch * cs) / k,
                    ch - cs,
                )
            }
        }
    }
}

/// Sampled Zaitsev wave with its derived constants.
#[derive(Debug, Clone)]
pub struct ZaitsevWave {
    pub field: RealField,
    pub params: ZaitsevParams,
    pub convention: ZaitsevConvention,
    pub kappa: f64,
    pub c: f64,
    pub frame_speed: f64,
    pub min_denominator: f64,
}

/// Samples the Zaitsev wave as a function of `X = x - frame_shift` and `y`.
pub fn zaitsev(
    alpha: f64,
    delta: f64,
    grid: &Grid2D,
    frame_shift: f64,
    convention: ZaitsevConvention,
) -> Result<ZaitsevWave> {
    let params = ZaitsevParams::new(alpha, delta)?;
    let period = params.y_period(convention);
    let m = grid.ly() / period;
    if m < 0.5 || (m - m.round()).abs() > 1e-9 * m.max(1.0) {
        return Err(KpError::PeriodMismatch {
            period,
            ly: grid.ly(),
        });
    }
    let lx = grid.lx();
    let mut min_den = f64::INFINITY;
    let mut data = Vec::with_capacity(grid.len());
    for j in 0..grid.ny() {
        let y = grid.y(j);
        for i in 0..grid.nx() {
            let x = (grid.x(i) - frame_shift + 0.5 * lx).rem_euclid(lx) - 0.5 * lx;
            let (num, den) = params.numerator_and_denominator(convention, x, y);
            min_den = min_den.min(den.abs());
            data.push(num / (den * den));
        }
    }
    if min_den < DENOMINATOR_FLOOR {
        return Err(KpError::SingularDenominator { min: min_den });
    }
    let field = RealField::new(grid, data)?;
    Ok(ZaitsevWave {
        field,
        params,
        convention,
        kappa: params.kappa(),
        c: params.c(),
        frame_speed: params.frame_speed(convention),
        min_denominator: min_den,
    })
}

/// Relative residual of a traveling-wave candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingResidual {
    /// `||R|| / ||f||` with `R = -c f_x + f_xxx + (f^2)_x / 2 + eps dx^{-1} f_yy`.
    pub relative: f64,
    /// `max_y |f(-Lx/2, y)|`.
    pub boundary_amplitude: f64,
    /// Largest `|F[f_yy](0, mu)|` dropped before taking `dx^{-1}`.
    pub discarded_mean: f64,
}

/// Residual of `u(t, x, y) = f(x - ct, y)` in the integrated equation.
pub fn traveling_residual(f: &RealField, c: f64, eq: Equation) -> TravelingResidual {
    let grid = f.grid();
    let nx = grid.nx();
    let fh = forward_raw(grid, f.data());
    let sq: Vec<f64> = f.data().iter().map(|v| v * v).collect();
    let sqh = forward_raw(grid, &sq);
    let mut discarded: f64 = 0.0;
    let mut r = vec![C::default(); grid.len()];
    for l in 0..grid.ny() {
        let mu = grid.mu(l);
        for k in 0..nx {
            let idx = l * nx + k;
            let xi = grid.xi(k);
            if xi == 0.0 {
                discarded = discarded.max((fh[idx] * mu * mu).norm());
                continue;
            }
            let ik = C::new(0.0, xi);
            let fyy = -mu * mu * fh[idx];
            r[idx] = -c * ik * fh[idx]
                + ik * ik * ik * fh[idx]
                + 0.5 * ik * sqh[idx]
                + eq.eps() * fyy / ik;
        }
    }
    let res = RealField::from_raw(grid, inverse_real(grid, &r));
    let norm = f.l2_norm();
    TravelingResidual {
        relative: if norm == 0.0 {
            0.0
        } else {
            res.l2_norm() / norm
        },
        boundary_amplitude: f.boundary_amplitude(),
        discarded_mean: discarded,
    }
}

/// `g = psi_t + psi_xxx + eps dx^{-1} psi_yy + 1/2 dx((P psi)^2)`, projected to zero x-mean.
///
/// `P` is the evolver's 2/3 mask and the product is masked the same way, so that `g`
/// matches the discrete equation exactly on band-limited backgrounds.
pub fn background_g(psi: &RealField, psi_t: &RealField, eq: Equation) -> Result<RealField> {
    let grid = psi.grid();
    if grid != psi_t.grid() {
        return Err(KpError::GridMismatch);
    }
    let nx = grid.nx();
    let ph = forward_raw(grid, psi.data());
    let pth = forward_raw(grid, psi_t.data());
    let rates = linear_rates(grid, eq);
    let nl = Nonlinearity::new(grid);
    let quad = nl.apply(&ph);
    let mut g: Vec<C> = (0..grid.len())
        .map(|i| pth[i] - rates[i] * ph[i] - quad[i])
        .collect();
    for row in g.chunks_mut(nx) {
        row[0] = C::default();
    }
    Ok(RealField::from_raw(grid, inverse_real(grid, &g)))
}

/// Spectral x-derivative of a field.
pub fn x_derivative(f: &RealField) -> RealField {
    let grid = f.grid();
    let nx = grid.nx();
    let mut h = forward_raw(grid, f.data());
    for (idx, c) in h.iter_mut().enumerate() {
        *c *= C::new(0.0, grid.xi(idx % nx));
    }
    RealField::from_raw(grid, inverse_real(grid, &h))
}

/// Forcing of a profile translating rigidly at `speed` (`psi_t = -speed psi_x`).
pub fn traveling_background_g(psi: &RealField, speed: f64, eq: Equation) -> Result<RealField> {
    let psi_t = &x_derivative(psi) * (-speed);
    background_g(psi, &psi_t, eq)
}

/// Line soliton with its x-mean removed: `phi - m` is an exact traveling wave of speed `c - m`.
#[derive(Debug, Clone)]
pub struct ProjectedSoliton {
    pub field: RealField,
    pub mean: f64,
    pub speed: f64,
}

pub fn projected_soliton(c: f64, grid: &Grid2D, shift: f64) -> Result<ProjectedSoliton> {
    let f = line_soliton_with(c, grid, SolitonForm::Traveling, shift)?;
    let mean = to_spectrum(&f).at(0, 0).re;
    Ok(ProjectedSoliton {
        field: zero_x_mean_project(&f),
        mean,
        speed: c - mean,
    })
}

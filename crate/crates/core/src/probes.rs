//! Numerical probes of the linear dispersive estimates and of the KP-II resonance relation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KpError, Result};
use crate::evolution::linear_propagate;
use crate::spectral::{
    apply_x_power, from_spectrum, omega, to_spectrum, Equation, RealField, Spectrum,
};

/// `beta(q, r) = 3 (1/2 - 1/r - 1/q)`; infinite exponents are allowed.
pub fn beta_exponent(q: f64, r: f64) -> f64 {
    3.0 * (0.5 - 1.0 / r - 1.0 / q)
}

/// `2 <= q, r <= inf`, `1/2 (1/2 - 1/r) <= 1/q <= 1/2 - 1/r`, and `(q, r)` is neither
/// `(2, inf)` nor `(4, inf)`.
pub fn is_admissible(q: f64, r: f64) -> bool {
    if q.is_nan() || r.is_nan() || q < 2.0 || r < 2.0 {
        return false;
    }
    if r.is_infinite() && (q == 2.0 || q == 4.0) {
        return false;
    }
    let upper = 0.5 - 1.0 / r;
    let lower = 0.5 * upper;
    let iq = 1.0 / q;
    lower <= iq && iq <= upper
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissiblePair {
    q: f64,
    r: f64,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64) -> Result<Self> {
        if is_admissible(q, r) {
            Ok(AdmissiblePair { q, r })
        } else {
            Err(KpError::NotAdmissible { q, r })
        }
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn beta(&self) -> f64 {
        beta_exponent(self.q, self.r)
    }
}

/// Modulation `sigma(tau, xi, mu) = tau - omega(xi, mu)`; `Equation::KpII` gives
/// `sigma_+`, `Equation::KpI` gives `sigma_-`.
pub fn sigma(eq: Equation, tau: f64, xi: f64, mu: f64) -> Result<f64> {
    Ok(tau - omega(eq, xi, mu)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationPoint {
    pub tau: f64,
    pub xi: f64,
    pub mu: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

impl ModulationPoint {
    pub fn new(tau: f64, xi: f64, mu: f64) -> Result<Self> {
        Ok(ModulationPoint {
            tau,
            xi,
            mu,
            sigma_plus: sigma(Equation::KpII, tau, xi, mu)?,
            sigma_minus: sigma(Equation::KpI, tau, xi, mu)?,
        })
    }
}

/// Both sides of the KP-II resonance relation
///
/// `sigma(t1, xi1, mu1) + sigma(t - t1, xi - xi1, mu - mu1) - sigma(t, xi, mu)
///  = xi xi1 (xi - xi1) (3 + (mu xi1 - mu1 xi)^2 / (xi xi1 (xi - xi1))^2)`,
///
/// the left side evaluated at `t = t1 = 0`.
pub fn resonance_kp2(xi: f64, xi1: f64, mu: f64, mu1: f64) -> Result<(f64, f64)> {
    let xi2 = xi - xi1;
    if xi == 0.0 || xi1 == 0.0 || xi2 == 0.0 {
        return Err(KpError::DegenerateFrequencies);
    }
    let eq = Equation::KpII;
    let lhs = sigma(eq, 0.0, xi1, mu1)? + sigma(eq, 0.0, xi2, mu - mu1)? - sigma(eq, 0.0, xi, mu)?;
    let p = xi * xi1 * xi2;
    let m = mu * xi1 - mu1 * xi;
    let rhs = p * (3.0 + (m / p).powi(2));
    Ok((lhs, rhs))
}

/// Sampled check of the resonance relation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceScan {
    pub seed: u64,
    pub samples: usize,
    /// Largest `|lhs - rhs| / max(1, |rhs|)`.
    pub max_rel_error: f64,
    /// Smallest `|rhs| / (3 |xi xi1 (xi - xi1)|)`.
    pub min_coercivity: f64,
    /// `(xi, xi1, mu, mu1, lhs, rhs)` for every sample.
    pub rows: Vec<[f64; 6]>,
}

/// Draws `n` frequency quadruples with `xi, xi1` in `[-8, 8]`, `mu, mu1` in `[-16, 16]`;
/// every fourth sample puts `xi - xi1` at `1e-3`.
pub fn resonance_scan(n: usize, seed: u64) -> Result<ResonanceScan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut max_rel_error = 0.0f64;
    let mut min_coercivity = f64::INFINITY;
    while rows.len() < n {
        let xi: f64 = rng.gen_range(-8.0..8.0);
        let xi1 = if rows.len() % 4 == 3 {
            xi - 1e-3
        } else {
            rng.gen_range(-8.0..8.0)
        };
        let mu = rng.gen_range(-16.0..16.0);
        let mu1 = rng.gen_range(-16.0..16.0);
        let (lhs, rhs) = match resonance_kp2(xi, xi1, mu, mu1) {
            Ok(v) => v,
            Err(KpError::DegenerateFrequencies) => continue,
            Err(e) => return Err(e),
        };
        max_rel_error = max_rel_error.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        min_coercivity = min_coercivity.min(rhs.abs() / (3.0 * (xi * xi1 * (xi - xi1)).abs()));
        rows.push([xi, xi1, mu, mu1, lhs, rhs]);
    }
    Ok(ResonanceScan {
        seed,
        samples: n,
        max_rel_error,
        min_coercivity,
        rows,
    })
}

/// `||D_x^{-beta} U(t) phi||_{L^q_T L^r} / ||phi||_{L2}` by midpoint sampling of `nt`
/// times in `[0, T]` (or `[T, 0]` for negative `T`).
pub fn strichartz_ratio(
    phi: &RealField,
    pair: AdmissiblePair,
    t_final: f64,
    eq: Equation,
    nt: usize,
) -> Result<f64> {
    let norm = phi.l2_norm();
    if norm == 0.0 {
        return Err(KpError::ZeroField);
    }
    if nt == 0 {
        return Err(KpError::ParamConstraintViolated(
            "need at least one time sample".into(),
        ));
    }
    let beta = pair.beta();
    let s0 = to_spectrum(phi);
    let s = if beta == 0.0 {
        s0
    } else {
        apply_x_power(&s0, -beta, false)?
    };
    let h = t_final / nt as f64;
    let mut acc = 0.0f64;
    for k in 0..nt {
        let t = (k as f64 + 0.5) * h;
        let f = from_spectrum(&linear_propagate(&s, eq, t))?;
        let n = f.lp_norm(pair.r());
        if pair.q().is_infinite() {
            acc = acc.max(n);
        } else {
            acc += h.abs() * n.powf(pair.q());
        }
    }
    let mixed = if pair.q().is_infinite() {
        acc
    } else {
        acc.powf(1.0 / pair.q())
    };
    Ok(mixed / norm)
}

/// Fitted decay of `||D_x^{-e} U(t) phi||_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest time before the fastest relevant wave wraps around the x-period.
    pub window: f64,
    /// `(t, ||D_x^{-e} U(t) phi||_inf)`.
    pub samples: Vec<(f64, f64)>,
}

/// Recirculation window `Lx / (3 v)` with `v = 3 xi_q^2`, `xi_q` the 99% energy quantile
/// of `|xi|`.
pub fn recirculation_window(s: &Spectrum) -> f64 {
    let grid = s.grid();
    let nx = grid.nx();
    let mut col = vec![0.0; nx];
    for row in s.coeffs().chunks(nx) {
        for (c, v) in col.iter_mut().zip(row) {
            *c += v.norm_sqr();
        }
    }
    let mut by_freq: Vec<(f64, f64)> = (0..nx).map(|k| (grid.xi(k).abs(), col[k])).collect();
    by_freq.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = col.iter().sum();
    if total == 0.0 {
        return f64::INFINITY;
    }
    let mut acc = 0.0;
    let mut xi_q = by_freq.last().map(|p| p.0).unwrap_or(0.0);
    for (xi, e) in by_freq {
        acc += e;
        if acc >= 0.99 * total {
            xi_q = xi;
            break;
        }
    }
    let speed = 3.0 * xi_q * xi_q;
    if speed == 0.0 {
        f64::INFINITY
    } else {
        grid.lx() / (3.0 * speed)
    }
}

/// Least-squares slope of `log ||D_x^{-e} U(t) phi||_inf` against `log t`.
///
/// Localization is checked on `phi` itself; the `xi = 0` modes, which do not disperse,
/// are then removed.
pub fn decay_probe(phi: &RealField, e: f64, times: &[f64], eq: Equation) -> Result<DecayFit> {
    if !(0.0..1.5).contains(&e) {
        return Err(KpError::ParamConstraintViolated(format!(
            "smoothing exponent must lie in [0, 3/2), got {e}"
        )));
    }
    if times.len() < 2 || times.iter().any(|&t| !(t > 0.0)) {
        return Err(KpError::ParamConstraintViolated(
            "need at least two positive times".into(),
        ));
    }
    crate::solutions::check_localized(phi)?;
    let s0 = to_spectrum(phi).project_zero_x_mean();
    let window = recirculation_window(&s0);
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    if t_max > window {
        return Err(KpError::RecirculationWindowExceeded { t: t_max, window });
    }
    let s = if e == 0.0 {
        s0
    } else {
        apply_x_power(&s0, -e, false)?
    };
    let samples: Vec<(f64, f64)> = times
        .iter()
        .map(|&t| Ok((t, from_spectrum(&linear_propagate(&s, eq, t))?.max_abs())))
        .collect::<Result<_>>()?;
    let (slope, intercept) = fit_line(
        &samples
            .iter()
            .map(|&(t, v)| (t.ln(), v.ln()))
            .collect::<Vec<_>>(),
    );
    Ok(DecayFit {
        slope,
        intercept,
        window,
        samples,
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b)`.
pub fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let a = sxy / sxx;
    (a, my - a * mx)
}

/// `n` times spaced geometrically over `[t0, t1]`.
pub fn geometric_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t0];
    }
    let r = (t1 / t0).ln() / (n - 1) as f64;
    (0..n).map(|k| t0 * (r * k as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid2D;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn beta_values() {
        assert_eq!(beta_exponent(4.0, 4.0), 0.0);
        assert_eq!(beta_exponent(8.0, 4.0), 3.0 / 8.0);
        assert_eq!(beta_exponent(INF, 2.0), 0.0);
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(4.0, 4.0));
        assert!(!is_admissible(2.0, INF));
        assert!(!is_admissible(4.0, INF));
        assert!(!is_admissible(2.0, 2.0));
        assert!(is_admissible(INF, 2.0));
        assert!(matches!(
            AdmissiblePair::new(2.0, 2.0),
            Err(KpError::NotAdmissible { .. })
        ));
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma(Equation::KpI, 1.0, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(sigma(Equation::KpII, 0.0, 1.0, 1.0).unwrap(), 0.0);
        let a = sigma(Equation::KpII, 2.5, 0.7, 0.3).unwrap();
        let b = sigma(Equation::KpII, 1.5, 0.7, 0.3).unwrap();
        assert_eq!(a - b, 1.0);
        assert!(matches!(
            sigma(Equation::KpI, 0.0, 0.0, 1.0),
            Err(KpError::ZeroXFrequency)
        ));
    }

    #[test]
    fn resonance_examples() {
        let (l, r) = resonance_kp2(2.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!((l, r), (6.0, 6.0));
        let (l, r) = resonance_kp2(3.0, 1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(l, 18.0 + 1.0 / 6.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r, 18.0 + 1.0 / 6.0, epsilon = 1e-13);
        assert!(matches!(
            resonance_kp2(1.0, 1.0, 0.0, 0.0),
            Err(KpError::DegenerateFrequencies)
        ));
    }

    #[test]
    fn plane_wave_ratio_is_one() {
        let g = Grid2D::new(32, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let f = RealField::from_fn(&g, |x, y| (2.0 * x + y).cos());
        let pair = AdmissiblePair::new(INF, 2.0).unwrap();
        let r = strichartz_ratio(&f, pair, 1.0, Equation::KpI, 8).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-13);
        assert!(matches!(
            strichartz_ratio(&RealField::zeros(&g), pair, 1.0, Equation::KpI, 8),
            Err(KpError::ZeroField)
        ));
    }

    #[test]
    fn decay_window_is_enforced() {
        let g = Grid2D::new(256, 16, 40.0 * PI, 40.0).unwrap();
        let f = RealField::from_fn(&g, |x, y| (-x * x - y * y / 4.0).exp());
        let w = recirculation_window(&to_spectrum(&f));
        assert!(matches!(
            decay_probe(&f, 0.0, &[1.0, 2.0 * w], Equation::KpI),
            Err(KpError::RecirculationWindowExceeded { .. })
        ));
    }

    #[test]
    fn least_squares_line() {
        let (a, b) = fit_line(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert_abs_diff_eq!(a, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-14);
        let t = geometric_times(2.0, 8.0, 3);
        assert_abs_diff_eq!(t[1], 4.0, epsilon = 1e-14);
    }
}

//! Time integration of KP-I/KP-II in integrated form,
//! `u_t = -u_xxx - eps dx^{-1} u_yy - u u_x`, with a fourth-order exponential
//! time-differencing Runge–Kutta scheme and conserved-quantity monitoring.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::decomposition::{anisotropic_norm_spectrum, es_norm_spectrum};
use crate::error::{KpError, Result};
use crate::spectral::{
    self, forward_raw, inverse_real, omega_unchecked, to_spectrum, Equation, Grid2D, RealField,
    Spectrum,
};

type C = Complex64;

const CONTOUR_POINTS: usize = 32;
/// Coefficient magnitude treated as blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;
/// Relative mass change per step that triggers a step-size halving in guarded runs.
pub const DRIFT_GUARD_TOL: f64 = 1e-9;

/// Fourier rate `i omega_eps(xi, mu)` of the linear part; zero on the `xi = 0` column.
pub fn linear_symbol(eq: Equation, xi: f64, mu: f64) -> C {
    C::new(0.0, omega_unchecked(eq, xi, mu))
}

/// Exact linear flow: multiplies every mode by `exp(i t omega)`.
pub fn linear_propagate(s: &Spectrum, eq: Equation, t: f64) -> Spectrum {
    s.map_symbol(|xi, mu| C::from_polar(1.0, t * omega_unchecked(eq, xi, mu)))
}

/// Cox–Matthews ETDRK4 coefficients for a diagonal linear operator.
///
/// The phi-function combinations are averaged over 32 points of the unit circle centred
/// at each `h L`, which avoids cancellation when `|h L|` is small.
#[derive(Debug, Clone)]
pub struct Etdrk4 {
    h: f64,
    e: Vec<C>,
    e2: Vec<C>,
    q: Vec<C>,
    f1: Vec<C>,
    f2: Vec<C>,
    f3: Vec<C>,
}

impl Etdrk4 {
    pub fn new(rates: &[C], h: f64) -> Self {
        let roots: Vec<C> = (0..CONTOUR_POINTS)
            .map(|k| C::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / CONTOUR_POINTS as f64))
            .collect();
        let n = rates.len();
        let mut out = Etdrk4 {
            h,
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        let m = CONTOUR_POINTS as f64;
        for &l in rates {
            let hl = l * h;
            out.e.push(hl.exp());
            out.e2.push((hl * 0.5).exp());
            let (mut q, mut f1, mut f2, mut f3) =
                (C::default(), C::default(), C::default(), C::default());
            for r in &roots {
                let z = hl + r;
                let ez = z.exp();
                let z3 = z * z * z;
                q += ((z * 0.5).exp() - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            out.q.push(q * (h / m));
            out.f1.push(f1 * (h / m));
            out.f2.push(f2 * (h / m));
            out.f3.push(f3 * (h / m));
        }
        out
    }

    pub fn dt(&self) -> f64 {
        self.h
    }

    /// One step of a system of fields sharing the same linear operator.
    pub fn step_system<F>(&self, u: &[Vec<C>], t: f64, nonlinear: F) -> Result<Vec<Vec<C>>>
    where
        F: Fn(&[Vec<C>], f64) -> Result<Vec<Vec<C>>>,
    {
        let h = self.h;
        let nu = nonlinear(u, t)?;
        let a: Vec<Vec<C>> = u
            .iter()
            .zip(&nu)
            .map(|(u, n)| self.combine2(&self.e2, u, &self.q, n))
            .collect();
        let na = nonlinear(&a, t + 0.5 * h)?;
        let b: Vec<Vec<C>> = u
            .iter()
            .zip(&na)
            .map(|(u, n)| self.combine2(&self.e2, u, &self.q, n))
            .collect();
        let nb = nonlinear(&b, t + 0.5 * h)?;
        let c: Vec<Vec<C>> = a
            .iter()
            .zip(nb.iter().zip(&nu))
            .map(|(a, (nb, nu))| {
                a.iter()
                    .enumerate()
                    .map(|(i, &av)| self.e2[i] * av + self.q[i] * (2.0 * nb[i] - nu[i]))
                    .collect()
            })
            .collect();
        let nc = nonlinear(&c, t + h)?;
        Ok((0..u.len())
            .map(|f| {
                (0..u[f].len())
                    .map(|i| {
                        self.e[i] * u[f][i]
                            + self.f1[i] * nu[f][i]
                            + 2.0 * self.f2[i] * (na[f][i] + nb[f][i])
                            + self.f3[i] * nc[f][i]
                    })
                    .collect()
            })
            .collect())
    }

    pub fn step<F>(&self, u: &[C], t: f64, nonlinear: F) -> Result<Vec<C>>
    where
        F: Fn(&[C], f64) -> Result<Vec<C>>,
    {
        let mut out = self.step_system(&[u.to_vec()], t, |v, t| Ok(vec![nonlinear(&v[0], t)?]))?;
        Ok(out.pop().expect("one field"))
    }

    fn combine2(&self, m1: &[C], x: &[C], m2: &[C], y: &[C]) -> Vec<C> {
        (0..x.len()).map(|i| m1[i] * x[i] + m2[i] * y[i]).collect()
    }
}

/// Linear rates `i omega` on the grid in storage order.
pub fn linear_rates(grid: &Grid2D, eq: Equation) -> Vec<C> {
    let nx = grid.nx();
    (0..grid.len())
        .map(|idx| linear_symbol(eq, grid.xi(idx % nx), grid.mu(idx / nx)))
        .collect()
}

/// 2/3-rule mask in storage order.
pub fn dealias_mask(grid: &Grid2D) -> Vec<bool> {
    let nx = grid.nx();
    (0..grid.len())
        .map(|idx| grid.dealias_keeps(idx % nx, idx / nx))
        .collect()
}

/// Precomputed pieces of the quadratic term `-1/2 dx (u^2)`.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    grid: Grid2D,
    mask: Vec<bool>,
    half_dx: Vec<C>,
}

impl Nonlinearity {
    pub fn new(grid: &Grid2D) -> Self {
        let mask = dealias_mask(grid);
        let nx = grid.nx();
        let half_dx = (0..grid.len())
            .map(|idx| {
                if mask[idx] {
                    C::new(0.0, -0.5 * grid.xi(idx % nx))
                } else {
                    C::default()
                }
            })
            .collect();
        Nonlinearity {
            grid: grid.clone(),
            mask,
            half_dx,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Physical samples of the dealiased field `P u`.
    pub fn physical(&self, u: &[C]) -> Vec<f64> {
        let masked: Vec<C> = u
            .iter()
            .zip(&self.mask)
            .map(|(&c, &keep)| if keep { c } else { C::default() })
            .collect();
        inverse_real(&self.grid, &masked)
    }

    /// `-1/2 i xi F[p]` restricted to the dealiasing band, for physical samples `p`.
    pub fn half_derivative_of(&self, p: &[f64]) -> Vec<C> {
        let mut out = forward_raw(&self.grid, p);
        for (c, m) in out.iter_mut().zip(&self.half_dx) {
            *c *= m;
        }
        out
    }

    /// `F[-1/2 dx ((P u)^2)]`, masked.
    pub fn apply(&self, u: &[C]) -> Vec<C> {
        let p = self.physical(u);
        let sq: Vec<f64> = p.iter().map(|v| v * v).collect();
        self.half_derivative_of(&sq)
    }

    /// Zeroes every mode outside the dealiasing band.
    pub fn project(&self, u: &mut [C]) {
        for (c, &keep) in u.iter_mut().zip(&self.mask) {
            if !keep {
                *c = C::default();
            }
        }
    }
}

/// Dealiased `F[-1/2 dx (u^2)]` for zero-x-mean data.
pub fn nonlinear_rhs(s: &Spectrum) -> Result<Spectrum> {
    let s = s.require_zero_x_mean()?;
    let n = Nonlinearity::new(s.grid());
    Ok(Spectrum::from_raw(s.grid(), n.apply(s.coeffs()), true))
}

/// State of one evolution run.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub spectrum: Spectrum,
    pub dt: f64,
    pub steps: u64,
    pub eq: Equation,
}

impl SolverState {
    /// Projects `u0` to zero x-mean and, when `galerkin` is set, onto the dealiasing band.
    pub fn new(u0: &RealField, eq: Equation, dt: f64, galerkin: bool) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(KpError::ParamConstraintViolated(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let mut s = to_spectrum(u0).project_zero_x_mean();
        if galerkin {
            Nonlinearity::new(u0.grid()).project(s.coeffs_mut());
        }
        Ok(SolverState {
            t: 0.0,
            spectrum: s,
            dt,
            steps: 0,
            eq,
        })
    }

    pub fn field(&self) -> Result<RealField> {
        spectral::from_spectrum(&self.spectrum)
    }
}

/// ETDRK4 integrator for KP-I or KP-II on a fixed grid and step.
#[derive(Debug, Clone)]
pub struct KpSolver {
    eq: Equation,
    scheme: Etdrk4,
    nonlinearity: Nonlinearity,
    linear_only: bool,
}

impl KpSolver {
    pub fn new(grid: &Grid2D, eq: Equation, dt: f64) -> Self {
        KpSolver {
            eq,
            scheme: Etdrk4::new(&linear_rates(grid, eq), dt),
            nonlinearity: Nonlinearity::new(grid),
            linear_only: false,
        }
    }

    /// Solver with the quadratic term switched off.
    pub fn linear(grid: &Grid2D, eq: Equation, dt: f64) -> Self {
        KpSolver {
            linear_only: true,
            ..KpSolver::new(grid, eq, dt)
        }
    }

    pub fn dt(&self) -> f64 {
        self.scheme.dt()
    }
    pub fn equation(&self) -> Equation {
        self.eq
    }
    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn rhs(&self, u: &[C]) -> Vec<C> {
        if self.linear_only {
            vec![C::default(); u.len()]
        } else {
            self.nonlinearity.apply(u)
        }
    }

    /// Advances raw coefficients by one step, re-projecting to zero x-mean.
    pub fn advance(&self, u: &[C], t: f64) -> Vec<C> {
        let mut out = self
            .scheme
            .step(u, t, |v, _| Ok(self.rhs(v)))
            .expect("KP nonlinearity is infallible");
        let nx = self.nonlinearity.grid.nx();
        for row in out.chunks_mut(nx) {
            row[0] = C::default();
        }
        out
    }

    pub fn step(&self, state: &mut SolverState) -> Result<()> {
        let next = self.advance(state.spectrum.coeffs(), state.t);
        check_finite(&next, state.steps + 1, state.t + self.dt())?;
        state.spectrum = Spectrum::from_raw(state.spectrum.grid(), next, true);
        state.t += self.dt();
        state.steps += 1;
        state.dt = self.dt();
        Ok(())
    }
}

pub(crate) fn check_finite(u: &[C], step: u64, t: f64) -> Result<()> {
    if u.iter()
        .any(|c| !(c.re.is_finite() && c.im.is_finite()) || c.norm() > BLOWUP_THRESHOLD)
    {
        return Err(KpError::NonFinite { step, t });
    }
    Ok(())
}

/// Mass, energy and norms of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedQuantities {
    pub mass: f64,
    pub energy: f64,
    pub l2: f64,
    pub linf: f64,
    pub es1: f64,
}

/// `M(u) = int u^2`.
pub fn conserved_mass(f: &RealField) -> f64 {
    f.grid().cell_area() * f.data().iter().map(|v| v * v).sum::<f64>()
}

/// `E(u) = 1/2 int u_x^2 - eps/2 int (dx^{-1} u_y)^2 - 1/6 int u^3`.
///
/// The middle term only needs `dx^{-1} u_y`, so the x-mean may be nonzero as long as it
/// does not depend on y.
pub fn conserved_energy(f: &RealField, eq: Equation) -> Result<f64> {
    let s = to_spectrum(f);
    energy_parts(&s, f, eq)
}

fn energy_parts(s: &Spectrum, f: &RealField, eq: Equation) -> Result<f64> {
    let grid = f.grid();
    let nx = grid.nx();
    let scale = s.max_abs();
    let drift = (1..grid.ny())
        .map(|l| s.coeffs()[l * nx].norm())
        .fold(0.0, f64::max);
    if drift > spectral::ZERO_MEAN_TOL * scale {
        return Err(KpError::NotZeroXMean {
            max_coefficient: drift,
        });
    }
    let (mut grad, mut anti) = (0.0, 0.0);
    for l in 0..grid.ny() {
        let mu = grid.mu(l);
        for k in 0..nx {
            let xi = grid.xi(k);
            if xi == 0.0 {
                continue;
            }
            let p = s.coeffs()[l * nx + k].norm_sqr();
            grad += xi * xi * p;
            anti += (mu / xi).powi(2) * p;
        }
    }
    let area = grid.area();
    let cubic = grid.cell_area() * f.data().iter().map(|v| v * v * v).sum::<f64>();
    Ok(0.5 * area * grad - 0.5 * eq.eps() * area * anti - cubic / 6.0)
}

pub fn conserved_quantities(f: &RealField, eq: Equation) -> Result<ConservedQuantities> {
    let s = to_spectrum(f);
    let mass = conserved_mass(f);
    Ok(ConservedQuantities {
        mass,
        energy: energy_parts(&s, f, eq)?,
        l2: mass.sqrt(),
        linf: f.max_abs(),
        es1: es_norm_spectrum(&s.project_zero_x_mean(), 1.0)?,
    })
}

/// `u_lambda(x, y) = lambda^2 u(lambda x, lambda^2 y)` on the grid with periods
/// `(Lx / lambda, Ly / lambda^2)`; the lattice samples map one to one.
pub fn rescale(f: &RealField, lambda: f64) -> Result<RealField> {
    let g = f.grid();
    let grid = g.with_periods(g.lx() / lambda, g.ly() / (lambda * lambda))?;
    RealField::new(
        &grid,
        f.data().iter().map(|v| lambda * lambda * v).collect(),
    )
}

/// Step-size rule `min(dt, 0.5 dx / max(1, ||u0||_inf))`.
pub fn stable_dt(u0: &RealField, dt: f64) -> f64 {
    dt.min(0.5 * u0.grid().dx() / u0.max_abs().max(1.0))
}

/// Options of a plain evolution run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub eq: Equation,
    pub dt: f64,
    pub t_final: f64,
    pub output_interval: f64,
    /// Anisotropic `(s1, s2)` norms recorded at every output.
    pub norms: Vec<(f64, f64)>,
    pub drift_guard: bool,
    pub galerkin: bool,
    pub apply_dt_rule: bool,
}

impl RunOptions {
    pub fn new(eq: Equation, dt: f64, t_final: f64) -> Self {
        RunOptions {
            eq,
            dt,
            t_final,
            output_interval: t_final,
            norms: vec![(1.0, 0.0)],
            drift_guard: false,
            galerkin: true,
            apply_dt_rule: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub quantities: ConservedQuantities,
    pub norms: Vec<f64>,
}

pub fn diagnostics_row(state: &SolverState, norms: &[(f64, f64)]) -> Result<DiagnosticsRow> {
    let f = state.field()?;
    Ok(DiagnosticsRow {
        step: state.steps,
        t: state.t,
        dt: state.dt,
        quantities: conserved_quantities(&f, state.eq)?,
        norms: norms
            .iter()
            .map(|&(s1, s2)| anisotropic_norm_spectrum(&state.spectrum, s1, s2))
            .collect(),
    })
}

/// Result of a run: recorded rows, the last finite state, and the blow-up report if the
/// run stopped early.
#[derive(Debug)]
pub struct Trajectory {
    pub rows: Vec<DiagnosticsRow>,
    pub state: SolverState,
    pub truncated: Option<KpError>,
}

/// Splits `[0, t_final]` into `n` equal steps of size at most `dt`.
pub fn step_plan(dt: f64, t_final: f64) -> (u64, f64) {
    if t_final <= 0.0 {
        return (0, dt);
    }
    let n = (t_final / dt - 1e-9).ceil().max(1.0) as u64;
    (n, t_final / n as f64)
}

/// Evolves `u0` and calls `observer` at every output time (and at `t = 0`).
pub fn simulate(
    u0: &RealField,
    opts: &RunOptions,
    observer: &mut dyn FnMut(&SolverState, &DiagnosticsRow) -> Result<()>,
) -> Result<Trajectory> {
    if !(opts.t_final >= 0.0 && opts.dt > 0.0 && opts.dt <= opts.t_final.max(opts.dt)) {
        return Err(KpError::ParamConstraintViolated(format!(
            "need 0 < dt and T >= 0, got dt = {}, T = {}",
            opts.dt, opts.t_final
        )));
    }
    let dt = if opts.apply_dt_rule {
        stable_dt(u0, opts.dt)
    } else {
        opts.dt
    };
    let (n, h) = step_plan(dt, opts.t_final);
    let mut state = SolverState::new(u0, opts.eq, h, opts.galerkin)?;
    let grid = u0.grid().clone();
    let mut solver = KpSolver::new(&grid, opts.eq, h);
    let every = ((opts.output_interval / h).round() as u64).max(1);
    let mut rows = Vec::new();
    let row = diagnostics_row(&state, &opts.norms)?;
    observer(&state, &row)?;
    rows.push(row);

    let mut remaining = n;
    let mut next_output = every;
    let mut since_output = 0u64;
    let mut substeps_per_step = 1u64;
    while remaining > 0 {
        let before = state.clone();
        if let Err(e) = solver.step(&mut state) {
            return Ok(Trajectory {
                rows,
                state: before,
                truncated: Some(e),
            });
        }
        if opts.drift_guard {
            let m0 = spectrum_mass(&before.spectrum);
            let m1 = spectrum_mass(&state.spectrum);
            if m0 > 0.0 && ((m1 - m0) / m0).abs() > DRIFT_GUARD_TOL && substeps_per_step < 1 << 20 {
                state = before;
                substeps_per_step *= 2;
                remaining *= 2;
                next_output *= 2;
                since_output *= 2;
                solver = KpSolver::new(&grid, opts.eq, solver.dt() * 0.5);
                continue;
            }
        }
        remaining -= 1;
        since_output += 1;
        if since_output == next_output || remaining == 0 {
            since_output = 0;
            let row = diagnostics_row(&state, &opts.norms)?;
            observer(&state, &row)?;
            rows.push(row);
        }
    }
    Ok(Trajectory {
        rows,
        state,
        truncated: None,
    })
}

/// `int u^2` from the spectrum via Parseval.
pub fn spectrum_mass(s: &Spectrum) -> f64 {
    s.l2_norm().powi(2)
}

//! Perturbations `v` of a non-decaying background `psi`: `u = psi + v` with
//!
//! `v_t + v_xxx + v v_x + (psi v)_x + g + eps dx^{-1} v_yy = 0`,
//!
//! where `g` is the residual of `psi` in the KP equation. Also hosts the
//! difference-of-solutions experiments.

use rustfft::num_complex::Complex64;

use crate::decomposition::{anisotropic_norm_spectrum, es_norm_spectrum, hbar_norm_spectrum};
use crate::error::{KpError, Result};
use crate::evolution::{
    check_finite, linear_rates, step_plan, Etdrk4, KpSolver, Nonlinearity, SolverState,
};
use crate::solutions::traveling_background_g;
use crate::spectral::{
    forward_raw, inverse_real, to_spectrum, Equation, Grid2D, RealField, Spectrum,
};

type C = Complex64;

/// Which regularity hypothesis a background is meant to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisLevel {
    H1,
    H2,
}

/// Strength of the `psi v` coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `(psi v)_x`, the coefficient obtained by substituting `u = psi + v`.
    Full,
    /// `1/2 (psi v)_x`.
    Half,
}

impl Coupling {
    pub fn factor(self) -> f64 {
        match self {
            Coupling::Full => 1.0,
            Coupling::Half => 0.5,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Coupling::Full => "full",
            Coupling::Half => "half",
        }
    }
}

/// Time-dependent background profile and its forcing.
pub trait Background: Send + Sync {
    fn grid(&self) -> &Grid2D;
    /// Spectrum of `psi(t)`.
    fn psi(&self, t: f64) -> Spectrum;
    /// Spectrum of `g(t)`.
    fn g(&self, t: f64) -> Spectrum;
    fn hypothesis(&self) -> HypothesisLevel;
    /// Speed of the frame in which `psi` is stationary, if any.
    fn frame_speed(&self) -> Option<f64> {
        None
    }
}

/// `psi = g = 0`.
#[derive(Debug, Clone)]
pub struct ZeroBackground {
    grid: Grid2D,
}

impl ZeroBackground {
    pub fn new(grid: &Grid2D) -> Self {
        ZeroBackground { grid: grid.clone() }
    }
}

impl Background for ZeroBackground {
    fn grid(&self) -> &Grid2D {
        &self.grid
    }
    fn psi(&self, _t: f64) -> Spectrum {
        Spectrum::zeros(&self.grid)
    }
    fn g(&self, _t: f64) -> Spectrum {
        Spectrum::zeros(&self.grid)
    }
    fn hypothesis(&self) -> HypothesisLevel {
        HypothesisLevel::H2
    }
}

/// Profile translating rigidly at a fixed speed; `psi(t)` and `g(t)` are exact spectral
/// translates of their initial samples.
#[derive(Debug, Clone)]
pub struct TravelingBackground {
    psi0: Spectrum,
    g0: Spectrum,
    speed: f64,
    level: HypothesisLevel,
}

impl TravelingBackground {
    /// Computes `g` from `psi_t = -speed psi_x`.
    pub fn new(psi0: &RealField, speed: f64, eq: Equation) -> Result<Self> {
        let g = traveling_background_g(psi0, speed, eq)?;
        Ok(TravelingBackground {
            psi0: to_spectrum(psi0),
            g0: to_spectrum(&g).project_zero_x_mean(),
            speed,
            level: HypothesisLevel::H2,
        })
    }

    /// Uses `g = 0` regardless of how well `psi` solves the equation.
    pub fn unforced(psi0: &RealField, speed: f64) -> Self {
        TravelingBackground {
            psi0: to_spectrum(psi0),
            g0: Spectrum::zeros(psi0.grid()),
            speed,
            level: HypothesisLevel::H2,
        }
    }

    pub fn with_hypothesis(mut self, level: HypothesisLevel) -> Self {
        self.level = level;
        self
    }
}

impl Background for TravelingBackground {
    fn grid(&self) -> &Grid2D {
        self.psi0.grid()
    }
    fn psi(&self, t: f64) -> Spectrum {
        self.psi0.translate(self.speed * t, 0.0)
    }
    fn g(&self, t: f64) -> Spectrum {
        self.g0.translate(self.speed * t, 0.0)
    }
    fn hypothesis(&self) -> HypothesisLevel {
        self.level
    }
    fn frame_speed(&self) -> Option<f64> {
        Some(self.speed)
    }
}

/// Background given at sample times; linear interpolation in t, spectral in space.
#[derive(Debug, Clone)]
pub struct TabulatedBackground {
    times: Vec<f64>,
    psi: Vec<Spectrum>,
    g: Vec<Spectrum>,
    level: HypothesisLevel,
}

impl TabulatedBackground {
    /// `samples` holds `(t, psi, g)` with strictly increasing times.
    pub fn new(samples: Vec<(f64, RealField, RealField)>, level: HypothesisLevel) -> Result<Self> {
        if samples.is_empty() {
            return Err(KpError::ParamConstraintViolated(
                "tabulated background needs at least one sample".into(),
            ));
        }
        let grid = samples[0].1.grid().clone();
        let mut times = Vec::new();
        let mut psi = Vec::new();
        let mut g = Vec::new();
        for (t, p, f) in samples {
            if p.grid() != &grid || f.grid() != &grid {
                return Err(KpError::GridMismatch);
            }
            if times.last().is_some_and(|&last| t <= last) {
                return Err(KpError::ParamConstraintViolated(
                    "background sample times must increase".into(),
                ));
            }
            times.push(t);
            psi.push(to_spectrum(&p));
            g.push(to_spectrum(&f).project_zero_x_mean());
        }
        Ok(TabulatedBackground {
            times,
            psi,
            g,
            level,
        })
    }

    fn interpolate(&self, table: &[Spectrum], t: f64) -> Spectrum {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return table[0].clone();
        }
        if t >= self.times[n - 1] {
            return table[n - 1].clone();
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let w = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        table[i].scale(1.0 - w).axpy(w, &table[i + 1])
    }
}

impl Background for TabulatedBackground {
    fn grid(&self) -> &Grid2D {
        self.psi[0].grid()
    }
    fn psi(&self, t: f64) -> Spectrum {
        self.interpolate(&self.psi, t)
    }
    fn g(&self, t: f64) -> Spectrum {
        self.interpolate(&self.g, t)
    }
    fn hypothesis(&self) -> HypothesisLevel {
        self.level
    }
}

/// Evaluates the non-stiff part of the perturbation equation.
pub struct PerturbationRhs<'a> {
    bg: &'a dyn Background,
    nl: Nonlinearity,
    coupling: Coupling,
    quadratic: bool,
}

impl<'a> PerturbationRhs<'a> {
    pub fn new(bg: &'a dyn Background, coupling: Coupling) -> Self {
        PerturbationRhs {
            bg,
            nl: Nonlinearity::new(bg.grid()),
            coupling,
            quadratic: true,
        }
    }

    /// Drops the `v v_x` term, leaving the flow linearized about `psi`.
    pub fn linearized(mut self) -> Self {
        self.quadratic = false;
        self
    }

    /// `F[-1/2 dx ((Pv)^2 + 2k (P psi)(P v)) - g]` with dealiased products.
    pub fn eval(&self, v: &[C], t: f64) -> Vec<C> {
        let pv = self.nl.physical(v);
        let ppsi = self.nl.physical(self.bg.psi(t).coeffs());
        let k2 = 2.0 * self.coupling.factor();
        let q = if self.quadratic { 1.0 } else { 0.0 };
        let prod: Vec<f64> = pv
            .iter()
            .zip(&ppsi)
            .map(|(&a, &b)| q * a * a + k2 * a * b)
            .collect();
        let mut out = self.nl.half_derivative_of(&prod);
        for (o, g) in out.iter_mut().zip(self.bg.g(t).coeffs()) {
            *o -= g;
        }
        out
    }
}

/// Non-stiff part of the perturbation equation at time `t` for zero-x-mean `v`.
pub fn perturbation_rhs(
    v: &Spectrum,
    bg: &dyn Background,
    t: f64,
    coupling: Coupling,
) -> Result<Spectrum> {
    let v = v.require_zero_x_mean()?;
    if v.grid() != bg.grid() {
        return Err(KpError::GridMismatch);
    }
    let out = PerturbationRhs::new(bg, coupling).eval(v.coeffs(), t);
    Ok(Spectrum::from_raw(v.grid(), out, true))
}

/// ETDRK4 integrator for the perturbation equation.
pub struct PerturbationSolver<'a> {
    scheme: Etdrk4,
    rhs: PerturbationRhs<'a>,
}

impl<'a> PerturbationSolver<'a> {
    pub fn new(bg: &'a dyn Background, eq: Equation, dt: f64, coupling: Coupling) -> Self {
        PerturbationSolver {
            scheme: Etdrk4::new(&linear_rates(bg.grid(), eq), dt),
            rhs: PerturbationRhs::new(bg, coupling),
        }
    }

    pub fn linearized(mut self) -> Self {
        self.rhs = self.rhs.linearized();
        self
    }

    pub fn dt(&self) -> f64 {
        self.scheme.dt()
    }

    pub fn step(&self, state: &mut SolverState) -> Result<()> {
        let mut next = self.scheme.step(state.spectrum.coeffs(), state.t, |v, t| {
            Ok(self.rhs.eval(v, t))
        })?;
        let nx = state.spectrum.grid().nx();
        for row in next.chunks_mut(nx) {
            row[0] = C::default();
        }
        check_finite(&next, state.steps + 1, state.t + self.dt())?;
        state.spectrum = Spectrum::from_raw(state.spectrum.grid(), next, true);
        state.t += self.dt();
        state.steps += 1;
        state.dt = self.dt();
        Ok(())
    }
}

/// Options of a perturbation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbOptions {
    pub eq: Equation,
    pub dt: f64,
    pub t_final: f64,
    pub output_interval: f64,
    pub coupling: Coupling,
    /// Order `s` of the recorded `H^{s,0}` norm of `v`.
    pub hs_order: f64,
    pub galerkin: bool,
}

impl PerturbOptions {
    pub fn new(eq: Equation, dt: f64, t_final: f64) -> Self {
        PerturbOptions {
            eq,
            dt,
            t_final,
            output_interval: t_final,
            coupling: Coupling::Full,
            hs_order: 1.0,
            galerkin: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbRow {
    pub step: u64,
    pub t: f64,
    pub dt: f64,
    pub v_mass: f64,
    pub v_hs: f64,
    pub v_es1: f64,
    /// `int (psi + v)^2`, reported for traveling backgrounds.
    pub u_mass: Option<f64>,
    pub g_norm: f64,
}

#[derive(Debug)]
pub struct PerturbTrajectory {
    pub rows: Vec<PerturbRow>,
    pub state: SolverState,
    pub truncated: Option<KpError>,
}

fn perturb_row(state: &SolverState, bg: &dyn Background, hs: f64) -> Result<PerturbRow> {
    let v = &state.spectrum;
    let g = bg.g(state.t);
    let u_mass = bg
        .frame_speed()
        .map(|_| (&bg.psi(state.t) + v).l2_norm().powi(2));
    Ok(PerturbRow {
        step: state.steps,
        t: state.t,
        dt: state.dt,
        v_mass: v.l2_norm().powi(2),
        v_hs: anisotropic_norm_spectrum(v, hs, 0.0),
        v_es1: es_norm_spectrum(v, 1.0)?,
        u_mass,
        g_norm: g.l2_norm(),
    })
}

/// Evolves `v0` against the background and records norms of `v` at every output time.
pub fn simulate_perturbation(
    v0: &RealField,
    bg: &dyn Background,
    opts: &PerturbOptions,
    observer: &mut dyn FnMut(&SolverState, &PerturbRow) -> Result<()>,
) -> Result<PerturbTrajectory> {
    if v0.grid() != bg.grid() {
        return Err(KpError::GridMismatch);
    }
    if bg.hypothesis() == HypothesisLevel::H2 {
        let g0 = bg.g(0.0);
        let e = es_norm_spectrum(&g0, 1.0)?;
        if !e.is_finite() {
            return Err(KpError::ParamConstraintViolated(
                "background forcing has infinite energy norm".into(),
            ));
        }
    }
    let (n, h) = step_plan(opts.dt, opts.t_final);
    let mut state = SolverState::new(v0, opts.eq, h, opts.galerkin)?;
    let solver = PerturbationSolver::new(bg, opts.eq, h, opts.coupling);
    let every = ((opts.output_interval / h).round() as u64).max(1);
    let mut rows = Vec::new();
    let row = perturb_row(&state, bg, opts.hs_order)?;
    observer(&state, &row)?;
    rows.push(row);
    for k in 1..=n {
        let before = state.clone();
        if let Err(e) = solver.step(&mut state) {
            return Ok(PerturbTrajectory {
                rows,
                state: before,
                truncated: Some(e),
            });
        }
        if k % every == 0 || k == n {
            let row = perturb_row(&state, bg, opts.hs_order)?;
            observer(&state, &row)?;
            rows.push(row);
        }
    }
    Ok(PerturbTrajectory {
        rows,
        state,
        truncated: None,
    })
}

/// Exact rate `d/dt int v^2 = -k int psi_x v^2 - 2 int g v` for coupling strength `k`.
///
/// The dispersive terms and `v v_x` integrate to zero against `v`.
pub fn mass_rate(v: &Spectrum, bg: &dyn Background, t: f64, coupling: Coupling) -> f64 {
    let grid = v.grid();
    let nx = grid.nx();
    let vp = inverse_real(grid, v.coeffs());
    let mut psi_x = bg.psi(t).into_coeffs();
    for (idx, c) in psi_x.iter_mut().enumerate() {
        *c *= C::new(0.0, grid.xi(idx % nx));
    }
    let psi_x = inverse_real(grid, &psi_x);
    let gp = inverse_real(grid, bg.g(t).coeffs());
    let da = grid.cell_area();
    let a: f64 = psi_x.iter().zip(&vp).map(|(p, v)| p * v * v).sum::<f64>() * da;
    let b: f64 = gp.iter().zip(&vp).map(|(g, v)| g * v).sum::<f64>() * da;
    -coupling.factor() * a - 2.0 * b
}

/// Options of a two-solution difference experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceOptions {
    pub eq: Equation,
    pub dt: f64,
    pub t_final: f64,
    pub output_interval: f64,
    /// Order `s` in the `H^{s-1,0}` difference norm.
    pub s: f64,
}

/// `r(t) = hbar(u1(t) - u2(t)) / hbar(u1(0) - u2(0))` at the output times.
pub fn difference_experiment(
    u01: &RealField,
    u02: &RealField,
    opts: &DifferenceOptions,
) -> Result<Vec<(f64, f64)>> {
    if u01.grid() != u02.grid() {
        return Err(KpError::GridMismatch);
    }
    for u in [u01, u02] {
        to_spectrum(u).require_zero_x_mean()?;
    }
    let grid = u01.grid();
    let (n, h) = step_plan(opts.dt, opts.t_final);
    let mut s1 = SolverState::new(u01, opts.eq, h, true)?;
    let mut s2 = SolverState::new(u02, opts.eq, h, true)?;
    let w0 = hbar_norm_spectrum(&(&s1.spectrum - &s2.spectrum), opts.s);
    if w0 == 0.0 {
        return Err(KpError::IdenticalData);
    }
    let solver = KpSolver::new(grid, opts.eq, h);
    let every = ((opts.output_interval / h).round() as u64).max(1);
    let mut out = vec![(0.0, 1.0)];
    for k in 1..=n {
        solver.step(&mut s1)?;
        solver.step(&mut s2)?;
        if k % every == 0 || k == n {
            let w = hbar_norm_spectrum(&(&s1.spectrum - &s2.spectrum), opts.s);
            out.push((s1.t, w / w0));
        }
    }
    Ok(out)
}

/// Evolves `(u1, u2, w)` jointly, where `w` follows the difference equation
/// `w_t + w_xxx + ((u1 + u2) w / 2)_x + eps dx^{-1} w_yy = 0` with `u1 + u2` taken from
/// the same stage. Returns the final `(u1 - u2, w)` as fields.
pub fn difference_system(
    u01: &RealField,
    u02: &RealField,
    eq: Equation,
    dt: f64,
    t_final: f64,
) -> Result<(RealField, RealField)> {
    let grid = u01.grid();
    if grid != u02.grid() {
        return Err(KpError::GridMismatch);
    }
    let (n, h) = step_plan(dt, t_final);
    let s1 = SolverState::new(u01, eq, h, true)?;
    let s2 = SolverState::new(u02, eq, h, true)?;
    let w0: Vec<C> = (&s1.spectrum - &s2.spectrum).into_coeffs();
    let scheme = Etdrk4::new(&linear_rates(grid, eq), h);
    let nl = Nonlinearity::new(grid);
    let mut fields = vec![s1.spectrum.into_coeffs(), s2.spectrum.into_coeffs(), w0];
    let rhs = |u: &[Vec<C>], _t: f64| -> Result<Vec<Vec<C>>> {
        let p1 = nl.physical(&u[0]);
        let p2 = nl.physical(&u[1]);
        let pw = nl.physical(&u[2]);
        let zw: Vec<f64> = p1
            .iter()
            .zip(&p2)
            .zip(&pw)
            .map(|((a, b), w)| (a + b) * w)
            .collect();
        Ok(vec![
            nl.apply(&u[0]),
            nl.apply(&u[1]),
            nl.half_derivative_of(&zw),
        ])
    };
    let mut t = 0.0;
    for step in 1..=n {
        fields = scheme.step_system(&fields, t, rhs)?;
        t += h;
        for f in &fields {
            check_finite(f, step, t)?;
        }
    }
    let diff: Vec<C> = fields[0]
        .iter()
        .zip(&fields[1])
        .map(|(a, b)| a - b)
        .collect();
    Ok((
        RealField::from_raw(grid, inverse_real(grid, &diff)),
        RealField::from_raw(grid, inverse_real(grid, &fields[2])),
    ))
}

/// Spectrum of a physical field sampled from raw values, used by background builders.
pub fn spectrum_of(grid: &Grid2D, samples: &[f64]) -> Spectrum {
    Spectrum::from_raw(grid, forward_raw(grid, samples), false)
}

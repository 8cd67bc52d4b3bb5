//! Command-line front end: `simulate | perturb | verify | decompose | probe`.
//!
//! Exit status: 0 on success, 1 on a contract error, 2 when a run stops on a non-finite
//! state (partial output is kept), 64 on usage errors.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::config::{self, parse_config, BackgroundSpec, ProbeMode, RunConfig, KEYS};
use crate::decomposition::es_norm_spectrum;
use crate::decomposition::{band_norms, bracket, build_envelope_spectrum};
use crate::error::{KpError, Result};
use crate::evolution::{simulate, RunOptions, SolverState};
use crate::perturbation::{
    simulate_perturbation, Background, PerturbOptions, TravelingBackground, ZeroBackground,
};
use crate::probes::{
    decay_probe, geometric_times, resonance_scan, strichartz_ratio, AdmissiblePair,
};
use crate::snapshot;
use crate::solutions::{
    line_soliton_with, projected_soliton, traveling_residual, zaitsev, SolitonForm,
    ZaitsevConvention, ZaitsevParams,
};
use crate::spectral::{to_spectrum, zero_x_mean_project, Equation, Grid2D};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONTRACT: i32 = 1;
pub const EXIT_NON_FINITE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Build identifier written to every manifest.
pub fn build_id() -> String {
    let profile = if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    };
    format!("kplab {} ({profile})", env!("CARGO_PKG_VERSION"))
}

#[derive(Parser, Debug)]
#[command(
    name = "kp-lab",
    version,
    about = "Spectral experiments for the KP-I and KP-II equations"
)]
#[command(subcommand_required = true, arg_required_else_help = false)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve an initial condition and record conserved quantities and norms.
    Simulate(RunArgs),
    /// Evolve a perturbation of a background profile.
    Perturb(RunArgs),
    /// Residual of a closed-form traveling solution on a grid.
    Verify(VerifyArgs),
    /// Per-band norms and envelope weights of a snapshot.
    Decompose(DecomposeArgs),
    /// Strichartz, decay and resonance probes.
    Probe(ProbeArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SolutionKind {
    Soliton,
    Zaitsev,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum EquationArg {
    Kp1,
    Kp2,
}

impl From<EquationArg> for Equation {
    fn from(e: EquationArg) -> Self {
        match e {
            EquationArg::Kp1 => Equation::KpI,
            EquationArg::Kp2 => Equation::KpII,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ConventionArg {
    Rescaled,
    LiteralKappa,
    LiteralKappaSquared,
}

impl From<ConventionArg> for ZaitsevConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Rescaled => ZaitsevConvention::Rescaled,
            ConventionArg::LiteralKappa => ZaitsevConvention::LiteralKappa,
            ConventionArg::LiteralKappaSquared => ZaitsevConvention::LiteralKappaSquared,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormArg {
    Traveling,
    Printed,
}

fn real(s: &str) -> std::result::Result<f64, String> {
    config::parse_real(s).ok_or_else(|| format!("not a number: `{s}`"))
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// x-period; accepts a `pi` suffix.
    #[arg(long, value_parser = real)]
    lx: Option<f64>,
    /// y-period; accepts a `pi` suffix.
    #[arg(long, value_parser = real)]
    ly: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    solution: SolutionKind,
    /// Soliton speed.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 2.0)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = ConventionArg::Rescaled)]
    convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = FormArg::Traveling)]
    form: FormArg,
    /// Equation for the soliton check (the Zaitsev wave is a KP-I solution).
    #[arg(long, value_enum, default_value_t = EquationArg::Kp1)]
    equation: EquationArg,
    /// Defaults: soliton 512 x 8 on 80pi x 2pi; Zaitsev 1024 x 128 on 60 x one y-period.
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value = "kp-lab-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    /// KPF1 snapshot.
    #[arg(long)]
    snapshot: PathBuf,
    /// Sobolev order `s` of the band weights.
    #[arg(long, default_value_t = 1.0)]
    order: f64,
    /// Envelope growth bound.
    #[arg(long, default_value_t = 2.0)]
    delta: f64,
    #[arg(long, default_value = "kp-lab-out")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Configuration file; its `probe.*`, grid and `ic.*` keys are used.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_parser = real)]
    q: Option<f64>,
    #[arg(long, value_parser = real)]
    r: Option<f64>,
    /// Time samples of the Strichartz quadrature.
    #[arg(long)]
    nt: Option<usize>,
    /// Smoothing exponent of the decay probe.
    #[arg(long)]
    e: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    times: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    equation: Option<EquationArg>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Strichartz,
    Decay,
    Resonance,
}

/// How a run ended when it did not fail outright.
#[derive(Debug)]
pub enum Outcome {
    Completed,
    Truncated(KpError),
}

fn keys_help() -> String {
    let mut s = String::from("Configuration keys (default in brackets, empty = required):\n");
    for (k, d) in KEYS {
        s.push_str(&format!("  {k} [{d}]\n"));
    }
    s.push_str("\nEnvironment: KP_LAB_THREADS caps worker threads (0 = automatic).");
    s
}

/// Parses `args` (program name first), runs the subcommand and returns the exit status.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cmd = Cli::command().after_long_help(keys_help());
    let cli = match cmd
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    configure_threads();
    let result = match cli.command {
        Command::Simulate(a) => run_simulate(&a),
        Command::Perturb(a) => run_perturb(&a),
        Command::Verify(a) => run_verify(&a),
        Command::Decompose(a) => run_decompose(&a),
        Command::Probe(a) => run_probe(&a),
    };
    match result {
        Ok(Outcome::Completed) => EXIT_OK,
        Ok(Outcome::Truncated(e)) => {
            eprintln!("kp-lab: run truncated: {e}");
            EXIT_NON_FINITE
        }
        Err(e) => {
            eprintln!("kp-lab: {e}");
            EXIT_CONTRACT
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("KP_LAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn load_config(path: &Path, out: &Option<PathBuf>) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    let mut cfg = parse_config(&text)?;
    if let Some(o) = out {
        cfg.output_dir = o.clone();
    }
    Ok(cfg)
}

/// `key = value` manifest: the echoed config followed by `manifest.*` entries.
pub fn write_manifest(
    dir: &Path,
    config: Option<&RunConfig>,
    extra: &[(&str, String)],
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = BufWriter::new(File::create(dir.join("manifest.txt"))?);
    if let Some(c) = config {
        w.write_all(c.to_text().as_bytes())?;
    }
    writeln!(w, "manifest.build = {}", build_id())?;
    for (k, v) in extra {
        writeln!(w, "manifest.{k} = {v}")?;
    }
    w.flush()?;
    Ok(())
}

fn e16(v: f64) -> String {
    format!("{v:.16e}")
}

fn is_multiple(t: f64, interval: f64) -> bool {
    let n = t / interval;
    (n - n.round()).abs() < 1e-8
}

struct SnapshotWriter {
    dir: PathBuf,
    interval: f64,
    last: Option<i64>,
}

impl SnapshotWriter {
    fn new(dir: &Path, interval: f64) -> Self {
        SnapshotWriter {
            dir: dir.to_path_buf(),
            interval,
            last: None,
        }
    }

    fn maybe_write(&mut self, state: &SolverState) -> Result<()> {
        if !is_multiple(state.t, self.interval) {
            return Ok(());
        }
        let idx = (state.t / self.interval).round() as i64;
        if self.last == Some(idx) {
            return Ok(());
        }
        self.last = Some(idx);
        snapshot::save(
            self.dir.join(format!("snap_{idx:05}.kpf")),
            &state.field()?,
            state.t,
        )
    }
}

fn run_simulate(args: &RunArgs) -> Result<Outcome> {
    let cfg = load_config(&args.config, &args.out)?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    let u0 = cfg.initial_field()?;
    let opts = RunOptions {
        eq: cfg.equation,
        dt: cfg.dt,
        t_final: cfg.t_final,
        output_interval: cfg.output_interval,
        norms: cfg.norms.clone(),
        drift_guard: cfg.drift_guard,
        galerkin: cfg.galerkin,
        apply_dt_rule: cfg.dt_rule,
    };
    let mut csv = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
    let mut header = vec!["step", "t", "dt", "mass", "energy", "l2", "linf"]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
    header.extend(cfg.norms.iter().map(|(a, b)| format!("hs_{a}_{b}")));
    header.extend(cfg.es_orders.iter().map(|o| format!("es{o}")));
    writeln!(csv, "{}", header.join(","))?;
    let mut snaps = SnapshotWriter::new(&dir, cfg.snapshot_interval);
    let es_orders = cfg.es_orders.clone();
    let traj = simulate(&u0, &opts, &mut |state, row| {
        let q = &row.quantities;
        let mut cols = vec![
            row.step.to_string(),
            e16(row.t),
            e16(row.dt),
            e16(q.mass),
            e16(q.energy),
            e16(q.l2),
            e16(q.linf),
        ];
        cols.extend(row.norms.iter().map(|&v| e16(v)));
        for &o in &es_orders {
            cols.push(e16(es_norm_spectrum(&state.spectrum, o)?));
        }
        writeln!(csv, "{}", cols.join(","))?;
        csv.flush()?;
        snaps.maybe_write(state)
    })?;
    snapshot::save(dir.join("final.kpf"), &traj.state.field()?, traj.state.t)?;
    let mut extra = vec![
        ("subcommand", "simulate".to_string()),
        ("seed", cfg.seed.to_string()),
        ("dt_effective", traj.state.dt.to_string()),
        ("steps", traj.state.steps.to_string()),
        ("zero_x_mean_projection", "true".into()),
        ("galerkin", cfg.galerkin.to_string()),
        ("soliton_form", SolitonForm::Traveling.name().into()),
        (
            "zaitsev_convention",
            ZaitsevConvention::Rescaled.name().into(),
        ),
    ];
    if let Some(e) = &traj.truncated {
        extra.push(("truncated", e.to_string()));
    }
    write_manifest(&dir, Some(&cfg), &extra)?;
    Ok(match traj.truncated {
        Some(e) => Outcome::Truncated(e),
        None => Outcome::Completed,
    })
}

fn build_background(cfg: &RunConfig, grid: &Grid2D) -> Result<(Box<dyn Background>, String)> {
    Ok(match cfg.perturbation.background {
        BackgroundSpec::Zero => (Box::new(ZeroBackground::new(grid)), "zero".into()),
        BackgroundSpec::Soliton { c, shift } => {
            let p = projected_soliton(c, grid, shift)?;
            let desc = format!("projected soliton, mean {}, speed {}", p.mean, p.speed);
            (
                Box::new(TravelingBackground::new(&p.field, p.speed, cfg.equation)?),
                desc,
            )
        }
        BackgroundSpec::Zaitsev {
            alpha,
            delta,
            shift,
        } => {
            let w = zaitsev(alpha, delta, grid, shift, ZaitsevConvention::Rescaled)?;
            let psi = zero_x_mean_project(&w.field);
            let desc = format!(
                "zaitsev ({}), frame speed {}",
                ZaitsevConvention::Rescaled.name(),
                w.frame_speed
            );
            (
                Box::new(TravelingBackground::new(&psi, w.frame_speed, cfg.equation)?),
                desc,
            )
        }
    })
}

fn run_perturb(args: &RunArgs) -> Result<Outcome> {
    let cfg = load_config(&args.config, &args.out)?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    let grid = cfg.grid()?;
    let v0 = cfg.initial_field()?;
    let (bg, desc) = build_background(&cfg, &grid)?;
    let opts = PerturbOptions {
        eq: cfg.equation,
        dt: cfg.dt,
        t_final: cfg.t_final,
        output_interval: cfg.output_interval,
        coupling: cfg.perturbation.coupling,
        hs_order: cfg.perturbation.hs_order,
        galerkin: cfg.galerkin,
    };
    let mut csv = BufWriter::new(File::create(dir.join("perturbation.csv"))?);
    writeln!(csv, "step,t,dt,v_mass,v_hs,v_es1,u_mass,g_norm")?;
    let mut snaps = SnapshotWriter::new(&dir, cfg.snapshot_interval);
    let traj = simulate_perturbation(&v0, bg.as_ref(), &opts, &mut |state, row| {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            row.step,
            e16(row.t),
            e16(row.dt),
            e16(row.v_mass),
            e16(row.v_hs),
            e16(row.v_es1),
            row.u_mass.map(e16).unwrap_or_default(),
            e16(row.g_norm)
        )?;
        csv.flush()?;
        snaps.maybe_write(state)
    })?;
    snapshot::save(dir.join("final.kpf"), &traj.state.field()?, traj.state.t)?;
    let mut extra = vec![
        ("subcommand", "perturb".to_string()),
        ("seed", cfg.seed.to_string()),
        ("background", desc),
        ("coupling", cfg.perturbation.coupling.name().into()),
        ("dt_effective", traj.state.dt.to_string()),
    ];
    if let Some(e) = &traj.truncated {
        extra.push(("truncated", e.to_string()));
    }
    write_manifest(&dir, Some(&cfg), &extra)?;
    Ok(match traj.truncated {
        Some(e) => Outcome::Truncated(e),
        None => Outcome::Completed,
    })
}

fn run_verify(args: &VerifyArgs) -> Result<Outcome> {
    let mut report: Vec<(&str, String)> = Vec::new();
    let (field, speed, eq) = match args.solution {
        SolutionKind::Soliton => {
            let grid = Grid2D::new(
                args.grid.nx.unwrap_or(512),
                args.grid.ny.unwrap_or(8),
                args.grid.lx.unwrap_or(80.0 * std::f64::consts::PI),
                args.grid.ly.unwrap_or(2.0 * std::f64::consts::PI),
            )?;
            let form = match args.form {
                FormArg::Traveling => SolitonForm::Traveling,
                FormArg::Printed => SolitonForm::Printed,
            };
            let f = line_soliton_with(args.c, &grid, form, 0.0)?;
            report.push(("solution", "line_soliton".into()));
            report.push(("c", args.c.to_string()));
            report.push(("form", form.name().into()));
            report.push(("amplitude", form.amplitude(args.c).to_string()));
            (f, args.c, Equation::from(args.equation))
        }
        SolutionKind::Zaitsev => {
            let convention = ZaitsevConvention::from(args.convention);
            let params = ZaitsevParams::new(args.alpha, args.delta)?;
            let grid = Grid2D::new(
                args.grid.nx.unwrap_or(1024),
                args.grid.ny.unwrap_or(128),
                args.grid.lx.unwrap_or(60.0),
                args.grid.ly.unwrap_or(params.y_period(convention)),
            )?;
            let w = zaitsev(args.alpha, args.delta, &grid, 0.0, convention)?;
            report.push(("solution", "zaitsev".into()));
            report.push(("alpha", args.alpha.to_string()));
            report.push(("delta", args.delta.to_string()));
            report.push(("kappa", w.kappa.to_string()));
            report.push(("c", w.c.to_string()));
            report.push(("frame_speed", w.frame_speed.to_string()));
            report.push(("y_period", params.y_period(convention).to_string()));
            report.push(("min_denominator", e16(w.min_denominator)));
            report.push(("convention", convention.name().into()));
            (w.field, w.frame_speed, Equation::KpI)
        }
    };
    let grid = field.grid().clone();
    let res = traveling_residual(&field, speed, eq);
    report.push(("equation", eq.name().into()));
    report.push(("grid", format!("{}x{}", grid.nx(), grid.ny())));
    report.push(("lx", grid.lx().to_string()));
    report.push(("ly", grid.ly().to_string()));
    report.push(("relative_residual", e16(res.relative)));
    report.push(("boundary_amplitude", e16(res.boundary_amplitude)));
    report.push(("discarded_mean", e16(res.discarded_mean)));
    println!("{{");
    for (k, v) in &report {
        println!("  {k}: {v}");
    }
    println!("}}");
    let mut extra = vec![("subcommand", "verify".to_string())];
    extra.extend(report);
    write_manifest(&args.out, None, &extra)?;
    Ok(Outcome::Completed)
}

fn run_decompose(args: &DecomposeArgs) -> Result<Outcome> {
    let snap = snapshot::load(&args.snapshot)?;
    let s = to_spectrum(&snap.field);
    let discarded = s.x_mean_residue();
    let s = s.project_zero_x_mean();
    let env = build_envelope_spectrum(&s, args.order, args.delta)?;
    fs::create_dir_all(&args.out)?;
    let mut csv = BufWriter::new(File::create(args.out.join("decompose.csv"))?);
    writeln!(csv, "N,l2_band,hs_weight,envelope_weight")?;
    for (exp, norm) in band_norms(&s) {
        let n = 2f64.powi(exp);
        writeln!(
            csv,
            "{},{},{},{}",
            e16(n),
            e16(norm),
            e16(bracket(n).powf(args.order)),
            e16(env.weight(exp))
        )?;
    }
    csv.flush()?;
    write_manifest(
        &args.out,
        None,
        &[
            ("subcommand", "decompose".into()),
            ("snapshot", args.snapshot.display().to_string()),
            ("t", snap.t.to_string()),
            ("order", args.order.to_string()),
            ("delta", args.delta.to_string()),
            ("discarded_x_mean", e16(discarded)),
        ],
    )?;
    Ok(Outcome::Completed)
}

/// Default probe setup; the decay box is large enough for the fitted window.
fn default_probe_config(mode: ProbeMode) -> RunConfig {
    let text = match mode {
        ProbeMode::Decay => {
            "equation = kp1\ngrid.nx = 1024\ngrid.ny = 64\ngrid.lx = 200pi\ngrid.ly = 300\n\
             time.dt = 1\ntime.t_final = 1\nic.kind = gaussian\nic.sx = 1\nic.sy = 2\n\
             probe.mode = decay\n"
        }
        _ => {
            "equation = kp1\ngrid.nx = 256\ngrid.ny = 64\ngrid.lx = 40pi\ngrid.ly = 40\n\
             time.dt = 1\ntime.t_final = 1\nic.kind = gaussian\nic.sx = 1\nic.sy = 2\n"
        }
    };
    let mut c = parse_config(text).expect("built-in probe config parses");
    c.probe.mode = mode;
    c
}

fn run_probe(args: &ProbeArgs) -> Result<Outcome> {
    let mode = args.mode.map(|m| match m {
        ModeArg::Strichartz => ProbeMode::Strichartz,
        ModeArg::Decay => ProbeMode::Decay,
        ModeArg::Resonance => ProbeMode::Resonance,
    });
    let mut cfg = match &args.config {
        Some(p) => load_config(p, &None)?,
        None => default_probe_config(mode.unwrap_or(ProbeMode::Strichartz)),
    };
    if let Some(m) = mode {
        cfg.probe.mode = m;
    }
    let p = &mut cfg.probe;
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = args.$f { p.$f = v; } )* };
    }
    set!(q, r, nt, e, t0, t1, times, samples);
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(e) = args.equation {
        cfg.equation = e.into();
    }
    if let Some(v) = args.grid.nx {
        cfg.nx = v;
    }
    if let Some(v) = args.grid.ny {
        cfg.ny = v;
    }
    if let Some(v) = args.grid.lx {
        cfg.lx = v;
    }
    if let Some(v) = args.grid.ly {
        cfg.ly = v;
    }
    if let Some(o) = &args.out {
        cfg.output_dir = o.clone();
    }
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    let mut csv = BufWriter::new(File::create(dir.join("probe.csv"))?);
    let p = cfg.probe.clone();
    let mut report: Vec<(&str, String)> = vec![
        ("mode", p.mode.name().into()),
        ("seed", cfg.seed.to_string()),
    ];
    match p.mode {
        ProbeMode::Resonance => {
            let scan = resonance_scan(p.samples, cfg.seed)?;
            writeln!(csv, "xi,xi1,mu,mu1,lhs,rhs")?;
            for r in &scan.rows {
                let cols: Vec<String> = r.iter().map(|&v| e16(v)).collect();
                writeln!(csv, "{}", cols.join(","))?;
            }
            report.push(("samples", scan.samples.to_string()));
            report.push(("max_rel_error", e16(scan.max_rel_error)));
            report.push(("min_coercivity", e16(scan.min_coercivity)));
        }
        ProbeMode::Strichartz => {
            let phi = zero_x_mean_project(&cfg.initial_field()?);
            let pair = AdmissiblePair::new(p.q, p.r)?;
            writeln!(csv, "nt,ratio")?;
            let r1 = strichartz_ratio(&phi, pair, cfg.t_final, cfg.equation, p.nt)?;
            let r2 = strichartz_ratio(&phi, pair, cfg.t_final, cfg.equation, 2 * p.nt)?;
            writeln!(csv, "{},{}", p.nt, e16(r1))?;
            writeln!(csv, "{},{}", 2 * p.nt, e16(r2))?;
            report.push(("grid", format!("{}x{}", cfg.nx, cfg.ny)));
            report.push(("q", p.q.to_string()));
            report.push(("r", p.r.to_string()));
            report.push(("beta", pair.beta().to_string()));
            report.push(("t_final", cfg.t_final.to_string()));
            report.push(("ratio", e16(r1)));
            report.push(("ratio_refined", e16(r2)));
            report.push(("refinement_change", e16((r2 - r1).abs() / r2)));
        }
        ProbeMode::Decay => {
            let phi = cfg.initial_field()?;
            let times = geometric_times(p.t0, p.t1, p.times);
            let fit = decay_probe(&phi, p.e, &times, cfg.equation)?;
            writeln!(csv, "t,linf")?;
            for (t, v) in &fit.samples {
                writeln!(csv, "{},{}", e16(*t), e16(*v))?;
            }
            report.push(("grid", format!("{}x{}", cfg.nx, cfg.ny)));
            report.push(("e", p.e.to_string()));
            report.push(("slope", e16(fit.slope)));
            report.push(("expected_slope", (-1.0 + p.e / 3.0).to_string()));
            report.push(("window", e16(fit.window)));
        }
    }
    csv.flush()?;
    for (k, v) in &report {
        println!("{k}: {v}");
    }
    let extra: Vec<(&str, String)> = std::iter::once(("subcommand", "probe".to_string()))
        .chain(report)
        .collect();
    write_manifest(&dir, Some(&cfg), &extra)?;
    Ok(Outcome::Completed)
}

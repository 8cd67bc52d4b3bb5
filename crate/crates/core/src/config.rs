//! Line-oriented `key = value` run configuration.
//!
//! Keys are dotted (`grid.nx = 256`), `#` starts a comment, and unknown or repeated keys
//! are errors. Lengths accept a `pi` suffix (`80pi`, `2*pi`, `pi`). Keys under
//! `manifest.` are accepted and ignored so that a run manifest parses as a config.
//!
//! Required: `equation`, `grid.nx`, `grid.ny`, `grid.lx`, `grid.ly`, `time.dt`,
//! `time.t_final`, `ic.kind`. Everything else has the default listed in [`KEYS`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{KpError, Result};
use crate::perturbation::Coupling;
use crate::snapshot;
use crate::solutions::{line_soliton_with, zaitsev, SolitonForm, ZaitsevConvention};
use crate::spectral::{Equation, Grid2D, RealField};

/// Every accepted key with its default (empty when required).
pub const KEYS: &[(&str, &str)] = &[
    ("equation", ""),
    ("grid.nx", ""),
    ("grid.ny", ""),
    ("grid.lx", ""),
    ("grid.ly", ""),
    ("time.dt", ""),
    ("time.t_final", ""),
    ("time.output_interval", "t_final"),
    ("time.snapshot_interval", "t_final"),
    ("time.dt_rule", "true"),
    ("time.drift_guard", "false"),
    ("time.galerkin", "true"),
    ("ic.kind", ""),
    ("ic.amplitude", "1"),
    ("ic.sx", "1"),
    ("ic.sy", "1"),
    ("ic.x0", "0"),
    ("ic.y0", "0"),
    ("ic.k", "1"),
    ("ic.l", "0"),
    ("ic.kmax", "4"),
    ("ic.lmax", "4"),
    ("ic.c", "1"),
    ("ic.shift", "0"),
    ("ic.form", "traveling"),
    ("ic.alpha", "1"),
    ("ic.delta", "2"),
    ("ic.convention", "rescaled"),
    ("ic.path", ""),
    ("norms.anisotropic", "1 0"),
    ("norms.es", "1"),
    ("envelope.delta", "2"),
    ("seed", "0"),
    ("output.dir", "kp-lab-out"),
    ("perturbation.background", "zero"),
    ("perturbation.c", "1"),
    ("perturbation.alpha", "1"),
    ("perturbation.delta", "2"),
    ("perturbation.shift", "0"),
    ("perturbation.coupling", "full"),
    ("perturbation.hs_order", "1"),
    ("probe.mode", "strichartz"),
    ("probe.q", "4"),
    ("probe.r", "4"),
    ("probe.nt", "64"),
    ("probe.e", "0"),
    ("probe.t0", "2"),
    ("probe.t1", "10"),
    ("probe.times", "8"),
    ("probe.samples", "10000"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Gaussian {
        amplitude: f64,
        sx: f64,
        sy: f64,
        x0: f64,
        y0: f64,
    },
    /// `amplitude cos(xi_k x + mu_l y)` for lattice indices `k`, `l`.
    PlaneWave {
        amplitude: f64,
        k: i64,
        l: i64,
    },
    /// Random phases on `1 <= k <= kmax`, `|l| <= lmax`, Gaussian spectral decay, scaled to
    /// peak `amplitude`.
    RandomSmooth {
        amplitude: f64,
        kmax: usize,
        lmax: usize,
    },
    Soliton {
        c: f64,
        shift: f64,
        form: SolitonForm,
    },
    Zaitsev {
        alpha: f64,
        delta: f64,
        shift: f64,
        convention: ZaitsevConvention,
    },
    Snapshot {
        path: PathBuf,
    },
}

impl InitialCondition {
    pub fn kind(&self) -> &'static str {
        match self {
            InitialCondition::Gaussian { .. } => "gaussian",
            InitialCondition::PlaneWave { .. } => "plane_wave",
            InitialCondition::RandomSmooth { .. } => "random",
            InitialCondition::Soliton { .. } => "soliton",
            InitialCondition::Zaitsev { .. } => "zaitsev",
            InitialCondition::Snapshot { .. } => "snapshot",
        }
    }

    /// Samples the initial field; `seed` drives the random generator only.
    pub fn build(&self, grid: &Grid2D, seed: u64) -> Result<RealField> {
        match *self {
            InitialCondition::Gaussian {
                amplitude,
                sx,
                sy,
                x0,
                y0,
            } => Ok(RealField::from_fn(grid, |x, y| {
                amplitude * (-((x - x0) / sx).powi(2) - ((y - y0) / sy).powi(2)).exp()
            })),
            InitialCondition::PlaneWave { amplitude, k, l } => {
                let xi = 2.0 * std::f64::consts::PI * k as f64 / grid.lx();
                let mu = 2.0 * std::f64::consts::PI * l as f64 / grid.ly();
                Ok(RealField::from_fn(grid, |x, y| {
                    amplitude * (xi * x + mu * y).cos()
                }))
            }
            InitialCondition::RandomSmooth {
                amplitude,
                kmax,
                lmax,
            } => random_smooth(grid, amplitude, kmax, lmax, seed),
            InitialCondition::Soliton { c, shift, form } => line_soliton_with(c, grid, form, shift),
            InitialCondition::Zaitsev {
                alpha,
                delta,
                shift,
                convention,
            } => Ok(zaitsev(alpha, delta, grid, shift, convention)?.field),
            InitialCondition::Snapshot { ref path } => {
                let snap = snapshot::load(path)?;
                if snap.field.grid() != grid {
                    return Err(KpError::GridMismatch);
                }
                Ok(snap.field)
            }
        }
    }
}

/// Smooth random field with zero x-mean and no Nyquist content.
pub fn random_smooth(
    grid: &Grid2D,
    amplitude: f64,
    kmax: usize,
    lmax: usize,
    seed: u64,
) -> Result<RealField> {
    if kmax == 0 || 2 * kmax >= grid.nx() || 2 * lmax >= grid.ny() {
        return Err(KpError::ParamConstraintViolated(format!(
            "random modes need 1 <= kmax < nx/2 and lmax < ny/2, got kmax = {kmax}, lmax = {lmax}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut modes = Vec::new();
    for k in 1..=kmax as i64 {
        for l in -(lmax as i64)..=lmax as i64 {
            let decay = (-((k * k) as f64 / (kmax * kmax) as f64)
                - ((l * l) as f64 / (lmax.max(1) * lmax.max(1)) as f64))
                .exp();
            let a = decay * rng.gen_range(0.5..1.0);
            let theta = rng.gen_range(0.0..two_pi);
            modes.push((
                two_pi * k as f64 / grid.lx(),
                two_pi * l as f64 / grid.ly(),
                a,
                theta,
            ));
        }
    }
    let f = RealField::from_fn(grid, |x, y| {
        modes
            .iter()
            .map(|&(xi, mu, a, th)| a * (xi * x + mu * y + th).cos())
            .sum()
    });
    let peak = f.max_abs();
    Ok(&f * (amplitude / peak))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BackgroundSpec {
    Zero,
    Soliton { c: f64, shift: f64 },
    Zaitsev { alpha: f64, delta: f64, shift: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    pub background: BackgroundSpec,
    pub coupling: Coupling,
    pub hs_order: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeMode {
    Strichartz,
    Decay,
    Resonance,
}

impl ProbeMode {
    pub fn name(self) -> &'static str {
        match self {
            ProbeMode::Strichartz => "strichartz",
            ProbeMode::Decay => "decay",
            ProbeMode::Resonance => "resonance",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub mode: ProbeMode,
    pub q: f64,
    pub r: f64,
    pub nt: usize,
    pub e: f64,
    pub t0: f64,
    pub t1: f64,
    pub times: usize,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub equation: Equation,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub dt: f64,
    pub t_final: f64,
    pub output_interval: f64,
    pub snapshot_interval: f64,
    pub dt_rule: bool,
    pub drift_guard: bool,
    pub galerkin: bool,
    pub ic: InitialCondition,
    pub norms: Vec<(f64, f64)>,
    pub es_orders: Vec<f64>,
    pub envelope_delta: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub perturbation: PerturbationSpec,
    pub probe: ProbeSpec,
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.nx, self.ny, self.lx, self.ly)
    }

    pub fn initial_field(&self) -> Result<RealField> {
        self.ic.build(&self.grid()?, self.seed)
    }

    /// Canonical text form; parsing it gives back an identical config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("equation", self.equation.name().into());
        kv("grid.nx", self.nx.to_string());
        kv("grid.ny", self.ny.to_string());
        kv("grid.lx", self.lx.to_string());
        kv("grid.ly", self.ly.to_string());
        kv("time.dt", self.dt.to_string());
        kv("time.t_final", self.t_final.to_string());
        kv("time.output_interval", self.output_interval.to_string());
        kv("time.snapshot_interval", self.snapshot_interval.to_string());
        kv("time.dt_rule", self.dt_rule.to_string());
        kv("time.drift_guard", self.drift_guard.to_string());
        kv("time.galerkin", self.galerkin.to_string());
        kv("ic.kind", self.ic.kind().into());
        match &self.ic {
            InitialCondition::Gaussian {
                amplitude,
                sx,
                sy,
                x0,
                y0,
            } => {
                kv("ic.amplitude", amplitude.to_string());
                kv("ic.sx", sx.to_string());
                kv("ic.sy", sy.to_string());
                kv("ic.x0", x0.to_string());
                kv("ic.y0", y0.to_string());
            }
            InitialCondition::PlaneWave { amplitude, k, l } => {
                kv("ic.amplitude", amplitude.to_string());
                kv("ic.k", k.to_string());
                kv("ic.l", l.to_string());
            }
            InitialCondition::RandomSmooth {
                amplitude,
                kmax,
                lmax,
            } => {
                kv("ic.amplitude", amplitude.to_string());
                kv("ic.kmax", kmax.to_string());
                kv("ic.lmax", lmax.to_string());
            }
            InitialCondition::Soliton { c, shift, form } => {
                kv("ic.c", c.to_string());
                kv("ic.shift", shift.to_string());
                kv("ic.form", form.name().into());
            }
            InitialCondition::Zaitsev {
                alpha,
                delta,
                shift,
                convention,
            } => {
                kv("ic.alpha", alpha.to_string());
                kv("ic.delta", delta.to_string());
                kv("ic.shift", shift.to_string());
                kv("ic.convention", convention.name().into());
            }
            InitialCondition::Snapshot { path } => kv("ic.path", path.display().to_string()),
        }
        kv(
            "norms.anisotropic",
            self.norms
                .iter()
                .map(|(a, b)| format!("{a} {b}"))
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv(
            "norms.es",
            self.es_orders
                .iter()
                .map(|o| o.to_string())
                .collect::<Vec<_>>()
                .join(", "),
        );
        kv("envelope.delta", self.envelope_delta.to_string());
        kv("seed", self.seed.to_string());
        kv("output.dir", self.output_dir.display().to_string());
        let p = &self.perturbation;
        match p.background {
            BackgroundSpec::Zero => kv("perturbation.background", "zero".into()),
            BackgroundSpec::Soliton { c, shift } => {
                kv("perturbation.background", "soliton".into());
                kv("perturbation.c", c.to_string());
                kv("perturbation.shift", shift.to_string());
            }
            BackgroundSpec::Zaitsev {
                alpha,
                delta,
                shift,
            } => {
                kv("perturbation.background", "zaitsev".into());
                kv("perturbation.alpha", alpha.to_string());
                kv("perturbation.delta", delta.to_string());
                kv("perturbation.shift", shift.to_string());
            }
        }
        kv("perturbation.coupling", p.coupling.name().into());
        kv("perturbation.hs_order", p.hs_order.to_string());
        let q = &self.probe;
        kv("probe.mode", q.mode.name().into());
        kv("probe.q", fmt_exponent(q.q));
        kv("probe.r", fmt_exponent(q.r));
        kv("probe.nt", q.nt.to_string());
        kv("probe.e", q.e.to_string());
        kv("probe.t0", q.t0.to_string());
        kv("probe.t1", q.t1.to_string());
        kv("probe.times", q.times.to_string());
        kv("probe.samples", q.samples.to_string());
        s
    }
}

fn is_multiple_of(a: f64, b: f64) -> bool {
    let n = a / b;
    n >= 1.0 - 1e-9 && (n - n.round()).abs() <= 1e-9 * n.max(1.0)
}

fn fmt_exponent(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        v.to_string()
    }
}

struct Entries {
    map: HashMap<String, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str) -> Result<(usize, &str)> {
        self.raw(key)
            .ok_or_else(|| KpError::config(0, key, "required key is missing"))
    }

    fn value(&self, key: &str) -> (usize, String) {
        match self.raw(key) {
            Some((l, v)) => (l, v.to_string()),
            None => (0, default_of(key).to_string()),
        }
    }

    fn f64(&self, key: &str) -> Result<f64> {
        let (line, v) = self.value(key);
        parse_real(&v).ok_or_else(|| KpError::config(line, key, format!("not a number: `{v}`")))
    }

    fn f64_required(&self, key: &str) -> Result<f64> {
        let (line, v) = self.required(key)?;
        parse_real(v).ok_or_else(|| KpError::config(line, key, format!("not a number: `{v}`")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (line, v) = self.value(key);
        v.parse()
            .map_err(|_| KpError::config(line, key, format!("cannot parse `{v}`")))
    }

    fn parse_required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let (line, v) = self.required(key)?;
        v.parse()
            .map_err(|_| KpError::config(line, key, format!("cannot parse `{v}`")))
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)]) -> Result<T> {
        let (line, v) = self.value(key);
        options
            .iter()
            .find(|(n, _)| *n == v)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
                KpError::config(
                    line,
                    key,
                    format!("`{v}` is not one of {}", names.join(", ")),
                )
            })
    }

    fn line(&self, key: &str) -> usize {
        self.raw(key).map(|(l, _)| l).unwrap_or(0)
    }
}

fn default_of(key: &str) -> &'static str {
    KEYS.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, d)| *d)
        .unwrap_or("")
}

/// Real number with an optional `pi` factor; `inf` is accepted.
pub fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() {
            1.0
        } else {
            head.parse::<f64>().ok()?
        };
        return Some(factor * std::f64::consts::PI);
    }
    t.parse().ok()
}

fn parse_list(text: &str) -> Option<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_real)
        .collect()
}

fn parse_pairs(text: &str) -> Option<Vec<(f64, f64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|p| {
            let v: Vec<f64> = p
                .split_whitespace()
                .map(parse_real)
                .collect::<Option<_>>()?;
            match v[..] {
                [a, b] => Some((a, b)),
                _ => None,
            }
        })
        .collect()
}

/// Parses a configuration file; see the module documentation for the format.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| KpError::config(line, content, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        if key.starts_with("manifest.") {
            continue;
        }
        if !KEYS.iter().any(|(k, _)| *k == key) {
            return Err(KpError::config(line, key, "unknown key"));
        }
        if map
            .insert(key.to_string(), (line, value.to_string()))
            .is_some()
        {
            return Err(KpError::config(line, key, "key given twice"));
        }
    }
    let e = Entries { map };

    let equation = e.choice(
        "equation",
        &[("kp1", Equation::KpI), ("kp2", Equation::KpII)],
    )?;
    e.required("equation")?;
    let nx: usize = e.parse_required("grid.nx")?;
    let ny: usize = e.parse_required("grid.ny")?;
    let lx = e.f64_required("grid.lx")?;
    let ly = e.f64_required("grid.ly")?;
    Grid2D::new(nx, ny, lx, ly)
        .map_err(|err| KpError::config(e.line("grid.nx"), "grid", err.to_string()))?;

    let dt = e.f64_required("time.dt")?;
    let t_final = e.f64_required("time.t_final")?;
    if !(dt > 0.0) {
        return Err(KpError::config(
            e.line("time.dt"),
            "time.dt",
            "must be positive",
        ));
    }
    if !(t_final >= 0.0) {
        return Err(KpError::config(
            e.line("time.t_final"),
            "time.t_final",
            "must be non-negative",
        ));
    }
    if dt > t_final {
        return Err(KpError::config(
            e.line("time.dt"),
            "time.dt",
            format!("dt = {dt} exceeds t_final = {t_final}"),
        ));
    }
    let interval = |key: &str| -> Result<f64> {
        let v = if e.raw(key).is_some() {
            e.f64(key)?
        } else {
            t_final
        };
        let n = t_final / v;
        if !(v > 0.0) || (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return Err(KpError::config(
                e.line(key),
                key,
                format!("{v} does not divide t_final = {t_final}"),
            ));
        }
        Ok(v)
    };
    let output_interval = interval("time.output_interval")?;
    let snapshot_interval = interval("time.snapshot_interval")?;
    if !is_multiple_of(snapshot_interval, output_interval) {
        return Err(KpError::config(
            e.line("time.snapshot_interval"),
            "time.snapshot_interval",
            format!("must be a multiple of the output interval {output_interval}"),
        ));
    }

    let (ic_line, kind) = e.required("ic.kind")?;
    let ic = match kind {
        "gaussian" => InitialCondition::Gaussian {
            amplitude: e.f64("ic.amplitude")?,
            sx: e.f64("ic.sx")?,
            sy: e.f64("ic.sy")?,
            x0: e.f64("ic.x0")?,
            y0: e.f64("ic.y0")?,
        },
        "plane_wave" => InitialCondition::PlaneWave {
            amplitude: e.f64("ic.amplitude")?,
            k: e.parse("ic.k")?,
            l: e.parse("ic.l")?,
        },
        "random" => InitialCondition::RandomSmooth {
            amplitude: e.f64("ic.amplitude")?,
            kmax: e.parse("ic.kmax")?,
            lmax: e.parse("ic.lmax")?,
        },
        "soliton" => InitialCondition::Soliton {
            c: e.f64("ic.c")?,
            shift: e.f64("ic.shift")?,
            form: e.choice(
                "ic.form",
                &[
                    ("traveling", SolitonForm::Traveling),
                    ("printed", SolitonForm::Printed),
                ],
            )?,
        },
        "zaitsev" => InitialCondition::Zaitsev {
            alpha: e.f64("ic.alpha")?,
            delta: e.f64("ic.delta")?,
            shift: e.f64("ic.shift")?,
            convention: e.choice(
                "ic.convention",
                &ZaitsevConvention::all().map(|c| (c.name(), c)),
            )?,
        },
        "snapshot" => InitialCondition::Snapshot {
            path: PathBuf::from(e.required("ic.path")?.1),
        },
        other => {
            return Err(KpError::config(
                ic_line,
                "ic.kind",
                format!("unknown generator `{other}`"),
            ))
        }
    };

    let (l, v) = e.value("norms.anisotropic");
    let norms = parse_pairs(&v)
        .ok_or_else(|| KpError::config(l, "norms.anisotropic", "expected `s1 s2, s1 s2, ...`"))?;
    let (l, v) = e.value("norms.es");
    let es_orders = parse_list(&v)
        .ok_or_else(|| KpError::config(l, "norms.es", "expected a list of orders"))?;

    let envelope_delta = e.f64("envelope.delta")?;
    if !(envelope_delta > 1.0) {
        return Err(KpError::config(
            e.line("envelope.delta"),
            "envelope.delta",
            "must exceed 1",
        ));
    }

    let background = match e.value("perturbation.background").1.as_str() {
        "zero" => BackgroundSpec::Zero,
        "soliton" => BackgroundSpec::Soliton {
            c: e.f64("perturbation.c")?,
            shift: e.f64("perturbation.shift")?,
        },
        "zaitsev" => BackgroundSpec::Zaitsev {
            alpha: e.f64("perturbation.alpha")?,
            delta: e.f64("perturbation.delta")?,
            shift: e.f64("perturbation.shift")?,
        },
        other => {
            return Err(KpError::config(
                e.line("perturbation.background"),
                "perturbation.background",
                format!("unknown background `{other}`"),
            ))
        }
    };
    let perturbation = PerturbationSpec {
        background,
        coupling: e.choice(
            "perturbation.coupling",
            &[("full", Coupling::Full), ("half", Coupling::Half)],
        )?,
        hs_order: e.f64("perturbation.hs_order")?,
    };

    let probe = ProbeSpec {
        mode: e.choice(
            "probe.mode",
            &[
                ("strichartz", ProbeMode::Strichartz),
                ("decay", ProbeMode::Decay),
                ("resonance", ProbeMode::Resonance),
            ],
        )?,
        q: e.f64("probe.q")?,
        r: e.f64("probe.r")?,
        nt: e.parse("probe.nt")?,
        e: e.f64("probe.e")?,
        t0: e.f64("probe.t0")?,
        t1: e.f64("probe.t1")?,
        times: e.parse("probe.times")?,
        samples: e.parse("probe.samples")?,
    };

    Ok(RunConfig {
        equation,
        nx,
        ny,
        lx,
        ly,
        dt,
        t_final,
        output_interval,
        snapshot_interval,
        dt_rule: e.parse("time.dt_rule")?,
        drift_guard: e.parse("time.drift_guard")?,
        galerkin: e.parse("time.galerkin")?,
        ic,
        norms,
        es_orders,
        envelope_delta,
        seed: e.parse("seed")?,
        output_dir: PathBuf::from(e.value("output.dir").1),
        perturbation,
        probe,
    })
}

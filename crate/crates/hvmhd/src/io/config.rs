//! Run configuration: line-oriented `key = value` pairs under `[section]`
//! headers. `#` starts a comment. The only repeatable key is `mode` in the
//! `[velocity]` and `[magnetic]` sections.
//!
//! ```text
//! [grid]
//! n = 32                    # required, even, >= 4
//! dealias = 1.0             # kept band fraction in (0, 1]
//! [time]
//! t_end = 1.0               # required, >= 0
//! dt = auto                 # or a positive number
//! [mollifier]
//! epsilon = 0.25            # required, in [0, 2π)
//! [particles]
//! markers = 200000
//! density = uniform_ball    # uniform_ball | maxwellian | modulated_ball
//! amplitude = 1.0           # uniform_ball, modulated_ball
//! radius = 1.0              # uniform_ball, modulated_ball
//! drift = 0 0 0             # uniform_ball, maxwellian
//! number_density = 1.0      # maxwellian
//! thermal_speed = 1.0       # maxwellian
//! modulation = 0.5          # modulated_ball
//! wavevector = 1 0 0        # modulated_ball
//! [velocity]
//! mode = sin 0 1 0 0.5 0 0  # profile k1 k2 k3 a1 a2 a3: a·sin(k·x)
//! [magnetic]
//! mode = cos 1 0 0 0 0 0.5
//! [constants]
//! preset = unity            # or explicit, with q_h m_h kappa eta mu0 rho_bar
//! [diagnostics]
//! cadence = 1               # steps between CSV rows
//! checkpoint_every = 0      # steps between checkpoints; 0 = final only
//! [run]
//! output = out
//! seed = 0
//! deterministic = false
//! project_init = false
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use crate::coupled::PhysicalConstants;
use crate::density::InitialDensity;

/// Every violation found while parsing or validating, one per line.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeProfile {
    Cos,
    Sin,
}

/// `amplitude · cos(k·x)` or `amplitude · sin(k·x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierMode {
    pub profile: ModeProfile,
    pub k: [i64; 3],
    pub amplitude: [f64; 3],
}

impl FourierMode {
    pub fn value(&self, x: [f64; 3]) -> [f64; 3] {
        let p = self.k[0] as f64 * x[0] + self.k[1] as f64 * x[1] + self.k[2] as f64 * x[2];
        let s = match self.profile {
            ModeProfile::Cos => p.cos(),
            ModeProfile::Sin => p.sin(),
        };
        self.amplitude.map(|a| a * s)
    }

    /// `k·a`, zero for a divergence-free mode.
    pub fn divergence(&self) -> f64 {
        (0..3).map(|i| self.k[i] as f64 * self.amplitude[i]).sum()
    }

    fn dump(&self) -> String {
        let p = match self.profile {
            ModeProfile::Cos => "cos",
            ModeProfile::Sin => "sin",
        };
        format!(
            "{p} {} {} {} {:?} {:?} {:?}",
            self.k[0], self.k[1], self.k[2], self.amplitude[0], self.amplitude[1], self.amplitude[2]
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub dealias: f64,
    pub t_end: f64,
    pub dt: TimeStep,
    pub epsilon: f64,
    pub markers: usize,
    pub density: InitialDensity,
    pub velocity: Vec<FourierMode>,
    pub magnetic: Vec<FourierMode>,
    /// `None` for the unity preset.
    pub constants: Option<PhysicalConstants>,
    pub cadence: usize,
    pub checkpoint_every: usize,
    pub output: PathBuf,
    pub seed: u64,
    pub deterministic: bool,
    pub project_init: bool,
}

struct Entry {
    line: usize,
    value: String,
}

/// Raw entries keyed by `(section, key)`.
struct Sheet {
    entries: BTreeMap<(String, String), Vec<Entry>>,
    errors: Vec<String>,
}

const KEYS: &[(&str, &[&str])] = &[
    ("grid", &["n", "dealias"]),
    ("time", &["t_end", "dt"]),
    ("mollifier", &["epsilon"]),
    (
        "particles",
        &[
            "markers",
            "density",
            "amplitude",
            "radius",
            "drift",
            "number_density",
            "thermal_speed",
            "modulation",
            "wavevector",
        ],
    ),
    ("velocity", &["mode"]),
    ("magnetic", &["mode"]),
    ("constants", &["preset", "q_h", "m_h", "kappa", "eta", "mu0", "rho_bar"]),
    ("diagnostics", &["cadence", "checkpoint_every"]),
    ("run", &["output", "seed", "deterministic", "project_init"]),
];

const CONSTANT_KEYS: [&str; 6] = ["q_h", "m_h", "kappa", "eta", "mu0", "rho_bar"];

impl Sheet {
    fn read(text: &str) -> Self {
        let mut sheet = Sheet {
            entries: BTreeMap::new(),
            errors: Vec::new(),
        };
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim();
                if KEYS.iter().any(|(s, _)| *s == name) {
                    section = Some(name.to_string());
                } else {
                    sheet.errors.push(format!("line {line_no}: unknown section [{name}]"));
                    section = None;
                }
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                sheet.errors.push(format!("line {line_no}: expected `key = value`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            let Some(sec) = &section else {
                sheet.errors.push(format!("line {line_no}: `{key}` outside a known section"));
                continue;
            };
            let allowed = KEYS.iter().find(|(s, _)| s == sec).map(|(_, k)| *k).unwrap_or(&[]);
            if !allowed.contains(&key) {
                sheet.errors.push(format!("line {line_no}: unknown key {sec}.{key}"));
                continue;
            }
            let slot = sheet.entries.entry((sec.clone(), key.to_string())).or_default();
            if !slot.is_empty() && key != "mode" {
                sheet.errors.push(format!("line {line_no}: duplicate key {sec}.{key}"));
                continue;
            }
            slot.push(Entry {
                line: line_no,
                value: value.to_string(),
            });
        }
        sheet
    }

    fn take(&mut self, sec: &str, key: &str) -> Option<Entry> {
        self.entries
            .remove(&(sec.to_string(), key.to_string()))
            .and_then(|mut v| v.pop())
    }

    fn take_all(&mut self, sec: &str, key: &str) -> Vec<Entry> {
        self.entries.remove(&(sec.to_string(), key.to_string())).unwrap_or_default()
    }

    fn parse<T: std::str::FromStr>(&mut self, sec: &str, key: &str, default: Option<T>) -> Option<T> {
        match self.take(sec, key) {
            Some(e) => match e.value.parse::<T>() {
                Ok(v) => Some(v),
                Err(_) => {
                    self.errors
                        .push(format!("line {}: {sec}.{key}: cannot parse `{}`", e.line, e.value));
                    None
                }
            },
            None => {
                if default.is_none() {
                    self.errors.push(format!("missing required key {sec}.{key}"));
                }
                default
            }
        }
    }

    fn parse_list<T: std::str::FromStr, const N: usize>(&mut self, sec: &str, key: &str, default: [T; N]) -> [T; N] {
        let Some(e) = self.take(sec, key) else {
            return default;
        };
        let parsed: Vec<Option<T>> = e.value.split_whitespace().map(|t| t.parse().ok()).collect();
        if parsed.len() == N && parsed.iter().all(Option::is_some) {
            let mut it = parsed.into_iter().map(Option::unwrap);
            std::array::from_fn(|_| it.next().expect("length checked"))
        } else {
            self.errors
                .push(format!("line {}: {sec}.{key}: expected {N} numbers, got `{}`", e.line, e.value));
            default
        }
    }

    fn modes(&mut self, sec: &str) -> Vec<FourierMode> {
        let mut out = Vec::new();
        for e in self.take_all(sec, "mode") {
            let t: Vec<&str> = e.value.split_whitespace().collect();
            let profile = match t.first() {
                Some(&"cos") => Some(ModeProfile::Cos),
                Some(&"sin") => Some(ModeProfile::Sin),
                _ => None,
            };
            let k: Vec<Option<i64>> = t.iter().skip(1).take(3).map(|s| s.parse().ok()).collect();
            let a: Vec<Option<f64>> = t.iter().skip(4).map(|s| s.parse().ok()).collect();
            match (profile, t.len() == 7 && k.iter().all(Option::is_some) && a.iter().all(Option::is_some)) {
                (Some(profile), true) => out.push(FourierMode {
                    profile,
                    k: [k[0].unwrap(), k[1].unwrap(), k[2].unwrap()],
                    amplitude: [a[0].unwrap(), a[1].unwrap(), a[2].unwrap()],
                }),
                _ => self.errors.push(format!(
                    "line {}: {sec}.mode: expected `cos|sin k1 k2 k3 a1 a2 a3`, got `{}`",
                    e.line, e.value
                )),
            }
        }
        out
    }
}

impl RunConfig {
    /// Parse and validate; `project_init` overrides the file's setting when true.
    pub fn parse(text: &str, project_init: bool) -> Result<Self, ConfigError> {
        let mut s = Sheet::read(text);
        let n = s.parse::<usize>("grid", "n", None);
        let dealias = s.parse("grid", "dealias", Some(1.0)).unwrap_or(1.0);
        let t_end = s.parse::<f64>("time", "t_end", None);
        let dt = match s.take("time", "dt") {
            None => TimeStep::Auto,
            Some(e) if e.value == "auto" => TimeStep::Auto,
            Some(e) => match e.value.parse::<f64>() {
                Ok(v) => TimeStep::Fixed(v),
                Err(_) => {
                    s.errors
                        .push(format!("line {}: time.dt: expected `auto` or a number, got `{}`", e.line, e.value));
                    TimeStep::Auto
                }
            },
        };
        let epsilon = s.parse::<f64>("mollifier", "epsilon", None);
        let markers = s.parse("particles", "markers", Some(0usize)).unwrap_or(0);
        let density = Self::parse_density(&mut s);
        let velocity = s.modes("velocity");
        let magnetic = s.modes("magnetic");
        let constants = Self::parse_constants(&mut s);
        let cadence = s.parse("diagnostics", "cadence", Some(1usize)).unwrap_or(1);
        let checkpoint_every = s.parse("diagnostics", "checkpoint_every", Some(0usize)).unwrap_or(0);
        let output = s
            .take("run", "output")
            .map(|e| PathBuf::from(e.value))
            .unwrap_or_else(|| PathBuf::from("out"));
        let seed = s.parse("run", "seed", Some(0u64)).unwrap_or(0);
        let deterministic = s.parse("run", "deterministic", Some(false)).unwrap_or(false);
        let project_file = s.parse("run", "project_init", Some(false)).unwrap_or(false);

        let mut errors = std::mem::take(&mut s.errors);
        let complete = n.is_some() && t_end.is_some() && epsilon.is_some();
        // Placeholders keep the remaining checks running when a required key is missing.
        let cfg = RunConfig {
            n: n.unwrap_or(8),
            dealias,
            t_end: t_end.unwrap_or(0.0),
            dt,
            epsilon: epsilon.unwrap_or(0.5),
            markers,
            density,
            velocity,
            magnetic,
            constants,
            cadence,
            checkpoint_every,
            output,
            seed,
            deterministic,
            project_init: project_file || project_init,
        };
        errors.extend(cfg.violations());
        if complete && errors.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError { violations: errors })
        }
    }

    fn parse_density(s: &mut Sheet) -> InitialDensity {
        let family = s
            .take("particles", "density")
            .map(|e| (e.line, e.value))
            .unwrap_or((0, "uniform_ball".into()));
        let applicable: &[&str] = match family.1.as_str() {
            "uniform_ball" => &["amplitude", "radius", "drift"],
            "maxwellian" => &["number_density", "thermal_speed", "drift"],
            "modulated_ball" => &["amplitude", "radius", "modulation", "wavevector"],
            other => {
                s.errors.push(format!(
                    "line {}: particles.density: unknown family `{other}` (uniform_ball, maxwellian, modulated_ball)",
                    family.0
                ));
                &[]
            }
        };
        for key in ["amplitude", "radius", "drift", "number_density", "thermal_speed", "modulation", "wavevector"] {
            if !applicable.contains(&key) && !family_unknown(&family.1) {
                if let Some(e) = s.take("particles", key) {
                    s.errors.push(format!(
                        "line {}: particles.{key} does not apply to density `{}`",
                        e.line, family.1
                    ));
                }
            }
        }
        match family.1.as_str() {
            "maxwellian" => InitialDensity::Maxwellian {
                density: s.parse("particles", "number_density", Some(1.0)).unwrap_or(1.0),
                thermal_speed: s.parse("particles", "thermal_speed", Some(1.0)).unwrap_or(1.0),
                drift: s.parse_list("particles", "drift", [0.0; 3]),
            },
            "modulated_ball" => InitialDensity::ModulatedBall {
                amplitude: s.parse("particles", "amplitude", Some(1.0)).unwrap_or(1.0),
                radius: s.parse("particles", "radius", Some(1.0)).unwrap_or(1.0),
                modulation: s.parse("particles", "modulation", Some(0.0)).unwrap_or(0.0),
                wavevector: s.parse_list("particles", "wavevector", [1, 0, 0]),
            },
            _ => InitialDensity::UniformBall {
                amplitude: s.parse("particles", "amplitude", Some(1.0)).unwrap_or(1.0),
                radius: s.parse("particles", "radius", Some(1.0)).unwrap_or(1.0),
                drift: s.parse_list("particles", "drift", [0.0; 3]),
            },
        }
    }

    fn parse_constants(s: &mut Sheet) -> Option<PhysicalConstants> {
        let preset = s.take("constants", "preset").map(|e| (e.line, e.value));
        let explicit = match &preset {
            None => false,
            Some((_, p)) if p == "unity" => false,
            Some((_, p)) if p == "explicit" => true,
            Some((line, p)) => {
                s.errors
                    .push(format!("line {line}: constants.preset: expected `unity` or `explicit`, got `{p}`"));
                false
            }
        };
        if !explicit {
            for key in CONSTANT_KEYS {
                if let Some(e) = s.take("constants", key) {
                    s.errors
                        .push(format!("line {}: constants.{key} requires `preset = explicit`", e.line));
                }
            }
            return None;
        }
        let v: Vec<f64> = CONSTANT_KEYS
            .iter()
            .map(|k| s.parse::<f64>("constants", k, None).unwrap_or(f64::NAN))
            .collect();
        Some(PhysicalConstants {
            q_h: v[0],
            m_h: v[1],
            kappa: v[2],
            eta: v[3],
            mu0: v[4],
            rho_bar: v[5],
        })
    }

    /// Range and consistency checks on parsed values.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n < 4 || self.n % 2 != 0 {
            out.push(format!("grid.n: must be even and >= 4, got {}", self.n));
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            out.push(format!("grid.dealias: must lie in (0, 1], got {}", self.dealias));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            out.push(format!("time.t_end: must be finite and >= 0, got {}", self.t_end));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                out.push(format!("time.dt: must be positive, got {dt}"));
            }
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 2.0 * std::f64::consts::PI) {
            out.push(format!("mollifier.epsilon: must lie in [0, 2π), got {}", self.epsilon));
        }
        if let Err(e) = self.density.validate() {
            out.push(format!("particles: {e}"));
        }
        for (sec, modes) in [("velocity", &self.velocity), ("magnetic", &self.magnetic)] {
            for (i, m) in modes.iter().enumerate() {
                let label = format!("{sec}.mode #{} ({})", i + 1, m.dump());
                if m.k.iter().any(|&k| 2 * k.unsigned_abs() as usize >= self.n) {
                    out.push(format!("{label}: |k_i| must be below n/2 = {}", self.n / 2));
                }
                if m.amplitude.iter().any(|a| !a.is_finite()) {
                    out.push(format!("{label}: amplitude must be finite"));
                }
                if !self.project_init {
                    let scale = m.amplitude.iter().fold(0.0f64, |s, a| s.max(a.abs()));
                    if m.divergence().abs() > 1e-12 * scale.max(1.0) {
                        out.push(format!(
                            "{label}: not divergence-free (k·a = {}); use --project-init to project",
                            m.divergence()
                        ));
                    }
                }
            }
        }
        if let Some(c) = &self.constants {
            for (key, v) in CONSTANT_KEYS.iter().zip([c.q_h, c.m_h, c.kappa, c.eta, c.mu0, c.rho_bar]) {
                if !(v > 0.0 && v.is_finite()) {
                    out.push(format!("constants.{key}: must be positive, got {v}"));
                }
            }
        }
        if self.cadence == 0 {
            out.push("diagnostics.cadence: must be at least 1".into());
        }
        out
    }

    pub fn physical_constants(&self) -> PhysicalConstants {
        self.constants.unwrap_or_else(PhysicalConstants::unity)
    }

    /// Normalized text with every key spelled out; parsing it gives back `self`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let dt = match self.dt {
            TimeStep::Auto => "auto".to_string(),
            TimeStep::Fixed(v) => format!("{v:?}"),
        };
        let _ = writeln!(s, "[grid]\nn = {}\ndealias = {:?}", self.n, self.dealias);
        let _ = writeln!(s, "\n[time]\nt_end = {:?}\ndt = {dt}", self.t_end);
        let _ = writeln!(s, "\n[mollifier]\nepsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "\n[particles]\nmarkers = {}", self.markers);
        let triple = |v: [f64; 3]| format!("{:?} {:?} {:?}", v[0], v[1], v[2]);
        match &self.density {
            InitialDensity::UniformBall { amplitude, radius, drift } => {
                let _ = writeln!(
                    s,
                    "density = uniform_ball\namplitude = {amplitude:?}\nradius = {radius:?}\ndrift = {}",
                    triple(*drift)
                );
            }
            InitialDensity::Maxwellian {
                density,
                thermal_speed,
                drift,
            } => {
                let _ = writeln!(
                    s,
                    "density = maxwellian\nnumber_density = {density:?}\nthermal_speed = {thermal_speed:?}\ndrift = {}",
                    triple(*drift)
                );
            }
            InitialDensity::ModulatedBall {
                amplitude,
                radius,
                modulation,
                wavevector,
            } => {
                let _ = writeln!(
                    s,
                    "density = modulated_ball\namplitude = {amplitude:?}\nradius = {radius:?}\nmodulation = {modulation:?}\nwavevector = {} {} {}",
                    wavevector[0], wavevector[1], wavevector[2]
                );
            }
        }
        for (sec, modes) in [("velocity", &self.velocity), ("magnetic", &self.magnetic)] {
            let _ = writeln!(s, "\n[{sec}]");
            for m in modes {
                let _ = writeln!(s, "mode = {}", m.dump());
            }
        }
        match &self.constants {
            None => {
                let _ = writeln!(s, "\n[constants]\npreset = unity");
            }
            Some(c) => {
                let _ = writeln!(
                    s,
                    "\n[constants]\npreset = explicit\nq_h = {:?}\nm_h = {:?}\nkappa = {:?}\neta = {:?}\nmu0 = {:?}\nrho_bar = {:?}",
                    c.q_h, c.m_h, c.kappa, c.eta, c.mu0, c.rho_bar
                );
            }
        }
        let _ = writeln!(
            s,
            "\n[diagnostics]\ncadence = {}\ncheckpoint_every = {}",
            self.cadence, self.checkpoint_every
        );
        let _ = writeln!(
            s,
            "\n[run]\noutput = {}\nseed = {}\ndeterministic = {}\nproject_init = {}",
            self.output.display(),
            self.seed,
            self.deterministic,
            self.project_init
        );
        s
    }
}

fn family_unknown(name: &str) -> bool {
    !matches!(name, "uniform_ball" | "maxwellian" | "modulated_ball")
}

/// Read and validate a configuration file.
pub fn parse_config(path: &Path) -> crate::Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    Ok(RunConfig::parse(&text, false)?)
}

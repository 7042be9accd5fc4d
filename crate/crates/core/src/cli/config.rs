//! Run configuration: flat `key = value` lines grouped under `[section]`
//! headers. `#` starts a comment. Unknown keys are errors.
//!
//! ```text
//! [setup]
//! energy_kev = 100
//! b_max_tesla = 1
//! length = 30
//!
//! [profile]
//! kind = flat_top          # zero, constant, flat_top, two_solenoid, gaussian, table
//! ramp_length = 2
//! plateau_length = 10
//!
//! [beam]
//! b0 = 1.14
//! ell_i = 1                # or: initial = 3,0 and final = 2,0
//!
//! [theta]
//! count = 500
//!
//! [run]
//! dipole = true
//! output = rate.csv
//!
//! [sweep]
//! variable = b0            # b0, L, B_max, ell_i, energy
//! values = 1, 10, 100
//! ```

use std::f64::consts::PI;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::field::{read_field_table, FieldProfile};
use crate::quantum::{CoefficientBranch, ModeLabel};
use crate::units::LabSetup;

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Zero,
    Constant,
    FlatTop {
        ramp_length: f64,
        plateau_length: f64,
    },
    TwoSolenoid {
        coil_center_offset: f64,
        coil_width: f64,
        gap: f64,
    },
    Gaussian {
        center: f64,
        width: f64,
    },
    Table {
        file: PathBuf,
    },
}

impl ProfileSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileSpec::Zero => "zero",
            ProfileSpec::Constant => "constant",
            ProfileSpec::FlatTop { .. } => "flat_top",
            ProfileSpec::TwoSolenoid { .. } => "two_solenoid",
            ProfileSpec::Gaussian { .. } => "gaussian",
            ProfileSpec::Table { .. } => "table",
        }
    }
}

/// Channel selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modes {
    /// `(l, 0) -> (l - 1, 0)`.
    Shorthand(u32),
    Explicit {
        initial: ModeLabel,
        final_mode: ModeLabel,
    },
}

impl Modes {
    pub fn labels(&self) -> (ModeLabel, ModeLabel) {
        match *self {
            Modes::Shorthand(l) => (ModeLabel::new(l, 0), ModeLabel::new(l.saturating_sub(1), 0)),
            Modes::Explicit { initial, final_mode } => (initial, final_mode),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    B0,
    Length,
    BMax,
    EllI,
    Energy,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::B0 => "b0",
            SweepVariable::Length => "L",
            SweepVariable::BMax => "B_max",
            SweepVariable::EllI => "ell_i",
            SweepVariable::Energy => "energy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "b0" => SweepVariable::B0,
            "L" => SweepVariable::Length,
            "B_max" => SweepVariable::BMax,
            "ell_i" => SweepVariable::EllI,
            "energy" => SweepVariable::Energy,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub energy_kev: f64,
    /// Peak field; defaults to the table maximum for tabulated profiles and
    /// to 1 T otherwise.
    pub b_max_tesla: Option<f64>,
    pub length: f64,
    pub profile: ProfileSpec,
    /// Profile domain; defaults to `[-L/2, L/2]`.
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
    pub b0: f64,
    pub b0_prime: f64,
    /// Plane where `b0`, `b0_prime` are imposed.
    pub z_ref: f64,
    pub modes: Modes,
    pub theta_count: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub dipole: bool,
    pub fieldfree: bool,
    pub phi_samples: usize,
    pub branch: CoefficientBranch,
    pub output: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            energy_kev: 100.0,
            b_max_tesla: None,
            length: 30.0,
            profile: ProfileSpec::Zero,
            z_min: None,
            z_max: None,
            b0: 1.14,
            b0_prime: 0.0,
            z_ref: 0.0,
            modes: Modes::Shorthand(1),
            theta_count: 500,
            theta_min: 0.0,
            theta_max: PI,
            dipole: false,
            fieldfree: false,
            phi_samples: 8,
            branch: CoefficientBranch::default(),
            output: None,
            sweep: None,
        }
    }
}

fn cfg_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config { line, msg: msg.into() }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| cfg_err(line, format!("`{key}` expects a finite number, got `{v}`")))
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| cfg_err(line, format!("`{key}` expects a non-negative integer, got `{v}`")))
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(cfg_err(line, format!("`{key}` expects true or false, got `{v}`"))),
    }
}

fn parse_mode(line: usize, key: &str, v: &str) -> Result<ModeLabel> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => match (a.parse(), b.parse()) {
            (Ok(a), Ok(b)) => Ok(ModeLabel::new(a, b)),
            _ => Err(cfg_err(line, format!("`{key}` expects `n_plus, n_minus`, got `{v}`"))),
        },
        _ => Err(cfg_err(line, format!("`{key}` expects `n_plus, n_minus`, got `{v}`"))),
    }
}

#[derive(Default)]
struct Raw {
    // (section.key) -> (line, value), in file order
    entries: Vec<(String, usize, String)>,
}

impl Raw {
    fn parse(text: &str) -> Result<Self> {
        let mut raw = Raw::default();
        let mut section = String::new();
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = match line.find('#') {
                Some(p) => &line[..p],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| cfg_err(lineno, format!("malformed section header `{line}`")))?;
                section = name.trim().to_string();
                if !["setup", "profile", "beam", "theta", "run", "sweep"].contains(&section.as_str()) {
                    return Err(cfg_err(lineno, format!("unknown section `[{section}]`")));
                }
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| cfg_err(lineno, format!("expected `key = value`, got `{line}`")))?;
            if section.is_empty() {
                return Err(cfg_err(lineno, "key outside of any section"));
            }
            let key = format!("{}.{}", section, k.trim());
            if raw.entries.iter().any(|(k2, _, _)| *k2 == key) {
                return Err(cfg_err(lineno, format!("duplicate key `{key}`")));
            }
            raw.entries.push((key, lineno, v.trim().to_string()));
        }
        Ok(raw)
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let pos = self.entries.iter().position(|(k, _, _)| k == key)?;
        let (_, line, v) = self.entries.remove(pos);
        Some((line, v))
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|(l, v)| parse_f64(l, key, &v)).transpose()
    }

    fn need_f64(&mut self, key: &str, kind: &str) -> Result<f64> {
        self.f64(key)?
            .ok_or_else(|| cfg_err(0, format!("profile kind `{kind}` requires `{key}`")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = Raw::parse(text)?;
        let mut c = RunConfig::default();
        if let Some(v) = raw.f64("setup.energy_kev")? {
            c.energy_kev = v;
        }
        c.b_max_tesla = raw.f64("setup.b_max_tesla")?;
        if let Some(v) = raw.f64("setup.length")? {
            c.length = v;
        }

        let kind = raw.take("profile.kind");
        c.profile = match kind.as_ref().map(|(l, v)| (*l, v.as_str())) {
            None | Some((_, "zero")) => ProfileSpec::Zero,
            Some((_, "constant")) => ProfileSpec::Constant,
            Some((_, "flat_top")) => ProfileSpec::FlatTop {
                ramp_length: raw.need_f64("profile.ramp_length", "flat_top")?,
                plateau_length: raw.need_f64("profile.plateau_length", "flat_top")?,
            },
            Some((_, "two_solenoid")) => ProfileSpec::TwoSolenoid {
                coil_center_offset: raw.need_f64("profile.coil_center_offset", "two_solenoid")?,
                coil_width: raw.need_f64("profile.coil_width", "two_solenoid")?,
                gap: raw.need_f64("profile.gap", "two_solenoid")?,
            },
            Some((_, "gaussian")) => ProfileSpec::Gaussian {
                center: raw.f64("profile.center")?.unwrap_or(0.0),
                width: raw.need_f64("profile.width", "gaussian")?,
            },
            Some((_, "table")) => ProfileSpec::Table {
                file: raw
                    .take("profile.file")
                    .map(|(_, v)| PathBuf::from(v))
                    .ok_or_else(|| cfg_err(0, "profile kind `table` requires `profile.file`"))?,
            },
            Some((l, other)) => return Err(cfg_err(l, format!("unknown profile kind `{other}`"))),
        };
        c.z_min = raw.f64("profile.z_min")?;
        c.z_max = raw.f64("profile.z_max")?;

        if let Some(v) = raw.f64("beam.b0")? {
            c.b0 = v;
        }
        if let Some(v) = raw.f64("beam.b0_prime")? {
            c.b0_prime = v;
        }
        if let Some(v) = raw.f64("beam.z_ref")? {
            c.z_ref = v;
        }
        let ell = raw.take("beam.ell_i");
        let initial = raw.take("beam.initial");
        let final_mode = raw.take("beam.final");
        c.modes = match (ell, initial, final_mode) {
            (Some((l, _)), Some(_), _) | (Some((l, _)), _, Some(_)) => {
                return Err(cfg_err(
                    l,
                    "`ell_i` and explicit `initial`/`final` modes are mutually exclusive",
                ))
            }
            (Some((l, v)), None, None) => Modes::Shorthand(
                v.parse()
                    .map_err(|_| cfg_err(l, format!("`ell_i` expects a non-negative integer, got `{v}`")))?,
            ),
            (None, Some((li, vi)), Some((lf, vf))) => Modes::Explicit {
                initial: parse_mode(li, "initial", &vi)?,
                final_mode: parse_mode(lf, "final", &vf)?,
            },
            (None, Some((l, _)), None) | (None, None, Some((l, _))) => {
                return Err(cfg_err(l, "explicit modes need both `initial` and `final`"))
            }
            (None, None, None) => Modes::Shorthand(1),
        };

        if let Some((l, v)) = raw.take("theta.count") {
            c.theta_count = parse_usize(l, "count", &v)?;
        }
        if let Some(v) = raw.f64("theta.min")? {
            c.theta_min = v;
        }
        if let Some(v) = raw.f64("theta.max")? {
            c.theta_max = v;
        }

        if let Some((l, v)) = raw.take("run.dipole") {
            c.dipole = parse_bool(l, "dipole", &v)?;
        }
        if let Some((l, v)) = raw.take("run.fieldfree") {
            c.fieldfree = parse_bool(l, "fieldfree", &v)?;
        }
        if let Some((l, v)) = raw.take("run.phi_samples") {
            c.phi_samples = parse_usize(l, "phi_samples", &v)?;
        }
        if let Some((l, v)) = raw.take("run.coeff_branch") {
            c.branch = CoefficientBranch::parse(&v).ok_or_else(|| {
                cfg_err(
                    l,
                    format!("`coeff_branch` must be `principal` or `continuous`, got `{v}`"),
                )
            })?;
        }
        c.output = raw.take("run.output").map(|(_, v)| PathBuf::from(v));

        let variable = raw.take("sweep.variable");
        let values = raw.take("sweep.values");
        c.sweep = match (variable, values) {
            (None, None) => None,
            (Some((l, var)), values) => {
                let variable =
                    SweepVariable::parse(&var).ok_or_else(|| cfg_err(l, format!("unknown sweep variable `{var}`")))?;
                let values = match values {
                    Some((lv, v)) if !v.trim().is_empty() => v
                        .split(',')
                        .map(|s| parse_f64(lv, "values", s.trim()))
                        .collect::<Result<Vec<f64>>>()?,
                    _ => Vec::new(),
                };
                Some(SweepSpec { variable, values })
            }
            (None, Some((l, _))) => return Err(cfg_err(l, "`values` given without `variable`")),
        };

        if let Some((key, line, _)) = raw.entries.first() {
            return Err(cfg_err(*line, format!("unknown key `{key}`")));
        }
        c.validate()?;
        Ok(c)
    }

    /// Reads a config file; a relative table path is taken relative to the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut c = Self::parse(&text)?;
        if let ProfileSpec::Table { file } = &mut c.profile {
            if file.is_relative() {
                if let Some(dir) = path.parent() {
                    *file = dir.join(&*file);
                }
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_count == 0 {
            return Err(cfg_err(0, "theta grid must not be empty"));
        }
        if !(0.0 <= self.theta_min && self.theta_min <= self.theta_max && self.theta_max <= PI + 1e-15) {
            return Err(cfg_err(0, "theta range must satisfy 0 <= min <= max <= pi"));
        }
        if self.theta_count == 1 && self.theta_min != self.theta_max {
            return Err(cfg_err(0, "a single theta point needs min = max"));
        }
        if self.phi_samples == 0 {
            return Err(cfg_err(0, "phi_samples must be positive"));
        }
        Ok(())
    }

    pub fn theta_grid(&self) -> Vec<f64> {
        let n = self.theta_count;
        if n == 1 {
            return vec![self.theta_min];
        }
        let grid: Vec<f64> = (0..n)
            .map(|i| self.theta_min + (self.theta_max - self.theta_min) * i as f64 / (n - 1) as f64)
            .collect();
        grid.into_iter().map(|t| t.min(PI)).collect()
    }

    /// Lab setup and normalized field profile.
    pub fn resolve(&self) -> Result<(LabSetup, FieldProfile)> {
        let half = 0.5 * self.length;
        let (z_min, z_max) = (self.z_min.unwrap_or(-half), self.z_max.unwrap_or(half));
        let (profile, table_max) = match &self.profile {
            ProfileSpec::Zero => (FieldProfile::zero(z_min, z_max)?, None),
            ProfileSpec::Constant => (FieldProfile::constant(z_min, z_max)?, None),
            ProfileSpec::FlatTop {
                ramp_length,
                plateau_length,
            } => (
                FieldProfile::flat_top(*ramp_length, *plateau_length, z_min, z_max)?,
                None,
            ),
            ProfileSpec::TwoSolenoid {
                coil_center_offset,
                coil_width,
                gap,
            } => (
                FieldProfile::two_solenoid(*coil_center_offset, *coil_width, *gap, z_min, z_max)?,
                None,
            ),
            ProfileSpec::Gaussian { center, width } => (FieldProfile::gaussian(*center, *width, z_min, z_max)?, None),
            ProfileSpec::Table { file } => {
                let table = read_field_table(file)?;
                (table.profile()?, Some(table.b_max()))
            }
        };
        let b_max = self.b_max_tesla.or(table_max).unwrap_or(1.0);
        Ok((LabSetup::new(self.energy_kev, b_max, self.length)?, profile))
    }

    /// Canonical text form; `parse(to_text())` gives back an equal config.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        writeln!(s, "[setup]")?;
        writeln!(s, "energy_kev = {}", self.energy_kev)?;
        if let Some(b) = self.b_max_tesla {
            writeln!(s, "b_max_tesla = {b}")?;
        }
        writeln!(s, "length = {}", self.length)?;
        writeln!(s, "\n[profile]")?;
        writeln!(s, "kind = {}", self.profile.name())?;
        match &self.profile {
            ProfileSpec::Zero | ProfileSpec::Constant => {}
            ProfileSpec::FlatTop {
                ramp_length,
                plateau_length,
            } => {
                writeln!(s, "ramp_length = {ramp_length}")?;
                writeln!(s, "plateau_length = {plateau_length}")?;
            }
            ProfileSpec::TwoSolenoid {
                coil_center_offset,
                coil_width,
                gap,
            } => {
                writeln!(s, "coil_center_offset = {coil_center_offset}")?;
                writeln!(s, "coil_width = {coil_width}")?;
                writeln!(s, "gap = {gap}")?;
            }
            ProfileSpec::Gaussian { center, width } => {
                writeln!(s, "center = {center}")?;
                writeln!(s, "width = {width}")?;
            }
            ProfileSpec::Table { file } => writeln!(s, "file = {}", file.display())?,
        }
        if let Some(z) = self.z_min {
            writeln!(s, "z_min = {z}")?;
        }
        if let Some(z) = self.z_max {
            writeln!(s, "z_max = {z}")?;
        }
        writeln!(s, "\n[beam]")?;
        writeln!(s, "b0 = {}", self.b0)?;
        writeln!(s, "b0_prime = {}", self.b0_prime)?;
        writeln!(s, "z_ref = {}", self.z_ref)?;
        match self.modes {
            Modes::Shorthand(l) => writeln!(s, "ell_i = {l}")?,
            Modes::Explicit { initial, final_mode } => {
                writeln!(s, "initial = {}, {}", initial.n_plus, initial.n_minus)?;
                writeln!(s, "final = {}, {}", final_mode.n_plus, final_mode.n_minus)?;
            }
        }
        writeln!(s, "\n[theta]")?;
        writeln!(s, "count = {}", self.theta_count)?;
        writeln!(s, "min = {}", self.theta_min)?;
        writeln!(s, "max = {}", self.theta_max)?;
        writeln!(s, "\n[run]")?;
        writeln!(s, "dipole = {}", self.dipole)?;
        writeln!(s, "fieldfree = {}", self.fieldfree)?;
        writeln!(s, "phi_samples = {}", self.phi_samples)?;
        writeln!(s, "coeff_branch = {}", self.branch.name())?;
        if let Some(o) = &self.output {
            writeln!(s, "output = {}", o.display())?;
        }
        if let Some(sw) = &self.sweep {
            writeln!(s, "\n[sweep]")?;
            writeln!(s, "variable = {}", sw.variable.name())?;
            let vals: Vec<String> = sw.values.iter().map(|v| v.to_string()).collect();
            writeln!(s, "values = {}", vals.join(", "))?;
        }
        f.write_str(&s)
    }
}

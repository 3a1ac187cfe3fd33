//! The `key = value` run configuration.
//!
//! One setting per line, `#` starts a comment, list values are separated
//! by `;`. Keys may appear once; anything not listed in [`KEYS`] is an
//! error that names the offending line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use bandprufer_core::{Background, InitialCondition, JacobiPeriod, PeriodicPotential};

pub const KEYS: &[&str] = &[
    "mode",
    "potential",
    "cells",
    "jacobi",
    "e_max",
    "energy",
    "energy_grid",
    "perturbation",
    "perturbation_step",
    "x_max",
    "n_max",
    "band",
    "initial",
    "csv",
    "json",
    "steps_per_unit",
    "stride",
    "grid_size",
    "refine_tol",
    "margin",
    "score_threshold",
    "fit_start_fraction",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub reason: String,
}

impl ConfigError {
    fn at_line(line: usize, reason: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            key: None,
            reason: reason.into(),
        }
    }

    fn for_key(key: &str, line: Option<usize>, reason: impl Into<String>) -> Self {
        Self {
            line,
            key: Some(key.to_string()),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}: key \"{k}\": {}", self.reason),
            (Some(l), None) => write!(f, "line {l}: {}", self.reason),
            (None, Some(k)) => write!(f, "key \"{k}\": {}", self.reason),
            (None, None) => write!(f, "{}", self.reason),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Bands,
    Gamma,
    Prufer,
    Wvn,
    Detect,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Bands => "bands",
            Mode::Gamma => "gamma",
            Mode::Prufer => "prufer",
            Mode::Wvn => "wvn",
            Mode::Detect => "detect",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationSpec {
    Zero,
    /// Superposed resonant constructions `(E_t, A_r)`.
    Wvn(Vec<(f64, f64)>),
    /// `c / (1 + x)`.
    Coulomb(f64),
    /// `c / (1 + x)^2`.
    InverseSquare(f64),
    /// `c / ((1 + x) ln(2 + x))`.
    LogDecay(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergySpec {
    Single(f64),
    /// `n` equally spaced points from `lo` to `hi` inclusive.
    Grid { lo: f64, hi: f64, n: usize },
}

impl EnergySpec {
    pub fn points(&self) -> Vec<f64> {
        match *self {
            EnergySpec::Single(e) => vec![e],
            EnergySpec::Grid { lo, hi, n } => (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
                .collect(),
        }
    }
}

/// Optional overrides of the numerical defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tolerances {
    pub steps_per_unit: Option<usize>,
    pub stride: Option<usize>,
    pub grid_size: Option<usize>,
    pub refine_tol: Option<f64>,
    pub margin: Option<f64>,
    pub score_threshold: Option<f64>,
    pub fit_start_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub background: Background,
    pub e_max: Option<f64>,
    pub energies: Option<EnergySpec>,
    pub perturbation: PerturbationSpec,
    /// Tabulation step for analytic continuum perturbations.
    pub perturbation_step: f64,
    pub x_max: Option<f64>,
    pub n_max: Option<usize>,
    pub band: Option<usize>,
    pub initial: Option<InitialCondition>,
    pub csv: String,
    pub json: String,
    pub tolerances: Tolerances,
}

impl RunConfig {
    /// `x_max` for continuum runs, `n_max` for Jacobi runs.
    pub fn extent(&self) -> Option<f64> {
        if self.background.is_discrete() {
            self.n_max.map(|n| n as f64)
        } else {
            self.x_max
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

struct Entries(BTreeMap<String, Entry>);

impl Entries {
    fn raw(&self, key: &str) -> Option<(&str, usize)> {
        self.0.get(key).map(|e| (e.value.as_str(), e.line))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|_| ConfigError::for_key(key, Some(line), format!("cannot parse \"{v}\""))),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.get(key)?;
        match v {
            Some(x) if !x.is_finite() => Err(self.invalid(key, "must be finite")),
            _ => Ok(v),
        }
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.float(key)? {
            Some(x) if x <= 0.0 => Err(self.invalid(key, "must be positive")),
            v => Ok(v),
        }
    }

    fn count(&self, key: &str, min: usize) -> Result<Option<usize>, ConfigError> {
        match self.get::<usize>(key)? {
            Some(n) if n < min => Err(self.invalid(key, &format!("must be at least {min}"))),
            v => Ok(v),
        }
    }

    fn invalid(&self, key: &str, reason: &str) -> ConfigError {
        ConfigError::for_key(key, self.raw(key).map(|(_, l)| l), reason)
    }
}

fn list(value: &str) -> Vec<&str> {
    value.split(';').map(str::trim).collect()
}

fn floats(key: &str, line: usize, items: &[&str]) -> Result<Vec<f64>, ConfigError> {
    items
        .iter()
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| ConfigError::for_key(key, Some(line), format!("\"{s}\" is not a finite number")))
        })
        .collect()
}

fn split_lines(text: &str) -> Result<Entries, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::at_line(line, format!("expected `key = value`, found \"{content}\"")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(ConfigError::for_key(key, Some(line), "unknown key"));
        }
        if let Some(prev) = map.get(key).map(|e: &Entry| e.line) {
            return Err(ConfigError::for_key(key, Some(line), format!("already set on line {prev}")));
        }
        map.insert(
            key.to_string(),
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(Entries(map))
}

fn parse_mode(e: &Entries) -> Result<Mode, ConfigError> {
    let (v, line) = e.raw("mode").ok_or_else(|| ConfigError::for_key("mode", None, "missing required key"))?;
    Ok(match v {
        "bands" => Mode::Bands,
        "gamma" => Mode::Gamma,
        "prufer" => Mode::Prufer,
        "wvn" => Mode::Wvn,
        "detect" => Mode::Detect,
        "verify" => Mode::Verify,
        other => {
            return Err(ConfigError::for_key(
                "mode",
                Some(line),
                format!("\"{other}\" is not one of bands, gamma, prufer, wvn, detect, verify"),
            ))
        }
    })
}

fn read_potential_file(path: &Path, line: usize) -> Result<PeriodicPotential, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| ConfigError::for_key("potential", Some(line), format!("{}: {err}", path.display())))?;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let row = raw.split('#').next().unwrap_or("").trim();
        if row.is_empty() || row.starts_with(|c: char| c.is_alphabetic()) {
            continue;
        }
        let fields: Vec<&str> = row.split([',', ' ', '\t']).filter(|s| !s.is_empty()).collect();
        let bad = || {
            ConfigError::for_key(
                "potential",
                Some(line),
                format!("{} line {}: expected `x, V`", path.display(), i + 1),
            )
        };
        if fields.len() != 2 {
            return Err(bad());
        }
        let x: f64 = fields[0].parse().map_err(|_| bad())?;
        let v: f64 = fields[1].parse().map_err(|_| bad())?;
        pairs.push((x, v));
    }
    PeriodicPotential::from_pairs(&pairs).map_err(|err| ConfigError::for_key("potential", Some(line), err.to_string()))
}

fn parse_background(e: &Entries, base: &Path) -> Result<Background, ConfigError> {
    match (e.raw("potential"), e.raw("jacobi")) {
        (Some(_), Some((_, line))) => Err(ConfigError::for_key(
            "jacobi",
            Some(line),
            "cannot be combined with \"potential\"",
        )),
        (None, None) => Err(ConfigError::for_key(
            "potential",
            None,
            "one of \"potential\" or \"jacobi\" is required",
        )),
        (None, Some((v, line))) => {
            if e.raw("cells").is_some() {
                return Err(e.invalid("cells", "only applies to continuum potentials"));
            }
            let items = list(v);
            let q: usize = items[0]
                .parse()
                .ok()
                .filter(|&q| q >= 1)
                .ok_or_else(|| ConfigError::for_key("jacobi", Some(line), "period must be a positive integer"))?;
            if items.len() != 1 + 2 * q {
                return Err(ConfigError::for_key(
                    "jacobi",
                    Some(line),
                    format!("expected `q; a_1..a_q; b_1..b_q` with {} entries, found {}", 1 + 2 * q, items.len()),
                ));
            }
            let nums = floats("jacobi", line, &items[1..])?;
            let j = JacobiPeriod::new(nums[..q].to_vec(), nums[q..].to_vec())
                .map_err(|err| ConfigError::for_key("jacobi", Some(line), err.to_string()))?;
            Ok(Background::Discrete(j))
        }
        (Some((v, line)), None) => {
            let items = list(v);
            let cells = e.count("cells", 1)?;
            let wrap = |r: bandprufer_core::Result<PeriodicPotential>| {
                r.map_err(|err| ConfigError::for_key("potential", Some(line), err.to_string()))
            };
            let v0 = match items[0] {
                "free" if items.len() == 1 => PeriodicPotential::free(),
                "cosine" if items.len() == 2 => {
                    let amp = floats("potential", line, &items[1..])?[0];
                    wrap(PeriodicPotential::cosine(amp, cells.unwrap_or(64)))?
                }
                "samples" if items.len() >= 2 => wrap(PeriodicPotential::new(floats("potential", line, &items[1..])?))?,
                "file" if items.len() == 2 => read_potential_file(&base.join(items[1]), line)?,
                _ => {
                    return Err(ConfigError::for_key(
                        "potential",
                        Some(line),
                        format!("\"{v}\" is not `free`, `cosine; amp`, `samples; v_1; ...` or `file; path`"),
                    ))
                }
            };
            if cells.is_some() && items[0] != "cosine" {
                return Err(e.invalid("cells", "only applies to `potential = cosine`"));
            }
            Ok(Background::Continuum(v0))
        }
    }
}

fn parse_perturbation(e: &Entries) -> Result<PerturbationSpec, ConfigError> {
    let Some((v, line)) = e.raw("perturbation") else {
        return Ok(PerturbationSpec::Zero);
    };
    let items = list(v);
    let bad = |reason: String| ConfigError::for_key("perturbation", Some(line), reason);
    let nums = floats("perturbation", line, &items[1..])?;
    let one = |nums: &[f64]| -> Result<f64, ConfigError> {
        match nums {
            [c] => Ok(*c),
            _ => Err(bad(format!("`{}` takes exactly one coefficient", items[0]))),
        }
    };
    Ok(match items[0] {
        "zero" if nums.is_empty() => PerturbationSpec::Zero,
        "wvn" => {
            if nums.is_empty() || nums.len() % 2 != 0 {
                return Err(bad("expected `wvn; E_1; A_1[; E_2; A_2 ...]`".into()));
            }
            let pairs: Vec<(f64, f64)> = nums.chunks(2).map(|c| (c[0], c[1])).collect();
            if pairs.iter().any(|&(_, a)| a < 0.0) {
                return Err(bad("amplitudes must be non-negative".into()));
            }
            PerturbationSpec::Wvn(pairs)
        }
        "coulomb" => PerturbationSpec::Coulomb(one(&nums)?),
        "inverse_square" => PerturbationSpec::InverseSquare(one(&nums)?),
        "log_decay" => PerturbationSpec::LogDecay(one(&nums)?),
        other => {
            return Err(bad(format!(
                "\"{other}\" is not zero, wvn, coulomb, inverse_square or log_decay"
            )))
        }
    })
}

fn parse_energy_grid(e: &Entries) -> Result<Option<EnergySpec>, ConfigError> {
    let single = e.float("energy")?;
    let grid = match e.raw("energy_grid") {
        None => None,
        Some((v, line)) => {
            let bad = || ConfigError::for_key("energy_grid", Some(line), format!("expected `lo:hi:n`, found \"{v}\""));
            let parts: Vec<&str> = v.split(':').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad());
            }
            let lo: f64 = parts[0].parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].parse().map_err(|_| bad())?;
            let n: usize = parts[2].parse().map_err(|_| bad())?;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ConfigError::for_key("energy_grid", Some(line), "needs finite lo < hi"));
            }
            if n < 2 {
                return Err(ConfigError::for_key("energy_grid", Some(line), "needs at least 2 points"));
            }
            Some(EnergySpec::Grid { lo, hi, n })
        }
    };
    match (single, grid) {
        (Some(_), Some(_)) => Err(e.invalid("energy_grid", "cannot be combined with \"energy\"")),
        (Some(x), None) => Ok(Some(EnergySpec::Single(x))),
        (None, g) => Ok(g),
    }
}

fn parse_initial(e: &Entries) -> Result<Option<InitialCondition>, ConfigError> {
    let Some((v, line)) = e.raw("initial") else {
        return Ok(None);
    };
    let items = list(v);
    let nums = floats("initial", line, &items[1..])?;
    match (items[0], nums.as_slice()) {
        ("angle", [t]) => Ok(Some(InitialCondition::Angle(*t))),
        ("values", [a, b]) if *a != 0.0 || *b != 0.0 => Ok(Some(InitialCondition::Values(*a, *b))),
        _ => Err(ConfigError::for_key(
            "initial",
            Some(line),
            "expected `angle; theta` or `values; u; u'` (not both zero)",
        )),
    }
}

/// Parses and validates a configuration. Relative file references are
/// resolved against `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<RunConfig, ConfigError> {
    let e = split_lines(text)?;
    let mode = parse_mode(&e)?;
    let background = parse_background(&e, base)?;
    let discrete = background.is_discrete();

    let tolerances = Tolerances {
        steps_per_unit: e.count("steps_per_unit", 16)?,
        stride: e.count("stride", 1)?,
        grid_size: e.count("grid_size", 2)?,
        refine_tol: e.positive("refine_tol")?,
        margin: e.float("margin")?,
        score_threshold: e.float("score_threshold")?,
        fit_start_fraction: e.float("fit_start_fraction")?,
    };
    if let Some(f) = tolerances.fit_start_fraction {
        if !(0.0..1.0).contains(&f) {
            return Err(e.invalid("fit_start_fraction", "must lie in [0, 1)"));
        }
    }
    if tolerances.margin.is_some_and(|m| !(0.0..0.5).contains(&m)) {
        return Err(e.invalid("margin", "must lie in [0, 0.5)"));
    }

    let cfg = RunConfig {
        mode,
        e_max: e.float("e_max")?,
        energies: parse_energy_grid(&e)?,
        perturbation: parse_perturbation(&e)?,
        perturbation_step: e.positive("perturbation_step")?.unwrap_or(1.0 / 256.0),
        x_max: e.positive("x_max")?,
        n_max: e.count("n_max", 10)?,
        band: e.get("band")?,
        initial: parse_initial(&e)?,
        csv: e.raw("csv").map_or_else(|| format!("{}.csv", mode.name()), |(v, _)| v.to_string()),
        json: e.raw("json").map_or_else(|| format!("{}.json", mode.name()), |(v, _)| v.to_string()),
        tolerances,
        background,
    };

    let need = |key: &str, present: bool, why: &str| {
        if present {
            Ok(())
        } else {
            Err(ConfigError::for_key(key, None, format!("required {why}")))
        }
    };
    let continuum_only = |key: &str| {
        if discrete && e.raw(key).is_some() {
            Err(e.invalid(key, "only applies to continuum potentials"))
        } else {
            Ok(())
        }
    };
    let discrete_only = |key: &str| {
        if !discrete && e.raw(key).is_some() {
            Err(e.invalid(key, "only applies to Jacobi operators"))
        } else {
            Ok(())
        }
    };
    continuum_only("x_max")?;
    continuum_only("e_max")?;
    continuum_only("perturbation_step")?;
    discrete_only("n_max")?;
    if let Some(x) = cfg.x_max {
        if x < 10.0 {
            return Err(e.invalid("x_max", "must be at least 10"));
        }
    }

    let window = if discrete { "n_max" } else { "x_max" };
    let needs_bands = matches!(mode, Mode::Bands | Mode::Detect | Mode::Verify);
    if needs_bands && !discrete {
        need("e_max", cfg.e_max.is_some(), "for continuum band computations")?;
    }
    match mode {
        Mode::Bands => {}
        Mode::Gamma => need("energy_grid", cfg.energies.is_some(), "in gamma mode (or \"energy\")")?,
        Mode::Prufer => {
            need("energy", matches!(cfg.energies, Some(EnergySpec::Single(_))), "in prufer mode")?;
            need(window, cfg.extent().is_some(), "in prufer mode")?;
        }
        Mode::Wvn => {
            need(
                "perturbation",
                matches!(cfg.perturbation, PerturbationSpec::Wvn(_)),
                "in wvn mode and must be `wvn; E; A`",
            )?;
            need(window, cfg.extent().is_some(), "in wvn mode")?;
        }
        Mode::Detect | Mode::Verify => {
            need(window, cfg.extent().is_some(), &format!("in {} mode", mode.name()))?;
            if mode == Mode::Detect {
                need("band", cfg.band.is_some(), "in detect mode")?;
            }
        }
    }
    if mode != Mode::Prufer && e.raw("initial").is_some() {
        return Err(e.invalid("initial", "only applies to prufer mode"));
    }
    Ok(cfg)
}

/// [`parse_config_in`] with file references resolved against the working
/// directory.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_in(text, Path::new("."))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_bands_config() {
        let c = parse_config("mode = bands\npotential = free\ne_max = 50").unwrap();
        assert_eq!(c.mode, Mode::Bands);
        assert!(c.background.is_free() && !c.background.is_discrete());
        assert_eq!(c.e_max, Some(50.0));
        assert_eq!(c.csv, "bands.csv");
    }

    #[test]
    fn jacobi_gamma_grid() {
        let c = parse_config("mode = gamma\njacobi = 1; 1.0; 0.0\nenergy_grid = -1.9:1.9:100").unwrap();
        let pts = c.energies.unwrap().points();
        assert_eq!(pts.len(), 100);
        assert_eq!(pts[0], -1.9);
        assert_eq!(pts[99], 1.9);
        assert!(c.background.is_free() && c.background.is_discrete());
    }

    #[test]
    fn missing_mode_names_the_key() {
        let err = parse_config("potential = free\ne_max = 5").unwrap_err();
        assert_eq!(err.key.as_deref(), Some("mode"));
        assert!(err.to_string().contains("\"mode\""));
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let err = parse_config("mode = bands\n# comment\n\npotential = free\ncolour = blue\n").unwrap_err();
        assert_eq!(err.line, Some(5));
        assert!(err.to_string().starts_with("line 5"));
    }

    #[test]
    fn comments_and_lists() {
        let c = parse_config(
            "mode = verify  # trailing\njacobi = 3; 1; 0.7; 1.3; 0.2; -0.5; 0.1\nn_max = 1000\nperturbation = wvn; 0.5; 2; 1.1; 1\n",
        )
        .unwrap();
        assert_eq!(c.perturbation, PerturbationSpec::Wvn(vec![(0.5, 2.0), (1.1, 1.0)]));
        assert_eq!(c.n_max, Some(1000));
    }

    #[test]
    fn validation_errors() {
        let cases = [
            ("mode = gamma\npotential = free\nenergy_grid = 1:2:1", "energy_grid"),
            ("mode = gamma\npotential = free", "energy_grid"),
            ("mode = bands\npotential = free", "e_max"),
            ("mode = bands\npotential = free\njacobi = 1; 1; 0\ne_max = 3", "jacobi"),
            ("mode = bands\njacobi = 2; 1; 1; 0", "jacobi"),
            ("mode = bands\njacobi = 1; 1; 0\nx_max = 100", "x_max"),
            ("mode = prufer\npotential = free\nenergy = 1\nx_max = 5", "x_max"),
            ("mode = wvn\npotential = free\nx_max = 50\nperturbation = coulomb; 1", "perturbation"),
            ("mode = detect\npotential = free\ne_max = 20\nx_max = 50", "band"),
            ("mode = bands\npotential = file; /nonexistent/v.csv\ne_max = 3", "potential"),
            ("mode = sideways\npotential = free", "mode"),
        ];
        for (text, key) in cases {
            let err = parse_config(text).unwrap_err();
            assert_eq!(err.key.as_deref(), Some(key), "{text}: {err}");
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let err = parse_config("mode = bands\nmode = gamma").unwrap_err();
        assert_eq!(err.line, Some(2));
    }
}

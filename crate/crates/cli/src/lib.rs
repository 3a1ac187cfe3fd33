//! Batch driver: parses a run configuration, executes one mode against
//! `bandprufer-core`, and renders a CSV table plus a JSON summary.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use bandprufer_core::{
    corollary_report, detect_embedded, floquet_solution_with, jacobi_floquet, minimal_solution, prufer_extract_discrete_with,
    prufer_integrate_continuum_with, verify_theorem_bound, wvn_construct_with, Background, BandStructure, DetectOptions,
    InitialCondition, Perturbation, PruferOptions, Resolution, Samples, Side, StandardBand,
};
use log::{info, warn};
use serde::Serialize;
use serde_json::{json, Value};

pub use config::{parse_config, parse_config_in, ConfigError, EnergySpec, Mode, PerturbationSpec, RunConfig};
use output::{fmt_float, fmt_opt, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(bandprufer_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<bandprufer_core::Error> for CliError {
    fn from(e: bandprufer_core::Error) -> Self {
        use bandprufer_core::Error as E;
        match e {
            E::InvalidPotential(_) | E::InvalidJacobi(_) | E::InvalidPerturbation(_) => CliError::Config(ConfigError {
                line: None,
                key: None,
                reason: e.to_string(),
            }),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

pub const EXIT_BOUND_FAILURE: i32 = 4;

/// Run metadata; the only part of the output allowed to vary between runs
/// of the same configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl Meta {
    pub fn new(mode: Mode) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            mode,
            seed: None,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub table: Table,
    pub result: Value,
    /// Verify mode: some bound failed.
    pub bound_failed: bool,
}

impl RunOutput {
    pub fn json(&self, meta: &Meta) -> String {
        let doc = json!({ "meta": meta, "result": self.result });
        let mut s = serde_json::to_string_pretty(&doc).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self.bound_failed {
            EXIT_BOUND_FAILURE
        } else {
            0
        }
    }
}

fn prufer_options(cfg: &RunConfig) -> PruferOptions {
    let t = &cfg.tolerances;
    let d = PruferOptions::default();
    PruferOptions {
        stride: t.stride.unwrap_or(d.stride),
        fit_start_fraction: t.fit_start_fraction.unwrap_or(d.fit_start_fraction),
        resolution: Resolution {
            steps_per_unit: t.steps_per_unit.unwrap_or(d.resolution.steps_per_unit),
        },
        ..d
    }
}

fn detect_options(cfg: &RunConfig, extent: f64) -> DetectOptions {
    let t = &cfg.tolerances;
    let base = if cfg.background.is_discrete() {
        DetectOptions::discrete(extent as usize)
    } else {
        DetectOptions::continuum(extent)
    };
    DetectOptions {
        grid_size: t.grid_size.unwrap_or(base.grid_size),
        refine_tol: t.refine_tol.unwrap_or(base.refine_tol),
        margin: t.margin.unwrap_or(base.margin),
        score_threshold: t.score_threshold.unwrap_or(base.score_threshold),
        prufer: PruferOptions {
            discrete_record_every: base.prufer.discrete_record_every,
            ..prufer_options(cfg)
        },
        ..base
    }
}

fn extent(cfg: &RunConfig) -> f64 {
    cfg.extent().expect("validated by the parser")
}

fn build_perturbation(cfg: &RunConfig) -> Result<Perturbation, CliError> {
    let discrete = cfg.background.is_discrete();
    let ext = match cfg.extent() {
        Some(x) => x,
        None => return Ok(Perturbation::zero_continuum(0.0)),
    };
    let analytic = |f: &dyn Fn(f64) -> f64| -> Result<Perturbation, CliError> {
        Ok(if discrete {
            Perturbation::discrete_from_fn(|n| f(n as f64), ext as usize)?
        } else {
            Perturbation::continuum_from_fn(f, cfg.perturbation_step, ext)?
        })
    };
    match &cfg.perturbation {
        PerturbationSpec::Zero => Ok(if discrete {
            Perturbation::zero_discrete(ext as usize)
        } else {
            Perturbation::zero_continuum(ext)
        }),
        PerturbationSpec::Coulomb(c) => analytic(&|x| c / (1.0 + x)),
        PerturbationSpec::InverseSquare(c) => analytic(&|x| c / (1.0 + x).powi(2)),
        PerturbationSpec::LogDecay(c) => analytic(&|x| c / ((1.0 + x) * (2.0 + x).ln())),
        PerturbationSpec::Wvn(targets) => {
            let opts = prufer_options(cfg);
            let mut v: Option<Perturbation> = None;
            for &(e, a) in targets {
                let w = wvn_construct_with(&cfg.background, e, a, ext, &opts)?;
                v = Some(match v {
                    None => w,
                    Some(acc) => acc.superpose(&w)?,
                });
            }
            Ok(v.expect("at least one target"))
        }
    }
}

fn bands_of(cfg: &RunConfig) -> Result<BandStructure, CliError> {
    Ok(cfg.background.bands(cfg.e_max.unwrap_or(0.0), &prufer_options(cfg))?)
}

fn run_bands(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let s = bands_of(cfg)?;
    let mut t = Table::new(&["band", "alpha", "beta", "kappa_alpha", "kappa_beta", "delta", "truncated"]);
    for (i, b) in s.standard.iter().enumerate() {
        t.push(vec![
            i.to_string(),
            fmt_float(b.alpha),
            fmt_float(b.beta),
            b.kappa_alpha.value().to_string(),
            b.kappa_beta.map(|k| k.value().to_string()).unwrap_or_default(),
            fmt_opt(b.delta),
            b.truncated.to_string(),
        ]);
    }
    info!("{} standard bands, {} non-standard", s.standard.len(), s.nonstandard.len());
    Ok(RunOutput {
        table: t,
        result: serde_json::to_value(&s).expect("bands serialize"),
        bound_failed: false,
    })
}

/// `(k, omega, Gamma)`, with `omega` taken for `phi` scaled to unit mean
/// `|phi|^2` over a period so that it does not depend on the seed.
fn gamma_point(bg: &Background, e: f64, opts: &PruferOptions) -> bandprufer_core::Result<(f64, f64, f64)> {
    match bg {
        Background::Continuum(v0) => {
            let f = floquet_solution_with(v0, e, &opts.resolution)?;
            let n = f.grid.nodes();
            let mean = f.phi[..n].iter().map(|p| p.norm_sqr()).sum::<f64>() / n as f64;
            Ok((f.k, f.omega / mean, f.big_gamma))
        }
        Background::Discrete(j) => {
            let f = jacobi_floquet(j, e)?;
            let mean = f.phi.iter().map(|p| p.norm_sqr()).sum::<f64>() / f.period() as f64;
            Ok((f.k, f.omega / mean, f.big_gamma))
        }
    }
}

fn run_gamma(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    use bandprufer_core::Error as E;
    let opts = prufer_options(cfg);
    let energies = cfg.energies.expect("validated").points();
    let mut t = Table::new(&["E", "k", "omega", "Gamma", "inv_Gamma"]);
    let mut skipped = Vec::new();
    for e in energies {
        match gamma_point(&cfg.background, e, &opts) {
            Ok((k, omega, g)) => t.push(vec![
                fmt_float(e),
                fmt_float(k),
                fmt_float(omega),
                fmt_float(g),
                fmt_float(1.0 / g),
            ]),
            Err(E::OutsideBand { .. } | E::EdgeDegeneracy { .. }) => skipped.push(e),
            Err(err) => return Err(err.into()),
        }
    }
    if !skipped.is_empty() {
        warn!("{} energies outside the bands or at an edge were skipped", skipped.len());
    }
    Ok(RunOutput {
        result: json!({ "points": t.rows.len(), "skipped": skipped }),
        table: t,
        bound_failed: false,
    })
}

fn run_prufer(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let Some(EnergySpec::Single(e)) = cfg.energies else {
        unreachable!("validated by the parser")
    };
    let v = build_perturbation(cfg)?;
    let init = cfg.initial.unwrap_or_else(|| InitialCondition::for_perturbation(&v, e));
    let opts = prufer_options(cfg);
    let traj = match &cfg.background {
        Background::Continuum(v0) => prufer_integrate_continuum_with(v0, &v, e, extent(cfg), init, &opts)?,
        Background::Discrete(j) => prufer_extract_discrete_with(j, &v, e, extent(cfg) as usize, init, &opts)?,
    };
    let pos = if traj.discrete { "n" } else { "x" };
    let mut t = Table::new(&[pos, "ln_R", "theta"]);
    for i in 0..traj.grid.len() {
        t.push(vec![fmt_float(traj.grid[i]), fmt_float(traj.ln_r[i]), fmt_float(traj.theta[i])]);
    }
    Ok(RunOutput {
        result: json!({
            "energy": e,
            "initial": init,
            "exponent": traj.exponent_fit.map(|f| f.slope),
            "fit": traj.exponent_fit,
            "ln_r_final": traj.last_ln_r(),
            "r0": traj.r0,
            "identity_residual": traj.identity_residual,
            "a_observed": v.a_observed,
        }),
        table: t,
        bound_failed: false,
    })
}

fn run_wvn(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let PerturbationSpec::Wvn(targets) = &cfg.perturbation else {
        unreachable!("validated by the parser")
    };
    let v = build_perturbation(cfg)?;
    let opts = detect_options(cfg, extent(cfg));
    let mut solutions = Vec::new();
    for &(e, a) in targets {
        let m = minimal_solution(&cfg.background, &v, e, &opts)?;
        solutions.push(json!({
            "energy": e,
            "amplitude": a,
            "expected_exponent": -a / 2.0,
            "exponent": m.exponent,
            "score": m.score,
        }));
    }
    let mut t;
    match &v.samples {
        Samples::Continuum { step, values } => {
            t = Table::new(&["x", "V"]);
            for (i, x) in values.iter().enumerate() {
                t.push(vec![fmt_float(i as f64 * step), fmt_float(*x)]);
            }
        }
        Samples::Discrete(values) => {
            t = Table::new(&["n", "V"]);
            for (n, x) in values.iter().enumerate().skip(1) {
                t.push(vec![n.to_string(), fmt_float(*x)]);
            }
        }
        Samples::Zero { .. } => unreachable!("resonant constructions are tabulated"),
    }
    Ok(RunOutput {
        result: json!({ "a_observed": v.a_observed, "targets": solutions }),
        table: t,
        bound_failed: false,
    })
}

fn band_at(s: &BandStructure, id: usize) -> Result<&StandardBand, CliError> {
    s.standard.get(id).ok_or_else(|| {
        CliError::Config(ConfigError {
            line: None,
            key: Some("band".into()),
            reason: format!("band {id} does not exist; {} bands were found", s.standard.len()),
        })
    })
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::BelowDelta => "below",
        Side::AboveDelta => "above",
    }
}

fn run_detect(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let s = bands_of(cfg)?;
    let id = cfg.band.expect("validated");
    let band = band_at(&s, id)?;
    let v = build_perturbation(cfg)?;
    let d = detect_embedded(&cfg.background, &v, id, band, &detect_options(cfg, extent(cfg)))?;
    let mut t = Table::new(&["E", "score", "exponent"]);
    for m in &d.scan {
        t.push(vec![fmt_float(m.energy), fmt_float(m.score), fmt_float(m.exponent)]);
    }
    info!("band {id}: {} members, {} indeterminate", d.pset.members.len(), d.indeterminate.len());
    Ok(RunOutput {
        result: json!({ "band": band, "set": d.pset, "indeterminate": d.indeterminate }),
        table: t,
        bound_failed: false,
    })
}

fn run_verify(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let s = bands_of(cfg)?;
    let ids: Vec<usize> = match cfg.band {
        Some(id) => {
            band_at(&s, id)?;
            vec![id]
        }
        None => (0..s.standard.len()).collect(),
    };
    let v = build_perturbation(cfg)?;
    let opts = detect_options(cfg, extent(cfg));
    let mut t = Table::new(&["band", "E", "Gamma", "inv_Gamma", "exponent", "side"]);
    let mut psets = Vec::new();
    let mut per_band = Vec::new();
    let mut failed = false;
    for id in ids {
        let band = &s.standard[id];
        let d = detect_embedded(&cfg.background, &v, id, band, &opts)?;
        let r = verify_theorem_bound(&d.pset, band)?;
        failed |= !r.pass;
        for m in &d.pset.members {
            t.push(vec![
                id.to_string(),
                fmt_float(m.energy),
                fmt_float(m.gamma),
                fmt_float(1.0 / m.gamma),
                fmt_float(m.exponent),
                side_name(m.side).into(),
            ]);
        }
        per_band.push(json!({
            "band": id,
            "members": d.pset.members.len(),
            "indeterminate": d.indeterminate.len(),
            "below": r.below,
            "above": r.above,
        }));
        psets.push(d.pset);
    }
    let report = corollary_report(&psets, &cfg.background, &s, v.a_observed)?;
    failed |= !report.pass;
    if failed {
        warn!("a bound check failed");
    }
    Ok(RunOutput {
        result: json!({
            "a": v.a_observed,
            "rhs": report.rhs,
            "bands": per_band,
            "corollaries": report.corollaries,
            "pass": !failed,
        }),
        table: t,
        bound_failed: failed,
    })
}

/// Executes the configured mode.
pub fn run(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    info!("running {} mode", cfg.mode.name());
    match cfg.mode {
        Mode::Bands => run_bands(cfg),
        Mode::Gamma => run_gamma(cfg),
        Mode::Prufer => run_prufer(cfg),
        Mode::Wvn => run_wvn(cfg),
        Mode::Detect => run_detect(cfg),
        Mode::Verify => run_verify(cfg),
    }
}

/// Writes the CSV and the JSON summary into `dir`, creating it if needed.
/// Returns the two paths.
pub fn write_outputs(dir: &Path, cfg: &RunConfig, out: &RunOutput, meta: &Meta) -> Result<(PathBuf, PathBuf), CliError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let csv_path = dir.join(&cfg.csv);
    let json_path = dir.join(&cfg.json);
    let csv = out.table.to_csv().map_err(|e| CliError::Io {
        path: csv_path.clone(),
        source: std::io::Error::other(e),
    })?;
    std::fs::write(&csv_path, csv).map_err(io(&csv_path))?;
    std::fs::write(&json_path, out.json(meta)).map_err(io(&json_path))?;
    Ok((csv_path, json_path))
}

/// Reads, parses and runs the configuration at `path`.
pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        CliError::Config(ConfigError {
            line: None,
            key: None,
            reason: format!("cannot read {}: {source}", path.display()),
        })
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(parse_config_in(&text, base)?)
}

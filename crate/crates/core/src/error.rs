use thiserror::Error;

/// Failures raised by the spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("stiff-integration: {0}")]
    StiffIntegration(String),
    #[error("empty-spectrum-window: no band edge found below {e_max}")]
    EmptySpectrumWindow { e_max: f64 },
    #[error("degenerate-edge near E = {energy}: {reason}")]
    DegenerateEdge { energy: f64, reason: String },
    #[error("not-an-edge: |D({energy})| = {abs_trace}, expected 2")]
    NotAnEdge { energy: f64, abs_trace: f64 },
    #[error("outside-band: E = {energy} has |D| = {abs_trace} >= 2")]
    OutsideBand { energy: f64, abs_trace: f64 },
    #[error("edge-degeneracy at E = {energy}: {reason}")]
    EdgeDegeneracy { energy: f64, reason: String },
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid jacobi period: {0}")]
    InvalidJacobi(String),
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
    #[error("band mismatch: {0}")]
    BandMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Spectral computations for periodic Schrödinger and Jacobi operators with
//! decaying perturbations: band structure, Floquet data and `Gamma(E)`,
//! generalized Prüfer variables, and detection of embedded eigenvalues
//! together with the sum bounds they obey.

pub mod bands;
pub mod embedded;
pub mod error;
pub mod jacobi;
pub mod numeric;
pub mod periodic;
pub mod perturbation;
pub mod prufer;

pub use bands::{BandSearch, BandStructure, Kappa, NonStandardBand, Side, StandardBand};
pub use embedded::{
    classify_exponent, corollary_report, detect_embedded, minimal_solution, verify_theorem_bound, wvn_construct,
    wvn_construct_with, Background, BoundCheck, BoundReport, CorollaryEntry, DetectOptions, Detection,
    MinimalSolution, PMember, PSet, Verdict,
};
pub use error::{Error, Result};
pub use jacobi::{
    jacobi_bands, jacobi_bands_with, jacobi_classify_edge, jacobi_discriminant, jacobi_discriminant_slope, jacobi_floquet,
    jacobi_floquet_conjugate_seed, jacobi_monodromy, jacobi_quasimomentum, jacobi_search, DiscreteFloquetData,
    JacobiPeriod,
};
pub use numeric::LineFit;
pub use periodic::{
    classify_edge, classify_edge_with, compute_bands, compute_bands_with, discriminant, discriminant_slope_with, discriminant_with,
    floquet_solution, floquet_solution_with, lemma_envelope, monodromy, monodromy_with, quasimomentum, Envelope,
    FloquetData, MonodromyMatrix, PeriodGrid, PeriodicPotential, Resolution, GUARD_SIN_K,
};
pub use perturbation::{Perturbation, PerturbationKind, Resonance, Samples};
pub use prufer::{
    crossvalidate_continuum, crossvalidate_continuum_with, prufer_extract_discrete, prufer_extract_discrete_with,
    prufer_integrate_continuum, prufer_integrate_continuum_with, CrossValidation, InitialCondition, PruferOptions,
    PruferTrajectory,
};

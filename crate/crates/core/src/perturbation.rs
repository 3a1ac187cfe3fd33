//! Decaying perturbations `V(x)` on `[0, x_max]` or `V(n)` on `1..=n_max`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    Tabulated,
    CoulombResonant,
}

/// Target of a resonant construction: the energy it was built for and the
/// Prüfer angle `theta(0)` of the solution it makes decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub energy: f64,
    pub amplitude: f64,
    pub theta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Samples {
    /// `V = 0` on `[0, extent]` (continuum) or `1..=extent` (discrete).
    Zero { extent: f64, discrete: bool },
    /// `values[j] = V(j * step)`, linearly interpolated in between.
    Continuum { step: f64, values: Vec<f64> },
    /// `values[n] = V(n)`; `values[0]` is unused by the recursion.
    Discrete(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub samples: Samples,
    /// `max x |V(x)|` over the last decade of the stored window.
    pub a_observed: f64,
    pub resonance: Option<Resonance>,
}

impl Perturbation {
    pub fn zero_continuum(x_max: f64) -> Self {
        Self {
            kind: PerturbationKind::Tabulated,
            samples: Samples::Zero {
                extent: x_max,
                discrete: false,
            },
            a_observed: 0.0,
            resonance: None,
        }
    }

    pub fn zero_discrete(n_max: usize) -> Self {
        Self {
            kind: PerturbationKind::Tabulated,
            samples: Samples::Zero {
                extent: n_max as f64,
                discrete: true,
            },
            a_observed: 0.0,
            resonance: None,
        }
    }

    /// Tabulates `f` on `[0, x_max]` with spacing `step`.
    pub fn continuum_from_fn<F: Fn(f64) -> f64>(f: F, step: f64, x_max: f64) -> Result<Self> {
        if !(step > 0.0 && x_max > 0.0) {
            return Err(Error::InvalidPerturbation(format!("step {step} and x_max {x_max} must be positive")));
        }
        let n = (x_max / step).ceil() as usize;
        Self::continuum(step, (0..=n).map(|j| f(j as f64 * step)).collect())
    }

    pub fn continuum(step: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(step > 0.0) {
            return Err(Error::InvalidPerturbation("need at least two samples and a positive step".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPerturbation("non-finite sample".into()));
        }
        let samples = Samples::Continuum { step, values };
        let a_observed = observed_amplitude(&samples);
        Ok(Self {
            kind: PerturbationKind::Tabulated,
            samples,
            a_observed,
            resonance: None,
        })
    }

    /// `V(n) = f(n)` for `n = 1..=n_max`.
    pub fn discrete_from_fn<F: Fn(usize) -> f64>(f: F, n_max: usize) -> Result<Self> {
        let mut v = vec![0.0];
        v.extend((1..=n_max).map(f));
        Self::discrete(v)
    }

    pub fn discrete(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidPerturbation("need at least one site".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPerturbation("non-finite sample".into()));
        }
        let samples = Samples::Discrete(values);
        let a_observed = observed_amplitude(&samples);
        Ok(Self {
            kind: PerturbationKind::Tabulated,
            samples,
            a_observed,
            resonance: None,
        })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(
            self.samples,
            Samples::Discrete(_) | Samples::Zero { discrete: true, .. }
        )
    }

    pub fn is_zero(&self) -> bool {
        match &self.samples {
            Samples::Zero { .. } => true,
            Samples::Continuum { values, .. } | Samples::Discrete(values) => values.iter().all(|&v| v == 0.0),
        }
    }

    /// Right end of the stored window (`x_max` or `n_max`).
    pub fn extent(&self) -> f64 {
        match &self.samples {
            Samples::Zero { extent, .. } => *extent,
            Samples::Continuum { step, values } => step * (values.len() - 1) as f64,
            Samples::Discrete(values) => (values.len() - 1) as f64,
        }
    }

    /// `V(x)`, linearly interpolated. Zero outside the window.
    pub fn at(&self, x: f64) -> f64 {
        match &self.samples {
            Samples::Zero { .. } => 0.0,
            Samples::Continuum { step, values } => {
                if x < 0.0 {
                    return 0.0;
                }
                let t = x / step;
                let j = t.floor() as usize;
                if j + 1 >= values.len() {
                    return if j + 1 == values.len() { values[j] } else { 0.0 };
                }
                let f = t - j as f64;
                if f == 0.0 {
                    values[j]
                } else {
                    values[j] + f * (values[j + 1] - values[j])
                }
            }
            Samples::Discrete(values) => {
                let n = x.round();
                if n < 0.0 || n as usize >= values.len() {
                    0.0
                } else {
                    values[n as usize]
                }
            }
        }
    }

    /// `V(n)` for the discrete recursion.
    pub fn site(&self, n: usize) -> f64 {
        match &self.samples {
            Samples::Discrete(values) => values.get(n).copied().unwrap_or(0.0),
            Samples::Zero { .. } => 0.0,
            Samples::Continuum { .. } => self.at(n as f64),
        }
    }

    /// Pointwise sum, for superposing several resonant constructions. The
    /// resonance tag is dropped and the amplitude re-measured.
    pub fn superpose(&self, other: &Perturbation) -> Result<Perturbation> {
        match (&self.samples, &other.samples) {
            (Samples::Zero { .. }, _) => Ok(other.clone()),
            (_, Samples::Zero { .. }) => Ok(self.clone()),
            (Samples::Continuum { step: s1, values: v1 }, Samples::Continuum { step: s2, values: v2 }) => {
                if (s1 - s2).abs() > 1e-15 * s1 {
                    return Err(Error::InvalidPerturbation("cannot superpose different tabulation steps".into()));
                }
                let n = v1.len().min(v2.len());
                let mut p = Perturbation::continuum(*s1, (0..n).map(|i| v1[i] + v2[i]).collect())?;
                p.kind = PerturbationKind::CoulombResonant;
                Ok(p)
            }
            (Samples::Discrete(v1), Samples::Discrete(v2)) => {
                let n = v1.len().min(v2.len());
                let mut p = Perturbation::discrete((0..n).map(|i| v1[i] + v2[i]).collect())?;
                p.kind = PerturbationKind::CoulombResonant;
                Ok(p)
            }
            _ => Err(Error::InvalidPerturbation("cannot mix continuum and discrete perturbations".into())),
        }
    }
}

/// `max x |V(x)|` over the last decade `[extent / 10, extent]`.
pub(crate) fn observed_amplitude(samples: &Samples) -> f64 {
    match samples {
        Samples::Zero { .. } => 0.0,
        Samples::Continuum { step, values } => {
            let extent = step * (values.len() - 1) as f64;
            values
                .iter()
                .enumerate()
                .map(|(j, v)| (j as f64 * step, v))
                .filter(|(x, _)| *x >= extent / 10.0)
                .map(|(x, v)| x * v.abs())
                .fold(0.0, f64::max)
        }
        Samples::Discrete(values) => {
            let n_max = values.len() - 1;
            values
                .iter()
                .enumerate()
                .skip((n_max / 10).max(1))
                .map(|(n, v)| n as f64 * v.abs())
                .fold(0.0, f64::max)
        }
    }
}

//! Resonant decaying perturbations, detection of square-integrable
//! solutions inside bands, and the sum bounds they must satisfy.

use std::collections::BTreeMap;

use log::debug;
use rayon::prelude::*;
use serde::Serialize;

use crate::bands::{BandSearch, BandStructure, Side, StandardBand};
use crate::error::{Error, Result};
use crate::jacobi::{jacobi_bands, jacobi_floquet, JacobiPeriod};
use crate::numeric::{fit_line, golden_min, LineFit};
use crate::periodic::{compute_bands_with, floquet_solution_with, Mat2, PeriodicPotential};
use crate::perturbation::{Perturbation, PerturbationKind, Resonance};
use crate::prufer::{integrate_on_frame, run_discrete, InitialCondition, PruferOptions, PruferTrajectory};

/// The unperturbed periodic operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Background {
    Continuum(PeriodicPotential),
    Discrete(JacobiPeriod),
}

impl Background {
    pub fn is_discrete(&self) -> bool {
        matches!(self, Background::Discrete(_))
    }

    pub fn is_free(&self) -> bool {
        match self {
            Background::Continuum(v0) => v0.is_free(),
            Background::Discrete(j) => j.is_free(),
        }
    }

    /// Band structure; `e_max` is the scan ceiling for the continuum and is
    /// ignored for Jacobi operators, whose spectrum is bounded.
    pub fn bands(&self, e_max: f64, opts: &PruferOptions) -> Result<BandStructure> {
        match self {
            Background::Continuum(v0) => compute_bands_with(v0, e_max, &opts.resolution, &BandSearch::default()),
            Background::Discrete(j) => jacobi_bands(j),
        }
    }

    pub fn gamma(&self, energy: f64, opts: &PruferOptions) -> Result<f64> {
        match self {
            Background::Continuum(v0) => Ok(floquet_solution_with(v0, energy, &opts.resolution)?.big_gamma),
            Background::Discrete(j) => Ok(jacobi_floquet(j, energy)?.big_gamma),
        }
    }
}

/// Builds a perturbation with `limsup x|V| = O(A_r)` that makes one
/// solution at `energy` decay like `(1 + x)^{-A_r / 2}`.
///
/// Continuum: `V = -2 gamma' A_r sin(2 theta) / (1 + x)` with `theta`
/// integrated self-consistently. Discrete:
/// `V(n + 1) = 2 gamma'(n) A_r sin(2 theta(n)) / (1 + n)`, the sign that
/// makes the first-order term of the amplitude ratio negative.
/// `extent` is `x_max` or `n_max`.
pub fn wvn_construct(background: &Background, energy: f64, a_r: f64, extent: f64) -> Result<Perturbation> {
    wvn_construct_with(background, energy, a_r, extent, &PruferOptions::default())
}

pub fn wvn_construct_with(
    background: &Background,
    energy: f64,
    a_r: f64,
    extent: f64,
    opts: &PruferOptions,
) -> Result<Perturbation> {
    if !(a_r >= 0.0 && a_r.is_finite()) {
        return Err(Error::InvalidPerturbation(format!("amplitude {a_r} must be non-negative")));
    }
    if !(extent >= 1.0 && extent.is_finite()) {
        return Err(Error::InvalidPerturbation(format!("window {extent} is too short")));
    }
    let theta0 = 0.0;
    let mut v = match background {
        Background::Continuum(v0) => {
            let fl = floquet_solution_with(v0, energy, &opts.resolution)?;
            let s = opts.stride.max(1);
            let tab = if s % 2 == 0 { s } else { 2 * s };
            let n = fl.grid.nodes();
            let h = tab as f64 / n as f64;
            let count = (extent / h).ceil() as usize;
            let rhs = |node: usize, theta: f64| {
                let x = node as f64 / n as f64;
                let (sn, cs) = theta.sin_cos();
                fl.gamma_prime_at_node(node) + 4.0 * a_r * sn * cs * sn * sn / (1.0 + x)
            };
            let pot = |node: usize, theta: f64| {
                let x = node as f64 / n as f64;
                -2.0 * fl.gamma_prime_at_node(node) * a_r * (2.0 * theta).sin() / (1.0 + x)
            };
            let mut values = Vec::with_capacity(count + 1);
            let mut theta = theta0;
            values.push(pot(0, theta));
            for i in 0..count {
                let j = i * tab;
                let k1 = rhs(j, theta);
                let k2 = rhs(j + tab / 2, theta + 0.5 * h * k1);
                let k3 = rhs(j + tab / 2, theta + 0.5 * h * k2);
                let k4 = rhs(j + tab, theta + h * k3);
                theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                values.push(pot(j + tab, theta));
            }
            Perturbation::continuum(h, values)?
        }
        Background::Discrete(j) => {
            let fl = jacobi_floquet(j, energy)?;
            let n_max = extent.round() as usize;
            let mut values = vec![0.0; n_max + 1];
            let record = PruferOptions {
                discrete_record_every: n_max.max(1),
                ..*opts
            };
            run_discrete(j, &fl, n_max, InitialCondition::Angle(theta0), &record, |site, theta, gamma_prime| {
                let n = site - 1;
                let pot = 2.0 * gamma_prime * a_r * (2.0 * theta).sin() / (1.0 + n as f64);
                values[site] = pot;
                pot
            })?;
            Perturbation::discrete(values)?
        }
    };
    v.kind = PerturbationKind::CoulombResonant;
    v.resonance = Some(Resonance {
        energy,
        amplitude: a_r,
        theta0,
    });
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectOptions {
    /// Energies scanned per band.
    pub grid_size: usize,
    /// Golden-section bracket width when refining a candidate's exponent.
    pub refine_tol: f64,
    /// Exponents within this distance of `-1/2` are indeterminate.
    pub margin: f64,
    /// Grid minima of `ln sigma_min` above this are not refined.
    pub score_threshold: f64,
    /// `x_max` or `n_max`.
    pub extent: f64,
    pub prufer: PruferOptions,
}

impl DetectOptions {
    pub fn continuum(x_max: f64) -> Self {
        Self {
            grid_size: 512,
            refine_tol: 1e-6,
            margin: 0.05,
            score_threshold: -0.5,
            extent: x_max,
            prufer: PruferOptions::default(),
        }
    }

    pub fn discrete(n_max: usize) -> Self {
        Self {
            extent: n_max as f64,
            prufer: PruferOptions {
                discrete_record_every: (n_max / 2000).max(1),
                ..PruferOptions::default()
            },
            ..Self::continuum(0.0)
        }
    }
}

/// The most strongly decaying solution at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimalSolution {
    pub energy: f64,
    /// `ln` of the smallest singular value of the map `c(0) -> c(x_max)`.
    pub score: f64,
    /// Decay exponent of that solution's Prüfer amplitude.
    pub exponent: f64,
    pub fit: Option<LineFit>,
    /// Exponents of the two canonical solutions.
    pub canonical_exponents: [f64; 2],
}

fn canonical_runs(
    background: &Background,
    v: &Perturbation,
    energy: f64,
    opts: &DetectOptions,
) -> Result<(PruferTrajectory, PruferTrajectory)> {
    let ics = [InitialCondition::Values(1.0, 0.0), InitialCondition::Values(0.0, 1.0)];
    match background {
        Background::Continuum(v0) => {
            if v.is_discrete() && !v.is_zero() {
                return Err(Error::InvalidPerturbation("discrete perturbation on a continuum background".into()));
            }
            let fl = floquet_solution_with(v0, energy, &opts.prufer.resolution)?;
            Ok((
                integrate_on_frame(&fl, v, opts.extent, ics[0], &opts.prufer)?,
                integrate_on_frame(&fl, v, opts.extent, ics[1], &opts.prufer)?,
            ))
        }
        Background::Discrete(j) => {
            if !v.is_discrete() && !v.is_zero() {
                return Err(Error::InvalidPerturbation("continuum perturbation on a discrete background".into()));
            }
            let fl = jacobi_floquet(j, energy)?;
            let n_max = opts.extent.round() as usize;
            let site = |n: usize, _: f64, _: f64| v.site(n);
            Ok((
                run_discrete(j, &fl, n_max, ics[0], &opts.prufer, site)?,
                run_discrete(j, &fl, n_max, ics[1], &opts.prufer, site)?,
            ))
        }
    }
}

fn coefficient_matrix(t1: &PruferTrajectory, t2: &PruferTrajectory, i: usize) -> Mat2 {
    let (c1, c2) = (t1.coefficient(i), t2.coefficient(i));
    Mat2([[c1.re, c2.re], [c1.im, c2.im]])
}

/// Smallest singular value of `t` and its right singular vector.
fn min_singular(m: &Mat2) -> (f64, [f64; 2]) {
    let t = &m.0;
    let p = t[0][0] * t[0][0] + t[1][0] * t[1][0];
    let s = t[0][1] * t[0][1] + t[1][1] * t[1][1];
    let r = t[0][0] * t[0][1] + t[1][0] * t[1][1];
    let lambda_max = 0.5 * (p + s) + (0.25 * (p - s) * (p - s) + r * r).sqrt();
    let lambda_min = m.det().powi(2) / lambda_max;
    let a = [r, lambda_min - p];
    let b = [lambda_min - s, r];
    let na = a[0].hypot(a[1]);
    let nb = b[0].hypot(b[1]);
    let w = if na == 0.0 && nb == 0.0 {
        [1.0, 0.0]
    } else if na >= nb {
        [a[0] / na, a[1] / na]
    } else {
        [b[0] / nb, b[1] / nb]
    };
    (lambda_min.sqrt(), w)
}

/// Runs both canonical solutions at `energy` and extracts the solution
/// that decays most over the window.
pub fn minimal_solution(
    background: &Background,
    v: &Perturbation,
    energy: f64,
    opts: &DetectOptions,
) -> Result<MinimalSolution> {
    let (t1, t2) = canonical_runs(background, v, energy, opts)?;
    let n = t1.grid.len().min(t2.grid.len());
    let m0 = coefficient_matrix(&t1, &t2, 0);
    let m0_inv = m0.inverse();
    let t = coefficient_matrix(&t1, &t2, n - 1).mul(&m0_inv);
    let (sigma, w) = min_singular(&t);
    let dir = m0_inv.apply(w);
    let ln_r: Vec<f64> = (0..n)
        .map(|i| {
            let c = coefficient_matrix(&t1, &t2, i).apply(dir);
            c[0].hypot(c[1]).ln()
        })
        .collect();
    let start = opts.prufer.fit_start_fraction * t1.grid[n - 1];
    let (xs, ys): (Vec<f64>, Vec<f64>) = t1.grid[..n]
        .iter()
        .zip(&ln_r)
        .filter(|(x, _)| **x >= start)
        .map(|(x, y)| ((1.0 + x).ln(), *y))
        .unzip();
    let fit = fit_line(&xs, &ys);
    let slope = |t: &PruferTrajectory| t.exponent_fit.map_or(f64::NAN, |f| f.slope);
    Ok(MinimalSolution {
        energy,
        score: sigma.ln(),
        exponent: fit.map_or(f64::NAN, |f| f.slope),
        fit,
        canonical_exponents: [slope(&t1), slope(&t2)],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    SquareIntegrable,
    NotSquareIntegrable,
    Indeterminate,
}

/// `s < -1/2 - margin` is square-integrable, `s > -1/2 + margin` is not.
pub fn classify_exponent(exponent: f64, margin: f64) -> Verdict {
    if exponent < -0.5 - margin {
        Verdict::SquareIntegrable
    } else if exponent > -0.5 + margin {
        Verdict::NotSquareIntegrable
    } else {
        Verdict::Indeterminate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PMember {
    pub energy: f64,
    pub gamma: f64,
    pub exponent: f64,
    pub side: Side,
}

/// Energies of one band detected as having a square-integrable solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PSet {
    pub band_id: usize,
    pub band: StandardBand,
    /// Sorted by energy.
    pub members: Vec<PMember>,
    /// The `limsup x|V(x)|` used in the bounds.
    pub a: f64,
}

impl PSet {
    pub fn empty(band_id: usize, band: StandardBand, a: f64) -> Self {
        Self {
            band_id,
            band,
            members: Vec::new(),
            a,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Inserts keeping the energy order.
    pub fn insert(&mut self, m: PMember) {
        let at = self.members.partition_point(|x| x.energy < m.energy);
        self.members.insert(at, m);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub pset: PSet,
    /// Refined candidates whose exponent fell inside the margin.
    pub indeterminate: Vec<MinimalSolution>,
    /// Every grid energy that could be evaluated, in order.
    pub scan: Vec<MinimalSolution>,
}

impl Detection {
    /// Largest exponent seen on the grid.
    pub fn max_exponent(&self) -> f64 {
        self.scan.iter().map(|m| m.exponent).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_exponent(&self) -> f64 {
        self.scan.iter().map(|m| m.exponent).fold(f64::INFINITY, f64::min)
    }
}

/// The decaying solution only shows in the tail exponent within about
/// `1 / extent` of the true energy, far narrower than a grid cell, while
/// the score has a broad but slightly biased funnel. So: golden section on
/// the score, a short exponent grid around its minimum, then golden section
/// on the exponent inside the best cell of that grid.
fn refine_candidate(
    background: &Background,
    v: &Perturbation,
    lo: f64,
    hi: f64,
    spacing: f64,
    opts: &DetectOptions,
) -> Result<MinimalSolution> {
    let eval = |e: f64, pick: fn(&MinimalSolution) -> f64| match minimal_solution(background, v, e, opts) {
        Ok(m) if pick(&m).is_finite() => Ok(pick(&m)),
        Ok(_) | Err(Error::EdgeDegeneracy { .. }) => Ok(f64::INFINITY),
        Err(err) => Err(err),
    };
    let (centre, _) = golden_min(|e| eval(e, |m| m.score), lo, hi, opts.refine_tol)?;
    let half = (0.1 * spacing).max(20.0 * opts.refine_tol);
    let (a, b) = ((centre - half).max(lo), (centre + half).min(hi));
    const LOCAL: usize = 20;
    let step = (b - a) / LOCAL as f64;
    let mut best = (centre, eval(centre, |m| m.exponent)?);
    for k in 0..=LOCAL {
        let e = a + step * k as f64;
        let s = eval(e, |m| m.exponent)?;
        if s < best.1 {
            best = (e, s);
        }
    }
    let (e, _) = golden_min(
        |e| eval(e, |m| m.exponent),
        (best.0 - step).max(lo),
        (best.0 + step).min(hi),
        opts.refine_tol,
    )?;
    let refined = minimal_solution(background, v, e, opts)?;
    if refined.exponent <= best.1 {
        Ok(refined)
    } else {
        minimal_solution(background, v, best.0, opts)
    }
}

/// Scans `grid_size` band-interior energies. Each grid minimum of the decay
/// score below `score_threshold` is refined by golden section on the tail
/// exponent, and energies whose minimal solution decays faster than
/// `(1 + x)^{-1/2}` are kept.
pub fn detect_embedded(
    background: &Background,
    v: &Perturbation,
    band_id: usize,
    band: &StandardBand,
    opts: &DetectOptions,
) -> Result<Detection> {
    let n = opts.grid_size.max(2);
    let w = band.width();
    let energies: Vec<f64> = (0..n).map(|j| band.alpha + w * (j as f64 + 0.5) / n as f64).collect();
    let evaluated: Vec<Option<MinimalSolution>> = energies
        .par_iter()
        .map(|&e| match minimal_solution(background, v, e, opts) {
            Ok(m) => Ok(Some(m)),
            Err(Error::EdgeDegeneracy { .. }) => Ok(None),
            Err(err) => Err(err),
        })
        .collect::<Result<_>>()?;
    let scan: Vec<MinimalSolution> = evaluated.into_iter().flatten().collect();

    let mut pset = PSet::empty(band_id, band.clone(), v.a_observed);
    let mut indeterminate = Vec::new();
    for i in 0..scan.len() {
        let here = scan[i].score;
        let left = if i > 0 { scan[i - 1].score } else { f64::INFINITY };
        let right = scan.get(i + 1).map_or(f64::INFINITY, |m| m.score);
        if !(here < opts.score_threshold && here <= left && here < right) {
            continue;
        }
        let lo = if i > 0 { scan[i - 1].energy } else { scan[i].energy };
        let hi = scan.get(i + 1).map_or(scan[i].energy, |m| m.energy);
        let best = if hi > lo {
            refine_candidate(background, v, lo, hi, w / n as f64, opts)?
        } else {
            scan[i]
        };
        debug!(
            "candidate near E = {}: refined to {} (score {}, exponent {})",
            scan[i].energy, best.energy, best.score, best.exponent
        );
        match classify_exponent(best.exponent, opts.margin) {
            Verdict::SquareIntegrable => {
                if pset.members.iter().any(|m| (m.energy - best.energy).abs() < 10.0 * opts.refine_tol) {
                    continue;
                }
                pset.insert(PMember {
                    energy: best.energy,
                    gamma: background.gamma(best.energy, &opts.prufer)?,
                    exponent: best.exponent,
                    side: band.side(best.energy),
                });
            }
            Verdict::Indeterminate => indeterminate.push(best),
            Verdict::NotSquareIntegrable => {}
        }
    }
    Ok(Detection {
        pset,
        indeterminate,
        scan,
    })
}

/// `lhs <= rhs` up to `1e-9`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    /// `rhs - lhs`.
    pub margin: f64,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            pass: lhs <= rhs + 1e-9,
            margin: rhs - lhs,
        }
    }
}

/// One corollary. Bounds with explicit constants carry `rhs` and `pass`;
/// bounds stated with an unspecified constant `K` report the smallest `K`
/// consistent with the data instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryEntry {
    pub lhs: f64,
    pub rhs: Option<f64>,
    pub pass: Option<bool>,
    pub implied_k: Option<f64>,
}

impl CorollaryEntry {
    fn explicit(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs: Some(rhs),
            pass: Some(lhs <= rhs + 1e-9),
            implied_k: None,
        }
    }

    fn implied(lhs: f64, a: f64) -> Self {
        let k = if lhs == 0.0 {
            0.0
        } else if a > 0.0 {
            lhs / (a * a)
        } else {
            f64::INFINITY
        };
        Self {
            lhs,
            rhs: None,
            pass: None,
            implied_k: Some(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub a: f64,
    /// `A^2 / 2`.
    pub rhs: f64,
    pub sum_inv_gamma_below: f64,
    pub sum_inv_gamma_above: f64,
    pub below: BoundCheck,
    pub above: BoundCheck,
    pub corollaries: BTreeMap<String, CorollaryEntry>,
    /// All theorem checks and all explicit corollaries pass.
    pub pass: bool,
}

impl BoundReport {
    fn finish(mut self) -> Self {
        self.pass = self.below.pass && self.above.pass && self.corollaries.values().all(|c| c.pass != Some(false));
        self
    }
}

fn check_band(pset: &PSet, band: &StandardBand) -> Result<()> {
    if (pset.band.alpha - band.alpha).abs() > 1e-9 || (pset.band.beta - band.beta).abs() > 1e-9 {
        return Err(Error::BandMismatch(format!(
            "set for [{}, {}] checked against [{}, {}]",
            pset.band.alpha, pset.band.beta, band.alpha, band.beta
        )));
    }
    if let Some(m) = pset.members.iter().find(|m| !band.contains(m.energy)) {
        return Err(Error::BandMismatch(format!(
            "E = {} lies outside ({}, {})",
            m.energy, band.alpha, band.beta
        )));
    }
    Ok(())
}

/// Splits the set at `delta` and compares each half's `sum 1/Gamma` with
/// `A^2 / 2`.
pub fn verify_theorem_bound(pset: &PSet, band: &StandardBand) -> Result<BoundReport> {
    check_band(pset, band)?;
    let (mut below, mut above) = (0.0, 0.0);
    for m in &pset.members {
        match band.side(m.energy) {
            Side::BelowDelta => below += 1.0 / m.gamma,
            Side::AboveDelta => above += 1.0 / m.gamma,
        }
    }
    let rhs = 0.5 * pset.a * pset.a;
    Ok(BoundReport {
        a: pset.a,
        rhs,
        sum_inv_gamma_below: below,
        sum_inv_gamma_above: above,
        below: BoundCheck::new(below, rhs),
        above: BoundCheck::new(above, rhs),
        corollaries: BTreeMap::new(),
        pass: false,
    }
    .finish())
}

/// Evaluates every corollary that applies to `background` over all sets.
/// The theorem fields hold the worst band, each band being checked against
/// the same `A^2 / 2`.
pub fn corollary_report(psets: &[PSet], background: &Background, structure: &BandStructure, a: f64) -> Result<BoundReport> {
    let mut worst_below = 0.0f64;
    let mut worst_above = 0.0f64;
    for p in psets {
        let band = structure
            .standard
            .get(p.band_id)
            .ok_or_else(|| Error::BandMismatch(format!("band {} is not in the structure", p.band_id)))?;
        let r = verify_theorem_bound(p, band)?;
        worst_below = worst_below.max(r.sum_inv_gamma_below);
        worst_above = worst_above.max(r.sum_inv_gamma_above);
    }
    let members: Vec<f64> = psets.iter().flat_map(|p| p.members.iter().map(|m| m.energy)).collect();
    let mut cor = BTreeMap::new();

    for p in psets {
        let b = &structure.standard[p.band_id];
        let lhs: f64 = p
            .members
            .iter()
            .map(|m| {
                let left = (m.energy - b.alpha).abs().powi(b.kappa_alpha.value() as i32);
                match b.kappa_beta {
                    Some(kb) => left.min((b.beta - m.energy).abs().powi(kb.value() as i32)),
                    None => left,
                }
            })
            .sum();
        cor.insert(format!("cor-1.2/band-{}", p.band_id), CorollaryEntry::implied(lhs, a));
    }

    // Non-standard bands: energies within eps of either end.
    let eps = structure
        .standard
        .iter()
        .filter(|b| !b.truncated)
        .map(|b| 0.5 * b.width())
        .fold(f64::INFINITY, f64::min);
    let nonstandard_lhs = |nb: &crate::bands::NonStandardBand| -> f64 {
        members
            .iter()
            .filter(|&&e| e > nb.alpha && e < nb.beta)
            .filter(|&&e| e < nb.alpha + eps || (!nb.truncated && e > nb.beta - eps))
            .map(|&e| (e - nb.alpha).abs().min((nb.beta - e).abs()))
            .sum()
    };
    let mut total_nonstandard = 0.0;
    for (l, nb) in structure.nonstandard.iter().enumerate() {
        let lhs = nonstandard_lhs(nb);
        total_nonstandard += lhs;
        cor.insert(format!("cor-1.3/band-{l}"), CorollaryEntry::implied(lhs, a));
    }

    match background {
        Background::Continuum(_) => {
            if background.is_free() {
                let lhs: f64 = members.iter().filter(|&&e| e > 0.0).sum();
                cor.insert("cor-1.4".into(), CorollaryEntry::explicit(lhs, 0.5 * a * a));
            }
        }
        Background::Discrete(_) => {
            if background.is_free() {
                let lhs: f64 = members.iter().filter(|&&e| e.abs() < 2.0).map(|e| 4.0 - e * e).sum();
                cor.insert("cor-1.5".into(), CorollaryEntry::explicit(lhs, 4.0 * a * a + 4.0 * a.min(1.0)));
            }
            let edges = structure.edges();
            let lhs: f64 = members
                .iter()
                .map(|&e| edges.iter().map(|x| (e - x).abs()).fold(f64::INFINITY, f64::min).powi(2))
                .sum();
            cor.insert("cor-1.6".into(), CorollaryEntry::implied(lhs, a));
            cor.insert("cor-1.7".into(), CorollaryEntry::implied(total_nonstandard, a));
        }
    }

    let rhs = 0.5 * a * a;
    Ok(BoundReport {
        a,
        rhs,
        sum_inv_gamma_below: worst_below,
        sum_inv_gamma_above: worst_above,
        below: BoundCheck::new(worst_below, rhs),
        above: BoundCheck::new(worst_above, rhs),
        corollaries: cor,
        pass: false,
    }
    .finish())
}

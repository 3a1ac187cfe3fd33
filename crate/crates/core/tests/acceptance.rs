//! Acceptance checks. Each criterion prints one PASS/FAIL line with the
//! measured quantities and its runtime against the budget; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use bandprufer_core::*;
use rand::{Rng, SeedableRng};

type Check = Result<(bool, String), Error>;

fn criterion(id: u32, name: &str, budget_s: f64, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = f();
    let secs = start.elapsed().as_secs_f64();
    let (ok, detail) = match result {
        Ok((ok, detail)) => (ok && secs < budget_s, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "{} [{id:>2}] {name}: {detail} ({secs:.2} s of {budget_s} s)",
        if ok { "PASS" } else { "FAIL" }
    );
    ok
}

fn free_continuum_gamma() -> Check {
    let v0 = PeriodicPotential::free();
    let mut worst = 0.0f64;
    for e in [0.5, 1.0, 2.0, 5.0] {
        let f = floquet_solution(&v0, e)?;
        worst = worst.max((f.big_gamma - 1.0 / e).abs());
    }
    Ok((worst < 1e-8, format!("max |Gamma - 1/E| = {worst:.3e} (tol 1e-8)")))
}

fn free_discrete_gamma() -> Check {
    let j = JacobiPeriod::free();
    let mut worst = 0.0f64;
    for e in [-1.5, -1.0, 0.0, 1.0, 1.5] {
        let f = jacobi_floquet(&j, e)?;
        worst = worst.max((f.big_gamma - 1.0 / (1.0 - e * e / 4.0)).abs());
    }
    Ok((worst < 1e-12, format!("max |Gamma - 1/(1 - E^2/4)| = {worst:.3e} (tol 1e-12)")))
}

fn free_bands() -> Check {
    let s = compute_bands(&PeriodicPotential::free(), 170.0)?;
    let edges = s.edges();
    let mut edge_err = 0.0f64;
    for n in 0..=4 {
        let target = (n as f64 * PI).powi(2);
        let near = edges.iter().map(|e| (e - target).abs()).fold(f64::INFINITY, f64::min);
        edge_err = edge_err.max(near);
    }
    let bottom_ok = s.standard[0].kappa_alpha == Kappa::NonCollapsed;
    let interior_ok = s.standard.iter().enumerate().all(|(l, b)| {
        (l == 0 || b.kappa_alpha == Kappa::Collapsed) && (b.truncated || b.kappa_beta == Some(Kappa::Collapsed))
    });
    let delta_err = (s.standard[0].delta.unwrap_or(f64::NAN) - PI * PI / 4.0).abs();
    let ok = edge_err < 1e-6 && bottom_ok && interior_ok && delta_err < 1e-8 && s.standard.len() >= 4;
    Ok((
        ok,
        format!(
            "{} bands, max edge error {edge_err:.2e}, bottom kappa=1 {bottom_ok}, interior kappa=2 {interior_ok}, |delta_1 - pi^2/4| = {delta_err:.2e}",
            s.standard.len()
        ),
    ))
}

fn mathieu_gap() -> Check {
    let v0 = PeriodicPotential::cosine(2.0, 256)?;
    let e_max = 60.0;
    let s = compute_bands(&v0, e_max)?;
    let fine = compute_bands_with(&v0, e_max, &Resolution { steps_per_unit: 2048 }, &BandSearch::default())?;
    let (b1, b2) = (&s.standard[0], &s.standard[1]);
    let gap = b2.alpha - b1.beta;
    let kappa_ok = b1.kappa_beta == Some(Kappa::NonCollapsed) && b2.kappa_alpha == Kappa::NonCollapsed;
    let mut det_err = 0.0f64;
    for i in 0..500 {
        let e = s.e_min + (e_max - s.e_min) * i as f64 / 499.0;
        det_err = det_err.max((monodromy(&v0, e)?.det() - 1.0).abs());
    }
    let (ea, eb) = (s.edges(), fine.edges());
    let refine_err = if ea.len() == eb.len() {
        ea.iter().zip(&eb).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let ok = gap > 1e-3 && kappa_ok && det_err < 1e-9 && refine_err < 1e-6;
    Ok((
        ok,
        format!("gap 1 = [{:.9}, {:.9}] width {gap:.4e}, edges kappa=1 {kappa_ok}, max |det - 1| = {det_err:.2e}, half-step edge shift {refine_err:.2e}", b1.beta, b2.alpha),
    ))
}

fn prufer_null() -> Check {
    let v0 = PeriodicPotential::free();
    let mut worst_c = 0.0f64;
    for (e, ic) in [(1.0, InitialCondition::Values(1.0, 0.0)), (7.3, InitialCondition::Angle(0.4))] {
        let t = prufer_integrate_continuum(&v0, &Perturbation::zero_continuum(100.0), e, 100.0, ic)?;
        worst_c = worst_c.max(t.ln_r.iter().map(|l| l.abs()).fold(0.0, f64::max));
    }
    let mathieu = PeriodicPotential::cosine(2.0, 64)?;
    let band = compute_bands(&mathieu, 20.0)?.standard[0].clone();
    let mid = 0.5 * (band.alpha + band.beta);
    let zeros = Perturbation::continuum(0.5, vec![0.0; 201])?;
    let t = prufer_integrate_continuum(&mathieu, &zeros, mid, 100.0, InitialCondition::Values(0.0, 1.0))?;
    worst_c = worst_c.max(t.ln_r.iter().map(|l| l.abs()).fold(0.0, f64::max));

    let mut worst_d = 0.0f64;
    for (j, e) in [(JacobiPeriod::free(), 0.7), (JacobiPeriod::new(vec![1.0, 0.6], vec![0.4, -0.3])?, 1.2)] {
        let e = match jacobi_bands(&j)?.band_of(e) {
            Some(_) => e,
            None => {
                let b = &jacobi_bands(&j)?.standard[0];
                0.5 * (b.alpha + b.beta)
            }
        };
        let t = prufer_extract_discrete(&j, &Perturbation::zero_discrete(100_000), e, 100_000, InitialCondition::Values(1.0, 0.0))?;
        worst_d = worst_d.max(t.ln_r.iter().map(|l| l.exp_m1().abs()).fold(0.0, f64::max));
    }
    Ok((
        worst_c < 1e-8 && worst_d < 1e-12,
        format!("continuum max |ln R| = {worst_c:.2e} to x = 100; discrete max |R/R(0) - 1| = {worst_d:.2e} to n = 1e5"),
    ))
}

fn wvn_round_trip() -> Check {
    let v0 = PeriodicPotential::free();
    let bg = Background::Continuum(v0.clone());
    let x_max = 400.0;
    let v = wvn_construct(&bg, 1.0, 2.0, x_max)?;
    let t = prufer_integrate_continuum(&v0, &v, 1.0, x_max, InitialCondition::for_perturbation(&v, 1.0))?;
    let s = t.exponent_fit.map_or(f64::NAN, |f| f.slope);
    let band = compute_bands(&v0, 20.0)?.standard[0].clone();
    let d = detect_embedded(&bg, &v, 0, &band, &DetectOptions::continuum(x_max))?;
    let found: Vec<f64> = d.pset.members.iter().map(|m| m.energy).collect();
    let located = found.len() == 1 && (found[0] - 1.0).abs() < 1e-3;
    let r = verify_theorem_bound(&d.pset, &band)?;
    let lhs = r.sum_inv_gamma_below + r.sum_inv_gamma_above;
    let ok = (s + 1.0).abs() < 0.05
        && located
        && r.pass
        && (lhs - 1.0).abs() < 1e-3
        && (v.a_observed - 4.0).abs() < 0.1;
    Ok((
        ok,
        format!(
            "exponent {s:.5}, detected {found:?}, A_obs = {:.4}, lhs = {lhs:.6} <= rhs = {:.4}",
            v.a_observed, r.rhs
        ),
    ))
}

fn norm_equivalence() -> Check {
    let free = PeriodicPotential::free();
    let mathieu = PeriodicPotential::cosine(2.0, 64)?;
    let band = compute_bands(&mathieu, 20.0)?.standard[0].clone();
    let mid = 0.5 * (band.alpha + band.beta);
    let x = 200.0;
    let step = 1.0 / 256.0;
    let short = Perturbation::continuum_from_fn(|x| 1.0 / (1.0 + x).powi(2), step, 2.0 * x)?;
    let wvn = wvn_construct(&Background::Continuum(free.clone()), 1.0, 2.0, 2.0 * x)?;
    let coulomb = Perturbation::continuum_from_fn(|x| 0.5 / (1.0 + x), step, 2.0 * x)?;
    let scenarios = [
        ("free+short-range", &free, &short, 1.0, InitialCondition::Values(1.0, 0.0)),
        ("free+wvn", &free, &wvn, 1.0, InitialCondition::for_perturbation(&wvn, 1.0)),
        ("mathieu+0.5/(1+x)", &mathieu, &coulomb, mid, InitialCondition::Values(1.0, 0.0)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, v0, v, e, ic) in scenarios {
        let a = crossvalidate_continuum(v0, v, e, x, ic)?;
        let b = crossvalidate_continuum(v0, v, e, 2.0 * x, ic)?;
        let drift = (b.sandwich_c / a.sandwich_c - 1.0).abs();
        ok &= a.sandwich_c.is_finite() && drift <= 0.2 && a.consistent() && b.consistent();
        parts.push(format!("{name} C = {:.4} -> {:.4}", a.sandwich_c, b.sandwich_c));
    }
    Ok((ok, parts.join("; ")))
}

/// `Gamma sin^2 k` is bounded on every band; that is the quantity gated
/// here. Its reciprocal is printed too: it is finite only at open edges and
/// peaks within the width of the neighbouring gap, which a uniform grid does
/// not resolve on the narrow-gap bands.
fn lemma_envelope_stable() -> Check {
    let v0 = PeriodicPotential::cosine(2.0, 64)?;
    let s = compute_bands(&v0, 100.0)?;
    let mut ok = s.standard.len() >= 3;
    let mut parts = Vec::new();
    let mut inverse = Vec::new();
    for b in s.standard.iter().take(3) {
        let coarse = lemma_envelope(&v0, b, 200)?;
        let fine = lemma_envelope(&v0, b, 400)?;
        let drift = (fine.max_gamma_sin2 / coarse.max_gamma_sin2 - 1.0).abs();
        ok &= coarse.max_gamma_sin2.is_finite() && drift <= 0.1;
        parts.push(format!("{:.5} -> {:.5}", coarse.max_gamma_sin2, fine.max_gamma_sin2));
        inverse.push(format!("{:.4e} -> {:.4e}", coarse.max_inv_gamma_sin2, fine.max_inv_gamma_sin2));
    }
    Ok((
        ok,
        format!(
            "max Gamma sin^2 k per band, 200 -> 400 points: {}; reciprocal max: {}",
            parts.join(", "),
            inverse.join(", ")
        ),
    ))
}

fn slow_decay_exclusion() -> Check {
    let v0 = PeriodicPotential::free();
    let bg = Background::Continuum(v0.clone());
    let x_max = 400.0;
    let v = Perturbation::continuum_from_fn(|x| 1.0 / ((1.0 + x) * (2.0 + x).ln()), 1.0 / 256.0, x_max)?;
    let band = compute_bands(&v0, 20.0)?.standard[0].clone();
    let d = detect_embedded(&bg, &v, 0, &band, &DetectOptions::continuum(x_max))?;
    let min_exp = d.min_exponent();
    Ok((
        d.pset.is_empty() && min_exp > -0.2,
        format!("{} members, smallest exponent over {} energies {min_exp:.4}", d.pset.members.len(), d.scan.len()),
    ))
}

fn discrete_ratio_identity() -> Check {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20_241_015);
    let backgrounds = [JacobiPeriod::free(), JacobiPeriod::new(vec![1.0, 0.7, 1.3], vec![0.2, -0.5, 0.1])?];
    let mut worst = 0.0f64;
    let mut runs = 0;
    for j in &backgrounds {
        let bands = jacobi_bands(j)?;
        for _ in 0..4 {
            let b = &bands.standard[rng.gen_range(0..bands.standard.len())];
            let e = b.alpha + b.width() * rng.gen_range(0.05..0.95);
            let bg = Background::Discrete(j.clone());
            let v = wvn_construct(&bg, e, rng.gen_range(0.5..3.0), 100_000.0)?;
            let t = prufer_extract_discrete(j, &v, e, 100_000, InitialCondition::for_perturbation(&v, e))?;
            worst = worst.max(t.identity_residual.unwrap_or(f64::INFINITY));
            runs += 1;
        }
    }
    Ok((worst < 1e-8, format!("worst relative residual {worst:.2e} over {runs} runs of 1e5 steps")))
}

fn main() -> ExitCode {
    let results = [
        criterion(1, "free continuum Gamma", 1.0, free_continuum_gamma),
        criterion(2, "free discrete Gamma", 1.0, free_discrete_gamma),
        criterion(3, "free continuum bands", 10.0, free_bands),
        criterion(4, "Mathieu first gap", 60.0, mathieu_gap),
        criterion(5, "Prufer null test", 5.0, prufer_null),
        criterion(6, "resonant round trip", 30.0, wvn_round_trip),
        criterion(7, "norm equivalence", 60.0, norm_equivalence),
        criterion(8, "Gamma envelope", 60.0, lemma_envelope_stable),
        criterion(9, "slow-decay exclusion", 60.0, slow_decay_exclusion),
        criterion(10, "discrete ratio identity", 10.0, discrete_ratio_identity),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

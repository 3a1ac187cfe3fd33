use bandprufer_core::*;
use proptest::prelude::*;

/// Exact propagator of `-u'' + q u = 0` over length `h` for constant `q`.
fn exact_cell(q: f64, h: f64) -> [[f64; 2]; 2] {
    if q < 0.0 {
        let k = (-q).sqrt();
        let (s, c) = (k * h).sin_cos();
        [[c, s / k], [-k * s, c]]
    } else if q > 0.0 {
        let k = q.sqrt();
        let (s, c) = ((k * h).sinh(), (k * h).cosh());
        [[c, s / k], [k * s, c]]
    } else {
        [[1.0, h], [0.0, 1.0]]
    }
}

fn mul(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn exact_monodromy(values: &[f64], energy: f64) -> [[f64; 2]; 2] {
    let h = 1.0 / values.len() as f64;
    values
        .iter()
        .fold([[1.0, 0.0], [0.0, 1.0]], |acc, v| mul(exact_cell(v - energy, h), acc))
}

fn max_entry_error(m: &MonodromyMatrix, exact: [[f64; 2]; 2]) -> f64 {
    [m.a - exact[0][0], m.b - exact[0][1], m.c - exact[1][0], m.d - exact[1][1]]
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
}

#[test]
fn monodromy_matches_exact_cell_product() {
    let values = vec![2.0, -1.5, 0.0, 4.0, -3.0];
    let v0 = PeriodicPotential::new(values.clone()).unwrap();
    for e in [-2.0, 0.3, 1.0, 7.5, 40.0] {
        let m = monodromy(&v0, e).unwrap();
        let exact = exact_monodromy(&values, e);
        let scale = exact.iter().flatten().fold(1.0f64, |a, x| a.max(x.abs()));
        assert!(max_entry_error(&m, exact) < 1e-9 * scale, "E = {e}");
    }
}

#[test]
fn rk4_converges_at_fourth_order() {
    let values = vec![1.0, -1.0];
    let v0 = PeriodicPotential::new(values.clone()).unwrap();
    // E = 3 gives a step scale of exactly 2, so doubling the resolution
    // exactly halves the step.
    let exact = exact_monodromy(&values, 3.0);
    let err = |n| max_entry_error(&monodromy_with(&v0, 3.0, &Resolution { steps_per_unit: n }).unwrap(), exact);
    let (e1, e2, e3) = (err(16), err(32), err(64));
    for ratio in [e1 / e2, e2 / e3] {
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn free_discriminant_is_two_cos() {
    let v0 = PeriodicPotential::free();
    for e in [0.5, 2.0, 9.0, 30.0] {
        let d = discriminant(&v0, e).unwrap();
        assert!((d - 2.0 * e.sqrt().cos()).abs() < 1e-10);
        let k = quasimomentum(&v0, e).unwrap();
        let folded = e.sqrt().cos().acos();
        assert!((k - folded).abs() < 1e-8, "E = {e}: {k} vs {folded}");
    }
}

#[test]
fn free_gamma_is_inverse_energy() {
    let v0 = PeriodicPotential::free();
    for e in [0.7, 3.0, 12.0] {
        let f = floquet_solution(&v0, e).unwrap();
        assert!((f.big_gamma - 1.0 / e).abs() < 1e-9 / e);
        assert!((f.max_gamma_prime() - e.sqrt()).abs() < 1e-8 && (f.min_gamma_prime() - e.sqrt()).abs() < 1e-8);
        assert!(f.omega_spread < 1e-10);
    }
}

#[test]
fn gamma_is_shift_invariant() {
    let base = vec![1.2, -0.4, 2.5, 0.1];
    let v0 = PeriodicPotential::new(base.clone()).unwrap();
    let mut rotated = base.clone();
    rotated.rotate_left(1);
    let v1 = PeriodicPotential::new(rotated).unwrap();
    let bands = compute_bands(&v0, 30.0).unwrap();
    for b in bands.standard.iter().filter(|b| !b.truncated) {
        let e = b.alpha + 0.37 * b.width();
        let g0 = floquet_solution(&v0, e).unwrap().big_gamma;
        let g1 = floquet_solution(&v1, e).unwrap().big_gamma;
        assert!((g0 - g1).abs() < 1e-8 * g0, "E = {e}: {g0} vs {g1}");
    }
}

#[test]
fn mathieu_opens_gaps_and_orders_bands() {
    let v0 = PeriodicPotential::cosine(2.0, 64).unwrap();
    let s = compute_bands(&v0, 60.0).unwrap();
    assert!(s.standard.len() >= 3);
    for w in s.standard.windows(2) {
        assert!(w[0].beta < w[1].alpha, "gap between {:?} and {:?}", w[0], w[1]);
        assert_eq!(w[0].kappa_beta, Some(Kappa::NonCollapsed));
    }
    for b in &s.standard {
        if let Some(d) = b.delta {
            assert!(b.contains(d));
            assert!(discriminant(&v0, d).unwrap().abs() < 1e-9);
        }
        for e in [b.alpha, b.beta].iter().filter(|_| !b.truncated) {
            assert!((discriminant(&v0, *e).unwrap().abs() - 2.0).abs() < 1e-7);
        }
    }
}

#[test]
fn free_bands_touch_at_square_multiples() {
    let s = compute_bands(&PeriodicPotential::free(), 50.0).unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    assert!(s.standard[0].alpha.abs() < 1e-9);
    for (n, b) in s.standard.iter().enumerate().filter(|(_, b)| !b.truncated) {
        assert!((b.beta - ((n + 1) as f64).powi(2) * pi2).abs() < 1e-8);
        assert_eq!(b.kappa_beta, Some(Kappa::Collapsed));
    }
    assert_eq!(s.nonstandard.len(), 1);
}

#[test]
fn edge_classification() {
    let v0 = PeriodicPotential::free();
    assert_eq!(classify_edge(&v0, 0.0).unwrap(), Kappa::NonCollapsed);
    assert_eq!(classify_edge(&v0, std::f64::consts::PI.powi(2)).unwrap(), Kappa::Collapsed);
    assert!(classify_edge(&v0, 3.0).is_err());
}

#[test]
fn envelope_is_finite_inside_a_band() {
    let v0 = PeriodicPotential::cosine(1.0, 32).unwrap();
    let b = compute_bands(&v0, 20.0).unwrap().standard[0].clone();
    let env = lemma_envelope(&v0, &b, 64).unwrap();
    assert_eq!(env.points_used, 64);
    assert!(env.max_gamma_sin2.is_finite() && env.max_gamma_sin2 > 0.0);
    assert!(env.max_inv_gamma_sin2.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn monodromy_is_unimodular(values in prop::collection::vec(-5.0f64..5.0, 1..6), e in -3.0f64..25.0) {
        let v0 = PeriodicPotential::new(values.clone()).unwrap();
        let m = monodromy(&v0, e).unwrap();
        let scale = 1.0 + m.a.abs().max(m.d.abs()).powi(2);
        prop_assert!((m.det() - 1.0).abs() < 1e-9 * scale);
        let exact = exact_monodromy(&values, e);
        prop_assert!((m.trace() - exact[0][0] - exact[1][1]).abs() < 1e-8 * scale);
    }
}

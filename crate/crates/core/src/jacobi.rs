//! Periodic Jacobi operators
//! `a_{n+1} u(n+1) + a_n u(n-1) + b_{n+1} u(n) = E u(n)` with period `q`.
//!
//! Coefficients are indexed periodically: `a_j = a[j mod q]`,
//! `b_j = b[j mod q]`. The monodromy starts at `n = 0` and maps
//! `(u(0), u(-1))` to `(u(q), u(q-1))`.

use num_complex::Complex64;
use serde::Serialize;

use crate::bands::{self, BandSearch, BandStructure, Kappa};
use crate::error::{Error, Result};
use crate::periodic::{quasimomentum_from_trace, Mat2, MonodromyMatrix, GUARD_SIN_K, MIN_OMEGA};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiPeriod {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl JacobiPeriod {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidJacobi("period must be at least 1".into()));
        }
        if a.len() != b.len() {
            return Err(Error::InvalidJacobi(format!(
                "a has {} entries but b has {}",
                a.len(),
                b.len()
            )));
        }
        if let Some(x) = a.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(Error::InvalidJacobi(format!("off-diagonal {x} is not positive")));
        }
        if let Some(x) = b.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidJacobi(format!("diagonal {x} is not finite")));
        }
        Ok(Self { a, b })
    }

    /// `a = 1`, `b = 0`: the free Jacobi matrix.
    pub fn free() -> Self {
        Self {
            a: vec![1.0],
            b: vec![0.0],
        }
    }

    pub fn period(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self, j: i64) -> f64 {
        self.a[j.rem_euclid(self.a.len() as i64) as usize]
    }

    pub fn b(&self, j: i64) -> f64 {
        self.b[j.rem_euclid(self.b.len() as i64) as usize]
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b
    }

    pub fn is_free(&self) -> bool {
        self.a.iter().all(|&x| x == 1.0) && self.b.iter().all(|&x| x == 0.0)
    }

    /// Rotates the coefficient arrays by `shift` sites.
    pub fn shifted(&self, shift: usize) -> Self {
        let q = self.period();
        Self {
            a: (0..q).map(|j| self.a[(j + shift) % q]).collect(),
            b: (0..q).map(|j| self.b[(j + shift) % q]).collect(),
        }
    }

    /// Energy window guaranteed to contain the spectrum.
    pub fn spectral_window(&self) -> (f64, f64) {
        let a_max = self.a.iter().copied().fold(0.0, f64::max);
        let b_min = self.b.iter().copied().fold(f64::INFINITY, f64::min);
        let b_max = self.b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (b_min - 2.0 * a_max - 1.0, b_max + 2.0 * a_max + 1.0)
    }
}

/// One-step transfer `(u(n), u(n-1)) -> (u(n+1), u(n))`.
pub(crate) fn step_matrix(j: &JacobiPeriod, n: i64, energy: f64) -> Mat2 {
    let an1 = j.a(n + 1);
    Mat2([[(energy - j.b(n + 1)) / an1, -j.a(n) / an1], [1.0, 0.0]])
}

pub fn jacobi_monodromy(j: &JacobiPeriod, energy: f64) -> MonodromyMatrix {
    let mut t = Mat2::IDENTITY;
    for n in 0..j.period() as i64 {
        t = step_matrix(j, n, energy).mul(&t);
    }
    MonodromyMatrix {
        energy,
        a: t.0[0][0],
        b: t.0[0][1],
        c: t.0[1][0],
        d: t.0[1][1],
    }
}

/// `Delta(E)`, the trace of the discrete monodromy.
pub fn jacobi_discriminant(j: &JacobiPeriod, energy: f64) -> f64 {
    jacobi_monodromy(j, energy).trace()
}

/// `(Delta(E), Delta'(E))`.
pub fn jacobi_discriminant_slope(j: &JacobiPeriod, energy: f64) -> (f64, f64) {
    let mut t = Mat2::IDENTITY;
    let mut dt = Mat2([[0.0; 2]; 2]);
    for n in 0..j.period() as i64 {
        let m = step_matrix(j, n, energy);
        let inv_a = 1.0 / j.a(n + 1);
        // dM/dE has a single non-zero entry, 1 / a_{n+1}, in the corner.
        let b = m.mul(&dt);
        dt = Mat2([
            [b.0[0][0] + inv_a * t.0[0][0], b.0[0][1] + inv_a * t.0[0][1]],
            [b.0[1][0], b.0[1][1]],
        ]);
        t = m.mul(&t);
    }
    (t.0[0][0] + t.0[1][1], dt.0[0][0] + dt.0[1][1])
}

/// Default search for Jacobi bands: a grid of `max(2000, 200 q)` points.
pub fn jacobi_search(j: &JacobiPeriod) -> BandSearch {
    BandSearch {
        grid_points: Some((200 * j.period()).max(2000)),
        ..BandSearch::default()
    }
}

pub fn jacobi_bands(j: &JacobiPeriod) -> Result<BandStructure> {
    jacobi_bands_with(j, &jacobi_search(j))
}

pub fn jacobi_bands_with(j: &JacobiPeriod, search: &BandSearch) -> Result<BandStructure> {
    let (lo, hi) = j.spectral_window();
    bands::assemble(
        |e| Ok(jacobi_discriminant(j, e)),
        |e| Ok(jacobi_discriminant_slope(j, e).1),
        lo,
        hi,
        search,
    )
}

pub fn jacobi_classify_edge(j: &JacobiPeriod, lambda: f64) -> Result<Kappa> {
    bands::classify_with(&|e| Ok(jacobi_discriminant(j, e)), lambda, &BandSearch::default())
}

pub fn jacobi_quasimomentum(j: &JacobiPeriod, energy: f64) -> Result<f64> {
    quasimomentum_from_trace(energy, jacobi_discriminant(j, energy))
}

/// Floquet sequence over one period and the discrete `Gamma(E)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteFloquetData {
    pub energy: f64,
    pub k: f64,
    /// Weighted Wronskian `a_{n+1}(conj(phi(n)) phi(n+1) - conj(phi(n+1)) phi(n)) = i omega`.
    pub omega: f64,
    /// `Gamma(E) = (1/q) sum_{n=1}^{q} (4 / omega^2) |phi(n)|^4`.
    pub big_gamma: f64,
    pub conjugated: bool,
    /// `phi(n + q) = exp(i * multiplier_phase) * phi(n)`.
    pub multiplier_phase: f64,
    /// `phi(0), ..., phi(q - 1)`.
    pub phi: Vec<Complex64>,
    /// Relative spread of the weighted Wronskian over `n = -1, ..., q - 1`.
    pub wronskian_spread: f64,
    /// `|phi(q) - e^{ik} phi(0)| / |phi(0)|` after one period of recursion.
    pub eigen_residual: f64,
}

impl DiscreteFloquetData {
    pub fn period(&self) -> usize {
        self.phi.len()
    }

    /// `phi(n)` for any integer `n`.
    pub fn phi_at(&self, n: i64) -> Complex64 {
        let q = self.phi.len() as i64;
        let periods = n.div_euclid(q) as f64;
        self.phi[n.rem_euclid(q) as usize] * Complex64::from_polar(1.0, periods * self.multiplier_phase)
    }

    /// Periodic part `p(n) = phi(n) exp(-i k_signed n / q)`.
    pub fn periodic_part(&self, n: i64) -> Complex64 {
        let q = self.phi.len() as f64;
        self.phi_at(n) * Complex64::from_polar(1.0, -self.multiplier_phase * n as f64 / q)
    }

    /// Discrete analogue of `gamma'`: `omega / (2 |phi(n)|^2)`.
    pub fn gamma_prime(&self, n: i64) -> f64 {
        self.omega / (2.0 * self.phi_at(n).norm_sqr())
    }
}

pub fn jacobi_floquet(j: &JacobiPeriod, energy: f64) -> Result<DiscreteFloquetData> {
    let t = jacobi_monodromy(j, energy);
    let k = quasimomentum_from_trace(energy, t.trace())?;
    if k.sin() < GUARD_SIN_K {
        return Err(Error::EdgeDegeneracy {
            energy,
            reason: format!("sin k = {:e} inside the edge guard", k.sin()),
        });
    }
    let mult = Complex64::from_polar(1.0, k);
    // (phi(0), phi(-1)) as an eigenvector of the monodromy.
    let seed0 = Complex64::new(-t.b, 0.0);
    let seed_m1 = t.a - mult;
    floquet_from_seed(j, energy, k, seed0, seed_m1)
}

fn floquet_from_seed(
    j: &JacobiPeriod,
    energy: f64,
    k: f64,
    seed0: Complex64,
    seed_m1: Complex64,
) -> Result<DiscreteFloquetData> {
    let q = j.period();
    // seq[i] = phi(i - 1), i = 0..=q+1
    let mut seq = Vec::with_capacity(q + 2);
    seq.push(seed_m1);
    seq.push(seed0);
    for n in 0..q as i64 {
        let cur = seq[n as usize + 1];
        let prev = seq[n as usize];
        let next = ((energy - j.b(n + 1)) * cur - j.a(n) * prev) / j.a(n + 1);
        seq.push(next);
    }
    let wr = |n: usize| 2.0 * j.a(n as i64) * (seq[n].conj() * seq[n + 1]).im;
    let raw: Vec<f64> = (0..=q).map(wr).collect();
    let raw_omega = raw[0];
    if raw_omega.abs() < MIN_OMEGA {
        return Err(Error::EdgeDegeneracy {
            energy,
            reason: format!("omega = {raw_omega:e}"),
        });
    }
    let (mn, mx) = raw.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &w| (a.min(w), b.max(w)));
    let omega = raw_omega.abs();

    let mult = Complex64::from_polar(1.0, k);
    let actual = seq[q + 1] / seq[1];
    let multiplier = if (actual - mult).norm() <= (actual - mult.conj()).norm() { k } else { -k };
    let eigen_residual = (seq[q + 1] - Complex64::from_polar(1.0, multiplier) * seq[1]).norm() / seq[1].norm();

    let conjugated = raw_omega < 0.0;
    let mut phi: Vec<Complex64> = seq[1..=q].to_vec();
    if conjugated {
        phi.iter_mut().for_each(|p| *p = p.conj());
    }
    let big_gamma = phi.iter().map(|p| 4.0 * p.norm_sqr().powi(2) / (omega * omega)).sum::<f64>() / q as f64;

    Ok(DiscreteFloquetData {
        energy,
        k,
        omega,
        big_gamma,
        conjugated,
        multiplier_phase: if conjugated { -multiplier } else { multiplier },
        phi,
        wronskian_spread: (mx - mn) / omega,
        eigen_residual,
    })
}

/// Same as [`jacobi_floquet`] but seeded from the eigenvector for `e^{-ik}`.
/// Used as an independent route to `Gamma`.
pub fn jacobi_floquet_conjugate_seed(j: &JacobiPeriod, energy: f64) -> Result<DiscreteFloquetData> {
    let t = jacobi_monodromy(j, energy);
    let k = quasimomentum_from_trace(energy, t.trace())?;
    let mult = Complex64::from_polar(1.0, -k);
    floquet_from_seed(j, energy, k, Complex64::new(-t.b, 0.0), t.a - mult)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_matches_finite_difference() {
        let j = JacobiPeriod::new(vec![1.0, 2.0, 0.5], vec![0.3, -0.1, 0.7]).unwrap();
        for e in [-2.0, 0.1, 1.7] {
            let (d, slope) = jacobi_discriminant_slope(&j, e);
            assert!((d - jacobi_discriminant(&j, e)).abs() < 1e-13);
            let h = 1e-6;
            let fd = (jacobi_discriminant(&j, e + h) - jacobi_discriminant(&j, e - h)) / (2.0 * h);
            assert!((slope - fd).abs() < 1e-7 * (1.0 + slope.abs()));
        }
    }

    #[test]
    fn validation() {
        assert!(JacobiPeriod::new(vec![], vec![]).is_err());
        assert!(JacobiPeriod::new(vec![1.0], vec![]).is_err());
        assert!(JacobiPeriod::new(vec![0.0], vec![0.0]).is_err());
        assert!(JacobiPeriod::new(vec![-1.0], vec![0.0]).is_err());
        assert!(JacobiPeriod::new(vec![1.0, 2.0], vec![0.0, f64::INFINITY]).is_err());
        assert!(JacobiPeriod::new(vec![1.0, 2.0], vec![0.3, -0.1]).is_ok());
    }

    #[test]
    fn free_monodromy_is_the_one_step_matrix() {
        let t = jacobi_monodromy(&JacobiPeriod::free(), 0.7);
        assert_eq!((t.a, t.b, t.c, t.d), (0.7, -1.0, 1.0, 0.0));
        assert_eq!(t.trace(), 0.7);
    }

    #[test]
    fn period_two_free_squares_to_minus_identity() {
        let j = JacobiPeriod::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        let t = jacobi_monodromy(&j, 0.0);
        assert_eq!((t.a, t.b, t.c, t.d), (-1.0, 0.0, 0.0, -1.0));
    }

    #[test]
    fn free_floquet_is_exponential() {
        let j = JacobiPeriod::free();
        for e in [-1.5, -0.3, 0.0, 1.0, 1.9] {
            let f = jacobi_floquet(&j, e).unwrap();
            let k: f64 = (e / 2.0).acos();
            assert!((f.k - k).abs() < 1e-15);
            assert!((f.omega / f.phi[0].norm_sqr() - 2.0 * k.sin()).abs() < 1e-12);
            assert!((f.big_gamma - 1.0 / k.sin().powi(2)).abs() < 1e-12);
            assert!(f.wronskian_spread < 1e-12);
            assert!(f.eigen_residual < 1e-12);
        }
        let f = jacobi_floquet(&j, 0.0).unwrap();
        assert!((f.big_gamma - 1.0).abs() < 1e-14);
    }

    #[test]
    fn floquet_rejects_outside_band() {
        assert!(matches!(
            jacobi_floquet(&JacobiPeriod::free(), 2.5),
            Err(Error::OutsideBand { .. })
        ));
    }

    #[test]
    fn periodic_part_is_periodic() {
        let j = JacobiPeriod::new(vec![1.0, 2.0, 0.5], vec![0.2, -0.4, 0.1]).unwrap();
        let bs = jacobi_bands(&j).unwrap();
        let b = &bs.standard[1];
        let f = jacobi_floquet(&j, 0.5 * (b.alpha + b.beta)).unwrap();
        for n in -3..7 {
            assert!((f.periodic_part(n) - f.periodic_part(n + 3)).norm() < 1e-10 * f.phi[0].norm());
        }
    }
}

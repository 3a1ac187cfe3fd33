//! Continuum Floquet machinery for `-u'' + V0(x) u = E u` with a 1-periodic,
//! piecewise-constant `V0`.
//!
//! The fundamental matrix is advanced with the classical fixed-step RK4
//! scheme. Inside a cell the system `y' = A y` is linear with constant
//! coefficients, so one RK4 step is the matrix polynomial
//! `I + hA + (hA)^2/2 + (hA)^3/6 + (hA)^4/24`; it is built once per cell and
//! applied `steps_per_cell` times.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bands::{self, BandSearch, BandStructure, Kappa, StandardBand};
use crate::error::{Error, Result};
use crate::numeric::{arg_ratio, simpson};

/// Energies with `sin k` below this are treated as band edges.
pub const GUARD_SIN_K: f64 = 1e-6;

/// Smallest Wronskian constant accepted for a Floquet solution.
pub const MIN_OMEGA: f64 = 1e-12;

/// A 1-periodic potential, constant on each of `m` equal cells
/// `[j/m, (j+1)/m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicPotential {
    values: Vec<f64>,
}

impl PeriodicPotential {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPotential("at least one cell is required".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential(format!("non-finite cell value {v}")));
        }
        Ok(Self { values })
    }

    /// `V0 = 0`.
    pub fn free() -> Self {
        Self { values: vec![0.0] }
    }

    /// Samples `f` at the midpoints of `cells` equal cells.
    pub fn sampled<F: Fn(f64) -> f64>(f: F, cells: usize) -> Result<Self> {
        let m = cells.max(1);
        Self::new((0..m).map(|j| f((j as f64 + 0.5) / m as f64)).collect())
    }

    /// `amplitude * cos(2 pi x)`, the Mathieu potential.
    pub fn cosine(amplitude: f64, cells: usize) -> Result<Self> {
        Self::sampled(|x| amplitude * (2.0 * PI * x).cos(), cells)
    }

    /// Builds the potential from `(position, value)` pairs. Positions must be
    /// the uniform grid `j/m`, strictly increasing in `[0, 1)`.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let m = pairs.len();
        if m == 0 {
            return Err(Error::InvalidPotential("at least one sample is required".into()));
        }
        for (j, &(x, _)) in pairs.iter().enumerate() {
            let expected = j as f64 / m as f64;
            if !(0.0..1.0).contains(&x) || (x - expected).abs() > 1e-9 {
                return Err(Error::InvalidPotential(format!(
                    "sample {j} at {x}: positions must be the uniform grid j/{m} in [0, 1)"
                )));
            }
        }
        Self::new(pairs.iter().map(|&(_, v)| v).collect())
    }

    pub fn cells(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(position, value)` pairs.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = self.values.len() as f64;
        self.values.iter().enumerate().map(move |(j, &v)| (j as f64 / m, v))
    }

    /// Value at any real `x`, extended periodically.
    pub fn value_at(&self, x: f64) -> f64 {
        let m = self.values.len();
        let t = x - x.floor();
        let j = ((t * m as f64) as usize).min(m - 1);
        self.values[j]
    }

    pub fn cell_value(&self, cell: usize) -> f64 {
        self.values[cell % self.values.len()]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn is_free(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// RK4 resolution: at least `steps_per_unit * max(1, sqrt(|E| + max|V0|))`
/// steps per period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolution {
    pub steps_per_unit: usize,
}

impl Default for Resolution {
    fn default() -> Self {
        Self { steps_per_unit: 1024 }
    }
}

/// Steps per cell are rounded up to a multiple of this, so that Simpson
/// panels and coarser Prüfer strides never straddle a cell boundary.
pub const STEP_QUANTUM: usize = 16;

/// Uniform node layout over one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PeriodGrid {
    pub cells: usize,
    pub steps_per_cell: usize,
}

impl PeriodGrid {
    pub fn for_energy(v0: &PeriodicPotential, energy: f64, res: &Resolution) -> Self {
        let scale = (energy.abs() + v0.max_abs()).sqrt().max(1.0);
        let per_unit = (res.steps_per_unit as f64 * scale).ceil() as usize;
        let m = v0.cells();
        let per_cell = per_unit.div_ceil(m).max(1).div_ceil(STEP_QUANTUM) * STEP_QUANTUM;
        Self {
            cells: m,
            steps_per_cell: per_cell,
        }
    }

    /// Nodes per period (the last node of one period is the first of the next).
    pub fn nodes(&self) -> usize {
        self.cells * self.steps_per_cell
    }

    pub fn step(&self) -> f64 {
        1.0 / self.nodes() as f64
    }
}

/// Row-major 2x2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let a = &self.0;
        [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn inverse(&self) -> Mat2 {
        let d = self.det();
        let [[a, b], [c, e]] = self.0;
        Mat2([[e / d, -b / d], [-c / d, a / d]])
    }
}

/// One RK4 step of `(u, u')' = [[0, 1], [q, 0]] (u, u')` with `q = V - E`.
pub(crate) fn rk4_step_matrix(q: f64, h: f64) -> Mat2 {
    // (hA)^2 = h^2 q I, so the series splits into even and odd parts.
    let s = h * h * q;
    let even = 1.0 + s / 2.0 + s * s / 24.0;
    let odd = h * (1.0 + s / 6.0);
    Mat2([[even, odd], [q * odd, even]])
}

/// `d/dE` of [`rk4_step_matrix`] at fixed `h`.
pub(crate) fn rk4_step_matrix_energy_derivative(q: f64, h: f64) -> Mat2 {
    let h2 = h * h;
    let s = h2 * q;
    let d_even = h2 * (0.5 + s / 12.0);
    let d_odd = h * h2 / 6.0;
    let odd = h * (1.0 + s / 6.0);
    Mat2([[-d_even, -d_odd], [-(odd + q * d_odd), -d_even]])
}

/// Transfer matrix of the periodic equation over `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonodromyMatrix {
    pub energy: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MonodromyMatrix {
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }
}

fn check_energy(energy: f64) -> Result<()> {
    if energy.is_finite() {
        Ok(())
    } else {
        Err(Error::StiffIntegration(format!("non-finite energy {energy}")))
    }
}

/// Advances the fundamental matrix across one period. With `record`, the
/// matrix at every node is returned as well (`nodes + 1` entries).
fn propagate(v0: &PeriodicPotential, energy: f64, grid: &PeriodGrid, record: bool) -> Result<(Mat2, Vec<Mat2>)> {
    let h = grid.step();
    let mut y = Mat2::IDENTITY;
    let mut trail = Vec::with_capacity(if record { grid.nodes() + 1 } else { 0 });
    if record {
        trail.push(y);
    }
    for cell in 0..grid.cells {
        let step = rk4_step_matrix(v0.cell_value(cell) - energy, h);
        for _ in 0..grid.steps_per_cell {
            y = step.mul(&y);
            if record {
                trail.push(y);
            }
        }
    }
    if !y.0.iter().flatten().all(|v| v.is_finite()) {
        return Err(Error::StiffIntegration(format!(
            "fundamental matrix overflowed at E = {energy} with step {h:e}"
        )));
    }
    Ok((y, trail))
}

pub fn monodromy(v0: &PeriodicPotential, energy: f64) -> Result<MonodromyMatrix> {
    monodromy_with(v0, energy, &Resolution::default())
}

pub fn monodromy_with(v0: &PeriodicPotential, energy: f64, res: &Resolution) -> Result<MonodromyMatrix> {
    check_energy(energy)?;
    let grid = PeriodGrid::for_energy(v0, energy, res);
    let (y, _) = propagate(v0, energy, &grid, false)?;
    Ok(MonodromyMatrix {
        energy,
        a: y.0[0][0],
        b: y.0[0][1],
        c: y.0[1][0],
        d: y.0[1][1],
    })
}

/// `D(E)`, the trace of the monodromy.
pub fn discriminant(v0: &PeriodicPotential, energy: f64) -> Result<f64> {
    Ok(monodromy(v0, energy)?.trace())
}

pub fn discriminant_with(v0: &PeriodicPotential, energy: f64, res: &Resolution) -> Result<f64> {
    Ok(monodromy_with(v0, energy, res)?.trace())
}

/// `(D(E), D'(E))`, the derivative taken through the same discrete
/// propagator so that it is exact for the computed `D`.
pub fn discriminant_slope_with(v0: &PeriodicPotential, energy: f64, res: &Resolution) -> Result<(f64, f64)> {
    check_energy(energy)?;
    let grid = PeriodGrid::for_energy(v0, energy, res);
    let h = grid.step();
    let mut y = Mat2::IDENTITY;
    let mut dy = Mat2([[0.0; 2]; 2]);
    for cell in 0..grid.cells {
        let q = v0.cell_value(cell) - energy;
        let step = rk4_step_matrix(q, h);
        let d_step = rk4_step_matrix_energy_derivative(q, h);
        for _ in 0..grid.steps_per_cell {
            let a = d_step.mul(&y);
            let b = step.mul(&dy);
            dy = Mat2([[a.0[0][0] + b.0[0][0], a.0[0][1] + b.0[0][1]], [a.0[1][0] + b.0[1][0], a.0[1][1] + b.0[1][1]]]);
            y = step.mul(&y);
        }
    }
    let (d, slope) = (y.0[0][0] + y.0[1][1], dy.0[0][0] + dy.0[1][1]);
    if !(d.is_finite() && slope.is_finite()) {
        return Err(Error::StiffIntegration(format!("fundamental matrix overflowed at E = {energy}")));
    }
    Ok((d, slope))
}

/// Bands of `V0` between `min V0 - 1` and `e_max`.
pub fn compute_bands(v0: &PeriodicPotential, e_max: f64) -> Result<BandStructure> {
    compute_bands_with(v0, e_max, &Resolution::default(), &BandSearch::default())
}

pub fn compute_bands_with(
    v0: &PeriodicPotential,
    e_max: f64,
    res: &Resolution,
    search: &BandSearch,
) -> Result<BandStructure> {
    let lo = v0.min() - 1.0;
    if !(e_max > lo) {
        return Err(Error::EmptySpectrumWindow { e_max });
    }
    bands::assemble(
        |e| discriminant_with(v0, e, res),
        |e| Ok(discriminant_slope_with(v0, e, res)?.1),
        lo,
        e_max,
        search,
    )
}

pub fn classify_edge(v0: &PeriodicPotential, lambda: f64) -> Result<Kappa> {
    classify_edge_with(v0, lambda, &Resolution::default(), &BandSearch::default())
}

pub fn classify_edge_with(v0: &PeriodicPotential, lambda: f64, res: &Resolution, search: &BandSearch) -> Result<Kappa> {
    bands::classify_with(&|e| discriminant_with(v0, e, res), lambda, search)
}

/// `k = arccos(D/2)` in `(0, pi)`.
pub fn quasimomentum(v0: &PeriodicPotential, energy: f64) -> Result<f64> {
    let d = discriminant(v0, energy)?;
    quasimomentum_from_trace(energy, d)
}

pub(crate) fn quasimomentum_from_trace(energy: f64, trace: f64) -> Result<f64> {
    if !(trace.abs() < 2.0) {
        return Err(Error::OutsideBand {
            energy,
            abs_trace: trace.abs(),
        });
    }
    Ok((trace / 2.0).acos())
}

/// Floquet solution over one period and the quantities derived from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloquetData {
    pub energy: f64,
    /// Quasimomentum in `(0, pi)`.
    pub k: f64,
    /// `W(conj(phi), phi) = i omega`, normalised positive.
    pub omega: f64,
    /// `Gamma(E) = int_0^1 (4 / omega^2) |phi|^4 dx`.
    pub big_gamma: f64,
    /// Whether `phi` was conjugated to make `omega` positive.
    pub conjugated: bool,
    /// `phi(x + 1) = exp(i * multiplier_phase) * phi(x)`.
    pub multiplier_phase: f64,
    pub grid: PeriodGrid,
    /// `phi` and `phi'` at the `nodes + 1` grid points of `[0, 1]`.
    pub phi: Vec<Complex64>,
    pub dphi: Vec<Complex64>,
    /// `gamma'(x) = omega / (2 |phi|^2)` at the nodes.
    pub gamma_prime: Vec<f64>,
    /// Continuous `arg phi` at the nodes.
    pub phase: Vec<f64>,
    /// Relative spread of `2 Im(conj(phi) phi')` over the nodes.
    pub omega_spread: f64,
    /// `|T v - e^{ik} v| / |v|` for the seed vector `v = (phi(0), phi'(0))`.
    pub eigen_residual: f64,
}

impl FloquetData {
    /// Increase of `arg phi` over one period (positive).
    pub fn phase_advance(&self) -> f64 {
        self.phase[self.grid.nodes()] - self.phase[0]
    }

    /// `phi` at global node `j`, i.e. at `x = j * step`, for any `j >= 0`.
    pub fn phi_at_node(&self, j: usize) -> Complex64 {
        let n = self.grid.nodes();
        let periods = (j / n) as f64;
        self.phi[j % n] * Complex64::from_polar(1.0, periods * self.multiplier_phase)
    }

    pub fn dphi_at_node(&self, j: usize) -> Complex64 {
        let n = self.grid.nodes();
        let periods = (j / n) as f64;
        self.dphi[j % n] * Complex64::from_polar(1.0, periods * self.multiplier_phase)
    }

    pub fn phase_at_node(&self, j: usize) -> f64 {
        let n = self.grid.nodes();
        self.phase[j % n] + (j / n) as f64 * self.phase_advance()
    }

    pub fn gamma_prime_at_node(&self, j: usize) -> f64 {
        self.gamma_prime[j % self.grid.nodes()]
    }

    pub fn min_gamma_prime(&self) -> f64 {
        self.gamma_prime.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_gamma_prime(&self) -> f64 {
        self.gamma_prime.iter().copied().fold(0.0, f64::max)
    }
}

pub fn floquet_solution(v0: &PeriodicPotential, energy: f64) -> Result<FloquetData> {
    floquet_solution_with(v0, energy, &Resolution::default())
}

pub fn floquet_solution_with(v0: &PeriodicPotential, energy: f64, res: &Resolution) -> Result<FloquetData> {
    check_energy(energy)?;
    let grid = PeriodGrid::for_energy(v0, energy, res);
    let (t, trail) = propagate(v0, energy, &grid, true)?;
    let [[a, b], [c, d]] = t.0;
    let k = quasimomentum_from_trace(energy, a + d)?;
    if k.sin() < GUARD_SIN_K {
        return Err(Error::EdgeDegeneracy {
            energy,
            reason: format!("sin k = {:e} inside the edge guard", k.sin()),
        });
    }
    let mult = Complex64::from_polar(1.0, k);
    let seed = [Complex64::new(-b, 0.0), a - mult];

    let tv = [a * seed[0] + b * seed[1], c * seed[0] + d * seed[1]];
    let norm = (seed[0].norm_sqr() + seed[1].norm_sqr()).sqrt();
    let eigen_residual = ((tv[0] - mult * seed[0]).norm_sqr() + (tv[1] - mult * seed[1]).norm_sqr()).sqrt() / norm;

    let raw_omega = 2.0 * b * k.sin();
    if raw_omega.abs() < MIN_OMEGA {
        return Err(Error::EdgeDegeneracy {
            energy,
            reason: format!("omega = {raw_omega:e}"),
        });
    }
    let conjugated = raw_omega < 0.0;
    let omega = raw_omega.abs();

    let mut phi = Vec::with_capacity(trail.len());
    let mut dphi = Vec::with_capacity(trail.len());
    for y in &trail {
        let [[u1, u2], [du1, du2]] = y.0;
        let mut p = seed[0] * u1 + seed[1] * u2;
        let mut dp = seed[0] * du1 + seed[1] * du2;
        if conjugated {
            p = p.conj();
            dp = dp.conj();
        }
        phi.push(p);
        dphi.push(dp);
    }

    let (mut w_min, mut w_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (p, dp) in phi.iter().zip(&dphi) {
        let w = 2.0 * (p.conj() * dp).im;
        w_min = w_min.min(w);
        w_max = w_max.max(w);
    }
    let omega_spread = (w_max - w_min) / omega;

    let gamma_prime: Vec<f64> = phi.iter().map(|p| omega / (2.0 * p.norm_sqr())).collect();
    let integrand: Vec<f64> = gamma_prime.iter().map(|g| 1.0 / (g * g)).collect();
    let big_gamma = simpson(&integrand, grid.step());

    let mut phase = Vec::with_capacity(phi.len());
    phase.push(phi[0].arg());
    for w in phi.windows(2) {
        let last = *phase.last().unwrap();
        phase.push(last + arg_ratio(w[1], w[0]));
    }

    Ok(FloquetData {
        energy,
        k,
        omega,
        big_gamma,
        conjugated,
        multiplier_phase: if conjugated { -k } else { k },
        grid,
        phi,
        dphi,
        gamma_prime,
        phase,
        omega_spread,
        eigen_residual,
    })
}

/// Extremes of `Gamma sin^2 k` and its reciprocal over an interior grid of
/// one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub points_used: usize,
    /// `max Gamma(E) sin^2 k(E)`; bounded on every band.
    pub max_gamma_sin2: f64,
    /// `max 1 / (Gamma(E) sin^2 k(E))`; bounded when both edges are open.
    pub max_inv_gamma_sin2: f64,
}

/// Samples the band at `points` cell midpoints `alpha + (j + 1/2) w / points`.
pub fn lemma_envelope(v0: &PeriodicPotential, band: &StandardBand, points: usize) -> Result<Envelope> {
    let w = band.width();
    let samples: Vec<Option<f64>> = (0..points)
        .into_par_iter()
        .map(|j| {
            let e = band.alpha + w * (j as f64 + 0.5) / points as f64;
            match floquet_solution(v0, e) {
                Ok(f) => Ok(Some(f.big_gamma * f.k.sin().powi(2))),
                Err(Error::EdgeDegeneracy { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let used: Vec<f64> = samples.into_iter().flatten().collect();
    Ok(Envelope {
        points_used: used.len(),
        max_gamma_sin2: used.iter().copied().fold(0.0, f64::max),
        max_inv_gamma_sin2: used.iter().map(|g| 1.0 / g).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_matches_finite_difference() {
        let v0 = PeriodicPotential::cosine(1.5, 16).unwrap();
        for e in [-0.5, 3.0, 12.0] {
            let (d, slope) = discriminant_slope_with(&v0, e, &Resolution::default()).unwrap();
            assert!((d - discriminant(&v0, e).unwrap()).abs() < 1e-14 * (1.0 + d.abs()));
            let h = 1e-5;
            let fd = (discriminant(&v0, e + h).unwrap() - discriminant(&v0, e - h).unwrap()) / (2.0 * h);
            assert!((slope - fd).abs() < 1e-6 * (1.0 + slope.abs()), "E = {e}: {slope} vs {fd}");
        }
    }

    fn free_closed_form(e: f64) -> [f64; 4] {
        let s = e.sqrt();
        [s.cos(), s.sin() / s, -s * s.sin(), s.cos()]
    }

    #[test]
    fn free_monodromy_matches_closed_form() {
        let v0 = PeriodicPotential::free();
        for e in [PI * PI, PI * PI / 4.0, 2.5, 30.0] {
            let t = monodromy(&v0, e).unwrap();
            let [a, b, c, d] = free_closed_form(e);
            assert!((t.a - a).abs() < 1e-10, "a at {e}");
            assert!((t.b - b).abs() < 1e-10, "b at {e}");
            assert!((t.c - c).abs() < 1e-9, "c at {e}");
            assert!((t.d - d).abs() < 1e-10, "d at {e}");
            assert!((t.det() - 1.0).abs() < 1e-9);
        }
        let t = monodromy(&v0, PI * PI).unwrap();
        assert!((t.trace() + 2.0).abs() < 1e-10);
        let t = monodromy(&v0, PI * PI / 4.0).unwrap();
        assert!(t.a.abs() < 1e-10 && (t.b - 2.0 / PI).abs() < 1e-10 && (t.c + PI / 2.0).abs() < 1e-9);
    }

    #[test]
    fn free_discriminant_at_zero_is_two() {
        assert_eq!(discriminant(&PeriodicPotential::free(), 0.0).unwrap(), 2.0);
    }

    #[test]
    fn rk4_step_matrix_matches_taylor_series() {
        let (q, h) = (-3.7, 0.01);
        let a = Mat2([[0.0, h], [q * h, 0.0]]);
        let a2 = a.mul(&a);
        let a3 = a2.mul(&a);
        let a4 = a3.mul(&a);
        let mut expect = Mat2::IDENTITY;
        for (m, c) in [(a, 1.0), (a2, 0.5), (a3, 1.0 / 6.0), (a4, 1.0 / 24.0)] {
            for i in 0..2 {
                for j in 0..2 {
                    expect.0[i][j] += c * m.0[i][j];
                }
            }
        }
        let got = rk4_step_matrix(q, h);
        for i in 0..2 {
            for j in 0..2 {
                assert!((got.0[i][j] - expect.0[i][j]).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn quasimomentum_of_free_band() {
        let v0 = PeriodicPotential::free();
        assert!((quasimomentum(&v0, PI * PI / 4.0).unwrap() - PI / 2.0).abs() < 1e-10);
        for e in [0.3, 2.0, 7.5] {
            assert!((quasimomentum(&v0, e).unwrap() - e.sqrt()).abs() < 1e-9);
        }
        assert!(matches!(quasimomentum(&v0, -1.0), Err(Error::OutsideBand { .. })));
    }

    #[test]
    fn free_floquet_solution_is_a_plane_wave() {
        let v0 = PeriodicPotential::free();
        for e in [0.5, 4.0, 20.0] {
            let f = floquet_solution(&v0, e).unwrap();
            assert!((f.big_gamma - 1.0 / e).abs() < 1e-9, "Gamma at {e}");
            for g in &f.gamma_prime {
                assert!((g - e.sqrt()).abs() < 1e-8);
            }
            assert!(f.omega > 0.0);
            assert!(f.omega_spread < 1e-8);
            assert!(f.eigen_residual < 1e-8);
            assert!((f.phase_advance() - e.sqrt()).abs() < 1e-8);
        }
        // Second band: b < 0 so the solution is conjugated.
        let f = floquet_solution(&v0, 20.0).unwrap();
        assert!(f.conjugated);
    }

    #[test]
    fn floquet_rejects_gap_and_edge_energies() {
        let v0 = PeriodicPotential::cosine(2.0, 64).unwrap();
        assert!(matches!(floquet_solution(&v0, -5.0), Err(Error::OutsideBand { .. })));
        let free = PeriodicPotential::free();
        assert!(matches!(
            floquet_solution(&free, PI * PI * (1.0 - 1e-14)),
            Err(Error::EdgeDegeneracy { .. }) | Err(Error::OutsideBand { .. })
        ));
    }

    #[test]
    fn potential_validation() {
        assert!(PeriodicPotential::new(vec![]).is_err());
        assert!(PeriodicPotential::new(vec![1.0, f64::NAN]).is_err());
        assert!(PeriodicPotential::from_pairs(&[(0.0, 1.0), (0.5, 2.0)]).is_ok());
        assert!(PeriodicPotential::from_pairs(&[(0.0, 1.0), (0.4, 2.0)]).is_err());
        assert!(PeriodicPotential::from_pairs(&[(0.5, 1.0)]).is_err());
        let v = PeriodicPotential::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(v.value_at(0.25), 1.0);
        assert_eq!(v.value_at(1.75), 2.0);
        assert_eq!(v.value_at(-0.25), 2.0);
    }
}

//! Generalized Prüfer variables relative to the Floquet frame.
//!
//! A real solution `u` of the perturbed equation is written as
//! `u = Im(c phi)` with a slowly varying complex coefficient `c`
//! (variation of parameters). `R = |c|` and `theta = arg c + arg phi`.
//!
//! Continuum: `(ln R)' = V sin(2 theta) / (2 gamma')` and
//! `theta' = gamma' - (V / gamma') sin^2 theta`; both are integrated with
//! RK4 on a stride of the Floquet grid so that every stage lands on a node
//! where `gamma'` is known exactly.
//!
//! Discrete: `u` is propagated by the recursion itself, `c` is read off the
//! weighted Wronskian with `conj(phi)`, and the one-step identity
//! `R(n+1)^2 / R(n)^2 = 1 - V(n+1) (2/omega) sin(2 theta(n)) |phi(n)|^2 +
//! 4 V(n+1)^2 |phi(n)|^4 sin^2(theta(n)) / omega^2`
//! is checked at every step.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jacobi::{jacobi_floquet, DiscreteFloquetData, JacobiPeriod};
use crate::numeric::{arg_ratio, fit_line, LineFit};
use crate::periodic::{floquet_solution_with, FloquetData, PeriodicPotential, Resolution};
use crate::perturbation::Perturbation;

/// Where a trajectory starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InitialCondition {
    /// `R(0) = 1` and the given Prüfer angle.
    Angle(f64),
    /// Continuum `(u(0), u'(0))`; discrete `(u(-1), u(0))`.
    Values(f64, f64),
}

impl InitialCondition {
    /// The resonant angle when `v` was built for `energy`, else `(1, 0)`.
    pub fn for_perturbation(v: &Perturbation, energy: f64) -> Self {
        match v.resonance {
            Some(r) if r.energy == energy => InitialCondition::Angle(r.theta0),
            _ => InitialCondition::Values(1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PruferOptions {
    /// Floquet nodes per RK4 half-step; must divide half the steps per cell.
    pub stride: usize,
    /// Trajectory samples per unit length (continuum) or per site stride
    /// (discrete: one sample every `discrete_record_every` sites).
    pub samples_per_unit: usize,
    pub discrete_record_every: usize,
    /// Exponent fits use `[fit_start_fraction * x_max, x_max]`.
    pub fit_start_fraction: f64,
    /// Discrete runs rescale `u` every this many steps.
    pub renormalize_every: usize,
    pub resolution: Resolution,
}

impl Default for PruferOptions {
    fn default() -> Self {
        Self {
            stride: 8,
            samples_per_unit: 4,
            discrete_record_every: 1,
            fit_start_fraction: 0.1,
            renormalize_every: 1000,
            resolution: Resolution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PruferTrajectory {
    pub energy: f64,
    pub discrete: bool,
    /// Positions `x` or site indices `n`.
    pub grid: Vec<f64>,
    /// `ln R - ln R(0)`.
    pub ln_r: Vec<f64>,
    /// Unwrapped Prüfer angle.
    pub theta: Vec<f64>,
    /// `arg phi` at the sample points, so that `c = R e^{i (theta - frame_phase)}`.
    pub frame_phase: Vec<f64>,
    /// `R(0)` in the normalisation of the Floquet solution.
    pub r0: f64,
    /// Least-squares slope of `ln R` against `ln(1 + x)` over the tail.
    pub exponent_fit: Option<LineFit>,
    /// Largest relative residual of the one-step ratio identity (discrete only).
    pub identity_residual: Option<f64>,
}

impl PruferTrajectory {
    /// Refits the exponent on `[start, end]`.
    pub fn fit_exponent(&self, start: f64) -> Option<LineFit> {
        fit_tail(&self.grid, &self.ln_r, start)
    }

    /// The complex Floquet coefficient at sample `i`.
    pub fn coefficient(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.r0 * self.ln_r[i].exp(), self.theta[i] - self.frame_phase[i])
    }

    pub fn last_ln_r(&self) -> f64 {
        *self.ln_r.last().unwrap_or(&0.0)
    }

    pub fn x_max(&self) -> f64 {
        *self.grid.last().unwrap_or(&0.0)
    }
}

pub(crate) fn fit_tail(grid: &[f64], values: &[f64], start: f64) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = grid
        .iter()
        .zip(values)
        .filter(|(x, _)| **x >= start)
        .map(|(x, y)| ((1.0 + x).ln(), *y))
        .unzip();
    fit_line(&xs, &ys)
}

fn check_window(v: &Perturbation, reach: f64, min: f64, what: &str) -> Result<()> {
    if !(reach >= min) {
        return Err(Error::InvalidPerturbation(format!("{what} = {reach} is below {min}")));
    }
    if !v.is_zero() && reach > v.extent() * (1.0 + 1e-12) {
        return Err(Error::InvalidPerturbation(format!(
            "{what} = {reach} exceeds the perturbation window {}",
            v.extent()
        )));
    }
    Ok(())
}

/// Stride-aligned stepping plan over the Floquet grid.
struct ContinuumPlan {
    nodes_per_period: usize,
    stride: usize,
    steps: usize,
    record_every: usize,
    h: f64,
}

impl ContinuumPlan {
    fn new(fl: &FloquetData, x_max: f64, opts: &PruferOptions) -> Result<Self> {
        let s = opts.stride.max(1);
        if fl.grid.steps_per_cell % (2 * s) != 0 {
            return Err(Error::StiffIntegration(format!(
                "stride {s} does not divide {} steps per cell",
                fl.grid.steps_per_cell
            )));
        }
        let n = fl.grid.nodes();
        let steps_per_unit = n / (2 * s);
        let steps = (x_max * steps_per_unit as f64).ceil() as usize;
        Ok(Self {
            nodes_per_period: n,
            stride: s,
            steps,
            record_every: (steps_per_unit / opts.samples_per_unit.max(1)).max(1),
            h: (2 * s) as f64 / n as f64,
        })
    }

    fn x(&self, node: usize) -> f64 {
        node as f64 / self.nodes_per_period as f64
    }
}

/// `c(0) = 2 W(conj(phi), u)(0) / omega` for the requested initial data.
fn continuum_initial(fl: &FloquetData, init: InitialCondition) -> (Complex64, f64) {
    match init {
        InitialCondition::Angle(theta0) => {
            let c = Complex64::from_polar(1.0, theta0 - fl.phase[0]);
            (c, theta0)
        }
        InitialCondition::Values(u, du) => {
            let c = (fl.phi[0].conj() * du - fl.dphi[0].conj() * u) * (2.0 / fl.omega);
            (c, c.arg() + fl.phase[0])
        }
    }
}

pub fn prufer_integrate_continuum(
    v0: &PeriodicPotential,
    v: &Perturbation,
    energy: f64,
    x_max: f64,
    init: InitialCondition,
) -> Result<PruferTrajectory> {
    prufer_integrate_continuum_with(v0, v, energy, x_max, init, &PruferOptions::default())
}

pub fn prufer_integrate_continuum_with(
    v0: &PeriodicPotential,
    v: &Perturbation,
    energy: f64,
    x_max: f64,
    init: InitialCondition,
    opts: &PruferOptions,
) -> Result<PruferTrajectory> {
    if v.is_discrete() {
        return Err(Error::InvalidPerturbation("discrete perturbation passed to the continuum engine".into()));
    }
    check_window(v, x_max, 10.0, "x_max")?;
    let fl = floquet_solution_with(v0, energy, &opts.resolution)?;
    integrate_on_frame(&fl, v, x_max, init, opts)
}

pub(crate) fn integrate_on_frame(
    fl: &FloquetData,
    v: &Perturbation,
    x_max: f64,
    init: InitialCondition,
    opts: &PruferOptions,
) -> Result<PruferTrajectory> {
    let plan = ContinuumPlan::new(fl, x_max, opts)?;
    let (c0, theta0) = continuum_initial(fl, init);
    let s = plan.stride;
    let h = plan.h;
    let zero = v.is_zero();

    let rhs = |node: usize, theta: f64| -> (f64, f64) {
        let g = fl.gamma_prime_at_node(node);
        if zero {
            return (0.0, g);
        }
        let pot = v.at(plan.x(node));
        let (sn, cs) = theta.sin_cos();
        (pot * sn * cs / g, g - pot / g * sn * sn)
    };

    let cap = plan.steps / plan.record_every + 2;
    let mut out = PruferTrajectory {
        energy: fl.energy,
        discrete: false,
        grid: Vec::with_capacity(cap),
        ln_r: Vec::with_capacity(cap),
        theta: Vec::with_capacity(cap),
        frame_phase: Vec::with_capacity(cap),
        r0: c0.norm(),
        exponent_fit: None,
        identity_residual: None,
    };
    let (mut ln_r, mut theta) = (0.0, theta0);
    let mut record = |node: usize, ln_r: f64, theta: f64| {
        out.grid.push(plan.x(node));
        out.ln_r.push(ln_r);
        out.theta.push(theta);
        out.frame_phase.push(fl.phase_at_node(node));
    };
    record(0, ln_r, theta);
    for step in 0..plan.steps {
        let j = step * 2 * s;
        let (l1, t1) = rhs(j, theta);
        let (l2, t2) = rhs(j + s, theta + 0.5 * h * t1);
        let (l3, t3) = rhs(j + s, theta + 0.5 * h * t2);
        let (l4, t4) = rhs(j + 2 * s, theta + h * t3);
        ln_r += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        theta += h / 6.0 * (t1 + 2.0 * t2 + 2.0 * t3 + t4);
        if (step + 1) % plan.record_every == 0 || step + 1 == plan.steps {
            record(j + 2 * s, ln_r, theta);
        }
    }
    if !(ln_r.is_finite() && theta.is_finite()) {
        return Err(Error::StiffIntegration(format!("Prüfer variables diverged at E = {}", fl.energy)));
    }
    let end = *out.grid.last().unwrap();
    out.exponent_fit = out.fit_exponent(opts.fit_start_fraction * end);
    Ok(out)
}

/// Direct RK4 solution of `-u'' + (V0 + V) u = E u` on the same nodes as
/// the Prüfer run, with `c~ = 2 W(conj(phi), u) / omega` read off at each
/// sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectSolution {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub coefficient: Vec<Complex64>,
}

pub(crate) fn direct_solve_on_frame(
    v0: &PeriodicPotential,
    fl: &FloquetData,
    v: &Perturbation,
    x_max: f64,
    u0: (f64, f64),
    opts: &PruferOptions,
) -> Result<DirectSolution> {
    let plan = ContinuumPlan::new(fl, x_max, opts)?;
    let s = plan.stride;
    let h = plan.h;
    let spc = fl.grid.steps_per_cell;
    let m = fl.grid.cells;
    let e = fl.energy;
    let coeff = |node: usize, u: f64, du: f64| (fl.phi_at_node(node).conj() * du - fl.dphi_at_node(node).conj() * u) * (2.0 / fl.omega);

    let mut out = DirectSolution {
        grid: vec![0.0],
        u: vec![u0.0],
        du: vec![u0.1],
        coefficient: vec![coeff(0, u0.0, u0.1)],
    };
    let (mut u, mut du) = u0;
    for step in 0..plan.steps {
        let j = step * 2 * s;
        let base = v0.cell_value((j / spc) % m) - e;
        let q = |node: usize| base + v.at(plan.x(node));
        let (q0, qh, q1) = (q(j), q(j + s), q(j + 2 * s));
        let (a1, b1) = (du, q0 * u);
        let (a2, b2) = (du + 0.5 * h * b1, qh * (u + 0.5 * h * a1));
        let (a3, b3) = (du + 0.5 * h * b2, qh * (u + 0.5 * h * a2));
        let (a4, b4) = (du + h * b3, q1 * (u + h * a3));
        u += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        du += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        if (step + 1) % plan.record_every == 0 || step + 1 == plan.steps {
            let node = j + 2 * s;
            out.grid.push(plan.x(node));
            out.u.push(u);
            out.du.push(du);
            out.coefficient.push(coeff(node, u, du));
        }
    }
    if !(u.is_finite() && du.is_finite()) {
        return Err(Error::StiffIntegration(format!("direct solution overflowed at E = {e}")));
    }
    Ok(out)
}

/// Agreement between the Prüfer ODE and a direct solve of the same solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossValidation {
    pub energy: f64,
    pub x_max: f64,
    /// Mean of `ln R~ - ln R` over the samples.
    pub offset: f64,
    /// `max |ln R~ - ln R - offset|`.
    pub max_deviation: f64,
    /// Extremes of `R^2 / (u^2 + u'^2)`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Smallest `C` with `1/C <= R^2 / (u^2 + u'^2) <= C`.
    pub sandwich_c: f64,
    pub prufer_exponent: f64,
    /// Slope of `ln sqrt(u^2 + u'^2)` against `ln(1 + x)` over the tail.
    pub direct_exponent: f64,
}

impl CrossValidation {
    pub fn consistent(&self) -> bool {
        self.max_deviation < 0.05
    }
}

pub fn crossvalidate_continuum(
    v0: &PeriodicPotential,
    v: &Perturbation,
    energy: f64,
    x_max: f64,
    init: InitialCondition,
) -> Result<CrossValidation> {
    crossvalidate_continuum_with(v0, v, energy, x_max, init, &PruferOptions::default())
}

pub fn crossvalidate_continuum_with(
    v0: &PeriodicPotential,
    v: &Perturbation,
    energy: f64,
    x_max: f64,
    init: InitialCondition,
    opts: &PruferOptions,
) -> Result<CrossValidation> {
    if v.is_discrete() {
        return Err(Error::InvalidPerturbation("discrete perturbation passed to the continuum engine".into()));
    }
    check_window(v, x_max, 10.0, "x_max")?;
    let fl = floquet_solution_with(v0, energy, &opts.resolution)?;
    let traj = integrate_on_frame(&fl, v, x_max, init, opts)?;
    let u0 = match init {
        InitialCondition::Values(u, du) => (u, du),
        InitialCondition::Angle(theta0) => {
            let c = Complex64::from_polar(1.0, theta0 - fl.phase[0]);
            ((c * fl.phi[0]).im, (c * fl.dphi[0]).im)
        }
    };
    let direct = direct_solve_on_frame(v0, &fl, v, x_max, u0, opts)?;
    let n = traj.grid.len().min(direct.grid.len());
    let ln_r0 = direct.coefficient[0].norm().ln();
    let diffs: Vec<f64> = (0..n)
        .map(|i| direct.coefficient[i].norm().ln() - ln_r0 - traj.ln_r[i])
        .collect();
    let offset = diffs.iter().sum::<f64>() / n as f64;
    let max_deviation = diffs.iter().map(|d| (d - offset).abs()).fold(0.0, f64::max);

    let (mut ratio_min, mut ratio_max) = (f64::INFINITY, 0.0f64);
    let mut env = Vec::with_capacity(n);
    for i in 0..n {
        let r = traj.r0 * traj.ln_r[i].exp();
        let norm2 = direct.u[i] * direct.u[i] + direct.du[i] * direct.du[i];
        let ratio = r * r / norm2;
        ratio_min = ratio_min.min(ratio);
        ratio_max = ratio_max.max(ratio);
        env.push(0.5 * norm2.ln());
    }
    let start = opts.fit_start_fraction * traj.x_max();
    let direct_fit = fit_tail(&direct.grid[..n], &env, start);
    Ok(CrossValidation {
        energy,
        x_max,
        offset,
        max_deviation,
        ratio_min,
        ratio_max,
        sandwich_c: ratio_max.max(1.0 / ratio_min),
        prufer_exponent: traj.exponent_fit.map_or(f64::NAN, |f| f.slope),
        direct_exponent: direct_fit.map_or(f64::NAN, |f| f.slope),
    })
}

pub fn prufer_extract_discrete(
    j: &JacobiPeriod,
    v: &Perturbation,
    energy: f64,
    n_max: usize,
    init: InitialCondition,
) -> Result<PruferTrajectory> {
    prufer_extract_discrete_with(j, v, energy, n_max, init, &PruferOptions::default())
}

pub fn prufer_extract_discrete_with(
    j: &JacobiPeriod,
    v: &Perturbation,
    energy: f64,
    n_max: usize,
    init: InitialCondition,
    opts: &PruferOptions,
) -> Result<PruferTrajectory> {
    if !v.is_discrete() && !v.is_zero() {
        return Err(Error::InvalidPerturbation("continuum perturbation passed to the discrete engine".into()));
    }
    check_window(v, n_max as f64, 10.0, "n_max")?;
    let fl = jacobi_floquet(j, energy)?;
    run_discrete(j, &fl, n_max, init, opts, |n, _, _| v.site(n))
}

/// `c(n-1)` from the pair `(u(n-1), u(n))`.
/// `c` at site `n` from `(u(n-1), u(n))` and `(phi(n-1), phi(n))`.
fn discrete_coefficient(a_n: f64, omega: f64, phi: (Complex64, Complex64), u: (f64, f64)) -> Complex64 {
    (phi.0.conj() * u.1 - phi.1.conj() * u.0) * (2.0 * a_n / omega)
}

/// Shared discrete loop. `potential(n + 1, theta(n), gamma'(n))` supplies
/// `V(n + 1)`, which lets the resonant construction feed the current angle
/// back in.
///
/// `phi` is advanced by the same recursion as `u` (with `V = 0`) instead of
/// being extended periodically: `2 cos k` and `E` differ in the last bit, and
/// the periodic extension would turn that into a drift of `c` linear in `n`.
pub(crate) fn run_discrete<P>(
    j: &JacobiPeriod,
    fl: &DiscreteFloquetData,
    n_max: usize,
    init: InitialCondition,
    opts: &PruferOptions,
    mut potential: P,
) -> Result<PruferTrajectory>
where
    P: FnMut(usize, f64, f64) -> f64,
{
    let omega = fl.omega;
    let energy = fl.energy;
    let (mut phi_prev, mut phi_cur) = (fl.phi_at(-1), fl.phi_at(0));
    let (mut u_prev, mut u_cur) = match init {
        InitialCondition::Values(a, b) => (a, b),
        InitialCondition::Angle(theta0) => {
            let c = Complex64::from_polar(1.0, theta0 - phi_cur.arg());
            ((c * phi_prev).im, (c * phi_cur).im)
        }
    };
    let mut c = discrete_coefficient(j.a(0), omega, (phi_prev, phi_cur), (u_prev, u_cur));
    if c.norm() == 0.0 {
        return Err(Error::InvalidPerturbation("initial data is the zero solution".into()));
    }
    let every = opts.discrete_record_every.max(1);
    let cap = n_max / every + 2;
    let mut out = PruferTrajectory {
        energy,
        discrete: true,
        grid: Vec::with_capacity(cap),
        ln_r: Vec::with_capacity(cap),
        theta: Vec::with_capacity(cap),
        frame_phase: Vec::with_capacity(cap),
        r0: c.norm(),
        exponent_fit: None,
        identity_residual: None,
    };
    let mut frame = phi_cur.arg();
    let mut theta = c.arg() + frame;
    let mut ln_r = 0.0;
    let ln_r0 = c.norm().ln();
    let mut ln_scale = 0.0;
    let mut worst: f64 = 0.0;
    let renorm = opts.renormalize_every.max(1);

    out.grid.push(0.0);
    out.ln_r.push(0.0);
    out.theta.push(theta);
    out.frame_phase.push(frame);
    for n in 0..n_max {
        let ni = n as i64;
        let (a_n, a_next, b_next) = (j.a(ni), j.a(ni + 1), j.b(ni + 1));
        let mod2 = phi_cur.norm_sqr();
        let pot = potential(n + 1, theta, omega / (2.0 * mod2));
        let u_next = ((energy - b_next - pot) * u_cur - a_n * u_prev) / a_next;
        let phi_next = ((energy - b_next) * phi_cur - phi_prev * a_n) / a_next;
        let c_next = discrete_coefficient(a_next, omega, (phi_cur, phi_next), (u_cur, u_next));

        let lhs = c_next.norm_sqr() / c.norm_sqr();
        let (sn, cs) = theta.sin_cos();
        let rhs = 1.0 - pot * (2.0 / omega) * (2.0 * sn * cs) * mod2 + 4.0 * pot * pot * mod2 * mod2 * sn * sn / (omega * omega);
        worst = worst.max((lhs / rhs - 1.0).abs());

        let dframe = arg_ratio(phi_next, phi_cur);
        theta += arg_ratio(c_next, c) + dframe;
        frame += dframe;
        u_prev = u_cur;
        u_cur = u_next;
        phi_prev = phi_cur;
        phi_cur = phi_next;
        c = c_next;
        if (n + 1) % renorm == 0 {
            let scale = u_prev.abs().max(u_cur.abs());
            if scale > 0.0 {
                u_prev /= scale;
                u_cur /= scale;
                c /= scale;
                ln_scale += scale.ln();
            }
        }
        // Read off |c| directly rather than summing step ratios, so that
        // rounding does not random-walk into ln R.
        ln_r = c.norm().ln() + ln_scale - ln_r0;
        if (n + 1) % every == 0 || n + 1 == n_max {
            out.grid.push((n + 1) as f64);
            out.ln_r.push(ln_r);
            out.theta.push(theta);
            out.frame_phase.push(frame);
        }
    }
    if !ln_r.is_finite() {
        return Err(Error::StiffIntegration(format!("discrete Prüfer amplitude diverged at E = {energy}")));
    }
    out.identity_residual = Some(worst);
    out.exponent_fit = out.fit_exponent(opts.fit_start_fraction * n_max as f64);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_perturbation_keeps_amplitude_fixed() {
        let v0 = PeriodicPotential::free();
        let v = Perturbation::zero_continuum(50.0);
        let t = prufer_integrate_continuum(&v0, &v, 2.0, 50.0, InitialCondition::Values(1.0, 0.0)).unwrap();
        assert!(t.ln_r.iter().all(|&l| l == 0.0));
        // theta - arg phi stays constant.
        let eta0 = t.theta[0] - t.frame_phase[0];
        for i in 0..t.grid.len() {
            assert!((t.theta[i] - t.frame_phase[i] - eta0).abs() < 1e-8);
        }
    }

    #[test]
    fn stride_must_fit_the_cell() {
        let v0 = PeriodicPotential::free();
        let v = Perturbation::zero_continuum(20.0);
        let opts = PruferOptions {
            stride: 3,
            ..PruferOptions::default()
        };
        let err = prufer_integrate_continuum_with(&v0, &v, 1.0, 20.0, InitialCondition::Angle(0.0), &opts).unwrap_err();
        assert!(matches!(err, Error::StiffIntegration(_)));
    }

    #[test]
    fn window_checks() {
        let v0 = PeriodicPotential::free();
        let v = Perturbation::continuum_from_fn(|x| 1.0 / (1.0 + x).powi(2), 0.01, 20.0).unwrap();
        assert!(prufer_integrate_continuum(&v0, &v, 1.0, 5.0, InitialCondition::Angle(0.0)).is_err());
        assert!(prufer_integrate_continuum(&v0, &v, 1.0, 40.0, InitialCondition::Angle(0.0)).is_err());
        assert!(prufer_integrate_continuum(&v0, &v, 20.0, 20.0, InitialCondition::Angle(0.0)).is_ok());
        let d = Perturbation::zero_discrete(100);
        assert!(prufer_integrate_continuum(&v0, &d, 1.0, 20.0, InitialCondition::Angle(0.0)).is_err());
    }

    #[test]
    fn discrete_zero_perturbation_has_constant_amplitude() {
        let j = JacobiPeriod::new(vec![1.0, 1.5], vec![0.3, -0.2]).unwrap();
        let bs = crate::jacobi::jacobi_bands(&j).unwrap();
        let b = &bs.standard[0];
        let e = b.alpha + 0.37 * b.width();
        let t = prufer_extract_discrete(&j, &Perturbation::zero_discrete(5000), e, 5000, InitialCondition::Values(1.0, 0.0)).unwrap();
        assert!(t.ln_r.iter().all(|l| l.abs() < 1e-12));
        assert!(t.identity_residual.unwrap() < 1e-12);
    }
}

//! Band assembly from a discriminant `D(E)`.
//!
//! Both the continuum Hill operator and the periodic Jacobi operator expose
//! the trace of their one-period monodromy; everything else here (edge
//! bracketing, tangency detection, κ classification, δ points, merging into
//! non-standard bands) only sees `D` as a scalar function of the energy.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{bisect, golden_min};

/// Edge multiplicity class: `1` where the neighbouring gap is open, `2`
/// where it has collapsed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kappa {
    NonCollapsed,
    Collapsed,
}

impl Kappa {
    pub fn value(self) -> u8 {
        match self {
            Kappa::NonCollapsed => 1,
            Kappa::Collapsed => 2,
        }
    }
}

/// Which half of a band an energy sits in, relative to the point where the
/// quasimomentum equals π/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    BelowDelta,
    AboveDelta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StandardBand {
    pub alpha: f64,
    pub beta: f64,
    pub kappa_alpha: Kappa,
    /// `None` when the band runs into the scan ceiling.
    pub kappa_beta: Option<Kappa>,
    /// Root of `D(E) = 0` inside the band; `None` if it lies above the
    /// scan ceiling of a truncated band.
    pub delta: Option<f64>,
    pub truncated: bool,
}

impl StandardBand {
    /// Strict interior membership.
    pub fn contains(&self, energy: f64) -> bool {
        energy > self.alpha && energy < self.beta
    }

    pub fn side(&self, energy: f64) -> Side {
        match self.delta {
            Some(d) if energy > d => Side::AboveDelta,
            _ => Side::BelowDelta,
        }
    }

    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonStandardBand {
    pub alpha: f64,
    pub beta: f64,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    pub standard: Vec<StandardBand>,
    pub nonstandard: Vec<NonStandardBand>,
    /// Lower end of the scanned window.
    pub e_min: f64,
    /// Scan ceiling. A last band reaching it is a window, not a claim that
    /// the spectrum ends there.
    pub e_max: f64,
}

impl BandStructure {
    /// Index of the standard band whose interior contains `energy`.
    pub fn band_of(&self, energy: f64) -> Option<usize> {
        self.standard.iter().position(|b| b.contains(energy))
    }

    /// All true (non-truncated) band edges, ascending and deduplicated.
    pub fn edges(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for b in &self.standard {
            for e in [Some(b.alpha), (!b.truncated).then_some(b.beta)].into_iter().flatten() {
                if out.last() != Some(&e) {
                    out.push(e);
                }
            }
        }
        out
    }
}

/// Tuning for the edge search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandSearch {
    /// Uniform grid points across the window; `None` picks ten per unit of
    /// energy width (at least 100).
    pub grid_points: Option<usize>,
    /// Bisection bracket width for edges and δ points.
    pub root_tol: f64,
    /// A local extremum of `|D|` within this distance of 2 is a tangency.
    pub touch_tol: f64,
    /// Central-difference step for `D'`.
    pub kappa_step: f64,
    /// `|D'|` above this means κ = 1.
    pub kappa_threshold: f64,
    /// `classify_edge` rejects points with `||D| - 2|` above this.
    pub edge_tol: f64,
}

impl Default for BandSearch {
    fn default() -> Self {
        Self {
            grid_points: None,
            root_tol: 1e-10,
            touch_tol: 1e-8,
            kappa_step: 1e-5,
            kappa_threshold: 1e-4,
            edge_tol: 1e-6,
        }
    }
}

/// Central-difference κ classification of a point where `|D| = 2`.
pub fn classify_with<F>(disc: &F, lambda: f64, search: &BandSearch) -> Result<Kappa>
where
    F: Fn(f64) -> Result<f64>,
{
    let d = disc(lambda)?;
    if (d.abs() - 2.0).abs() > search.edge_tol {
        return Err(Error::NotAnEdge {
            energy: lambda,
            abs_trace: d.abs(),
        });
    }
    let h = search.kappa_step;
    let slope = (disc(lambda + h)? - disc(lambda - h)?) / (2.0 * h);
    Ok(if slope.abs() > search.kappa_threshold {
        Kappa::NonCollapsed
    } else {
        Kappa::Collapsed
    })
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    energy: f64,
    touch: bool,
}

/// Largest value of `sign * D` on `[lo, hi]`, with its location. Golden
/// section alone only pins a quadratic peak to the square root of the
/// rounding error in `D`, so when `D'` brackets a root the location comes
/// from bisecting `D'` instead.
fn peak<F, G>(disc: &F, slope: &G, sign: f64, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
    G: Fn(f64) -> Result<f64>,
{
    let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let (x, neg) = golden_min(|e| Ok(-sign * disc(e)?), lo, hi, tol)?;
    let (s_lo, s_hi) = (sign * slope(lo)?, sign * slope(hi)?);
    if s_lo > 0.0 && s_hi < 0.0 {
        let root = bisect(|e| Ok(sign * slope(e)?), lo, hi, s_lo, 1e-3 * tol)?;
        return Ok((root, sign * disc(root)?));
    }
    Ok((x, -neg))
}

/// Locates every band of `D` inside `[lo, hi]`.
/// `slope` is `D'`, used only to pin tangencies.
pub(crate) fn assemble<F, G>(disc: F, slope: G, lo: f64, hi: f64, search: &BandSearch) -> Result<BandStructure>
where
    F: Fn(f64) -> Result<f64> + Sync,
    G: Fn(f64) -> Result<f64>,
{
    let n = search
        .grid_points
        .unwrap_or_else(|| ((10.0 * (hi - lo)).ceil() as usize).max(100))
        .max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * step }).collect();
    let values: Vec<f64> = grid.par_iter().map(|&e| disc(e)).collect::<Result<_>>()?;

    if values[0].abs() < 2.0 {
        return Err(Error::DegenerateEdge {
            energy: lo,
            reason: "scan window starts inside a band".into(),
        });
    }

    let mut edges: Vec<Edge> = Vec::new();

    // Transversal crossings of D = +2 and D = -2.
    for i in 0..n - 1 {
        for level in [2.0, -2.0] {
            let fa = values[i] - level;
            let fb = values[i + 1] - level;
            if fa == 0.0 && i > 0 {
                // Already reported as the right end of the previous cell.
                continue;
            }
            if fa * fb < 0.0 || fa == 0.0 {
                let root = bisect(|e| Ok(disc(e)? - level), grid[i], grid[i + 1], fa, search.root_tol)?;
                edges.push(Edge {
                    energy: root,
                    touch: false,
                });
            }
        }
    }

    // Local maxima of |D| strictly inside band regions: tangencies, or gaps
    // narrower than one grid cell.
    for i in 1..n - 1 {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if a.abs() >= 2.0 || b.abs() >= 2.0 || c.abs() >= 2.0 {
            continue;
        }
        if b.abs() <= a.abs() || b.abs() < c.abs() || a.signum() != b.signum() || c.signum() != b.signum() {
            continue;
        }
        let sign = b.signum();
        let (at, top) = peak(&disc, &slope, sign, grid[i - 1], grid[i + 1])?;
        let excess = top - 2.0;
        if excess.abs() <= search.touch_tol {
            edges.push(Edge {
                energy: at,
                touch: true,
            });
        } else if excess > 0.0 {
            let level = 2.0 * sign;
            let f_lo = values[i - 1] - level;
            let left = bisect(|e| Ok(disc(e)? - level), grid[i - 1], at, f_lo, search.root_tol)?;
            let right = bisect(|e| Ok(disc(e)? - level), at, grid[i + 1], sign * excess, search.root_tol)?;
            edges.push(Edge {
                energy: left,
                touch: false,
            });
            edges.push(Edge {
                energy: right,
                touch: false,
            });
        } else if excess > -1e-4 {
            return Err(Error::DegenerateEdge {
                energy: at,
                reason: format!("|D| peaks at 2{excess:+e} without touching"),
            });
        }
    }

    if edges.is_empty() {
        return Err(Error::EmptySpectrumWindow { e_max: hi });
    }
    edges.sort_by(|x, y| x.energy.total_cmp(&y.energy));

    // Gaps whose |D| never clears 2 by more than the touch tolerance are
    // numerically closed: fold the two crossings into one tangency.
    let mut merged: Vec<Edge> = Vec::with_capacity(edges.len());
    let mut i = 0;
    while i < edges.len() {
        if i + 1 < edges.len() && !edges[i].touch && !edges[i + 1].touch {
            let (e1, e2) = (edges[i].energy, edges[i + 1].energy);
            let mid = disc(0.5 * (e1 + e2))?;
            if mid.abs() >= 2.0 || e2 - e1 <= search.root_tol {
                let (at, top) = if e2 > e1 { peak(&disc, &slope, mid.signum(), e1, e2)? } else { (e1, 2.0) };
                if top - 2.0 <= search.touch_tol {
                    merged.push(Edge {
                        energy: at,
                        touch: true,
                    });
                    i += 2;
                    continue;
                }
            }
        }
        merged.push(edges[i]);
        i += 1;
    }
    let edges = merged;

    let mut standard = Vec::new();
    let mut bounds: Vec<(f64, bool)> = edges.iter().map(|e| (e.energy, true)).collect();
    bounds.push((hi, false));
    for w in bounds.windows(2) {
        let ((a, _), (b, b_is_edge)) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = disc(0.5 * (a + b))?;
        if mid.abs() >= 2.0 {
            continue;
        }
        let kappa_alpha = classify_with(&disc, a, search)?;
        let kappa_beta = if b_is_edge {
            Some(classify_with(&disc, b, search)?)
        } else {
            None
        };
        let d_alpha = disc(a)?;
        let d_beta = disc(b)?;
        let delta = if d_alpha.signum() != d_beta.signum() {
            Some(bisect(&disc, a, b, d_alpha, search.root_tol * 1e-2)?)
        } else {
            None
        };
        standard.push(StandardBand {
            alpha: a,
            beta: b,
            kappa_alpha,
            kappa_beta,
            delta,
            truncated: !b_is_edge,
        });
    }
    if standard.is_empty() {
        return Err(Error::EmptySpectrumWindow { e_max: hi });
    }

    let mut nonstandard: Vec<NonStandardBand> = Vec::new();
    for b in &standard {
        match nonstandard.last_mut() {
            Some(last) if last.beta == b.alpha => {
                last.beta = b.beta;
                last.truncated = b.truncated;
            }
            _ => nonstandard.push(NonStandardBand {
                alpha: b.alpha,
                beta: b.beta,
                truncated: b.truncated,
            }),
        }
    }

    Ok(BandStructure {
        standard,
        nonstandard,
        e_min: lo,
        e_max: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_discriminant_has_collapsed_interior_edges() {
        // D(E) = 2 cos(sqrt E) for E > 0, 2 cosh(sqrt(-E)) below.
        let disc = |e: f64| {
            Ok(if e >= 0.0 {
                2.0 * e.sqrt().cos()
            } else {
                2.0 * (-e).sqrt().cosh()
            })
        };
        let slope = |e: f64| {
            Ok(if e > 0.0 {
                -e.sqrt().sin() / e.sqrt()
            } else if e < 0.0 {
                -(-e).sqrt().sinh() / (-e).sqrt()
            } else {
                -1.0
            })
        };
        let bs = assemble(disc, slope, -1.0, 50.0, &BandSearch::default()).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert_eq!(bs.standard.len(), 3);
        assert!(bs.standard[0].alpha.abs() < 1e-9);
        assert!((bs.standard[0].beta - pi2).abs() < 1e-10);
        assert!((bs.standard[1].beta - 4.0 * pi2).abs() < 1e-10);
        assert_eq!(bs.standard[0].kappa_alpha, Kappa::NonCollapsed);
        assert_eq!(bs.standard[0].kappa_beta, Some(Kappa::Collapsed));
        assert!(bs.standard[2].truncated);
        assert_eq!(bs.nonstandard.len(), 1);
        assert_eq!(bs.nonstandard[0].beta, 50.0);
    }

    #[test]
    fn narrow_gap_inside_one_cell_is_found() {
        // |D| clears 2 only for |E - 1| < 1e-3, far inside one 0.04-wide cell.
        let disc = |e: f64| Ok(2.0 - 8.0 * ((e - 1.0).powi(2) - 1e-6));
        let slope = |e: f64| Ok(-16.0 * (e - 1.0));
        let bs = assemble(disc, slope, -1.0, 3.0, &BandSearch::default()).unwrap();
        assert_eq!(bs.standard.len(), 2);
        assert!((bs.standard[0].beta - (1.0 - 1e-3)).abs() < 1e-9);
        assert!((bs.standard[1].alpha - (1.0 + 1e-3)).abs() < 1e-9);
        assert_eq!(bs.standard[0].kappa_beta, Some(Kappa::NonCollapsed));
        assert_eq!(bs.nonstandard.len(), 2);
        for b in &bs.standard {
            let d = b.delta.unwrap();
            assert!(disc(d).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn window_without_edges_is_empty() {
        let err = assemble(|_| Ok(3.0), |_| Ok(0.0), 0.0, 1.0, &BandSearch::default()).unwrap_err();
        assert!(matches!(err, Error::EmptySpectrumWindow { .. }));
    }

    #[test]
    fn classify_rejects_interior_points() {
        let err = classify_with(&|e: f64| Ok(e), 0.5, &BandSearch::default()).unwrap_err();
        assert!(matches!(err, Error::NotAnEdge { .. }));
    }
}

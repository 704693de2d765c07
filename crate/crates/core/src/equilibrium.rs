//! Exact enumeration of the Nash equilibrium set of a heterogeneous game,
//! together with its all-selfish and all-altruistic variants.
//!
//! Both types' payoffs depend on the population state only through the
//! utilization level `u`, so the admissible cooperator-mass set of a type at
//! a given `u` is `{0}`, `{p}`, or `[0, p]`, decided by the sign of the
//! cooperate-minus-defect payoff difference. Equilibrium utilizations are
//! therefore exhausted by the corner sums together with the two interior
//! indifference points, each validated by direct substitution into the
//! equilibrium conditions. A type whose payoff difference vanishes
//! identically is admissible everywhere and produces interval components.

use serde::{Deserialize, Serialize};

use crate::game::{AgentType, GameInstance, IndifferencePoint, PayoffMatrix, PopulationState};

/// Absolute tolerance on payoff differences when validating equilibrium
/// candidates. Candidates come from closed forms, so residuals are
/// rounding-level.
pub const INDIFFERENCE_TOL: f64 = 1e-9;

/// How one type responds at an equilibrium.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportKind {
    /// No cooperators: defecting weakly dominates at this utilization.
    AllDefect,
    /// The payoff difference vanishes; any split is a best response.
    Interior,
    /// Full cooperation: cooperating weakly dominates at this utilization.
    AllCooperate,
}

/// A single Nash utilization level with an allocation witness realizing it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    #[serde(rename = "u")]
    pub utilization: f64,
    #[serde(rename = "x_a")]
    pub altruist_cooperators: f64,
    #[serde(rename = "x_s")]
    pub selfish_cooperators: f64,
    #[serde(rename = "kind_a")]
    pub altruist_kind: SupportKind,
    #[serde(rename = "kind_s")]
    pub selfish_kind: SupportKind,
}

impl EquilibriumPoint {
    pub fn state(&self) -> PopulationState {
        PopulationState::new(self.altruist_cooperators, self.selfish_cooperators)
    }
}

/// A closed interval of utilization levels, every member of which is a Nash
/// equilibrium. Arises only when a type is indifferent everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UtilizationInterval {
    pub lower: f64,
    pub upper: f64,
}

impl UtilizationInterval {
    pub fn contains(&self, u: f64, tol: f64) -> bool {
        u >= self.lower - tol && u <= self.upper + tol
    }
}

/// The complete Nash set: isolated utilization levels plus interval
/// components.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct EquilibriumSet {
    pub points: Vec<EquilibriumPoint>,
    pub intervals: Vec<UtilizationInterval>,
}

impl EquilibriumSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.intervals.is_empty()
    }

    /// Number of components (isolated points plus intervals).
    pub fn len(&self) -> usize {
        self.points.len() + self.intervals.len()
    }

    pub fn contains_utilization(&self, u: f64, tol: f64) -> bool {
        self.points.iter().any(|p| (p.utilization - u).abs() <= tol)
            || self.intervals.iter().any(|iv| iv.contains(u, tol))
    }

    /// Distance from `u` to the nearest member of the set.
    pub fn distance_to(&self, u: f64) -> f64 {
        let mut best = f64::INFINITY;
        for p in &self.points {
            best = best.min((p.utilization - u).abs());
        }
        for iv in &self.intervals {
            let d = if u < iv.lower {
                iv.lower - u
            } else if u > iv.upper {
                u - iv.upper
            } else {
                0.0
            };
            best = best.min(d);
        }
        best
    }

    /// Minimum welfare over the set together with the utilization attaining
    /// it. Interval minima are resolved analytically from the endpoints and
    /// the parabola vertex. Ties break toward the smaller utilization.
    pub fn worst_welfare(&self, matrix: &PayoffMatrix) -> Option<(f64, f64)> {
        self.extremal_welfare(matrix, false)
    }

    /// Maximum welfare over the set, resolved the same way.
    pub fn best_welfare(&self, matrix: &PayoffMatrix) -> Option<(f64, f64)> {
        self.extremal_welfare(matrix, true)
    }

    fn extremal_welfare(&self, matrix: &PayoffMatrix, maximize: bool) -> Option<(f64, f64)> {
        let coeffs = matrix.welfare_coefficients();
        let mut best: Option<(f64, f64)> = None;
        let mut consider = |u: f64| {
            let w = coeffs.eval(u);
            let better = match best {
                None => true,
                Some((bw, bu)) => {
                    if maximize {
                        w > bw || (w == bw && u < bu)
                    } else {
                        w < bw || (w == bw && u < bu)
                    }
                }
            };
            if better {
                best = Some((w, u));
            }
        };
        for p in &self.points {
            consider(p.utilization);
        }
        for iv in &self.intervals {
            consider(iv.lower);
            consider(iv.upper);
            if let Some(v) = coeffs.vertex() {
                if iv.lower < v && v < iv.upper {
                    consider(v);
                }
            }
        }
        best
    }
}

/// Checks the Nash conditions at a state by direct payoff comparison: every
/// strategy carrying positive mass of a type must pay at least as much as
/// the alternative, within `tol`.
pub fn satisfies_equilibrium_conditions(
    g: &GameInstance,
    state: &PopulationState,
    tol: f64,
) -> bool {
    let u = state.utilization();
    for ty in [AgentType::Altruistic, AgentType::Selfish] {
        let mass = g.mass(ty);
        if mass == 0.0 {
            continue;
        }
        let x = match ty {
            AgentType::Altruistic => state.altruist_cooperators,
            AgentType::Selfish => state.selfish_cooperators,
        };
        let gap = g.matrix.gap(ty, u);
        if x > 0.0 && gap < -tol {
            return false;
        }
        if x < mass && gap > tol {
            return false;
        }
    }
    true
}

/// Admissible cooperator-mass range for a type of mass `mass` whose payoff
/// difference at the current utilization is `gap`.
fn admissible_range(gap: f64, mass: f64, tol: f64) -> (f64, f64, SupportKind) {
    if gap.abs() <= tol {
        (0.0, mass, SupportKind::Interior)
    } else if gap > 0.0 {
        (mass, mass, SupportKind::AllCooperate)
    } else {
        (0.0, 0.0, SupportKind::AllDefect)
    }
}

/// Tries to realize utilization `u` as an equilibrium, returning an
/// allocation witness when the admissible ranges of both types admit a
/// split summing to `u`.
pub fn equilibrium_witness(g: &GameInstance, u: f64, tol: f64) -> Option<EquilibriumPoint> {
    let p_a = g.altruist_mass;
    let p_s = g.selfish_mass();
    let (lo_a, hi_a, kind_a) = admissible_range(g.matrix.altruistic_gap(u), p_a, tol);
    let (lo_s, hi_s, kind_s) = admissible_range(g.matrix.selfish_gap(u), p_s, tol);
    if u < lo_a + lo_s - tol || u > hi_a + hi_s + tol {
        return None;
    }
    let x_a = (u - lo_s).clamp(lo_a, hi_a);
    let x_s = (u - x_a).clamp(lo_s, hi_s);
    let x_a = (u - x_s).clamp(lo_a, hi_a);
    if (x_a + x_s - u).abs() > 1e-12 {
        return None;
    }
    Some(EquilibriumPoint {
        utilization: u,
        altruist_cooperators: x_a,
        selfish_cooperators: x_s,
        altruist_kind: kind_a,
        selfish_kind: kind_s,
    })
}

/// Enumerates every Nash equilibrium utilization of the game, with
/// allocation witnesses. The result is never empty: a best-response fixed
/// point always exists in this class, so an empty set is an internal error.
pub fn enumerate_equilibria(g: &GameInstance) -> EquilibriumSet {
    let set = enumerate_inner(g, INDIFFERENCE_TOL);
    assert!(
        !set.is_empty(),
        "internal error: empty Nash set for {:?} (a best-response fixed point always exists)",
        g
    );
    set
}

/// Nash set of the all-selfish variant of the game (`p_a = 0`).
pub fn all_selfish_equilibria(g: &GameInstance) -> EquilibriumSet {
    enumerate_equilibria(&g.with_altruist_mass(0.0).expect("mass 0 is valid"))
}

/// Nash set of the all-altruistic variant of the game (`p_a = 1`).
pub fn all_altruistic_equilibria(g: &GameInstance) -> EquilibriumSet {
    enumerate_equilibria(&g.with_altruist_mass(1.0).expect("mass 1 is valid"))
}

fn enumerate_inner(g: &GameInstance, tol: f64) -> EquilibriumSet {
    let m = &g.matrix;
    let p_a = g.altruist_mass;
    let p_s = g.selfish_mass();
    let degenerate_a = m.is_degenerate(AgentType::Altruistic);
    let degenerate_s = m.is_degenerate(AgentType::Selfish);

    if degenerate_a || degenerate_s {
        // A degenerate type is indifferent at every u, so the other type's
        // (constant) preference selects an interval of equilibria. Both
        // gaps have slope proportional to the quadratic welfare
        // coefficient, which is ~0 whenever either type is degenerate, so
        // the other type's payoff difference is constant here.
        let interval = if degenerate_a && degenerate_s {
            UtilizationInterval {
                lower: 0.0,
                upper: 1.0,
            }
        } else if degenerate_a {
            let c = m.sucker - m.punishment; // sign of the selfish gap
            if c.abs() <= tol {
                UtilizationInterval {
                    lower: 0.0,
                    upper: 1.0,
                }
            } else if c < 0.0 {
                UtilizationInterval {
                    lower: 0.0,
                    upper: p_a,
                }
            } else {
                UtilizationInterval {
                    lower: p_s,
                    upper: 1.0,
                }
            }
        } else {
            let c = m.welfare_coefficients().linear; // sign of the altruistic gap
            if c.abs() <= tol {
                UtilizationInterval {
                    lower: 0.0,
                    upper: 1.0,
                }
            } else if c < 0.0 {
                UtilizationInterval {
                    lower: 0.0,
                    upper: p_s,
                }
            } else {
                UtilizationInterval {
                    lower: p_a,
                    upper: 1.0,
                }
            }
        };
        if interval.upper - interval.lower <= tol {
            let point = equilibrium_witness(g, interval.lower, 10.0 * tol)
                .expect("zero-width interval endpoint must be an equilibrium");
            return EquilibriumSet {
                points: vec![point],
                intervals: Vec::new(),
            };
        }
        return EquilibriumSet {
            points: Vec::new(),
            intervals: vec![interval],
        };
    }

    // Generic case: both gaps are nonconstant-or-nonzero, so equilibria are
    // isolated. Candidates: corner sums plus the interior indifference
    // points, deduplicated after validation.
    let mut candidates = vec![0.0, p_a, p_s, p_a + p_s];
    for ty in [AgentType::Altruistic, AgentType::Selfish] {
        if let IndifferencePoint::Point { u, .. } = m.interior_equilibrium(ty) {
            if u >= -tol && u <= 1.0 + tol {
                candidates.push(u.clamp(0.0, 1.0));
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut points: Vec<EquilibriumPoint> = Vec::new();
    for &u in &candidates {
        if let Some(point) = equilibrium_witness(g, u, tol) {
            match points.last() {
                Some(prev) if (prev.utilization - u).abs() <= tol => {}
                _ => points.push(point),
            }
        }
    }
    EquilibriumSet {
        points,
        intervals: Vec::new(),
    }
}

//! The perversity index and its closed-form characterization for
//! Prisoner's Dilemma games.
//!
//! The index compares the worst heterogeneous equilibrium welfare against
//! the best equilibrium welfare of the all-selfish variant of the same
//! game. A value below one means the presence of altruists can leave the
//! population strictly worse off.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    all_selfish_equilibria, enumerate_equilibria, equilibrium_witness, EquilibriumPoint,
    EquilibriumSet,
};
use crate::error::{Error, Result};
use crate::game::{AgentType, Curvature, GameInstance, IndifferencePoint, CLASSIFICATION_TOL};

/// Worst-case welfare ratio between heterogeneous and all-selfish equilibria,
/// with the witnessing equilibria on both sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerversityReport {
    /// `worst_welfare / best_selfish_welfare`.
    #[serde(rename = "pi")]
    pub index: f64,
    /// Heterogeneous equilibrium attaining the minimum welfare.
    pub worst_heterogeneous: EquilibriumPoint,
    /// All-selfish equilibrium attaining the maximum welfare.
    pub best_all_selfish: EquilibriumPoint,
    pub worst_welfare: f64,
    pub best_selfish_welfare: f64,
}

/// Which branch of the closed-form characterization applies to a
/// Prisoner's Dilemma instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdBranch {
    /// Convex welfare, altruist mass below the indifference point.
    ConvexBelow,
    /// Convex welfare, altruist mass at or above the indifference point.
    ConvexAbove,
    /// Concave welfare, altruist mass below the indifference point.
    ConcaveBelow,
    /// Concave welfare, altruist mass at or above the indifference point.
    ConcaveAbove,
    /// Zero quadratic coefficient: the welfare function is affine.
    AffineDelta,
}

/// Classification of an instance against the Prisoner's Dilemma ordering
/// `S < P < R < T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdClassification {
    #[serde(rename = "is_pd")]
    pub is_prisoners_dilemma: bool,
    pub branch: Option<PdBranch>,
    /// The altruistic indifference point, when the quadratic coefficient is
    /// nonzero.
    pub threshold: Option<f64>,
}

/// Checks the strict Prisoner's Dilemma payoff ordering.
pub fn is_prisoners_dilemma(g: &GameInstance) -> bool {
    let m = &g.matrix;
    m.sucker < m.punishment && m.punishment < m.reward && m.reward < m.temptation
}

/// Classifies the instance: PD ordering, curvature branch, and the
/// altruistic indifference threshold.
pub fn classify_prisoners_dilemma(g: &GameInstance) -> PdClassification {
    let is_pd = is_prisoners_dilemma(g);
    let threshold = match g.matrix.interior_equilibrium(AgentType::Altruistic) {
        IndifferencePoint::Point { u, .. } => Some(u),
        _ => None,
    };
    let branch = if !is_pd {
        None
    } else {
        Some(match g.matrix.curvature() {
            Curvature::Affine => PdBranch::AffineDelta,
            Curvature::StrictlyConvex => {
                if threshold.is_some_and(|t| g.altruist_mass < t) {
                    PdBranch::ConvexBelow
                } else {
                    PdBranch::ConvexAbove
                }
            }
            Curvature::StrictlyConcave => {
                if threshold.is_some_and(|t| g.altruist_mass < t) {
                    PdBranch::ConcaveBelow
                } else {
                    PdBranch::ConcaveAbove
                }
            }
        })
    };
    PdClassification {
        is_prisoners_dilemma: is_pd,
        branch,
        threshold,
    }
}

/// Computes the perversity index by full equilibrium enumeration.
///
/// Minima and maxima over interval components are resolved analytically.
/// Fails with [`Error::DivisionByZeroWelfare`] when the best all-selfish
/// equilibrium welfare is zero, which the nonnegativity of payoffs does not
/// exclude; the condition is reported, never clamped.
pub fn perversity_index(g: &GameInstance) -> Result<PerversityReport> {
    let heterogeneous = enumerate_equilibria(g);
    let selfish = all_selfish_equilibria(g);
    perversity_from_sets(g, &heterogeneous, &selfish)
}

fn perversity_from_sets(
    g: &GameInstance,
    heterogeneous: &EquilibriumSet,
    selfish: &EquilibriumSet,
) -> Result<PerversityReport> {
    let m = &g.matrix;
    let (worst_welfare, worst_u) = heterogeneous
        .worst_welfare(m)
        .expect("heterogeneous equilibrium set is never empty");
    let (best_selfish_welfare, best_u) = selfish
        .best_welfare(m)
        .expect("all-selfish equilibrium set is never empty");
    if best_selfish_welfare == 0.0 {
        return Err(Error::DivisionByZeroWelfare);
    }
    let worst_heterogeneous = materialize(g, heterogeneous, worst_u);
    let selfish_instance = g.with_altruist_mass(0.0).expect("mass 0 is valid");
    let best_all_selfish = materialize(&selfish_instance, selfish, best_u);
    Ok(PerversityReport {
        index: worst_welfare / best_selfish_welfare,
        worst_heterogeneous,
        best_all_selfish,
        worst_welfare,
        best_selfish_welfare,
    })
}

/// Finds or reconstructs the equilibrium point of `set` at utilization `u`.
fn materialize(g: &GameInstance, set: &EquilibriumSet, u: f64) -> EquilibriumPoint {
    set.points
        .iter()
        .find(|p| p.utilization == u)
        .copied()
        .or_else(|| equilibrium_witness(g, u, 1e-8))
        .expect("extremal utilization must be realizable as an equilibrium")
}

/// Closed-form perversity index for Prisoner's Dilemma instances.
///
/// With `delta` and `beta` the quadratic and linear welfare coefficients and
/// `u*_a = -beta / (2 delta)` the altruists' indifference point:
///
/// * concave welfare: `(delta p_a^2 + beta p_a) / P + 1` below `u*_a`,
///   `1 - beta^2 / (4 P delta)` at or above it;
/// * convex welfare with `beta <= 0` (feasible indifference point): `1`
///   below `u*_a` and `1 - beta^2 / (4 P delta)` at or above it;
/// * convex welfare with `beta > 0`: the indifference point is negative and
///   cooperation strictly dominates for altruists at every utilization, so
///   the unique equilibrium puts all altruists on cooperate and the index is
///   `(delta p_a^2 + beta p_a) / P + 1`;
/// * affine welfare (`delta = 0`): `beta = R - P > 0`, altruists cooperate,
///   and the index is `beta p_a / P + 1`.
pub fn pd_closed_form_pi(g: &GameInstance) -> Result<f64> {
    if !is_prisoners_dilemma(g) {
        return Err(Error::NotPrisonersDilemma);
    }
    let w = g.matrix.welfare_coefficients();
    let p_a = g.altruist_mass;
    let punishment = g.matrix.punishment;
    let ascending = (w.quadratic * p_a * p_a + w.linear * p_a) / punishment + 1.0;
    if w.quadratic.abs() <= CLASSIFICATION_TOL {
        return Ok(ascending);
    }
    let mixed = 1.0 - w.linear * w.linear / (4.0 * punishment * w.quadratic);
    let threshold = -w.linear / (2.0 * w.quadratic);
    if w.quadratic > 0.0 {
        if w.linear > CLASSIFICATION_TOL {
            Ok(ascending)
        } else if p_a < threshold {
            Ok(1.0)
        } else {
            Ok(mixed)
        }
    } else if p_a < threshold {
        Ok(ascending)
    } else {
        Ok(mixed)
    }
}

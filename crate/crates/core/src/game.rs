//! Game primitives: payoff matrix, social welfare, per-type payoff functions,
//! welfare curvature, and interior indifference points.
//!
//! The population is a unit mass of agents split into an altruistic
//! sub-population of mass `p_a` and a selfish sub-population of mass
//! `p_s = 1 - p_a`. Every agent either cooperates or defects, and all payoffs
//! depend on the state only through the utilization level `u`, the total
//! fraction of cooperators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the quadratic welfare coefficient when deciding
/// convex/concave/affine. All closed forms downstream divide by this
/// coefficient, so anything smaller is treated as zero.
pub const CLASSIFICATION_TOL: f64 = 1e-9;

/// Absolute slack allowed when validating a utilization argument.
pub const UTILIZATION_TOL: f64 = 1e-9;

/// The two behavioral types in the population.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentType {
    Altruistic,
    Selfish,
}

/// Symmetric 2x2 payoff matrix from the row player's perspective.
///
/// Rows are the row player's strategy (cooperate first), columns the
/// opponent's. All four payoffs are finite and nonnegative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    /// Payoff for mutual cooperation (R).
    #[serde(rename = "R")]
    pub reward: f64,
    /// Payoff for cooperating against a defector (S).
    #[serde(rename = "S")]
    pub sucker: f64,
    /// Payoff for defecting against a cooperator (T).
    #[serde(rename = "T")]
    pub temptation: f64,
    /// Payoff for mutual defection (P).
    #[serde(rename = "P")]
    pub punishment: f64,
}

/// Coefficients of the quadratic social welfare function
/// `W(u) = quadratic * u^2 + linear * u + constant`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareCoefficients {
    /// Leading coefficient, `R + P - (S + T)`; its sign decides curvature.
    #[serde(rename = "delta")]
    pub quadratic: f64,
    /// Linear coefficient, `S + T - 2P`.
    #[serde(rename = "beta")]
    pub linear: f64,
    /// Constant term, equal to the mutual-defection payoff `P`.
    pub constant: f64,
}

impl WelfareCoefficients {
    /// Evaluates the welfare polynomial without any domain check.
    pub fn eval(&self, u: f64) -> f64 {
        (self.quadratic * u + self.linear) * u + self.constant
    }

    /// Vertex of the parabola, where the welfare slope vanishes.
    /// `None` when the quadratic term is (numerically) zero.
    pub fn vertex(&self) -> Option<f64> {
        if self.quadratic.abs() <= CLASSIFICATION_TOL {
            None
        } else {
            Some(-self.linear / (2.0 * self.quadratic))
        }
    }
}

/// Shape of the social welfare function as a function of utilization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    StrictlyConvex,
    StrictlyConcave,
    Affine,
}

/// Interior indifference point of one agent type: the utilization level at
/// which its cooperate and defect payoffs coincide.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndifferencePoint {
    /// Unique root of the payoff difference. It may lie outside [0, 1];
    /// `feasible` records whether it is attainable.
    Point { u: f64, feasible: bool },
    /// The payoff difference is a nonzero constant: no indifference point.
    Absent,
    /// The payoff difference vanishes identically; the type is indifferent
    /// at every utilization level.
    Degenerate,
}

impl PayoffMatrix {
    /// Validates and builds a payoff matrix. Every entry must be finite and
    /// nonnegative.
    pub fn new(reward: f64, sucker: f64, temptation: f64, punishment: f64) -> Result<Self> {
        for (name, value) in [
            ("R", reward),
            ("S", sucker),
            ("T", temptation),
            ("P", punishment),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidPayoff { name, value });
            }
        }
        Ok(Self {
            reward,
            sucker,
            temptation,
            punishment,
        })
    }

    /// Coefficients of the welfare quadratic `u^T A u`.
    pub fn welfare_coefficients(&self) -> WelfareCoefficients {
        WelfareCoefficients {
            quadratic: self.reward + self.punishment - (self.sucker + self.temptation),
            linear: self.sucker + self.temptation - 2.0 * self.punishment,
            constant: self.punishment,
        }
    }

    /// Average payoff across the population at utilization `u`.
    pub fn welfare(&self, u: f64) -> Result<f64> {
        check_utilization(u)?;
        Ok(self.welfare_coefficients().eval(u))
    }

    /// Payoffs `(f_C_s, f_D_s)` experienced by selfish agents for
    /// cooperating and defecting at utilization `u`.
    pub fn selfish_payoffs(&self, u: f64) -> Result<(f64, f64)> {
        check_utilization(u)?;
        Ok((
            self.reward * u + self.sucker * (1.0 - u),
            self.temptation * u + self.punishment * (1.0 - u),
        ))
    }

    /// Payoffs `(f_C_a, f_D_a)` steering altruistic agents: the welfare
    /// slope for cooperating and its exact negation for defecting.
    pub fn altruistic_payoffs(&self, u: f64) -> Result<(f64, f64)> {
        check_utilization(u)?;
        let c = self.altruistic_cooperate_payoff(u);
        Ok((c, -c))
    }

    /// `f_C_a(u) = 2*quadratic*u + linear`, the derivative of the welfare
    /// quadratic. Defined for every real `u`.
    pub fn altruistic_cooperate_payoff(&self, u: f64) -> f64 {
        let w = self.welfare_coefficients();
        2.0 * w.quadratic * u + w.linear
    }

    /// Cooperate-minus-defect payoff difference for altruists. Its sign at a
    /// state decides the altruists' equilibrium condition.
    pub fn altruistic_gap(&self, u: f64) -> f64 {
        2.0 * self.altruistic_cooperate_payoff(u)
    }

    /// Cooperate-minus-defect payoff difference for selfish agents,
    /// `(R - T) u + (S - P)(1 - u)`.
    pub fn selfish_gap(&self, u: f64) -> f64 {
        (self.reward - self.temptation) * u + (self.sucker - self.punishment) * (1.0 - u)
    }

    /// Payoff difference for the given type.
    pub fn gap(&self, ty: AgentType, u: f64) -> f64 {
        match ty {
            AgentType::Altruistic => self.altruistic_gap(u),
            AgentType::Selfish => self.selfish_gap(u),
        }
    }

    /// True when the payoff difference of the type vanishes identically, so
    /// the type is indifferent everywhere and equilibrium sets may contain
    /// whole intervals.
    pub fn is_degenerate(&self, ty: AgentType) -> bool {
        let w = self.welfare_coefficients();
        match ty {
            AgentType::Altruistic => 2.0 * w.quadratic.abs() + w.linear.abs() <= CLASSIFICATION_TOL,
            AgentType::Selfish => {
                (self.reward - self.temptation).abs() + (self.sucker - self.punishment).abs()
                    <= CLASSIFICATION_TOL
            }
        }
    }

    /// Classifies the welfare curvature by the sign of the quadratic
    /// coefficient, with [`CLASSIFICATION_TOL`] deciding the affine band.
    pub fn curvature(&self) -> Curvature {
        let q = self.welfare_coefficients().quadratic;
        if q > CLASSIFICATION_TOL {
            Curvature::StrictlyConvex
        } else if q < -CLASSIFICATION_TOL {
            Curvature::StrictlyConcave
        } else {
            Curvature::Affine
        }
    }

    /// Interior indifference point of the given type.
    ///
    /// With a nonzero quadratic coefficient the payoff difference is a
    /// nonconstant affine function with a unique root: `(P - S) / delta` for
    /// selfish agents and `-beta / (2 delta)` for altruists. The root is
    /// returned even when it falls outside [0, 1], flagged infeasible.
    /// Degeneracy (an identically zero payoff difference) is a value, not an
    /// error.
    pub fn interior_equilibrium(&self, ty: AgentType) -> IndifferencePoint {
        if self.is_degenerate(ty) {
            return IndifferencePoint::Degenerate;
        }
        let w = self.welfare_coefficients();
        if w.quadratic.abs() <= CLASSIFICATION_TOL {
            // Constant nonzero payoff difference: never indifferent.
            return IndifferencePoint::Absent;
        }
        let u = match ty {
            AgentType::Selfish => (self.punishment - self.sucker) / w.quadratic,
            AgentType::Altruistic => -w.linear / (2.0 * w.quadratic),
        };
        IndifferencePoint::Point {
            u,
            feasible: (0.0..=1.0).contains(&u),
        }
    }
}

fn check_utilization(u: f64) -> Result<()> {
    if !u.is_finite() || !(-UTILIZATION_TOL..=1.0 + UTILIZATION_TOL).contains(&u) {
        return Err(Error::UtilizationOutOfRange(u));
    }
    Ok(())
}

/// A population game: the payoff matrix plus the altruist mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameInstance {
    pub matrix: PayoffMatrix,
    /// Mass of the altruistic sub-population, in [0, 1].
    #[serde(rename = "p_a")]
    pub altruist_mass: f64,
}

impl GameInstance {
    pub fn new(matrix: PayoffMatrix, altruist_mass: f64) -> Result<Self> {
        if !altruist_mass.is_finite() || !(0.0..=1.0).contains(&altruist_mass) {
            return Err(Error::InvalidAltruistMass(altruist_mass));
        }
        Ok(Self {
            matrix,
            altruist_mass,
        })
    }

    /// Mass of the selfish sub-population, `1 - p_a`.
    pub fn selfish_mass(&self) -> f64 {
        1.0 - self.altruist_mass
    }

    pub fn mass(&self, ty: AgentType) -> f64 {
        match ty {
            AgentType::Altruistic => self.altruist_mass,
            AgentType::Selfish => self.selfish_mass(),
        }
    }

    /// Same matrix with a different altruist mass.
    pub fn with_altruist_mass(&self, altruist_mass: f64) -> Result<Self> {
        Self::new(self.matrix, altruist_mass)
    }

    /// Builds a population state after checking it against this instance's
    /// sub-population masses.
    pub fn state(
        &self,
        altruist_cooperators: f64,
        selfish_cooperators: f64,
    ) -> Result<PopulationState> {
        let state = PopulationState {
            altruist_cooperators,
            selfish_cooperators,
        };
        self.validate_state(&state)?;
        Ok(state)
    }

    pub fn validate_state(&self, state: &PopulationState) -> Result<()> {
        let (x_a, x_s) = (state.altruist_cooperators, state.selfish_cooperators);
        if !x_a.is_finite()
            || !x_s.is_finite()
            || x_a < 0.0
            || x_s < 0.0
            || x_a > self.altruist_mass
            || x_s > self.selfish_mass()
        {
            return Err(Error::InfeasibleState {
                x_a,
                x_s,
                p_a: self.altruist_mass,
                p_s: self.selfish_mass(),
            });
        }
        Ok(())
    }
}

/// Per-type cooperator masses; the aggregate state of the population.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationState {
    /// Mass of altruists cooperating, in [0, p_a].
    #[serde(rename = "x_a")]
    pub altruist_cooperators: f64,
    /// Mass of selfish agents cooperating, in [0, p_s].
    #[serde(rename = "x_s")]
    pub selfish_cooperators: f64,
}

impl PopulationState {
    pub fn new(altruist_cooperators: f64, selfish_cooperators: f64) -> Self {
        Self {
            altruist_cooperators,
            selfish_cooperators,
        }
    }

    /// Total fraction of cooperators.
    pub fn utilization(&self) -> f64 {
        self.altruist_cooperators + self.selfish_cooperators
    }
}

//! Projected payoff-difference flow.
//!
//! Each type's cooperator mass moves in the direction of its
//! cooperate-minus-defect payoff difference and is projected back onto the
//! feasible box. A state is stationary exactly when, for each type, the
//! payoff difference is zero, or positive at full cooperation, or negative
//! at full defection. These are the Nash conditions, corners included, so
//! the flow's stationary set coincides with the equilibrium set and gives
//! an independent dynamical route to it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameInstance, PopulationState};

pub const DEFAULT_DT: f64 = 1e-2;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Cap on recorded trajectory samples; long integrations are thinned to a
/// uniform stride, always keeping the initial and final states.
const MAX_RECORDED_SAMPLES: u64 = 4096;

/// One recorded state along a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    #[serde(rename = "t")]
    pub time: f64,
    #[serde(rename = "x_a")]
    pub altruist_cooperators: f64,
    #[serde(rename = "x_s")]
    pub selfish_cooperators: f64,
}

impl TrajectorySample {
    pub fn state(&self) -> PopulationState {
        PopulationState::new(self.altruist_cooperators, self.selfish_cooperators)
    }
}

/// Result of integrating the flow from an initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    pub converged: bool,
    /// Norm of the last per-step movement divided by `dt`.
    pub final_residual: f64,
}

impl Trajectory {
    pub fn final_state(&self) -> PopulationState {
        self.samples
            .last()
            .expect("trajectory always has samples")
            .state()
    }
}

/// Advances the state by one explicit step of the projected flow, using the
/// payoff differences at the pre-step utilization.
pub fn step_flow(g: &GameInstance, state: &PopulationState, dt: f64) -> Result<PopulationState> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidStepSize(dt));
    }
    g.validate_state(state)?;
    Ok(step_unchecked(g, state, dt))
}

fn step_unchecked(g: &GameInstance, state: &PopulationState, dt: f64) -> PopulationState {
    let u = state.utilization();
    let x_a =
        (state.altruist_cooperators + dt * g.matrix.altruistic_gap(u)).clamp(0.0, g.altruist_mass);
    let x_s =
        (state.selfish_cooperators + dt * g.matrix.selfish_gap(u)).clamp(0.0, g.selfish_mass());
    PopulationState::new(x_a, x_s)
}

/// Iterates [`step_flow`] until the realized per-step movement divided by
/// `dt` falls below `residual_tol`, or `max_steps` is reached.
/// Non-convergence is reported through the `converged` flag, not an error.
pub fn integrate(
    g: &GameInstance,
    init: &PopulationState,
    dt: f64,
    max_steps: u64,
    residual_tol: f64,
) -> Result<Trajectory> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidStepSize(dt));
    }
    if max_steps == 0 || !residual_tol.is_finite() || residual_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "max_steps and residual_tol must be positive, got {max_steps} and {residual_tol}"
        )));
    }
    g.validate_state(init)?;

    let stride = max_steps.div_ceil(MAX_RECORDED_SAMPLES).max(1);
    let mut samples = vec![TrajectorySample {
        time: 0.0,
        altruist_cooperators: init.altruist_cooperators,
        selfish_cooperators: init.selfish_cooperators,
    }];
    let mut state = *init;
    let mut converged = false;
    let mut residual = f64::INFINITY;

    for step in 1..=max_steps {
        let next = step_unchecked(g, &state, dt);
        let da = next.altruist_cooperators - state.altruist_cooperators;
        let ds = next.selfish_cooperators - state.selfish_cooperators;
        residual = da.hypot(ds) / dt;
        state = next;
        if residual < residual_tol {
            converged = true;
        }
        if converged || step == max_steps || step % stride == 0 {
            samples.push(TrajectorySample {
                time: step as f64 * dt,
                altruist_cooperators: state.altruist_cooperators,
                selfish_cooperators: state.selfish_cooperators,
            });
        }
        if converged {
            break;
        }
    }
    Ok(Trajectory {
        samples,
        converged,
        final_residual: residual,
    })
}

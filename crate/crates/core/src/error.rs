use crate::verify::VerificationSummary;

/// Errors produced by the analysis library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("payoff {name} must be a finite nonnegative number, got {value}")]
    InvalidPayoff { name: &'static str, value: f64 },

    #[error("altruist mass must lie in [0, 1], got {0}")]
    InvalidAltruistMass(f64),

    #[error(
        "cooperator masses (x_a = {x_a}, x_s = {x_s}) outside the feasible box \
         [0, {p_a}] x [0, {p_s}]"
    )]
    InfeasibleState {
        x_a: f64,
        x_s: f64,
        p_a: f64,
        p_s: f64,
    },

    #[error("utilization level {0} lies outside [0, 1]")]
    UtilizationOutOfRange(f64),

    #[error("best all-selfish equilibrium welfare is zero; the perversity index is undefined")]
    DivisionByZeroWelfare,

    #[error("payoffs do not satisfy the prisoner's dilemma ordering S < P < R < T")]
    NotPrisonersDilemma,

    #[error("step size dt must be positive and finite, got {0}")]
    InvalidStepSize(f64),

    #[error("{0}")]
    InvalidArgument(String),

    #[error(
        "verification suite '{}' failed on {} of {} trials{}",
        .0.suite,
        .0.failures,
        .0.trials,
        .0.counterexample
            .as_ref()
            .map(|c| format!("; first counterexample: {c}"))
            .unwrap_or_default()
    )]
    VerificationFailure(Box<VerificationSummary>),
}

pub type Result<T> = std::result::Result<T, Error>;

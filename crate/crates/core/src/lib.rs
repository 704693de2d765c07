//! Exact analysis of symmetric two-strategy population games in which an
//! altruistic sub-population (steered by the social-welfare gradient)
//! coexists with a selfish one (steered by its own matrix payoff).
//!
//! The crate enumerates the Nash equilibrium set exactly, computes the
//! perversity index (the worst heterogeneous equilibrium welfare relative
//! to the best all-selfish equilibrium welfare) together with its
//! closed-form Prisoner's Dilemma characterization, integrates a projected
//! payoff-difference flow whose stationary set coincides with the Nash set,
//! and runs seeded verification campaigns that cross-check all of these
//! routes against a brute-force grid oracle.

pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod oracle;
pub mod perversity;
pub mod verify;

pub use dynamics::{integrate, step_flow, Trajectory, TrajectorySample};
pub use equilibrium::{
    all_altruistic_equilibria, all_selfish_equilibria, enumerate_equilibria, equilibrium_witness,
    satisfies_equilibrium_conditions, EquilibriumPoint, EquilibriumSet, SupportKind,
    UtilizationInterval,
};
pub use error::{Error, Result};
pub use game::{
    AgentType, Curvature, GameInstance, IndifferencePoint, PayoffMatrix, PopulationState,
    WelfareCoefficients,
};
pub use oracle::oracle_equilibria;
pub use perversity::{
    classify_prisoners_dilemma, is_prisoners_dilemma, pd_closed_form_pi, perversity_index,
    PdBranch, PdClassification, PerversityReport,
};
pub use verify::{
    verify_oracle_agreement, verify_proof_cases, verify_proposition1, verify_theorem1, AffineProbe,
    Counterexample, VerificationSummary,
};

//! Randomized verification campaigns: seeded sampling of game families with
//! per-draw assertions, cross-checking the closed forms, the enumeration,
//! and the brute-force oracle against each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{all_selfish_equilibria, enumerate_equilibria, SupportKind};
use crate::error::{Error, Result};
use crate::game::{AgentType, GameInstance, IndifferencePoint, PayoffMatrix};
use crate::oracle::oracle_equilibria;
use crate::perversity::{pd_closed_form_pi, perversity_index};

/// Campaigns assert perversity-index bounds to this absolute tolerance.
pub const PI_ASSERT_TOL: f64 = 1e-9;

/// Concave sampling rejects games whose quadratic welfare coefficient is
/// above this bound, keeping every closed form well conditioned.
pub const CONCAVE_DELTA_BOUND: f64 = -1e-6;

/// A sampled game violating the property under test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub matrix: PayoffMatrix,
    #[serde(rename = "p_a")]
    pub altruist_mass: f64,
    pub detail: String,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = &self.matrix;
        write!(
            f,
            "R={}, S={}, T={}, P={}, p_a={}: {}",
            m.reward, m.sucker, m.temptation, m.punishment, self.altruist_mass, self.detail
        )
    }
}

/// Side-channel findings from affine (zero quadratic coefficient) games.
/// These are reported, not asserted: the never-perverse guarantee covers
/// only strictly concave welfare, and affine games with an
/// everywhere-indifferent type can be perverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineProbe {
    pub trials: u64,
    /// Draws with perversity index below `1 - PI_ASSERT_TOL`.
    pub perverse_found: u64,
    pub min_pi: Option<f64>,
}

/// Outcome of a verification campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub suite: String,
    pub seed: u64,
    pub trials: u64,
    pub failures: u64,
    pub min_pi: Option<f64>,
    pub max_pi: Option<f64>,
    /// Draws per proof case, for the proof-case suite.
    pub case_counts: Option<[u64; 5]>,
    /// Largest relative gap between the closed-form and enumeration routes.
    pub max_closed_form_gap: Option<f64>,
    /// Largest utilization distance between analytic and oracle equilibria.
    pub max_u_mismatch: Option<f64>,
    pub affine: Option<AffineProbe>,
    pub counterexample: Option<Counterexample>,
}

impl VerificationSummary {
    fn new(suite: &str, seed: u64) -> Self {
        Self {
            suite: suite.to_string(),
            seed,
            trials: 0,
            failures: 0,
            min_pi: None,
            max_pi: None,
            case_counts: None,
            max_closed_form_gap: None,
            max_u_mismatch: None,
            affine: None,
            counterexample: None,
        }
    }

    fn observe_pi(&mut self, pi: f64) {
        self.min_pi = Some(self.min_pi.map_or(pi, |v| v.min(pi)));
        self.max_pi = Some(self.max_pi.map_or(pi, |v| v.max(pi)));
    }

    fn record_failure(&mut self, g: &GameInstance, detail: String) {
        self.failures += 1;
        if self.counterexample.is_none() {
            self.counterexample = Some(Counterexample {
                matrix: g.matrix,
                altruist_mass: g.altruist_mass,
                detail,
            });
        }
    }

    fn into_result(self) -> Result<Self> {
        if self.failures > 0 {
            Err(Error::VerificationFailure(Box::new(self)))
        } else {
            Ok(self)
        }
    }
}

/// One independent generator per trial, split deterministically from the
/// campaign seed so trials can be reordered or parallelized without
/// changing what is drawn.
fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_matrix(rng: &mut ChaCha8Rng) -> PayoffMatrix {
    PayoffMatrix::new(
        rng.gen_range(0.0..10.0),
        rng.gen_range(0.0..10.0),
        rng.gen_range(0.0..10.0),
        rng.gen_range(0.0..10.0),
    )
    .expect("uniform draws in [0, 10) are valid payoffs")
}

fn sample_concave(rng: &mut ChaCha8Rng) -> PayoffMatrix {
    loop {
        let m = sample_matrix(rng);
        if m.welfare_coefficients().quadratic < CONCAVE_DELTA_BOUND {
            return m;
        }
    }
}

fn sample_prisoners_dilemma(rng: &mut ChaCha8Rng) -> PayoffMatrix {
    loop {
        let m = sample_matrix(rng);
        if m.sucker < m.punishment && m.punishment < m.reward && m.reward < m.temptation {
            return m;
        }
    }
}

/// Affine construction: draw S, T, P and set R = S + T - P, rejecting
/// draws that leave R outside [0, 10].
fn sample_affine(rng: &mut ChaCha8Rng) -> PayoffMatrix {
    loop {
        let sucker = rng.gen_range(0.0..10.0);
        let temptation = rng.gen_range(0.0..10.0);
        let punishment = rng.gen_range(0.0..10.0);
        let reward = sucker + temptation - punishment;
        if (0.0..=10.0).contains(&reward) {
            return PayoffMatrix::new(reward, sucker, temptation, punishment)
                .expect("constructed payoffs are valid");
        }
    }
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// Samples concave games (quadratic coefficient below
/// [`CONCAVE_DELTA_BOUND`]) with a uniform altruist mass and asserts the
/// perversity index never falls below `1 - PI_ASSERT_TOL`. Draws whose
/// all-selfish welfare is numerically zero are rejected and resampled, since
/// the index is undefined there.
///
/// Every tenth of the trial budget additionally probes constructed affine
/// games; findings there are reported in the summary without being
/// asserted.
pub fn verify_theorem1(trials: u64, seed: u64) -> Result<VerificationSummary> {
    require_trials(trials)?;
    let mut summary = VerificationSummary::new("theorem1", seed);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let (g, report) = loop {
            let m = sample_concave(&mut rng);
            let p_a = rng.gen_range(0.0..=1.0);
            let g = GameInstance::new(m, p_a).expect("mass in [0, 1]");
            match perversity_index(&g) {
                Ok(r) if r.best_selfish_welfare > 1e-12 => break (g, r),
                _ => continue,
            }
        };
        summary.trials += 1;
        summary.observe_pi(report.index);
        if report.index < 1.0 - PI_ASSERT_TOL {
            summary.record_failure(
                &g,
                format!("concave game with perversity index {} < 1", report.index),
            );
        }
    }

    let affine_trials = trials / 10;
    let mut probe = AffineProbe {
        trials: affine_trials,
        perverse_found: 0,
        min_pi: None,
    };
    for trial in 0..affine_trials {
        let mut rng = trial_rng(seed, trials + trial);
        let m = sample_affine(&mut rng);
        let p_a = rng.gen_range(0.0..=1.0);
        let g = GameInstance::new(m, p_a).expect("mass in [0, 1]");
        let Ok(report) = perversity_index(&g) else {
            continue;
        };
        if report.best_selfish_welfare <= 1e-12 {
            continue;
        }
        probe.min_pi = Some(probe.min_pi.map_or(report.index, |v| v.min(report.index)));
        if report.index < 1.0 - PI_ASSERT_TOL {
            probe.perverse_found += 1;
        }
    }
    summary.affine = Some(probe);
    summary.into_result()
}

/// Which proof case a concave game with altruistic indifference point
/// `threshold` falls into. The five conditions partition the concave
/// parameter space.
fn proof_case(g: &GameInstance, threshold: f64) -> usize {
    if threshold <= 0.0 {
        0
    } else if threshold >= 1.0 {
        1
    } else if threshold <= g.altruist_mass {
        2
    } else {
        let selfish = all_selfish_equilibria(g);
        match selfish.points.first().map(|p| p.selfish_kind) {
            Some(SupportKind::Interior) => 4,
            _ => 3,
        }
    }
}

/// Samples concave games, dispatches each to the proof case that covers it,
/// and asserts the case-specific behavioral claim on the enumerated
/// equilibrium set:
///
/// * case 1 (`u*_a <= 0`): altruists defect at every equilibrium;
/// * case 2 (`u*_a >= 1`): altruists cooperate fully at every equilibrium;
/// * case 3 (feasible `u*_a <= p_a`): whenever the selfish witness mass is
///   at most `u*_a`, the equilibrium utilization equals `u*_a`;
/// * cases 4 and 5 (feasible `u*_a > p_a`, corner or interior all-selfish
///   set): no heterogeneous equilibrium has lower welfare than the
///   all-selfish equilibrium.
pub fn verify_proof_cases(trials: u64, seed: u64) -> Result<VerificationSummary> {
    require_trials(trials)?;
    let mut summary = VerificationSummary::new("cases", seed);
    let mut counts = [0u64; 5];
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let (g, report) = loop {
            let m = sample_concave(&mut rng);
            let p_a = rng.gen_range(0.0..=1.0);
            let g = GameInstance::new(m, p_a).expect("mass in [0, 1]");
            match perversity_index(&g) {
                Ok(r) if r.best_selfish_welfare > 1e-12 => break (g, r),
                _ => continue,
            }
        };
        summary.trials += 1;
        summary.observe_pi(report.index);

        let IndifferencePoint::Point { u: threshold, .. } =
            g.matrix.interior_equilibrium(AgentType::Altruistic)
        else {
            summary.record_failure(&g, "concave game without an indifference point".into());
            continue;
        };
        let case = proof_case(&g, threshold);
        counts[case] += 1;

        let heterogeneous = enumerate_equilibria(&g);
        let selfish = all_selfish_equilibria(&g);
        if selfish.len() != 1 || selfish.points.len() != 1 {
            summary.record_failure(
                &g,
                format!("concave game with {} all-selfish equilibria", selfish.len()),
            );
            continue;
        }
        let selfish_welfare = g
            .matrix
            .welfare(selfish.points[0].utilization)
            .expect("equilibrium utilization is feasible");

        let violation = heterogeneous.points.iter().find_map(|p| match case {
            0 if p.altruist_cooperators > 1e-9 => Some(format!(
                "case 1: x_a = {} > 0 at u = {}",
                p.altruist_cooperators, p.utilization
            )),
            1 if p.altruist_cooperators < g.altruist_mass - 1e-9 => Some(format!(
                "case 2: x_a = {} < p_a at u = {}",
                p.altruist_cooperators, p.utilization
            )),
            2 if p.selfish_cooperators <= threshold + 1e-9
                && (p.utilization - threshold).abs() > 1e-9 =>
            {
                Some(format!(
                    "case 3: u = {} differs from u*_a = {} although x_s = {} <= u*_a",
                    p.utilization, threshold, p.selfish_cooperators
                ))
            }
            3 | 4 => {
                let w = g.matrix.welfare(p.utilization).expect("feasible u");
                (w < selfish_welfare - 1e-9).then(|| {
                    format!(
                        "case {}: W(u = {}) = {} below all-selfish welfare {}",
                        case + 1,
                        p.utilization,
                        w,
                        selfish_welfare
                    )
                })
            }
            _ => None,
        });
        if let Some(detail) = violation {
            summary.record_failure(&g, detail);
        }
    }
    summary.case_counts = Some(counts);
    summary.into_result()
}

/// Samples Prisoner's Dilemma games and, for each of `pa_samples` uniform
/// altruist masses, checks that the closed-form perversity index agrees
/// with the enumeration route to `1e-9` relative.
pub fn verify_proposition1(games: u64, pa_samples: u64, seed: u64) -> Result<VerificationSummary> {
    require_trials(games)?;
    require_trials(pa_samples)?;
    let mut summary = VerificationSummary::new("proposition1", seed);
    let mut max_gap = 0.0f64;
    for game_idx in 0..games {
        let mut rng = trial_rng(seed, game_idx);
        let m = sample_prisoners_dilemma(&mut rng);
        for _ in 0..pa_samples {
            let p_a = rng.gen_range(0.0..=1.0);
            let g = GameInstance::new(m, p_a).expect("mass in [0, 1]");
            summary.trials += 1;
            let enumerated = match perversity_index(&g) {
                Ok(r) => r.index,
                Err(e) => {
                    summary.record_failure(&g, format!("enumeration route failed: {e}"));
                    continue;
                }
            };
            let closed = match pd_closed_form_pi(&g) {
                Ok(v) => v,
                Err(e) => {
                    summary.record_failure(&g, format!("closed form failed: {e}"));
                    continue;
                }
            };
            summary.observe_pi(enumerated);
            let gap = (enumerated - closed).abs() / enumerated.abs().max(1.0);
            max_gap = max_gap.max(gap);
            if gap > 1e-9 {
                summary.record_failure(
                    &g,
                    format!("closed form {closed} vs enumeration {enumerated} (gap {gap:e})"),
                );
            }
        }
    }
    summary.max_closed_form_gap = Some(max_gap);
    summary.into_result()
}

/// Samples unrestricted games and checks the analytic enumeration against
/// the brute-force grid oracle in both directions: every analytic
/// equilibrium utilization must have an oracle state within one grid step
/// (plus the payoff tolerance), and every oracle state must lie that close
/// to the analytic set.
pub fn verify_oracle_agreement(
    games: u64,
    grid_step: f64,
    tol: f64,
    seed: u64,
) -> Result<VerificationSummary> {
    require_trials(games)?;
    let arguments_valid = grid_step > 0.0 && grid_step <= 1e-2 && tol > 0.0;
    if !arguments_valid {
        return Err(Error::InvalidArgument(format!(
            "grid_step must be in (0, 1e-2] and tol positive, got {grid_step} and {tol}"
        )));
    }
    let bound = grid_step + tol;
    let mut summary = VerificationSummary::new("oracle", seed);
    let mut max_mismatch = 0.0f64;
    for game_idx in 0..games {
        let mut rng = trial_rng(seed, game_idx);
        let m = sample_matrix(&mut rng);
        let p_a = rng.gen_range(0.0..=1.0);
        let g = GameInstance::new(m, p_a).expect("mass in [0, 1]");
        summary.trials += 1;

        let analytic = enumerate_equilibria(&g);
        let states = oracle_equilibria(&g, grid_step, tol);
        if states.is_empty() {
            summary.record_failure(&g, "oracle scan found no equilibria".into());
            continue;
        }
        let oracle_us: Vec<f64> = states.iter().map(|s| s.utilization()).collect();

        let mut worst = 0.0f64;
        let mut detail = None;
        let check_analytic_u = |u: f64, worst: &mut f64, detail: &mut Option<String>| {
            let nearest = oracle_us
                .iter()
                .map(|v| (v - u).abs())
                .fold(f64::INFINITY, f64::min);
            *worst = worst.max(nearest);
            if nearest > bound && detail.is_none() {
                *detail = Some(format!(
                    "no oracle state within {bound} of analytic u = {u}"
                ));
            }
        };
        for p in &analytic.points {
            check_analytic_u(p.utilization, &mut worst, &mut detail);
        }
        for iv in &analytic.intervals {
            let span = iv.upper - iv.lower;
            let samples = (span / grid_step).ceil() as usize + 1;
            for i in 0..=samples {
                let u = iv.lower + span * i as f64 / samples as f64;
                check_analytic_u(u, &mut worst, &mut detail);
            }
        }
        for &u in &oracle_us {
            let d = analytic.distance_to(u);
            worst = worst.max(d);
            if d > bound && detail.is_none() {
                detail = Some(format!(
                    "oracle state at u = {u} is {d} from the analytic set"
                ));
            }
        }
        max_mismatch = max_mismatch.max(worst);
        if let Some(detail) = detail {
            summary.record_failure(&g, detail);
        }
    }
    summary.max_u_mismatch = Some(max_mismatch);
    summary.into_result()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_is_a_precondition_error() {
        assert!(matches!(
            verify_theorem1(0, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_proof_cases(0, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_proposition1(0, 5, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_oracle_agreement(0, 1e-3, 1e-6, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_oracle_agreement(5, 0.5, 1e-6, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn theorem1_smoke_run_is_clean() {
        let summary = verify_theorem1(300, 7).unwrap();
        assert_eq!(summary.trials, 300);
        assert_eq!(summary.failures, 0);
        assert!(summary.min_pi.unwrap() >= 1.0 - PI_ASSERT_TOL);
        let probe = summary.affine.unwrap();
        assert_eq!(probe.trials, 30);
    }

    #[test]
    fn proof_cases_smoke_run_partitions_every_draw() {
        let summary = verify_proof_cases(400, 11).unwrap();
        assert_eq!(summary.failures, 0);
        let counts = summary.case_counts.unwrap();
        assert_eq!(counts.iter().sum::<u64>(), 400);
    }

    #[test]
    fn proposition1_smoke_run_is_tight() {
        let summary = verify_proposition1(60, 10, 3).unwrap();
        assert_eq!(summary.trials, 600);
        assert!(summary.max_closed_form_gap.unwrap() < 1e-9);
    }

    #[test]
    fn oracle_smoke_run_matches() {
        let summary = verify_oracle_agreement(15, 5e-3, 1e-6, 5).unwrap();
        assert_eq!(summary.failures, 0);
        assert!(summary.max_u_mismatch.unwrap() <= 5e-3 + 1e-6);
    }

    #[test]
    fn identical_seeds_reproduce_identical_summaries() {
        let a = verify_theorem1(50, 21).unwrap();
        let b = verify_theorem1(50, 21).unwrap();
        assert_eq!(a, b);
        let a = verify_proof_cases(50, 21).unwrap();
        let b = verify_proof_cases(50, 21).unwrap();
        assert_eq!(a, b);
    }
}

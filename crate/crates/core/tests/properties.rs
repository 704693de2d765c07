//! Property campaigns over random games: algebraic identities of the payoff
//! and welfare functions, structural facts about the equilibrium sets, and
//! agreement between the analytic enumeration, the grid oracle, and the
//! projected flow.

use perversity_core::equilibrium::INDIFFERENCE_TOL;
use perversity_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn payoff() -> impl Strategy<Value = f64> {
    0.0..10.0f64
}

fn matrix_strategy() -> impl Strategy<Value = PayoffMatrix> {
    (payoff(), payoff(), payoff(), payoff())
        .prop_map(|(r, s, t, p)| PayoffMatrix::new(r, s, t, p).unwrap())
}

proptest! {
    /// Welfare decomposes as the mass-weighted selfish payoffs:
    /// W(u) = u f_C_s(u) + (1 - u) f_D_s(u).
    #[test]
    fn welfare_decomposition(m in matrix_strategy(), u in 0.0..=1.0f64) {
        let w = m.welfare(u).unwrap();
        let (c, d) = m.selfish_payoffs(u).unwrap();
        let combined = u * c + (1.0 - u) * d;
        prop_assert!((w - combined).abs() <= 1e-12 * w.abs().max(1.0));
    }

    /// The altruistic cooperate payoff is the welfare slope: it matches the
    /// central finite difference of W.
    #[test]
    fn altruistic_payoff_is_the_welfare_gradient(m in matrix_strategy(), u in 0.001..=0.999f64) {
        let h = 1e-5;
        let fd = (m.welfare(u + h).unwrap() - m.welfare(u - h).unwrap()) / (2.0 * h);
        let (c, _) = m.altruistic_payoffs(u).unwrap();
        prop_assert!((c - fd).abs() <= 1e-6);
    }

    /// f_C_a and f_D_a are exact negations.
    #[test]
    fn altruistic_payoffs_antisymmetric(m in matrix_strategy(), u in 0.0..=1.0f64) {
        let (c, d) = m.altruistic_payoffs(u).unwrap();
        prop_assert_eq!(c, -d);
    }

    /// Both types are exactly indifferent at their interior equilibrium.
    #[test]
    fn indifference_points_balance_payoffs(m in matrix_strategy()) {
        if let IndifferencePoint::Point { u, feasible: true } =
            m.interior_equilibrium(AgentType::Selfish)
        {
            let (c, d) = m.selfish_payoffs(u).unwrap();
            prop_assert!((c - d).abs() <= 1e-12 * c.abs().max(1.0));
        }
        if let IndifferencePoint::Point { u, feasible: true } =
            m.interior_equilibrium(AgentType::Altruistic)
        {
            let (c, d) = m.altruistic_payoffs(u).unwrap();
            prop_assert!((c - d).abs() <= 1e-12 * c.abs().max(1.0));
        }
    }

    /// The interior altruistic equilibrium is the global welfare extremum:
    /// a maximum under concavity, a minimum under convexity.
    #[test]
    fn altruistic_indifference_point_is_the_welfare_extremum(m in matrix_strategy()) {
        let IndifferencePoint::Point { u: v, feasible: true } =
            m.interior_equilibrium(AgentType::Altruistic)
        else {
            return Ok(());
        };
        let wv = m.welfare(v).unwrap();
        let curvature = m.curvature();
        for i in 0..=100 {
            let u = i as f64 / 100.0;
            let w = m.welfare(u).unwrap();
            match curvature {
                Curvature::StrictlyConcave => prop_assert!(wv >= w - 1e-9),
                Curvature::StrictlyConvex => prop_assert!(wv <= w + 1e-9),
                Curvature::Affine => {}
            }
        }
    }

    /// Every enumerated equilibrium point re-verifies the Nash conditions by
    /// direct payoff comparison, with a consistent witness.
    #[test]
    fn enumerated_points_satisfy_nash_conditions(
        m in matrix_strategy(),
        p_a in 0.0..=1.0f64,
    ) {
        let g = GameInstance::new(m, p_a).unwrap();
        let set = enumerate_equilibria(&g);
        prop_assert!(!set.is_empty());
        for p in &set.points {
            prop_assert!(satisfies_equilibrium_conditions(&g, &p.state(), INDIFFERENCE_TOL));
            prop_assert!((p.altruist_cooperators + p.selfish_cooperators - p.utilization).abs() <= 1e-12);
            prop_assert!(g.validate_state(&p.state()).is_ok());
            match p.altruist_kind {
                SupportKind::AllDefect => prop_assert_eq!(p.altruist_cooperators, 0.0),
                SupportKind::AllCooperate => prop_assert_eq!(p.altruist_cooperators, g.altruist_mass),
                SupportKind::Interior => {
                    prop_assert!(m.altruistic_gap(p.utilization).abs() <= INDIFFERENCE_TOL)
                }
            }
            match p.selfish_kind {
                SupportKind::AllDefect => prop_assert_eq!(p.selfish_cooperators, 0.0),
                SupportKind::AllCooperate => prop_assert_eq!(p.selfish_cooperators, g.selfish_mass()),
                SupportKind::Interior => {
                    prop_assert!(m.selfish_gap(p.utilization).abs() <= INDIFFERENCE_TOL)
                }
            }
        }
    }

    /// Flow iterates never leave the feasible box, whatever the step size.
    #[test]
    fn flow_preserves_feasibility(
        m in matrix_strategy(),
        p_a in 0.0..=1.0f64,
        frac_a in 0.0..=1.0f64,
        frac_s in 0.0..=1.0f64,
        dt in 1e-4..=10.0f64,
    ) {
        let g = GameInstance::new(m, p_a).unwrap();
        let mut state = PopulationState::new(frac_a * g.altruist_mass, frac_s * g.selfish_mass());
        for _ in 0..25 {
            state = step_flow(&g, &state, dt).unwrap();
            prop_assert!(g.validate_state(&state).is_ok());
        }
    }
}

/// Stationarity of the flow coincides with the Nash conditions: enumerated
/// equilibria do not move, and random non-equilibrium states do.
#[test]
fn flow_stationarity_matches_nash_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let dt_max = 1e-2;
    for _ in 0..400 {
        let m = PayoffMatrix::new(
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
        )
        .unwrap();
        let g = GameInstance::new(m, rng.gen_range(0.0..=1.0)).unwrap();
        for p in &enumerate_equilibria(&g).points {
            let state = p.state();
            let next = step_flow(&g, &state, dt_max).unwrap();
            let moved = (next.altruist_cooperators - state.altruist_cooperators)
                .hypot(next.selfish_cooperators - state.selfish_cooperators);
            assert!(moved < 1e-12, "equilibrium {p:?} moved by {moved} in {g:?}");
        }
        let state = PopulationState::new(
            rng.gen_range(0.0..=1.0) * g.altruist_mass,
            rng.gen_range(0.0..=1.0) * g.selfish_mass(),
        );
        let next = step_flow(&g, &state, dt_max).unwrap();
        let moved = (next.altruist_cooperators - state.altruist_cooperators)
            .hypot(next.selfish_cooperators - state.selfish_cooperators);
        if moved < 1e-12 {
            assert!(
                satisfies_equilibrium_conditions(&g, &state, 1e-9),
                "stationary state {state:?} violates the Nash conditions in {g:?}"
            );
        }
    }
}

/// Strictly concave welfare leaves each homogeneous population with exactly
/// one equilibrium.
#[test]
fn concave_games_have_singleton_homogeneous_equilibrium_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 1000 {
        let m = PayoffMatrix::new(
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
        )
        .unwrap();
        if m.welfare_coefficients().quadratic >= -1e-6 {
            continue;
        }
        checked += 1;
        let g = GameInstance::new(m, rng.gen_range(0.0..=1.0)).unwrap();
        assert_eq!(
            all_selfish_equilibria(&g).len(),
            1,
            "selfish set not singleton for {m:?}"
        );
        assert_eq!(
            all_altruistic_equilibria(&g).len(),
            1,
            "altruistic set not singleton for {m:?}"
        );
    }
}

/// Analytic enumeration and the grid oracle agree on 1,000 random games.
/// A coarser grid keeps this test quick; the acceptance suite runs the
/// full-resolution campaign.
#[test]
fn analytic_and_oracle_equilibria_agree() {
    let summary = verify_oracle_agreement(1000, 5e-3, 1e-6, 424242).unwrap();
    assert_eq!(summary.failures, 0);
    assert!(summary.max_u_mismatch.unwrap() <= 5e-3 + 1e-6);
}

/// The all-selfish instance compares an equilibrium set against itself, so
/// the index is at most one, and exactly one whenever that set carries a
/// single welfare value, in particular for every strictly concave game.
#[test]
fn perversity_of_the_all_selfish_instance() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let m = PayoffMatrix::new(
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
        )
        .unwrap();
        let g = GameInstance::new(m, 0.0).unwrap();
        let Ok(report) = perversity_index(&g) else {
            continue;
        };
        assert!(report.index <= 1.0 + 1e-9);
        if m.welfare_coefficients().quadratic < -1e-6 {
            assert_eq!(
                report.index, 1.0,
                "concave all-selfish instance not at 1 for {m:?}"
            );
        }
        let selfish = all_selfish_equilibria(&g);
        let (wmin, _) = selfish.worst_welfare(&m).unwrap();
        let (wmax, _) = selfish.best_welfare(&m).unwrap();
        if (wmax - wmin).abs() <= 1e-12 * wmax.abs().max(1.0) {
            assert!((report.index - 1.0).abs() <= 1e-9);
        }
    }
}

/// In convex Prisoner's Dilemmas with a feasible indifference point,
/// perversity appears exactly when the altruist mass reaches it, and the
/// worst equilibrium welfare then equals the closed-form global minimum.
#[test]
fn convex_pd_perversity_threshold_and_witness() {
    let mut rng = ChaCha8Rng::seed_from_u64(31415);
    let mut checked = 0;
    while checked < 500 {
        let (r, s, t, p) = (
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
        );
        let Ok(m) = PayoffMatrix::new(r, s, t, p) else {
            continue;
        };
        if !(s < p && p < r && r < t) || m.curvature() != Curvature::StrictlyConvex {
            continue;
        }
        let IndifferencePoint::Point {
            u: threshold,
            feasible: true,
        } = m.interior_equilibrium(AgentType::Altruistic)
        else {
            continue;
        };
        if threshold <= 0.0 {
            continue;
        }
        checked += 1;
        let w = m.welfare_coefficients();
        let p_a = rng.gen_range(0.0..=1.0);
        let report = perversity_index(&GameInstance::new(m, p_a).unwrap()).unwrap();
        if p_a < threshold {
            assert_eq!(report.index, 1.0);
        } else {
            let global_min = w.constant - w.linear * w.linear / (4.0 * w.quadratic);
            assert!(
                (report.worst_welfare - global_min).abs() <= 1e-9,
                "worst welfare {} differs from the vertex value {}",
                report.worst_welfare,
                global_min
            );
            assert!(report.index <= 1.0 + 1e-12);
        }
    }
}

//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line. Tolerances and runtime budgets are pinned here.
//!
//! Run with `cargo test -p perversity-cli --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use perversity_cli::pi_sweep;
use perversity_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;

fn convex_pd() -> PayoffMatrix {
    PayoffMatrix::new(21.0, 1.0, 22.0, 20.0).unwrap()
}

fn concave_pd() -> PayoffMatrix {
    PayoffMatrix::new(3.0, 1.0, 6.0, 2.0).unwrap()
}

fn check_runtime(elapsed: Duration, budget: Duration, what: &str) {
    assert!(
        elapsed < budget,
        "{what} took {elapsed:?}, over the {budget:?} budget"
    );
}

/// Convex Prisoner's Dilemma sweep: the index is exactly 1 below the
/// altruistic indifference point and drops to 1 - 289/1440 (about a 20%
/// loss) at and above it.
#[test]
fn criterion_1_convex_pd_sweep() {
    let started = Instant::now();
    let breakpoint = 17.0 / 36.0;
    let dropped = 1.0 - 289.0 / 1440.0;
    let rows = pi_sweep(&convex_pd(), 201).unwrap();
    assert!(rows.iter().any(|r| (r.p_a - breakpoint).abs() < 1e-15));
    for r in &rows {
        if r.p_a < breakpoint {
            assert_eq!(r.pi, 1.0, "p_a = {} should sit at 1 exactly", r.p_a);
        } else {
            assert!(
                (r.pi - dropped).abs() <= 1e-9,
                "p_a = {}: pi = {} vs {}",
                r.p_a,
                r.pi,
                dropped
            );
        }
    }
    let elapsed = started.elapsed();
    check_runtime(elapsed, Duration::from_secs(1), "convex sweep");
    println!(
        "acceptance 1 (convex PD sweep): PASS ({} rows, {elapsed:?})",
        rows.len()
    );
}

/// Concave Prisoner's Dilemma sweep: the index follows
/// (-2 p_a^2 + 3 p_a) / 2 + 1 up to p_a = 0.75 and is 1.5625 beyond, with
/// the two branches agreeing at the breakpoint.
#[test]
fn criterion_2_concave_pd_sweep() {
    let started = Instant::now();
    let rows = pi_sweep(&concave_pd(), 201).unwrap();
    for r in &rows {
        let expected = if r.p_a < 0.75 {
            (-2.0 * r.p_a * r.p_a + 3.0 * r.p_a) / 2.0 + 1.0
        } else {
            1.5625
        };
        assert!(
            (r.pi - expected).abs() <= 1e-9,
            "p_a = {}: pi = {} vs {}",
            r.p_a,
            r.pi,
            expected
        );
    }
    let below: f64 = (-2.0 * 0.75 * 0.75 + 3.0 * 0.75) / 2.0 + 1.0;
    assert!(
        (below - 1.5625).abs() <= 1e-12,
        "branches disagree at the breakpoint"
    );
    let at_breakpoint = rows.iter().find(|r| (r.p_a - 0.75).abs() < 1e-15).unwrap();
    assert!((at_breakpoint.pi - 1.5625).abs() <= 1e-9);
    let elapsed = started.elapsed();
    check_runtime(elapsed, Duration::from_secs(1), "concave sweep");
    println!(
        "acceptance 2 (concave PD sweep): PASS ({} rows, {elapsed:?})",
        rows.len()
    );
}

/// Theorem campaign: 10,000 seeded concave games all keep the perversity
/// index at or above 1.
#[test]
fn criterion_3_concave_games_are_never_perverse() {
    let started = Instant::now();
    let summary = verify_theorem1(10_000, SEED).expect("campaign must pass");
    assert_eq!(summary.trials, 10_000);
    assert_eq!(summary.failures, 0);
    assert!(summary.min_pi.unwrap() >= 1.0 - 1e-9);
    let elapsed = started.elapsed();
    check_runtime(elapsed, Duration::from_secs(30), "theorem campaign");
    println!(
        "acceptance 3 (concave never perverse, 10k games): PASS (min pi = {}, {elapsed:?})",
        summary.min_pi.unwrap()
    );
}

/// Dual-path check: closed-form PD index equals the enumeration route on
/// 1,000 games x 50 altruist masses, within 1e-9 relative.
#[test]
fn criterion_4_closed_form_matches_enumeration() {
    let started = Instant::now();
    let summary = verify_proposition1(1_000, 50, SEED).expect("campaign must pass");
    assert_eq!(summary.trials, 50_000);
    assert_eq!(summary.failures, 0);
    let gap = summary.max_closed_form_gap.unwrap();
    assert!(gap <= 1e-9, "max closed-form gap {gap}");
    let elapsed = started.elapsed();
    check_runtime(elapsed, Duration::from_secs(60), "closed-form campaign");
    println!("acceptance 4 (closed form vs enumeration): PASS (max gap = {gap:e}, {elapsed:?})");
}

/// Oracle equivalence: on 200 seeded games the analytic equilibria and the
/// 1e-3 grid oracle match within one grid step in both directions.
#[test]
fn criterion_5_oracle_equivalence() {
    let started = Instant::now();
    let summary = verify_oracle_agreement(200, 1e-3, 1e-6, SEED).expect("campaign must pass");
    assert_eq!(summary.trials, 200);
    assert_eq!(summary.failures, 0);
    let mismatch = summary.max_u_mismatch.unwrap();
    assert!(mismatch <= 1e-3 + 1e-6, "max u mismatch {mismatch}");
    let elapsed = started.elapsed();
    check_runtime(elapsed, Duration::from_secs(120), "oracle campaign");
    println!("acceptance 5 (oracle equivalence): PASS (max mismatch = {mismatch:e}, {elapsed:?})");
}

/// Proof-case suite: 2,000 concave games partition into the five cases,
/// every case is hit at least 50 times, and each case's behavioral claim
/// holds at 1e-9.
#[test]
fn criterion_6_proof_case_suite() {
    let summary = verify_proof_cases(2_000, SEED).expect("campaign must pass");
    assert_eq!(summary.trials, 2_000);
    assert_eq!(summary.failures, 0);
    let counts = summary.case_counts.unwrap();
    assert_eq!(
        counts.iter().sum::<u64>(),
        2_000,
        "cases must partition the draws"
    );
    for (idx, &count) in counts.iter().enumerate() {
        assert!(count >= 50, "case {} hit only {count} times", idx + 1);
    }
    println!("acceptance 6 (proof cases): PASS (counts = {counts:?})");
}

/// Dynamics consistency: 500 games with a well-signed quadratic
/// coefficient; at least 99% of trajectories converge and every converged
/// endpoint satisfies the equilibrium conditions at 1e-6.
#[test]
fn criterion_7_dynamics_consistency() {
    let mut converged = 0u32;
    let trials = 500u64;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        rng.set_stream(trial);
        let (g, init) = loop {
            let m = PayoffMatrix::new(
                rng.gen_range(0.0..10.0),
                rng.gen_range(0.0..10.0),
                rng.gen_range(0.0..10.0),
                rng.gen_range(0.0..10.0),
            )
            .unwrap();
            if m.welfare_coefficients().quadratic.abs() <= 1e-3 {
                continue;
            }
            let g = GameInstance::new(m, rng.gen_range(0.0..=1.0)).unwrap();
            let init = PopulationState::new(
                rng.gen_range(0.0..=1.0) * g.altruist_mass,
                rng.gen_range(0.0..=1.0) * g.selfish_mass(),
            );
            break (g, init);
        };
        let t = integrate(&g, &init, 1e-2, 1_000_000, 1e-8).unwrap();
        if t.converged {
            converged += 1;
            assert!(
                satisfies_equilibrium_conditions(&g, &t.final_state(), 1e-6),
                "converged endpoint violates the equilibrium conditions for {g:?}"
            );
        } else {
            eprintln!("non-converged trajectory for {g:?} from {init:?}");
        }
    }
    let rate = converged as f64 / trials as f64;
    assert!(rate >= 0.99, "convergence rate {rate}");
    println!("acceptance 7 (dynamics consistency): PASS ({converged}/{trials} converged)");
}

/// Core identities on 10,000 random (game, u) pairs: the welfare
/// decomposition through selfish payoffs and the finite-difference gradient
/// identity for the altruistic payoff, both within 1e-6.
#[test]
fn criterion_8_core_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let h = 1e-5;
    let mut max_decomposition = 0.0f64;
    let mut max_gradient = 0.0f64;
    for _ in 0..10_000 {
        let m = PayoffMatrix::new(
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.0..10.0),
        )
        .unwrap();
        let u = rng.gen_range(h..=1.0 - h);
        let w = m.welfare(u).unwrap();
        let (c_s, d_s) = m.selfish_payoffs(u).unwrap();
        let decomposition = (w - (u * c_s + (1.0 - u) * d_s)).abs();
        let fd = (m.welfare(u + h).unwrap() - m.welfare(u - h).unwrap()) / (2.0 * h);
        let (c_a, _) = m.altruistic_payoffs(u).unwrap();
        let gradient = (c_a - fd).abs();
        max_decomposition = max_decomposition.max(decomposition);
        max_gradient = max_gradient.max(gradient);
        assert!(
            decomposition <= 1e-6,
            "decomposition residual {decomposition} for {m:?}"
        );
        assert!(gradient <= 1e-6, "gradient residual {gradient} for {m:?}");
    }
    println!(
        "acceptance 8 (core identities): PASS (max residuals {max_decomposition:e}, {max_gradient:e})"
    );
}

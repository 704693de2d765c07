//! Brute-force grid oracle for validating the analytic equilibrium
//! enumeration. Scans the full `(x_a, x_s)` box and keeps every state whose
//! unilateral deviations fail to improve payoffs beyond a tolerance,
//! checking the equilibrium conditions directly from the payoff functions
//! rather than reusing any of the enumeration logic.

use rayon::prelude::*;

use crate::game::{GameInstance, PopulationState};

/// Default grid spacing for oracle scans.
pub const DEFAULT_GRID_STEP: f64 = 1e-3;

/// Default payoff tolerance for oracle scans.
pub const DEFAULT_PAYOFF_TOL: f64 = 1e-6;

/// Returns every grid state in which, for each type, the strategies carrying
/// positive mass pay at least as much as the alternative within `tol`.
///
/// Corner masses sit exactly on the grid and are checked against `tol`
/// alone; widening them would admit states with a small but genuine
/// incentive to deviate, which can be arbitrarily far from any exact
/// equilibrium. A type split strictly between both strategies must be
/// indifferent, and its indifference point generally falls between grid
/// lines, so an interior mass is also accepted when its payoff difference
/// changes sign within one grid step, but only over utilizations the type
/// can actually reach by shifting its own mass, so indifference points
/// stranded beyond a mass boundary are not mistaken for equilibria.
pub fn oracle_equilibria(g: &GameInstance, grid_step: f64, tol: f64) -> Vec<PopulationState> {
    assert!(
        grid_step > 0.0 && grid_step <= 1e-2,
        "grid_step must be in (0, 1e-2], got {grid_step}"
    );
    assert!(tol > 0.0, "tol must be positive, got {tol}");

    let m = g.matrix;
    let p_a = g.altruist_mass;
    let p_s = g.selfish_mass();

    let gap_a = |u: f64| 2.0 * m.altruistic_cooperate_payoff(u);
    let gap_s = |u: f64| {
        (m.reward * u + m.sucker * (1.0 - u)) - (m.temptation * u + m.punishment * (1.0 - u))
    };

    let altruist_axis = axis_values(p_a, grid_step);
    let selfish_axis = axis_values(p_s, grid_step);

    altruist_axis
        .par_iter()
        .map(|&x_a| {
            let mut row = Vec::new();
            for &x_s in &selfish_axis {
                let u = x_a + x_s;
                if !mass_condition(x_a, p_a, u, grid_step, tol, &gap_a) {
                    continue;
                }
                if !mass_condition(x_s, p_s, u, grid_step, tol, &gap_s) {
                    continue;
                }
                row.push(PopulationState::new(x_a, x_s));
            }
            row
        })
        .reduce(Vec::new, |mut acc, mut row| {
            acc.append(&mut row);
            acc
        })
}

/// Equilibrium condition for one type with cooperator mass `x` of `mass` at
/// utilization `u`: defectors tolerate a cooperate advantage up to `tol`,
/// cooperators a defect advantage up to `tol`, and an interior split is
/// indifferent within `tol` or brackets a sign change of the payoff
/// difference within one grid step of reachable utilizations.
fn mass_condition(
    x: f64,
    mass: f64,
    u: f64,
    grid_step: f64,
    tol: f64,
    gap: &impl Fn(f64) -> f64,
) -> bool {
    if mass == 0.0 {
        return true;
    }
    if x == 0.0 {
        return gap(u) <= tol;
    }
    if x == mass {
        return gap(u) >= -tol;
    }
    if gap(u).abs() <= tol {
        return true;
    }
    // Shifting only this type's mass moves u within [u - x, u - x + mass].
    let lo = (u - grid_step).max(u - x);
    let hi = (u + grid_step).min(u - x + mass);
    gap(lo) <= tol && gap(hi) >= -tol || gap(lo) >= -tol && gap(hi) <= tol
}

/// Grid values `0, step, 2 step, ...` up to and always including `mass`.
fn axis_values(mass: f64, step: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity((mass / step) as usize + 2);
    let mut k = 0u64;
    loop {
        let v = k as f64 * step;
        if v >= mass {
            break;
        }
        values.push(v);
        k += 1;
    }
    values.push(mass);
    values
}

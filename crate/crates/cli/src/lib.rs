//! Library backing the `perversity` command line tool: game-file parsing,
//! analysis documents, perversity sweeps, payoff landscapes, verification
//! suites, and flow integration, with CSV and JSON emitters.

pub mod output;
pub mod spec_file;

use serde::{Deserialize, Serialize};

use output::float_field;
use perversity_core::{
    all_altruistic_equilibria, all_selfish_equilibria, enumerate_equilibria, integrate,
    pd_closed_form_pi, perversity_index, verify_oracle_agreement, verify_proof_cases,
    verify_proposition1, verify_theorem1, AgentType, Curvature, EquilibriumPoint, EquilibriumSet,
    Error, GameInstance, IndifferencePoint, PayoffMatrix, PdClassification, PerversityReport,
    PopulationState, Result, Trajectory, UtilizationInterval, VerificationSummary,
    WelfareCoefficients,
};
pub use spec_file::GameSpecFile;

/// Default number of grid points for sweeps and landscapes.
pub const DEFAULT_GRID: usize = 201;

/// An equilibrium point annotated with its welfare.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnnotatedPoint {
    #[serde(flatten)]
    pub point: EquilibriumPoint,
    pub welfare: f64,
}

/// An equilibrium set with welfare annotations, for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnnotatedSet {
    pub points: Vec<AnnotatedPoint>,
    pub intervals: Vec<UtilizationInterval>,
}

fn annotate(set: &EquilibriumSet, matrix: &PayoffMatrix) -> AnnotatedSet {
    AnnotatedSet {
        points: set
            .points
            .iter()
            .map(|p| AnnotatedPoint {
                point: *p,
                welfare: matrix.welfare_coefficients().eval(p.utilization),
            })
            .collect(),
        intervals: set.intervals.clone(),
    }
}

/// Everything the `analyze` command reports for one game instance.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisDocument {
    pub game: GameInstance,
    pub metadata: std::collections::BTreeMap<String, String>,
    pub welfare: WelfareCoefficients,
    pub curvature: Curvature,
    pub indifference_altruistic: IndifferencePoint,
    pub indifference_selfish: IndifferencePoint,
    pub equilibria: AnnotatedSet,
    pub all_selfish: AnnotatedSet,
    pub all_altruistic: AnnotatedSet,
    pub perversity: Option<PerversityReport>,
    /// Verbatim error message when the perversity index is undefined.
    pub perversity_error: Option<String>,
    pub pd: PdClassification,
    pub pd_closed_form_pi: Option<f64>,
}

/// Analyzes a parsed game file: curvature, welfare coefficients,
/// indifference points with feasibility, complete equilibrium sets with
/// witnesses and welfare, the perversity index, and the Prisoner's Dilemma
/// classification when the ordering applies.
pub fn analyze(spec: &GameSpecFile) -> Result<AnalysisDocument> {
    let g = spec.to_instance()?;
    let matrix = g.matrix;
    let equilibria = enumerate_equilibria(&g);
    let (perversity, perversity_error) = match perversity_index(&g) {
        Ok(report) => (Some(report), None),
        Err(e @ Error::DivisionByZeroWelfare) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let pd = perversity_core::classify_prisoners_dilemma(&g);
    let pd_pi = pd
        .is_prisoners_dilemma
        .then(|| pd_closed_form_pi(&g))
        .transpose()?;
    Ok(AnalysisDocument {
        game: g,
        metadata: spec.metadata.clone(),
        welfare: matrix.welfare_coefficients(),
        curvature: matrix.curvature(),
        indifference_altruistic: matrix.interior_equilibrium(AgentType::Altruistic),
        indifference_selfish: matrix.interior_equilibrium(AgentType::Selfish),
        equilibria: annotate(&equilibria, &matrix),
        all_selfish: annotate(&all_selfish_equilibria(&g), &matrix),
        all_altruistic: annotate(&all_altruistic_equilibria(&g), &matrix),
        perversity,
        perversity_error,
        pd,
        pd_closed_form_pi: pd_pi,
    })
}

/// Flat key/value rendering of an analysis, for the CSV format.
pub fn analysis_csv(doc: &AnalysisDocument) -> String {
    let mut rows = vec![
        format!("R,{}", float_field(doc.game.matrix.reward)),
        format!("S,{}", float_field(doc.game.matrix.sucker)),
        format!("T,{}", float_field(doc.game.matrix.temptation)),
        format!("P,{}", float_field(doc.game.matrix.punishment)),
        format!("p_a,{}", float_field(doc.game.altruist_mass)),
        format!("delta,{}", float_field(doc.welfare.quadratic)),
        format!("beta,{}", float_field(doc.welfare.linear)),
        format!("curvature,{:?}", doc.curvature),
        format!(
            "equilibrium_count,{}",
            doc.equilibria.points.len() + doc.equilibria.intervals.len()
        ),
    ];
    if let IndifferencePoint::Point { u, feasible } = doc.indifference_altruistic {
        rows.push(format!("u_star_a,{}", float_field(u)));
        rows.push(format!("u_star_a_feasible,{feasible}"));
    }
    if let IndifferencePoint::Point { u, feasible } = doc.indifference_selfish {
        rows.push(format!("u_star_s,{}", float_field(u)));
        rows.push(format!("u_star_s_feasible,{feasible}"));
    }
    match (&doc.perversity, &doc.perversity_error) {
        (Some(report), _) => rows.push(format!("pi,{}", float_field(report.index))),
        (None, Some(err)) => rows.push(format!("pi_error,{err}")),
        (None, None) => {}
    }
    output::csv_document("key,value", rows)
}

/// One row of a perversity sweep over the altruist mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_a: f64,
    pub pi: f64,
    pub worst_u: f64,
    pub worst_welfare: f64,
    pub best_selfish_welfare: f64,
    pub equilibrium_count: usize,
}

/// Evaluates the perversity index at `grid` evenly spaced altruist masses,
/// inserting the altruistic indifference point when it is feasible so the
/// breakpoint is sampled exactly. Rows are strictly increasing in `p_a`.
pub fn pi_sweep(matrix: &PayoffMatrix, grid: usize) -> Result<Vec<SweepRow>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid must be at least 2, got {grid}"
        )));
    }
    let mut masses: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
    if let IndifferencePoint::Point { u, feasible: true } =
        matrix.interior_equilibrium(AgentType::Altruistic)
    {
        masses.push(u);
    }
    masses.sort_by(|a, b| a.partial_cmp(b).unwrap());
    masses.dedup();

    let mut rows = Vec::with_capacity(masses.len());
    for p_a in masses {
        let g = GameInstance::new(*matrix, p_a)?;
        let report = perversity_index(&g)?;
        let set = enumerate_equilibria(&g);
        rows.push(SweepRow {
            p_a,
            pi: report.index,
            worst_u: report.worst_heterogeneous.utilization,
            worst_welfare: report.worst_welfare,
            best_selfish_welfare: report.best_selfish_welfare,
            equilibrium_count: set.len(),
        });
    }
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str =
    "p_a,pi,worst_u,worst_welfare,best_selfish_welfare,equilibrium_count";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    output::csv_document(
        SWEEP_CSV_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                float_field(r.p_a),
                float_field(r.pi),
                float_field(r.worst_u),
                float_field(r.worst_welfare),
                float_field(r.best_selfish_welfare),
                r.equilibrium_count
            )
        }),
    )
}

/// Parses a sweep back from its CSV rendering; emitted documents round-trip
/// to identical rows.
pub fn parse_sweep_csv(text: &str) -> std::result::Result<Vec<SweepRow>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == SWEEP_CSV_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(idx, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(format!(
                    "row {}: expected 6 fields, got {}",
                    idx + 1,
                    fields.len()
                ));
            }
            let num = |i: usize| {
                fields[i]
                    .parse::<f64>()
                    .map_err(|e| format!("row {}: field {}: {e}", idx + 1, i))
            };
            Ok(SweepRow {
                p_a: num(0)?,
                pi: num(1)?,
                worst_u: num(2)?,
                worst_welfare: num(3)?,
                best_selfish_welfare: num(4)?,
                equilibrium_count: fields[5]
                    .parse()
                    .map_err(|e| format!("row {}: field 5: {e}", idx + 1))?,
            })
        })
        .collect()
}

/// One row of the payoff/welfare landscape table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LandscapeRow {
    pub u: f64,
    pub welfare: f64,
    pub f_c_s: f64,
    pub f_d_s: f64,
    pub f_c_a: f64,
    pub f_d_a: f64,
    /// Empty for grid rows; names the feature for marker rows.
    pub marker: String,
}

pub const LANDSCAPE_CSV_HEADER: &str = "u,welfare,f_c_s,f_d_s,f_c_a,f_d_a,marker";

/// Tabulates welfare and both types' payoffs on a utilization grid, plus
/// marker rows for the interior indifference points and for the equilibria
/// available to an all-altruistic population.
pub fn landscape(g: &GameInstance, grid: usize) -> Result<Vec<LandscapeRow>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid must be at least 2, got {grid}"
        )));
    }
    let matrix = g.matrix;
    let row = |u: f64, marker: String| -> Result<LandscapeRow> {
        let welfare = matrix.welfare(u)?;
        let (f_c_s, f_d_s) = matrix.selfish_payoffs(u)?;
        let (f_c_a, f_d_a) = matrix.altruistic_payoffs(u)?;
        Ok(LandscapeRow {
            u,
            welfare,
            f_c_s,
            f_d_s,
            f_c_a,
            f_d_a,
            marker,
        })
    };
    let mut rows = Vec::with_capacity(grid + 8);
    for i in 0..grid {
        rows.push(row(i as f64 / (grid - 1) as f64, String::new())?);
    }
    if let IndifferencePoint::Point { u, feasible: true } =
        matrix.interior_equilibrium(AgentType::Altruistic)
    {
        rows.push(row(u, "indifference_altruistic".to_string())?);
    }
    if let IndifferencePoint::Point { u, feasible: true } =
        matrix.interior_equilibrium(AgentType::Selfish)
    {
        rows.push(row(u, "indifference_selfish".to_string())?);
    }
    let stars = all_altruistic_equilibria(g);
    for p in &stars.points {
        rows.push(row(p.utilization, "altruistic_equilibrium".to_string())?);
    }
    for iv in &stars.intervals {
        rows.push(row(iv.lower, "altruistic_equilibrium".to_string())?);
        rows.push(row(iv.upper, "altruistic_equilibrium".to_string())?);
    }
    rows.sort_by(|a, b| a.u.partial_cmp(&b.u).unwrap().then(a.marker.cmp(&b.marker)));
    Ok(rows)
}

pub fn landscape_csv(rows: &[LandscapeRow]) -> String {
    output::csv_document(
        LANDSCAPE_CSV_HEADER,
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                float_field(r.u),
                float_field(r.welfare),
                float_field(r.f_c_s),
                float_field(r.f_d_s),
                float_field(r.f_c_a),
                float_field(r.f_d_a),
                r.marker
            )
        }),
    )
}

/// The verification suites exposed by the `verify` command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifySuite {
    Theorem1,
    Cases,
    Proposition1,
    Oracle,
}

impl VerifySuite {
    pub fn default_trials(self) -> u64 {
        match self {
            VerifySuite::Theorem1 => 10_000,
            VerifySuite::Cases => 2_000,
            VerifySuite::Proposition1 => 1_000,
            VerifySuite::Oracle => 200,
        }
    }
}

/// Altruist-mass samples per game in the proposition-1 suite.
pub const PROPOSITION1_PA_SAMPLES: u64 = 50;

pub fn run_verify(
    suite: VerifySuite,
    trials: Option<u64>,
    seed: u64,
    grid_step: f64,
    tol: f64,
) -> Result<VerificationSummary> {
    let trials = trials.unwrap_or_else(|| suite.default_trials());
    match suite {
        VerifySuite::Theorem1 => verify_theorem1(trials, seed),
        VerifySuite::Cases => verify_proof_cases(trials, seed),
        VerifySuite::Proposition1 => verify_proposition1(trials, PROPOSITION1_PA_SAMPLES, seed),
        VerifySuite::Oracle => verify_oracle_agreement(trials, grid_step, tol, seed),
    }
}

pub const DYNAMICS_CSV_HEADER: &str = "t,x_a,x_s,u";

/// Integrates the projected payoff-difference flow from the given initial
/// state (default: half of each sub-population cooperating).
pub fn dynamics_run(
    g: &GameInstance,
    initial: Option<(f64, f64)>,
    dt: f64,
    max_steps: u64,
    residual_tol: f64,
) -> Result<Trajectory> {
    let (x_a, x_s) = initial.unwrap_or((g.altruist_mass / 2.0, g.selfish_mass() / 2.0));
    let init = PopulationState::new(x_a, x_s);
    integrate(g, &init, dt, max_steps, residual_tol)
}

pub fn trajectory_csv(trajectory: &Trajectory) -> String {
    output::csv_document(
        DYNAMICS_CSV_HEADER,
        trajectory.samples.iter().map(|s| {
            format!(
                "{},{},{},{}",
                float_field(s.time),
                float_field(s.altruist_cooperators),
                float_field(s.selfish_cooperators),
                float_field(s.state().utilization())
            )
        }),
    )
}

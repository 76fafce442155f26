//! Experiment driver: configuration, the table/figure computations, and the
//! CSV and markdown writers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{error_identity, pointwise_bound_check, weighted_sum_bound_check, ErrorReport, IDENTITY_RTOL};
use crate::error::{PodError, Result};
use crate::fem::{assemble_operators, solve_heat_be, HeatProblem, SnapshotSet};
use crate::pod::{
    build_dataset, compute_pod, singular_values, InnerProductKind, PodBasis, PodVariant, DEFAULT_RANK_TOL,
};
use crate::proj::{ProjectionKind, ReducedSpace};
use crate::rom::{run_rom, scaling_factors, InitialRule, RomConfig, ScalingConvention, ScalingFactors};
use crate::synthetic::{instances, SyntheticParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum StepConvention {
    /// `steps` snapshots.
    #[serde(rename = "n")]
    Snapshots,
    /// `steps + 1` snapshots, i.e. `steps` backward-Euler steps.
    #[default]
    #[serde(rename = "n+1")]
    StepsPlusOne,
}

impl StepConvention {
    pub fn snapshots(self, steps: usize) -> usize {
        match self {
            StepConvention::Snapshots => steps,
            StepConvention::StepsPlusOne => steps + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NodeConvention {
    /// `nodes` counts every mesh node, boundary included.
    #[serde(rename = "total")]
    Total,
    /// `nodes` counts elements, so the mesh has `nodes + 1` nodes.
    #[default]
    #[serde(rename = "elements")]
    Elements,
}

impl NodeConvention {
    pub fn total_nodes(self, nodes: usize) -> usize {
        match self {
            NodeConvention::Total => nodes,
            NodeConvention::Elements => nodes + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Command {
    #[serde(rename = "singular-values")]
    SingularValues,
    #[serde(rename = "verify-formulas")]
    VerifyFormulas,
    #[serde(rename = "rom-errors")]
    RomErrors,
    #[serde(rename = "scaling-factors")]
    ScalingFactors,
    #[serde(rename = "identity-sweep")]
    IdentitySweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SingularValues => "singular-values",
            Command::VerifyFormulas => "verify-formulas",
            Command::RomErrors => "rom-errors",
            Command::ScalingFactors => "scaling-factors",
            Command::IdentitySweep => "identity-sweep",
        }
    }

    fn default_steps(self) -> usize {
        match self {
            Command::VerifyFormulas => 200,
            _ => 100,
        }
    }

    fn default_variants(self) -> Vec<PodVariant> {
        match self {
            Command::SingularValues => vec![PodVariant::Standard, PodVariant::NewDq],
            Command::VerifyFormulas | Command::ScalingFactors => vec![PodVariant::NewDq],
            Command::RomErrors | Command::IdentitySweep => PodVariant::ALL.to_vec(),
        }
    }

    fn default_spaces(self) -> Vec<InnerProductKind> {
        match self {
            Command::SingularValues | Command::VerifyFormulas => vec![InnerProductKind::L2],
            _ => InnerProductKind::ALL.to_vec(),
        }
    }
}

/// Every field has a default; a JSON config may set any subset. Fields left
/// as `None` take the default of the command being run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub nodes: usize,
    pub node_convention: NodeConvention,
    pub steps: Option<usize>,
    pub step_convention: StepConvention,
    pub final_time: f64,
    pub r_list: Vec<usize>,
    pub variants: Option<Vec<PodVariant>>,
    /// POD spaces `X`.
    pub spaces: Option<Vec<InnerProductKind>>,
    /// Norm spaces `Y`.
    pub y_spaces: Vec<InnerProductKind>,
    pub projections: Vec<ProjectionKind>,
    pub dt_sweep: Vec<f64>,
    pub figure_nodes: Vec<usize>,
    pub singular_value_count: usize,
    pub initial_rule: InitialRule,
    pub rank_tol: f64,
    pub seed: u64,
    pub instances: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nodes: 100,
            node_convention: NodeConvention::Elements,
            steps: None,
            step_convention: StepConvention::StepsPlusOne,
            final_time: 1.0,
            r_list: vec![4, 6, 8],
            variants: None,
            spaces: None,
            y_spaces: InnerProductKind::ALL.to_vec(),
            projections: ProjectionKind::ALL.to_vec(),
            dt_sweep: vec![1.0 / 40.0, 1.0 / 50.0, 1.0 / 100.0, 1.0 / 200.0, 1.0 / 300.0],
            figure_nodes: vec![20, 50, 100, 150],
            singular_value_count: 20,
            initial_rule: InitialRule::PodProjection,
            rank_tol: DEFAULT_RANK_TOL,
            seed: 0,
            instances: 200,
            out: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PodError::InvalidInput(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(PodError::InvalidInput(m));
        if self.node_convention.total_nodes(self.nodes) < 3 {
            return bad(format!("need at least 3 mesh nodes, got nodes = {}", self.nodes));
        }
        if let Some(s) = self.steps {
            if s < 2 {
                return bad(format!("steps must be at least 2, got {s}"));
            }
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.final_time));
        }
        if self.r_list.is_empty() || self.r_list.contains(&0) {
            return bad("r list must be nonempty with entries >= 1".into());
        }
        if matches!(&self.variants, Some(v) if v.is_empty()) {
            return bad("variant list is empty".into());
        }
        if matches!(&self.spaces, Some(v) if v.is_empty()) {
            return bad("space list is empty".into());
        }
        if self.y_spaces.is_empty() || self.projections.is_empty() {
            return bad("norm-space and projection lists must be nonempty".into());
        }
        if self.dt_sweep.is_empty() {
            return bad("dt sweep is empty".into());
        }
        for &dt in &self.dt_sweep {
            self.steps_for_dt(dt)?;
        }
        if self.figure_nodes.iter().any(|&n| self.node_convention.total_nodes(n) < 3) || self.figure_nodes.is_empty() {
            return bad("figure node counts must be nonempty and give at least 3 mesh nodes".into());
        }
        if self.singular_value_count == 0 {
            return bad("singular value count must be positive".into());
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return bad(format!("rank tolerance must lie in (0, 1), got {}", self.rank_tol));
        }
        if self.instances == 0 {
            return bad("instance count must be positive".into());
        }
        Ok(())
    }

    /// Number of time steps for a sweep entry; `T / Δt` must be an integer.
    pub fn steps_for_dt(&self, dt: f64) -> Result<usize> {
        let q = self.final_time / dt;
        let steps = q.round();
        if !(dt > 0.0) || !q.is_finite() || (q - steps).abs() > 1e-8 * q.max(1.0) || steps < 2.0 {
            return Err(PodError::InvalidInput(format!(
                "dt = {dt} must divide T = {} into at least 2 steps",
                self.final_time
            )));
        }
        Ok(steps as usize)
    }

    pub fn steps_for(&self, cmd: Command) -> usize {
        self.steps.unwrap_or(cmd.default_steps())
    }

    pub fn variants_for(&self, cmd: Command) -> Vec<PodVariant> {
        self.variants.clone().unwrap_or_else(|| cmd.default_variants())
    }

    pub fn spaces_for(&self, cmd: Command) -> Vec<InnerProductKind> {
        self.spaces.clone().unwrap_or_else(|| cmd.default_spaces())
    }

    pub fn heat_problem(&self, nodes: usize, steps: usize) -> HeatProblem {
        let mut p = HeatProblem::test_problem(
            self.node_convention.total_nodes(nodes),
            self.step_convention.snapshots(steps),
        );
        p.final_time = self.final_time;
        p
    }

    pub fn snapshots(&self, nodes: usize, steps: usize) -> Result<SnapshotSet> {
        let p = self.heat_problem(nodes, steps);
        solve_heat_be(&p, &assemble_operators(&p)?)
    }
}

fn basis_for(snaps: &SnapshotSet, variant: PodVariant, x: InnerProductKind, rank_tol: f64) -> Result<PodBasis> {
    compute_pod(&build_dataset(snaps, variant, x)?, rank_tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularValueRow {
    pub variant: PodVariant,
    pub space: InnerProductKind,
    pub nodes: usize,
    pub k: usize,
    pub sigma: f64,
}

/// Leading POD singular values for each figure node count. Fewer than
/// `singular_value_count` rows appear when the discrete space is smaller or
/// the SVD returns exact zeros below round-off.
pub fn singular_value_curves(cfg: &ExperimentConfig) -> Result<Vec<SingularValueRow>> {
    let cmd = Command::SingularValues;
    let steps = cfg.steps_for(cmd);
    let mut rows = Vec::new();
    for variant in cfg.variants_for(cmd) {
        for x in cfg.spaces_for(cmd) {
            for &nodes in &cfg.figure_nodes {
                let snaps = cfg.snapshots(nodes, steps)?;
                let sigma = singular_values(&build_dataset(&snaps, variant, x)?)?;
                for (k, &s) in sigma.iter().take(cfg.singular_value_count).filter(|&&s| s > 0.0).enumerate() {
                    rows.push(SingularValueRow {
                        variant,
                        space: x,
                        nodes,
                        k: k + 1,
                        sigma: s,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Actual data error against the tail-sum formula for every configured
/// `(variant, X, r, projection, Y)`.
pub fn formula_rows(cfg: &ExperimentConfig) -> Result<Vec<ErrorReport>> {
    let cmd = Command::VerifyFormulas;
    let snaps = cfg.snapshots(cfg.nodes, cfg.steps_for(cmd))?;
    let mut rows = Vec::new();
    for variant in cfg.variants_for(cmd) {
        for x in cfg.spaces_for(cmd) {
            let data = build_dataset(&snaps, variant, x)?;
            let basis = compute_pod(&data, cfg.rank_tol)?;
            for &r in &cfg.r_list {
                for &proj in &cfg.projections {
                    for &y in &cfg.y_spaces {
                        rows.push(error_identity(&data, &basis, r, y, proj, snaps.inner())?);
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct RomErrorRow {
    pub variant: PodVariant,
    pub x: InnerProductKind,
    pub r: usize,
    pub dt: f64,
    /// `‖e^N‖²_{L²}`.
    pub final_l2_sq: f64,
    /// `‖∇e^N‖²_{L²}`.
    pub final_h01_sq: f64,
    pub max_l2_sq: f64,
    pub max_h01_sq: f64,
    pub solution_norm_error: f64,
    pub solution_norm_error_tabulated: f64,
    pub phi1_l2: f64,
    pub phi1_h01: f64,
}

pub fn rom_error_rows(cfg: &ExperimentConfig) -> Result<Vec<RomErrorRow>> {
    let cmd = Command::RomErrors;
    let snaps = cfg.snapshots(cfg.nodes, cfg.steps_for(cmd))?;
    let mut rows = Vec::new();
    for x in cfg.spaces_for(cmd) {
        for variant in cfg.variants_for(cmd) {
            let basis = basis_for(&snaps, variant, x, cfg.rank_tol)?;
            for &r in &cfg.r_list {
                let red = ReducedSpace::new(&basis, r)?;
                let rc = RomConfig::new(r, x, snaps.dt()).with_initial_rule(cfg.initial_rule);
                let run = run_rom(&rc, &red, &snaps)?;
                rows.push(RomErrorRow {
                    variant,
                    x,
                    r,
                    dt: snaps.dt(),
                    final_l2_sq: run.final_error_l2(),
                    final_h01_sq: run.final_error_h01(),
                    max_l2_sq: run.max_error_l2(),
                    max_h01_sq: run.max_error_h01(),
                    solution_norm_error: run.solution_norm_error,
                    solution_norm_error_tabulated: run.solution_norm_error_tabulated,
                    phi1_l2: run.phi1_l2,
                    phi1_h01: run.phi1_h01,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub dt: f64,
    pub steps: usize,
    pub pointwise: ErrorReport,
    /// Weighted-sum check, new DQ bases only.
    pub weighted_sum: Option<ErrorReport>,
}

/// Pointwise (and, for new DQ, weighted-sum) projection bounds across the
/// `Δt` sweep.
pub fn bound_rows(cfg: &ExperimentConfig) -> Result<Vec<BoundRow>> {
    let cmd = Command::ScalingFactors;
    let mut rows = Vec::new();
    for &dt in &cfg.dt_sweep {
        let steps = cfg.steps_for_dt(dt)?;
        let snaps = cfg.snapshots(cfg.nodes, steps)?;
        for variant in cfg.variants_for(cmd) {
            for x in cfg.spaces_for(cmd) {
                let basis = basis_for(&snaps, variant, x, cfg.rank_tol)?;
                for &r in &cfg.r_list {
                    for &proj in &cfg.projections {
                        for &y in &cfg.y_spaces {
                            let pointwise = pointwise_bound_check(&snaps, &basis, r, y, proj)?;
                            let weighted_sum = match variant {
                                PodVariant::NewDq => Some(weighted_sum_bound_check(&snaps, &basis, r, y, proj)?),
                                _ => None,
                            };
                            rows.push(BoundRow {
                                dt: snaps.dt(),
                                steps,
                                pointwise,
                                weighted_sum,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub variant: PodVariant,
    pub x: InnerProductKind,
    pub r: usize,
    pub dt: f64,
    pub steps: usize,
    pub convention: ScalingConvention,
    pub factors: ScalingFactors,
}

/// ROM scaling factors `C_1..C_6` across the `Δt` sweep, in both conventions.
pub fn scaling_rows(cfg: &ExperimentConfig) -> Result<Vec<ScalingRow>> {
    let cmd = Command::ScalingFactors;
    let mut rows = Vec::new();
    for &dt in &cfg.dt_sweep {
        let steps = cfg.steps_for_dt(dt)?;
        let snaps = cfg.snapshots(cfg.nodes, steps)?;
        for variant in cfg.variants_for(cmd) {
            for x in cfg.spaces_for(cmd) {
                let basis = basis_for(&snaps, variant, x, cfg.rank_tol)?;
                for &r in &cfg.r_list {
                    let red = ReducedSpace::new(&basis, r)?;
                    let rc = RomConfig::new(r, x, snaps.dt()).with_initial_rule(cfg.initial_rule);
                    let run = run_rom(&rc, &red, &snaps)?;
                    for convention in [ScalingConvention::Theorem, ScalingConvention::Tabulated] {
                        rows.push(ScalingRow {
                            variant,
                            x,
                            r,
                            dt: snaps.dt(),
                            steps,
                            convention,
                            factors: scaling_factors(&run, &red, snaps.inner(), convention)?,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Worst identity defect and bound constants over one random instance.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub instance: usize,
    pub dim: usize,
    pub snapshots: usize,
    pub final_time: f64,
    pub variant: PodVariant,
    pub x: InnerProductKind,
    pub rank: usize,
    /// `max |actual - formula| / scale` over all `r`, `Y` and projections.
    pub max_identity_defect: f64,
    pub max_pointwise_observed: Option<f64>,
    pub pointwise_theory: Option<f64>,
    pub max_weighted_sum_observed: Option<f64>,
    pub weighted_sum_theory: Option<f64>,
}

fn fold_max(acc: Option<f64>, v: Option<f64>) -> Option<f64> {
    match (acc, v) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

pub fn identity_sweep_rows(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let cmd = Command::IdentitySweep;
    let mut rows = Vec::new();
    for (i, snaps) in instances(cfg.seed, cfg.instances, &SyntheticParams::default())?.iter().enumerate() {
        for variant in cfg.variants_for(cmd) {
            for x in cfg.spaces_for(cmd) {
                let data = build_dataset(snaps, variant, x)?;
                let basis = compute_pod(&data, cfg.rank_tol)?;
                let mut row = SweepRow {
                    instance: i,
                    dim: snaps.dim(),
                    snapshots: snaps.len(),
                    final_time: snaps.final_time(),
                    variant,
                    x,
                    rank: basis.rank(),
                    max_identity_defect: 0.0,
                    max_pointwise_observed: None,
                    pointwise_theory: None,
                    max_weighted_sum_observed: None,
                    weighted_sum_theory: None,
                };
                for r in 1..=basis.rank() {
                    for &proj in &cfg.projections {
                        for &y in &cfg.y_spaces {
                            let rep = error_identity(&data, &basis, r, y, proj, snaps.inner())?;
                            row.max_identity_defect = row.max_identity_defect.max(rep.identity_defect() / rep.identity_scale());
                            let pw = pointwise_bound_check(snaps, &basis, r, y, proj)?;
                            row.max_pointwise_observed = fold_max(row.max_pointwise_observed, pw.bound_constant_observed);
                            row.pointwise_theory = pw.bound_constant_theory;
                            if variant == PodVariant::NewDq {
                                let ws = weighted_sum_bound_check(snaps, &basis, r, y, proj)?;
                                row.max_weighted_sum_observed =
                                    fold_max(row.max_weighted_sum_observed, ws.bound_constant_observed);
                                row.weighted_sum_theory = ws.bound_constant_theory;
                            }
                        }
                    }
                }
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// Scientific notation with four significant digits and a two-digit
/// exponent, e.g. `9.761e-06`.
pub fn sci(x: f64) -> String {
    sci_digits(x, 3)
}

pub fn sci_digits(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.decimals$e}");
    let (mant, exp) = s.split_once('e').expect("exponent in {:e} output");
    let e: i32 = exp.parse().expect("integer exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", e.abs())
}

fn sci_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), sci)
}

/// A rectangular table of formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        if !self.title.is_empty() {
            let _ = writeln!(s, "### {}\n", self.title);
        }
        let _ = writeln!(s, "| {} |", self.header.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(self.header.len()));
        for r in &self.rows {
            let _ = writeln!(s, "| {} |", r.join(" | "));
        }
        s
    }
}

/// Output of one command: long-format CSV tables and a markdown document.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub csv: Vec<(String, Table)>,
    pub markdown_name: String,
    pub markdown: String,
}

impl Report {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, t) in &self.csv {
            let p = dir.join(name);
            t.write_csv(&p)?;
            written.push(p);
        }
        let p = dir.join(&self.markdown_name);
        fs::write(&p, &self.markdown)?;
        written.push(p);
        Ok(written)
    }
}

fn dt_label(dt: f64) -> String {
    let inv = 1.0 / dt;
    if (inv - inv.round()).abs() < 1e-8 * inv {
        format!("1/{}", inv.round() as u64)
    } else {
        sci(dt)
    }
}

fn markdown_doc(title: &str, tables: &[Table]) -> String {
    let mut s = format!("# {title}\n\n");
    for t in tables {
        s.push_str(&t.to_markdown());
        s.push('\n');
    }
    s
}

pub fn report_singular_values(cfg: &ExperimentConfig) -> Result<Report> {
    let rows = singular_value_curves(cfg)?;
    let mut csv = Table::new("", &["variant", "space", "nodes", "k", "sigma_k"]);
    for r in &rows {
        csv.push(vec![
            r.variant.label().into(),
            r.space.label().into(),
            r.nodes.to_string(),
            r.k.to_string(),
            sci(r.sigma),
        ]);
    }
    let mut tables = Vec::new();
    for variant in cfg.variants_for(Command::SingularValues) {
        for x in cfg.spaces_for(Command::SingularValues) {
            let mut header = vec!["k".to_string()];
            header.extend(cfg.figure_nodes.iter().map(|n| format!("nodes={n}")));
            let mut t = Table {
                title: format!("{} POD, X = {}", variant.label(), x.label()),
                header,
                rows: Vec::new(),
            };
            for k in 1..=cfg.singular_value_count {
                let mut row = vec![k.to_string()];
                let mut any = false;
                for &n in &cfg.figure_nodes {
                    let cell = rows
                        .iter()
                        .find(|r| r.variant == variant && r.space == x && r.nodes == n && r.k == k);
                    any |= cell.is_some();
                    row.push(cell.map_or_else(|| "NA".into(), |r| sci(r.sigma)));
                }
                if any {
                    t.push(row);
                }
            }
            tables.push(t);
        }
    }
    Ok(Report {
        csv: vec![("singular_values.csv".into(), csv)],
        markdown_name: "singular_values.md".into(),
        markdown: markdown_doc("POD singular values", &tables),
    })
}

pub fn report_formulas(cfg: &ExperimentConfig) -> Result<Report> {
    let rows = formula_rows(cfg)?;
    let header = ["variant", "x", "r", "projection", "y", "actual_error", "formula_value", "relative_defect", "identity_ok"];
    let mut csv = Table::new("", &header);
    for r in &rows {
        csv.push(vec![
            r.variant.label().into(),
            r.x.label().into(),
            r.r.to_string(),
            r.projection.label().into(),
            r.y.label().into(),
            sci(r.actual_error),
            sci(r.formula_value),
            sci(r.identity_defect() / r.identity_scale()),
            r.identity_holds(IDENTITY_RTOL).to_string(),
        ]);
    }
    let mut md = csv.clone();
    md.title = format!(
        "Actual error vs. error formula ({} steps, nodes = {})",
        cfg.steps_for(Command::VerifyFormulas),
        cfg.nodes
    );
    Ok(Report {
        csv: vec![("verify_formulas.csv".into(), csv)],
        markdown_name: "verify_formulas.md".into(),
        markdown: markdown_doc("Error formulas", &[md]),
    })
}

pub fn report_rom_errors(cfg: &ExperimentConfig) -> Result<Report> {
    let rows = rom_error_rows(cfg)?;
    let header = [
        "variant", "x", "r", "dt", "final_l2", "final_h01", "final_l2_sq", "final_h01_sq", "max_l2_sq", "max_h01_sq",
        "solution_norm_error", "solution_norm_error_tabulated", "phi1_l2_sq", "phi1_h01_sq",
    ];
    let mut csv = Table::new("", &header);
    for r in &rows {
        csv.push(vec![
            r.variant.label().into(),
            r.x.label().into(),
            r.r.to_string(),
            sci(r.dt),
            sci(r.final_l2_sq.sqrt()),
            sci(r.final_h01_sq.sqrt()),
            sci(r.final_l2_sq),
            sci(r.final_h01_sq),
            sci(r.max_l2_sq),
            sci(r.max_h01_sq),
            sci(r.solution_norm_error),
            sci(r.solution_norm_error_tabulated),
            sci(r.phi1_l2),
            sci(r.phi1_h01),
        ]);
    }
    let variants = cfg.variants_for(Command::RomErrors);
    let measures: [(&str, fn(&RomErrorRow) -> f64); 3] = [
        ("Final-time L2 error ||e^N||", |r| r.final_l2_sq.sqrt()),
        ("Final-time H01 error ||grad e^N||", |r| r.final_h01_sq.sqrt()),
        ("Solution norm error", |r| r.solution_norm_error_tabulated),
    ];
    let mut tables = Vec::new();
    for (title, f) in measures {
        let mut header = vec!["POD space".to_string(), "r".to_string()];
        header.extend(variants.iter().map(|v| v.label().to_string()));
        let mut t = Table {
            title: title.into(),
            header,
            rows: Vec::new(),
        };
        for x in cfg.spaces_for(Command::RomErrors) {
            for &r in &cfg.r_list {
                let mut row = vec![x.label().to_string(), r.to_string()];
                for &v in &variants {
                    let cell = rows.iter().find(|e| e.x == x && e.r == r && e.variant == v);
                    row.push(cell.map_or_else(|| "NA".into(), |e| sci(f(e))));
                }
                t.push(row);
            }
        }
        tables.push(t);
    }
    Ok(Report {
        csv: vec![("rom_errors.csv".into(), csv)],
        markdown_name: "rom_errors.md".into(),
        markdown: markdown_doc("ROM errors", &tables),
    })
}

pub fn report_scaling_factors(cfg: &ExperimentConfig) -> Result<Report> {
    let cmd = Command::ScalingFactors;
    let bounds = bound_rows(cfg)?;
    let scaling = scaling_rows(cfg)?;
    let dts: Vec<f64> = {
        let mut v: Vec<f64> = bounds.iter().map(|b| b.dt).collect();
        v.dedup();
        v
    };

    let mut bcsv = Table::new(
        "",
        &[
            "variant", "x", "r", "projection", "y", "dt", "pointwise_max", "tail_sum", "observed_constant",
            "theory_constant", "weighted_sum", "weighted_observed", "weighted_theory", "violated",
        ],
    );
    for b in &bounds {
        let p = &b.pointwise;
        let w = b.weighted_sum.as_ref();
        bcsv.push(vec![
            p.variant.label().into(),
            p.x.label().into(),
            p.r.to_string(),
            p.projection.label().into(),
            p.y.label().into(),
            sci(b.dt),
            sci_opt(p.pointwise_max),
            sci(p.formula_value),
            sci_opt(p.bound_constant_observed),
            sci_opt(p.bound_constant_theory),
            sci_opt(w.and_then(|w| w.weighted_sum)),
            sci_opt(w.and_then(|w| w.bound_constant_observed)),
            sci_opt(w.and_then(|w| w.bound_constant_theory)),
            (p.violated || w.is_some_and(|w| w.violated)).to_string(),
        ]);
    }

    let mut ccsv = Table::new(
        "",
        &["variant", "x", "r", "dt", "convention", "err1", "err2", "err3", "C1", "C2", "C3", "C4", "C5", "C6"],
    );
    for s in &scaling {
        let mut row = vec![
            s.variant.label().into(),
            s.x.label().into(),
            s.r.to_string(),
            sci(s.dt),
            convention_label(s.convention).into(),
            sci(s.factors.err1),
            sci(s.factors.err2),
            sci(s.factors.err3),
        ];
        row.extend(s.factors.all().iter().map(|c| sci_opt(*c)));
        ccsv.push(row);
    }

    let dt_header = |first: &[&str]| {
        let mut h: Vec<String> = first.iter().map(|s| s.to_string()).collect();
        h.extend(dts.iter().map(|&d| dt_label(d)));
        h
    };
    let mut tables = Vec::new();
    for variant in cfg.variants_for(cmd) {
        for x in cfg.spaces_for(cmd) {
            for &r in &cfg.r_list {
                let mut t = Table {
                    title: format!("Pointwise scaling factors, {} POD, X = {}, r = {r}", variant.label(), x.label()),
                    header: dt_header(&["Projection", "Y"]),
                    rows: Vec::new(),
                };
                for &proj in &cfg.projections {
                    for &y in &cfg.y_spaces {
                        let mut row = vec![proj.label().to_string(), y.label().to_string()];
                        for &dt in &dts {
                            let cell = bounds.iter().find(|b| {
                                let p = &b.pointwise;
                                b.dt == dt && p.variant == variant && p.x == x && p.r == r && p.projection == proj && p.y == y
                            });
                            row.push(sci_opt_digits(cell.and_then(|b| b.pointwise.bound_constant_observed), 1));
                        }
                        t.push(row);
                    }
                }
                tables.push(t);
            }
        }
        for &r in &cfg.r_list {
            for convention in [ScalingConvention::Tabulated, ScalingConvention::Theorem] {
                let mut t = Table {
                    title: format!(
                        "ROM scaling factors, {} POD, r = {r}, {} convention",
                        variant.label(),
                        convention_label(convention)
                    ),
                    header: dt_header(&["C"]),
                    rows: Vec::new(),
                };
                for i in 0..6 {
                    let mut row = vec![format!("C{}", i + 1)];
                    let mut any = false;
                    for &dt in &dts {
                        let v = scaling
                            .iter()
                            .filter(|s| s.variant == variant && s.r == r && s.dt == dt && s.convention == convention)
                            .find_map(|s| s.factors.all()[i]);
                        any |= v.is_some();
                        row.push(sci_opt_digits(v, 1));
                    }
                    if any {
                        t.push(row);
                    }
                }
                tables.push(t);
            }
        }
    }
    Ok(Report {
        csv: vec![
            ("pointwise_bounds.csv".into(), bcsv),
            ("scaling_factors.csv".into(), ccsv),
        ],
        markdown_name: "scaling_factors.md".into(),
        markdown: markdown_doc("Scaling factors", &tables),
    })
}

fn sci_opt_digits(x: Option<f64>, decimals: usize) -> String {
    x.map_or_else(|| "NA".to_string(), |v| sci_digits(v, decimals))
}

fn convention_label(c: ScalingConvention) -> &'static str {
    match c {
        ScalingConvention::Theorem => "theorem",
        ScalingConvention::Tabulated => "tabulated",
    }
}

pub fn report_identity_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let rows = identity_sweep_rows(cfg)?;
    let mut csv = Table::new(
        "",
        &[
            "instance", "dim", "snapshots", "final_time", "variant", "x", "rank", "max_identity_defect",
            "max_pointwise_observed", "pointwise_theory", "max_weighted_observed", "weighted_theory",
        ],
    );
    for r in &rows {
        csv.push(vec![
            r.instance.to_string(),
            r.dim.to_string(),
            r.snapshots.to_string(),
            sci(r.final_time),
            r.variant.label().into(),
            r.x.label().into(),
            r.rank.to_string(),
            sci(r.max_identity_defect),
            sci_opt(r.max_pointwise_observed),
            sci_opt(r.pointwise_theory),
            sci_opt(r.max_weighted_sum_observed),
            sci_opt(r.weighted_sum_theory),
        ]);
    }
    let mut summary = Table::new(
        format!("{} random instances, seed {}", cfg.instances, cfg.seed),
        &["variant", "x", "worst identity defect", "worst pointwise C / theory", "worst weighted-sum C / theory"],
    );
    for variant in cfg.variants_for(Command::IdentitySweep) {
        for x in cfg.spaces_for(Command::IdentitySweep) {
            let sel: Vec<&SweepRow> = rows.iter().filter(|r| r.variant == variant && r.x == x).collect();
            let defect = sel.iter().map(|r| r.max_identity_defect).fold(0.0, f64::max);
            let rel = |o: Option<f64>, t: Option<f64>| o.zip(t).map(|(o, t)| o / t);
            let pw = sel
                .iter()
                .map(|r| rel(r.max_pointwise_observed, r.pointwise_theory))
                .fold(None, fold_max);
            let ws = sel
                .iter()
                .map(|r| rel(r.max_weighted_sum_observed, r.weighted_sum_theory))
                .fold(None, fold_max);
            summary.push(vec![
                variant.label().into(),
                x.label().into(),
                sci(defect),
                sci_opt(pw),
                sci_opt(ws),
            ]);
        }
    }
    Ok(Report {
        csv: vec![("identity_sweep.csv".into(), csv)],
        markdown_name: "identity_sweep.md".into(),
        markdown: markdown_doc("Identity and bound sweep", &[summary]),
    })
}

pub fn run_command(cmd: Command, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cmd {
        Command::SingularValues => report_singular_values(cfg),
        Command::VerifyFormulas => report_formulas(cfg),
        Command::RomErrors => report_rom_errors(cfg),
        Command::ScalingFactors => report_scaling_factors(cfg),
        Command::IdentitySweep => report_identity_sweep(cfg),
    }
}

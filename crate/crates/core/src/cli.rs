//! Command-line front end for the experiment driver.
//!
//! Exit codes: 0 on success, 1 for invalid arguments or configuration, 2 for
//! filesystem failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{PodError, Result};
use crate::experiment::{run_command, Command, ExperimentConfig, NodeConvention, StepConvention};
use crate::pod::{InnerProductKind, PodVariant};
use crate::proj::ProjectionKind;
use crate::rom::InitialRule;

#[derive(Debug, Parser)]
#[command(name = "podlab", version, about = "POD with difference quotients: table and figure experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub opts: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Cmd {
    /// Leading POD singular values for several mesh sizes
    SingularValues,
    /// Actual data approximation error vs. the tail-sum formula
    VerifyFormulas,
    /// Final-time and solution-norm ROM errors
    RomErrors,
    /// Pointwise projection bounds and ROM scaling factors across the dt sweep
    ScalingFactors,
    /// Identities and bounds on seeded random instances
    IdentitySweep,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::SingularValues => Command::SingularValues,
            Cmd::VerifyFormulas => Command::VerifyFormulas,
            Cmd::RomErrors => Command::RomErrors,
            Cmd::ScalingFactors => Command::ScalingFactors,
            Cmd::IdentitySweep => Command::IdentitySweep,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StepArg {
    #[value(name = "n")]
    N,
    #[value(name = "n+1")]
    NPlusOne,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NodeArg {
    Total,
    Elements,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Standard,
    Dq,
    Newdq,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SpaceArg {
    L2,
    H1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProjectionArg {
    Orthogonal,
    Ritz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitialArg {
    Pod,
    Ritz,
}

impl From<SpaceArg> for InnerProductKind {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::L2 => InnerProductKind::L2,
            SpaceArg::H1 => InnerProductKind::H01,
        }
    }
}

/// Flags override the JSON config, which overrides the defaults.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Mesh size (see --node-convention)
    #[arg(long, global = true)]
    pub nodes: Option<usize>,
    /// Whether --nodes counts all mesh nodes or elements
    #[arg(long, global = true, value_enum)]
    pub node_convention: Option<NodeArg>,
    /// Number of time steps
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Snapshot count: n = steps, n+1 = steps + 1
    #[arg(long, global = true, value_enum)]
    pub step_convention: Option<StepArg>,
    /// Comma-separated reduced dimensions
    #[arg(long = "r", global = true, value_delimiter = ',', num_args = 1..)]
    pub r: Option<Vec<usize>>,
    #[arg(long, global = true, value_enum, value_delimiter = ',', num_args = 1..)]
    pub variant: Option<Vec<VariantArg>>,
    /// POD spaces X
    #[arg(long, global = true, value_enum, value_delimiter = ',', num_args = 1..)]
    pub space: Option<Vec<SpaceArg>>,
    /// Norm spaces Y
    #[arg(long, global = true, value_enum, value_delimiter = ',', num_args = 1..)]
    pub y_space: Option<Vec<SpaceArg>>,
    #[arg(long, global = true, value_enum, value_delimiter = ',', num_args = 1..)]
    pub projection: Option<Vec<ProjectionArg>>,
    /// Comma-separated time steps; fractions like 1/40 are accepted
    #[arg(long, global = true, value_delimiter = ',', num_args = 1.., value_parser = parse_number)]
    pub dt_sweep: Option<Vec<f64>>,
    /// Relative eigenvalue threshold for the numerical rank
    #[arg(long, global = true, value_parser = parse_number)]
    pub rank_tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub initial_rule: Option<InitialArg>,
    /// JSON configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Random instances for identity-sweep
    #[arg(long, global = true)]
    pub instances: Option<usize>,
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

impl Overrides {
    /// Loads `--config` if given and applies the remaining flags on top.
    pub fn resolve(&self, cmd: Command) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                ExperimentConfig::from_json(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(n) = self.nodes {
            c.nodes = n;
            if cmd == Command::SingularValues {
                c.figure_nodes = vec![n];
            }
        }
        if let Some(n) = self.node_convention {
            c.node_convention = match n {
                NodeArg::Total => NodeConvention::Total,
                NodeArg::Elements => NodeConvention::Elements,
            };
        }
        if let Some(s) = self.steps {
            c.steps = Some(s);
        }
        if let Some(s) = self.step_convention {
            c.step_convention = match s {
                StepArg::N => StepConvention::Snapshots,
                StepArg::NPlusOne => StepConvention::StepsPlusOne,
            };
        }
        if let Some(r) = &self.r {
            c.r_list = r.clone();
        }
        if let Some(v) = &self.variant {
            c.variants = Some(
                v.iter()
                    .map(|v| match v {
                        VariantArg::Standard => PodVariant::Standard,
                        VariantArg::Dq => PodVariant::StandardDq,
                        VariantArg::Newdq => PodVariant::NewDq,
                    })
                    .collect(),
            );
        }
        if let Some(s) = &self.space {
            c.spaces = Some(s.iter().map(|&s| s.into()).collect());
        }
        if let Some(s) = &self.y_space {
            c.y_spaces = s.iter().map(|&s| s.into()).collect();
        }
        if let Some(p) = &self.projection {
            c.projections = p
                .iter()
                .map(|p| match p {
                    ProjectionArg::Orthogonal => ProjectionKind::Orthogonal,
                    ProjectionArg::Ritz => ProjectionKind::Ritz,
                })
                .collect();
        }
        if let Some(d) = &self.dt_sweep {
            c.dt_sweep = d.clone();
        }
        if let Some(t) = self.rank_tol {
            c.rank_tol = t;
        }
        if let Some(i) = self.initial_rule {
            c.initial_rule = match i {
                InitialArg::Pod => InitialRule::PodProjection,
                InitialArg::Ritz => InitialRule::RitzProjection,
            };
        }
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(n) = self.instances {
            c.instances = n;
        }
        c.validate()?;
        Ok(c)
    }
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let cmd: Command = cli.command.into();
    let cfg = cli.opts.resolve(cmd)?;
    let report = run_command(cmd, &cfg)?;
    report.write(&cfg.out)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(paths) => {
            let mut out = std::io::stdout().lock();
            for p in paths {
                let _ = writeln!(out, "{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("podlab: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &PodError) -> i32 {
    if e.is_io() {
        2
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("podlab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn lists_and_fractions() {
        let cli = parse(&["rom-errors", "--r", "1,2", "--dt-sweep", "1/40,0.5", "--variant", "dq", "newdq"]);
        let c = cli.opts.resolve(Command::RomErrors).unwrap();
        assert_eq!(c.r_list, vec![1, 2]);
        assert_eq!(c.dt_sweep, vec![0.025, 0.5]);
        assert_eq!(c.variants, Some(vec![PodVariant::StandardDq, PodVariant::NewDq]));
    }

    #[test]
    fn step_convention_values() {
        let c = parse(&["verify-formulas", "--step-convention", "n"]).opts.resolve(Command::VerifyFormulas).unwrap();
        assert_eq!(c.step_convention, StepConvention::Snapshots);
        let c = parse(&["verify-formulas", "--step-convention", "n+1"]).opts.resolve(Command::VerifyFormulas).unwrap();
        assert_eq!(c.step_convention, StepConvention::StepsPlusOne);
    }

    #[test]
    fn space_names() {
        let c = parse(&["rom-errors", "--space", "h1"]).opts.resolve(Command::RomErrors).unwrap();
        assert_eq!(c.spaces, Some(vec![InnerProductKind::H01]));
    }

    #[test]
    fn bad_values_exit_1() {
        assert_eq!(run(["podlab", "rom-errors", "--variant", "bogus"]), 1);
        assert_eq!(run(["podlab", "rom-errors", "--steps", "1"]), 1);
        assert_eq!(run(["podlab", "nope"]), 1);
    }

    #[test]
    fn number_parser() {
        assert_eq!(parse_number("1/4").unwrap(), 0.25);
        assert_eq!(parse_number("1e-3").unwrap(), 1e-3);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("x").is_err());
    }
}

//! Drive a command from a JSON config and print its markdown report.

use podlab::experiment::{run_command, Command, ExperimentConfig};

fn main() -> podlab::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{ "nodes": 50, "steps": 50, "r_list": [2, 4], "variants": ["standard", "newdq"] }"#,
    )?;
    let report = run_command(Command::RomErrors, &cfg)?;
    print!("{}", report.markdown);
    Ok(())
}

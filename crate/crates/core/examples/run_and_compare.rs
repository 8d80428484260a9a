//! The file-based pipeline: run a configuration, solve it exactly, write
//! both artifact sets, and compare them.
//!
//! cargo run --release --example run_and_compare [output-dir]

use tdqmc::config::RunConfig;
use tdqmc::runner::{self, OracleMethod};

const CONFIG: &str = r#"
[lattice]
dim = 1
chain = 2
lattice_constant = 4.0

[grid]
extent = 16.0
points = 64

[ensemble]
walkers = 300
init = "delocalized"

[stepping]
max_steps = 800

[sigma]
value = 0.5
"#;

fn main() -> tdqmc::Result<()> {
    let root = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/run_and_compare".into()));
    let config = RunConfig::from_toml(CONFIG)?;

    let run = runner::run(&config)?;
    let manifest = run.write(root.join("tdqmc"))?;
    println!("run: S_L {:.4}, wrote {:?}", manifest.summary.linear_entropy, manifest.artifacts);

    let exact = runner::oracle(&config, OracleMethod::Exact)?;
    let manifest = exact.write(root.join("oracle"))?;
    println!("oracle: S_L {:.4}, wrote {:?}", manifest.summary.linear_entropy, manifest.artifacts);

    let comparison = runner::compare(root.join("tdqmc"), root.join("oracle"))?;
    println!("\n{}", comparison.report());
    Ok(())
}

//! Variational choice of the nonlocal length: the energy of the relaxed
//! diatomic ensemble for several sigma, including the mean-field limit.
//!
//! cargo run --release --example sigma_scan [walkers]

use tdqmc::{
    optimize_sigma, Grid, InitOptions, InitialWave, LatticeSpec, RelaxParams, Sigma, StepParams,
};

fn main() -> tdqmc::Result<()> {
    let walkers = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let spec = LatticeSpec::chain(2, 4.0)?;
    let grid = Grid::new(1, 16.0, 128)?;
    let candidates: Vec<Sigma> = ["0.25", "0.5", "1", "2", "4", "inf"]
        .iter()
        .map(|s| s.parse())
        .collect::<tdqmc::Result<_>>()?;
    let init = InitOptions {
        shape: InitialWave::Delocalized,
        width: 1.0,
    };
    let params = RelaxParams {
        max_steps: 800,
        ..RelaxParams::default()
    };
    let step = StepParams::new(0.01, &grid)?;
    let (_, scan) = optimize_sigma(&spec, &grid, 2, walkers, &candidates, &step, &params, init, 1)?;
    println!("sigma      energy");
    for (sigma, energy) in &scan.curve {
        let mark = if *sigma == scan.best { "  <- best" } else { "" };
        println!("{:<8} {energy:10.5}{mark}", sigma.to_string());
    }
    Ok(())
}

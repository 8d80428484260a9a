//! Two interacting electrons on a diatomic molecule. Prints the global
//! linear entropy and the 21-zone local entropy profile, which peaks
//! midway between the atoms.
//!
//! cargo run --release --example diatomic_entanglement [walkers]

use tdqmc::{
    init_ensemble, linear_entropy, local_entropy_map, relax, Grid, InitOptions, InitialWave, LatticeSpec,
    RelaxParams, Sigma, SigmaParams, StepParams, ZonePartition,
};

fn main() -> tdqmc::Result<()> {
    let walkers = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(400);
    let spec = LatticeSpec::chain(2, 4.0)?;
    let grid = Grid::new(1, 16.0, 128)?;
    let init = InitOptions {
        shape: InitialWave::Delocalized,
        width: 1.0,
    };
    let sigma = SigmaParams::uniform(2, Sigma::finite(0.5)?);
    let state = init_ensemble(&spec, &grid, 2, walkers, sigma, 1, init)?;
    let params = RelaxParams {
        max_steps: 1000,
        ..RelaxParams::default()
    };
    let (state, report) = relax(state, &spec, &grid, &StepParams::new(0.01, &grid)?, &params)?;
    println!("energy {:.5} after {} steps", report.trailing_mean_energy, report.steps_taken);
    for i in 0..2 {
        println!("electron {i}: S_L = {:.4}", linear_entropy(state.waves(i))?);
    }

    let partition = ZonePartition::new(grid, 21)?;
    let map = local_entropy_map(&state, 0, &partition)?;
    println!("\nzone   x-range            S_L     walkers");
    for z in 0..partition.zone_count() {
        let (lo, hi) = partition.strip_bounds(z);
        let value = map.get(z).map_or("  empty".to_string(), |v| format!("{v:7.4}"));
        let bar = "#".repeat(map.get(z).map_or(0, |v| (v * 40.0) as usize));
        println!("{z:>4}  [{lo:6.2}, {hi:6.2})  {value}  {:>5}  {bar}", map.walker_counts[z]);
    }
    Ok(())
}

//! Local linear entropy against local coherence for the diatomic molecule:
//! where entanglement is high, coherence is low.
//!
//! cargo run --release --example coherence_map [walkers]

use tdqmc::quantum_info::{map_correlation, mean_maps};
use tdqmc::{
    init_ensemble, linear_coherence, reduced_density_matrix, relax, Grid, InitOptions, InitialWave,
    LatticeSpec, RelaxParams, Sigma, SigmaParams, StepParams, ZonePartition,
};

fn main() -> tdqmc::Result<()> {
    let walkers = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(400);
    let spec = LatticeSpec::chain(2, 4.0)?;
    let grid = Grid::new(1, 16.0, 128)?;
    let init = InitOptions {
        shape: InitialWave::Delocalized,
        width: 1.0,
    };
    let state = init_ensemble(&spec, &grid, 2, walkers, SigmaParams::uniform(2, Sigma::finite(0.5)?), 1, init)?;
    let params = RelaxParams {
        max_steps: 1000,
        ..RelaxParams::default()
    };
    let (state, _) = relax(state, &spec, &grid, &StepParams::new(0.01, &grid)?, &params)?;

    let rdm = reduced_density_matrix(state.waves(0))?;
    println!(
        "global: purity {:.4}, coherence {:.4}, effective area {:.2}",
        rdm.purity(),
        linear_coherence(&rdm),
        rdm.effective_area()
    );
    let partition = ZonePartition::new(grid, 21)?;
    let (entropy, coherence) = mean_maps(&state, &partition)?;
    println!("\nzone   entropy  coherence");
    for z in 0..partition.zone_count() {
        if let (Some(s), Some(c)) = (entropy.get(z), coherence.get(z)) {
            println!("{z:>4}   {s:7.4}  {c:9.4}");
        }
    }
    if let Some(r) = map_correlation(&entropy, &coherence) {
        println!("\nPearson(entropy, coherence) = {r:.4}");
    }
    Ok(())
}

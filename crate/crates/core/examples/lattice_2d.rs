//! Two electrons on a two-site molecule in the plane. Prints the 21 x 21
//! local entropy map as a character heatmap; entanglement concentrates on
//! the bridge between the sites.
//!
//! cargo run --release --example lattice_2d [walkers]

use tdqmc::quantum_info::mean_maps;
use tdqmc::{
    init_ensemble, relax, Grid, InitOptions, InitialWave, LatticeSpec, RelaxParams, Sigma, SigmaParams,
    StepParams, ZonePartition,
};

const SHADES: &[u8] = b" .:-=+*#%@";

fn main() -> tdqmc::Result<()> {
    let walkers = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(400);
    let spec = LatticeSpec::new(2, vec![[0, 0], [1, 0]], vec![], 4.0)?;
    let grid = Grid::new(2, 12.0, 32)?;
    let init = InitOptions {
        shape: InitialWave::Delocalized,
        width: 1.0,
    };
    let state = init_ensemble(&spec, &grid, 2, walkers, SigmaParams::uniform(2, Sigma::finite(0.5)?), 1, init)?;
    let params = RelaxParams {
        max_steps: 400,
        ..RelaxParams::default()
    };
    let (state, report) = relax(state, &spec, &grid, &StepParams::new(0.01, &grid)?, &params)?;
    println!("energy {:.5}", report.trailing_mean_energy);

    let partition = ZonePartition::new(grid, 21)?;
    let (entropy, _) = mean_maps(&state, &partition)?;
    let top = entropy.non_empty().map(|(_, v)| v).fold(0.0, f64::max);
    for zy in (0..21).rev() {
        let row: String = (0..21)
            .map(|zx| match entropy.get(zy * 21 + zx) {
                None => ' ',
                Some(v) => SHADES[((v / top) * (SHADES.len() - 1) as f64).round() as usize] as char,
            })
            .collect();
        println!("|{row}|");
    }
    println!("max local S_L {top:.4}");
    Ok(())
}

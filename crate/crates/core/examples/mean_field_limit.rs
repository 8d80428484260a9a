//! With sigma = inf and partners entering through their guide-wave
//! densities, the ensemble relaxes to the Hartree solution.
//!
//! cargo run --release --example mean_field_limit

use tdqmc::oracle::{hartree_ground_state, HartreeParams};
use tdqmc::{
    init_ensemble, purity, relax, Field, Grid, InitOptions, InitialWave, LatticeSpec, PartnerSource,
    RelaxParams, Sigma, SigmaParams, StepParams,
};

fn main() -> tdqmc::Result<()> {
    let spec = LatticeSpec::chain(2, 4.0)?;
    let grid = Grid::new(1, 16.0, 128)?;
    let dtau = 0.01;
    let init = InitOptions {
        shape: InitialWave::Localized,
        width: 1.0,
    };
    let state = init_ensemble(&spec, &grid, 2, 8, SigmaParams::uniform(2, Sigma::Infinite), 3, init)?;
    let initial: Vec<Field> = (0..2).map(|i| state.waves(i)[0].clone()).collect();
    let params = RelaxParams {
        max_steps: 20000,
        energy_tol: 0.0,
        source: PartnerSource::GuideDensity,
        ..RelaxParams::default()
    };
    let (state, report) = relax(state, &spec, &grid, &StepParams::new(dtau, &grid)?, &params)?;

    let hartree_params = HartreeParams {
        dtau: Some(dtau),
        ..HartreeParams::default()
    };
    let hartree = hartree_ground_state(&spec, &grid, &initial, &hartree_params)?;
    for i in 0..2 {
        let rho = state.electron_density(i);
        let gap = rho
            .values()
            .iter()
            .zip(hartree.densities[i].values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!("electron {i}: max density difference {gap:.2e}, purity {:.12}", purity(state.waves(i))?);
    }
    println!("{} relaxation steps", report.steps_taken);
    println!("Hartree energy {:.8} after {} iterations", hartree.total_energy, hartree.iterations);
    Ok(())
}

//! One electron in a harmonic well relaxes to the analytic ground state
//! E = 1/2 while its walkers settle into |phi|^2.
//!
//! cargo run --release --example harmonic_well

use tdqmc::oracle::exact_ground_state_1p;
use tdqmc::{
    init_ensemble, relax_in_potential, Field, Grid, InitOptions, InitialWave, LatticeSpec, Position,
    RelaxParams, Sigma, SigmaParams, StepParams,
};

fn main() -> tdqmc::Result<()> {
    let grid = Grid::new(1, 20.0, 256)?;
    let harmonic = Field::from_fn(grid, |r: Position| 0.5 * r.coord(0).powi(2));
    // a single site at the origin only seeds the initial Gaussian
    let spec = LatticeSpec::chain(1, 20.0)?;
    let init = InitOptions {
        shape: InitialWave::Localized,
        width: 2.5,
    };
    let state = init_ensemble(&spec, &grid, 1, 2000, SigmaParams::uniform(1, Sigma::Infinite), 7, init)?;
    let params = RelaxParams {
        max_steps: 1500,
        energy_tol: 0.0,
        ..RelaxParams::default()
    };
    let (state, report) = relax_in_potential(state, &harmonic, &spec, &grid, &StepParams::new(0.01, &grid)?, &params)?;

    let (_, exact) = exact_ground_state_1p(&harmonic)?;
    println!("relaxed energy   {:.10}", report.final_energy);
    println!("dense eigenvalue {exact:.10}");
    println!("analytic         0.5");

    let xs: Vec<f64> = state.positions(0).iter().map(|r| r.coord(0)).collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
    println!("walker variance  {var:.4} (|phi|^2 has 0.5)");
    Ok(())
}

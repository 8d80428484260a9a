//! A nine-site chain with its central site removed. Local entanglement is
//! enhanced at the vacancy.
//!
//! cargo run --release --example vacancy_chain [walkers]

use tdqmc::quantum_info::mean_maps;
use tdqmc::{
    init_ensemble, relax, Grid, InitOptions, InitialWave, LatticeSpec, RelaxParams, Sigma, SigmaParams,
    StepParams, ZonePartition,
};

fn main() -> tdqmc::Result<()> {
    let walkers = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(300);
    let d = 2.0;
    let spec = LatticeSpec::chain(9, d)?.with_vacancies(vec![[4, 0]])?;
    let grid = Grid::new(1, 9.0 * d, 128)?;
    let electrons = 8;
    let init = InitOptions {
        shape: InitialWave::Delocalized,
        width: 1.0,
    };
    let sigma = SigmaParams::uniform(electrons, Sigma::finite(0.5)?);
    let state = init_ensemble(&spec, &grid, electrons, walkers, sigma, 1, init)?;
    let params = RelaxParams {
        max_steps: 800,
        ..RelaxParams::default()
    };
    let (state, _) = relax(state, &spec, &grid, &StepParams::new(0.01, &grid)?, &params)?;

    let partition = ZonePartition::new(grid, 21)?;
    let (entropy, _) = mean_maps(&state, &partition)?;
    let vacancy = partition.zone_of(spec.site_position([4, 0]));
    let sites: Vec<usize> = spec.occupied_positions().into_iter().map(|r| partition.zone_of(r)).collect();
    println!("zone   S_L     walkers");
    for z in 0..partition.zone_count() {
        let tag = if z == vacancy {
            "  <- vacancy"
        } else if sites.contains(&z) {
            "  site"
        } else {
            ""
        };
        let value = entropy.get(z).map_or("  empty".to_string(), |v| format!("{v:7.4}"));
        println!("{z:>4}  {value}  {:>6}{tag}", entropy.walker_counts[z]);
    }
    Ok(())
}

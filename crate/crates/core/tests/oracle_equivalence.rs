//! Small, fast versions of the oracle comparisons: every expected value is
//! produced by an independent solver on the same grid.

use approx::assert_abs_diff_eq;
use tdqmc::oracle::{exact_ground_state_1p, exact_ground_state_2p, exact_rdm, hartree_ground_state, HartreeParams, TwoBodyParams};
use tdqmc::quantum_info::{map_correlation, mean_maps};
use tdqmc::{
    init_ensemble, linear_entropy, relax, sample_on_grid, Field, Grid, InitOptions, InitialWave, LatticeSpec,
    PartnerSource, RelaxParams, Sigma, SigmaParams, StepParams, ZonePartition,
};

fn delocalized() -> InitOptions {
    InitOptions {
        shape: InitialWave::Delocalized,
        width: 1.0,
    }
}

#[test]
fn non_interacting_pair_relaxes_to_product_ground_state() {
    let spec = LatticeSpec::chain(2, 4.0).unwrap().with_ee_strength(0.0).unwrap();
    let grid = Grid::new(1, 16.0, 64).unwrap();
    let state = init_ensemble(&spec, &grid, 2, 50, SigmaParams::uniform(2, Sigma::Finite(0.5)), 3, delocalized()).unwrap();
    let params = RelaxParams {
        max_steps: 6000,
        energy_tol: 0.0,
        ..RelaxParams::default()
    };
    let (state, report) = relax(state, &spec, &grid, &StepParams::new(0.01, &grid).unwrap(), &params).unwrap();

    let (_, e1) = exact_ground_state_1p(&sample_on_grid(&spec, &grid).unwrap()).unwrap();
    assert_abs_diff_eq!(report.final_energy, 2.0 * e1, epsilon = 1e-6);
    // the ensemble relaxes to the split-step fixed point, which the Hartree
    // solver reproduces at the same time step when the repulsion is off
    let initial: Vec<Field> = (0..2).map(|_| state.waves(0)[0].clone()).collect();
    let reference = hartree_ground_state(
        &spec,
        &grid,
        &initial,
        &HartreeParams {
            dtau: Some(0.01),
            ..HartreeParams::default()
        },
    )
    .unwrap();
    for i in 0..2 {
        let rho = state.electron_density(i);
        for (a, b) in rho.values().iter().zip(reference.densities[i].values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        assert!(linear_entropy(state.waves(i)).unwrap() < 1e-10);
    }

    let psi = exact_ground_state_2p(&spec, &grid, &TwoBodyParams::default()).unwrap();
    assert_abs_diff_eq!(psi.energy(), 2.0 * e1, epsilon = 1e-6);
    assert_abs_diff_eq!(exact_rdm(&psi).purity(), 1.0, epsilon = 1e-8);
}

#[test]
fn mean_field_ensemble_reaches_the_hartree_fixed_point() {
    let spec = LatticeSpec::chain(2, 4.0).unwrap();
    let grid = Grid::new(1, 16.0, 64).unwrap();
    let init = InitOptions {
        shape: InitialWave::Localized,
        width: 1.0,
    };
    let state = init_ensemble(&spec, &grid, 2, 3, SigmaParams::uniform(2, Sigma::Infinite), 1, init).unwrap();
    let initial: Vec<Field> = (0..2).map(|i| state.waves(i)[0].clone()).collect();
    let params = RelaxParams {
        max_steps: 8000,
        energy_tol: 0.0,
        source: PartnerSource::GuideDensity,
        ..RelaxParams::default()
    };
    let dtau = 0.02;
    let (state, _) = relax(state, &spec, &grid, &StepParams::new(dtau, &grid).unwrap(), &params).unwrap();
    let hartree = hartree_ground_state(
        &spec,
        &grid,
        &initial,
        &HartreeParams {
            dtau: Some(dtau),
            ..HartreeParams::default()
        },
    )
    .unwrap();
    for i in 0..2 {
        let rho = state.electron_density(i);
        for (a, b) in rho.values().iter().zip(hartree.densities[i].values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-8);
        }
    }
}

#[test]
fn interacting_diatomic_is_entangled_like_the_oracle() {
    let spec = LatticeSpec::chain(2, 4.0).unwrap();
    let grid = Grid::new(1, 16.0, 64).unwrap();
    let state = init_ensemble(&spec, &grid, 2, 200, SigmaParams::uniform(2, Sigma::Finite(0.5)), 2, delocalized()).unwrap();
    let params = RelaxParams {
        max_steps: 600,
        ..RelaxParams::default()
    };
    let (state, _) = relax(state, &spec, &grid, &StepParams::new(0.01, &grid).unwrap(), &params).unwrap();
    let psi = exact_ground_state_2p(&spec, &grid, &TwoBodyParams::default()).unwrap();
    let exact = 1.0 - exact_rdm(&psi).purity();
    let s_l = linear_entropy(state.waves(0)).unwrap();
    assert!(exact > 0.3, "oracle S_L {exact}");
    assert!((s_l - exact).abs() < 0.1, "TDQMC S_L {s_l} vs oracle {exact}");

    let partition = ZonePartition::new(grid, 21).unwrap();
    let (entropy, coherence) = mean_maps(&state, &partition).unwrap();
    assert!(map_correlation(&entropy, &coherence).unwrap() < -0.5);
}

//! Exact two-electron ground state of the diatomic molecule in
//! configuration space: energy, reduced density matrix spectrum, and the
//! local entropy map built from conditional waves.
//!
//! cargo run --release --example oracle_two_body

use tdqmc::oracle::{exact_ground_state_2p, exact_local_maps, exact_rdm, TwoBodyParams};
use tdqmc::{Grid, LatticeSpec, ZonePartition};

fn main() -> tdqmc::Result<()> {
    let spec = LatticeSpec::chain(2, 4.0)?;
    let grid = Grid::new(1, 16.0, 128)?;
    let psi = exact_ground_state_2p(&spec, &grid, &TwoBodyParams::default())?;
    println!("energy {:.8} after {} steps (converged: {})", psi.energy(), psi.steps(), psi.converged());
    println!("exchange asymmetry {:.2e}", psi.exchange_asymmetry());

    let rdm = exact_rdm(&psi);
    println!("purity {:.6}, linear entropy {:.6}", rdm.purity(), 1.0 - rdm.purity());
    let eig = rdm.eigenvalues();
    println!("leading natural occupations {:.5?}", &eig[..4]);

    let partition = ZonePartition::new(grid, 21)?;
    let (entropy, coherence) = exact_local_maps(&psi, &partition, 4000, 1)?;
    println!("\nzone   entropy  coherence  samples");
    for z in 0..partition.zone_count() {
        if let (Some(s), Some(c)) = (entropy.get(z), coherence.get(z)) {
            println!("{z:>4}   {s:7.4}  {c:9.4}  {:>7}", entropy.walker_counts[z]);
        }
    }
    Ok(())
}

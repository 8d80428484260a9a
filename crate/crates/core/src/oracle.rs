//! Reference solvers: exact one-particle ground states, a deterministic
//! Hartree fixed-point solver, and the two-particle ground state on the
//! full configuration-space grid with its partial trace and local maps.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::sample_position;
use crate::error::{Result, TdqmcError};
use crate::grid::{Field, Grid, Position, RealField};
use crate::potentials::{coulomb_ee, sample_on_grid, LatticeSpec};
use crate::propagator::GuideWaveStepper;
use crate::quantum_info::{
    coherence_map_from, entropy_map_from, map_from_stats, EntropyMap, MapKind, ReducedDensityMatrix, ZonePartition,
    ZoneStats,
};
use crate::spectral::{KineticPropagator, PeriodicFft};

/// Grids up to this many nodes are diagonalized densely.
pub const DENSE_NODE_LIMIT: usize = 1024;
/// Default configuration-space budget: 32^2 nodes per particle in 2D.
pub const DEFAULT_BUDGET: usize = 1 << 20;

fn sign_fixed(grid: Grid, mut values: Vec<f64>) -> Field {
    let pivot = values
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(0.0);
    if pivot < 0.0 {
        values.iter_mut().for_each(|v| *v = -*v);
    }
    let mut wave = Field::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        .expect("grid-sized");
    wave.normalize();
    wave
}

/// Matrix of a diagonal-in-k operator in the node basis, built column by
/// column from unit vectors.
fn spectral_matrix(grid: &Grid, apply: impl Fn(&mut Vec<Complex64>)) -> DMatrix<f64> {
    let g = grid.len();
    let mut m = DMatrix::zeros(g, g);
    let mut unit = vec![Complex64::new(0.0, 0.0); g];
    for b in 0..g {
        unit.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        unit[b] = Complex64::new(1.0, 0.0);
        apply(&mut unit);
        for a in 0..g {
            m[(a, b)] = unit[a].re;
        }
    }
    // symmetric up to round-off; make it exact
    let t = m.transpose();
    (m + t) * 0.5
}

/// Discrete Hamiltonian `-laplacian/2 + V` with the spectral kinetic term.
pub fn hamiltonian_matrix(potential: &RealField) -> DMatrix<f64> {
    let grid = *potential.grid();
    let kin = KineticPropagator::new(
        PeriodicFft::new(grid.points_per_axis(), grid.dim(), grid.spacing()),
        0.0,
    );
    let mut h = spectral_matrix(&grid, |v| *v = kin.apply_kinetic(v));
    for (a, p) in potential.values().iter().enumerate() {
        h[(a, a)] += p;
    }
    h
}

/// Symmetric split-step propagator `e^{-V dtau/2} e^{-T dtau} e^{-V dtau/2}`.
pub fn split_step_matrix(potential: &RealField, dtau: f64) -> DMatrix<f64> {
    let grid = *potential.grid();
    let kin = KineticPropagator::new(
        PeriodicFft::new(grid.points_per_axis(), grid.dim(), grid.spacing()),
        dtau,
    );
    let mut u = spectral_matrix(&grid, |v| kin.apply(v));
    let d: Vec<f64> = potential.values().iter().map(|p| (-0.5 * dtau * p).exp()).collect();
    for a in 0..grid.len() {
        for b in 0..grid.len() {
            u[(a, b)] *= d[a] * d[b];
        }
    }
    u
}

/// Lowest eigenpair of the discrete Hamiltonian.
///
/// Grids up to [`DENSE_NODE_LIMIT`] nodes are diagonalized directly; larger
/// ones are relaxed in imaginary time until the energy residual
/// `||(H - E) phi||` drops below `1e-9`.
pub fn exact_ground_state_1p(potential: &RealField) -> Result<(Field, f64)> {
    let grid = *potential.grid();
    if potential.values().iter().any(|v| !v.is_finite()) {
        return Err(TdqmcError::invalid("potential", "must be finite"));
    }
    if grid.len() <= DENSE_NODE_LIMIT {
        let eig = SymmetricEigen::new(hamiltonian_matrix(potential));
        let (idx, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        let vec: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        return Ok((sign_fixed(grid, vec), e));
    }
    imaginary_time_1p(potential, 1e-9, 200_000)
}

fn imaginary_time_1p(potential: &RealField, tol: f64, max_steps: usize) -> Result<(Field, f64)> {
    let grid = *potential.grid();
    let mut wave = sign_fixed(grid, vec![1.0; grid.len()]);
    let mut residual = f64::INFINITY;
    let mut steps = 0;
    // shrinking steps remove the split-step bias of the fixed point
    for &dtau in &[0.05, 0.01, 0.002, 0.0005] {
        let stepper = GuideWaveStepper::new(grid, dtau);
        loop {
            for _ in 0..50 {
                stepper.step(wave.values_mut(), potential.values())?;
            }
            steps += 50;
            let e = stepper.energy(wave.values(), potential.values());
            let hw = stepper.kinetic().apply_kinetic(wave.values());
            residual = hw
                .iter()
                .zip(wave.values())
                .zip(potential.values())
                .map(|((t, w), v)| (t + w * v - w * e).norm_sqr())
                .sum::<f64>()
                .sqrt()
                * grid.cell_volume().sqrt();
            let stalled = residual < (dtau * dtau).max(tol);
            if stalled || steps >= max_steps {
                break;
            }
        }
        if steps >= max_steps {
            break;
        }
    }
    let stepper = GuideWaveStepper::new(grid, 0.0005);
    let e = stepper.energy(wave.values(), potential.values());
    if residual > tol.max(1e-6) {
        return Err(TdqmcError::NotConverged {
            iterations: steps,
            residual,
        });
    }
    wave.values_mut().iter_mut().for_each(|v| v.im = 0.0);
    let vals = wave.values().iter().map(|v| v.re).collect();
    Ok((sign_fixed(grid, vals), e))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HartreeParams {
    /// `None` solves `H phi = e phi`; `Some(dtau)` finds the fixed point of
    /// the split-step propagator at that step, matching a relaxed ensemble
    /// to round-off.
    pub dtau: Option<f64>,
    /// Linear density mixing factor in `(0, 1]`.
    pub mixing: f64,
    /// Converged once the largest density change falls below this.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for HartreeParams {
    fn default() -> Self {
        HartreeParams {
            dtau: None,
            mixing: 0.5,
            tol: 1e-12,
            max_iterations: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HartreeSolution {
    pub orbitals: Vec<Field>,
    pub densities: Vec<RealField>,
    pub total_energy: f64,
    pub iterations: usize,
    pub residual: f64,
}

/// Direct-sum Hartree potential of a density on the grid.
pub fn hartree_potential(spec: &LatticeSpec, density: &RealField) -> RealField {
    let grid = *density.grid();
    let nodes: Vec<Position> = grid.node_positions().collect();
    let dv = grid.cell_volume();
    let strength = spec.ee_strength();
    let vals = nodes
        .par_iter()
        .map(|&r| {
            nodes
                .iter()
                .zip(density.values())
                .map(|(&s, rho)| coulomb_ee(&grid, r, s, spec.soft_core()) * rho)
                .sum::<f64>()
                * dv
                * strength
        })
        .collect();
    Field::new(grid, vals).expect("grid-sized")
}

/// Self-consistent Hartree orbitals for one electron per `initial` wave.
///
/// Each iteration diagonalizes every electron's mean-field operator
/// (lowest eigenvector of `H`, or the dominant one of the split-step
/// propagator) and mixes the resulting densities.
pub fn hartree_ground_state(
    spec: &LatticeSpec,
    grid: &Grid,
    initial: &[Field],
    params: &HartreeParams,
) -> Result<HartreeSolution> {
    grid.check_dim(spec.dim())?;
    if initial.is_empty() {
        return Err(TdqmcError::EmptyEnsemble);
    }
    if !(params.mixing > 0.0 && params.mixing <= 1.0) {
        return Err(TdqmcError::invalid("mixing", "must lie in (0, 1]"));
    }
    if let Some(dtau) = params.dtau {
        if !(dtau > 0.0) {
            return Err(TdqmcError::invalid("dtau", "must be positive"));
        }
    }
    if grid.len() > DENSE_NODE_LIMIT {
        return Err(TdqmcError::BudgetExceeded {
            size: grid.len(),
            budget: DENSE_NODE_LIMIT,
        });
    }
    let v_en = sample_on_grid(spec, grid)?;
    let n = initial.len();
    let mut densities: Vec<RealField> = initial
        .iter()
        .map(|w| {
            let mut w = w.clone();
            w.normalize();
            w.density()
        })
        .collect();
    let mut orbitals = initial.to_vec();
    let mut residual = f64::INFINITY;
    for iteration in 1..=params.max_iterations {
        let hartree: Vec<RealField> = densities.iter().map(|d| hartree_potential(spec, d)).collect();
        let mut new_densities = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = v_en.values().to_vec();
            for (j, vh) in hartree.iter().enumerate() {
                if j != i {
                    v.iter_mut().zip(vh.values()).for_each(|(a, b)| *a += b);
                }
            }
            let v = Field::new(*grid, v)?;
            let orbital = match params.dtau {
                None => exact_ground_state_1p(&v)?.0,
                Some(dtau) => {
                    let eig = SymmetricEigen::new(split_step_matrix(&v, dtau));
                    let (idx, _) = eig
                        .eigenvalues
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.total_cmp(b.1))
                        .expect("non-empty");
                    sign_fixed(*grid, eig.eigenvectors.column(idx).iter().copied().collect())
                }
            };
            new_densities.push(orbital.density());
            orbitals[i] = orbital;
        }
        residual = densities
            .iter()
            .zip(&new_densities)
            .flat_map(|(a, b)| a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        if residual < params.tol {
            let total_energy = hartree_energy(spec, grid, &v_en, &orbitals);
            return Ok(HartreeSolution {
                densities: new_densities,
                orbitals,
                total_energy,
                iterations: iteration,
                residual,
            });
        }
        for (d, nd) in densities.iter_mut().zip(&new_densities) {
            d.values_mut()
                .iter_mut()
                .zip(nd.values())
                .for_each(|(a, b)| *a += params.mixing * (b - *a));
        }
    }
    Err(TdqmcError::NotConverged {
        iterations: params.max_iterations,
        residual,
    })
}

fn hartree_energy(spec: &LatticeSpec, grid: &Grid, v_en: &RealField, orbitals: &[Field]) -> f64 {
    let stepper = GuideWaveStepper::new(*grid, 0.0);
    let one_body: f64 = orbitals.iter().map(|o| stepper.energy(o.values(), v_en.values())).sum();
    let dv = grid.cell_volume();
    let mut pair = 0.0;
    for i in 0..orbitals.len() {
        for j in (i + 1)..orbitals.len() {
            let vh = hartree_potential(spec, &orbitals[j].density());
            pair += orbitals[i]
                .density()
                .values()
                .iter()
                .zip(vh.values())
                .map(|(r, v)| r * v)
                .sum::<f64>()
                * dv;
        }
    }
    one_body + pair
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoBodyParams {
    pub dtau: f64,
    pub max_steps: usize,
    /// Relative energy change over 100 steps that counts as converged.
    pub energy_tol: f64,
    /// Largest allowed number of configuration-space nodes.
    pub budget: usize,
}

impl Default for TwoBodyParams {
    fn default() -> Self {
        TwoBodyParams {
            dtau: 0.01,
            max_steps: 50_000,
            energy_tol: 1e-10,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Real two-particle wave `Psi(r1, r2)` stored as `values[a * G + b]` for
/// one-particle nodes `a`, `b`, normalized so that
/// `sum |Psi|^2 h^(2 dim) = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigSpaceWave {
    grid: Grid,
    values: Vec<f64>,
    energy: f64,
    steps: usize,
    converged: bool,
}

impl ConfigSpaceWave {
    /// Normalizes `values` and attaches them to `grid`.
    pub fn new(grid: Grid, mut values: Vec<f64>) -> Result<Self> {
        let g = grid.len();
        if values.len() != g * g {
            return Err(TdqmcError::invalid("values", "need G^2 configuration-space values"));
        }
        let dv = grid.cell_volume();
        let norm = (values.iter().map(|v| v * v).sum::<f64>() * dv * dv).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(TdqmcError::invalid("values", "wave must have a finite non-zero norm"));
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Ok(ConfigSpaceWave {
            grid,
            values,
            energy: f64::NAN,
            steps: 0,
            converged: false,
        })
    }

    /// Symmetrized product `(a(r1) b(r2) + b(r1) a(r2))`, normalized.
    pub fn symmetric_product(a: &Field, b: &Field) -> Result<Self> {
        let grid = *a.grid();
        let g = grid.len();
        let (av, bv) = (a.values(), b.values());
        let values = (0..g * g)
            .map(|idx| {
                let (p, q) = (idx / g, idx % g);
                av[p].re * bv[q].re + bv[p].re * av[q].re
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.grid.len() + b]
    }

    /// `<Psi|H|Psi>` from the relaxation (NaN when built directly).
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// `||Psi(r1, r2) - Psi(r2, r1)||` with the configuration-space measure.
    pub fn exchange_asymmetry(&self) -> f64 {
        let g = self.grid.len();
        let dv = self.grid.cell_volume();
        let mut total = 0.0;
        for a in 0..g {
            for b in 0..g {
                total += (self.value(a, b) - self.value(b, a)).powi(2);
            }
        }
        (total * dv * dv).sqrt()
    }

    /// One-body density of particle 1, `integral |Psi(r, r2)|^2 dr2`.
    pub fn density(&self) -> RealField {
        let g = self.grid.len();
        let dv = self.grid.cell_volume();
        let vals = self
            .values
            .chunks(g)
            .map(|row| row.iter().map(|v| v * v).sum::<f64>() * dv)
            .collect();
        Field::new(self.grid, vals).expect("grid-sized")
    }

    /// Conditional wave `Psi(r, r2_b)` of particle 1 with particle 2 at
    /// node `b`, normalized.
    pub fn conditional_wave(&self, b: usize) -> Field {
        let g = self.grid.len();
        let vals = (0..g).map(|a| self.values[a * g + b]).collect();
        sign_fixed(self.grid, vals)
    }
}

/// Two-particle ground state by imaginary-time split-step relaxation in
/// `2 * dim` dimensions, started from the symmetrized product of the
/// one-particle ground state.
pub fn exact_ground_state_2p(spec: &LatticeSpec, grid: &Grid, params: &TwoBodyParams) -> Result<ConfigSpaceWave> {
    grid.check_dim(spec.dim())?;
    let g = grid.len();
    let size = g * g;
    if size > params.budget {
        return Err(TdqmcError::BudgetExceeded {
            size,
            budget: params.budget,
        });
    }
    if !(params.dtau > 0.0) {
        return Err(TdqmcError::invalid("dtau", "must be positive"));
    }
    let v_en = sample_on_grid(spec, grid)?;
    let nodes: Vec<Position> = grid.node_positions().collect();
    let potential: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (idx / g, idx % g);
            v_en.values()[a] + v_en.values()[b] + spec.interaction(grid, nodes[a], nodes[b])
        })
        .collect();

    let (phi0, _) = exact_ground_state_1p(&v_en)?;
    let start = ConfigSpaceWave::symmetric_product(&phi0, &phi0)?;
    let fft = PeriodicFft::new(grid.points_per_axis(), 2 * grid.dim(), grid.spacing());
    let kinetic = KineticPropagator::new(fft, params.dtau);
    let dv2 = grid.cell_volume().powi(2);
    let half: Vec<f64> = potential.iter().map(|v| (-0.5 * params.dtau * v).exp()).collect();

    let mut psi: Vec<Complex64> = start.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let energy_of = |psi: &[Complex64]| -> f64 {
        let kin = kinetic.expectation(psi) * dv2;
        let pot: f64 = psi.iter().zip(&potential).map(|(p, v)| p.norm_sqr() * v).sum::<f64>() * dv2;
        kin + pot
    };
    const WINDOW: usize = 100;
    let mut last = energy_of(&psi);
    let mut converged = false;
    let mut steps = 0;
    while steps < params.max_steps {
        for _ in 0..WINDOW {
            psi.iter_mut().zip(&half).for_each(|(p, f)| *p *= *f);
            kinetic.apply(&mut psi);
            psi.iter_mut().zip(&half).for_each(|(p, f)| *p *= *f);
            let norm = (psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * dv2).sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(TdqmcError::Divergence {
                    step: steps,
                    detail: format!("configuration-space norm became {norm}"),
                });
            }
            psi.iter_mut().for_each(|p| *p /= norm);
            steps += 1;
        }
        let e = energy_of(&psi);
        if (e - last).abs() <= params.energy_tol * e.abs().max(1e-12) {
            converged = true;
            last = e;
            break;
        }
        last = e;
    }
    // exchange symmetry holds to round-off; restore it exactly
    let mut values = vec![0.0; size];
    for a in 0..g {
        for b in 0..g {
            values[a * g + b] = 0.5 * (psi[a * g + b].re + psi[b * g + a].re);
        }
    }
    let mut wave = ConfigSpaceWave::new(*grid, values)?;
    wave.energy = last;
    wave.steps = steps;
    wave.converged = converged;
    Ok(wave)
}

/// Partial trace over particle 2, in the orthonormal node basis.
pub fn exact_rdm(psi: &ConfigSpaceWave) -> ReducedDensityMatrix {
    let g = psi.grid.len();
    let m = DMatrix::from_row_slice(g, g, &psi.values);
    let dv2 = psi.grid.cell_volume().powi(2);
    let rho = (&m * m.transpose()) * dv2;
    let entries = (0..g * g)
        .map(|idx| Complex64::new(rho[(idx / g, idx % g)], 0.0))
        .collect();
    ReducedDensityMatrix::from_entries(psi.grid, entries, true)
}

/// Conditional-wave ensemble mirroring the walker construction: partner
/// nodes drawn from the one-body density, one conditional wave per draw,
/// and one position per wave drawn from its own `|phi|^2`.
pub fn conditional_ensemble(psi: &ConfigSpaceWave, samples: usize, seed: u64) -> Result<(Vec<Field>, Vec<Position>)> {
    if samples == 0 {
        return Err(TdqmcError::invalid("samples", "need at least one sample"));
    }
    let density = psi.density();
    let total: f64 = density.values().iter().sum();
    let mut cumulative = Vec::with_capacity(density.values().len());
    let mut acc = 0.0;
    for d in density.values() {
        acc += d / total;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let partners: Vec<usize> = (0..samples)
        .map(|_| {
            let u: f64 = rng.random();
            cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1)
        })
        .collect();
    let waves: Vec<Field> = partners.par_iter().map(|&b| psi.conditional_wave(b)).collect();
    let positions = waves.iter().map(|w| sample_position(w, &mut rng)).collect();
    Ok((waves, positions))
}

/// Local linear entropy map of the exact state.
pub fn exact_local_entropy_map(
    psi: &ConfigSpaceWave,
    partition: &ZonePartition,
    samples: usize,
    seed: u64,
) -> Result<EntropyMap> {
    let (waves, positions) = conditional_ensemble(psi, samples, seed)?;
    entropy_map_from(&waves, &positions, partition)
}

/// Local entropy and coherence maps of the exact state from one shared
/// conditional ensemble.
pub fn exact_local_maps(
    psi: &ConfigSpaceWave,
    partition: &ZonePartition,
    samples: usize,
    seed: u64,
) -> Result<(EntropyMap, EntropyMap)> {
    let (waves, positions) = conditional_ensemble(psi, samples, seed)?;
    Ok((
        entropy_map_from(&waves, &positions, partition)?,
        coherence_map_from(&waves, &positions, partition)?,
    ))
}

/// Local entropy and coherence maps of the conditional-wave construction
/// in the limit of infinitely many samples. A zone matrix is the mixture of
/// normalized conditional waves `phi_b` weighted by the joint probability
/// of the partner at node `b` and the walker inside the zone. Walker counts
/// hold the number of grid cells overlapping each zone.
pub fn exact_limit_maps(psi: &ConfigSpaceWave, partition: &ZonePartition) -> Result<(EntropyMap, EntropyMap)> {
    if *partition.grid() != psi.grid {
        return Err(TdqmcError::invalid("partition", "partition grid differs from wave grid"));
    }
    let g = psi.grid.len();
    let zones = partition.zone_count();
    let m = DMatrix::from_row_slice(g, g, &psi.values);
    let norms: Vec<f64> = (0..g).map(|b| m.column(b).norm()).collect();
    let mut unit = m.clone();
    for (b, &n) in norms.iter().enumerate() {
        if n > 0.0 {
            unit.column_mut(b).scale_mut(1.0 / n);
        }
    }
    let overlap = unit.transpose() * &unit;
    let overlap_sq = overlap.component_mul(&overlap);

    // weights[(zone, b)] = P(walker in zone, partner at b), up to a constant
    let mut weights = DMatrix::zeros(zones, g);
    let mut cells = vec![0usize; zones];
    for node in 0..g {
        for (zone, frac) in partition.cell_fractions(node) {
            cells[zone] += 1;
            for b in 0..g {
                weights[(zone, b)] += frac * m[(node, b)].powi(2);
            }
        }
    }
    let unit_sq = unit.component_mul(&unit);
    let mixed = &weights * &overlap_sq;
    let diagonal = &weights * unit_sq.transpose();

    let stats: Vec<Option<ZoneStats>> = (0..zones)
        .map(|z| {
            let total: f64 = weights.row(z).sum();
            if total <= 0.0 {
                return None;
            }
            let purity = mixed.row(z).dot(&weights.row(z)) / (total * total);
            let diagonal_purity = diagonal.row(z).iter().map(|d| (d / total).powi(2)).sum();
            Some(ZoneStats {
                count: cells[z],
                purity,
                diagonal_purity,
            })
        })
        .collect();
    Ok((
        map_from_stats(partition, MapKind::LocalLinearEntropy, &stats),
        map_from_stats(partition, MapKind::LocalCoherence, &stats),
    ))
}

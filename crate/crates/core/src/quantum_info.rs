//! Reduced density matrices built from guide-wave ensembles, global and
//! zone-local linear entropy, and the linear relative entropy of
//! coherence in the position basis.
//!
//! Every estimator here is computed from trace-normalized quantities. Zone
//! members are visited in a canonical order fixed by wave content, so maps
//! do not depend on how the walker ensemble is ordered.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::TdqmcState;
use crate::error::{Result, TdqmcError};
use crate::grid::{Field, Grid, Position};

pub const DEFAULT_ZONES_PER_AXIS: usize = 21;

/// Dense one-particle density matrix over grid nodes.
///
/// Entries are `rho(r_a, r_b) * spacing^dim`, so the matrix is the operator
/// in the orthonormal node basis and its trace is one.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix {
    grid: Grid,
    entries: Vec<Complex64>,
    trace_normalized: bool,
}

impl ReducedDensityMatrix {
    pub(crate) fn from_entries(grid: Grid, mut entries: Vec<Complex64>, normalize: bool) -> Self {
        let n = grid.len();
        debug_assert_eq!(entries.len(), n * n);
        if normalize {
            let tr: f64 = (0..n).map(|a| entries[a * n + a].re).sum();
            if tr > 0.0 {
                let inv = 1.0 / tr;
                entries.iter_mut().for_each(|e| *e *= inv);
            }
        }
        ReducedDensityMatrix {
            grid,
            entries,
            trace_normalized: normalize,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.grid.len()
    }

    pub fn is_trace_normalized(&self) -> bool {
        self.trace_normalized
    }

    #[inline]
    pub fn entry(&self, a: usize, b: usize) -> Complex64 {
        self.entries[a * self.size() + b]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.size()).map(|a| self.entry(a, a)).sum()
    }

    /// `Tr(rho^2)` from the dense entries.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// `sum_a rho_aa^2`, the purity of the dephased matrix.
    pub fn diagonal_purity(&self) -> f64 {
        (0..self.size()).map(|a| self.entry(a, a).re.powi(2)).sum()
    }

    /// Diagonal as a density on the grid (divided by the cell volume).
    pub fn density(&self) -> Field<f64> {
        let dv = self.grid.cell_volume();
        let vals = (0..self.size()).map(|a| self.entry(a, a).re / dv).collect();
        Field::new(self.grid, vals).expect("grid-sized")
    }

    /// Largest `|rho_ab - conj(rho_ba)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.size();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                worst = worst.max((self.entry(a, b) - self.entry(b, a).conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.size();
        let m = DMatrix::from_fn(n, n, |a, b| self.entry(a, b));
        let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// Inverse participation ratio of the diagonal, `1 / sum rho_aa^2`:
    /// the number of nodes the state is effectively spread over.
    pub fn effective_area(&self) -> f64 {
        1.0 / self.diagonal_purity()
    }
}

fn check_waves(waves: &[Field]) -> Result<Grid> {
    let first = waves.first().ok_or(TdqmcError::EmptyEnsemble)?;
    let grid = *first.grid();
    if waves.iter().any(|w| *w.grid() != grid) {
        return Err(TdqmcError::invalid("waves", "all waves must share one grid"));
    }
    Ok(grid)
}

fn density_matrix_of(grid: Grid, waves: &[&Field]) -> ReducedDensityMatrix {
    let n = grid.len();
    let scale = grid.cell_volume() / waves.len() as f64;
    let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
    entries.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        for w in waves {
            let left = w.values()[a].conj() * scale;
            row.iter_mut().zip(w.values()).for_each(|(e, v)| *e += left * v);
        }
    });
    ReducedDensityMatrix::from_entries(grid, entries, true)
}

/// `(1/M) sum_k phi_k^*(r) phi_k(r')`, trace-normalized.
pub fn reduced_density_matrix(waves: &[Field]) -> Result<ReducedDensityMatrix> {
    let grid = check_waves(waves)?;
    let refs: Vec<&Field> = waves.iter().collect();
    Ok(density_matrix_of(grid, &refs))
}

fn compare_waves(a: &Field, b: &Field) -> Ordering {
    for (x, y) in a.values().iter().zip(b.values()) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

fn canonical_members(waves: &[Field], mut members: Vec<usize>) -> Vec<usize> {
    members.sort_by(|&a, &b| compare_waves(&waves[a], &waves[b]));
    members
}

/// Purity of the trace-normalized matrix built from `members`, via the Gram
/// route: `sum_{k,l} |<phi_k|phi_l>|^2 / (sum_k <phi_k|phi_k>)^2`.
fn gram_purity(waves: &[Field], members: &[usize]) -> f64 {
    let rows: Vec<(f64, f64)> = members
        .par_iter()
        .enumerate()
        .map(|(p, &a)| {
            let mut row = 0.0;
            for &b in &members[p + 1..] {
                row += waves[a].inner(&waves[b]).norm_sqr();
            }
            let self_overlap = waves[a].norm_sq();
            (self_overlap, row)
        })
        .collect();
    let norm: f64 = rows.iter().map(|r| r.0).sum();
    let diag: f64 = rows.iter().map(|r| r.0 * r.0).sum();
    let off: f64 = rows.iter().map(|r| r.1).sum();
    (diag + 2.0 * off) / (norm * norm)
}

/// `sum_a rho_aa^2` of the trace-normalized matrix built from `members`.
fn diagonal_purity(waves: &[Field], members: &[usize]) -> f64 {
    let grid = waves[members[0]].grid();
    let n = grid.len();
    let mut diag = vec![0.0; n];
    for &k in members {
        diag.iter_mut()
            .zip(waves[k].values())
            .for_each(|(d, v)| *d += v.norm_sqr());
    }
    let total: f64 = diag.iter().sum();
    diag.iter().map(|d| (d / total).powi(2)).sum()
}

/// `Tr(rho^2)` without materializing `rho`.
pub fn purity(waves: &[Field]) -> Result<f64> {
    check_waves(waves)?;
    let members = canonical_members(waves, (0..waves.len()).collect());
    Ok(gram_purity(waves, &members))
}

/// `1 - Tr(rho^2)`.
pub fn linear_entropy(waves: &[Field]) -> Result<f64> {
    Ok(1.0 - purity(waves)?)
}

/// `S_L(rho_diag) - S_L(rho) = Tr(rho^2) - sum_a rho_aa^2` in the grid-node
/// basis.
pub fn linear_coherence(rdm: &ReducedDensityMatrix) -> f64 {
    let tr = rdm.trace().re;
    (rdm.purity() - rdm.diagonal_purity()) / (tr * tr)
}

/// How 2D zones are laid out. In 1D both layouts are the same strips.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZoneLayout {
    /// Cartesian product of strips along every axis.
    #[default]
    Cells,
    /// Strips across x only, spanning the full y range.
    StripsX,
    /// Strips across y only, spanning the full x range.
    StripsY,
}

/// Equal-width zones per axis; in 2D the Cartesian product of strips
/// unless a strip layout is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZonePartition {
    grid: Grid,
    zones_per_axis: usize,
    layout: ZoneLayout,
}

impl ZonePartition {
    pub fn new(grid: Grid, zones_per_axis: usize) -> Result<Self> {
        Self::with_layout(grid, zones_per_axis, ZoneLayout::Cells)
    }

    pub fn with_layout(grid: Grid, zones_per_axis: usize, layout: ZoneLayout) -> Result<Self> {
        if zones_per_axis == 0 {
            return Err(TdqmcError::invalid("zones", "need at least one zone per axis"));
        }
        Ok(ZonePartition {
            grid,
            zones_per_axis,
            layout,
        })
    }

    pub fn layout(&self) -> ZoneLayout {
        self.layout
    }

    fn is_cells(&self) -> bool {
        self.grid.dim() == 2 && self.layout == ZoneLayout::Cells
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn zones_per_axis(&self) -> usize {
        self.zones_per_axis
    }

    pub fn zone_count(&self) -> usize {
        if self.is_cells() {
            self.zones_per_axis * self.zones_per_axis
        } else {
            self.zones_per_axis
        }
    }

    pub fn zone_width(&self) -> f64 {
        self.grid.extent() / self.zones_per_axis as f64
    }

    /// `[lower, upper)` bounds of strip `z` along one axis.
    pub fn strip_bounds(&self, z: usize) -> (f64, f64) {
        let lo = -0.5 * self.grid.extent() + z as f64 * self.zone_width();
        (lo, lo + self.zone_width())
    }

    fn strip_of(&self, x: f64) -> usize {
        let u = (self.grid.wrap_coordinate(x) + 0.5 * self.grid.extent()) / self.zone_width();
        (u.floor() as usize).min(self.zones_per_axis - 1)
    }

    pub fn zone_of(&self, r: Position) -> usize {
        match (self.grid.dim(), self.layout) {
            (2, ZoneLayout::Cells) => {
                self.strip_of(r.coord(0)) * self.zones_per_axis + self.strip_of(r.coord(1))
            }
            (2, ZoneLayout::StripsY) => self.strip_of(r.coord(1)),
            _ => self.strip_of(r.coord(0)),
        }
    }

    /// `(zone_x, zone_y)`; the coordinate along an unresolved axis is zero.
    pub fn zone_coords(&self, zone: usize) -> (usize, usize) {
        match (self.grid.dim(), self.layout) {
            (2, ZoneLayout::Cells) => (zone / self.zones_per_axis, zone % self.zones_per_axis),
            (2, ZoneLayout::StripsY) => (0, zone),
            _ => (zone, 0),
        }
    }

    /// Fraction of the cell around `node` lying in each zone, i.e. the zone
    /// distribution of a position drawn uniformly within that cell.
    pub fn cell_fractions(&self, node: usize) -> Vec<(usize, f64)> {
        let r = self.grid.node_position(node);
        let axis = |a: usize| self.axis_fractions(r.coord(a));
        match (self.grid.dim(), self.layout) {
            (2, ZoneLayout::Cells) => {
                let fy = axis(1);
                axis(0)
                    .into_iter()
                    .flat_map(|(sx, px)| fy.iter().map(move |&(sy, py)| (sx * self.zones_per_axis + sy, px * py)))
                    .collect()
            }
            (2, ZoneLayout::StripsY) => axis(1),
            _ => axis(0),
        }
    }

    fn axis_fractions(&self, x: f64) -> Vec<(usize, f64)> {
        let h = self.grid.spacing();
        let w = self.zone_width();
        let u0 = x - 0.5 * h + 0.5 * self.grid.extent();
        let u1 = u0 + h;
        let mut out = Vec::new();
        let mut j = (u0 / w).floor() as i64;
        while (j as f64) * w < u1 {
            let overlap = u1.min((j + 1) as f64 * w) - u0.max(j as f64 * w);
            if overlap > 0.0 {
                out.push((j.rem_euclid(self.zones_per_axis as i64) as usize, overlap / h));
            }
            j += 1;
        }
        out
    }

    /// Walker indices grouped by zone.
    pub fn members(&self, positions: &[Position]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.zone_count()];
        for (k, &r) in positions.iter().enumerate() {
            out[self.zone_of(r)].push(k);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    LocalLinearEntropy,
    LocalCoherence,
}

/// One scalar per zone. Zones without walkers hold `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyMap {
    pub partition: ZonePartition,
    pub kind: MapKind,
    pub values: Vec<Option<f64>>,
    pub walker_counts: Vec<usize>,
}

impl EntropyMap {
    pub fn get(&self, zone: usize) -> Option<f64> {
        self.values[zone]
    }

    pub fn non_empty(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(z, v)| v.map(|v| (z, v)))
    }

    /// Zone with the largest value.
    pub fn argmax(&self) -> Option<usize> {
        self.non_empty()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(z, _)| z)
    }
}

/// Per-zone purities from a wave ensemble and its paired walker positions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZoneStats {
    pub count: usize,
    /// `Tr(rho_m^2)` of the trace-normalized zone matrix.
    pub purity: f64,
    /// `sum_a (rho_m)_aa^2`.
    pub diagonal_purity: f64,
}

pub fn zone_statistics(
    waves: &[Field],
    positions: &[Position],
    partition: &ZonePartition,
) -> Result<Vec<Option<ZoneStats>>> {
    let grid = check_waves(waves)?;
    if grid != *partition.grid() {
        return Err(TdqmcError::invalid("partition", "partition grid differs from wave grid"));
    }
    if positions.len() != waves.len() {
        return Err(TdqmcError::invalid("positions", "one position per wave required"));
    }
    Ok(partition
        .members(positions)
        .into_iter()
        .map(|members| {
            if members.is_empty() {
                return None;
            }
            let members = canonical_members(waves, members);
            Some(ZoneStats {
                count: members.len(),
                purity: gram_purity(waves, &members),
                diagonal_purity: diagonal_purity(waves, &members),
            })
        })
        .collect())
}

/// `(1/M_m) sum_{k in zone} phi_k^* phi_k`, trace-normalized.
pub fn local_density_matrix(
    waves: &[Field],
    positions: &[Position],
    partition: &ZonePartition,
    zone: usize,
) -> Result<ReducedDensityMatrix> {
    let grid = check_waves(waves)?;
    if positions.len() != waves.len() {
        return Err(TdqmcError::invalid("positions", "one position per wave required"));
    }
    let members: Vec<usize> = positions
        .iter()
        .enumerate()
        .filter(|(_, &r)| partition.zone_of(r) == zone)
        .map(|(k, _)| k)
        .collect();
    if members.is_empty() {
        return Err(TdqmcError::EmptyZone { zone });
    }
    let members = canonical_members(waves, members);
    let refs: Vec<&Field> = members.iter().map(|&k| &waves[k]).collect();
    Ok(density_matrix_of(grid, &refs))
}

pub(crate) fn map_from_stats(partition: &ZonePartition, kind: MapKind, stats: &[Option<ZoneStats>]) -> EntropyMap {
    let values = stats
        .iter()
        .map(|s| {
            s.map(|s| match kind {
                MapKind::LocalLinearEntropy => 1.0 - s.purity,
                MapKind::LocalCoherence => s.purity - s.diagonal_purity,
            })
        })
        .collect();
    let walker_counts = stats.iter().map(|s| s.map_or(0, |s| s.count)).collect();
    EntropyMap {
        partition: *partition,
        kind,
        values,
        walker_counts,
    }
}

/// Local linear entropy per zone for an arbitrary wave/walker ensemble.
pub fn entropy_map_from(waves: &[Field], positions: &[Position], partition: &ZonePartition) -> Result<EntropyMap> {
    let stats = zone_statistics(waves, positions, partition)?;
    Ok(map_from_stats(partition, MapKind::LocalLinearEntropy, &stats))
}

/// Local coherence per zone for an arbitrary wave/walker ensemble.
pub fn coherence_map_from(waves: &[Field], positions: &[Position], partition: &ZonePartition) -> Result<EntropyMap> {
    let stats = zone_statistics(waves, positions, partition)?;
    Ok(map_from_stats(partition, MapKind::LocalCoherence, &stats))
}

/// Local linear entropy map of one electron.
pub fn local_entropy_map(state: &TdqmcState, electron: usize, partition: &ZonePartition) -> Result<EntropyMap> {
    entropy_map_from(state.waves(electron), state.positions(electron), partition)
}

/// Local coherence map of one electron.
pub fn coherence_map(state: &TdqmcState, electron: usize, partition: &ZonePartition) -> Result<EntropyMap> {
    coherence_map_from(state.waves(electron), state.positions(electron), partition)
}

/// Walker-count weighted average of per-electron maps.
pub fn average_maps(maps: &[EntropyMap]) -> Result<EntropyMap> {
    let first = maps.first().ok_or(TdqmcError::EmptyEnsemble)?;
    let zones = first.values.len();
    let mut values = vec![None; zones];
    let mut counts = vec![0usize; zones];
    for z in 0..zones {
        let (mut num, mut den) = (0.0, 0usize);
        for m in maps {
            if let Some(v) = m.values[z] {
                num += v * m.walker_counts[z] as f64;
                den += m.walker_counts[z];
            }
        }
        counts[z] = den;
        if den > 0 {
            values[z] = Some(num / den as f64);
        }
    }
    Ok(EntropyMap {
        partition: first.partition,
        kind: first.kind,
        values,
        walker_counts: counts,
    })
}

/// Electron-averaged local entropy and coherence maps.
pub fn mean_maps(state: &TdqmcState, partition: &ZonePartition) -> Result<(EntropyMap, EntropyMap)> {
    let mut entropy = Vec::with_capacity(state.electrons());
    let mut coherence = Vec::with_capacity(state.electrons());
    for i in 0..state.electrons() {
        let stats = zone_statistics(state.waves(i), state.positions(i), partition)?;
        entropy.push(map_from_stats(partition, MapKind::LocalLinearEntropy, &stats));
        coherence.push(map_from_stats(partition, MapKind::LocalCoherence, &stats));
    }
    Ok((average_maps(&entropy)?, average_maps(&coherence)?))
}

/// Pearson correlation over paired samples.
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let (mx, my) = pairs
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x / n, sy + y / n));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Pearson correlation of two maps over zones non-empty in both.
pub fn map_correlation(a: &EntropyMap, b: &EntropyMap) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = a
        .values
        .iter()
        .zip(&b.values)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .collect();
    pearson(&pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::new(1, 10.0, 32).unwrap()
    }

    fn normalized(g: Grid, f: impl Fn(f64) -> Complex64) -> Field {
        let mut w = Field::from_fn(g, |r| f(r.coord(0)));
        w.normalize();
        w
    }

    fn random_waves(g: Grid, m: usize, seed: u64) -> Vec<Field> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m)
            .map(|_| {
                let c: f64 = rng.random_range(-3.0..3.0);
                let w: f64 = rng.random_range(0.5..2.0);
                let p: f64 = rng.random_range(-1.0..1.0);
                normalized(g, |x| Complex64::from_polar((-(x - c).powi(2) / (2.0 * w * w)).exp(), p * x))
            })
            .collect()
    }

    #[test]
    fn cell_fractions_cover_each_cell() {
        for (dim, layout) in [(1, ZoneLayout::Cells), (2, ZoneLayout::Cells), (2, ZoneLayout::StripsY)] {
            let grid = Grid::new(dim, 12.0, 32).unwrap();
            let partition = ZonePartition::with_layout(grid, 21, layout).unwrap();
            for node in 0..grid.len() {
                let fractions = partition.cell_fractions(node);
                let total: f64 = fractions.iter().map(|f| f.1).sum();
                assert!((total - 1.0).abs() < 1e-12);
                let home = partition.zone_of(grid.node_position(node));
                assert!(fractions.iter().any(|&(z, f)| z == home && f > 0.0));
            }
        }
    }

    #[test]
    fn identical_waves_are_pure() {
        let g = grid();
        let w = normalized(g, |x| Complex64::new((-x * x).exp(), 0.0));
        let waves = vec![w; 4];
        assert_abs_diff_eq!(purity(&waves).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(linear_entropy(&waves).unwrap(), 0.0, epsilon = 1e-12);
        let rdm = reduced_density_matrix(&waves).unwrap();
        let ev = rdm.eigenvalues();
        assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-10);
        assert!(ev[1].abs() < 1e-10);
    }

    #[test]
    fn orthonormal_pair_is_half_mixed() {
        let g = grid();
        let l = g.extent();
        let a = normalized(g, |x| Complex64::new((2.0 * std::f64::consts::PI * x / l).cos(), 0.0));
        let b = normalized(g, |x| Complex64::new((2.0 * std::f64::consts::PI * x / l).sin(), 0.0));
        let waves = vec![a, b];
        assert_abs_diff_eq!(purity(&waves).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(linear_entropy(&waves).unwrap(), 0.5, epsilon = 1e-12);
        let ev = reduced_density_matrix(&waves).unwrap().eigenvalues();
        assert_abs_diff_eq!(ev[0], 0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(ev[1], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn empty_ensemble_rejected() {
        assert!(matches!(reduced_density_matrix(&[]), Err(TdqmcError::EmptyEnsemble)));
        assert!(purity(&[]).is_err());
    }

    #[test]
    fn coherence_examples() {
        let g = grid();
        let d = g.len() as f64;
        // diagonal matrix
        let mut entries = vec![Complex64::new(0.0, 0.0); g.len() * g.len()];
        for a in 0..g.len() {
            entries[a * g.len() + a] = Complex64::new(1.0 / d, 0.0);
        }
        let diag = ReducedDensityMatrix::from_entries(g, entries, true);
        assert_abs_diff_eq!(linear_coherence(&diag), 0.0, epsilon = 1e-15);
        // uniform superposition
        let uniform = normalized(g, |_| Complex64::new(1.0, 0.0));
        let rdm = reduced_density_matrix(&[uniform]).unwrap();
        assert_abs_diff_eq!(linear_coherence(&rdm), 1.0 - 1.0 / d, epsilon = 1e-12);
        assert_abs_diff_eq!(rdm.effective_area(), d, epsilon = 1e-9);
    }

    #[test]
    fn partition_examples() {
        let g = grid();
        let p = ZonePartition::new(g, 21).unwrap();
        assert_abs_diff_eq!(p.zone_width(), 10.0 / 21.0, epsilon = 1e-15);
        assert_eq!(p.zone_of(Position::x(-5.0)), 0);
        assert_eq!(p.zone_of(Position::x(5.0)), 0);
        assert_eq!(p.zone_of(Position::x(4.999)), 20);
        assert_eq!(p.zone_of(Position::x(0.0)), 10);
        assert!(ZonePartition::new(g, 0).is_err());
        let g2 = Grid::new(2, 10.0, 16).unwrap();
        let p2 = ZonePartition::new(g2, 21).unwrap();
        assert_eq!(p2.zone_count(), 441);
        let z = p2.zone_of(Position::xy(0.0, -4.9));
        assert_eq!(p2.zone_coords(z), (10, 0));
        let strips = ZonePartition::with_layout(g2, 21, ZoneLayout::StripsY).unwrap();
        assert_eq!(strips.zone_count(), 21);
        assert_eq!(strips.zone_of(Position::xy(3.0, -4.9)), 0);
        assert_eq!(strips.zone_coords(20), (0, 20));
    }

    #[test]
    fn single_zone_reduces_to_global() {
        let g = grid();
        let waves = random_waves(g, 9, 1);
        let positions: Vec<Position> = (0..9).map(|k| Position::x(k as f64 - 4.0)).collect();
        let p = ZonePartition::new(g, 1).unwrap();
        let map = entropy_map_from(&waves, &positions, &p).unwrap();
        assert_eq!(map.values[0], Some(linear_entropy(&waves).unwrap()));
        let local = local_density_matrix(&waves, &positions, &p, 0).unwrap();
        let global = reduced_density_matrix(&waves).unwrap();
        assert_abs_diff_eq!(local.purity(), global.purity(), epsilon = 1e-12);
    }

    #[test]
    fn one_walker_zone_is_pure_and_empty_zone_flagged() {
        let g = grid();
        let waves = random_waves(g, 3, 2);
        let positions = vec![Position::x(-4.0), Position::x(3.0), Position::x(3.1)];
        let p = ZonePartition::new(g, 5).unwrap();
        let map = entropy_map_from(&waves, &positions, &p).unwrap();
        assert_abs_diff_eq!(map.values[0].unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(map.values[2], None);
        assert_eq!(map.walker_counts.iter().sum::<usize>(), 3);
        assert!(matches!(
            local_density_matrix(&waves, &positions, &p, 2),
            Err(TdqmcError::EmptyZone { zone: 2 })
        ));
        let coh = coherence_map_from(&waves, &positions, &p).unwrap();
        let single = reduced_density_matrix(&waves[..1]).unwrap();
        assert_abs_diff_eq!(coh.values[0].unwrap(), 1.0 - single.diagonal_purity(), epsilon = 1e-12);
    }

    #[test]
    fn dense_rdm_is_hermitian_psd_unit_trace() {
        let g = grid();
        let waves = random_waves(g, 6, 3);
        let rdm = reduced_density_matrix(&waves).unwrap();
        assert!(rdm.hermiticity_error() < 1e-10);
        assert_abs_diff_eq!(rdm.trace().re, 1.0, epsilon = 1e-10);
        assert!(rdm.eigenvalues().iter().all(|&e| e >= -1e-8));
    }

    #[test]
    fn pearson_basic() {
        let pairs: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert_abs_diff_eq!(pearson(&pairs).unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(pearson(&[(1.0, 1.0)]), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gram_route_matches_dense(seed in 0u64..10_000, m in 1usize..8) {
            let g = Grid::new(1, 10.0, 64).unwrap();
            let waves = random_waves(g, m, seed);
            let gram = purity(&waves).unwrap();
            let dense = reduced_density_matrix(&waves).unwrap().purity();
            prop_assert!((gram - dense).abs() < 1e-10);
            prop_assert!(gram > 0.0 && gram <= 1.0 + 1e-12);
        }

        #[test]
        fn maps_are_permutation_invariant(seed in 0u64..10_000) {
            let g = grid();
            let waves = random_waves(g, 12, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
            let positions: Vec<Position> = (0..12).map(|_| Position::x(rng.random_range(-5.0..5.0))).collect();
            let p = ZonePartition::new(g, 4).unwrap();
            let mut order: Vec<usize> = (0..12).collect();
            order.reverse();
            order.swap(2, 7);
            let pw: Vec<Field> = order.iter().map(|&k| waves[k].clone()).collect();
            let pp: Vec<Position> = order.iter().map(|&k| positions[k]).collect();
            prop_assert_eq!(entropy_map_from(&waves, &positions, &p).unwrap(), entropy_map_from(&pw, &pp, &p).unwrap());
            prop_assert_eq!(coherence_map_from(&waves, &positions, &p).unwrap(), coherence_map_from(&pw, &pp, &p).unwrap());
        }

        #[test]
        fn dephasing_never_lowers_linear_entropy(seed in 0u64..10_000) {
            let g = grid();
            let waves = random_waves(g, 10, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
            let positions: Vec<Position> = (0..10).map(|_| Position::x(rng.random_range(-5.0..5.0))).collect();
            let p = ZonePartition::new(g, 3).unwrap();
            for s in zone_statistics(&waves, &positions, &p).unwrap().into_iter().flatten() {
                prop_assert!(s.diagonal_purity <= s.purity + 1e-10);
                prop_assert!((0.0..1.0).contains(&(1.0 - s.purity)));
            }
        }
    }
}

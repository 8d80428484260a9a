//! Nonlocal Gaussian kernel weighting and the Monte-Carlo convolution that
//! builds each walker's effective electron-electron potential.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, TdqmcError};
use crate::grid::{Field, Grid, Position, RealField};
use crate::potentials::coulomb_ee;
use crate::spectral::PeriodicFft;

/// Nonlocal length of one electron's kernel. `Infinite` is the mean-field
/// limit where every partner walker carries the same weight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sigma {
    Finite(f64),
    Infinite,
}

impl Sigma {
    pub fn finite(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Sigma::Finite(value))
        } else if value == f64::INFINITY {
            Ok(Sigma::Infinite)
        } else {
            Err(TdqmcError::invalid("sigma", format!("must be positive, got {value}")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Sigma::Infinite)
    }

    /// Numeric value, `f64::INFINITY` in the mean-field limit.
    pub fn value(&self) -> f64 {
        match self {
            Sigma::Finite(s) => *s,
            Sigma::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Finite(s) => write!(f, "{s}"),
            Sigma::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Sigma {
    type Err = TdqmcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => Ok(Sigma::Infinite),
            other => other
                .parse::<f64>()
                .map_err(|_| TdqmcError::invalid("sigma", format!("cannot parse `{s}`")))
                .and_then(Sigma::finite),
        }
    }
}

impl Serialize for Sigma {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Sigma::Finite(v) => serializer.serialize_f64(*v),
            Sigma::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Sigma {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Sigma::finite(v),
            Raw::Text(s) => s.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// One nonlocal length per electron.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaParams(Vec<Sigma>);

impl SigmaParams {
    pub fn uniform(electrons: usize, sigma: Sigma) -> Self {
        SigmaParams(vec![sigma; electrons])
    }

    pub fn per_electron(values: Vec<Sigma>) -> Self {
        SigmaParams(values)
    }

    pub fn get(&self, electron: usize) -> Sigma {
        self.0[electron]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `exp(-|r - r_k|^2 / (2 sigma^2))` with minimum-image distance.
#[inline]
pub fn gaussian_kernel(grid: &Grid, r: Position, r_k: Position, sigma: Sigma) -> f64 {
    match sigma {
        Sigma::Infinite => 1.0,
        Sigma::Finite(s) => (-grid.distance_sq(r, r_k) / (2.0 * s * s)).exp(),
    }
}

/// Kernel weight of every walker of one electron relative to `r_k`, and
/// their sum `Z`.
pub fn kernel_weights(
    grid: &Grid,
    positions: &[Position],
    r_k: Position,
    sigma: Sigma,
) -> (Vec<f64>, f64) {
    let weights: Vec<f64> = positions
        .iter()
        .map(|&r| gaussian_kernel(grid, r, r_k, sigma))
        .collect();
    let z = weights.iter().sum();
    (weights, z)
}

/// Effective potential felt by walker `k` of electron `i`, evaluated by
/// direct summation over every partner walker at every grid node.
///
/// `walkers[j][l]` is the position of walker `l` of electron `j`.
pub fn effective_potential(
    i: usize,
    k: usize,
    walkers: &[Vec<Position>],
    sigma: &SigmaParams,
    grid: &Grid,
    soft_core: f64,
) -> Result<RealField> {
    let mut field = vec![0.0; grid.len()];
    for (j, partners) in walkers.iter().enumerate() {
        if j == i {
            continue;
        }
        let (weights, z) = kernel_weights(grid, partners, partners[k], sigma.get(j));
        if !(z > 0.0) {
            return Err(TdqmcError::Divergence {
                step: 0,
                detail: format!("kernel normalization vanished for electron {j}, walker {k}"),
            });
        }
        for (node, slot) in field.iter_mut().enumerate() {
            let x = grid.node_position(node);
            let sum: f64 = partners
                .iter()
                .zip(&weights)
                .map(|(&r, &w)| w * coulomb_ee(grid, x, r, soft_core))
                .sum();
            *slot += sum / z;
        }
    }
    Field::new(*grid, field)
}

/// How partner walkers enter the convolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartnerSource {
    /// Each partner walker is a point charge at its position.
    #[default]
    Walkers,
    /// Each partner walker is replaced by the density of its own guide
    /// wave, i.e. the expectation of the point charge over the walker's
    /// stationary distribution. Deterministic given the waves.
    GuideDensity,
}

/// Partner field contributed by one electron to all the others, indexed by
/// walker.
#[derive(Clone, Debug, PartialEq)]
pub enum PartnerFields {
    /// Identical for every walker (mean-field kernel).
    Shared(Vec<f64>),
    PerWalker(Vec<Vec<f64>>),
}

impl PartnerFields {
    pub fn for_walker(&self, k: usize) -> &[f64] {
        match self {
            PartnerFields::Shared(v) => v,
            PartnerFields::PerWalker(v) => &v[k],
        }
    }

    pub fn is_shared(&self) -> bool {
        matches!(self, PartnerFields::Shared(_))
    }
}

/// Kernel exponents beyond this contribute less than one part in 1e16
/// relative to a walker's own unit weight and are skipped.
const KERNEL_CUTOFF: f64 = 36.8;

/// Largest `M * G` for which every walker's charge buffer is held at once
/// so each kernel pair is evaluated a single time.
const PAIRWISE_BUFFER_LIMIT: usize = 1 << 22;

/// Grid-based evaluation of the kernel-weighted convolution.
///
/// For each walker `k` the kernel-weighted partner charge is deposited on
/// the grid (cloud-in-cell for point walkers) and convolved with the
/// soft-core repulsion via FFT. For walkers sitting on nodes this matches
/// [`effective_potential`] to round-off; otherwise the difference is the
/// second-order deposit error.
#[derive(Clone, Debug)]
pub struct PartnerConvolution {
    grid: Grid,
    fft: PeriodicFft,
    kernel_hat: Vec<Complex64>,
}

impl PartnerConvolution {
    /// `strength` multiplies the soft-core repulsion (1 for Coulomb).
    pub fn new(grid: Grid, soft_core: f64, strength: f64) -> Self {
        let fft = PeriodicFft::new(grid.points_per_axis(), grid.dim(), grid.spacing());
        let h = grid.spacing();
        let origin = Position::default();
        let mut kernel_hat: Vec<Complex64> = (0..grid.len())
            .map(|idx| {
                let [ix, iy] = grid.unflatten(idx);
                let offset = Position::xy(ix as f64 * h, iy as f64 * h);
                Complex64::new(strength * coulomb_ee(&grid, offset, origin, soft_core), 0.0)
            })
            .collect();
        fft.forward(&mut kernel_hat);
        PartnerConvolution {
            grid,
            fft,
            kernel_hat,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Repulsion field of a charge distribution given as per-node masses.
    pub fn convolve(&self, charge: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = charge.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        self.fft.forward(&mut buf);
        buf.iter_mut().zip(&self.kernel_hat).for_each(|(v, k)| *v *= *k);
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|v| v.re).collect()
    }

    /// Partner fields of one electron from its walker snapshot.
    ///
    /// `waves` is required for [`PartnerSource::GuideDensity`].
    pub fn partner_fields(
        &self,
        positions: &[Position],
        waves: Option<&[Field]>,
        sigma: Sigma,
        source: PartnerSource,
    ) -> Result<PartnerFields> {
        let pairwise = positions.len() * self.grid.len() <= PAIRWISE_BUFFER_LIMIT;
        self.partner_fields_with(positions, waves, sigma, source, pairwise)
    }

    pub(crate) fn partner_fields_with(
        &self,
        positions: &[Position],
        waves: Option<&[Field]>,
        sigma: Sigma,
        source: PartnerSource,
        pairwise: bool,
    ) -> Result<PartnerFields> {
        let m = positions.len();
        if m == 0 {
            return Err(TdqmcError::EmptyEnsemble);
        }
        let g = self.grid.len();
        let charges = match source {
            PartnerSource::Walkers => Charges::Points {
                cells: positions.iter().map(|&r| self.grid.cell_weights(r)).collect(),
                slots: 1 << self.grid.dim(),
            },
            PartnerSource::GuideDensity => {
                let waves = waves.ok_or_else(|| {
                    TdqmcError::invalid("waves", "guide-density source needs the guide waves")
                })?;
                if waves.len() != m {
                    return Err(TdqmcError::invalid("waves", "one wave per walker required"));
                }
                let dv = self.grid.cell_volume();
                Charges::Spread(
                    waves
                        .iter()
                        .map(|w| w.values().iter().map(|v| v.norm_sqr() * dv).collect())
                        .collect(),
                )
            }
        };

        match sigma {
            Sigma::Infinite => {
                let mut rho = vec![0.0; g];
                for l in 0..m {
                    charges.deposit_one(l, 1.0, &mut rho);
                }
                let inv = 1.0 / m as f64;
                rho.iter_mut().for_each(|v| *v *= inv);
                Ok(PartnerFields::Shared(self.convolve(&rho)))
            }
            Sigma::Finite(s) => {
                let inv_two_s2 = 1.0 / (2.0 * s * s);
                let extent = self.grid.extent();
                let half = 0.5 * extent;
                let dim = self.grid.dim();
                let axes: Vec<Vec<f64>> = (0..dim)
                    .map(|axis| {
                        positions
                            .iter()
                            .map(|&r| self.grid.wrap_coordinate(r.0[axis]))
                            .collect()
                    })
                    .collect();
                // weight of walker `l` seen from walker `k`, for `l >= from`
                let row = |k: usize, from: usize| -> Vec<f64> {
                    let mut u = vec![0.0; m - from];
                    // coordinates are wrapped, so one shift gives the
                    // minimum image
                    for coords in &axes {
                        let ck = coords[k];
                        for (acc, &c) in u.iter_mut().zip(&coords[from..]) {
                            let d = c - ck;
                            let d = if d > half {
                                d - extent
                            } else if d < -half {
                                d + extent
                            } else {
                                d
                            };
                            *acc += d * d;
                        }
                    }
                    for w in u.iter_mut() {
                        let x = *w * inv_two_s2;
                        *w = if x > KERNEL_CUTOFF { 0.0 } else { (-x).exp() };
                    }
                    u
                };
                let finish = |mut rho: Vec<f64>, z: f64| -> Vec<f64> {
                    let inv = 1.0 / z;
                    rho.iter_mut().for_each(|v| *v *= inv);
                    self.convolve(&rho)
                };
                let fields: Vec<Vec<f64>> = if pairwise {
                    // the kernel is symmetric: evaluate each pair once and
                    // deposit into both walkers' charge buffers, keeping
                    // every buffer's summation in ascending partner order
                    let mut rho = vec![0.0; m * g];
                    let mut z = vec![0.0; m];
                    for k in 0..m {
                        let weights = row(k, k);
                        let (head, tail) = rho.split_at_mut((k + 1) * g);
                        let rho_k = &mut head[k * g..];
                        z[k] += weights[0];
                        charges.deposit_one(k, weights[0], rho_k);
                        for (off, &w) in weights.iter().enumerate().skip(1) {
                            if w == 0.0 {
                                continue;
                            }
                            let l = k + off;
                            z[k] += w;
                            z[l] += w;
                            charges.deposit_one(l, w, rho_k);
                            charges.deposit_one(k, w, &mut tail[(off - 1) * g..off * g]);
                        }
                    }
                    rho.par_chunks(g)
                        .zip(z.par_iter())
                        .map(|(r, &z)| finish(r.to_vec(), z))
                        .collect()
                } else {
                    (0..m)
                        .into_par_iter()
                        .map(|k| {
                            let weights = row(k, 0);
                            let mut rho = vec![0.0; g];
                            let mut z = 0.0;
                            for (l, &w) in weights.iter().enumerate() {
                                if w != 0.0 {
                                    z += w;
                                    charges.deposit_one(l, w, &mut rho);
                                }
                            }
                            finish(rho, z)
                        })
                        .collect()
                };
                Ok(PartnerFields::PerWalker(fields))
            }
        }
    }
}

enum Charges {
    /// Cloud-in-cell weights of point walkers; `slots` of the four entries
    /// are used.
    Points {
        cells: Vec<[(usize, f64); 4]>,
        slots: usize,
    },
    Spread(Vec<Vec<f64>>),
}

impl Charges {
    #[inline]
    fn deposit_one(&self, l: usize, w: f64, rho: &mut [f64]) {
        match self {
            Charges::Points { cells, slots } => {
                for &(node, c) in &cells[l][..*slots] {
                    rho[node] += w * c;
                }
            }
            Charges::Spread(values) => {
                rho.iter_mut().zip(&values[l]).for_each(|(r, v)| *r += w * v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line() -> Grid {
        Grid::new(1, 16.0, 64).unwrap()
    }

    fn random_walkers(grid: &Grid, n: usize, m: usize, seed: u64) -> Vec<Vec<Position>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = grid.extent() / 2.0;
        (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        Position::xy(
                            rng.random_range(-half..half),
                            if grid.dim() == 2 { rng.random_range(-half..half) } else { 0.0 },
                        )
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn kernel_examples() {
        let g = line();
        let r = Position::x(1.0);
        assert_eq!(gaussian_kernel(&g, r, r, Sigma::Finite(0.7)), 1.0);
        let k = gaussian_kernel(&g, Position::x(0.3), Position::x(1.0), Sigma::Finite(0.7));
        assert_abs_diff_eq!(k, (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(k, 0.60653, epsilon = 1e-5);
        assert_eq!(gaussian_kernel(&g, Position::x(-7.0), r, Sigma::Infinite), 1.0);
    }

    #[test]
    fn kernel_weight_examples() {
        let g = line();
        let r = Position::x(0.5);
        let (w, z) = kernel_weights(&g, &[r; 5], r, Sigma::Finite(1.0));
        assert_eq!(w, vec![1.0; 5]);
        assert_eq!(z, 5.0);
        let (_, z) = kernel_weights(&g, &[r], r, Sigma::Finite(0.1));
        assert_eq!(z, 1.0);
        let ps = [Position::x(-3.0), Position::x(2.0), Position::x(7.0)];
        let (w, z) = kernel_weights(&g, &ps, ps[0], Sigma::Infinite);
        assert_eq!(w, vec![1.0; 3]);
        assert_eq!(z, 3.0);
    }

    #[test]
    fn sigma_parsing() {
        assert_eq!("inf".parse::<Sigma>().unwrap(), Sigma::Infinite);
        assert_eq!("1.5".parse::<Sigma>().unwrap(), Sigma::Finite(1.5));
        assert!("-1".parse::<Sigma>().is_err());
        assert!("0".parse::<Sigma>().is_err());
        let json = serde_json::to_string(&vec![Sigma::Finite(0.5), Sigma::Infinite]).unwrap();
        assert_eq!(json, r#"[0.5,"inf"]"#);
        let back: Vec<Sigma> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Sigma::Finite(0.5), Sigma::Infinite]);
    }

    #[test]
    fn single_electron_has_no_effective_potential() {
        let g = line();
        let walkers = random_walkers(&g, 1, 4, 1);
        let f = effective_potential(0, 2, &walkers, &SigmaParams::uniform(1, Sigma::Finite(1.0)), &g, 1.0)
            .unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_partner_walker_is_plain_repulsion() {
        let g = line();
        let walkers = random_walkers(&g, 2, 1, 2);
        let f = effective_potential(0, 0, &walkers, &SigmaParams::uniform(2, Sigma::Finite(0.3)), &g, 1.0)
            .unwrap();
        for (node, &v) in f.values().iter().enumerate() {
            let expect = coulomb_ee(&g, g.node_position(node), walkers[1][0], 1.0);
            assert_abs_diff_eq!(v, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn mean_field_is_walker_independent_average() {
        let g = line();
        let walkers = random_walkers(&g, 2, 6, 3);
        let sigma = SigmaParams::uniform(2, Sigma::Infinite);
        let f0 = effective_potential(0, 0, &walkers, &sigma, &g, 1.0).unwrap();
        for k in 1..6 {
            let fk = effective_potential(0, k, &walkers, &sigma, &g, 1.0).unwrap();
            for (a, b) in f0.values().iter().zip(fk.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
        for (node, &v) in f0.values().iter().enumerate() {
            let x = g.node_position(node);
            let avg: f64 = walkers[1].iter().map(|&r| coulomb_ee(&g, x, r, 1.0)).sum::<f64>() / 6.0;
            assert_abs_diff_eq!(v, avg, epsilon = 1e-13);
        }
    }

    #[test]
    fn convex_combination_bounds_and_small_sigma_limit() {
        let g = line();
        let walkers = random_walkers(&g, 2, 8, 4);
        for s in [0.2, 1.0, 5.0] {
            let f = effective_potential(1, 3, &walkers, &SigmaParams::uniform(2, Sigma::Finite(s)), &g, 1.0)
                .unwrap();
            for (node, &v) in f.values().iter().enumerate() {
                let x = g.node_position(node);
                let max = walkers[0]
                    .iter()
                    .map(|&r| coulomb_ee(&g, x, r, 1.0))
                    .fold(0.0, f64::max);
                assert!(v >= 0.0 && v <= max + 1e-12);
            }
        }
        let f = effective_potential(1, 3, &walkers, &SigmaParams::uniform(2, Sigma::Finite(1e-3)), &g, 1.0)
            .unwrap();
        for (node, &v) in f.values().iter().enumerate() {
            let own = coulomb_ee(&g, g.node_position(node), walkers[0][3], 1.0);
            assert_abs_diff_eq!(v, own, epsilon = 1e-9);
        }
    }

    #[test]
    fn normalization_at_least_one() {
        let g = line();
        let walkers = random_walkers(&g, 1, 50, 5);
        for k in 0..50 {
            let (_, z) = kernel_weights(&g, &walkers[0], walkers[0][k], Sigma::Finite(0.05));
            assert!(z >= 1.0);
        }
    }

    #[test]
    fn gridded_route_matches_direct_sum_on_nodes() {
        for g in [Grid::new(1, 12.0, 48).unwrap(), Grid::new(2, 10.0, 16).unwrap()] {
            let mut walkers = random_walkers(&g, 2, 7, 6);
            // snap partner walkers onto nodes so the deposit is exact
            for r in walkers[1].iter_mut() {
                let ([ix, iy], _) = g.locate(*r);
                *r = g.node_position(g.flatten(ix, iy));
            }
            let conv = PartnerConvolution::new(g, 1.0, 1.0);
            for sigma in [Sigma::Finite(0.8), Sigma::Infinite] {
                let fields = conv
                    .partner_fields(&walkers[1], None, sigma, PartnerSource::Walkers)
                    .unwrap();
                let params = SigmaParams::uniform(2, sigma);
                for k in 0..7 {
                    let direct = effective_potential(0, k, &walkers, &params, &g, 1.0).unwrap();
                    for (a, b) in fields.for_walker(k).iter().zip(direct.values()) {
                        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn gridded_route_off_node_error_is_second_order() {
        let coarse = Grid::new(1, 16.0, 64).unwrap();
        let fine = Grid::new(1, 16.0, 128).unwrap();
        let walkers = random_walkers(&coarse, 2, 9, 7);
        let err = |g: Grid| {
            let conv = PartnerConvolution::new(g, 1.0, 1.0);
            let fields = conv
                .partner_fields(&walkers[1], None, Sigma::Finite(1.0), PartnerSource::Walkers)
                .unwrap();
            let direct =
                effective_potential(0, 4, &walkers, &SigmaParams::uniform(2, Sigma::Finite(1.0)), &g, 1.0)
                    .unwrap();
            fields
                .for_walker(4)
                .iter()
                .zip(direct.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let (e_coarse, e_fine) = (err(coarse), err(fine));
        assert!(e_coarse < 0.01, "coarse error {e_coarse}");
        assert!(e_fine < e_coarse / 3.0, "refinement {e_coarse} -> {e_fine}");
    }

    #[test]
    fn guide_density_mean_field_is_hartree_potential() {
        let g = line();
        let wave = Field::from_fn(g, |r| Complex64::new((-(r.coord(0) - 1.0).powi(2)).exp(), 0.0));
        let mut wave = wave;
        wave.normalize();
        let waves = vec![wave.clone(); 3];
        let conv = PartnerConvolution::new(g, 1.0, 1.0);
        let fields = conv
            .partner_fields(&[Position::x(0.0); 3], Some(&waves), Sigma::Infinite, PartnerSource::GuideDensity)
            .unwrap();
        assert!(fields.is_shared());
        let dens = wave.density();
        for (node, &v) in fields.for_walker(0).iter().enumerate() {
            let x = g.node_position(node);
            let direct: f64 = dens
                .values()
                .iter()
                .enumerate()
                .map(|(y, d)| d * g.cell_volume() * coulomb_ee(&g, x, g.node_position(y), 1.0))
                .sum();
            assert_abs_diff_eq!(v, direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn pairwise_and_row_paths_agree_bitwise() {
        for g in [line(), Grid::new(2, 10.0, 16).unwrap()] {
            let walkers = random_walkers(&g, 1, 40, 11);
            let conv = PartnerConvolution::new(g, 1.0, 1.0);
            let waves: Vec<Field> = walkers[0]
                .iter()
                .map(|&c| {
                    let mut w = Field::from_fn(g, |r| Complex64::new((-g.distance_sq(r, c)).exp(), 0.0));
                    w.normalize();
                    w
                })
                .collect();
            for source in [PartnerSource::Walkers, PartnerSource::GuideDensity] {
                for sigma in [Sigma::Finite(0.3), Sigma::Finite(2.0)] {
                    let a = conv
                        .partner_fields_with(&walkers[0], Some(&waves), sigma, source, true)
                        .unwrap();
                    let b = conv
                        .partner_fields_with(&walkers[0], Some(&waves), sigma, source, false)
                        .unwrap();
                    assert_eq!(a, b);
                }
            }
        }
    }
}

//! Screened soft-core lattice potential with vacancies and the soft-core
//! electron-electron repulsion.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TdqmcError};
use crate::grid::{Grid, Position, RealField};

/// Soft-core regularization length `a` (a.u.).
pub const SOFT_CORE: f64 = 1.0;
/// Site interaction strength `V0` (a.u.).
pub const SITE_DEPTH: f64 = -1.0;
/// Screening length `lambda` (a.u.).
pub const SCREENING_LENGTH: f64 = 1.11;

/// Integer lattice coordinates `(n)` or `(n, m)`; 1D sites keep `m = 0`.
pub type SiteIndex = [i64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    dim: usize,
    sites: Vec<SiteIndex>,
    vacancies: Vec<SiteIndex>,
    lattice_constant: f64,
    depth: f64,
    soft_core: f64,
    screening: f64,
    origin: Position,
    ee_strength: f64,
}

impl LatticeSpec {
    /// Validated lattice with default potential parameters, the site
    /// bounding box centered on the coordinate origin, and full-strength
    /// electron-electron repulsion.
    pub fn new(
        dim: usize,
        sites: Vec<SiteIndex>,
        vacancies: Vec<SiteIndex>,
        lattice_constant: f64,
    ) -> Result<Self> {
        let mut spec = LatticeSpec {
            dim,
            sites,
            vacancies,
            lattice_constant,
            depth: SITE_DEPTH,
            soft_core: SOFT_CORE,
            screening: SCREENING_LENGTH,
            origin: Position::default(),
            ee_strength: 1.0,
        };
        spec.origin = spec.centered_origin();
        spec.validate()?;
        Ok(spec)
    }

    /// `count` sites `0..count` along x.
    pub fn chain(count: usize, lattice_constant: f64) -> Result<Self> {
        let sites = (0..count as i64).map(|n| [n, 0]).collect();
        Self::new(1, sites, Vec::new(), lattice_constant)
    }

    /// `nx * ny` square lattice.
    pub fn square(nx: usize, ny: usize, lattice_constant: f64) -> Result<Self> {
        let sites = (0..nx as i64)
            .flat_map(|n| (0..ny as i64).map(move |m| [n, m]))
            .collect();
        Self::new(2, sites, Vec::new(), lattice_constant)
    }

    pub fn with_vacancies(mut self, vacancies: Vec<SiteIndex>) -> Result<Self> {
        self.vacancies = vacancies;
        self.validate()?;
        Ok(self)
    }

    pub fn with_potential(mut self, depth: f64, soft_core: f64, screening: f64) -> Result<Self> {
        self.depth = depth;
        self.soft_core = soft_core;
        self.screening = screening;
        self.validate()?;
        Ok(self)
    }

    pub fn with_origin(mut self, origin: Position) -> Self {
        self.origin = origin;
        self
    }

    /// Scales the electron-electron repulsion; zero switches it off.
    pub fn with_ee_strength(mut self, strength: f64) -> Result<Self> {
        self.ee_strength = strength;
        self.validate()?;
        Ok(self)
    }

    fn centered_origin(&self) -> Position {
        let mut origin = Position::default();
        for axis in 0..self.dim.min(2) {
            let (lo, hi) = self.sites.iter().fold((i64::MAX, i64::MIN), |(lo, hi), s| {
                (lo.min(s[axis]), hi.max(s[axis]))
            });
            if lo <= hi {
                origin.0[axis] = -0.5 * (lo + hi) as f64 * self.lattice_constant;
            }
        }
        origin
    }

    fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(TdqmcError::invalid("dim", format!("must be 1 or 2, got {}", self.dim)));
        }
        if !(self.lattice_constant > 0.0) {
            return Err(TdqmcError::invalid("lattice_constant", "must be positive"));
        }
        if !(self.soft_core > 0.0) {
            return Err(TdqmcError::invalid("soft_core", "must be positive"));
        }
        if !(self.screening > 0.0) {
            return Err(TdqmcError::invalid("screening", "must be positive"));
        }
        if !self.depth.is_finite() {
            return Err(TdqmcError::invalid("depth", "must be finite"));
        }
        if !(self.ee_strength >= 0.0 && self.ee_strength.is_finite()) {
            return Err(TdqmcError::invalid("ee_strength", "must be finite and non-negative"));
        }
        if self.dim == 1 && self.sites.iter().chain(&self.vacancies).any(|s| s[1] != 0) {
            return Err(TdqmcError::invalid("sites", "1D sites must have a single coordinate"));
        }
        if let Some(v) = self.vacancies.iter().find(|v| !self.sites.contains(v)) {
            return Err(TdqmcError::invalid(
                "vacancies",
                format!("vacancy {v:?} is not a lattice site"),
            ));
        }
        if self.occupied_sites().next().is_none() {
            return Err(TdqmcError::invalid("sites", "no sites remain after removing vacancies"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> &[SiteIndex] {
        &self.sites
    }

    pub fn vacancies(&self) -> &[SiteIndex] {
        &self.vacancies
    }

    pub fn lattice_constant(&self) -> f64 {
        self.lattice_constant
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn soft_core(&self) -> f64 {
        self.soft_core
    }

    pub fn screening(&self) -> f64 {
        self.screening
    }

    pub fn origin(&self) -> Position {
        self.origin
    }

    pub fn ee_strength(&self) -> f64 {
        self.ee_strength
    }

    /// Sites that keep their potential well, in declaration order.
    pub fn occupied_sites(&self) -> impl Iterator<Item = SiteIndex> + '_ {
        self.sites
            .iter()
            .copied()
            .filter(move |s| !self.vacancies.contains(s))
    }

    pub fn site_position(&self, site: SiteIndex) -> Position {
        let d = self.lattice_constant;
        Position::xy(
            self.origin.0[0] + site[0] as f64 * d,
            if self.dim == 2 { self.origin.0[1] + site[1] as f64 * d } else { 0.0 },
        )
    }

    pub fn occupied_positions(&self) -> Vec<Position> {
        self.occupied_sites().map(|s| self.site_position(s)).collect()
    }

    /// `sum_sites V0 / sqrt(r^2 + a^2) * exp(-r / lambda)` over occupied
    /// sites, with minimum-image distances on the periodic domain.
    pub fn potential_at(&self, grid: &Grid, r: Position) -> f64 {
        let a2 = self.soft_core * self.soft_core;
        self.occupied_sites()
            .map(|s| {
                let dist_sq = grid.distance_sq(r, self.site_position(s));
                self.depth / (dist_sq + a2).sqrt() * (-dist_sq.sqrt() / self.screening).exp()
            })
            .sum()
    }

    /// Electron-electron repulsion between two positions, including
    /// `ee_strength`.
    pub fn interaction(&self, grid: &Grid, ri: Position, rj: Position) -> f64 {
        self.ee_strength * coulomb_ee(grid, ri, rj, self.soft_core)
    }
}

/// Lattice potential at `r`.
pub fn lattice_potential(spec: &LatticeSpec, grid: &Grid, r: Position) -> f64 {
    spec.potential_at(grid, r)
}

/// `1 / sqrt(|ri - rj|^2 + a^2)` under the minimum-image convention.
#[inline]
pub fn coulomb_ee(grid: &Grid, ri: Position, rj: Position, soft_core: f64) -> f64 {
    1.0 / (grid.distance_sq(ri, rj) + soft_core * soft_core).sqrt()
}

/// Lattice potential evaluated on every grid node.
pub fn sample_on_grid(spec: &LatticeSpec, grid: &Grid) -> Result<RealField> {
    grid.check_dim(spec.dim())?;
    Ok(RealField::from_fn(*grid, |r| spec.potential_at(grid, r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn line(extent: f64, points: usize) -> Grid {
        Grid::new(1, extent, points).unwrap()
    }

    #[test]
    fn single_site_depth_at_center() {
        let spec = LatticeSpec::chain(1, 4.0).unwrap();
        let g = line(20.0, 64);
        assert_abs_diff_eq!(spec.potential_at(&g, Position::x(0.0)), -1.0, epsilon = 1e-15);
    }

    #[test]
    fn vacancy_removes_well() {
        let spec = LatticeSpec::chain(9, 4.0)
            .unwrap()
            .with_vacancies(vec![[4, 0]])
            .unwrap();
        let g = line(36.0, 144);
        assert_eq!(spec.occupied_sites().count(), 8);
        let at_vacancy = spec.potential_at(&g, Position::x(0.0));
        let manual: f64 = spec
            .occupied_positions()
            .iter()
            .map(|p| {
                let r = g.min_image(p.coord(0)).abs();
                -1.0 / (r * r + 1.0).sqrt() * (-r / 1.11).exp()
            })
            .sum();
        assert_abs_diff_eq!(at_vacancy, manual, epsilon = 1e-14);
        assert!(at_vacancy > -0.1, "no deep well at the vacancy: {at_vacancy}");
    }

    #[test]
    fn far_field_vanishes() {
        let spec = LatticeSpec::chain(1, 1.0).unwrap();
        let g = line(200.0, 64);
        assert!(spec.potential_at(&g, Position::x(99.0)).abs() < 1e-30);
    }

    #[test]
    fn coulomb_examples() {
        let g = line(50.0, 64);
        assert_abs_diff_eq!(coulomb_ee(&g, Position::x(1.0), Position::x(1.0), 1.0), 1.0);
        let d = 3f64.sqrt();
        assert_abs_diff_eq!(
            coulomb_ee(&g, Position::x(0.0), Position::x(d), 1.0),
            0.5,
            epsilon = 1e-15
        );
        // minimum image across the boundary
        assert_abs_diff_eq!(
            coulomb_ee(&g, Position::x(-24.0), Position::x(24.0), 1.0),
            1.0 / 5f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn restoring_vacancy_lowers_potential() {
        let g = line(36.0, 144);
        let with_vacancy = LatticeSpec::chain(9, 4.0)
            .unwrap()
            .with_vacancies(vec![[4, 0]])
            .unwrap();
        let full = LatticeSpec::chain(9, 4.0).unwrap();
        let center = full.site_position([4, 0]);
        assert!(full.potential_at(&g, center) < with_vacancy.potential_at(&g, center));
    }

    #[test]
    fn translation_invariance_of_full_periodic_chain() {
        let spec = LatticeSpec::chain(6, 4.0).unwrap();
        let g = line(24.0, 96);
        for x in [-3.3, 0.1, 7.7] {
            let a = spec.potential_at(&g, Position::x(x));
            let b = spec.potential_at(&g, Position::x(x + 4.0));
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampled_diatomic_is_symmetric_double_well() {
        let spec = LatticeSpec::chain(2, 4.0).unwrap();
        let g = line(16.0, 128);
        let v = sample_on_grid(&spec, &g).unwrap();
        let vals = v.values();
        // nodes at -2 and +2 are indices 48 and 80
        assert!(vals[48] < vals[64] && vals[80] < vals[64]);
        for j in 1..64 {
            assert_abs_diff_eq!(vals[64 - j], vals[64 + j], epsilon = 1e-14);
        }
        let g2 = Grid::new(2, 16.0, 16).unwrap();
        assert!(matches!(
            sample_on_grid(&spec, &g2),
            Err(TdqmcError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(LatticeSpec::chain(2, 0.0).is_err());
        assert!(LatticeSpec::chain(2, 4.0).unwrap().with_vacancies(vec![[5, 0]]).is_err());
        assert!(LatticeSpec::chain(1, 4.0).unwrap().with_vacancies(vec![[0, 0]]).is_err());
        assert!(LatticeSpec::chain(2, 4.0).unwrap().with_potential(-1.0, 0.0, 1.0).is_err());
        assert!(LatticeSpec::chain(2, 4.0).unwrap().with_potential(-1.0, 1.0, -1.0).is_err());
    }
}

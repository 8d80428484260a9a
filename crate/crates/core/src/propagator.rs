//! Imaginary-time split-step propagation of guide waves and the
//! drift-diffusion update of their walkers (atomic units, hbar = m = 1).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TdqmcError};
use crate::grid::{Field, Grid, Position, RealField};
use crate::spectral::{KineticPropagator, PeriodicFft};

pub const DEFAULT_DTAU: f64 = 0.01;
pub const DEFAULT_DRIFT_EPSILON: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub dtau: f64,
    /// Wave-magnitude floor, relative to `max |phi|`, below which the drift
    /// falls back to a capped step up the magnitude gradient.
    pub drift_epsilon: f64,
    /// Largest drift displacement `|v| * dtau` allowed per step.
    pub drift_cap: f64,
}

impl StepParams {
    /// Default regularization: `drift_epsilon = 1e-8`, cap of one grid
    /// spacing.
    pub fn new(dtau: f64, grid: &Grid) -> Result<Self> {
        let params = StepParams {
            dtau,
            drift_epsilon: DEFAULT_DRIFT_EPSILON,
            drift_cap: grid.spacing(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dtau > 0.0 && self.dtau.is_finite()) {
            return Err(TdqmcError::invalid("dtau", "must be positive"));
        }
        if !(self.drift_epsilon > 0.0) {
            return Err(TdqmcError::invalid("drift_epsilon", "must be positive"));
        }
        if !(self.drift_cap > 0.0) {
            return Err(TdqmcError::invalid("drift_cap", "must be positive"));
        }
        Ok(())
    }
}

/// Symmetric split-step for `d phi / d tau = (laplacian / 2 - V) phi`.
#[derive(Clone, Debug)]
pub struct GuideWaveStepper {
    grid: Grid,
    dtau: f64,
    kinetic: KineticPropagator,
}

impl GuideWaveStepper {
    pub fn new(grid: Grid, dtau: f64) -> Self {
        let fft = PeriodicFft::new(grid.points_per_axis(), grid.dim(), grid.spacing());
        GuideWaveStepper {
            grid,
            dtau,
            kinetic: KineticPropagator::new(fft, dtau),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn kinetic(&self) -> &KineticPropagator {
        &self.kinetic
    }

    /// Advances `wave` by one step under `potential` and renormalizes it.
    pub fn step(&self, wave: &mut [Complex64], potential: &[f64]) -> Result<()> {
        let half = 0.5 * self.dtau;
        let factors: Vec<f64> = potential.iter().map(|v| (-v * half).exp()).collect();
        wave.iter_mut().zip(&factors).for_each(|(w, f)| *w *= *f);
        self.kinetic.apply(wave);
        wave.iter_mut().zip(&factors).for_each(|(w, f)| *w *= *f);
        let norm_sq: f64 = wave.iter().map(|w| w.norm_sqr()).sum::<f64>() * self.grid.cell_volume();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(TdqmcError::Divergence {
                step: 0,
                detail: format!("guide wave norm became {norm_sq}; reduce dtau"),
            });
        }
        let inv = norm_sq.sqrt().recip();
        wave.iter_mut().for_each(|w| *w *= inv);
        Ok(())
    }

    /// `<phi| -laplacian/2 + V |phi>` for a normalized wave.
    pub fn energy(&self, wave: &[Complex64], potential: &[f64]) -> f64 {
        let dv = self.grid.cell_volume();
        let kinetic = self.kinetic.expectation(wave) * dv;
        let pot: f64 = wave
            .iter()
            .zip(potential)
            .map(|(w, v)| w.norm_sqr() * v)
            .sum::<f64>()
            * dv;
        kinetic + pot
    }
}

/// One imaginary-time step of a normalized guide wave under `v_total`.
pub fn step_guide_wave(wave: &Field, v_total: &RealField, dtau: f64) -> Result<Field> {
    if wave.grid() != v_total.grid() {
        return Err(TdqmcError::invalid("v_total", "potential lives on a different grid"));
    }
    let stepper = GuideWaveStepper::new(*wave.grid(), dtau);
    let mut out = wave.clone();
    stepper.step(out.values_mut(), v_total.values())?;
    Ok(out)
}

/// Rayleigh quotient of a normalized wave.
pub fn rayleigh_energy(wave: &Field, potential: &RealField) -> f64 {
    GuideWaveStepper::new(*wave.grid(), DEFAULT_DTAU).energy(wave.values(), potential.values())
}

/// Drift velocity `grad phi / phi` at `r` for a real-valued guide wave.
///
/// Returns zero-padded 2-vectors in 1D. The displacement `|v| * dtau` is
/// clamped to `drift_cap`; where `|phi(r)|` is below
/// `drift_epsilon * max |phi|` the walker is pushed at the cap up the
/// magnitude gradient.
pub fn drift_velocity(wave: &Field, r: Position, params: &StepParams) -> [f64; 2] {
    drift_with_floor(wave.grid(), wave.values(), r, params.drift_epsilon * wave.max_abs(), params)
}

pub(crate) fn drift_with_floor(
    grid: &Grid,
    values: &[Complex64],
    r: Position,
    floor: f64,
    params: &StepParams,
) -> [f64; 2] {
    let n = grid.points_per_axis();
    let h = grid.spacing();
    let dim = grid.dim();
    let cells = grid.cell_weights(r);
    let mut phi = 0.0;
    let mut grad = [0.0f64; 2];
    for &(node, w) in &cells[..1 << dim] {
        phi += w * values[node].re;
        let [ix, iy] = grid.unflatten(node);
        let idx = [ix, iy];
        for axis in 0..dim {
            let mut up = idx;
            let mut down = idx;
            up[axis] = (idx[axis] + 1) % n;
            down[axis] = (idx[axis] + n - 1) % n;
            let d = values[grid.flatten(up[0], up[1])].re - values[grid.flatten(down[0], down[1])].re;
            grad[axis] += w * d / (2.0 * h);
        }
    }
    let max_speed = params.drift_cap / params.dtau;
    if phi.abs() < floor {
        let s = phi.signum();
        let dir = [grad[0] * s, grad[1] * s];
        let len = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
        if len == 0.0 {
            return [0.0; 2];
        }
        return [dir[0] / len * max_speed, dir[1] / len * max_speed];
    }
    let mut v = [grad[0] / phi, grad[1] / phi];
    let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if speed > max_speed {
        let scale = max_speed / speed;
        v[0] *= scale;
        v[1] *= scale;
    }
    v
}

/// `r' = wrap(r + v_D dtau + noise * sqrt(dtau))`; `noise` holds standard
/// normal deviates (only the first `dim` are used).
pub fn step_walker(r: Position, wave: &Field, params: &StepParams, noise: [f64; 2]) -> Position {
    let v = drift_velocity(wave, r, params);
    advance_walker(wave.grid(), r, v, params.dtau, noise)
}

#[inline]
pub(crate) fn advance_walker(grid: &Grid, r: Position, v: [f64; 2], dtau: f64, noise: [f64; 2]) -> Position {
    let diffusion = dtau.sqrt();
    let mut out = r;
    for axis in 0..grid.dim() {
        out.0[axis] += v[axis] * dtau + noise[axis] * diffusion;
    }
    grid.wrap_position(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn normalized(grid: Grid, f: impl Fn(Position) -> f64) -> Field {
        let mut w = Field::from_fn(grid, |r| Complex64::new(f(r), 0.0));
        w.normalize();
        w
    }

    #[test]
    fn free_plane_wave_is_a_fixed_point() {
        let g = Grid::new(1, 10.0, 64).unwrap();
        let k = 2.0 * std::f64::consts::PI * 3.0 / 10.0;
        let mut wave = Field::from_fn(g, |r| Complex64::from_polar(1.0, k * r.coord(0)));
        wave.normalize();
        let stepper = GuideWaveStepper::new(g, 0.05);
        // before renormalization the amplitude decays by exp(-k^2 dtau / 2)
        let mut raw = wave.values().to_vec();
        stepper.kinetic().apply(&mut raw);
        assert_abs_diff_eq!(raw[5].norm() / wave.values()[5].norm(), (-0.5 * k * k * 0.05f64).exp(), epsilon = 1e-12);
        let zero = RealField::zeros(g);
        let out = step_guide_wave(&wave, &zero, 0.05).unwrap();
        for (a, b) in out.values().iter().zip(wave.values()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn harmonic_relaxation_reaches_half() {
        let g = Grid::new(1, 20.0, 256).unwrap();
        let v = RealField::from_fn(g, |r| 0.5 * r.coord(0).powi(2));
        let stepper = GuideWaveStepper::new(g, 0.01);
        let mut wave = normalized(g, |r| (-(r.coord(0) - 1.3).powi(2) / 3.0).exp() * (1.0 + 0.3 * r.coord(0).sin()));
        let mut last = f64::INFINITY;
        for step in 0..2000 {
            stepper.step(wave.values_mut(), v.values()).unwrap();
            let e = stepper.energy(wave.values(), v.values());
            if step < 100 {
                assert!(e <= last + 1e-9, "energy rose at step {step}: {last} -> {e}");
            }
            last = e;
            assert_abs_diff_eq!(wave.norm_sq(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(last, 0.5, epsilon = 1e-4);
    }

    #[test]
    fn nan_potential_is_reported() {
        let g = Grid::new(1, 10.0, 16).unwrap();
        let wave = normalized(g, |_| 1.0);
        let mut v = RealField::zeros(g);
        v.values_mut()[3] = f64::NAN;
        assert!(matches!(
            step_guide_wave(&wave, &v, 0.01),
            Err(TdqmcError::Divergence { .. })
        ));
    }

    #[test]
    fn drift_of_gaussian_matches_log_derivative() {
        let g = Grid::new(1, 20.0, 512).unwrap();
        let s: f64 = 1.2;
        let wave = normalized(g, |r| (-r.coord(0).powi(2) / (4.0 * s * s)).exp());
        let params = StepParams {
            dtau: 0.01,
            drift_epsilon: 1e-8,
            drift_cap: 10.0,
        };
        for x in [-2.0, -0.37, 0.0, 1.1, 3.0] {
            let v = drift_velocity(&wave, Position::x(x), &params);
            assert_abs_diff_eq!(v[0], -x / (2.0 * s * s), epsilon = 2e-3);
            assert_eq!(v[1], 0.0);
        }
    }

    #[test]
    fn uniform_wave_has_no_drift() {
        let g = Grid::new(2, 8.0, 16).unwrap();
        let wave = normalized(g, |_| 1.0);
        let params = StepParams::new(0.01, &g).unwrap();
        assert_eq!(drift_velocity(&wave, Position::xy(0.3, -2.2), &params), [0.0, 0.0]);
    }

    #[test]
    fn cap_engages_near_nodes() {
        let g = Grid::new(1, 10.0, 100).unwrap();
        let wave = normalized(g, |r| if r.coord(0) < 0.0 { 0.0 } else { (-(r.coord(0) - 2.0).powi(2)).exp() });
        let params = StepParams::new(0.01, &g).unwrap();
        let v = drift_velocity(&wave, Position::x(-3.0), &params);
        // the wave vanishes there and has zero gradient: no direction
        assert_eq!(v, [0.0, 0.0]);
        let near = Position::x(-0.05);
        let v = drift_velocity(&wave, near, &params);
        assert_abs_diff_eq!(v[0].abs() * params.dtau, params.drift_cap, epsilon = 1e-12);
        assert!(v[0] > 0.0);
    }

    #[test]
    fn walker_fixed_point_and_wrap() {
        let g = Grid::new(1, 10.0, 64).unwrap();
        let wave = normalized(g, |_| 1.0);
        let params = StepParams::new(0.01, &g).unwrap();
        let r = Position::x(1.234);
        assert_eq!(step_walker(r, &wave, &params, [0.0, 0.0]), r);
        let out = step_walker(Position::x(4.9), &wave, &params, [30.0, 0.0]);
        assert_abs_diff_eq!(out.coord(0), 4.9 + 3.0 - 10.0, epsilon = 1e-12);
        assert!((-5.0..5.0).contains(&out.coord(0)));
    }
}

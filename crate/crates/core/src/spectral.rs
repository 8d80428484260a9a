//! Multidimensional periodic FFTs and the spectral kinetic operator.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// FFT over a hypercubic periodic box with `n` points on each of `rank`
/// axes, stored row-major.
#[derive(Clone)]
pub struct PeriodicFft {
    n: usize,
    rank: usize,
    spacing: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PeriodicFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicFft")
            .field("n", &self.n)
            .field("rank", &self.rank)
            .field("spacing", &self.spacing)
            .finish()
    }
}

impl PeriodicFft {
    pub fn new(n: usize, rank: usize, spacing: f64) -> Self {
        let mut planner = FftPlanner::new();
        PeriodicFft {
            n,
            rank,
            spacing,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.rank as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform in place, including the `1/len` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(data.len(), self.len(), "buffer does not match FFT box");
        let n = self.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // last axis is contiguous
        fft.process_with_scratch(data, &mut scratch);
        if self.rank == 1 {
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.rank - 1 {
            let stride = n.pow((self.rank - 1 - axis) as u32);
            let block = stride * n;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let start = outer + inner;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[start + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, slot) in line.iter().enumerate() {
                        data[start + j * stride] = *slot;
                    }
                }
            }
        }
    }

    /// Angular wavenumber of FFT bin `j` along one axis.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.n as i64;
        let signed = if (j as i64) < (n + 1) / 2 { j as i64 } else { j as i64 - n };
        2.0 * std::f64::consts::PI * signed as f64 / (self.n as f64 * self.spacing)
    }

    /// `|k|^2` for every flat index of the transformed array.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let per_axis: Vec<f64> = (0..self.n).map(|j| self.wavenumber(j).powi(2)).collect();
        (0..self.len())
            .map(|mut flat| {
                let mut total = 0.0;
                for _ in 0..self.rank {
                    total += per_axis[flat % self.n];
                    flat /= self.n;
                }
                total
            })
            .collect()
    }
}

/// Free-particle imaginary-time evolution `exp(dtau * laplacian / 2)`
/// (atomic units) applied in Fourier space.
#[derive(Clone, Debug)]
pub struct KineticPropagator {
    fft: PeriodicFft,
    factors: Vec<f64>,
    kinetic: Vec<f64>,
}

impl KineticPropagator {
    pub fn new(fft: PeriodicFft, dtau: f64) -> Self {
        let kinetic: Vec<f64> = fft.wavenumber_sq().into_iter().map(|k2| 0.5 * k2).collect();
        let factors = kinetic.iter().map(|t| (-t * dtau).exp()).collect();
        KineticPropagator {
            fft,
            factors,
            kinetic,
        }
    }

    pub fn fft(&self) -> &PeriodicFft {
        &self.fft
    }

    pub fn apply(&self, data: &mut [Complex64]) {
        self.fft.forward(data);
        data.iter_mut()
            .zip(&self.factors)
            .for_each(|(v, f)| *v *= *f);
        self.fft.inverse(data);
    }

    /// `sum_j conj(psi_j) (T psi)_j`, without the integration weight.
    pub fn expectation(&self, data: &[Complex64]) -> f64 {
        let mut work = data.to_vec();
        self.fft.forward(&mut work);
        let total: f64 = work
            .iter()
            .zip(&self.kinetic)
            .map(|(v, t)| v.norm_sqr() * t)
            .sum();
        total / self.fft.len() as f64
    }

    /// `T psi` on the grid.
    pub fn apply_kinetic(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut work = data.to_vec();
        self.fft.forward(&mut work);
        work.iter_mut().zip(&self.kinetic).for_each(|(v, t)| *v *= *t);
        self.fft.inverse(&mut work);
        work
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn round_trip_rank_three() {
        let fft = PeriodicFft::new(8, 3, 0.5);
        let orig: Vec<Complex64> = (0..fft.len())
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn plane_wave_lands_in_single_bin_2d() {
        let n = 16;
        let h = 0.25;
        let fft = PeriodicFft::new(n, 2, h);
        let l = n as f64 * h;
        let (mx, my) = (3usize, 14usize);
        let mut data: Vec<Complex64> = (0..n * n)
            .map(|i| {
                let (ix, iy) = (i / n, i % n);
                let phase = 2.0 * std::f64::consts::PI * (mx * ix + my * iy) as f64 / n as f64;
                Complex64::from_polar(1.0, phase)
            })
            .collect();
        fft.forward(&mut data);
        let peak = mx * n + my;
        assert_abs_diff_eq!(data[peak].norm(), (n * n) as f64, epsilon = 1e-9);
        let k2 = fft.wavenumber_sq()[peak];
        let kx = 2.0 * std::f64::consts::PI * 3.0 / l;
        let ky = 2.0 * std::f64::consts::PI * -2.0 / l;
        assert_abs_diff_eq!(k2, kx * kx + ky * ky, epsilon = 1e-12);
    }

    #[test]
    fn kinetic_expectation_of_plane_wave() {
        let n = 32;
        let h = 0.2;
        let fft = PeriodicFft::new(n, 1, h);
        let k = fft.wavenumber(5);
        let prop = KineticPropagator::new(fft, 0.01);
        let data: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, k * j as f64 * h))
            .collect();
        // sum |psi|^2 = n, so the per-node expectation is n * k^2 / 2
        assert_abs_diff_eq!(prop.expectation(&data), n as f64 * 0.5 * k * k, epsilon = 1e-9);
    }
}

//! The coupled walker/guide-wave ensemble: initialization, self-consistent
//! imaginary-time relaxation, the energy estimator, and the variational
//! scan over the nonlocal length.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TdqmcError};
use crate::grid::{Field, Grid, Position, RealField};
use crate::kernel::{PartnerConvolution, PartnerFields, PartnerSource, Sigma, SigmaParams};
use crate::potentials::{sample_on_grid, LatticeSpec};
use crate::propagator::{advance_walker, drift_with_floor, GuideWaveStepper, StepParams};

/// Shape of the guide waves at `tau = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialWave {
    /// Gaussian on the electron's own site.
    #[default]
    Localized,
    /// Sum of Gaussians over every occupied site (Bloch-like spread).
    Delocalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitOptions {
    pub shape: InitialWave,
    /// Standard deviation of each Gaussian in the wave amplitude.
    pub width: f64,
}

impl Default for InitOptions {
    fn default() -> Self {
        InitOptions {
            shape: InitialWave::Localized,
            width: 1.0,
        }
    }
}

/// `N` electrons, each carried by `M` walker/guide-wave pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct TdqmcState {
    grid: Grid,
    waves: Vec<Vec<Field>>,
    positions: Vec<Vec<Position>>,
    streams: Vec<Vec<ChaCha8Rng>>,
    sigma: SigmaParams,
    tau: f64,
}

impl TdqmcState {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn electrons(&self) -> usize {
        self.waves.len()
    }

    pub fn walkers(&self) -> usize {
        self.waves[0].len()
    }

    pub fn waves(&self, electron: usize) -> &[Field] {
        &self.waves[electron]
    }

    pub fn positions(&self, electron: usize) -> &[Position] {
        &self.positions[electron]
    }

    pub fn all_positions(&self) -> &[Vec<Position>] {
        &self.positions
    }

    pub fn sigma(&self) -> &SigmaParams {
        &self.sigma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `(1/M) sum_k |phi_i^k|^2`.
    pub fn electron_density(&self, electron: usize) -> RealField {
        let mut acc = vec![0.0; self.grid.len()];
        for w in &self.waves[electron] {
            acc.iter_mut().zip(w.values()).for_each(|(a, v)| *a += v.norm_sqr());
        }
        let inv = 1.0 / self.walkers() as f64;
        acc.iter_mut().for_each(|a| *a *= inv);
        Field::new(self.grid, acc).expect("grid-sized buffer")
    }

    /// One-body density averaged over electrons, normalized to one.
    pub fn mean_density(&self) -> RealField {
        let n = self.electrons() as f64;
        let mut acc = vec![0.0; self.grid.len()];
        for i in 0..self.electrons() {
            let d = self.electron_density(i);
            acc.iter_mut().zip(d.values()).for_each(|(a, v)| *a += v / n);
        }
        Field::new(self.grid, acc).expect("grid-sized buffer")
    }
}

fn gaussian_wave(grid: &Grid, centers: &[Position], width: f64) -> Field {
    let mut wave = Field::from_fn(*grid, |r| {
        let amp: f64 = centers
            .iter()
            .map(|&c| (-grid.distance_sq(r, c) / (2.0 * width * width)).exp())
            .sum();
        Complex64::new(amp, 0.0)
    });
    wave.normalize();
    wave
}

fn walker_stream(seed: u64, electron: usize, walker: usize, walkers: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((electron * walkers + walker) as u64);
    rng
}

/// Draws a continuous position from `|phi|^2`: a node by its weight, then
/// a uniform offset inside that node's cell.
pub(crate) fn sample_position(wave: &Field, rng: &mut impl Rng) -> Position {
    let grid = wave.grid();
    let total: f64 = wave.values().iter().map(|v| v.norm_sqr()).sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut node = grid.len() - 1;
    for (idx, v) in wave.values().iter().enumerate() {
        acc += v.norm_sqr();
        if acc > target {
            node = idx;
            break;
        }
    }
    let h = grid.spacing();
    let mut r = grid.node_position(node);
    for axis in 0..grid.dim() {
        r.0[axis] += (rng.random::<f64>() - 0.5) * h;
    }
    grid.wrap_position(r)
}

/// Builds the initial ensemble. Electron `i` is assigned the `i`-th
/// occupied site; all its `M` waves start identical and each walker is
/// drawn from `|phi|^2` on its own deterministic random stream.
pub fn init_ensemble(
    spec: &LatticeSpec,
    grid: &Grid,
    electrons: usize,
    walkers: usize,
    sigma: SigmaParams,
    seed: u64,
    init: InitOptions,
) -> Result<TdqmcState> {
    grid.check_dim(spec.dim())?;
    if electrons == 0 {
        return Err(TdqmcError::invalid("electrons", "need at least one electron"));
    }
    if walkers == 0 {
        return Err(TdqmcError::invalid("walkers", "need at least one walker"));
    }
    if !(init.width > 0.0) {
        return Err(TdqmcError::invalid("init_width", "must be positive"));
    }
    let sites = spec.occupied_positions();
    if electrons > sites.len() {
        return Err(TdqmcError::TooManyElectrons {
            requested: electrons,
            available: sites.len(),
        });
    }
    if sigma.len() != electrons {
        return Err(TdqmcError::invalid("sigma", "need one nonlocal length per electron"));
    }

    let mut waves = Vec::with_capacity(electrons);
    let mut positions = Vec::with_capacity(electrons);
    let mut streams = Vec::with_capacity(electrons);
    for (i, &site) in sites.iter().enumerate().take(electrons) {
        let wave = match init.shape {
            InitialWave::Localized => gaussian_wave(grid, &[site], init.width),
            InitialWave::Delocalized => gaussian_wave(grid, &sites, init.width),
        };
        let mut rngs: Vec<ChaCha8Rng> = (0..walkers).map(|k| walker_stream(seed, i, k, walkers)).collect();
        let pos = rngs.iter_mut().map(|rng| sample_position(&wave, rng)).collect();
        waves.push(vec![wave; walkers]);
        positions.push(pos);
        streams.push(rngs);
    }
    Ok(TdqmcState {
        grid: *grid,
        waves,
        positions,
        streams,
        sigma,
        tau: 0.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxParams {
    pub max_steps: usize,
    /// Relative energy change over `window` steps that counts as converged.
    pub energy_tol: f64,
    pub window: usize,
    /// Energy is evaluated every `record_every` steps.
    pub record_every: usize,
    pub source: PartnerSource,
}

impl Default for RelaxParams {
    fn default() -> Self {
        RelaxParams {
            max_steps: 2000,
            energy_tol: 1e-6,
            window: 100,
            record_every: 10,
            source: PartnerSource::Walkers,
        }
    }
}

impl RelaxParams {
    pub fn validate(&self) -> Result<()> {
        if self.record_every == 0 {
            return Err(TdqmcError::invalid("record_every", "must be positive"));
        }
        if self.window == 0 || self.window % self.record_every != 0 {
            return Err(TdqmcError::invalid(
                "window",
                "must be a positive multiple of record_every",
            ));
        }
        if !(self.energy_tol >= 0.0) {
            return Err(TdqmcError::invalid("energy_tol", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxationReport {
    pub steps_taken: usize,
    /// `(step, energy)` at every recorded step.
    pub energy_trace: Vec<(usize, f64)>,
    pub converged: bool,
    pub final_energy: f64,
    /// Mean of the recorded energies over the trailing window; the
    /// walker-sampled interaction term makes single readings noisy.
    pub trailing_mean_energy: f64,
}

/// Self-consistent imaginary-time relaxation.
///
/// Each step snapshots the walkers, builds every walker's effective
/// potential, advances all guide waves, then moves every walker under its
/// updated wave.
pub fn relax(
    state: TdqmcState,
    spec: &LatticeSpec,
    grid: &Grid,
    step: &StepParams,
    params: &RelaxParams,
) -> Result<(TdqmcState, RelaxationReport)> {
    let v_en = sample_on_grid(spec, grid)?;
    relax_in_potential(state, &v_en, spec, grid, step, params)
}

/// [`relax`] under an arbitrary external potential in place of the
/// lattice one; `spec` still supplies the electron-electron interaction.
pub fn relax_in_potential(
    mut state: TdqmcState,
    v_en: &RealField,
    spec: &LatticeSpec,
    grid: &Grid,
    step: &StepParams,
    params: &RelaxParams,
) -> Result<(TdqmcState, RelaxationReport)> {
    step.validate()?;
    params.validate()?;
    if state.grid != *grid || v_en.grid() != grid {
        return Err(TdqmcError::invalid("grid", "state, potential, and grid disagree"));
    }
    let stepper = GuideWaveStepper::new(*grid, step.dtau);
    let conv = PartnerConvolution::new(*grid, spec.soft_core(), spec.ee_strength());
    let n = state.electrons();
    let interacting = n > 1 && spec.ee_strength() > 0.0;

    let mut trace: Vec<(usize, f64)> = Vec::new();
    let mut converged = false;
    let mut steps_taken = 0;
    for s in 0..params.max_steps {
        let partner: Vec<PartnerFields> = if interacting {
            (0..n)
                .map(|j| {
                    conv.partner_fields(
                        &state.positions[j],
                        Some(&state.waves[j]),
                        state.sigma.get(j),
                        params.source,
                    )
                })
                .collect::<Result<_>>()?
        } else {
            Vec::new()
        };

        let v_en_vals = v_en.values();
        state
            .waves
            .par_iter_mut()
            .enumerate()
            .flat_map(|(i, ws)| ws.par_iter_mut().enumerate().map(move |(k, w)| (i, k, w)))
            .try_for_each(|(i, k, wave)| -> Result<()> {
                let mut potential = v_en_vals.to_vec();
                for (j, fields) in partner.iter().enumerate() {
                    if j != i {
                        potential
                            .iter_mut()
                            .zip(fields.for_walker(k))
                            .for_each(|(p, f)| *p += f);
                    }
                }
                stepper.step(wave.values_mut(), &potential).map_err(|e| match e {
                    TdqmcError::Divergence { detail, .. } => TdqmcError::Divergence {
                        step: s,
                        detail: format!("electron {i}, walker {k}: {detail}"),
                    },
                    other => other,
                })?;
                // imaginary-time evolution of a real wave stays real
                wave.values_mut().iter_mut().for_each(|v| v.im = 0.0);
                Ok(())
            })?;

        let dtau = step.dtau;
        let waves = &state.waves;
        state
            .positions
            .par_iter_mut()
            .zip(state.streams.par_iter_mut())
            .enumerate()
            .for_each(|(i, (pos, rngs))| {
                for (k, (r, rng)) in pos.iter_mut().zip(rngs.iter_mut()).enumerate() {
                    let wave = &waves[i][k];
                    let floor = step.drift_epsilon * wave.max_abs();
                    let v = drift_with_floor(grid, wave.values(), *r, floor, step);
                    let noise = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
                    *r = advance_walker(grid, *r, v, dtau, noise);
                }
            });
        state.tau += dtau;
        steps_taken = s + 1;

        if steps_taken % params.record_every == 0 || steps_taken == params.max_steps {
            let e = energy_with(&state, spec, grid, v_en, &stepper);
            if !e.is_finite() {
                return Err(TdqmcError::Divergence {
                    step: s,
                    detail: format!("energy became {e}"),
                });
            }
            trace.push((steps_taken, e));
            if steps_taken >= params.window && steps_taken % params.record_every == 0 {
                let back = steps_taken - params.window;
                if let Some(&(_, e_old)) = trace.iter().find(|(st, _)| *st == back) {
                    if (e - e_old).abs() <= params.energy_tol * e.abs().max(1e-12) {
                        converged = true;
                        break;
                    }
                }
            }
        }
    }

    if trace.last().map(|t| t.0) != Some(steps_taken) {
        let e = energy_with(&state, spec, grid, v_en, &stepper);
        trace.push((steps_taken, e));
    }
    let final_energy = trace.last().map(|t| t.1).unwrap_or(f64::NAN);
    let cutoff = steps_taken.saturating_sub(params.window);
    let tail: Vec<f64> = trace
        .iter()
        .filter(|(st, _)| *st > cutoff || steps_taken <= params.window)
        .map(|t| t.1)
        .collect();
    let trailing_mean_energy = tail.iter().sum::<f64>() / tail.len() as f64;
    Ok((
        state,
        RelaxationReport {
            steps_taken,
            energy_trace: trace,
            converged,
            final_energy,
            trailing_mean_energy,
        },
    ))
}

/// `sum_i (1/M) sum_k <phi_i^k| T + V_en |phi_i^k>` plus the walker-sampled
/// pair repulsion `(1/2)(1/M) sum_k sum_{i != j} V_ee(r_i^k, r_j^k)`.
pub fn total_energy(state: &TdqmcState, spec: &LatticeSpec, grid: &Grid) -> Result<f64> {
    let v_en = sample_on_grid(spec, grid)?;
    let stepper = GuideWaveStepper::new(*grid, crate::propagator::DEFAULT_DTAU);
    Ok(energy_with(state, spec, grid, &v_en, &stepper))
}

fn energy_with(
    state: &TdqmcState,
    spec: &LatticeSpec,
    grid: &Grid,
    v_en: &RealField,
    stepper: &GuideWaveStepper,
) -> f64 {
    let m = state.walkers() as f64;
    // collected before summing so the result does not depend on how the
    // work was split across threads
    let per_electron: Vec<f64> = state
        .waves
        .par_iter()
        .map(|ws| {
            ws.iter()
                .map(|w| stepper.energy(w.values(), v_en.values()))
                .sum::<f64>()
                / m
        })
        .collect();
    let one_body: f64 = per_electron.iter().sum();
    let n = state.electrons();
    let mut pair = 0.0;
    for k in 0..state.walkers() {
        for i in 0..n {
            for j in (i + 1)..n {
                pair += spec.interaction(grid, state.positions[i][k], state.positions[j][k]);
            }
        }
    }
    one_body + pair / m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaScan {
    pub best: Sigma,
    /// `(sigma, trailing-mean energy)` per candidate, in input order.
    pub curve: Vec<(Sigma, f64)>,
    pub reports: Vec<RelaxationReport>,
}

/// Relaxes the same initial ensemble at every candidate nonlocal length
/// (shared by all electrons) and keeps the one with the lowest energy,
/// returning its relaxed state alongside the scan.
#[allow(clippy::too_many_arguments)]
pub fn optimize_sigma(
    spec: &LatticeSpec,
    grid: &Grid,
    electrons: usize,
    walkers: usize,
    candidates: &[Sigma],
    step: &StepParams,
    params: &RelaxParams,
    init: InitOptions,
    seed: u64,
) -> Result<(TdqmcState, SigmaScan)> {
    if candidates.is_empty() {
        return Err(TdqmcError::invalid("candidates", "need at least one sigma"));
    }
    let mut curve = Vec::with_capacity(candidates.len());
    let mut reports = Vec::with_capacity(candidates.len());
    let mut best: Option<(TdqmcState, Sigma, f64)> = None;
    for &sigma in candidates {
        let state = init_ensemble(
            spec,
            grid,
            electrons,
            walkers,
            SigmaParams::uniform(electrons, sigma),
            seed,
            init,
        )?;
        let (state, report) = relax(state, spec, grid, step, params)?;
        let energy = report.trailing_mean_energy;
        curve.push((sigma, energy));
        reports.push(report);
        if best.as_ref().is_none_or(|b| energy < b.2) {
            best = Some((state, sigma, energy));
        }
    }
    let (state, best, _) = best.expect("non-empty candidates");
    Ok((
        state,
        SigmaScan {
            best,
            curve,
            reports,
        },
    ))
}

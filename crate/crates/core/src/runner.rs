//! Orchestration behind the command line: full runs, exact baselines,
//! sigma sweeps, run-versus-baseline comparison, and the manifests that
//! make every run reproducible.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::{load_config, Artifact, RunConfig, SigmaMode};
use crate::ensemble::{init_ensemble, optimize_sigma, relax, RelaxationReport, SigmaScan, TdqmcState};
use crate::error::{Result, TdqmcError};
use crate::export::{
    export_field, export_map, export_series, format_value, read_field, read_map, MapRow,
};
use crate::grid::RealField;
use crate::kernel::{Sigma, SigmaParams};
use crate::oracle::{
    exact_ground_state_1p, exact_ground_state_2p, exact_local_maps, exact_rdm, hartree_ground_state,
    HartreeParams,
};
use crate::potentials::sample_on_grid;
use crate::quantum_info::{mean_maps, pearson, purity, EntropyMap};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "TDQMC_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Run,
    Oracle,
    SweepSigma,
}

/// How the `oracle` command solves the problem.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    /// Configuration-space ground state (one or two electrons).
    #[default]
    Exact,
    /// Self-consistent Hartree orbitals on the split-step fixed point.
    Hartree,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub solve_seconds: f64,
    pub measure_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub steps_taken: usize,
    pub converged: bool,
    pub final_energy: f64,
    pub trailing_mean_energy: f64,
}

impl From<&RelaxationReport> for Convergence {
    fn from(r: &RelaxationReport) -> Self {
        Convergence {
            steps_taken: r.steps_taken,
            converged: r.converged,
            final_energy: r.final_energy,
            trailing_mean_energy: r.trailing_mean_energy,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub energy: f64,
    /// Mean over electrons of `Tr rho_i^2`.
    pub purity: f64,
    pub linear_entropy: f64,
    pub per_electron_purity: Vec<f64>,
}

/// Everything needed to reproduce a run, plus what it measured.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_method: Option<OracleMethod>,
    pub package_version: String,
    /// The configuration with all defaults resolved.
    pub config: RunConfig,
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Sigma>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_scan: Option<Vec<(Sigma, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Convergence>,
    pub summary: Summary,
    pub timings: Timings,
    pub artifacts: Vec<String>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Manifest> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TdqmcError::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| TdqmcError::Format {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(TdqmcError::Format {
                path: path.display().to_string(),
                detail: format!(
                    "manifest schema {} is not supported (expected {MANIFEST_SCHEMA_VERSION})",
                    manifest.schema_version
                ),
            });
        }
        manifest.config.validate()?;
        Ok(manifest)
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| TdqmcError::io(&path, e))?;
        Ok(path)
    }
}

/// Loads a TOML configuration, or the configuration embedded in a
/// manifest when the file ends in `.json`.
pub fn load_input(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "json") {
        Ok(Manifest::load(path)?.config)
    } else {
        load_config(path)
    }
}

/// Sizes the global thread pool from an explicit count or `TDQMC_THREADS`.
/// Results do not depend on the thread count.
pub fn configure_threads(explicit: Option<usize>) -> Result<usize> {
    let from_env = match std::env::var(THREADS_ENV) {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| {
            TdqmcError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))
        })?),
        Err(_) => None,
    };
    if let Some(n) = explicit.or(from_env) {
        if n == 0 {
            return Err(TdqmcError::invalid("threads", "must be positive"));
        }
        // a pool that is already set (tests, repeated calls) is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Result of a TDQMC run, before anything is written.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub sigma: Sigma,
    pub state: TdqmcState,
    pub report: RelaxationReport,
    pub scan: Option<SigmaScan>,
    pub potential: RealField,
    pub density: RealField,
    pub entropy_map: EntropyMap,
    pub coherence_map: EntropyMap,
    pub per_electron_purity: Vec<f64>,
    pub timings: Timings,
}

impl RunOutcome {
    pub fn purity(&self) -> f64 {
        mean(&self.per_electron_purity)
    }

    pub fn linear_entropy(&self) -> f64 {
        1.0 - self.purity()
    }

    pub fn manifest(&self, artifacts: Vec<String>) -> Manifest {
        Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: Command::Run,
            oracle_method: None,
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config.clone(),
            threads: rayon::current_num_threads(),
            sigma: Some(self.sigma),
            sigma_scan: self.scan.as_ref().map(|s| s.curve.clone()),
            convergence: Some(Convergence::from(&self.report)),
            summary: Summary {
                energy: self.report.trailing_mean_energy,
                purity: self.purity(),
                linear_entropy: self.linear_entropy(),
                per_electron_purity: self.per_electron_purity.clone(),
            },
            timings: self.timings.clone(),
            artifacts,
        }
    }

    /// Writes the requested artifacts and the manifest into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Manifest> {
        let dir = dir.as_ref();
        create_dir(dir)?;
        let mut written = Vec::new();
        let c = &self.config;
        for artifact in Artifact::ALL {
            if !c.wants(artifact) {
                continue;
            }
            let path = dir.join(artifact.file_name());
            match artifact {
                Artifact::Potential => export_field(&self.potential, &path)?,
                Artifact::Density => export_field(&self.density, &path)?,
                Artifact::EntropyMap => export_map(&self.entropy_map, &path)?,
                Artifact::CoherenceMap => export_map(&self.coherence_map, &path)?,
                Artifact::EnergyTrace => export_series("step", &energy_rows(&self.report), &path)?,
                Artifact::SigmaScan => match &self.scan {
                    Some(scan) => export_series("sigma", &sigma_rows(scan), &path)?,
                    None => continue,
                },
            }
            written.push(artifact.file_name().to_string());
        }
        let manifest = self.manifest(written);
        manifest.save(dir)?;
        Ok(manifest)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| TdqmcError::io(dir, e))
}

fn energy_rows(report: &RelaxationReport) -> Vec<(String, f64)> {
    report.energy_trace.iter().map(|(s, e)| (s.to_string(), *e)).collect()
}

fn sigma_rows(scan: &SigmaScan) -> Vec<(String, f64)> {
    scan.curve.iter().map(|(s, e)| (s.to_string(), *e)).collect()
}

/// Initializes, optionally optimizes sigma, relaxes, and measures.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let config = config.resolved()?;
    config.validate()?;
    let spec = config.lattice_spec()?;
    let grid = config.grid()?;
    let electrons = config.electrons()?;
    let walkers = config.ensemble.walkers;
    let seed = config.ensemble.seed;
    let step = config.step_params()?;
    let params = config.relax_params()?;
    let init = config.init_options();
    let (sigma, state, report, scan) = match config.sigma_mode()? {
        SigmaMode::Fixed(sigma) => {
            let state = init_ensemble(
                &spec,
                &grid,
                electrons,
                walkers,
                SigmaParams::uniform(electrons, sigma),
                seed,
                init,
            )?;
            let (state, report) = relax(state, &spec, &grid, &step, &params)?;
            (sigma, state, report, None)
        }
        SigmaMode::Optimize(candidates) => {
            let (state, scan) =
                optimize_sigma(&spec, &grid, electrons, walkers, &candidates, &step, &params, init, seed)?;
            let best = candidates.iter().position(|s| *s == scan.best).expect("best is a candidate");
            let report = scan.reports[best].clone();
            (scan.best, state, report, Some(scan))
        }
    };
    let solve_seconds = start.elapsed().as_secs_f64();
    let measure_start = Instant::now();
    let partition = config.partition()?;
    let (entropy_map, coherence_map) = mean_maps(&state, &partition)?;
    let per_electron_purity = (0..electrons)
        .map(|i| purity(state.waves(i)))
        .collect::<Result<Vec<_>>>()?;
    let outcome = RunOutcome {
        potential: sample_on_grid(&spec, &grid)?,
        density: state.mean_density(),
        entropy_map,
        coherence_map,
        per_electron_purity,
        timings: Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            solve_seconds,
            measure_seconds: measure_start.elapsed().as_secs_f64(),
        },
        config,
        sigma,
        state,
        report,
        scan,
    };
    Ok(outcome)
}

/// Exact (or Hartree) baseline for a configuration.
#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub config: RunConfig,
    pub method: OracleMethod,
    pub energy: f64,
    pub potential: RealField,
    pub density: RealField,
    pub per_electron_purity: Vec<f64>,
    /// Present for the two-electron exact solution.
    pub maps: Option<(EntropyMap, EntropyMap)>,
    pub iterations: usize,
    pub converged: bool,
    pub timings: Timings,
}

impl OracleOutcome {
    pub fn purity(&self) -> f64 {
        mean(&self.per_electron_purity)
    }

    pub fn manifest(&self, artifacts: Vec<String>) -> Manifest {
        Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: Command::Oracle,
            oracle_method: Some(self.method),
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            config: self.config.clone(),
            threads: rayon::current_num_threads(),
            sigma: None,
            sigma_scan: None,
            convergence: Some(Convergence {
                steps_taken: self.iterations,
                converged: self.converged,
                final_energy: self.energy,
                trailing_mean_energy: self.energy,
            }),
            summary: Summary {
                energy: self.energy,
                purity: self.purity(),
                linear_entropy: 1.0 - self.purity(),
                per_electron_purity: self.per_electron_purity.clone(),
            },
            timings: self.timings.clone(),
            artifacts,
        }
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Manifest> {
        let dir = dir.as_ref();
        create_dir(dir)?;
        let mut written = Vec::new();
        for artifact in Artifact::ALL {
            if !self.config.wants(artifact) {
                continue;
            }
            let path = dir.join(artifact.file_name());
            match (artifact, &self.maps) {
                (Artifact::Potential, _) => export_field(&self.potential, &path)?,
                (Artifact::Density, _) => export_field(&self.density, &path)?,
                (Artifact::EntropyMap, Some((entropy, _))) => export_map(entropy, &path)?,
                (Artifact::CoherenceMap, Some((_, coherence))) => export_map(coherence, &path)?,
                _ => continue,
            }
            written.push(artifact.file_name().to_string());
        }
        let manifest = self.manifest(written);
        manifest.save(dir)?;
        Ok(manifest)
    }
}

/// Solves the configuration without walkers.
///
/// `Exact` handles one or two electrons in configuration space; the local
/// maps come from conditional waves drawn with the ensemble seed.
/// `Hartree` handles any number of electrons as a product state, using
/// the stepping `dtau` so its fixed point is the one a `sigma = inf` run
/// relaxes to.
pub fn oracle(config: &RunConfig, method: OracleMethod) -> Result<OracleOutcome> {
    let start = Instant::now();
    let config = config.resolved()?;
    config.validate()?;
    let spec = config.lattice_spec()?;
    let grid = config.grid()?;
    let electrons = config.electrons()?;
    let potential = sample_on_grid(&spec, &grid)?;
    let mut maps = None;
    let (energy, density, per_electron_purity, iterations, converged) = match (method, electrons) {
        (OracleMethod::Exact, 1) => {
            let (wave, energy) = exact_ground_state_1p(&potential)?;
            (energy, wave.density(), vec![1.0], 0, true)
        }
        (OracleMethod::Exact, 2) => {
            let psi = exact_ground_state_2p(&spec, &grid, &config.two_body_params())?;
            let p = exact_rdm(&psi).purity();
            maps = Some(exact_local_maps(
                &psi,
                &config.partition()?,
                config.oracle.samples,
                config.ensemble.seed,
            )?);
            (psi.energy(), psi.density(), vec![p, p], psi.steps(), psi.converged())
        }
        (OracleMethod::Exact, n) => {
            return Err(TdqmcError::invalid(
                "electrons",
                format!("the exact oracle handles one or two electrons, not {n}"),
            ))
        }
        (OracleMethod::Hartree, n) => {
            let seeds = init_ensemble(
                &spec,
                &grid,
                n,
                1,
                SigmaParams::uniform(n, Sigma::Infinite),
                config.ensemble.seed,
                config.init_options(),
            )?;
            let initial: Vec<_> = (0..n).map(|i| seeds.waves(i)[0].clone()).collect();
            let params = HartreeParams {
                dtau: Some(config.stepping.dtau),
                ..HartreeParams::default()
            };
            let sol = hartree_ground_state(&spec, &grid, &initial, &params)?;
            let mut acc = vec![0.0; grid.len()];
            for d in &sol.densities {
                acc.iter_mut().zip(d.values()).for_each(|(a, v)| *a += v / n as f64);
            }
            let density = RealField::new(grid, acc)?;
            (sol.total_energy, density, vec![1.0; n], sol.iterations, true)
        }
    };
    let solve_seconds = start.elapsed().as_secs_f64();
    Ok(OracleOutcome {
        config,
        method,
        energy,
        potential,
        density,
        per_electron_purity,
        maps,
        iterations,
        converged,
        timings: Timings {
            total_seconds: start.elapsed().as_secs_f64(),
            solve_seconds,
            measure_seconds: 0.0,
        },
    })
}

/// Relaxes every candidate sigma (from the config, or `candidates` when
/// given) and writes the energy curve.
pub fn sweep_sigma(config: &RunConfig, candidates: Option<Vec<Sigma>>, dir: impl AsRef<Path>) -> Result<Manifest> {
    let mut config = config.clone();
    if let Some(c) = candidates {
        config.sigma.value = None;
        config.sigma.candidates = Some(c);
    }
    if let SigmaMode::Fixed(s) = config.sigma_mode()? {
        config.sigma.value = None;
        config.sigma.candidates = Some(vec![s]);
    }
    config.output.artifacts = vec![Artifact::SigmaScan];
    let outcome = run(&config)?;
    let mut manifest = outcome.write(&dir)?;
    manifest.command = Command::SweepSigma;
    manifest.save(&dir)?;
    Ok(manifest)
}

/// Differences between two artifact directories (typically a run and its
/// oracle baseline).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub density_l2_relative: f64,
    pub density_linf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_map: Option<MapComparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence_map: Option<MapComparison>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_difference: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purity_difference: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapComparison {
    /// Zones non-empty in both maps.
    pub shared_zones: usize,
    pub pearson: Option<f64>,
    pub max_abs_difference: f64,
    pub argmax: (Option<(usize, usize)>, Option<(usize, usize)>),
}

fn compare_maps(a: &[MapRow], b: &[MapRow]) -> Result<MapComparison> {
    if a.len() != b.len() {
        return Err(TdqmcError::invalid("map", "maps have different zone counts"));
    }
    let pairs: Vec<(f64, f64)> = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| Some((x.value?, y.value?)))
        .collect();
    let argmax = |rows: &[MapRow]| {
        rows.iter()
            .filter_map(|r| r.value.map(|v| (v, (r.zone_x, r.zone_y))))
            .max_by(|p, q| p.0.total_cmp(&q.0))
            .map(|p| p.1)
    };
    Ok(MapComparison {
        shared_zones: pairs.len(),
        pearson: pearson(&pairs),
        max_abs_difference: pairs.iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        argmax: (argmax(a), argmax(b)),
    })
}

/// Compares the artifacts in `a` against those in `b` (the reference).
pub fn compare(a: impl AsRef<Path>, b: impl AsRef<Path>) -> Result<Comparison> {
    let (a, b) = (a.as_ref(), b.as_ref());
    let da = read_field(a.join(Artifact::Density.file_name()))?;
    let db = read_field(b.join(Artifact::Density.file_name()))?;
    if da.len() != db.len() {
        return Err(TdqmcError::invalid("density", "profiles are on different grids"));
    }
    let (mut diff, mut norm, mut linf) = (0.0, 0.0, 0.0f64);
    for (p, q) in da.iter().zip(&db) {
        if p.0 != q.0 || p.1 != q.1 {
            return Err(TdqmcError::invalid("density", "profiles are on different grids"));
        }
        diff += (p.2 - q.2).powi(2);
        norm += q.2 * q.2;
        linf = linf.max((p.2 - q.2).abs());
    }
    let map = |name: &str| -> Result<Option<MapComparison>> {
        let (pa, pb) = (a.join(name), b.join(name));
        if !pa.exists() || !pb.exists() {
            return Ok(None);
        }
        compare_maps(&read_map(pa)?, &read_map(pb)?).map(Some)
    };
    let manifests = match (Manifest::load(a.join(MANIFEST_FILE)), Manifest::load(b.join(MANIFEST_FILE))) {
        (Ok(x), Ok(y)) => Some((x.summary, y.summary)),
        _ => None,
    };
    Ok(Comparison {
        density_l2_relative: (diff / norm).sqrt(),
        density_linf: linf,
        entropy_map: map(Artifact::EntropyMap.file_name())?,
        coherence_map: map(Artifact::CoherenceMap.file_name())?,
        energy_difference: manifests.as_ref().map(|(x, y)| x.energy - y.energy),
        purity_difference: manifests.as_ref().map(|(x, y)| x.purity - y.purity),
    })
}

impl Comparison {
    /// Plain-text report, one quantity per line.
    pub fn report(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), format_value);
        let mut lines = vec![
            format!("density_l2_relative {}", format_value(self.density_l2_relative)),
            format!("density_linf {}", format_value(self.density_linf)),
            format!("energy_difference {}", opt(self.energy_difference)),
            format!("purity_difference {}", opt(self.purity_difference)),
        ];
        for (name, m) in [("entropy_map", &self.entropy_map), ("coherence_map", &self.coherence_map)] {
            if let Some(m) = m {
                lines.push(format!("{name}_shared_zones {}", m.shared_zones));
                lines.push(format!("{name}_pearson {}", opt(m.pearson)));
                lines.push(format!("{name}_max_abs_difference {}", format_value(m.max_abs_difference)));
                lines.push(format!("{name}_argmax {:?} {:?}", m.argmax.0, m.argmax.1));
            }
        }
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
[lattice]
dim = 1
chain = 2
lattice_constant = 4.0

[grid]
extent = 16.0
points = 32

[ensemble]
walkers = 20
init = "delocalized"

[stepping]
max_steps = 30

[sigma]
candidates = [0.5, "inf"]
"#;

    fn small() -> RunConfig {
        RunConfig::from_toml(SMALL).unwrap()
    }

    #[test]
    fn manifest_round_trips_and_reruns_identically() {
        let dir = tempfile::tempdir().unwrap();
        let first = run(&small()).unwrap();
        let manifest = first.write(dir.path().join("a")).unwrap();
        assert_eq!(manifest.artifacts.len(), 6);
        assert_eq!(manifest.config.grid.points, Some(32));
        assert_eq!(manifest.config.ensemble.electrons, Some(2));

        let loaded = Manifest::load(dir.path().join("a").join(MANIFEST_FILE)).unwrap();
        assert_eq!(loaded, manifest);
        let again = run(&load_input(dir.path().join("a").join(MANIFEST_FILE)).unwrap()).unwrap();
        again.write(dir.path().join("b")).unwrap();
        for name in &manifest.artifacts {
            let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
            let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
            assert_eq!(a, b, "{name}");
        }
    }

    #[test]
    fn sigma_scan_picks_lowest_energy() {
        let outcome = run(&small()).unwrap();
        let scan = outcome.scan.as_ref().unwrap();
        let lowest = scan.curve.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        assert_eq!(outcome.report.trailing_mean_energy, lowest);
        assert_eq!(outcome.sigma, scan.best);
    }

    #[test]
    fn unsupported_schema_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = run(&small()).unwrap().write(dir.path()).unwrap();
        manifest.schema_version = 99;
        manifest.save(dir.path()).unwrap();
        let err = Manifest::load(dir.path().join(MANIFEST_FILE)).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn exact_oracle_limits_electron_count() {
        let mut config = small();
        config.lattice.chain = Some(3);
        config.ensemble.init = crate::ensemble::InitialWave::Localized;
        let err = oracle(&config, OracleMethod::Exact).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let hartree = oracle(&config, OracleMethod::Hartree).unwrap();
        assert_eq!(hartree.per_electron_purity, vec![1.0; 3]);
    }

    #[test]
    fn comparing_a_directory_with_itself_is_zero() {
        let dir = tempfile::tempdir().unwrap();
        run(&small()).unwrap().write(dir.path()).unwrap();
        let c = compare(dir.path(), dir.path()).unwrap();
        assert_eq!(c.density_l2_relative, 0.0);
        assert_eq!(c.energy_difference, Some(0.0));
        let m = c.entropy_map.unwrap();
        assert_eq!(m.max_abs_difference, 0.0);
        assert_eq!(m.argmax.0, m.argmax.1);
    }

    #[test]
    fn sweep_writes_only_the_curve() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = sweep_sigma(&small(), Some(vec![Sigma::Finite(1.0)]), dir.path()).unwrap();
        assert_eq!(manifest.command, Command::SweepSigma);
        assert_eq!(manifest.artifacts, vec!["sigma_scan.csv".to_string()]);
        let rows = crate::export::read_series("sigma", dir.path().join("sigma_scan.csv")).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].0, "1");
    }
}

//! Run configuration: a TOML document with one table per concern.
//!
//! ```toml
//! [lattice]
//! dim = 1
//! chain = 2
//! lattice_constant = 4.0
//!
//! [ensemble]
//! walkers = 1000
//! init = "delocalized"
//!
//! [sigma]
//! candidates = [0.5, 1.0, 2.0, "inf"]
//! ```
//!
//! Every table and most keys are optional; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ensemble::{InitOptions, InitialWave, RelaxParams};
use crate::error::{Result, TdqmcError};
use crate::grid::Grid;
use crate::kernel::{PartnerSource, Sigma};
use crate::oracle::{TwoBodyParams, DEFAULT_BUDGET};
use crate::potentials::{LatticeSpec, SiteIndex, SCREENING_LENGTH, SITE_DEPTH, SOFT_CORE};
use crate::propagator::{StepParams, DEFAULT_DRIFT_EPSILON, DEFAULT_DTAU};
use crate::quantum_info::{ZoneLayout, ZonePartition, DEFAULT_ZONES_PER_AXIS};

/// A site index written as `n` or `[n]` in 1D and `[n, m]` in 2D.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SiteEntry {
    Scalar(i64),
    Vector(Vec<i64>),
}

impl SiteEntry {
    fn index(&self, dim: usize) -> Result<SiteIndex> {
        match (self, dim) {
            (SiteEntry::Scalar(n), 1) => Ok([*n, 0]),
            (SiteEntry::Vector(v), 1) if v.len() == 1 => Ok([v[0], 0]),
            (SiteEntry::Vector(v), 2) if v.len() == 2 => Ok([v[0], v[1]]),
            _ => Err(TdqmcError::Config(format!(
                "[lattice] site {self:?} does not have {dim} coordinate(s)"
            ))),
        }
    }
}

fn default_depth() -> f64 {
    SITE_DEPTH
}
fn default_soft_core() -> f64 {
    SOFT_CORE
}
fn default_screening() -> f64 {
    SCREENING_LENGTH
}
fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub dim: usize,
    /// `count` sites `0..count` along x.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<usize>,
    /// `[nx, ny]` square block of sites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square: Option<[usize; 2]>,
    /// Explicit site list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<SiteEntry>>,
    #[serde(default)]
    pub vacancies: Vec<SiteEntry>,
    pub lattice_constant: f64,
    #[serde(default = "default_depth")]
    pub depth: f64,
    #[serde(default = "default_soft_core")]
    pub soft_core: f64,
    #[serde(default = "default_screening")]
    pub screening: f64,
    #[serde(default = "one")]
    pub ee_strength: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Box side; defaults to the site span times the lattice constant so
    /// the periodic images continue the lattice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    /// Nodes per axis; defaults to 128 in 1D and 32 in 2D.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

fn default_walkers() -> usize {
    500
}
fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    /// Defaults to one electron per occupied site.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub electrons: Option<usize>,
    #[serde(default = "default_walkers")]
    pub walkers: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub init: InitialWave,
    #[serde(default = "one")]
    pub init_width: f64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        EnsembleSection {
            electrons: None,
            walkers: default_walkers(),
            seed: default_seed(),
            init: InitialWave::default(),
            init_width: 1.0,
        }
    }
}

fn default_dtau() -> f64 {
    DEFAULT_DTAU
}
fn default_drift_epsilon() -> f64 {
    DEFAULT_DRIFT_EPSILON
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteppingSection {
    #[serde(default = "default_dtau")]
    pub dtau: f64,
    #[serde(default = "RelaxDefaults::max_steps")]
    pub max_steps: usize,
    #[serde(default = "RelaxDefaults::energy_tol")]
    pub energy_tol: f64,
    #[serde(default = "RelaxDefaults::window")]
    pub window: usize,
    #[serde(default = "RelaxDefaults::record_every")]
    pub record_every: usize,
    #[serde(default = "default_drift_epsilon")]
    pub drift_epsilon: f64,
    /// Defaults to one grid spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift_cap: Option<f64>,
    #[serde(default)]
    pub partner_source: PartnerSource,
}

struct RelaxDefaults;

impl RelaxDefaults {
    fn max_steps() -> usize {
        RelaxParams::default().max_steps
    }
    fn energy_tol() -> f64 {
        RelaxParams::default().energy_tol
    }
    fn window() -> usize {
        RelaxParams::default().window
    }
    fn record_every() -> usize {
        RelaxParams::default().record_every
    }
}

impl Default for SteppingSection {
    fn default() -> Self {
        let r = RelaxParams::default();
        SteppingSection {
            dtau: DEFAULT_DTAU,
            max_steps: r.max_steps,
            energy_tol: r.energy_tol,
            window: r.window,
            record_every: r.record_every,
            drift_epsilon: DEFAULT_DRIFT_EPSILON,
            drift_cap: None,
            partner_source: PartnerSource::default(),
        }
    }
}

/// Either a fixed nonlocal length or a list to optimize over.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Sigma>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<Sigma>>,
}

/// Resolved nonlocal-length choice.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaMode {
    Fixed(Sigma),
    Optimize(Vec<Sigma>),
}

pub const DEFAULT_SIGMA: f64 = 1.0;

fn default_zones() -> usize {
    DEFAULT_ZONES_PER_AXIS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionSection {
    #[serde(default = "default_zones")]
    pub zones: usize,
    #[serde(default)]
    pub layout: ZoneLayout,
}

impl Default for PartitionSection {
    fn default() -> Self {
        PartitionSection {
            zones: DEFAULT_ZONES_PER_AXIS,
            layout: ZoneLayout::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Artifact {
    Potential,
    Density,
    EntropyMap,
    CoherenceMap,
    EnergyTrace,
    SigmaScan,
}

impl Artifact {
    pub const ALL: [Artifact; 6] = [
        Artifact::Potential,
        Artifact::Density,
        Artifact::EntropyMap,
        Artifact::CoherenceMap,
        Artifact::EnergyTrace,
        Artifact::SigmaScan,
    ];

    pub fn file_name(&self) -> &'static str {
        match self {
            Artifact::Potential => "potential.csv",
            Artifact::Density => "density.csv",
            Artifact::EntropyMap => "entropy_map.csv",
            Artifact::CoherenceMap => "coherence_map.csv",
            Artifact::EnergyTrace => "energy_trace.csv",
            Artifact::SigmaScan => "sigma_scan.csv",
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("tdqmc-out")
}
fn all_artifacts() -> Vec<Artifact> {
    Artifact::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "all_artifacts")]
    pub artifacts: Vec<Artifact>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_directory(),
            artifacts: all_artifacts(),
        }
    }
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}
fn default_samples() -> usize {
    2000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Defaults to the ensemble time step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dtau: Option<f64>,
    #[serde(default = "OracleDefaults::max_steps")]
    pub max_steps: usize,
    #[serde(default = "OracleDefaults::energy_tol")]
    pub energy_tol: f64,
    /// Conditional waves drawn for the exact local maps.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

struct OracleDefaults;

impl OracleDefaults {
    fn max_steps() -> usize {
        TwoBodyParams::default().max_steps
    }
    fn energy_tol() -> f64 {
        TwoBodyParams::default().energy_tol
    }
}

impl Default for OracleSection {
    fn default() -> Self {
        OracleSection {
            budget: DEFAULT_BUDGET,
            dtau: None,
            max_steps: OracleDefaults::max_steps(),
            energy_tol: OracleDefaults::energy_tol(),
            samples: default_samples(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub stepping: SteppingSection,
    #[serde(default)]
    pub sigma: SigmaSection,
    #[serde(default)]
    pub partition: PartitionSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

/// Reads and validates a TOML configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| TdqmcError::io(path, e))?;
    RunConfig::from_toml(&text)
}

/// Appends a spelling suggestion to serde's unknown-field message.
fn suggest(message: &str) -> String {
    let Some(start) = message.find("unknown field `") else {
        return message.to_string();
    };
    let rest = &message[start + "unknown field `".len()..];
    let Some(end) = rest.find('`') else {
        return message.to_string();
    };
    let unknown = &rest[..end];
    let expected: Vec<&str> = rest[end..].split('`').skip(2).step_by(2).collect();
    let best = expected
        .iter()
        .map(|cand| (strsim::jaro_winkler(unknown, cand), *cand))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((score, cand)) if score > 0.8 => format!("{}\ndid you mean `{cand}`?", message.trim_end()),
        _ => message.to_string(),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| TdqmcError::Config(suggest(&e.to_string())))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks every parameter by building the library types from it.
    pub fn validate(&self) -> Result<()> {
        let spec = self.lattice_spec()?;
        let grid = self.grid()?;
        grid.check_dim(spec.dim())?;
        self.step_params()?;
        self.relax_params()?;
        self.partition()?;
        self.sigma_mode()?;
        let electrons = self.electrons()?;
        if electrons == 0 {
            return Err(TdqmcError::invalid("electrons", "need at least one electron"));
        }
        if self.ensemble.walkers == 0 {
            return Err(TdqmcError::invalid("walkers", "need at least one walker"));
        }
        if !(self.ensemble.init_width > 0.0) {
            return Err(TdqmcError::invalid("init_width", "must be positive"));
        }
        if self.oracle.samples == 0 {
            return Err(TdqmcError::invalid("samples", "need at least one sample"));
        }
        if let Some(dtau) = self.oracle.dtau {
            if !(dtau > 0.0) {
                return Err(TdqmcError::invalid("dtau", "oracle time step must be positive"));
            }
        }
        Ok(())
    }

    pub fn lattice_spec(&self) -> Result<LatticeSpec> {
        let l = &self.lattice;
        if l.dim != 1 && l.dim != 2 {
            return Err(TdqmcError::invalid("dim", "must be 1 or 2"));
        }
        let given = [l.chain.is_some(), l.square.is_some(), l.sites.is_some()];
        if given.iter().filter(|g| **g).count() != 1 {
            return Err(TdqmcError::Config(
                "[lattice] give exactly one of `chain`, `square`, `sites`".into(),
            ));
        }
        let sites: Vec<SiteIndex> = if let Some(count) = l.chain {
            if l.dim != 1 {
                return Err(TdqmcError::Config("[lattice] `chain` needs dim = 1".into()));
            }
            (0..count as i64).map(|n| [n, 0]).collect()
        } else if let Some([nx, ny]) = l.square {
            if l.dim != 2 {
                return Err(TdqmcError::Config("[lattice] `square` needs dim = 2".into()));
            }
            (0..nx as i64)
                .flat_map(|n| (0..ny as i64).map(move |m| [n, m]))
                .collect()
        } else {
            let entries = l.sites.as_deref().unwrap_or_default();
            entries.iter().map(|s| s.index(l.dim)).collect::<Result<_>>()?
        };
        let vacancies = l.vacancies.iter().map(|s| s.index(l.dim)).collect::<Result<_>>()?;
        LatticeSpec::new(l.dim, sites, vacancies, l.lattice_constant)?
            .with_potential(l.depth, l.soft_core, l.screening)?
            .with_ee_strength(l.ee_strength)
    }

    pub fn grid(&self) -> Result<Grid> {
        let dim = self.lattice.dim;
        let extent = match self.grid.extent {
            Some(e) => e,
            None => {
                let spec = self.lattice_spec()?;
                let span = (0..dim)
                    .map(|axis| {
                        let coords = spec.sites().iter().map(|s| s[axis]);
                        let (lo, hi) = coords.fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c), hi.max(c)));
                        (hi - lo + 1) as f64
                    })
                    .fold(0.0, f64::max);
                span * spec.lattice_constant()
            }
        };
        let points = self.grid.points.unwrap_or(if dim == 1 { 128 } else { 32 });
        Grid::new(dim, extent, points)
    }

    pub fn electrons(&self) -> Result<usize> {
        match self.ensemble.electrons {
            Some(n) => Ok(n),
            None => Ok(self.lattice_spec()?.occupied_sites().count()),
        }
    }

    pub fn init_options(&self) -> InitOptions {
        InitOptions {
            shape: self.ensemble.init,
            width: self.ensemble.init_width,
        }
    }

    pub fn step_params(&self) -> Result<StepParams> {
        let grid = self.grid()?;
        let mut params = StepParams::new(self.stepping.dtau, &grid)?;
        params.drift_epsilon = self.stepping.drift_epsilon;
        if let Some(cap) = self.stepping.drift_cap {
            params.drift_cap = cap;
        }
        params.validate()?;
        Ok(params)
    }

    pub fn relax_params(&self) -> Result<RelaxParams> {
        let s = &self.stepping;
        let params = RelaxParams {
            max_steps: s.max_steps,
            energy_tol: s.energy_tol,
            window: s.window,
            record_every: s.record_every,
            source: s.partner_source,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn sigma_mode(&self) -> Result<SigmaMode> {
        match (&self.sigma.value, &self.sigma.candidates) {
            (Some(_), Some(_)) => Err(TdqmcError::Config(
                "[sigma] give either `value` or `candidates`, not both".into(),
            )),
            (Some(v), None) => Ok(SigmaMode::Fixed(*v)),
            (None, Some(c)) if c.is_empty() => {
                Err(TdqmcError::invalid("candidates", "need at least one sigma"))
            }
            (None, Some(c)) => Ok(SigmaMode::Optimize(c.clone())),
            (None, None) => Ok(SigmaMode::Fixed(Sigma::finite(DEFAULT_SIGMA)?)),
        }
    }

    pub fn partition(&self) -> Result<ZonePartition> {
        ZonePartition::with_layout(self.grid()?, self.partition.zones, self.partition.layout)
    }

    pub fn two_body_params(&self) -> TwoBodyParams {
        TwoBodyParams {
            dtau: self.oracle.dtau.unwrap_or(self.stepping.dtau),
            max_steps: self.oracle.max_steps,
            energy_tol: self.oracle.energy_tol,
            budget: self.oracle.budget,
        }
    }

    /// Copy with every derived default written out, as stored in manifests.
    pub fn resolved(&self) -> Result<RunConfig> {
        let grid = self.grid()?;
        let mut c = self.clone();
        c.grid.extent = Some(grid.extent());
        c.grid.points = Some(grid.points_per_axis());
        c.ensemble.electrons = Some(self.electrons()?);
        if c.sigma.value.is_none() && c.sigma.candidates.is_none() {
            c.sigma.value = Some(Sigma::finite(DEFAULT_SIGMA)?);
        }
        Ok(c)
    }

    pub fn wants(&self, artifact: Artifact) -> bool {
        self.output.artifacts.contains(&artifact)
    }
}

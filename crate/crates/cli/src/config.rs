//! Experiment configuration: a single JSON document describing the
//! activation family, sample set, grid, partition, labels, training
//! schedule, and verification suite selection. The schema is documented in
//! the repository README.

use rkbslab_core::activation::{
    assemble_matrix, ActivationFamily, ActivationMatrix, ParameterPoint, SamplePoint,
};
use rkbslab_core::learn::{Loss, Strategy};
use rkbslab_core::rng::{derive_seed, SplitMix64};
use rkbslab_core::spaces::{ParameterGrid, ProbabilityWeights, SampleFunction, SingularPartition};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Reproducibility contract: every derived instance stream is keyed off
    /// this seed and every report embeds it.
    pub seed: u64,
    pub activation: ActivationConfig,
    pub samples: SamplesConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub partition: PartitionConfig,
    #[serde(default)]
    pub labels: LabelsConfig,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_loss")]
    pub loss: Loss,
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    /// Suites for `verify`; empty means all of them.
    #[serde(default)]
    pub suites: Vec<SuiteName>,
    #[serde(default)]
    pub suite_instances: SuiteInstances,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_lambdas() -> Vec<f64> {
    vec![0.1]
}

fn default_loss() -> Loss {
    Loss::Squared
}

fn default_strategy() -> Strategy {
    Strategy::FullGrid
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActivationConfig {
    Relu,
    Tanh,
    Gaussian { bandwidth: f64 },
    Tabulated { path: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplesConfig {
    pub n: usize,
    pub dim: usize,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    UniformCube { m: usize },
    Explicit { atoms: Vec<AtomConfig> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub theta: Vec<f64>,
    pub bias: f64,
    #[serde(default)]
    pub tag: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionConfig {
    RoundRobin {
        blocks: usize,
    },
    Contiguous {
        blocks: usize,
    },
    Explicit {
        blocks: Vec<Vec<usize>>,
        #[serde(default)]
        weights: Option<Vec<Vec<f64>>>,
    },
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig::RoundRobin { blocks: 1 }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum LabelsConfig {
    /// y_k = Σ_{j∈S} a_j σ(x_k, w_j) + noise · N(0, 1), with the teacher
    /// support disclosed in training reports.
    Teacher { atoms: usize, noise: f64 },
    /// JSON array of n numbers.
    File { path: String },
}

impl Default for LabelsConfig {
    fn default() -> Self {
        LabelsConfig::Teacher {
            atoms: 3,
            noise: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteName {
    Decomposition,
    Compatibility,
    Inclusion,
    Kernel,
    Reformulation,
}

impl SuiteName {
    pub fn all() -> Vec<SuiteName> {
        vec![
            SuiteName::Decomposition,
            SuiteName::Compatibility,
            SuiteName::Inclusion,
            SuiteName::Kernel,
            SuiteName::Reformulation,
        ]
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteInstances {
    #[serde(default = "default_decomposition")]
    pub decomposition: usize,
    #[serde(default = "default_compatibility")]
    pub compatibility: usize,
    #[serde(default = "default_inclusion")]
    pub inclusion: usize,
    #[serde(default = "default_kernel")]
    pub kernel: usize,
    #[serde(default = "default_reformulation")]
    pub reformulation: usize,
}

fn default_decomposition() -> usize {
    200
}
fn default_compatibility() -> usize {
    100
}
fn default_inclusion() -> usize {
    100
}
fn default_kernel() -> usize {
    100
}
fn default_reformulation() -> usize {
    50
}

impl Default for SuiteInstances {
    fn default() -> Self {
        Self {
            decomposition: default_decomposition(),
            compatibility: default_compatibility(),
            inclusion: default_inclusion(),
            kernel: default_kernel(),
            reformulation: default_reformulation(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance for solver-against-solver identities.
    #[serde(default = "default_solver_identity")]
    pub solver_identity: f64,
    /// Relative tolerance for closed-form identities.
    #[serde(default = "default_closed_form")]
    pub closed_form: f64,
}

fn default_solver_identity() -> f64 {
    1e-6
}
fn default_closed_form() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solver_identity: default_solver_identity(),
            closed_form: default_closed_form(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ExperimentConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok((config, bytes))
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.samples.n == 0 || self.samples.dim == 0 {
            return Err(CliError::Config(
                "samples.n and samples.dim must be at least 1".into(),
            ));
        }
        if let GridConfig::UniformCube { m } = &self.grid {
            if *m == 0 {
                return Err(CliError::Config("grid.m must be at least 1".into()));
            }
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(CliError::Config("lambdas must be positive".into()));
        }
        Ok(())
    }
}

/// Everything the subcommands need, built deterministically from the config.
pub struct Instance {
    pub grid: ParameterGrid,
    pub matrix: ActivationMatrix,
    pub partition: SingularPartition,
    pub labels: SampleFunction,
    pub teacher: Option<TeacherDisclosure>,
}

#[derive(Debug, Serialize)]
pub struct TeacherDisclosure {
    pub atoms: Vec<TeacherAtom>,
    pub noise: f64,
}

#[derive(Debug, Serialize)]
pub struct TeacherAtom {
    pub index: usize,
    pub weight: f64,
}

pub fn build_instance(config: &ExperimentConfig, config_dir: &Path) -> Result<Instance, CliError> {
    let family = build_family(&config.activation, config_dir)?;
    let mut sample_rng = SplitMix64::new(derive_seed(config.seed, 1));
    let samples: Vec<SamplePoint> = (0..config.samples.n)
        .map(|_| {
            SamplePoint::new(
                (0..config.samples.dim)
                    .map(|_| sample_rng.uniform(-1.0, 1.0))
                    .collect(),
            )
            .map_err(CliError::from_core)
        })
        .collect::<Result<_, _>>()?;
    let grid = build_grid(&config.grid, config.samples.dim, config.seed)?;
    let matrix = assemble_matrix(&family, &samples, &grid).map_err(CliError::from_core)?;
    let partition = build_partition(&config.partition, grid.size())?;
    let (labels, teacher) = build_labels(config, config_dir, &matrix)?;
    Ok(Instance {
        grid,
        matrix,
        partition,
        labels,
        teacher,
    })
}

fn build_family(
    config: &ActivationConfig,
    config_dir: &Path,
) -> Result<ActivationFamily, CliError> {
    match config {
        ActivationConfig::Relu => Ok(ActivationFamily::Relu),
        ActivationConfig::Tanh => Ok(ActivationFamily::Tanh),
        ActivationConfig::Gaussian { bandwidth } => {
            ActivationFamily::gaussian(*bandwidth).map_err(CliError::from_core)
        }
        ActivationConfig::Tabulated { path } => {
            let full = resolve(config_dir, path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", full.display())))?;
            ActivationFamily::tabulated_from_csv(&text).map_err(CliError::from_core)
        }
    }
}

fn build_grid(config: &GridConfig, dim: usize, seed: u64) -> Result<ParameterGrid, CliError> {
    match config {
        GridConfig::UniformCube { m } => {
            let mut rng = SplitMix64::new(derive_seed(seed, 2));
            let atoms: Vec<ParameterPoint> = (0..*m)
                .map(|_| {
                    ParameterPoint::new(
                        (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                        rng.uniform(-1.0, 1.0),
                    )
                    .map_err(CliError::from_core)
                })
                .collect::<Result<_, _>>()?;
            ParameterGrid::new(atoms).map_err(CliError::from_core)
        }
        GridConfig::Explicit { atoms } => {
            let atoms: Vec<ParameterPoint> = atoms
                .iter()
                .map(|a| {
                    let mut p = ParameterPoint::new(a.theta.clone(), a.bias)
                        .map_err(CliError::from_core)?;
                    if let Some(tag) = a.tag {
                        p = p.with_tag(tag);
                    }
                    Ok(p)
                })
                .collect::<Result<_, CliError>>()?;
            ParameterGrid::new(atoms).map_err(CliError::from_core)
        }
    }
}

fn build_partition(config: &PartitionConfig, m: usize) -> Result<SingularPartition, CliError> {
    match config {
        PartitionConfig::RoundRobin { blocks } => {
            SingularPartition::round_robin(m, *blocks).map_err(CliError::from_core)
        }
        PartitionConfig::Contiguous { blocks } => {
            SingularPartition::contiguous(m, *blocks).map_err(CliError::from_core)
        }
        PartitionConfig::Explicit { blocks, weights } => {
            let weights = match weights {
                Some(lists) => lists
                    .iter()
                    .map(|w| ProbabilityWeights::new(w.clone()).map_err(CliError::from_core))
                    .collect::<Result<Vec<_>, _>>()?,
                None => blocks
                    .iter()
                    .map(|b| ProbabilityWeights::uniform(b.len()).map_err(CliError::from_core))
                    .collect::<Result<Vec<_>, _>>()?,
            };
            SingularPartition::new(m, blocks.clone(), weights).map_err(CliError::from_core)
        }
    }
}

fn build_labels(
    config: &ExperimentConfig,
    config_dir: &Path,
    matrix: &ActivationMatrix,
) -> Result<(SampleFunction, Option<TeacherDisclosure>), CliError> {
    match &config.labels {
        LabelsConfig::File { path } => {
            let full = resolve(config_dir, path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", full.display())))?;
            let values: Vec<f64> = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", full.display())))?;
            if values.len() != matrix.rows() {
                return Err(CliError::Config(format!(
                    "labels file has {} values, expected {}",
                    values.len(),
                    matrix.rows()
                )));
            }
            Ok((
                SampleFunction::new(values).map_err(CliError::from_core)?,
                None,
            ))
        }
        LabelsConfig::Teacher { atoms, noise } => {
            if !(noise.is_finite() && *noise >= 0.0) {
                return Err(CliError::Config("labels.noise must be nonnegative".into()));
            }
            let m = matrix.cols();
            let count = (*atoms).clamp(1, m);
            let mut rng = SplitMix64::new(derive_seed(config.seed, 3));
            let mut weights = vec![0.0; m];
            let mut disclosed = Vec::new();
            for _ in 0..count {
                let index = rng.int_in(0, m - 1);
                let weight = rng.uniform(-1.5, 1.5);
                weights[index] += weight;
                disclosed.push(TeacherAtom { index, weight });
            }
            let clean = matrix
                .apply_measure(
                    &rkbslab_core::spaces::DiscreteMeasure::new(weights)
                        .map_err(CliError::from_core)?,
                )
                .map_err(CliError::from_core)?;
            let values: Vec<f64> = clean
                .values()
                .iter()
                .map(|v| v + noise * rng.next_gaussian())
                .collect();
            Ok((
                SampleFunction::new(values).map_err(CliError::from_core)?,
                Some(TeacherDisclosure {
                    atoms: disclosed,
                    noise: *noise,
                }),
            ))
        }
    }
}

fn resolve(config_dir: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_dir.join(p)
    }
}

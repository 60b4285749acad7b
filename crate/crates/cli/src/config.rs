//! JSON config files, one schema per subcommand. Unknown keys are rejected.
//! Relative paths inside a config resolve against the config's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use dyadic_sharp::experiments::{Buckley, SweepOperator};
use dyadic_sharp::weights::{power_weight, Weight, YoungDescriptor, YoungFunction};
use dyadic_sharp::{DyadicCube, StepFunction};

use crate::Failure;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

/// Resolves paths named in a config file.
pub struct Base(PathBuf);

impl Base {
    pub fn of(config: &Path) -> Self {
        Base(config.parent().map(Path::to_path_buf).unwrap_or_default())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.0.join(p)
        }
    }

    pub fn step_function(&self, p: &Path) -> Result<StepFunction, Failure> {
        load(&self.resolve(p))
    }

    pub fn weight(&self, src: &WeightSource) -> Result<Weight, Failure> {
        match src {
            WeightSource::File(p) => Weight::new(self.step_function(p)?).map_err(Failure::Domain),
            WeightSource::Power(w) => power_weight(w.gamma, w.depth).map_err(Failure::Domain),
        }
    }
}

pub fn young(d: &YoungDescriptor) -> Result<YoungFunction, Failure> {
    YoungFunction::try_from(d).map_err(Failure::Domain)
}

/// A weight read from a step-function file, or the power weight `x^gamma`
/// built on `depth` geometric shells.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum WeightSource {
    File(PathBuf),
    Power(PowerSpec),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    pub gamma: f64,
    pub depth: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub input: PathBuf,
    pub operator: TransformOperator,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformOperator {
    HilbertD {},
    /// Haar shift from a shift-spec file.
    Shift {
        spec: PathBuf,
    },
    /// Generalized Haar shift; with `eps`, the truncation at that scale.
    Gshift {
        kind: ShiftKind,
        #[serde(default)]
        eps: Option<f64>,
    },
    MaximalShift {
        kind: ShiftKind,
    },
    Paraproduct {
        symbol: PathBuf,
    },
    Multiplier {
        alpha: Alpha,
    },
    Square {},
    Maximal {},
    Wmaximal {
        weight: WeightSource,
    },
    /// The input is the first component; `components` lists the rest.
    Vmaximal {
        q: f64,
        #[serde(default)]
        components: Vec<PathBuf>,
    },
    OrliczMaximal {
        young: YoungDescriptor,
    },
    Rdf {
        s: f64,
        terms: u32,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShiftKind {
    Haar {},
    Hilbert {},
    Paraproduct { symbol: PathBuf },
}

/// Haar multiplier symbol.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Alpha {
    Constant {
        value: f64,
    },
    /// `values[level]`; levels past the end get 0.
    ByLevel {
        values: Vec<f64>,
    },
    /// Per-interval values; intervals not listed get 0.
    Table {
        entries: Vec<AlphaEntry>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub cube: DyadicCube,
    pub value: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub p: f64,
    #[serde(default)]
    pub weight: Option<WeightSource>,
    #[serde(default)]
    pub two_weight: Option<TwoWeightAudit>,
    /// Young functions to classify against `B_p`.
    #[serde(default)]
    pub classify: Vec<YoungDescriptor>,
    /// Symbol whose dyadic BMO norm is reported.
    #[serde(default)]
    pub bmo: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoWeightAudit {
    pub u: WeightSource,
    pub v: WeightSource,
    pub a: YoungDescriptor,
    pub b: YoungDescriptor,
    #[serde(default = "one")]
    pub s: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub operator: SweepOp,
    pub p: f64,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub family: Family,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Mirror of [`SweepOperator`] whose variants all reject unknown keys.
#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepOp {
    Maximal {},
    Hilbert {},
    Square {},
    VectorMaximal { q: f64 },
    Paraproduct {},
    Multiplier {},
}

impl From<&SweepOp> for SweepOperator {
    fn from(op: &SweepOp) -> Self {
        match *op {
            SweepOp::Maximal {} => SweepOperator::Maximal,
            SweepOp::Hilbert {} => SweepOperator::Hilbert,
            SweepOp::Square {} => SweepOperator::Square,
            SweepOp::VectorMaximal { q } => SweepOperator::VectorMaximal { q },
            SweepOp::Paraproduct {} => SweepOperator::Paraproduct,
            SweepOp::Multiplier {} => SweepOperator::Multiplier,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    Buckley(Buckley),
}

impl Default for Family {
    fn default() -> Self {
        Family::Buckley(Buckley::default())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalConfig {
    pub j: u32,
    pub ps: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LernerConfig {
    pub input: PathBuf,
    /// Defaults to the root cube.
    #[serde(default)]
    pub cube: Option<DyadicCube>,
}

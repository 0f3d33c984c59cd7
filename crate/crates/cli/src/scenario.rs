//! Scenario files: one JSON object naming a check and its inputs.

use std::path::Path;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use corrlab_core::{Algebra, CMatrix, Tolerance, C64};

use crate::error::CliError;

/// Complex matrix as rows of `[re, im]` pairs.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;
/// Complex column vector as a list of `[re, im]` pairs.
pub type JsonVector = Vec<[f64; 2]>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Commutant,
    Gns,
    Tensor,
    Flip,
    Lemma,
    EndoUnit,
    EndoCommutant,
    Duality,
    Dilation,
    SpatialProduct,
    Powers,
}

impl Kind {
    pub const ALL: [Kind; 11] = [
        Kind::Commutant,
        Kind::Gns,
        Kind::Tensor,
        Kind::Flip,
        Kind::Lemma,
        Kind::EndoUnit,
        Kind::EndoCommutant,
        Kind::Duality,
        Kind::Dilation,
        Kind::SpatialProduct,
        Kind::Powers,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Commutant => "commutant",
            Kind::Gns => "gns",
            Kind::Tensor => "tensor",
            Kind::Flip => "flip",
            Kind::Lemma => "lemma",
            Kind::EndoUnit => "endo-unit",
            Kind::EndoCommutant => "endo-commutant",
            Kind::Duality => "duality",
            Kind::Dilation => "dilation",
            Kind::SpatialProduct => "spatial-product",
            Kind::Powers => "powers",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub abs: f64,
    pub rel: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        let t = Tolerance::default();
        ToleranceSpec {
            abs: t.abs_eps,
            rel: t.rel_eps,
        }
    }
}

impl ToleranceSpec {
    pub fn build(&self) -> Result<Tolerance, CliError> {
        Tolerance::new(self.abs, self.rel).map_err(|e| CliError::Schema(e.to_string()))
    }
}

/// A scenario as read from disk, before the inputs are typed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<ToleranceSpec>,
    pub inputs: Value,
}

/// Schema view of a scenario with typed inputs.
#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TypedScenario<I> {
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<ToleranceSpec>,
    pub inputs: I,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Scenario, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text)
    }

    pub fn inputs<I: for<'de> Deserialize<'de>>(&self) -> Result<I, CliError> {
        serde_json::from_value(self.inputs.clone())
            .map_err(|e| CliError::Schema(format!("{} inputs: {e}", self.kind.name())))
    }
}

/// `[[size, multiplicity], ...]` for `⊕ M_size ⊗ 1_multiplicity`.
#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub blocks: Vec<(usize, usize)>,
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<Algebra, CliError> {
        Algebra::multimatrix(&self.blocks).map_err(|e| CliError::Schema(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CommutantInput {
    pub algebra: AlgebraSpec,
}

/// A random representation of the commutant with the given block
/// multiplicities, and the module of its intertwiners.
#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LemmaInput {
    pub algebra: AlgebraSpec,
    pub multiplicities: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Kraus(Vec<JsonMatrix>),
    /// Random Kraus operators, each supported between one pair of blocks.
    RandomKraus(usize),
    Depolarizing(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GnsInput {
    pub algebra: AlgebraSpec,
    pub map: MapSpec,
}

/// Random `B`-`B` correspondence with a given multiplicity matrix.
#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceSpec {
    pub multiplicity: Vec<Vec<u64>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PairInput {
    pub algebra: AlgebraSpec,
    pub first: CorrespondenceSpec,
    pub second: CorrespondenceSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum EndoSpec {
    /// Identity on `B` as a module over itself.
    Identity { algebra: AlgebraSpec },
    /// Identity on the module generated by `generators : G → C^target_dim`.
    Module {
        algebra: AlgebraSpec,
        target_dim: usize,
        generators: Vec<JsonMatrix>,
    },
    /// `Ad(U)` on `B(C^d)`; a seeded random unitary when none is given.
    Inner {
        dimension: usize,
        #[serde(default)]
        unitary: Option<JsonMatrix>,
    },
    /// Permutes the blocks of `B` acting on itself.
    BlockPermutation {
        algebra: AlgebraSpec,
        permutation: Vec<usize>,
    },
    /// Identity on the off-diagonal corner module over `C ⊕ M_2`.
    Corner,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EndoInput {
    pub endomorphism: EndoSpec,
    /// Unit vector of `E`; found automatically when omitted.
    #[serde(default)]
    pub xi: Option<JsonMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSpec {
    /// `C^k` with the first basis vector.
    Standard(usize),
    /// `C^k` with a seeded random unit vector.
    Random(usize),
    Vector(JsonVector),
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SpatialInput {
    pub first: ReferenceSpec,
    pub second: ReferenceSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PowersInput {
    pub g_dim: usize,
    pub first: ReferenceSpec,
    pub second: ReferenceSpec,
    /// Runs the n-step embedding for `1..=n_steps`.
    #[serde(default)]
    pub n_steps: usize,
}

pub fn schema(kind: Kind) -> Value {
    let s = match kind {
        Kind::Commutant => schemars::schema_for!(TypedScenario<CommutantInput>),
        Kind::Lemma => schemars::schema_for!(TypedScenario<LemmaInput>),
        Kind::Gns => schemars::schema_for!(TypedScenario<GnsInput>),
        Kind::Tensor | Kind::Flip => schemars::schema_for!(TypedScenario<PairInput>),
        Kind::EndoUnit | Kind::EndoCommutant | Kind::Duality | Kind::Dilation => {
            schemars::schema_for!(TypedScenario<EndoInput>)
        }
        Kind::SpatialProduct => schemars::schema_for!(TypedScenario<SpatialInput>),
        Kind::Powers => schemars::schema_for!(TypedScenario<PowersInput>),
    };
    serde_json::to_value(s).expect("schemas serialize")
}

pub fn matrix(m: &JsonMatrix, what: &str) -> Result<CMatrix, CliError> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Schema(format!("{what} must be a nonempty rectangular matrix")));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(m[i][j][0], m[i][j][1])))
}

pub fn vector(v: &JsonVector, what: &str) -> Result<CMatrix, CliError> {
    if v.is_empty() {
        return Err(CliError::Schema(format!("{what} must be nonempty")));
    }
    Ok(CMatrix::from_fn(v.len(), 1, |i, _| C64::new(v[i][0], v[i][1])))
}

//! The JSON record every command can emit.

use fixlab_core::closedform::{BcVerdict, Theorem1Result};
use fixlab_core::coalescent::WalkAverages;
use fixlab_core::montecarlo::Estimate;
use fixlab_core::{PayoffMatrix, Rule};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub inputs: Inputs,
    pub outputs: Outputs,
}

impl RunRecord {
    pub fn new(command: &str, inputs: Inputs, outputs: Outputs) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs,
            outputs,
        }
    }
}

/// Everything the run depended on. `payoff` and `w` are the values actually
/// used; when a general matrix was reduced, the original sits in
/// `payoff_given` and `w_given`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rule: Option<Rule>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub payoff_given: Option<PayoffMatrix>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w_given: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub init: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replicas: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_steps: Option<u64>,
    /// Population size and cooperator count for the formula-only commands.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub population: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cooperators: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outputs {
    Exact(ExactOutputs),
    MonteCarlo(McOutputs),
    Theorem1(Theorem1Outputs),
    BcRule(BcOutputs),
    Tables(TablesOutputs),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactOutputs {
    pub fixation: f64,
    pub neutral: f64,
    pub zero_potential: f64,
    pub w_derivative: f64,
    /// `Γ`; absent for the voter rule.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<f64>,
    /// First-order coefficient predicted from `Γ` (uniform and Bernoulli
    /// starts only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_order: Option<f64>,
    pub deltas: ExactDeltas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDeltas {
    pub derivative_minus_potential: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub potential_minus_coefficient: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixation_minus_first_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOutputs {
    pub estimate: Estimate,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Outputs {
    pub result: Theorem1Result,
    pub gamma: f64,
    pub verdict: BcVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcOutputs {
    /// Present when a population size was given.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bracket: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<BcVerdict>,
    /// Present when no population size was given.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub critical_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub asymptotic_verdict: Option<BcVerdict>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablesOutputs {
    pub hitting: Vec<Vec<f64>>,
    pub meeting: Vec<Vec<f64>>,
    pub hitting_symmetry_residual: f64,
    pub averages: WalkAverages,
    pub averages_predicted: WalkAverages,
}

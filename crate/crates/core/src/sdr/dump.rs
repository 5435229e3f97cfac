//! Plain-text (JSON) dumps of instances and solutions so a failing solve can
//! be replayed.

use serde::{Deserialize, Serialize};

use super::instance::KnapsackInstance;
use super::oracle::OracleSolution;
use super::rounding::{RoundingOptions, SdrSolution};
use super::sdp::SdpOptions;
use crate::error::Result;

pub const INSTANCE_SCHEMA: &str = "d2d.knapsack.v1";
pub const SOLUTION_SCHEMA: &str = "d2d.sdr_solution.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDump {
    pub schema: String,
    pub instance: KnapsackInstance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDump {
    pub schema: String,
    pub seed: u64,
    pub sdp: SdpOptions,
    pub rounding: RoundingOptions,
    pub iterations: usize,
    pub solution: SdrSolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSolution>,
}

fn to_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_instance(inst: &KnapsackInstance) -> Result<String> {
    to_text(&InstanceDump {
        schema: INSTANCE_SCHEMA.into(),
        instance: inst.clone(),
    })
}

pub fn read_instance(text: &str) -> Result<KnapsackInstance> {
    let dump: InstanceDump = serde_json::from_str(text)?;
    if dump.schema != INSTANCE_SCHEMA {
        return Err(crate::Error::Format(format!(
            "expected schema {INSTANCE_SCHEMA}, found {}",
            dump.schema
        )));
    }
    dump.instance.validate()?;
    Ok(dump.instance)
}

pub fn write_solution(dump: &SolutionDump) -> Result<String> {
    to_text(dump)
}

pub fn read_solution(text: &str) -> Result<SolutionDump> {
    let dump: SolutionDump = serde_json::from_str(text)?;
    if dump.schema != SOLUTION_SCHEMA {
        return Err(crate::Error::Format(format!(
            "expected schema {SOLUTION_SCHEMA}, found {}",
            dump.schema
        )));
    }
    Ok(dump)
}

//! Serializable record of a construction run.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{ConstructError, ConstructionState};
use crate::exactpoly::RatPoly;
use crate::sqclass::{ClassSubspace, SquareClass};
use crate::supernat::SupernaturalNumber;

pub const TRACE_SCHEMA: u32 = 1;

mod point {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::exactpoly::{format_rational, parse_rational};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunParams {
    pub steps: usize,
    pub depth: usize,
    pub height: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self { steps: 10, depth: 5, height: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VastRecord {
    pub index: usize,
    pub poly: RatPoly,
    pub n: usize,
    pub depth_checked: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverRecord {
    pub id: usize,
    pub position: usize,
    pub h: RatPoly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checks {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub c5: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3 && self.c4 && self.c5
    }

    pub fn get(&self, k: usize) -> bool {
        [self.c1, self.c2, self.c3, self.c4, self.c5][k - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRecord {
    pub m: usize,
    pub depth: usize,
    pub witness_kernel: SquareClass,
    pub witness_level: usize,
    pub cover: CoverRecord,
    #[serde(with = "point")]
    pub point: BigRational,
    pub fiber_kernel: SquareClass,
    pub vast: VastRecord,
    pub checks: Checks,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetryRecord {
    pub m: usize,
    pub from_depth: usize,
    pub to_depth: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalRecord {
    #[serde(rename = "F")]
    pub field: ClassSubspace,
    pub dims: Vec<usize>,
    pub supernatural_degree: SupernaturalNumber,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceStatus {
    Complete,
    Aborted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionTrace {
    pub schema: u32,
    pub params: RunParams,
    pub initial_vast: VastRecord,
    pub steps: Vec<StepRecord>,
    pub retries: Vec<RetryRecord>,
    pub status: TraceStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(rename = "final")]
    pub final_record: FinalRecord,
}

/// `2^dim` as a supernatural number.
pub fn degree_of(field: &ClassSubspace) -> SupernaturalNumber {
    SupernaturalNumber::from_integer(&(BigInt::from(1) << field.dim())).expect("positive")
}

impl ConstructionTrace {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self, ConstructError> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| ConstructError::MalformedTrace(e.to_string()))?;
        match value.get("schema").and_then(serde_json::Value::as_u64) {
            Some(v) if v == u64::from(TRACE_SCHEMA) => {}
            Some(v) => return Err(ConstructError::MalformedTrace(format!("unsupported schema {v}"))),
            None => return Err(ConstructError::MalformedTrace("missing schema".into())),
        }
        serde_json::from_value(value).map_err(|e| ConstructError::MalformedTrace(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.final_record.field.dim()
    }

    /// Fibers as recorded, in step order.
    pub fn fibers(&self) -> Vec<SquareClass> {
        self.steps.iter().map(|s| s.fiber_kernel.clone()).collect()
    }

    /// Assignments `L_1, …, L_{N+1}`.
    pub fn assignments(&self) -> Vec<&VastRecord> {
        std::iter::once(&self.initial_vast).chain(self.steps.iter().map(|s| &s.vast)).collect()
    }

    /// State after the last recorded step.
    pub fn final_state(&self) -> ConstructionState {
        ConstructionState {
            m: self.steps.len() + 1,
            field: self.final_record.field.clone(),
            fibers: self.fibers(),
            points: self.steps.iter().map(|s| s.point.clone()).collect(),
            assignments: self.assignments().into_iter().cloned().collect(),
            depth: self.steps.last().map_or(self.params.depth, |s| s.depth),
            height: self.params.height,
        }
    }
}

//! Step-by-step construction of a 2-power field extension, modeled by its
//! subspace of square classes, with trace replay and auditing.

mod audit;
mod enumerate;
mod trace;
mod verify;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::arboreal::ArborError;
use crate::sqclass::{class_of, ClassError, ClassSubspace, SquareClass};

pub use audit::{counterexample_audit, AuditEntry, AuditReport, AuditStatus, LevelKill};
pub use enumerate::{
    default_enumerations, diagonal, height, rationals_by_height, CoverGrid, CoverSpec, Enumerations, VastSpec,
};
pub use trace::{
    degree_of, Checks, ConstructionTrace, CoverRecord, FinalRecord, RetryRecord, RunParams, StepRecord, TraceStatus,
    VastRecord, TRACE_SCHEMA,
};
pub use verify::{verify_trace, verify_trace_with, Violation};

/// Vast specifications searched per step, beyond those already assigned.
pub const VAST_WINDOW: usize = 256;
/// Depth doublings allowed within one step.
pub const MAX_DEPTH_RETRIES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("step {step}: the first {depth} classes of the assigned stream all lie in the span")]
    DepthExhausted { step: usize, depth: usize },
    #[error("step {step}: no admissible point of height at most {height}")]
    PointSearchExhausted { step: usize, height: u64 },
    #[error("step {step}: no eligible vast specification among the first {window}")]
    NoEligibleVastSpec { step: usize, window: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error(transparent)]
    Class(#[from] ClassError),
    #[error(transparent)]
    Arbor(#[from] ArborError),
}

impl ConstructError {
    /// Search or resource limits, as opposed to bad input.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            ConstructError::DepthExhausted { .. }
                | ConstructError::PointSearchExhausted { .. }
                | ConstructError::NoEligibleVastSpec { .. }
                | ConstructError::Class(ClassError::Factor(_))
        )
    }
}

/// Everything the next step depends on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionState {
    /// Index of the next step.
    pub m: usize,
    pub field: ClassSubspace,
    pub fibers: Vec<SquareClass>,
    pub points: Vec<BigRational>,
    /// `L_1, …, L_m`.
    pub assignments: Vec<VastRecord>,
    pub depth: usize,
    pub height: u64,
}

fn first_eligible_vast(
    enums: &mut Enumerations,
    field: &ClassSubspace,
    assigned: &BTreeSet<usize>,
    depth: usize,
    step: usize,
) -> Result<VastRecord, ConstructError> {
    let window = VAST_WINDOW + assigned.len();
    for index in 1..=window {
        if assigned.contains(&index) {
            continue;
        }
        let spec = enums.vast(index);
        if enums.truncated(&spec, depth)?.intersection(field).dim() == 0 {
            return Ok(VastRecord { index, poly: spec.poly, n: spec.n, depth_checked: depth });
        }
    }
    Err(ConstructError::NoEligibleVastSpec { step, window })
}

impl ConstructionState {
    pub fn initial(enums: &mut Enumerations, depth: usize, height: u64) -> Result<Self, ConstructError> {
        if depth == 0 {
            return Err(ConstructError::InvalidParameter("depth must be at least 1".into()));
        }
        if height == 0 {
            return Err(ConstructError::InvalidParameter("height must be at least 1".into()));
        }
        let first = first_eligible_vast(enums, &ClassSubspace::empty(), &BTreeSet::new(), depth, 0)?;
        Ok(Self {
            m: 1,
            field: ClassSubspace::empty(),
            fibers: Vec::new(),
            points: Vec::new(),
            assignments: vec![first],
            depth,
            height,
        })
    }

    /// Span of the field together with every fiber class so far.
    pub fn avoid_span(&self) -> ClassSubspace {
        let mut v = self.field.clone();
        for f in &self.fibers {
            v.insert(f);
        }
        v
    }

    /// Runs step `m`; the state is left untouched on error.
    pub fn step(&mut self, enums: &mut Enumerations) -> Result<StepRecord, ConstructError> {
        let m = self.m;
        let depth = self.depth;
        let current = self.assignments.last().expect("an assignment is always pending").clone();
        let spec = enums.vast(current.index);

        let span = self.avoid_span();
        let mut witness = None;
        for i in 0..depth {
            let c = enums.stream_class(&spec, i)?;
            if !span.member(&c) {
                witness = Some((spec.n + i, c));
                break;
            }
        }
        let (witness_level, w) = witness.ok_or(ConstructError::DepthExhausted { step: m, depth })?;
        let field = self.field.extend(&w);

        let cover = enums.cover(m);

        let assigned: BTreeSet<usize> = self.assignments.iter().map(|a| a.index).collect();
        let next = first_eligible_vast(enums, &field, &assigned, depth, m)?;

        let mut avoid = field.clone();
        for f in &self.fibers {
            avoid.insert(f);
        }
        let mut found = None;
        for c in rationals_by_height(self.height) {
            if self.points.contains(&c) {
                continue;
            }
            let v = cover.h.eval(&c);
            if v.is_zero() {
                continue;
            }
            let cls = class_of(&v)?;
            if !avoid.member(&cls) {
                found = Some((c, cls));
                break;
            }
        }
        let (point, fiber) = found.ok_or(ConstructError::PointSearchExhausted { step: m, height: self.height })?;

        let next_spec = enums.vast(next.index);
        let next_disjoint = enums.truncated(&next_spec, depth)?.intersection(&field).dim() == 0;
        let checks = Checks {
            c1: !self.points.contains(&point),
            c2: self.fibers.iter().chain(std::iter::once(&fiber)).all(|f| !field.member(f)),
            c3: cover.position == m,
            c4: !assigned.contains(&next.index) && next_disjoint,
            c5: field.dim() == self.field.dim() + 1 && !span.member(&w),
        };

        let record = StepRecord {
            m,
            depth,
            witness_kernel: w,
            witness_level,
            cover: CoverRecord { id: cover.id, position: cover.position, h: cover.h },
            point: point.clone(),
            fiber_kernel: fiber.clone(),
            vast: next.clone(),
            checks,
        };
        self.m += 1;
        self.field = field;
        self.fibers.push(fiber);
        self.points.push(point);
        self.assignments.push(next);
        Ok(record)
    }
}

/// A run that stopped early, with the trace of the steps that completed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunFailure {
    pub error: ConstructError,
    pub trace: Option<Box<ConstructionTrace>>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {}

/// Runs `params.steps` steps from the initial state, doubling the witness
/// depth when a step exhausts it.
pub fn run(params: &RunParams) -> Result<ConstructionTrace, RunFailure> {
    if params.steps == 0 {
        return Err(RunFailure {
            error: ConstructError::InvalidParameter("at least one step is required".into()),
            trace: None,
        });
    }
    let mut enums = default_enumerations();
    let mut state = ConstructionState::initial(&mut enums, params.depth, params.height)
        .map_err(|error| RunFailure { error, trace: None })?;
    let initial_vast = state.assignments[0].clone();
    let mut steps = Vec::new();
    let mut retries = Vec::new();
    let mut dims = Vec::new();

    let finish = |state: &ConstructionState,
                  steps: Vec<StepRecord>,
                  retries: Vec<RetryRecord>,
                  dims: Vec<usize>,
                  error: Option<&ConstructError>| ConstructionTrace {
        schema: TRACE_SCHEMA,
        params: params.clone(),
        initial_vast: initial_vast.clone(),
        steps,
        retries,
        status: if error.is_some() { TraceStatus::Aborted } else { TraceStatus::Complete },
        error: error.map(ToString::to_string),
        final_record: FinalRecord { field: state.field.clone(), dims, supernatural_degree: degree_of(&state.field) },
    };

    while steps.len() < params.steps {
        let mut attempts = 0;
        let outcome = loop {
            match state.step(&mut enums) {
                Err(ConstructError::DepthExhausted { step, depth }) if attempts < MAX_DEPTH_RETRIES => {
                    attempts += 1;
                    retries.push(RetryRecord {
                        m: step,
                        from_depth: depth,
                        to_depth: 2 * depth,
                        reason: "depth exhausted".into(),
                    });
                    state.depth = 2 * depth;
                }
                other => break other,
            }
        };
        match outcome {
            Ok(record) => {
                steps.push(record);
                dims.push(state.field.dim());
            }
            Err(error) => {
                let trace = finish(&state, steps, retries, dims, Some(&error));
                return Err(RunFailure { error, trace: Some(Box::new(trace)) });
            }
        }
    }
    Ok(finish(&state, steps, retries, dims, None))
}

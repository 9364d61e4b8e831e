//! How much of each vast polynomial's tower the constructed field absorbs.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::trace::ConstructionTrace;
use super::ConstructError;
use crate::arboreal::{disc_class_sequence, killed_in};
use crate::exactpoly::RatPoly;
use crate::sqclass::{ClassSubspace, SquareClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditStatus {
    /// Some step drew its witness from this polynomial.
    Processed,
    /// Assigned, but the run ended before its stream was used.
    AssignedUnprocessed,
    Unassigned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelKill {
    pub level: usize,
    pub killed: Vec<usize>,
    #[serde(with = "crate::bigjson")]
    pub index_lower_bound: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub poly: RatPoly,
    pub status: AuditStatus,
    /// Steps `m` with this polynomial as `L_m`.
    pub assigned_at: Vec<usize>,
    pub witness_levels: Vec<usize>,
    pub at_level: LevelKill,
    /// Deepest witness level, for processed polynomials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_witness_level: Option<LevelKill>,
    /// `dim(F ∩ span{disc classes up to max(level, deepest witness)})`.
    pub intersection_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub level: usize,
    #[serde(rename = "F")]
    pub field: ClassSubspace,
    pub polys: Vec<AuditEntry>,
}

fn kill(classes: &[SquareClass], field: &ClassSubspace, level: usize) -> LevelKill {
    let killed: Vec<usize> =
        classes[..level].iter().enumerate().filter(|(_, c)| field.member(c)).map(|(i, _)| i + 1).collect();
    LevelKill { level, index_lower_bound: BigInt::from(1) << killed.len(), killed }
}

/// Audits `polys` against the final field of `trace` at tree level `k`; with
/// no polynomials given, audits every polynomial the trace assigned, which
/// is none for a trace without steps.
pub fn counterexample_audit(
    trace: &ConstructionTrace,
    polys: &[RatPoly],
    k: usize,
) -> Result<AuditReport, ConstructError> {
    if k == 0 {
        return Err(ConstructError::InvalidParameter("level must be at least 1".into()));
    }
    let assignments = trace.assignments();
    let mut targets: Vec<RatPoly> = polys.to_vec();
    if targets.is_empty() && !trace.steps.is_empty() {
        for a in &assignments {
            if !targets.contains(&a.poly) {
                targets.push(a.poly.clone());
            }
        }
    }
    let field = &trace.final_record.field;
    let mut entries = Vec::new();
    for f in targets {
        let assigned_at: Vec<usize> =
            assignments.iter().enumerate().filter(|(_, a)| a.poly == f).map(|(i, _)| i + 1).collect();
        let witness_levels: Vec<usize> =
            trace.steps.iter().filter(|s| assignments[s.m - 1].poly == f).map(|s| s.witness_level).collect();
        let status = if !witness_levels.is_empty() {
            AuditStatus::Processed
        } else if !assigned_at.is_empty() {
            AuditStatus::AssignedUnprocessed
        } else {
            AuditStatus::Unassigned
        };
        let deepest = witness_levels.iter().copied().max();
        let reach = deepest.unwrap_or(0).max(k);
        let seq = disc_class_sequence(&f, reach)?;
        let classes = seq.classes();
        let at_level = kill(classes, field, k);
        debug_assert_eq!(at_level.killed, killed_in(&seq, field, k).into_iter().collect::<Vec<_>>());
        let intersection_dim = field.intersection(&ClassSubspace::span(classes)).dim();
        entries.push(AuditEntry {
            poly: f,
            status,
            assigned_at,
            witness_levels,
            at_level,
            at_witness_level: deepest.map(|d| kill(classes, field, d)),
            intersection_dim,
        });
    }
    Ok(AuditReport { level: k, field: field.clone(), polys: entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arboreal::ArborError;
    use crate::construct::{run, RunParams};

    #[test]
    fn processed_polynomials_lose_index() {
        let t = run(&RunParams { steps: 6, ..RunParams::default() }).unwrap();
        let r = counterexample_audit(&t, &[], 2).unwrap();
        let first = &r.polys[0];
        assert_eq!(first.poly.to_string(), "x^2+1");
        assert_eq!(first.status, AuditStatus::Processed);
        assert!(first.at_level.killed.contains(&1));
        for e in r.polys.iter().filter(|e| e.status == AuditStatus::Processed) {
            let w = e.at_witness_level.as_ref().unwrap();
            assert!(e.intersection_dim >= 1);
            assert!(w.index_lower_bound >= BigInt::from(2));
        }
        let one = run(&RunParams { steps: 1, ..RunParams::default() }).unwrap();
        let r = counterexample_audit(&one, &[], 2).unwrap();
        assert_eq!(r.polys[1].poly.to_string(), "x^2+2");
        assert_eq!(r.polys[1].status, AuditStatus::AssignedUnprocessed);
        assert_eq!(r.polys[1].assigned_at, vec![2]);
    }

    #[test]
    fn explicit_polynomials_and_errors() {
        let t = run(&RunParams { steps: 2, ..RunParams::default() }).unwrap();
        let r = counterexample_audit(&t, &["x^2+7".parse().unwrap()], 1).unwrap();
        assert_eq!(r.polys[0].status, AuditStatus::Unassigned);
        assert!(matches!(
            counterexample_audit(&t, &["x^2".parse().unwrap()], 2),
            Err(ConstructError::Arbor(ArborError::Inseparable(1)))
        ));
        assert!(counterexample_audit(&t, &[], 0).is_err());
        let mut empty = t.clone();
        empty.steps.clear();
        assert!(counterexample_audit(&empty, &[], 2).unwrap().polys.is_empty());
    }
}

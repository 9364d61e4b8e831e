//! Replay of a trace against the selection rules, step by step.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::enumerate::{default_enumerations, height, rationals_by_height, Enumerations};
use super::trace::{degree_of, ConstructionTrace, TraceStatus, VastRecord, TRACE_SCHEMA};
use super::{ConstructError, VAST_WINDOW};
use crate::exactpoly::RatPoly;
use crate::sqclass::{class_of, ClassSubspace, SquareClass};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// `(k_m)` for condition `k` at step `m`, or `(final)` / `(schema)`.
    pub code: String,
    pub step: usize,
    pub detail: String,
}

#[derive(Default)]
struct Report {
    out: Vec<Violation>,
}

impl Report {
    fn flag(&mut self, k: usize, m: usize, detail: impl Into<String>) {
        self.out.push(Violation { code: format!("({k}_{m})"), step: m, detail: detail.into() });
    }

    fn other(&mut self, code: &str, m: usize, detail: impl Into<String>) {
        self.out.push(Violation { code: format!("({code})"), step: m, detail: detail.into() });
    }

    fn has(&self, k: usize, m: usize) -> bool {
        let code = format!("({k}_{m})");
        self.out.iter().any(|v| v.code == code)
    }
}

fn admissible(h: &RatPoly, c: &BigRational, avoid: &ClassSubspace) -> Result<Option<SquareClass>, ConstructError> {
    let v = h.eval(c);
    if v.is_zero() {
        return Ok(None);
    }
    let cls = class_of(&v)?;
    Ok((!avoid.member(&cls)).then_some(cls))
}

fn check_vast(
    enums: &mut Enumerations,
    field: &ClassSubspace,
    assigned: &[usize],
    rec: &VastRecord,
    depth: usize,
    m: usize,
    report: &mut Report,
) -> Result<(), ConstructError> {
    let window = VAST_WINDOW + assigned.len();
    if rec.index == 0 || rec.index > window {
        report.flag(4, m, format!("vast index {} outside 1..={window}", rec.index));
        return Ok(());
    }
    if assigned.contains(&rec.index) {
        report.flag(4, m, format!("vast index {} already assigned", rec.index));
    }
    if rec.depth_checked != depth {
        report.flag(4, m, format!("checked at depth {} instead of {depth}", rec.depth_checked));
    }
    let spec = enums.vast(rec.index);
    if spec.poly != rec.poly || spec.n != rec.n {
        report.flag(4, m, format!("index {} names {} from level {}", rec.index, spec.poly, spec.n));
    }
    if enums.truncated(&spec, depth)?.intersection(field).dim() != 0 {
        report.flag(4, m, format!("vast index {} meets the field", rec.index));
    }
    for j in 1..rec.index {
        if assigned.contains(&j) {
            continue;
        }
        let earlier = enums.vast(j);
        if enums.truncated(&earlier, depth)?.intersection(field).dim() == 0 {
            report.flag(4, m, format!("vast index {j} is eligible and comes first"));
            break;
        }
    }
    Ok(())
}

/// Recomputes every selection in `trace` and lists the conditions it breaks.
pub fn verify_trace(trace: &ConstructionTrace) -> Result<Vec<Violation>, ConstructError> {
    verify_trace_with(trace, &mut default_enumerations())
}

/// [`verify_trace`] reusing the class cache of `enums` across calls.
pub fn verify_trace_with(
    trace: &ConstructionTrace,
    enums: &mut Enumerations,
) -> Result<Vec<Violation>, ConstructError> {
    let mut report = Report::default();
    if trace.schema != TRACE_SCHEMA {
        report.other("schema", 0, format!("schema {} is not {TRACE_SCHEMA}", trace.schema));
        return Ok(report.out);
    }
    let params = &trace.params;

    let mut field = ClassSubspace::empty();
    let mut fibers: Vec<SquareClass> = Vec::new();
    let mut points: Vec<BigRational> = Vec::new();
    let mut assigned: Vec<usize> = Vec::new();
    let mut dims = Vec::new();

    check_vast(enums, &field, &assigned, &trace.initial_vast, params.depth, 0, &mut report)?;
    assigned.push(trace.initial_vast.index);
    let mut current = trace.initial_vast.clone();
    let mut last_depth = params.depth;

    for (i, s) in trace.steps.iter().enumerate() {
        let m = i + 1;
        if s.m != m {
            report.other("order", m, format!("step numbered {}", s.m));
        }
        if s.depth < last_depth || s.depth == 0 {
            report.other("order", m, format!("depth {} after {last_depth}", s.depth));
        }
        last_depth = s.depth.max(1);
        let depth = last_depth;

        let mut span = field.clone();
        for f in &fibers {
            span.insert(f);
        }
        let spec = enums.vast(current.index.max(1));
        let mut first_outside = None;
        for j in 0..depth {
            let c = enums.stream_class(&spec, j)?;
            if !span.member(&c) {
                first_outside = Some((spec.n + j, c));
                break;
            }
        }
        match first_outside {
            Some((level, c)) if c == s.witness_kernel && level == s.witness_level => {}
            Some((level, c)) => {
                report.flag(5, m, format!("first stream class outside the span is {} at level {level}", c.kernel()))
            }
            None => report.flag(5, m, "no stream class within depth lies outside the span"),
        }
        if span.member(&s.witness_kernel) {
            report.flag(5, m, "witness lies in the span of the field and fibers");
        }
        let new_field = field.extend(&s.witness_kernel);
        if new_field.dim() != field.dim() + 1 {
            report.flag(5, m, "witness does not enlarge the field");
        }

        let cover = enums.cover(m);
        if s.cover.position != m || s.cover.id != cover.id || s.cover.h != cover.h {
            report.flag(3, m, format!("cover at position {m} is #{} {}", cover.id, cover.h));
        }

        let mut avoid = new_field.clone();
        for f in &fibers {
            avoid.insert(f);
        }
        let c = &s.point;
        if points.contains(c) {
            report.flag(1, m, "point repeats an earlier point");
        }
        if height(c) > params.height.into() {
            report.flag(1, m, "point exceeds the height bound");
        }
        for q in rationals_by_height(params.height) {
            if &q == c {
                break;
            }
            if points.contains(&q) {
                continue;
            }
            if admissible(&s.cover.h, &q, &avoid)?.is_some() {
                report.flag(1, m, format!("{} is admissible and comes first", crate::exactpoly::format_rational(&q)));
                break;
            }
        }

        let fiber = match admissible(&s.cover.h, c, &avoid)? {
            Some(cls) => cls,
            None => {
                report.flag(2, m, "fiber over the point is not integral over the field");
                let v = s.cover.h.eval(c);
                if v.is_zero() {
                    s.fiber_kernel.clone()
                } else {
                    class_of(&v)?
                }
            }
        };
        if fiber != s.fiber_kernel {
            report.flag(2, m, format!("fiber class is {}", fiber.kernel()));
        }
        if fibers.iter().chain(std::iter::once(&fiber)).any(|f| new_field.member(f)) {
            report.flag(2, m, "an earlier fiber became reducible");
        }

        check_vast(enums, &new_field, &assigned, &s.vast, depth, m, &mut report)?;

        for k in 1..=5 {
            if !s.checks.get(k) && !report.has(k, m) {
                report.flag(k, m, "recorded check failed");
            }
        }

        field = new_field;
        fibers.push(fiber);
        points.push(c.clone());
        assigned.push(s.vast.index);
        current = s.vast.clone();
        dims.push(field.dim());
    }

    let n = trace.steps.len();
    match trace.status {
        TraceStatus::Complete if n != params.steps || trace.error.is_some() => {
            report.other("final", n, format!("complete trace has {n} of {} steps", params.steps));
        }
        TraceStatus::Aborted if n >= params.steps || trace.error.is_none() => {
            report.other("final", n, "aborted trace without an error or with every step done");
        }
        _ => {}
    }
    let fin = &trace.final_record;
    if fin.field != field {
        report.other("final", trace.steps.len(), "final field differs from the replayed one");
    }
    if fin.dims != dims {
        report.other("final", trace.steps.len(), "dimension sequence differs");
    }
    if fin.supernatural_degree != degree_of(&fin.field) {
        report.other("final", trace.steps.len(), "degree is not 2^dim");
    }
    Ok(report.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{run, RunParams};
    use num_bigint::BigInt;

    fn codes(v: &[Violation]) -> Vec<&str> {
        v.iter().map(|x| x.code.as_str()).collect()
    }

    #[test]
    fn engine_traces_verify_clean() {
        let t = run(&RunParams { steps: 5, ..RunParams::default() }).unwrap();
        assert_eq!(verify_trace(&t).unwrap(), vec![]);
    }

    #[test]
    fn square_fiber_is_flagged() {
        let mut t = run(&RunParams { steps: 3, ..RunParams::default() }).unwrap();
        // h = x at step 2; 4 makes the fiber split.
        assert_eq!(t.steps[1].cover.h.to_string(), "x");
        t.steps[1].point = BigRational::from_integer(BigInt::from(4));
        let v = verify_trace(&t).unwrap();
        assert!(codes(&v).contains(&"(2_2)"), "{v:?}");
    }

    #[test]
    fn each_condition_has_a_detector() {
        let base = run(&RunParams { steps: 3, ..RunParams::default() }).unwrap();

        let mut t = base.clone();
        t.steps[2].point = t.steps[0].point.clone();
        assert!(codes(&verify_trace(&t).unwrap()).contains(&"(1_3)"));

        let mut t = base.clone();
        t.steps[1].cover.id += 1;
        assert!(codes(&verify_trace(&t).unwrap()).contains(&"(3_2)"));

        let mut t = base.clone();
        t.steps[0].vast.index += 1;
        assert!(codes(&verify_trace(&t).unwrap()).contains(&"(4_1)"));

        let mut t = base.clone();
        t.initial_vast.index = 2;
        assert!(codes(&verify_trace(&t).unwrap()).contains(&"(4_0)"));

        let mut t = base.clone();
        t.steps[1].witness_kernel = SquareClass::of_integer(&BigInt::from(7)).unwrap();
        assert!(codes(&verify_trace(&t).unwrap()).contains(&"(5_2)"));

        let mut t = base;
        t.steps[2].checks.c3 = false;
        assert_eq!(codes(&verify_trace(&t).unwrap()), vec!["(3_3)"]);
    }
}

//! JSON report construction. Rationals are written as `"p/q"` strings and
//! integers as decimal strings, so every value round-trips exactly; object
//! keys are sorted, so identical runs give identical bytes.

use lamicone::arcs::{ArcRealization, RoundTripReport};
use lamicone::builtins::FactOutcome;
use lamicone::limit::{
    CollapseWitness, NoCollapseReason, NotMinimalReason, NotTrivialReason, ProjectiveGauge, Query, TrivialWitness,
};
use lamicone::realization::{OddApproximation, PipelineOutput};
use lamicone::{Certificate, Outcome, Rational, RationalMatrix, Scalar};
use serde_json::{json, Value};

pub fn q(x: &Rational) -> Value {
    Value::String(x.to_string())
}

pub fn qs(xs: &[Rational]) -> Value {
    Value::Array(xs.iter().map(q).collect())
}

pub fn matrix(m: &RationalMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| qs(r)).collect())
}

/// Lossy decimal rendering for human readers; never parsed back.
pub fn approx(x: &Rational) -> Value {
    Value::String(format!("{:.16}", x.to_display_f64()))
}

fn gauge(g: &ProjectiveGauge<Rational>) -> Value {
    json!({
        "cross_ratio": q(&g.cross_ratio),
        "cross_ratio_minus_one": q(&(&g.cross_ratio - Rational::from_integer(1.into()))),
        "log": g.log_value,
    })
}

fn query(query: &Query) -> Value {
    match query {
        Query::BaseExists { horizon } => json!({"check": "base-exists", "horizon": horizon}),
        Query::Directedness { horizon } => json!({"check": "directedness", "horizon": horizon}),
        Query::LimitRay { stage, horizon, tol } => {
            json!({"check": "limit-ray", "stage": stage, "horizon": horizon, "tol": q(tol)})
        }
        Query::TrivialLimit { stage, horizon, tol } => {
            json!({"check": "trivial-limit", "stage": stage, "horizon": horizon, "tol": q(tol)})
        }
        Query::Minimality { stage, horizon } => json!({"check": "minimality", "stage": stage, "horizon": horizon}),
    }
}

fn collapse(w: &CollapseWitness) -> Value {
    let enclosure: Vec<Value> = w.enclosure.iter().map(|(lo, hi)| json!([q(lo), q(hi)])).collect();
    let mut value = json!({
        "collapse_stage": w.collapse_stage,
        "gauge_at_collapse": gauge(&w.gauge_at_collapse),
        "gauge": gauge(&w.gauge),
        "enclosure": enclosure,
        "enclosure_width": q(&w.max_width()),
    });
    // First coordinate over the last one, the quantity quoted for 2-dim stages.
    if let Some((lo, hi)) = w.enclosure.first() {
        value["ray_ratio"] = json!([q(lo), q(hi)]);
        value["ray_ratio_approx"] = approx(lo);
    }
    value
}

fn trivial(w: &TrivialWitness) -> Value {
    json!({
        "max_ratio": q(&w.max_ratio),
        "worst_column": w.worst_column,
        "nonzero_columns": w.nonzero_columns,
        "annihilated_image": qs(&w.annihilated_image),
    })
}

fn outcome(outcome: &Outcome) -> (Value, String) {
    match outcome {
        Outcome::BaseExists => (Value::Null, "no stage matrix below the horizon has a zero column".into()),
        Outcome::BaseCriterionFails { stage, column } => {
            (json!({"stage": stage, "column": column}), format!("column {column} of pi_{stage} is zero"))
        }
        Outcome::Directed => (Value::Null, "no stage matrix below the horizon has a zero row".into()),
        Outcome::NotDirected { stage, row } => {
            (json!({"stage": stage, "row": row}), format!("row {row} of pi_{stage} is zero"))
        }
        Outcome::ProjectiveCollapse(w) => (
            collapse(w),
            match w.enclosure.first() {
                Some((lo, _)) => format!(
                    "images collapse onto one ray from stage {}; ray ratio ~ {:.15}",
                    w.collapse_stage,
                    lo.to_display_f64()
                ),
                None => format!("images collapse onto one ray from stage {}", w.collapse_stage),
            },
        ),
        Outcome::NoCollapse(NoCollapseReason::NeverPositive) => {
            (json!({"reason": "never-positive"}), "the composite never becomes entrywise positive".into())
        }
        Outcome::NoCollapse(NoCollapseReason::GaugeAboveTolerance { gauge: g }) => (
            json!({"reason": "gauge-above-tolerance", "gauge": gauge(g)}),
            format!(
                "gauge at the horizon is {:.6e} above 1",
                (&g.cross_ratio - Rational::from_integer(1.into())).to_display_f64()
            ),
        ),
        Outcome::TrivialLimit(w) => (
            trivial(w),
            format!(
                "every image column lies within ratio {} of the final ray, which the previous map kills",
                w.max_ratio
            ),
        ),
        Outcome::NotTrivial(reason) => match reason {
            NotTrivialReason::NoPrecedingStage => {
                (json!({"reason": "no-preceding-stage"}), "stage 1 has no preceding transition".into())
            }
            NotTrivialReason::ColumnOffFinalFace { column } => (
                json!({"reason": "column-off-final-face", "column": column}),
                format!("column {column} has a zero final coordinate"),
            ),
            NotTrivialReason::ColumnNotCollapsed { column, ratio } => (
                json!({"reason": "column-not-collapsed", "column": column, "ratio": q(ratio)}),
                format!("column {column} has ratio {ratio}"),
            ),
            NotTrivialReason::FaceNotAnnihilated { image } => (
                json!({"reason": "face-not-annihilated", "image": qs(image)}),
                "the previous map does not kill the final ray".into(),
            ),
        },
        Outcome::Minimal { m0 } => (json!({"m0": m0}), format!("entrywise positive from stage {m0} on")),
        Outcome::NotMinimal(NotMinimalReason::NoPositiveComposite) => {
            (json!({"reason": "no-positive-composite"}), "no composite below the horizon is entrywise positive".into())
        }
        Outcome::NotMinimal(NotMinimalReason::ZeroColumnAfter { m0, stage, column }) => (
            json!({"reason": "zero-column-after", "m0": m0, "stage": stage, "column": column}),
            format!("positive at stage {m0}, but pi_{stage} has zero column {column}"),
        ),
    }
}

pub fn certificate(cert: &Certificate) -> Value {
    let (witness, summary) = outcome(&cert.outcome);
    let mut value = json!({
        "kind": cert.kind(),
        "positive": cert.is_positive(),
        "query": query(&cert.query),
        "witness": witness,
        "summary": summary,
    });
    if let Some((stage, row, col)) = cert.non_integer_entry {
        value["non_integer_entry"] = json!({"stage": stage, "row": row, "col": col});
    }
    value
}

pub fn certificate_line(cert: &Certificate) -> String {
    let (_, summary) = outcome(&cert.outcome);
    format!("{:<28} {summary}", cert.kind())
}

fn integers(m: &RationalMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| Value::String(x.to_integer().to_string())).collect()))
            .collect(),
    )
}

pub fn approximation(out: &OddApproximation, eps: &Rational) -> Value {
    json!({
        "K": out.k.to_string(),
        "scale": out.scale().to_string(),
        "matrix": integers(&out.scaled),
        "m_prime": matrix(out.m_prime.matrix()),
        "max_error": q(&out.max_error),
        "epsilon": q(eps),
    })
}

pub fn pipeline(out: &PipelineOutput) -> Value {
    let stages: Vec<Value> = out
        .stages
        .iter()
        .enumerate()
        .map(|(n, s)| {
            json!({
                "stage": n + 1,
                "K": s.approximation.k.to_string(),
                "scale": s.scale.to_string(),
                "matrix": integers(&s.transition),
                "epsilon": q(&s.epsilon),
                "achieved": q(&s.achieved),
                "surjective": s.surjective,
            })
        })
        .collect();
    json!({
        "stages": stages,
        "dims": out.dims(),
        "base_scales": qs(&out.base_scales),
        "warnings": out.warnings,
    })
}

pub fn roundtrip(r: &RoundTripReport) -> Value {
    json!({
        "ok": r.ok(),
        "induced": integers(&r.induced),
        "matches": r.matches,
        "label_counts_match": r.label_counts_match,
        "annulus_noncrossing": r.annulus.ok,
        "first_interleaving": r.annulus.first_interleaving,
        "next_is_path": r.next_is_path,
        "parity_violations": r.parity_violations,
        "every_region_punctured": r.every_region_punctured,
    })
}

pub fn arcs(stage: usize, real: &ArcRealization, check: &RoundTripReport) -> Value {
    let traversal: Vec<Value> = real
        .word
        .arcs
        .iter()
        .map(|passes| {
            Value::Array(
                passes
                    .iter()
                    .map(|p| json!({"edge": p.edge, "sub_edge": p.sub_edge, "position": p.position, "downward": p.downward}))
                    .collect(),
            )
        })
        .collect();
    json!({
        "stage": stage,
        "labels": real.path.all_labels(),
        "sizes": real.path.sizes(),
        "traversal": traversal,
        "annulus_word": real.annulus.labels(),
        "annulus_punctures": real.annulus_punctures,
        "boundary_word": real.next.boundary.labels(),
        "region_punctures": real.next.region_punctures,
        "roundtrip": roundtrip(check),
    })
}

pub fn facts(outcomes: &[FactOutcome]) -> Value {
    Value::Array(
        outcomes.iter().map(|o| json!({"fact": o.description, "passed": o.passed, "detail": o.detail})).collect(),
    )
}

//! Built-in generator families and their checkable facts.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::limit::{self, Outcome, Query, SequenceDegree};
use crate::scalar::{int, ratio, ten_pow_neg};
use crate::system::{InverseConeSystem, Thread, ThreadReport};
use crate::{Rational, RationalMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BuiltinFamily {
    /// `π_n = [I_n | e_n]`.
    Example43,
    /// `π_n = [I_{n+1} | e_1 + e_2]`.
    Example44,
    /// Alternating `[[1,1],[0,1]]` (odd `n`) and `[[1,0],[1,1]]` (even `n`).
    Example45,
    /// `π_n = [I_n | 0]`.
    Nobase46,
    /// `n × (n+1)`, 1 on the diagonal, 2 below it, last column zero.
    ZeroMeasure81,
    /// Stage `n` has coordinates `(x_1..x_n, y_1..y_n)`; see [`nobase82_matrix`].
    Nobase82,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown example {0:?}; expected one of {list}", list = BuiltinFamily::names().join(", "))]
pub struct UnknownExample(pub String);

impl BuiltinFamily {
    pub const ALL: [BuiltinFamily; 6] = [
        BuiltinFamily::Example43,
        BuiltinFamily::Example44,
        BuiltinFamily::Example45,
        BuiltinFamily::Nobase46,
        BuiltinFamily::ZeroMeasure81,
        BuiltinFamily::Nobase82,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinFamily::Example43 => "example-4.3",
            BuiltinFamily::Example44 => "example-4.4",
            BuiltinFamily::Example45 => "example-4.5",
            BuiltinFamily::Nobase46 => "nobase-4.6",
            BuiltinFamily::ZeroMeasure81 => "zero-measure-8.1",
            BuiltinFamily::Nobase82 => "nobase-8.2",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|f| f.name()).collect()
    }

    pub fn from_name(name: &str) -> Result<Self, UnknownExample> {
        Self::ALL.into_iter().find(|f| f.name() == name).ok_or_else(|| UnknownExample(name.to_string()))
    }

    pub fn dim(self, n: usize) -> usize {
        match self {
            BuiltinFamily::Example43 | BuiltinFamily::Nobase46 | BuiltinFamily::ZeroMeasure81 => n,
            BuiltinFamily::Example44 => n + 1,
            BuiltinFamily::Example45 => 2,
            BuiltinFamily::Nobase82 => 2 * n,
        }
    }

    pub fn matrix(self, n: usize) -> RationalMatrix {
        let (rows, cols) = (self.dim(n), self.dim(n + 1));
        let one = || Rational::one();
        let zero = || Rational::zero();
        match self {
            BuiltinFamily::Example43 => {
                RationalMatrix::from_fn(
                    rows,
                    cols,
                    |i, j| if i == j || (i + 1 == rows && j == rows) { one() } else { zero() },
                )
            }
            BuiltinFamily::Example44 => {
                RationalMatrix::from_fn(rows, cols, |i, j| if i == j || (i < 2 && j == rows) { one() } else { zero() })
            }
            BuiltinFamily::Example45 if n % 2 == 1 => RationalMatrix::from_ints(&[[1, 1], [0, 1]]),
            BuiltinFamily::Example45 => RationalMatrix::from_ints(&[[1, 0], [1, 1]]),
            BuiltinFamily::Nobase46 => RationalMatrix::from_fn(rows, cols, |i, j| if i == j { one() } else { zero() }),
            BuiltinFamily::ZeroMeasure81 => RationalMatrix::from_fn(rows, cols, |i, j| match j.cmp(&i) {
                Ordering::Equal => one(),
                Ordering::Less => int(2),
                Ordering::Greater => zero(),
            }),
            BuiltinFamily::Nobase82 => nobase82_matrix(n),
        }
    }

    /// Transition matrices exactly as printed alongside each example,
    /// keyed by stage.
    pub fn displayed_transitions(self) -> Vec<(usize, RationalMatrix)> {
        let m = |rows: &[&[i64]]| RationalMatrix::from_ints(rows);
        match self {
            BuiltinFamily::Example43 => vec![
                (1, m(&[&[1, 1]])),
                (2, m(&[&[1, 0, 0], &[0, 1, 1]])),
                (3, m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 1]])),
                (4, m(&[&[1, 0, 0, 0, 0], &[0, 1, 0, 0, 0], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 1]])),
            ],
            BuiltinFamily::Example44 => vec![
                (1, m(&[&[1, 0, 1], &[0, 1, 1]])),
                (2, m(&[&[1, 0, 0, 1], &[0, 1, 0, 1], &[0, 0, 1, 0]])),
                (3, m(&[&[1, 0, 0, 0, 1], &[0, 1, 0, 0, 1], &[0, 0, 1, 0, 0], &[0, 0, 0, 1, 0]])),
            ],
            BuiltinFamily::Example45 => {
                (1..=6).map(|n| (n, if n % 2 == 1 { m(&[&[1, 1], &[0, 1]]) } else { m(&[&[1, 0], &[1, 1]]) })).collect()
            }
            BuiltinFamily::Nobase46 => vec![
                (1, m(&[&[1, 0]])),
                (2, m(&[&[1, 0, 0], &[0, 1, 0]])),
                (3, m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]])),
            ],
            BuiltinFamily::ZeroMeasure81 => vec![
                (1, m(&[&[1, 0]])),
                (2, m(&[&[1, 0, 0], &[2, 1, 0]])),
                (3, m(&[&[1, 0, 0, 0], &[2, 1, 0, 0], &[2, 2, 1, 0]])),
                (4, m(&[&[1, 0, 0, 0, 0], &[2, 1, 0, 0, 0], &[2, 2, 1, 0, 0], &[2, 2, 2, 1, 0]])),
            ],
            BuiltinFamily::Nobase82 => Vec::new(),
        }
    }

    /// Two-step composites printed alongside the example, as `(n, π_{n,n+2})`.
    pub fn displayed_composites(self) -> Vec<(usize, RationalMatrix)> {
        match self {
            BuiltinFamily::Example45 => (1..=6)
                .map(|n| {
                    let rows: [[i64; 2]; 2] = if n % 2 == 1 { [[2, 1], [1, 1]] } else { [[1, 1], [1, 2]] };
                    (n, RationalMatrix::from_ints(&rows))
                })
                .collect(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for BuiltinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stage `n` carries leaf coordinates `x_1..x_n` followed by closed-curve
/// coordinates `y_1..y_n`. Persisting coordinates map identically, the new
/// leaf coordinate `x_{n+1}` is forgotten, and the new curve `y_{n+1}`
/// crosses each of `x_1..x_n` once.
fn nobase82_matrix(n: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(2 * n, 2 * n + 2);
    for i in 0..n {
        m.set(i, i, Rational::one());
        m.set(n + i, n + 1 + i, Rational::one());
        m.set(i, 2 * n + 1, Rational::one());
    }
    m
}

/// Position of an exact rational relative to the golden ratio `(1+√5)/2`.
pub fn golden_position(x: &Rational) -> Ordering {
    let t = x * int(2) - int(1);
    if t.is_negative() || &t * &t < int(5) {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// `a_j^i`: entry `(j+1, 1)` of `A^i` for the infinite lower-triangular
/// matrix `A` with 1 on the diagonal and 2 below, via an exact power of a
/// large enough truncation.
pub fn triangular_power_column(i: u32, j_max: usize) -> Vec<Rational> {
    let size = j_max + 1;
    let a = RationalMatrix::from_fn(size, size, |r, c| match c.cmp(&r) {
        Ordering::Equal => int(1),
        Ordering::Less => int(2),
        Ordering::Greater => int(0),
    });
    let power = a.pow(i).expect("square");
    power.column(0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExpectedFact {
    DisplayedTransition {
        stage: usize,
        matrix: RationalMatrix,
    },
    DisplayedComposite {
        stage: usize,
        matrix: RationalMatrix,
    },
    Certificate {
        query: Query,
        kind: &'static str,
    },
    /// Certificate kind plus the 1-based `(stage, column)` of the failure.
    BaseFailsAt {
        horizon: usize,
        stage: usize,
        column: usize,
    },
    PullbackVertices {
        stage: usize,
        vertices: Vec<Vec<Rational>>,
    },
    /// Barycentric image of the last stage-`n+1` vertex in stage `n`.
    LastVertexImage {
        stage: usize,
        image: Vec<Rational>,
    },
    /// The collapsed ray's first/last coordinate ratio brackets the golden
    /// ratio with width at most `width`, and `gauge - 1 < width`.
    GoldenRay {
        stage: usize,
        horizon: usize,
        tol: Rational,
        width: Rational,
    },
    Minimal {
        stage: usize,
        horizon: usize,
        m0: usize,
    },
    /// `a_j^i` for `i = 1..=window`, read from `π_{n,n+i}`, matches the
    /// power oracle and has degree `j` in `i`.
    TriangularDegree {
        j: usize,
        window: usize,
    },
    /// `a_1^i / a_2^i` at the given `i`.
    TriangularRatio {
        i: usize,
        value: Rational,
    },
}

impl ExpectedFact {
    pub fn description(&self) -> String {
        match self {
            ExpectedFact::DisplayedTransition { stage, .. } => format!("pi_{stage} matches the displayed matrix"),
            ExpectedFact::DisplayedComposite { stage, .. } => {
                format!("pi_{stage} pi_{} matches the displayed product", stage + 1)
            }
            ExpectedFact::Certificate { query, kind } => format!("{kind} within horizon {}", query.horizon()),
            ExpectedFact::BaseFailsAt { stage, column, .. } => {
                format!("base-criterion-fails at stage {stage}, column {column}")
            }
            ExpectedFact::PullbackVertices { stage, .. } => format!("pulled-back base vertices at stage {stage}"),
            ExpectedFact::LastVertexImage { stage, image } => format!(
                "last stage-{} vertex maps to ({}) at stage {stage}",
                stage + 1,
                join(image)
            ),
            ExpectedFact::GoldenRay { stage, horizon, width, .. } => format!(
                "projective-collapse at stage {stage}, horizon {horizon}: ray ratio brackets (1+sqrt 5)/2 within {width}"
            ),
            ExpectedFact::Minimal { stage, m0, .. } => format!("minimal at stage {stage} with m0 = {m0}"),
            ExpectedFact::TriangularDegree { j, window } => {
                format!("a_{j}^i has degree {j} over i = 1..{window}")
            }
            ExpectedFact::TriangularRatio { i, value } => format!("a_1^{i} / a_2^{i} = {value}"),
        }
    }

    pub fn check(&self, sys: &InverseConeSystem) -> FactOutcome {
        let description = self.description();
        match self.evaluate(sys) {
            Ok(detail) => FactOutcome { description, passed: true, detail },
            Err(detail) => FactOutcome { description, passed: false, detail },
        }
    }

    fn evaluate(&self, sys: &InverseConeSystem) -> Result<String, String> {
        let err = |e: &dyn fmt::Display| e.to_string();
        match self {
            ExpectedFact::DisplayedTransition { stage, matrix } => {
                let got = sys.transition(*stage).map_err(|e| err(&e))?;
                expect_eq(&got, matrix)
            }
            ExpectedFact::DisplayedComposite { stage, matrix } => {
                let got = sys.compose(*stage, stage + 2).map_err(|e| err(&e))?;
                expect_eq(&got, matrix)
            }
            ExpectedFact::Certificate { query, kind } => {
                let cert = limit::run_query(sys, query).map_err(|e| err(&e))?;
                if cert.kind() == *kind {
                    Ok(cert.kind().to_string())
                } else {
                    Err(format!("got {} ({:?})", cert.kind(), cert.outcome))
                }
            }
            ExpectedFact::BaseFailsAt { horizon, stage, column } => {
                let cert = limit::base_exists(sys, *horizon).map_err(|e| err(&e))?;
                match cert.outcome {
                    Outcome::BaseCriterionFails { stage: s, column: c } if s == *stage && c == *column => {
                        Ok(format!("zero column {c} in pi_{s}"))
                    }
                    other => Err(format!("got {other:?}")),
                }
            }
            ExpectedFact::PullbackVertices { stage, vertices } => {
                let base = limit::pullback_base(sys, *stage).map_err(|e| err(&e))?;
                if base.vertices() == *vertices {
                    Ok(format!("functional ({})", join(&base.functional)))
                } else {
                    Err(format!("got {:?}", base.vertices()))
                }
            }
            ExpectedFact::LastVertexImage { stage, image } => {
                let images = limit::vertex_images(sys, *stage, stage + 1).map_err(|e| err(&e))?;
                let last = images.last().ok_or("no vertices")?;
                if last == image {
                    Ok(format!("({})", join(last)))
                } else {
                    Err(format!("got ({})", join(last)))
                }
            }
            ExpectedFact::GoldenRay { stage, horizon, tol, width } => {
                let cert = limit::limit_ray_certificate(sys, *stage, *horizon, tol).map_err(|e| err(&e))?;
                let Outcome::ProjectiveCollapse(w) = &cert.outcome else {
                    return Err(format!("got {}", cert.kind()));
                };
                let (lo, hi) = &w.enclosure[0];
                let brackets = golden_position(lo) == Ordering::Less && golden_position(hi) == Ordering::Greater;
                let gauge_excess = &w.gauge.cross_ratio - int(1);
                let detail = format!(
                    "ratio in [{:.16}, {:.16}], collapse at stage {}, gauge - 1 = {:e}",
                    lo.to_display(),
                    hi.to_display(),
                    w.collapse_stage,
                    gauge_excess.to_display()
                );
                if brackets && hi - lo <= *width && gauge_excess < *width {
                    Ok(detail)
                } else {
                    Err(detail)
                }
            }
            ExpectedFact::Minimal { stage, horizon, m0 } => {
                let cert = limit::minimality_certificate(sys, *stage, *horizon).map_err(|e| err(&e))?;
                match cert.outcome {
                    Outcome::Minimal { m0: got } if got == *m0 => Ok(format!("m0 = {got}")),
                    other => Err(format!("got {other:?}")),
                }
            }
            ExpectedFact::TriangularDegree { j, window } => {
                let from_system = triangular_sequence(sys, *j, *window).map_err(|e| err(&e))?;
                let oracle: Vec<Rational> =
                    (1..=*window as u32).map(|i| triangular_power_column(i, *j)[*j].clone()).collect();
                if from_system != oracle {
                    return Err("system composites disagree with the power oracle".into());
                }
                match limit::polynomial_degree(&from_system).map_err(|e| err(&e))? {
                    SequenceDegree::Exact(d) if d == *j => Ok(format!("values ({})", join(&from_system))),
                    other => Err(format!("got {other:?}")),
                }
            }
            ExpectedFact::TriangularRatio { i, value } => {
                let product = sys.compose(3, 3 + i).map_err(|e| err(&e))?;
                let got = product.get(1, 0) / product.get(2, 0);
                if got == *value {
                    Ok(got.to_string())
                } else {
                    Err(format!("got {got}"))
                }
            }
        }
    }
}

/// `a_j^i` for `i = 1..=window`, read off row `j+1`, column 1 of `π_{n,n+i}`
/// with `n = j + 1`.
pub fn triangular_sequence(
    sys: &InverseConeSystem,
    j: usize,
    window: usize,
) -> Result<Vec<Rational>, crate::system::ConeError> {
    let n = j + 1;
    sys.sweep(n)?.skip(1).take(window).map(|(_, product)| Ok(product.get(j, 0).clone())).collect()
}

trait DisplayF64 {
    fn to_display(&self) -> f64;
}

impl DisplayF64 for Rational {
    fn to_display(&self) -> f64 {
        crate::scalar::Scalar::to_display_f64(self)
    }
}

fn join(values: &[Rational]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn expect_eq(got: &RationalMatrix, want: &RationalMatrix) -> Result<String, String> {
    if got == want {
        Ok(got.to_string())
    } else {
        Err(format!("got {got}, expected {want}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactOutcome {
    pub description: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct BuiltinExample {
    pub family: BuiltinFamily,
    pub system: InverseConeSystem,
    pub expected_facts: Vec<ExpectedFact>,
}

impl BuiltinExample {
    pub fn name(&self) -> &'static str {
        self.family.name()
    }

    pub fn verify(&self) -> Vec<FactOutcome> {
        self.expected_facts.iter().map(|f| f.check(&self.system)).collect()
    }
}

pub fn builtin(name: &str) -> Result<BuiltinExample, UnknownExample> {
    BuiltinFamily::from_name(name).map(example)
}

pub fn example(family: BuiltinFamily) -> BuiltinExample {
    let mut facts: Vec<ExpectedFact> = family
        .displayed_transitions()
        .into_iter()
        .map(|(stage, matrix)| ExpectedFact::DisplayedTransition { stage, matrix })
        .chain(
            family
                .displayed_composites()
                .into_iter()
                .map(|(stage, matrix)| ExpectedFact::DisplayedComposite { stage, matrix }),
        )
        .collect();
    let certificate = |query, kind| ExpectedFact::Certificate { query, kind };
    match family {
        BuiltinFamily::Example43 => {
            facts.push(certificate(Query::BaseExists { horizon: 10 }, "base-exists"));
            facts.push(certificate(Query::Directedness { horizon: 10 }, "directed"));
            facts.push(ExpectedFact::PullbackVertices { stage: 3, vertices: unit_vectors(3) });
        }
        BuiltinFamily::Example44 => {
            facts.push(certificate(Query::BaseExists { horizon: 10 }, "base-exists"));
            facts.push(certificate(Query::Directedness { horizon: 10 }, "directed"));
            for stage in 1..=5 {
                let mut image = vec![Rational::zero(); stage + 1];
                image[0] = ratio(1, 2);
                image[1] = ratio(1, 2);
                facts.push(ExpectedFact::LastVertexImage { stage, image });
            }
        }
        BuiltinFamily::Example45 => {
            facts.push(certificate(Query::BaseExists { horizon: 60 }, "base-exists"));
            facts.push(ExpectedFact::GoldenRay { stage: 1, horizon: 60, tol: ten_pow_neg(12), width: ten_pow_neg(12) });
            facts.push(ExpectedFact::Minimal { stage: 1, horizon: 3, m0: 3 });
            facts.push(ExpectedFact::Minimal { stage: 2, horizon: 20, m0: 4 });
        }
        BuiltinFamily::Nobase46 => {
            facts.push(ExpectedFact::BaseFailsAt { horizon: 10, stage: 1, column: 2 });
            facts.push(certificate(Query::Directedness { horizon: 10 }, "directed"));
            facts.push(certificate(
                Query::LimitRay { stage: 1, horizon: 20, tol: ten_pow_neg(9) },
                "no-collapse-within-horizon",
            ));
        }
        BuiltinFamily::ZeroMeasure81 => {
            facts.push(certificate(Query::Directedness { horizon: 20 }, "directed"));
            facts.push(ExpectedFact::BaseFailsAt { horizon: 10, stage: 1, column: 2 });
            facts.push(certificate(Query::TrivialLimit { stage: 3, horizon: 103, tol: ratio(1, 50) }, "trivial-limit"));
            for j in 1..=3 {
                facts.push(ExpectedFact::TriangularDegree { j, window: 10 });
            }
            facts.push(ExpectedFact::TriangularRatio { i: 100, value: ratio(1, 100) });
        }
        BuiltinFamily::Nobase82 => {
            facts.push(ExpectedFact::BaseFailsAt { horizon: 10, stage: 1, column: 2 });
            facts.push(certificate(Query::Directedness { horizon: 10 }, "directed"));
        }
    }
    BuiltinExample { family, system: InverseConeSystem::builtin(family), expected_facts: facts }
}

fn unit_vectors(d: usize) -> Vec<Vec<Rational>> {
    (0..d).map(|j| (0..d).map(|i| if i == j { int(1) } else { int(0) }).collect()).collect()
}

/// Point of the ℓ¹ model cone, truncated: `x` has one coordinate for
/// `example-4.3` and two for `example-4.4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllOneData {
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThreadDataError {
    #[error("{0} has no ℓ¹ thread model; use example-4.3 or example-4.4")]
    Unsupported(BuiltinFamily),
    #[error("truncation must be at least 1")]
    ZeroTruncation,
    #[error("expected {expected} x-coordinate(s), got {found}")]
    XArity { expected: usize, found: usize },
    #[error("truncation {truncation} needs {needed} y-terms, got {found}")]
    TooFewTerms { truncation: usize, needed: usize, found: usize },
    #[error("x_{index} = {value} is negative")]
    NegativeX { index: usize, value: Rational },
    #[error("y_{index} = {value} is negative")]
    NegativeY { index: usize, value: Rational },
    #[error("partial sum y_1 + ... + y_{index} = {sum} exceeds x_{bound_index} = {bound}")]
    PartialSumExceeds { index: usize, sum: Rational, bound_index: usize, bound: Rational },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadRoundtrip {
    pub thread: Thread,
    pub consistency: ThreadReport,
    pub recovered: EllOneData,
    /// Recovered data equals the input truncated to the `N - 1` y-terms used.
    pub identity: bool,
}

/// Builds the thread of stages `1..=truncation` for a point of the ℓ¹
/// model cone, checks it against the system, and reads the point back.
///
/// `example-4.3`, stage `k`: `(y_1, …, y_{k-1}, x − Σ_{i<k} y_i)`.
/// `example-4.4`, stage `k`: `(x_1 − Σ_{i<k} y_i, x_2 − Σ_{i<k} y_i, y_1, …, y_{k-1})`.
pub fn ell1_thread_roundtrip(
    family: BuiltinFamily,
    data: &EllOneData,
    truncation: usize,
) -> Result<ThreadRoundtrip, ThreadDataError> {
    let x_arity = match family {
        BuiltinFamily::Example43 => 1,
        BuiltinFamily::Example44 => 2,
        other => return Err(ThreadDataError::Unsupported(other)),
    };
    if truncation == 0 {
        return Err(ThreadDataError::ZeroTruncation);
    }
    if data.x.len() != x_arity {
        return Err(ThreadDataError::XArity { expected: x_arity, found: data.x.len() });
    }
    let needed = truncation - 1;
    if data.y.len() < needed {
        return Err(ThreadDataError::TooFewTerms { truncation, needed, found: data.y.len() });
    }
    for (i, x) in data.x.iter().enumerate() {
        if x.is_negative() {
            return Err(ThreadDataError::NegativeX { index: i + 1, value: x.clone() });
        }
    }
    let y = &data.y[..needed];
    let mut partial = Rational::zero();
    let mut partials = vec![Rational::zero()];
    for (i, yi) in y.iter().enumerate() {
        if yi.is_negative() {
            return Err(ThreadDataError::NegativeY { index: i + 1, value: yi.clone() });
        }
        partial += yi;
        for (b, bound) in data.x.iter().enumerate() {
            if partial > *bound {
                return Err(ThreadDataError::PartialSumExceeds {
                    index: i + 1,
                    sum: partial.clone(),
                    bound_index: b + 1,
                    bound: bound.clone(),
                });
            }
        }
        partials.push(partial.clone());
    }

    let stages: Vec<Vec<Rational>> = (1..=truncation)
        .map(|k| {
            let spent = &partials[k - 1];
            let ys = y[..k - 1].iter().cloned();
            match family {
                BuiltinFamily::Example43 => ys.chain(std::iter::once(&data.x[0] - spent)).collect(),
                _ => data.x.iter().map(|x| x - spent).chain(ys).collect(),
            }
        })
        .collect();
    let thread = Thread::new(stages);
    let consistency =
        InverseConeSystem::builtin(family).check_thread(&thread).expect("builtin thread has builtin dimensions");

    let last = thread.stages.last().expect("truncation ≥ 1");
    let recovered = match family {
        BuiltinFamily::Example43 => EllOneData { x: thread.stages[0].clone(), y: last[..needed].to_vec() },
        _ => EllOneData { x: thread.stages[0].clone(), y: last[2..].to_vec() },
    };
    let identity = recovered.x == data.x && recovered.y == y;
    Ok(ThreadRoundtrip { thread, consistency, recovered, identity })
}

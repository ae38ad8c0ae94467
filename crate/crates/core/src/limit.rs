//! Finite-horizon analysis of inverse cone systems.
//!
//! Every routine here inspects finitely many stages and returns a
//! [`Certificate`] recording both the query that was run and its outcome,
//! so a certificate can be re-derived from the system alone with
//! [`Certificate::recheck`]. Decisions are made on exact rationals; the
//! only floating-point value is [`ProjectiveGauge::log_value`], which is
//! for display.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::system::{ConeError, InverseConeSystem};
use crate::{Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LimitError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("base criterion fails: column {column} of the stage-1..{stage} composite is zero")]
    BaseCriterion { stage: usize, column: usize },
    #[error("stage range {from}..{to} is invalid")]
    InvalidRange { from: usize, to: usize },
    #[error("horizon must be at least {minimum}, got {horizon}")]
    HorizonTooSmall { horizon: usize, minimum: usize },
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error("sequence of length {len} is too short; at least 3 terms are needed")]
    WindowTooShort { len: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaugeError {
    #[error("no points supplied")]
    Empty,
    #[error("point {index} has length {found}, expected {expected}")]
    LengthMismatch { index: usize, expected: usize, found: usize },
    #[error("point {index} has a non-positive coordinate at position {position}")]
    NotPositive { index: usize, position: usize },
}

/// Exponentiated Hilbert-metric diameter of a finite set of positive vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveGauge<T> {
    /// `max_{u,v} (max_i u_i/v_i)(max_i v_i/u_i)`, at least 1.
    pub cross_ratio: T,
    /// `ln(cross_ratio)`, display only.
    pub log_value: f64,
}

impl<T: Scalar> ProjectiveGauge<T> {
    pub fn is_single_ray(&self) -> bool {
        self.cross_ratio == T::one()
    }
}

/// Hilbert projective diameter of `points`, computed exactly.
///
/// The pairwise maximum is evaluated coordinate-pair-wise: for each ordered
/// pair `(i, j)` the set's spread is `max_c (c_i/c_j) / min_c (c_i/c_j)`.
/// That costs `O(d² k)` instead of `O(k² d)` for `k` points in dimension `d`.
pub fn projective_gauge<T: Scalar>(points: &[Vec<T>]) -> Result<ProjectiveGauge<T>, GaugeError> {
    let first = points.first().ok_or(GaugeError::Empty)?;
    let dim = first.len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(GaugeError::LengthMismatch { index, expected: dim, found: p.len() });
        }
        if let Some(position) = p.iter().position(|x| !x.is_positive_strict()) {
            return Err(GaugeError::NotPositive { index, position });
        }
    }
    if dim == 0 {
        return Err(GaugeError::Empty);
    }
    let mut cross = T::one();
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut ratios = points.iter().map(|p| p[i].clone() / p[j].clone());
            let seed = ratios.next().expect("non-empty");
            let (lo, hi) = ratios.fold((seed.clone(), seed), |(lo, hi), r| {
                let lo = if r < lo { r.clone() } else { lo };
                let hi = if r > hi { r } else { hi };
                (lo, hi)
            });
            let spread = hi / lo;
            if spread > cross {
                cross = spread;
            }
        }
    }
    let log_value = (cross.clone() - T::one()).to_display_f64().ln_1p();
    Ok(ProjectiveGauge { cross_ratio: cross, log_value })
}

/// A base of the stage-`n` cone, pulled back from the standard simplex of
/// stage 1: vertex `j` is `e_j / s_j` where `s_j` is the `j`-th column sum of
/// `π_{1n}`, and the base is cut out by `Σ_j s_j w_j = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexStage {
    pub stage: usize,
    pub functional: Vec<Rational>,
}

impl SimplexStage {
    pub fn dim(&self) -> usize {
        self.functional.len()
    }

    /// Scale of vertex `j`, i.e. `1 / s_j`.
    pub fn vertex_scale(&self, j: usize) -> Rational {
        self.functional[j].recip()
    }

    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        (0..self.dim())
            .map(|j| {
                let mut v = vec![Rational::zero(); self.dim()];
                v[j] = self.vertex_scale(j);
                v
            })
            .collect()
    }

    /// Value of the cutting functional; 1 exactly on the base.
    pub fn evaluate(&self, w: &[Rational]) -> Rational {
        self.functional.iter().zip(w).map(|(s, x)| s * x).sum()
    }
}

pub fn pullback_base(sys: &InverseConeSystem, n: usize) -> Result<SimplexStage, LimitError> {
    let composite = sys.compose(1, n)?;
    let sums = composite.column_sums();
    if let Some(j) = sums.iter().position(Zero::is_zero) {
        return Err(LimitError::BaseCriterion { stage: n, column: j + 1 });
    }
    Ok(SimplexStage { stage: n, functional: sums })
}

/// Images of the stage-`m` base vertices under `π_{nm}`, in barycentric
/// coordinates with respect to the stage-`n` base vertices.
pub fn vertex_images(sys: &InverseConeSystem, n: usize, m: usize) -> Result<Vec<Vec<Rational>>, LimitError> {
    if n == 0 || n > m {
        return Err(LimitError::InvalidRange { from: n, to: m });
    }
    let lower = pullback_base(sys, n)?;
    let upper = pullback_base(sys, m)?;
    let map = sys.compose(n, m)?;
    Ok((0..map.cols())
        .map(|j| (0..map.rows()).map(|i| map.get(i, j) * &lower.functional[i] / &upper.functional[j]).collect())
        .collect())
}

/// Which finite computation a certificate came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    BaseExists { horizon: usize },
    Directedness { horizon: usize },
    LimitRay { stage: usize, horizon: usize, tol: Rational },
    TrivialLimit { stage: usize, horizon: usize, tol: Rational },
    Minimality { stage: usize, horizon: usize },
}

impl Query {
    pub fn horizon(&self) -> usize {
        match self {
            Query::BaseExists { horizon }
            | Query::Directedness { horizon }
            | Query::LimitRay { horizon, .. }
            | Query::TrivialLimit { horizon, .. }
            | Query::Minimality { horizon, .. } => *horizon,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseWitness {
    /// First `m` at which `π_{nm}` is entrywise positive with gauge below `1 + tol`.
    pub collapse_stage: usize,
    pub gauge_at_collapse: ProjectiveGauge<Rational>,
    /// Gauge of the surviving columns of `π_{n,horizon}`.
    pub gauge: ProjectiveGauge<Rational>,
    /// Coordinatewise `[min, max]` of the surviving columns of
    /// `π_{n,horizon}`, each normalised so its last coordinate is 1.
    pub enclosure: Vec<(Rational, Rational)>,
}

impl CollapseWitness {
    pub fn max_width(&self) -> Rational {
        self.enclosure.iter().map(|(lo, hi)| hi - lo).fold(Rational::zero(), |a, b| if b > a { b } else { a })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoCollapseReason {
    /// `π_{nm}` never became entrywise positive for `m ≤ horizon`.
    NeverPositive,
    /// Positive, but the gauge at the horizon is still at least `1 + tol`.
    GaugeAboveTolerance { gauge: ProjectiveGauge<Rational> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrivialWitness {
    /// Largest `(max non-final coordinate) / (final coordinate)` over the
    /// nonzero columns of `π_{n,horizon}`; zero when every column is zero.
    pub max_ratio: Rational,
    /// 1-based column attaining `max_ratio`.
    pub worst_column: Option<usize>,
    pub nonzero_columns: usize,
    /// `π_{n-1} e_last`, which is the zero vector.
    pub annihilated_image: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotTrivialReason {
    /// Stage 1 has no preceding transition to annihilate its surviving face.
    NoPrecedingStage,
    /// A nonzero column has a zero final coordinate.
    ColumnOffFinalFace {
        column: usize,
    },
    ColumnNotCollapsed {
        column: usize,
        ratio: Rational,
    },
    FaceNotAnnihilated {
        image: Vec<Rational>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotMinimalReason {
    NoPositiveComposite,
    /// `π_{n,m0}` is positive but stage `stage` has a zero column before the horizon.
    ZeroColumnAfter {
        m0: usize,
        stage: usize,
        column: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    BaseExists,
    BaseCriterionFails { stage: usize, column: usize },
    Directed,
    NotDirected { stage: usize, row: usize },
    ProjectiveCollapse(CollapseWitness),
    NoCollapse(NoCollapseReason),
    TrivialLimit(TrivialWitness),
    NotTrivial(NotTrivialReason),
    Minimal { m0: usize },
    NotMinimal(NotMinimalReason),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub query: Query,
    pub outcome: Outcome,
    /// First stage entry that is not an integer, if any were seen; arc
    /// traversal semantics expect integers, the check runs regardless.
    pub non_integer_entry: Option<(usize, usize, usize)>,
}

impl Certificate {
    fn new(query: Query, outcome: Outcome) -> Self {
        Self { query, outcome, non_integer_entry: None }
    }

    pub fn kind(&self) -> &'static str {
        match &self.outcome {
            Outcome::BaseExists => "base-exists",
            Outcome::BaseCriterionFails { .. } => "base-criterion-fails",
            Outcome::Directed => "directed",
            Outcome::NotDirected { .. } => "not-directed",
            Outcome::ProjectiveCollapse(_) => "projective-collapse",
            Outcome::NoCollapse(_) => "no-collapse-within-horizon",
            Outcome::TrivialLimit(_) => "trivial-limit",
            Outcome::NotTrivial(_) => "not-trivial-within-horizon",
            Outcome::Minimal { .. } => "minimal",
            Outcome::NotMinimal(_) => "not-certified-within-horizon",
        }
    }

    /// Whether the certificate asserts the property it was asked about.
    pub fn is_positive(&self) -> bool {
        matches!(
            self.outcome,
            Outcome::BaseExists
                | Outcome::Directed
                | Outcome::ProjectiveCollapse(_)
                | Outcome::TrivialLimit(_)
                | Outcome::Minimal { .. }
        )
    }

    /// Re-runs the recorded query and compares.
    pub fn recheck(&self, sys: &InverseConeSystem) -> Result<bool, LimitError> {
        Ok(run_query(sys, &self.query)? == *self)
    }
}

pub fn run_query(sys: &InverseConeSystem, query: &Query) -> Result<Certificate, LimitError> {
    match query {
        Query::BaseExists { horizon } => base_exists(sys, *horizon),
        Query::Directedness { horizon } => directedness_check(sys, *horizon),
        Query::LimitRay { stage, horizon, tol } => limit_ray_certificate(sys, *stage, *horizon, tol),
        Query::TrivialLimit { stage, horizon, tol } => trivial_limit_certificate(sys, *stage, *horizon, tol),
        Query::Minimality { stage, horizon } => minimality_certificate(sys, *stage, *horizon),
    }
}

fn clamp_horizon(sys: &InverseConeSystem, horizon: usize) -> usize {
    sys.last_stage().map_or(horizon, |last| horizon.min(last))
}

fn first_non_integer(sys: &InverseConeSystem, horizon: usize) -> Result<Option<(usize, usize, usize)>, LimitError> {
    for n in 1..horizon {
        let m = sys.transition(n)?;
        for i in 0..m.rows() {
            if let Some(j) = m.row(i).iter().position(|x| !x.is_integer()) {
                return Ok(Some((n, i + 1, j + 1)));
            }
        }
    }
    Ok(None)
}

/// A base exists (pulled back from stage 1) through `horizon` iff no
/// `π_n`, `n < horizon`, has a zero column. For nonnegative maps a zero
/// column is exactly a nonzero cone vector sent to 0.
pub fn base_exists(sys: &InverseConeSystem, horizon: usize) -> Result<Certificate, LimitError> {
    if horizon < 2 {
        return Err(LimitError::HorizonTooSmall { horizon, minimum: 2 });
    }
    let horizon = clamp_horizon(sys, horizon);
    let query = Query::BaseExists { horizon };
    for n in 1..horizon {
        if let Some(j) = sys.transition(n)?.first_zero_column() {
            return Ok(Certificate::new(query, Outcome::BaseCriterionFails { stage: n, column: j + 1 }));
        }
    }
    Ok(Certificate::new(query, Outcome::BaseExists))
}

/// Every arc class at stage `n` is traversed by some class at stage `n+1`,
/// i.e. no `π_n` below the horizon has a zero row.
pub fn directedness_check(sys: &InverseConeSystem, horizon: usize) -> Result<Certificate, LimitError> {
    let horizon = clamp_horizon(sys, horizon);
    let query = Query::Directedness { horizon };
    let non_integer = first_non_integer(sys, horizon)?;
    let mut outcome = Outcome::Directed;
    for n in 1..horizon {
        if let Some(i) = sys.transition(n)?.first_zero_row() {
            outcome = Outcome::NotDirected { stage: n, row: i + 1 };
            break;
        }
    }
    Ok(Certificate { query, outcome, non_integer_entry: non_integer })
}

fn surviving_columns(m: &RationalMatrix) -> Vec<Vec<Rational>> {
    m.columns().into_iter().filter(|c| c.iter().any(|x| !x.is_zero())).collect()
}

fn normalised_enclosure(columns: &[Vec<Rational>]) -> Vec<(Rational, Rational)> {
    let dim = columns[0].len();
    (0..dim)
        .map(|i| {
            let mut ratios = columns.iter().map(|c| &c[i] / &c[dim - 1]);
            let seed = ratios.next().expect("non-empty");
            ratios.fold((seed.clone(), seed), |(lo, hi), r| {
                let lo = if r < lo { r.clone() } else { lo };
                let hi = if r > hi { r } else { hi };
                (lo, hi)
            })
        })
        .collect()
}

/// Looks for projective collapse of the images `π_{nm}(C_m)` onto a single
/// ray. Collapse is declared at the first `n < m ≤ horizon` where `π_{nm}` is
/// entrywise positive with gauge `< 1 + tol`; the enclosure and gauge are
/// then reported at the horizon, where they are tightest.
pub fn limit_ray_certificate(
    sys: &InverseConeSystem,
    n: usize,
    horizon: usize,
    tol: &Rational,
) -> Result<Certificate, LimitError> {
    if !tol.is_positive() {
        return Err(LimitError::NonPositiveTolerance);
    }
    if n == 0 || horizon < n {
        return Err(LimitError::InvalidRange { from: n, to: horizon });
    }
    let horizon = clamp_horizon(sys, horizon);
    let query = Query::LimitRay { stage: n, horizon, tol: tol.clone() };
    let threshold = Rational::one() + tol;
    let mut collapse: Option<(usize, ProjectiveGauge<Rational>)> = None;
    let mut ever_positive = false;
    let mut last = None;
    for (m, product) in sys.sweep(n)?.take_while(|(m, _)| *m <= horizon) {
        if collapse.is_none() && m > n && product.is_entrywise_positive() {
            ever_positive = true;
            let gauge = projective_gauge(&product.columns())?;
            if gauge.cross_ratio < threshold {
                collapse = Some((m, gauge));
            }
        }
        last = Some(product);
    }
    let last = last.expect("sweep yields stage n");
    let outcome = match collapse {
        Some((collapse_stage, gauge_at_collapse)) => {
            let columns = surviving_columns(&last);
            let gauge = projective_gauge(&columns)?;
            Outcome::ProjectiveCollapse(CollapseWitness {
                collapse_stage,
                gauge_at_collapse,
                gauge,
                enclosure: normalised_enclosure(&columns),
            })
        }
        None if ever_positive => {
            let gauge = projective_gauge(&surviving_columns(&last))?;
            Outcome::NoCollapse(NoCollapseReason::GaugeAboveTolerance { gauge })
        }
        None => Outcome::NoCollapse(NoCollapseReason::NeverPositive),
    };
    Ok(Certificate::new(query, outcome))
}

/// Certifies that the stage-`n` image cone has collapsed onto its final
/// coordinate ray by the horizon and that `π_{n-1}` kills that ray.
pub fn trivial_limit_certificate(
    sys: &InverseConeSystem,
    n: usize,
    horizon: usize,
    tol: &Rational,
) -> Result<Certificate, LimitError> {
    if !tol.is_positive() {
        return Err(LimitError::NonPositiveTolerance);
    }
    if n == 0 || horizon < n {
        return Err(LimitError::InvalidRange { from: n, to: horizon });
    }
    let horizon = clamp_horizon(sys, horizon);
    let query = Query::TrivialLimit { stage: n, horizon, tol: tol.clone() };
    let not_trivial = |reason| Ok(Certificate::new(query.clone(), Outcome::NotTrivial(reason)));
    if n == 1 {
        return not_trivial(NotTrivialReason::NoPrecedingStage);
    }
    let product = sys.compose(n, horizon)?;
    let last = product.rows() - 1;
    let mut max_ratio = Rational::zero();
    let mut worst_column = None;
    let mut nonzero_columns = 0;
    for (j, column) in product.columns().into_iter().enumerate() {
        if column.iter().all(Zero::is_zero) {
            continue;
        }
        nonzero_columns += 1;
        let final_coord = &column[last];
        if final_coord.is_zero() {
            return not_trivial(NotTrivialReason::ColumnOffFinalFace { column: j + 1 });
        }
        let head = column[..last].iter().cloned().fold(Rational::zero(), |a, b| if b > a { b } else { a });
        let ratio = head / final_coord;
        if ratio >= *tol {
            return not_trivial(NotTrivialReason::ColumnNotCollapsed { column: j + 1, ratio });
        }
        if worst_column.is_none() || ratio > max_ratio {
            max_ratio = ratio;
            worst_column = Some(j + 1);
        }
    }
    let previous = sys.transition(n - 1)?;
    let image = previous.column(previous.cols() - 1);
    if image.iter().any(|x| !x.is_zero()) {
        return not_trivial(NotTrivialReason::FaceNotAnnihilated { image });
    }
    Ok(Certificate::new(
        query,
        Outcome::TrivialLimit(TrivialWitness { max_ratio, worst_column, nonzero_columns, annihilated_image: image }),
    ))
}

/// Finds the least `m0 > n` with `π_{n,m0}` entrywise positive (every
/// stage-`m0` arc traverses every stage-`n` arc) and checks that no later
/// stage below the horizon has a zero column, so positivity persists.
pub fn minimality_certificate(sys: &InverseConeSystem, n: usize, horizon: usize) -> Result<Certificate, LimitError> {
    if n == 0 || horizon < n {
        return Err(LimitError::InvalidRange { from: n, to: horizon });
    }
    let horizon = clamp_horizon(sys, horizon);
    let query = Query::Minimality { stage: n, horizon };
    let non_integer = first_non_integer(sys, horizon)?;
    let m0 = sys
        .sweep(n)?
        .take_while(|(m, _)| *m <= horizon)
        .find(|(m, product)| *m > n && product.is_entrywise_positive())
        .map(|(m, _)| m);
    let outcome = match m0 {
        None => Outcome::NotMinimal(NotMinimalReason::NoPositiveComposite),
        Some(m0) => {
            let mut outcome = Outcome::Minimal { m0 };
            for stage in m0..horizon {
                if let Some(j) = sys.transition(stage)?.first_zero_column() {
                    outcome = Outcome::NotMinimal(NotMinimalReason::ZeroColumnAfter { m0, stage, column: j + 1 });
                    break;
                }
            }
            outcome
        }
    };
    Ok(Certificate { query, outcome, non_integer_entry: non_integer })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceDegree {
    /// The `d`-th differences are a nonzero constant and the next vanish.
    Exact(usize),
    /// Every term is zero.
    IdenticallyZero,
    /// Differences never vanish inside the window.
    NotPolynomialWithinWindow,
}

/// Degree of a sequence sampled at consecutive integers, by exact finite
/// differences. Degree `d` is only confirmed when the window has at least
/// `d + 2` terms, so that a vanishing `(d+1)`-th difference is observed.
pub fn polynomial_degree<T: Scalar>(seq: &[T]) -> Result<SequenceDegree, LimitError> {
    if seq.len() < 3 {
        return Err(LimitError::WindowTooShort { len: seq.len() });
    }
    if seq.iter().all(Zero::is_zero) {
        return Ok(SequenceDegree::IdenticallyZero);
    }
    let mut current: Vec<T> = seq.to_vec();
    let mut order = 0;
    while current.len() >= 2 {
        let next: Vec<T> = current.windows(2).map(|w| w[1].clone() - w[0].clone()).collect();
        if next.iter().all(Zero::is_zero) {
            return Ok(SequenceDegree::Exact(order));
        }
        current = next;
        order += 1;
    }
    Ok(SequenceDegree::NotPolynomialWithinWindow)
}

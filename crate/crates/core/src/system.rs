//! Inverse systems of orthant cones `R_+^{d_1} <- R_+^{d_2} <- ...`.
//!
//! Stage `n` carries the matrix mapping stage-`n+1` weights to stage-`n`
//! weights (shape `d_n × d_{n+1}`). A system is an explicit prefix of such
//! matrices, optionally continued by a deterministic [`StageRule`], so that
//! infinite families can be sampled to any horizon.

use num_traits::Signed;
use thiserror::Error;

use crate::builtins::BuiltinFamily;
use crate::matrix::MatrixError;
use crate::{Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("system has no stage matrices and no generator")]
    EmptySystem,
    #[error("expected {expected} stage dimensions for {matrices} matrices, found {found}")]
    DimsLength { matrices: usize, expected: usize, found: usize },
    #[error(
        "shape mismatch at stage {stage}: expected {expected_rows}x{expected_cols}, found {found_rows}x{found_cols}"
    )]
    ShapeMismatch { stage: usize, expected_rows: usize, expected_cols: usize, found_rows: usize, found_cols: usize },
    #[error("negative entry at stage {stage}, row {row}, column {col}")]
    NegativeEntry { stage: usize, row: usize, col: usize },
    #[error("periodic generator needs at least one matrix")]
    EmptyCycle,
    #[error("stage index must be at least 1")]
    ZeroStage,
    #[error("stage {stage} lies beyond the explicit prefix (last stage matrix is {last}) and no generator is set")]
    BeyondPrefix { stage: usize, last: usize },
    #[error("invalid stage range: {from} > {to}")]
    InvalidRange { from: usize, to: usize },
    #[error("thread stage {stage} has length {found}, expected {expected}")]
    ThreadShape { stage: usize, expected: usize, found: usize },
    #[error("thread stage {stage} has a negative coordinate at position {position}")]
    NegativeThreadEntry { stage: usize, position: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Deterministic continuation of a system beyond its explicit prefix.
/// Stage indices passed to a rule are absolute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageRule {
    /// `π_n = cycle[(n - 1) mod len]`.
    Periodic(Vec<RationalMatrix>),
    /// One of the built-in families.
    Builtin(BuiltinFamily),
    /// Lower-triangular family: `π_n` is `n × (n+1)`, ones on the diagonal,
    /// twos below it, and a zero final column.
    TriangularShift,
}

impl StageRule {
    pub fn dim(&self, n: usize) -> usize {
        match self {
            StageRule::Periodic(cycle) => {
                let len = cycle.len();
                cycle[(n - 1) % len].rows()
            }
            StageRule::Builtin(family) => family.dim(n),
            StageRule::TriangularShift => BuiltinFamily::ZeroMeasure81.dim(n),
        }
    }

    pub fn matrix(&self, n: usize) -> RationalMatrix {
        match self {
            StageRule::Periodic(cycle) => cycle[(n - 1) % cycle.len()].clone(),
            StageRule::Builtin(family) => family.matrix(n),
            StageRule::TriangularShift => BuiltinFamily::ZeroMeasure81.matrix(n),
        }
    }

    fn validate(&self) -> Result<(), ConeError> {
        if let StageRule::Periodic(cycle) = self {
            if cycle.is_empty() {
                return Err(ConeError::EmptyCycle);
            }
            for (k, m) in cycle.iter().enumerate() {
                if let Some((row, col)) = m.first_negative() {
                    return Err(ConeError::NegativeEntry { stage: k + 1, row: row + 1, col: col + 1 });
                }
                let next = &cycle[(k + 1) % cycle.len()];
                if m.cols() != next.rows() {
                    return Err(ConeError::ShapeMismatch {
                        stage: k + 2,
                        expected_rows: m.cols(),
                        expected_cols: next.cols(),
                        found_rows: next.rows(),
                        found_cols: next.cols(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Unvalidated system description as read from external input.
#[derive(Debug, Clone, Default)]
pub struct SystemSpec {
    pub dims: Vec<usize>,
    pub matrices: Vec<RationalMatrix>,
    pub rule: Option<StageRule>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseConeSystem {
    prefix: Vec<RationalMatrix>,
    rule: Option<StageRule>,
}

/// Checks shapes and signs of a raw description and builds the system.
pub fn validate_system(spec: SystemSpec) -> Result<InverseConeSystem, ConeError> {
    let SystemSpec { dims, matrices, rule } = spec;
    if matrices.is_empty() && rule.is_none() {
        return Err(ConeError::EmptySystem);
    }
    if let Some(rule) = &rule {
        rule.validate()?;
    }
    if !matrices.is_empty() && dims.len() != matrices.len() + 1 {
        return Err(ConeError::DimsLength {
            matrices: matrices.len(),
            expected: matrices.len() + 1,
            found: dims.len(),
        });
    }
    if matrices.is_empty() && dims.len() > 1 {
        return Err(ConeError::DimsLength { matrices: 0, expected: 1, found: dims.len() });
    }
    for (k, m) in matrices.iter().enumerate() {
        let stage = k + 1;
        if m.shape() != (dims[k], dims[k + 1]) {
            return Err(ConeError::ShapeMismatch {
                stage,
                expected_rows: dims[k],
                expected_cols: dims[k + 1],
                found_rows: m.rows(),
                found_cols: m.cols(),
            });
        }
        if let Some((row, col)) = m.first_negative() {
            return Err(ConeError::NegativeEntry { stage, row: row + 1, col: col + 1 });
        }
    }
    if let Some(rule) = &rule {
        let junction = matrices.len() + 1;
        let expected = match matrices.last() {
            Some(m) => m.cols(),
            None => dims.first().copied().unwrap_or_else(|| rule.dim(1)),
        };
        let generated = rule.matrix(junction);
        if generated.rows() != expected {
            return Err(ConeError::ShapeMismatch {
                stage: junction,
                expected_rows: expected,
                expected_cols: generated.cols(),
                found_rows: generated.rows(),
                found_cols: generated.cols(),
            });
        }
    }
    Ok(InverseConeSystem { prefix: matrices, rule })
}

impl InverseConeSystem {
    pub fn explicit(dims: Vec<usize>, matrices: Vec<RationalMatrix>) -> Result<Self, ConeError> {
        validate_system(SystemSpec { dims, matrices, rule: None })
    }

    pub fn generated(rule: StageRule) -> Result<Self, ConeError> {
        validate_system(SystemSpec { rule: Some(rule), ..SystemSpec::default() })
    }

    pub fn builtin(family: BuiltinFamily) -> Self {
        Self { prefix: Vec::new(), rule: Some(StageRule::Builtin(family)) }
    }

    pub fn prefix(&self) -> &[RationalMatrix] {
        &self.prefix
    }

    pub fn rule(&self) -> Option<&StageRule> {
        self.rule.as_ref()
    }

    /// Last stage index with a known cone, or `None` for generated systems.
    pub fn last_stage(&self) -> Option<usize> {
        match self.rule {
            Some(_) => None,
            None => Some(self.prefix.len() + 1),
        }
    }

    /// Whether stage `n` exists.
    pub fn has_stage(&self, n: usize) -> bool {
        n >= 1 && self.last_stage().is_none_or(|last| n <= last)
    }

    /// Dimension `d_n` of the stage-`n` cone.
    pub fn dim(&self, n: usize) -> Option<usize> {
        if !self.has_stage(n) {
            return None;
        }
        if n <= self.prefix.len() {
            return Some(self.prefix[n - 1].rows());
        }
        if n == self.prefix.len() + 1 {
            if let Some(last) = self.prefix.last() {
                return Some(last.cols());
            }
        }
        self.rule.as_ref().map(|r| r.dim(n))
    }

    /// The stage-`n` transition matrix `π_n` (`d_n × d_{n+1}`).
    pub fn transition(&self, n: usize) -> Result<RationalMatrix, ConeError> {
        if n == 0 {
            return Err(ConeError::ZeroStage);
        }
        if n <= self.prefix.len() {
            return Ok(self.prefix[n - 1].clone());
        }
        match &self.rule {
            Some(rule) => Ok(rule.matrix(n)),
            None => Err(ConeError::BeyondPrefix { stage: n, last: self.prefix.len() }),
        }
    }

    /// `π_{nm} = π_n · π_{n+1} ⋯ π_{m-1}`, the identity when `n = m`.
    pub fn compose(&self, n: usize, m: usize) -> Result<RationalMatrix, ConeError> {
        if n == 0 {
            return Err(ConeError::ZeroStage);
        }
        if n > m {
            return Err(ConeError::InvalidRange { from: n, to: m });
        }
        let mut sweep = self.sweep(n)?;
        loop {
            match sweep.next() {
                Some((stage, product)) if stage == m => return Ok(product),
                Some(_) => {}
                None => {
                    return Err(ConeError::BeyondPrefix { stage: m - 1, last: self.prefix.len() });
                }
            }
        }
    }

    /// Incremental products `(m, π_{nm})` for `m = n, n+1, ...`; each step
    /// costs one matrix multiplication. Ends when the system runs out of stages.
    pub fn sweep(&self, n: usize) -> Result<ComposeSweep<'_>, ConeError> {
        let dim = self.dim(n).ok_or(if n == 0 {
            ConeError::ZeroStage
        } else {
            ConeError::BeyondPrefix { stage: n, last: self.prefix.len() }
        })?;
        Ok(ComposeSweep { system: self, next_stage: n, current: Some(RationalMatrix::identity(dim)) })
    }

    /// Checks `π_n(w_{n+1}) = w_n` along a finite thread.
    pub fn check_thread(&self, thread: &Thread) -> Result<ThreadReport, ConeError> {
        for (k, w) in thread.stages.iter().enumerate() {
            let stage = k + 1;
            let expected = self.dim(stage).ok_or(ConeError::BeyondPrefix { stage, last: self.prefix.len() })?;
            if w.len() != expected {
                return Err(ConeError::ThreadShape { stage, expected, found: w.len() });
            }
            if let Some(position) = w.iter().position(Signed::is_negative) {
                return Err(ConeError::NegativeThreadEntry { stage, position: position + 1 });
            }
        }
        for (k, pair) in thread.stages.windows(2).enumerate() {
            let stage = k + 1;
            let image = self.transition(stage)?.apply(&pair[1])?;
            if image != pair[0] {
                return Ok(ThreadReport {
                    consistent: false,
                    first_failure: Some(ThreadFailure { stage, image, recorded: pair[0].clone() }),
                });
            }
        }
        Ok(ThreadReport { consistent: true, first_failure: None })
    }
}

/// Iterator returned by [`InverseConeSystem::sweep`].
pub struct ComposeSweep<'a> {
    system: &'a InverseConeSystem,
    next_stage: usize,
    current: Option<RationalMatrix>,
}

impl Iterator for ComposeSweep<'_> {
    type Item = (usize, RationalMatrix);

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.current.take()?;
        let stage = self.next_stage;
        if self.system.has_stage(stage + 1) {
            if let Ok(step) = self.system.transition(stage) {
                self.current = current.mul(&step).ok();
                self.next_stage += 1;
            }
        }
        Some((stage, current))
    }
}

/// Finite truncation `(w_1, ..., w_N)` of an element of the inverse limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Thread {
    pub stages: Vec<Vec<Rational>>,
}

impl Thread {
    pub fn new(stages: Vec<Vec<Rational>>) -> Self {
        Self { stages }
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadFailure {
    /// Stage `n` at which `π_n(w_{n+1}) ≠ w_n`.
    pub stage: usize,
    pub image: Vec<Rational>,
    pub recorded: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadReport {
    pub consistent: bool,
    pub first_failure: Option<ThreadFailure>,
}

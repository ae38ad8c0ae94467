//! Odd-integer approximation of column-stochastic matrices and the
//! pipeline turning a system of simplices into a cone system whose
//! transitions are positive odd integer matrices.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::system::{ConeError, InverseConeSystem};
use crate::{Integer, Rational, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizationError {
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("entry ({row}, {col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("column {col} sums to {sum}, not 1")]
    ColumnSum { col: usize, sum: Rational },
    #[error("shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("stage {stage} has {found} rows but stage {previous} has {expected} columns")]
    BrokenChain { stage: usize, previous: usize, expected: usize, found: usize },
    #[error("system has no stages")]
    EmptySystem,
    #[error("schedule has {found} epsilons for {needed} stages")]
    ShortSchedule { needed: usize, found: usize },
    #[error("adjusted largest entry {value} in column {col} is not an odd integer at least {floor}")]
    ParityBreach { col: usize, value: Rational, floor: Rational },
    #[error(transparent)]
    Cone(#[from] ConeError),
}

/// Nonnegative matrix whose columns each sum to exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StochasticMatrix(RationalMatrix);

impl StochasticMatrix {
    pub fn new(m: RationalMatrix) -> Result<Self, RealizationError> {
        if let Some((row, col)) = m.first_negative() {
            return Err(RealizationError::NegativeEntry { row: row + 1, col: col + 1 });
        }
        if let Some((col, sum)) = m.column_sums().into_iter().enumerate().find(|(_, s)| !s.is_one()) {
            return Err(RealizationError::ColumnSum { col: col + 1, sum });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> RationalMatrix {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.rows()
    }

    pub fn cols(&self) -> usize {
        self.0.cols()
    }

    /// Column rank equals the row count, i.e. the affine map onto the
    /// target simplex is surjective.
    pub fn is_surjective(&self) -> bool {
        self.0.rank() == self.rows()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddApproximation {
    pub m_prime: StochasticMatrix,
    /// Odd positive integer with `(pK)·M′` odd and positive.
    pub k: Integer,
    /// `(pK)·M′`, integer-valued.
    pub scaled: RationalMatrix,
    pub max_error: Rational,
}

impl OddApproximation {
    pub fn scale(&self) -> Integer {
        &self.k * BigInt::from(self.m_prime.rows())
    }

    pub fn integer_rows(&self) -> Vec<Vec<Integer>> {
        self.scaled.to_rows().into_iter().map(|r| r.into_iter().map(|x| x.to_integer()).collect()).collect()
    }
}

fn smallest_odd_above(x: &Rational) -> Integer {
    let mut k: Integer = x.floor().to_integer() + 1;
    if k.is_even() {
        k += 1;
    }
    k
}

/// Nearest odd integer, ties (at even integers) upward, never below 1.
pub fn nearest_odd_positive(x: &Rational) -> Integer {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let k: Integer = ((x - Rational::one()) / Rational::from_integer(BigInt::from(2)) + half).floor().to_integer();
    let odd = k * 2 + 1;
    if odd < BigInt::one() {
        BigInt::one()
    } else {
        odd
    }
}

pub fn odd_approximate(m: &StochasticMatrix, eps: &Rational) -> Result<OddApproximation, RealizationError> {
    if !eps.is_positive() {
        return Err(RealizationError::NonPositiveEpsilon);
    }
    let p = m.rows();
    if p == 1 {
        return Ok(OddApproximation {
            m_prime: m.clone(),
            k: BigInt::one(),
            scaled: m.matrix().clone(),
            max_error: Rational::zero(),
        });
    }
    let p_big = BigInt::from(p);
    let threshold = eps.recip().max(Rational::from_integer(p_big.clone()));
    let k = smallest_odd_above(&threshold);
    let pk = Rational::from_integer(&p_big * &k);
    let floor = Rational::from_integer(&k - &p_big + 1);
    let source = m.matrix();
    let mut scaled = RationalMatrix::zeros(p, m.cols());
    for col in 0..m.cols() {
        let column: Vec<Rational> = source.column(col).iter().map(|x| x * &pk).collect();
        let largest = (0..p).fold(0, |best, i| if column[i] > column[best] { i } else { best });
        let mut others = Rational::zero();
        for (i, x) in column.iter().enumerate() {
            if i != largest {
                let odd = Rational::from_integer(nearest_odd_positive(x));
                others += &odd;
                scaled.set(i, col, odd);
            }
        }
        let value = &pk - others;
        if !value.is_integer() || value.to_integer().is_even() || value < floor {
            return Err(RealizationError::ParityBreach { col: col + 1, value, floor });
        }
        scaled.set(largest, col, value);
    }
    let m_prime = StochasticMatrix::new(scaled.map(|x| x / &pk))?;
    let max_error = sup_distance(m, &m_prime)?;
    Ok(OddApproximation { m_prime, k, scaled, max_error })
}

/// `max_{i,j} |F_ij − G_ij|`, the vertex ℓ∞ bound on the distance between
/// the two affine maps.
pub fn sup_distance(f: &StochasticMatrix, g: &StochasticMatrix) -> Result<Rational, RealizationError> {
    let (a, b) = (f.matrix(), g.matrix());
    if a.shape() != b.shape() {
        return Err(RealizationError::ShapeMismatch { left: a.shape(), right: b.shape() });
    }
    Ok(a.entries()
        .zip(b.entries())
        .map(|(x, y)| (x - y).abs())
        .fold(Rational::zero(), |acc, d| if d > acc { d } else { acc }))
}

/// `ε_n = ε₀ · 2^{-n}` for `n = 1..=count`.
pub fn geometric_schedule(eps0: &Rational, count: usize) -> Vec<Rational> {
    let mut eps = eps0.clone();
    (0..count)
        .map(|_| {
            eps = &eps / Rational::from_integer(BigInt::from(2));
            eps.clone()
        })
        .collect()
}

/// Default schedule, `ε₀ = 1/10`.
pub fn default_schedule(count: usize) -> Vec<Rational> {
    geometric_schedule(&Rational::new(BigInt::one(), BigInt::from(10)), count)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineStage {
    pub approximation: OddApproximation,
    /// `A_n = (p_n K_n) · M′_n`.
    pub transition: RationalMatrix,
    /// `K′_n = p_n K_n`.
    pub scale: Integer,
    pub epsilon: Rational,
    /// `sup_distance(f_n, A_n / K′_n)`.
    pub achieved: Rational,
    pub surjective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOutput {
    pub stages: Vec<PipelineStage>,
    /// Vertex scale of the stage-`n` base, `1 / ∏_{k<n} K′_k`, one per
    /// cone stage (so one more than the number of transitions).
    pub base_scales: Vec<Rational>,
    pub warnings: Vec<String>,
}

impl PipelineOutput {
    pub fn dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.stages.iter().map(|s| s.transition.rows()).collect();
        dims.extend(self.stages.last().map(|s| s.transition.cols()));
        dims
    }

    pub fn to_system(&self) -> Result<InverseConeSystem, RealizationError> {
        let matrices = self.stages.iter().map(|s| s.transition.clone()).collect();
        Ok(InverseConeSystem::explicit(self.dims(), matrices)?)
    }
}

pub fn realize_pipeline(
    system: &[StochasticMatrix],
    schedule: &[Rational],
) -> Result<PipelineOutput, RealizationError> {
    if system.is_empty() {
        return Err(RealizationError::EmptySystem);
    }
    if schedule.len() < system.len() {
        return Err(RealizationError::ShortSchedule { needed: system.len(), found: schedule.len() });
    }
    for (n, pair) in system.windows(2).enumerate() {
        if pair[0].cols() != pair[1].rows() {
            return Err(RealizationError::BrokenChain {
                stage: n + 2,
                previous: n + 1,
                expected: pair[0].cols(),
                found: pair[1].rows(),
            });
        }
    }
    if schedule.iter().any(|e| !e.is_positive()) {
        return Err(RealizationError::NonPositiveEpsilon);
    }
    let mut stages = Vec::with_capacity(system.len());
    let mut warnings = Vec::new();
    let mut product = BigInt::one();
    let mut base_scales = vec![Rational::one()];
    for (index, (f, eps)) in system.iter().zip(schedule).enumerate() {
        let approximation = odd_approximate(f, eps)?;
        let scale = approximation.scale();
        let surjective = f.is_surjective();
        if !surjective {
            warnings.push(format!(
                "stage {}: the affine map is not surjective (column rank {} < {} rows)",
                index + 1,
                f.matrix().rank(),
                f.rows()
            ));
        }
        product *= &scale;
        base_scales.push(Rational::new(BigInt::one(), product.clone()));
        stages.push(PipelineStage {
            transition: approximation.scaled.clone(),
            achieved: approximation.max_error.clone(),
            scale,
            epsilon: eps.clone(),
            surjective,
            approximation,
        });
    }
    Ok(PipelineOutput { stages, base_scales, warnings })
}

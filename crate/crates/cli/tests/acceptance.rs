//! Acceptance suite: one PASS/FAIL line per criterion. Runs as a plain
//! binary (`harness = false`) and exits nonzero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use lamicone::arcs::realize_arcs_odd;
use lamicone::builtins::{builtin, ell1_thread_roundtrip, triangular_sequence, EllOneData, ExpectedFact};
use lamicone::limit::{
    base_exists, minimality_certificate, polynomial_degree, trivial_limit_certificate, vertex_images, SequenceDegree,
};
use lamicone::realization::{geometric_schedule, realize_pipeline};
use lamicone::{
    odd_approximate, ArcSystemStage, BuiltinFamily, InverseConeSystem, Outcome, Rational, RationalMatrix,
    StochasticMatrix,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SEED: u64 = 0x1a41_c0e5;

// Criterion 1
const GOLDEN_HORIZON: &str = "60";
const GOLDEN_WIDTH_EXP: u32 = 12;
const GOLDEN_TIME: Duration = Duration::from_secs(1);
// Criterion 2
const DEGREE_WINDOW: usize = 10;
const RATIO_INDEX: usize = 100;
const TRIVIAL_STAGE: usize = 3;
const TRIVIAL_HORIZON: usize = 103;
const TRIVIAL_TOL: (i64, i64) = (1, 50);
const TRIVIAL_TIME: Duration = Duration::from_secs(5);
// Criteria 3-5, 7, 8
const BASE_CASES: usize = 2000;
const APPROX_CASES: usize = 1000;
const ARC_CASES: usize = 500;
const PIPELINE_STAGES: usize = 5;
const THREAD_CASES: usize = 200;
const THREAD_MAX_N: usize = 20;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn z(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parse_q(v: &Value) -> Result<Rational, String> {
    let s = v.as_str().ok_or_else(|| format!("expected a rational string, got {v}"))?;
    lamicone::parse_rational(s).map_err(|e| e.to_string())
}

/// `x < φ` for positive `x`, decided exactly via `x² - x - 1 < 0`.
fn below_golden(x: &Rational) -> bool {
    x * x - x - z(1) < Rational::zero()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_lamicone"))
        .args(["analyze", "example-4.5", "--horizon", GOLDEN_HORIZON])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(out.status.success(), || format!("exit {:?}", out.status.code()))?;
    let report: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let cert = report["certificates"]
        .as_array()
        .and_then(|c| c.iter().find(|c| c["query"]["check"] == "limit-ray"))
        .ok_or("no limit-ray certificate")?;
    ensure(cert["kind"] == "projective-collapse", || format!("kind {}", cert["kind"]))?;
    let lo = parse_q(&cert["witness"]["ray_ratio"][0])?;
    let hi = parse_q(&cert["witness"]["ray_ratio"][1])?;
    let excess = parse_q(&cert["witness"]["gauge"]["cross_ratio_minus_one"])?;
    let bound = q(1, 10i64.pow(GOLDEN_WIDTH_EXP));
    ensure(below_golden(&lo) && !below_golden(&hi), || format!("[{lo}, {hi}] misses the golden ratio"))?;
    ensure(&hi - &lo < bound, || format!("width {} too large", &hi - &lo))?;
    ensure(excess < bound, || format!("gauge - 1 = {excess}"))?;
    ensure(elapsed < GOLDEN_TIME, || format!("took {elapsed:?}"))?;
    Ok(format!("ratio in [{lo}, {hi}], {elapsed:.2?}"))
}

/// `a_j^i` by repeated application of the lower-triangular map to `e_1`,
/// one vector at a time.
fn triangular_oracle(j: usize, i_max: usize) -> Vec<Rational> {
    let mut v = vec![BigInt::zero(); j + 1];
    v[0] = BigInt::one();
    (0..i_max)
        .map(|_| {
            let mut prefix = BigInt::zero();
            let next: Vec<BigInt> = v
                .iter()
                .map(|x| {
                    let y = x + &prefix * 2;
                    prefix += x;
                    y
                })
                .collect();
            v = next;
            Rational::from_integer(v[j].clone())
        })
        .collect()
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let sys = InverseConeSystem::builtin(BuiltinFamily::ZeroMeasure81);
    for j in 1..=3 {
        let seq = triangular_sequence(&sys, j, DEGREE_WINDOW).map_err(|e| e.to_string())?;
        ensure(seq == triangular_oracle(j, DEGREE_WINDOW), || format!("a_{j} disagrees with the oracle"))?;
        let degree = polynomial_degree(&seq).map_err(|e| e.to_string())?;
        ensure(degree == SequenceDegree::Exact(j), || format!("a_{j}: {degree:?}"))?;
    }
    let product = sys.compose(3, 3 + RATIO_INDEX).map_err(|e| e.to_string())?;
    let ratio = product.get(1, 0) / product.get(2, 0);
    let oracle = triangular_oracle(2, RATIO_INDEX);
    let oracle_ratio = &triangular_oracle(1, RATIO_INDEX)[RATIO_INDEX - 1] / &oracle[RATIO_INDEX - 1];
    ensure(ratio == q(1, RATIO_INDEX as i64) && oracle_ratio == ratio, || format!("ratio {ratio}"))?;
    let tol = q(TRIVIAL_TOL.0, TRIVIAL_TOL.1);
    let cert = trivial_limit_certificate(&sys, TRIVIAL_STAGE, TRIVIAL_HORIZON, &tol).map_err(|e| e.to_string())?;
    ensure(cert.kind() == "trivial-limit", || format!("got {:?}", cert.outcome))?;
    let elapsed = start.elapsed();
    ensure(elapsed < TRIVIAL_TIME, || format!("took {elapsed:?}"))?;
    Ok(format!("degrees 1,2,3; ratio {ratio}; trivial-limit at {TRIVIAL_HORIZON}; {elapsed:.2?}"))
}

/// Brute force: is there a nonzero 0/1 vector `v` with `M v = 0`? For a
/// nonnegative matrix, any nonnegative kernel vector's support gives one.
fn has_nonnegative_kernel(m: &[Vec<i64>], cols: usize) -> bool {
    (1u32..(1 << cols)).any(|support| {
        m.iter().all(|row| (0..cols).filter(|&c| support & (1 << c) != 0).map(|c| row[c]).sum::<i64>() == 0)
    })
}

fn criterion_3(rng: &mut ChaCha8Rng) -> Check {
    let mut failing = 0;
    for case in 0..BASE_CASES {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(0..=3)).collect()).collect();
        let m = RationalMatrix::from_ints(&rows);
        let sys = InverseConeSystem::explicit(vec![r, c], vec![m]).map_err(|e| e.to_string())?;
        let cert = base_exists(&sys, 2).map_err(|e| e.to_string())?;
        let predicate = matches!(cert.outcome, Outcome::BaseCriterionFails { .. });
        let oracle = has_nonnegative_kernel(&rows, c);
        ensure(predicate == oracle, || format!("case {case}: {rows:?} predicate {predicate}, oracle {oracle}"))?;
        failing += usize::from(oracle);
    }
    Ok(format!("{BASE_CASES} matrices agree ({failing} with a kernel vector)"))
}

fn random_stochastic(rng: &mut ChaCha8Rng, p: usize, qn: usize) -> StochasticMatrix {
    let mut weights: Vec<Vec<i64>> = (0..p).map(|_| (0..qn).map(|_| rng.gen_range(0..=9)).collect()).collect();
    for col in 0..qn {
        if weights.iter().all(|row| row[col] == 0) {
            let r = rng.gen_range(0..p);
            weights[r][col] = 1;
        }
    }
    let sums: Vec<i64> = (0..qn).map(|c| (0..p).map(|r| weights[r][c]).sum()).collect();
    let m = RationalMatrix::from_fn(p, qn, |r, c| q(weights[r][c], sums[c]));
    StochasticMatrix::new(m).expect("columns sum to one")
}

fn criterion_4(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..APPROX_CASES {
        let (p, qn) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let m = random_stochastic(rng, p, qn);
        let eps = if case % 2 == 0 { q(1, 5) } else { q(1, 20) };
        let out = odd_approximate(&m, &eps).map_err(|e| format!("case {case}: {e}"))?;
        let mp = out.m_prime.matrix();
        ensure(mp.entries().all(|x| x.is_positive()), || format!("case {case}: non-positive entry"))?;
        ensure(mp.column_sums().iter().all(|s| *s == z(1)), || format!("case {case}: column sum"))?;
        let scale = Rational::from_integer(BigInt::from(p as u64) * &out.k);
        let odd = mp.entries().all(|x| {
            let y = x * &scale;
            y.is_integer() && (y.to_integer() % 2i32) == BigInt::one()
        });
        ensure(odd, || format!("case {case}: pK M' not odd"))?;
        let err = (0..p)
            .flat_map(|r| (0..qn).map(move |c| (r, c)))
            .map(|(r, c)| (mp.get(r, c) - m.matrix().get(r, c)).abs())
            .fold(Rational::zero(), |a, b| if b > a { b } else { a });
        ensure(err < eps && err == out.max_error, || format!("case {case}: error {err}"))?;
    }
    let worked =
        StochasticMatrix::new(RationalMatrix::from_rows(vec![vec![q(1, 2), q(1, 3)], vec![q(1, 2), q(2, 3)]]).unwrap())
            .unwrap();
    let out = odd_approximate(&worked, &q(1, 10)).map_err(|e| e.to_string())?;
    ensure(out.k == BigInt::from(11), || format!("K = {}", out.k))?;
    ensure(out.scaled == RationalMatrix::from_ints(&[[11, 7], [11, 15]]), || format!("matrix {}", out.scaled))?;
    ensure(out.max_error == q(1, 66), || format!("max error {}", out.max_error))?;
    Ok(format!("{APPROX_CASES} matrices; worked example K=11, [[11,7],[11,15]], error 1/66"))
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..ARC_CASES {
        let (r, s) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..s).map(|_| 2 * rng.gen_range(0..=4) + 1).collect()).collect();
        let pi = RationalMatrix::from_ints(&rows);
        let real = realize_arcs_odd(&ArcSystemStage::initial(r), &pi).map_err(|e| format!("case {case}: {e}"))?;
        let report = real.verify(&pi).map_err(|e| format!("case {case}: {e}"))?;
        ensure(report.matches, || format!("case {case}: induced {} != {pi}", report.induced))?;
        ensure(report.annulus.ok, || format!("case {case}: crossing {:?}", report.annulus.first_interleaving))?;
        ensure(report.parity_violations == 0, || format!("case {case}: parity"))?;
        ensure(report.ok(), || format!("case {case}: {report:?}"))?;
    }
    let odd = RationalMatrix::from_ints(&[[1, 1, 3, 1], [3, 1, 3, 1], [1, 3, 1, 1]]);
    let real = realize_arcs_odd(&ArcSystemStage::initial(3), &odd).map_err(|e| e.to_string())?;
    ensure(real.path.sizes() == [6, 8, 6], || format!("sizes {:?}", real.path.sizes()))?;
    let want: [&[usize]; 3] = [&[1, 2, 3, 4, 3, 4, 5], &[5, 4, 3, 4, 3, 2, 1, 2, 1], &[1, 2, 3, 2, 3, 4, 5]];
    for (e, labels) in want.iter().enumerate() {
        ensure(real.path.labels(e) == *labels, || format!("edge {e}: {:?}", real.path.labels(e)))?;
    }
    ensure(real.verify(&odd).map_err(|e| e.to_string())?.ok(), || "reference 3x4 matrix round trip".into())?;
    Ok(format!("{ARC_CASES} matrices round-trip; reference matrix sizes (6,8,6)"))
}

fn criterion_6() -> Check {
    let mut displayed = 0;
    for family in BuiltinFamily::ALL {
        let ex = builtin(family.name()).map_err(|e| e.to_string())?;
        for (fact, outcome) in ex.expected_facts.iter().zip(ex.verify()) {
            let is_matrix =
                matches!(fact, ExpectedFact::DisplayedTransition { .. } | ExpectedFact::DisplayedComposite { .. });
            displayed += usize::from(is_matrix);
            ensure(outcome.passed, || format!("{}: {} ({})", family.name(), outcome.description, outcome.detail))?;
        }
    }
    let sys = InverseConeSystem::builtin(BuiltinFamily::Example44);
    for n in 1..=5 {
        let images = vertex_images(&sys, n, n + 1).map_err(|e| e.to_string())?;
        let last = images.last().ok_or("no vertices")?;
        let mut want = vec![Rational::zero(); n + 1];
        want[0] = q(1, 2);
        want[1] = q(1, 2);
        ensure(*last == want, || format!("stage {n}: {last:?}"))?;
    }
    Ok(format!("{displayed} displayed matrices exact; last vertex image (1/2, 1/2)"))
}

fn criterion_7(rng: &mut ChaCha8Rng) -> Check {
    let mut dims = vec![rng.gen_range(2..=4)];
    let system: Vec<StochasticMatrix> = (0..PIPELINE_STAGES)
        .map(|_| {
            let next = rng.gen_range(2..=4);
            let m = random_stochastic(rng, *dims.last().unwrap(), next);
            dims.push(next);
            m
        })
        .collect();
    let schedule = geometric_schedule(&q(1, 100), PIPELINE_STAGES);
    let out = realize_pipeline(&system, &schedule).map_err(|e| e.to_string())?;
    for (n, stage) in out.stages.iter().enumerate() {
        let odd = stage
            .transition
            .entries()
            .all(|x| x.is_integer() && x.is_positive() && x.to_integer() % 2i32 == BigInt::one());
        ensure(odd, || format!("stage {}: {}", n + 1, stage.transition))?;
        ensure(stage.achieved < schedule[n], || format!("stage {}: error {}", n + 1, stage.achieved))?;
    }
    let sys = out.to_system().map_err(|e| e.to_string())?;
    let mut product = Rational::one();
    for n in 1..=PIPELINE_STAGES {
        let scale = &out.stages[n - 1];
        product *= Rational::from_integer(BigInt::from(system[n - 1].rows() as u64) * &scale.approximation.k);
        let composite = sys.compose(1, n + 1).map_err(|e| e.to_string())?;
        ensure(composite.column_sums().iter().all(|s| *s == product), || format!("pi_1,{} column sums", n + 1))?;
        let cert = minimality_certificate(&sys, n, PIPELINE_STAGES + 1).map_err(|e| e.to_string())?;
        ensure(cert.outcome == Outcome::Minimal { m0: n + 1 }, || format!("stage {n}: {:?}", cert.outcome))?;
    }
    Ok(format!("dims {dims:?}; odd, minimal with m0 = n+1, errors within schedule"))
}

fn criterion_8(rng: &mut ChaCha8Rng) -> Check {
    for case in 0..THREAD_CASES {
        let truncation = rng.gen_range(1..=THREAD_MAX_N);
        let x = z(rng.gen_range(0..=40));
        // Admissible: nonnegative y with every partial sum at most x.
        let mut left = x.clone();
        let y: Vec<Rational> = (1..truncation)
            .map(|_| {
                let take = if left.is_zero() { Rational::zero() } else { &left * q(rng.gen_range(0..=3), 7) };
                left -= &take;
                take
            })
            .collect();
        let data = EllOneData { x: vec![x], y };
        let rt = ell1_thread_roundtrip(BuiltinFamily::Example43, &data, truncation)
            .map_err(|e| format!("case {case}: {e}"))?;
        ensure(rt.consistency.consistent, || format!("case {case}: {:?}", rt.consistency.first_failure))?;
        ensure(rt.identity && rt.recovered == data, || format!("case {case}: recovered {:?}", rt.recovered))?;
    }
    Ok(format!("{THREAD_CASES} threads, N <= {THREAD_MAX_N}"))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let results: Vec<(&str, Check)> = vec![
        ("golden-ratio collapse of example-4.5", criterion_1()),
        ("zero-measure degrees, ratio and trivial limit", criterion_2()),
        ("base criterion agrees with kernel search", criterion_3(&mut rng)),
        ("odd approximation postconditions", criterion_4(&mut rng)),
        ("arc realization round trip", criterion_5(&mut rng)),
        ("displayed matrices reproduced", criterion_6()),
        ("realization pipeline", criterion_7(&mut rng)),
        ("thread round trip", criterion_8(&mut rng)),
    ];
    let mut failed = 0;
    for (k, (name, result)) in results.iter().enumerate() {
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Stochastic system -> odd integer transitions -> cone system -> arc systems.

use lamicone::limit::{base_exists, minimality_certificate};
use lamicone::realization::{default_schedule, realize_pipeline};
use lamicone::{realize_arcs_odd, ArcSystemStage, Outcome, Rational, RationalMatrix, StochasticMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

fn stochastic(weights: &[Vec<u8>]) -> StochasticMatrix {
    let rows = weights.len();
    let cols = weights[0].len();
    let sums: Vec<i64> = (0..cols).map(|c| weights.iter().map(|r| i64::from(r[c])).sum()).collect();
    // an all-zero column becomes the first vertex
    let m = RationalMatrix::from_fn(rows, cols, |r, c| match sums[c] {
        0 => Rational::from_integer(BigInt::from(i64::from(r == 0))),
        s => Rational::new(BigInt::from(weights[r][c]), BigInt::from(s)),
    });
    StochasticMatrix::new(m).unwrap()
}

fn chain() -> impl Strategy<Value = Vec<Vec<Vec<u8>>>> {
    prop::collection::vec(1usize..=3, 2..=4).prop_flat_map(|dims| {
        let stages: Vec<_> =
            dims.windows(2).map(|w| prop::collection::vec(prop::collection::vec(0u8..=5, w[1]), w[0])).collect();
        stages
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn realized_systems_are_minimal_and_carry_arcs(weights in chain()) {
        let system: Vec<StochasticMatrix> = weights.iter().map(|w| stochastic(w)).collect();
        let out = realize_pipeline(&system, &default_schedule(system.len())).unwrap();
        let sys = out.to_system().unwrap();
        let last = system.len() + 1;
        prop_assert_eq!(base_exists(&sys, last).unwrap().outcome, Outcome::BaseExists);
        for n in 1..last {
            let cert = minimality_certificate(&sys, n, last).unwrap();
            prop_assert_eq!(cert.outcome, Outcome::Minimal { m0: n + 1 });
        }
        let mut stage = ArcSystemStage::initial(out.dims()[0]);
        for s in &out.stages {
            let real = realize_arcs_odd(&stage, &s.transition).unwrap();
            prop_assert!(real.verify(&s.transition).unwrap().ok());
            stage = real.next;
        }
    }
}

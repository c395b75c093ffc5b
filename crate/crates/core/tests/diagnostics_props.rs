mod common;

use dx_core::diagnostics::Analysis;
use dx_core::fixtures::{distinct_nonzero_blocks, random_defective_blocks, random_semisimple_blocks, Block};
use dx_core::{
    classify_full, classify_two_step, eigendecompose, necessary_check, sufficient_check, zero_rank_bound, Outcome,
    Reason, TolerancePolicy,
};
use proptest::prelude::*;

use common::{fixture, rng};

#[derive(Clone, Copy, Debug)]
enum Family {
    Semisimple,
    Defective,
    DistinctWithZeros,
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::Semisimple), Just(Family::Defective), Just(Family::DistinctWithZeros)]
}

fn build(family: Family, n: usize, seed: u64) -> dx_core::fixtures::Fixture {
    let mut r = rng(seed);
    let blocks = match family {
        Family::Semisimple => random_semisimple_blocks(&mut r, n),
        Family::Defective => random_defective_blocks(&mut r, n.max(2)),
        Family::DistinctWithZeros => {
            let zeros = (seed % 6) as usize;
            let mut b = distinct_nonzero_blocks(&mut r, n, &[]);
            b.extend((0..zeros).map(|_| Block::Jordan { value: 0, size: 1 }));
            b
        }
    };
    fixture(blocks, seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn verdict_matches_construction(family in family(), n in 1usize..=12, seed in any::<u64>()) {
        let f = build(family, n, seed);
        let v = classify_full(&f.matrix, &TolerancePolicy::default()).unwrap();
        prop_assert_eq!(v.outcome, f.truth.expected, "{}", v.summary());
    }

    #[test]
    fn necessary_and_sufficient_checks_are_sound(family in family(), n in 1usize..=12, seed in any::<u64>()) {
        let f = build(family, n, seed);
        let a = Analysis::of(&f.matrix, &TolerancePolicy::default()).unwrap();
        if !necessary_check(&a.rank, &a.spectrum) {
            prop_assert_eq!(f.truth.expected, Outcome::Defective);
        }
        if sufficient_check(&a.rank, &a.spectrum) {
            prop_assert_eq!(f.truth.expected, Outcome::Diagonalizable);
        }
    }

    #[test]
    fn rank_respects_zero_multiplicity(family in family(), n in 1usize..=12, seed in any::<u64>()) {
        let f = build(family, n, seed);
        let a = Analysis::of(&f.matrix, &TolerancePolicy::default()).unwrap();
        let b = zero_rank_bound(&a.spectrum, &a.rank);
        prop_assert!(b.holds);
        prop_assert!(a.rank.rank >= f.truth.n - f.truth.zero_multiplicity);
        if f.truth.zero_multiplicity == 1 {
            prop_assert_eq!(a.rank.rank, f.truth.n - 1);
        }
        prop_assert_eq!(a.rank.rank, f.truth.rank);
    }

    #[test]
    fn verdict_is_scale_invariant(family in family(), n in 1usize..=10, seed in any::<u64>(), e in -12i32..=12) {
        let f = build(family, n, seed);
        let p = TolerancePolicy::default();
        let v = classify_full(&f.matrix, &p).unwrap();
        let w = classify_full(&f.matrix.scale(2f64.powi(e)), &p).unwrap();
        prop_assert_eq!((v.outcome, v.reason), (w.outcome, w.reason));
    }

    #[test]
    fn deficient_pairs_match_construction(n in 2usize..=12, seed in any::<u64>()) {
        let f = build(Family::Defective, n, seed);
        let v = classify_full(&f.matrix, &TolerancePolicy::default()).unwrap();
        let mut got: Vec<(i64, usize, usize)> = v
            .evidence
            .deficient_clusters()
            .map(|c| (c.value.re.round() as i64, c.algebraic_multiplicity, c.geometric_multiplicity.unwrap()))
            .collect();
        let mut want: Vec<(i64, usize, usize)> = f
            .truth
            .multiplicities
            .iter()
            .filter(|m| m.geometric < m.algebraic)
            .map(|m| (m.value.re as i64, m.algebraic, m.geometric))
            .collect();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn certified_eigenbases_reproduce_the_matrix(n in 1usize..=12, seed in any::<u64>(), semisimple in any::<bool>()) {
        let family = if semisimple { Family::Semisimple } else { Family::DistinctWithZeros };
        let f = build(family, n, seed);
        let e = eigendecompose(&f.matrix, &TolerancePolicy::default(), false).unwrap();
        prop_assert!(e.residual <= 1e-10, "residual {}", e.residual);
        prop_assert_eq!(e.eigenvalues.len(), f.truth.n);
    }

    #[test]
    fn two_step_never_contradicts_full(family in family(), n in 1usize..=10, seed in any::<u64>()) {
        let f = build(family, n, seed);
        let p = TolerancePolicy::default();
        let two = classify_two_step(&f.matrix, &p).unwrap();
        let full = classify_full(&f.matrix, &p).unwrap();
        if two.outcome != Outcome::Indeterminate {
            prop_assert_eq!((two.outcome, two.reason), (full.outcome, full.reason));
        } else if two.reason == Reason::RepeatedNonzeroEigenvalue {
            prop_assert_eq!(full.reason, Reason::MultiplicityResolved);
        }
    }
}

use dx_core::ionet::{
    expenditure_share, parse_io_table, prune_disconnected, simulate_shock, table_report, IoTable, ShockScenario,
};
use dx_core::{Error, Matrix, Outcome, TolerancePolicy};
use proptest::prelude::*;

/// Random tables with sparse nonnegative flows, some isolated sectors, and
/// outlays covering the column sums plus slack.
fn table() -> impl Strategy<Value = IoTable> {
    (1usize..=9).prop_flat_map(|n| {
        (
            proptest::collection::vec(prop_oneof![3 => Just(0u32), 2 => 1u32..=50], n * n),
            proptest::collection::vec(0u32..=40, n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(flows, slack, isolate)| {
                let mut f = Matrix::new(n, n, flows.into_iter().map(f64::from).collect()).unwrap();
                for (k, _) in isolate.iter().enumerate().filter(|(_, &b)| b) {
                    for m in 0..n {
                        f[(k, m)] = 0.0;
                        f[(m, k)] = 0.0;
                    }
                }
                let outlay = (0..n).map(|j| f.column(j).iter().sum::<f64>() + f64::from(slack[j])).collect();
                let names = (0..n).map(|i| format!("sector_{i}")).collect();
                IoTable::new(names, f, outlay).unwrap()
            })
    })
}

/// Strictly positive flows: generically diagonalizable shares.
fn dense_table() -> impl Strategy<Value = IoTable> {
    (1usize..=12).prop_flat_map(|n| {
        (proptest::collection::vec(1u32..=50, n * n), proptest::collection::vec(1u32..=200, n)).prop_map(
            move |(flows, slack)| {
                let f = Matrix::new(n, n, flows.into_iter().map(f64::from).collect()).unwrap();
                let outlay = (0..n).map(|j| f.column(j).iter().sum::<f64>() + f64::from(slack[j])).collect();
                IoTable::new((0..n).map(|i| format!("s{i}")).collect(), f, outlay).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn shares_are_substochastic_by_column(t in table()) {
        let s = expenditure_share(&t);
        for j in 0..t.len() {
            let col = s.a.column(j);
            prop_assert!(col.iter().all(|v| (0.0..=1.0).contains(v)));
            prop_assert!(col.iter().sum::<f64>() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn csv_round_trip(t in table()) {
        prop_assert_eq!(parse_io_table(t.to_csv().as_bytes()).unwrap(), t);
    }

    #[test]
    fn pruning_is_idempotent(t in table()) {
        if let Ok((once, _)) = prune_disconnected(&t) {
            let (twice, removed) = prune_disconnected(&once).unwrap();
            prop_assert_eq!(&twice, &once);
            prop_assert!(removed.is_empty());
        }
    }

    #[test]
    fn report_is_consistent(t in table()) {
        let r = table_report(&t, &TolerancePolicy::default()).unwrap();
        if r.rank != r.nonzero_eig_count {
            prop_assert_eq!(r.verdict.outcome, Outcome::Defective);
        }
        prop_assert_eq!(r.dimension, t.len());
        prop_assert!(r.spectral_radius <= 1.0 + 1e-12);
    }

    #[test]
    fn modal_reconstruction_matches_direct_iteration(t in table(), horizon in 1usize..=100, pick in any::<prop::sample::Index>()) {
        let s = expenditure_share(&t);
        let name = t.sector_names()[pick.index(t.len())].clone();
        let scenario = ShockScenario::new(vec![(name, 1.0)], horizon).unwrap();
        match simulate_shock(&s, &scenario, &TolerancePolicy::default()) {
            Ok(r) => {
                prop_assert_eq!(r.trajectory.len(), horizon + 1);
                prop_assert!(r.modal_relative_error.unwrap() <= 1e-6, "{:?}", r.modal_relative_error);
            }
            // Repeated zero patterns and other defective shares are refused.
            Err(e) => {
                let refused = matches!(e, Error::Defective { .. } | Error::NotCertified(_) | Error::Conditioning(_));
                prop_assert!(refused, "{}", e);
            }
        }
    }

    #[test]
    fn dense_tables_decompose_and_agree(t in dense_table(), horizon in 1usize..=100) {
        let s = expenditure_share(&t);
        let shocks = t.sector_names().iter().map(|n| (n.clone(), 0.5)).collect();
        let r = simulate_shock(&s, &ShockScenario::new(shocks, horizon).unwrap(), &TolerancePolicy::default()).unwrap();
        prop_assert!(r.spectral_radius < 1.0);
        prop_assert!(r.modal_relative_error.unwrap() <= 1e-6, "{:?}", r.modal_relative_error);
    }
}

use serde::Serialize;

use crate::diagnostics::{classify_full_with, Analysis, Verdict};
use crate::error::Result;
use crate::ionet::{expenditure_share_with, prune_disconnected, IoTable, Normalization};
use crate::policy::TolerancePolicy;
use crate::spectral::{nonzero_count, nonzero_distinct};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TableOptions {
    pub prune: bool,
    pub normalization: Normalization,
}

/// One row of a diagnosability table: dimension, rank, number of nonzero
/// eigenvalues and whether they are distinct, plus the verdict behind them.
#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub dimension: usize,
    /// Dimension before pruning.
    pub original_dimension: usize,
    pub rank: usize,
    pub nonzero_eig_count: usize,
    pub nonzero_distinct: bool,
    pub spectral_radius: f64,
    pub verdict: Verdict,
    pub pruned_sectors: Vec<String>,
    pub normalization: Normalization,
    pub warnings: Vec<String>,
}

/// Report on the column-normalized share matrix, without pruning.
pub fn table_report(t: &IoTable, policy: &TolerancePolicy) -> Result<TableReport> {
    table_report_with(t, policy, TableOptions::default())
}

pub fn table_report_with(t: &IoTable, policy: &TolerancePolicy, options: TableOptions) -> Result<TableReport> {
    let (table, pruned) = if options.prune {
        prune_disconnected(t)?
    } else {
        (t.clone(), Vec::new())
    };
    let share = expenditure_share_with(&table, options.normalization)?;
    let analysis = Analysis::of(&share.a, policy)?;
    let verdict = classify_full_with(&share.a, &analysis)?;
    let mut warnings = share.warnings;
    warnings.extend(verdict.warnings.iter().cloned());
    Ok(TableReport {
        dimension: table.len(),
        original_dimension: t.len(),
        rank: analysis.rank.rank,
        nonzero_eig_count: nonzero_count(&analysis.spectrum),
        nonzero_distinct: nonzero_distinct(&analysis.spectrum),
        spectral_radius: analysis.spectrum.spectral_radius(),
        verdict,
        pruned_sectors: pruned,
        normalization: options.normalization,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Outcome;
    use crate::matrix::Matrix;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("s{i}")).collect()
    }

    #[test]
    fn diagonal_dominant_five_sectors() {
        // Shares 0.1..0.5 on the diagonal; upper triangular so the spectrum is the diagonal.
        let mut f = Matrix::zeros(5, 5);
        for i in 0..5 {
            f[(i, i)] = 10.0 * (i + 1) as f64;
            for j in i + 1..5 {
                f[(i, j)] = 1.0;
            }
        }
        let t = IoTable::new(names(5), f, vec![100.0; 5]).unwrap();
        let r = table_report(&t, &TolerancePolicy::default()).unwrap();
        assert_eq!((r.dimension, r.rank, r.nonzero_eig_count, r.nonzero_distinct), (5, 5, 5, true));
        assert_eq!(r.verdict.outcome, Outcome::Diagonalizable);
        assert!((r.spectral_radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_flow_table() {
        let t = IoTable::new(names(3), Matrix::zeros(3, 3), vec![1.0; 3]).unwrap();
        let r = table_report(&t, &TolerancePolicy::default()).unwrap();
        assert_eq!((r.rank, r.nonzero_eig_count, r.nonzero_distinct), (0, 0, true));
        assert_eq!(r.verdict.outcome, Outcome::Diagonalizable);
    }

    #[test]
    fn nilpotent_pattern_is_defective() {
        let f = Matrix::from_rows(&[[0.0, 5.0], [0.0, 0.0]]).unwrap();
        let t = IoTable::new(names(2), f, vec![10.0, 10.0]).unwrap();
        let r = table_report(&t, &TolerancePolicy::default()).unwrap();
        assert_eq!((r.rank, r.nonzero_eig_count), (1, 0));
        assert_eq!(r.verdict.outcome, Outcome::Defective);
    }

    #[test]
    fn pruning_is_reported() {
        let f = Matrix::from_rows(&[[1.0, 2.0, 0.0], [3.0, 4.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let t = IoTable::new(names(3), f, vec![10.0; 3]).unwrap();
        let options = TableOptions {
            prune: true,
            ..TableOptions::default()
        };
        let r = table_report_with(&t, &TolerancePolicy::default(), options).unwrap();
        assert_eq!((r.original_dimension, r.dimension), (3, 2));
        assert_eq!(r.pruned_sectors, vec!["s3"]);
    }
}

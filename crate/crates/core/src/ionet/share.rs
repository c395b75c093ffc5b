use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ionet::IoTable;
use crate::matrix::Matrix;

/// Which gross outlay divides a flow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `a(i, j) = flows(i, j) / outlay(j)`: the purchaser's budget share.
    #[default]
    Column,
    /// `a(i, j) = flows(i, j) / outlay(i)`: the seller's output share.
    Row,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "column" => Ok(Normalization::Column),
            "row" => Ok(Normalization::Row),
            other => Err(Error::Tolerance(format!(
                "unknown normalization {other:?}, expected `column` or `row`"
            ))),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Column => "column",
            Normalization::Row => "row",
        })
    }
}

/// Expenditure shares. Entries lie in `[0, 1]` and the sums along the
/// normalized direction are at most 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShareMatrix {
    pub a: Matrix,
    pub sector_names: Vec<String>,
    pub normalization: Normalization,
    pub warnings: Vec<String>,
}

impl ShareMatrix {
    /// Wraps a bare matrix after checking the share invariants for column
    /// normalization. Sectors are named `s1, s2, ...`.
    pub fn from_matrix(a: Matrix) -> Result<Self> {
        let n = a.require_square("share matrix")?;
        for j in 0..n {
            let col = a.column(j);
            if let Some(i) = col.iter().position(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Dimension(format!(
                    "share ({}, {}) = {} is outside [0, 1]",
                    i + 1,
                    j + 1,
                    col[i]
                )));
            }
            let sum: f64 = col.iter().sum();
            if sum > 1.0 + 1e-12 {
                return Err(Error::Dimension(format!("share column {} sums to {sum} > 1", j + 1)));
            }
        }
        Ok(Self {
            a,
            sector_names: (1..=n).map(|i| format!("s{i}")).collect(),
            normalization: Normalization::Column,
            warnings: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.sector_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sector_names.is_empty()
    }
}

/// Column-normalized expenditure shares.
pub fn expenditure_share(t: &IoTable) -> ShareMatrix {
    expenditure_share_with(t, Normalization::Column).expect("column normalization cannot fail on a valid table")
}

/// Expenditure shares under either normalization. Sectors with zero
/// outlay give an all-zero column (or row) and a warning. Row
/// normalization fails when a sector sells more intermediate output than its
/// gross outlay, since its shares would exceed one.
pub fn expenditure_share_with(t: &IoTable, normalization: Normalization) -> Result<ShareMatrix> {
    let n = t.len();
    let f = t.flows();
    let g = t.gross_outlay();
    let names = t.sector_names();
    let mut a = Matrix::zeros(n, n);
    let mut warnings = Vec::new();
    for k in 0..n {
        if g[k] == 0.0 {
            let side = match normalization {
                Normalization::Column => "column",
                Normalization::Row => "row",
            };
            warnings.push(format!("sector {:?} has zero gross outlay; its share {side} is zero", names[k]));
            continue;
        }
        if normalization == Normalization::Row {
            let sold: f64 = f.row(k).iter().sum();
            if sold > g[k] * (1.0 + 1e-12) {
                return Err(Error::DegenerateTable(format!(
                    "row normalization: sector {:?} sells {sold} of intermediate output but has gross outlay {}",
                    names[k], g[k]
                )));
            }
        }
        for other in 0..n {
            match normalization {
                Normalization::Column => a[(other, k)] = f[(other, k)] / g[k],
                Normalization::Row => a[(k, other)] = f[(k, other)] / g[k],
            }
        }
    }
    Ok(ShareMatrix {
        a,
        sector_names: names.to_vec(),
        normalization,
        warnings,
    })
}

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Relative slack for the outlay check, so that decimal flows summing to
/// exactly the stated outlay are not rejected for rounding.
const OUTLAY_SLACK: f64 = 1e-12;

/// Inter-industry flows. Entry `(i, j)` is the value of sector `i`'s output
/// bought by sector `j`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IoTable {
    sector_names: Vec<String>,
    flows: Matrix,
    gross_outlay: Vec<f64>,
}

impl IoTable {
    /// Validates names (non-empty, unique), flows (square, finite, `>= 0`)
    /// and outlays (finite, `>= 0`, at least the column sum of flows).
    pub fn new(sector_names: Vec<String>, flows: Matrix, gross_outlay: Vec<f64>) -> Result<Self> {
        let n = sector_names.len();
        if flows.rows() != n || flows.cols() != n || gross_outlay.len() != n {
            return Err(Error::Dimension(format!(
                "{n} sectors but {}x{} flows and {} outlays",
                flows.rows(),
                flows.cols(),
                gross_outlay.len()
            )));
        }
        if let Some(j) = check_names(&sector_names) {
            return Err(Error::parse(1, j + 2, name_problem(&sector_names, j)));
        }
        for i in 0..n {
            for j in 0..n {
                if flows[(i, j)] < 0.0 {
                    return Err(Error::parse(i + 2, j + 2, format!("negative flow {}", flows[(i, j)])));
                }
            }
        }
        for (j, &g) in gross_outlay.iter().enumerate() {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::parse(n + 2, j + 2, format!("gross outlay must be finite and >= 0, got {g}")));
            }
            let used: f64 = (0..n).map(|i| flows[(i, j)]).sum();
            if used > g * (1.0 + OUTLAY_SLACK) {
                return Err(Error::parse(
                    n + 2,
                    j + 2,
                    format!(
                        "sector {:?} buys {used} of intermediate inputs but has gross outlay {g}",
                        sector_names[j]
                    ),
                ));
            }
        }
        Ok(Self {
            sector_names,
            flows,
            gross_outlay,
        })
    }

    pub fn len(&self) -> usize {
        self.sector_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sector_names.is_empty()
    }

    pub fn sector_names(&self) -> &[String] {
        &self.sector_names
    }

    pub fn flows(&self) -> &Matrix {
        &self.flows
    }

    pub fn gross_outlay(&self) -> &[f64] {
        &self.gross_outlay
    }

    pub fn sector_index(&self, name: &str) -> Option<usize> {
        self.sector_names.iter().position(|s| s == name)
    }

    /// Keeps the sectors at `keep`, in that order.
    fn select(&self, keep: &[usize]) -> Self {
        let mut flows = Matrix::zeros(keep.len(), keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                flows[(a, b)] = self.flows[(i, j)];
            }
        }
        Self {
            sector_names: keep.iter().map(|&i| self.sector_names[i].clone()).collect(),
            flows,
            gross_outlay: keep.iter().map(|&i| self.gross_outlay[i]).collect(),
        }
    }

    /// Writes the table in the format read by [`parse_io_table`].
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        let n = self.len();
        let header = std::iter::once("sector".to_string()).chain(self.sector_names.iter().cloned());
        w.write_record(header).expect("in-memory write");
        for i in 0..n {
            let row = std::iter::once(self.sector_names[i].clone())
                .chain(self.flows.row(i).iter().map(|v| format!("{v}")));
            w.write_record(row).expect("in-memory write");
        }
        let last = std::iter::once("gross_outlay".to_string()).chain(self.gross_outlay.iter().map(|v| format!("{v}")));
        w.write_record(last).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory write")).expect("csv output is UTF-8")
    }
}

fn check_names(names: &[String]) -> Option<usize> {
    let mut seen = HashSet::new();
    names.iter().position(|s| s.is_empty() || !seen.insert(s.as_str()))
}

fn name_problem(names: &[String], j: usize) -> String {
    if names[j].is_empty() {
        "empty sector name".into()
    } else {
        format!("duplicate sector name {:?}", names[j])
    }
}

/// Parses an IO table:
///
/// ```text
/// sector,agriculture,manufacturing
/// agriculture,10,20
/// manufacturing,30,5
/// gross_outlay,100,50
/// ```
///
/// Row labels must repeat the header names in order. Lines starting with
/// `#` and blank lines are ignored; LF and CRLF are accepted.
pub fn parse_io_table(bytes: &[u8]) -> Result<IoTable> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(0, 0, format!("input is not UTF-8: {e}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(line, 0, e.to_string())
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        records.push((line, record));
    }
    let Some(((head_line, head), rest)) = records.split_first() else {
        return Err(Error::parse(1, 0, "empty table"));
    };
    if head.get(0) != Some("sector") {
        return Err(Error::parse(*head_line, 1, "first line must start with `sector`"));
    }
    let names: Vec<String> = head.iter().skip(1).map(str::to_string).collect();
    let n = names.len();
    if n == 0 {
        return Err(Error::parse(*head_line, 2, "no sector names"));
    }
    if let Some(j) = check_names(&names) {
        return Err(Error::parse(*head_line, j + 2, name_problem(&names, j)));
    }
    if rest.len() != n + 1 {
        let line = rest.last().map_or(*head_line, |r| r.0);
        return Err(Error::parse(
            line,
            0,
            format!("expected {n} flow rows and a gross_outlay row, found {} rows", rest.len()),
        ));
    }

    let values = |line: usize, rec: &csv::StringRecord| -> Result<Vec<f64>> {
        if rec.len() != n + 1 {
            return Err(Error::parse(
                line,
                rec.len().min(n + 1) + 1,
                format!("expected {} values, found {}", n, rec.len().saturating_sub(1)),
            ));
        }
        rec.iter()
            .skip(1)
            .enumerate()
            .map(|(j, field)| {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::parse(line, j + 2, format!("not a number: {field:?}")))?;
                if !v.is_finite() {
                    return Err(Error::parse(line, j + 2, "non-finite value"));
                }
                Ok(v)
            })
            .collect()
    };

    let mut flows = Matrix::zeros(n, n);
    for (i, (line, rec)) in rest[..n].iter().enumerate() {
        let label = rec.get(0).unwrap_or("");
        if label != names[i] {
            return Err(Error::parse(
                *line,
                1,
                format!("row label {label:?} does not match column sector {:?}", names[i]),
            ));
        }
        for (j, v) in values(*line, rec)?.into_iter().enumerate() {
            if v < 0.0 {
                return Err(Error::parse(*line, j + 2, format!("negative flow {v}")));
            }
            flows[(i, j)] = v;
        }
    }
    let (line, rec) = &rest[n];
    if rec.get(0) != Some("gross_outlay") {
        return Err(Error::parse(*line, 1, "last line must start with `gross_outlay`"));
    }
    let outlay = values(*line, rec)?;
    IoTable::new(names, flows, outlay).map_err(|e| match e {
        // Relocate outlay errors from the nominal layout to the actual line.
        Error::Parse { column, message, .. } => Error::parse(*line, column, message),
        other => other,
    })
}

/// Removes sectors whose flow row and flow column are both entirely zero,
/// diagonal included, repeating until none is left. Returns the pruned table
/// and the removed names in original order.
pub fn prune_disconnected(t: &IoTable) -> Result<(IoTable, Vec<String>)> {
    let mut current = t.clone();
    let mut removed = Vec::new();
    loop {
        let n = current.len();
        let f = current.flows();
        let isolated: Vec<bool> = (0..n)
            .map(|i| (0..n).all(|k| f[(i, k)] == 0.0 && f[(k, i)] == 0.0))
            .collect();
        if !isolated.contains(&true) {
            break;
        }
        if isolated.iter().all(|&b| b) {
            return Err(Error::DegenerateTable(
                "every sector is disconnected; nothing would remain after pruning".into(),
            ));
        }
        removed.extend((0..n).filter(|&i| isolated[i]).map(|i| current.sector_names[i].clone()));
        let keep: Vec<usize> = (0..n).filter(|&i| !isolated[i]).collect();
        current = current.select(&keep);
    }
    Ok((current, removed))
}

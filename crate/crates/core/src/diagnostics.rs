//! Diagonalizability tests built on rank and eigenvalues.
//!
//! - Necessary: if `A` is diagonalizable then `rank(A)` equals the number of
//!   nonzero eigenvalues. Failing this proves `A` defective.
//! - Sufficient: rank equals the nonzero count and every nonzero eigenvalue
//!   is simple. Passing this proves `A` diagonalizable.
//! - Otherwise the rank/eigenvalue data are inconclusive and
//!   [`classify_full`] compares geometric with algebraic multiplicity per
//!   distinct eigenvalue.
//!
//! The determinant of the eigenvector matrix is reported but never used to
//! classify; [`det_check_warning`] only flags magnitudes that are too small
//! to read anything from.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{complex_right_singular, null_space_within, numerical_rank, ComplexLu, RankReport};
use crate::matrix::{CMatrix, ComplexScalar, Matrix};
use crate::policy::{ResolvedTolerances, TolerancePolicy, EPS};
use crate::spectral::{
    fmt_complex, geometric_multiplicities, gm_floor, nonzero_count, nonzero_distinct, MultiplicityRecord,
    Spectrum,
};

/// Eigenvector matrices with condition number above this are rejected.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e12;
/// `|det P|` in `[eps, DET_INCONCLUSIVE_MAX]` is flagged inconclusive.
pub const DET_INCONCLUSIVE_MAX: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Diagonalizable,
    Defective,
    Indeterminate,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Diagonalizable => "Diagonalizable",
            Outcome::Defective => "Defective",
            Outcome::Indeterminate => "Indeterminate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Reason {
    NecessaryViolated,
    SufficientSatisfied,
    MultiplicityResolved,
    RepeatedNonzeroEigenvalue,
    FragileSpectrum,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterEvidence {
    pub value: ComplexScalar,
    pub is_zero: bool,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub n: usize,
    pub rank: usize,
    pub nullity: usize,
    pub nonzero_count: usize,
    pub zero_multiplicity_k: usize,
    pub nonzero_distinct: bool,
    pub clusters: Vec<ClusterEvidence>,
    /// Whether `clusters[..].geometric_multiplicity` were computed.
    pub multiplicities_computed: bool,
}

impl Evidence {
    pub fn deficient_clusters(&self) -> impl Iterator<Item = &ClusterEvidence> {
        self.clusters
            .iter()
            .filter(|c| c.geometric_multiplicity.is_some_and(|g| g < c.algebraic_multiplicity))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub reason: Reason,
    pub evidence: Evidence,
    pub policy: TolerancePolicy,
    pub tolerances: ResolvedTolerances,
    pub warnings: Vec<String>,
}

impl Verdict {
    /// One-line summary, e.g. `Defective (necessary condition violated: rank 1 ≠ 0 nonzero eigenvalues)`.
    pub fn summary(&self) -> String {
        let e = &self.evidence;
        let detail = match self.reason {
            Reason::NecessaryViolated => format!(
                "necessary condition violated: rank {} ≠ {} nonzero eigenvalues",
                e.rank, e.nonzero_count
            ),
            Reason::SufficientSatisfied => format!(
                "sufficient condition satisfied: rank {} = {} nonzero eigenvalues, all distinct",
                e.rank, e.nonzero_count
            ),
            Reason::RepeatedNonzeroEigenvalue => format!(
                "rank {} = {} nonzero eigenvalues but a nonzero eigenvalue is repeated",
                e.rank, e.nonzero_count
            ),
            Reason::MultiplicityResolved => match e.deficient_clusters().next() {
                Some(c) => format!(
                    "geometric multiplicity {} < algebraic multiplicity {} at eigenvalue {}",
                    c.geometric_multiplicity.unwrap_or(0),
                    c.algebraic_multiplicity,
                    fmt_complex(c.value)
                ),
                None => "geometric = algebraic multiplicity for every eigenvalue".to_string(),
            },
            Reason::FragileSpectrum => "an eigenvalue lies too close to the zero threshold to count reliably".into(),
        };
        format!("{} ({detail})", self.outcome)
    }
}

/// Rank report and clustered spectrum of one matrix under one policy.
#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub rank: RankReport,
    pub spectrum: Spectrum,
}

impl Analysis {
    pub fn of(a: &Matrix, policy: &TolerancePolicy) -> Result<Self> {
        a.require_square("diagonalizability analysis")?;
        policy.validate()?;
        Ok(Self {
            rank: numerical_rank(a, policy)?,
            spectrum: Spectrum::of(a, policy)?,
        })
    }

    fn evidence(&self, records: Option<&[MultiplicityRecord]>) -> Evidence {
        let s = &self.spectrum;
        let clusters = s
            .clusters
            .iter()
            .enumerate()
            .map(|(i, c)| ClusterEvidence {
                value: c.value,
                is_zero: c.is_zero,
                algebraic_multiplicity: c.algebraic_multiplicity,
                geometric_multiplicity: records.map(|r| r[i].geometric_multiplicity),
            })
            .collect();
        Evidence {
            n: s.n,
            rank: self.rank.rank,
            nullity: self.rank.nullity,
            nonzero_count: nonzero_count(s),
            zero_multiplicity_k: s.zero_multiplicity_k,
            nonzero_distinct: nonzero_distinct(s),
            clusters,
            multiplicities_computed: records.is_some(),
        }
    }

    fn verdict(&self, outcome: Outcome, reason: Reason, records: Option<&[MultiplicityRecord]>) -> Verdict {
        let mut warnings = self.spectrum.warnings.clone();
        if let Some(records) = records {
            for r in records.iter().filter(|r| r.clamped) {
                warnings.push(format!(
                    "geometric multiplicity at {} was clamped into 1..={}",
                    fmt_complex(r.cluster.value),
                    r.algebraic_multiplicity()
                ));
            }
        }
        let bound = zero_rank_bound(&self.spectrum, &self.rank);
        warnings.extend(bound.warning);
        Verdict {
            outcome,
            reason,
            evidence: self.evidence(records),
            policy: self.spectrum.policy,
            tolerances: self.spectrum.tolerances,
            warnings,
        }
    }

    fn two_step(&self) -> (Outcome, Reason) {
        if self.spectrum.fragile {
            (Outcome::Indeterminate, Reason::FragileSpectrum)
        } else if !necessary_check(&self.rank, &self.spectrum) {
            (Outcome::Defective, Reason::NecessaryViolated)
        } else if sufficient_check(&self.rank, &self.spectrum) {
            (Outcome::Diagonalizable, Reason::SufficientSatisfied)
        } else {
            (Outcome::Indeterminate, Reason::RepeatedNonzeroEigenvalue)
        }
    }
}

/// `rank(A)` equals the number of nonzero eigenvalues. False proves `A` defective.
pub fn necessary_check(rank: &RankReport, s: &Spectrum) -> bool {
    rank.rank == nonzero_count(s)
}

/// Necessary condition plus distinct nonzero eigenvalues. True proves `A` diagonalizable.
pub fn sufficient_check(rank: &RankReport, s: &Spectrum) -> bool {
    necessary_check(rank, s) && nonzero_distinct(s)
}

/// The two-step method: necessary condition, then sufficient condition,
/// otherwise Indeterminate. A fragile spectrum is always Indeterminate.
pub fn classify_two_step(a: &Matrix, policy: &TolerancePolicy) -> Result<Verdict> {
    let analysis = Analysis::of(a, policy)?;
    let (outcome, reason) = analysis.two_step();
    Ok(analysis.verdict(outcome, reason, None))
}

/// Two-step method, with the inconclusive branch resolved by comparing
/// geometric and algebraic multiplicity of every distinct eigenvalue.
///
/// Multiplicities are attached as evidence for every non-fragile verdict. A
/// definitive two-step verdict is never overturned; disagreement with the
/// multiplicities is reported as a warning.
pub fn classify_full(a: &Matrix, policy: &TolerancePolicy) -> Result<Verdict> {
    let analysis = Analysis::of(a, policy)?;
    classify_full_with(a, &analysis)
}

pub fn classify_full_with(a: &Matrix, analysis: &Analysis) -> Result<Verdict> {
    let (outcome, reason) = analysis.two_step();
    if reason == Reason::FragileSpectrum {
        return Ok(analysis.verdict(outcome, reason, None));
    }
    let records = geometric_multiplicities(a, &analysis.spectrum)?;
    let all_equal = records.iter().all(|r| !r.is_deficient());
    let mut verdict = match reason {
        Reason::RepeatedNonzeroEigenvalue => {
            let outcome = if all_equal {
                Outcome::Diagonalizable
            } else {
                Outcome::Defective
            };
            analysis.verdict(outcome, Reason::MultiplicityResolved, Some(&records))
        }
        _ => analysis.verdict(outcome, reason, Some(&records)),
    };
    let disagrees = match verdict.outcome {
        Outcome::Diagonalizable => !all_equal,
        Outcome::Defective => all_equal,
        Outcome::Indeterminate => false,
    };
    if disagrees {
        verdict.warnings.push(format!(
            "multiplicity comparison disagrees with the {:?} verdict; the spectrum is numerically borderline",
            verdict.reason
        ));
    }
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// `rank >= n - k`, and `rank == n - 1` when `k == 1`.
    pub holds: bool,
    /// `n - k`.
    pub bound: usize,
    /// `Some(n - 1)` when zero is a simple eigenvalue.
    pub exact: Option<usize>,
    pub warning: Option<String>,
}

/// Rank bounds from the zero eigenvalue multiplicity `k`: `rank >= n - k`
/// always, and `rank = n - 1` when `k = 1`. Both hold unconditionally in
/// exact arithmetic, so a violation means the rank and zero thresholds
/// disagree.
pub fn zero_rank_bound(s: &Spectrum, rank: &RankReport) -> BoundReport {
    let n = s.n;
    let k = s.zero_multiplicity_k;
    let bound = n - k;
    let exact = (k == 1).then(|| n - 1);
    let holds = rank.rank >= bound && exact.is_none_or(|e| rank.rank == e);
    let warning = (!holds).then(|| {
        format!(
            "rank {} violates the zero-multiplicity bound (n = {n}, k = {k}); rank and zero thresholds are inconsistent",
            rank.rank
        )
    });
    BoundReport {
        holds,
        bound,
        exact,
        warning,
    }
}

/// `A P = P D` with unit-norm eigenvector columns.
#[derive(Clone, Debug, Serialize)]
pub struct Eigenbasis {
    /// Diagonal of `D`: cluster values repeated by algebraic multiplicity.
    pub eigenvalues: Vec<ComplexScalar>,
    #[serde(skip)]
    pub vectors: CMatrix,
    /// `||A P - P D||_F / max(1, ||A||_F)`.
    pub residual: f64,
    pub eigenvector_det_magnitude: f64,
    pub condition: f64,
    pub verdict: Verdict,
    /// Built despite a non-diagonalizable verdict.
    pub forced: bool,
}

/// Eigendecomposition from null-space bases of `A - lambda I`, one per
/// distinct eigenvalue.
///
/// Requires a Diagonalizable verdict from [`classify_full`]. With `force`,
/// deficient clusters are padded with the null vector closest to each
/// remaining raw eigenvalue and no conditioning check is applied; the
/// residual and determinant show the damage.
pub fn eigendecompose(a: &Matrix, policy: &TolerancePolicy, force: bool) -> Result<Eigenbasis> {
    let n = a.require_square("eigendecompose")?;
    let analysis = Analysis::of(a, policy)?;
    let verdict = classify_full_with(a, &analysis)?;
    if verdict.outcome != Outcome::Diagonalizable && !force {
        if verdict.outcome == Outcome::Defective {
            let (value, am, gm) = match verdict.evidence.deficient_clusters().next() {
                Some(c) => (c.value, c.algebraic_multiplicity, c.geometric_multiplicity.unwrap_or(0)),
                None => {
                    let z = analysis.spectrum.zero_cluster();
                    (
                        ComplexScalar::new(0.0, 0.0),
                        z.map_or(0, |c| c.algebraic_multiplicity),
                        verdict.evidence.nullity,
                    )
                }
            };
            return Err(Error::Defective {
                value: fmt_complex(value),
                am,
                gm,
            });
        }
        return Err(Error::NotCertified(verdict.summary()));
    }

    let s = &analysis.spectrum;
    let mut columns: Vec<Vec<ComplexScalar>> = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for c in &s.clusters {
        let ns = null_space_within(a, c.value, gm_floor(s, c), &s.policy)?;
        let take = ns.dim().min(c.algebraic_multiplicity);
        columns.extend(ns.basis.into_iter().take(take));
        if take < c.algebraic_multiplicity {
            // Only reachable with force.
            for m in &c.members[take..] {
                let sv = complex_right_singular(&CMatrix::shifted_real(a, *m))?;
                columns.push(sv[0].1.clone());
            }
        }
        diag.extend(std::iter::repeat_n(c.value, c.algebraic_multiplicity));
    }
    let p = CMatrix::from_columns(n, &columns);

    let ap = CMatrix::from_real(a).matmul(&p);
    let mut r = 0.0;
    for i in 0..n {
        for j in 0..n {
            r += (ap[(i, j)] - p[(i, j)] * diag[j]).norm_sqr();
        }
    }
    let residual = r.sqrt() / a.frobenius_norm().max(1.0);

    let sv = complex_right_singular(&p)?;
    let (smin, smax) = (sv[0].0, sv[n - 1].0);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_EIGENVECTOR_CONDITION && !force {
        return Err(Error::Conditioning(condition));
    }
    let eigenvector_det_magnitude = ComplexLu::new(&p, 0.0).det().norm();

    Ok(Eigenbasis {
        eigenvalues: diag,
        vectors: p,
        residual,
        eigenvector_det_magnitude,
        condition,
        verdict,
        forced: force,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WarningReport {
    pub det_magnitude: f64,
    pub inconclusive: bool,
    pub message: String,
}

/// Flags eigenvector determinants whose magnitude lies in
/// `[eps, 1e-4]`: too small to trust as nonzero, too large to call singular.
/// Use the rank/eigenvalue verdict instead.
pub fn det_check_warning(e: &Eigenbasis) -> WarningReport {
    let d = e.eigenvector_det_magnitude;
    let inconclusive = (EPS..=DET_INCONCLUSIVE_MAX).contains(&d);
    let message = if inconclusive {
        format!(
            "|det P| = {d:.3e} is near zero but not zero; the determinant cannot decide diagonalizability, rely on the verdict ({})",
            e.verdict.summary()
        )
    } else if d < EPS {
        format!("|det P| = {d:.3e} is below machine precision")
    } else {
        format!("|det P| = {d:.3e}")
    };
    WarningReport {
        det_magnitude: d,
        inconclusive,
        message,
    }
}

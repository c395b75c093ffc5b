//! Distinct eigenvalues, algebraic and geometric multiplicities.
//!
//! Raw eigenvalues from the Schur form are grouped into clusters, one per
//! distinct eigenvalue, and each cluster is tested against zero. Both tests
//! are performed at a per-eigenvalue radius `min(kappa * tau, cap)`, where
//! `tau` is the policy threshold, `kappa` the eigenvalue condition number and
//! `cap = tau^(1/3) * ||A||^(2/3)`. With `kappa = 1` this is exactly `tau`.
//! A computed eigenvalue lies within roughly `kappa * ||E||` of an exact one
//! for a backward error `E`; eigenvalues split off a Jordan block have
//! `kappa` of order `1 / spread`, so they fall back into one cluster. The cap
//! bounds how far a single eigenvalue can be pulled, which resolves Jordan
//! blocks up to size three.
//!
//! At a derogatory eigenvalue (several Jordan blocks, one of size > 1) the
//! per-eigenvalue condition number is meaningless, since the eigenvectors
//! are not unique. Pairs within the cap that the radius test keeps apart are
//! therefore also tested for connectivity of the `tau`-pseudospectrum:
//! `sigma_min(A - zI) <= tau` along the segment joining them. For a normal
//! matrix this is again the plain threshold rule.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    complex_right_singular, eigenvalue_conditions, eigenvalues, geometric_floor, null_space_within, spectral_norm,
};
use crate::matrix::{CMatrix, ComplexScalar, Matrix};
use crate::policy::{ResolvedTolerances, TolerancePolicy};

/// Fragility band around the zero radius.
const FRAGILE_BAND: (f64, f64) = (0.5, 2.0);
/// Merge decisions this close to the radius are reported as ambiguous.
const AMBIGUOUS_BAND: (f64, f64) = (0.9, 1.1);
/// Segment subdivisions for the pseudospectral connectivity test.
const SEGMENT_SAMPLES: usize = 8;

/// One distinct eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenCluster {
    /// Mean of the members.
    pub value: ComplexScalar,
    pub algebraic_multiplicity: usize,
    pub members: Vec<ComplexScalar>,
    /// Condition number of each member, same order as `members`.
    pub conditions: Vec<f64>,
    pub is_zero: bool,
    /// Largest distance from a member to `value`.
    pub spread: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    pub clusters: Vec<EigenCluster>,
    pub n: usize,
    pub zero_multiplicity_k: usize,
    pub policy: TolerancePolicy,
    pub tolerances: ResolvedTolerances,
    /// Some eigenvalue sits within a factor of two of its zero radius.
    pub fragile: bool,
    /// Some merge decision sat within 10% of its radius.
    pub ambiguous: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicityRecord {
    pub cluster: EigenCluster,
    pub geometric_multiplicity: usize,
    pub tolerance_used: f64,
    /// The raw null-space count fell outside `1..=AM` and was clamped.
    pub clamped: bool,
}

impl MultiplicityRecord {
    pub fn algebraic_multiplicity(&self) -> usize {
        self.cluster.algebraic_multiplicity
    }

    pub fn is_deficient(&self) -> bool {
        self.geometric_multiplicity < self.cluster.algebraic_multiplicity
    }
}

impl Spectrum {
    /// Eigenvalues of `a`, conditioned and clustered under `policy`.
    pub fn of(a: &Matrix, policy: &TolerancePolicy) -> Result<Spectrum> {
        let n = a.require_square("spectrum")?;
        let eigs = eigenvalues(a)?;
        let kappas = eigenvalue_conditions(a, &eigs);
        let scale = spectral_norm(a)?;
        cluster_impl(&eigs, &kappas, n, policy, scale, Some(a))
    }

    pub fn nonzero_clusters(&self) -> impl Iterator<Item = &EigenCluster> {
        self.clusters.iter().filter(|c| !c.is_zero)
    }

    pub fn zero_cluster(&self) -> Option<&EigenCluster> {
        self.clusters.iter().find(|c| c.is_zero)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.clusters.iter().fold(0.0, |m, c| m.max(c.value.norm()))
    }
}

/// Clusters raw eigenvalues with unit condition numbers, i.e. at exactly the
/// policy thresholds. `scale` is the `||A||_2` estimate used to resolve
/// relative thresholds.
pub fn cluster_spectrum(
    eigs: &[ComplexScalar],
    n: usize,
    policy: &TolerancePolicy,
    scale: f64,
) -> Result<Spectrum> {
    cluster_conditioned(eigs, &vec![1.0; eigs.len()], n, policy, scale)
}

/// Single-linkage clustering: eigenvalues `i` and `j` are linked when
/// `|l_i - l_j| <= max(r_i, r_j)` with `r` the condition-scaled cluster radius.
/// Without the matrix no pseudospectral test is possible.
pub fn cluster_conditioned(
    eigs: &[ComplexScalar],
    conditions: &[f64],
    n: usize,
    policy: &TolerancePolicy,
    scale: f64,
) -> Result<Spectrum> {
    cluster_impl(eigs, conditions, n, policy, scale, None)
}

/// `sigma_min(a - zI) <= tau` at the sample points of the segment `z0..z1`.
/// The start point is sampled only if `include_start`; end points that are
/// computed eigenvalues need no check.
fn pseudo_connected(
    a: &Matrix,
    z0: ComplexScalar,
    z1: ComplexScalar,
    tau: f64,
    include_start: bool,
) -> Result<bool> {
    let first = usize::from(!include_start);
    for k in first..SEGMENT_SAMPLES {
        let z = z0 + (z1 - z0) * (k as f64 / SEGMENT_SAMPLES as f64);
        let sv = complex_right_singular(&CMatrix::shifted_real(a, z))?;
        if sv[0].0 > tau {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cluster_impl(
    eigs: &[ComplexScalar],
    conditions: &[f64],
    n: usize,
    policy: &TolerancePolicy,
    scale: f64,
    probe: Option<&Matrix>,
) -> Result<Spectrum> {
    if eigs.len() != n || conditions.len() != n {
        return Err(Error::Dimension(format!(
            "expected {n} eigenvalues and conditions, got {} and {}",
            eigs.len(),
            conditions.len()
        )));
    }
    let tol = policy.resolve(n.max(1), scale)?;
    let s = tol.scale;
    let cap = |tau: f64| (tau.cbrt() * s.powf(2.0 / 3.0)).max(tau);
    let radius = |tau: f64, kappa: f64| (kappa.max(1.0) * tau).min(cap(tau));
    let zero_r: Vec<f64> = conditions.iter().map(|&k| radius(tol.zero, k)).collect();
    let clus_r: Vec<f64> = conditions.iter().map(|&k| radius(tol.cluster, k)).collect();

    let mut warnings = Vec::new();
    let mut fragile = false;
    let mut is_zero = Vec::with_capacity(n);
    for (l, &r) in eigs.iter().zip(&zero_r) {
        let ratio = l.norm() / r;
        let connected = match probe {
            Some(a) if ratio > 1.0 && l.norm() <= cap(tol.zero) => {
                pseudo_connected(a, ComplexScalar::new(0.0, 0.0), *l, tol.zero, true)?
            }
            _ => false,
        };
        if (FRAGILE_BAND.0..=FRAGILE_BAND.1).contains(&ratio) && !connected {
            fragile = true;
            warnings.push(format!(
                "eigenvalue {} is within a factor of two of the zero radius {r:.3e}",
                fmt_complex(*l)
            ));
        }
        is_zero.push(ratio <= 1.0 || connected);
    }

    // Union-find over non-zero eigenvalues; zero eigenvalues form one cluster.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut ambiguous = false;
    for i in 0..n {
        for j in i + 1..n {
            let d = (eigs[i] - eigs[j]).norm();
            let r = clus_r[i].max(clus_r[j]);
            let ratio = d / r;
            if ratio >= AMBIGUOUS_BAND.0 && ratio <= AMBIGUOUS_BAND.1 {
                ambiguous = true;
                warnings.push(format!(
                    "merge of {} and {} is within 10% of the cluster radius {r:.3e}",
                    fmt_complex(eigs[i]),
                    fmt_complex(eigs[j])
                ));
            }
            if ratio > 1.0 {
                let candidate = !is_zero[i] && !is_zero[j] && d <= cap(tol.cluster);
                let linked = match probe {
                    Some(a) if candidate && find(&mut parent, i) != find(&mut parent, j) => {
                        pseudo_connected(a, eigs[i], eigs[j], tol.cluster, false)?
                    }
                    _ => false,
                };
                if !linked {
                    continue;
                }
            }
            match (is_zero[i], is_zero[j]) {
                (false, false) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                (true, true) => {}
                _ => {
                    ambiguous = true;
                    warnings.push(format!(
                        "{} and {} are within cluster radius but only one passes the zero test",
                        fmt_complex(eigs[i]),
                        fmt_complex(eigs[j])
                    ));
                }
            }
        }
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut zero_members = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for (i, &zero) in is_zero.iter().enumerate() {
        if zero {
            zero_members.push(i);
            continue;
        }
        let root = find(&mut parent, i);
        if root_slot[root] == usize::MAX {
            root_slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[root]].push(i);
    }

    let make = |idx: &[usize], zero: bool| -> EigenCluster {
        let members: Vec<ComplexScalar> = idx.iter().map(|&i| eigs[i]).collect();
        let mut value = members.iter().sum::<ComplexScalar>() / members.len() as f64;
        let spread = members.iter().fold(0.0f64, |m, z| m.max((z - value).norm()));
        // Self-conjugate clusters have a real mean.
        if value.im.abs() <= spread || zero {
            value.im = 0.0;
        }
        EigenCluster {
            value,
            algebraic_multiplicity: members.len(),
            members,
            conditions: idx.iter().map(|&i| conditions[i]).collect(),
            is_zero: zero,
            spread,
        }
    };

    let mut clusters: Vec<EigenCluster> = groups.iter().map(|g| make(g, false)).collect();
    if !zero_members.is_empty() {
        clusters.push(make(&zero_members, true));
    }
    for c in &clusters {
        let tau = if c.is_zero { tol.zero } else { tol.cluster };
        if c.algebraic_multiplicity > 1 && c.spread > tau {
            warnings.push(format!(
                "{} eigenvalues merged at {} span {:.3e}, beyond the plain threshold {tau:.3e}; \
                 they are counted as one repeated eigenvalue because their sensitivity covers the gap",
                c.algebraic_multiplicity,
                fmt_complex(c.value),
                c.spread
            ));
        }
    }
    clusters.sort_by(|a, b| {
        b.is_zero
            .cmp(&a.is_zero)
            .then(a.value.re.total_cmp(&b.value.re))
            .then(b.value.im.total_cmp(&a.value.im))
    });

    Ok(Spectrum {
        zero_multiplicity_k: zero_members.len(),
        clusters,
        n,
        policy: *policy,
        tolerances: tol,
        fragile,
        ambiguous,
        warnings,
    })
}

/// Number of nonzero eigenvalues counted with multiplicity, `n - k`.
pub fn nonzero_count(s: &Spectrum) -> usize {
    s.nonzero_clusters().map(|c| c.algebraic_multiplicity).sum()
}

/// Every nonzero eigenvalue is simple. Vacuously true without nonzero eigenvalues.
pub fn nonzero_distinct(s: &Spectrum) -> bool {
    s.nonzero_clusters().all(|c| c.algebraic_multiplicity == 1)
}

/// Geometric multiplicity of every cluster: the null-space dimension of
/// `a - value * I`.
///
/// The singular-value threshold is the largest of the policy rank threshold
/// on the shifted matrix, the cluster spread plus cluster threshold, and the
/// geometric mean of cluster threshold and `||A||_2`. Results are clamped to
/// `1..=AM` since every eigenvalue has at least one eigenvector.
pub fn geometric_multiplicities(a: &Matrix, s: &Spectrum) -> Result<Vec<MultiplicityRecord>> {
    a.require_square("geometric_multiplicities")?;
    s.clusters
        .iter()
        .map(|c| {
            let ns = null_space_within(a, c.value, gm_floor(s, c), &s.policy)?;
            let raw = ns.dim();
            let gm = raw.clamp(1, c.algebraic_multiplicity);
            Ok(MultiplicityRecord {
                cluster: c.clone(),
                geometric_multiplicity: gm,
                tolerance_used: ns.tolerance_used,
                clamped: gm != raw,
            })
        })
        .collect()
}

pub(crate) fn gm_floor(s: &Spectrum, c: &EigenCluster) -> f64 {
    (c.spread + s.tolerances.cluster).max(geometric_floor(s.tolerances.cluster, s.tolerances.scale))
}

/// Six-decimal rendering used in summaries and reports.
pub fn fmt_complex(z: ComplexScalar) -> String {
    if z.im == 0.0 {
        format!("{:.6}", z.re)
    } else if z.im > 0.0 {
        format!("{:.6}+{:.6}i", z.re, z.im)
    } else {
        format!("{:.6}-{:.6}i", z.re, -z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(v: &[f64]) -> Vec<ComplexScalar> {
        v.iter().map(|&x| ComplexScalar::new(x, 0.0)).collect()
    }

    fn m2(rows: [[f64; 2]; 2]) -> Matrix {
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn worked_two_by_two_clusters() {
        let p = TolerancePolicy::default();
        let s = cluster_spectrum(&reals(&[1.0, 1.0]), 2, &p, 1.0).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert_eq!(s.clusters[0].value, ComplexScalar::new(1.0, 0.0));
        assert_eq!(s.clusters[0].algebraic_multiplicity, 2);
        assert_eq!(s.zero_multiplicity_k, 0);
        assert_eq!(nonzero_count(&s), 2);
        assert!(!nonzero_distinct(&s));

        let s = cluster_spectrum(&reals(&[0.0, 1.0]), 2, &p, 1.0).unwrap();
        assert_eq!(s.clusters.len(), 2);
        assert_eq!(s.zero_multiplicity_k, 1);
        assert!(nonzero_distinct(&s));

        let s = cluster_spectrum(&reals(&[0.0, 0.0]), 2, &p, 1.0).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert!(s.clusters[0].is_zero);
        assert_eq!(s.zero_multiplicity_k, 2);
        assert_eq!(nonzero_count(&s), 0);
        assert!(nonzero_distinct(&s));
    }

    #[test]
    fn zero_matrix_counts() {
        let s = Spectrum::of(&Matrix::zeros(5, 5), &TolerancePolicy::default()).unwrap();
        assert_eq!(nonzero_count(&s), 0);
        assert_eq!(s.zero_multiplicity_k, 5);
        assert!(nonzero_distinct(&s));
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let p = TolerancePolicy::default();
        assert!(cluster_spectrum(&reals(&[1.0]), 2, &p, 1.0).is_err());
    }

    #[test]
    fn conjugate_pairs_stay_separate() {
        let p = TolerancePolicy::default();
        let eigs = vec![ComplexScalar::new(0.5, 0.25), ComplexScalar::new(0.5, -0.25)];
        let s = cluster_spectrum(&eigs, 2, &p, 1.0).unwrap();
        assert_eq!(s.clusters.len(), 2);
        assert_eq!(s.clusters[0].value, s.clusters[1].value.conj());
    }

    #[test]
    fn near_threshold_zero_is_fragile() {
        let p = TolerancePolicy::default();
        let tau = p.resolve(2, 1.0).unwrap().zero;
        let s = cluster_spectrum(&reals(&[1.2 * tau, 1.0]), 2, &p, 1.0).unwrap();
        assert!(s.fragile);
        let s = cluster_spectrum(&reals(&[0.1 * tau, 1.0]), 2, &p, 1.0).unwrap();
        assert!(!s.fragile);
    }

    #[test]
    fn multiplicities_of_examples() {
        let p = TolerancePolicy::default();
        let j = m2([[1.0, 1.0], [0.0, 1.0]]);
        let rec = geometric_multiplicities(&j, &Spectrum::of(&j, &p).unwrap()).unwrap();
        assert_eq!(rec.len(), 1);
        assert_eq!((rec[0].algebraic_multiplicity(), rec[0].geometric_multiplicity), (2, 1));

        let i2 = Matrix::identity(2);
        let rec = geometric_multiplicities(&i2, &Spectrum::of(&i2, &p).unwrap()).unwrap();
        assert_eq!((rec[0].algebraic_multiplicity(), rec[0].geometric_multiplicity), (2, 2));

        let d = Matrix::from_diag(&[2.0, 3.0, 3.0]).unwrap();
        let rec = geometric_multiplicities(&d, &Spectrum::of(&d, &p).unwrap()).unwrap();
        let three = rec.iter().find(|r| r.cluster.value.re == 3.0).unwrap();
        assert_eq!(three.geometric_multiplicity, 2);
    }

    #[test]
    fn similarity_transformed_jordan_block_clusters() {
        // S J S^-1 with J = J2(3) (+) [5], S unimodular.
        let a = Matrix::from_rows(&[[4.0, 1.0, -1.0], [-1.0, 2.0, 1.0], [0.0, 0.0, 5.0]]).unwrap();
        let p = TolerancePolicy::default();
        let s = Spectrum::of(&a, &p).unwrap();
        assert_eq!(s.clusters.len(), 2, "{s:?}");
        let rec = geometric_multiplicities(&a, &s).unwrap();
        let three = rec.iter().find(|r| (r.cluster.value.re - 3.0).abs() < 1e-6).unwrap();
        assert_eq!((three.algebraic_multiplicity(), three.geometric_multiplicity), (2, 1));
    }
}

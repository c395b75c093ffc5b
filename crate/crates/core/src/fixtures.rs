//! Test matrices with known Jordan structure.
//!
//! A fixture is `S J S^-1` where `J` is a real Jordan form with integer
//! entries and `S` is a product of a permutation and integer transvections
//! `I ± e_i e_j^T`. Such `S` is unimodular, so `S^-1` is integer too and the
//! fixture is exactly representable: its rank and Jordan structure are those
//! of `J` with no rounding in the construction.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::diagnostics::Outcome;
use crate::error::{Error, Result};
use crate::ionet::IoTable;
use crate::linalg::singular_values;
use crate::matrix::{ComplexScalar, Matrix};

/// One diagonal block of the real Jordan form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Block {
    /// `size x size` Jordan block with integer eigenvalue `value`.
    Jordan { value: i64, size: usize },
    /// `[[re, -im], [im, re]]`, eigenvalues `re ± im i`. `im != 0`.
    ComplexPair { re: i64, im: i64 },
}

impl Block {
    pub fn dim(&self) -> usize {
        match *self {
            Block::Jordan { size, .. } => size,
            Block::ComplexPair { .. } => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureKind {
    Jordan,
    Diagonalizable,
    RankProfile,
}

impl std::str::FromStr for FixtureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jordan" => Ok(FixtureKind::Jordan),
            "diagonalizable" => Ok(FixtureKind::Diagonalizable),
            "rank-profile" => Ok(FixtureKind::RankProfile),
            other => Err(Error::Profile(format!("unknown fixture kind {other:?}"))),
        }
    }
}

/// Multiplicities of one distinct eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrueMultiplicity {
    pub value: ComplexScalar,
    pub algebraic: usize,
    pub geometric: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroundTruth {
    pub n: usize,
    pub blocks: Vec<Block>,
    pub expected: Outcome,
    pub rank: usize,
    pub nonzero_count: usize,
    pub zero_multiplicity: usize,
    pub nonzero_distinct: bool,
    /// One entry per distinct eigenvalue, zero first, then by real part and
    /// descending imaginary part.
    pub multiplicities: Vec<TrueMultiplicity>,
    /// 2-norm condition number of `S`.
    pub similarity_condition: f64,
    pub seed: u64,
}

impl GroundTruth {
    fn of(blocks: Vec<Block>, similarity_condition: f64, seed: u64) -> Self {
        let n = blocks.iter().map(Block::dim).sum();
        let mut by_value: BTreeMap<(i64, i64), (usize, usize)> = BTreeMap::new();
        for b in &blocks {
            match *b {
                Block::Jordan { value, size } => {
                    let e = by_value.entry((value, 0)).or_default();
                    e.0 += size;
                    e.1 += 1;
                }
                Block::ComplexPair { re, im } => {
                    for key in [(re, im), (re, -im)] {
                        let e = by_value.entry(key).or_default();
                        e.0 += 1;
                        e.1 += 1;
                    }
                }
            }
        }
        let mut multiplicities: Vec<TrueMultiplicity> = by_value
            .into_iter()
            .map(|((re, im), (am, gm))| TrueMultiplicity {
                value: ComplexScalar::new(re as f64, im as f64),
                algebraic: am,
                geometric: gm,
            })
            .collect();
        multiplicities.sort_by(|a, b| {
            let za = a.value.norm() == 0.0;
            let zb = b.value.norm() == 0.0;
            zb.cmp(&za)
                .then(a.value.re.total_cmp(&b.value.re))
                .then(b.value.im.total_cmp(&a.value.im))
        });
        let zero_multiplicity = multiplicities
            .iter()
            .find(|m| m.value.norm() == 0.0)
            .map_or(0, |m| m.algebraic);
        let zero_blocks = blocks
            .iter()
            .filter(|b| matches!(b, Block::Jordan { value: 0, .. }))
            .count();
        let defective = blocks.iter().any(|b| matches!(b, Block::Jordan { size, .. } if *size > 1))
            || multiplicities.iter().any(|m| m.geometric < m.algebraic);
        let nonzero_distinct = multiplicities
            .iter()
            .filter(|m| m.value.norm() != 0.0)
            .all(|m| m.algebraic == 1);
        Self {
            n,
            blocks,
            expected: if defective {
                Outcome::Defective
            } else {
                Outcome::Diagonalizable
            },
            rank: n - zero_blocks,
            nonzero_count: n - zero_multiplicity,
            zero_multiplicity,
            nonzero_distinct,
            multiplicities,
            similarity_condition,
            seed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub matrix: Matrix,
    pub truth: GroundTruth,
}

/// Parameters of [`generate`].
#[derive(Clone, Debug)]
pub struct FixtureRequest {
    pub kind: FixtureKind,
    pub n: usize,
    /// Required for `RankProfile`.
    pub rank: Option<usize>,
    /// Required for `RankProfile`.
    pub nonzero: Option<usize>,
    pub seed: u64,
}

/// Upper bound on `cond(S)` for diagonalizable fixtures.
pub const MAX_CONDITION: f64 = 1e4;
/// Upper bound on `cond(S)` when `J` has nontrivial Jordan blocks, whose
/// eigenvalues are far more sensitive to the similarity.
pub const MAX_CONDITION_DEFECTIVE: f64 = 1e2;

/// Builds a fixture from a request.
///
/// - `Jordan`: `J_m(1)` with `m = min(n, 3)`, plus `n - m` distinct nonzero
///   eigenvalues other than 1. Requires `n >= 2`.
/// - `Diagonalizable`: `n` distinct nonzero eigenvalues, real or in conjugate pairs.
/// - `RankProfile`: `nonzero` distinct nonzero eigenvalues and `n - nonzero`
///   zeros split as evenly as possible over `n - rank` zero Jordan blocks.
pub fn generate(req: &FixtureRequest) -> Result<Fixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let n = req.n;
    if n == 0 {
        return Err(Error::Profile("n must be at least 1".into()));
    }
    let blocks = match req.kind {
        FixtureKind::Jordan => {
            if n < 2 {
                return Err(Error::Profile("a Jordan fixture needs n >= 2".into()));
            }
            let m = n.min(3);
            let mut blocks = vec![Block::Jordan { value: 1, size: m }];
            blocks.extend(distinct_nonzero_blocks(&mut rng, n - m, &[1]));
            blocks
        }
        FixtureKind::Diagonalizable => distinct_nonzero_blocks(&mut rng, n, &[]),
        FixtureKind::RankProfile => {
            let rank = req
                .rank
                .ok_or_else(|| Error::Profile("a rank-profile fixture needs a rank".into()))?;
            let nonzero = req
                .nonzero
                .ok_or_else(|| Error::Profile("a rank-profile fixture needs a nonzero-eigenvalue count".into()))?;
            let mut blocks = zero_blocks(n, rank, nonzero)?;
            blocks.extend(distinct_nonzero_blocks(&mut rng, nonzero, &[]));
            blocks
        }
    };
    from_blocks(blocks, &mut rng, req.seed)
}

/// Similarity-transforms the block diagonal matrix of `blocks`.
pub fn from_blocks(blocks: Vec<Block>, rng: &mut ChaCha8Rng, seed: u64) -> Result<Fixture> {
    let n: usize = blocks.iter().map(Block::dim).sum();
    if n == 0 {
        return Err(Error::Profile("empty block list".into()));
    }
    let j = jordan_matrix(&blocks);
    let defective = blocks.iter().any(|b| matches!(b, Block::Jordan { size, .. } if *size > 1));
    let limit = if defective {
        MAX_CONDITION_DEFECTIVE
    } else {
        MAX_CONDITION
    };
    let mut ops = 2 * n;
    loop {
        let (a, s) = similarity(&j, rng, ops);
        let sv = singular_values(&s)?;
        let cond = sv.largest() / sv.smallest();
        if cond <= limit {
            return Ok(Fixture {
                matrix: a,
                truth: GroundTruth::of(blocks, cond, seed),
            });
        }
        ops = (ops * 3 / 4).max(1);
    }
}

/// Zero Jordan blocks for a (dimension, rank, nonzero count) profile.
///
/// Infeasible when `rank > n`, `nonzero > rank` (the zero eigenvalues would
/// need fewer than zero blocks), or `rank == n > nonzero` (a zero
/// eigenvalue forces a rank drop).
pub fn zero_blocks(n: usize, rank: usize, nonzero: usize) -> Result<Vec<Block>> {
    if rank > n {
        return Err(Error::Profile(format!("rank {rank} exceeds dimension {n}")));
    }
    if nonzero > rank {
        return Err(Error::Profile(format!(
            "nonzero eigenvalue count {nonzero} exceeds rank {rank}"
        )));
    }
    let k = n - nonzero;
    let g = n - rank;
    if k > 0 && g == 0 {
        return Err(Error::Profile(format!(
            "full rank {rank} is incompatible with {k} zero eigenvalues"
        )));
    }
    Ok((0..g)
        .map(|i| Block::Jordan {
            value: 0,
            size: k / g + usize::from(i < k % g),
        })
        .collect())
}

/// `count` distinct nonzero eigenvalues as 1x1 blocks and complex pairs,
/// avoiding the real values in `exclude`.
pub fn distinct_nonzero_blocks(rng: &mut ChaCha8Rng, count: usize, exclude: &[i64]) -> Vec<Block> {
    let range = (2 * count as i64).max(4);
    let mut reals: Vec<i64> = (-range..=range)
        .filter(|v| *v != 0 && !exclude.contains(v))
        .collect();
    reals.shuffle(rng);
    let pairs = if count >= 2 { rng.gen_range(0..=count / 4) } else { 0 };
    let mut blocks = Vec::with_capacity(count);
    let mut used_pairs = Vec::new();
    while used_pairs.len() < pairs {
        let re = rng.gen_range(-range..=range);
        let im = rng.gen_range(1..=range);
        if !used_pairs.contains(&(re, im)) {
            used_pairs.push((re, im));
            blocks.push(Block::ComplexPair { re, im });
        }
    }
    blocks.extend(
        reals
            .into_iter()
            .take(count - 2 * pairs)
            .map(|value| Block::Jordan { value, size: 1 }),
    );
    blocks.shuffle(rng);
    blocks
}

/// A random Jordan structure of dimension `n >= 2` with at least one block
/// of size 2 or 3. Distinct values may repeat across blocks.
pub fn random_defective_blocks(rng: &mut ChaCha8Rng, n: usize) -> Vec<Block> {
    assert!(n >= 2, "a defective structure needs n >= 2");
    let values: Vec<i64> = (0..rng.gen_range(1..=n.min(4)))
        .map(|_| rng.gen_range(-5..=5))
        .collect();
    let first = rng.gen_range(2..=n.min(3));
    let mut blocks = vec![Block::Jordan {
        value: values[0],
        size: first,
    }];
    let mut left = n - first;
    while left > 0 {
        let size = rng.gen_range(1..=left.min(3));
        let value = values[rng.gen_range(0..values.len())];
        blocks.push(Block::Jordan { value, size });
        left -= size;
    }
    blocks.shuffle(rng);
    blocks
}

/// A random semisimple structure of dimension `n`: repeated values, zeros
/// and complex pairs allowed, every Jordan block 1x1.
pub fn random_semisimple_blocks(rng: &mut ChaCha8Rng, n: usize) -> Vec<Block> {
    let mut blocks = Vec::with_capacity(n);
    let mut left = n;
    while left > 0 {
        if left >= 2 && rng.gen_bool(0.2) {
            blocks.push(Block::ComplexPair {
                re: rng.gen_range(-6..=6),
                im: rng.gen_range(1..=4),
            });
            left -= 2;
        } else {
            blocks.push(Block::Jordan {
                value: rng.gen_range(-6..=6),
                size: 1,
            });
            left -= 1;
        }
    }
    blocks
}

/// Nonnegative IO table whose column-normalized share matrix has dimension
/// `n`, the given rank and nonzero-eigenvalue count, plus `isolated`
/// disconnected sectors that pruning should remove.
///
/// Shares are `[[D + U, C], [0, N]]` up to a random permutation, with `D`
/// distinct positive diagonal shares, `U` strictly upper triangular, `N` the
/// nilpotent Jordan form of the profile and small positive couplings `C`.
/// Block triangularity with disjoint diagonal spectra keeps the Jordan
/// structure of `D` and `N`. Every sector has gross outlay 1000.
pub fn profile_table(n: usize, rank: usize, nonzero: usize, isolated: usize, seed: u64) -> Result<IoTable> {
    const OUTLAY: f64 = 1000.0;
    let zeros = zero_blocks(n, rank, nonzero)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = nonzero;
    let total = n + isolated;
    let mut flows = Matrix::zeros(total, total);
    let mut diag: Vec<u32> = (20..=600).collect();
    diag.shuffle(&mut rng);
    for i in 0..p {
        flows[(i, i)] = f64::from(diag[i]);
        for j in i + 1..n {
            flows[(i, j)] = f64::from(rng.gen_range(0..=3u32));
        }
    }
    let mut o = p;
    for b in &zeros {
        for i in 0..b.dim().saturating_sub(1) {
            flows[(o + i, o + i + 1)] = 500.0;
        }
        o += b.dim();
    }
    let mut perm: Vec<usize> = (0..total).collect();
    perm.shuffle(&mut rng);
    let mut shuffled = Matrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            shuffled[(perm[i], perm[j])] = flows[(i, j)];
        }
    }
    let names = (1..=total).map(|i| format!("sector_{i:02}")).collect();
    IoTable::new(names, shuffled, vec![OUTLAY; total])
}

fn jordan_matrix(blocks: &[Block]) -> Matrix {
    let n = blocks.iter().map(Block::dim).sum();
    let mut j = Matrix::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        match *b {
            Block::Jordan { value, size } => {
                for i in 0..size {
                    j[(o + i, o + i)] = value as f64;
                    if i + 1 < size {
                        j[(o + i, o + i + 1)] = 1.0;
                    }
                }
            }
            Block::ComplexPair { re, im } => {
                j[(o, o)] = re as f64;
                j[(o, o + 1)] = -im as f64;
                j[(o + 1, o)] = im as f64;
                j[(o + 1, o + 1)] = re as f64;
            }
        }
        o += b.dim();
    }
    j
}

/// Returns `(S J S^-1, S)` for a random permutation followed by `ops`
/// transvections.
fn similarity(j: &Matrix, rng: &mut ChaCha8Rng, ops: usize) -> (Matrix, Matrix) {
    let n = j.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut a = Matrix::zeros(n, n);
    let mut s = Matrix::zeros(n, n);
    for i in 0..n {
        s[(perm[i], i)] = 1.0;
        for k in 0..n {
            a[(perm[i], perm[k])] = j[(i, k)];
        }
    }
    if n < 2 {
        return (a, s);
    }
    for _ in 0..ops {
        let i = rng.gen_range(0..n);
        let k = (i + rng.gen_range(1..n)) % n;
        let c = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        // E = I + c e_i e_k^T: row i += c row k; E^-1 on the right: col k -= c col i.
        for col in 0..n {
            let v = a[(k, col)];
            a[(i, col)] += c * v;
            let v = s[(k, col)];
            s[(i, col)] += c * v;
        }
        for row in 0..n {
            let v = a[(row, i)];
            a[(row, k)] -= c * v;
        }
    }
    (a, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;
    use crate::policy::TolerancePolicy;

    #[test]
    fn similarity_keeps_trace_and_integrality() {
        let blocks = vec![
            Block::Jordan { value: 3, size: 2 },
            Block::ComplexPair { re: 1, im: 2 },
            Block::Jordan { value: -4, size: 1 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = from_blocks(blocks, &mut rng, 5).unwrap();
        assert_eq!(f.matrix.trace(), 3.0 + 3.0 + 1.0 + 1.0 - 4.0);
        assert!(f.matrix.data().iter().all(|x| x.fract() == 0.0));
        assert!(f.truth.similarity_condition <= MAX_CONDITION_DEFECTIVE);
        assert_eq!(f.truth.expected, Outcome::Defective);
    }

    #[test]
    fn zero_block_split() {
        let b = zero_blocks(36, 32, 31).unwrap();
        let sizes: Vec<usize> = b.iter().map(Block::dim).collect();
        assert_eq!(sizes, vec![2, 1, 1, 1]);
        assert!(zero_blocks(36, 37, 31).is_err());
        assert!(zero_blocks(36, 30, 31).is_err());
        assert!(zero_blocks(5, 5, 4).is_err());
        assert!(zero_blocks(5, 5, 5).unwrap().is_empty());
    }

    #[test]
    fn rank_profile_truth() {
        let req = FixtureRequest {
            kind: FixtureKind::RankProfile,
            n: 36,
            rank: Some(32),
            nonzero: Some(31),
            seed: 1,
        };
        let f = generate(&req).unwrap();
        let t = &f.truth;
        assert_eq!((t.n, t.rank, t.nonzero_count, t.zero_multiplicity), (36, 32, 31, 5));
        assert_eq!(t.expected, Outcome::Defective);
        let r = numerical_rank(&f.matrix, &TolerancePolicy::default()).unwrap();
        assert_eq!(r.rank, 32);
    }

    #[test]
    fn jordan_two_is_example_two_up_to_similarity() {
        let req = FixtureRequest {
            kind: FixtureKind::Jordan,
            n: 2,
            rank: None,
            nonzero: None,
            seed: 0,
        };
        let f = generate(&req).unwrap();
        assert_eq!(f.truth.blocks, vec![Block::Jordan { value: 1, size: 2 }]);
        assert_eq!(f.matrix.trace(), 2.0);
        let a = &f.matrix;
        assert_eq!(a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)], 1.0);
        assert!(generate(&FixtureRequest { n: 1, ..req }).is_err());
    }

    #[test]
    fn multiplicity_table() {
        let t = GroundTruth::of(
            vec![
                Block::Jordan { value: 2, size: 2 },
                Block::Jordan { value: 2, size: 1 },
                Block::Jordan { value: 0, size: 1 },
                Block::ComplexPair { re: 0, im: 1 },
            ],
            1.0,
            0,
        );
        let got: Vec<_> = t.multiplicities.iter().map(|m| (m.value, m.algebraic, m.geometric)).collect();
        assert_eq!(
            got,
            vec![
                (ComplexScalar::new(0.0, 0.0), 1, 1),
                (ComplexScalar::new(0.0, 1.0), 1, 1),
                (ComplexScalar::new(0.0, -1.0), 1, 1),
                (ComplexScalar::new(2.0, 0.0), 3, 2),
            ]
        );
        assert_eq!((t.rank, t.zero_multiplicity, t.nonzero_distinct), (5, 1, false));
    }

    #[test]
    fn profile_table_shares_have_requested_profile() {
        let t = profile_table(36, 32, 31, 2, 3).unwrap();
        assert_eq!(t.len(), 38);
        let (pruned, removed) = crate::ionet::prune_disconnected(&t).unwrap();
        assert_eq!((pruned.len(), removed.len()), (36, 2));
        let share = crate::ionet::expenditure_share(&pruned);
        let r = numerical_rank(&share.a, &TolerancePolicy::default()).unwrap();
        assert_eq!(r.rank, 32);
        assert!(profile_table(5, 5, 4, 0, 0).is_err());
    }

    #[test]
    fn seeds_are_deterministic() {
        let req = FixtureRequest {
            kind: FixtureKind::Diagonalizable,
            n: 7,
            rank: None,
            nonzero: None,
            seed: 7,
        };
        assert_eq!(generate(&req).unwrap().matrix, generate(&req).unwrap().matrix);
    }
}

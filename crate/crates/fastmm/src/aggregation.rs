//! Trilinear aggregation for Disjoint MM.
//!
//! The two-product construction packs trace(ABD + UVW) into mkn aggregate
//! products (column sums of the two-row generating table) and corrects with
//! mk + kn + nm cross-product terms, for total rank mkn + mk + kn + nm.
//!
//! The three-product construction sums the n^3 aggregates of the three-row
//! table. Its residual splits into 21 index-reducible monomial classes,
//! covered here by 9 column-sum correction families (9 n^2 terms), plus 3
//! irreducible cross traces (sum a_ij v_hi z_jh and its two cyclic images),
//! each of which is a full MM(n)-shaped trace and is corrected by a
//! slot-permuted matrix-multiplication decomposition. The correction count
//! is therefore 9 n^2 + 3 rho(n) with rho the rank of the helper MM(n)
//! algorithm (1, 7, n^3 for n = 1, 2, >=3). The generated decomposition is
//! always verified before being returned.

use crate::bilinear::{SparseVec, VerifyOutcome};
use crate::catalog;
use crate::error::{Error, Result};
use crate::ring::coeff_int;
use crate::tensor::{MmShape, TargetTensor};
use crate::trilinear::{TriTerm, TrilinearDecomposition};

/// An ordered list of independent MM problems computed simultaneously,
/// represented by the sum of their trace forms.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointMMTarget {
    problems: Vec<MmShape>,
}

impl DisjointMMTarget {
    pub fn new(problems: Vec<MmShape>) -> Self {
        assert!(!problems.is_empty(), "at least one problem");
        Self { problems }
    }

    pub fn problems(&self) -> &[MmShape] {
        &self.problems
    }

    /// Total variable count across all sides: sum of mk + kn + nm.
    pub fn total_vars(&self) -> usize {
        self.problems
            .iter()
            .map(|p| {
                let (a, b, d) = p.var_counts();
                a + b + d
            })
            .sum()
    }

    pub fn tensor(&self) -> TargetTensor {
        TargetTensor::disjoint_trilinear(&self.problems)
    }
}

fn one(idx: usize) -> SparseVec {
    vec![(idx, coeff_int(1))]
}

fn neg_one(idx: usize) -> SparseVec {
    vec![(idx, coeff_int(-1))]
}

/// Rank mkn + mk + kn + nm decomposition of trace(ABD + UVW) for
/// MM(m, k, n) disjoint with MM(k, n, m):
/// S = sum (a_ij + u_jh)(b_jh + v_hi)(d_hi + w_ij) minus the corrections
/// T1 = sum a_ij q_ij w_ij with q_ij = sum_h (b_jh + v_hi),
/// T2 = sum u_jh b_jh r_jh with r_jh = sum_i (d_hi + w_ij),
/// T3 = sum p_ih v_hi d_hi with p_ih = sum_j (a_ij + u_jh).
pub fn aggregate_two(m: usize, k: usize, n: usize) -> Result<TrilinearDecomposition> {
    assert!(m >= 1 && k >= 1 && n >= 1);
    let problems = vec![MmShape::new(m, k, n), MmShape::new(k, n, m)];
    // A-side: a (mk) then u (kn); B-side: b (kn) then v (nm);
    // D-side: d (nm) then w (mk)
    let ia = |i: usize, j: usize| i * k + j;
    let iu = |j: usize, h: usize| m * k + j * n + h;
    let ib = |j: usize, h: usize| j * n + h;
    let iv = |h: usize, i: usize| k * n + h * m + i;
    let id = |h: usize, i: usize| h * m + i;
    let iw = |i: usize, j: usize| n * m + i * k + j;

    let mut terms = Vec::with_capacity(m * k * n + m * k + k * n + n * m);
    for i in 0..m {
        for j in 0..k {
            for h in 0..n {
                terms.push(TriTerm::new(
                    vec![(ia(i, j), coeff_int(1)), (iu(j, h), coeff_int(1))],
                    vec![(ib(j, h), coeff_int(1)), (iv(h, i), coeff_int(1))],
                    vec![(id(h, i), coeff_int(1)), (iw(i, j), coeff_int(1))],
                ));
            }
        }
    }
    // T1, subtracted via the D-side sign
    for i in 0..m {
        for j in 0..k {
            let q: SparseVec = (0..n)
                .flat_map(|h| [(ib(j, h), coeff_int(1)), (iv(h, i), coeff_int(1))])
                .collect();
            terms.push(TriTerm::new(one(ia(i, j)), q, neg_one(iw(i, j))));
        }
    }
    // T2
    for j in 0..k {
        for h in 0..n {
            let r: SparseVec = (0..m)
                .flat_map(|i| [(id(h, i), coeff_int(-1)), (iw(i, j), coeff_int(-1))])
                .collect();
            terms.push(TriTerm::new(one(iu(j, h)), one(ib(j, h)), r));
        }
    }
    // T3
    for h in 0..n {
        for i in 0..m {
            let p: SparseVec = (0..k)
                .flat_map(|j| [(ia(i, j), coeff_int(1)), (iu(j, h), coeff_int(1))])
                .collect();
            terms.push(TriTerm::new(p, one(iv(h, i)), neg_one(id(h, i))));
        }
    }

    let tri = TrilinearDecomposition::new(format!("aggregate_two_{m}x{k}x{n}"), problems, terms);
    match tri.verify() {
        VerifyOutcome::Verified => Ok(tri),
        VerifyOutcome::Violated(v) => Err(Error::DerivationFailure(format!(
            "aggregate_two({m},{k},{n}) failed at {v}"
        ))),
    }
}

/// Helper MM(n) algorithm used to cancel the irreducible cross traces of
/// the three-row table.
fn mm_corrector(n: usize) -> crate::bilinear::BilinearAlgorithm {
    if n == 2 {
        catalog::strassen()
    } else {
        catalog::straightforward(n, n, n)
    }
}

/// Result of the three-product aggregation: the verified decomposition and
/// the number of correction terms it needed beyond the n^3 aggregates.
#[derive(Debug, Clone)]
pub struct AggregateThree {
    pub decomposition: TrilinearDecomposition,
    pub aggregate_count: usize,
    pub correction_count: usize,
}

/// Rank n^3 + c(n) decomposition of trace(ABD + UVW + XYZ) for three
/// disjoint MM(n) problems, built from the three-row generating-table
/// aggregates (a_ij + u_jh + x_hi)(b_jh + v_hi + y_ij)(d_hi + w_ij + z_jh).
/// Returns the achieved c(n) = 9 n^2 + 3 rho(n); verification aborts the
/// construction on any failure.
pub fn aggregate_three(n: usize) -> Result<AggregateThree> {
    assert!(n >= 1);
    let shape = MmShape::new(n, n, n);
    let problems = vec![shape, shape, shape];
    let n2 = n * n;
    // A-side families: a, u, x; B-side: b, v, y; D-side: d, w, z
    let ia = |i: usize, j: usize| i * n + j;
    let iu = |j: usize, h: usize| n2 + j * n + h;
    let ix = |h: usize, i: usize| 2 * n2 + h * n + i;
    let ib = |j: usize, h: usize| j * n + h;
    let iv = |h: usize, i: usize| n2 + h * n + i;
    let iy = |i: usize, j: usize| 2 * n2 + i * n + j;
    let id = |h: usize, i: usize| h * n + i;
    let iw = |i: usize, j: usize| n2 + i * n + j;
    let iz = |j: usize, h: usize| 2 * n2 + j * n + h;

    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for h in 0..n {
                terms.push(TriTerm::new(
                    vec![
                        (ia(i, j), coeff_int(1)),
                        (iu(j, h), coeff_int(1)),
                        (ix(h, i), coeff_int(1)),
                    ],
                    vec![
                        (ib(j, h), coeff_int(1)),
                        (iv(h, i), coeff_int(1)),
                        (iy(i, j), coeff_int(1)),
                    ],
                    vec![
                        (id(h, i), coeff_int(1)),
                        (iw(i, j), coeff_int(1)),
                        (iz(j, h), coeff_int(1)),
                    ],
                ));
            }
        }
    }
    let aggregate_count = terms.len();

    // Nine column-sum correction families, each n^2 rank-1 terms, jointly
    // covering the 21 reducible residual classes exactly once. All are
    // subtracted (sign folded into one factor).
    let mut corrections = 0usize;
    for i in 0..n {
        for j in 0..n {
            // (a, sum_h of column 2, w)
            let col2: SparseVec = (0..n)
                .flat_map(|h| {
                    [
                        (ib(j, h), coeff_int(1)),
                        (iv(h, i), coeff_int(1)),
                        (iy(i, j), coeff_int(1)),
                    ]
                })
                .collect();
            terms.push(TriTerm::new(one(ia(i, j)), col2, neg_one(iw(i, j))));
            // (sum_h of u + x, y, w)
            let col1: SparseVec = (0..n)
                .flat_map(|h| [(iu(j, h), coeff_int(1)), (ix(h, i), coeff_int(1))])
                .collect();
            terms.push(TriTerm::new(col1, one(iy(i, j)), neg_one(iw(i, j))));
            // (a, y, sum_h of d + z)
            let col3: SparseVec = (0..n)
                .flat_map(|h| [(id(h, i), coeff_int(-1)), (iz(j, h), coeff_int(-1))])
                .collect();
            terms.push(TriTerm::new(one(ia(i, j)), one(iy(i, j)), col3));
            corrections += 3;
        }
    }
    for j in 0..n {
        for h in 0..n {
            // (u, sum_i of column 2, z)
            let col2: SparseVec = (0..n)
                .flat_map(|i| {
                    [
                        (iv(h, i), coeff_int(1)),
                        (iy(i, j), coeff_int(1)),
                        (ib(j, h), coeff_int(1)),
                    ]
                })
                .collect();
            terms.push(TriTerm::new(one(iu(j, h)), col2, neg_one(iz(j, h))));
            // (u, b, sum_i of d + w)
            let col3: SparseVec = (0..n)
                .flat_map(|i| [(id(h, i), coeff_int(-1)), (iw(i, j), coeff_int(-1))])
                .collect();
            terms.push(TriTerm::new(one(iu(j, h)), one(ib(j, h)), col3));
            // (sum_i of a + x, b, z)
            let col1: SparseVec = (0..n)
                .flat_map(|i| [(ia(i, j), coeff_int(1)), (ix(h, i), coeff_int(1))])
                .collect();
            terms.push(TriTerm::new(col1, one(ib(j, h)), neg_one(iz(j, h))));
            corrections += 3;
        }
    }
    for h in 0..n {
        for i in 0..n {
            // (x, sum_j of column 2, d)
            let col2: SparseVec = (0..n)
                .flat_map(|j| {
                    [
                        (iy(i, j), coeff_int(1)),
                        (ib(j, h), coeff_int(1)),
                        (iv(h, i), coeff_int(1)),
                    ]
                })
                .collect();
            terms.push(TriTerm::new(one(ix(h, i)), col2, neg_one(id(h, i))));
            // (sum_j of a + u, v, d)
            let col1: SparseVec = (0..n)
                .flat_map(|j| [(ia(i, j), coeff_int(1)), (iu(j, h), coeff_int(1))])
                .collect();
            terms.push(TriTerm::new(col1, one(iv(h, i)), neg_one(id(h, i))));
            // (x, v, sum_j of w + z)
            let col3: SparseVec = (0..n)
                .flat_map(|j| [(iw(i, j), coeff_int(-1)), (iz(j, h), coeff_int(-1))])
                .collect();
            terms.push(TriTerm::new(one(ix(h, i)), one(iv(h, i)), col3));
            corrections += 3;
        }
    }

    // The three irreducible cross traces, each a full MM(n)-shaped trace
    // over disjoint variable triples; cancel with a slot-permuted MM(n)
    // decomposition (L, L', L'' are its left, right and recombination
    // forms).
    let helper = mm_corrector(n);
    let l = helper.u_rows();
    let lp = helper.v_rows();
    let map_l = |s: usize, place: &dyn Fn(usize, usize) -> usize| -> SparseVec {
        l[s].iter()
            .map(|(idx, c)| (place(idx / n, idx % n), c.clone()))
            .collect()
    };
    let map_lp = |s: usize, place: &dyn Fn(usize, usize) -> usize| -> SparseVec {
        lp[s]
            .iter()
            .map(|(idx, c)| (place(idx / n, idx % n), c.clone()))
            .collect()
    };
    let map_lpp = |s: usize, place: &dyn Fn(usize, usize) -> usize| -> SparseVec {
        helper.w_rows()[s]
            .iter()
            .map(|(gamma, c)| (place(gamma / n, gamma % n), c.clone()))
            .collect()
    };
    let negated =
        |form: SparseVec| -> SparseVec { form.into_iter().map(|(i, c)| (i, -c)).collect() };
    for s in 0..helper.rank() {
        // cross 1: sum a_ij v_hi z_jh  (L on a, L'' on v, L' on z)
        terms.push(TriTerm::new(
            map_l(s, &|i, j| ia(i, j)),
            map_lpp(s, &|i, h| iv(h, i)),
            negated(map_lp(s, &|j, h| iz(j, h))),
        ));
        // cross 2: sum u_jh y_ij d_hi  (L' on u, L on y, L'' on d)
        terms.push(TriTerm::new(
            map_lp(s, &|j, h| iu(j, h)),
            map_l(s, &|i, j| iy(i, j)),
            negated(map_lpp(s, &|i, h| id(h, i))),
        ));
        // cross 3: sum x_hi b_jh w_ij  (L'' on x, L' on b, L on w)
        terms.push(TriTerm::new(
            map_lpp(s, &|i, h| ix(h, i)),
            map_lp(s, &|j, h| ib(j, h)),
            negated(map_l(s, &|i, j| iw(i, j))),
        ));
        corrections += 3;
    }

    let tri = TrilinearDecomposition::new(format!("aggregate_three_{n}"), problems, terms);
    match tri.verify() {
        VerifyOutcome::Verified => Ok(AggregateThree {
            decomposition: tri,
            aggregate_count,
            correction_count: corrections,
        }),
        VerifyOutcome::Violated(v) => Err(Error::DerivationFailure(format!(
            "aggregate_three({n}) failed at {v}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::apply_scalar;
    use crate::matrix::{mm_naive, Matrix, OpCounter};
    use crate::trilinear::{bilinear_from_trilinear, Role};
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Mi = Matrix<BigInt>;

    #[test]
    fn rank_formula_small_range() {
        for m in 1..=4 {
            for k in 1..=4 {
                for n in 1..=4 {
                    let tri = aggregate_two(m, k, n).unwrap();
                    assert_eq!(tri.rank(), m * k * n + m * k + k * n + n * m);
                }
            }
        }
    }

    #[test]
    fn degenerate_two_scalars() {
        let tri = aggregate_two(1, 1, 1).unwrap();
        assert_eq!(tri.rank(), 4);
    }

    #[test]
    fn beats_straightforward_at_4() {
        let tri = aggregate_two(4, 4, 4).unwrap();
        assert_eq!(tri.rank(), 112);
        assert!(tri.rank() < 2 * 64);
    }

    #[test]
    fn extracted_duals_multiply_correctly() {
        let tri = aggregate_two(2, 2, 2).unwrap();
        let algs = bilinear_from_trilinear(&tri, Role::DSide).unwrap();
        assert_eq!(algs.len(), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for alg in &algs {
            assert!(alg.is_verified());
            assert_eq!(alg.rank(), 20);
            let s = alg.mm_shape().unwrap();
            for _ in 0..20 {
                let a = Mi::random(s.m, s.k, -9, 9, &mut rng);
                let b = Mi::random(s.k, s.n, -9, 9, &mut rng);
                let mut c1 = OpCounter::new();
                let want = mm_naive(&a, &b, &mut c1).unwrap();
                let mut c2 = OpCounter::new();
                assert_eq!(apply_scalar(alg, &a, &b, &mut c2).unwrap(), want);
            }
        }
    }

    #[test]
    fn rectangular_two() {
        let tri = aggregate_two(1, 2, 3).unwrap();
        assert_eq!(tri.rank(), 6 + 2 + 6 + 3);
        let algs = bilinear_from_trilinear(&tri, Role::DSide).unwrap();
        assert_eq!(algs[0].mm_shape(), Some(MmShape::new(1, 2, 3)));
        assert_eq!(algs[1].mm_shape(), Some(MmShape::new(2, 3, 1)));
    }

    #[test]
    fn three_product_small() {
        for n in 1..=2 {
            let out = aggregate_three(n).unwrap();
            assert_eq!(out.aggregate_count, n * n * n);
            assert_eq!(
                out.decomposition.rank(),
                out.aggregate_count + out.correction_count
            );
            let rho = if n == 2 { 7 } else { 1 };
            assert_eq!(out.correction_count, 9 * n * n + 3 * rho);
        }
    }

    #[test]
    fn three_product_duals_multiply() {
        let out = aggregate_three(2).unwrap();
        let algs = bilinear_from_trilinear(&out.decomposition, Role::DSide).unwrap();
        assert_eq!(algs.len(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for alg in &algs {
            for _ in 0..10 {
                let a = Mi::random(2, 2, -9, 9, &mut rng);
                let b = Mi::random(2, 2, -9, 9, &mut rng);
                let mut c1 = OpCounter::new();
                let want = mm_naive(&a, &b, &mut c1).unwrap();
                let mut c2 = OpCounter::new();
                assert_eq!(apply_scalar(alg, &a, &b, &mut c2).unwrap(), want);
            }
        }
    }

    #[test]
    fn disjoint_target_var_count() {
        let t = DisjointMMTarget::new(vec![MmShape::new(2, 3, 4), MmShape::new(3, 4, 2)]);
        assert_eq!(t.total_vars(), (6 + 12 + 8) + (12 + 8 + 6));
    }
}

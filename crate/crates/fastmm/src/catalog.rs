//! Literature-fixed algorithm instances. Every constructor verifies its
//! output against the target tensor before returning; a transcription error
//! here cannot survive construction.

use crate::bilinear::{AlgTarget, BilinearAlgorithm, Schedule, Slp, SlpOp, SparseVec};
use crate::ring::coeff_int;
use crate::tensor::{MmShape, TargetTensor};

fn form(entries: &[(usize, i64)]) -> SparseVec {
    entries.iter().map(|&(i, c)| (i, coeff_int(c))).collect()
}

fn verified(mut alg: BilinearAlgorithm) -> BilinearAlgorithm {
    let outcome = alg.verify();
    assert!(
        outcome.is_verified(),
        "catalog entry {} failed verification: {outcome:?}",
        alg.name
    );
    alg
}

/// The rank-7 algorithm for MM(2):
/// p1 = (a11+a22)(b11+b22), p2 = (a21+a22)b11, p3 = a11(b12-b22),
/// p4 = (a21-a11)(b11+b12), p5 = (a11+a12)b22, p6 = a22(b21-b11),
/// p7 = (a12-a22)(b21+b22);
/// c11 = p1+p6+p7-p5, c12 = p3+p5, c21 = p2+p6, c22 = p1+p3+p4-p2.
///
/// Naturally scheduled it spends 7 multiplications and 18 additions.
pub fn strassen() -> BilinearAlgorithm {
    // entry layout: a11 a12 a21 a22 = 0..4, same for b; outputs row-major
    let u = vec![
        form(&[(0, 1), (3, 1)]),
        form(&[(2, 1), (3, 1)]),
        form(&[(0, 1)]),
        form(&[(0, -1), (2, 1)]),
        form(&[(0, 1), (1, 1)]),
        form(&[(3, 1)]),
        form(&[(1, 1), (3, -1)]),
    ];
    let v = vec![
        form(&[(0, 1), (3, 1)]),
        form(&[(0, 1)]),
        form(&[(1, 1), (3, -1)]),
        form(&[(0, 1), (1, 1)]),
        form(&[(3, 1)]),
        form(&[(0, -1), (2, 1)]),
        form(&[(2, 1), (3, 1)]),
    ];
    let w = vec![
        form(&[(0, 1), (3, 1)]),
        form(&[(2, 1), (3, -1)]),
        form(&[(1, 1), (3, 1)]),
        form(&[(3, 1)]),
        form(&[(0, -1), (1, 1)]),
        form(&[(0, 1), (2, 1)]),
        form(&[(0, 1)]),
    ];
    verified(
        BilinearAlgorithm::new("strassen", AlgTarget::Mm(MmShape::new(2, 2, 2)), u, v, w)
            .expect("strassen shape"),
    )
}

/// The Winograd rank-7 variant of MM(2), pinned to the classical
/// 15-addition evaluation order:
/// s1 = a21+a22, s2 = s1-a11, s3 = a11-a21, s4 = a12-s2,
/// t1 = b12-b11, t2 = b22-t1, t3 = b22-b12, t4 = t2-b21,
/// m1 = a11 b11, m2 = a12 b21, m3 = s4 b22, m4 = a22 t4,
/// m5 = s1 t1, m6 = s2 t2, m7 = s3 t3,
/// u1 = m1+m2, u2 = m1+m6, u3 = u2+m7, u4 = u2+m5, u5 = u4+m3,
/// u6 = u3-m4, u7 = u3+m5;
/// c11 = u1, c12 = u5, c21 = u6, c22 = u7.
pub fn winograd_mm2() -> BilinearAlgorithm {
    let u = vec![
        form(&[(0, 1)]),                           // m1: a11
        form(&[(1, 1)]),                           // m2: a12
        form(&[(0, 1), (1, 1), (2, -1), (3, -1)]), // m3: s4
        form(&[(3, 1)]),                           // m4: a22
        form(&[(2, 1), (3, 1)]),                   // m5: s1
        form(&[(0, -1), (2, 1), (3, 1)]),          // m6: s2
        form(&[(0, 1), (2, -1)]),                  // m7: s3
    ];
    let v = vec![
        form(&[(0, 1)]),                           // b11
        form(&[(2, 1)]),                           // b21
        form(&[(3, 1)]),                           // b22
        form(&[(0, 1), (1, -1), (2, -1), (3, 1)]), // t4
        form(&[(0, -1), (1, 1)]),                  // t1
        form(&[(0, 1), (1, -1), (3, 1)]),          // t2
        form(&[(1, -1), (3, 1)]),                  // t3
    ];
    let w = vec![
        form(&[(0, 1), (1, 1), (2, 1), (3, 1)]), // m1 feeds every output
        form(&[(0, 1)]),                         // m2 -> c11
        form(&[(1, 1)]),                         // m3 -> c12
        form(&[(2, -1)]),                        // m4 -> c21 (subtracted)
        form(&[(1, 1), (3, 1)]),                 // m5 -> c12, c22
        form(&[(1, 1), (2, 1), (3, 1)]),         // m6 -> c12, c21, c22
        form(&[(2, 1), (3, 1)]),                 // m7 -> c21, c22
    ];
    let schedule = Schedule {
        left: Slp {
            inputs: 4,
            steps: vec![
                SlpOp::Add(2, 3), // node 4: s1
                SlpOp::Sub(4, 0), // node 5: s2
                SlpOp::Sub(0, 2), // node 6: s3
                SlpOp::Sub(1, 5), // node 7: s4
            ],
            outputs: vec![0, 1, 7, 3, 4, 5, 6],
        },
        right: Slp {
            inputs: 4,
            steps: vec![
                SlpOp::Sub(1, 0), // node 4: t1
                SlpOp::Sub(3, 4), // node 5: t2
                SlpOp::Sub(3, 1), // node 6: t3
                SlpOp::Sub(5, 2), // node 7: t4
            ],
            outputs: vec![0, 2, 3, 7, 4, 5, 6],
        },
        output: Slp {
            inputs: 7,
            steps: vec![
                SlpOp::Add(0, 1),  // node 7:  u1
                SlpOp::Add(0, 5),  // node 8:  u2
                SlpOp::Add(8, 6),  // node 9:  u3
                SlpOp::Add(8, 4),  // node 10: u4
                SlpOp::Add(10, 2), // node 11: u5
                SlpOp::Sub(9, 3),  // node 12: u6
                SlpOp::Add(9, 4),  // node 13: u7
            ],
            outputs: vec![7, 11, 12, 13],
        },
    };
    verified(
        BilinearAlgorithm::new("winograd", AlgTarget::Mm(MmShape::new(2, 2, 2)), u, v, w)
            .expect("winograd shape")
            .with_schedule(schedule),
    )
}

/// Rank-3 multiplication of complex numbers (a1 + i a2)(b1 + i b2):
/// p1 = a1 b1, p2 = a2 b2, p3 = (a1+a2)(b1+b2);
/// real part = p1 - p2, imaginary part = p3 - p1 - p2.
pub fn complex_mult() -> BilinearAlgorithm {
    let mut t = TargetTensor::new(2, 2, 2);
    t.accumulate(0, 0, 0, coeff_int(1));
    t.accumulate(1, 1, 0, coeff_int(-1));
    t.accumulate(0, 1, 1, coeff_int(1));
    t.accumulate(1, 0, 1, coeff_int(1));
    let u = vec![form(&[(0, 1)]), form(&[(1, 1)]), form(&[(0, 1), (1, 1)])];
    let v = vec![form(&[(0, 1)]), form(&[(1, 1)]), form(&[(0, 1), (1, 1)])];
    let w = vec![
        form(&[(0, 1), (1, -1)]),
        form(&[(0, -1), (1, -1)]),
        form(&[(1, 1)]),
    ];
    verified(
        BilinearAlgorithm::new("complex_mult", AlgTarget::General(t), u, v, w)
            .expect("complex shape"),
    )
}

/// The straightforward rank-mkn algorithm for MM(m, k, n): one product per
/// entry triple, summed directly into the outputs.
pub fn straightforward(m: usize, k: usize, n: usize) -> BilinearAlgorithm {
    assert!(m >= 1 && k >= 1 && n >= 1, "dimensions must be positive");
    let mut u = Vec::with_capacity(m * k * n);
    let mut v = Vec::with_capacity(m * k * n);
    let mut w = Vec::with_capacity(m * k * n);
    for i in 0..m {
        for j in 0..k {
            for h in 0..n {
                u.push(form(&[(i * k + j, 1)]));
                v.push(form(&[(j * n + h, 1)]));
                w.push(form(&[(i * n + h, 1)]));
            }
        }
    }
    verified(
        BilinearAlgorithm::new(
            format!("straightforward_{m}x{k}x{n}"),
            AlgTarget::Mm(MmShape::new(m, k, n)),
            u,
            v,
            w,
        )
        .expect("straightforward shape"),
    )
}

/// Looks a builtin up by the name the CLI exposes.
pub fn builtin(name: &str) -> Option<BilinearAlgorithm> {
    match name {
        "strassen" => Some(strassen()),
        "winograd" => Some(winograd_mm2()),
        "complex_mult" => Some(complex_mult()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::{apply_scalar, UvwPart, VerifyOutcome};
    use crate::matrix::{mm_naive, Matrix, OpCounter};
    use crate::ring::coeff;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Mi = Matrix<BigInt>;

    #[test]
    fn strassen_verifies_and_counts() {
        let alg = strassen();
        assert!(alg.is_verified());
        assert_eq!(alg.rank(), 7);

        let a = Mi::from_i64(2, 2, &[1, 2, 3, 4]);
        let b = Mi::from_i64(2, 2, &[5, 6, 7, 8]);
        let mut ctr = OpCounter::new();
        let out = apply_scalar(&alg, &a, &b, &mut ctr).unwrap();
        assert_eq!(out, Mi::from_i64(2, 2, &[19, 22, 43, 50]));
        assert_eq!(ctr.multiplications, 7);
        assert_eq!(ctr.additions, 18);
    }

    #[test]
    fn strassen_identity_case() {
        let alg = strassen();
        let id = Mi::identity(2);
        let mut ctr = OpCounter::new();
        assert_eq!(apply_scalar(&alg, &id, &id, &mut ctr).unwrap(), id);
    }

    #[test]
    fn strassen_zero_annihilates() {
        let alg = strassen();
        let z = Mi::zeros(2, 2);
        let b = Mi::from_i64(2, 2, &[5, 6, 7, 8]);
        let mut ctr = OpCounter::new();
        assert_eq!(apply_scalar(&alg, &z, &b, &mut ctr).unwrap(), z);
    }

    #[test]
    fn winograd_verifies_and_counts_15() {
        let alg = winograd_mm2();
        assert!(alg.is_verified());
        assert_eq!(alg.rank(), 7);

        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let a = Mi::random(2, 2, -99, 99, &mut rng);
            let b = Mi::random(2, 2, -99, 99, &mut rng);
            let mut c1 = OpCounter::new();
            let want = mm_naive(&a, &b, &mut c1).unwrap();
            let mut c2 = OpCounter::new();
            let got = apply_scalar(&alg, &a, &b, &mut c2).unwrap();
            assert_eq!(got, want);
            assert_eq!(c2.multiplications, 7);
            assert_eq!(c2.additions, 15);
        }
    }

    #[test]
    fn winograd_schedule_matches_coefficients() {
        // pushing basis vectors through the schedule must reproduce U, V, W
        let alg = winograd_mm2();
        let sched = alg.schedule().unwrap();
        assert_eq!(&sched.left.as_matrix(), alg.u_rows());
        assert_eq!(&sched.right.as_matrix(), alg.v_rows());
        // output program computes columns of W: transpose before comparing
        let out_rows = sched.output.as_matrix();
        for (gamma, row) in out_rows.iter().enumerate() {
            for q in 0..alg.rank() {
                let from_w = alg.w_rows()[q]
                    .iter()
                    .find(|(g, _)| *g == gamma)
                    .map(|(_, c)| c.clone());
                let from_sched = row.iter().find(|(i, _)| *i == q).map(|(_, c)| c.clone());
                assert_eq!(from_w, from_sched, "W mismatch at gamma={gamma} q={q}");
            }
        }
    }

    #[test]
    fn strassen_and_winograd_agree() {
        let s = strassen();
        let wg = winograd_mm2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = Mi::random(2, 2, -50, 50, &mut rng);
            let b = Mi::random(2, 2, -50, 50, &mut rng);
            let mut c1 = OpCounter::new();
            let mut c2 = OpCounter::new();
            assert_eq!(
                apply_scalar(&s, &a, &b, &mut c1).unwrap(),
                apply_scalar(&wg, &a, &b, &mut c2).unwrap()
            );
            assert_eq!(c1.multiplications, c2.multiplications);
            assert_eq!(c1.additions, 18);
            assert_eq!(c2.additions, 15);
        }
    }

    #[test]
    fn complex_mult_cases() {
        let alg = complex_mult();
        assert!(alg.is_verified());
        assert_eq!(alg.rank(), 3);

        let one = [BigInt::from(1), BigInt::from(0)];
        let z = [BigInt::from(17), BigInt::from(-4)];
        let mut ctr = OpCounter::new();
        assert_eq!(alg.apply_to_vectors(&one, &z, &mut ctr).unwrap(), z);

        // (1 + 2i)(3 + 4i) = -5 + 10i
        let x = [BigInt::from(1), BigInt::from(2)];
        let y = [BigInt::from(3), BigInt::from(4)];
        let out = alg.apply_to_vectors(&x, &y, &mut ctr).unwrap();
        assert_eq!(out, [BigInt::from(-5), BigInt::from(10)]);
    }

    #[test]
    fn straightforward_ranks() {
        assert_eq!(straightforward(2, 2, 2).rank(), 8);
        assert_eq!(straightforward(1, 1, 1).rank(), 1);
        let alg = straightforward(2, 3, 4);
        assert_eq!(alg.rank(), 24);
        assert!(alg.is_verified());
    }

    #[test]
    fn flipped_sign_fails_with_certificate() {
        let alg = strassen();
        let bad = alg.perturbed(UvwPart::W, 0, 3, &coeff(-2, 1));
        match bad.verify_target(&bad.target.tensor()) {
            VerifyOutcome::Violated(v) => {
                assert_ne!(v.expected, v.actual);
            }
            VerifyOutcome::Verified => panic!("sign flip must not verify"),
        }
    }
}

//! Binary segmentation: pack an integer vector into one long integer in
//! radix 2^k, do one long multiplication, and read answers back off bit
//! segments. One product computes an inner product (extract the middle
//! digit), a sum (all-ones partner), or a full convolution (extract every
//! digit); the guard bits ceil(log2 n) keep digits carry-free.

use crate::error::{Error, Result};
use crate::ubnat::UnboundedNatural;

/// Radix and length of a segment encoding: digits of `radix_bits` bits,
/// `length` of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentCodec {
    pub radix_bits: usize,
    pub length: usize,
}

impl SegmentCodec {
    pub fn new(radix_bits: usize, length: usize) -> Result<Self> {
        if radix_bits == 0 || radix_bits > 63 {
            return Err(Error::RangeViolation(format!(
                "radix_bits must lie in 1..=63, got {radix_bits}"
            )));
        }
        if length == 0 {
            return Err(Error::RangeViolation("length must be positive".into()));
        }
        Ok(Self { radix_bits, length })
    }

    fn digit_bound(&self) -> u64 {
        if self.radix_bits == 63 {
            u64::MAX >> 1
        } else {
            (1u64 << self.radix_bits) - 1
        }
    }
}

/// What one segmentation call did: how many long multiplications it issued
/// and how wide the packed operands were.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BinsegReport {
    pub long_mults: usize,
    pub lhs_bits: usize,
    pub rhs_bits: usize,
    pub radix_bits: usize,
}

/// Packs `v` as sum of v_i * 2^(k*i). Every entry must be below 2^k.
pub fn encode(v: &[u64], codec: &SegmentCodec) -> Result<UnboundedNatural> {
    if v.len() != codec.length {
        return Err(Error::RangeViolation(format!(
            "vector length {} does not match codec length {}",
            v.len(),
            codec.length
        )));
    }
    let bound = codec.digit_bound();
    let mut out = UnboundedNatural::zero();
    for (i, &x) in v.iter().enumerate() {
        if x > bound {
            return Err(Error::RangeViolation(format!(
                "entry {i} = {x} exceeds the {}-bit digit range",
                codec.radix_bits
            )));
        }
        out.set_bits(i * codec.radix_bits, codec.radix_bits, x);
    }
    Ok(out.normalized())
}

/// Inverse of [`encode`]: the unique base-2^k digit vector of length n.
pub fn decode(n: &UnboundedNatural, codec: &SegmentCodec) -> Result<Vec<u64>> {
    if n.bit_length() > codec.radix_bits * codec.length {
        return Err(Error::RangeViolation(format!(
            "value of {} bits exceeds the {} x {}-bit digit capacity",
            n.bit_length(),
            codec.length,
            codec.radix_bits
        )));
    }
    Ok((0..codec.length)
        .map(|i| {
            n.extract_bits(i * codec.radix_bits, (i + 1) * codec.radix_bits)
                .to_u128() as u64
        })
        .collect())
}

fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

fn check_range(v: &[u64], bits: usize, who: &str) -> Result<()> {
    let bound = if bits >= 64 {
        u64::MAX
    } else if bits == 0 {
        0
    } else {
        (1u64 << bits) - 1
    };
    for (i, &x) in v.iter().enumerate() {
        if bits == 0 {
            if x != 0 {
                return Err(Error::RangeViolation(format!(
                    "{who}[{i}] = {x} but the stated range is [0, 1)"
                )));
            }
        } else if x > bound {
            return Err(Error::RangeViolation(format!(
                "{who}[{i}] = {x} exceeds the {bits}-bit range"
            )));
        }
    }
    Ok(())
}

/// Inner product of u (entries below 2^g) and v (entries below 2^h) via one
/// long multiplication: radix k = g + h + ceil(log2 n), v packed reversed,
/// and the answer is digit n-1 of the product.
pub fn inner_product(u: &[u64], v: &[u64], g: usize, h: usize) -> Result<(u128, BinsegReport)> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::RangeViolation(
            "vectors must be nonempty and equally long".into(),
        ));
    }
    check_range(u, g, "u")?;
    check_range(v, h, "v")?;
    let n = u.len();
    let k = g + h + ceil_log2(n);
    let codec = SegmentCodec::new(k.max(1), n)?;
    let packed_u = encode(u, &codec)?;
    let reversed: Vec<u64> = v.iter().rev().copied().collect();
    let packed_v = encode(&reversed, &codec)?;
    let report = BinsegReport {
        long_mults: 1,
        lhs_bits: packed_u.bit_length(),
        rhs_bits: packed_v.bit_length(),
        radix_bits: codec.radix_bits,
    };
    let product = packed_u.mul(&packed_v);
    let digit = product
        .extract_bits((n - 1) * codec.radix_bits, n * codec.radix_bits)
        .to_u128();
    Ok((digit, report))
}

/// Sum of n integers below 2^h: the inner product against all-ones with
/// g = 0, so k = h + ceil(log2 n).
pub fn sum(v: &[u64], h: usize) -> Result<(u128, BinsegReport)> {
    let ones = vec![1u64; v.len()];
    // the all-ones vector needs one bit, hence g = 1 in the range check
    // while the radix follows the stated k = h + ceil(log2 n)
    if v.is_empty() {
        return Err(Error::RangeViolation("empty vector".into()));
    }
    check_range(v, h, "v")?;
    let n = v.len();
    let k = (h + ceil_log2(n)).max(1);
    let codec = SegmentCodec::new(k, n)?;
    let packed_v = encode(v, &codec)?;
    let packed_ones = encode(&ones, &codec)?;
    let report = BinsegReport {
        long_mults: 1,
        lhs_bits: packed_ones.bit_length(),
        rhs_bits: packed_v.bit_length(),
        radix_bits: codec.radix_bits,
    };
    let product = packed_ones.mul(&packed_v);
    let digit = product
        .extract_bits((n - 1) * codec.radix_bits, n * codec.radix_bits)
        .to_u128();
    Ok((digit, report))
}

/// Shifts a signed vector with entries in [q, r) to the nonnegative range
/// [0, r - q). Callers undo the shift with sum(v) = sum(u) + n*q, and for
/// inner products of two shifted vectors u = v - q, u' = w - q' with
/// sum(v_i w_i) = sum(u_i u'_i) + q' sum(u_i) + q sum(u'_i) + n q q'.
pub fn shift_signed(v: &[i64], q: i64, r: i64) -> Result<(Vec<u64>, i64)> {
    if q >= r {
        return Err(Error::RangeViolation(format!("empty range [{q}, {r})")));
    }
    let mut out = Vec::with_capacity(v.len());
    for (i, &x) in v.iter().enumerate() {
        if x < q || x >= r {
            return Err(Error::RangeViolation(format!(
                "v[{i}] = {x} outside [{q}, {r})"
            )));
        }
        out.push((x - q) as u64);
    }
    Ok((out, q))
}

/// Sum of signed integers in [q, r) by shifting, one long multiplication,
/// and the correction n*q.
pub fn signed_sum(v: &[i64], q: i64, r: i64) -> Result<(i128, BinsegReport)> {
    let (shifted, offset) = shift_signed(v, q, r)?;
    let span = (r - q) as u64;
    let h = 64 - span.leading_zeros() as usize;
    let (s, report) = sum(&shifted, h.max(1))?;
    Ok((s as i128 + v.len() as i128 * offset as i128, report))
}

/// Inner product of signed vectors via two shifts and the documented
/// correction identity; still one long multiplication for the main term
/// plus two for the auxiliary sums.
pub fn signed_inner_product(
    u: &[i64],
    v: &[i64],
    qu: i64,
    ru: i64,
    qv: i64,
    rv: i64,
) -> Result<i128> {
    if u.len() != v.len() {
        return Err(Error::RangeViolation("length mismatch".into()));
    }
    let (su, _) = shift_signed(u, qu, ru)?;
    let (sv, _) = shift_signed(v, qv, rv)?;
    let gu = (64 - ((ru - qu) as u64).leading_zeros() as usize).max(1);
    let gv = (64 - ((rv - qv) as u64).leading_zeros() as usize).max(1);
    let (main, _) = inner_product(&su, &sv, gu, gv)?;
    let (sum_u, _) = sum(&su, gu)?;
    let (sum_v, _) = sum(&sv, gv)?;
    let n = u.len() as i128;
    Ok(main as i128
        + qv as i128 * sum_u as i128
        + qu as i128 * sum_v as i128
        + n * qu as i128 * qv as i128)
}

/// Full polynomial product (vector convolution) via one long
/// multiplication: k = 2*bound + ceil(log2 min(len)) guard bits, then every
/// digit of the product is one convolution coefficient.
pub fn poly_mult_binseg(
    p: &[u64],
    q: &[u64],
    bound_bits: usize,
) -> Result<(Vec<u128>, BinsegReport)> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::RangeViolation("empty polynomial".into()));
    }
    check_range(p, bound_bits, "p")?;
    check_range(q, bound_bits, "q")?;
    let out_len = p.len() + q.len() - 1;
    let k = (2 * bound_bits + ceil_log2(p.len().min(q.len()))).max(1);
    if k > 63 {
        return Err(Error::RangeViolation(format!(
            "digit width {k} exceeds the 63-bit extraction limit"
        )));
    }
    let cp = SegmentCodec::new(k, p.len())?;
    let cq = SegmentCodec::new(k, q.len())?;
    let packed_p = encode(p, &cp)?;
    let packed_q = encode(q, &cq)?;
    let report = BinsegReport {
        long_mults: 1,
        lhs_bits: packed_p.bit_length(),
        rhs_bits: packed_q.bit_length(),
        radix_bits: k,
    };
    let product = packed_p.mul(&packed_q);
    let coeffs = (0..out_len)
        .map(|i| product.extract_bits(i * k, (i + 1) * k).to_u128())
        .collect();
    Ok((coeffs, report))
}

/// Splits an inner product into 2^s chunks so each long multiplication
/// stays under `budget_bits`, per the fixed-precision overflow policy.
/// The split factor is the smallest power of two restoring the budget.
pub fn inner_product_with_budget(
    u: &[u64],
    v: &[u64],
    g: usize,
    h: usize,
    budget_bits: usize,
) -> Result<(u128, BinsegReport)> {
    if u.len() != v.len() || u.is_empty() {
        return Err(Error::RangeViolation(
            "vectors must be nonempty and equally long".into(),
        ));
    }
    let n = u.len();
    let mut chunks = 1usize;
    loop {
        let chunk_len = n.div_ceil(chunks);
        let k = g + h + ceil_log2(chunk_len.max(1));
        let product_bits = 2 * chunk_len * k;
        if product_bits <= budget_bits || chunk_len == 1 {
            break;
        }
        chunks *= 2;
    }
    let chunk_len = n.div_ceil(chunks);
    let mut total = 0u128;
    let mut report = BinsegReport {
        long_mults: 0,
        lhs_bits: 0,
        rhs_bits: 0,
        radix_bits: 0,
    };
    for (cu, cv) in u.chunks(chunk_len).zip(v.chunks(chunk_len)) {
        let (partial, r) = inner_product(cu, cv, g, h)?;
        total += partial;
        report.long_mults += r.long_mults;
        report.lhs_bits = report.lhs_bits.max(r.lhs_bits);
        report.rhs_bits = report.rhs_bits.max(r.rhs_bits);
        report.radix_bits = report.radix_bits.max(r.radix_bits);
    }
    Ok((total, report))
}

/// Word-length feasibility of the packed-product trick for d-bit inputs:
/// the product of two packed operands fits a word of length L when
/// L >= 4d.
pub fn word_length_feasible(d_bits: usize, word_bits: usize) -> bool {
    word_bits >= 4 * d_bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle_inner(u: &[u64], v: &[u64]) -> u128 {
        u.iter().zip(v).map(|(&a, &b)| a as u128 * b as u128).sum()
    }

    fn oracle_conv(p: &[u64], q: &[u64]) -> Vec<u128> {
        let mut out = vec![0u128; p.len() + q.len() - 1];
        for (i, &a) in p.iter().enumerate() {
            for (j, &b) in q.iter().enumerate() {
                out[i + j] += a as u128 * b as u128;
            }
        }
        out
    }

    #[test]
    fn encode_examples() {
        let codec = SegmentCodec::new(4, 3).unwrap();
        let n = encode(&[1, 2, 3], &codec).unwrap();
        assert_eq!(n.to_u128(), 1 + 2 * 16 + 3 * 256);
        assert_eq!(decode(&n, &codec).unwrap(), vec![1, 2, 3]);

        assert!(encode(&[0, 0, 0], &codec).unwrap().is_zero());
        assert_eq!(
            decode(&UnboundedNatural::zero(), &codec).unwrap(),
            vec![0; 3]
        );

        // all-max digits pack to 2^(k n) - 1
        let full = encode(&[15, 15, 15], &codec).unwrap();
        assert_eq!(full.to_u128(), (1u128 << 12) - 1);
    }

    #[test]
    fn decode_rejects_oversized() {
        let codec = SegmentCodec::new(4, 3).unwrap();
        let too_big = UnboundedNatural::from_u64(1 << 12);
        assert!(decode(&too_big, &codec).is_err());
    }

    #[test]
    fn inner_product_example() {
        let (got, report) = inner_product(&[1, 2, 3], &[4, 5, 6], 3, 3).unwrap();
        assert_eq!(got, 32);
        assert_eq!(report.long_mults, 1);
        // k = 3 + 3 + 2 = 8 bits per digit
        assert_eq!(report.radix_bits, 8);
    }

    #[test]
    fn inner_product_selectors_and_singleton() {
        let v = [9u64, 5, 7, 3];
        for j in 0..4 {
            let mut e = [0u64; 4];
            e[j] = 1;
            let (got, _) = inner_product(&e, &v, 1, 4).unwrap();
            assert_eq!(got, v[j] as u128);
        }
        let (got, _) = inner_product(&[6], &[7], 3, 3).unwrap();
        assert_eq!(got, 42);
    }

    #[test]
    fn operand_bits_respect_paper_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let n = rng.gen_range(1..=64);
            let g = rng.gen_range(1..=8);
            let h = rng.gen_range(1..=8);
            let u: Vec<u64> = (0..n).map(|_| rng.gen_range(0..(1 << g))).collect();
            let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..(1 << h))).collect();
            let (got, report) = inner_product(&u, &v, g, h).unwrap();
            assert_eq!(got, oracle_inner(&u, &v));
            let k = report.radix_bits;
            assert!(report.lhs_bits <= n * k + g);
            assert!(report.rhs_bits <= n * k + h);
        }
    }

    #[test]
    fn sum_cases() {
        assert_eq!(sum(&[5], 3).unwrap().0, 5);
        let ones = vec![1u64; 300];
        assert_eq!(sum(&ones, 1).unwrap().0, 300);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v: Vec<u64> = (0..1024).map(|_| rng.gen_range(0..(1 << 16))).collect();
        let (got, report) = sum(&v, 16).unwrap();
        assert_eq!(got, v.iter().map(|&x| x as u128).sum::<u128>());
        assert_eq!(report.long_mults, 1);
    }

    #[test]
    fn guard_bits_carry_free_exhaustive() {
        // worst-case digits: every convolution coefficient must stay below
        // 2^k, making extraction carry-free
        for n in 1..=8usize {
            for g in 1..=3usize {
                for h in 1..=3usize {
                    let u = vec![(1u64 << g) - 1; n];
                    let v = vec![(1u64 << h) - 1; n];
                    let k = g + h + ceil_log2(n);
                    let conv = oracle_conv(&u, &v);
                    assert!(
                        conv.iter().all(|&c| c < (1u128 << k)),
                        "carry at n={n} g={g} h={h}"
                    );
                    let (got, _) = inner_product(&u, &v, g, h).unwrap();
                    assert_eq!(got, oracle_inner(&u, &v));
                }
            }
        }
    }

    #[test]
    fn signed_shift_examples() {
        let (u, q) = shift_signed(&[-3, 0, 4], -3, 5).unwrap();
        assert_eq!(u, vec![0, 3, 7]);
        assert_eq!(q, -3);

        let (u, _) = shift_signed(&[1, 2], 0, 3).unwrap();
        assert_eq!(u, vec![1, 2]);

        assert_eq!(signed_sum(&[-3, 0, 4], -3, 5).unwrap().0, 1);
    }

    #[test]
    fn conv_examples() {
        let (c, report) = poly_mult_binseg(&[1, 1], &[1, 1], 1).unwrap();
        assert_eq!(c, vec![1, 2, 1]);
        assert_eq!(report.long_mults, 1);
        let (c, _) = poly_mult_binseg(&[7], &[6], 3).unwrap();
        assert_eq!(c, vec![42]);
    }

    #[test]
    fn budget_split_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 256;
        let u: Vec<u64> = (0..n).map(|_| rng.gen_range(0..256)).collect();
        let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..256)).collect();
        let (whole, r1) = inner_product_with_budget(&u, &v, 8, 8, 1 << 20).unwrap();
        assert_eq!(whole, oracle_inner(&u, &v));
        assert_eq!(r1.long_mults, 1);
        let (split, r2) = inner_product_with_budget(&u, &v, 8, 8, 4096).unwrap();
        assert_eq!(split, oracle_inner(&u, &v));
        assert!(r2.long_mults > 1);
        assert!(r2.long_mults.is_power_of_two());
        assert!(r2.lhs_bits + r2.rhs_bits <= 4096);
    }

    #[test]
    fn feasibility_predicate() {
        assert!(word_length_feasible(16, 64));
        assert!(!word_length_feasible(17, 64));
    }

    proptest! {
        #[test]
        fn roundtrip_random(k in 1usize..=16, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=50);
            let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..(1u64 << k))).collect();
            let codec = SegmentCodec::new(k, n).unwrap();
            prop_assert_eq!(decode(&encode(&v, &codec).unwrap(), &codec).unwrap(), v);
        }

        #[test]
        fn inner_matches_oracle(seed in 0u64..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=128);
            let g = rng.gen_range(1..=16);
            let h = rng.gen_range(1..=16);
            let u: Vec<u64> = (0..n).map(|_| rng.gen_range(0..(1u64 << g))).collect();
            let v: Vec<u64> = (0..n).map(|_| rng.gen_range(0..(1u64 << h))).collect();
            let (got, report) = inner_product(&u, &v, g, h).unwrap();
            prop_assert_eq!(got, oracle_inner(&u, &v));
            prop_assert_eq!(report.long_mults, 1);
        }

        #[test]
        fn conv_matches_oracle(seed in 0u64..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lp = rng.gen_range(1..=8);
            let lq = rng.gen_range(1..=8);
            let p: Vec<u64> = (0..lp).map(|_| rng.gen_range(0..256)).collect();
            let q: Vec<u64> = (0..lq).map(|_| rng.gen_range(0..256)).collect();
            let (got, _) = poly_mult_binseg(&p, &q, 8).unwrap();
            prop_assert_eq!(got, oracle_conv(&p, &q));
        }

        #[test]
        fn signed_identities(seed in 0u64..300) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=64);
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..100)).collect();
            let w: Vec<i64> = (0..n).map(|_| rng.gen_range(-100..100)).collect();
            let want_sum: i128 = v.iter().map(|&x| x as i128).sum();
            prop_assert_eq!(signed_sum(&v, -100, 100).unwrap().0, want_sum);
            let want_ip: i128 = v.iter().zip(&w).map(|(&a, &b)| a as i128 * b as i128).sum();
            prop_assert_eq!(
                signed_inner_product(&v, &w, -100, 100, -100, 100).unwrap(),
                want_ip
            );
        }
    }
}

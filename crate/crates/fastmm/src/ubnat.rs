//! Arbitrary-precision nonnegative integers, the carrier for binary
//! segmentation. Implemented in-repo so the one-long-multiplication cost
//! model stays measurable: schoolbook below a limb threshold, Karatsuba
//! above it.

use std::cmp::Ordering;

/// Limbs below which multiplication falls back to schoolbook.
const KARATSUBA_THRESHOLD: usize = 32;

/// Nonnegative integer as little-endian 64-bit limbs, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnboundedNatural {
    limbs: Vec<u64>,
}

impl UnboundedNatural {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_limbs(vec![v])
    }

    pub fn from_u128(v: u128) -> Self {
        Self::from_limbs(vec![v as u64, (v >> 64) as u64])
    }

    fn from_limbs(mut limbs: Vec<u64>) -> Self {
        while limbs.last() == Some(&0) {
            limbs.pop();
        }
        Self { limbs }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn limb_count(&self) -> usize {
        self.limbs.len()
    }

    /// Number of significant bits; zero has bit length 0.
    pub fn bit_length(&self) -> usize {
        match self.limbs.last() {
            None => 0,
            Some(top) => 64 * (self.limbs.len() - 1) + (64 - top.leading_zeros() as usize),
        }
    }

    /// Panics if the value exceeds 128 bits.
    pub fn to_u128(&self) -> u128 {
        assert!(self.bit_length() <= 128, "value exceeds 128 bits");
        let lo = self.limbs.first().copied().unwrap_or(0) as u128;
        let hi = self.limbs.get(1).copied().unwrap_or(0) as u128;
        lo | (hi << 64)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let (long, short) = if self.limbs.len() >= rhs.limbs.len() {
            (&self.limbs, &rhs.limbs)
        } else {
            (&rhs.limbs, &self.limbs)
        };
        let mut out = Vec::with_capacity(long.len() + 1);
        let mut carry = 0u64;
        for (i, &l) in long.iter().enumerate() {
            let (s1, c1) = l.overflowing_add(short.get(i).copied().unwrap_or(0));
            let (s2, c2) = s1.overflowing_add(carry);
            out.push(s2);
            carry = (c1 as u64) + (c2 as u64);
        }
        out.push(carry);
        Self::from_limbs(out)
    }

    /// Difference; panics if `rhs` exceeds `self` (only ever called with
    /// nonnegative results).
    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert!(self.cmp(rhs) != Ordering::Less, "subtraction underflow");
        let mut out = Vec::with_capacity(self.limbs.len());
        let mut borrow = 0u64;
        for i in 0..self.limbs.len() {
            let r = rhs.limbs.get(i).copied().unwrap_or(0);
            let (d1, b1) = self.limbs[i].overflowing_sub(r);
            let (d2, b2) = d1.overflowing_sub(borrow);
            out.push(d2);
            borrow = (b1 as u64) + (b2 as u64);
        }
        assert_eq!(borrow, 0, "subtraction underflow");
        Self::from_limbs(out)
    }

    pub fn shl_bits(&self, bits: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let limb_shift = bits / 64;
        let bit_shift = bits % 64;
        let mut out = vec![0u64; limb_shift];
        if bit_shift == 0 {
            out.extend_from_slice(&self.limbs);
        } else {
            let mut carry = 0u64;
            for &l in &self.limbs {
                out.push((l << bit_shift) | carry);
                carry = l >> (64 - bit_shift);
            }
            out.push(carry);
        }
        Self::from_limbs(out)
    }

    /// The bit segment [lo, hi) as a value.
    pub fn extract_bits(&self, lo: usize, hi: usize) -> Self {
        assert!(lo <= hi);
        let width = hi - lo;
        if width == 0 {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(width / 64 + 1);
        let mut taken = 0;
        while taken < width {
            let bit = lo + taken;
            let limb = bit / 64;
            let offset = bit % 64;
            let mut chunk = self.limbs.get(limb).copied().unwrap_or(0) >> offset;
            if offset > 0 {
                if let Some(next) = self.limbs.get(limb + 1) {
                    chunk |= next << (64 - offset);
                }
            }
            let remaining = width - taken;
            if remaining < 64 {
                chunk &= (1u64 << remaining) - 1;
            }
            out.push(chunk);
            taken += 64;
        }
        Self::from_limbs(out)
    }

    /// ORs a value below 2^width into the bit window starting at `lo`.
    /// The window must currently be zero, which holds for the disjoint
    /// digit windows of segment encoding.
    pub fn set_bits(&mut self, lo: usize, width: usize, value: u64) {
        debug_assert!(width == 64 || value < (1u64 << width));
        let limb = lo / 64;
        let offset = lo % 64;
        let need = (lo + width).div_ceil(64);
        if self.limbs.len() < need {
            self.limbs.resize(need, 0);
        }
        self.limbs[limb] |= value << offset;
        if offset > 0 && offset + width > 64 {
            self.limbs[limb + 1] |= value >> (64 - offset);
        }
    }

    /// Normalizes after direct `set_bits` construction.
    pub fn normalized(mut self) -> Self {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
        self
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        if self.limbs.len().min(rhs.limbs.len()) <= KARATSUBA_THRESHOLD {
            return self.schoolbook(rhs);
        }
        let split = self.limbs.len().max(rhs.limbs.len()).div_ceil(2);
        let (a0, a1) = self.split_at_limb(split);
        let (b0, b1) = rhs.split_at_limb(split);
        let z0 = a0.mul(&b0);
        let z2 = a1.mul(&b1);
        let z1 = a0.add(&a1).mul(&b0.add(&b1)).sub(&z0).sub(&z2);
        z0.add(&z1.shl_bits(64 * split))
            .add(&z2.shl_bits(128 * split))
    }

    /// Quadratic long multiplication, also the oracle Karatsuba is tested
    /// against.
    pub fn schoolbook(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0u64; self.limbs.len() + rhs.limbs.len()];
        for (i, &a) in self.limbs.iter().enumerate() {
            let mut carry = 0u128;
            let aw = a as u128;
            for (j, &b) in rhs.limbs.iter().enumerate() {
                let cur = out[i + j] as u128 + aw * b as u128 + carry;
                out[i + j] = cur as u64;
                carry = cur >> 64;
            }
            out[i + rhs.limbs.len()] = carry as u64;
        }
        Self::from_limbs(out)
    }

    fn split_at_limb(&self, at: usize) -> (Self, Self) {
        if at >= self.limbs.len() {
            return (self.clone(), Self::zero());
        }
        (
            Self::from_limbs(self.limbs[..at].to_vec()),
            Self::from_limbs(self.limbs[at..].to_vec()),
        )
    }

    /// Residue modulo a small odd modulus; independent spot-check for huge
    /// products.
    pub fn mod_u64(&self, m: u64) -> u64 {
        let mut acc = 0u128;
        for &l in self.limbs.iter().rev() {
            acc = ((acc << 64) | l as u128) % m as u128;
        }
        acc as u64
    }
}

impl Ord for UnboundedNatural {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.limbs.len().cmp(&other.limbs.len()) {
            Ordering::Equal => self.limbs.iter().rev().cmp(other.limbs.iter().rev()),
            o => o,
        }
    }
}

impl PartialOrd for UnboundedNatural {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for UnboundedNatural {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0x0");
        }
        write!(f, "0x")?;
        for (i, l) in self.limbs.iter().rev().enumerate() {
            if i == 0 {
                write!(f, "{l:x}")?;
            } else {
                write!(f, "{l:016x}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_nat(bits: usize, rng: &mut ChaCha8Rng) -> UnboundedNatural {
        let limbs = bits.div_ceil(64);
        let mut v: Vec<u64> = (0..limbs).map(|_| rng.gen()).collect();
        let top_bits = bits % 64;
        if top_bits != 0 {
            let last = v.last_mut().unwrap();
            *last &= (1u64 << top_bits) - 1;
            *last |= 1u64 << (top_bits - 1);
        } else if let Some(last) = v.last_mut() {
            *last |= 1u64 << 63;
        }
        UnboundedNatural::from_limbs(v)
    }

    #[test]
    fn small_arithmetic() {
        let a = UnboundedNatural::from_u64(u64::MAX);
        let b = UnboundedNatural::from_u64(2);
        assert_eq!(a.add(&b).to_u128(), u64::MAX as u128 + 2);
        assert_eq!(a.mul(&b).to_u128(), (u64::MAX as u128) * 2);
        assert_eq!(a.add(&b).sub(&b), a);
        assert_eq!(a.bit_length(), 64);
        assert_eq!(UnboundedNatural::zero().bit_length(), 0);
    }

    #[test]
    fn shift_and_extract_roundtrip() {
        let a = UnboundedNatural::from_u128(0xDEAD_BEEF_CAFE_BABE_1234_5678u128);
        for lo in [0usize, 3, 64, 77] {
            let shifted = a.shl_bits(lo);
            assert_eq!(shifted.extract_bits(lo, lo + 128), a);
        }
    }

    #[test]
    fn karatsuba_matches_schoolbook_above_threshold() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for bits in [2_100usize, 4_096, 16_384] {
            let a = random_nat(bits, &mut rng);
            let b = random_nat(bits, &mut rng);
            assert_eq!(a.mul(&b), a.schoolbook(&b), "bits = {bits}");
        }
    }

    #[test]
    fn megabit_product_modular_spot_check() {
        // operands at the 2^20-bit test ceiling, checked against residues
        // modulo independent primes
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_nat(1 << 20, &mut rng);
        let b = random_nat(1 << 20, &mut rng);
        let p = a.mul(&b);
        // product of two 2^20-bit operands spans 2^21 or 2^21 - 1 bits
        assert!(p.bit_length() == (1 << 21) || p.bit_length() == (1 << 21) - 1);
        for m in [0xFFFF_FFFF_FFFF_FFC5u64, 1_000_000_007, 998_244_353] {
            let want = ((a.mod_u64(m) as u128 * b.mod_u64(m) as u128) % m as u128) as u64;
            assert_eq!(p.mod_u64(m), want, "modulus {m}");
        }
    }

    proptest! {
        #[test]
        fn mul_matches_u128(x in 0u64.., y in 0u64..) {
            let a = UnboundedNatural::from_u64(x);
            let b = UnboundedNatural::from_u64(y);
            prop_assert_eq!(a.mul(&b).to_u128(), x as u128 * y as u128);
        }

        #[test]
        fn add_then_sub_roundtrip(x in any::<u128>(), y in any::<u128>()) {
            let a = UnboundedNatural::from_u128(x);
            let b = UnboundedNatural::from_u128(y);
            prop_assert_eq!(a.add(&b).sub(&b), a);
        }

        #[test]
        fn ordering_matches_u128(x in any::<u128>(), y in any::<u128>()) {
            let a = UnboundedNatural::from_u128(x);
            let b = UnboundedNatural::from_u128(y);
            prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        }
    }
}

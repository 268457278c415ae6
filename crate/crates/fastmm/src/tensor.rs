//! Target tensors of bilinear problems: the coefficients t[alpha][beta][gamma]
//! of the bilinear map c_gamma = sum t[alpha][beta][gamma] a_alpha b_beta,
//! stored sparsely.

use crate::ring::{coeff_int, Coeff};
use num_traits::Zero;
use std::collections::BTreeMap;

/// Shape of a matrix-multiplication problem MM(m, k, n): an m-by-k matrix
/// times a k-by-n matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MmShape {
    pub m: usize,
    pub k: usize,
    pub n: usize,
}

impl MmShape {
    pub fn new(m: usize, k: usize, n: usize) -> Self {
        Self { m, k, n }
    }

    pub fn mkn(&self) -> usize {
        self.m * self.k * self.n
    }

    /// Variable counts on the three sides of the trace form: A carries mk
    /// variables, B carries kn, and the dual matrix D carries nm.
    pub fn var_counts(&self) -> (usize, usize, usize) {
        (self.m * self.k, self.k * self.n, self.n * self.m)
    }

    /// The shape obtained by one cyclic shift, MM(k, n, m).
    pub fn cycled(&self) -> Self {
        Self::new(self.k, self.n, self.m)
    }
}

/// Sparse tensor over three index spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetTensor {
    pub dims_a: usize,
    pub dims_b: usize,
    pub dims_c: usize,
    entries: BTreeMap<(usize, usize, usize), Coeff>,
}

impl TargetTensor {
    pub fn new(dims_a: usize, dims_b: usize, dims_c: usize) -> Self {
        Self {
            dims_a,
            dims_b,
            dims_c,
            entries: BTreeMap::new(),
        }
    }

    /// Adds `c` at (alpha, beta, gamma), dropping the slot if it cancels.
    pub fn accumulate(&mut self, alpha: usize, beta: usize, gamma: usize, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .entries
            .entry((alpha, beta, gamma))
            .or_insert_with(Coeff::zero);
        *slot += c;
        if slot.is_zero() {
            self.entries.remove(&(alpha, beta, gamma));
        }
    }

    pub fn coefficient(&self, alpha: usize, beta: usize, gamma: usize) -> Coeff {
        self.entries
            .get(&(alpha, beta, gamma))
            .cloned()
            .unwrap_or_else(Coeff::zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize, usize), &Coeff)> {
        self.entries.iter()
    }

    /// Bilinear MM(m, k, n) tensor: alpha = a_(i,j) at i*k+j, beta = b_(j,h)
    /// at j*n+h, gamma = output c_(i,h) at i*n+h. Exactly mkn ones.
    pub fn mm_bilinear(shape: MmShape) -> Self {
        let MmShape { m, k, n } = shape;
        let mut t = Self::new(m * k, k * n, m * n);
        for i in 0..m {
            for j in 0..k {
                for h in 0..n {
                    t.accumulate(i * k + j, j * n + h, i * n + h, coeff_int(1));
                }
            }
        }
        t
    }

    /// Trilinear trace(ABD) tensor: the third axis indexes the dual variable
    /// d_(h,i) at h*m+i (D is an n-by-m matrix).
    pub fn mm_trilinear(shape: MmShape) -> Self {
        let MmShape { m, k, n } = shape;
        let mut t = Self::new(m * k, k * n, n * m);
        for i in 0..m {
            for j in 0..k {
                for h in 0..n {
                    t.accumulate(i * k + j, j * n + h, h * m + i, coeff_int(1));
                }
            }
        }
        t
    }

    /// Block-diagonal trace form of several disjoint MM problems, with the
    /// variable families of each problem concatenated per side.
    pub fn disjoint_trilinear(problems: &[MmShape]) -> Self {
        let (mut da, mut db, mut dc) = (0, 0, 0);
        for p in problems {
            let (a, b, c) = p.var_counts();
            da += a;
            db += b;
            dc += c;
        }
        let mut t = Self::new(da, db, dc);
        let (mut oa, mut ob, mut oc) = (0, 0, 0);
        for p in problems {
            let MmShape { m, k, n } = *p;
            for i in 0..m {
                for j in 0..k {
                    for h in 0..n {
                        t.accumulate(oa + i * k + j, ob + j * n + h, oc + h * m + i, coeff_int(1));
                    }
                }
            }
            let (a, b, c) = p.var_counts();
            oa += a;
            ob += b;
            oc += c;
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn mm_tensor_has_mkn_ones() {
        for (m, k, n) in [(2, 2, 2), (1, 2, 3), (3, 3, 3)] {
            let t = TargetTensor::mm_bilinear(MmShape::new(m, k, n));
            assert_eq!(t.nonzero_count(), m * k * n);
            assert!(t.iter().all(|(_, c)| c.is_one()));
        }
    }

    #[test]
    fn disjoint_offsets() {
        // trace(ABD + UVW) for MM(2,2,2) and its cycle: 8 + 8 ones
        let t = TargetTensor::disjoint_trilinear(&[MmShape::new(2, 2, 2), MmShape::new(2, 2, 2)]);
        assert_eq!(t.nonzero_count(), 16);
        assert_eq!((t.dims_a, t.dims_b, t.dims_c), (8, 8, 8));
        // second problem's first monomial sits at the family offsets
        assert!(t.coefficient(4, 4, 4).is_one());
    }

    #[test]
    fn accumulate_cancels() {
        let mut t = TargetTensor::new(2, 2, 2);
        t.accumulate(0, 0, 0, coeff_int(1));
        t.accumulate(0, 0, 0, coeff_int(-1));
        assert_eq!(t.nonzero_count(), 0);
    }
}

//! APA (any-precision approximation) algorithms: decompositions whose
//! coefficients are polynomials in a parameter, correct up to first order in
//! that parameter. Ignoring the higher-order terms, the number of products
//! is the border rank; exact answers are recovered from degree+1 evaluations
//! by interpolation.

use crate::aggregation::DisjointMMTarget;
use crate::bilinear::BilinearAlgorithm;
use crate::error::{Error, Result};
use crate::lambda::LambdaPoly;
use crate::matrix::{Matrix, OpCounter};
use crate::ring::Coeff;
use crate::tensor::MmShape;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Sparse linear form with polynomial coefficients.
pub type PolyForm = Vec<(usize, LambdaPoly)>;

/// A border-rank decomposition of a disjoint MM trace form. The stored
/// products have polynomial coefficients; the decomposition proper is the
/// product sum multiplied by lambda^scale, and its order-zero part equals
/// the target exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ApaAlgorithm {
    pub name: String,
    pub target: DisjointMMTarget,
    u: Vec<PolyForm>,
    v: Vec<PolyForm>,
    /// Per-product recombination over the D-side (dual) variables.
    w: Vec<PolyForm>,
    /// Power of lambda multiplying the whole decomposition; -2 for the
    /// generating-table aggregation below.
    pub scale: i64,
    /// Maximum lambda-degree of the scaled expansion; the target sits at
    /// degree 0 and the junk occupies degrees 1..=degree.
    pub degree: usize,
}

impl ApaAlgorithm {
    /// Builds from raw parts and runs the border verification, recording
    /// the achieved degree. Used by the text-format parser.
    pub fn from_parts(
        name: impl Into<String>,
        target: DisjointMMTarget,
        u: Vec<PolyForm>,
        v: Vec<PolyForm>,
        w: Vec<PolyForm>,
        scale: i64,
    ) -> Result<Self> {
        if u.len() != v.len() || v.len() != w.len() {
            return Err(Error::ShapeMismatch(format!(
                "U/V/W rank disagreement: {} / {} / {}",
                u.len(),
                v.len(),
                w.len()
            )));
        }
        let mut alg = Self {
            name: name.into(),
            target,
            u,
            v,
            w,
            scale,
            degree: 0,
        };
        alg.degree = alg.verify_border()?;
        Ok(alg)
    }

    pub fn border_rank(&self) -> usize {
        self.u.len()
    }

    pub fn u_rows(&self) -> &[PolyForm] {
        &self.u
    }

    pub fn v_rows(&self) -> &[PolyForm] {
        &self.v
    }

    pub fn w_rows(&self) -> &[PolyForm] {
        &self.w
    }

    fn side_dims(&self) -> (usize, usize, usize) {
        let (mut da, mut db, mut dd) = (0, 0, 0);
        for p in self.target.problems() {
            let (a, b, d) = p.var_counts();
            da += a;
            db += b;
            dd += d;
        }
        (da, db, dd)
    }

    /// Expands the product sum symbolically: a polynomial per tensor slot.
    pub fn symbolic_expansion(&self) -> BTreeMap<(usize, usize, usize), LambdaPoly> {
        let mut acc: BTreeMap<(usize, usize, usize), LambdaPoly> = BTreeMap::new();
        for q in 0..self.border_rank() {
            for (alpha, pu) in &self.u[q] {
                for (beta, pv) in &self.v[q] {
                    let partial = pu.mul(pv);
                    for (delta, pw) in &self.w[q] {
                        let term = partial.mul(pw);
                        let slot = acc
                            .entry((*alpha, *beta, *delta))
                            .or_insert_with(LambdaPoly::zero);
                        *slot = slot.add(&term);
                    }
                }
            }
        }
        acc.retain(|_, p| !p.is_zero());
        acc
    }

    /// Exact border check: after applying the scale, no slot may hold any
    /// negative power, and the order-zero coefficients must reproduce the
    /// target tensor; everything else is the order->=1 junk whose maximal
    /// degree is reported as the algorithm degree.
    pub fn verify_border(&self) -> Result<usize> {
        let shift = (-self.scale) as usize;
        let target = self.target.tensor();
        let expansion = self.symbolic_expansion();
        let mut max_scaled_degree = 0usize;
        for (key, poly) in &expansion {
            for e in 0..shift.min(poly.coeffs().len()) {
                if !poly.coefficient(e).is_zero() {
                    return Err(Error::DerivationFailure(format!(
                        "{}: slot {key:?} has a lambda^{} term below the scale",
                        self.name,
                        e as i64 + self.scale
                    )));
                }
            }
            let zero_order = poly.coefficient(shift);
            let want = target.coefficient(key.0, key.1, key.2);
            if Coeff::from_integer(zero_order) != want {
                return Err(Error::DerivationFailure(format!(
                    "{}: slot {key:?} order-zero coefficient differs from target",
                    self.name
                )));
            }
            if let Some(d) = poly.degree() {
                max_scaled_degree = max_scaled_degree.max(d.saturating_sub(shift));
            }
        }
        // target slots absent from the expansion entirely
        for (key, want) in target.iter() {
            if !expansion.contains_key(key) && !want.is_zero() {
                return Err(Error::DerivationFailure(format!(
                    "{}: target slot {key:?} missing from expansion",
                    self.name
                )));
            }
        }
        Ok(max_scaled_degree)
    }

    /// Adds `delta` to the order-zero coefficient of one slot; used by
    /// mutation tests.
    pub fn perturbed(&self, part: usize, q: usize, idx: usize, delta: i64) -> Self {
        let mut copy = self.clone();
        let rows = match part {
            0 => &mut copy.u,
            1 => &mut copy.v,
            _ => &mut copy.w,
        };
        let row = &mut rows[q];
        match row.iter_mut().find(|(i, _)| *i == idx) {
            Some((_, p)) => *p = p.add(&LambdaPoly::constant(delta)),
            None => row.push((idx, LambdaPoly::constant(delta))),
        }
        copy
    }
}

/// Border-rank mkn + mk + kn decomposition of trace(ABD + UVW) from the
/// lambda generating table: aggregates
/// (a_ij + L u_jh)(b_jh + L v_hi)(L^2 d_hi + w_ij) minus
/// T1 = sum a_ij q_ij w_ij, q_ij = sum_h (b_jh + L v_hi), and
/// T2 = sum (L u_jh) b_jh r_jh, r_jh = sum_i (L^2 d_hi + w_ij),
/// all scaled by L^-2. The third correction family of the exact
/// construction is order->=1 throughout and vanishes from the border rank.
pub fn apa_aggregate(m: usize, k: usize, n: usize) -> Result<ApaAlgorithm> {
    assert!(m >= 1 && k >= 1 && n >= 1);
    let target = DisjointMMTarget::new(vec![MmShape::new(m, k, n), MmShape::new(k, n, m)]);
    let ia = |i: usize, j: usize| i * k + j;
    let iu = |j: usize, h: usize| m * k + j * n + h;
    let ib = |j: usize, h: usize| j * n + h;
    let iv = |h: usize, i: usize| k * n + h * m + i;
    let id = |h: usize, i: usize| h * m + i;
    let iw = |i: usize, j: usize| n * m + i * k + j;

    let one = || LambdaPoly::constant(1);
    let lam = || LambdaPoly::monomial(1, 1);
    let lam2 = || LambdaPoly::monomial(1, 2);

    let mut u: Vec<PolyForm> = Vec::new();
    let mut v: Vec<PolyForm> = Vec::new();
    let mut w: Vec<PolyForm> = Vec::new();
    for i in 0..m {
        for j in 0..k {
            for h in 0..n {
                u.push(vec![(ia(i, j), one()), (iu(j, h), lam())]);
                v.push(vec![(ib(j, h), one()), (iv(h, i), lam())]);
                w.push(vec![(id(h, i), lam2()), (iw(i, j), one())]);
            }
        }
    }
    for i in 0..m {
        for j in 0..k {
            u.push(vec![(ia(i, j), one())]);
            v.push(
                (0..n)
                    .flat_map(|h| [(ib(j, h), one()), (iv(h, i), lam())])
                    .collect(),
            );
            w.push(vec![(iw(i, j), LambdaPoly::constant(-1))]);
        }
    }
    for j in 0..k {
        for h in 0..n {
            u.push(vec![(iu(j, h), lam())]);
            v.push(vec![(ib(j, h), one())]);
            w.push(
                (0..m)
                    .flat_map(|i| {
                        [
                            (id(h, i), LambdaPoly::monomial(-1, 2)),
                            (iw(i, j), LambdaPoly::constant(-1)),
                        ]
                    })
                    .collect(),
            );
        }
    }

    let mut alg = ApaAlgorithm {
        name: format!("apa_aggregate_{m}x{k}x{n}"),
        target,
        u,
        v,
        w,
        scale: -2,
        degree: 0,
    };
    alg.degree = alg.verify_border()?;
    Ok(alg)
}

/// Embeds an exact MM algorithm as a degree-0 APA algorithm (scale 0); the
/// lift then degenerates to a single evaluation.
pub fn embed_exact(alg: &BilinearAlgorithm) -> Result<ApaAlgorithm> {
    let shape = alg.mm_shape().ok_or_else(|| {
        Error::ShapeMismatch("embed_exact requires an MM-target algorithm".into())
    })?;
    let lift_form = |form: &crate::bilinear::SparseVec| -> Result<PolyForm> {
        form.iter()
            .map(|(i, c)| {
                if !c.denom().is_one() {
                    return Err(Error::CoeffNotRepresentable(format!(
                        "APA embedding requires integer coefficients, got {c}"
                    )));
                }
                let num = c
                    .numer()
                    .to_i64()
                    .ok_or_else(|| Error::RangeViolation("coefficient too large".into()))?;
                Ok((*i, LambdaPoly::constant(num)))
            })
            .collect()
    };
    let u = alg.u_rows().iter().map(&lift_form).collect::<Result<_>>()?;
    let v = alg.v_rows().iter().map(&lift_form).collect::<Result<_>>()?;
    // reindex outputs (i, h) to dual variables (h, i)
    let n = shape.n;
    let m = shape.m;
    let w = alg
        .w_rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|(gamma, c)| {
                    let (i, h) = (gamma / n, gamma % n);
                    if !c.denom().is_one() {
                        return Err(Error::CoeffNotRepresentable(format!(
                            "APA embedding requires integer coefficients, got {c}"
                        )));
                    }
                    Ok((
                        h * m + i,
                        LambdaPoly::constant(c.numer().to_i64().ok_or_else(|| {
                            Error::RangeViolation("coefficient too large".into())
                        })?),
                    ))
                })
                .collect::<Result<PolyForm>>()
        })
        .collect::<Result<_>>()?;
    let mut apa = ApaAlgorithm {
        name: format!("{}_as_apa", alg.name),
        target: DisjointMMTarget::new(vec![shape]),
        u,
        v,
        w,
        scale: 0,
        degree: 0,
    };
    apa.degree = apa.verify_border()?;
    Ok(apa)
}

fn flatten_inputs<R: crate::ring::Ring>(
    alg: &ApaAlgorithm,
    inputs: &[(Matrix<R>, Matrix<R>)],
    zero: R,
) -> Result<(Vec<R>, Vec<R>)> {
    if inputs.len() != alg.target.problems().len() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} input pairs, got {}",
            alg.target.problems().len(),
            inputs.len()
        )));
    }
    let (da, db, _) = alg.side_dims();
    let mut avec = vec![zero.clone(); da];
    let mut bvec = vec![zero; db];
    let (mut oa, mut ob) = (0, 0);
    for (p, (a, b)) in alg.target.problems().iter().zip(inputs) {
        if a.rows() != p.m || a.cols() != p.k || b.rows() != p.k || b.cols() != p.n {
            return Err(Error::ShapeMismatch(format!(
                "input pair does not fit MM({},{},{})",
                p.m, p.k, p.n
            )));
        }
        for (off, e) in a.entries().iter().enumerate() {
            avec[oa + off] = e.clone();
        }
        for (off, e) in b.entries().iter().enumerate() {
            bvec[ob + off] = e.clone();
        }
        let (la, lb, _) = p.var_counts();
        oa += la;
        ob += lb;
    }
    Ok((avec, bvec))
}

fn unflatten_outputs<R: crate::ring::Ring>(alg: &ApaAlgorithm, out: &[R]) -> Vec<Matrix<R>> {
    let mut result = Vec::with_capacity(alg.target.problems().len());
    let mut od = 0;
    for p in alg.target.problems() {
        let mut mat = Matrix::zeros(p.m, p.n);
        for h in 0..p.n {
            for i in 0..p.m {
                mat.set(i, h, out[od + h * p.m + i].clone());
            }
        }
        result.push(mat);
        let (_, _, ld) = p.var_counts();
        od += ld;
    }
    result
}

/// Numeric evaluation at a concrete parameter value in (0, 1): returns the
/// approximate disjoint products, accurate to first order.
pub fn apa_apply_numeric(
    alg: &ApaAlgorithm,
    inputs: &[(Matrix<f64>, Matrix<f64>)],
    lambda: f64,
) -> Result<Vec<Matrix<f64>>> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::RangeViolation(format!(
            "lambda must lie in (0, 1), got {lambda}"
        )));
    }
    let (avec, bvec) = flatten_inputs(alg, inputs, 0.0f64)?;
    let (_, _, dd) = alg.side_dims();
    let scale = lambda.powi(alg.scale as i32);
    let mut out = vec![0.0f64; dd];
    for q in 0..alg.border_rank() {
        let l: f64 = alg.u[q]
            .iter()
            .map(|(i, p)| p.eval_f64(lambda) * avec[*i])
            .sum();
        let r: f64 = alg.v[q]
            .iter()
            .map(|(i, p)| p.eval_f64(lambda) * bvec[*i])
            .sum();
        let prod = l * r;
        for (delta, p) in &alg.w[q] {
            out[*delta] += p.eval_f64(lambda) * prod;
        }
    }
    for o in &mut out {
        *o *= scale;
    }
    Ok(unflatten_outputs(alg, &out))
}

/// Exact recovery over rationals: evaluates the decomposition at
/// `degree + 1` distinct nonzero parameter values and interpolates the
/// order-zero coefficient. Default nodes are 1, 2, ..., degree + 1. The
/// counter records the border_rank bilinear products per evaluation, so a
/// full lift costs (degree + 1) * border_rank such multiplications. (At the
/// trilinear level the same recovery squares that factor: 9 for degree 2.)
pub fn apa_lift_exact(
    alg: &ApaAlgorithm,
    inputs: &[(Matrix<BigRational>, Matrix<BigRational>)],
    nodes: Option<Vec<Coeff>>,
    ctr: &mut OpCounter,
) -> Result<Vec<Matrix<BigRational>>> {
    let needed = alg.degree + 1;
    let nodes = nodes.unwrap_or_else(|| {
        (1..=needed as i64)
            .map(|t| Coeff::from_integer(t.into()))
            .collect()
    });
    if nodes.len() != needed {
        return Err(Error::BadInterpolationNodes(format!(
            "need {needed} nodes for degree {}, got {}",
            alg.degree,
            nodes.len()
        )));
    }
    for (i, x) in nodes.iter().enumerate() {
        if x.is_zero() {
            return Err(Error::BadInterpolationNodes("nodes must be nonzero".into()));
        }
        if nodes[..i].contains(x) {
            return Err(Error::BadInterpolationNodes(format!("repeated node {x}")));
        }
    }

    let (avec, bvec) = flatten_inputs(alg, inputs, BigRational::zero())?;
    let (_, _, dd) = alg.side_dims();

    // evaluate the scaled outputs at every node
    let mut evaluations: Vec<Vec<Coeff>> = Vec::with_capacity(needed);
    for x in &nodes {
        let scale = pow_rational(x, alg.scale);
        let mut out = vec![Coeff::zero(); dd];
        for q in 0..alg.border_rank() {
            let mut l = Coeff::zero();
            let mut first = true;
            for (i, p) in &alg.u[q] {
                let term = p.eval_rational(x) * &avec[*i];
                if first {
                    l = term;
                    first = false;
                } else {
                    ctr.additions += 1;
                    l += term;
                }
            }
            let mut r = Coeff::zero();
            let mut first = true;
            for (i, p) in &alg.v[q] {
                let term = p.eval_rational(x) * &bvec[*i];
                if first {
                    r = term;
                    first = false;
                } else {
                    ctr.additions += 1;
                    r += term;
                }
            }
            ctr.multiplications += 1;
            let prod = l * r;
            for (delta, p) in &alg.w[q] {
                out[*delta] += p.eval_rational(x) * &prod;
            }
        }
        for o in &mut out {
            *o *= &scale;
        }
        evaluations.push(out);
    }

    // Lagrange weights for the value at 0
    let mut weights = Vec::with_capacity(needed);
    for (t, xt) in nodes.iter().enumerate() {
        let mut wgt = Coeff::one();
        for (s, xs) in nodes.iter().enumerate() {
            if s != t {
                wgt *= xs / (xs - xt);
            }
        }
        weights.push(wgt);
    }

    let mut out = vec![Coeff::zero(); dd];
    for (eval, wgt) in evaluations.iter().zip(&weights) {
        for (slot, value) in out.iter_mut().zip(eval) {
            *slot += value * wgt;
        }
    }
    Ok(unflatten_outputs(alg, &out))
}

fn pow_rational(x: &Coeff, e: i64) -> Coeff {
    let mut acc = Coeff::one();
    for _ in 0..e.unsigned_abs() {
        acc *= x;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Exponent-arithmetic view of recursive APA self-application: each
/// recursion step squares the matrix size while only doubling the
/// parameter degree, so the interpolation overhead washes out of the
/// exponent. Returns (size, degree, products) after `steps` recursive
/// squarings of the base decomposition.
pub fn apa_recursion_growth(
    base_size: usize,
    base_degree: usize,
    border_rank: usize,
    steps: u32,
) -> (f64, f64, f64) {
    let size = (base_size as f64).powf(2f64.powi(steps as i32));
    let degree = base_degree as f64 * 2f64.powi(steps as i32);
    let products = (border_rank as f64).powf(2f64.powi(steps as i32));
    (size, degree, products)
}


#[cfg(test)]
mod word_length_tests {
    use super::*;
    use crate::matrix::{mm_naive, Matrix};
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn numeric_result_rounds_to_exact_integers_when_precision_suffices() {
        // small nonnegative d-bit inputs with lambda = 2^-s, s comfortably
        // larger than the error constant: rounding the numeric output
        // recovers the exact integer products
        let alg = apa_aggregate(2, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let d = 3u32;
        let rand_small = |rng: &mut ChaCha8Rng| {
            let entries: Vec<f64> = (0..4).map(|_| rng.gen_range(0..1 << d) as f64).collect();
            Matrix::<f64>::from_entries(2, 2, entries).unwrap()
        };
        for _ in 0..20 {
            let a = rand_small(&mut rng);
            let b = rand_small(&mut rng);
            let u = rand_small(&mut rng);
            let v = rand_small(&mut rng);
            let out = apa_apply_numeric(
                &alg,
                &[(a.clone(), b.clone()), (u.clone(), v.clone())],
                2f64.powi(-12),
            )
            .unwrap();
            let to_int = |m: &Matrix<f64>| -> Vec<i64> {
                m.entries().iter().map(|e| e.round() as i64).collect()
            };
            let exact = |x: &Matrix<f64>, y: &Matrix<f64>| -> Vec<i64> {
                let xi = Matrix::<BigInt>::from_i64(
                    2,
                    2,
                    &x.entries().iter().map(|e| *e as i64).collect::<Vec<_>>(),
                );
                let yi = Matrix::<BigInt>::from_i64(
                    2,
                    2,
                    &y.entries().iter().map(|e| *e as i64).collect::<Vec<_>>(),
                );
                let mut ctr = OpCounter::new();
                mm_naive(&xi, &yi, &mut ctr)
                    .unwrap()
                    .entries()
                    .iter()
                    .map(|e| i64::try_from(e.clone()).unwrap())
                    .collect()
            };
            assert_eq!(to_int(&out[0]), exact(&a, &b));
            assert_eq!(to_int(&out[1]), exact(&u, &v));
        }
    }
}

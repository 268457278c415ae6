//! Trilinear decompositions of matrix trace forms and the duality
//! transforms between them and bilinear algorithms.
//!
//! A rank-r decomposition writes trace(ABD) (or a disjoint sum of such
//! traces) as a sum of r products of three linear forms. Reading the
//! coefficients of one side's variables back off recovers a bilinear
//! algorithm of the same rank; the three sides give the three cyclic
//! shapes, and transposing the variable subscripts gives three more.

use crate::bilinear::{normalize_form, AlgTarget, BilinearAlgorithm, SparseVec, VerifyOutcome};
use crate::error::{Error, Result};
use crate::tensor::{MmShape, TargetTensor};

/// One product of three linear forms: the A-side, B-side and D-side factors
/// over the concatenated variable families of the target.
#[derive(Debug, Clone, PartialEq)]
pub struct TriTerm {
    pub a: SparseVec,
    pub b: SparseVec,
    pub d: SparseVec,
}

impl TriTerm {
    pub fn new(a: SparseVec, b: SparseVec, d: SparseVec) -> Self {
        Self {
            a: normalize_form(a),
            b: normalize_form(b),
            d: normalize_form(d),
        }
    }
}

/// Which side's variables to read back off as outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    ASide,
    BSide,
    DSide,
}

/// A trilinear decomposition of the disjoint trace form of `problems`.
/// Variable layout per side: the families of the problems concatenated in
/// order (A-side: m*k variables each, B-side: k*n, D-side: n*m).
#[derive(Debug, Clone, PartialEq)]
pub struct TrilinearDecomposition {
    pub name: String,
    pub problems: Vec<MmShape>,
    terms: Vec<TriTerm>,
}

impl TrilinearDecomposition {
    pub fn new(name: impl Into<String>, problems: Vec<MmShape>, terms: Vec<TriTerm>) -> Self {
        assert!(!problems.is_empty(), "at least one disjoint problem");
        let mut t = Self {
            name: name.into(),
            problems,
            terms,
        };
        t.canonicalize();
        t
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[TriTerm] {
        &self.terms
    }

    pub fn target_tensor(&self) -> TargetTensor {
        TargetTensor::disjoint_trilinear(&self.problems)
    }

    /// Sorts terms by their form signature so that structurally equal
    /// decompositions compare equal.
    fn canonicalize(&mut self) {
        self.terms
            .sort_by(|x, y| (&x.a, &x.b, &x.d).cmp(&(&y.a, &y.b, &y.d)));
    }

    /// The tensor the terms actually sum to.
    pub fn computed_tensor(&self) -> TargetTensor {
        let target = self.target_tensor();
        let mut acc = TargetTensor::new(target.dims_a, target.dims_b, target.dims_c);
        for term in &self.terms {
            for (alpha, ca) in &term.a {
                for (beta, cb) in &term.b {
                    let partial = ca * cb;
                    for (delta, cd) in &term.d {
                        acc.accumulate(*alpha, *beta, *delta, &partial * cd);
                    }
                }
            }
        }
        acc
    }

    /// Exact check of the decomposition against its trace-form target.
    pub fn verify(&self) -> VerifyOutcome {
        let computed = self.computed_tensor();
        let target = self.target_tensor();
        let mut keys: Vec<(usize, usize, usize)> = computed
            .iter()
            .map(|(k, _)| *k)
            .chain(target.iter().map(|(k, _)| *k))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for (alpha, beta, delta) in keys {
            let actual = computed.coefficient(alpha, beta, delta);
            let expected = target.coefficient(alpha, beta, delta);
            if actual != expected {
                return VerifyOutcome::Violated(crate::bilinear::Violation {
                    alpha,
                    beta,
                    gamma: delta,
                    expected,
                    actual,
                });
            }
        }
        VerifyOutcome::Verified
    }

    /// Copy with `delta` added to one coefficient of one term's form
    /// (side 0, 1, 2 = A, B, D). Used by mutation tests.
    pub fn perturbed(
        &self,
        term: usize,
        side: usize,
        idx: usize,
        delta: &crate::ring::Coeff,
    ) -> Self {
        let mut terms = self.terms.clone();
        let form = match side {
            0 => &mut terms[term].a,
            1 => &mut terms[term].b,
            _ => &mut terms[term].d,
        };
        form.push((idx, delta.clone()));
        *form = normalize_form(std::mem::take(form));
        Self {
            name: format!("{}_perturbed", self.name),
            problems: self.problems.clone(),
            terms,
        }
    }

    /// Offsets of each problem's family on the (A, B, D) sides.
    pub fn side_offsets(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.problems.len());
        let (mut oa, mut ob, mut od) = (0, 0, 0);
        for p in &self.problems {
            out.push((oa, ob, od));
            let (a, b, d) = p.var_counts();
            oa += a;
            ob += b;
            od += d;
        }
        out
    }
}

fn restrict(form: &SparseVec, offset: usize, len: usize) -> SparseVec {
    form.iter()
        .filter(|(i, _)| *i >= offset && *i < offset + len)
        .map(|(i, c)| (i - offset, c.clone()))
        .collect()
}

/// Multiplies a bilinear algorithm's equations by fresh dual variables
/// d_(h,i) and sums: the r products become r triple products whose third
/// factor is l''_q = sum over (i,h) of w_(i,h)^q d_(h,i).
pub fn trilinear_from_bilinear(alg: &BilinearAlgorithm) -> Result<TrilinearDecomposition> {
    let shape = alg.mm_shape().ok_or_else(|| {
        Error::ShapeMismatch("trilinear extension requires an MM-target algorithm".into())
    })?;
    let MmShape { m, n, .. } = shape;
    let terms = (0..alg.rank())
        .map(|q| {
            let d = alg.w_rows()[q]
                .iter()
                .map(|(gamma, c)| {
                    let (i, h) = (gamma / n, gamma % n);
                    (h * m + i, c.clone())
                })
                .collect();
            TriTerm::new(alg.u_rows()[q].clone(), alg.v_rows()[q].clone(), d)
        })
        .collect();
    Ok(TrilinearDecomposition::new(
        format!("{}_trace", alg.name),
        vec![shape],
        terms,
    ))
}

/// Equates the coefficients of one side's variables and returns the
/// resulting bilinear algorithm, one per disjoint constituent problem.
/// Role D recovers MM(m, k, n), role A gives MM(k, n, m), role B gives
/// MM(n, m, k). Every returned algorithm has passed verification.
pub fn bilinear_from_trilinear(
    t: &TrilinearDecomposition,
    role: Role,
) -> Result<Vec<BilinearAlgorithm>> {
    let offsets = t.side_offsets();
    let mut out = Vec::with_capacity(t.problems.len());
    for (p, (shape, (oa, ob, od))) in t.problems.iter().zip(offsets).enumerate() {
        let MmShape { m, k, n } = *shape;
        let (la, lb, ld) = shape.var_counts();
        let mut u_rows = Vec::with_capacity(t.rank());
        let mut v_rows = Vec::with_capacity(t.rank());
        let mut w_rows = Vec::with_capacity(t.rank());
        for term in t.terms() {
            let fa = restrict(&term.a, oa, la);
            let fb = restrict(&term.b, ob, lb);
            let fd = restrict(&term.d, od, ld);
            match role {
                // outputs are the coefficients of d_(h,i): c_(i,h) of AB
                Role::DSide => {
                    u_rows.push(fa);
                    v_rows.push(fb);
                    w_rows.push(reindex(&fd, |delta| {
                        let (h, i) = (delta / m, delta % m);
                        i * n + h
                    }));
                }
                // outputs are the coefficients of a_(i,j): entry (j,i) of BD
                Role::ASide => {
                    u_rows.push(fb);
                    v_rows.push(fd);
                    w_rows.push(reindex(&fa, |alpha| {
                        let (i, j) = (alpha / k, alpha % k);
                        j * m + i
                    }));
                }
                // outputs are the coefficients of b_(j,h): entry (h,j) of DA
                Role::BSide => {
                    u_rows.push(fd);
                    v_rows.push(fa);
                    w_rows.push(reindex(&fb, |beta| {
                        let (j, h) = (beta / n, beta % n);
                        h * k + j
                    }));
                }
            }
        }
        let dual_shape = match role {
            Role::DSide => *shape,
            Role::ASide => MmShape::new(k, n, m),
            Role::BSide => MmShape::new(n, m, k),
        };
        let mut alg = BilinearAlgorithm::new(
            format!("{}_p{}_{:?}", t.name, p, role),
            AlgTarget::Mm(dual_shape),
            u_rows,
            v_rows,
            w_rows,
        )?;
        match alg.verify() {
            VerifyOutcome::Verified => out.push(alg),
            VerifyOutcome::Violated(v) => {
                return Err(Error::DerivationFailure(format!(
                    "dual extraction of {} (problem {p}, role {role:?}) failed at {v}",
                    t.name
                )))
            }
        }
    }
    Ok(out)
}

fn reindex(form: &SparseVec, f: impl Fn(usize) -> usize) -> SparseVec {
    form.iter().map(|(i, c)| (f(*i), c.clone())).collect()
}

/// Transposed decomposition: trace(ABD) = trace(D^T B^T A^T), so swapping
/// the D-side into the A-side (with transposed subscripts) targets
/// MM(m, n, k).
fn transpose_decomposition(t: &TrilinearDecomposition) -> Result<TrilinearDecomposition> {
    if t.problems.len() != 1 {
        return Err(Error::ShapeMismatch(
            "transposition implemented for single-problem traces".into(),
        ));
    }
    let MmShape { m, k, n } = t.problems[0];
    let terms = t
        .terms()
        .iter()
        .map(|term| {
            // new A-side variable a'_(i,h) = d_(h,i)
            let a = reindex(&term.d, |delta| {
                let (h, i) = (delta / m, delta % m);
                i * n + h
            });
            // new B-side variable b'_(h,j) = b_(j,h)
            let b = reindex(&term.b, |beta| {
                let (j, h) = (beta / n, beta % n);
                h * k + j
            });
            // new D-side variable d'_(j,i) = a_(i,j)
            let d = reindex(&term.a, |alpha| {
                let (i, j) = (alpha / k, alpha % k);
                j * m + i
            });
            TriTerm::new(a, b, d)
        })
        .collect();
    Ok(TrilinearDecomposition::new(
        format!("{}_transposed", t.name),
        vec![MmShape::new(m, n, k)],
        terms,
    ))
}

/// The 6-tuple of same-rank dual algorithms of a verified MM algorithm:
/// roles D, A, B of its trace form give MM(m,k,n), MM(k,n,m), MM(n,m,k);
/// the same roles of the transposed form give MM(m,n,k), MM(n,k,m),
/// MM(k,m,n). Each output passes verification.
pub fn transpose_duals(alg: &BilinearAlgorithm) -> Result<Vec<BilinearAlgorithm>> {
    if !alg.is_verified() {
        return Err(Error::NotVerified(alg.name.clone()));
    }
    let tri = trilinear_from_bilinear(alg)?;
    let flipped = transpose_decomposition(&tri)?;
    let mut out = Vec::with_capacity(6);
    for role in [Role::DSide, Role::ASide, Role::BSide] {
        out.extend(bilinear_from_trilinear(&tri, role)?);
    }
    for role in [Role::DSide, Role::ASide, Role::BSide] {
        out.extend(bilinear_from_trilinear(&flipped, role)?);
    }
    Ok(out)
}

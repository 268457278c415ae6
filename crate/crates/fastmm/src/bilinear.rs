//! Bilinear algorithms: rank-r coefficient triples (U, V, W) computing a set
//! of bilinear forms, applied to scalars or recursively to block matrices,
//! and verified exactly against their target tensor.
//!
//! Counting convention: forming each of the r products costs one
//! multiplication; a coefficient of +1 or -1 costs nothing beyond the
//! addition or subtraction it implies (one each); any other rational
//! coefficient costs one multiplication.

use crate::error::{Error, Result};
use crate::matrix::{block_join, block_split, mm_naive, pad_to_block_power, Matrix, OpCounter};
use crate::ring::{Coeff, Ring};
use crate::tensor::{MmShape, TargetTensor};
use num_traits::One;

/// Sparse linear form: (variable index, coefficient) pairs, sorted by index,
/// no zero coefficients.
pub type SparseVec = Vec<(usize, Coeff)>;

/// Sorts by index, merges duplicates, and drops zeros.
pub fn normalize_form(mut form: SparseVec) -> SparseVec {
    form.sort_by_key(|(i, _)| *i);
    let mut out: SparseVec = Vec::with_capacity(form.len());
    for (i, c) in form {
        if let Some(last) = out.last_mut() {
            if last.0 == i {
                last.1 += c;
                if num_traits::Zero::is_zero(&last.1) {
                    out.pop();
                }
                continue;
            }
        }
        if !num_traits::Zero::is_zero(&c) {
            out.push((i, c));
        }
    }
    out
}

/// What a bilinear algorithm computes.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgTarget {
    /// Matrix product MM(m, k, n); inputs and outputs are matrices.
    Mm(MmShape),
    /// Any other bilinear problem, described by its tensor.
    General(TargetTensor),
}

impl AlgTarget {
    pub fn dims(&self) -> (usize, usize, usize) {
        match self {
            AlgTarget::Mm(s) => (s.m * s.k, s.k * s.n, s.m * s.n),
            AlgTarget::General(t) => (t.dims_a, t.dims_b, t.dims_c),
        }
    }

    pub fn tensor(&self) -> TargetTensor {
        match self {
            AlgTarget::Mm(s) => TargetTensor::mm_bilinear(*s),
            AlgTarget::General(t) => t.clone(),
        }
    }
}

/// One step of a straight-line program over earlier nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum SlpOp {
    Add(usize, usize),
    Sub(usize, usize),
    Scale(Coeff, usize),
}

/// Straight-line program computing linear combinations of its inputs.
/// Node ids 0..inputs are the inputs; node inputs+s is the result of step s.
#[derive(Debug, Clone, PartialEq)]
pub struct Slp {
    pub inputs: usize,
    pub steps: Vec<SlpOp>,
    pub outputs: Vec<usize>,
}

impl Slp {
    fn eval<R: Ring>(&self, input_vals: &[R], ctr: &mut OpCounter) -> Result<Vec<R>> {
        debug_assert_eq!(input_vals.len(), self.inputs);
        let mut nodes: Vec<R> = input_vals.to_vec();
        for step in &self.steps {
            let v = match step {
                SlpOp::Add(x, y) => {
                    ctr.additions += 1;
                    nodes[*x].add(&nodes[*y])
                }
                SlpOp::Sub(x, y) => {
                    ctr.additions += 1;
                    nodes[*x].sub(&nodes[*y])
                }
                SlpOp::Scale(c, x) => scale_value(c, &nodes[*x], ctr)?,
            };
            nodes.push(v);
        }
        Ok(self.outputs.iter().map(|&o| nodes[o].clone()).collect())
    }

    /// The linear map this program computes, one sparse row per output.
    /// Obtained by pushing rational basis vectors through the program.
    pub fn as_matrix(&self) -> Vec<SparseVec> {
        let mut rows = vec![SparseVec::new(); self.outputs.len()];
        for col in 0..self.inputs {
            let mut basis = vec![Coeff::from_integer(0.into()); self.inputs];
            basis[col] = <Coeff as One>::one();
            let mut scratch = OpCounter::new();
            let vals = self.eval(&basis, &mut scratch).expect("rational eval");
            for (row, v) in vals.into_iter().enumerate() {
                if !num_traits::Zero::is_zero(&v) {
                    rows[row].push((col, v));
                }
            }
        }
        rows
    }
}

/// Explicit evaluation order pinning the operation count of an algorithm,
/// e.g. the published 15-addition scheduling of the Winograd variant.
/// `left` maps A-entries to the r left factors, `right` maps B-entries to
/// the r right factors, `output` maps the r products to the outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub left: Slp,
    pub right: Slp,
    pub output: Slp,
}

fn scale_value<R: Ring>(c: &Coeff, x: &R, ctr: &mut OpCounter) -> Result<R> {
    if c.is_one() {
        return Ok(x.clone());
    }
    if (-c).is_one() {
        return Ok(x.neg());
    }
    let k = R::from_coeff(c)
        .ok_or_else(|| Error::CoeffNotRepresentable(format!("coefficient {c} in entry ring")))?;
    ctr.multiplications += 1;
    Ok(k.mul(x))
}

/// Evaluates a sparse linear form over ring values with the standard
/// counting rule: (#nonzeros - 1) additions plus one multiplication per
/// non-unit coefficient.
fn eval_form<R: Ring>(form: &SparseVec, vals: &[R], ctr: &mut OpCounter) -> Result<R> {
    let mut iter = form.iter();
    let Some((i0, c0)) = iter.next() else {
        return Ok(R::zero());
    };
    let mut acc = scale_value(c0, &vals[*i0], ctr)?;
    for (i, c) in iter {
        ctr.additions += 1;
        if c.is_one() {
            acc = acc.add(&vals[*i]);
        } else if (-c).is_one() {
            acc = acc.sub(&vals[*i]);
        } else {
            let k = R::from_coeff(c).ok_or_else(|| {
                Error::CoeffNotRepresentable(format!("coefficient {c} in entry ring"))
            })?;
            ctr.multiplications += 1;
            acc = acc.add(&k.mul(&vals[*i]));
        }
    }
    Ok(acc)
}

/// Outcome of checking an algorithm against a target tensor.
#[derive(Debug, Clone, PartialEq)]
pub enum VerifyOutcome {
    Verified,
    Violated(Violation),
}

impl VerifyOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyOutcome::Verified)
    }
}

/// Certificate of failure: the first index triple (in lexicographic order)
/// whose computed coefficient differs from the target.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub expected: Coeff,
    pub actual: Coeff,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "triple ({}, {}, {}): expected {}, computed {}",
            self.alpha, self.beta, self.gamma, self.expected, self.actual
        )
    }
}

/// A rank-r bilinear algorithm. Row q of `u`/`v` holds the coefficients of
/// the q-th left/right linear form; row q of `w` holds the q-th column of
/// the recombination matrix (which output each product feeds, and with what
/// coefficient).
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearAlgorithm {
    pub name: String,
    pub target: AlgTarget,
    u: Vec<SparseVec>,
    v: Vec<SparseVec>,
    w: Vec<SparseVec>,
    schedule: Option<Schedule>,
    verified: bool,
}

impl BilinearAlgorithm {
    pub fn new(
        name: impl Into<String>,
        target: AlgTarget,
        u: Vec<SparseVec>,
        v: Vec<SparseVec>,
        w: Vec<SparseVec>,
    ) -> Result<Self> {
        let rank = u.len();
        if v.len() != rank || w.len() != rank {
            return Err(Error::ShapeMismatch(format!(
                "U/V/W rank disagreement: {} / {} / {}",
                u.len(),
                v.len(),
                w.len()
            )));
        }
        let (da, db, dc) = target.dims();
        let check = |rows: &[SparseVec], dim: usize, side: &str| -> Result<()> {
            for (q, row) in rows.iter().enumerate() {
                for (idx, _) in row {
                    if *idx >= dim {
                        return Err(Error::ShapeMismatch(format!(
                            "{side} row {q} references index {idx} outside 0..{dim}"
                        )));
                    }
                }
            }
            Ok(())
        };
        check(&u, da, "U")?;
        check(&v, db, "V")?;
        check(&w, dc, "W")?;
        Ok(Self {
            name: name.into(),
            target,
            u: u.into_iter().map(normalize_form).collect(),
            v: v.into_iter().map(normalize_form).collect(),
            w: w.into_iter().map(normalize_form).collect(),
            schedule: None,
            verified: false,
        })
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = Some(schedule);
        self
    }

    pub fn rank(&self) -> usize {
        self.u.len()
    }

    pub fn u_rows(&self) -> &[SparseVec] {
        &self.u
    }

    pub fn v_rows(&self) -> &[SparseVec] {
        &self.v
    }

    pub fn w_rows(&self) -> &[SparseVec] {
        &self.w
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        self.schedule.as_ref()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn mm_shape(&self) -> Option<MmShape> {
        match &self.target {
            AlgTarget::Mm(s) => Some(*s),
            AlgTarget::General(_) => None,
        }
    }

    /// The tensor the coefficient triple actually computes.
    pub fn computed_tensor(&self) -> TargetTensor {
        let (da, db, dc) = self.target.dims();
        let mut acc = TargetTensor::new(da, db, dc);
        for q in 0..self.rank() {
            for (alpha, cu) in &self.u[q] {
                for (beta, cv) in &self.v[q] {
                    let partial = cu * cv;
                    for (gamma, cw) in &self.w[q] {
                        acc.accumulate(*alpha, *beta, *gamma, &partial * cw);
                    }
                }
            }
        }
        acc
    }

    /// Exact coefficient-wise comparison with a target tensor. The caller
    /// must pass a tensor of matching dimensions.
    pub fn verify_target(&self, t: &TargetTensor) -> VerifyOutcome {
        let computed = self.computed_tensor();
        assert_eq!(
            (computed.dims_a, computed.dims_b, computed.dims_c),
            (t.dims_a, t.dims_b, t.dims_c),
            "verify_target requires agreeing shapes"
        );
        first_tensor_mismatch(&computed, t)
    }

    /// Verifies against the algorithm's own target and records the outcome.
    pub fn verify(&mut self) -> VerifyOutcome {
        let outcome = self.verify_target(&self.target.tensor());
        self.verified = outcome.is_verified();
        outcome
    }

    /// Same algorithm with products sorted by their coefficient signature.
    /// Two algorithms equal up to product order have equal canonical forms.
    /// Any schedule is dropped because its product numbering would go stale.
    pub fn canonicalized(&self) -> Self {
        let mut idx: Vec<usize> = (0..self.rank()).collect();
        idx.sort_by(|&a, &b| {
            (&self.u[a], &self.v[a], &self.w[a]).cmp(&(&self.u[b], &self.v[b], &self.w[b]))
        });
        Self {
            name: self.name.clone(),
            target: self.target.clone(),
            u: idx.iter().map(|&q| self.u[q].clone()).collect(),
            v: idx.iter().map(|&q| self.v[q].clone()).collect(),
            w: idx.iter().map(|&q| self.w[q].clone()).collect(),
            schedule: None,
            verified: self.verified,
        }
    }

    /// Copy with `delta` added to one coefficient slot. Used by mutation
    /// tests; the result is unverified.
    pub fn perturbed(&self, part: UvwPart, q: usize, idx: usize, delta: &Coeff) -> Self {
        let mut copy = self.clone();
        let rows = match part {
            UvwPart::U => &mut copy.u,
            UvwPart::V => &mut copy.v,
            UvwPart::W => &mut copy.w,
        };
        let mut row = std::mem::take(&mut rows[q]);
        row.push((idx, delta.clone()));
        rows[q] = normalize_form(row);
        copy.verified = false;
        copy.schedule = None;
        copy
    }

    /// Applies the algorithm to flat input vectors, returning the flat
    /// output vector. This is the scalar engine behind [`apply_scalar`].
    pub fn apply_to_vectors<R: Ring>(
        &self,
        a: &[R],
        b: &[R],
        ctr: &mut OpCounter,
    ) -> Result<Vec<R>> {
        let (da, db, dc) = self.target.dims();
        if a.len() != da || b.len() != db {
            return Err(Error::ShapeMismatch(format!(
                "input lengths {} / {} do not match algorithm dims {da} / {db}",
                a.len(),
                b.len()
            )));
        }
        if let Some(sched) = &self.schedule {
            let left = sched.left.eval(a, ctr)?;
            let right = sched.right.eval(b, ctr)?;
            debug_assert_eq!(left.len(), self.rank());
            let products: Vec<R> = left
                .iter()
                .zip(&right)
                .map(|(l, r)| {
                    ctr.multiplications += 1;
                    l.mul(r)
                })
                .collect();
            let out = sched.output.eval(&products, ctr)?;
            debug_assert_eq!(out.len(), dc);
            return Ok(out);
        }
        let mut products = Vec::with_capacity(self.rank());
        for q in 0..self.rank() {
            let l = eval_form(&self.u[q], a, ctr)?;
            let r = eval_form(&self.v[q], b, ctr)?;
            ctr.multiplications += 1;
            products.push(l.mul(&r));
        }
        let mut out = Vec::with_capacity(dc);
        for gamma in 0..dc {
            let column: SparseVec = (0..self.rank())
                .flat_map(|q| {
                    self.w[q]
                        .iter()
                        .filter(|(g, _)| *g == gamma)
                        .map(move |(_, c)| (q, c.clone()))
                })
                .collect();
            out.push(eval_form(&column, &products, ctr)?);
        }
        Ok(out)
    }
}

/// Index of the coefficient family being perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UvwPart {
    U,
    V,
    W,
}

fn first_tensor_mismatch(computed: &TargetTensor, target: &TargetTensor) -> VerifyOutcome {
    let mut keys: Vec<(usize, usize, usize)> = computed
        .iter()
        .map(|(k, _)| *k)
        .chain(target.iter().map(|(k, _)| *k))
        .collect();
    keys.sort_unstable();
    keys.dedup();
    for (alpha, beta, gamma) in keys {
        let actual = computed.coefficient(alpha, beta, gamma);
        let expected = target.coefficient(alpha, beta, gamma);
        if actual != expected {
            return VerifyOutcome::Violated(Violation {
                alpha,
                beta,
                gamma,
                expected,
                actual,
            });
        }
    }
    VerifyOutcome::Verified
}

/// Scalar application of a matrix-multiplication algorithm: exactly r ring
/// multiplications of linear-form values plus the additions its coefficients
/// imply.
pub fn apply_scalar<R: Ring>(
    alg: &BilinearAlgorithm,
    a: &Matrix<R>,
    b: &Matrix<R>,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>> {
    let shape = alg.mm_shape().ok_or_else(|| {
        Error::ShapeMismatch("apply_scalar requires an MM-target algorithm".into())
    })?;
    if a.rows() != shape.m || a.cols() != shape.k || b.rows() != shape.k || b.cols() != shape.n {
        return Err(Error::ShapeMismatch(format!(
            "inputs {}x{} and {}x{} do not fit MM({},{},{})",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            shape.m,
            shape.k,
            shape.n
        )));
    }
    let out = alg.apply_to_vectors(a.entries(), b.entries(), ctr)?;
    Ok(Matrix::from_entries(shape.m, shape.n, out).expect("output shape"))
}

/// Recursive block application of a square base algorithm. Inputs must be
/// square with size reachable by repeated division by the base; use
/// [`mm_fast`] to pad arbitrary inputs first. Below `cutoff` the
/// straightforward algorithm runs.
pub fn apply_recursive<R: Ring>(
    alg: &BilinearAlgorithm,
    a: &Matrix<R>,
    b: &Matrix<R>,
    cutoff: usize,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>> {
    let shape = alg.mm_shape().ok_or_else(|| {
        Error::ShapeMismatch("apply_recursive requires an MM-target algorithm".into())
    })?;
    if shape.m != shape.k || shape.k != shape.n {
        return Err(Error::ShapeMismatch(format!(
            "recursive application needs a square base, got MM({},{},{})",
            shape.m, shape.k, shape.n
        )));
    }
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "recursive application needs equal square inputs, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let cutoff = cutoff.max(1);
    recurse(alg, shape.n, a, b, cutoff, ctr)
}

fn recurse<R: Ring>(
    alg: &BilinearAlgorithm,
    base: usize,
    a: &Matrix<R>,
    b: &Matrix<R>,
    cutoff: usize,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>> {
    let size = a.rows();
    if size <= cutoff {
        return Ok(mm_naive(a, b, ctr)?);
    }
    if !size.is_multiple_of(base) {
        return Err(Error::SizeNotSplittable { size, base });
    }
    let s = size / base;
    let ga = block_split(a, base, base)?;
    let gb = block_split(b, base, base)?;
    let ablocks: Vec<&Matrix<R>> = ga.iter().flatten().collect();
    let bblocks: Vec<&Matrix<R>> = gb.iter().flatten().collect();

    let mut products: Vec<Matrix<R>> = Vec::with_capacity(alg.rank());
    for q in 0..alg.rank() {
        let left = combine_blocks(&alg.u_rows()[q], &ablocks, s, ctr)?;
        let right = combine_blocks(&alg.v_rows()[q], &bblocks, s, ctr)?;
        let prod = match (left, right) {
            (Some(l), Some(r)) => recurse(alg, base, &l, &r, cutoff, ctr)?,
            _ => Matrix::zeros(s, s),
        };
        products.push(prod);
    }

    let pr: Vec<&Matrix<R>> = products.iter().collect();
    let mut grid: Vec<Vec<Matrix<R>>> = Vec::with_capacity(base);
    for i in 0..base {
        let mut row = Vec::with_capacity(base);
        for h in 0..base {
            let gamma = i * base + h;
            let column: SparseVec = (0..alg.rank())
                .flat_map(|q| {
                    alg.w_rows()[q]
                        .iter()
                        .filter(|(g, _)| *g == gamma)
                        .map(move |(_, c)| (q, c.clone()))
                })
                .collect();
            let blk = combine_blocks(&column, &pr, s, ctr)?.unwrap_or_else(|| Matrix::zeros(s, s));
            row.push(blk);
        }
        grid.push(row);
    }
    Ok(block_join(&grid)?)
}

/// Linear combination of equally sized blocks under the standard counting
/// rule, per entry: unit coefficients are free, others cost one
/// multiplication per entry; each combining step costs one addition per
/// entry. Returns `None` for the empty form.
fn combine_blocks<R: Ring>(
    form: &SparseVec,
    blocks: &[&Matrix<R>],
    s: usize,
    ctr: &mut OpCounter,
) -> Result<Option<Matrix<R>>> {
    let mut iter = form.iter();
    let Some((i0, c0)) = iter.next() else {
        return Ok(None);
    };
    let mut acc = scale_block(c0, blocks[*i0], s, ctr)?;
    for (i, c) in iter {
        ctr.additions += (s * s) as u64;
        if c.is_one() {
            acc = add_into(acc, blocks[*i], Ring::add);
        } else if (-c).is_one() {
            acc = add_into(acc, blocks[*i], Ring::sub);
        } else {
            let scaled = scale_block(c, blocks[*i], s, ctr)?;
            acc = add_into(acc, &scaled, Ring::add);
        }
    }
    Ok(Some(acc))
}

fn scale_block<R: Ring>(
    c: &Coeff,
    block: &Matrix<R>,
    s: usize,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>> {
    if c.is_one() {
        return Ok(block.clone());
    }
    if (-c).is_one() {
        let entries = block.entries().iter().map(Ring::neg).collect();
        return Ok(Matrix::from_entries(s, s, entries).expect("block shape"));
    }
    let k = R::from_coeff(c)
        .ok_or_else(|| Error::CoeffNotRepresentable(format!("coefficient {c} in entry ring")))?;
    ctr.multiplications += (s * s) as u64;
    let entries = block.entries().iter().map(|x| k.mul(x)).collect();
    Ok(Matrix::from_entries(s, s, entries).expect("block shape"))
}

fn add_into<R: Ring>(acc: Matrix<R>, rhs: &Matrix<R>, op: fn(&R, &R) -> R) -> Matrix<R> {
    let (rows, cols) = (acc.rows(), acc.cols());
    let entries = acc
        .entries()
        .iter()
        .zip(rhs.entries())
        .map(|(x, y)| op(x, y))
        .collect();
    Matrix::from_entries(rows, cols, entries).expect("block shape")
}

/// Top-level driver: pads square inputs up to the nearest power of the
/// algorithm's base, applies the recursion, and crops the result back.
pub fn mm_fast<R: Ring>(
    alg: &BilinearAlgorithm,
    a: &Matrix<R>,
    b: &Matrix<R>,
    cutoff: usize,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>> {
    let shape = alg
        .mm_shape()
        .ok_or_else(|| Error::ShapeMismatch("mm_fast requires an MM-target algorithm".into()))?;
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(
            "mm_fast requires equal square inputs".into(),
        ));
    }
    let n = a.rows();
    let pa = pad_to_block_power(a, shape.n);
    let pb = pad_to_block_power(b, shape.n);
    let full = apply_recursive(alg, &pa, &pb, cutoff, ctr)?;
    Ok(full.crop(n, n))
}

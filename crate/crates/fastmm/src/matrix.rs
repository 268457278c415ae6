//! Dense exact matrices, the straightforward multiplication baseline,
//! block partitioning, zero padding, and arithmetic-operation counting.

use crate::ring::Ring;
use rand::Rng;
use std::fmt;

/// Counts ring operations performed by a computation. Additions and
/// subtractions are pooled in `additions`. Counters are caller-owned and
/// merged explicitly; nothing here is global.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub multiplications: u64,
    pub additions: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn total(&self) -> u64 {
        self.multiplications + self.additions
    }

    /// Componentwise sum, for joining counters from independent subtasks.
    pub fn merge(&mut self, other: &OpCounter) {
        self.multiplications += other.multiplications;
        self.additions += other.additions;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    DimensionMismatch {
        context: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    BadShape(String),
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::DimensionMismatch { context, lhs, rhs } => write!(
                f,
                "dimension mismatch in {context}: {}x{} vs {}x{}",
                lhs.0, lhs.1, rhs.0, rhs.1
            ),
            MatrixError::BadShape(msg) => write!(f, "bad shape: {msg}"),
        }
    }
}

impl std::error::Error for MatrixError {}

/// Dense row-major matrix over a ring `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R: Ring> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<R>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::BadShape(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::BadShape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![R::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    /// Convenience constructor from i64 literals, row-major.
    pub fn from_i64(rows: usize, cols: usize, vals: &[i64]) -> Self {
        let entries = vals.iter().map(|&v| R::from_i64(v)).collect();
        Self::from_entries(rows, cols, entries).expect("literal shape")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &R {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: R) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major flattening used throughout: entry (r, c) sits at r*cols + c.
    pub fn flat_index(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    /// Top-left `rows x cols` sub-matrix. Used by drivers to undo padding.
    pub fn crop(&self, rows: usize, cols: usize) -> Self {
        assert!(rows <= self.rows && cols <= self.cols);
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out.set(r, c, self.get(r, c).clone());
            }
        }
        out
    }

    /// Uniformly random entries in `[lo, hi]`.
    pub fn random<T: Rng>(rows: usize, cols: usize, lo: i64, hi: i64, rng: &mut T) -> Self {
        let entries = (0..rows * cols)
            .map(|_| R::from_i64(rng.gen_range(lo..=hi)))
            .collect();
        Self {
            rows,
            cols,
            entries,
        }
    }
}

/// Straightforward product: mn inner products of length k. On square n-by-n
/// inputs this costs exactly n^3 multiplications and n^3 - n^2 additions.
pub fn mm_naive<R: Ring>(
    a: &Matrix<R>,
    b: &Matrix<R>,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>, MatrixError> {
    if a.cols != b.rows {
        return Err(MatrixError::DimensionMismatch {
            context: "mm_naive",
            lhs: (a.rows, a.cols),
            rhs: (b.rows, b.cols),
        });
    }
    let (m, k, n) = (a.rows, a.cols, b.cols);
    let mut out = Matrix::zeros(m, n);
    for i in 0..m {
        for h in 0..n {
            let mut acc = a.get(i, 0).mul(b.get(0, h));
            ctr.multiplications += 1;
            for j in 1..k {
                acc = acc.add(&a.get(i, j).mul(b.get(j, h)));
                ctr.multiplications += 1;
                ctr.additions += 1;
            }
            out.set(i, h, acc);
        }
    }
    Ok(out)
}

/// Elementwise sum; costs rows*cols additions.
pub fn add<R: Ring>(
    a: &Matrix<R>,
    b: &Matrix<R>,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>, MatrixError> {
    elementwise(a, b, ctr, "add", Ring::add)
}

/// Elementwise difference; costs rows*cols additions.
pub fn sub<R: Ring>(
    a: &Matrix<R>,
    b: &Matrix<R>,
    ctr: &mut OpCounter,
) -> Result<Matrix<R>, MatrixError> {
    elementwise(a, b, ctr, "sub", Ring::sub)
}

fn elementwise<R: Ring>(
    a: &Matrix<R>,
    b: &Matrix<R>,
    ctr: &mut OpCounter,
    context: &'static str,
    op: fn(&R, &R) -> R,
) -> Result<Matrix<R>, MatrixError> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(MatrixError::DimensionMismatch {
            context,
            lhs: (a.rows, a.cols),
            rhs: (b.rows, b.cols),
        });
    }
    let entries = a
        .entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| op(x, y))
        .collect();
    ctr.additions += (a.rows * a.cols) as u64;
    Ok(Matrix {
        rows: a.rows,
        cols: a.cols,
        entries,
    })
}

/// Smallest base^p (p minimal, base^p >= max(rows, cols)) square matrix
/// holding `a` in its top-left corner, zeros elsewhere. For square n-by-n
/// input and base 2 this lands in [n, 2n).
pub fn pad_to_block_power<R: Ring>(a: &Matrix<R>, base: usize) -> Matrix<R> {
    assert!(base >= 2, "base must be at least 2");
    let need = a.rows.max(a.cols);
    let mut size = 1usize;
    while size < need {
        size *= base;
    }
    if size == a.rows && size == a.cols {
        return a.clone();
    }
    let mut out = Matrix::zeros(size, size);
    for r in 0..a.rows {
        for c in 0..a.cols {
            out.set(r, c, a.get(r, c).clone());
        }
    }
    out
}

/// Partition into an rb-by-cb grid of equal blocks. `rb` must divide the row
/// count and `cb` the column count.
pub fn block_split<R: Ring>(
    a: &Matrix<R>,
    rb: usize,
    cb: usize,
) -> Result<Vec<Vec<Matrix<R>>>, MatrixError> {
    if rb == 0 || cb == 0 || !a.rows.is_multiple_of(rb) || !a.cols.is_multiple_of(cb) {
        return Err(MatrixError::BadShape(format!(
            "cannot split {}x{} into {rb}x{cb} blocks",
            a.rows, a.cols
        )));
    }
    let (br, bc) = (a.rows / rb, a.cols / cb);
    let mut grid = Vec::with_capacity(rb);
    for gr in 0..rb {
        let mut row = Vec::with_capacity(cb);
        for gc in 0..cb {
            let mut blk = Matrix::zeros(br, bc);
            for r in 0..br {
                for c in 0..bc {
                    blk.set(r, c, a.get(gr * br + r, gc * bc + c).clone());
                }
            }
            row.push(blk);
        }
        grid.push(row);
    }
    Ok(grid)
}

/// Inverse of [`block_split`]: reassemble a grid of equal blocks.
pub fn block_join<R: Ring>(grid: &[Vec<Matrix<R>>]) -> Result<Matrix<R>, MatrixError> {
    if grid.is_empty() || grid[0].is_empty() {
        return Err(MatrixError::BadShape("empty block grid".into()));
    }
    let (br, bc) = (grid[0][0].rows, grid[0][0].cols);
    let rows = grid.len() * br;
    let cols = grid[0].len() * bc;
    let mut out = Matrix::zeros(rows, cols);
    for (gr, row) in grid.iter().enumerate() {
        for (gc, blk) in row.iter().enumerate() {
            if blk.rows != br || blk.cols != bc {
                return Err(MatrixError::BadShape("ragged block grid".into()));
            }
            for r in 0..br {
                for c in 0..bc {
                    out.set(gr * br + r, gc * bc + c, blk.get(r, c).clone());
                }
            }
        }
    }
    Ok(out)
}

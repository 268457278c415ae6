//! fastmm: an exact laboratory for fast matrix multiplication.
//!
//! The crate implements, verifies, and counts the operations of the classic
//! fast-MM toolkit: recursive bilinear algorithms (the rank-7 MM(2)
//! algorithm and its 15-addition Winograd variant), trilinear
//! decompositions with their duality transforms, trilinear aggregation for
//! disjoint products, border-rank (APA) algorithms with exact interpolation
//! recovery, exponent arithmetic, and binary segmentation for inner
//! products, sums, and convolutions over one long multiplication.
//!
//! Everything correctness-critical runs over exact arithmetic (big
//! integers and rationals); floating point appears only in numeric APA
//! experiments and wall-clock benchmarking.

pub mod aggregation;
pub mod apa;
pub mod bilinear;
pub mod binseg;
pub mod catalog;
pub mod error;
pub mod exponent;
pub mod history;
pub mod lambda;
pub mod matrix;
pub mod ring;
pub mod tensor;
pub mod textfmt;
pub mod trilinear;
pub mod ubnat;

pub use bilinear::{apply_recursive, apply_scalar, mm_fast, BilinearAlgorithm, VerifyOutcome};
pub use error::{Error, Result};
pub use matrix::{mm_naive, Matrix, OpCounter};
pub use ring::{Coeff, Ring};
pub use tensor::{MmShape, TargetTensor};
pub use ubnat::UnboundedNatural;

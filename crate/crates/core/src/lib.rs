//! Quantum multiple-kernel learning pipeline for QSAR classification.
//!
//! The crate covers the full path from molecular structure to benchmark
//! metrics:
//!
//! - [`chem`] — SMILES parsing into molecular graphs and 2D descriptor
//!   computation (TPSA, connectivity indices, Bertz complexity, counts).
//! - [`data`] — dataset ingestion, activity labeling, standardization and
//!   PCA via a cyclic Jacobi eigensolver.
//! - [`qsim`] — exact statevector simulation of angle-embedding feature
//!   maps and state fidelity.
//! - [`kernels`] — quantum fidelity and RBF Gram matrices, kernel-target
//!   alignment and convex kernel combination.
//! - [`svm`] — kernel SVM trained with sequential minimal optimization on
//!   precomputed Gram matrices.
//! - [`gbm`] — gradient-boosted trees with logistic loss, the classical
//!   baseline.
//! - [`eval`] — ROC analysis and confusion metrics.

pub mod chem;
pub mod data;
pub mod eval;
pub mod gbm;
pub mod kernels;
pub mod qsim;
pub mod rng;
pub mod svm;

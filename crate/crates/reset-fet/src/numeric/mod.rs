//! Internal numerical kernels: overflow-safe evaluation of the sinh-sum
//! ratios behind every closed form, double-double arithmetic for the Airy
//! series, adaptive quadrature and Richardson differentiation.

pub mod dd;
pub mod diff;
pub mod quad;
pub mod sinh_ratio;

pub use sinh_ratio::{
    eval_hyper_ratio, eval_sinh_ratio, eval_sinh_ratio_complex, CSinhTerm, HyperTerm, SinhTerm,
};

//! Min Ones constraint satisfaction over finite Boolean constraint languages:
//! classification, sunflower-based kernelization, exact solvers and the
//! gadget constructions behind the kernel lower bound.

pub mod builtin;
pub mod formula;
pub mod relation;
pub mod classify;
pub mod solve;
pub mod kernel;
pub mod gadgets;

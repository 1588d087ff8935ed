//! Exact linear algebra over prime fields.

mod ext;
mod field;
mod matrix;
pub mod sparse;
mod subspace;

use std::cell::Cell;

pub use ext::{is_irreducible, ExtField};
pub use field::{is_prime, primes_between, FieldSpec, Fp};
pub use matrix::{rref, solve, FpMatrix};
pub use subspace::{kernel, Echelon, FpSubspace};

thread_local! {
    static OPS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub(crate) fn count_ops(n: u64) {
    OPS.with(|c| c.set(c.get().wrapping_add(n)));
}

/// Multiply-add operations performed by the eliminators on this thread.
pub fn op_count() -> u64 {
    OPS.with(|c| c.get())
}

pub fn reset_op_count() {
    OPS.with(|c| c.set(0));
}

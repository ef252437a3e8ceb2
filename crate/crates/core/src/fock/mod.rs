//! Truncated Fock-space linear algebra.

mod density;
mod multimode;
mod operator;
mod state;

pub use density::{
    log_negativity, partial_trace, reduced_entropy, schmidt_entropy, DensityOperator, PartialTrace,
};
pub use multimode::MultiModeState;
pub use operator::{
    apply, creation, displacement_generator, displacement_operator, expm_generator, identity,
    ladder, number_operator, squeeze_generator, squeeze_operator, MatrixOperator, Operand,
    OperatorKind,
};
pub use state::{tensor, ModeState, TwoModeState, C64, MODE_A, MODE_B, TAIL_LEVELS};

/// `<a|b>`.
pub fn inner(a: &ModeState, b: &ModeState) -> crate::Result<C64> {
    a.inner(b)
}

/// `<n>` of a normalized single-mode state.
pub fn mean_photon(s: &ModeState) -> crate::Result<f64> {
    s.mean_photon()
}

/// `<n_A + n_B>` of a normalized two-mode state.
pub fn mean_photon_two_mode(s: &TwoModeState) -> crate::Result<f64> {
    s.require_normalized()?;
    let c = s.coeffs();
    let mut total = 0.0;
    for j in 0..c.nrows() {
        for k in 0..c.ncols() {
            total += (j + k) as f64 * c[(j, k)].norm_sqr();
        }
    }
    Ok(total)
}

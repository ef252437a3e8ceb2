use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

pub type C64 = Complex64;

/// Number of highest Fock levels whose population defines the truncation tail.
pub const TAIL_LEVELS: usize = 4;

/// Index of the microscopic mode of a two-mode state.
pub const MODE_A: usize = 0;
/// Index of the macroscopic mode of a two-mode state.
pub const MODE_B: usize = 1;

fn check_finite<'a>(mut it: impl Iterator<Item = &'a C64>) -> Result<()> {
    if it.all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidOperator)
    }
}

/// Phase factor that rotates the first non-negligible amplitude onto the
/// positive real axis.
fn canonical_phase<'a>(amps: impl Iterator<Item = &'a C64> + Clone) -> C64 {
    let max = amps.clone().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return C64::new(1.0, 0.0);
    }
    amps.into_iter()
        .find(|c| c.norm() > 1e-9 * max)
        .map(|c| c.conj() / c.norm())
        .unwrap_or(C64::new(1.0, 0.0))
}

/// Amplitudes of a single bosonic mode over the truncated Fock basis
/// `|0>, ..., |d-1>`. Norms are never changed implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    amps: DVector<C64>,
}

impl ModeState {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(amps))
    }

    pub fn from_vector(amps: DVector<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "a mode needs at least one Fock level",
            });
        }
        check_finite(amps.iter())?;
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Fock state `|n>` in dimension `d`.
    pub fn fock(n: usize, d: usize) -> Result<Self> {
        if n >= d {
            return Err(Error::InvalidDimension {
                dim: d,
                reason: "Fock level outside the truncation",
            });
        }
        let mut amps = DVector::zeros(d);
        amps[n] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn vacuum(d: usize) -> Result<Self> {
        Self::fock(0, d)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Unit-norm copy together with the original norm (the herald weight of
    /// a conditioned state is its squared norm).
    pub fn normalize(&self) -> Result<(ModeState, f64)> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok((
            Self {
                amps: &self.amps / C64::new(norm, 0.0),
            },
            norm,
        ))
    }

    pub fn normalized(&self) -> Result<ModeState> {
        self.normalize().map(|(s, _)| s)
    }

    pub fn require_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NumericPolicy::current().norm_tol {
            return Err(Error::RequiresNormalized { norm_sqr: n });
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &ModeState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|<a|b>|^2 / (<a|a><b|b>)`, with the shorter state zero-padded.
    pub fn fidelity(&self, other: &ModeState) -> Result<f64> {
        let d = self.dim().max(other.dim());
        let (a, b) = (self.padded(d), other.padded(d));
        let denom = a.norm_sqr() * b.norm_sqr();
        if denom == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(a.inner(&b)?.norm_sqr() / denom)
    }

    /// Population of the top [`TAIL_LEVELS`] levels relative to the norm.
    pub fn tail_mass(&self) -> f64 {
        let total = self.norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        let start = self.dim().saturating_sub(TAIL_LEVELS);
        self.amps.rows(start, self.dim() - start).norm_squared() / total
    }

    pub fn is_converged(&self) -> bool {
        self.tail_mass() < NumericPolicy::current().tail_tol
    }

    pub fn require_converged(&self) -> Result<()> {
        let tail = self.tail_mass();
        if tail < NumericPolicy::current().tail_tol {
            Ok(())
        } else {
            Err(Error::Convergence {
                dim: self.dim(),
                tail,
            })
        }
    }

    /// Copy zero-padded (or cut) to dimension `d`.
    pub fn padded(&self, d: usize) -> ModeState {
        let mut amps = DVector::zeros(d);
        let n = d.min(self.dim());
        amps.rows_mut(0, n).copy_from(&self.amps.rows(0, n));
        Self { amps }
    }

    /// Copy with the global phase fixed so the first significant amplitude is
    /// real and positive.
    pub fn canonical(&self) -> ModeState {
        let phase = canonical_phase(self.amps.iter());
        Self {
            amps: &self.amps * phase,
        }
    }

    pub fn scaled(&self, factor: C64) -> ModeState {
        Self {
            amps: &self.amps * factor,
        }
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: C64, other: &ModeState, beta: C64) -> Result<ModeState> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            amps: &self.amps * alpha + &other.amps * beta,
        })
    }

    pub fn photon_distribution(&self) -> Vec<f64> {
        self.amps.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `<n>` of a normalized state.
    pub fn mean_photon(&self) -> Result<f64> {
        self.require_normalized()?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum())
    }

    /// Largest amplitude difference after bringing both to canonical phase
    /// and a common dimension.
    pub fn max_diff_canonical(&self, other: &ModeState) -> f64 {
        let d = self.dim().max(other.dim());
        let (a, b) = (self.padded(d).canonical(), other.padded(d).canonical());
        a.amps
            .iter()
            .zip(b.amps.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Coefficients `c[j][k]` of `sum c[j][k] |j>_A |k>_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    coeffs: DMatrix<C64>,
}

impl TwoModeState {
    pub fn from_matrix(coeffs: DMatrix<C64>) -> Result<Self> {
        if coeffs.nrows() == 0 || coeffs.ncols() == 0 {
            return Err(Error::InvalidDimension {
                dim: 0,
                reason: "each mode needs at least one Fock level",
            });
        }
        check_finite(coeffs.iter())?;
        Ok(Self { coeffs })
    }

    pub fn zeros(d_a: usize, d_b: usize) -> Result<Self> {
        Self::from_matrix(DMatrix::zeros(d_a, d_b))
    }

    /// Builds a state from the macro-mode vectors conditioned on each micro
    /// level: row `j` holds `<j|_A psi>`.
    pub fn from_rows(rows: &[ModeState]) -> Result<Self> {
        let d_b = rows.first().ok_or(Error::EmptyModeSet)?.dim();
        let mut coeffs = DMatrix::zeros(rows.len(), d_b);
        for (j, row) in rows.iter().enumerate() {
            if row.dim() != d_b {
                return Err(Error::DimensionMismatch {
                    expected: d_b,
                    found: row.dim(),
                });
            }
            coeffs.row_mut(j).copy_from(&row.amplitudes().transpose());
        }
        Ok(Self { coeffs })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.coeffs.nrows(), self.coeffs.ncols())
    }

    pub fn coeffs(&self) -> &DMatrix<C64> {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize, k: usize) -> C64 {
        self.coeffs.get((j, k)).copied().unwrap_or_default()
    }

    /// Unnormalized macro-mode state conditioned on micro level `j`.
    pub fn row(&self, j: usize) -> ModeState {
        let amps = if j < self.coeffs.nrows() {
            self.coeffs.row(j).transpose()
        } else {
            DVector::zeros(self.coeffs.ncols())
        };
        ModeState { amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn normalize(&self) -> Result<(TwoModeState, f64)> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok((
            Self {
                coeffs: &self.coeffs / C64::new(norm, 0.0),
            },
            norm,
        ))
    }

    pub fn require_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NumericPolicy::current().norm_tol {
            return Err(Error::RequiresNormalized { norm_sqr: n });
        }
        Ok(())
    }

    pub fn inner(&self, other: &TwoModeState) -> Result<C64> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                found: other.coeffs.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Normalized overlap `|<a|b>|^2 / (<a|a><b|b>)` after zero-padding.
    pub fn fidelity(&self, other: &TwoModeState) -> Result<f64> {
        let (ra, ca) = self.dims();
        let (rb, cb) = other.dims();
        let (a, b) = (
            self.padded(ra.max(rb), ca.max(cb)),
            other.padded(ra.max(rb), ca.max(cb)),
        );
        let denom = a.norm_sqr() * b.norm_sqr();
        if denom == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(a.inner(&b)?.norm_sqr() / denom)
    }

    pub fn padded(&self, d_a: usize, d_b: usize) -> TwoModeState {
        let mut coeffs = DMatrix::zeros(d_a, d_b);
        let (r, c) = (d_a.min(self.coeffs.nrows()), d_b.min(self.coeffs.ncols()));
        coeffs
            .view_mut((0, 0), (r, c))
            .copy_from(&self.coeffs.view((0, 0), (r, c)));
        Self { coeffs }
    }

    /// Global phase fixed on the first significant coefficient in row-major
    /// order.
    pub fn canonical(&self) -> TwoModeState {
        let row_major: Vec<C64> = self.coeffs.transpose().iter().copied().collect();
        let phase = canonical_phase(row_major.iter());
        Self {
            coeffs: &self.coeffs * phase,
        }
    }

    pub fn scaled(&self, factor: C64) -> TwoModeState {
        Self {
            coeffs: &self.coeffs * factor,
        }
    }

    pub fn combine(&self, alpha: C64, other: &TwoModeState, beta: C64) -> Result<TwoModeState> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                found: other.coeffs.len(),
            });
        }
        Ok(Self {
            coeffs: &self.coeffs * alpha + &other.coeffs * beta,
        })
    }

    /// Largest coefficient difference after canonical phase and padding.
    pub fn max_diff_canonical(&self, other: &TwoModeState) -> f64 {
        let (ra, ca) = self.dims();
        let (rb, cb) = other.dims();
        let (r, c) = (ra.max(rb), ca.max(cb));
        let a = self.padded(r, c).canonical();
        let b = other.padded(r, c).canonical();
        a.coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Relative population of the top levels of either mode's marginal.
    pub fn tail_mass(&self) -> f64 {
        let total = self.norm_sqr();
        if total == 0.0 {
            return 0.0;
        }
        let (d_a, d_b) = self.dims();
        let a0 = d_a.saturating_sub(TAIL_LEVELS);
        let b0 = d_b.saturating_sub(TAIL_LEVELS);
        let tail_a = self.coeffs.rows(a0, d_a - a0).norm_squared();
        let tail_b = self.coeffs.columns(b0, d_b - b0).norm_squared();
        tail_a.max(tail_b) / total
    }

    pub fn is_converged(&self) -> bool {
        self.tail_mass() < NumericPolicy::current().tail_tol
    }

    /// Flattened amplitudes, index `j * d_b + k`.
    pub fn to_flat(&self) -> DVector<C64> {
        let (d_a, d_b) = self.dims();
        DVector::from_fn(d_a * d_b, |i, _| self.coeffs[(i / d_b, i % d_b)])
    }

    pub fn from_flat(flat: &DVector<C64>, d_a: usize, d_b: usize) -> Result<Self> {
        if flat.len() != d_a * d_b {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: flat.len(),
            });
        }
        Self::from_matrix(DMatrix::from_fn(d_a, d_b, |j, k| flat[j * d_b + k]))
    }

    /// Swaps micro levels `|0>` and `|1>`.
    pub fn bit_flipped(&self) -> Result<TwoModeState> {
        if self.coeffs.nrows() < 2 {
            return Err(Error::InvalidDimension {
                dim: self.coeffs.nrows(),
                reason: "bit flip needs a micro mode with two levels",
            });
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.swap_rows(0, 1);
        Ok(Self { coeffs })
    }
}

/// `a ⊗ b`.
pub fn tensor(a: &ModeState, b: &ModeState) -> TwoModeState {
    TwoModeState {
        coeffs: a.amplitudes() * b.amplitudes().transpose(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn fock_states_are_orthonormal() {
        let zero = ModeState::fock(0, 4).unwrap();
        let one = ModeState::fock(1, 4).unwrap();
        assert_eq!(zero.inner(&one).unwrap(), c(0.0));
        assert_eq!(one.inner(&one).unwrap(), c(1.0));
        assert!(ModeState::fock(4, 4).is_err());
    }

    #[test]
    fn normalize_reports_weight_and_rejects_zero() {
        let s = ModeState::from_real(&[0.0, 0.5]).unwrap();
        let (n, w) = s.normalize().unwrap();
        assert_eq!(w, 0.5);
        assert!((n.norm() - 1.0).abs() < 1e-15);
        let zero = ModeState::from_real(&[0.0, 0.0]).unwrap();
        assert_eq!(zero.normalize().unwrap_err(), Error::ZeroState);
    }

    #[test]
    fn rejects_non_finite_amplitudes() {
        assert!(ModeState::from_real(&[f64::NAN]).is_err());
        assert!(ModeState::new(vec![]).is_err());
    }

    #[test]
    fn tensor_places_product_coefficients() {
        let one = ModeState::fock(1, 3).unwrap();
        let zero = ModeState::fock(0, 3).unwrap();
        let s = tensor(&one, &zero);
        assert_eq!(s.coeff(1, 0), c(1.0));
        assert_eq!(s.norm_sqr(), 1.0);

        let a = ModeState::from_real(&[1.0, 2.0]).unwrap();
        let b = ModeState::from_real(&[0.0, 3.0, 4.0]).unwrap();
        assert!((tensor(&a, &b).norm() - a.norm() * b.norm()).abs() < 1e-12);
    }

    #[test]
    fn canonical_phase_makes_first_amplitude_positive() {
        let s = ModeState::new(vec![C64::new(0.0, -0.6), C64::new(0.8, 0.0)]).unwrap();
        let canon = s.canonical();
        assert!((canon.amplitude(0) - c(0.6)).norm() < 1e-15);
        assert!((canon.amplitude(1) - C64::new(0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn tail_mass_counts_top_levels() {
        let mut amps = vec![0.0; 10];
        amps[0] = 1.0;
        amps[7] = 1.0;
        let s = ModeState::from_real(&amps).unwrap();
        assert!((s.tail_mass() - 0.5).abs() < 1e-15);
        assert!(!s.is_converged());
        assert!(ModeState::fock(0, 10).unwrap().is_converged());
    }

    #[test]
    fn flat_round_trip_and_bit_flip() {
        let a = ModeState::from_real(&[0.6, 0.8]).unwrap();
        let b = ModeState::from_real(&[1.0, 0.0, 0.0]).unwrap();
        let s = tensor(&a, &b);
        let back = TwoModeState::from_flat(&s.to_flat(), 2, 3).unwrap();
        assert_eq!(back, s);
        let flipped = s.bit_flipped().unwrap();
        assert_eq!(flipped.coeff(0, 0), c(0.8));
        assert_eq!(flipped.coeff(1, 0), c(0.6));
    }
}

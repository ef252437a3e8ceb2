use nalgebra::{DMatrix, DVector};

use super::state::{ModeState, TwoModeState, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    General,
    Hermitian,
    /// Generator `G` with `G^† = -G`; its exponential is unitary.
    AntiHermitian,
    Unitary,
}

/// Dense operator on one mode (`dims = [d]`) or on a pair of modes
/// (`dims = [d_a, d_b]`, basis index `j * d_b + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator {
    matrix: DMatrix<C64>,
    dims: Vec<usize>,
    kind: OperatorKind,
}

impl MatrixOperator {
    pub fn new(matrix: DMatrix<C64>, dims: Vec<usize>, kind: OperatorKind) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.len() > 2 || total == 0 {
            return Err(Error::InvalidDimension {
                dim: total,
                reason: "operators act on one or two modes",
            });
        }
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: matrix.nrows(),
            });
        }
        if !matrix.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::InvalidOperator);
        }
        Ok(Self { matrix, dims, kind })
    }

    pub fn single(matrix: DMatrix<C64>, kind: OperatorKind) -> Result<Self> {
        let d = matrix.nrows();
        Self::new(matrix, vec![d], kind)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn adjoint(&self) -> MatrixOperator {
        let kind = match self.kind {
            OperatorKind::AntiHermitian | OperatorKind::Unitary | OperatorKind::Hermitian => {
                self.kind
            }
            OperatorKind::General => OperatorKind::General,
        };
        Self {
            matrix: self.matrix.adjoint(),
            dims: self.dims.clone(),
            kind,
        }
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &MatrixOperator) -> Result<MatrixOperator> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let kind = if self.kind == OperatorKind::Unitary && other.kind == OperatorKind::Unitary {
            OperatorKind::Unitary
        } else {
            OperatorKind::General
        };
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            dims: self.dims.clone(),
            kind,
        })
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: C64, other: &MatrixOperator, beta: C64) -> Result<MatrixOperator> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix * alpha + &other.matrix * beta,
            dims: self.dims.clone(),
            kind: OperatorKind::General,
        })
    }

    /// `A ⊗ B` on two modes.
    pub fn kron(a: &MatrixOperator, b: &MatrixOperator) -> Result<MatrixOperator> {
        if a.dims.len() != 1 || b.dims.len() != 1 {
            return Err(Error::InvalidDimension {
                dim: a.dims.len() + b.dims.len(),
                reason: "kron takes two single-mode operators",
            });
        }
        Self::new(
            a.matrix.kronecker(&b.matrix),
            vec![a.dim(), b.dim()],
            OperatorKind::General,
        )
    }

    /// Largest entry of `|U^† U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        (prod - DMatrix::<C64>::identity(d, d))
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn apply_to(&self, s: &ModeState) -> Result<ModeState> {
        if self.dims.len() != 1 || self.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: s.dim(),
            });
        }
        ModeState::from_vector(&self.matrix * s.amplitudes())
    }

    /// Applies a single-mode operator to mode `mode` of a two-mode state.
    pub fn apply_to_mode(&self, s: &TwoModeState, mode: usize) -> Result<TwoModeState> {
        if self.dims.len() != 1 {
            return Err(Error::InvalidDimension {
                dim: self.dims.len(),
                reason: "expected a single-mode operator",
            });
        }
        let (d_a, d_b) = s.dims();
        match mode {
            0 if self.dim() == d_a => TwoModeState::from_matrix(&self.matrix * s.coeffs()),
            1 if self.dim() == d_b => {
                TwoModeState::from_matrix(s.coeffs() * self.matrix.transpose())
            }
            0 | 1 => Err(Error::DimensionMismatch {
                expected: if mode == 0 { d_a } else { d_b },
                found: self.dim(),
            }),
            _ => Err(Error::ModeOutOfRange { mode, modes: 2 }),
        }
    }

    /// Applies a two-mode operator to the joint state.
    pub fn apply_joint(&self, s: &TwoModeState) -> Result<TwoModeState> {
        let (d_a, d_b) = s.dims();
        if self.dims != [d_a, d_b] {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: self.dim(),
            });
        }
        let out: DVector<C64> = &self.matrix * s.to_flat();
        TwoModeState::from_flat(&out, d_a, d_b)
    }
}

/// States an operator can act on.
pub trait Operand: Sized {
    fn apply_operator(&self, op: &MatrixOperator, mode: usize) -> Result<Self>;
}

impl Operand for ModeState {
    fn apply_operator(&self, op: &MatrixOperator, mode: usize) -> Result<Self> {
        if mode != 0 {
            return Err(Error::ModeOutOfRange { mode, modes: 1 });
        }
        op.apply_to(self)
    }
}

impl Operand for TwoModeState {
    /// Single-mode operators act on `mode`; two-mode operators act jointly
    /// and require `mode == 0`.
    fn apply_operator(&self, op: &MatrixOperator, mode: usize) -> Result<Self> {
        if op.dims().len() == 2 {
            if mode != 0 {
                return Err(Error::ModeOutOfRange { mode, modes: 1 });
            }
            op.apply_joint(self)
        } else {
            op.apply_to_mode(self, mode)
        }
    }
}

/// `op` on the selected tensor factor of `s`; never renormalizes.
pub fn apply<S: Operand>(op: &MatrixOperator, s: &S, mode: usize) -> Result<S> {
    s.apply_operator(op, mode)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Annihilation operator, `<n-1|a|n> = sqrt(n)`.
pub fn ladder(d: usize) -> Result<MatrixOperator> {
    if d < 2 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "ladder operators need d >= 2",
        });
    }
    let mut m = DMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = real((n as f64).sqrt());
    }
    MatrixOperator::single(m, OperatorKind::General)
}

pub fn creation(d: usize) -> Result<MatrixOperator> {
    Ok(ladder(d)?.adjoint())
}

pub fn number_operator(d: usize) -> Result<MatrixOperator> {
    if d < 1 {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "need at least one level",
        });
    }
    let m = DMatrix::from_diagonal(&DVector::from_fn(d, |n, _| real(n as f64)));
    MatrixOperator::single(m, OperatorKind::Hermitian)
}

pub fn identity(d: usize) -> Result<MatrixOperator> {
    MatrixOperator::single(DMatrix::identity(d, d), OperatorKind::Unitary)
}

/// `(r/2)(a†² - a²)`, the generator of the single-mode squeezer.
pub fn squeeze_generator(r: f64, d: usize) -> Result<MatrixOperator> {
    let mut m = DMatrix::zeros(d, d);
    for n in 2..d {
        let v = 0.5 * r * ((n * (n - 1)) as f64).sqrt();
        m[(n, n - 2)] = real(v);
        m[(n - 2, n)] = real(-v);
    }
    MatrixOperator::single(m, OperatorKind::AntiHermitian)
}

/// `beta a† - beta* a`, the generator of the displacement operator.
pub fn displacement_generator(beta: C64, d: usize) -> Result<MatrixOperator> {
    let mut m = DMatrix::zeros(d, d);
    for n in 1..d {
        let s = (n as f64).sqrt();
        m[(n, n - 1)] = beta * s;
        m[(n - 1, n)] = -beta.conj() * s;
    }
    MatrixOperator::single(m, OperatorKind::AntiHermitian)
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
/// Real generators take a real-arithmetic path.
pub fn expm_generator(g: &MatrixOperator) -> Result<MatrixOperator> {
    let m = g.matrix();
    if !m.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::InvalidOperator);
    }
    let exp = if m.iter().all(|c| c.im == 0.0) {
        m.map(|c| c.re).exp().map(real)
    } else {
        m.clone().exp()
    };
    let kind = match g.kind() {
        OperatorKind::AntiHermitian => OperatorKind::Unitary,
        _ => OperatorKind::General,
    };
    MatrixOperator::new(exp, g.dims().to_vec(), kind)
}

pub fn squeeze_operator(r: f64, d: usize) -> Result<MatrixOperator> {
    expm_generator(&squeeze_generator(r, d)?)
}

pub fn displacement_operator(beta: C64, d: usize) -> Result<MatrixOperator> {
    expm_generator(&displacement_generator(beta, d)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::tensor;

    #[test]
    fn ladder_matrix_elements() {
        let a = ladder(6).unwrap();
        let one = ModeState::fock(1, 6).unwrap();
        assert_eq!(a.apply_to(&one).unwrap(), ModeState::fock(0, 6).unwrap());
        let vac = ModeState::vacuum(6).unwrap();
        assert_eq!(a.apply_to(&vac).unwrap().norm(), 0.0);
        let four = ModeState::fock(4, 6).unwrap();
        let out = a.apply_to(&four).unwrap();
        assert_eq!(out, ModeState::fock(3, 6).unwrap().scaled(real(2.0)));
        assert!(ladder(1).is_err());
    }

    #[test]
    fn number_operator_is_diagonal() {
        let n = number_operator(5).unwrap();
        let three = ModeState::fock(3, 5).unwrap();
        assert_eq!(n.apply_to(&three).unwrap(), three.scaled(real(3.0)));
        let vac = ModeState::vacuum(5).unwrap();
        assert_eq!(vac.inner(&n.apply_to(&vac).unwrap()).unwrap(), real(0.0));
    }

    #[test]
    fn expm_of_zero_and_diagonal() {
        let zero = MatrixOperator::single(DMatrix::zeros(4, 4), OperatorKind::General).unwrap();
        assert_eq!(
            expm_generator(&zero).unwrap().matrix(),
            &DMatrix::<C64>::identity(4, 4)
        );

        let theta = 0.37;
        let n = number_operator(6).unwrap();
        let g = MatrixOperator::single(
            n.matrix() * C64::new(0.0, theta),
            OperatorKind::AntiHermitian,
        )
        .unwrap();
        let u = expm_generator(&g).unwrap();
        for k in 0..6 {
            let out = u.apply_to(&ModeState::fock(k, 6).unwrap()).unwrap();
            let expected = C64::from_polar(1.0, theta * k as f64);
            assert!((out.amplitude(k) - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn expm_rejects_non_finite() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = real(f64::INFINITY);
        assert!(MatrixOperator::single(m, OperatorKind::General).is_err());
    }

    #[test]
    fn apply_checks_modes_and_dims() {
        let a = ladder(3).unwrap();
        let s = tensor(
            &ModeState::fock(1, 3).unwrap(),
            &ModeState::fock(0, 3).unwrap(),
        );
        let out = apply(&a, &s, 0).unwrap();
        assert_eq!(out.coeff(0, 0), real(1.0));
        assert_eq!(out.norm_sqr(), 1.0);
        assert!(matches!(
            apply(&a, &s, 2),
            Err(Error::ModeOutOfRange { .. })
        ));
        let wide = tensor(
            &ModeState::fock(1, 4).unwrap(),
            &ModeState::fock(0, 3).unwrap(),
        );
        assert!(matches!(
            apply(&a, &wide, 0),
            Err(Error::DimensionMismatch { .. })
        ));
        let id = identity(3).unwrap();
        assert_eq!(apply(&id, &s, 1).unwrap(), s);
    }

    #[test]
    fn displacement_and_squeeze_are_unitary_on_populated_subspace() {
        let u = squeeze_operator(0.4, 32).unwrap();
        assert!(u.unitarity_defect() < 1e-12);
        let d = displacement_operator(C64::new(0.3, -0.2), 32).unwrap();
        assert!(d.unitarity_defect() < 1e-12);
        assert_eq!(d.kind(), OperatorKind::Unitary);
    }
}

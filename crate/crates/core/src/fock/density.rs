use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::state::{ModeState, TwoModeState, C64};
use crate::error::{Error, Result};
use crate::policy::NumericPolicy;

/// Mixed state over one or more modes; the basis index is row-major in
/// `dims` (mode 0 most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    dims: Vec<usize>,
}

/// Digits of a flat index in a mixed-radix basis.
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

fn flat(digits: impl Iterator<Item = usize>, dims: impl Iterator<Item = usize>) -> usize {
    digits.zip(dims).fold(0, |acc, (x, d)| acc * d + x)
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `-sum p log2 p` over the non-negligible entries of a spectrum.
pub(crate) fn entropy_bits(spectrum: impl IntoIterator<Item = f64>) -> f64 {
    spectrum
        .into_iter()
        .filter(|&p| p > 1e-15)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and trace against the numeric policy.
    pub fn new(matrix: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        let rho = Self::unchecked(matrix, dims)?;
        let tol = NumericPolicy::current().hermiticity_tol;
        let defect = hermiticity_defect(&rho.matrix);
        if defect > tol {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let min_ev = rho.eigenvalues().first().copied().unwrap_or(0.0);
        if min_ev < -tol {
            return Err(Error::InvalidParameter {
                name: "min eigenvalue",
                value: min_ev,
                reason: "density operators are positive",
            });
        }
        let tr = rho.trace();
        if tr > 1.0 + tol || tr <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "trace",
                value: tr,
                reason: "trace must lie in (0, 1]",
            });
        }
        Ok(rho)
    }

    pub(crate) fn unchecked(matrix: DMatrix<C64>, dims: Vec<usize>) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || total == 0 {
            return Err(Error::EmptyModeSet);
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
        Ok(Self { matrix, dims })
    }

    /// `|psi><psi|` for a flat amplitude vector over `dims`.
    pub fn from_pure(amps: &DVector<C64>, dims: Vec<usize>) -> Result<Self> {
        Self::unchecked(amps * amps.adjoint(), dims)
    }

    pub fn from_mode(s: &ModeState) -> Result<Self> {
        Self::from_pure(s.amplitudes(), vec![s.dim()])
    }

    pub fn from_two_mode(s: &TwoModeState) -> Result<Self> {
        let (d_a, d_b) = s.dims();
        Self::from_pure(&s.to_flat(), vec![d_a, d_b])
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re / self.trace().powi(2)
    }

    /// Unit-trace copy and the original trace.
    pub fn normalize(&self) -> Result<(DensityOperator, f64)> {
        let tr = self.trace();
        if tr <= 0.0 || !tr.is_finite() {
            return Err(Error::ZeroState);
        }
        Ok((
            Self {
                matrix: &self.matrix / C64::new(tr, 0.0),
                dims: self.dims.clone(),
            },
            tr,
        ))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Von Neumann entropy of the normalized state, in bits.
    pub fn entropy(&self) -> f64 {
        let tr = self.trace();
        entropy_bits(self.eigenvalues().into_iter().map(|p| p / tr))
    }

    /// `<psi|rho|psi> / <psi|psi>`.
    pub fn fidelity_with_pure(&self, amps: &DVector<C64>) -> Result<f64> {
        if amps.len() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: amps.len(),
            });
        }
        let norm = amps.norm_squared();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok((amps.adjoint() * &self.matrix * amps)[(0, 0)].re / norm / self.trace())
    }

    /// Reduced operator on the modes in `keep` (in ascending mode order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let keep = validate_modes(keep, self.dims.len())?;
        let kept_dims: Vec<usize> = keep.iter().map(|&m| self.dims[m]).collect();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|m| !keep.contains(m)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&m| self.dims[m]).collect();
        let kept_total: usize = kept_dims.iter().product();
        let traced_total: usize = traced_dims.iter().product();

        // Group full indices by their traced multi-index.
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); traced_total];
        for i in 0..self.matrix.nrows() {
            let dg = digits(i, &self.dims);
            let k = flat(keep.iter().map(|&m| dg[m]), kept_dims.iter().copied());
            let t = flat(traced.iter().map(|&m| dg[m]), traced_dims.iter().copied());
            groups[t].push((i, k));
        }
        let mut out = DMatrix::zeros(kept_total, kept_total);
        for group in &groups {
            for &(i, ki) in group {
                for &(j, kj) in group {
                    out[(ki, kj)] += self.matrix[(i, j)];
                }
            }
        }
        Self::unchecked(out, kept_dims)
    }

    /// Partial transpose over the modes in `modes`.
    pub fn partial_transpose(&self, modes: &[usize]) -> Result<DensityOperator> {
        let modes = validate_modes(modes, self.dims.len())?;
        let n = self.matrix.nrows();
        let all: Vec<Vec<usize>> = (0..n).map(|i| digits(i, &self.dims)).collect();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let (mut di, mut dj) = (all[i].clone(), all[j].clone());
                for &m in &modes {
                    std::mem::swap(&mut di[m], &mut dj[m]);
                }
                let fi = flat(di.into_iter(), self.dims.iter().copied());
                let fj = flat(dj.into_iter(), self.dims.iter().copied());
                out[(i, j)] = self.matrix[(fi, fj)];
            }
        }
        Self::unchecked(out, self.dims.clone())
    }

    /// `log2 ||rho^{T_B}||_1` for the normalized state, transposing `split`.
    pub fn log_negativity(&self, split: &[usize]) -> Result<f64> {
        let defect = hermiticity_defect(&self.matrix);
        if defect > NumericPolicy::current().hermiticity_tol {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let (rho, _) = self.normalize()?;
        let pt = rho.partial_transpose(split)?;
        let trace_norm: f64 = pt.eigenvalues().iter().map(|l| l.abs()).sum();
        Ok(trace_norm.log2().max(0.0))
    }
}

fn validate_modes(modes: &[usize], count: usize) -> Result<Vec<usize>> {
    if modes.is_empty() {
        return Err(Error::EmptyModeSet);
    }
    let mut sorted = modes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&m| m >= count) {
        return Err(Error::ModeOutOfRange {
            mode: bad,
            modes: count,
        });
    }
    Ok(sorted)
}

/// Reduction to a density operator on a subset of modes.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator>;
}

impl PartialTrace for DensityOperator {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        DensityOperator::partial_trace(self, keep)
    }
}

impl PartialTrace for TwoModeState {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        let keep = validate_modes(keep, 2)?;
        let c = self.coeffs();
        match keep.as_slice() {
            [0] => DensityOperator::unchecked(c * c.adjoint(), vec![c.nrows()]),
            [1] => DensityOperator::unchecked(c.transpose() * c.map(|z| z.conj()), vec![c.ncols()]),
            _ => DensityOperator::from_two_mode(self),
        }
    }
}

pub fn partial_trace<S: PartialTrace>(s: &S, keep: &[usize]) -> Result<DensityOperator> {
    s.partial_trace(keep)
}

/// Entanglement entropy of a normalized pure two-mode state, in bits,
/// computed on mode `side`.
pub fn reduced_entropy(s: &TwoModeState, side: usize) -> Result<f64> {
    s.require_normalized()?;
    Ok(s.partial_trace(&[side])?.entropy())
}

/// Schmidt entropy in bits, evaluated on the smaller factor.
pub fn schmidt_entropy(s: &TwoModeState) -> Result<f64> {
    let (d_a, d_b) = s.dims();
    reduced_entropy(s, if d_a <= d_b { 0 } else { 1 })
}

pub fn log_negativity(rho: &DensityOperator, split: &[usize]) -> Result<f64> {
    rho.log_negativity(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::tensor;

    fn bell(plus: bool) -> TwoModeState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(2, 2);
        if plus {
            m[(0, 0)] = C64::new(s, 0.0);
            m[(1, 1)] = C64::new(s, 0.0);
        } else {
            m[(0, 1)] = C64::new(s, 0.0);
            m[(1, 0)] = C64::new(s, 0.0);
        }
        TwoModeState::from_matrix(m).unwrap()
    }

    #[test]
    fn trace_of_product_gives_factor() {
        let s = tensor(
            &ModeState::fock(1, 3).unwrap(),
            &ModeState::fock(0, 3).unwrap(),
        );
        let rho = partial_trace(&s, &[0]).unwrap();
        assert_eq!(rho.matrix()[(1, 1)], C64::new(1.0, 0.0));
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn maximally_entangled_reduces_to_identity_half() {
        let rho = partial_trace(&bell(true), &[0]).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((rho.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-15);
        assert!((schmidt_entropy(&bell(true)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_partial_trace_matches_two_mode_path() {
        let a = ModeState::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let b = ModeState::from_real(&[0.0, 1.0]).unwrap();
        let s = tensor(&a, &b)
            .combine(C64::new(0.6, 0.0), &bell_like(), C64::new(0.8, 0.0))
            .unwrap();
        let s = s.normalize().unwrap().0;
        let full = DensityOperator::from_two_mode(&s).unwrap();
        for keep in [[0usize], [1]] {
            let via_general = full.partial_trace(&keep).unwrap();
            let direct = s.partial_trace(&keep).unwrap();
            let diff = (via_general.matrix() - direct.matrix()).norm();
            assert!(diff < 1e-14, "keep {keep:?}: {diff}");
        }
    }

    fn bell_like() -> TwoModeState {
        let mut m = DMatrix::zeros(3, 2);
        m[(0, 0)] = C64::new(0.0, 0.6);
        m[(2, 1)] = C64::new(0.8, 0.0);
        TwoModeState::from_matrix(m).unwrap()
    }

    #[test]
    fn log_negativity_of_product_and_bell() {
        let prod = tensor(
            &ModeState::fock(0, 2).unwrap(),
            &ModeState::fock(1, 2).unwrap(),
        );
        let rho = DensityOperator::from_two_mode(&prod).unwrap();
        assert!(rho.log_negativity(&[1]).unwrap().abs() < 1e-9);
        let rho = DensityOperator::from_two_mode(&bell(false)).unwrap();
        assert!((log_negativity(&rho, &[1]).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = bell(true);
        assert_eq!(partial_trace(&s, &[]).unwrap_err(), Error::EmptyModeSet);
        assert!(matches!(
            partial_trace(&s, &[2]),
            Err(Error::ModeOutOfRange { .. })
        ));
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            DensityOperator::new(m.clone(), vec![2]),
            Err(Error::NotHermitian { .. })
        ));
        let rho = DensityOperator::unchecked(m, vec![2]).unwrap();
        assert!(matches!(
            rho.log_negativity(&[0]),
            Err(Error::NotHermitian { .. })
        ));
        let unnormalized = s.scaled(C64::new(2.0, 0.0));
        assert!(matches!(
            schmidt_entropy(&unnormalized),
            Err(Error::RequiresNormalized { .. })
        ));
    }
}

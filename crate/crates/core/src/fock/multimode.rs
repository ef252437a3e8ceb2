use nalgebra::{DMatrix, DVector};

use super::density::DensityOperator;
use super::operator::MatrixOperator;
use super::state::{ModeState, TwoModeState, C64};
use crate::error::{Error, Result};

/// Pure state of several modes, row-major over `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModeState {
    amps: DVector<C64>,
    dims: Vec<usize>,
}

impl MultiModeState {
    pub fn from_mode(s: &ModeState) -> Self {
        Self {
            amps: s.amplitudes().clone(),
            dims: vec![s.dim()],
        }
    }

    pub fn from_two_mode(s: &TwoModeState) -> Self {
        let (d_a, d_b) = s.dims();
        Self {
            amps: s.to_flat(),
            dims: vec![d_a, d_b],
        }
    }

    /// `self ⊗ other`, with `other`'s modes appended.
    pub fn tensor(&self, other: &MultiModeState) -> Self {
        let amps = DVector::from_fn(self.amps.len() * other.amps.len(), |i, _| {
            self.amps[i / other.amps.len()] * other.amps[i % other.amps.len()]
        });
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Self { amps, dims }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for m in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[m] = strides[m + 1] * self.dims[m + 1];
        }
        strides
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.dims.len() {
            return Err(Error::ModeOutOfRange {
                mode,
                modes: self.dims.len(),
            });
        }
        Ok(())
    }

    /// Applies a two-mode operator with `dims = [d_first, d_second]` to modes
    /// `first` and `second`.
    pub fn apply_two_mode(&self, op: &MatrixOperator, first: usize, second: usize) -> Result<Self> {
        self.check_mode(first)?;
        self.check_mode(second)?;
        if first == second {
            return Err(Error::ModeOutOfRange {
                mode: second,
                modes: self.dims.len(),
            });
        }
        let (d1, d2) = (self.dims[first], self.dims[second]);
        if op.dims() != [d1, d2] {
            return Err(Error::DimensionMismatch {
                expected: d1 * d2,
                found: op.dim(),
            });
        }
        let strides = self.strides();
        let (s1, s2) = (strides[first], strides[second]);
        let mut out = self.amps.clone();
        let mut block = DVector::zeros(d1 * d2);
        for base in 0..self.amps.len() {
            if (base / s1) % d1 != 0 || (base / s2) % d2 != 0 {
                continue;
            }
            for p in 0..d1 {
                for q in 0..d2 {
                    block[p * d2 + q] = self.amps[base + p * s1 + q * s2];
                }
            }
            let mixed = op.matrix() * &block;
            for p in 0..d1 {
                for q in 0..d2 {
                    out[base + p * s1 + q * s2] = mixed[p * d2 + q];
                }
            }
        }
        Ok(Self {
            amps: out,
            dims: self.dims.clone(),
        })
    }

    /// Unnormalized projection of `mode` onto Fock level `n`; the mode is
    /// removed from the result.
    pub fn project(&self, mode: usize, n: usize) -> Result<Self> {
        self.check_mode(mode)?;
        if n >= self.dims[mode] {
            return Err(Error::InvalidDimension {
                dim: self.dims[mode],
                reason: "projection level outside the truncation",
            });
        }
        if self.dims.len() == 1 {
            return Err(Error::EmptyModeSet);
        }
        let strides = self.strides();
        let (stride, d) = (strides[mode], self.dims[mode]);
        let amps: Vec<C64> = (0..self.amps.len())
            .filter(|i| (i / stride) % d == n)
            .map(|i| self.amps[i])
            .collect();
        let mut dims = self.dims.clone();
        dims.remove(mode);
        Ok(Self {
            amps: DVector::from_vec(amps),
            dims,
        })
    }

    /// Reduced (unnormalized) density operator on `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityOperator> {
        if keep.is_empty() {
            return Err(Error::EmptyModeSet);
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        for &m in &keep {
            self.check_mode(m)?;
        }
        let traced: Vec<usize> = (0..self.dims.len()).filter(|m| !keep.contains(m)).collect();
        let kept_dims: Vec<usize> = keep.iter().map(|&m| self.dims[m]).collect();
        let kept_total: usize = kept_dims.iter().product();
        let traced_total: usize = traced.iter().map(|&m| self.dims[m]).product();
        let strides = self.strides();

        // Amplitudes arranged as a (kept x traced) matrix; rho = C C^†.
        let mut c = DMatrix::<C64>::zeros(kept_total, traced_total);
        for i in 0..self.amps.len() {
            let digit = |m: usize| (i / strides[m]) % self.dims[m];
            let k = keep.iter().fold(0, |acc, &m| acc * self.dims[m] + digit(m));
            let t = traced
                .iter()
                .fold(0, |acc, &m| acc * self.dims[m] + digit(m));
            c[(k, t)] = self.amps[i];
        }
        DensityOperator::unchecked(&c * c.adjoint(), kept_dims)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::state::tensor;
    use crate::fock::PartialTrace;

    #[test]
    fn tensor_and_reduce_agree_with_two_mode_path() {
        let a = ModeState::from_real(&[0.6, 0.8]).unwrap();
        let b = ModeState::from_real(&[0.0, 0.6, 0.8]).unwrap();
        let two = tensor(&a, &b);
        let multi = MultiModeState::from_mode(&a).tensor(&MultiModeState::from_mode(&b));
        assert_eq!(multi.amplitudes(), &two.to_flat());
        let rho_b = multi.reduce(&[1]).unwrap();
        let direct = two.partial_trace(&[1]).unwrap();
        assert!((rho_b.matrix() - direct.matrix()).norm() < 1e-15);
    }

    #[test]
    fn projection_removes_mode() {
        let a = ModeState::from_real(&[0.6, 0.8]).unwrap();
        let b = ModeState::from_real(&[0.0, 1.0]).unwrap();
        let multi = MultiModeState::from_mode(&a).tensor(&MultiModeState::from_mode(&b));
        let p = multi.project(0, 1).unwrap();
        assert_eq!(p.dims(), &[2]);
        assert!((p.norm_sqr() - 0.64).abs() < 1e-15);
        assert!(multi.project(2, 0).is_err());
        assert!(multi.project(0, 2).is_err());
    }
}

//! Heralded remote preparation from two two-mode squeezed vacua.
//!
//! Mode order: `[A, a', B, b', e_A, e_B]`. The central arms `a'`, `b'` pass
//! pure-loss channels (beamsplitters with vacuum ancillas `e_A`, `e_B`), meet
//! on a balanced beamsplitter, and the event "no photon at `a'`, one photon
//! at `b'`" heralds `(|0,1> + |1,0>)/sqrt(2)` on `A, B`.

use nalgebra::{DMatrix, DVector};

use super::HeraldOutcome;
use crate::error::{check_param, Error, Result};
use crate::factory::{beamsplitter, tmsv};
use crate::fock::{DensityOperator, ModeState, MultiModeState, C64};
use crate::policy::NumericPolicy;

const START_DIM: usize = 4;
const MAX_DIM: usize = 8;
/// Largest entry change of the normalized output between successive
/// truncations that counts as converged.
const DIM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemoteParams {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub eta_a: f64,
    pub eta_b: f64,
}

impl RemoteParams {
    pub fn symmetric(lambda: f64, eta: f64) -> Self {
        Self {
            lambda_a: lambda,
            lambda_b: lambda,
            eta_a: eta,
            eta_b: eta,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, l) in [("lambda_A", self.lambda_a), ("lambda_B", self.lambda_b)] {
            check_param(name, l, (0.0..1.0).contains(&l), "need 0 <= lambda < 1")?;
        }
        for (name, e) in [("eta_A", self.eta_a), ("eta_B", self.eta_b)] {
            check_param(name, e, e > 0.0 && e <= 1.0, "need 0 < eta <= 1")?;
        }
        Ok(())
    }
}

/// Unnormalized conditioned state on `A, B` at per-mode dimension `d`.
fn herald_at(p: &RemoteParams, d: usize) -> Result<DensityOperator> {
    let vac = MultiModeState::from_mode(&ModeState::vacuum(d)?);
    let state = MultiModeState::from_two_mode(&tmsv(p.lambda_a, d)?)
        .tensor(&MultiModeState::from_two_mode(&tmsv(p.lambda_b, d)?))
        .tensor(&vac)
        .tensor(&vac);
    let state = state
        .apply_two_mode(&beamsplitter(p.eta_a, d, d)?, 1, 4)?
        .apply_two_mode(&beamsplitter(p.eta_b, d, d)?, 3, 5)?
        .apply_two_mode(&beamsplitter(0.5, d, d)?, 1, 3)?;
    // After removing a' the detector b' sits at index 2.
    let clicked = state.project(1, 0)?.project(2, 1)?;
    clicked.reduce(&[0, 1])
}

fn padded(m: &DMatrix<C64>, d_old: usize, d_new: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(d_new * d_new, d_new * d_new);
    for i in 0..d_old * d_old {
        for j in 0..d_old * d_old {
            let (ia, ib) = (i / d_old, i % d_old);
            let (ja, jb) = (j / d_old, j % d_old);
            out[(ia * d_new + ib, ja * d_new + jb)] = m[(i, j)];
        }
    }
    out
}

/// Runs the lossy remote scheme, raising the truncation until the
/// normalized output is stable. Returns the normalized state on `A, B` and
/// the herald probability.
pub fn scheme_b(p: &RemoteParams) -> Result<HeraldOutcome<DensityOperator>> {
    p.validate()?;
    let policy = NumericPolicy::current();
    let mut prev: Option<(DMatrix<C64>, usize)> = None;
    let mut change = f64::INFINITY;
    for d in START_DIM..=MAX_DIM {
        let rho = herald_at(p, d)?;
        let probability = rho.trace();
        if probability < policy.impossible_tol {
            return Err(Error::ImpossibleOutcome { probability });
        }
        let (rho, _) = rho.normalize()?;
        if let Some((old, d_old)) = &prev {
            change = (padded(old, *d_old, d) - rho.matrix()).camax();
            if change < DIM_TOL {
                return Ok(HeraldOutcome {
                    state: rho,
                    probability,
                    pattern: "a'=0,b'=1".to_string(),
                });
            }
        }
        prev = Some((rho.matrix().clone(), d));
    }
    Err(Error::Convergence {
        dim: MAX_DIM,
        tail: change,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemoteMetrics {
    pub herald_prob: f64,
    /// Fidelity with `(|0,1> + |1,0>)/sqrt(2)`.
    pub fidelity: f64,
    pub log_negativity: f64,
}

pub fn remote_metrics(p: &RemoteParams) -> Result<RemoteMetrics> {
    let out = scheme_b(p)?;
    let d = out.state.dims()[0];
    let mut target = DVector::zeros(d * d);
    target[1] = C64::new(1.0, 0.0);
    target[d] = C64::new(1.0, 0.0);
    Ok(RemoteMetrics {
        herald_prob: out.probability,
        fidelity: out.state.fidelity_with_pure(&target)?,
        log_negativity: out.state.log_negativity(&[1])?,
    })
}

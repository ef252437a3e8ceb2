//! Ideal micro-qubit operations: the Hadamard map and the Bell-projection
//! transfer of a qubit onto the macro mode.

use std::f64::consts::FRAC_1_SQRT_2;

use super::{HeraldOutcome, MicroMacroState};
use crate::error::{Error, Result};
use crate::fock::{ModeState, TwoModeState, C64};
use crate::policy::NumericPolicy;

/// `|0> -> (|0>+|1>)/sqrt(2)`, `|1> -> (|0>-|1>)/sqrt(2)` on the micro mode.
pub fn hadamard_micro(s: &MicroMacroState) -> Result<MicroMacroState> {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let (b0, b1) = (s.branch(0), s.branch(1));
    let rows = [b0.combine(h, &b1, h)?, b0.combine(h, &b1, -h)?];
    MicroMacroState::new(TwoModeState::from_rows(&rows)?, s.herald_weight())
}

/// Bell states of (signal qubit, micro mode).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub fn label(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "Phi+",
            BellOutcome::PhiMinus => "Phi-",
            BellOutcome::PsiPlus => "Psi+",
            BellOutcome::PsiMinus => "Psi-",
        }
    }
}

/// The implemented `Phi+` outcome together with the probabilities of the
/// other three Bell outcomes, whose macro states are not corrected.
#[derive(Debug, Clone, PartialEq)]
pub struct Teleported {
    pub outcome: HeraldOutcome<ModeState>,
    pub others: Vec<(BellOutcome, f64)>,
}

/// Projects `(c0|0> + c1|1>) ⊗ resource` onto `(|00> + |11>)/sqrt(2)` of the
/// signal and micro modes, leaving `∝ c0 phi_0 + c1 phi_1` on the macro mode,
/// where `phi_j` is the macro branch paired with micro level `j`.
pub fn teleport(c0: C64, c1: C64, resource: &MicroMacroState) -> Result<Teleported> {
    let norm = c0.norm_sqr() + c1.norm_sqr();
    if (norm - 1.0).abs() > NumericPolicy::current().norm_tol {
        return Err(Error::RequiresNormalized { norm_sqr: norm });
    }
    let (b0, b1) = (resource.branch(0), resource.branch(1));
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let project =
        |x: C64, left: &ModeState, y: C64, right: &ModeState| left.combine(x * h, right, y * h);
    let phi_plus = project(c0, &b0, c1, &b1)?;
    let others = vec![
        (
            BellOutcome::PhiMinus,
            project(c0, &b0, -c1, &b1)?.norm_sqr(),
        ),
        (BellOutcome::PsiPlus, project(c0, &b1, c1, &b0)?.norm_sqr()),
        (
            BellOutcome::PsiMinus,
            project(c0, &b1, -c1, &b0)?.norm_sqr(),
        ),
    ];
    let probability = phi_plus.norm_sqr();
    if probability < NumericPolicy::current().impossible_tol {
        return Err(Error::ImpossibleOutcome { probability });
    }
    Ok(Teleported {
        outcome: HeraldOutcome {
            state: phi_plus.normalized()?,
            probability,
            pattern: BellOutcome::PhiPlus.label().to_string(),
        },
        others,
    })
}

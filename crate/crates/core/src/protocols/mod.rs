//! Generation schemes for micro-macro entangled states.
//!
//! The micro mode (mode A) is stored with exactly two levels; constructors
//! reject states with population above `|1>` beyond the leakage tolerance.

mod remote;
mod teleport;

pub use remote::{remote_metrics, scheme_b, RemoteMetrics, RemoteParams};
pub use teleport::{hadamard_micro, teleport, BellOutcome, Teleported};

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{check_param, Error, Result};
use crate::factory::{
    beamsplitter, cat, photon_subtracted_squeezed, subtract, Parity, SqueezeParam,
};
use crate::fock::{
    schmidt_entropy, squeeze_operator, tensor, ModeState, TwoModeState, C64, TAIL_LEVELS,
};
use crate::policy::NumericPolicy;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Normalized two-mode state with a two-level micro mode A and the weight of
/// the conditioning that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroMacroState {
    joint: TwoModeState,
    herald_weight: f64,
}

impl MicroMacroState {
    /// Checks normalization and micro leakage; the micro mode is cut to two
    /// levels.
    pub fn new(joint: TwoModeState, herald_weight: f64) -> Result<Self> {
        check_param(
            "herald_weight",
            herald_weight,
            herald_weight > 0.0,
            "herald weight must be positive",
        )?;
        joint.require_normalized()?;
        let (d_a, d_b) = joint.dims();
        let leakage = if d_a > 2 {
            joint.coeffs().rows(2, d_a - 2).norm_squared()
        } else {
            0.0
        };
        if leakage > NumericPolicy::current().leakage_tol {
            return Err(Error::Leakage { leakage });
        }
        let rows = joint.coeffs().rows(0, d_a.min(2)).into_owned();
        let mut coeffs = DMatrix::zeros(2, d_b);
        coeffs.rows_mut(0, rows.nrows()).copy_from(&rows);
        Ok(Self {
            joint: TwoModeState::from_matrix(coeffs)?,
            herald_weight,
        })
    }

    pub fn joint(&self) -> &TwoModeState {
        &self.joint
    }

    /// Squared norm of the unnormalized conditioned state (1 for
    /// deterministic schemes).
    pub fn herald_weight(&self) -> f64 {
        self.herald_weight
    }

    pub fn macro_dim(&self) -> usize {
        self.joint.dims().1
    }

    /// Unnormalized macro state paired with micro level `j`.
    pub fn branch(&self, j: usize) -> ModeState {
        self.joint.row(j)
    }

    pub fn bit_flipped(&self) -> Result<Self> {
        Ok(Self {
            joint: self.joint.bit_flipped()?,
            herald_weight: self.herald_weight,
        })
    }

    /// Population of the top macro levels relative to the norm.
    pub fn macro_tail(&self) -> f64 {
        let d_b = self.macro_dim();
        let start = d_b.saturating_sub(crate::fock::TAIL_LEVELS);
        self.joint
            .coeffs()
            .columns(start, d_b - start)
            .norm_squared()
            / self.joint.norm_sqr()
    }
}

/// Result of a conditioning measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldOutcome<S> {
    pub state: S,
    /// Herald probability, or for the ideal joint subtraction the relative
    /// success weight (not bounded by 1).
    pub probability: f64,
    pub pattern: String,
}

/// Transmission of the joint-subtraction tap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transmission {
    /// `T = <n>/(1+<n>)` for the input at hand.
    Balanced,
    Half,
    Value(f64),
}

impl Transmission {
    /// Numeric `T` for an input with mean photon number `mean_n`.
    pub fn resolve(self, mean_n: f64) -> Result<f64> {
        match self {
            Transmission::Balanced => Ok(mean_n / (1.0 + mean_n)),
            Transmission::Half => Ok(0.5),
            Transmission::Value(t) => {
                check_param(
                    "T",
                    t,
                    (0.0..=1.0).contains(&t),
                    "transmission must lie in [0, 1]",
                )?;
                Ok(t)
            }
        }
    }
}

/// Parameter point shared by the schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    pub r: f64,
    pub m: usize,
    pub transmission: Transmission,
    pub alpha: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub eta_a: f64,
    pub eta_b: f64,
    pub trunc: usize,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            r: 0.0,
            m: 1,
            transmission: Transmission::Balanced,
            alpha: 1.0,
            lambda_a: 0.05,
            lambda_b: 0.05,
            eta_a: 1.0,
            eta_b: 1.0,
            trunc: NumericPolicy::current().default_dim,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<()> {
        check_param("r", self.r, self.r >= 0.0, "squeezing must be non-negative")?;
        if let Transmission::Value(t) = self.transmission {
            Transmission::Value(t).resolve(0.0)?;
        }
        check_param(
            "alpha",
            self.alpha,
            self.alpha > 0.0,
            "cat amplitude must be positive",
        )?;
        for (name, l) in [("lambda_A", self.lambda_a), ("lambda_B", self.lambda_b)] {
            check_param(name, l, (0.0..1.0).contains(&l), "need 0 <= lambda < 1")?;
        }
        for (name, e) in [("eta_A", self.eta_a), ("eta_B", self.eta_b)] {
            check_param(name, e, e > 0.0 && e <= 1.0, "need 0 < eta <= 1")?;
        }
        let max = NumericPolicy::current().max_dim;
        if self.trunc < 2 || self.trunc > max {
            return Err(Error::InvalidDimension {
                dim: self.trunc,
                reason: "truncation must lie in [2, max_dim]",
            });
        }
        Ok(())
    }
}

/// Single photon split on a balanced beamsplitter, then `S(r)` on mode B:
/// `(|1>S(r)|0> + |0>S(r)|1>)/sqrt(2)`.
pub fn scheme_a(r: f64) -> Result<MicroMacroState> {
    SqueezeParam::from_r(r)?;
    let policy = NumericPolicy::current();
    let photon = tensor(&ModeState::fock(1, 2)?, &ModeState::vacuum(2)?);
    let split = beamsplitter(0.5, 2, 2)?.apply_joint(&photon)?;
    let mut d = 8;
    loop {
        let padded = split.padded(2, d);
        let joint = squeeze_operator(r, d)?.apply_to_mode(&padded, 1)?;
        let state = MicroMacroState::new(joint, 1.0)?;
        let tail = state.macro_tail();
        if tail < policy.tail_tol {
            return Ok(state);
        }
        if d >= policy.max_dim {
            return Err(Error::Convergence { dim: d, tail });
        }
        d = (2 * d).min(policy.max_dim);
    }
}

/// Applies `sqrt(T) a_A + sqrt(1-T) a_B` to `|1>_A ⊗ input`, giving
/// `sqrt(T)|0>input + sqrt(1-T)|1>(a input)` and its squared norm
/// `T + (1-T)<n>`.
pub fn scheme_c(input: &ModeState, t: f64) -> Result<HeraldOutcome<MicroMacroState>> {
    input.require_normalized()?;
    check_param(
        "T",
        t,
        (0.0..=1.0).contains(&t),
        "transmission must lie in [0, 1]",
    )?;
    let lowered = subtract(input, 1)?;
    let rows = [
        input.scaled(c(t.sqrt())),
        lowered.scaled(c((1.0 - t).sqrt())),
    ];
    let (joint, norm) = TwoModeState::from_rows(&rows)?.normalize()?;
    let weight = norm * norm;
    Ok(HeraldOutcome {
        state: MicroMacroState::new(joint, weight)?,
        probability: weight,
        pattern: "joint subtraction".to_string(),
    })
}

/// `<n>/(1+<n>)`: the tap transmission that equalizes the two branches of
/// [`scheme_c`].
pub fn t_balanced(input: &ModeState) -> Result<f64> {
    let n = input.mean_photon()?;
    Ok(n / (1.0 + n))
}

/// Macro states conditioned on the micro outcomes `(|0> ± |1>)/sqrt(2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroComponents {
    pub plus: ModeState,
    pub minus: ModeState,
    /// Probabilities of the `±` micro outcomes.
    pub weights: [f64; 2],
    /// Populations of micro levels `|0>` and `|1>`; equal for a balanced state.
    pub branch_weights: [f64; 2],
}

pub fn macro_components(s: &MicroMacroState) -> Result<MacroComponents> {
    let (b0, b1) = (s.branch(0), s.branch(1));
    let h = c(FRAC_1_SQRT_2);
    let (plus, w_plus) = b0.combine(h, &b1, h)?.normalize()?;
    let (minus, w_minus) = b0.combine(h, &b1, -h)?.normalize()?;
    Ok(MacroComponents {
        plus,
        minus,
        weights: [w_plus * w_plus, w_minus * w_minus],
        branch_weights: [b0.norm_sqr(), b1.norm_sqr()],
    })
}

/// Schmidt entropy of the micro-macro split, in bits.
pub fn entanglement_of(s: &MicroMacroState) -> Result<f64> {
    schmidt_entropy(s.joint())
}

/// The two orthogonal branches `psi_m ∝ a^m S(r)|0>` and `a psi_m` (both
/// normalized) from which every `|Psi±>` at fixed `(m, r)` is assembled.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiBranches {
    pub m: usize,
    pub r: f64,
    pub lower: ModeState,
    pub upper: ModeState,
    /// `<n>` of `psi_m`, the squared norm of `a psi_m`.
    pub mean_n: f64,
}

impl PsiBranches {
    /// At `r = 0` only `m = 0` is defined; its upper branch is the limit
    /// `S(r)|1> -> |1>`.
    pub fn new(m: usize, r: f64) -> Result<Self> {
        SqueezeParam::from_r(r)?;
        let d = NumericPolicy::current().default_dim;
        if r == 0.0 {
            if m > 0 {
                return Err(Error::ZeroState);
            }
            return Ok(Self {
                m,
                r,
                lower: ModeState::vacuum(d)?,
                upper: ModeState::fock(1, d)?,
                mean_n: 0.0,
            });
        }
        let policy = NumericPolicy::current();
        let mut d = d;
        loop {
            let (lower, _) = photon_subtracted_squeezed(m, r, d)?;
            let (upper, norm) = subtract(&lower, 1)?.normalize()?;
            // `a` weights level n by sqrt(n): the upper branch converges later.
            let dim = upper.dim();
            let start = dim.saturating_sub(TAIL_LEVELS + 1);
            let tail = upper.amplitudes().rows(start, dim - start).norm_squared();
            if tail < policy.tail_tol {
                return Ok(Self {
                    m,
                    r,
                    lower,
                    upper,
                    mean_n: norm * norm,
                });
            }
            if dim >= policy.max_dim {
                return Err(Error::Convergence { dim, tail });
            }
            d = (2 * dim).min(policy.max_dim);
        }
    }

    pub fn t_balanced(&self) -> f64 {
        self.mean_n / (1.0 + self.mean_n)
    }

    /// Normalized `|Psi±> ∝ sqrt(T) psi_m ± sqrt((1-T)<n>) (a psi_m)/||a psi_m||`.
    pub fn psi_pm(&self, transmission: Transmission) -> Result<(ModeState, ModeState)> {
        let (x, y) = match transmission {
            Transmission::Balanced => (FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            other => {
                let t = other.resolve(self.mean_n)?;
                (t.sqrt(), ((1.0 - t) * self.mean_n).sqrt())
            }
        };
        let plus = self.lower.combine(c(x), &self.upper, c(y))?.normalized()?;
        let minus = self.lower.combine(c(x), &self.upper, c(-y))?.normalized()?;
        Ok((plus, minus))
    }
}

/// `|Psi±>` for `m` photons subtracted from `S(r)|0>` and tap transmission
/// `transmission`.
pub fn build_psi_pm(
    m: usize,
    r: f64,
    transmission: Transmission,
) -> Result<(ModeState, ModeState)> {
    PsiBranches::new(m, r)?.psi_pm(transmission)
}

/// `alpha N+/N-` with `N± = (2(1 ± exp(-2 alpha^2)))^{-1/2}`, the amplitude
/// ratio in `a|cat+> = alpha (N+/N-) |cat->`.
pub fn cat_ratio(alpha: f64) -> f64 {
    alpha * (alpha * alpha).tanh().sqrt()
}

/// `T` solving `sqrt(T) = sqrt(1-T) alpha N+/N-`.
pub fn coherent_balanced_t(alpha: f64) -> Result<f64> {
    check_param(
        "alpha",
        alpha,
        alpha > 0.0,
        "cat amplitude must be positive",
    )?;
    let k2 = cat_ratio(alpha).powi(2);
    Ok(k2 / (1.0 + k2))
}

/// `alpha^2/(1+alpha^2)`: the transmission at which the macro components of
/// [`coherent_scheme`] are exactly `|±alpha>`.
pub fn coherent_exact_t(alpha: f64) -> Result<f64> {
    check_param(
        "alpha",
        alpha,
        alpha > 0.0,
        "cat amplitude must be positive",
    )?;
    Ok(alpha * alpha / (1.0 + alpha * alpha))
}

/// Joint subtraction applied to an even cat of amplitude `alpha`.
pub fn coherent_scheme(alpha: f64, t: f64) -> Result<MicroMacroState> {
    check_param(
        "alpha",
        alpha,
        alpha > 0.0,
        "cat amplitude must be positive",
    )?;
    let even = cat(alpha, Parity::Even, NumericPolicy::current().default_dim)?;
    Ok(scheme_c(&even, t)?.state)
}

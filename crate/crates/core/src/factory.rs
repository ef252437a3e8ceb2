//! Constructors for the input states and the beamsplitter unitary.
//!
//! Squeezing and displacement go through the matrix exponential of the
//! truncated generator. Constructors that take a dimension `d` treat it as a
//! starting point: the dimension is doubled until the top levels hold less
//! than the policy's `tail_tol`, up to `max_dim`.

use nalgebra::DMatrix;

use crate::error::{check_param, Error, Result};
use crate::fock::{
    displacement_operator, ladder, squeeze_operator, MatrixOperator, ModeState, OperatorKind,
    TwoModeState, C64, TAIL_LEVELS,
};
use crate::policy::NumericPolicy;

/// `20 log10(e)`: decibels of quadrature-variance reduction per unit of `r`.
pub const DB_PER_NEPER: f64 = 8.685_889_638_065_037;

/// Squeezing strength with its decibel equivalent (variance ratio `e^{-2r}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParam {
    r: f64,
    db: f64,
}

impl SqueezeParam {
    pub fn from_r(r: f64) -> Result<Self> {
        check_param("r", r, r >= 0.0, "squeezing must be non-negative")?;
        Ok(Self {
            r,
            db: r * DB_PER_NEPER,
        })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        check_param("db", db, db >= 0.0, "squeezing must be non-negative")?;
        Ok(Self {
            r: db / DB_PER_NEPER,
            db,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn db(&self) -> f64 {
        self.db
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Cat amplitude, parity and the normalization `N = (2 ± 2e^{-2α²})^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatParam {
    pub alpha: f64,
    pub parity: Parity,
    pub norm: f64,
}

impl CatParam {
    pub fn new(alpha: f64, parity: Parity) -> Result<Self> {
        check_param(
            "alpha",
            alpha,
            alpha >= 0.0,
            "cat amplitude must be non-negative",
        )?;
        let inv_sqr = 2.0 + parity.sign() * 2.0 * (-2.0 * alpha * alpha).exp();
        if inv_sqr <= 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            alpha,
            parity,
            norm: inv_sqr.sqrt().recip(),
        })
    }
}

/// Legendre polynomial `P_m(z)` by the three-term recurrence.
pub fn legendre(m: usize, z: C64) -> C64 {
    let (mut prev, mut cur) = (C64::new(1.0, 0.0), z);
    if m == 0 {
        return prev;
    }
    for n in 1..m {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * z * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Number of photons removed from a squeezed vacuum, with the closed-form
/// norm of `a^m S(r)|0>`: `N_m^{-2} = m! (-i sinh r)^m P_m(i sinh r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtractionOrder {
    pub m: usize,
    /// `N_m^{-2}`; equals `||a^m S(r)|0>||^2`.
    pub norm_inv_sqr: f64,
}

impl SubtractionOrder {
    pub fn new(m: usize, r: f64) -> Result<Self> {
        check_param("r", r, r >= 0.0, "squeezing must be non-negative")?;
        let s = r.sinh();
        let i_s = C64::new(0.0, s);
        let factorial: f64 = (1..=m).map(|k| k as f64).product();
        let value = (-i_s).powu(m as u32) * legendre(m, i_s) * factorial;
        // The product is real for purely imaginary arguments; check it.
        if value.im.abs() > 1e-12 * value.re.abs().max(1e-300) {
            return Err(Error::InvalidParameter {
                name: "Im N_m^-2",
                value: value.im,
                reason: "normalization must be real",
            });
        }
        if m > 0 && value.re <= 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            m,
            norm_inv_sqr: value.re,
        })
    }

    /// `1/N_m = ||a^m S(r)|0>||`.
    pub fn inverse_norm(&self) -> f64 {
        self.norm_inv_sqr.sqrt()
    }
}

/// Runs `build` at increasing dimensions until its output is converged.
pub(crate) fn adaptive<F>(start: usize, mut build: F) -> Result<ModeState>
where
    F: FnMut(usize) -> Result<ModeState>,
{
    let policy = NumericPolicy::current();
    let mut d = start.max(8);
    loop {
        let s = build(d)?;
        if s.is_converged() {
            return Ok(s);
        }
        if d >= policy.max_dim {
            return Err(Error::Convergence {
                dim: d,
                tail: s.tail_mass(),
            });
        }
        d = (2 * d).min(policy.max_dim);
    }
}

/// `S(r)|0>`.
pub fn squeezed_vacuum(r: f64, d: usize) -> Result<ModeState> {
    squeezed_fock(r, 0, d)
}

/// `S(r)|n0>`.
pub fn squeezed_fock(r: f64, n0: usize, d: usize) -> Result<ModeState> {
    check_param("r", r, r >= 0.0, "squeezing must be non-negative")?;
    if n0 >= d {
        return Err(Error::InvalidDimension {
            dim: d,
            reason: "Fock level outside the truncation",
        });
    }
    adaptive(d, |d| {
        squeeze_operator(r, d)?.apply_to(&ModeState::fock(n0, d)?)
    })
}

/// `D(beta) base`, padding `base` to at least `d` levels.
pub fn displace(beta: C64, base: &ModeState, d: usize) -> Result<ModeState> {
    if !(beta.re.is_finite() && beta.im.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta.norm(),
            reason: "displacement must be finite",
        });
    }
    if beta == C64::new(0.0, 0.0) {
        return Ok(base.padded(d.max(base.dim())));
    }
    adaptive(d.max(base.dim()), |d| {
        displacement_operator(beta, d)?.apply_to(&base.padded(d))
    })
}

/// Coherent state `|alpha>`.
pub fn coherent(alpha: C64, d: usize) -> Result<ModeState> {
    displace(alpha, &ModeState::vacuum(d)?, d)
}

/// Parity operator `(-1)^n`; maps `|alpha>` to `|-alpha>`.
pub fn parity_flip(s: &ModeState) -> ModeState {
    let amps = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, &c)| if n % 2 == 0 { c } else { -c })
        .collect();
    ModeState::new(amps).expect("parity flip keeps amplitudes finite")
}

/// Normalized cat state `N(|alpha> ± |-alpha>)`.
pub fn cat(alpha: f64, parity: Parity, d: usize) -> Result<ModeState> {
    CatParam::new(alpha, parity)?;
    let plus = coherent(C64::new(alpha, 0.0), d)?;
    let minus = parity_flip(&plus);
    let sum = plus.combine(C64::new(1.0, 0.0), &minus, C64::new(parity.sign(), 0.0))?;
    if sum.norm() < 1e-12 {
        return Err(Error::ZeroState);
    }
    sum.normalized()
}

/// Normalized `a^m S(r)|0>` and `| ||a^m S(r)|0>|| - 1/N_m |`.
pub fn photon_subtracted_squeezed(m: usize, r: f64, d: usize) -> Result<(ModeState, f64)> {
    let order = SubtractionOrder::new(m, r)?;
    if m > 0 && r == 0.0 {
        return Err(Error::ZeroState);
    }
    let policy = NumericPolicy::current();
    let mut d = d.max(8).max(m + 1);
    loop {
        let vacuum = squeeze_operator(r, d)?.apply_to(&ModeState::vacuum(d)?)?;
        let (state, norm) = subtract(&vacuum, m)?.normalize()?;
        // `a^m` moves the parent's top levels down by `m`, so the subtracted
        // state's tail window is `m` levels wider.
        let start = d.saturating_sub(TAIL_LEVELS + m);
        let shifted_tail = state.amplitudes().rows(start, d - start).norm_squared();
        let tail = vacuum.tail_mass().max(shifted_tail);
        if tail < policy.tail_tol {
            return Ok((state, (norm - order.inverse_norm()).abs()));
        }
        if d >= policy.max_dim {
            return Err(Error::Convergence { dim: d, tail });
        }
        d = (2 * d).min(policy.max_dim);
    }
}

/// `a^m s`, unnormalized.
pub fn subtract(s: &ModeState, m: usize) -> Result<ModeState> {
    let a = ladder(s.dim())?;
    (0..m).try_fold(s.clone(), |acc, _| a.apply_to(&acc))
}

/// Two-mode squeezed vacuum `sqrt(1-λ²) Σ λ^n |n,n>`, truncated at `d`.
pub fn tmsv(lambda: f64, d: usize) -> Result<TwoModeState> {
    check_param(
        "lambda",
        lambda,
        (0.0..1.0).contains(&lambda),
        "need 0 <= lambda < 1",
    )?;
    let prefactor = (1.0 - lambda * lambda).sqrt();
    let mut coeffs = DMatrix::zeros(d, d);
    let mut amp = prefactor;
    for n in 0..d {
        coeffs[(n, n)] = C64::new(amp, 0.0);
        amp *= lambda;
    }
    TwoModeState::from_matrix(coeffs)
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

fn binomial(n: usize, k: usize, ln_fact: &[f64]) -> f64 {
    (ln_fact[n] - ln_fact[k] - ln_fact[n - k]).exp().round()
}

/// Two-mode beamsplitter on `dims = [d_a, d_b]`, transforming creation
/// operators as `a†_A -> √T a†_A + √(1-T) a†_B`,
/// `a†_B -> -√(1-T) a†_A + √T a†_B`.
///
/// Matrix elements are exact within the truncation; blocks with more total
/// photons than either mode can hold lose norm.
pub fn beamsplitter(t: f64, d_a: usize, d_b: usize) -> Result<MatrixOperator> {
    check_param(
        "T",
        t,
        (0.0..=1.0).contains(&t),
        "transmission must lie in [0, 1]",
    )?;
    if d_a == 0 || d_b == 0 {
        return Err(Error::InvalidDimension {
            dim: 0,
            reason: "beamsplitter modes need at least one level",
        });
    }
    let (tt, rr) = (t.sqrt(), (1.0 - t).sqrt());
    let ln_fact = ln_factorials(d_a + d_b);
    let total = d_a * d_b;
    let mut m = DMatrix::zeros(total, total);
    for j in 0..d_a {
        for k in 0..d_b {
            // Expand (tt x + rr y)^j (-rr x + tt y)^k into x^p y^q.
            for i1 in 0..=j {
                let c1 = binomial(j, i1, &ln_fact) * tt.powi(i1 as i32) * rr.powi((j - i1) as i32);
                for i2 in 0..=k {
                    let c2 = binomial(k, i2, &ln_fact)
                        * (-rr).powi(i2 as i32)
                        * tt.powi((k - i2) as i32);
                    let (p, q) = (i1 + i2, (j - i1) + (k - i2));
                    if p >= d_a || q >= d_b {
                        continue;
                    }
                    let scale = (0.5 * (ln_fact[p] + ln_fact[q] - ln_fact[j] - ln_fact[k])).exp();
                    m[(p * d_b + q, j * d_b + k)] += C64::new(c1 * c2 * scale, 0.0);
                }
            }
        }
    }
    MatrixOperator::new(m, vec![d_a, d_b], OperatorKind::Unitary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{mean_photon, tensor};

    const R5DB: f64 = 5.0 / DB_PER_NEPER;

    #[test]
    fn db_conversion_is_consistent() {
        let p = SqueezeParam::from_db(5.0).unwrap();
        assert!((p.r() - 0.575_646_273_248_511_4).abs() < 1e-12);
        let q = SqueezeParam::from_r(p.r()).unwrap();
        assert!((q.db() - 5.0).abs() < 1e-12);
        assert!(SqueezeParam::from_r(-0.1).is_err());
    }

    #[test]
    fn legendre_low_orders() {
        let z = C64::new(0.3, -0.7);
        assert_eq!(legendre(0, z), C64::new(1.0, 0.0));
        assert_eq!(legendre(1, z), z);
        let p2 = (3.0 * z * z - 1.0) / 2.0;
        assert!((legendre(2, z) - p2).norm() < 1e-15);
        let p3 = (5.0 * z * z * z - 3.0 * z) / 2.0;
        assert!((legendre(3, z) - p3).norm() < 1e-15);
    }

    #[test]
    fn subtraction_norm_closed_forms() {
        let r: f64 = 0.6;
        let s = r.sinh();
        let one = SubtractionOrder::new(1, r).unwrap();
        assert!((one.norm_inv_sqr - s * s).abs() < 1e-14);
        let two = SubtractionOrder::new(2, r).unwrap();
        assert!((two.norm_inv_sqr - s * s * (3.0 * s * s + 1.0)).abs() < 1e-14);
        assert_eq!(SubtractionOrder::new(0, r).unwrap().norm_inv_sqr, 1.0);
    }

    #[test]
    fn squeezed_vacuum_edge_cases() {
        let sv = squeezed_vacuum(0.0, 16).unwrap();
        assert_eq!(sv, ModeState::vacuum(16).unwrap());
        let sv = squeezed_vacuum(0.8, 64).unwrap();
        for n in (1..sv.dim()).step_by(2) {
            assert!(sv.amplitude(n).norm() < 1e-14);
        }
        assert!(sv.is_converged());
    }

    #[test]
    fn squeezed_fock_states_are_orthogonal() {
        let zero = squeezed_vacuum(R5DB, 128).unwrap();
        let one = squeezed_fock(R5DB, 1, 128).unwrap();
        assert!(zero.inner(&one).unwrap().norm() < 1e-12);
        assert_eq!(
            squeezed_fock(0.0, 3, 8).unwrap(),
            ModeState::fock(3, 8).unwrap()
        );
        // <n> of S(r)|1> is 1 + 3 sinh^2 r.
        let expected = 1.0 + 3.0 * R5DB.sinh().powi(2);
        assert!((mean_photon(&one).unwrap() - expected).abs() < 1e-6);
        assert!((expected - 2.108_879).abs() < 1e-6);
    }

    #[test]
    fn coherent_state_photon_number_and_inverse() {
        let alpha = coherent(C64::new(1.0, 0.0), 32).unwrap();
        assert!((mean_photon(&alpha).unwrap() - 1.0).abs() < 1e-9);
        let base = squeezed_fock(0.3, 1, 32).unwrap();
        let there = displace(C64::new(0.7, 0.2), &base, 32).unwrap();
        let back = displace(C64::new(-0.7, -0.2), &there, there.dim()).unwrap();
        assert!(back.max_diff_canonical(&base) < 1e-9);
        assert_eq!(displace(C64::new(0.0, 0.0), &base, 32).unwrap(), base);
    }

    #[test]
    fn cats_have_definite_parity() {
        let even = cat(1.2, Parity::Even, 64).unwrap();
        let odd = cat(1.2, Parity::Odd, 64).unwrap();
        assert!(even.inner(&odd).unwrap().norm() < 1e-14);
        for n in (1..even.dim()).step_by(2) {
            assert!(even.amplitude(n).norm() < 1e-14);
            assert!(odd.amplitude(n - 1).norm() < 1e-14);
        }
        assert_eq!(
            cat(0.0, Parity::Even, 8).unwrap().canonical(),
            ModeState::vacuum(8).unwrap()
        );
        assert_eq!(cat(0.0, Parity::Odd, 8).unwrap_err(), Error::ZeroState);
    }

    #[test]
    fn photon_subtraction_edge_cases() {
        let (m0, check) = photon_subtracted_squeezed(0, 0.4, 64).unwrap();
        assert!(check < 1e-12);
        assert!(m0.max_diff_canonical(&squeezed_vacuum(0.4, 64).unwrap()) < 1e-14);
        assert_eq!(
            photon_subtracted_squeezed(1, 0.0, 16).unwrap_err(),
            Error::ZeroState
        );
        let (m1, _) = photon_subtracted_squeezed(1, R5DB, 128).unwrap();
        let s1 = squeezed_fock(R5DB, 1, 128).unwrap();
        assert!((m1.fidelity(&s1).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tmsv_vacuum_and_range() {
        let s = tmsv(0.0, 4).unwrap();
        assert_eq!(s.coeff(0, 0), C64::new(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
        assert!(tmsv(1.0, 4).is_err());
        assert!(tmsv(-0.1, 4).is_err());
    }

    #[test]
    fn beamsplitter_splits_single_photon() {
        let t = 0.3;
        let bs = beamsplitter(t, 3, 3).unwrap();
        let input = tensor(
            &ModeState::fock(1, 3).unwrap(),
            &ModeState::fock(0, 3).unwrap(),
        );
        let out = bs.apply_joint(&input).unwrap();
        assert!((out.coeff(1, 0).re - t.sqrt()).abs() < 1e-15);
        assert!((out.coeff(0, 1).re - (1.0 - t).sqrt()).abs() < 1e-15);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);

        let id = beamsplitter(1.0, 3, 3).unwrap();
        assert!((id.matrix() - DMatrix::<C64>::identity(9, 9)).norm() < 1e-15);
        assert!(beamsplitter(1.5, 2, 2).is_err());
    }
}

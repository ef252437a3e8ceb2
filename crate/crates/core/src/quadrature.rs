//! Position-quadrature machinery and the two macroscopicity measures.
//!
//! Convention: `x = (a + a†)/√2`, so the vacuum has variance 1/2 and one
//! shot-noise unit is `1/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::factory::displace;
use crate::fock::{ModeState, C64};
use crate::policy::NumericPolicy;

/// Gauss–Legendre points per panel.
const PANEL_ORDER: usize = 16;
/// Panels of the default grid (2048 points).
const DEFAULT_PANELS: usize = 128;
/// Half-width of the default grid in units of `sqrt(2<n> + 1)`.
const WIDTH_FACTOR: f64 = 7.0;
const MIN_HALF_WIDTH: f64 = 6.0;
const MAX_REFINEMENTS: usize = 5;

/// `n`-th oscillator eigenfunction `<x|n>`, by the upward recurrence
/// `psi_{n+1} = (sqrt(2) x psi_n - sqrt(n) psi_{n-1}) / sqrt(n+1)`.
pub fn hermite_psi(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let next = (SQRT_2 * x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// `sum_n c_n psi_n(x)`.
fn wave_at(amps: &[C64], x: f64) -> C64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    let mut acc = C64::new(0.0, 0.0);
    for (k, c) in amps.iter().enumerate() {
        acc += c * cur;
        let next = (SQRT_2 * x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    acc
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integration grid over a symmetric range with a panel boundary at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
    pub range: (f64, f64),
}

impl QuadGrid {
    /// Composite Gauss–Legendre rule: `panels` (rounded up to even) panels of
    /// `order` points over `[-half_width, half_width]`.
    pub fn gauss_legendre(half_width: f64, panels: usize, order: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) || order == 0 || panels == 0 {
            return Err(Error::InvalidParameter {
                name: "half_width",
                value: half_width,
                reason: "grid needs a positive width and at least one point",
            });
        }
        let panels = panels + panels % 2;
        let (nodes, weights) = gauss_legendre(order);
        let width = 2.0 * half_width / panels as f64;
        let mut grid = Self {
            points: Vec::with_capacity(panels * order),
            weights: Vec::with_capacity(panels * order),
            range: (-half_width, half_width),
        };
        for p in 0..panels {
            let mid = -half_width + (p as f64 + 0.5) * width;
            for (z, w) in nodes.iter().zip(&weights) {
                grid.points.push(mid + 0.5 * width * z);
                grid.weights.push(0.5 * width * w);
            }
        }
        Ok(grid)
    }

    /// Default grid resolving every state in `states`.
    pub fn for_states(states: &[&ModeState]) -> Result<Self> {
        Self::gauss_legendre(default_half_width(states), DEFAULT_PANELS, PANEL_ORDER)
    }

    /// Evenly spaced points with trapezoid weights.
    pub fn uniform(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 || x_max.partial_cmp(&x_min) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidParameter {
                name: "grid points",
                value: n as f64,
                reason: "uniform grid needs two points and a non-empty range",
            });
        }
        let step = (x_max - x_min) / (n - 1) as f64;
        let points: Vec<f64> = (0..n).map(|i| x_min + step * i as f64).collect();
        let mut weights = vec![step; n];
        weights[0] *= 0.5;
        weights[n - 1] *= 0.5;
        Ok(Self {
            points,
            weights,
            range: (x_min, x_max),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

fn photon_mean_unchecked(s: &ModeState) -> f64 {
    let total = s.norm_sqr();
    if total == 0.0 {
        return 0.0;
    }
    s.photon_distribution()
        .iter()
        .enumerate()
        .map(|(n, p)| n as f64 * p)
        .sum::<f64>()
        / total
}

/// Half-width `WIDTH_FACTOR * max sqrt(2<n> + 1)`, at least `MIN_HALF_WIDTH`.
pub fn default_half_width(states: &[&ModeState]) -> f64 {
    states
        .iter()
        .map(|s| WIDTH_FACTOR * (2.0 * photon_mean_unchecked(s) + 1.0).sqrt())
        .fold(MIN_HALF_WIDTH, f64::max)
}

/// Wavefunction `psi(x)` sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub points: Vec<f64>,
    pub values: Vec<C64>,
}

impl WaveFunction {
    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }
}

pub fn wavefunction(s: &ModeState, grid: &QuadGrid) -> Result<WaveFunction> {
    s.require_normalized()?;
    s.require_converged()?;
    let amps: Vec<C64> = s.amplitudes().iter().copied().collect();
    Ok(WaveFunction {
        points: grid.points.clone(),
        values: grid.points.iter().map(|&x| wave_at(&amps, x)).collect(),
    })
}

/// `|psi(x)|^2` on the grid points.
pub fn density(s: &ModeState, grid: &QuadGrid) -> Result<Vec<f64>> {
    Ok(wavefunction(s, grid)?.density())
}

/// `<x>` from the tridiagonal matrix of `x` in the Fock basis.
pub fn mean_x(s: &ModeState) -> Result<f64> {
    s.require_normalized()?;
    let c = s.amplitudes();
    let cross: f64 = (0..c.len().saturating_sub(1))
        .map(|n| ((n + 1) as f64).sqrt() * (c[n].conj() * c[n + 1]).re)
        .sum();
    Ok(SQRT_2 * cross)
}

/// `D = |<x>_a - <x>_b| / sqrt(2)`.
pub fn distance_d(a: &ModeState, b: &ModeState) -> Result<f64> {
    Ok((mean_x(a)? - mean_x(b)?).abs() * FRAC_1_SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfLine {
    Positive,
    Negative,
}

/// Probabilities of `x > 0` and `x < 0` for each state on a common grid,
/// refining until every density integrates to its norm within tolerance.
fn half_line_masses(states: &[&ModeState]) -> Result<Vec<(f64, f64)>> {
    let tol = NumericPolicy::current().integration_tol;
    let mut half_width = default_half_width(states);
    let mut panels = DEFAULT_PANELS;
    let mut residual = f64::INFINITY;
    for _ in 0..=MAX_REFINEMENTS {
        let grid = QuadGrid::gauss_legendre(half_width, panels, PANEL_ORDER)?;
        let mut out = Vec::with_capacity(states.len());
        residual = 0.0;
        for s in states {
            let dens = density(s, &grid)?;
            let (mut pos, mut neg) = (0.0, 0.0);
            for ((x, w), p) in grid.points.iter().zip(&grid.weights).zip(&dens) {
                if *x > 0.0 {
                    pos += w * p;
                } else {
                    neg += w * p;
                }
            }
            residual = f64::max(residual, (pos + neg - s.norm_sqr()).abs());
            out.push((pos, neg));
        }
        if residual <= tol {
            return Ok(out);
        }
        half_width *= 1.25;
        panels *= 2;
    }
    Err(Error::Integration { residual })
}

/// Probability that a homodyne measurement of `x` lands on the given half-line.
pub fn halfline_prob(s: &ModeState, side: HalfLine) -> Result<f64> {
    let (pos, neg) = half_line_masses(&[s])?[0];
    Ok(match side {
        HalfLine::Positive => pos,
        HalfLine::Negative => neg,
    })
}

/// Success rate of telling `plus` from `minus` by the sign of `x`. The state
/// with the larger `<x>` is assigned the `x > 0` outcome; ties keep the
/// argument order.
pub fn discrimination_p(plus: &ModeState, minus: &ModeState) -> Result<f64> {
    let (plus, minus) = if mean_x(minus)? > mean_x(plus)? {
        (minus, plus)
    } else {
        (plus, minus)
    };
    let masses = half_line_masses(&[plus, minus])?;
    Ok(0.5 * (masses[0].0 + masses[1].1))
}

/// Mean separation `D`, discrimination rate `P` and the separation in shot-noise
/// units (`2D`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroMeasures {
    pub d: f64,
    pub p: f64,
    pub snu: f64,
}

impl MacroMeasures {
    pub fn evaluate(plus: &ModeState, minus: &ModeState) -> Result<Self> {
        let d = distance_d(plus, minus)?;
        Ok(Self {
            d,
            p: discrimination_p(plus, minus)?,
            snu: 2.0 * d,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedDiscrimination {
    pub n_plus: f64,
    pub n_minus: f64,
    /// Displacement amplitude, `D/2`.
    pub beta: f64,
}

/// Displaces both states by `D/2` along `x`, towards `plus`, so that a
/// symmetric `minus` lands on the vacuum; returns the resulting photon numbers.
pub fn displaced_photon_discrimination(
    plus: &ModeState,
    minus: &ModeState,
) -> Result<DisplacedDiscrimination> {
    let delta = mean_x(plus)? - mean_x(minus)?;
    let beta = 0.5 * delta.abs() * FRAC_1_SQRT_2;
    let shift = C64::new(if delta < 0.0 { -beta } else { beta }, 0.0);
    let photons = |s: &ModeState| -> Result<f64> {
        let moved = displace(shift, s, s.dim())?;
        moved.normalized()?.mean_photon()
    };
    Ok(DisplacedDiscrimination {
        n_plus: photons(plus)?,
        n_minus: photons(minus)?,
        beta,
    })
}

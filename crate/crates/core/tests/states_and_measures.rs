use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use mml_core::factory::{
    cat, coherent, photon_subtracted_squeezed, squeezed_fock, squeezed_vacuum, Parity,
    SubtractionOrder, DB_PER_NEPER,
};
use mml_core::fock::{ModeState, C64};
use mml_core::quadrature::{
    density, discrimination_p, displaced_photon_discrimination, distance_d, halfline_prob,
    hermite_psi, mean_x, HalfLine, MacroMeasures, QuadGrid,
};
use statrs::function::erf::erf;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn subtraction_norm_matches_numeric_norm() {
    for r in [0.3, 0.6, 1.2] {
        for m in 0..=4 {
            let (_, residual) = photon_subtracted_squeezed(m, r, 128).unwrap();
            assert!(residual < 1e-8, "m={m} r={r}: {residual}");
        }
    }
}

#[test]
fn subtraction_norm_low_orders_in_closed_form() {
    // ||a^2 S|0>||^2 = sinh^2 r (3 sinh^2 r + 1).
    let r: f64 = 0.8;
    let sv = squeezed_vacuum(r, 128).unwrap();
    let a = mml_core::fock::ladder(sv.dim()).unwrap();
    let mut s = sv.clone();
    for m in 1..=4 {
        s = a.apply_to(&s).unwrap();
        let order = SubtractionOrder::new(m, r).unwrap();
        assert!((order.norm_inv_sqr - s.norm_sqr()).abs() < 1e-10 * s.norm_sqr());
    }
    let sh2 = r.sinh().powi(2);
    assert!(
        (SubtractionOrder::new(2, r).unwrap().norm_inv_sqr - sh2 * (3.0 * sh2 + 1.0)).abs() < 1e-12
    );
}

#[test]
fn single_subtraction_gives_squeezed_photon() {
    let r = 5.0 / DB_PER_NEPER;
    // Start high enough that the top level, which `a` cannot fill, is empty.
    let (psi, _) = photon_subtracted_squeezed(1, r, 128).unwrap();
    let target = squeezed_fock(r, 1, 128).unwrap();
    assert!(psi.fidelity(&target).unwrap() > 1.0 - 1e-12);
    assert!(psi.max_diff_canonical(&target) < 1e-12);
    // <n> of S(r)|1> is 1 + 3 sinh^2 r.
    let n = psi.mean_photon().unwrap();
    assert!((n - (1.0 + 3.0 * r.sinh().powi(2))).abs() < 1e-9);
}

#[test]
fn squeezing_widens_x_for_positive_r() {
    let r: f64 = 0.5;
    let sv = squeezed_vacuum(r, 64).unwrap();
    let grid = QuadGrid::for_states(&[&sv]).unwrap();
    let dens = density(&sv, &grid).unwrap();
    let second: Vec<f64> = grid
        .points
        .iter()
        .zip(&dens)
        .map(|(x, p)| x * x * p)
        .collect();
    assert!((grid.integrate(&second) - 0.5 * (2.0 * r).exp()).abs() < 1e-9);
}

#[test]
fn hermite_functions_match_closed_forms() {
    let norm = PI.powf(-0.25);
    for x in [-2.5f64, -0.3, 0.0, 1.1, 3.7] {
        let g = norm * (-0.5 * x * x).exp();
        assert!((hermite_psi(1, x) - SQRT_2 * x * g).abs() < 1e-14);
        let h3 = 8.0 * x * x * x - 12.0 * x;
        let psi3 = h3 * g / (2f64.powi(3) * 6.0).sqrt();
        assert!((hermite_psi(3, x) - psi3).abs() < 1e-13);
    }
}

#[test]
fn coherent_half_line_probability_is_erf() {
    for alpha in [0.3, 0.8, 1.5] {
        let s = coherent(c(alpha), 64).unwrap();
        let expected = 1.0 - (1.0 - erf(SQRT_2 * alpha)) / 2.0;
        assert!((halfline_prob(&s, HalfLine::Positive).unwrap() - expected).abs() < 1e-9);
        assert!((mean_x(&s).unwrap() - SQRT_2 * alpha).abs() < 1e-10);
    }
}

#[test]
fn coherent_pair_measures() {
    let alpha = 1.2;
    let plus = coherent(c(alpha), 64).unwrap();
    let minus = coherent(c(-alpha), 64).unwrap();
    let m = MacroMeasures::evaluate(&plus, &minus).unwrap();
    assert!((m.d - 2.0 * alpha).abs() < 1e-9);
    assert!((m.snu - 4.0 * alpha).abs() < 1e-9);
    assert!((m.p - (1.0 + erf(SQRT_2 * alpha)) / 2.0).abs() < 1e-9);
    // The orientation rule makes argument order irrelevant.
    assert_eq!(discrimination_p(&minus, &plus).unwrap(), m.p);
    let displaced = displaced_photon_discrimination(&plus, &minus).unwrap();
    assert!(displaced.n_minus < 1e-9);
    assert!((displaced.n_plus - 4.0 * alpha * alpha).abs() < 1e-8);
    assert!((displaced.beta - alpha).abs() < 1e-9);
}

#[test]
fn balanced_fock_superposition_closed_form() {
    // (|0> ± |1>)/sqrt(2): P = (1 + sqrt(2/pi))/2.
    let plus = ModeState::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
    let minus = ModeState::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
    let (plus, minus) = (plus.padded(8), minus.padded(8));
    let p = discrimination_p(&plus, &minus).unwrap();
    assert!((p - (1.0 + (2.0 / PI).sqrt()) / 2.0).abs() < 1e-12);
    // <x> = ±1/sqrt(2) so D = sqrt(2)/sqrt(2) = 1.
    assert!((distance_d(&plus, &minus).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn cat_norms_and_parity() {
    let alpha: f64 = 1.1;
    let even = cat(alpha, Parity::Even, 64).unwrap();
    let odd = cat(alpha, Parity::Odd, 64).unwrap();
    assert!((even.norm_sqr() - 1.0).abs() < 1e-12);
    for n in (1..even.dim()).step_by(2) {
        assert!(even.amplitude(n).norm() < 1e-14);
        assert!(odd.amplitude(n - 1).norm() < 1e-14);
    }
    // <n> of the even cat is alpha^2 tanh(alpha^2).
    let n = even.mean_photon().unwrap();
    assert!((n - alpha * alpha * (alpha * alpha).tanh()).abs() < 1e-10);
    assert!(cat(0.0, Parity::Odd, 16).is_err());
}

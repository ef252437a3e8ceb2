use mml_core::factory::{beamsplitter, coherent, squeezed_vacuum, tmsv};
use mml_core::fock::{
    log_negativity, schmidt_entropy, squeeze_operator, DensityOperator, ModeState, PartialTrace,
    C64,
};
use nalgebra::DMatrix;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// exp(A) by scaling, a truncated Taylor series and repeated squaring.
fn taylor_expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let squarings = 8;
    let scaled = a / c(2f64.powi(squarings));
    let n = a.nrows();
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / c(k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn squeeze_generator_matrix(r: f64, d: usize) -> DMatrix<C64> {
    // (r/2)(a†² - a²) with <n|a†²|n-2> = sqrt(n(n-1)).
    let mut g = DMatrix::zeros(d, d);
    for n in 2..d {
        let v = 0.5 * r * ((n * (n - 1)) as f64).sqrt();
        g[(n, n - 2)] = c(v);
        g[(n - 2, n)] = c(-v);
    }
    g
}

#[test]
fn squeeze_operator_matches_taylor_series() {
    let (r, d) = (0.3, 64);
    let oracle = taylor_expm(&squeeze_generator_matrix(r, d));
    let op = squeeze_operator(r, d).unwrap();
    assert!((op.matrix() - oracle).camax() < 1e-12);
    assert!(op.unitarity_defect() < 1e-12);
}

#[test]
fn squeezed_vacuum_closed_form_amplitudes() {
    // <2n|S(r)|0> = (tanh r)^n sqrt((2n)!) / (2^n n! sqrt(cosh r)).
    let r: f64 = 0.9;
    let sv = squeezed_vacuum(r, 64).unwrap();
    let mut ln_fact = vec![0.0f64; sv.dim() + 1];
    for k in 1..ln_fact.len() {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    // The top levels carry the truncation error of the exponential.
    for n in 0..32 {
        let ln_mag = n as f64 * r.tanh().ln() + 0.5 * ln_fact[2 * n]
            - n as f64 * 2f64.ln()
            - ln_fact[n]
            - 0.5 * r.cosh().ln();
        let got = sv.amplitude(2 * n);
        assert!((got - c(ln_mag.exp())).norm() < 1e-12, "level {}", 2 * n);
        assert!(sv.amplitude(2 * n + 1).norm() < 1e-14);
    }
}

#[test]
fn coherent_closed_form_amplitudes() {
    let alpha = C64::new(0.8, -0.5);
    let s = coherent(alpha, 48).unwrap();
    let mut expected = c((-0.5 * alpha.norm_sqr()).exp());
    for n in 0..s.dim() {
        assert!((s.amplitude(n) - expected).norm() < 1e-12, "level {n}");
        expected *= alpha / c(((n + 1) as f64).sqrt());
    }
}

#[test]
fn beamsplitter_single_photon_and_hong_ou_mandel() {
    let t: f64 = 0.3;
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    let d = 4;
    let bs = beamsplitter(t, d, d).unwrap();
    let col = |j: usize, k: usize| bs.matrix().column(j * d + k).into_owned();
    let one_zero = col(1, 0);
    assert!((one_zero[d] - c(st)).norm() < 1e-15);
    assert!((one_zero[1] - c(sr)).norm() < 1e-15);
    let zero_one = col(0, 1);
    assert!((zero_one[d] - c(-sr)).norm() < 1e-15);
    assert!((zero_one[1] - c(st)).norm() < 1e-15);
    let both = col(1, 1);
    let cross = (2.0 * t * (1.0 - t)).sqrt();
    assert!((both[2 * d] - c(-cross)).norm() < 1e-15);
    assert!((both[d + 1] - c(2.0 * t - 1.0)).norm() < 1e-15);
    assert!((both[2] - c(cross)).norm() < 1e-15);

    let hom = beamsplitter(0.5, d, d).unwrap();
    let out = hom.matrix().column(d + 1);
    assert!(out[d + 1].norm() < 1e-15);
}

#[test]
fn beamsplitter_matches_exponentiated_generator() {
    // U = exp(theta (a_A a†_B - a†_A a_B)), cos(theta) = sqrt(T), is exact on
    // blocks whose total photon number fits in both modes.
    let (t, d) = (0.7f64, 10);
    let theta = t.sqrt().acos();
    let mut g = DMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            let from = j * d + k;
            if j > 0 && k + 1 < d {
                let v = theta * ((j * (k + 1)) as f64).sqrt();
                g[((j - 1) * d + k + 1, from)] += c(v);
            }
            if k > 0 && j + 1 < d {
                let v = theta * (((j + 1) * k) as f64).sqrt();
                g[((j + 1) * d + k - 1, from)] -= c(v);
            }
        }
    }
    let oracle = taylor_expm(&g);
    let bs = beamsplitter(t, d, d).unwrap();
    for j in 0..d {
        for k in 0..d - j {
            let i = j * d + k;
            let diff = (bs.matrix().column(i) - oracle.column(i)).camax();
            assert!(diff < 1e-12, "column ({j},{k}) differs by {diff}");
        }
    }
}

#[test]
fn tmsv_entanglement_closed_forms() {
    let lambda: f64 = 0.5;
    let (s, _) = tmsv(lambda, 80).unwrap().normalize().unwrap();
    let r = lambda.atanh();
    let (ch2, sh2) = (r.cosh().powi(2), r.sinh().powi(2));
    let entropy = ch2 * ch2.log2() - sh2 * sh2.log2();
    assert!((schmidt_entropy(&s).unwrap() - entropy).abs() < 1e-10);

    // For a pure state the trace norm of the partial transpose is the squared
    // sum of Schmidt coefficients.
    let d = 24;
    let small = tmsv(lambda, d).unwrap().normalize().unwrap().0;
    let rho = DensityOperator::from_two_mode(&small).unwrap();
    let ln = log_negativity(&rho, &[1]).unwrap();
    let schmidt_sum = (1.0 - lambda.powi(d as i32)) / (1.0 - lambda);
    let truncated =
        (schmidt_sum.powi(2) * (1.0 - lambda * lambda) / (1.0 - lambda.powi(2 * d as i32))).log2();
    assert!((ln - truncated).abs() < 1e-10);
    let infinite = ((1.0 + lambda) / (1.0 - lambda)).log2();
    assert!((ln - infinite).abs() < 1e-6);
}

#[test]
fn reduced_states_of_tmsv_are_thermal() {
    let lambda: f64 = 0.4;
    let s = tmsv(lambda, 40).unwrap();
    let rho_a = s.partial_trace(&[0]).unwrap();
    for n in 0..10 {
        let thermal = (1.0 - lambda * lambda) * lambda.powi(2 * n as i32);
        assert!((rho_a.matrix()[(n, n)].re - thermal).abs() < 1e-14);
    }
    let full = DensityOperator::from_two_mode(&s).unwrap();
    let general = full.partial_trace(&[1]).unwrap();
    let direct = s.partial_trace(&[1]).unwrap();
    assert!((general.matrix() - direct.matrix()).camax() < 1e-14);
}

#[test]
fn fidelity_pads_shorter_states() {
    let short = ModeState::from_real(&[0.6, 0.8]).unwrap();
    let long = short.padded(10);
    assert!((short.fidelity(&long).unwrap() - 1.0).abs() < 1e-15);
}

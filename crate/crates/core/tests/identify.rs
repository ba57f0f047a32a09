use proptest::prelude::*;
use wavident_core::identify::*;
use wavident_core::signals::*;
use wavident_core::spectral::RegularizationPolicy;
use wavident_core::systems::*;
use wavident_core::wavelet::*;
use wavident_core::{Complex, Error};

fn noise(n: usize, dt: f64, seed: u64) -> Signal {
    generate_stochastic(&StochasticSpec { distribution: Distribution::Gaussian { mean: 0.0, stddev: 1.0 }, length: n, dt, seed }).unwrap()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn complex_noise(n: usize, seed: u64) -> Vec<Complex> {
    let (re, im) = (noise(n, 1.0, seed), noise(n, 1.0, seed + 500));
    re.samples().iter().zip(im.samples()).map(|(&a, &b)| Complex::new(a, b)).collect()
}

/// `dt·Σ_k h_k·x_{n−k}` with nested loops, truncated to the row length.
fn convolve_row(x: &[Complex], h: &[f64], dt: f64) -> Vec<Complex> {
    (0..x.len())
        .map(|n| (0..h.len().min(n + 1)).map(|k| x[n - k] * h[k]).sum::<Complex>() * dt)
        .collect()
}

fn morlet() -> MotherWavelet {
    MotherWavelet::morlet(6.0).unwrap()
}

fn second_order() -> SystemModel {
    "so:wn=50,zeta=0.2,gain=1".parse().unwrap()
}

#[test]
fn channel_recovers_a_first_order_kernel() {
    let dt = 1e-3;
    let t_const = 0.02;
    let kernel: Vec<f64> = (0..128).map(|k| (-(k as f64) * dt / t_const).exp()).collect();
    let x = complex_noise(8192, 1);
    let y = convolve_row(&x, &kernel, dt);
    let h = channel_deconvolve(&y, &x, &RegularizationPolicy::default(), 128, dt).unwrap();
    let err = h.iter().zip(&kernel).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 0.05, "{err}");
}

#[test]
fn deconvolution_inverts_convolution() {
    let dt = 0.01;
    let h_true: Vec<f64> = noise(24, dt, 3).into_samples();
    let mut x = complex_noise(160, 2);
    x.resize(200, Complex::new(0.0, 0.0));
    let y = convolve_row(&x, &h_true, dt);
    let exact = RegularizationPolicy::water_level(0.0).unwrap();
    let h = channel_deconvolve(&y, &x, &exact, 24, dt).unwrap();
    assert!(rel_l2(&h, &h_true) <= 1e-8, "{}", rel_l2(&h, &h_true));
}

#[test]
fn gain_channel() {
    let dt = 0.5;
    let x = complex_noise(256, 9);
    let y: Vec<Complex> = x.iter().map(|v| v * -3.0).collect();
    let h = channel_deconvolve(&y, &x, &RegularizationPolicy::water_level(1e-12).unwrap(), 16, dt).unwrap();
    assert!((h[0] * dt + 3.0).abs() < 1e-9);
    assert!(h[1..].iter().all(|v| v.abs() * dt < 1e-9));
}

#[test]
fn identity_surface_is_a_delta() {
    let dt = 1e-3;
    let x = noise(2048, dt, 7);
    let g = ScaleGrid::default_for(2048, dt).unwrap();
    let itf = identify_itf(&x, &x, &morlet(), &g, &RegularizationPolicy::water_level(1e-9).unwrap(), 64).unwrap();
    let mut delta = vec![0.0; 64];
    delta[0] = 1.0 / dt;
    assert!(rel_l2(itf.average(), &delta) < 1e-6);
    for row in itf.rows() {
        assert!(rel_l2(row, &delta) < 1e-6);
    }
    assert!(rel_l2(itf.scaling().unwrap(), &delta) < 1e-6);
    assert!(itf.dead().iter().all(|d| !d));
}

#[test]
fn second_order_system_is_recovered() {
    let dt = 1e-3;
    let n = 4096;
    let g = ScaleGrid::default_for(n, dt).unwrap();
    let href = impulse_response(&second_order(), 512, dt).unwrap();
    for seed in [1, 2] {
        let x = noise(n, dt, seed);
        let y = simulate(&second_order(), &x).unwrap();
        let itf = identify_itf(&x, &y, &morlet(), &g, &RegularizationPolicy::default(), default_lags(n)).unwrap();
        assert_eq!((itf.rows().len(), itf.n_lags()), (64, 512));
        assert!(rel_l2(itf.average(), &href) <= 0.05);
        // Rows of an exactly linear system agree.
        assert!(itf.row_dispersion() <= 0.10, "{}", itf.row_dispersion());
        for mode in [ReconstructionMode::WaveletDomain, ReconstructionMode::TimeDomain] {
            let y_hat = reconstruct(&x, &itf, &morlet(), &g, mode).unwrap();
            assert!(restore_error(&y, &y_hat).unwrap().epsilon_rel.unwrap() <= 0.05, "{mode:?}");
        }
        let per_channel = restore_error_per_channel(&x, &y, &itf).unwrap();
        assert_eq!(per_channel.len(), 64);
        assert!(per_channel.iter().all(|e| e.is_finite()));
    }
}

#[test]
fn surfaces_scale_with_the_data() {
    let dt = 1e-3;
    let x = noise(1024, dt, 11);
    let y = simulate(&"fo:T=0.01,gain=1".parse().unwrap(), &x).unwrap();
    let g = ScaleGrid::default_for(1024, dt).unwrap();
    let reg = RegularizationPolicy::default();
    let base = identify_itf(&x, &y, &morlet(), &g, &reg, 64).unwrap();
    let (alpha, beta) = (3.0, -0.5);
    let xs = x.with_samples(x.samples().iter().map(|v| v * alpha).collect()).unwrap();
    let ys = y.with_samples(y.samples().iter().map(|v| v * beta).collect()).unwrap();
    let scaled = identify_itf(&xs, &ys, &morlet(), &g, &reg, 64).unwrap();
    let k = beta / alpha;
    for (a, b) in base.rows().iter().zip(scaled.rows()) {
        let want: Vec<f64> = a.iter().map(|v| v * k).collect();
        assert!(rel_l2(b, &want) <= 1e-8);
    }
}

#[test]
fn channels_without_input_are_dead() {
    let dt = 1e-3;
    let n = 2048;
    // Gaussian-windowed 200 Hz tone: no energy near the low-frequency channels.
    let tone = |i: usize| {
        let t = i as f64 * dt - 1.024;
        (-(t * t) / (2.0 * 0.2 * 0.2)).exp() * (std::f64::consts::TAU * 200.0 * t).sin()
    };
    let x = Signal::from_samples((0..n).map(tone).collect(), dt).unwrap();
    let y = simulate(&second_order(), &x).unwrap();
    let g = ScaleGrid::default_for(n, dt).unwrap();
    let itf = identify_itf(&x, &y, &morlet(), &g, &RegularizationPolicy::default(), 64).unwrap();
    let dead: Vec<usize> = (0..g.count()).filter(|&i| itf.dead()[i]).collect();
    assert!(!dead.is_empty());
    assert!(dead.iter().all(|&i| itf.row(i).iter().all(|&v| v == 0.0)));
    assert!(!itf.dead()[0]);
    assert!(itf.dead()[g.count() - 1]);
}

#[test]
fn identify_argument_checks() {
    let dt = 1e-3;
    let x = noise(256, dt, 1);
    let g = ScaleGrid::default_for(256, dt).unwrap();
    let reg = RegularizationPolicy::default();
    assert!(matches!(identify_itf(&x, &x, &morlet(), &g, &reg, 129), Err(Error::InsufficientData(_))));
    let short = noise(200, dt, 2);
    assert!(matches!(identify_itf(&x, &short, &morlet(), &g, &reg, 16), Err(Error::Shape(_))));
    let zero = x.with_samples(vec![0.0; 256]).unwrap();
    assert!(identify_itf(&zero, &x, &morlet(), &g, &reg, 16).is_err());
}

/// Gaussian elimination with partial pivoting on the dense matrix.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let pivot_row = a[c].clone();
            for (v, p) in a[r][c..].iter_mut().zip(&pivot_row[c..]) {
                *v -= f * p;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        x[r] = (b[r] - (r + 1..n).map(|k| a[r][k] * x[k]).sum::<f64>()) / a[r][r];
    }
    x
}

#[test]
fn wiener_hopf_matches_dense_solver() {
    for (n, seed) in [(1usize, 1u64), (5, 2), (17, 3), (32, 4)] {
        let dt = 0.01;
        // A smoothed signal gives a non-trivial positive-definite Toeplitz matrix.
        let raw = noise(400, dt, seed);
        let smooth = raw.with_samples(raw.samples().windows(3).map(|w| w[0] + 0.8 * w[1] + 0.3 * w[2]).chain([0.0, 0.0]).collect()).unwrap();
        let other = noise(400, dt, seed + 100);
        let rxx = autocorrelation(&smooth, n).unwrap();
        let rxy = cross_correlation(&smooth, &other, n).unwrap();
        let s = wiener_hopf_identify(&rxx, &rxy, n).unwrap();
        let a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| rxx.values()[i.abs_diff(j)] * dt).collect()).collect();
        let want = dense_solve(a, rxy.values()[..n].to_vec());
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(s.taps.iter().zip(&want).all(|(p, q)| (p - q).abs() <= 1e-8 * scale), "n = {n}");
        assert!(s.residual <= 1e-8);
    }
}

#[test]
fn wiener_hopf_recovers_a_first_order_system() {
    let dt = 1e-3;
    let n = 65536;
    let model: SystemModel = "fo:T=0.05,gain=2".parse().unwrap();
    let x = noise(n, dt, 12);
    let y = simulate(&model, &x).unwrap();
    let lags = 512;
    let s = wiener_hopf_identify(&autocorrelation(&x, lags).unwrap(), &cross_correlation(&x, &y, lags).unwrap(), lags).unwrap();
    let truth = impulse_response(&model, lags, dt).unwrap();
    assert!(rel_l2(&s.taps, &truth) <= 0.05, "{}", rel_l2(&s.taps, &truth));
    assert!(s.residual <= 1e-8);
}

#[test]
fn wiener_hopf_refuses_singular_correlations() {
    let r = CorrelationFunction::new(vec![1.0; 8], 1.0).unwrap();
    assert!(matches!(wiener_hopf_identify(&r, &r, 8), Err(Error::IllConditioned(_))));
}

#[test]
fn delta_and_zero_surfaces_reconstruct() {
    let dt = 0.0009765625;
    let n = 1024;
    let x = noise(n, dt, 5);
    let g = ScaleGrid::default_for(n, dt).unwrap();
    let delta = ItfSurface::delta(morlet(), g.clone(), dt, 32).unwrap();
    assert_eq!(reconstruct(&x, &delta, &morlet(), &g, ReconstructionMode::TimeDomain).unwrap(), x);
    let wav = reconstruct(&x, &delta, &morlet(), &g, ReconstructionMode::WaveletDomain).unwrap();
    assert!(rel_l2(wav.samples(), x.samples()) < 1e-10);

    // Without the scaling row the result is the plain inverse-CWT round trip.
    let no_scaling = ItfSurface::from_parts(
        morlet(), g.clone(), dt, RegularizationPolicy::default(),
        delta.rows().to_vec(), delta.dead().to_vec(), None, delta.average().to_vec(),
    ).unwrap();
    let round = icwt(&cwt(&x, &morlet(), &g).unwrap()).unwrap();
    let wav = reconstruct(&x, &no_scaling, &morlet(), &g, ReconstructionMode::WaveletDomain).unwrap();
    assert!(rel_l2(wav.samples(), round.samples()) < 1e-10);

    let zero = ItfSurface::from_parts(
        morlet(), g.clone(), dt, RegularizationPolicy::default(),
        vec![vec![0.0; 8]; g.count()], vec![false; g.count()], Some(vec![0.0; 8]), vec![0.0; 8],
    ).unwrap();
    for mode in [ReconstructionMode::TimeDomain, ReconstructionMode::WaveletDomain] {
        assert!(reconstruct(&x, &zero, &morlet(), &g, mode).unwrap().samples().iter().all(|&v| v == 0.0));
    }

    let other = ScaleGrid::new(2.0 * dt, 0.1, 64, Spacing::Log).unwrap();
    assert!(matches!(reconstruct(&x, &delta, &morlet(), &other, ReconstructionMode::TimeDomain), Err(Error::Shape(_))));
    assert!(matches!(reconstruct(&x, &delta, &MotherWavelet::mexican_hat(), &g, ReconstructionMode::TimeDomain), Err(Error::Shape(_))));
}

proptest! {
    #[test]
    fn restore_error_is_scale_invariant(v in prop::collection::vec(-10.0f64..10.0, 1..50), k in 0.01f64..100.0) {
        let y = Signal::from_samples(v.clone(), 1.0).unwrap();
        let y_hat = y.with_samples(v.iter().map(|a| a * 0.9 + 0.1).collect()).unwrap();
        prop_assert_eq!(restore_error(&y, &y).unwrap().epsilon_rms, 0.0);
        let r = restore_error(&y, &y_hat).unwrap();
        let ys = y.with_samples(v.iter().map(|a| a * k).collect()).unwrap();
        let yhs = y.with_samples(y_hat.samples().iter().map(|a| a * k).collect()).unwrap();
        let rs = restore_error(&ys, &yhs).unwrap();
        if let (Some(a), Some(b)) = (r.epsilon_rel, rs.epsilon_rel) {
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn channel_gain_is_recovered(g in -5.0f64..5.0, seed in 0u64..1000) {
        prop_assume!(g.abs() > 1e-3);
        let x = complex_noise(64, seed);
        let y: Vec<Complex> = x.iter().map(|v| v * g).collect();
        let h = channel_deconvolve(&y, &x, &RegularizationPolicy::water_level(0.0).unwrap(), 8, 1.0).unwrap();
        prop_assert!((h[0] - g).abs() <= 1e-9 * g.abs());
    }
}

#[test]
fn hammerstein_rows_spread_more_than_linear_rows() {
    let dt = 1e-3;
    let n = 4096;
    let g = ScaleGrid::default_for(n, dt).unwrap();
    let x = noise(n, dt, 3);
    let nl: SystemModel = "hammerstein:cubic=1,0.5|so:wn=50,zeta=0.2,gain=1".parse().unwrap();
    let reg = RegularizationPolicy::default();
    let lin = identify_itf(&x, &simulate(&second_order(), &x).unwrap(), &morlet(), &g, &reg, 512).unwrap();
    let ham = identify_itf(&x, &simulate(&nl, &x).unwrap(), &morlet(), &g, &reg, 512).unwrap();
    println!("row dispersion: linear {:.4}, hammerstein {:.4}", lin.row_dispersion(), ham.row_dispersion());
}

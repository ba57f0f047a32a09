use wavident_core::signals::{generate_stochastic, Distribution, Signal, StochasticSpec};
use wavident_core::spectral::convolve_direct;
use wavident_core::systems::*;

fn noise(n: usize, dt: f64, seed: u64) -> Signal {
    generate_stochastic(&StochasticSpec { distribution: Distribution::Gaussian { mean: 0.0, stddev: 1.0 }, length: n, dt, seed }).unwrap()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn combine(a: f64, x: &Signal, b: f64, y: &Signal) -> Signal {
    x.with_samples(x.samples().iter().zip(y.samples()).map(|(p, q)| a * p + b * q).collect()).unwrap()
}

#[test]
fn first_order_impulse_matches_closed_form() {
    let (t_const, gain) = (0.05, 2.0);
    let dt = t_const / 100.0;
    let mut x = vec![0.0; 600];
    x[0] = 1.0 / dt;
    let y = simulate(&SystemModel::Lti(Lti::first_order(t_const, gain).unwrap()), &Signal::from_samples(x, dt).unwrap()).unwrap();
    for (k, v) in y.samples().iter().enumerate() {
        let want = gain / t_const * (-(k as f64) * dt / t_const).exp();
        assert!((v - want).abs() <= 0.01 * want, "k = {k}");
    }
}

#[test]
fn second_order_zero_crossings() {
    let (wn, zeta) = (50.0, 0.05);
    let dt = 1e-5;
    let wd = wn * (1.0f64 - zeta * zeta).sqrt();
    let h = impulse_response(&SystemModel::Lti(Lti::second_order(wn, zeta, 1.0).unwrap()), 80_000, dt).unwrap();
    let crossings: Vec<f64> = (1..h.len()).filter(|&k| h[k - 1] * h[k] < 0.0).map(|k| k as f64 * dt).collect();
    assert!(crossings.len() >= 10);
    for (m, t) in crossings.iter().enumerate() {
        let want = (m + 1) as f64 * std::f64::consts::PI / wd;
        assert!((t - want).abs() <= dt, "crossing {m}: {t} vs {want}");
    }
    // The oscillation frequency is close to ω_n for light damping.
    let period = crossings[9] - crossings[7];
    assert!((std::f64::consts::TAU / period - wn).abs() < 0.01 * wn);
}

#[test]
fn simulate_matches_impulse_response() {
    let dt = 1e-3;
    let model: SystemModel = "so:wn=50,zeta=0.2,gain=1".parse().unwrap();
    let x = noise(2048, dt, 1);
    let y = simulate(&model, &x).unwrap();
    let h = impulse_response(&model, 2048, dt).unwrap();
    let direct = convolve_direct(&x, &h).unwrap();
    assert!(rel_l2(y.samples(), direct.samples()) < 1e-12);
}

#[test]
fn long_records_take_the_fft_path_consistently() {
    let dt = 1e-3;
    let model: SystemModel = "so:wn=50,zeta=0.2".parse().unwrap();
    let x = noise(65536, dt, 2);
    let y = simulate(&model, &x).unwrap();
    let h = impulse_response(&model, 3702, dt).unwrap();
    let direct = convolve_direct(&Signal::from_samples(x.samples()[..8192].to_vec(), dt).unwrap(), &h).unwrap();
    assert!(rel_l2(&y.samples()[..8192], direct.samples()) < 1e-10);
}

#[test]
fn identity_nonlinearities_reduce_to_the_lti_block() {
    let dt = 1e-3;
    let lti = Lti::first_order(0.02, 1.5).unwrap();
    let x = noise(1024, dt, 3);
    let bare = simulate(&SystemModel::Lti(lti), &x).unwrap();
    let ham = simulate(&SystemModel::Hammerstein { nonlinearity: Nonlinearity::Identity, lti }, &x).unwrap();
    let wie = simulate(&SystemModel::Wiener { lti, nonlinearity: Nonlinearity::Identity }, &x).unwrap();
    assert_eq!(ham, bare);
    assert_eq!(wie, bare);
    let peak = x.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sat = simulate(&SystemModel::Hammerstein { nonlinearity: Nonlinearity::saturation(peak).unwrap(), lti }, &x).unwrap();
    assert_eq!(sat, bare);
}

#[test]
fn lti_superposition_holds() {
    let dt = 1e-3;
    let (x, y) = (noise(4096, dt, 4), noise(4096, dt, 5));
    let (a, b) = (2.0, -1.5);
    for spec in ["so:wn=50,zeta=0.2,gain=1", "fo:T=0.05,gain=2", "so:wn=80,zeta=1.5,gain=0.5", "so:wn=30,zeta=1,gain=1"] {
        let m: SystemModel = spec.parse().unwrap();
        let lhs = simulate(&m, &combine(a, &x, b, &y)).unwrap();
        let rhs = combine(a, &simulate(&m, &x).unwrap(), b, &simulate(&m, &y).unwrap());
        assert!(rel_l2(lhs.samples(), rhs.samples()) <= 1e-10, "{spec}");
    }
}

#[test]
fn cubic_hammerstein_breaks_superposition() {
    let dt = 1e-3;
    let (x, y) = (noise(4096, dt, 4), noise(4096, dt, 5));
    let m: SystemModel = "hammerstein:cubic=1,0.5|so:wn=50,zeta=0.2,gain=1".parse().unwrap();
    let lhs = simulate(&m, &combine(2.0, &x, -1.5, &y)).unwrap();
    let rhs = combine(2.0, &simulate(&m, &x).unwrap(), -1.5, &simulate(&m, &y).unwrap());
    assert!(rel_l2(lhs.samples(), rhs.samples()) > 0.01);
}

#[test]
fn classification_follows_the_model() {
    let so: SystemModel = "so:wn=50,zeta=0.2,gain=1".parse().unwrap();
    let c = classify(&so, InputKind::Deterministic);
    assert_eq!((c.alpha, c.beta, c.gamma, c.delta), (true, false, false, true));
    let fo: SystemModel = "fo:T=0.05".parse().unwrap();
    let c = classify(&fo, InputKind::Stochastic);
    assert_eq!((c.alpha, c.beta, c.gamma, c.delta), (true, true, false, true));
    let cubic: SystemModel = "hammerstein:cubic=1,0.5|fo:T=0.05".parse().unwrap();
    let c = classify(&cubic, InputKind::Stochastic);
    assert_eq!((c.alpha, c.beta, c.gamma, c.delta), (true, true, true, true));
}

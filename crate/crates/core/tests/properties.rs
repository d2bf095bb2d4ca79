use proptest::collection::vec;
use proptest::prelude::*;

use relreg_core::estimators::{
    ols_fit, sr_fit, sr_variance_closed_form, sr_weights, variance_inflation, Dataset,
};
use relreg_core::io::{read_pairs, write_pairs};
use relreg_core::kinematics::{
    center_rapidity, cosh_q, demeaned_rapidities, lorentz_boost, momentum_weight_sum, rapidity,
    sinh_q, velocity_of, Rapidity, RapidityProfile, Scale,
};
use relreg_core::simulation::{boost_dataset, generate_dataset, BoostSpec, Design, TrueModel};

fn scale(c: f64) -> Scale {
    Scale::new(c).unwrap()
}

fn rap(t: f64) -> Rapidity {
    Rapidity::new(t).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// Covariate with at least two distinct values, strictly inside `(−c, c)`.
fn design(max_n: usize, bound: f64) -> impl Strategy<Value = Vec<f64>> {
    vec(-bound..bound, 2..max_n).prop_filter("needs variation", |x| {
        let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        hi - lo > 1e-6
    })
}

fn thetas() -> impl Strategy<Value = Vec<f64>> {
    vec(-4.0..4.0f64, 1..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn rapidity_round_trips(u in -(1.0 - 1e-8)..(1.0 - 1e-8f64), c in 1e-3..1e9f64) {
        let v = u * c;
        let back = velocity_of(rapidity(v, scale(c)).unwrap(), scale(c));
        prop_assert!((back - v).abs() <= 1e-12 * v.abs().max(f64::MIN_POSITIVE), "{v} -> {back}");
    }

    #[test]
    fn velocity_stays_inside(t in -1e3..1e3f64, c in 1e-3..1e9f64) {
        let v = velocity_of(rap(t), scale(c));
        prop_assert!(v.abs() < c);
        prop_assert!(rapidity(v, scale(c)).is_ok());
    }

    #[test]
    fn rapidities_add_under_boosts(v in -0.99..0.99f64, w in -0.99..0.99f64) {
        let c = scale(1.0);
        let boosted = lorentz_boost(v, w, c).unwrap();
        let lhs = rapidity(boosted, c).unwrap().value();
        let rhs = rapidity(v, c).unwrap().value() - rapidity(w, c).unwrap().value();
        prop_assert!((lhs - rhs).abs() <= 1e-11, "{lhs} vs {rhs}");
    }

    #[test]
    fn profile_invariants(t in thetas()) {
        let p = demeaned_rapidities(&t.iter().map(|&t| rap(t)).collect::<Vec<_>>()).unwrap();
        let n = t.len() as f64;
        prop_assert!(p.sum_sinh_phi().abs() <= 1e-12 * p.sum_cosh_phi());
        prop_assert!(p.mean_cosh() >= 1.0);
        prop_assert!(p.c2_minus_s2() >= 1.0 - 1e-12);
        prop_assert!(p.mean_cosh_2phi() >= 1.0);
        let lhs = p.sum_sinh_sq();
        let rhs = n * (p.mean_cosh_2phi() - 1.0) / 2.0;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn demeaned_rapidities_ignore_shifts(t in thetas(), shift in -3.0..3.0f64) {
        let base: Vec<Rapidity> = t.iter().map(|&t| rap(t)).collect();
        let moved: Vec<Rapidity> = t.iter().map(|&t| rap(t - shift)).collect();
        let a = demeaned_rapidities(&base).unwrap();
        let b = demeaned_rapidities(&moved).unwrap();
        for (x, y) in a.phi().iter().zip(b.phi()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
        prop_assert!(close(a.sum_cosh_phi(), b.sum_cosh_phi(), 1e-10));
        let c0 = center_rapidity(&base).unwrap().value();
        let c1 = center_rapidity(&moved).unwrap().value();
        prop_assert!((c1 - (c0 - shift)).abs() <= 1e-10);
    }

    #[test]
    fn center_matches_ratio(t in thetas()) {
        let c0 = center_rapidity(&t.iter().map(|&t| rap(t)).collect::<Vec<_>>()).unwrap();
        let s: f64 = t.iter().map(|t| t.sinh()).sum();
        let ch: f64 = t.iter().map(|t| t.cosh()).sum();
        prop_assert!((c0.value().tanh() - s / ch).abs() <= 1e-12);
    }

    #[test]
    fn center_survives_huge_rapidities(t in vec(-500.0..500.0f64, 1..30), edge in prop::bool::ANY) {
        let mut t = t;
        t.push(if edge { 500.0 } else { -500.0 });
        let c0 = center_rapidity(&t.iter().map(|&t| rap(t)).collect::<Vec<_>>()).unwrap();
        prop_assert!(c0.value().is_finite());
    }

    #[test]
    fn weight_sum_is_positive(x in design(200, 0.999), c in 0.5..2.0f64) {
        let x: Vec<f64> = x.iter().map(|v| v * c).collect();
        let w = momentum_weight_sum(&x, scale(c)).unwrap();
        prop_assert!(w > 0.0);
        let p = RapidityProfile::from_velocities(&x, scale(c)).unwrap();
        let x0 = p.center_velocity(scale(c));
        let centered: f64 = x.iter().zip(p.sinh_phi()).map(|(x, s)| (x - x0) * s).sum();
        prop_assert!(close(w, centered, 1e-10), "{w} vs {centered}");
    }

    #[test]
    fn q_identity(x in -2.0..2.0f64, log_q in (0.1f64).ln()..(10.0f64).ln()) {
        let q = log_q.exp();
        let s = sinh_q(q, x).unwrap();
        let ch = cosh_q(q, x).unwrap();
        prop_assert!(close(ch * ch - s * s, q, 1e-12));
    }

    #[test]
    fn q_bridge(phi in -3.0..3.0f64, t0 in -3.0..3.0f64) {
        let q = (-2.0 * t0).exp();
        let lhs = (phi + t0).sinh();
        let rhs = sinh_q(q, phi).unwrap() / q.sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (phi + t0).cosh());
    }

    #[test]
    fn estimators_are_linear(
        x in design(30, 0.95),
        seed in any::<u64>(),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let n = x.len();
        let ys = generate_dataset(&Design::Fixed { x: x.clone() }, &model(0.0, 1.0, 1.0), n, seed).unwrap();
        let zs = generate_dataset(&Design::Fixed { x: x.clone() }, &model(2.0, -1.0, 1.0), n, seed ^ 1).unwrap();
        let mix: Vec<f64> = ys.y().iter().zip(zs.y()).map(|(y, z)| a * y + b * z).collect();
        let c = scale(1.0);
        for fit in [sr_fit, ols_fit] {
            let fy = fit(&ys, None).unwrap();
            let fz = fit(&zs, None).unwrap();
            let fm = fit(&Dataset::new(x.clone(), mix.clone(), c).unwrap(), None).unwrap();
            let s1 = (a * fy.beta1_hat).abs() + (b * fz.beta1_hat).abs() + 1e-300;
            let s0 = (a * fy.beta0_hat).abs() + (b * fz.beta0_hat).abs() + 1e-300;
            prop_assert!((fm.beta1_hat - (a * fy.beta1_hat + b * fz.beta1_hat)).abs() <= 1e-10 * s1);
            prop_assert!((fm.beta0_hat - (a * fy.beta0_hat + b * fz.beta0_hat)).abs() <= 1e-10 * s0);
        }
    }

    #[test]
    fn noiseless_recovery_in_every_frame(
        x in design(40, 0.95),
        b0 in -5.0..5.0f64,
        b1 in -5.0..5.0f64,
        theta_star in -2.0..2.0f64,
    ) {
        let y: Vec<f64> = x.iter().map(|x| b0 + b1 * x).collect();
        let data = Dataset::new(x, y, scale(1.0)).unwrap();
        let boosted = boost_dataset(&data, &BoostSpec::lorentz_rapidity(theta_star, b1)).unwrap();
        for d in [&data, &boosted] {
            for fit in [sr_fit(d, None).unwrap(), ols_fit(d, None).unwrap()] {
                let tol = 1e-10 * (1.0 + b0.abs() + b1.abs());
                prop_assert!((fit.beta1_hat - b1).abs() <= tol, "{} vs {b1}", fit.beta1_hat);
                prop_assert!((fit.beta0_hat - b0).abs() <= tol);
            }
        }
    }

    #[test]
    fn residuals_satisfy_moment_conditions(x in design(40, 0.95), seed in any::<u64>()) {
        let n = x.len();
        let data = generate_dataset(&Design::Fixed { x: x.clone() }, &model(1.0, 2.0, 1.0), n, seed).unwrap();
        let y_mean = data.y_mean();
        let sd = (data.y().iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        let tol = 1e-10 * n as f64 * sd.max(1e-300);
        let profile = RapidityProfile::from_velocities(&x, scale(1.0)).unwrap();

        let sr = sr_fit(&data, None).unwrap();
        let s: f64 = sr.residuals.iter().sum();
        let sw: f64 = sr.residuals.iter().zip(profile.sinh_phi()).map(|(e, w)| e * w).sum();
        prop_assert!(s.abs() <= tol && sw.abs() <= tol, "{s} {sw}");

        let ols = ols_fit(&data, None).unwrap();
        let s: f64 = ols.residuals.iter().sum();
        let sx: f64 = ols.residuals.iter().zip(&x).map(|(e, x)| e * x).sum();
        prop_assert!(s.abs() <= tol && sx.abs() <= tol);
        prop_assert!((s / n as f64).abs() <= 1e-12 * sd.max(1e-300) * n as f64);
    }

    #[test]
    fn weight_rules(x in design(60, 0.99)) {
        let w = sr_weights(&x, scale(1.0)).unwrap();
        let kmax = w.k.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        let sum_k: f64 = w.k.iter().sum();
        let sum_kx: f64 = w.k.iter().zip(&x).map(|(k, x)| k * x).sum();
        prop_assert!(sum_k.abs() <= 1e-12 * kmax * x.len() as f64);
        prop_assert!((sum_kx - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn weights_do_not_change_under_boosts(x in design(40, 0.95), theta_star in -2.0..2.0f64) {
        let y = vec![0.0; x.len()];
        let data = Dataset::new(x.clone(), y, scale(1.0)).unwrap();
        let boosted = boost_dataset(&data, &BoostSpec::lorentz_rapidity(theta_star, 1.0)).unwrap();
        let a = RapidityProfile::from_velocities(&x, scale(1.0)).unwrap();
        let b = RapidityProfile::from_velocities(boosted.x(), scale(1.0)).unwrap();
        for (p, q) in a.sinh_phi().iter().zip(b.sinh_phi()) {
            prop_assert!((p - q).abs() <= 1e-10);
        }
    }

    #[test]
    fn sr_variance_dominates_ols(x in design(50, 0.99).prop_filter("N >= 3", |x| x.len() >= 3)) {
        let data = Dataset::new(x.clone(), vec![0.0; x.len()], scale(1.0)).unwrap();
        let sr = sr_fit(&data, Some(1.0)).unwrap();
        let ols = ols_fit(&data, Some(1.0)).unwrap();
        prop_assert!(variance_inflation(&data).unwrap() >= 1.0);
        prop_assert!(sr.var_beta1 >= ols.var_beta1 * (1.0 - 1e-12));
        prop_assert!(sr.var_beta0 >= ols.var_beta0 * (1.0 - 1e-12));
        prop_assert!(sr.cov_beta0_beta1.abs() >= ols.cov_beta0_beta1.abs() * (1.0 - 1e-12));
        let sign = -data.x_mean().signum();
        if data.x_mean() != 0.0 {
            prop_assert_eq!(sr.cov_beta0_beta1.signum(), sign);
            prop_assert_eq!(ols.cov_beta0_beta1.signum(), sign);
        }
    }

    #[test]
    fn two_points_coincide(a in -0.99..0.99f64, b in -0.99..0.99f64, ya in -5.0..5.0f64, yb in -5.0..5.0f64) {
        prop_assume!((a - b).abs() > 1e-3);
        let data = Dataset::new(vec![a, b], vec![ya, yb], scale(1.0)).unwrap();
        let sr = sr_fit(&data, None).unwrap();
        let ols = ols_fit(&data, None).unwrap();
        let tol = 1e-12 * (1.0 + ols.beta1_hat.abs() + ols.beta0_hat.abs());
        prop_assert!((sr.beta1_hat - ols.beta1_hat).abs() <= tol * (1.0 + (a - b).abs().recip()));
        prop_assert!((sr.beta0_hat - ols.beta0_hat).abs() <= tol * (1.0 + (a - b).abs().recip()));
    }

    #[test]
    fn closed_form_agrees(x in design(80, 0.99), c in 0.5..4.0f64, sigma2 in 0.1..10.0f64) {
        let x: Vec<f64> = x.iter().map(|v| v * c).collect();
        let data = Dataset::new(x.clone(), vec![0.0; x.len()], scale(c)).unwrap();
        let canonical = sr_fit(&data, Some(sigma2)).unwrap().var_beta1;
        let profile = RapidityProfile::from_velocities(&x, scale(c)).unwrap();
        let closed = sr_variance_closed_form(&profile, scale(c), sigma2).unwrap();
        prop_assert!(close(canonical, closed, 1e-9), "{canonical} vs {closed}");
    }

    #[test]
    fn boost_round_trip(x in design(30, 0.99), theta_star in -3.0..3.0f64, b1 in -3.0..3.0f64) {
        let c = scale(1.0);
        let y: Vec<f64> = x.iter().map(|x| 0.5 + b1 * x + x.sin()).collect();
        let data = Dataset::new(x, y, c).unwrap();
        let there = boost_dataset(&data, &BoostSpec::lorentz_rapidity(theta_star, b1)).unwrap();
        let back = boost_dataset(&there, &BoostSpec::lorentz_rapidity(-theta_star, b1)).unwrap();
        for (a, b) in back.x().iter().zip(data.x()) {
            prop_assert!((a - b).abs() <= 1e-12 * c.value(), "{a} vs {b}");
        }
        for (a, b) in back.y().iter().zip(data.y()) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(x in vec(any::<f64>(), 1..50)) {
        let x: Vec<f64> = x.into_iter().filter(|v| v.is_finite()).collect();
        let y: Vec<f64> = x.iter().rev().copied().collect();
        let mut buf = Vec::new();
        write_pairs(&mut buf, &x, &y).unwrap();
        let p = read_pairs(buf.as_slice()).unwrap();
        prop_assert_eq!(p.x.len(), x.len());
        for (a, b) in p.x.iter().zip(&x).chain(p.y.iter().zip(&y)) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), n in 2usize..200, b in 0.1..5.0f64) {
        let d = Design::UniformRapidity { b };
        let m = model(0.3, -1.2, 0.7);
        prop_assert_eq!(generate_dataset(&d, &m, n, seed).unwrap(), generate_dataset(&d, &m, n, seed).unwrap());
    }
}

fn model(beta0: f64, beta1: f64, sigma: f64) -> TrueModel {
    TrueModel {
        beta0,
        beta1,
        sigma,
        c: scale(1.0),
    }
}

#[test]
fn noise_has_the_declared_moments() {
    let m = model(0.0, 0.0, 2.0);
    let n = 1_000_000;
    let data = generate_dataset(&Design::UniformVelocity { a: 0.5 }, &m, n, 99).unwrap();
    let mean = data.y_mean();
    let var = data.y().iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let nf = n as f64;
    // se(mean) = σ/√n, se(var) = σ²·√(2/(n−1))
    assert!(mean.abs() <= 4.0 * 2.0 / nf.sqrt(), "{mean}");
    assert!((var - 4.0).abs() <= 4.0 * 4.0 * (2.0 / (nf - 1.0)).sqrt(), "{var}");
}

#[test]
fn large_sample_slope_matches_truth() {
    let m = model(1.0, 2.0, 1.0);
    let data = generate_dataset(&Design::UniformVelocity { a: 0.9 }, &m, 10_000, 5).unwrap();
    let fit = ols_fit(&data, Some(1.0)).unwrap();
    assert!((fit.beta1_hat - 2.0).abs() <= 4.0 * fit.var_beta1.sqrt());
}

use ecr_core::ecr::{self, Params, Sampler};
use ecr_core::error::Error;
use ecr_core::specfun;

#[test]
fn order_statistic_moment_matches_simulation() {
    let p = Params::new(1.5, 2.0).unwrap();
    let (i, n, r) = (2u32, 4u32, 0.3);
    let reps = 40_000;
    let mut sampler = Sampler::new(p, 11);
    let vals: Vec<f64> = (0..reps)
        .map(|_| {
            let mut xs = sampler.draw_n(n as usize);
            xs.sort_by(f64::total_cmp);
            xs[i as usize - 1].powf(r)
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / reps as f64;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0)).sqrt();
    let se = sd / (reps as f64).sqrt();
    let exact = ecr::order_stat_moment(i, n, r, &p).unwrap();
    assert!((mean - exact).abs() < 3.0 * se, "{mean} vs {exact} (se {se})");
}

#[test]
fn raw_moment_matches_simulation() {
    let p = Params::new(0.8, 1.0).unwrap();
    let r = -0.4;
    let xs = Sampler::new(p, 5).draw_n(200_000);
    let vals: Vec<f64> = xs.iter().map(|x| x.powf(r)).collect();
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let exact = ecr::raw_moment(r, &p).unwrap();
    assert!((mean - exact).abs() < 3.0 * sd / k.sqrt());
}

#[test]
fn log_moment_matches_simulation() {
    let p = Params::new(0.6, 3.0).unwrap();
    let xs = Sampler::new(p, 9).draw_n(200_000);
    let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let k = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / k;
    let sd = (logs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let exact = ecr::log_moment(&p).unwrap();
    assert!((mean - exact).abs() < 3.0 * sd / k.sqrt());
}

#[test]
fn log_moment_of_cauchy_rayleigh() {
    // β = 1: E log X = log λ + ½ Φ(½, 1, 1) + ψ(2) + γ − 1 = log λ + log 2
    let p = Params::new(1.0, 5.0).unwrap();
    let want = 5f64.ln() + 2f64.ln();
    assert!((ecr::log_moment(&p).unwrap() - want).abs() < 1e-13);
}

#[test]
fn mean_does_not_exist() {
    let p = Params::new(3.0, 1.0).unwrap();
    match ecr::raw_moment(1.0, &p) {
        Err(Error::MomentDoesNotExist { violation, window }) => {
            assert_eq!(violation, "r ≥ 1");
            assert!(window.contains("< r < 1"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(ecr::cr_moment(1.0, 1.0).is_err());
    assert!(ecr::pwm(0, 1.2, 1, &p).is_err());
}

#[test]
fn cr_moment_two_forms() {
    for r in [-1.9, -1.0, 0.0, 0.5, 0.99] {
        let g = ecr::cr_moment(r, 2.0).unwrap();
        let b = 2f64.powf(r) / 2.0 * specfun::beta_fn((1.0 - r) / 2.0, 1.0 + r / 2.0).unwrap();
        assert!((g - b).abs() <= 1e-12 * b, "r = {r}");
    }
}

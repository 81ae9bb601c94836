use secnoma::{sample_gains, ChannelStats};

const N: usize = 1_000_000;

#[test]
fn unit_mean_gain_sample_mean_within_one_percent() {
    let stats = ChannelStats::new(1.0, 0.5, 1.0).unwrap();
    let gains = sample_gains(&stats, N, 11).unwrap();
    let mean = gains.iter().map(|s| s.g1).sum::<f64>() / N as f64;
    assert!((mean - 1.0).abs() < 0.01, "{mean}");
    // the standard deviation of an exponential equals its mean
    assert!((mean - 1.0).abs() <= 3.0 / (N as f64).sqrt(), "{mean}");
}

#[test]
fn far_user_sample_mean_within_three_sigma() {
    let lambda2 = 1e-5;
    let stats = ChannelStats::new(5.656854249492381e-5, lambda2, 1e8).unwrap();
    let gains = sample_gains(&stats, N, 12).unwrap();
    let mean = gains.iter().map(|s| s.g2).sum::<f64>() / N as f64;
    assert!(
        (mean - lambda2).abs() <= 3.0 * lambda2 / (N as f64).sqrt(),
        "{mean}"
    );
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i as f64 + 1.0) / n - f)
        })
        .fold(0.0, f64::max)
}

#[test]
fn empirical_cdf_matches_exponential() {
    let (l1, l2) = (5.656854249492381e-5, 1e-5);
    let stats = ChannelStats::new(l1, l2, 1e8).unwrap();
    let gains = sample_gains(&stats, N, 13).unwrap();
    let d1 = ks_statistic(gains.iter().map(|s| s.g1).collect(), |x| {
        -(-x / l1).exp_m1()
    });
    let d2 = ks_statistic(gains.iter().map(|s| s.g2).collect(), |x| {
        -(-x / l2).exp_m1()
    });
    assert!(d1 <= 0.002, "{d1}");
    assert!(d2 <= 0.002, "{d2}");
}

#[test]
fn gains_of_the_two_users_are_uncorrelated() {
    let stats = ChannelStats::new(1.0, 1.0, 1.0).unwrap();
    let gains = sample_gains(&stats, N, 14).unwrap();
    let n = N as f64;
    let (m1, m2) = (
        gains.iter().map(|s| s.g1).sum::<f64>() / n,
        gains.iter().map(|s| s.g2).sum::<f64>() / n,
    );
    let cov = gains.iter().map(|s| (s.g1 - m1) * (s.g2 - m2)).sum::<f64>() / n;
    assert!(cov.abs() < 4.0 / n.sqrt(), "{cov}");
    let ordered = gains.iter().filter(|s| s.g1 > s.g2).count() as f64 / n;
    assert!((ordered - 0.5).abs() < 3.0 * 0.5 / n.sqrt(), "{ordered}");
}

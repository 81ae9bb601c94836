#![allow(dead_code)]

use secnoma::{derive_stats, ChannelStats, SystemParams};

pub fn reference_stats(rho_r_db: f64) -> ChannelStats {
    let params = SystemParams::reference()
        .with_received_snr_db(rho_r_db)
        .unwrap();
    derive_stats(&params).unwrap()
}

/// `n` evenly spaced points strictly inside (0, 1).
pub fn alpha_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}

/// True when the sequence first falls and then rises, ignoring steps no
/// larger than `noise`.
pub fn is_unimodal(values: &[f64], noise: f64) -> bool {
    let mut rising = false;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d > noise {
            rising = true;
        } else if d < -noise && rising {
            return false;
        }
    }
    true
}

/// One Simpson panel: endpoints, function values at the ends and middle,
/// and the panel estimate.
#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

impl Panel {
    fn new(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Panel {
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        Panel {
            a,
            b,
            fa,
            fm,
            fb,
            whole,
        }
    }
}

fn refine(f: &dyn Fn(f64) -> f64, p: Panel, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (p.a + p.b);
    let left = Panel::new(p.a, m, p.fa, f(0.5 * (p.a + m)), p.fm);
    let right = Panel::new(m, p.b, p.fm, f(0.5 * (m + p.b)), p.fb);
    let delta = left.whole + right.whole - p.whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left.whole + right.whole + delta / 15.0
    } else {
        refine(f, left, 0.5 * tol, depth - 1) + refine(f, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature on a finite interval.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let panel = Panel::new(a, b, f(a), f(0.5 * (a + b)), f(b));
    refine(f, panel, tol, 50)
}

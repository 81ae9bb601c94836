//! Gauss-Legendre quadrature on the unit interval with node doubling.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 16;
pub const MAX_NODES: usize = 2048;
/// Successive refinements closer than this stop the doubling early.
pub const REFINE_TOLERANCE: f64 = 1e-10;
/// Largest error estimate accepted once the node cap is reached.
pub const ACCEPT_TOLERANCE: f64 = 1e-9;

/// Nodes and weights of an `n`-point rule mapped to [0, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn gauss_legendre(n: usize) -> Rule {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut deriv = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                deriv = dp;
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, dp) = legendre_with_derivative(n, x);
                    deriv = dp;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
            // x runs from near +1 downwards
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            nodes[i] = 0.5 * (1.0 - x);
            weights[n - 1 - i] = 0.5 * w;
            weights[i] = 0.5 * w;
        }
        Rule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn rules() -> &'static [Rule] {
    static RULES: OnceLock<Vec<Rule>> = OnceLock::new();
    RULES.get_or_init(|| {
        let mut out = Vec::new();
        let mut n = MIN_NODES;
        while n <= MAX_NODES {
            out.push(Rule::gauss_legendre(n));
            n *= 2;
        }
        out
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Absolute difference between the last two refinement levels.
    pub error: f64,
    pub nodes: usize,
}

/// Integrates `f` over (0, 1), doubling the node count from 16 up to 2048
/// until two successive estimates agree to [`REFINE_TOLERANCE`].
pub fn integrate_unit(f: impl Fn(f64) -> f64) -> Result<Estimate> {
    let mut previous: Option<f64> = None;
    let mut last = Estimate {
        value: f64::NAN,
        error: f64::INFINITY,
        nodes: 0,
    };
    for rule in rules() {
        let value = rule.apply(&f);
        if !value.is_finite() {
            return Err(Error::QuadratureNotConverged {
                error: f64::INFINITY,
                nodes: rule.len(),
            });
        }
        if let Some(prev) = previous {
            let error = (value - prev).abs();
            last = Estimate {
                value,
                error,
                nodes: rule.len(),
            };
            if error < REFINE_TOLERANCE {
                return Ok(last);
            }
        }
        previous = Some(value);
    }
    if last.error <= ACCEPT_TOLERANCE {
        Ok(last)
    } else {
        Err(Error::QuadratureNotConverged {
            error: last.error,
            nodes: last.nodes,
        })
    }
}

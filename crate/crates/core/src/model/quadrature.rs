//! Composite Gauss–Legendre averages over one drive period.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

const NODES: usize = 16;
/// Successive panel doublings must agree to this absolute tolerance.
pub const CONVERGED_BELOW: f64 = 1e-11;
/// Results whose last correction is above this bound are rejected.
pub const REJECT_ABOVE: f64 = 1e-10;
const MAX_DOUBLINGS: u32 = 14;

struct Rule {
    nodes: [f64; NODES],
    weights: [f64; NODES],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; NODES];
        let mut weights = [0.0; NODES];
        let n = NODES as f64;
        for i in 0..NODES {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut derivative = 0.0;
            for _ in 0..100 {
                let (p, dp) = legendre(NODES, x);
                derivative = dp;
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(NODES, x);
            if dp != 0.0 {
                derivative = dp;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
        }
        Rule { nodes, weights }
    })
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn composite<F: Fn(f64) -> Complex64>(f: &F, period: f64, panels: usize) -> Complex64 {
    let rule = rule();
    let width = period / panels as f64;
    let half = 0.5 * width;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        let mut panel = Complex64::new(0.0, 0.0);
        for (x, w) in rule.nodes.iter().zip(rule.weights.iter()) {
            panel += f(mid + half * x) * *w;
        }
        total += panel * half;
    }
    total
}

/// Average of `f` over `[0, period)`.
///
/// `panels` is the initial number of equal panels; callers with a
/// piecewise-defined integrand pass the number of pieces so that every
/// panel edge lands on a breakpoint.
pub fn period_average<F: Fn(f64) -> Complex64>(
    f: F,
    period: f64,
    panels: usize,
) -> Result<Complex64> {
    let mut panels = panels.max(1);
    let mut previous = composite(&f, period, panels) / period;
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let current = composite(&f, period, panels) / period;
        last_change = (current - previous).norm();
        previous = current;
        if last_change < CONVERGED_BELOW {
            return Ok(current);
        }
    }
    if last_change <= REJECT_ABOVE {
        Ok(previous)
    } else {
        Err(Error::Quadrature {
            estimate: last_change,
            tolerance: REJECT_ABOVE,
        })
    }
}

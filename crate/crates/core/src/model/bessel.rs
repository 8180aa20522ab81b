//! Integer-order Bessel functions of the first kind.
//!
//! All orders are produced by Miller's backward recurrence, normalised with
//! the identity `J_0(x) + 2 Σ_k J_2k(x) = 1`. The recurrence is stable in the
//! downward direction for every order, so a single routine covers both the
//! small-argument and the oscillatory regime.

use crate::{Error, Result};

pub const MAX_ORDER: i32 = 64;
pub const MAX_ARGUMENT: f64 = 50.0;

const RESCALE_ABOVE: f64 = 1e250;

/// `J_order(x)` for `|order| <= 64`, `|x| <= 50`.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    if order.abs() > MAX_ORDER {
        return Err(Error::Domain(format!(
            "bessel order {order} outside [-{MAX_ORDER}, {MAX_ORDER}]"
        )));
    }
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "bessel argument {x} outside [-{MAX_ARGUMENT}, {MAX_ARGUMENT}]"
        )));
    }
    let n = order.unsigned_abs() as usize;
    let mut value = bessel_j_nonneg(n, x.abs());
    // J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x)
    let odd = n % 2 == 1;
    if odd && order < 0 {
        value = -value;
    }
    if odd && x < 0.0 {
        value = -value;
    }
    Ok(value)
}

fn bessel_j_nonneg(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let top = start_index(n, x);
    // j_next = J_{k+1}, j_cur = J_k (unnormalised)
    let mut j_next = 0.0_f64;
    let mut j_cur = 1e-30_f64;
    let mut norm = 0.0_f64;
    let mut wanted = 0.0_f64;
    let two_over_x = 2.0 / x;
    for k in (1..=top).rev() {
        if k == n {
            wanted = j_cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        let j_prev = k as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        if j_cur.abs() > RESCALE_ABOVE {
            j_cur /= RESCALE_ABOVE;
            j_next /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            wanted /= RESCALE_ABOVE;
        }
    }
    // j_cur now holds J_0
    norm += j_cur;
    if n == 0 {
        wanted = j_cur;
    }
    wanted / norm
}

/// Even start index well above both the requested order and the turning
/// point `k ≈ x`, where `J_k(x)` has decayed far below double precision.
fn start_index(n: usize, x: f64) -> usize {
    let base = n.max(x.ceil() as usize);
    let margin = 20 + (40.0 * base as f64).sqrt().ceil() as usize;
    let top = base + margin;
    top + top % 2
}

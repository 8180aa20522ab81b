/// Derivative estimate with an error indicator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdEstimate {
    pub derivative: f64,
    /// `|Richardson - D(h/2)|`, a conservative bound on the error of the
    /// unextrapolated estimate.
    pub error: f64,
}

/// Central difference at `x` with one Richardson step:
/// `(4 D(h/2) - D(h)) / 3`.
pub fn finite_difference(f: impl Fn(f64) -> f64, x: f64, step: f64) -> FdEstimate {
    let central = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let coarse = central(step);
    let fine = central(0.5 * step);
    let derivative = (4.0 * fine - coarse) / 3.0;
    FdEstimate {
        derivative,
        error: (derivative - fine).abs(),
    }
}

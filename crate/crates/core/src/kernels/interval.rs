use crate::error::{Error, Result};
use crate::model::{Absorption, BoundaryModel, Mode};
use crate::quad;

const SERIES_TAIL: f64 = 1e-14;

fn one_minus_exp(a: f64) -> f64 {
    -(-a).exp_m1()
}

/// Number of image pairs `K` with `2 exp(-k (2K - 2)) / k < 1e-14`.
fn image_terms(k: f64) -> i64 {
    let need = 1.0 + (2.0 / (k * SERIES_TAIL)).ln() / (2.0 * k);
    need.ceil().max(1.0) as i64
}

/// Dirichlet resolvent kernel of `[0, 1]` as the image-charge series
/// `sum_j (exp(-k |x - y + 2j|) - exp(-k |x + y + 2j|)) / k`, `k = sqrt(2 lambda)`.
pub fn interval_dirichlet_resolvent(lambda: f64, x: f64, y: f64) -> f64 {
    let k = (2.0 * lambda).sqrt();
    let n = image_terms(k);
    let mut sum = 0.0;
    // small terms first
    for j in (1..=n).rev() {
        for jj in [j, -j] {
            let shift = 2.0 * jj as f64;
            sum += (-k * (x - y + shift).abs()).exp() - (-k * (x + y + shift).abs()).exp();
        }
    }
    sum += (-k * (x - y).abs()).exp() - (-k * (x + y)).exp();
    sum / k
}

/// The same kernel in closed form, `2 sinh(k x) sinh(k (1 - y)) / (k sinh k)`
/// for `x <= y`.
pub fn interval_dirichlet_closed(lambda: f64, x: f64, y: f64) -> f64 {
    let k = (2.0 * lambda).sqrt();
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    (-k * (b - a)).exp() * one_minus_exp(2.0 * k * a) * one_minus_exp(2.0 * k * (1.0 - b))
        / (k * one_minus_exp(2.0 * k))
}

/// `(E_x[e^{-lambda H_0}; H_0 < H_1], E_x[e^{-lambda H_1}; H_1 < H_0])`,
/// i.e. `sinh(k (1 - x)) / sinh k` and `sinh(k x) / sinh k`.
pub fn interval_hitting_lt(lambda: f64, x: f64) -> (f64, f64) {
    let k = (2.0 * lambda).sqrt();
    let d = one_minus_exp(2.0 * k);
    let toward0 = (-k * x).exp() * one_minus_exp(2.0 * k * (1.0 - x)) / d;
    let toward1 = (-k * (1.0 - x)).exp() * one_minus_exp(2.0 * k * x) / d;
    (toward0, toward1)
}

/// `R_lambda f(x)` on `[0, 1]` and the boundary values that close it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalSolution {
    pub value: f64,
    pub at_zero: f64,
    pub at_one: f64,
}

/// One row `[m0, m1 | rhs]` of the boundary system.
///
/// With `R f = R^D f + phi0 u0 + phi1 u1`, at the end `0`:
/// `R'(0) = 2 (phi0, f) - k coth(k) u0 + k / sinh(k) u1` and
/// `R''(0) = 2 (lambda u0 - f(0))`; the end `1` is the mirror image with the
/// sign of the derivative term flipped.
fn boundary_row(model: &BoundaryModel, own: f64, cross: f64, moment: f64, f_end: f64, lambda: f64) -> [f64; 3] {
    if model.mode == Mode::Absorbing(Absorption::Kill) {
        return [1.0, 0.0, 0.0];
    }
    let (a, b, c) = model.to_wentzell();
    [a + b * own + c * lambda, -b * cross, 2.0 * b * moment + c * f_end]
}

/// Resolvent of the Brownian motion on `[0, 1]` with `model0` at 0 and
/// `model1` at 1.
///
/// The unknown boundary values `R f(0)`, `R f(1)` are fixed by imposing the
/// two Wentzell conditions on `R^D f + phi0 R f(0) + phi1 R f(1)`.
pub fn interval_resolvent<F: Fn(f64) -> f64>(
    model0: &BoundaryModel,
    model1: &BoundaryModel,
    lambda: f64,
    f: F,
    x: f64,
) -> Result<IntervalSolution> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::StartOutOfRange { start: x, space: "[0, 1]" });
    }
    let k = (2.0 * lambda).sqrt();
    let e2 = (-2.0 * k).exp();
    let own = k * (1.0 + e2) / one_minus_exp(2.0 * k);
    let cross = 2.0 * k * (-k).exp() / one_minus_exp(2.0 * k);

    let tol = (1e-14, 1e-12);
    let m0 = quad::integrate(|y| interval_hitting_lt(lambda, y).0 * f(y), 0.0, 1.0, tol.0, tol.1).value;
    let m1 = quad::integrate(|y| interval_hitting_lt(lambda, y).1 * f(y), 0.0, 1.0, tol.0, tol.1).value;

    let r0 = boundary_row(model0, own, cross, m0, f(0.0), lambda);
    let r1 = boundary_row(model1, own, cross, m1, f(1.0), lambda);
    // unknowns ordered (u0, u1); the row for end 1 has them swapped
    let (a11, a12, b1) = (r0[0], r0[1], r0[2]);
    let (a21, a22, b2) = (r1[1], r1[0], r1[2]);
    let det = a11 * a22 - a12 * a21;
    if det.abs() < 1e-13 {
        return Err(Error::SingularSystem { det });
    }
    let u0 = (b1 * a22 - a12 * b2) / det;
    let u1 = (a11 * b2 - a21 * b1) / det;

    let rd = if x == 0.0 || x == 1.0 {
        0.0
    } else {
        quad::integrate_with_breaks(|y| interval_dirichlet_resolvent(lambda, x, y) * f(y), &[0.0, x, 1.0], tol.0, tol.1)
            .value
    };
    let (p0, p1) = interval_hitting_lt(lambda, x);
    Ok(IntervalSolution { value: rd + p0 * u0 + p1 * u1, at_zero: u0, at_one: u1 })
}

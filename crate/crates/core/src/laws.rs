//! Closed-form laws of hitting times, local times and killing times used as
//! Monte Carlo targets.
//!
//! Local time is normalized so that `L_t` has the law of `|B_t|`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::quad;
use crate::special::{exp_erfc, gauss};

type Func = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LawKind {
    /// Inverse local time `K_r = inf { t : L_t > r }` of reflected BM from 0.
    InverseLocalTime { r: f64 },
    /// `L_{H_a}` for reflected BM from 0: exponential with mean `a`.
    LocalTimeAtExit { a: f64 },
    /// `L_t` for reflected BM from 0.
    LocalTime { t: f64 },
}

/// A law on `[0, inf)` with whatever of density, Laplace transform and mean
/// is known in closed form.
#[derive(Clone)]
pub struct ScalarLaw {
    pub kind: LawKind,
    density: Option<Func>,
    laplace: Option<Func>,
    pub mean: Option<f64>,
}

impl fmt::Debug for ScalarLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarLaw")
            .field("kind", &self.kind)
            .field("density", &self.density.is_some())
            .field("laplace", &self.laplace.is_some())
            .field("mean", &self.mean)
            .finish()
    }
}

impl ScalarLaw {
    pub fn density(&self, x: f64) -> Option<f64> {
        self.density.as_ref().map(|d| d(x))
    }

    pub fn laplace(&self, lambda: f64) -> Option<f64> {
        self.laplace.as_ref().map(|l| l(lambda))
    }

    /// Distribution function from the density, where there is one.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        if let LawKind::LocalTimeAtExit { a } = self.kind {
            return Some(-(-x / a).exp_m1());
        }
        let d = self.density.as_ref()?;
        Some(quad::integrate(|y| d(y), 0.0, x.max(0.0), 1e-14, 1e-12).value)
    }

    /// `int_0^inf e^{-lambda x} density(x) dx` by quadrature.
    pub fn numerical_laplace(&self, lambda: f64) -> Option<f64> {
        let d = self.density.as_ref()?;
        Some(quad::integrate_to_inf(|x| (-lambda * x).exp() * d(x), 0.0, &[0.1, 1.0, 10.0], 1e-14, 1e-12).value)
    }

    /// `int density` over `[0, inf)` by quadrature.
    pub fn mass(&self) -> Option<f64> {
        let d = self.density.as_ref()?;
        Some(quad::integrate_to_inf(|x| d(x), 0.0, &[0.1, 1.0, 10.0], 1e-14, 1e-12).value)
    }
}

/// Law of the inverse local time `K_r`: density
/// `r (2 pi l^3)^{-1/2} exp(-r^2 / 2l)`, transform `exp(-sqrt(2 lambda) r)`.
pub fn k_r_law(r: f64) -> ScalarLaw {
    ScalarLaw {
        kind: LawKind::InverseLocalTime { r },
        density: Some(Arc::new(move |l: f64| {
            if l <= 0.0 {
                0.0
            } else {
                r / (2.0 * PI * l * l * l).sqrt() * (-r * r / (2.0 * l)).exp()
            }
        })),
        laplace: Some(Arc::new(move |lambda: f64| (-(2.0 * lambda).sqrt() * r).exp())),
        mean: None,
    }
}

/// Law of `L_{H_a}` under `P_0`: exponential with mean `a`.
pub fn lt_at_exit_law(a: f64) -> ScalarLaw {
    ScalarLaw {
        kind: LawKind::LocalTimeAtExit { a },
        density: Some(Arc::new(move |y: f64| if y < 0.0 { 0.0 } else { (-y / a).exp() / a })),
        laplace: Some(Arc::new(move |lambda: f64| 1.0 / (1.0 + a * lambda))),
        mean: Some(a),
    }
}

/// Law of `L_t` under `P_0`: density `2 g(t, y)`.
pub fn lt_law(t: f64) -> ScalarLaw {
    ScalarLaw {
        kind: LawKind::LocalTime { t },
        density: Some(Arc::new(move |y: f64| lt_density(t, y))),
        laplace: Some(Arc::new(move |lambda: f64| exp_erfc(0.5 * lambda * lambda * t, lambda * (0.5 * t).sqrt()))),
        mean: Some((2.0 * t / PI).sqrt()),
    }
}

/// Density of `L_s` under `P_0`.
pub fn lt_density(s: f64, y: f64) -> f64 {
    if y < 0.0 {
        0.0
    } else {
        2.0 * gauss(s, y)
    }
}

/// Joint density of `(|B_s|, L_s)` under `P_0`:
/// `2 (x + y) (2 pi s^3)^{-1/2} exp(-(x + y)^2 / 2s)`.
pub fn joint_refl_lt_density(s: f64, x: f64, y: f64) -> f64 {
    if x < 0.0 || y < 0.0 {
        return 0.0;
    }
    let q = x + y;
    2.0 * q / (2.0 * PI * s * s * s).sqrt() * (-q * q / (2.0 * s)).exp()
}

/// `E_x exp(-alpha H_a - beta L_{H_a})`, the bounded even solution of
/// `v'' / 2 = alpha v`, `v'(0+) = beta v(0)`, `v(a) = 1`.
pub fn v_exit(alpha: f64, beta: f64, a: f64, x: f64) -> f64 {
    let x = x.abs();
    let k = (2.0 * alpha).sqrt();
    if x > a {
        return (-k * (x - a)).exp();
    }
    // k cosh(k y) + beta sinh(k y) = (k e^{ky} / 2) (1 + e^{-2ky} + beta h(y)),
    // h(y) = (1 - e^{-2ky}) / k, which tends to 2y as k -> 0
    let h = |y: f64| if k == 0.0 { 2.0 * y } else { -(-2.0 * k * y).exp_m1() / k };
    let part = |y: f64| 1.0 + (-2.0 * k * y).exp() + beta * h(y);
    (k * (x - a)).exp() * part(x) / part(a)
}

/// `P_0(H_a < zeta_beta)` for elastic Brownian motion.
pub fn kill_before_hit_prob(a: f64, beta: f64) -> f64 {
    1.0 / (1.0 + beta * a)
}

/// `E_0 exp(-lambda zeta)` for the general process, `beta / (beta + sqrt(2 lambda) + gamma lambda)`.
pub fn zeta_lt(beta: f64, gamma: f64, lambda: f64) -> f64 {
    beta / (beta + (2.0 * lambda).sqrt() + gamma * lambda)
}

/// `E_x int_0^inf e^{-alpha t} dL^s_t` for the sticky local time.
pub fn ls_alpha_potential(alpha: f64, gamma: f64, x: f64) -> f64 {
    let k = (2.0 * alpha).sqrt();
    (-k * x).exp() / (k + alpha * gamma)
}

/// `E_0 H_{gamma, eps}`, mean exit time of sticky BM from `[0, eps)`.
pub fn sticky_exit_mean(gamma: f64, eps: f64) -> f64 {
    eps * eps + gamma * eps
}

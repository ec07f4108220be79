//! Transition densities, boundary atoms, and resolvent kernels of the
//! half-line and interval Brownian motions.

mod interval;
mod table;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Absorption, BoundaryModel, Mode};
use crate::quad;
use crate::special::{erfc, erfcx, gauss};

pub use interval::{
    interval_dirichlet_closed, interval_dirichlet_resolvent, interval_hitting_lt, interval_resolvent, IntervalSolution,
};
pub use table::{kernel_table, write_kernel_table, KernelRow, KernelTable, TableKind};

const G_ABS_TOL: f64 = 1e-13;
const G_REL_TOL: f64 = 1e-12;

/// `g(t, x)`, `g_{beta,0}`, `g_{0,gamma}` or `g_{beta,gamma}` depending on
/// which parameters vanish.
///
/// `g_{beta,gamma}(t, .)` is the inverse Laplace transform of
/// `rho(lambda) exp(-sqrt(2 lambda) x)`.
pub fn g_family(beta: f64, gamma: f64, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(g_unchecked(beta, gamma, t, x))
}

pub(crate) fn g_unchecked(beta: f64, gamma: f64, t: f64, x: f64) -> f64 {
    let damp = (-x * x / (2.0 * t)).exp();
    match (beta > 0.0, gamma > 0.0) {
        (false, false) => gauss(t, x),
        (true, false) => {
            let z = x / (2.0 * t).sqrt() + beta * (0.5 * t).sqrt();
            gauss(t, x) - 0.5 * beta * erfcx(z) * damp
        }
        (false, true) => {
            let z = x / (2.0 * t).sqrt() + (2.0 * t).sqrt() / gamma;
            erfcx(z) * damp / gamma
        }
        (true, true) => g_general(beta, gamma, t, x),
    }
}

/// Quadrature of
/// `g = gamma^-2 (2 pi)^-1/2 int_0^t (s + gamma x) (t - s)^-3/2
///      exp(-(s + gamma x)^2 / (2 gamma^2 (t - s))) exp(-beta s / gamma) ds`.
///
/// On `[0, t/2]` the variable is `s = gamma w`, which keeps the peak of
/// width `gamma` resolved as `gamma -> 0`; on `[t/2, t]` it is
/// `s = t - u^2`, which removes the endpoint singularity.
fn g_general(beta: f64, gamma: f64, t: f64, x: f64) -> f64 {
    let c = 1.0 / (2.0 * PI).sqrt();
    let near = |w: f64| {
        let rest = t - gamma * w;
        if rest <= 0.0 {
            return 0.0;
        }
        let q = w + x;
        c * q / (rest * rest.sqrt()) * (-(q * q) / (2.0 * rest) - beta * w).exp()
    };
    // beyond w_cut the Gaussian factor is below exp(-700)
    let w_cut = ((1400.0 * t).sqrt() - x).max(0.0);
    let w_half = 0.5 * t / gamma;
    let w_end = w_half.min(w_cut);
    let mut breaks = vec![0.0];
    for p in [t.sqrt(), 4.0 * t.sqrt(), 1.0 / beta, 10.0 / beta] {
        if p < w_end {
            breaks.push(p);
        }
    }
    breaks.push(w_end);
    breaks.sort_by(f64::total_cmp);
    let mut total = quad::integrate_with_breaks(near, &breaks, G_ABS_TOL, G_REL_TOL).value;
    if w_half < w_cut {
        let g2 = gamma * gamma;
        let far = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let s = t - u * u;
            let q = s + gamma * x;
            2.0 * c / g2 * q / (u * u) * (-(q * q) / (2.0 * g2 * u * u) - beta * s / gamma).exp()
        };
        total += quad::integrate(far, 0.0, (0.5 * t).sqrt(), G_ABS_TOL, G_REL_TOL).value;
    }
    total
}

/// `K_{a,b} f(t) = sqrt(a / 2 pi) int_0^t (s + b) (t - s)^-3/2
///                 exp(-a (s + b)^2 / (2 (t - s))) f(s) ds`,
/// whose Laplace transform is `exp(-sqrt(2 a l) b) Lf(l + sqrt(2 a l))`.
pub fn k_ab_apply<F: Fn(f64) -> f64>(a: f64, b: f64, f: F, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if !(a > 0.0) {
        return Err(Error::BadParameter { name: "a", value: a });
    }
    if !(b >= 0.0) {
        return Err(Error::BadParameter { name: "b", value: b });
    }
    let c = (a / (2.0 * PI)).sqrt();
    let kernel = |s: f64, rest: f64| {
        let q = s + b;
        c * q / (rest * rest.sqrt()) * (-a * q * q / (2.0 * rest)).exp()
    };
    let head = |s: f64| {
        let rest = t - s;
        if rest <= 0.0 {
            0.0
        } else {
            kernel(s, rest) * f(s)
        }
    };
    let tail = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let s = t - u * u;
        2.0 * u * kernel(s, u * u) * f(s)
    };
    let mut breaks = vec![0.0];
    let width = 1.0 / a.sqrt();
    for p in [width, 4.0 * width] {
        if p < 0.5 * t {
            breaks.push(p);
        }
    }
    breaks.push(0.5 * t);
    let head = quad::integrate_with_breaks(head, &breaks, 1e-14, 1e-12).value;
    let tail = quad::integrate(tail, 0.0, (0.5 * t).sqrt(), 1e-14, 1e-12).value;
    Ok(head + tail)
}

/// Laplace-domain building blocks at `(lambda, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceFactors {
    /// `exp(-sqrt(2 lambda) x)`, the transform of the hitting time of 0.
    pub e_lambda: f64,
    /// `1 / (beta + sqrt(2 lambda) + gamma lambda)`.
    pub rho: f64,
    pub sqrt2lambda: f64,
}

pub fn laplace_factors(beta: f64, gamma: f64, lambda: f64, x: f64) -> LaplaceFactors {
    let k = (2.0 * lambda).sqrt();
    LaplaceFactors { e_lambda: (-k * x).exp(), rho: 1.0 / (beta + k + gamma * lambda), sqrt2lambda: k }
}

type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A sub-probability measure: a density on the interior plus point masses
/// at boundary points.
#[derive(Clone)]
pub struct BoundaryMeasure {
    density: Density,
    /// `(point, weight)` pairs.
    pub atoms: Vec<(f64, f64)>,
    /// `(lower, upper)` of the state space; `upper` may be infinite.
    pub support: (f64, f64),
    /// Extra breakpoints for integrating the density (its peak).
    pub peaks: Vec<f64>,
}

impl fmt::Debug for BoundaryMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryMeasure")
            .field("atoms", &self.atoms)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl BoundaryMeasure {
    pub fn new(
        density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        atoms: Vec<(f64, f64)>,
        support: (f64, f64),
    ) -> Self {
        Self { density: Arc::new(density), atoms, support, peaks: vec![] }
    }

    fn with_peak(mut self, at: f64) -> Self {
        self.peaks.push(at);
        self
    }

    pub fn density(&self, y: f64) -> f64 {
        (self.density)(y)
    }

    /// Weight of the atom at `point`, zero if there is none.
    pub fn atom(&self, point: f64) -> f64 {
        self.atoms.iter().filter(|(p, _)| *p == point).map(|(_, w)| w).sum()
    }

    pub fn atom_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// Density mass of `[a, b]`, `b` possibly infinite.
    pub fn density_mass(&self, a: f64, b: f64) -> f64 {
        let f = |y: f64| self.density(y);
        let inside: Vec<f64> = self.peaks.iter().copied().filter(|&p| p > a && p < b).collect();
        if b.is_infinite() {
            quad::integrate_to_inf(f, a, &inside, 1e-13, 1e-11).value
        } else {
            let mut pts = vec![a];
            pts.extend(inside);
            pts.push(b);
            quad::integrate_with_breaks(f, &pts, 1e-13, 1e-11).value
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.density_mass(self.support.0, self.support.1) + self.atom_mass()
    }

    /// `int f dmu` over the whole state space.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let g = |y: f64| self.density(y) * f(y);
        let (a, b) = self.support;
        let inside: Vec<f64> = self.peaks.iter().copied().filter(|&p| p > a && p < b).collect();
        let dens = if b.is_infinite() {
            quad::integrate_to_inf(g, a, &inside, 1e-13, 1e-11).value
        } else {
            let mut pts = vec![a];
            pts.extend(inside);
            pts.push(b);
            quad::integrate_with_breaks(g, &pts, 1e-13, 1e-11).value
        };
        dens + self.atoms.iter().map(|&(p, w)| w * f(p)).sum::<f64>()
    }
}

/// Dirichlet heat kernel on the half-line, `p(t,x,y) - p(t,x,-y)`.
pub fn p_dirichlet(t: f64, x: f64, y: f64) -> f64 {
    gauss(t, x - y) - gauss(t, x + y)
}

/// Neumann heat kernel on the half-line, `p(t,x,y) + p(t,x,-y)`.
pub fn p_neumann(t: f64, x: f64, y: f64) -> f64 {
    gauss(t, x - y) + gauss(t, x + y)
}

/// Dirichlet resolvent kernel on the half-line.
pub fn r_dirichlet(lambda: f64, x: f64, y: f64) -> f64 {
    let k = (2.0 * lambda).sqrt();
    ((-k * (x - y).abs()).exp() - (-k * (x + y)).exp()) / k
}

/// Neumann resolvent kernel on the half-line.
pub fn r_neumann(lambda: f64, x: f64, y: f64) -> f64 {
    let k = (2.0 * lambda).sqrt();
    ((-k * (x - y).abs()).exp() + (-k * (x + y)).exp()) / k
}

/// Elastic resolvent kernel written as the Neumann kernel minus a
/// correction.
pub fn r_elastic_neumann_form(beta: f64, lambda: f64, x: f64, y: f64) -> f64 {
    let k = (2.0 * lambda).sqrt();
    r_neumann(lambda, x, y) - 2.0 * beta / ((beta + k) * k) * (-k * (x + y)).exp()
}

/// Elastic resolvent kernel written as the Dirichlet kernel plus a
/// correction.
pub fn r_elastic_dirichlet_form(beta: f64, lambda: f64, x: f64, y: f64) -> f64 {
    let k = (2.0 * lambda).sqrt();
    r_dirichlet(lambda, x, y) + 2.0 / (beta + k) * (-k * (x + y)).exp()
}

/// Mass at 0 at time `t` of the trap-and-kill process from `x`: it reaches
/// 0 at `H_0` and survives there an `Exp(beta)` time.
pub fn trap_kill_atom(beta: f64, t: f64, x: f64) -> f64 {
    if x == 0.0 {
        return (-beta * t).exp();
    }
    // s = x^2 / (2 w^2) turns h_x(s) ds into (2 / sqrt(pi)) exp(-w^2) dw
    let w0 = x / (2.0 * t).sqrt();
    let c = 2.0 / PI.sqrt();
    let f = |w: f64| c * (-w * w - beta * (t - x * x / (2.0 * w * w))).exp();
    quad::integrate_to_inf(f, w0, &[w0 + 1.0, w0 + 4.0], 1e-15, 1e-12).value
}

fn check_start(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::StartOutOfRange { start: x, space: "[0, inf)" })
    }
}

/// Law of `X_t` under `P_x` on `[0, inf)`.
pub fn transition_measure(model: &BoundaryModel, t: f64, x: f64) -> Result<BoundaryMeasure> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    check_start(x)?;
    let half = (0.0, f64::INFINITY);
    let dirichlet = move |y: f64| p_dirichlet(t, x, y);
    Ok(match model.mode {
        Mode::Absorbing(Absorption::Stop) => {
            BoundaryMeasure::new(dirichlet, vec![(0.0, erfc(x / (2.0 * t).sqrt()))], half)
        }
        Mode::Absorbing(Absorption::Kill) => BoundaryMeasure::new(dirichlet, vec![], half),
        Mode::TrapKill { beta } => BoundaryMeasure::new(dirichlet, vec![(0.0, trap_kill_atom(beta, t, x))], half),
        _ => {
            let (beta, gamma) = (model.beta(), model.gamma());
            let density = move |y: f64| p_dirichlet(t, x, y) + 2.0 * g_unchecked(beta, gamma, t, x + y);
            let atoms = if gamma > 0.0 { vec![(0.0, gamma * g_unchecked(beta, gamma, t, x))] } else { vec![] };
            BoundaryMeasure::new(density, atoms, half)
        }
    }
    .with_peak(x))
}

/// Resolvent kernel `r_lambda(x, dy)` on `[0, inf)`.
pub fn resolvent_measure(model: &BoundaryModel, lambda: f64, x: f64) -> Result<BoundaryMeasure> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    check_start(x)?;
    let half = (0.0, f64::INFINITY);
    let k = (2.0 * lambda).sqrt();
    let ex = (-k * x).exp();
    let dirichlet = move |y: f64| r_dirichlet(lambda, x, y);
    Ok(match model.mode {
        Mode::Absorbing(Absorption::Stop) => BoundaryMeasure::new(dirichlet, vec![(0.0, ex / lambda)], half),
        Mode::Absorbing(Absorption::Kill) => BoundaryMeasure::new(dirichlet, vec![], half),
        Mode::TrapKill { beta } => BoundaryMeasure::new(dirichlet, vec![(0.0, ex / (lambda + beta))], half),
        _ => {
            let (beta, gamma) = (model.beta(), model.gamma());
            let rho = laplace_factors(beta, gamma, lambda, x).rho;
            let density = move |y: f64| r_dirichlet(lambda, x, y) + 2.0 * rho * (-k * (x + y)).exp();
            let atoms = if gamma > 0.0 { vec![(0.0, gamma * rho * ex)] } else { vec![] };
            BoundaryMeasure::new(density, atoms, half)
        }
    }
    .with_peak(x))
}

/// `R_lambda f(x) = int f(y) r_lambda(x, dy)`.
pub fn resolvent_apply<F: Fn(f64) -> f64>(model: &BoundaryModel, lambda: f64, f: F, x: f64) -> Result<f64> {
    Ok(resolvent_measure(model, lambda, x)?.integrate(f))
}

/// Value, first and second right derivative of `R_lambda f` at the origin,
/// from the kernel in closed form.
///
/// Writing `R f = R^D f + C e_lambda`, the Dirichlet part contributes
/// `(0, 2 (e_lambda, f), -2 f(0))` and the exponential `(C, -k C, k^2 C)`.
pub fn resolvent_jet_at_origin<F: Fn(f64) -> f64>(model: &BoundaryModel, lambda: f64, f: F) -> Result<[f64; 3]> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let k = (2.0 * lambda).sqrt();
    let f0 = f(0.0);
    let ef = quad::integrate_to_inf(|y| (-k * y).exp() * f(y), 0.0, &[1.0 / k], 1e-15, 1e-13).value;
    let c = match model.mode {
        Mode::Absorbing(Absorption::Stop) => f0 / lambda,
        Mode::Absorbing(Absorption::Kill) => 0.0,
        Mode::TrapKill { beta } => f0 / (lambda + beta),
        _ => {
            let (beta, gamma) = (model.beta(), model.gamma());
            laplace_factors(beta, gamma, lambda, 0.0).rho * (2.0 * ef + gamma * f0)
        }
    };
    Ok([c, 2.0 * ef - k * c, -2.0 * f0 + k * k * c])
}

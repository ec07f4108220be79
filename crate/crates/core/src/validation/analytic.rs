use crate::error::Result;
use crate::kernels::{
    g_family, laplace_factors, p_neumann, r_dirichlet, r_elastic_dirichlet_form, r_elastic_neumann_form,
    resolvent_apply, resolvent_measure, transition_measure,
};
use crate::model::{wentzell_residual, BoundaryModel};
use crate::quad;

/// Wentzell residual of `R_lambda f` at the origin with one-sided finite
/// differences of step `h` on the closed-form resolvent.
pub fn boundary_residual_numeric<F>(model: &BoundaryModel, lambda: f64, f: F, h: f64) -> Result<f64>
where
    F: Fn(f64) -> f64 + Copy,
{
    let r: Vec<f64> = (0..4).map(|i| resolvent_apply(model, lambda, f, i as f64 * h)).collect::<Result<_>>()?;
    let d1 = (-11.0 / 6.0 * r[0] + 3.0 * r[1] - 1.5 * r[2] + r[3] / 3.0) / h;
    let d2 = (2.0 * r[0] - 5.0 * r[1] + 4.0 * r[2] - r[3]) / (h * h);
    Ok(wentzell_residual(model, r[0], d1, d2))
}

const PROBES: [f64; 5] = [0.1, 0.4, 0.9, 1.5, 3.0];

/// `sup_y |r(x, y) - r^D(x, y) - e_lambda(x) r(0, y)|` over five probes,
/// together with the same difference for the atoms at the origin.
pub fn first_passage_check(model: &BoundaryModel, lambda: f64, x: f64) -> Result<f64> {
    let from_x = resolvent_measure(model, lambda, x)?;
    let from_0 = resolvent_measure(model, lambda, 0.0)?;
    let e = laplace_factors(0.0, 0.0, lambda, x).e_lambda;
    let density = PROBES
        .iter()
        .map(|&y| (from_x.density(y) - r_dirichlet(lambda, x, y) - e * from_0.density(y)).abs())
        .fold(0.0, f64::max);
    Ok(density.max((from_x.atom(0.0) - e * from_0.atom(0.0)).abs()))
}

/// Relative gap between the numerical Laplace transform of `t -> p(t, x, y)`
/// (and of the atom at 0) and the resolvent kernel.
pub fn laplace_consistency(model: &BoundaryModel, lambda: f64, x: f64, y: f64) -> Result<f64> {
    let r = resolvent_measure(model, lambda, x)?;
    let lt = |g: &dyn Fn(f64) -> f64| {
        // t = u^2 tames the small-time behaviour
        quad::integrate_to_inf(
            |u| 2.0 * u * (-lambda * u * u).exp() * g(u * u),
            0.0,
            &[0.5, 1.0, 2.0, 4.0],
            1e-14,
            1e-11,
        )
        .value
    };
    let density =
        lt(&|t| if t > 0.0 { transition_measure(model, t, x).map(|m| m.density(y)).unwrap_or(0.0) } else { 0.0 });
    let mut gap = ((density - r.density(y)) / r.density(y)).abs();
    let atom = r.atom(0.0);
    if atom > 0.0 {
        let a =
            lt(&|t| if t > 0.0 { transition_measure(model, t, x).map(|m| m.atom(0.0)).unwrap_or(0.0) } else { 0.0 });
        gap = gap.max(((a - atom) / atom).abs());
    }
    Ok(gap)
}

/// `|int p^N(t, x, z) p^N(s, z, y) dz - p^N(t + s, x, y)|`.
pub fn chapman_kolmogorov_neumann(t: f64, s: f64, x: f64, y: f64) -> f64 {
    let lhs = quad::integrate_to_inf(|z| p_neumann(t, x, z) * p_neumann(s, z, y), 0.0, &[x, y], 1e-15, 1e-13).value;
    (lhs - p_neumann(t + s, x, y)).abs()
}

/// Largest gap between the two algebraic forms of the elastic resolvent
/// kernel on a small grid.
pub fn elastic_forms_gap(beta: f64, lambda: f64) -> f64 {
    let pts = [0.0, 0.2, 0.7, 1.5, 4.0];
    let mut gap: f64 = 0.0;
    for &x in &pts {
        for &y in &pts {
            gap = gap
                .max((r_elastic_neumann_form(beta, lambda, x, y) - r_elastic_dirichlet_form(beta, lambda, x, y)).abs());
        }
    }
    gap
}

/// Largest relative gap between `g_{1e-6, gamma}` and `g_{0, gamma}`, and
/// between `g_{beta, 1e-6}` and `g_{beta, 0}`, on a `(t, x)` grid.
pub fn g_limit_gap(beta: f64, gamma: f64) -> Result<f64> {
    let mut gap: f64 = 0.0;
    for t in [0.25, 1.0, 4.0] {
        for x in [0.0, 0.5, 2.0] {
            let a = g_family(1e-6, gamma, t, x)?;
            let b = g_family(0.0, gamma, t, x)?;
            gap = gap.max(((a - b) / b).abs());
            let a = g_family(beta, 1e-6, t, x)?;
            let b = g_family(beta, 0.0, t, x)?;
            gap = gap.max(((a - b) / b).abs());
        }
    }
    Ok(gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Absorption;

    fn bump(y: f64) -> f64 {
        (-(y - 0.5) * (y - 0.5) / 0.08).exp()
    }

    #[test]
    fn residuals_are_small() {
        for m in [
            BoundaryModel::reflecting(),
            BoundaryModel::elastic(1.0).unwrap(),
            BoundaryModel::sticky(1.0).unwrap(),
            BoundaryModel::general(1.0, 1.0).unwrap(),
        ] {
            let r = boundary_residual_numeric(&m, 1.0, bump, 1e-4).unwrap();
            assert!(r.abs() < 1e-3, "{}: {r}", m.descriptor());
        }
    }

    #[test]
    fn first_passage_identity() {
        for m in [
            BoundaryModel::sticky(1.0).unwrap(),
            BoundaryModel::elastic(1.0).unwrap(),
            BoundaryModel::general(0.5, 2.0).unwrap(),
        ] {
            assert!(first_passage_check(&m, 1.0, 0.5).unwrap() < 1e-12);
            assert!(first_passage_check(&m, 1.0, 0.0).unwrap() < 1e-15);
        }
        let stop = BoundaryModel::absorbing(Absorption::Stop);
        assert!(first_passage_check(&stop, 1.0, 0.5).unwrap() < 1e-12);
    }

    #[test]
    fn laplace_and_ck() {
        let m = BoundaryModel::general(1.0, 1.0).unwrap();
        assert!(laplace_consistency(&m, 1.0, 0.5, 0.8).unwrap() < 1e-6);
        assert!(chapman_kolmogorov_neumann(0.5, 0.7, 0.3, 1.1) < 1e-8);
        assert!(elastic_forms_gap(1.0, 1.0) < 1e-13);
        assert!(g_limit_gap(1.0, 1.0).unwrap() < 1e-4);
    }
}

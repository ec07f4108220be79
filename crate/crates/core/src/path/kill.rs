use super::{crossing_above, SamplePath};
use crate::error::{Error, Result};
use crate::rng;

/// Kills `path` when the additive functional `functional` first exceeds an
/// exponential threshold `S` of rate `beta` drawn from the kill stream of
/// `seed`: `zeta = inf { t : A_t > S }`.
pub fn pchaf_kill(path: &SamplePath, functional: &[f64], beta: f64, seed: u64) -> Result<SamplePath> {
    if functional.len() != path.values.len() {
        return Err(Error::LengthMismatch { expected: path.values.len(), got: functional.len() });
    }
    if !(beta > 0.0) {
        return Err(Error::BadParameter { name: "beta", value: beta });
    }
    if let Some(i) = (1..functional.len()).find(|&i| functional[i] < functional[i - 1]) {
        return Err(Error::NotAdditiveFunctional { index: i });
    }
    if functional[0] != 0.0 {
        return Err(Error::NotAdditiveFunctional { index: 0 });
    }
    let threshold = rng::exponential_threshold(seed, beta);
    Ok(kill_at_threshold(path, functional, threshold))
}

pub(crate) fn kill_at_threshold(path: &SamplePath, functional: &[f64], threshold: f64) -> SamplePath {
    let zeta = crossing_above(&path.grid, functional, threshold);
    let lifetime = match (path.lifetime, zeta) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let mut out = SamplePath { lifetime, ..path.clone() };
    freeze_after_death(&mut out);
    out
}

/// Holds the last live value through the cemetery period.
pub(crate) fn freeze_after_death(path: &mut SamplePath) {
    if let Some(z) = path.lifetime {
        let first_dead = (0..path.values.len()).find(|&i| path.grid.time(i) >= z);
        if let Some(k) = first_dead {
            let hold = path.values[k.saturating_sub(1)];
            for v in &mut path.values[k.max(1)..] {
                *v = hold;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::TimeGrid;

    fn flat_path(n: usize, dt: f64) -> SamplePath {
        SamplePath {
            grid: TimeGrid::new(n as f64 * dt, n).unwrap(),
            values: vec![1.0; n + 1],
            lifetime: None,
            start: 1.0,
        }
    }

    #[test]
    fn zero_functional_never_kills() {
        let p = flat_path(100, 0.01);
        let k = pchaf_kill(&p, &vec![0.0; 101], 1.0, 9).unwrap();
        assert_eq!(k.lifetime, None);
    }

    #[test]
    fn identity_functional_kills_at_threshold() {
        let p = flat_path(100, 0.01);
        let a: Vec<f64> = (0..101).map(|i| p.grid.time(i)).collect();
        // pick the seed's threshold and check the interpolated crossing
        let s = rng::exponential_threshold(4, 2.0);
        let k = pchaf_kill(&p, &a, 2.0, 4).unwrap();
        if s < 1.0 {
            assert!((k.lifetime.unwrap() - s).abs() < 1e-12);
        } else {
            assert_eq!(k.lifetime, None);
        }
        let k = kill_at_threshold(&p, &a, 0.3);
        assert!((k.lifetime.unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(k.value(31), None);
        assert_eq!(k.value(29), Some(1.0));
    }

    #[test]
    fn decreasing_functional_rejected() {
        let p = flat_path(3, 0.1);
        assert_eq!(pchaf_kill(&p, &[0.0, 0.2, 0.1, 0.3], 1.0, 0), Err(Error::NotAdditiveFunctional { index: 2 }));
    }
}

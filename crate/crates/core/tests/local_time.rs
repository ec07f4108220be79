use wentzell::path::{local_time_downcrossing, reflect_with_local_time};
use wentzell::rng::mix_seed;
use wentzell::TimeGrid;

#[test]
fn band_estimate_agrees_with_skorokhod_local_time() {
    let grid = TimeGrid::new(1.0, 10_000).unwrap();
    let n = 1000;
    let mut bias = 0.0;
    for i in 0..n {
        let aug = reflect_with_local_time(0.0, grid, mix_seed(11, i)).unwrap();
        let est = local_time_downcrossing(&aug, 0.05).unwrap();
        let err = est.last().unwrap() - aug.local_time.last().unwrap();
        bias += err / n as f64;
    }
    assert!(bias.abs() < 0.05, "bias {bias}");
}

#[test]
fn band_estimate_error_shrinks_with_the_band() {
    let grid = TimeGrid::new(1.0, 10_000).unwrap();
    let mae = |eps: f64| {
        (0..200)
            .map(|i| {
                let aug = reflect_with_local_time(0.0, grid, mix_seed(12, i)).unwrap();
                let est = local_time_downcrossing(&aug, eps).unwrap();
                (est.last().unwrap() - aug.local_time.last().unwrap()).abs()
            })
            .sum::<f64>()
            / 200.0
    };
    assert!(mae(0.02) < mae(0.2));
}

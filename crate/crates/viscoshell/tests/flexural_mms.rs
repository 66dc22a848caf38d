use viscoshell::harness::checks::{plate_mms, rates};
use viscoshell::material::MaterialParams;

fn unit() -> MaterialParams {
    MaterialParams::new(1.0, 1.0, 1.0, 1.0).unwrap()
}

#[test]
fn spatial_rates_on_the_simply_supported_plate() {
    let rows = plate_mms(&unit(), &[8, 16, 32], 0.1, 1.0).unwrap();
    // Against the interpolant of the exact shape: superconvergent.
    for r in rates(&rows, |r| r.err_discrete) {
        assert!(r > 3.5, "{r}");
    }
    // Against the exact shape: bicubic Hermite in the H² seminorm.
    for r in rates(&rows, |r| r.err_spatial) {
        assert!((1.8..2.2).contains(&r), "{r}");
    }
}

#[test]
fn total_error_is_first_order_in_time() {
    let mat = MaterialParams::new(2.0, 0.5, 0.7, 0.3).unwrap();
    let e = |dt: f64| plate_mms(&mat, &[16], dt, 1.0).unwrap()[0].err_total;
    let (a, b, c) = (e(0.1), e(0.05), e(0.025));
    for ratio in [a / b, b / c] {
        assert!((1.7..2.3).contains(&ratio), "{a} {b} {c}");
    }
}

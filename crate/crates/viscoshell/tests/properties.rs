#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use viscoshell::flexural::{direct_memory_sum, MemoryState};
use viscoshell::geometry::{Domain, Plate};
use viscoshell::material::{isotropic2, reduction_identity_residuals, MaterialParams};
use viscoshell::mesh::{Edge, Mesh2D, Mesh3D};
use viscoshell::shell3d::{bilinear_norms_sq, field_norms_sq, korn_ratio, transverse_average, Layout3D, ShearStrain};

fn material() -> impl Strategy<Value = MaterialParams> {
    (0.0..10.0f64, 1e-3..10.0f64, 1e-3..10.0f64, 0.0..10.0f64)
        .prop_map(|(lambda, mu, theta_v, rho_v)| MaterialParams { lambda, mu, theta_v, rho_v })
}

fn layout() -> Layout3D {
    let d = Domain::rect(1.0, 0.5);
    Layout3D::new(Mesh3D::new(Mesh2D::new(d, 3, 2, vec![Edge::Y1Min], vec![]).unwrap(), 3).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn reduction_identities_hold(m in material()) {
        let r = reduction_identity_residuals(&m).unwrap();
        prop_assert!(r.r_a < 1e-10 && r.r_b < 1e-10 && r.r_c < 1e-10, "{r:?}");
        prop_assert!(r.theta_lambda < 1e-15, "{r:?}");
    }

    #[test]
    fn isotropic_tensor_has_full_symmetry(a11 in 0.5..2.0f64, a12 in -0.3..0.3f64, a22 in 0.5..2.0f64, tr in 0.0..5.0f64, sh in 0.0..5.0f64) {
        let t = isotropic2(&[[a11, a12], [a12, a22]], tr, sh);
        for i in 0..2 { for j in 0..2 { for k in 0..2 { for l in 0..2 {
            let tol = 4.0 * f64::EPSILON * t[i][j][k][l].abs();
            prop_assert!((t[i][j][k][l] - t[k][l][i][j]).abs() <= tol);
            prop_assert!((t[i][j][k][l] - t[j][i][k][l]).abs() <= tol);
        }}}}
    }

    #[test]
    fn memory_recurrence_matches_convolution(k in 0.01..20.0f64, dt in 1e-3..0.2f64, seed in 0u64..1000) {
        let steps = 40;
        let kc: Vec<Vec<f64>> = (0..=steps)
            .map(|n| (0..3).map(|i| ((seed + 7 * n as u64 + 3 * i as u64) as f64).sin()).collect())
            .collect();
        let times: Vec<f64> = (0..=steps).map(|n| n as f64 * dt).collect();
        let mut m = MemoryState::new(3, k);
        for n in 1..=steps {
            m.advance(&kc[n - 1], &kc[n], dt);
        }
        let d = direct_memory_sum(&kc, &times, k);
        for i in 0..3 {
            prop_assert!((m.h[i] - d[i]).abs() <= 1e-12 * (1.0 + d[i].abs()));
        }
    }

    #[test]
    fn transverse_average_contracts(values in prop::collection::vec(-1.0..1.0f64, 144)) {
        let l = layout();
        let avg = transverse_average(&l.mesh, &values);
        let (a, _) = bilinear_norms_sq(&l.mesh.footprint, &avg, 3);
        let (b, _) = field_norms_sq(&l, &values);
        prop_assert!(a <= 0.5 * b * (1.0 + 1e-12));
    }

    #[test]
    fn korn_ratio_is_scale_invariant(values in prop::collection::vec(-1.0..1.0f64, 144), c in 0.1..10.0f64, eps in 0.02..0.3f64) {
        let l = layout();
        let ch = Plate { domain: l.mesh.footprint.domain };
        let v = l.map.scatter(&l.map.gather(&values));
        prop_assume!(v.iter().any(|x| *x != 0.0));
        let cv: Vec<f64> = v.iter().map(|x| c * x).collect();
        let r1 = korn_ratio(&l, &ch, eps, ShearStrain::Full, &v).unwrap();
        let r2 = korn_ratio(&l, &ch, eps, ShearStrain::Full, &cv).unwrap();
        prop_assert!((r1 - r2).abs() <= 1e-12 * r1);
    }
}

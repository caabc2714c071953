//! Randomized invariants.

mod common;

use proptest::prelude::*;
use shelldyn::mesh::{generate_shell_ball_mesh, read_mesh, write_mesh};
use shelldyn::sparse::CsrMatrix;
use shelldyn::whitney::TetGeometry;
use shelldyn::{Point3, Radii};

fn point() -> impl Strategy<Value = Point3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn tet() -> impl Strategy<Value = [Point3; 4]> {
    [point(), point(), point(), point()].prop_filter("well-shaped tet", |v| common::signed_volume(v).abs() > 0.02)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circulation_duality_holds_on_any_tet(v in tet()) {
        let g = TetGeometry::new(v).unwrap();
        for k in 0..6 {
            for j in 0..6 {
                let c = g.edge_circulation(k, |x| g.shape(j, x));
                let expect = if j == k { 1.0 } else { 0.0 };
                prop_assert!((c - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn element_matrices_are_symmetric_and_semidefinite(v in tet(), beta in 0.1..200.0f64) {
        let g = TetGeometry::new(v).unwrap();
        let m = g.local_mass();
        let k = g.local_curlcurl(beta).unwrap();
        prop_assert!((m - m.transpose()).amax() == 0.0);
        prop_assert!((k - k.transpose()).amax() == 0.0);
        prop_assert!(m.symmetric_eigenvalues().min() > 0.0);
        prop_assert!(k.symmetric_eigenvalues().min() > -1e-10 * k.amax());
    }

    #[test]
    fn whitney_functions_reproduce_constants(v in tet(), c in point(), x in point()) {
        // Σ_k (∫_e c · t) N_k = c for any constant field c.
        let g = TetGeometry::new(v).unwrap();
        let coeffs: [f64; 6] = std::array::from_fn(|k| g.edge_circulation(k, |_| c));
        let bary = g.barycentric(&x);
        prop_assert!((g.eval(&coeffs, &bary) - c).norm() < 1e-11 * (1.0 + c.norm()) * (1.0 + x.norm()));
        prop_assert!(g.eval_curl(&coeffs).norm() < 1e-11 * (1.0 + c.norm()));
    }

    #[test]
    fn barycentric_coordinates_round_trip(v in tet(), x in point()) {
        let g = TetGeometry::new(v).unwrap();
        let b = g.barycentric(&x);
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((g.point(&b) - x).norm() < 1e-12);
    }

    #[test]
    fn csr_product_matches_dense(rows in prop::collection::vec(prop::collection::vec(-2.0..2.0f64, 7), 5),
                                 x in prop::collection::vec(-1.0..1.0f64, 7)) {
        let sparse: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| if v.abs() < 1.0 { 0.0 } else { v }).collect()).collect();
        let a = CsrMatrix::from_dense(&sparse);
        let y = a.mul_vec(&x);
        for (i, r) in sparse.iter().enumerate() {
            let d: f64 = r.iter().zip(&x).map(|(a, b)| a * b).sum();
            prop_assert!((y[i] - d).abs() < 1e-14);
        }
        let yt = a.transpose_mul_vec(&y);
        for j in 0..7 {
            let d: f64 = (0..5).map(|i| sparse[i][j] * y[i]).sum();
            prop_assert!((yt[j] - d).abs() < 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn generated_meshes_respect_any_valid_radii(
        r1 in 0.1..1.0f64, d2 in 0.05..1.0f64, d3 in 0.05..1.0f64, d4 in 0.05..3.0f64,
    ) {
        let radii = [r1, r1 + d2, r1 + d2 + d3, r1 + d2 + d3 + d4];
        let mesh = generate_shell_ball_mesh(radii, 0).unwrap();
        let exact = Radii::new(radii).unwrap();
        let vols = mesh.region_volumes();
        let total: f64 = vols.iter().sum();
        let ball = 4.0 / 3.0 * std::f64::consts::PI * radii[3].powi(3);
        prop_assert!(total < ball && total > 0.5 * ball);
        for t in 0..mesh.num_tets() {
            prop_assert_eq!(mesh.classify_region(t), mesh.tets()[t].region);
        }
        prop_assert_eq!(mesh.radii(), exact);

        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        prop_assert_eq!(back.vertices(), mesh.vertices());
        prop_assert_eq!(back.tets(), mesh.tets());
    }
}

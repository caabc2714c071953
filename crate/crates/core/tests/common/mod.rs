//! Independent oracles shared by the integration tests. Nothing here calls
//! into the element code; barycentric gradients, shape functions and
//! quadrature are rebuilt from scratch.

#![allow(dead_code)]

use nalgebra::{Matrix4, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type V3 = Vector3<f64>;

pub const EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random tet with edge lengths of order one and a volume bounded away
/// from zero.
pub fn random_tet(rng: &mut StdRng) -> [V3; 4] {
    loop {
        let v: [V3; 4] = std::array::from_fn(|_| V3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        if signed_volume(&v).abs() > 0.02 {
            return v;
        }
    }
}

pub fn signed_volume(v: &[V3; 4]) -> f64 {
    (v[1] - v[0]).cross(&(v[2] - v[0])).dot(&(v[3] - v[0])) / 6.0
}

/// Barycentric coordinates are the rows of the inverse of `[[1, x_i]]`;
/// their gradients are the spatial columns.
pub fn bary_grads(v: &[V3; 4]) -> [V3; 4] {
    let a = Matrix4::from_fn(|r, c| if c == 0 { 1.0 } else { v[r][c - 1] });
    let inv = a.try_inverse().expect("nondegenerate tet");
    // λ_i(x) = Σ_c inv[(c, i)] · (1, x)_c
    std::array::from_fn(|i| V3::new(inv[(1, i)], inv[(2, i)], inv[(3, i)]))
}

pub fn bary_at(v: &[V3; 4], x: &V3) -> [f64; 4] {
    let a = Matrix4::from_fn(|r, c| if c == 0 { 1.0 } else { v[r][c - 1] });
    let inv = a.try_inverse().expect("nondegenerate tet");
    std::array::from_fn(|i| inv[(0, i)] + inv[(1, i)] * x.x + inv[(2, i)] * x.y + inv[(3, i)] * x.z)
}

/// Whitney function of local edge `k` at `x`.
pub fn whitney(v: &[V3; 4], k: usize, x: &V3) -> V3 {
    let g = bary_grads(v);
    let l = bary_at(v, x);
    let (i, j) = EDGES[k];
    g[j] * l[i] - g[i] * l[j]
}

pub fn whitney_curl(v: &[V3; 4], k: usize) -> V3 {
    let g = bary_grads(v);
    let (i, j) = EDGES[k];
    g[i].cross(&g[j]) * 2.0
}

/// Uniform random point in the tet.
pub fn sample_point(v: &[V3; 4], rng: &mut StdRng) -> V3 {
    let e: [f64; 4] = std::array::from_fn(|_| -rng.gen_range(f64::EPSILON..1.0f64).ln());
    let s: f64 = e.iter().sum();
    (0..4).fold(V3::zeros(), |acc, i| acc + v[i] * (e[i] / s))
}

/// Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre01(n: usize) -> Vec<(f64, f64)> {
    // Golub–Welsch on the Jacobi matrix of the Legendre recurrence.
    let mut j = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = j.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let x = eig.eigenvalues[i];
            let w = 2.0 * eig.eigenvectors[(0, i)].powi(2);
            ((x + 1.0) / 2.0, w / 2.0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Collapsed-coordinate (Duffy) product rule on a tet: exact for
/// polynomials of degree `2n − 3` and well beyond the integrands used here.
pub fn duffy_rule(v: &[V3; 4], n: usize) -> Vec<(V3, f64)> {
    let gl = gauss_legendre01(n);
    let vol = signed_volume(v).abs();
    let mut pts = Vec::with_capacity(n * n * n);
    for &(a, wa) in &gl {
        for &(b, wb) in &gl {
            for &(c, wc) in &gl {
                // (a, b, c) in the unit cube -> reference simplex.
                let x = a;
                let y = (1.0 - a) * b;
                let z = (1.0 - a) * (1.0 - b) * c;
                let jac = (1.0 - a) * (1.0 - a) * (1.0 - b);
                let p = v[0] + (v[1] - v[0]) * x + (v[2] - v[0]) * y + (v[3] - v[0]) * z;
                pts.push((p, wa * wb * wc * jac * 6.0 * vol));
            }
        }
    }
    pts
}

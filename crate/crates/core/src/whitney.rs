//! Lowest-order Nédélec (Whitney) edge elements on a single tetrahedron.
//!
//! The basis function of local edge `k = (i, j)` is
//! `N_k = λ_i ∇λ_j − λ_j ∇λ_i`, an affine field of the form `a + b × x`,
//! with constant curl `2 ∇λ_i × ∇λ_j`. Its tangential circulation along edge
//! `k` is 1 and along every other edge 0.

use std::sync::LazyLock;

use nalgebra::{Matrix3, Matrix6, Vector3};

use crate::error::{Error, Result};
use crate::mesh::Point3;
use crate::quadrature::{gauss2_segment, QuadratureRule};

/// Local edges as vertex pairs, `i < j`.
pub const LOCAL_EDGES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

pub type Vec3 = Vector3<f64>;

static RULE: LazyLock<QuadratureRule> = LazyLock::new(QuadratureRule::degree5);

/// Default volume quadrature for nonpolynomial integrands.
pub fn volume_rule() -> &'static QuadratureRule {
    &RULE
}

/// Geometry of a nondegenerate tet: vertices, barycentric gradients, volume.
#[derive(Clone, Debug)]
pub struct TetGeometry {
    pub vertices: [Point3; 4],
    pub grads: [Vec3; 4],
    pub volume: f64,
}

impl TetGeometry {
    pub fn new(vertices: [Point3; 4]) -> Result<Self> {
        let j = Matrix3::from_columns(&[
            vertices[1] - vertices[0],
            vertices[2] - vertices[0],
            vertices[3] - vertices[0],
        ]);
        let det = j.determinant();
        let scale = LOCAL_EDGES
            .iter()
            .map(|&(a, b)| (vertices[a] - vertices[b]).norm())
            .fold(0.0, f64::max);
        if !(det.abs() > 1e-14 * scale.powi(3)) {
            return Err(Error::DegenerateTet { volume: det / 6.0 });
        }
        let inv = j.try_inverse().ok_or(Error::DegenerateTet { volume: det / 6.0 })?;
        let g1 = inv.row(0).transpose();
        let g2 = inv.row(1).transpose();
        let g3 = inv.row(2).transpose();
        let g0 = -(g1 + g2 + g3);
        Ok(TetGeometry {
            vertices,
            grads: [g0, g1, g2, g3],
            volume: det.abs() / 6.0,
        })
    }

    pub fn barycentric(&self, x: &Point3) -> [f64; 4] {
        let d = x - self.vertices[0];
        let l1 = self.grads[1].dot(&d);
        let l2 = self.grads[2].dot(&d);
        let l3 = self.grads[3].dot(&d);
        [1.0 - l1 - l2 - l3, l1, l2, l3]
    }

    pub fn point(&self, bary: &[f64; 4]) -> Point3 {
        self.vertices
            .iter()
            .zip(bary)
            .fold(Point3::zeros(), |acc, (v, &l)| acc + v * l)
    }

    /// `N_k` at barycentric coordinates `bary`.
    pub fn shape_bary(&self, k: usize, bary: &[f64; 4]) -> Vec3 {
        let (i, j) = LOCAL_EDGES[k];
        self.grads[j] * bary[i] - self.grads[i] * bary[j]
    }

    /// `N_k` at a physical point.
    pub fn shape(&self, k: usize, x: &Point3) -> Vec3 {
        self.shape_bary(k, &self.barycentric(x))
    }

    /// All six basis functions at barycentric coordinates `bary`.
    pub fn shapes_bary(&self, bary: &[f64; 4]) -> [Vec3; 6] {
        std::array::from_fn(|k| self.shape_bary(k, bary))
    }

    /// Constant curl of `N_k`: `2 ∇λ_i × ∇λ_j`.
    pub fn curl(&self, k: usize) -> Vec3 {
        let (i, j) = LOCAL_EDGES[k];
        2.0 * self.grads[i].cross(&self.grads[j])
    }

    pub fn curls(&self) -> [Vec3; 6] {
        std::array::from_fn(|k| self.curl(k))
    }

    /// Field `Σ c_k N_k` at barycentric coordinates `bary`.
    pub fn eval(&self, coeffs: &[f64; 6], bary: &[f64; 4]) -> Vec3 {
        (0..6).fold(Vec3::zeros(), |acc, k| acc + self.shape_bary(k, bary) * coeffs[k])
    }

    pub fn eval_curl(&self, coeffs: &[f64; 6]) -> Vec3 {
        (0..6).fold(Vec3::zeros(), |acc, k| acc + self.curl(k) * coeffs[k])
    }

    /// Circulation of `field` along local edge `k`, oriented from the lower
    /// to the higher local vertex, by two-point Gauss–Legendre.
    pub fn edge_circulation(&self, k: usize, field: impl Fn(&Point3) -> Vec3) -> f64 {
        let (i, j) = LOCAL_EDGES[k];
        circulation(&self.vertices[i], &self.vertices[j], field)
    }

    /// `∫ N_k · N_l`, exact for the quadratic integrand.
    pub fn local_mass(&self) -> Matrix6<f64> {
        let mut m = Matrix6::zeros();
        for (bary, w) in volume_rule().iter() {
            let n = self.shapes_bary(bary);
            let wv = w * self.volume;
            for a in 0..6 {
                for b in a..6 {
                    m[(a, b)] += wv * n[a].dot(&n[b]);
                }
            }
        }
        mirror_upper(&mut m);
        m
    }

    /// `β ∫ curl N_k · curl N_l`, exact.
    pub fn local_curlcurl(&self, beta: f64) -> Result<Matrix6<f64>> {
        if !(beta > 0.0) {
            return Err(Error::NonPositiveBeta(beta));
        }
        let c = self.curls();
        let mut m = Matrix6::zeros();
        for a in 0..6 {
            for b in a..6 {
                m[(a, b)] = beta * self.volume * c[a].dot(&c[b]);
            }
        }
        mirror_upper(&mut m);
        Ok(m)
    }

    /// `∫ g · curl N_k`. The curl is constant, so only `∫ g` is integrated.
    pub fn local_load_curltest(&self, g: impl Fn(&Point3) -> Vec3) -> [f64; 6] {
        let integral = volume_rule()
            .iter()
            .fold(Vec3::zeros(), |acc, (bary, w)| acc + g(&self.point(bary)) * (w * self.volume));
        let c = self.curls();
        std::array::from_fn(|k| c[k].dot(&integral))
    }
}

/// Circulation of `field` along the segment `a -> b`.
pub fn circulation(a: &Point3, b: &Point3, field: impl Fn(&Point3) -> Vec3) -> f64 {
    let t = b - a;
    gauss2_segment()
        .iter()
        .map(|&(s, w)| w * field(&(a + t * s)).dot(&t))
        .sum()
}

fn mirror_upper(m: &mut Matrix6<f64>) {
    for a in 0..6 {
        for b in 0..a {
            m[(a, b)] = m[(b, a)];
        }
    }
}

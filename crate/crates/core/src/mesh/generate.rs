//! Nested-shell ball generator.
//!
//! The mesh is built in a reference geometry where every sphere `|x| = r` is
//! replaced by the octahedron `|x|_1 = r`. The macro mesh has one radial layer
//! per region: the core is the cone over the 8 octahedron faces, and each
//! shell is made of 8 triangular prisms cut into 3 tets each. Quad faces of
//! the prisms are always split along the diagonal from the lower-index
//! direction on the inner layer to the higher-index direction on the outer
//! layer, which makes neighbouring prisms conforming.
//!
//! Red refinement is done in the reference geometry, where interface faces
//! stay planar, and every vertex is finally pushed out radially with
//! `x -> x |x|_1 / |x|_2`. Vertices that lie on an interface octahedron get
//! their radius set to the exact interface radius.

use std::collections::HashMap;

use super::{Mesh, Point3, Radii, Region, Tet, SPHERE_TOL};
use crate::error::{Error, Result};

/// Largest accepted `levels` argument (memory guard).
pub const MAX_LEVELS: u32 = 4;

/// Red refinements applied to the macro mesh to obtain level 0.
const BASE_REFINEMENTS: u32 = 1;

const DIRECTIONS: [[f64; 3]; 6] = [
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
];

/// Octahedron faces as direction indices, ascending within each face.
const FACES: [[usize; 3]; 8] = [
    [0, 2, 4],
    [0, 2, 5],
    [0, 3, 4],
    [0, 3, 5],
    [1, 2, 4],
    [1, 2, 5],
    [1, 3, 4],
    [1, 3, 5],
];

struct Builder {
    radii: [f64; 4],
    reference: Vec<Point3>,
    physical: Vec<Point3>,
    sphere: Vec<Option<usize>>,
    tets: Vec<([usize; 4], Region)>,
}

impl Builder {
    fn push_vertex(&mut self, x: Point3) -> usize {
        let l1 = x.abs().sum();
        let sphere = self
            .radii
            .iter()
            .position(|&r| (l1 - r).abs() <= SPHERE_TOL * r);
        let l2 = x.norm();
        let physical = if l2 == 0.0 {
            Point3::zeros()
        } else {
            let s = sphere.map_or(l1, |i| self.radii[i]);
            x * (s / l2)
        };
        self.reference.push(x);
        self.physical.push(physical);
        self.sphere.push(sphere);
        self.reference.len() - 1
    }

    fn macro_mesh(radii: Radii) -> Self {
        let mut b = Builder {
            radii: radii.as_array(),
            reference: Vec::new(),
            physical: Vec::new(),
            sphere: Vec::new(),
            tets: Vec::new(),
        };
        let center = b.push_vertex(Point3::zeros());
        let mut layer = [[0usize; 6]; 4];
        for (i, &r) in radii.as_array().iter().enumerate() {
            for (d, dir) in DIRECTIONS.iter().enumerate() {
                layer[i][d] = b.push_vertex(Point3::from(*dir) * r);
            }
        }
        for f in FACES {
            let [a, bb, c] = f.map(|d| layer[0][d]);
            b.tets.push(([center, a, bb, c], Region::CORE));
        }
        for shell in 1..4 {
            let region = Region::ALL[shell];
            let (inner, outer) = (&layer[shell - 1], &layer[shell]);
            for [a, bb, c] in FACES {
                b.tets.push(([inner[a], inner[bb], inner[c], outer[c]], region));
                b.tets.push(([inner[a], inner[bb], outer[bb], outer[c]], region));
                b.tets.push(([inner[a], outer[a], outer[bb], outer[c]], region));
            }
        }
        b
    }

    fn refine(&mut self) {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let old = std::mem::take(&mut self.tets);
        let mut tets = Vec::with_capacity(old.len() * 8);
        for (v, region) in old {
            let mut mid = |i: usize, j: usize, b: &mut Builder| -> usize {
                let key = (v[i].min(v[j]), v[i].max(v[j]));
                *midpoints.entry(key).or_insert_with(|| {
                    let x = (b.reference[key.0] + b.reference[key.1]) * 0.5;
                    b.push_vertex(x)
                })
            };
            let m01 = mid(0, 1, self);
            let m02 = mid(0, 2, self);
            let m03 = mid(0, 3, self);
            let m12 = mid(1, 2, self);
            let m13 = mid(1, 3, self);
            let m23 = mid(2, 3, self);
            tets.push(([v[0], m01, m02, m03], region));
            tets.push(([m01, v[1], m12, m13], region));
            tets.push(([m02, m12, v[2], m23], region));
            tets.push(([m03, m13, m23, v[3]], region));

            // Inner octahedron: cut along its shortest diagonal.
            let options = [
                ((m01, m23), [m02, m03, m13, m12]),
                ((m02, m13), [m01, m03, m23, m12]),
                ((m03, m12), [m01, m02, m23, m13]),
            ];
            let len = |(a, b): (usize, usize)| (self.physical[a] - self.physical[b]).norm();
            let ((a, b), ring) = options
                .iter()
                .copied()
                .reduce(|best, cand| if len(cand.0) < len(best.0) { cand } else { best })
                .expect("three candidates");
            for k in 0..4 {
                tets.push(([a, b, ring[k], ring[(k + 1) % 4]], region));
            }
        }
        self.tets = tets;
    }
}

/// Tetrahedral mesh of the ball of radius `r4` with interface-conforming
/// shells at `r1`, `r2`, `r3`. Each level multiplies the tet count by 8.
pub fn generate_shell_ball_mesh(radii: [f64; 4], levels: u32) -> Result<Mesh> {
    let radii = Radii::new(radii)?;
    if levels > MAX_LEVELS {
        return Err(Error::TooManyLevels {
            requested: levels,
            max: MAX_LEVELS,
        });
    }
    let mut b = Builder::macro_mesh(radii);
    for _ in 0..levels + BASE_REFINEMENTS {
        b.refine();
    }
    let tets = b
        .tets
        .into_iter()
        .map(|(vertices, region)| Tet { vertices, region })
        .collect();
    Mesh::new(b.physical, tets, radii)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::signed_volume;

    #[test]
    fn level_zero_solar_mesh_is_valid() {
        let mesh = generate_shell_ball_mesh([1.5, 1.875, 2.5, 7.5], 0).unwrap();
        assert_eq!(mesh.num_tets(), 80 * 8);
        let radii = mesh.radii();
        for t in 0..mesh.num_tets() {
            assert!(signed_volume(&mesh.tet_points(t)) > 0.0);
            let region = mesh.classify_region(t);
            let (lo, hi) = radii.band(region);
            for p in mesh.tet_points(t) {
                let r = p.norm();
                assert!(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn interface_vertices_are_snapped() {
        let radii = [0.2, 0.25, 1.0 / 3.0, 1.0];
        let mesh = generate_shell_ball_mesh(radii, 1).unwrap();
        let mut on_sphere = [0usize; 4];
        for v in mesh.vertices() {
            let r = v.norm();
            for (i, &ri) in radii.iter().enumerate() {
                if (r - ri).abs() <= 1e-9 * ri {
                    assert!((r - ri).abs() <= 1e-12 * ri, "{r} vs {ri}");
                    on_sphere[i] += 1;
                }
            }
        }
        // Every interface is triangulated like the outer sphere.
        assert!(on_sphere.iter().all(|&n| n == on_sphere[0] && n > 6));
    }

    #[test]
    fn guards() {
        assert!(matches!(
            generate_shell_ball_mesh([1.0, 1.0, 2.0, 3.0], 0),
            Err(Error::InvalidRadii(_))
        ));
        assert!(matches!(
            generate_shell_ball_mesh([1.0, 2.0, 3.0, 4.0], MAX_LEVELS + 1),
            Err(Error::TooManyLevels { .. })
        ));
    }
}

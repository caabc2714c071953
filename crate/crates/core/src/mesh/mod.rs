//! Tetrahedral meshes of the nested-shell ball.
//!
//! The ball of radius `r4` is split into four regions by the spheres of
//! radius `r1 < r2 < r3`:
//!
//! | tag | region                | band            |
//! |-----|-----------------------|-----------------|
//! | 1   | radiative core        | `r < r1`        |
//! | 2   | tachocline            | `r1 < r < r2`   |
//! | 3   | convection zone       | `r2 < r < r3`   |
//! | 4   | exterior (insulating) | `r3 < r < r4`   |
//!
//! Every interface sphere is a union of mesh faces, so no tet straddles an
//! interface and the tangential trace of an edge-element field is single
//! valued across it.

mod generate;
mod io;

pub use generate::{generate_shell_ball_mesh, MAX_LEVELS};
pub use io::{load_mesh, read_mesh, save_mesh, write_mesh};

use std::fmt;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Point3 = Vector3<f64>;

/// Relative tolerance for on-sphere tests.
pub const SPHERE_TOL: f64 = 1e-9;

/// Radii `r1 < r2 < r3 < r4` of the interface spheres and the outer boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Radii([f64; 4]);

impl Radii {
    pub fn new(r: [f64; 4]) -> Result<Self> {
        let finite = r.iter().all(|v| v.is_finite());
        if !finite || r[0] <= 0.0 || r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRadii(r));
        }
        Ok(Radii(r))
    }

    /// Solar setup: 1.5, 1.875, 2.5, 7.5.
    pub fn solar() -> Self {
        Radii([1.5, 1.875, 2.5, 7.5])
    }

    /// The solar radii scaled down equally so that the outer radius is 1.
    pub fn unit_ball() -> Self {
        let s = Self::solar();
        Radii(s.0.map(|r| r / s.0[3]))
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    /// Radius of interface `i` (1-based, matching the usual `r1..r4` naming).
    pub fn r(&self, i: usize) -> f64 {
        self.0[i - 1]
    }

    pub fn outer(&self) -> f64 {
        self.0[3]
    }

    /// Inner and outer radius of a region.
    pub fn band(&self, region: Region) -> (f64, f64) {
        let k = region.index();
        let lo = if k == 0 { 0.0 } else { self.0[k - 1] };
        (lo, self.0[k])
    }

    /// Region whose open band contains `rho`. Radii exactly on an interface go
    /// to the inner region; anything beyond `r4` is reported as region 4.
    pub fn region_for_radius(&self, rho: f64) -> Region {
        let k = self.0[..3].iter().take_while(|&&r| rho > r).count();
        Region(k as u8 + 1)
    }

    /// Analytic volume of a region's spherical shell.
    pub fn shell_volume(&self, region: Region) -> f64 {
        let (a, b) = self.band(region);
        4.0 * std::f64::consts::PI * (b.powi(3) - a.powi(3)) / 3.0
    }
}

impl Default for Radii {
    fn default() -> Self {
        Self::solar()
    }
}

/// Region tag 1..=4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region(u8);

impl Region {
    pub const CORE: Region = Region(1);
    pub const TACHOCLINE: Region = Region(2);
    pub const CONVECTION: Region = Region(3);
    pub const EXTERIOR: Region = Region(4);
    pub const ALL: [Region; 4] = [Self::CORE, Self::TACHOCLINE, Self::CONVECTION, Self::EXTERIOR];

    pub fn new(tag: i64) -> Option<Self> {
        (1..=4).contains(&tag).then_some(Region(tag as u8))
    }

    pub fn tag(self) -> u8 {
        self.0
    }

    /// Zero-based index for per-region arrays.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tet {
    pub vertices: [usize; 4],
    pub region: Region,
}

/// Tetrahedral mesh with region tags.
///
/// Construction validates the connectivity and reorders each tet so that its
/// signed volume is positive; the mesh is immutable afterwards.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point3>,
    tets: Vec<Tet>,
    radii: Radii,
}

pub(crate) fn signed_volume(p: &[Point3; 4]) -> f64 {
    Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]).determinant() / 6.0
}

impl Mesh {
    pub fn new(vertices: Vec<Point3>, mut tets: Vec<Tet>, radii: Radii) -> Result<Self> {
        let n = vertices.len();
        for (t, tet) in tets.iter_mut().enumerate() {
            let v = tet.vertices;
            if let Some(&index) = v.iter().find(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange {
                    tet: t,
                    index,
                    count: n,
                });
            }
            if (0..4).any(|i| (i + 1..4).any(|j| v[i] == v[j])) {
                return Err(Error::RepeatedVertex { tet: t });
            }
            let p = v.map(|i| vertices[i]);
            let vol = signed_volume(&p);
            let scale = (0..4)
                .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                .map(|(i, j)| (p[i] - p[j]).norm())
                .fold(0.0, f64::max);
            if !(vol.abs() > 1e-14 * scale.powi(3)) {
                return Err(Error::DegenerateTet { volume: vol });
            }
            if vol < 0.0 {
                tet.vertices.swap(2, 3);
            }
            if !band_contains(&radii, tet.region, &p) {
                return Err(Error::RegionBand {
                    tet: t,
                    region: tet.region.tag(),
                });
            }
        }
        Ok(Mesh {
            vertices,
            tets,
            radii,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn tets(&self) -> &[Tet] {
        &self.tets
    }

    pub fn radii(&self) -> Radii {
        self.radii
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn tet_points(&self, t: usize) -> [Point3; 4] {
        self.tets[t].vertices.map(|i| self.vertices[i])
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        signed_volume(&self.tet_points(t))
    }

    pub fn barycenter(&self, t: usize) -> Point3 {
        let p = self.tet_points(t);
        (p[0] + p[1] + p[2] + p[3]) / 4.0
    }

    /// Stored region tag of a tet. Debug builds check it against the radii of
    /// the tet's vertices.
    pub fn classify_region(&self, t: usize) -> Region {
        let tet = &self.tets[t];
        debug_assert!(band_contains(&self.radii, tet.region, &self.tet_points(t)));
        tet.region
    }

    /// Longest edge over all tets.
    pub fn h_max(&self) -> f64 {
        (0..self.tets.len())
            .map(|t| {
                let p = self.tet_points(t);
                crate::whitney::LOCAL_EDGES
                    .iter()
                    .map(|&(i, j)| (p[j] - p[i]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Total tet volume per region.
    pub fn region_volumes(&self) -> [f64; 4] {
        let mut vol = [0.0; 4];
        for (t, tet) in self.tets.iter().enumerate() {
            vol[tet.region.index()] += self.tet_volume(t);
        }
        vol
    }
}

/// Vertex-radius band test: all four vertices lie within the closed band of
/// the region (relative tolerance [`SPHERE_TOL`]).
fn band_contains(radii: &Radii, region: Region, p: &[Point3; 4]) -> bool {
    let (lo, hi) = radii.band(region);
    let tol = SPHERE_TOL * radii.outer();
    p.iter().all(|v| {
        let r = v.norm();
        r >= lo - tol && r <= hi + tol
    })
}

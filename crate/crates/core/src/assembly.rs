//! Global operators of the edge-element scheme.
//!
//! All assembly loops visit tets in mesh order; local contributions may be
//! computed in parallel but are scattered sequentially, so repeated runs
//! produce bit-identical matrices and vectors.

use nalgebra::Matrix6;
use rayon::prelude::*;

use crate::dofmap::EdgeDofMap;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point3, Region};
use crate::model::{mms_source_functional, Physics};
use crate::sparse::CsrMatrix;
use crate::whitney::{circulation, volume_rule, TetGeometry, Vec3};

/// Edge coefficients (tangential circulations) of a discrete field.
pub type FieldCoeffs = Vec<f64>;

/// Mesh, DOF map and cached per-tet geometry.
#[derive(Clone, Debug)]
pub struct Discretization {
    mesh: Mesh,
    dofs: EdgeDofMap,
    elements: Vec<TetGeometry>,
    pattern: CsrMatrix,
}

impl Discretization {
    pub fn new(mesh: Mesh) -> Result<Self> {
        let dofs = EdgeDofMap::new(&mesh)?;
        Self::with_dofs(mesh, dofs)
    }

    pub fn with_dofs(mesh: Mesh, dofs: EdgeDofMap) -> Result<Self> {
        let elements = element_geometry(&mesh)?;
        let pattern = edge_pattern(&mesh, &dofs);
        Ok(Discretization {
            mesh,
            dofs,
            elements,
            pattern,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn dofs(&self) -> &EdgeDofMap {
        &self.dofs
    }

    pub fn element(&self, t: usize) -> &TetGeometry {
        &self.elements[t]
    }

    pub fn num_edges(&self) -> usize {
        self.dofs.num_edges()
    }

    fn region(&self, t: usize) -> Region {
        self.mesh.tets()[t].region
    }

    fn assemble_matrix<F>(&self, local: F) -> CsrMatrix
    where
        F: Fn(usize) -> Option<Matrix6<f64>> + Sync + Send,
    {
        let locals: Vec<Option<Matrix6<f64>>> = (0..self.elements.len()).into_par_iter().map(&local).collect();
        let mut m = self.pattern.clone();
        for (t, lm) in locals.iter().enumerate() {
            let Some(lm) = lm else { continue };
            let ids = self.dofs.tet_edges(t);
            let signs = self.dofs.tet_signs(t);
            for a in 0..6 {
                for b in 0..6 {
                    m.add(ids[a], ids[b], signs[a] * signs[b] * lm[(a, b)]);
                }
            }
        }
        m
    }

    fn scatter_vectors(&self, locals: &[[f64; 6]]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_edges()];
        for (t, lv) in locals.iter().enumerate() {
            let ids = self.dofs.tet_edges(t);
            let signs = self.dofs.tet_signs(t);
            for k in 0..6 {
                out[ids[k]] += signs[k] * lv[k];
            }
        }
        out
    }

    /// `(N_a, N_b)` over the whole mesh.
    pub fn mass(&self) -> CsrMatrix {
        self.mass_over(&Region::ALL)
    }

    /// Mass matrix restricted to the tets of the given regions.
    pub fn mass_over(&self, regions: &[Region]) -> CsrMatrix {
        self.assemble_matrix(|t| regions.contains(&self.region(t)).then(|| self.elements[t].local_mass()))
    }

    /// `(β curl N_a, curl N_b)` with per-region `β`.
    pub fn curlcurl(&self, beta: [f64; 4]) -> Result<CsrMatrix> {
        if let Some(&b) = beta.iter().find(|&&b| !(b > 0.0)) {
            return Err(Error::NonPositiveBeta(b));
        }
        Ok(self.assemble_matrix(|t| {
            let b = beta[self.region(t).index()];
            Some(self.elements[t].local_curlcurl(b).expect("β checked above"))
        }))
    }

    /// Edge-by-vertex incidence: `(G p)_e = p(v_hi) − p(v_lo)`.
    pub fn gradient(&self) -> CsrMatrix {
        discrete_gradient(&self.mesh, &self.dofs)
    }

    /// Signed local coefficients of tet `t`.
    pub fn local_coeffs(&self, t: usize, field: &[f64]) -> [f64; 6] {
        let ids = self.dofs.tet_edges(t);
        let signs = self.dofs.tet_signs(t);
        std::array::from_fn(|k| signs[k] * field[ids[k]])
    }

    /// Field value at barycentric coordinates inside tet `t`.
    pub fn eval(&self, t: usize, field: &[f64], bary: &[f64; 4]) -> Vec3 {
        self.elements[t].eval(&self.local_coeffs(t, field), bary)
    }

    /// Constant curl of the field on tet `t`.
    pub fn eval_curl(&self, t: usize, field: &[f64]) -> Vec3 {
        self.elements[t].eval_curl(&self.local_coeffs(t, field))
    }

    /// Edge interpolant: circulation of `field` along every global edge.
    pub fn interpolate<F>(&self, field: F) -> FieldCoeffs
    where
        F: Fn(&Point3) -> Vec3 + Sync,
    {
        let v = self.mesh.vertices();
        self.dofs
            .edges()
            .par_iter()
            .map(|&[a, b]| circulation(&v[a], &v[b], &field))
            .collect()
    }

    /// Load `Σ_T ∫_T g(x, B(x)) · curl N_k` where `g` may depend on the
    /// region and the discrete field `B` at the quadrature point.
    pub fn curl_load<G>(&self, field: &[f64], g: G) -> Vec<f64>
    where
        G: Fn(Region, &Point3, &Vec3) -> Option<Vec3> + Sync,
    {
        let locals: Vec<[f64; 6]> = (0..self.elements.len())
            .into_par_iter()
            .map(|t| {
                let el = &self.elements[t];
                let region = self.region(t);
                let c = self.local_coeffs(t, field);
                let mut integral = Vec3::zeros();
                for (bary, w) in volume_rule().iter() {
                    let x = el.point(bary);
                    let b = el.eval(&c, bary);
                    match g(region, &x, &b) {
                        Some(v) => integral += v * (w * el.volume),
                        None => return [0.0; 6],
                    }
                }
                let curls = el.curls();
                std::array::from_fn(|k| curls[k].dot(&integral))
            })
            .collect();
        self.scatter_vectors(&locals)
    }

    /// Explicit induction terms at `t_n` evaluated with the previous field.
    pub fn dynamo_rhs(&self, b_prev: &[f64], t: f64, physics: &Physics) -> Vec<f64> {
        self.curl_load(b_prev, |region, x, b| {
            let active = (physics.r_alpha != 0.0 && physics.alpha_active(region))
                || (physics.r_m != 0.0 && physics.velocity_active(region));
            active.then(|| physics.flux(x, t, region, b))
        })
    }

    /// Assembled manufactured-solution source at time `t`.
    pub fn mms_source(&self, t: f64, physics: &Physics, m: f64) -> Vec<f64> {
        let locals: Vec<[f64; 6]> = (0..self.elements.len())
            .into_par_iter()
            .map(|t_id| mms_source_functional(&self.elements[t_id], self.region(t_id), t, physics, m))
            .collect();
        self.scatter_vectors(&locals)
    }
}

fn element_geometry(mesh: &Mesh) -> Result<Vec<TetGeometry>> {
    (0..mesh.num_tets())
        .map(|t| TetGeometry::new(mesh.tet_points(t)))
        .collect()
}

fn edge_pattern(mesh: &Mesh, dofs: &EdgeDofMap) -> CsrMatrix {
    let n = dofs.num_edges();
    let mut rows = vec![Vec::new(); n];
    for t in 0..mesh.num_tets() {
        let ids = dofs.tet_edges(t);
        for &a in ids {
            rows[a].extend_from_slice(ids);
        }
    }
    CsrMatrix::with_pattern(n, n, rows)
}

pub fn assemble_mass(mesh: &Mesh, dofs: &EdgeDofMap) -> Result<CsrMatrix> {
    Ok(Discretization::with_dofs(mesh.clone(), dofs.clone())?.mass())
}

pub fn assemble_curlcurl(mesh: &Mesh, dofs: &EdgeDofMap, beta: [f64; 4]) -> Result<CsrMatrix> {
    Discretization::with_dofs(mesh.clone(), dofs.clone())?.curlcurl(beta)
}

pub fn discrete_gradient(mesh: &Mesh, dofs: &EdgeDofMap) -> CsrMatrix {
    let mut t = Vec::with_capacity(2 * dofs.num_edges());
    for (e, &[lo, hi]) in dofs.edges().iter().enumerate() {
        t.push((e, lo, -1.0));
        t.push((e, hi, 1.0));
    }
    CsrMatrix::from_triplets(dofs.num_edges(), mesh.num_vertices(), &t)
}

pub fn assemble_dynamo_rhs(disc: &Discretization, b_prev: &[f64], t: f64, physics: &Physics) -> Vec<f64> {
    disc.dynamo_rhs(b_prev, t, physics)
}

/// Symmetric elimination of essential (Dirichlet-type) degrees of freedom.
///
/// Boundary rows and columns of `A` are replaced by the identity; the
/// coupling `A[interior, boundary]` is kept to move prescribed values to the
/// right-hand side.
#[derive(Clone, Debug)]
pub struct BoundaryElimination {
    matrix: CsrMatrix,
    coupling: Vec<(usize, usize, f64)>,
    boundary: Vec<bool>,
}

impl BoundaryElimination {
    pub fn new(a: &CsrMatrix, boundary: &[bool]) -> Result<Self> {
        if boundary.len() != a.nrows() || a.nrows() != a.ncols() {
            return Err(Error::Dimension {
                expected: a.nrows(),
                found: boundary.len(),
            });
        }
        let n = a.nrows();
        let mut rows = Vec::with_capacity(n);
        let mut coupling = Vec::new();
        for i in 0..n {
            if boundary[i] {
                rows.push(vec![i]);
                continue;
            }
            let mut cols = Vec::new();
            for (j, v) in a.row(i) {
                if boundary[j] {
                    coupling.push((i, j, v));
                } else {
                    cols.push(j);
                }
            }
            rows.push(cols);
        }
        let mut matrix = CsrMatrix::with_pattern(n, n, rows);
        for i in 0..n {
            if boundary[i] {
                matrix.add(i, i, 1.0);
            } else {
                for (j, v) in a.row(i) {
                    if !boundary[j] {
                        matrix.add(i, j, v);
                    }
                }
            }
        }
        Ok(BoundaryElimination {
            matrix,
            coupling,
            boundary: boundary.to_vec(),
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    /// `rhs − A[:, bdry] g` on interior rows and `g` on boundary rows, where
    /// `g` is read from the boundary entries of the full-length `values`.
    pub fn rhs(&self, rhs: &[f64], values: &[f64]) -> Vec<f64> {
        let mut out = rhs.to_vec();
        for &(i, j, v) in &self.coupling {
            out[i] -= v * values[j];
        }
        for (i, &b) in self.boundary.iter().enumerate() {
            if b {
                out[i] = values[i];
            }
        }
        out
    }

    /// Overwrite boundary entries with their prescribed values.
    pub fn recover(&self, x: &mut [f64], values: &[f64]) {
        for (i, &b) in self.boundary.iter().enumerate() {
            if b {
                x[i] = values[i];
            }
        }
    }
}

/// Eliminated system ready for an SPD solver.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    boundary: Vec<bool>,
    values: Vec<f64>,
}

impl ReducedSystem {
    /// Full-length coefficients with boundary entries set exactly.
    pub fn recover(&self, mut x: Vec<f64>) -> FieldCoeffs {
        for (i, &b) in self.boundary.iter().enumerate() {
            if b {
                x[i] = self.values[i];
            }
        }
        x
    }
}

/// Impose prescribed values on the boundary edges of `dofs`. `values` holds
/// one entry per boundary edge, in increasing edge order.
pub fn apply_essential_bc(
    matrix: &CsrMatrix,
    rhs: &[f64],
    dofs: &EdgeDofMap,
    values: &[f64],
) -> Result<ReducedSystem> {
    let boundary = dofs.boundary_edges();
    let expected = dofs.num_boundary_edges();
    if values.len() != expected {
        return Err(Error::MissingBoundaryValues {
            expected,
            found: values.len(),
        });
    }
    let mut full = vec![0.0; boundary.len()];
    let mut it = values.iter();
    for (i, &b) in boundary.iter().enumerate() {
        if b {
            full[i] = *it.next().expect("count checked");
        }
    }
    let elim = BoundaryElimination::new(matrix, boundary)?;
    let rhs = elim.rhs(rhs, &full);
    Ok(ReducedSystem {
        matrix: elim.matrix,
        rhs,
        boundary: boundary.to_vec(),
        values: full,
    })
}

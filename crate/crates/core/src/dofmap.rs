//! Global edge numbering: one degree of freedom (tangential circulation) per
//! mesh edge, oriented from the lower to the higher global vertex index.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, SPHERE_TOL};
use crate::whitney::LOCAL_EDGES;

#[derive(Clone, Debug)]
pub struct EdgeDofMap {
    edges: Vec<[usize; 2]>,
    tet_edges: Vec<[usize; 6]>,
    tet_signs: Vec<[f64; 6]>,
    boundary_edge: Vec<bool>,
    boundary_vertex: Vec<bool>,
    num_boundary_faces: usize,
    num_faces: usize,
}

impl EdgeDofMap {
    pub fn new(mesh: &Mesh) -> Result<Self> {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut tet_edges = Vec::with_capacity(mesh.num_tets());
        let mut tet_signs = Vec::with_capacity(mesh.num_tets());
        let mut faces: HashMap<[usize; 3], usize> = HashMap::new();

        for tet in mesh.tets() {
            let v = tet.vertices;
            let mut ids = [0usize; 6];
            let mut signs = [0.0; 6];
            for (k, &(i, j)) in LOCAL_EDGES.iter().enumerate() {
                let (a, b) = (v[i], v[j]);
                let key = (a.min(b), a.max(b));
                ids[k] = *index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edges.len() - 1
                });
                signs[k] = if a < b { 1.0 } else { -1.0 };
            }
            tet_edges.push(ids);
            tet_signs.push(signs);
            for skip in 0..4 {
                let mut f = [0usize; 3];
                let mut n = 0;
                for (i, &vi) in v.iter().enumerate() {
                    if i != skip {
                        f[n] = vi;
                        n += 1;
                    }
                }
                f.sort_unstable();
                *faces.entry(f).or_insert(0) += 1;
            }
        }

        let r_outer = mesh.radii().outer();
        let on_outer = |p: usize| mesh.vertices()[p].norm() >= r_outer * (1.0 - SPHERE_TOL);
        let mut boundary_edge = vec![false; edges.len()];
        let mut boundary_vertex = vec![false; mesh.num_vertices()];
        let mut num_boundary_faces = 0;
        // Sorted for a deterministic error report.
        let mut face_list: Vec<_> = faces.iter().collect();
        face_list.sort_unstable();
        for (&face, &count) in face_list {
            if count > 2 {
                return Err(Error::NonManifold { face, count });
            }
            if count == 1 && face.iter().all(|&p| on_outer(p)) {
                num_boundary_faces += 1;
                for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                    boundary_edge[index[&(face[i], face[j])]] = true;
                }
                for p in face {
                    boundary_vertex[p] = true;
                }
            }
        }

        Ok(EdgeDofMap {
            edges,
            tet_edges,
            tet_signs,
            boundary_edge,
            boundary_vertex,
            num_boundary_faces,
            num_faces: faces.len(),
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints `(v_lo, v_hi)` of every global edge.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    /// Global edge ids of a tet's local edges, in [`LOCAL_EDGES`] order.
    pub fn tet_edges(&self, t: usize) -> &[usize; 6] {
        &self.tet_edges[t]
    }

    /// `+1` where the local edge orientation matches the global one.
    pub fn tet_signs(&self, t: usize) -> &[f64; 6] {
        &self.tet_signs[t]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn boundary_edges(&self) -> &[bool] {
        &self.boundary_edge
    }

    pub fn num_boundary_edges(&self) -> usize {
        self.boundary_edge.iter().filter(|&&b| b).count()
    }

    /// Vertices lying on a boundary face.
    pub fn boundary_vertices(&self) -> &[bool] {
        &self.boundary_vertex
    }

    pub fn num_boundary_faces(&self) -> usize {
        self.num_boundary_faces
    }

    pub fn num_faces(&self) -> usize {
        self.num_faces
    }
}

pub fn build_edge_dof_map(mesh: &Mesh) -> Result<EdgeDofMap> {
    EdgeDofMap::new(mesh)
}

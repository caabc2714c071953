//! Legacy ASCII VTK export of cell-wise fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::assembly::Discretization;
use crate::error::{Error, Result};
use crate::model::azimuthal_component;

/// Tetrahedra with `B` and its azimuthal component at barycenters, plus the
/// region tag, as `UNSTRUCTURED_GRID` cell data.
pub fn write_vtk<W: Write>(disc: &Discretization, field: &[f64], title: &str, mut w: W) -> std::io::Result<()> {
    let mesh = disc.mesh();
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(w, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z)?;
    }
    let n = mesh.num_tets();
    writeln!(w, "CELLS {n} {}", 5 * n)?;
    for t in mesh.tets() {
        let [a, b, c, d] = t.vertices;
        writeln!(w, "4 {a} {b} {c} {d}")?;
    }
    writeln!(w, "CELL_TYPES {n}")?;
    for _ in 0..n {
        writeln!(w, "10")?;
    }

    let centre = [0.25; 4];
    let values: Vec<_> = (0..n).map(|t| disc.eval(t, field, &centre)).collect();
    writeln!(w, "CELL_DATA {n}")?;
    writeln!(w, "VECTORS B double")?;
    for b in &values {
        writeln!(w, "{:.17e} {:.17e} {:.17e}", b.x, b.y, b.z)?;
    }
    writeln!(w, "SCALARS B_phi double 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for (t, b) in values.iter().enumerate() {
        writeln!(w, "{:.17e}", azimuthal_component(&mesh.barycenter(t), b))?;
    }
    writeln!(w, "SCALARS region int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for t in mesh.tets() {
        writeln!(w, "{}", t.region)?;
    }
    w.flush()
}

pub fn save_vtk(disc: &Discretization, field: &[f64], title: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_vtk(disc, field, title, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

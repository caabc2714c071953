//! Python bindings for the shell-ball dynamo simulator.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use shelldyn::dynamo::{self, RunState, SnapshotPolicy};
use shelldyn::mesh::{generate_shell_ball_mesh, load_mesh, save_mesh};
use shelldyn::model;
use shelldyn::solver::SolverSettings;
use shelldyn::study::{run_study, StudyConfig, Sweep};
use shelldyn::{Discretization, Physics, Point3, Radii};

fn to_py(e: shelldyn::Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn point(x: [f64; 3]) -> Point3 {
    Point3::new(x[0], x[1], x[2])
}

fn triple(v: shelldyn::whitney::Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

/// Tetrahedral mesh of the nested-shell ball with its edge numbering.
#[pyclass(name = "Mesh", module = "shelldyn_py", frozen)]
struct PyMesh {
    disc: Discretization,
}

#[pymethods]
impl PyMesh {
    /// Generate the shell-ball mesh for `radii = (r1, r2, r3, r4)`.
    #[staticmethod]
    fn generate(radii: [f64; 4], levels: u32) -> PyResult<Self> {
        let mesh = generate_shell_ball_mesh(radii, levels).map_err(to_py)?;
        Ok(PyMesh {
            disc: Discretization::new(mesh).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let mesh = load_mesh(path).map_err(to_py)?;
        Ok(PyMesh {
            disc: Discretization::new(mesh).map_err(to_py)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        save_mesh(self.disc.mesh(), path).map_err(to_py)
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.disc.mesh().num_vertices()
    }

    #[getter]
    fn num_tets(&self) -> usize {
        self.disc.mesh().num_tets()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.disc.num_edges()
    }

    #[getter]
    fn num_boundary_edges(&self) -> usize {
        self.disc.dofs().num_boundary_edges()
    }

    #[getter]
    fn h_max(&self) -> f64 {
        self.disc.mesh().h_max()
    }

    #[getter]
    fn radii(&self) -> [f64; 4] {
        self.disc.mesh().radii().as_array()
    }

    fn region_volumes(&self) -> [f64; 4] {
        self.disc.mesh().region_volumes()
    }

    fn vertices(&self) -> Vec<[f64; 3]> {
        self.disc.mesh().vertices().iter().map(|v| [v.x, v.y, v.z]).collect()
    }

    /// `(v0, v1, v2, v3, region)` per tet.
    fn tets(&self) -> Vec<([usize; 4], u8)> {
        self.disc.mesh().tets().iter().map(|t| (t.vertices, t.region.tag())).collect()
    }

    fn edges(&self) -> Vec<[usize; 2]> {
        self.disc.dofs().edges().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(vertices={}, tets={}, edges={})",
            self.num_vertices(),
            self.num_tets(),
            self.num_edges()
        )
    }
}

/// A time-stepping run in dynamo or manufactured-solution mode.
#[pyclass(name = "Simulation", module = "shelldyn_py")]
struct PySimulation {
    sim: dynamo::Simulation,
    state: RunState,
}

impl PySimulation {
    fn build(mesh: &PyMesh, physics: Physics, mode: dynamo::Mode, tau: f64, tol: f64) -> PyResult<Self> {
        let solver = SolverSettings { tol, max_iter: None };
        let sim = dynamo::Simulation::new(mesh.disc.clone(), physics, mode, tau, solver).map_err(to_py)?;
        let state = sim.initial_state(sim.project_initial()).map_err(to_py)?;
        Ok(PySimulation { sim, state })
    }
}

#[pymethods]
impl PySimulation {
    /// Solar interface dynamo on `mesh`, whose radii define the shells.
    #[staticmethod]
    #[pyo3(signature = (mesh, r_m, tau, r_alpha=30.0, beta=[1.0, 1.0, 1.0, 150.0], sigma=1.0, tol=1e-10))]
    fn dynamo(mesh: &PyMesh, r_m: f64, tau: f64, r_alpha: f64, beta: [f64; 4], sigma: f64, tol: f64) -> PyResult<Self> {
        let mut physics = Physics::solar(mesh.disc.mesh().radii(), r_m);
        physics.r_alpha = r_alpha;
        physics.beta = beta;
        physics.sigma = sigma;
        Self::build(mesh, physics, dynamo::Mode::Dynamo, tau, tol)
    }

    /// Manufactured-solution run with decay constant `m`.
    #[staticmethod]
    #[pyo3(signature = (mesh, m, tau, tol=1e-10))]
    fn manufactured(mesh: &PyMesh, m: f64, tau: f64, tol: f64) -> PyResult<Self> {
        Self::build(mesh, Physics::manufactured(), dynamo::Mode::Manufactured { m }, tau, tol)
    }

    /// Advance `n` steps of the configured size.
    #[pyo3(signature = (n=1))]
    fn step(&mut self, n: usize) -> PyResult<()> {
        for _ in 0..n {
            self.state = self.sim.step(&self.state).map_err(to_py)?;
        }
        Ok(())
    }

    /// Run to `t_end` from the initial field; returns `(step, t, E_M)` rows
    /// and leaves the simulation at the final state.
    fn evolve(&mut self, t_end: f64) -> PyResult<Vec<(usize, f64, f64)>> {
        let init = self.sim.project_initial();
        let out = dynamo::evolve(&self.sim, init, t_end, &SnapshotPolicy::None, |_, _, _| Ok(())).map_err(to_py)?;
        self.state = out.final_state;
        Ok(out.energies.iter().map(|s| (s.step, s.time, s.energy)).collect())
    }

    #[getter]
    fn time(&self) -> f64 {
        self.state.time
    }

    #[getter]
    fn step_index(&self) -> usize {
        self.state.step
    }

    #[getter]
    fn field(&self) -> Vec<f64> {
        self.state.field.clone()
    }

    fn magnetic_energy(&self) -> f64 {
        self.sim.magnetic_energy(&self.state.field)
    }

    /// `Gᵀ M B` at interior vertices (zero at boundary vertices).
    fn divergence_moments(&self) -> Vec<f64> {
        self.sim.divergence_moments(&self.state.field)
    }

    fn divergence_residual(&self) -> f64 {
        self.sim.divergence_residual(&self.state.field)
    }

    /// `(‖B_h − B_T‖, ‖∇×(B_h − B_T)‖)` at the current time.
    fn mms_errors(&self) -> PyResult<(f64, f64)> {
        match self.sim.mode() {
            dynamo::Mode::Manufactured { m } => Ok(self.sim.mms_errors(&self.state.field, self.state.time, m)),
            dynamo::Mode::Dynamo => Err(PyValueError::new_err("mms_errors needs a manufactured-solution run")),
        }
    }

    /// Discrete field at the barycenter of every tet.
    fn cell_values(&self) -> Vec<[f64; 3]> {
        let disc = self.sim.discretization();
        (0..disc.mesh().num_tets())
            .map(|t| triple(disc.eval(t, &self.state.field, &[0.25; 4])))
            .collect()
    }
}

#[pyfunction]
fn mms_field(x: [f64; 3], t: f64, m: f64) -> [f64; 3] {
    triple(model::mms_field(&point(x), t, m))
}

#[pyfunction]
fn mms_curl(x: [f64; 3], t: f64, m: f64) -> [f64; 3] {
    triple(model::mms_curl(&point(x), t, m))
}

#[pyfunction]
#[pyo3(signature = (x, radii=[1.5, 1.875, 2.5, 7.5]))]
fn initial_field(x: [f64; 3], radii: [f64; 4]) -> PyResult<[f64; 3]> {
    let radii = Radii::new(radii).map_err(to_py)?;
    Ok(triple(model::initial_field(&point(x), &radii)))
}

#[pyfunction]
#[pyo3(signature = (r, theta, phi, radii=[1.5, 1.875, 2.5, 7.5]))]
fn alpha_profile(r: f64, theta: f64, phi: f64, radii: [f64; 4]) -> PyResult<f64> {
    let radii = Radii::new(radii).map_err(to_py)?;
    Ok(model::alpha_profile(r, theta, phi, &radii))
}

#[pyfunction]
#[pyo3(signature = (r, theta, phi, radii=[1.5, 1.875, 2.5, 7.5]))]
fn shear_velocity(r: f64, theta: f64, phi: f64, radii: [f64; 4]) -> PyResult<[f64; 3]> {
    let radii = Radii::new(radii).map_err(to_py)?;
    Ok(triple(model::shear_velocity(r, theta, phi, &radii)))
}

/// Convergence sweep: `mode` is "spatial" (levels 0..=finest) or
/// "temporal" (finest level only). Returns one dict per run.
#[pyfunction]
#[pyo3(signature = (mode, finest=2, t_end=1.0))]
fn convergence<'py>(py: Python<'py>, mode: &str, finest: u32, t_end: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let sweep = match mode {
        "spatial" => Sweep::Spatial,
        "temporal" => Sweep::Temporal,
        other => return Err(PyValueError::new_err(format!("unknown sweep `{other}`"))),
    };
    let mut cfg = StudyConfig::for_sweep(sweep, &(0..=finest).collect::<Vec<_>>());
    cfg.t_end = t_end;
    let rows = py.detach(|| run_study(&cfg)).map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("level", r.level)?;
            d.set_item("h_max", r.h_max)?;
            d.set_item("tau", r.tau)?;
            d.set_item("err_b", r.err_b)?;
            d.set_item("rate_b", r.rate_b)?;
            d.set_item("err_curl", r.err_curl)?;
            d.set_item("rate_curl", r.rate_curl)?;
            d.set_item("failure", r.failure.clone())?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn shelldyn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(mms_field, m)?)?;
    m.add_function(wrap_pyfunction!(mms_curl, m)?)?;
    m.add_function(wrap_pyfunction!(initial_field, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_profile, m)?)?;
    m.add_function(wrap_pyfunction!(shear_velocity, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add("MAX_LEVELS", shelldyn::mesh::MAX_LEVELS)?;
    Ok(())
}

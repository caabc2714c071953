//! Time stepping of the fully discrete scheme and its diagnostics.
//!
//! Each step solves
//!
//! ```text
//! (M + τK) Bⁿ = M Bⁿ⁻¹ + τ [ F(Bⁿ⁻¹, tₙ) + S(tₙ) ]
//! ```
//!
//! where `F` collects the α-quenching and shear terms tested against the
//! curl of the basis, and `S` is the manufactured-solution source (zero in
//! dynamo mode). Boundary edges carry the prescribed tangential trace: zero
//! for the quasi-vacuum condition, the exact circulations of `B_T` in
//! manufactured mode.
//!
//! Since `F` and `K` only see the curl of the test functions, the discrete
//! divergence moments `Gᵀ M Bⁿ` at interior vertices are conserved from step
//! to step. An inexact Krylov solve breaks this at the level of its residual,
//! so every solve is followed by a gradient correction `Bⁿ += G φ` with
//! `(Gᵀ M G) φ = Gᵀ r`, which leaves the curl untouched and removes the
//! residual's gradient component.

use crate::assembly::{BoundaryElimination, Discretization, FieldCoeffs};
use crate::error::{Error, Result};
use crate::mesh::Region;
use crate::model::{initial_field, mms_curl, mms_field, Physics, Profile};
use crate::solver::{solve, SolverReport, SolverSettings};
use crate::sparse::{dot, norm_inf, CsrMatrix};
use crate::whitney::{circulation, volume_rule};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    /// Homogeneous boundary trace, no source.
    Dynamo,
    /// Manufactured solution with decay constant `m`.
    Manufactured { m: f64 },
}

/// Running sums mirroring the discrete energy estimates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulators {
    /// `max_n ‖Bⁿ‖²_M`, including `n = 0`.
    pub max_mass_energy: f64,
    /// `τ Σ ‖∇×Bⁿ‖²_β`.
    pub curl_sum: f64,
    /// `τ Σ ‖∂_τ Bⁿ‖²`.
    pub rate_sum: f64,
}

#[derive(Clone, Debug)]
pub struct RunState {
    pub step: usize,
    pub time: f64,
    pub field: FieldCoeffs,
    pub acc: Accumulators,
    pub last_solve: Option<SolverReport>,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    disc: Discretization,
    physics: Physics,
    mode: Mode,
    tau: f64,
    solver: SolverSettings,
    mass: CsrMatrix,
    curlcurl: CsrMatrix,
    energy_mass: CsrMatrix,
    gradient: CsrMatrix,
    interior_vertex: Vec<bool>,
    /// `G` restricted to interior-vertex columns and `Gᵀ M G` on them.
    interior_gradient: CsrMatrix,
    vertex_laplacian: CsrMatrix,
    system: BoundaryElimination,
}

impl Simulation {
    pub fn new(disc: Discretization, physics: Physics, mode: Mode, tau: f64, solver: SolverSettings) -> Result<Self> {
        physics.validate()?;
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidValue {
                key: "tau".into(),
                message: format!("time step must be positive, got {tau}"),
            });
        }
        if let Mode::Manufactured { m } = mode {
            if !(m > 0.0) {
                return Err(Error::InvalidValue {
                    key: "m".into(),
                    message: format!("must be positive, got {m}"),
                });
            }
        }
        let mass = disc.mass();
        let curlcurl = disc.curlcurl(physics.beta)?;
        let energy_mass = disc.mass_over(&[Region::TACHOCLINE, Region::CONVECTION]);
        let gradient = disc.gradient();
        let interior_vertex: Vec<bool> = disc.dofs().boundary_vertices().iter().map(|&b| !b).collect();
        let interior_gradient = gradient.select_columns(&interior_vertex);
        let vertex_laplacian = interior_gradient.transpose().matmul(&mass.matmul(&interior_gradient));
        let system = BoundaryElimination::new(&mass.add_scaled(tau, &curlcurl)?, disc.dofs().boundary_edges())?;
        Ok(Simulation {
            disc,
            physics,
            mode,
            tau,
            solver,
            mass,
            curlcurl,
            energy_mass,
            gradient,
            interior_vertex,
            interior_gradient,
            vertex_laplacian,
            system,
        })
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn physics(&self) -> &Physics {
        &self.physics
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn mass(&self) -> &CsrMatrix {
        &self.mass
    }

    pub fn curlcurl(&self) -> &CsrMatrix {
        &self.curlcurl
    }

    pub fn gradient(&self) -> &CsrMatrix {
        &self.gradient
    }

    pub fn interior_vertices(&self) -> &[bool] {
        &self.interior_vertex
    }

    /// Edge interpolant of the initial condition of the current mode.
    pub fn project_initial(&self) -> FieldCoeffs {
        match self.mode {
            Mode::Dynamo => {
                let radii = match self.physics.profile {
                    Profile::Solar(r) => r,
                    Profile::Manufactured => self.disc.mesh().radii(),
                };
                self.disc.interpolate(|x| initial_field(x, &radii))
            }
            Mode::Manufactured { m } => self.disc.interpolate(|x| mms_field(x, 0.0, m)),
        }
    }

    pub fn initial_state(&self, field: FieldCoeffs) -> Result<RunState> {
        if field.len() != self.disc.num_edges() {
            return Err(Error::Dimension {
                expected: self.disc.num_edges(),
                found: field.len(),
            });
        }
        let acc = Accumulators {
            max_mass_energy: self.mass_norm2(&field),
            ..Default::default()
        };
        Ok(RunState {
            step: 0,
            time: 0.0,
            field,
            acc,
            last_solve: None,
        })
    }

    /// Prescribed boundary circulations at time `t` (full length; interior
    /// entries are zero).
    pub fn boundary_values(&self, t: f64) -> Vec<f64> {
        let dofs = self.disc.dofs();
        let mut values = vec![0.0; dofs.num_edges()];
        if let Mode::Manufactured { m } = self.mode {
            let v = self.disc.mesh().vertices();
            for (e, &[a, b]) in dofs.edges().iter().enumerate() {
                if dofs.is_boundary_edge(e) {
                    values[e] = circulation(&v[a], &v[b], |x| mms_field(x, t, m));
                }
            }
        }
        values
    }

    /// Right-hand side `M Bⁿ⁻¹ + dt [F(Bⁿ⁻¹, t) + S(t)]` before elimination.
    pub fn step_rhs(&self, prev: &[f64], t: f64, dt: f64) -> Vec<f64> {
        let mut rhs = self.mass.mul_vec(prev);
        let forcing = self.disc.dynamo_rhs(prev, t, &self.physics);
        for (r, f) in rhs.iter_mut().zip(&forcing) {
            *r += dt * f;
        }
        if let Mode::Manufactured { m } = self.mode {
            let source = self.disc.mms_source(t, &self.physics, m);
            for (r, s) in rhs.iter_mut().zip(&source) {
                *r += dt * s;
            }
        }
        rhs
    }

    /// Advance by the configured time step.
    pub fn step(&self, state: &RunState) -> Result<RunState> {
        self.step_by(state, self.tau)
    }

    /// Advance by `dt`; a `dt` different from the configured step assembles
    /// a one-off system matrix.
    pub fn step_by(&self, state: &RunState, dt: f64) -> Result<RunState> {
        let t = state.time + dt;
        let owned;
        let system = if dt == self.tau {
            &self.system
        } else {
            owned = BoundaryElimination::new(
                &self.mass.add_scaled(dt, &self.curlcurl)?,
                self.disc.dofs().boundary_edges(),
            )?;
            &owned
        };
        let values = self.boundary_values(t);
        let rhs = system.rhs(&self.step_rhs(&state.field, t, dt), &values);
        let mut x0 = state.field.clone();
        system.recover(&mut x0, &values);
        let (mut field, report) = solve(system.matrix(), &rhs, &x0, &self.solver)?;
        system.recover(&mut field, &values);
        self.gradient_correction(system.matrix(), &rhs, &mut field)?;

        let diff: Vec<f64> = field.iter().zip(&state.field).map(|(a, b)| (a - b) / dt).collect();
        let mut acc = state.acc;
        acc.max_mass_energy = acc.max_mass_energy.max(self.mass_norm2(&field));
        acc.curl_sum += dt * self.curl_norm2(&field);
        acc.rate_sum += dt * self.mass_norm2(&diff);
        Ok(RunState {
            step: state.step + 1,
            time: t,
            field,
            acc,
            last_solve: Some(report),
        })
    }

    fn gradient_correction(&self, a: &CsrMatrix, rhs: &[f64], x: &mut [f64]) -> Result<()> {
        if self.vertex_laplacian.nrows() == 0 {
            return Ok(());
        }
        let mut r = a.mul_vec(x);
        r.iter_mut().zip(rhs).for_each(|(ri, bi)| *ri = bi - *ri);
        let d = self.interior_gradient.transpose_mul_vec(&r);
        if norm_inf(&d) == 0.0 {
            return Ok(());
        }
        let phi0 = vec![0.0; d.len()];
        let (phi, _) = solve(&self.vertex_laplacian, &d, &phi0, &self.solver)?;
        let g = self.interior_gradient.mul_vec(&phi);
        x.iter_mut().zip(&g).for_each(|(xi, gi)| *xi += gi);
        Ok(())
    }

    /// `‖B‖²` in L².
    pub fn mass_norm2(&self, field: &[f64]) -> f64 {
        dot(field, &self.mass.mul_vec(field))
    }

    /// `‖∇×B‖²_β`.
    pub fn curl_norm2(&self, field: &[f64]) -> f64 {
        dot(field, &self.curlcurl.mul_vec(field))
    }

    /// `E_M = ∫ |B|²` over the tachocline and the convection zone.
    pub fn magnetic_energy(&self, field: &[f64]) -> f64 {
        dot(field, &self.energy_mass.mul_vec(field))
    }

    /// `(Gᵀ M B)_v` at interior vertices, zero at boundary vertices.
    pub fn divergence_moments(&self, field: &[f64]) -> Vec<f64> {
        let mb = self.mass.mul_vec(field);
        let mut d = self.gradient.transpose_mul_vec(&mb);
        for (v, &interior) in d.iter_mut().zip(&self.interior_vertex) {
            if !interior {
                *v = 0.0;
            }
        }
        d
    }

    /// `max_v |(Gᵀ M B)_v| / ‖M B‖_∞` over interior vertices (0 for `B = 0`).
    pub fn divergence_residual(&self, field: &[f64]) -> f64 {
        let scale = norm_inf(&self.mass.mul_vec(field));
        if scale == 0.0 {
            return 0.0;
        }
        norm_inf(&self.divergence_moments(field)) / scale
    }

    /// `(‖B_h − B_T‖, ‖∇×(B_h − B_T)‖)` at time `t`.
    pub fn mms_errors(&self, field: &[f64], t: f64, m: f64) -> (f64, f64) {
        mms_errors(&self.disc, field, t, m)
    }
}

/// L² errors of a discrete field and of its curl against the manufactured
/// solution, by element quadrature.
pub fn mms_errors(disc: &Discretization, field: &[f64], t: f64, m: f64) -> (f64, f64) {
    let mut e_b = 0.0;
    let mut e_c = 0.0;
    for tet in 0..disc.mesh().num_tets() {
        let el = disc.element(tet);
        let c = disc.local_coeffs(tet, field);
        let curl_h = el.eval_curl(&c);
        for (bary, w) in volume_rule().iter() {
            let x = el.point(bary);
            let wv = w * el.volume;
            e_b += wv * (el.eval(&c, bary) - mms_field(&x, t, m)).norm_squared();
            e_c += wv * (curl_h - mms_curl(&x, t, m)).norm_squared();
        }
    }
    (e_b.sqrt(), e_c.sqrt())
}

/// Which steps get their field handed to the snapshot callback.
#[derive(Clone, Debug, PartialEq)]
pub enum SnapshotPolicy {
    None,
    /// Steps closest to each requested time.
    Times(Vec<f64>),
    /// Every `k`-th step, starting at step 0.
    Every(usize),
}

impl SnapshotPolicy {
    /// Default capture moments 0.0, 1.0, 1.3, 1.6, 1.9, 2.2.
    pub fn default_times() -> Self {
        SnapshotPolicy::Times(vec![0.0, 1.0, 1.3, 1.6, 1.9, 2.2])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityReport {
    /// `‖B⁰‖² + ‖∇×B⁰‖²_β`.
    pub initial_norm: f64,
    pub max_mass_energy: f64,
    pub curl_sum: f64,
    pub rate_sum: f64,
    /// `(max ‖Bⁿ‖² + τΣ‖∇×Bⁿ‖²_β) / initial_norm`.
    pub constant: f64,
    /// Largest `E_M(tₙ) / E_M(0)`.
    pub max_energy_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct EvolveOutput {
    pub energies: Vec<EnergySample>,
    pub snapshot_steps: Vec<(usize, f64)>,
    pub stability: StabilityReport,
    pub final_state: RunState,
    pub max_divergence_drift: f64,
}

/// Step times `t_1..t_K` for a horizon `t_end`: uniform steps of `tau`,
/// the last one shortened to land exactly on `t_end`.
pub fn step_schedule(tau: f64, t_end: f64) -> Vec<f64> {
    let ratio = t_end / tau;
    let k = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
        ratio.round() as usize
    } else {
        ratio.ceil() as usize
    };
    (1..=k).map(|n| if n == k { t_end } else { n as f64 * tau }).collect()
}

fn snapshot_steps(policy: &SnapshotPolicy, times: &[f64]) -> Vec<usize> {
    let n_steps = times.len();
    let mut steps: Vec<usize> = match policy {
        SnapshotPolicy::None | SnapshotPolicy::Every(0) => Vec::new(),
        SnapshotPolicy::Every(k) => (0..=n_steps).step_by(*k).collect(),
        SnapshotPolicy::Times(ts) => ts
            .iter()
            .map(|&ts| {
                let all = std::iter::once(0.0).chain(times.iter().copied());
                all.enumerate()
                    .min_by(|a, b| (a.1 - ts).abs().total_cmp(&(b.1 - ts).abs()))
                    .map(|(n, _)| n)
                    .unwrap_or(0)
            })
            .collect(),
    };
    steps.sort_unstable();
    steps.dedup();
    steps
}

/// Run from `initial` to `t_end`, recording `E_M` every step and passing
/// snapshot fields to `on_snapshot(step, t, field)`.
pub fn evolve<F>(
    sim: &Simulation,
    initial: FieldCoeffs,
    t_end: f64,
    policy: &SnapshotPolicy,
    mut on_snapshot: F,
) -> Result<EvolveOutput>
where
    F: FnMut(usize, f64, &[f64]) -> Result<()>,
{
    let times = step_schedule(sim.tau(), t_end);
    let snaps = snapshot_steps(policy, &times);
    let mut state = sim.initial_state(initial)?;
    let e0 = sim.magnetic_energy(&state.field);
    let initial_norm = sim.mass_norm2(&state.field) + sim.curl_norm2(&state.field);
    let d0 = sim.divergence_moments(&state.field);
    let scale0 = norm_inf(&sim.mass().mul_vec(&state.field));

    let mut energies = vec![EnergySample {
        step: 0,
        time: 0.0,
        energy: e0,
    }];
    let mut snapshot_steps = Vec::new();
    let mut max_ratio: f64 = 1.0;
    let mut max_drift: f64 = 0.0;
    if snaps.first() == Some(&0) {
        on_snapshot(0, 0.0, &state.field)?;
        snapshot_steps.push((0, 0.0));
    }

    let mut t_prev = 0.0;
    for &t in &times {
        state = sim.step_by(&state, t - t_prev)?;
        state.time = t;
        t_prev = t;
        let e = sim.magnetic_energy(&state.field);
        if !e.is_finite() {
            return Err(Error::NonFiniteEnergy {
                step: state.step,
                time: t,
            });
        }
        if e0 > 0.0 {
            max_ratio = max_ratio.max(e / e0);
        }
        let d = sim.divergence_moments(&state.field);
        let scale = scale0.max(norm_inf(&sim.mass().mul_vec(&state.field)));
        if scale > 0.0 {
            let drift = d.iter().zip(&d0).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            max_drift = max_drift.max(drift / scale);
        }
        energies.push(EnergySample {
            step: state.step,
            time: t,
            energy: e,
        });
        if snaps.binary_search(&state.step).is_ok() {
            on_snapshot(state.step, t, &state.field)?;
            snapshot_steps.push((state.step, t));
        }
    }

    let acc = state.acc;
    let constant = if initial_norm > 0.0 {
        (acc.max_mass_energy + acc.curl_sum) / initial_norm
    } else {
        0.0
    };
    Ok(EvolveOutput {
        energies,
        snapshot_steps,
        stability: StabilityReport {
            initial_norm,
            max_mass_energy: acc.max_mass_energy,
            curl_sum: acc.curl_sum,
            rate_sum: acc.rate_sum,
            constant,
            max_energy_ratio: max_ratio,
        },
        final_state: state,
        max_divergence_drift: max_drift,
    })
}

/// Energy series as CSV with header `step,t,E_M` and 17 significant digits.
pub fn write_energy_csv<W: std::io::Write>(samples: &[EnergySample], mut w: W) -> std::io::Result<()> {
    writeln!(w, "step,t,E_M")?;
    for s in samples {
        writeln!(w, "{},{:.16e},{:.16e}", s.step, s.time, s.energy)?;
    }
    w.flush()
}

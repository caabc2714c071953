//! Manufactured-solution convergence sweeps in space and time.

use std::fmt::Write as _;
use std::time::Instant;

use crate::assembly::Discretization;
use crate::dynamo::{evolve, Mode, Simulation, SnapshotPolicy};
use crate::error::Result;
use crate::mesh::{generate_shell_ball_mesh, Radii};
use crate::model::Physics;
use crate::solver::SolverSettings;

/// Horizon of every convergence run.
pub const STUDY_T_END: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    /// Mesh levels at `τ = 0.1`, `m = 100`.
    Spatial,
    /// Time steps 0.5, 0.25, 0.1 on the finest mesh with `m = 1`.
    Temporal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub level: u32,
    pub h_max: f64,
    pub tau: f64,
    pub err_b: f64,
    pub rate_b: Option<f64>,
    pub err_curl: f64,
    pub rate_curl: Option<f64>,
    pub steps: usize,
    pub seconds: f64,
    /// Set when the run failed; errors are then NaN and rates absent.
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyConfig {
    pub sweep: Sweep,
    pub radii: Radii,
    pub levels: Vec<u32>,
    pub taus: Vec<f64>,
    pub m: f64,
    pub t_end: f64,
    pub solver: SolverSettings,
}

impl StudyConfig {
    pub fn spatial(levels: Vec<u32>) -> Self {
        StudyConfig {
            sweep: Sweep::Spatial,
            radii: Radii::unit_ball(),
            levels,
            taus: vec![0.1],
            m: 100.0,
            t_end: STUDY_T_END,
            solver: SolverSettings::default(),
        }
    }

    pub fn temporal(level: u32) -> Self {
        StudyConfig {
            sweep: Sweep::Temporal,
            radii: Radii::unit_ball(),
            levels: vec![level],
            taus: vec![0.5, 0.25, 0.1],
            m: 1.0,
            t_end: STUDY_T_END,
            solver: SolverSettings::default(),
        }
    }

    pub fn for_sweep(sweep: Sweep, levels: &[u32]) -> Self {
        match sweep {
            Sweep::Spatial => Self::spatial(levels.to_vec()),
            Sweep::Temporal => Self::temporal(levels.iter().copied().max().unwrap_or(0)),
        }
    }
}

/// Errors at `t_end` of one manufactured-solution run.
pub fn mms_run(disc: &Discretization, tau: f64, m: f64, t_end: f64, solver: SolverSettings) -> Result<(f64, f64, usize)> {
    let sim = Simulation::new(disc.clone(), Physics::manufactured(), Mode::Manufactured { m }, tau, solver)?;
    let out = evolve(&sim, sim.project_initial(), t_end, &SnapshotPolicy::None, |_, _, _| Ok(()))?;
    let state = out.final_state;
    let (eb, ec) = sim.mms_errors(&state.field, state.time, m);
    Ok((eb, ec, state.step))
}

/// `log(e_coarse / e_fine) / log(s_coarse / s_fine)`.
pub fn rate(e_coarse: f64, e_fine: f64, s_coarse: f64, s_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (s_coarse / s_fine).ln()
}

/// Run every (level, τ) pair of the configuration in sweep order. Rates
/// compare each row with the previous one, by `h_max` in a spatial sweep and
/// by `τ` in a temporal one. A failed run is recorded in its row and the
/// sweep continues; mesh generation failures abort.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    let mut rows: Vec<StudyRow> = Vec::new();
    for &level in &cfg.levels {
        let mesh = generate_shell_ball_mesh(cfg.radii.as_array(), level)?;
        let h_max = mesh.h_max();
        let disc = Discretization::new(mesh)?;
        for &tau in &cfg.taus {
            let start = Instant::now();
            let (err_b, err_curl, steps, failure) = match mms_run(&disc, tau, cfg.m, cfg.t_end, cfg.solver) {
                Ok((b, c, n)) => (b, c, n, None),
                Err(e) => (f64::NAN, f64::NAN, 0, Some(e.to_string())),
            };
            let prev = rows.last().filter(|p| p.failure.is_none() && failure.is_none());
            let (rate_b, rate_curl) = match prev {
                None => (None, None),
                Some(prev) => {
                    let (sc, sf) = match cfg.sweep {
                        Sweep::Spatial => (prev.h_max, h_max),
                        Sweep::Temporal => (prev.tau, tau),
                    };
                    (
                        Some(rate(prev.err_b, err_b, sc, sf)),
                        Some(rate(prev.err_curl, err_curl, sc, sf)),
                    )
                }
            };
            rows.push(StudyRow {
                level,
                h_max,
                tau,
                err_b,
                rate_b,
                err_curl,
                rate_curl,
                steps,
                seconds: start.elapsed().as_secs_f64(),
                failure,
            });
        }
    }
    Ok(rows)
}

fn fmt_rate(r: Option<f64>) -> String {
    r.map_or_else(|| "--".to_string(), |r| format!("{r:.3}"))
}

/// Fixed-width table in the layout `h_max | τ | errB | rate | errCurl | rate`.
pub fn format_table(rows: &[StudyRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>10} {:>6} {:>12} {:>7} {:>12} {:>7}",
        "h_max", "tau", "err_B", "rate", "err_curlB", "rate"
    );
    for r in rows {
        if let Some(f) = &r.failure {
            let _ = writeln!(s, "{:>10.6} {:>6} failed: {f}", r.h_max, r.tau);
            continue;
        }
        let _ = writeln!(
            s,
            "{:>10.6} {:>6} {:>12.4e} {:>7} {:>12.4e} {:>7}",
            r.h_max,
            r.tau,
            r.err_b,
            fmt_rate(r.rate_b),
            r.err_curl,
            fmt_rate(r.rate_curl)
        );
    }
    s
}

/// CSV with header `h_max,tau,err_b,rate_b,err_curl,rate_curl`; missing
/// rates are empty fields.
pub fn write_csv<W: std::io::Write>(rows: &[StudyRow], mut w: W) -> std::io::Result<()> {
    let opt = |r: Option<f64>| r.map_or_else(String::new, |r| format!("{r:.16e}"));
    writeln!(w, "h_max,tau,err_b,rate_b,err_curl,rate_curl")?;
    for r in rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{},{:.16e},{}",
            r.h_max,
            r.tau,
            r.err_b,
            opt(r.rate_b),
            r.err_curl,
            opt(r.rate_curl)
        )?;
    }
    w.flush()
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p shelldyn --test acceptance`. The process exits
//! nonzero when any hard criterion fails; the soft energy-ordering check is
//! reported but never fails the run.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use nalgebra::{DMatrix, DVector, Matrix6};
use rand::Rng;
use shelldyn::dynamo::{evolve, EvolveOutput, Mode, SnapshotPolicy};
use shelldyn::mesh::generate_shell_ball_mesh;
use shelldyn::model::{mms_curl, mms_dt, mms_field, Physics};
use shelldyn::solver::{solve, SolverSettings};
use shelldyn::sparse::CsrMatrix;
use shelldyn::study::{format_table, run_study, StudyConfig, StudyRow};
use shelldyn::whitney::TetGeometry;
use shelldyn::{Discretization, Point3, Radii, Simulation};

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Hard,
    Soft,
}

struct Outcome {
    passed: bool,
    kind: Kind,
}

fn report(id: &str, kind: Kind, passed: bool, detail: &str, start: Instant) -> Outcome {
    let tag = match (kind, passed) {
        (Kind::Hard, true) => "PASS",
        (Kind::Hard, false) => "FAIL",
        (Kind::Soft, true) => "PASS (soft)",
        (Kind::Soft, false) => "FAIL (soft)",
    };
    println!("{tag} {id}: {detail} [{:.1}s]", start.elapsed().as_secs_f64());
    Outcome { passed, kind }
}

fn in_range(x: Option<f64>, lo: f64, hi: f64) -> bool {
    x.is_some_and(|v| (lo..=hi).contains(&v))
}

fn fmt_rate(x: Option<f64>) -> String {
    x.map_or("--".into(), |v| format!("{v:.3}"))
}

fn last(rows: &[StudyRow]) -> &StudyRow {
    rows.last().expect("non-empty study")
}

fn spatial_convergence() -> Outcome {
    let start = Instant::now();
    let rows = run_study(&StudyConfig::spatial(vec![0, 1, 2])).expect("spatial study");
    print!("{}", format_table(&rows));
    let r = last(&rows);
    let curl_ok = in_range(r.rate_curl, 0.9, 2.0);
    let b_ok = in_range(r.rate_b, 1.3, 2.2);
    let detail = format!(
        "spatial rates at the finest pair: curl {} (want [0.9, 2.0]) {}, B {} (want [1.3, 2.2]) {}",
        fmt_rate(r.rate_curl),
        if curl_ok { "ok" } else { "out of range" },
        fmt_rate(r.rate_b),
        if b_ok { "ok" } else { "out of range" },
    );
    report("1 spatial convergence", Kind::Hard, curl_ok && b_ok, &detail, start)
}

fn temporal_convergence() -> Outcome {
    let start = Instant::now();
    let rows = run_study(&StudyConfig::temporal(2)).expect("temporal study");
    print!("{}", format_table(&rows));
    let ok = rows[1..]
        .iter()
        .all(|r| in_range(r.rate_b, 0.8, 1.3) && in_range(r.rate_curl, 0.8, 1.3));
    let rates: Vec<String> = rows[1..]
        .iter()
        .map(|r| format!("tau {}: B {}, curl {}", r.tau, fmt_rate(r.rate_b), fmt_rate(r.rate_curl)))
        .collect();
    let detail = format!("temporal rates (want [0.8, 1.3]): {}", rates.join("; "));
    report("2 temporal convergence", Kind::Hard, ok, &detail, start)
}

fn solar_run(r_m: f64, t_end: f64) -> shelldyn::Result<EvolveOutput> {
    let disc = Discretization::new(generate_shell_ball_mesh(Radii::solar().as_array(), 0)?)?;
    let sim = Simulation::new(
        disc,
        Physics::solar(Radii::solar(), r_m),
        Mode::Dynamo,
        0.01,
        SolverSettings::default(),
    )?;
    evolve(&sim, sim.project_initial(), t_end, &SnapshotPolicy::None, |_, _, _| Ok(()))
}

fn divergence_conservation() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for r_m in [10.0, 50.0, 100.0] {
        match solar_run(r_m, 1.0) {
            Ok(out) => {
                let pass = out.final_state.step == 100 && out.max_divergence_drift <= 1e-10;
                ok &= pass;
                parts.push(format!("R_m={r_m}: {:.2e}", out.max_divergence_drift));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("R_m={r_m}: run failed ({e})"));
            }
        }
    }
    let detail = format!("max relative drift of interior Gᵀ M B over 100 steps (want <= 1e-10): {}", parts.join(", "));
    report("3 divergence conservation", Kind::Hard, ok, &detail, start)
}

fn time_average(out: &EvolveOutput, from: f64) -> f64 {
    let tail: Vec<f64> = out
        .energies
        .iter()
        .filter(|s| s.time >= from - 1e-12)
        .map(|s| s.energy)
        .collect();
    tail.iter().sum::<f64>() / tail.len() as f64
}

fn stability_and_ordering() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut averages = Vec::new();
    for r_m in [10.0, 50.0, 100.0] {
        match solar_run(r_m, 2.2) {
            Ok(out) => {
                let s = out.stability;
                let pass = s.constant.is_finite() && s.max_mass_energy.is_finite() && s.max_energy_ratio <= 1e6;
                ok &= pass;
                parts.push(format!(
                    "R_m={r_m}: max E_M/E_M(0) {:.3e}, bound {:.3e} {}",
                    s.max_energy_ratio,
                    s.max_mass_energy + s.curl_sum,
                    if pass { "ok" } else { "exceeded" }
                ));
                averages.push((r_m, Some(time_average(&out, 1.5)), s.max_energy_ratio));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("R_m={r_m}: run failed ({e})"));
                averages.push((r_m, None, f64::INFINITY));
            }
        }
    }
    let stability = report(
        "4 stability",
        Kind::Hard,
        ok,
        &format!("coarse mesh to t=2.2 (want finite, ratio <= 1e6): {}", parts.join("; ")),
        start,
    );

    let start = Instant::now();
    let find = |r: f64| averages.iter().find(|a| a.0 == r).copied().expect("run recorded");
    let (lo, hi) = (find(10.0), find(100.0));
    let ordering = match (lo.1, hi.1) {
        (Some(a), Some(b)) => {
            let note = if hi.2 > 1e6 {
                " (R_m=100 run has blown up, so the ordering says nothing about saturated energies)"
            } else {
                ""
            };
            report(
                "5 energy ordering",
                Kind::Soft,
                b > a,
                &format!("mean E_M for t >= 1.5: R_m=10 {a:.4e}, R_m=100 {b:.4e}{note}"),
                start,
            )
        }
        _ => report("5 energy ordering", Kind::Soft, false, "a run failed before t = 1.5", start),
    };
    (stability, ordering)
}

fn kernel_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(100);
    let mut dual: f64 = 0.0;
    let mut curl: f64 = 0.0;
    let mut kernel: f64 = 0.0;
    let mut g = DMatrix::zeros(6, 4);
    for (k, &(i, j)) in EDGES.iter().enumerate() {
        g[(k, i)] = -1.0;
        g[(k, j)] = 1.0;
    }
    for _ in 0..100 {
        let v = random_tet(&mut rng);
        let tet = TetGeometry::new(v).unwrap();
        for k in 0..6 {
            let (a, b) = EDGES[k];
            let t = v[b] - v[a];
            for j in 0..6 {
                let c: f64 = gauss_legendre01(3)
                    .iter()
                    .map(|&(s, w)| w * tet.shape(j, &(v[a] + t * s)).dot(&t))
                    .sum();
                dual = dual.max((c - if j == k { 1.0 } else { 0.0 }).abs());
            }
            let o = whitney_curl(&v, k);
            curl = curl.max((tet.curl(k) - o).norm() / (1.0 + o.norm()));
        }
        let kl = tet.local_curlcurl(1.0).unwrap();
        let kd = DMatrix::from_fn(6, 6, |a, b| kl[(a, b)]);
        kernel = kernel.max((&kd * &g).amax() / kd.amax());
    }

    let v = random_tet(&mut rng);
    let tet = TetGeometry::new(v).unwrap();
    let vol = signed_volume(&v).abs();
    let samples = 1_000_000;
    let mut acc = Matrix6::<f64>::zeros();
    for _ in 0..samples {
        let x = sample_point(&v, &mut rng);
        let n: [V3; 6] = std::array::from_fn(|k| whitney(&v, k, &x));
        for a in 0..6 {
            for b in 0..6 {
                acc[(a, b)] += n[a].dot(&n[b]);
            }
        }
    }
    let m = tet.local_mass();
    let mc = (m - acc * (vol / samples as f64)).amax() / m.amax();

    let mut pcg_err: f64 = 0.0;
    for _ in 0..20 {
        let n = 50;
        let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0f64..1.0));
        let a = &b * b.transpose() + DMatrix::identity(n, n) * 0.5;
        let rhs = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
        let exact = a.clone().cholesky().unwrap().solve(&rhs);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).iter().copied().collect()).collect();
        let settings = SolverSettings {
            tol: 1e-13,
            max_iter: None,
        };
        let (x, _) = solve(&CsrMatrix::from_dense(&rows), rhs.as_slice(), &vec![0.0; n], &settings).unwrap();
        pcg_err = pcg_err.max((DVector::from_vec(x) - &exact).norm() / exact.norm());
    }

    let ok = dual <= 1e-12 && curl <= 1e-13 && mc <= 1e-3 && kernel <= 1e-11 && pcg_err <= 1e-9;
    let detail = format!(
        "duality {dual:.1e} (1e-12), curl {curl:.1e} (1e-13), Monte-Carlo mass {mc:.1e} (1e-3), \
         gradient kernel {kernel:.1e} (1e-11), PCG vs Cholesky {pcg_err:.1e} (1e-9)"
    );
    report("6 element kernels", Kind::Hard, ok, &detail, start)
}

fn manufactured_consistency() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(101);
    let (mut curl, mut dt_err, mut div): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let h = 1e-5;
    for &m in &[1.0, 100.0] {
        let dt = 1e-6 * m;
        let mut n = 0;
        while n < 1000 {
            let x = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if x.norm() >= 1.0 {
                continue;
            }
            n += 1;
            let t = rng.gen_range(0.0..1.0);
            let d: [V3; 3] = std::array::from_fn(|i| {
                let mut e = Point3::zeros();
                e[i] = h;
                (mms_field(&(x + e), t, m) - mms_field(&(x - e), t, m)) / (2.0 * h)
            });
            let fd_curl = V3::new(d[1].z - d[2].y, d[2].x - d[0].z, d[0].y - d[1].x);
            curl = curl.max((fd_curl - mms_curl(&x, t, m)).norm());
            div = div.max((d[0].x + d[1].y + d[2].z).abs());
            let fd_dt = (mms_field(&x, t + dt, m) - mms_field(&x, t - dt, m)) / (2.0 * dt);
            dt_err = dt_err.max((fd_dt - mms_dt(&x, t, m)).norm());
        }
    }
    let ok = curl <= 1e-6 && dt_err <= 1e-8 && div <= 1e-6;
    let detail = format!("curl {curl:.1e} (1e-6), time derivative {dt_err:.1e} (1e-8), divergence {div:.1e} (1e-6)");
    report("7 manufactured field consistency", Kind::Hard, ok, &detail, start)
}

fn main() -> ExitCode {
    let mut outcomes = vec![kernel_oracles(), manufactured_consistency()];
    outcomes.push(divergence_conservation());
    let (stability, ordering) = stability_and_ordering();
    outcomes.push(stability);
    outcomes.push(ordering);
    outcomes.push(spatial_convergence());
    outcomes.push(temporal_convergence());

    let hard_failures = outcomes.iter().filter(|o| o.kind == Kind::Hard && !o.passed).count();
    println!(
        "acceptance: {} of {} hard criteria passed",
        outcomes.iter().filter(|o| o.kind == Kind::Hard && o.passed).count(),
        outcomes.iter().filter(|o| o.kind == Kind::Hard).count()
    );
    if hard_failures > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

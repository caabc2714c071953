//! `shelldyn` command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage or
//! configuration errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use sha1::{Digest, Sha1};
use shelldyn::config::{MeshSource, RunConfig};
use shelldyn::dynamo::{evolve, write_energy_csv, SnapshotPolicy};
use shelldyn::mesh::{generate_shell_ball_mesh, write_mesh};
use shelldyn::study::{format_table, run_study, write_csv, StudyConfig, Sweep};
use shelldyn::vtk::save_vtk;
use shelldyn::{Discretization, Mesh, Radii, Region, Simulation};

#[derive(Parser)]
#[command(name = "shelldyn", version, about = "Edge-element spherical interface dynamo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a nested-shell ball mesh and write it as tmesh.
    Mesh {
        #[arg(long)]
        levels: u32,
        /// Four comma-separated radii r1 < r2 < r3 < r4.
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Manufactured-solution convergence sweep on the unit ball.
    Converge {
        #[arg(long, value_enum)]
        mode: SweepArg,
        /// Run config; its radii are rescaled to the unit ball and an
        /// integer `mesh` sets the finest level.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Finest refinement level when no config is given.
        #[arg(long, default_value_t = 2)]
        finest: u32,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Time evolution: energy series, VTK snapshots and a run manifest.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Snapshot every k-th step; 0 disables snapshots.
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepArg {
    Spatial,
    Temporal,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh { levels, radii, out } => cmd_mesh(levels, &radii, &out),
        Command::Converge {
            mode,
            config,
            finest,
            csv,
        } => cmd_converge(mode, config.as_deref(), finest, csv.as_deref()),
        Command::Evolve {
            config,
            out,
            snapshot_every,
        } => cmd_evolve(&config, &out, snapshot_every),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.chain().any(|c| c.downcast_ref::<shelldyn::Error>().is_some_and(|e| e.is_usage()));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

fn cmd_mesh(levels: u32, radii: &[f64], out: &Path) -> Result<ExitCode> {
    let radii: [f64; 4] = radii.try_into().context("expected four radii")?;
    Radii::new(radii)?;
    let mesh = generate_shell_ball_mesh(radii, levels)?;
    let disc = Discretization::new(mesh)?;
    let mut buf = Vec::new();
    write_mesh(disc.mesh(), &mut buf)?;
    fs::write(out, &buf).with_context(|| format!("writing {}", out.display()))?;
    print_mesh_summary(&disc);
    Ok(ExitCode::SUCCESS)
}

fn print_mesh_summary(disc: &Discretization) {
    let mesh = disc.mesh();
    let dofs = disc.dofs();
    println!("vertices: {}", mesh.num_vertices());
    println!("tets: {}", mesh.num_tets());
    println!("edges: {}", dofs.num_edges());
    println!("boundary edges: {}", dofs.num_boundary_edges());
    println!("h_max: {:.6}", mesh.h_max());
    let vols = mesh.region_volumes();
    for r in Region::ALL {
        println!(
            "region {r} volume: {:.6} (exact shell {:.6})",
            vols[r.index()],
            mesh.radii().shell_volume(r)
        );
    }
}

fn cmd_converge(mode: SweepArg, config: Option<&Path>, finest: u32, csv: Option<&Path>) -> Result<ExitCode> {
    let sweep = match mode {
        SweepArg::Spatial => Sweep::Spatial,
        SweepArg::Temporal => Sweep::Temporal,
    };
    let mut finest = finest;
    let mut unit = Radii::unit_ball();
    let mut solver = None;
    if let Some(path) = config {
        let cfg = RunConfig::load(path)?;
        let r = cfg.radii.as_array();
        unit = Radii::new(r.map(|x| x / r[3]))?;
        if let MeshSource::Level(l) = cfg.mesh {
            finest = l;
        }
        solver = Some(cfg.solver);
    }
    let mut study = StudyConfig::for_sweep(sweep, &(0..=finest).collect::<Vec<_>>());
    study.radii = unit;
    if let Some(s) = solver {
        study.solver = s;
    }
    let rows = run_study(&study)?;
    print!("{}", format_table(&rows));
    if let Some(path) = csv {
        let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&rows, std::io::BufWriter::new(file))?;
    }
    Ok(if rows.iter().any(|r| r.failure.is_some()) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

/// Git blob id of the mesh in tmesh form.
fn mesh_hash(mesh: &Mesh) -> Result<String> {
    let mut body = Vec::new();
    write_mesh(mesh, &mut body)?;
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(&body);
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn cmd_evolve(config: &Path, out: &Path, snapshot_every: Option<usize>) -> Result<ExitCode> {
    let start = Instant::now();
    let cfg = RunConfig::load(config)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let mesh = cfg.build_mesh()?;
    let hash = mesh_hash(&mesh)?;
    let disc = Discretization::new(mesh)?;
    let sim = Simulation::new(disc, cfg.physics(), cfg.mode, cfg.tau, cfg.solver)?;
    let setup_secs = start.elapsed().as_secs_f64();

    let policy = match snapshot_every.or(cfg.snapshot_every) {
        Some(0) => SnapshotPolicy::None,
        Some(k) => SnapshotPolicy::Every(k),
        None => SnapshotPolicy::Times(cfg.snapshot_times.clone()),
    };
    let mut files: Vec<PathBuf> = Vec::new();
    let run_start = Instant::now();
    let output = evolve(&sim, sim.project_initial(), cfg.t_end, &policy, |step, t, field| {
        let path = out.join(format!("snapshot_{step:06}.vtk"));
        save_vtk(sim.discretization(), field, &format!("B at t = {t}"), &path)?;
        files.push(path);
        Ok(())
    });
    let run_secs = run_start.elapsed().as_secs_f64();
    let output = output?;

    let energy_path = out.join("energy.csv");
    let file = fs::File::create(&energy_path).with_context(|| format!("creating {}", energy_path.display()))?;
    write_energy_csv(&output.energies, std::io::BufWriter::new(file))?;
    files.insert(0, energy_path);

    let st = output.stability;
    let manifest_path = out.join("manifest.txt");
    let mut m = String::new();
    m.push_str("[config]\n");
    m.push_str(&cfg.to_ini());
    m.push_str("\n[mesh]\n");
    m.push_str(&format!("sha1 = {hash}\n"));
    m.push_str(&format!("vertices = {}\n", sim.discretization().mesh().num_vertices()));
    m.push_str(&format!("tets = {}\n", sim.discretization().mesh().num_tets()));
    m.push_str(&format!("edges = {}\n", sim.discretization().num_edges()));
    m.push_str("\n[run]\n");
    m.push_str(&format!("steps = {}\n", output.final_state.step));
    m.push_str(&format!("max_mass_energy = {:e}\n", st.max_mass_energy));
    m.push_str(&format!("curl_sum = {:e}\n", st.curl_sum));
    m.push_str(&format!("stability_constant = {:e}\n", st.constant));
    m.push_str(&format!("max_energy_ratio = {:e}\n", st.max_energy_ratio));
    m.push_str(&format!("max_divergence_drift = {:e}\n", output.max_divergence_drift));
    m.push_str("\n[timing]\n");
    m.push_str(&format!("setup_seconds = {setup_secs:.3}\n"));
    m.push_str(&format!("run_seconds = {run_secs:.3}\n"));
    m.push_str("\n[files]\n");
    for f in &files {
        m.push_str(&format!("{}\n", f.display()));
    }
    let mut mf = fs::File::create(&manifest_path).with_context(|| format!("creating {}", manifest_path.display()))?;
    mf.write_all(m.as_bytes())?;

    println!("steps: {}", output.final_state.step);
    println!("final E_M: {:.6e}", output.energies.last().map_or(0.0, |s| s.energy));
    println!("max E_M / E_M(0): {:.6e}", st.max_energy_ratio);
    println!("stability constant: {:.6e}", st.constant);
    println!("max divergence drift: {:.3e}", output.max_divergence_drift);
    println!("snapshots: {}", output.snapshot_steps.len());
    println!("manifest: {}", manifest_path.display());
    Ok(ExitCode::SUCCESS)
}

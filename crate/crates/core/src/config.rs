//! Flat `key = value` run configuration.
//!
//! ```text
//! # solar interface dynamo
//! radii = 1.5, 1.875, 2.5, 7.5
//! beta1 = 1
//! beta2 = 1
//! beta3 = 1
//! beta4 = 150
//! r_alpha = 30
//! r_m = 100
//! sigma = 1
//! tau = 0.01
//! t_end = 2.2
//! mesh = 0            # refinement level, or a path to a .tmesh file
//! mode = dynamo       # or mms (then `m` is required)
//! ```
//!
//! Optional keys: `mode`, `m`, `solver_tol`, `solver_maxiter`, `snapshot_every`,
//! `snapshot_times`. Blank lines, `#`/`;` comments and `[section]` headers
//! are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::dynamo::Mode;
use crate::error::{Error, Result};
use crate::mesh::{generate_shell_ball_mesh, load_mesh, Mesh, Radii};
use crate::model::{Physics, Profile};
use crate::solver::SolverSettings;

const KNOWN_KEYS: [&str; 17] = [
    "radii",
    "beta1",
    "beta2",
    "beta3",
    "beta4",
    "r_alpha",
    "r_m",
    "sigma",
    "tau",
    "t_end",
    "mesh",
    "mode",
    "m",
    "solver_tol",
    "solver_maxiter",
    "snapshot_times",
    "snapshot_every",
];

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    /// Generate the shell-ball mesh at this refinement level.
    Level(u32),
    /// Read a `tmesh` file.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub radii: Radii,
    pub beta: [f64; 4],
    pub r_alpha: f64,
    pub r_m: f64,
    pub sigma: f64,
    pub tau: f64,
    pub t_end: f64,
    pub mesh: MeshSource,
    pub mode: Mode,
    pub solver: SolverSettings,
    pub snapshot_times: Vec<f64>,
    /// Snapshot cadence in steps; overrides `snapshot_times` when set.
    pub snapshot_every: Option<usize>,
}

pub const DEFAULT_SNAPSHOT_TIMES: [f64; 6] = [0.0, 1.0, 1.3, 1.6, 1.9, 2.2];

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::InvalidValue {
        key: key.to_string(),
        message: message.into(),
    }
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn raw(&self, key: &str) -> Result<&str> {
        self.0
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    fn real(&self, key: &str) -> Result<f64> {
        parse_real(key, self.raw(key)?)
    }

    fn opt(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn parse_real(key: &str, s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| invalid(key, format!("`{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(v)
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_real(key, t))
        .collect()
}

impl RunConfig {
    /// Solar setup with the given shear strength on a generated mesh.
    pub fn solar(r_m: f64, level: u32, tau: f64) -> Self {
        let physics = Physics::solar(Radii::solar(), r_m);
        RunConfig {
            radii: Radii::solar(),
            beta: physics.beta,
            r_alpha: physics.r_alpha,
            r_m,
            sigma: physics.sigma,
            tau,
            t_end: 2.2,
            mesh: MeshSource::Level(level),
            mode: Mode::Dynamo,
            solver: SolverSettings::default(),
            snapshot_times: DEFAULT_SNAPSHOT_TIMES.to_vec(),
            snapshot_every: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let k = k.trim().to_ascii_lowercase();
            if !KNOWN_KEYS.contains(&k.as_str()) {
                return Err(invalid(&k, "unknown key"));
            }
            if map.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(invalid(&k, "given more than once"));
            }
        }
        let e = Entries(map);

        let radii_list = parse_list("radii", e.raw("radii")?)?;
        let radii_arr: [f64; 4] = radii_list
            .try_into()
            .map_err(|v: Vec<f64>| invalid("radii", format!("expected 4 values, got {}", v.len())))?;
        let radii = Radii::new(radii_arr)?;
        let beta = [e.real("beta1")?, e.real("beta2")?, e.real("beta3")?, e.real("beta4")?];
        for (i, b) in beta.iter().enumerate() {
            if !(*b > 0.0) {
                return Err(invalid(&format!("beta{}", i + 1), format!("must be positive, got {b}")));
            }
        }
        let nonneg = |key: &str| -> Result<f64> {
            let v = e.real(key)?;
            if v < 0.0 {
                return Err(invalid(key, format!("must be nonnegative, got {v}")));
            }
            Ok(v)
        };
        let r_alpha = nonneg("r_alpha")?;
        let r_m = nonneg("r_m")?;
        let sigma = nonneg("sigma")?;
        let tau = e.real("tau")?;
        if !(tau > 0.0) {
            return Err(invalid("tau", format!("must be positive, got {tau}")));
        }
        let t_end = e.real("t_end")?;
        if t_end < tau {
            return Err(invalid("t_end", format!("must be at least tau = {tau}, got {t_end}")));
        }
        let mesh_raw = e.raw("mesh")?;
        let mesh = match mesh_raw.parse::<u32>() {
            Ok(level) => MeshSource::Level(level),
            Err(_) if mesh_raw.is_empty() => return Err(invalid("mesh", "empty value")),
            Err(_) => MeshSource::File(PathBuf::from(mesh_raw)),
        };
        let mode = match e.opt("mode").unwrap_or("dynamo") {
            "dynamo" => Mode::Dynamo,
            "mms" | "manufactured" => {
                let m = e.real("m")?;
                if !(m > 0.0) {
                    return Err(invalid("m", format!("must be positive, got {m}")));
                }
                Mode::Manufactured { m }
            }
            other => return Err(invalid("mode", format!("expected `dynamo` or `mms`, got `{other}`"))),
        };
        let mut solver = SolverSettings::default();
        if let Some(s) = e.opt("solver_tol") {
            solver.tol = parse_real("solver_tol", s)?;
            if !(solver.tol > 0.0) {
                return Err(invalid("solver_tol", "must be positive"));
            }
        }
        if let Some(s) = e.opt("solver_maxiter") {
            let n: usize = s.parse().map_err(|_| invalid("solver_maxiter", format!("`{s}` is not a count")))?;
            solver.max_iter = Some(n);
        }
        let snapshot_times = match e.opt("snapshot_times") {
            Some(s) => parse_list("snapshot_times", s)?,
            None => DEFAULT_SNAPSHOT_TIMES.to_vec(),
        };
        let snapshot_every = e
            .opt("snapshot_every")
            .map(|s| s.parse::<usize>().map_err(|_| invalid("snapshot_every", format!("`{s}` is not a count"))))
            .transpose()?;
        Ok(RunConfig {
            radii,
            beta,
            r_alpha,
            r_m,
            sigma,
            tau,
            t_end,
            mesh,
            mode,
            solver,
            snapshot_times,
            snapshot_every,
        })
    }

    /// Read a config file. A relative `mesh` path is resolved against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if let MeshSource::File(p) = &cfg.mesh {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    cfg.mesh = MeshSource::File(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }

    pub fn physics(&self) -> Physics {
        let profile = match self.mode {
            Mode::Dynamo => Profile::Solar(self.radii),
            Mode::Manufactured { .. } => Profile::Manufactured,
        };
        Physics {
            beta: self.beta,
            r_alpha: self.r_alpha,
            r_m: self.r_m,
            sigma: self.sigma,
            profile,
        }
    }

    /// Generate or load the mesh. A loaded mesh must carry the configured
    /// radii.
    pub fn build_mesh(&self) -> Result<Mesh> {
        match &self.mesh {
            MeshSource::Level(l) => generate_shell_ball_mesh(self.radii.as_array(), *l),
            MeshSource::File(p) => {
                let mesh = load_mesh(p)?;
                let (a, b) = (mesh.radii().as_array(), self.radii.as_array());
                if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-12 * y.abs()) {
                    return Err(invalid("radii", format!("mesh file has radii {a:?}, config says {b:?}")));
                }
                Ok(mesh)
            }
        }
    }

    /// Canonical text form; parsing it gives back the same configuration.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let r = self.radii.as_array();
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "radii = {}", join(&r));
        for (i, b) in self.beta.iter().enumerate() {
            let _ = writeln!(s, "beta{} = {b}", i + 1);
        }
        let _ = writeln!(s, "r_alpha = {}", self.r_alpha);
        let _ = writeln!(s, "r_m = {}", self.r_m);
        let _ = writeln!(s, "sigma = {}", self.sigma);
        let _ = writeln!(s, "tau = {}", self.tau);
        let _ = writeln!(s, "t_end = {}", self.t_end);
        match &self.mesh {
            MeshSource::Level(l) => {
                let _ = writeln!(s, "mesh = {l}");
            }
            MeshSource::File(p) => {
                let _ = writeln!(s, "mesh = {}", p.display());
            }
        }
        match self.mode {
            Mode::Dynamo => {
                let _ = writeln!(s, "mode = dynamo");
            }
            Mode::Manufactured { m } => {
                let _ = writeln!(s, "mode = mms\nm = {m}");
            }
        }
        let _ = writeln!(s, "solver_tol = {:e}", self.solver.tol);
        if let Some(n) = self.solver.max_iter {
            let _ = writeln!(s, "solver_maxiter = {n}");
        }
        let _ = writeln!(s, "snapshot_times = {}", join(&self.snapshot_times));
        if let Some(k) = self.snapshot_every {
            let _ = writeln!(s, "snapshot_every = {k}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLAR: &str = "\
# solar run
radii = 1.5, 1.875, 2.5, 7.5
beta1 = 1
beta2 = 1
beta3 = 1
beta4 = 150
r_alpha = 30
r_m = 100
sigma = 1
tau = 0.01
t_end = 2.2
mesh = 0
";

    #[test]
    fn parses_solar_config() {
        let c = RunConfig::parse(SOLAR).unwrap();
        assert_eq!(c, RunConfig::solar(100.0, 0, 0.01));
        assert_eq!(RunConfig::parse(&c.to_ini()).unwrap(), c);
    }

    #[test]
    fn missing_key_is_named() {
        let text = SOLAR.replace("beta4 = 150\n", "");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(matches!(&err, Error::MissingKey(k) if k == "beta4"));
        assert!(err.is_usage());
        assert!(err.to_string().contains("beta4"));
    }

    #[test]
    fn rejects_bad_values() {
        for (from, to) in [
            ("tau = 0.01", "tau = 0"),
            ("beta2 = 1", "beta2 = -1"),
            ("radii = 1.5, 1.875, 2.5, 7.5", "radii = 1, 1, 2, 3"),
            ("radii = 1.5, 1.875, 2.5, 7.5", "radii = 1, 2, 3"),
            ("t_end = 2.2", "t_end = 0.001"),
            ("mesh = 0", "mesh = 0\nmode = mms"),
            ("mesh = 0", "mesh = 0\ncolour = red"),
            ("mesh = 0", "mesh = 0\nmesh = 1"),
        ] {
            let err = RunConfig::parse(&SOLAR.replace(from, to)).unwrap_err();
            assert!(err.is_usage(), "{to}: {err}");
        }
    }

    #[test]
    fn optional_keys() {
        let text = format!("{SOLAR}mode = mms\nm = 100\nsolver_tol = 1e-12\nsolver_maxiter = 50\nsnapshot_times = 0.5, 1\n");
        let c = RunConfig::parse(&text).unwrap();
        assert_eq!(c.mode, Mode::Manufactured { m: 100.0 });
        assert_eq!(c.solver.tol, 1e-12);
        assert_eq!(c.solver.max_iter, Some(50));
        assert_eq!(c.snapshot_times, vec![0.5, 1.0]);
        assert_eq!(c.physics().profile, Profile::Manufactured);
        let c = RunConfig::parse(&SOLAR.replace("mesh = 0", "mesh = shell.tmesh")).unwrap();
        assert_eq!(c.mesh, MeshSource::File("shell.tmesh".into()));
    }
}

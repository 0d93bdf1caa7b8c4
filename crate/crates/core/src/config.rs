//! Plain-text `key=value` run configuration shared by all CLI commands.
//!
//! Every field has a default; the effective configuration (defaults plus
//! file plus command-line overrides) is written next to each run's
//! outputs so a run can be reproduced from its artifacts alone.

use crate::error::{Error, Result};
use crate::forward::{AkiCoeffBlock, CorrFn, ElasticClassStats, ForwardModel, NoiseModel, Wavelet};
use crate::io;
use crate::lattice::{GridDims, Node};
use crate::mesh_prior::MeshPriorSpec;
use crate::profile_prior::ProfileTransitionTable;
use crate::sampler::{ColumnPrior, SamplerConfig};
use crate::analysis::Adjacency;
use nalgebra::{Matrix2, Vector2};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorKind {
    Mesh,
    Profile,
}

impl PriorKind {
    fn as_str(self) -> &'static str {
        match self {
            PriorKind::Mesh => "mesh",
            PriorKind::Profile => "profile",
        }
    }
}

/// Loaded prior ready for sampling.
pub enum PriorModel {
    Mesh(MeshPriorSpec),
    Profile(ProfileTransitionTable),
}

impl PriorModel {
    pub fn as_column_prior(&self) -> &dyn ColumnPrior {
        match self {
            PriorModel::Mesh(p) => p,
            PriorModel::Profile(p) => p,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub rows: usize,
    pub cols: usize,
    pub prior: PriorKind,
    /// Optional prior parameter file; defaults are built in.
    pub prior_file: Option<PathBuf>,

    pub mu0: [f64; 2],
    pub mu1: [f64; 2],
    /// Symmetric 2x2 as [var1, var2, cov].
    pub sigma0: [f64; 3],
    pub sigma1: [f64; 3],
    pub corr_v_range: f64,
    pub corr_v_support: usize,
    pub corr_h_range: f64,
    pub corr_h_support: usize,
    pub aki_near: [f64; 2],
    pub aki_far: [f64; 2],
    pub sd_near: f64,
    pub sd_far: f64,
    /// 0 = white noise in depth.
    pub noise_corr_range: f64,
    pub wavelet_near_file: Option<PathBuf>,
    pub wavelet_far_file: Option<PathBuf>,
    /// Ricker parameters used when no wavelet file is given.
    pub ricker_freq: f64,
    pub ricker_len: usize,

    pub nu: usize,
    pub sweeps: usize,
    /// 0 = auto (20% of sweeps).
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub audit_every: usize,
    pub chains: usize,

    pub trace_columns: Vec<usize>,
    pub contact_seeds: Vec<Node>,
    pub connectivity_draws: usize,
    pub adjacency: Adjacency,
    /// Prior realisations per `simulate-prior` run.
    pub realizations: usize,

    pub out_dir: PathBuf,
    pub data_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            rows: 105,
            cols: 51,
            prior: PriorKind::Mesh,
            prior_file: None,
            mu0: [6960.0, 2.25],
            mu1: [5670.0, 1.80],
            sigma0: [180.0 * 180.0, 0.06 * 0.06, 0.0],
            sigma1: [180.0 * 180.0, 0.06 * 0.06, 0.0],
            corr_v_range: 3.0,
            corr_v_support: 12,
            corr_h_range: 10.0,
            corr_h_support: usize::MAX,
            aki_near: [0.5 / 6315.0, -0.1],
            aki_far: [0.5 / 6315.0, -0.4],
            sd_near: 0.03,
            sd_far: 0.03,
            noise_corr_range: 0.0,
            wavelet_near_file: None,
            wavelet_far_file: None,
            ricker_freq: 0.125,
            ricker_len: 7,
            nu: 8,
            sweeps: 5000,
            burn_in: 0,
            thin: 10,
            seed: 20080527,
            audit_every: 0,
            chains: 1,
            trace_columns: vec![15, 30, 45],
            contact_seeds: Vec::new(),
            connectivity_draws: 1,
            adjacency: Adjacency::Four,
            realizations: 4,
            out_dir: PathBuf::from("out"),
            data_file: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value for key '{key}': '{v}'")))
}

fn split_list(v: &str) -> Vec<&str> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_pair(key: &str, v: &str) -> Result<[f64; 2]> {
    let parts = split_list(v);
    if parts.len() != 2 {
        return Err(Error::Config(format!("key '{key}' needs 2 values, got '{v}'")));
    }
    Ok([parse_num(key, parts[0])?, parse_num(key, parts[1])?])
}

fn parse_triple(key: &str, v: &str) -> Result<[f64; 3]> {
    let parts = split_list(v);
    match parts.len() {
        2 => Ok([parse_num(key, parts[0])?, parse_num(key, parts[1])?, 0.0]),
        3 => Ok([
            parse_num(key, parts[0])?,
            parse_num(key, parts[1])?,
            parse_num(key, parts[2])?,
        ]),
        _ => Err(Error::Config(format!("key '{key}' needs 2 or 3 values, got '{v}'"))),
    }
}

impl RunConfig {
    /// Applies one `key=value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "rows" => self.rows = parse_num(key, v)?,
            "cols" => self.cols = parse_num(key, v)?,
            "prior" => {
                self.prior = match v {
                    "mesh" => PriorKind::Mesh,
                    "profile" => PriorKind::Profile,
                    other => {
                        return Err(Error::Config(format!(
                            "key 'prior' must be mesh or profile, got '{other}'"
                        )))
                    }
                }
            }
            "prior_file" => self.prior_file = Some(PathBuf::from(v)),
            "mu0" => self.mu0 = parse_pair(key, v)?,
            "mu1" => self.mu1 = parse_pair(key, v)?,
            "sigma0" => self.sigma0 = parse_triple(key, v)?,
            "sigma1" => self.sigma1 = parse_triple(key, v)?,
            "corr_v_range" => self.corr_v_range = parse_num(key, v)?,
            "corr_v_support" => self.corr_v_support = parse_num(key, v)?,
            "corr_h_range" => self.corr_h_range = parse_num(key, v)?,
            "corr_h_support" => self.corr_h_support = parse_num(key, v)?,
            "aki_near" => self.aki_near = parse_pair(key, v)?,
            "aki_far" => self.aki_far = parse_pair(key, v)?,
            "sd_near" => self.sd_near = parse_num(key, v)?,
            "sd_far" => self.sd_far = parse_num(key, v)?,
            "noise_corr_range" => self.noise_corr_range = parse_num(key, v)?,
            "wavelet_near_file" => self.wavelet_near_file = Some(PathBuf::from(v)),
            "wavelet_far_file" => self.wavelet_far_file = Some(PathBuf::from(v)),
            "ricker_freq" => self.ricker_freq = parse_num(key, v)?,
            "ricker_len" => self.ricker_len = parse_num(key, v)?,
            "nu" => self.nu = parse_num(key, v)?,
            "sweeps" => self.sweeps = parse_num(key, v)?,
            "burn_in" => self.burn_in = parse_num(key, v)?,
            "thin" => self.thin = parse_num(key, v)?,
            "seed" => self.seed = parse_num(key, v)?,
            "audit_every" => self.audit_every = parse_num(key, v)?,
            "chains" => self.chains = parse_num(key, v)?,
            "trace_columns" => {
                self.trace_columns = split_list(v)
                    .into_iter()
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?;
            }
            "contact_seeds" => {
                let parts = split_list(v);
                if !parts.len().is_multiple_of(2) {
                    return Err(Error::Config(
                        "key 'contact_seeds' needs i j pairs".into(),
                    ));
                }
                self.contact_seeds = parts
                    .chunks(2)
                    .map(|c| Ok((parse_num::<usize>(key, c[0])?, parse_num::<usize>(key, c[1])?)))
                    .collect::<Result<_>>()?;
            }
            "connectivity_draws" => self.connectivity_draws = parse_num(key, v)?,
            "adjacency" => {
                self.adjacency = match v {
                    "four" | "4" => Adjacency::Four,
                    "eight" | "8" => Adjacency::Eight,
                    other => {
                        return Err(Error::Config(format!(
                            "key 'adjacency' must be four or eight, got '{other}'"
                        )))
                    }
                }
            }
            "realizations" => self.realizations = parse_num(key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "data_file" => self.data_file = Some(PathBuf::from(v)),
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn from_str_cfg(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_str(text)?;
        Ok(cfg)
    }

    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_str_cfg(&text)
    }

    /// Every key with its effective value, re-readable by `from_str_cfg`.
    pub fn effective_string(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("rows", self.rows.to_string());
        kv("cols", self.cols.to_string());
        kv("prior", self.prior.as_str().to_string());
        if let Some(p) = &self.prior_file {
            kv("prior_file", p.display().to_string());
        }
        kv("mu0", format!("{} {}", self.mu0[0], self.mu0[1]));
        kv("mu1", format!("{} {}", self.mu1[0], self.mu1[1]));
        kv("sigma0", format!("{} {} {}", self.sigma0[0], self.sigma0[1], self.sigma0[2]));
        kv("sigma1", format!("{} {} {}", self.sigma1[0], self.sigma1[1], self.sigma1[2]));
        kv("corr_v_range", self.corr_v_range.to_string());
        kv("corr_v_support", self.corr_v_support.to_string());
        kv("corr_h_range", self.corr_h_range.to_string());
        kv("corr_h_support", self.corr_h_support.to_string());
        kv("aki_near", format!("{} {}", self.aki_near[0], self.aki_near[1]));
        kv("aki_far", format!("{} {}", self.aki_far[0], self.aki_far[1]));
        kv("sd_near", self.sd_near.to_string());
        kv("sd_far", self.sd_far.to_string());
        kv("noise_corr_range", self.noise_corr_range.to_string());
        if let Some(p) = &self.wavelet_near_file {
            kv("wavelet_near_file", p.display().to_string());
        }
        if let Some(p) = &self.wavelet_far_file {
            kv("wavelet_far_file", p.display().to_string());
        }
        kv("ricker_freq", self.ricker_freq.to_string());
        kv("ricker_len", self.ricker_len.to_string());
        kv("nu", self.nu.to_string());
        kv("sweeps", self.sweeps.to_string());
        kv("burn_in", self.burn_in.to_string());
        kv("thin", self.thin.to_string());
        kv("seed", self.seed.to_string());
        kv("audit_every", self.audit_every.to_string());
        kv("chains", self.chains.to_string());
        kv(
            "trace_columns",
            self.trace_columns.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
        );
        if !self.contact_seeds.is_empty() {
            kv(
                "contact_seeds",
                self.contact_seeds
                    .iter()
                    .map(|(i, j)| format!("{i} {j}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            );
        }
        kv("connectivity_draws", self.connectivity_draws.to_string());
        kv(
            "adjacency",
            match self.adjacency {
                Adjacency::Four => "four".to_string(),
                Adjacency::Eight => "eight".to_string(),
            },
        );
        kv("realizations", self.realizations.to_string());
        kv("out_dir", self.out_dir.display().to_string());
        if let Some(p) = &self.data_file {
            kv("data_file", p.display().to_string());
        }
        s
    }

    pub fn dims(&self) -> Result<GridDims> {
        GridDims::new(self.rows, self.cols)
    }

    pub fn load_prior(&self) -> Result<PriorModel> {
        match (self.prior, &self.prior_file) {
            (PriorKind::Mesh, None) => Ok(PriorModel::Mesh(MeshPriorSpec::load_builtin())),
            (PriorKind::Mesh, Some(p)) => Ok(PriorModel::Mesh(MeshPriorSpec::from_file(p)?)),
            (PriorKind::Profile, None) => {
                Ok(PriorModel::Profile(ProfileTransitionTable::load_default()))
            }
            (PriorKind::Profile, Some(p)) => {
                Ok(PriorModel::Profile(ProfileTransitionTable::from_file(p)?))
            }
        }
    }

    fn sigma_matrix(key: &str, s: &[f64; 3]) -> Result<Matrix2<f64>> {
        let m = Matrix2::new(s[0], s[2], s[2], s[1]);
        if s[0] <= 0.0 || s[1] <= 0.0 || s[2] * s[2] >= s[0] * s[1] {
            return Err(Error::Config(format!("{key} is not positive definite: {s:?}")));
        }
        Ok(m)
    }

    fn load_wavelet(&self, file: &Option<PathBuf>) -> Result<Wavelet> {
        match file {
            Some(p) => io::load_wavelet(p),
            None => crate::forward::ricker(self.ricker_freq, self.ricker_len),
        }
    }

    pub fn forward_model(&self) -> Result<ForwardModel> {
        let elastic = ElasticClassStats {
            mu0: Vector2::new(self.mu0[0], self.mu0[1]),
            mu1: Vector2::new(self.mu1[0], self.mu1[1]),
            sigma0: Self::sigma_matrix("sigma0", &self.sigma0)?,
            sigma1: Self::sigma_matrix("sigma1", &self.sigma1)?,
            corr_v: CorrFn::new(self.corr_v_range, self.corr_v_support)?,
            corr_h: CorrFn::new(self.corr_h_range, self.corr_h_support)?,
        };
        let noise = NoiseModel {
            sd_near: self.sd_near,
            sd_far: self.sd_far,
            corr_v: if self.noise_corr_range > 0.0 {
                Some(CorrFn::new(self.noise_corr_range, self.corr_v_support)?)
            } else {
                None
            },
        };
        let fm = ForwardModel {
            elastic,
            aki: AkiCoeffBlock { near: self.aki_near, far: self.aki_far },
            wavelet_near: self.load_wavelet(&self.wavelet_near_file)?,
            wavelet_far: self.load_wavelet(&self.wavelet_far_file)?,
            noise,
        };
        fm.validate(&self.dims()?)?;
        Ok(fm)
    }

    pub fn sampler_config(&self) -> SamplerConfig {
        let burn_in = if self.burn_in == 0 {
            self.sweeps / 5
        } else {
            self.burn_in
        };
        SamplerConfig {
            sweeps: self.sweeps,
            burn_in,
            thin: self.thin,
            nu: self.nu,
            seed: self.seed,
            audit_every: self.audit_every,
        }
    }
}

//! Command-line front end: prior simulation, synthetic experiments,
//! inversion, posterior analysis, and proposal-bandwidth tuning.

use crate::analysis::{
    connectivity_curve, contact_probability_map, marginal_map, mode_map, probability_histogram,
    write_curve_csv, write_histogram_csv, write_map_csv, write_trace_csv,
};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::forward::{sample_elastic, synthesize_data};
use crate::io;
use crate::lattice::LfcField;
use crate::likelihood::LikelihoodEngine;
use crate::sampler::{geweke_z, run_chain, tune_nu, RunResult};
use clap::{Parser, Subcommand};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "lfci", about = "Bayesian inversion of two-offset AVO data into binary class fields", version)]
pub struct Cli {
    /// Plain-text key=value config file.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Override single config keys, e.g. --set sweeps=200.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Draw independent prior realisations.
    SimulatePrior,
    /// Generate a synthetic truth, elastic field, and seismic cube.
    Synth,
    /// Run the column-block MH sampler against a seismic cube.
    Invert,
    /// Summarise a posterior sample stream.
    Analyze {
        /// Print the top-k marginal nodes as suggested contact seeds.
        #[arg(long, value_name = "K")]
        suggest_seeds: Option<usize>,
    },
    /// Pilot-run acceptance rates over proposal bandwidths.
    Tune {
        /// Candidate bandwidths.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6, 8])]
        candidates: Vec<usize>,
        /// Target acceptance rate.
        #[arg(long, default_value_t = 0.3)]
        target: f64,
        /// Sweeps per pilot run.
        #[arg(long, default_value_t = 20)]
        pilot_sweeps: usize,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    for kv in &cli.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--set needs KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v)?;
    }
    Ok(cfg)
}

fn prepare_out_dir(cfg: &RunConfig, command: &str) -> Result<()> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    std::fs::write(cfg.out_dir.join("effective_config.txt"), cfg.effective_string())?;
    let mut manifest = String::new();
    let _ = writeln!(manifest, "command={command}");
    let _ = writeln!(manifest, "seed={}", cfg.seed);
    std::fs::write(cfg.out_dir.join("manifest.txt"), manifest)?;
    Ok(())
}

fn cmd_simulate_prior(cfg: &RunConfig) -> Result<()> {
    let dims = cfg.dims()?;
    let prior = cfg.load_prior()?;
    let prior = prior.as_column_prior();
    let mut manifest = format!("command=simulate-prior\nprior={}\n", prior.label());
    for k in 0..cfg.realizations {
        let seed = cfg.seed.wrapping_add(k as u64);
        let field = prior.sample_initial(dims, seed)?;
        let name = format!("prior_{k:03}.txt");
        io::save_field(&field, &cfg.out_dir.join(&name))?;
        let _ = writeln!(manifest, "realization_{k}_seed={seed}");
        println!(
            "{name}: {}x{} sand fraction {:.4}",
            dims.rows(),
            dims.cols(),
            field.sand_count() as f64 / dims.len() as f64
        );
    }
    std::fs::write(cfg.out_dir.join("manifest.txt"), manifest)?;
    Ok(())
}

fn cmd_synth(cfg: &RunConfig) -> Result<()> {
    let dims = cfg.dims()?;
    let prior = cfg.load_prior()?;
    let fm = cfg.forward_model()?;
    let truth = prior.as_column_prior().sample_initial(dims, cfg.seed)?;
    let elastic_seed = cfg.seed.wrapping_add(1);
    let mfield = sample_elastic(&fm, &truth, elastic_seed)?;
    let cube = synthesize_data(&fm, &truth, elastic_seed)?;
    io::save_field(&truth, &cfg.out_dir.join("truth.txt"))?;
    io::save_elastic(&mfield, &cfg.out_dir.join("elastic.txt"))?;
    io::save_cube(&cube, &cfg.out_dir.join("cube.txt"))?;
    let manifest = format!(
        "command=synth\nprior={}\ntruth_seed={}\nelastic_seed={elastic_seed}\n",
        prior.as_column_prior().label(),
        cfg.seed
    );
    std::fs::write(cfg.out_dir.join("manifest.txt"), manifest)?;
    println!(
        "truth sand fraction {:.4}; cube written to {}",
        truth.sand_count() as f64 / dims.len() as f64,
        cfg.out_dir.join("cube.txt").display()
    );
    Ok(())
}

fn load_data(cfg: &RunConfig) -> Result<crate::forward::SeismicCube> {
    let path = cfg
        .data_file
        .clone()
        .unwrap_or_else(|| cfg.out_dir.join("cube.txt"));
    let cube = io::load_cube(&path)?;
    if cube.dims() != cfg.dims()? {
        return Err(Error::Usage(format!(
            "cube {} is {}x{}, config wants {}x{}",
            path.display(),
            cube.dims().rows(),
            cube.dims().cols(),
            cfg.rows,
            cfg.cols
        )));
    }
    Ok(cube)
}

fn write_run_outputs(cfg: &RunConfig, chain_idx: usize, run: &RunResult) -> Result<()> {
    let dir = cfg.out_dir.join(format!("stream/chain{chain_idx:02}"));
    std::fs::create_dir_all(&dir)?;
    for (k, s) in run.samples.iter().enumerate() {
        io::save_field(s, &dir.join(format!("sample_{k:05}.txt")))?;
    }
    let mut trace = String::from("sweep,log_prior,log_lik,sand_fraction,accept_rate\n");
    for row in &run.trace {
        let _ = writeln!(
            trace,
            "{},{},{},{},{}",
            row.sweep, row.log_prior, row.log_lik, row.sand_fraction, row.accept_rate
        );
    }
    std::fs::write(dir.join("trace.csv"), trace)?;
    let sand: Vec<f64> = run.trace.iter().map(|r| r.sand_fraction).collect();
    let z = geweke_z(&sand, 0.1, 0.5);
    let mut diag = String::new();
    let _ = writeln!(diag, "accept_rate={}", run.accept_rate);
    let _ = writeln!(
        diag,
        "geweke_z_sand_fraction={}",
        z.map(|v| v.to_string()).unwrap_or_else(|| "na".into())
    );
    let _ = writeln!(diag, "retained_samples={}", run.samples.len());
    std::fs::write(dir.join("diagnostics.txt"), diag)?;
    Ok(())
}

fn cmd_invert(cfg: &RunConfig) -> Result<()> {
    let dims = cfg.dims()?;
    let data = load_data(cfg)?;
    let fm = cfg.forward_model()?;
    let engine = LikelihoodEngine::build(&fm, dims)?;
    let prior = cfg.load_prior()?;
    let prior = prior.as_column_prior();
    for c in 0..cfg.chains.max(1) {
        let mut scfg = cfg.sampler_config();
        scfg.seed = scfg.seed.wrapping_add((c as u64) << 32);
        let run = run_chain(prior, Some((&engine, &data)), dims, &scfg)?;
        write_run_outputs(cfg, c, &run)?;
        println!(
            "chain {c}: accept rate {:.3}, {} samples retained",
            run.accept_rate,
            run.samples.len()
        );
    }
    Ok(())
}

fn read_stream(dir: &Path) -> Result<Vec<LfcField>> {
    let mut paths = Vec::new();
    let chain_dirs = std::fs::read_dir(dir)
        .map_err(|e| Error::Usage(format!("cannot read stream dir {}: {e}", dir.display())))?;
    let mut chains: Vec<PathBuf> = chain_dirs
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    chains.sort();
    for chain in chains {
        let mut samples: Vec<PathBuf> = std::fs::read_dir(&chain)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .map(|n| n.starts_with("sample_"))
                    .unwrap_or(false)
            })
            .collect();
        samples.sort();
        paths.extend(samples);
    }
    if paths.is_empty() {
        return Err(Error::Usage(format!("no samples under {}", dir.display())));
    }
    paths.iter().map(|p| io::load_field(p)).collect()
}

fn cmd_analyze(cfg: &RunConfig, suggest_seeds: Option<usize>) -> Result<()> {
    let stream_dir = cfg.out_dir.join("stream");
    let samples = read_stream(&stream_dir)?;
    let out = &cfg.out_dir;
    let marginal = marginal_map(&samples)?;
    write_map_csv(&marginal, &out.join("marginal.csv"))?;
    std::fs::write(
        out.join("marginal.pgm"),
        io::write_probability_pgm(marginal.dims(), marginal.probs()),
    )?;
    io::save_field(&mode_map(&marginal), &out.join("mode.txt"))?;
    for &j in &cfg.trace_columns {
        if j >= 1 && j <= marginal.dims().cols() {
            write_trace_csv(&marginal, j, &out.join(format!("trace_j{j}.csv")))?;
        }
    }
    for &(i, j) in &cfg.contact_seeds {
        let map = contact_probability_map(&samples, (i, j), cfg.adjacency)?;
        write_map_csv(&map, &out.join(format!("contact_{i}_{j}.csv")))?;
        std::fs::write(
            out.join(format!("contact_{i}_{j}.pgm")),
            io::write_probability_pgm(map.dims(), map.probs()),
        )?;
    }
    let curve = connectivity_curve(&samples, cfg.seed, cfg.connectivity_draws, cfg.adjacency)?;
    write_curve_csv(&curve, &out.join("connectivity_curve.csv"))?;
    let hist = probability_histogram(&marginal, 20);
    write_histogram_csv(&hist, &out.join("marginal_hist.csv"))?;
    if let Some(k) = suggest_seeds {
        let dims = marginal.dims();
        let mut nodes: Vec<_> = dims.nodes().collect();
        nodes.sort_by(|&a, &b| marginal.get(b).total_cmp(&marginal.get(a)).then(a.cmp(&b)));
        println!("suggested contact seeds (top {k} marginal nodes):");
        for node in nodes.into_iter().take(k) {
            println!("  {} {}  p={:.4}", node.0, node.1, marginal.get(node));
        }
    }
    println!("{} samples summarised into {}", samples.len(), out.display());
    Ok(())
}

fn cmd_tune(cfg: &RunConfig, candidates: &[usize], target: f64, pilot_sweeps: usize) -> Result<()> {
    let dims = cfg.dims()?;
    let data = load_data(cfg)?;
    let fm = cfg.forward_model()?;
    let engine = LikelihoodEngine::build(&fm, dims)?;
    let prior = cfg.load_prior()?;
    let (chosen, entries) =
        tune_nu(prior.as_column_prior(), (&engine, &data), dims, candidates, pilot_sweeps, target, cfg.seed)?;
    let mut csv = String::from("nu,accept_rate\n");
    println!("nu  accept_rate");
    for e in &entries {
        let _ = writeln!(csv, "{},{}", e.nu, e.accept_rate);
        println!("{:<3} {:.3}", e.nu, e.accept_rate);
    }
    let _ = writeln!(csv, "chosen,{chosen}");
    std::fs::write(cfg.out_dir.join("tune.csv"), csv)?;
    println!("chosen nu = {chosen}");
    Ok(())
}

/// Runs the parsed command; the binary maps errors to exit codes.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let name = match &cli.command {
        Command::SimulatePrior => "simulate-prior",
        Command::Synth => "synth",
        Command::Invert => "invert",
        Command::Analyze { .. } => "analyze",
        Command::Tune { .. } => "tune",
    };
    prepare_out_dir(&cfg, name)?;
    match &cli.command {
        Command::SimulatePrior => cmd_simulate_prior(&cfg),
        Command::Synth => cmd_synth(&cfg),
        Command::Invert => cmd_invert(&cfg),
        Command::Analyze { suggest_seeds } => cmd_analyze(&cfg, *suggest_seeds),
        Command::Tune { candidates, target, pilot_sweeps } => {
            cmd_tune(&cfg, candidates, *target, *pilot_sweeps)
        }
    }
}

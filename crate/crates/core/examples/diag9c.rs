//! Scratch diagnostic: is the sand-rich profile state actually preferred
//! by the posterior, or is the chain trapped?

use lfci::config::RunConfig;
use lfci::forward::synthesize_data;
use lfci::lattice::GridDims;
use lfci::likelihood::LikelihoodEngine;
use lfci::mesh_prior::MeshPriorSpec;
use lfci::profile_prior::ProfileTransitionTable;
use lfci::sampler::{run_chain, ColumnPrior, SamplerConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let sweeps: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1000);
    let sd: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.02);
    let escale: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let mut cfg = RunConfig::default();
    cfg.sd_near = sd;
    cfg.sd_far = sd;
    for v in cfg.sigma0.iter_mut().chain(cfg.sigma1.iter_mut()) {
        *v *= escale * escale;
    }
    let dims = GridDims::new(cfg.rows, cfg.cols).unwrap();
    let fm = cfg.forward_model().unwrap();
    let mesh = MeshPriorSpec::load_builtin();
    let profile = ProfileTransitionTable::load_default();
    let truth = mesh.simulate(dims, cfg.seed);
    let cube = synthesize_data(&fm, &truth, cfg.seed.wrapping_add(1)).unwrap();
    let engine = LikelihoodEngine::build(&fm, dims).unwrap();
    let scfg = SamplerConfig {
        sweeps,
        burn_in: 2 * sweeps / 5,
        thin: 10,
        nu: cfg.nu,
        seed: cfg.seed,
        audit_every: 0,
    };
    let run = run_chain(&profile, Some((&engine, &cube)), dims, &scfg).unwrap();
    let fin = &run.final_field;
    let ll_truth = engine.log_likelihood(&truth, &cube).unwrap();
    let ll_fin = engine.log_likelihood(fin, &cube).unwrap();
    let pr_truth = profile.log_density(&truth).unwrap();
    let pr_fin = profile.log_density(fin).unwrap();
    println!("truth:  loglik={ll_truth:.1} pseudo_prior={pr_truth:.1} sum={:.1}", ll_truth + pr_truth);
    println!("final:  loglik={ll_fin:.1} pseudo_prior={pr_fin:.1} sum={:.1}", ll_fin + pr_fin);
    println!(
        "final frac={:.3} truth frac={:.3} accept={:.3}",
        fin.sand_count() as f64 / dims.len() as f64,
        truth.sand_count() as f64 / dims.len() as f64,
        run.accept_rate
    );
}

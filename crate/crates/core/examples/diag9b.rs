//! Scratch diagnostic: visualise truth vs posterior mode maps.

use lfci::analysis::{marginal_map, mode_map};
use lfci::config::RunConfig;
use lfci::forward::synthesize_data;
use lfci::lattice::{GridDims, LfcField};
use lfci::likelihood::LikelihoodEngine;
use lfci::mesh_prior::MeshPriorSpec;
use lfci::profile_prior::ProfileTransitionTable;
use lfci::sampler::{run_chain, SamplerConfig};

fn render(label: &str, field: &LfcField) {
    println!("--- {label} ---");
    let dims = field.dims();
    for i in 1..=dims.rows() {
        let line: String =
            (1..=dims.cols()).map(|j| if field.get((i, j)) == 1 { '#' } else { '.' }).collect();
        println!("{line}");
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let sweeps: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1500);
    let mut cfg = RunConfig::default();
    if let Some(sd) = args.get(2) {
        let sd: f64 = sd.parse().unwrap();
        cfg.sd_near = sd;
        cfg.sd_far = sd;
    }
    if let Some(es) = args.get(3) {
        let es: f64 = es.parse().unwrap();
        for v in cfg.sigma0.iter_mut().chain(cfg.sigma1.iter_mut()) {
            *v *= es * es;
        }
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
    let run_mesh = run_chain(&mesh, Some((&engine, &cube)), dims, &scfg).unwrap();
    let run_prof = run_chain(&profile, Some((&engine, &cube)), dims, &scfg).unwrap();
    render("truth", &truth);
    render("mesh mode", &mode_map(&marginal_map(&run_mesh.samples).unwrap()));
    render("profile mode", &mode_map(&marginal_map(&run_prof.samples).unwrap()));
}

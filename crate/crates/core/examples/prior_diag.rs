//! Scratch diagnostic: component structure of raw prior draws.

use lfci::analysis::{component_mask, Adjacency};
use lfci::config::RunConfig;
use lfci::lattice::{GridDims, LfcField};
use lfci::mesh_prior::MeshPriorSpec;
use lfci::profile_prior::ProfileTransitionTable;
use lfci::sampler::{run_chain, SamplerConfig};

fn stats(field: &LfcField) -> (f64, usize) {
    let dims = field.dims();
    let mut seen = vec![false; dims.len()];
    let mut maxc = 0usize;
    for i in 1..=dims.rows() {
        for j in 1..=dims.cols() {
            let idx = dims.linear((i, j));
            if field.get((i, j)) == 1 && !seen[idx] {
                let mask = component_mask(field, (i, j), Adjacency::Four);
                let size = mask.iter().filter(|&&b| b).count();
                for (s, &b) in seen.iter_mut().zip(mask.iter()) {
                    *s |= b;
                }
                maxc = maxc.max(size);
            }
        }
    }
    let frac = field.sand_count() as f64 / dims.len() as f64;
    (frac, maxc)
}

fn main() {
    let cfg = RunConfig::default();
    let dims = GridDims::new(cfg.rows, cfg.cols).unwrap();
    let mesh = MeshPriorSpec::load_builtin();
    let profile = ProfileTransitionTable::load_default();
    for k in 0..6 {
        let f = mesh.simulate(dims, cfg.seed + k);
        let (frac, maxc) = stats(&f);
        println!("mesh draw {k}: frac={frac:.3} max_comp={maxc}");
    }
    let scfg = SamplerConfig {
        sweeps: 2000,
        burn_in: 500,
        thin: 250,
        nu: 1,
        seed: cfg.seed,
        audit_every: 0,
    };
    let run = run_chain(&profile, None, dims, &scfg).unwrap();
    for (k, f) in run.samples.iter().enumerate() {
        let (frac, maxc) = stats(f);
        println!("profile draw {k}: frac={frac:.3} max_comp={maxc}");
    }
}

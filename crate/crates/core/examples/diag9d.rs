//! Scratch diagnostic: in a converged profile-chain state, is replacing a
//! column by the truth column favored by the exact posterior ratio?

use lfci::config::RunConfig;
use lfci::forward::synthesize_data;
use lfci::lattice::GridDims;
use lfci::likelihood::LikelihoodEngine;
use lfci::mesh_prior::MeshPriorSpec;
use lfci::profile_prior::ProfileTransitionTable;
use lfci::sampler::{run_chain, ColumnPrior, SamplerConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let sweeps: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(800);
    let sd: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.02);
    let nu: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(8);
    let wavelen: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(7);
    let escale: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let ch: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(10.0);
    let cvs: usize = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(8);
    let cvr: f64 = args.get(8).map(|s| s.parse().unwrap()).unwrap_or(1.5);
    let mut cfg = RunConfig::default();
    cfg.sd_near = sd;
    cfg.sd_far = sd;
    cfg.nu = nu;
    cfg.ricker_len = wavelen;
    cfg.corr_h_range = ch;
    cfg.corr_v_support = cvs;
    cfg.corr_v_range = cvr;
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
        burn_in: sweeps / 2,
        thin: 50,
        nu: cfg.nu,
        seed: cfg.seed,
        audit_every: 0,
    };
    let run = run_chain(&profile, Some((&engine, &cube)), dims, &scfg).unwrap();
    let mut field = run.final_field.clone();
    let mut state = engine.init_state(&field, &cube).unwrap();
    // Rank columns by how much spurious sand they carry.
    let mut worst: Vec<(usize, usize)> = (1..=dims.cols())
        .map(|j| {
            let excess = (1..=dims.rows())
                .filter(|&i| field.get((i, j)) == 1 && truth.get((i, j)) == 0)
                .count();
            (excess, j)
        })
        .collect();
    worst.sort_unstable_by(|a, b| b.cmp(a));
    println!("final frac={:.3}", field.sand_count() as f64 / dims.len() as f64);
    for &(excess, j) in worst.iter().take(8) {
        let cur = field.column(j);
        let tru = truth.column(j);
        if cur == tru {
            continue;
        }
        let chain = profile.column_conditional(&field, j).unwrap();
        let a = nalgebra::DVector::from_fn(dims.rows(), |i, _| tru[i] as f64 - cur[i] as f64);
        let dll = engine.column_delta(&state, j, &a);
        let dpr = chain.log_prob(&tru) - chain.log_prob(&cur);
        // Pure excess-removal move: keep the column's correct sand, delete
        // only the sand that truth says is shale.
        let strip: Vec<u8> =
            (0..dims.rows()).map(|i| if tru[i] == 0 { 0 } else { cur[i] }).collect();
        let b = nalgebra::DVector::from_fn(dims.rows(), |i, _| strip[i] as f64 - cur[i] as f64);
        let dll_s = engine.column_delta(&state, j, &b);
        let dpr_s = chain.log_prob(&strip) - chain.log_prob(&cur);
        println!(
            "col {j}: excess {excess} truth-replace d_post={:.1} (pr {dpr:.1} ll {dll:.1}); strip d_post={:.1} (pr {dpr_s:.1} ll {dll_s:.1})",
            dpr + dll,
            dpr_s + dll_s
        );
    }
    // Greedy: repeatedly apply any truth-column replacement with positive
    // exact posterior gain, to see how far the landscape lets us descend.
    let mut improved = true;
    let mut applied = 0usize;
    while improved {
        improved = false;
        for j in 1..=dims.cols() {
            let cur = field.column(j);
            let tru = truth.column(j);
            if cur == tru {
                continue;
            }
            let chain = profile.column_conditional(&field, j).unwrap();
            let a =
                nalgebra::DVector::from_fn(dims.rows(), |i, _| tru[i] as f64 - cur[i] as f64);
            let dll = engine.column_delta(&state, j, &a);
            let dpr = chain.log_prob(&tru) - chain.log_prob(&cur);
            if dpr + dll > 0.0 {
                field.set_column(j, &tru);
                engine.apply_column(&mut state, j, &a, dll);
                applied += 1;
                improved = true;
            }
        }
    }
    println!(
        "greedy truth-replacements applied: {applied}; final frac={:.3}",
        field.sand_count() as f64 / dims.len() as f64
    );
}

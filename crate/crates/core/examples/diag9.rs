//! Scratch diagnostic for the full-size synthetic experiment; prints the
//! qualitative metrics at a configurable sweep count.

use lfci::analysis::{connectivity_curve, marginal_map, probability_histogram, Adjacency};
use lfci::config::RunConfig;
use lfci::forward::synthesize_data;
use lfci::lattice::GridDims;
use lfci::likelihood::LikelihoodEngine;
use lfci::mesh_prior::MeshPriorSpec;
use lfci::profile_prior::ProfileTransitionTable;
use lfci::sampler::{run_chain, SamplerConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let sweeps: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(800);
    let sd: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.02);
    let nu: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(6);
    let wavelen: usize = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(11);
    let mut cfg = RunConfig::default();
    cfg.sd_near = sd;
    cfg.sd_far = sd;
    cfg.nu = nu;
    cfg.ricker_len = wavelen;
    let escale: f64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    for v in cfg.sigma0.iter_mut().chain(cfg.sigma1.iter_mut()) {
        *v *= escale * escale;
    }
    if let Some(ch) = args.get(6) {
        cfg.corr_h_range = ch.parse().unwrap();
    }
    if let Some(vs) = args.get(7) {
        cfg.corr_v_support = vs.parse().unwrap();
    }
    if let Some(vr) = args.get(8) {
        cfg.corr_v_range = vr.parse().unwrap();
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
        thin: 10.min(sweeps / 20).max(1),
        nu: cfg.nu,
        seed: cfg.seed,
        audit_every: 0,
    };
    let t0 = std::time::Instant::now();
    let run_mesh = run_chain(&mesh, Some((&engine, &cube)), dims, &scfg).unwrap();
    let t_mesh = t0.elapsed();
    let run_prof = run_chain(&profile, Some((&engine, &cube)), dims, &scfg).unwrap();
    let map_mesh = marginal_map(&run_mesh.samples).unwrap();
    let map_prof = marginal_map(&run_prof.samples).unwrap();

    let close = map_mesh
        .probs()
        .iter()
        .zip(map_prof.probs())
        .filter(|(a, b)| (*a - *b).abs() <= 0.15)
        .count() as f64
        / dims.len() as f64;

    for adj in [Adjacency::Four, Adjacency::Eight] {
        let cm = connectivity_curve(&run_mesh.samples, 9, 1, adj).unwrap();
        let cp = connectivity_curve(&run_prof.samples, 9, 1, adj).unwrap();
        let me = cm.points.len().max(cp.points.len());
        let val = |pts: &[(usize, f64)], eta: usize| {
            pts.iter().find(|(e, _)| *e == eta).map(|(_, p)| *p).unwrap_or(0.0)
        };
        let ab = (0..me)
            .filter(|&e| val(&cm.points, e) >= val(&cp.points, e) - 1e-9)
            .count() as f64
            / me as f64;
        println!(
            "adjacency {adj:?}: mesh above {ab:.4} (mesh_max {} prof_max {})",
            cm.points.len(),
            cp.points.len()
        );
    }
    let curve_mesh = connectivity_curve(&run_mesh.samples, 9, 1, Adjacency::Four).unwrap();
    let curve_prof = connectivity_curve(&run_prof.samples, 9, 1, Adjacency::Four).unwrap();
    let value = |pts: &[(usize, f64)], eta: usize| {
        pts.iter().find(|(e, _)| *e == eta).map(|(_, p)| *p).unwrap_or(0.0)
    };
    let max_eta = curve_mesh.points.len().max(curve_prof.points.len());
    let above = (0..max_eta)
        .filter(|&e| value(&curve_mesh.points, e) >= value(&curve_prof.points, e) - 1e-9)
        .count() as f64
        / max_eta as f64;

    let outer = |map: &lfci::analysis::MarginalMap| {
        let h = probability_histogram(map, 20);
        let total: usize = h.iter().map(|x| x.2).sum();
        (h[0].2 + h[19].2) as f64 / total as f64
    };
    println!("sweeps={sweeps} sd={sd} mesh_time={t_mesh:?}");
    println!(
        "accept mesh={:.3} prof={:.3}; truth sand frac={:.3}",
        run_mesh.accept_rate,
        run_prof.accept_rate,
        truth.sand_count() as f64 / dims.len() as f64
    );
    println!("(i) frac nodes within 0.15: {close:.4}");
    println!("(ii) mesh curve above frac: {above:.4} (max_eta {max_eta})");
    println!("(iii) outer mass mesh={:.4} prof={:.4}", outer(&map_mesh), outer(&map_prof));
    for (label, run) in [("mesh", &run_mesh), ("prof", &run_prof)] {
        let frac: Vec<String> = run
            .trace
            .iter()
            .step_by((sweeps / 20).max(1))
            .map(|t| format!("{:.2}", t.sand_fraction))
            .collect();
        println!("{label} sand frac trace: {}", frac.join(" "));
    }
    let eta_probe = [0usize, 50, 100, 200, 400, 800, 1200, 1600];
    for e in eta_probe {
        println!(
            "  curve eta={e}: mesh={:.3} prof={:.3}",
            value(&curve_mesh.points, e),
            value(&curve_prof.points, e)
        );
    }
}

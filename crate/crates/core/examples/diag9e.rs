//! Scratch diagnostic: scan mesh-prior truth seeds for slab-hosting
//! geometry (same-column shale gaps of bridgeable length between sand
//! bodies) and overall component structure.

use lfci::analysis::{component_mask, Adjacency};
use lfci::lattice::GridDims;
use lfci::mesh_prior::MeshPriorSpec;

fn main() {
    let dims = GridDims::new(105, 51).unwrap();
    let mesh = MeshPriorSpec::load_builtin();
    let mut rows: Vec<(usize, u64, f64, usize, usize)> = Vec::new();
    for seed in 0u64..120 {
        let truth = mesh.simulate(dims, seed);
        let frac = truth.sand_count() as f64 / dims.len() as f64;
        // Slab capacity: total length of interior shale runs of length
        // 6..=45 bounded by sand in the same column.
        let mut slab = 0usize;
        for j in 1..=dims.cols() {
            let col = truth.column(j);
            let mut i = 0usize;
            while i < col.len() {
                if col[i] == 0 {
                    let start = i;
                    while i < col.len() && col[i] == 0 {
                        i += 1;
                    }
                    let len = i - start;
                    if start > 0 && i < col.len() && (6..=45).contains(&len) {
                        slab += len;
                    }
                } else {
                    i += 1;
                }
            }
        }
        // Largest 4-connected sand component.
        let mut best = 0usize;
        let mut seen = vec![false; dims.len()];
        for i in 1..=dims.rows() {
            for j in 1..=dims.cols() {
                let idx = dims.linear((i, j));
                if truth.get((i, j)) == 1 && !seen[idx] {
                    let mask = component_mask(&truth, (i, j), Adjacency::Four);
                    let size = mask.iter().filter(|&&b| b).count();
                    for (s, &b) in seen.iter_mut().zip(mask.iter()) {
                        if b {
                            *s = true;
                        }
                    }
                    best = best.max(size);
                }
            }
        }
        rows.push((slab, seed, frac, best, truth.sand_count()));
    }
    rows.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    for &(slab, seed, frac, best, sand) in rows.iter().take(15) {
        println!("seed {seed}: slab {slab} frac {frac:.3} maxcomp {best} sand {sand}");
    }
    println!("-- worst --");
    for &(slab, seed, frac, best, sand) in rows.iter().rev().take(3) {
        println!("seed {seed}: slab {slab} frac {frac:.3} maxcomp {best} sand {sand}");
    }
}

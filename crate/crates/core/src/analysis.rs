//! Posterior summaries over streams of sampled class fields: marginal
//! and mode maps, connected-component contact probabilities, the
//! connectivity curve, and histogram/trace exports.

use crate::error::{Error, Result};
use crate::lattice::{GridDims, LfcField, Node};
use crate::util::seed_stream;
use rand::Rng;
use std::collections::VecDeque;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Per-node sand probabilities estimated as sample fractions.
#[derive(Debug, Clone)]
pub struct MarginalMap {
    dims: GridDims,
    probs: Vec<f64>,
}

impl MarginalMap {
    pub fn from_probs(dims: GridDims, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != dims.len() {
            return Err(Error::Usage("probability vector does not match dims".into()));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain("marginal probabilities must lie in [0,1]".into()));
        }
        Ok(MarginalMap { dims, probs })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn get(&self, node: Node) -> f64 {
        self.probs[self.dims.linear(node)]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// One column of probabilities, top row first.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (1..=self.dims.rows()).map(|i| self.get((i, j))).collect()
    }
}

fn check_stream(samples: &[LfcField]) -> Result<GridDims> {
    let first = samples
        .first()
        .ok_or_else(|| Error::Usage("empty sample stream".into()))?;
    let dims = first.dims();
    if samples.iter().any(|s| s.dims() != dims) {
        return Err(Error::Usage("sample stream has mixed dims".into()));
    }
    Ok(dims)
}

/// Integer sand counts per node over the stream; the deterministic core
/// shared by the parallel and sequential marginal maps.
fn sand_counts(samples: &[LfcField], dims: GridDims) -> Vec<u64> {
    let fold = |acc: Vec<u64>, s: &LfcField| {
        let mut acc = acc;
        for (a, &v) in acc.iter_mut().zip(s.values()) {
            *a += v as u64;
        }
        acc
    };
    #[cfg(feature = "parallel")]
    {
        samples
            .par_iter()
            .fold(|| vec![0u64; dims.len()], fold)
            .reduce(
                || vec![0u64; dims.len()],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
    }
    #[cfg(not(feature = "parallel"))]
    {
        samples.iter().fold(vec![0u64; dims.len()], fold)
    }
}

pub fn marginal_map(samples: &[LfcField]) -> Result<MarginalMap> {
    let dims = check_stream(samples)?;
    let counts = sand_counts(samples, dims);
    let total = samples.len() as f64;
    MarginalMap::from_probs(dims, counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Single-threaded marginal map; same integer-count core, used by the
/// benches to compare against the parallel path.
pub fn marginal_map_seq(samples: &[LfcField]) -> Result<MarginalMap> {
    let dims = check_stream(samples)?;
    let mut counts = vec![0u64; dims.len()];
    for s in samples {
        for (a, &v) in counts.iter_mut().zip(s.values()) {
            *a += v as u64;
        }
    }
    let total = samples.len() as f64;
    MarginalMap::from_probs(dims, counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Most-probable class per node; the p = 0.5 tie goes to shale.
pub fn mode_map(marginal: &MarginalMap) -> LfcField {
    let mut field = LfcField::zeros(marginal.dims());
    for node in marginal.dims().nodes() {
        if marginal.get(node) > 0.5 {
            field.set(node, 1);
        }
    }
    field
}

/// Node adjacency used for sand connectivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adjacency {
    Four,
    Eight,
}

impl Adjacency {
    fn offsets(self) -> &'static [(i64, i64)] {
        match self {
            Adjacency::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
            Adjacency::Eight => &[
                (-1, 0),
                (1, 0),
                (0, -1),
                (0, 1),
                (-1, -1),
                (-1, 1),
                (1, -1),
                (1, 1),
            ],
        }
    }
}

/// Per-node membership mask of the sand component containing `seed`;
/// all-false when the seed is shale.
pub fn component_mask(field: &LfcField, seed: Node, adj: Adjacency) -> Vec<bool> {
    let dims = field.dims();
    let mut mask = vec![false; dims.len()];
    if !dims.contains(seed) || field.get(seed) != 1 {
        return mask;
    }
    let mut queue = VecDeque::new();
    mask[dims.linear(seed)] = true;
    queue.push_back(seed);
    while let Some((i, j)) = queue.pop_front() {
        for (di, dj) in adj.offsets() {
            let (ni, nj) = (i as i64 + di, j as i64 + dj);
            if ni < 1 || nj < 1 || ni > dims.rows() as i64 || nj > dims.cols() as i64 {
                continue;
            }
            let node = (ni as usize, nj as usize);
            let idx = dims.linear(node);
            if !mask[idx] && field.get(node) == 1 {
                mask[idx] = true;
                queue.push_back(node);
            }
        }
    }
    mask
}

/// The sand component containing `seed`, in row-major node order.
pub fn connected_component(field: &LfcField, seed: Node, adj: Adjacency) -> Vec<Node> {
    let dims = field.dims();
    component_mask(field, seed, adj)
        .into_iter()
        .enumerate()
        .filter(|(_, hit)| *hit)
        .map(|(idx, _)| dims.node_at(idx))
        .collect()
}

/// Per-node fraction of samples in which the node is sand-connected to
/// `seed`.
pub fn contact_probability_map(
    samples: &[LfcField],
    seed: Node,
    adj: Adjacency,
) -> Result<MarginalMap> {
    let dims = check_stream(samples)?;
    if !dims.contains(seed) {
        return Err(Error::Usage(format!("contact seed {seed:?} outside the lattice")));
    }
    let count_one = |s: &LfcField| -> Vec<u64> {
        component_mask(s, seed, adj).into_iter().map(u64::from).collect()
    };
    let counts: Vec<u64> = {
        #[cfg(feature = "parallel")]
        {
            samples
                .par_iter()
                .map(count_one)
                .reduce(
                    || vec![0u64; dims.len()],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                )
        }
        #[cfg(not(feature = "parallel"))]
        {
            samples.iter().map(count_one).fold(vec![0u64; dims.len()], |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            })
        }
    };
    let total = samples.len() as f64;
    MarginalMap::from_probs(dims, counts.into_iter().map(|c| c as f64 / total).collect())
}

/// Probability of a random sand node being connected to at least eta
/// other sand nodes, as a function of eta.
#[derive(Debug, Clone)]
pub struct ConnectivityCurve {
    /// (eta, probability) pairs, probability non-increasing in eta.
    pub points: Vec<(usize, f64)>,
}

fn curve_from_counts(counts: &[usize], pairs: usize) -> ConnectivityCurve {
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let mut points = Vec::with_capacity(max_count + 2);
    for eta in 0..=max_count + 1 {
        let hits = counts.iter().filter(|&&c| c >= eta).count();
        points.push((eta, hits as f64 / pairs.max(1) as f64));
    }
    ConnectivityCurve { points }
}

/// Monte Carlo curve: per sample, draw uniform sand nodes and record the
/// size of each drawn node's component minus one. Samples without sand
/// contribute pairs that fail every eta.
pub fn connectivity_curve(
    samples: &[LfcField],
    seed: u64,
    draws_per_sample: usize,
    adj: Adjacency,
) -> Result<ConnectivityCurve> {
    check_stream(samples)?;
    if draws_per_sample == 0 {
        return Err(Error::Usage("draws_per_sample must be positive".into()));
    }
    let per_sample = |(idx, s): (usize, &LfcField)| -> Vec<usize> {
        let dims = s.dims();
        let sand: Vec<Node> = dims.nodes().filter(|&nd| s.get(nd) == 1).collect();
        let mut rng = seed_stream(seed, idx as u64);
        (0..draws_per_sample)
            .map(|_| {
                if sand.is_empty() {
                    return 0;
                }
                let node = sand[rng.gen_range(0..sand.len())];
                component_mask(s, node, adj).iter().filter(|&&b| b).count() - 1
            })
            .collect()
    };
    let counts: Vec<usize> = {
        #[cfg(feature = "parallel")]
        {
            samples.par_iter().enumerate().flat_map_iter(per_sample).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            samples.iter().enumerate().flat_map(per_sample).collect()
        }
    };
    // An empty sample yields "0 other nodes", which must also fail eta = 0;
    // encode that by removing those pairs from the hit side but keeping
    // them in the denominator.
    let pairs = counts.len();
    let mut curve = curve_from_counts(&counts, pairs);
    let empty_pairs: usize = samples
        .iter()
        .filter(|s| s.sand_count() == 0)
        .count()
        * draws_per_sample;
    if empty_pairs > 0 {
        for (eta, p) in curve.points.iter_mut() {
            if *eta == 0 {
                *p -= empty_pairs as f64 / pairs as f64;
            }
        }
    }
    Ok(curve)
}

/// Exhaustive curve using every sand node of every sample once; the
/// deterministic reference for the Monte Carlo version.
pub fn connectivity_curve_exhaustive(
    samples: &[LfcField],
    adj: Adjacency,
) -> Result<ConnectivityCurve> {
    check_stream(samples)?;
    let mut counts = Vec::new();
    for s in samples {
        for node in s.dims().nodes() {
            if s.get(node) == 1 {
                counts.push(component_mask(s, node, adj).iter().filter(|&&b| b).count() - 1);
            }
        }
    }
    let pairs = counts.len();
    Ok(curve_from_counts(&counts, pairs))
}

/// Equal-width histogram of marginal probabilities over [0,1]; p = 1
/// falls in the last bin.
pub fn probability_histogram(map: &MarginalMap, bins: usize) -> Vec<(f64, f64, usize)> {
    let bins = bins.max(1);
    let width = 1.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &p in map.probs() {
        let b = ((p / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(b, c)| (b as f64 * width, (b + 1) as f64 * width, c))
        .collect()
}

pub fn write_map_csv(map: &MarginalMap, path: &Path) -> Result<()> {
    let mut out = String::from("i,j,p\n");
    for node in map.dims().nodes() {
        out.push_str(&format!("{},{},{}\n", node.0, node.1, map.get(node)));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_trace_csv(map: &MarginalMap, j: usize, path: &Path) -> Result<()> {
    if j < 1 || j > map.dims().cols() {
        return Err(Error::Usage(format!("trace column {j} outside the lattice")));
    }
    let mut out = String::from("i,p\n");
    for (i, p) in map.column(j).iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, p));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_curve_csv(curve: &ConnectivityCurve, path: &Path) -> Result<()> {
    let mut out = String::from("eta,p\n");
    for (eta, p) in &curve.points {
        out.push_str(&format!("{eta},{p}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_histogram_csv(hist: &[(f64, f64, usize)], path: &Path) -> Result<()> {
    let mut out = String::from("lo,hi,count\n");
    for (lo, hi, c) in hist {
        out.push_str(&format!("{lo},{hi},{c}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_from(dims: GridDims, rows: &[&[u8]]) -> LfcField {
        let mut f = LfcField::zeros(dims);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                f.set((i + 1, j + 1), v);
            }
        }
        f
    }

    #[test]
    fn marginal_identical_samples() {
        let dims = GridDims::new(2, 2).unwrap();
        let f = field_from(dims, &[&[1, 0], &[0, 1]]);
        let map = marginal_map(&[f.clone(), f.clone()]).unwrap();
        assert_eq!(map.probs(), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(mode_map(&map).values(), f.values());
    }

    #[test]
    fn marginal_one_node_differs() {
        let dims = GridDims::new(2, 2).unwrap();
        let a = field_from(dims, &[&[1, 0], &[0, 1]]);
        let mut b = a.clone();
        b.set((1, 1), 0);
        let map = marginal_map(&[a, b]).unwrap();
        assert_eq!(map.probs(), &[0.5, 0.0, 0.0, 1.0]);
        // 0.5 tie breaks to shale.
        assert_eq!(mode_map(&map).get((1, 1)), 0);
    }

    #[test]
    fn marginal_empty_stream_rejected() {
        assert!(marginal_map(&[]).is_err());
    }

    #[test]
    fn marginal_par_matches_seq() {
        let dims = GridDims::new(5, 4).unwrap();
        let samples: Vec<LfcField> = (0..13)
            .map(|k| {
                let mut f = LfcField::zeros(dims);
                for idx in 0..dims.len() {
                    if (idx * 7 + k) % 3 == 0 {
                        f.set(dims.node_at(idx), 1);
                    }
                }
                f
            })
            .collect();
        let a = marginal_map(&samples).unwrap();
        let b = marginal_map_seq(&samples).unwrap();
        assert_eq!(a.probs(), b.probs());
    }

    #[test]
    fn component_all_shale_empty() {
        let dims = GridDims::new(3, 3).unwrap();
        let f = LfcField::zeros(dims);
        assert!(connected_component(&f, (2, 2), Adjacency::Four).is_empty());
    }

    #[test]
    fn component_all_sand_full() {
        let dims = GridDims::new(3, 3).unwrap();
        let mut f = LfcField::zeros(dims);
        for node in dims.nodes() {
            f.set(node, 1);
        }
        assert_eq!(connected_component(&f, (2, 2), Adjacency::Four).len(), 9);
    }

    #[test]
    fn component_diagonal_excluded_in_four() {
        // L-shape with a diagonal-only pixel at (1,3).
        let dims = GridDims::new(3, 3).unwrap();
        let f = field_from(dims, &[&[0, 0, 1], &[1, 1, 0], &[1, 0, 0]]);
        let comp = connected_component(&f, (3, 1), Adjacency::Four);
        assert_eq!(comp, vec![(2, 1), (2, 2), (3, 1)]);
        let comp8 = connected_component(&f, (3, 1), Adjacency::Eight);
        assert_eq!(comp8.len(), 4);
    }

    #[test]
    fn component_symmetry() {
        let dims = GridDims::new(4, 4).unwrap();
        let f = field_from(dims, &[&[1, 1, 0, 0], &[0, 1, 0, 1], &[0, 1, 1, 1], &[1, 0, 0, 0]]);
        for u in dims.nodes() {
            for v in dims.nodes() {
                let u_in_v = connected_component(&f, v, Adjacency::Four).contains(&u);
                let v_in_u = connected_component(&f, u, Adjacency::Four).contains(&v);
                assert_eq!(u_in_v, v_in_u, "asymmetry between {u:?} and {v:?}");
            }
        }
    }

    #[test]
    fn contact_seed_matches_marginal() {
        let dims = GridDims::new(3, 3).unwrap();
        let a = field_from(dims, &[&[1, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let b = field_from(dims, &[&[0, 1, 1], &[0, 0, 1], &[0, 0, 0]]);
        let samples = vec![a, b];
        let seed = (1, 2);
        let contact = contact_probability_map(&samples, seed, Adjacency::Four).unwrap();
        let marginal = marginal_map(&samples).unwrap();
        assert_eq!(contact.get(seed), marginal.get(seed));
        for node in dims.nodes() {
            assert!(contact.get(node) <= marginal.get(node) + 1e-12);
        }
    }

    #[test]
    fn contact_identical_samples_indicator() {
        let dims = GridDims::new(3, 3).unwrap();
        let f = field_from(dims, &[&[1, 1, 0], &[0, 1, 0], &[1, 0, 1]]);
        let map = contact_probability_map(&[f.clone(), f.clone()], (1, 1), Adjacency::Four).unwrap();
        let comp = connected_component(&f, (1, 1), Adjacency::Four);
        for node in dims.nodes() {
            let expect = if comp.contains(&node) { 1.0 } else { 0.0 };
            assert_eq!(map.get(node), expect);
        }
    }

    #[test]
    fn curve_all_sand() {
        let dims = GridDims::new(2, 2).unwrap();
        let mut f = LfcField::zeros(dims);
        for node in dims.nodes() {
            f.set(node, 1);
        }
        let curve = connectivity_curve(&[f], 1, 3, Adjacency::Four).unwrap();
        for &(eta, p) in &curve.points {
            let expect = if eta <= 3 { 1.0 } else { 0.0 };
            assert_eq!(p, expect, "eta {eta}");
        }
    }

    #[test]
    fn curve_single_sand_node() {
        let dims = GridDims::new(2, 2).unwrap();
        let mut f = LfcField::zeros(dims);
        f.set((1, 1), 1);
        let curve = connectivity_curve(&[f], 5, 2, Adjacency::Four).unwrap();
        assert_eq!(curve.points[0], (0, 1.0));
        assert_eq!(curve.points[1], (1, 0.0));
    }

    #[test]
    fn curve_monotone_and_deterministic() {
        let dims = GridDims::new(4, 4).unwrap();
        let samples: Vec<LfcField> = (0..6)
            .map(|k| {
                let mut f = LfcField::zeros(dims);
                for idx in 0..dims.len() {
                    if (idx * 5 + k * 3) % 4 == 0 {
                        f.set(dims.node_at(idx), 1);
                    }
                }
                f
            })
            .collect();
        let a = connectivity_curve(&samples, 42, 2, Adjacency::Four).unwrap();
        let b = connectivity_curve(&samples, 42, 2, Adjacency::Four).unwrap();
        assert_eq!(a.points, b.points);
        for w in a.points.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-12);
        }
    }

    #[test]
    fn exhaustive_curve_two_samples() {
        // Sample 1: one 2-node body. Sample 2: one isolated node.
        let dims = GridDims::new(2, 2).unwrap();
        let a = field_from(dims, &[&[1, 0], &[1, 0]]);
        let b = field_from(dims, &[&[0, 1], &[0, 0]]);
        let curve = connectivity_curve_exhaustive(&[a, b], Adjacency::Four).unwrap();
        // Counts: 1, 1, 0 over 3 pairs.
        assert_eq!(curve.points, vec![(0, 1.0), (1, 2.0 / 3.0), (2, 0.0)]);
    }

    #[test]
    fn histogram_bins() {
        let dims = GridDims::new(1, 4).unwrap();
        let map = MarginalMap::from_probs(dims, vec![0.0, 0.04, 0.5, 1.0]).unwrap();
        let hist = probability_histogram(&map, 20);
        assert_eq!(hist.len(), 20);
        assert_eq!(hist[0].2, 2);
        assert_eq!(hist[10].2, 1);
        assert_eq!(hist[19].2, 1);
        let total: usize = hist.iter().map(|h| h.2).sum();
        assert_eq!(total, 4);
    }
}

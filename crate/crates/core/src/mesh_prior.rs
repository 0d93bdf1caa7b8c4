//! Homogeneous binary Markov mesh prior.
//!
//! Each node's conditional distribution depends on a template set of
//! row-major-earlier neighbors through a pseudo-Boolean interaction
//! function: the logit of the sand probability is the sum of the
//! interaction parameters of every stored subset fully contained in the
//! set of sand-valued template neighbors. Out-of-lattice neighbors read
//! as shale.
//!
//! Besides the sequential factorization (exact joint log-density and
//! one-pass simulation), the module converts the mesh to its Markov
//! random field neighborhood and derives the exact within-column
//! conditional chain the block sampler needs.

use crate::chain::{ColumnChain, Factor};
use crate::error::{Error, Result};
use crate::lattice::{CellOffset, GridDims, LfcField, Node};
use crate::util::{logistic, seed_stream};
use rand::Rng;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest supported template size; the interaction function is cached as
/// a table with one entry per subset of the template.
pub const MAX_TAU: usize = 20;

/// Subset of the template whose translated nodes are in-lattice sand,
/// encoded as a bitmask over the template offset indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveSubset(pub u32);

impl ActiveSubset {
    pub const EMPTY: ActiveSubset = ActiveSubset(0);

    pub fn from_offsets(spec: &MeshPriorSpec, members: &[CellOffset]) -> Result<Self> {
        let mut mask = 0u32;
        for o in members {
            let idx = spec
                .tau
                .iter()
                .position(|t| t == o)
                .ok_or_else(|| Error::Domain(format!("offset {o} not in template")))?;
            mask |= 1 << idx;
        }
        Ok(ActiveSubset(mask))
    }
}

#[derive(Debug, Clone)]
struct Interaction {
    offsets: Vec<CellOffset>,
    mask: u32,
    beta: f64,
}

/// Template sequential neighborhood plus the sparse interaction set.
#[derive(Debug, Clone)]
pub struct MeshPriorSpec {
    tau: Vec<CellOffset>,
    interactions: Vec<Interaction>,
    /// theta for every subset of tau, indexed by active-subset mask.
    theta_table: Vec<f64>,
}

const BUILTIN_TAU: [(i32, i32); 9] =
    [(-1, 0), (0, -1), (-1, 2), (0, -2), (-3, -1), (0, -3), (-1, 4), (0, -4), (-2, -4)];

const BUILTIN_INTERACTIONS: [(&[(i32, i32)], f64); 31] = [
    (&[], -4.33884),
    (&[(-1, 0)], 3.27479),
    (&[(0, -1)], 2.96595),
    (&[(-1, 0), (0, -1)], -0.460735),
    (&[(-1, 2)], 1.49237),
    (&[(-1, 2), (0, -1)], -1.10759),
    (&[(0, -2)], 1.99035),
    (&[(-3, -1)], -1.43573),
    (&[(0, -3)], 3.06786),
    (&[(-1, 0), (0, -3)], -3.44258),
    (&[(0, -3), (0, -1)], -2.03335),
    (&[(-1, 0), (0, -3), (0, -1)], 1.95605),
    (&[(0, -3), (0, -2)], -1.02729),
    (&[(-1, 4)], 2.90431),
    (&[(-1, 0), (-1, 4)], -3.42674),
    (&[(-1, 4), (0, -1)], -0.404195),
    (&[(-1, 2), (-1, 4)], 0.268767),
    (&[(-1, 4), (0, -3)], -2.73426),
    (&[(-1, 0), (-1, 4), (0, -3)], 2.96929),
    (&[(-1, 4), (0, -3), (0, -1)], 1.95346),
    (&[(0, -4)], 2.1858),
    (&[(-1, 0), (0, -4)], -0.355664),
    (&[(0, -4), (0, -2)], -1.61185),
    (&[(0, -4), (0, -3)], -1.23267),
    (&[(-1, 0), (0, -4), (0, -3)], 0.606075),
    (&[(0, -4), (0, -3), (0, -2)], 2.03717),
    (&[(-1, 4), (0, -4)], -4.01512),
    (&[(-1, 0), (-1, 4), (0, -4)], 3.80173),
    (&[(-1, 4), (0, -4), (0, -3)], 2.6053),
    (&[(-1, 0), (-1, 4), (0, -4), (0, -3)], -1.64379),
    (&[(-2, -4)], -0.717159),
];

impl MeshPriorSpec {
    pub fn new(tau: Vec<CellOffset>, interactions: Vec<(Vec<CellOffset>, f64)>) -> Result<Self> {
        if tau.len() > MAX_TAU {
            return Err(Error::Config(format!("template size {} exceeds {MAX_TAU}", tau.len())));
        }
        for o in &tau {
            if !o.is_sequential() {
                return Err(Error::Config(format!("template offset {o} is not row-major-earlier")));
            }
        }
        let distinct: BTreeSet<_> = tau.iter().collect();
        if distinct.len() != tau.len() {
            return Err(Error::Config("duplicate template offsets".into()));
        }
        let mut built = Vec::with_capacity(interactions.len());
        let mut seen_masks = BTreeSet::new();
        let mut has_empty = false;
        for (offsets, beta) in interactions {
            if !beta.is_finite() {
                return Err(Error::Config("interaction parameter must be finite".into()));
            }
            let mut mask = 0u32;
            for o in &offsets {
                let idx = tau
                    .iter()
                    .position(|t| t == o)
                    .ok_or_else(|| Error::Config(format!("interaction offset {o} not in template")))?;
                mask |= 1 << idx;
            }
            if !seen_masks.insert(mask) {
                return Err(Error::Config("duplicate interaction subset".into()));
            }
            if mask == 0 {
                has_empty = true;
            }
            built.push(Interaction { offsets, mask, beta });
        }
        if !has_empty {
            return Err(Error::Config("interaction set must contain the empty subset".into()));
        }
        let mut theta_table = vec![0.0; 1 << tau.len()];
        for (m, slot) in theta_table.iter_mut().enumerate() {
            *slot = built
                .iter()
                .filter(|x| x.mask & m as u32 == x.mask)
                .map(|x| x.beta)
                .sum();
        }
        Ok(MeshPriorSpec { tau, interactions: built, theta_table })
    }

    /// The fitted 9-offset / 31-interaction specification shipped with the
    /// crate (also available as `data/fitted.prior`).
    pub fn load_builtin() -> MeshPriorSpec {
        let tau = BUILTIN_TAU.iter().map(|&(a, b)| CellOffset::new(a, b)).collect();
        let interactions = BUILTIN_INTERACTIONS
            .iter()
            .map(|&(offs, beta)| (offs.iter().map(|&(a, b)| CellOffset::new(a, b)).collect(), beta))
            .collect();
        MeshPriorSpec::new(tau, interactions).expect("built-in prior parameters are valid")
    }

    pub fn tau(&self) -> &[CellOffset] {
        &self.tau
    }

    pub fn interaction_count(&self) -> usize {
        self.interactions.len()
    }

    pub fn interactions(&self) -> impl Iterator<Item = (&[CellOffset], f64)> + '_ {
        self.interactions.iter().map(|x| (x.offsets.as_slice(), x.beta))
    }

    pub fn beta(&self, subset: &[CellOffset]) -> Option<f64> {
        let mask = ActiveSubset::from_offsets(self, subset).ok()?.0;
        self.interactions.iter().find(|x| x.mask == mask).map(|x| x.beta)
    }

    /// Sum of the stored interaction parameters contained in the active subset.
    pub fn theta(&self, active: ActiveSubset) -> f64 {
        self.theta_table[active.0 as usize]
    }

    /// Active-subset mask at a node: template offsets whose translated node
    /// is in-lattice and carries sand.
    pub fn active_mask(&self, field: &LfcField, node: Node) -> ActiveSubset {
        let dims = field.dims();
        let mut mask = 0u32;
        for (k, o) in self.tau.iter().enumerate() {
            if let Some(p) = o.apply(node, &dims) {
                if field.get(p) == 1 {
                    mask |= 1 << k;
                }
            }
        }
        ActiveSubset(mask)
    }

    /// P(node is sand | its sequential neighbors).
    pub fn conditional_prob(&self, field: &LfcField, node: Node) -> f64 {
        logistic(self.theta(self.active_mask(field, node)))
    }

    /// Exact joint log-density via the sequential factorization.
    pub fn log_density(&self, field: &LfcField) -> f64 {
        let dims = field.dims();
        let mut lp = 0.0;
        for node in dims.nodes() {
            let p1 = self.conditional_prob(field, node);
            lp += if field.get(node) == 1 { p1.ln() } else { (1.0 - p1).ln() };
        }
        lp
    }

    /// One row-major pass of sequential simulation; deterministic in `seed`.
    pub fn simulate(&self, dims: GridDims, seed: u64) -> LfcField {
        let mut rng = seed_stream(seed, 0);
        self.simulate_with_rng(dims, &mut rng)
    }

    pub fn simulate_with_rng<R: Rng + ?Sized>(&self, dims: GridDims, rng: &mut R) -> LfcField {
        let mut field = LfcField::zeros(dims);
        for node in dims.nodes() {
            let p1 = self.conditional_prob(&field, node);
            let v = if rng.gen::<f64>() < p1 { 1 } else { 0 };
            field.set(node, v);
        }
        field
    }

    /// `count` independent realisations with per-realisation seed streams.
    pub fn simulate_batch(&self, dims: GridDims, count: usize, seed: u64) -> Vec<LfcField> {
        #[cfg(feature = "parallel")]
        {
            (0..count)
                .into_par_iter()
                .map(|k| {
                    let mut rng = seed_stream(seed, k as u64);
                    self.simulate_with_rng(dims, &mut rng)
                })
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.simulate_batch_seq(dims, count, seed)
        }
    }

    /// Sequential reference path for `simulate_batch`; identical output.
    pub fn simulate_batch_seq(&self, dims: GridDims, count: usize, seed: u64) -> Vec<LfcField> {
        (0..count)
            .map(|k| {
                let mut rng = seed_stream(seed, k as u64);
                self.simulate_with_rng(dims, &mut rng)
            })
            .collect()
    }

    /// Markov random field neighborhood offsets induced by the mesh,
    /// in translation-invariant form (valid away from lattice borders).
    pub fn mrf_neighborhood(&self) -> Vec<CellOffset> {
        let mut set = BTreeSet::new();
        for t in &self.tau {
            set.insert(*t);
            set.insert(CellOffset::new(-t.di, -t.dj));
        }
        for s in &self.tau {
            for t in &self.tau {
                if s != t {
                    set.insert(CellOffset::new(s.di - t.di, s.dj - t.dj));
                }
            }
        }
        set.remove(&CellOffset::new(0, 0));
        set.into_iter().collect()
    }

    /// Structural order of the within-column conditional chain: the largest
    /// row span among factor groups coupling rows of one column.
    pub fn chain_order(&self) -> usize {
        let mut order = 0usize;
        // Own-node factor couples the node with its same-column neighbors.
        let own_span = self
            .tau
            .iter()
            .filter(|o| o.dj == 0)
            .map(|o| (-o.di) as usize)
            .max()
            .unwrap_or(0);
        order = order.max(own_span);
        // A node in a flanking column couples the column rows it neighbors.
        let cols: BTreeSet<i32> = self.tau.iter().filter(|o| o.dj != 0).map(|o| o.dj).collect();
        for b in cols {
            let rows: Vec<i32> = self.tau.iter().filter(|o| o.dj == b).map(|o| o.di).collect();
            let span = rows.iter().max().unwrap() - rows.iter().min().unwrap();
            order = order.max(span as usize);
        }
        order
    }

    /// Log-weight factors of the exact conditional p(column j | rest).
    ///
    /// One factor per column-j node (its own conditional) plus one per
    /// out-of-column node whose sequential neighborhood reaches column j.
    pub fn column_factors(&self, field: &LfcField, j: usize) -> Result<Vec<Factor>> {
        let dims = field.dims();
        if j < 1 || j > dims.cols() {
            return Err(Error::Domain(format!("column {j} out of range 1..={}", dims.cols())));
        }
        let m = dims.rows();
        let mut factors = Vec::new();

        let tau_bits: Vec<(usize, CellOffset)> = self.tau.iter().copied().enumerate().collect();

        // Own-node factors: variable rows are the node itself plus its
        // same-column sequential neighbors.
        for i in 1..=m {
            let node = (i, j);
            let mut var_rows: Vec<usize> = Vec::new();
            let mut var_bits: Vec<u32> = Vec::new();
            let mut fixed = 0u32;
            for &(k, o) in &tau_bits {
                if let Some(p) = o.apply(node, &dims) {
                    if p.1 == j {
                        var_rows.push(p.0 - 1);
                        var_bits.push(1 << k);
                    } else if field.get(p) == 1 {
                        fixed |= 1 << k;
                    }
                }
            }
            // The outcome row itself.
            var_rows.push(i - 1);
            var_bits.push(0);
            let (rows, logw) = tabulate(self, &var_rows, &var_bits, fixed, None);
            factors.push(Factor::new(rows, logw));
        }

        // Flanking-node factors: nodes in other columns whose template
        // reaches into column j.
        let cols: BTreeSet<i32> = self.tau.iter().filter(|o| o.dj != 0).map(|o| o.dj).collect();
        for b in cols {
            let l = j as i64 - b as i64;
            if l < 1 || l > dims.cols() as i64 {
                continue;
            }
            let l = l as usize;
            for kk in 1..=m {
                let node = (kk, l);
                let mut var_rows: Vec<usize> = Vec::new();
                let mut var_bits: Vec<u32> = Vec::new();
                let mut fixed = 0u32;
                for &(k, o) in &tau_bits {
                    if let Some(p) = o.apply(node, &dims) {
                        if p.1 == j {
                            var_rows.push(p.0 - 1);
                            var_bits.push(1 << k);
                        } else if field.get(p) == 1 {
                            fixed |= 1 << k;
                        }
                    }
                }
                if var_rows.is_empty() {
                    continue;
                }
                let outcome = field.get(node);
                let (rows, logw) = tabulate(self, &var_rows, &var_bits, fixed, Some(outcome));
                factors.push(Factor::new(rows, logw));
            }
        }
        Ok(factors)
    }

    /// Exact conditional distribution of column `j` given the rest of the
    /// field, as a finite-order binary chain.
    pub fn column_conditional(&self, field: &LfcField, j: usize) -> Result<ColumnChain> {
        let factors = self.column_factors(field, j)?;
        ColumnChain::from_factors(field.dims().rows(), &factors, self.chain_order())
    }

    /// Canonical text form, mirroring the parameter file format.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        s.push_str("tau:");
        for o in &self.tau {
            let _ = write!(s, " {o}");
        }
        s.push('\n');
        for x in &self.interactions {
            s.push_str("lambda:");
            for o in &x.offsets {
                let _ = write!(s, " {o}");
            }
            let _ = writeln!(s, " beta: {}", x.beta);
        }
        s
    }

    pub fn from_str_spec(text: &str) -> Result<Self> {
        let mut tau: Option<Vec<CellOffset>> = None;
        let mut interactions = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("tau:") {
                tau = Some(parse_offsets(rest, lineno + 1)?);
            } else if let Some(rest) = line.strip_prefix("lambda:") {
                let (offs_part, beta_part) = rest
                    .split_once("beta:")
                    .ok_or_else(|| Error::Config(format!("line {}: missing 'beta:'", lineno + 1)))?;
                let offsets = parse_offsets(offs_part, lineno + 1)?;
                let beta: f64 = beta_part
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("line {}: bad beta value", lineno + 1)))?;
                interactions.push((offsets, beta));
            } else {
                return Err(Error::Config(format!("line {}: unrecognized content", lineno + 1)));
            }
        }
        let tau = tau.ok_or_else(|| Error::Config("missing 'tau:' line".into()))?;
        MeshPriorSpec::new(tau, interactions)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str_spec(&text)
    }
}

fn parse_offsets(s: &str, lineno: usize) -> Result<Vec<CellOffset>> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let inner = tok
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::Config(format!("line {lineno}: bad offset '{tok}'")))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::Config(format!("line {lineno}: bad offset '{tok}'")))?;
        let di: i32 =
            a.trim().parse().map_err(|_| Error::Config(format!("line {lineno}: bad offset '{tok}'")))?;
        let dj: i32 =
            b.trim().parse().map_err(|_| Error::Config(format!("line {lineno}: bad offset '{tok}'")))?;
        out.push(CellOffset::new(di, dj));
    }
    Ok(out)
}

/// Tabulates one conditional-probability factor over its variable rows.
///
/// `outcome == None` means the anchored node's own value is the last
/// variable row; otherwise the node's value is fixed and only its
/// neighbors vary.
fn tabulate(
    spec: &MeshPriorSpec,
    var_rows: &[usize],
    var_bits: &[u32],
    fixed: u32,
    outcome: Option<u8>,
) -> (Vec<usize>, Vec<f64>) {
    // Sort rows ascending, merging duplicates (a row can enter both as a
    // neighbor bit and as the outcome).
    let mut uniq: Vec<usize> = var_rows.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let nbits = uniq.len();
    let mut logw = vec![0.0f64; 1 << nbits];
    for (idx, slot) in logw.iter_mut().enumerate() {
        let val_at = |row: usize| -> u8 {
            let pos = uniq.iter().position(|&r| r == row).unwrap();
            ((idx >> pos) & 1) as u8
        };
        let mut mask = fixed;
        let mut own = outcome;
        for (r, &bit) in var_rows.iter().zip(var_bits) {
            let v = val_at(*r);
            if bit == 0 {
                own = Some(v);
            } else if v == 1 {
                mask |= bit;
            }
        }
        let p1 = logistic(spec.theta_table[mask as usize]);
        *slot = if own.expect("outcome value present") == 1 { p1.ln() } else { (1.0 - p1).ln() };
    }
    (uniq, logw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn builtin_shape() {
        let spec = MeshPriorSpec::load_builtin();
        assert_eq!(spec.tau().len(), 9);
        assert_eq!(spec.interaction_count(), 31);
        assert_abs_diff_eq!(spec.beta(&[]).unwrap(), -4.33884, epsilon = 0.0);
        assert_abs_diff_eq!(spec.beta(&[CellOffset::new(-2, -4)]).unwrap(), -0.717159, epsilon = 0.0);
    }

    #[test]
    fn theta_examples() {
        let spec = MeshPriorSpec::load_builtin();
        assert_abs_diff_eq!(spec.theta(ActiveSubset::EMPTY), -4.33884, epsilon = 1e-12);
        let a = ActiveSubset::from_offsets(&spec, &[CellOffset::new(-1, 0), CellOffset::new(0, -1)])
            .unwrap();
        assert_abs_diff_eq!(spec.theta(a), 1.441165, epsilon = 1e-9);
        let b = ActiveSubset::from_offsets(&spec, &[CellOffset::new(-2, -4)]).unwrap();
        assert_abs_diff_eq!(spec.theta(b), -5.055999, epsilon = 1e-9);
    }

    #[test]
    fn conditional_prob_examples() {
        let spec = MeshPriorSpec::load_builtin();
        let dims = GridDims::new(6, 9).unwrap();
        let field = LfcField::zeros(dims);
        // All neighbors shale: logistic of the empty-set parameter.
        let p_empty = logistic(-4.33884);
        assert_abs_diff_eq!(spec.conditional_prob(&field, (4, 5)), p_empty, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.conditional_prob(&field, (1, 1)), p_empty, epsilon = 1e-12);
        assert_abs_diff_eq!(p_empty, 0.012876, epsilon = 1e-4);
        // Only the node directly above is sand.
        let mut f2 = LfcField::zeros(dims);
        f2.set((3, 5), 1);
        let p_above = logistic(-4.33884 + 3.27479);
        assert_abs_diff_eq!(spec.conditional_prob(&f2, (4, 5)), p_above, epsilon = 1e-12);
        assert_abs_diff_eq!(p_above, 0.25655, epsilon = 1e-4);
    }

    #[test]
    fn single_node_log_density() {
        let spec = MeshPriorSpec::load_builtin();
        let dims = GridDims::new(1, 1).unwrap();
        let field = LfcField::zeros(dims);
        let expect = (1.0 - logistic(-4.33884)).ln();
        assert_abs_diff_eq!(spec.log_density(&field), expect, epsilon = 1e-12);
    }

    #[test]
    fn empty_interaction_only_reduces_to_iid() {
        let beta0 = -0.4f64;
        let spec = MeshPriorSpec::new(
            BUILTIN_TAU.iter().map(|&(a, b)| CellOffset::new(a, b)).collect(),
            vec![(vec![], beta0)],
        )
        .unwrap();
        let dims = GridDims::new(4, 5).unwrap();
        let mut field = LfcField::zeros(dims);
        for (t, node) in dims.nodes().enumerate() {
            field.set(node, (t % 2) as u8);
        }
        let p = logistic(beta0);
        let ones = field.sand_count() as f64;
        let zeros = (dims.len() as f64) - ones;
        let expect = ones * p.ln() + zeros * (1.0 - p).ln();
        assert_abs_diff_eq!(spec.log_density(&field), expect, epsilon = 1e-10);
    }

    #[test]
    fn simulate_is_deterministic() {
        let spec = MeshPriorSpec::load_builtin();
        let dims = GridDims::new(20, 15).unwrap();
        assert_eq!(spec.simulate(dims, 42), spec.simulate(dims, 42));
        assert_ne!(spec.simulate(dims, 42), spec.simulate(dims, 43));
    }

    #[test]
    fn batch_parallel_matches_sequential() {
        let spec = MeshPriorSpec::load_builtin();
        let dims = GridDims::new(12, 9).unwrap();
        let a = spec.simulate_batch(dims, 8, 5);
        let b = spec.simulate_batch_seq(dims, 8, 5);
        assert_eq!(a, b);
    }

    #[test]
    fn iid_spec_sand_fraction() {
        let beta0 = -1.2f64;
        let spec = MeshPriorSpec::new(vec![], vec![(vec![], beta0)]).unwrap();
        let dims = GridDims::new(1000, 1000).unwrap();
        let field = spec.simulate(dims, 17);
        let frac = field.sand_count() as f64 / dims.len() as f64;
        let p = logistic(beta0);
        let sigma = (p * (1.0 - p) / dims.len() as f64).sqrt();
        assert!((frac - p).abs() < 3.0 * sigma, "frac {frac} vs p {p}");
    }

    #[test]
    fn mrf_neighborhood_examples() {
        let single = MeshPriorSpec::new(vec![CellOffset::new(-1, 0)], vec![(vec![], 0.1)]).unwrap();
        let nb = single.mrf_neighborhood();
        assert_eq!(nb, vec![CellOffset::new(-1, 0), CellOffset::new(1, 0)]);

        let two = MeshPriorSpec::new(
            vec![CellOffset::new(0, -1), CellOffset::new(-1, 0)],
            vec![(vec![], 0.1)],
        )
        .unwrap();
        let nb2: BTreeSet<_> = two.mrf_neighborhood().into_iter().collect();
        let expect: BTreeSet<_> = [(0, -1), (0, 1), (-1, 0), (1, 0), (-1, 1), (1, -1)]
            .iter()
            .map(|&(a, b)| CellOffset::new(a, b))
            .collect();
        assert_eq!(nb2, expect);

        let spec = MeshPriorSpec::load_builtin();
        let nb3: BTreeSet<_> = spec.mrf_neighborhood().into_iter().collect();
        for o in &nb3 {
            assert!(nb3.contains(&CellOffset::new(-o.di, -o.dj)), "asymmetric at {o}");
        }
    }

    #[test]
    fn chain_order_is_three_for_builtin() {
        assert_eq!(MeshPriorSpec::load_builtin().chain_order(), 3);
    }

    #[test]
    fn column_conditional_iid_reduction() {
        let beta0 = 0.3f64;
        let spec = MeshPriorSpec::new(
            BUILTIN_TAU.iter().map(|&(a, b)| CellOffset::new(a, b)).collect(),
            vec![(vec![], beta0)],
        )
        .unwrap();
        let dims = GridDims::new(5, 4).unwrap();
        let field = LfcField::zeros(dims);
        let chain = spec.column_conditional(&field, 2).unwrap();
        let p = logistic(beta0);
        for i in 0..5 {
            for h in 0..(1usize << chain.order()) {
                assert_abs_diff_eq!(chain.prob1(i, h), p, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn canonical_round_trip() {
        let spec = MeshPriorSpec::load_builtin();
        let text = spec.canonical_string();
        let reparsed = MeshPriorSpec::from_str_spec(&text).unwrap();
        assert_eq!(reparsed.canonical_string(), text);
        assert_eq!(reparsed.tau(), spec.tau());
        assert_eq!(reparsed.interaction_count(), spec.interaction_count());
    }

    #[test]
    fn translate_builtin_template_examples() {
        let spec = MeshPriorSpec::load_builtin();
        let dims = GridDims::new(105, 51).unwrap();
        assert!(crate::lattice::translate_template(spec.tau(), (1, 1), &dims).is_empty());
        // From (2,5) the three offsets reaching rows <= 0 drop out.
        let nodes = crate::lattice::translate_template(spec.tau(), (2, 5), &dims);
        assert_eq!(nodes.len(), 7);
        for p in [(1, 5), (2, 4), (1, 7), (2, 3), (2, 2), (1, 9), (2, 1)] {
            assert!(nodes.contains(&p), "missing {p:?}");
        }
    }
}

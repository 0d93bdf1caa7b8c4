//! Manually specified profile Markov random field prior.
//!
//! A column given its two flanking columns is a first-order Markov chain
//! down the rows, with one homogeneous transition table conditioning on
//! the value above, to the left and to the right. Boundaries (top row,
//! first and last column) condition on shale outside the lattice.

use crate::chain::{ColumnChain, Factor};
use crate::error::{Error, Result};
use crate::lattice::{GridDims, LfcField};
use crate::util::seed_stream;
use rand::Rng;
use std::path::Path;

/// Conditional sand probabilities indexed `[above][left][right]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTransitionTable {
    p1: [[[f64; 2]; 2]; 2],
}

/// Default number of column-Gibbs sweeps used to burn in an unconditional
/// prior realisation.
pub const DEFAULT_PRIOR_SWEEPS: usize = 500;

impl ProfileTransitionTable {
    /// The default table: strong lateral continuity of both classes.
    pub fn load_default() -> Self {
        ProfileTransitionTable {
            p1: [
                // above = 0 (shale)
                [[0.0123, 0.3461], [0.3461, 0.9575]],
                // above = 1 (sand)
                [[0.1661, 0.8944], [0.8944, 0.9972]],
            ],
        }
    }

    pub fn new(p1: [[[f64; 2]; 2]; 2]) -> Result<Self> {
        for (a, l, r) in (0..8).map(|b| (b >> 2 & 1, b >> 1 & 1, b & 1)) {
            let p = p1[a][l][r];
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!(
                    "transition probability p1[{a}][{l}][{r}] = {p} outside [0,1]"
                )));
            }
        }
        Ok(ProfileTransitionTable { p1 })
    }

    /// Reads an override table: eight lines `a l r p1`.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut p1 = [[[f64::NAN; 2]; 2]; 2];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 {
                return Err(Error::Config(format!("line {}: expected 'a l r p1'", lineno + 1)));
            }
            let idx: Vec<usize> = parts[..3]
                .iter()
                .map(|t| t.parse::<usize>().map_err(|_| Error::Config(format!("line {}: bad index", lineno + 1))))
                .collect::<Result<_>>()?;
            if idx.iter().any(|&v| v > 1) {
                return Err(Error::Config(format!("line {}: indices must be 0 or 1", lineno + 1)));
            }
            let p: f64 = parts[3]
                .parse()
                .map_err(|_| Error::Config(format!("line {}: bad probability", lineno + 1)))?;
            p1[idx[0]][idx[1]][idx[2]] = p;
        }
        if p1.iter().flatten().flatten().any(|v| v.is_nan()) {
            return Err(Error::Config("transition table file is missing entries".into()));
        }
        ProfileTransitionTable::new(p1)
    }

    pub fn raw_table(&self) -> [[[f64; 2]; 2]; 2] {
        self.p1
    }

    pub fn raw(&self, above: u8, left: u8, right: u8) -> f64 {
        self.p1[above as usize][left as usize][right as usize]
    }

    /// Lookup with boundary conditioning: `None` arguments (outside the
    /// lattice) read as shale.
    pub fn transition_prob(&self, above: Option<u8>, left: Option<u8>, right: Option<u8>) -> f64 {
        self.raw(above.unwrap_or(0), left.unwrap_or(0), right.unwrap_or(0))
    }

    fn flank(field: &LfcField, i: usize, j: i64) -> Option<u8> {
        if j < 1 || j > field.dims().cols() as i64 {
            None
        } else {
            Some(field.get((i, j as usize)))
        }
    }

    /// Chain factors of p(column j | flanking columns).
    pub fn column_factors(&self, field: &LfcField, j: usize) -> Result<Vec<Factor>> {
        let dims = field.dims();
        if j < 1 || j > dims.cols() {
            return Err(Error::Domain(format!("column {j} out of range 1..={}", dims.cols())));
        }
        let m = dims.rows();
        let mut factors = Vec::with_capacity(m);
        for i in 1..=m {
            let left = Self::flank(field, i, j as i64 - 1);
            let right = Self::flank(field, i, j as i64 + 1);
            if i == 1 {
                let p = self.transition_prob(None, left, right);
                factors.push(Factor::new(vec![0], vec![(1.0 - p).ln(), p.ln()]));
            } else {
                let p0 = self.transition_prob(Some(0), left, right);
                let p1 = self.transition_prob(Some(1), left, right);
                // bit 0 = row i-2 (above), bit 1 = row i-1 (the node).
                factors.push(Factor::new(
                    vec![i - 2, i - 1],
                    vec![(1.0 - p0).ln(), (1.0 - p1).ln(), p0.ln(), p1.ln()],
                ));
            }
        }
        Ok(factors)
    }

    /// First-order chain p(column j | flanking columns).
    pub fn column_conditional(&self, field: &LfcField, j: usize) -> Result<ColumnChain> {
        let factors = self.column_factors(field, j)?;
        ColumnChain::from_factors(field.dims().rows(), &factors, 1)
    }

    /// Systematic column-Gibbs simulation from an all-shale start.
    pub fn simulate_prior(&self, dims: GridDims, sweeps: usize, seed: u64) -> Result<LfcField> {
        if sweeps < 1 {
            return Err(Error::Usage("prior simulation needs at least one sweep".into()));
        }
        let mut rng = seed_stream(seed, 0);
        let mut field = LfcField::zeros(dims);
        for _ in 0..sweeps {
            self.gibbs_sweep(&mut field, &mut rng)?;
        }
        Ok(field)
    }

    /// One systematic left-to-right column-Gibbs sweep in place.
    pub fn gibbs_sweep<R: Rng + ?Sized>(&self, field: &mut LfcField, rng: &mut R) -> Result<()> {
        for j in 1..=field.dims().cols() {
            let chain = self.column_conditional(field, j)?;
            let (col, _) = chain.sample(rng);
            field.set_column(j, &col);
        }
        Ok(())
    }

    /// Sum over columns of the log column conditional given current flanks;
    /// the closed-form joint is unavailable, so this pseudo-likelihood is
    /// what the sampler traces for this prior.
    pub fn pseudo_log_density(&self, field: &LfcField) -> Result<f64> {
        let mut lp = 0.0;
        for j in 1..=field.dims().cols() {
            let chain = self.column_conditional(field, j)?;
            lp += chain.log_prob(&field.column(j));
        }
        Ok(lp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn default_table_values() {
        let t = ProfileTransitionTable::load_default();
        assert_eq!(t.raw(0, 0, 0), 0.0123);
        assert_eq!(t.raw(0, 0, 1), 0.3461);
        assert_eq!(t.raw(0, 1, 0), 0.3461);
        assert_eq!(t.raw(0, 1, 1), 0.9575);
        assert_eq!(t.raw(1, 0, 0), 0.1661);
        assert_eq!(t.raw(1, 0, 1), 0.8944);
        assert_eq!(t.raw(1, 1, 0), 0.8944);
        assert_eq!(t.raw(1, 1, 1), 0.9972);
    }

    #[test]
    fn left_right_symmetry() {
        let t = ProfileTransitionTable::load_default();
        for a in 0..2u8 {
            assert_eq!(t.raw(a, 0, 1), t.raw(a, 1, 0));
        }
    }

    #[test]
    fn boundary_maps_to_shale() {
        let t = ProfileTransitionTable::load_default();
        assert_eq!(t.transition_prob(None, Some(0), Some(0)), 0.0123);
        assert_eq!(t.transition_prob(Some(1), None, Some(1)), 0.8944);
        assert_eq!(t.transition_prob(None, None, None), 0.0123);
    }

    #[test]
    fn all_probabilities_strictly_interior() {
        let t = ProfileTransitionTable::load_default();
        for a in 0..2 {
            for l in 0..2 {
                for r in 0..2 {
                    let p = t.raw(a, l, r);
                    assert!(p > 0.0 && p < 1.0);
                }
            }
        }
    }

    #[test]
    fn column_chain_with_shale_flanks() {
        let t = ProfileTransitionTable::load_default();
        let dims = GridDims::new(2, 3).unwrap();
        let field = LfcField::zeros(dims);
        let chain = t.column_conditional(&field, 2).unwrap();
        assert_eq!(chain.order(), 1);
        assert_abs_diff_eq!(chain.prob1(0, 0), 0.0123, epsilon = 1e-12);
        assert_abs_diff_eq!(chain.prob1(1, 1), 0.1661, epsilon = 1e-12);
        assert_abs_diff_eq!(chain.prob1(1, 0), 0.0123, epsilon = 1e-12);
    }

    #[test]
    fn column_chain_with_sand_flanks() {
        let t = ProfileTransitionTable::load_default();
        let dims = GridDims::new(3, 3).unwrap();
        let mut field = LfcField::zeros(dims);
        for i in 1..=3 {
            field.set((i, 1), 1);
            field.set((i, 3), 1);
        }
        let chain = t.column_conditional(&field, 2).unwrap();
        assert_abs_diff_eq!(chain.prob1(0, 0), 0.9575, epsilon = 1e-12);
        assert_abs_diff_eq!(chain.prob1(1, 1), 0.9972, epsilon = 1e-12);
        assert_abs_diff_eq!(chain.prob1(2, 0), 0.9575, epsilon = 1e-12);
    }

    #[test]
    fn chain_joint_is_product_of_transitions() {
        let t = ProfileTransitionTable::load_default();
        let dims = GridDims::new(3, 2).unwrap();
        let field = LfcField::zeros(dims);
        let chain = t.column_conditional(&field, 1).unwrap();
        let col = [1u8, 0, 1];
        let expect = t.transition_prob(None, None, Some(0)).ln()
            + (1.0 - t.transition_prob(Some(1), None, Some(0))).ln()
            + t.transition_prob(Some(0), None, Some(0)).ln();
        assert_abs_diff_eq!(chain.log_prob(&col), expect, epsilon = 1e-12);
    }

    #[test]
    fn simulate_prior_deterministic() {
        let t = ProfileTransitionTable::load_default();
        let dims = GridDims::new(8, 6).unwrap();
        let a = t.simulate_prior(dims, 20, 3).unwrap();
        let b = t.simulate_prior(dims, 20, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_node_marginal_matches_table() {
        let t = ProfileTransitionTable::load_default();
        let dims = GridDims::new(1, 1).unwrap();
        let n = 200_000usize;
        let mut ones = 0usize;
        for k in 0..n {
            let f = t.simulate_prior(dims, 1, k as u64).unwrap();
            ones += f.sand_count();
        }
        let p = 0.0123;
        let frac = ones as f64 / n as f64;
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((frac - p).abs() < 3.5 * sigma, "frac {frac}");
    }

    #[test]
    fn file_round_trip() {
        let t = ProfileTransitionTable::load_default();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("table.txt");
        let mut text = String::new();
        for a in 0..2 {
            for l in 0..2 {
                for r in 0..2 {
                    text.push_str(&format!("{a} {l} {r} {}\n", t.raw(a, l, r)));
                }
            }
        }
        std::fs::write(&path, text).unwrap();
        let loaded = ProfileTransitionTable::from_file(&path).unwrap();
        assert_eq!(loaded, t);
    }
}

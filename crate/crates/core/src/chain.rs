//! Exact sampling and evaluation of binary Markov chains of finite order,
//! built from a list of local log-weight factors over column rows.
//!
//! Both prior column conditionals and the sampler's truncated proposal are
//! products of factors that each touch a few nearby rows of one lattice
//! column. This module turns such a factor list into normalized per-row
//! conditional tables by a backward dynamic-programming pass, from which
//! exact forward sampling and exact log-probability evaluation follow.

use crate::error::{Error, Result};
use crate::util::log_sum_exp2;
use rand::Rng;

/// Largest supported chain order; 2^order states are tabulated per row.
pub const MAX_ORDER: usize = 25;

/// A log-weight factor over a small ascending set of 0-based rows.
///
/// `logw[idx]` is the factor value for the assignment where bit `k` of
/// `idx` gives the value at `rows[k]`.
#[derive(Debug, Clone)]
pub struct Factor {
    pub rows: Vec<usize>,
    pub logw: Vec<f64>,
}

impl Factor {
    pub fn new(rows: Vec<usize>, logw: Vec<f64>) -> Self {
        debug_assert_eq!(logw.len(), 1 << rows.len());
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        Factor { rows, logw }
    }

    fn span(&self) -> usize {
        self.rows.last().unwrap() - self.rows[0]
    }
}

/// An order-`r` binary chain over `m` rows with exact conditional tables.
#[derive(Debug, Clone)]
pub struct ColumnChain {
    m: usize,
    order: usize,
    /// `prob1[i][h]` = P(x_i = 1 | history h), where bit `k` of `h` is the
    /// value at row `i-1-k` (rows before the chain start read as 0).
    prob1: Vec<Vec<f64>>,
    /// Log normalizer of the factor product.
    log_norm: f64,
}

impl ColumnChain {
    /// Builds the chain from factors; the order is the largest row span
    /// among the factors, but never below `min_order`.
    pub fn from_factors(m: usize, factors: &[Factor], min_order: usize) -> Result<Self> {
        assert!(m >= 1);
        let mut order = min_order;
        for f in factors {
            debug_assert!(!f.rows.is_empty() && *f.rows.last().unwrap() < m);
            order = order.max(f.span());
        }
        let order = order.min(m.saturating_sub(1));
        if order > MAX_ORDER {
            return Err(Error::Config(format!(
                "chain order {order} exceeds the 2^{MAX_ORDER}-state budget; reduce the coupling lag"
            )));
        }
        // Factors anchored at their last row; evaluated from (history, x_i).
        let mut anchored: Vec<Vec<&Factor>> = vec![Vec::new(); m];
        for f in factors {
            anchored[*f.rows.last().unwrap()].push(f);
        }
        let nstates = 1usize << order;
        let mask = nstates - 1;

        // phi(i, h, x) = sum of factors anchored at row i. History bit k of
        // h is the value at row i-1-k.
        let phi = |i: usize, h: usize, x: u8| -> f64 {
            let mut s = 0.0;
            for f in &anchored[i] {
                let mut idx = 0usize;
                for (k, &row) in f.rows.iter().enumerate() {
                    let bit = if row == i { x as usize } else { (h >> (i - 1 - row)) & 1 };
                    idx |= bit << k;
                }
                s += f.logw[idx];
            }
            s
        };

        // Backward pass: b[i][h] = log sum over x_i..x_{m-1} of exp(sum phi).
        let mut b_next = vec![0.0f64; nstates];
        let mut b_cur = vec![0.0f64; nstates];
        let mut prob1 = vec![Vec::new(); m];
        for i in (0..m).rev() {
            let mut p_row = vec![0.0f64; nstates];
            for h in 0..nstates {
                let h0 = (h << 1) & mask;
                let h1 = ((h << 1) | 1) & mask;
                let (n0, n1) = if order == 0 { (0, 0) } else { (h0, h1) };
                let w0 = phi(i, h, 0) + if i + 1 < m { b_next[n0] } else { 0.0 };
                let w1 = phi(i, h, 1) + if i + 1 < m { b_next[n1] } else { 0.0 };
                let tot = log_sum_exp2(w0, w1);
                b_cur[h] = tot;
                p_row[h] = if tot == f64::NEG_INFINITY { 0.0 } else { (w1 - tot).exp() };
            }
            prob1[i] = p_row;
            std::mem::swap(&mut b_next, &mut b_cur);
        }
        let log_norm = b_next[0];
        if !log_norm.is_finite() {
            return Err(Error::Numeric("chain normalizer is not finite".into()));
        }
        Ok(ColumnChain { m, order, prob1, log_norm })
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// P(x_i = 1 | history bits), bit `k` = value at row `i-1-k`.
    pub fn prob1(&self, i: usize, history: usize) -> f64 {
        self.prob1[i][history & ((1 << self.order) - 1)]
    }

    #[inline]
    fn push_history(&self, h: usize, x: u8) -> usize {
        if self.order == 0 {
            0
        } else {
            ((h << 1) | x as usize) & ((1 << self.order) - 1)
        }
    }

    /// Draws a configuration and returns it with its exact log-probability.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (Vec<u8>, f64) {
        let mut x = vec![0u8; self.m];
        let mut h = 0usize;
        let mut logq = 0.0;
        for (i, xi) in x.iter_mut().enumerate() {
            let p1 = self.prob1[i][h];
            let v = if rng.gen::<f64>() < p1 { 1u8 } else { 0u8 };
            *xi = v;
            logq += if v == 1 { p1.ln() } else { (1.0 - p1).ln() };
            h = self.push_history(h, v);
        }
        (x, logq)
    }

    /// Exact log-probability of a full configuration under the chain law.
    pub fn log_prob(&self, x: &[u8]) -> f64 {
        debug_assert_eq!(x.len(), self.m);
        let mut h = 0usize;
        let mut lp = 0.0;
        for (i, &v) in x.iter().enumerate() {
            let p1 = self.prob1[i][h];
            lp += if v == 1 { p1.ln() } else { (1.0 - p1).ln() };
            h = self.push_history(h, v);
        }
        lp
    }
}

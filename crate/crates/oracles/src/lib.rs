//! Brute-force reference implementations for tests. Everything here is
//! deliberately naive — direct sums, exhaustive enumeration, dense linear
//! algebra — and shares no computational shortcuts with the library
//! under test.

use lfci::lattice::{GridDims, LfcField, Node};
use nalgebra::{DMatrix, DVector};

/// All 2^(m*n) class fields of a lattice, in binary counting order over
/// the row-major node index.
pub fn all_fields(dims: GridDims) -> Vec<LfcField> {
    let bits = dims.len();
    assert!(bits <= 24, "enumeration oracle limited to small lattices");
    (0..1usize << bits)
        .map(|code| {
            let mut f = LfcField::zeros(dims);
            for idx in 0..bits {
                if code >> idx & 1 == 1 {
                    f.set(dims.node_at(idx), 1);
                }
            }
            f
        })
        .collect()
}

/// All 2^m columns of length m, binary counting order.
pub fn all_columns(m: usize) -> Vec<Vec<u8>> {
    assert!(m <= 24);
    (0..1usize << m)
        .map(|code| (0..m).map(|i| (code >> i & 1) as u8).collect())
        .collect()
}

/// Mesh-prior probability of one field, computed node by node straight
/// from the interaction list: theta is the sum of the beta values whose
/// offset subsets are entirely sand among the in-lattice predecessors.
pub fn mesh_prob(
    tau: &[(i32, i32)],
    interactions: &[(Vec<(i32, i32)>, f64)],
    field: &LfcField,
) -> f64 {
    let dims = field.dims();
    let mut prob = 1.0;
    for (i, j) in dims.nodes() {
        let neighbor_is_sand = |&(di, dj): &(i32, i32)| -> bool {
            let (ni, nj) = (i as i64 + di as i64, j as i64 + dj as i64);
            if ni < 1 || nj < 1 || ni > dims.rows() as i64 || nj > dims.cols() as i64 {
                return false;
            }
            field.get((ni as usize, nj as usize)) == 1
        };
        let mut theta = 0.0;
        for (subset, beta) in interactions {
            debug_assert!(subset.iter().all(|o| tau.contains(o)));
            if subset.iter().all(neighbor_is_sand) {
                theta += beta;
            }
        }
        let p_sand = 1.0 / (1.0 + (-theta).exp());
        prob *= if field.get((i, j)) == 1 { p_sand } else { 1.0 - p_sand };
    }
    prob
}

/// Probability table over all fields under the mesh prior; should sum to
/// one by construction.
pub fn enumerate_mesh_prior(
    dims: GridDims,
    tau: &[(i32, i32)],
    interactions: &[(Vec<(i32, i32)>, f64)],
) -> Vec<(LfcField, f64)> {
    all_fields(dims)
        .into_iter()
        .map(|f| {
            let p = mesh_prob(tau, interactions, &f);
            (f, p)
        })
        .collect()
}

/// Profile transition probability with out-of-lattice neighbors read as
/// shale; `p1[above][left][right]` is the sand probability.
fn profile_p_sand(p1: &[[[f64; 2]; 2]; 2], above: usize, left: usize, right: usize) -> f64 {
    p1[above][left][right]
}

/// One-sweep transition probability x -> y of the systematic column
/// Gibbs kernel: columns updated left to right, each from its first-order
/// vertical chain given the already-updated left column and the old right
/// column.
pub fn profile_sweep_prob(
    p1: &[[[f64; 2]; 2]; 2],
    dims: GridDims,
    x: &LfcField,
    y: &LfcField,
) -> f64 {
    let (m, n) = (dims.rows(), dims.cols());
    let mut prob = 1.0;
    for j in 1..=n {
        for i in 1..=m {
            let above = if i > 1 { y.get((i - 1, j)) as usize } else { 0 };
            let left = if j > 1 { y.get((i, j - 1)) as usize } else { 0 };
            let right = if j < n { x.get((i, j + 1)) as usize } else { 0 };
            let p = profile_p_sand(p1, above, left, right);
            prob *= if y.get((i, j)) == 1 { p } else { 1.0 - p };
        }
    }
    prob
}

/// Stationary distribution of the profile sweep kernel by power
/// iteration on the full 2^(m*n) state space.
pub fn profile_stationary(p1: &[[[f64; 2]; 2]; 2], dims: GridDims) -> Vec<(LfcField, f64)> {
    let fields = all_fields(dims);
    let s = fields.len();
    let mut kernel = vec![vec![0.0; s]; s];
    for (a, x) in fields.iter().enumerate() {
        for (b, y) in fields.iter().enumerate() {
            kernel[a][b] = profile_sweep_prob(p1, dims, x, y);
        }
    }
    let mut pi = vec![1.0 / s as f64; s];
    for _ in 0..20_000 {
        let mut next = vec![0.0; s];
        for a in 0..s {
            for b in 0..s {
                next[b] += pi[a] * kernel[a][b];
            }
        }
        let diff: f64 = next.iter().zip(&pi).map(|(x, y)| (x - y).abs()).sum();
        pi = next;
        if diff < 1e-14 {
            break;
        }
    }
    fields.into_iter().zip(pi).collect()
}

/// Plain multivariate normal log-density from a dense covariance.
pub fn dense_gaussian_logpdf(mean: &DVector<f64>, cov: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    let n = mean.len();
    let chol = cov.clone().cholesky().expect("oracle covariance not PD");
    let resid = x - mean;
    let sol = chol.solve(&resid);
    let logdet: f64 = chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
    -0.5 * ((n as f64) * (2.0 * std::f64::consts::PI).ln() + logdet + resid.dot(&sol))
}

/// Posterior over all fields given per-field prior probabilities and a
/// log-likelihood callback.
pub fn enumerate_posterior<F>(prior: &[(LfcField, f64)], mut loglik: F) -> Vec<(LfcField, f64)>
where
    F: FnMut(&LfcField) -> f64,
{
    let logs: Vec<f64> = prior.iter().map(|(f, p)| p.ln() + loglik(f)).collect();
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    prior
        .iter()
        .zip(weights)
        .map(|((f, _), w)| (f.clone(), w / total))
        .collect()
}

/// Per-node sand marginals from a probability table over fields.
pub fn marginals_from_table(table: &[(LfcField, f64)]) -> Vec<f64> {
    let dims = table[0].0.dims();
    let mut probs = vec![0.0; dims.len()];
    for (f, p) in table {
        for (acc, &v) in probs.iter_mut().zip(f.values()) {
            if v == 1 {
                *acc += p;
            }
        }
    }
    probs
}

/// Direct "same" convolution with an explicit center index:
/// out[i] = sum_k w[k] * signal[i + center - k], out-of-range reads zero.
pub fn convolve_same(signal: &[f64], wavelet: &[f64], center: usize) -> Vec<f64> {
    let n = signal.len() as i64;
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (k, &w) in wavelet.iter().enumerate() {
                let s = i + center as i64 - k as i64;
                if s >= 0 && s < n {
                    acc += w * signal[s as usize];
                }
            }
            acc
        })
        .collect()
}

/// Depth-first flood fill over sand; 4- or 8-connectivity.
pub fn flood_component(field: &LfcField, seed: Node, eight: bool) -> Vec<Node> {
    let dims = field.dims();
    if !dims.contains(seed) || field.get(seed) == 0 {
        return Vec::new();
    }
    let mut seen = vec![false; dims.len()];
    let mut stack = vec![seed];
    seen[dims.linear(seed)] = true;
    let mut out = Vec::new();
    while let Some((i, j)) = stack.pop() {
        out.push((i, j));
        let mut push = |ni: i64, nj: i64| {
            if ni < 1 || nj < 1 || ni > dims.rows() as i64 || nj > dims.cols() as i64 {
                return;
            }
            let node = (ni as usize, nj as usize);
            let idx = dims.linear(node);
            if !seen[idx] && field.get(node) == 1 {
                seen[idx] = true;
                stack.push(node);
            }
        };
        let (i, j) = (i as i64, j as i64);
        push(i - 1, j);
        push(i + 1, j);
        push(i, j - 1);
        push(i, j + 1);
        if eight {
            push(i - 1, j - 1);
            push(i - 1, j + 1);
            push(i + 1, j - 1);
            push(i + 1, j + 1);
        }
    }
    out.sort();
    out
}

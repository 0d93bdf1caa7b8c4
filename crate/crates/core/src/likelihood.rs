//! Closed-form Gaussian likelihood of the seismic data given the class
//! field.
//!
//! With class-independent elastic covariance the data covariance is a sum
//! of a horizontal-correlation Kronecker factor and per-column noise, so
//! one eigendecomposition of the horizontal correlation block-diagonalises
//! it: each horizontal eigenvalue gets its own 2m-by-2m factorization.
//! Log-densities then cost O(n m^2) per evaluation, and single-column
//! class changes admit exact cached deltas through the per-column blocks
//! of the precision operator.
//!
//! A slow dense path supporting class-dependent covariance is provided
//! for small lattices as a reference.

use crate::error::{Error, Result};
use crate::forward::{ForwardModel, SeismicCube};
use crate::lattice::{GridDims, LfcField};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Interleaved per-column index of (1-based row, component).
#[inline]
fn stack_idx(i: usize, comp: usize) -> usize {
    2 * (i - 1) + comp
}

/// Builds the composed contrast -> reflection -> convolution operator for
/// one column, as a dense 2m-by-2m matrix on interleaved (near, far)
/// stacks.
pub fn column_operator(fm: &ForwardModel, m: usize) -> DMatrix<f64> {
    let two_m = 2 * m;
    // D: vertical contrasts with implicit zero predecessor at row 1.
    let mut d = DMatrix::zeros(two_m, two_m);
    for i in 1..=m {
        for c in 0..2 {
            d[(stack_idx(i, c), stack_idx(i, c))] = 1.0;
            if i > 1 {
                d[(stack_idx(i, c), stack_idx(i - 1, c))] = -1.0;
            }
        }
    }
    // A: identical 2x2 coefficient block per node.
    let blk = fm.aki.matrix();
    let mut a = DMatrix::zeros(two_m, two_m);
    for i in 1..=m {
        for r in 0..2 {
            for c in 0..2 {
                a[(stack_idx(i, r), stack_idx(i, c))] = blk[(r, c)];
            }
        }
    }
    // W: per-component same-length convolution.
    let mut w: DMatrix<f64> = DMatrix::zeros(two_m, two_m);
    for (comp, wav) in [(0, &fm.wavelet_near), (1, &fm.wavelet_far)] {
        let samples = wav.samples();
        let center = wav.center() as i64;
        for i in 1..=m {
            for (k, &wk) in samples.iter().enumerate() {
                let s = i as i64 + center - k as i64;
                if s >= 1 && s <= m as i64 {
                    w[(stack_idx(i, comp), stack_idx(s as usize, comp))] += wk;
                }
            }
        }
    }
    w * a * d
}

/// Within-column covariance of the elastic stack (constant-covariance
/// mode): vertical correlation Kronecker the class covariance.
fn elastic_column_cov(fm: &ForwardModel, m: usize) -> DMatrix<f64> {
    let cv = fm.elastic.corr_v.matrix(m);
    let sigma = DMatrix::from_fn(2, 2, |r, c| fm.elastic.sigma0[(r, c)]);
    cv.kronecker(&sigma)
}

/// Within-column noise covariance.
fn noise_column_cov(fm: &ForwardModel, m: usize) -> DMatrix<f64> {
    let corr = match &fm.noise.corr_v {
        Some(c) => c.matrix(m),
        None => DMatrix::identity(m, m),
    };
    let d = DMatrix::from_fn(2, 2, |r, c| {
        if r != c {
            0.0
        } else if r == 0 {
            fm.noise.sd_near * fm.noise.sd_near
        } else {
            fm.noise.sd_far * fm.noise.sd_far
        }
    });
    corr.kronecker(&d)
}

/// Precomputed likelihood machinery for one lattice geometry.
pub struct LikelihoodEngine {
    dims: GridDims,
    /// Horizontal correlation eigenvectors (n x n, orthogonal).
    u: DMatrix<f64>,
    /// Per-eigenvalue factorizations of lambda_k * T C_v T' + S_v.
    chols: Vec<Cholesky<f64, Dyn>>,
    /// H_k = G' M_k^{-1} G, one m-by-m matrix per eigenvalue.
    h_per_eig: Vec<DMatrix<f64>>,
    /// H-bar_j = sum_k U[j,k]^2 H_k: the (j,j) precision block in the
    /// mean-shift basis.
    h_bar: Vec<DMatrix<f64>>,
    /// Mean-shift basis: column i is the data-mean change from flipping
    /// row i of a column to sand.
    g: DMatrix<f64>,
    /// Data mean of an all-shale column.
    base_mean: DVector<f64>,
    /// -(1/2) (2mn log 2pi + sum_k logdet M_k).
    log_norm_const: f64,
}

/// Cached residual representation for one sampler chain.
pub struct ResidualState {
    /// Residual columns rotated into the horizontal eigenbasis (2m x n).
    r_tilde: DMatrix<f64>,
    /// z_k = G' M_k^{-1} r_tilde_k, one m-vector per eigenvalue (m x n).
    z: DMatrix<f64>,
    /// Cached log-likelihood value.
    pub log_lik: f64,
}

impl LikelihoodEngine {
    /// Precomputes operators and factorizations; requires the
    /// class-independent covariance mode.
    pub fn build(fm: &ForwardModel, dims: GridDims) -> Result<Self> {
        fm.validate(&dims)?;
        if !fm.constant_covariance() {
            return Err(Error::Config(
                "structured likelihood requires equal class covariances; \
                 use the dense reference path for class-dependent covariance"
                    .into(),
            ));
        }
        let (m, n) = (dims.rows(), dims.cols());
        let t = column_operator(fm, m);
        let k_v = elastic_column_cov(fm, m);
        let s_v = noise_column_cov(fm, m);
        let b = &t * k_v * t.transpose();

        let ch = fm.elastic.corr_h.matrix(n);
        let eig = SymmetricEigen::new(ch);
        let u = eig.eigenvectors;
        let lambda = eig.eigenvalues;

        let delta_mu = fm.elastic.mu1 - fm.elastic.mu0;
        let mut g = DMatrix::zeros(2 * m, m);
        for i in 1..=m {
            for r in 0..2 * m {
                g[(r, i - 1)] =
                    t[(r, stack_idx(i, 0))] * delta_mu[0] + t[(r, stack_idx(i, 1))] * delta_mu[1];
            }
        }
        let mut base = DVector::zeros(2 * m);
        for i in 1..=m {
            base[stack_idx(i, 0)] = fm.elastic.mu0[0];
            base[stack_idx(i, 1)] = fm.elastic.mu0[1];
        }
        let base_mean = &t * base;

        type FactorParts = (Cholesky<f64, Dyn>, DMatrix<f64>, f64);
        let factorize = |k: usize| -> Result<FactorParts> {
            let mk = &b * lambda[k] + &s_v;
            let chol = Cholesky::new(mk).ok_or_else(|| {
                Error::Numeric(format!(
                    "covariance factor for horizontal eigenvalue {k} (lambda = {}) is not positive definite",
                    lambda[k]
                ))
            })?;
            let minv_g = chol.solve(&g);
            let h_k = g.transpose() * &minv_g;
            let logdet: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
            Ok((chol, h_k, logdet))
        };
        let factored: Vec<Result<FactorParts>> = {
            #[cfg(feature = "parallel")]
            {
                (0..n).into_par_iter().map(factorize).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(factorize).collect()
            }
        };
        let mut chols = Vec::with_capacity(n);
        let mut h_per_eig = Vec::with_capacity(n);
        let mut logdet_sum = 0.0;
        for r in factored {
            let (c, h, ld) = r?;
            chols.push(c);
            h_per_eig.push(h);
            logdet_sum += ld;
        }
        let mut h_bar = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = DMatrix::zeros(m, m);
            for k in 0..n {
                let w = u[(j, k)] * u[(j, k)];
                acc += &h_per_eig[k] * w;
            }
            h_bar.push(acc);
        }
        let two_mn = (2 * m * n) as f64;
        let log_norm_const = -0.5 * (two_mn * (2.0 * std::f64::consts::PI).ln() + logdet_sum);
        Ok(LikelihoodEngine { dims, u, chols, h_per_eig, h_bar, g, base_mean, log_norm_const })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    /// Data-mean stack of one column with the given class values.
    pub fn mean_column(&self, col: &[u8]) -> DVector<f64> {
        let mut mean = self.base_mean.clone();
        for (i, &v) in col.iter().enumerate() {
            if v == 1 {
                mean += self.g.column(i);
            }
        }
        mean
    }

    /// The dense data covariance implied by the engine; for diagnostics
    /// and small-lattice checks only.
    pub fn dense_covariance(&self) -> DMatrix<f64> {
        let (m, n) = (self.dims.rows(), self.dims.cols());
        let size = 2 * m * n;
        let mut cov = DMatrix::zeros(size, size);
        // Reassemble from the factorizations: Cov = (U x I) blkdiag(M_k) (U' x I).
        for k in 0..n {
            let l = self.chols[k].l();
            let mk = &l * l.transpose();
            for ja in 0..n {
                for jb in 0..n {
                    let w = self.u[(ja, k)] * self.u[(jb, k)];
                    for r in 0..2 * m {
                        for c in 0..2 * m {
                            cov[(2 * m * ja + r, 2 * m * jb + c)] += w * mk[(r, c)];
                        }
                    }
                }
            }
        }
        cov
    }

    fn residual_matrix(&self, kappa: &LfcField, d: &SeismicCube) -> Result<DMatrix<f64>> {
        if kappa.dims() != self.dims || d.dims() != self.dims {
            return Err(Error::Usage("field/data dims do not match the likelihood engine".into()));
        }
        let (m, n) = (self.dims.rows(), self.dims.cols());
        let mut r = DMatrix::zeros(2 * m, n);
        for j in 1..=n {
            let mean = self.mean_column(&kappa.column(j));
            let obs = d.column_stack(j);
            r.set_column(j - 1, &(obs - mean));
        }
        Ok(r)
    }

    /// From-scratch log N(d; E[d|kappa], Cov[d]).
    pub fn log_likelihood(&self, kappa: &LfcField, d: &SeismicCube) -> Result<f64> {
        let r = self.residual_matrix(kappa, d)?;
        let r_tilde = &r * &self.u;
        let mut quad = 0.0;
        for k in 0..self.dims.cols() {
            let rk = r_tilde.column(k).into_owned();
            let sol = self.chols[k].solve(&rk);
            quad += rk.dot(&sol);
        }
        Ok(self.log_norm_const - 0.5 * quad)
    }

    /// Builds the cached residual state for a chain at `kappa`.
    pub fn init_state(&self, kappa: &LfcField, d: &SeismicCube) -> Result<ResidualState> {
        let r = self.residual_matrix(kappa, d)?;
        let r_tilde = &r * &self.u;
        let (m, n) = (self.dims.rows(), self.dims.cols());
        let mut z = DMatrix::zeros(m, n);
        let mut quad = 0.0;
        for k in 0..n {
            let rk = r_tilde.column(k).into_owned();
            let sol = self.chols[k].solve(&rk);
            quad += rk.dot(&sol);
            z.set_column(k, &(self.g.transpose() * sol));
        }
        Ok(ResidualState { r_tilde, z, log_lik: self.log_norm_const - 0.5 * quad })
    }

    /// Linear coefficient of the column-j log-likelihood at the current
    /// residual: v_j = sum_k U[j,k] z_k.
    fn v_column(&self, state: &ResidualState, j: usize) -> DVector<f64> {
        let m = self.dims.rows();
        let n = self.dims.cols();
        let mut v = DVector::zeros(m);
        for k in 0..n {
            let w = self.u[(j - 1, k)];
            if w != 0.0 {
                v.axpy(w, &state.z.column(k).into_owned(), 1.0);
            }
        }
        v
    }

    /// Exact log-likelihood change from replacing column `j`'s classes,
    /// where `a[i] = new[i] - old[i]` in {-1, 0, 1}.
    pub fn column_delta(&self, state: &ResidualState, j: usize, a: &DVector<f64>) -> f64 {
        let v = self.v_column(state, j);
        let hb = &self.h_bar[j - 1];
        a.dot(&v) - 0.5 * a.dot(&(hb * a))
    }

    /// Commits a column change to the cached state.
    pub fn apply_column(&self, state: &mut ResidualState, j: usize, a: &DVector<f64>, delta: f64) {
        let n = self.dims.cols();
        let shift = &self.g * a;
        for k in 0..n {
            let w = self.u[(j - 1, k)];
            if w != 0.0 {
                let ha = &self.h_per_eig[k] * a;
                let mut zk = state.z.column_mut(k);
                zk.axpy(-w, &ha, 1.0);
                let mut rk = state.r_tilde.column_mut(k);
                rk.axpy(-w, &shift, 1.0);
            }
        }
        state.log_lik += delta;
    }

    /// Exact quadratic representation of the column-j log-likelihood as a
    /// function of the column's class indicators, relative to the current
    /// column values `x0`: log-lik = const + sum h_i x_i + sum_{i<k} Q_ik x_i x_k.
    pub fn column_coupling(
        &self,
        state: &ResidualState,
        j: usize,
        x0: &[u8],
    ) -> (DVector<f64>, DMatrix<f64>) {
        let m = self.dims.rows();
        let v = self.v_column(state, j);
        let hb = &self.h_bar[j - 1];
        let x0v = DVector::from_fn(m, |i, _| x0[i] as f64);
        let hx0 = hb * &x0v;
        let mut h = DVector::zeros(m);
        for i in 0..m {
            h[i] = v[i] - 0.5 * hb[(i, i)] + hx0[i];
        }
        let mut q = DMatrix::zeros(m, m);
        for i in 0..m {
            for k in 0..m {
                if i != k {
                    q[(i, k)] = -hb[(i, k)];
                }
            }
        }
        (h, q)
    }

    /// Convenience wrapper building a fresh state for the public coupling
    /// operation.
    pub fn column_coupling_fresh(
        &self,
        d: &SeismicCube,
        kappa: &LfcField,
        j: usize,
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let state = self.init_state(kappa, d)?;
        Ok(self.column_coupling(&state, j, &kappa.column(j)))
    }

    /// Recomputes the log-likelihood from scratch and checks the cache.
    pub fn audit_state(&self, state: &ResidualState, kappa: &LfcField, d: &SeismicCube) -> Result<f64> {
        let fresh = self.log_likelihood(kappa, d)?;
        let scale = fresh.abs().max(1.0);
        if (fresh - state.log_lik).abs() > 1e-6 * scale {
            return Err(Error::Internal(format!(
                "residual cache drifted: cached {} vs fresh {fresh}",
                state.log_lik
            )));
        }
        Ok(fresh)
    }

    /// Resynchronises the cached value with a from-scratch evaluation.
    pub fn resync_state(&self, state: &mut ResidualState, kappa: &LfcField, d: &SeismicCube) -> Result<()> {
        *state = self.init_state(kappa, d)?;
        Ok(())
    }

    /// Writes the factorization diagnostics (eigenvalues and per-factor
    /// Cholesky diagonals) as CSV files.
    pub fn dump_factors(&self, dir: &std::path::Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut diag = String::from("factor,row,chol_diag\n");
        for (k, c) in self.chols.iter().enumerate() {
            for (r, v) in c.l_dirty().diagonal().iter().enumerate() {
                diag.push_str(&format!("{k},{r},{v}\n"));
            }
        }
        std::fs::write(dir.join("cov_factors.csv"), diag)?;
        Ok(())
    }
}

/// Maximum lattice size for the dense reference likelihood.
pub const DENSE_NODE_CAP: usize = 400;

/// Dense data covariance supporting class-dependent elastic covariance;
/// O((2mn)^3) and restricted to small lattices.
pub fn dense_covariance(fm: &ForwardModel, kappa: &LfcField) -> Result<DMatrix<f64>> {
    let dims = kappa.dims();
    if dims.len() > DENSE_NODE_CAP {
        return Err(Error::Usage(format!(
            "dense likelihood limited to {DENSE_NODE_CAP} nodes, got {}",
            dims.len()
        )));
    }
    fm.validate(&dims)?;
    let (m, n) = (dims.rows(), dims.cols());
    let size = 2 * m * n;

    // Per-node scale factors: Cholesky of the class covariance.
    let l0 = Cholesky::new(fm.elastic.sigma0)
        .ok_or_else(|| Error::Numeric("sigma0 is not positive definite".into()))?
        .l();
    let l1 = Cholesky::new(fm.elastic.sigma1)
        .ok_or_else(|| Error::Numeric("sigma1 is not positive definite".into()))?
        .l();

    // Cov_m[(j,i,a),(j',i',b)] = corr_h corr_v (L L')_{ab} with the class
    // factors of the two nodes.
    let mut cov_m = DMatrix::zeros(size, size);
    for j1 in 1..=n {
        for i1 in 1..=m {
            let la = if kappa.get((i1, j1)) == 1 { &l1 } else { &l0 };
            for j2 in 1..=n {
                for i2 in 1..=m {
                    let lb = if kappa.get((i2, j2)) == 1 { &l1 } else { &l0 };
                    let corr = fm.elastic.corr_v.eval(i1.abs_diff(i2))
                        * fm.elastic.corr_h.eval(j1.abs_diff(j2));
                    if corr == 0.0 {
                        continue;
                    }
                    let block = la * lb.transpose() * corr;
                    let r0 = 2 * m * (j1 - 1) + 2 * (i1 - 1);
                    let c0 = 2 * m * (j2 - 1) + 2 * (i2 - 1);
                    for r in 0..2 {
                        for c in 0..2 {
                            cov_m[(r0 + r, c0 + c)] = block[(r, c)];
                        }
                    }
                }
            }
        }
    }

    let t = column_operator(fm, m);
    let mut t_g = DMatrix::zeros(size, size);
    for j in 0..n {
        let off = 2 * m * j;
        for r in 0..2 * m {
            for c in 0..2 * m {
                t_g[(off + r, off + c)] = t[(r, c)];
            }
        }
    }
    let s_v = noise_column_cov(fm, m);
    let mut cov = &t_g * cov_m * t_g.transpose();
    for j in 0..n {
        let off = 2 * m * j;
        for r in 0..2 * m {
            for c in 0..2 * m {
                cov[(off + r, off + c)] += s_v[(r, c)];
            }
        }
    }
    Ok(cov)
}

/// Global data mean under `kappa`, stacked column-major to match
/// `dense_covariance`.
pub fn dense_mean(fm: &ForwardModel, kappa: &LfcField) -> DVector<f64> {
    let dims = kappa.dims();
    let (m, n) = (dims.rows(), dims.cols());
    let t = column_operator(fm, m);
    let mut mean = DVector::zeros(2 * m * n);
    for j in 1..=n {
        let mut stack = DVector::zeros(2 * m);
        for i in 1..=m {
            let mu = fm.elastic.mu(kappa.get((i, j)));
            stack[stack_idx(i, 0)] = mu[0];
            stack[stack_idx(i, 1)] = mu[1];
        }
        let col = &t * stack;
        for r in 0..2 * m {
            mean[2 * m * (j - 1) + r] = col[r];
        }
    }
    mean
}

/// Slow exact log-likelihood usable with class-dependent covariance.
pub fn dense_log_likelihood(fm: &ForwardModel, kappa: &LfcField, d: &SeismicCube) -> Result<f64> {
    let dims = kappa.dims();
    let (m, n) = (dims.rows(), dims.cols());
    let cov = dense_covariance(fm, kappa)?;
    let mean = dense_mean(fm, kappa);
    let mut obs = DVector::zeros(2 * m * n);
    for j in 1..=n {
        let col = d.column_stack(j);
        for r in 0..2 * m {
            obs[2 * m * (j - 1) + r] = col[r];
        }
    }
    let chol = Cholesky::new(cov).ok_or_else(|| Error::Numeric("dense covariance is not positive definite".into()))?;
    let resid = obs - mean;
    let sol = chol.solve(&resid);
    let logdet: f64 = chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>() * 2.0;
    let dim = (2 * m * n) as f64;
    Ok(-0.5 * (dim * (2.0 * std::f64::consts::PI).ln() + logdet + resid.dot(&sol)))
}

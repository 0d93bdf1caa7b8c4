//! Linearised Gaussian forward model.
//!
//! Elastic parameters given classes are Gaussian with class means and
//! covariances and a separable spatial correlation. The noiseless data
//! mean composes three column-local linear steps: vertical first-order
//! contrasts, a reflection-coefficient block per node, and per-offset
//! wavelet convolution. Synthetic data adds Gaussian noise on top.

use crate::error::{Error, Result};
use crate::lattice::{GridDims, LfcField, Node};
use crate::util::seed_stream;
use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use rand::Rng;
use rand_chacha::ChaCha12Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Exponential correlation of integer lag, truncated beyond `support`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrFn {
    pub range: f64,
    pub support: usize,
}

impl CorrFn {
    pub fn new(range: f64, support: usize) -> Result<Self> {
        if range <= 0.0 || !range.is_finite() {
            return Err(Error::Config(format!("correlation range must be positive, got {range}")));
        }
        Ok(CorrFn { range, support })
    }

    /// White correlation (zero at every nonzero lag).
    pub fn white() -> Self {
        CorrFn { range: 1e-12, support: 0 }
    }

    pub fn eval(&self, lag: usize) -> f64 {
        if lag == 0 {
            1.0
        } else if lag > self.support {
            0.0
        } else {
            (-(lag as f64) / self.range).exp()
        }
    }

    /// Dense correlation matrix over `n` positions.
    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| self.eval(i.abs_diff(j)))
    }
}

/// Elastic-parameter statistics per class. Component 1 is the
/// density-velocity product, component 2 the velocity ratio.
#[derive(Debug, Clone)]
pub struct ElasticClassStats {
    pub mu0: Vector2<f64>,
    pub mu1: Vector2<f64>,
    pub sigma0: Matrix2<f64>,
    pub sigma1: Matrix2<f64>,
    pub corr_v: CorrFn,
    pub corr_h: CorrFn,
}

impl ElasticClassStats {
    pub fn validate(&self) -> Result<()> {
        for (name, s) in [("sigma0", &self.sigma0), ("sigma1", &self.sigma1)] {
            if (s[(0, 1)] - s[(1, 0)]).abs() > 1e-12 {
                return Err(Error::Config(format!("{name} is not symmetric")));
            }
            let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
            if s[(0, 0)] <= 0.0 || det <= 0.0 {
                return Err(Error::Numeric(format!("{name} is not positive definite")));
            }
        }
        Ok(())
    }

    pub fn mu(&self, class: u8) -> Vector2<f64> {
        if class == 1 {
            self.mu1
        } else {
            self.mu0
        }
    }

    pub fn sigma(&self, class: u8) -> Matrix2<f64> {
        if class == 1 {
            self.sigma1
        } else {
            self.sigma0
        }
    }
}

/// Per-node 2x2 coefficient block mapping an elastic contrast vector to
/// the (near, far) reflection-coefficient pair.
#[derive(Debug, Clone, Copy)]
pub struct AkiCoeffBlock {
    pub near: [f64; 2],
    pub far: [f64; 2],
}

impl AkiCoeffBlock {
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.near[0], self.near[1], self.far[0], self.far[1])
    }
}

#[derive(Debug, Clone)]
pub struct Wavelet {
    samples: Vec<f64>,
    center: usize,
}

impl Wavelet {
    pub fn new(samples: Vec<f64>, center: usize) -> Result<Self> {
        if samples.is_empty() || center >= samples.len() {
            return Err(Error::Config(format!(
                "wavelet center {center} invalid for length {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("wavelet samples must be finite".into()));
        }
        Ok(Wavelet { samples, center })
    }

    /// Single unit sample; convolution with it is the identity.
    pub fn delta() -> Self {
        Wavelet { samples: vec![1.0], center: 0 }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Same-length convolution centered at the wavelet's zero-lag sample.
    pub fn convolve_same(&self, signal: &[f64]) -> Vec<f64> {
        let n = signal.len();
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, &w) in self.samples.iter().enumerate() {
                // w[k] multiplies signal[i + center - k].
                let s = i as i64 + self.center as i64 - k as i64;
                if s >= 0 && (s as usize) < n {
                    acc += w * signal[s as usize];
                }
            }
            *slot = acc;
        }
        out
    }
}

/// Standard Ricker wavelet, unit peak amplitude, centered.
pub fn ricker(peak_frequency: f64, length: usize) -> Result<Wavelet> {
    if length == 0 || length.is_multiple_of(2) {
        return Err(Error::Config(format!("ricker length must be odd, got {length}")));
    }
    if !(peak_frequency > 0.0 && peak_frequency < 0.5) {
        return Err(Error::Config(format!(
            "ricker peak frequency must be in (0, 0.5) cycles/sample, got {peak_frequency}"
        )));
    }
    let center = (length - 1) / 2;
    let samples = (0..length)
        .map(|k| {
            let t = k as f64 - center as f64;
            let a = std::f64::consts::PI * peak_frequency * t;
            let a2 = a * a;
            (1.0 - 2.0 * a2) * (-a2).exp()
        })
        .collect();
    Wavelet::new(samples, center)
}

/// Additive Gaussian noise: independent near/far components with optional
/// vertical correlation down each trace.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    pub sd_near: f64,
    pub sd_far: f64,
    pub corr_v: Option<CorrFn>,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        if self.sd_near <= 0.0 || self.sd_far <= 0.0 {
            return Err(Error::Config("noise standard deviations must be positive".into()));
        }
        Ok(())
    }
}

/// Two values per node (near, far), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeismicCube {
    dims: GridDims,
    values: Vec<[f64; 2]>,
}

impl SeismicCube {
    pub fn zeros(dims: GridDims) -> Self {
        SeismicCube { dims, values: vec![[0.0, 0.0]; dims.len()] }
    }

    pub fn from_values(dims: GridDims, values: Vec<[f64; 2]>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::Usage("cube length does not match dims".into()));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Usage("cube values must be finite".into()));
        }
        Ok(SeismicCube { dims, values })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn get(&self, node: Node) -> [f64; 2] {
        self.values[self.dims.linear(node)]
    }

    pub fn set(&mut self, node: Node, v: [f64; 2]) {
        let idx = self.dims.linear(node);
        self.values[idx] = v;
    }

    /// Column `j` as an interleaved (near, far) vector of length 2m.
    pub fn column_stack(&self, j: usize) -> DVector<f64> {
        let m = self.dims.rows();
        DVector::from_fn(2 * m, |r, _| {
            let i = r / 2 + 1;
            self.values[self.dims.linear((i, j))][r % 2]
        })
    }
}

/// Elastic parameter field: a 2-vector per node, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticField {
    dims: GridDims,
    values: Vec<[f64; 2]>,
}

impl ElasticField {
    pub fn zeros(dims: GridDims) -> Self {
        ElasticField { dims, values: vec![[0.0, 0.0]; dims.len()] }
    }

    pub fn from_values(dims: GridDims, values: Vec<[f64; 2]>) -> Result<Self> {
        if values.len() != dims.len() {
            return Err(Error::Usage("elastic field length does not match dims".into()));
        }
        Ok(ElasticField { dims, values })
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn get(&self, node: Node) -> [f64; 2] {
        self.values[self.dims.linear(node)]
    }

    pub fn set(&mut self, node: Node, v: [f64; 2]) {
        let idx = self.dims.linear(node);
        self.values[idx] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Vector2<f64>> {
        (1..=self.dims.rows()).map(|i| {
            let [a, b] = self.get((i, j));
            Vector2::new(a, b)
        }).collect()
    }
}

/// The complete forward model.
#[derive(Debug, Clone)]
pub struct ForwardModel {
    pub elastic: ElasticClassStats,
    pub aki: AkiCoeffBlock,
    pub wavelet_near: Wavelet,
    pub wavelet_far: Wavelet,
    pub noise: NoiseModel,
}

impl ForwardModel {
    pub fn validate(&self, dims: &GridDims) -> Result<()> {
        self.elastic.validate()?;
        self.noise.validate()?;
        let limit = 2 * dims.rows() - 1;
        for (name, w) in [("near", &self.wavelet_near), ("far", &self.wavelet_far)] {
            if w.samples().len() > limit {
                return Err(Error::Config(format!(
                    "{name} wavelet length {} exceeds 2m-1 = {limit}",
                    w.samples().len()
                )));
            }
        }
        Ok(())
    }

    /// True if the two class covariances coincide, so the data covariance
    /// does not depend on the class field.
    pub fn constant_covariance(&self) -> bool {
        self.elastic.sigma0 == self.elastic.sigma1
    }
}

/// Vertical first-order contrasts down one column; the first row keeps an
/// implicit zero predecessor.
pub fn contrast_column(column: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let mut out = Vec::with_capacity(column.len());
    let mut prev = Vector2::zeros();
    for v in column {
        out.push(v - prev);
        prev = *v;
    }
    out
}

fn synthesize_mean_column(fm: &ForwardModel, column: &[Vector2<f64>]) -> Vec<[f64; 2]> {
    let contrasts = contrast_column(column);
    let a = fm.aki.matrix();
    let refl: Vec<Vector2<f64>> = contrasts.iter().map(|c| a * c).collect();
    let near: Vec<f64> = refl.iter().map(|r| r[0]).collect();
    let far: Vec<f64> = refl.iter().map(|r| r[1]).collect();
    let near = fm.wavelet_near.convolve_same(&near);
    let far = fm.wavelet_far.convolve_same(&far);
    near.into_iter().zip(far).map(|(a, b)| [a, b]).collect()
}

/// Noiseless data mean for an elastic field; purely column-local.
pub fn synthesize_mean(fm: &ForwardModel, mfield: &ElasticField) -> Result<SeismicCube> {
    let dims = mfield.dims();
    fm.validate(&dims)?;
    let columns: Vec<Vec<[f64; 2]>> = {
        #[cfg(feature = "parallel")]
        {
            (1..=dims.cols())
                .into_par_iter()
                .map(|j| synthesize_mean_column(fm, &mfield.column(j)))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (1..=dims.cols()).map(|j| synthesize_mean_column(fm, &mfield.column(j))).collect()
        }
    };
    assemble_cube(dims, columns)
}

/// Sequential reference path for `synthesize_mean`; identical output.
pub fn synthesize_mean_seq(fm: &ForwardModel, mfield: &ElasticField) -> Result<SeismicCube> {
    let dims = mfield.dims();
    fm.validate(&dims)?;
    let columns: Vec<Vec<[f64; 2]>> =
        (1..=dims.cols()).map(|j| synthesize_mean_column(fm, &mfield.column(j))).collect();
    assemble_cube(dims, columns)
}

fn assemble_cube(dims: GridDims, columns: Vec<Vec<[f64; 2]>>) -> Result<SeismicCube> {
    let mut cube = SeismicCube::zeros(dims);
    for (jm1, col) in columns.into_iter().enumerate() {
        for (im1, v) in col.into_iter().enumerate() {
            cube.set((im1 + 1, jm1 + 1), v);
        }
    }
    Ok(cube)
}

/// Symmetric PSD square root via eigendecomposition with negative
/// eigenvalues clamped to zero (truncated correlations can dip slightly
/// below PSD).
pub fn psd_sqrt(mat: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(mat.clone());
    let vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

/// Draws the elastic field given classes: node means and covariances by
/// class, separable vertical-by-horizontal correlation across nodes.
pub fn sample_elastic(fm: &ForwardModel, kappa: &LfcField, seed: u64) -> Result<ElasticField> {
    let dims = kappa.dims();
    fm.validate(&dims)?;
    let (m, n) = (dims.rows(), dims.cols());
    let mut rng = seed_stream(seed, 1);

    let lv = psd_sqrt(&fm.elastic.corr_v.matrix(m));
    let lh = psd_sqrt(&fm.elastic.corr_h.matrix(n));

    // Correlated standard field per component: L_v Z L_h^T.
    let mut comps = Vec::with_capacity(2);
    for _ in 0..2 {
        let z = DMatrix::from_fn(m, n, |_, _| standard_normal(&mut rng));
        comps.push(&lv * z * lh.transpose());
    }

    let chol0 = spd_chol2(&fm.elastic.sigma0, "sigma0")?;
    let chol1 = spd_chol2(&fm.elastic.sigma1, "sigma1")?;
    let mut out = ElasticField::zeros(dims);
    for node in dims.nodes() {
        let class = kappa.get(node);
        let l = if class == 1 { &chol1 } else { &chol0 };
        let z = Vector2::new(comps[0][(node.0 - 1, node.1 - 1)], comps[1][(node.0 - 1, node.1 - 1)]);
        let v = fm.elastic.mu(class) + l * z;
        out.set(node, [v[0], v[1]]);
    }
    Ok(out)
}

fn spd_chol2(s: &Matrix2<f64>, name: &str) -> Result<Matrix2<f64>> {
    nalgebra::Cholesky::new(*s)
        .map(|c| c.l())
        .ok_or_else(|| Error::Numeric(format!("{name} is not positive definite")))
}

fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    // Box-Muller; one value per call keeps the stream layout simple.
    loop {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        if u1 > 0.0 {
            return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        }
    }
}

/// Adds model noise to a noiseless cube in place.
fn add_noise(fm: &ForwardModel, cube: &mut SeismicCube, rng: &mut ChaCha12Rng) {
    let dims = cube.dims();
    let (m, n) = (dims.rows(), dims.cols());
    let lv_noise = fm.noise.corr_v.as_ref().map(|c| psd_sqrt(&c.matrix(m)));
    for comp in 0..2 {
        let sd = if comp == 0 { fm.noise.sd_near } else { fm.noise.sd_far };
        for j in 1..=n {
            let mut trace: DVector<f64> = DVector::from_fn(m, |_, _| standard_normal(rng));
            if let Some(l) = &lv_noise {
                trace = l * trace;
            }
            for i in 1..=m {
                let mut v = cube.get((i, j));
                v[comp] += sd * trace[i - 1];
                cube.set((i, j), v);
            }
        }
    }
}

/// Full generative draw: elastic field, noiseless mean, additive noise.
pub fn synthesize_data(fm: &ForwardModel, kappa: &LfcField, seed: u64) -> Result<SeismicCube> {
    let mfield = sample_elastic(fm, kappa, seed)?;
    let mut cube = synthesize_mean(fm, &mfield)?;
    let mut rng = seed_stream(seed, 2);
    add_noise(fm, &mut cube, &mut rng);
    Ok(cube)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn toy_model() -> ForwardModel {
        ForwardModel {
            elastic: ElasticClassStats {
                mu0: Vector2::new(2.0, 1.0),
                mu1: Vector2::new(1.0, 0.5),
                sigma0: Matrix2::new(0.04, 0.0, 0.0, 0.01),
                sigma1: Matrix2::new(0.04, 0.0, 0.0, 0.01),
                corr_v: CorrFn::new(2.0, 6).unwrap(),
                corr_h: CorrFn::new(3.0, 8).unwrap(),
            },
            aki: AkiCoeffBlock { near: [0.5, -0.1], far: [0.5, -0.4] },
            wavelet_near: Wavelet::delta(),
            wavelet_far: Wavelet::delta(),
            noise: NoiseModel { sd_near: 0.05, sd_far: 0.05, corr_v: None },
        }
    }

    #[test]
    fn contrast_examples() {
        let c = Vector2::new(3.0, -1.0);
        let col = vec![c, c, c, c];
        let d = contrast_column(&col);
        assert_eq!(d[0], c);
        for v in d.iter().skip(1) {
            assert_eq!(*v, Vector2::zeros());
        }
        let zeros = vec![Vector2::zeros(); 5];
        assert!(contrast_column(&zeros).iter().all(|v| *v == Vector2::zeros()));
        // single step at row 3 (index 2)
        let mut col2 = vec![Vector2::zeros(); 5];
        for v in col2.iter_mut().skip(2) {
            *v = Vector2::new(1.0, 2.0);
        }
        let d2 = contrast_column(&col2);
        assert_eq!(d2[2], Vector2::new(1.0, 2.0));
        assert_eq!(d2[0], Vector2::zeros());
        assert_eq!(d2[3], Vector2::zeros());
    }

    #[test]
    fn mean_of_zero_field_is_zero() {
        let fm = toy_model();
        let dims = GridDims::new(6, 3).unwrap();
        let mfield = ElasticField::zeros(dims);
        let cube = synthesize_mean(&fm, &mfield).unwrap();
        for node in dims.nodes() {
            assert_eq!(cube.get(node), [0.0, 0.0]);
        }
    }

    #[test]
    fn delta_wavelet_applies_block_to_spike() {
        let fm = toy_model();
        let dims = GridDims::new(5, 1).unwrap();
        let mut mfield = ElasticField::zeros(dims);
        // Step at row 3 makes a single contrast spike there.
        for i in 3..=5 {
            mfield.set((i, 1), [1.0, 2.0]);
        }
        let cube = synthesize_mean(&fm, &mfield).unwrap();
        let r = fm.aki.matrix() * Vector2::new(1.0, 2.0);
        assert_abs_diff_eq!(cube.get((3, 1))[0], r[0], epsilon = 1e-14);
        assert_abs_diff_eq!(cube.get((3, 1))[1], r[1], epsilon = 1e-14);
        assert_eq!(cube.get((2, 1)), [0.0, 0.0]);
        assert_eq!(cube.get((5, 1)), [0.0, 0.0]);
    }

    #[test]
    fn ricker_wavelet_centers_spike() {
        let mut fm = toy_model();
        fm.wavelet_near = ricker(0.1, 15).unwrap();
        fm.wavelet_far = ricker(0.1, 15).unwrap();
        let dims = GridDims::new(31, 1).unwrap();
        let mut mfield = ElasticField::zeros(dims);
        for i in 16..=31 {
            mfield.set((i, 1), [1.0, 0.0]);
        }
        let cube = synthesize_mean(&fm, &mfield).unwrap();
        let scale = fm.aki.near[0];
        let w = fm.wavelet_near.samples();
        // Trace equals the scaled wavelet centered at the spike row 16.
        for i in 1..=31i64 {
            let k = (i - 16) + fm.wavelet_near.center() as i64;
            let expect = if k >= 0 && (k as usize) < w.len() { scale * w[k as usize] } else { 0.0 };
            assert_abs_diff_eq!(cube.get((i as usize, 1))[0], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn ricker_properties() {
        let w = ricker(0.05, 201).unwrap();
        let c = w.center();
        assert_abs_diff_eq!(w.samples()[c], 1.0, epsilon = 0.0);
        for k in 0..w.samples().len() {
            assert_abs_diff_eq!(w.samples()[k], w.samples()[w.samples().len() - 1 - k], epsilon = 1e-15);
        }
        let sum: f64 = w.samples().iter().sum();
        assert!(sum.abs() < 1e-8, "sum {sum}");
        assert!(ricker(0.1, 10).is_err());
        assert!(ricker(0.6, 11).is_err());
    }

    #[test]
    fn synthesize_mean_is_linear() {
        let fm = toy_model();
        let dims = GridDims::new(7, 4).unwrap();
        let mut m1 = ElasticField::zeros(dims);
        let mut m2 = ElasticField::zeros(dims);
        let mut rng = seed_stream(3, 3);
        for node in dims.nodes() {
            m1.set(node, [rng.gen::<f64>(), rng.gen::<f64>()]);
            m2.set(node, [rng.gen::<f64>(), rng.gen::<f64>()]);
        }
        let (a, b) = (1.7, -0.6);
        let mut mc = ElasticField::zeros(dims);
        for node in dims.nodes() {
            let v1 = m1.get(node);
            let v2 = m2.get(node);
            mc.set(node, [a * v1[0] + b * v2[0], a * v1[1] + b * v2[1]]);
        }
        let c1 = synthesize_mean(&fm, &m1).unwrap();
        let c2 = synthesize_mean(&fm, &m2).unwrap();
        let cc = synthesize_mean(&fm, &mc).unwrap();
        for node in dims.nodes() {
            for comp in 0..2 {
                let expect = a * c1.get(node)[comp] + b * c2.get(node)[comp];
                let scale = expect.abs().max(1.0);
                assert!((cc.get(node)[comp] - expect).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn column_locality() {
        let fm = toy_model();
        let dims = GridDims::new(6, 5).unwrap();
        let mut m1 = ElasticField::zeros(dims);
        let mut rng = seed_stream(8, 1);
        for node in dims.nodes() {
            m1.set(node, [rng.gen::<f64>(), rng.gen::<f64>()]);
        }
        let mut m2 = m1.clone();
        for i in 1..=6 {
            m2.set((i, 3), [rng.gen::<f64>(), rng.gen::<f64>()]);
        }
        let c1 = synthesize_mean(&fm, &m1).unwrap();
        let c2 = synthesize_mean(&fm, &m2).unwrap();
        for node in dims.nodes() {
            if node.1 != 3 {
                assert_eq!(c1.get(node), c2.get(node));
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut fm = toy_model();
        fm.wavelet_near = ricker(0.12, 9).unwrap();
        let dims = GridDims::new(10, 7).unwrap();
        let mut mfield = ElasticField::zeros(dims);
        let mut rng = seed_stream(5, 5);
        for node in dims.nodes() {
            mfield.set(node, [rng.gen::<f64>(), rng.gen::<f64>()]);
        }
        assert_eq!(synthesize_mean(&fm, &mfield).unwrap(), synthesize_mean_seq(&fm, &mfield).unwrap());
    }

    #[test]
    fn sample_elastic_degenerate_limit() {
        let mut fm = toy_model();
        fm.elastic.corr_v = CorrFn::white();
        fm.elastic.corr_h = CorrFn::white();
        let eps = 1e-20;
        fm.elastic.sigma0 = Matrix2::new(eps, 0.0, 0.0, eps);
        fm.elastic.sigma1 = Matrix2::new(eps, 0.0, 0.0, eps);
        let dims = GridDims::new(4, 3).unwrap();
        let mut kappa = LfcField::zeros(dims);
        kappa.set((2, 2), 1);
        let mf = sample_elastic(&fm, &kappa, 11).unwrap();
        for node in dims.nodes() {
            let mu = fm.elastic.mu(kappa.get(node));
            assert_abs_diff_eq!(mf.get(node)[0], mu[0], epsilon = 1e-8);
            assert_abs_diff_eq!(mf.get(node)[1], mu[1], epsilon = 1e-8);
        }
    }

    #[test]
    fn synthesize_data_deterministic() {
        let fm = toy_model();
        let dims = GridDims::new(8, 4).unwrap();
        let mut kappa = LfcField::zeros(dims);
        kappa.set((3, 2), 1);
        kappa.set((4, 2), 1);
        let a = synthesize_data(&fm, &kappa, 99).unwrap();
        let b = synthesize_data(&fm, &kappa, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wavelet_too_long_rejected() {
        let mut fm = toy_model();
        fm.wavelet_near = ricker(0.05, 21).unwrap();
        let dims = GridDims::new(5, 2).unwrap();
        assert!(matches!(fm.validate(&dims), Err(Error::Config(_))));
    }
}

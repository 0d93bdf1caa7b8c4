//! Column-block Metropolis-Hastings over the class field.
//!
//! Each update proposes a whole column from a chain that combines the
//! prior's column conditional with the likelihood's exact linear terms
//! and its pairwise coupling truncated to a bandwidth `nu`. With `nu` at
//! least the full coupling range the proposal is the exact full
//! conditional and every proposal is accepted; smaller `nu` trades
//! acceptance for cheaper chains.

use crate::chain::{ColumnChain, Factor};
use crate::error::{Error, Result};
use crate::forward::SeismicCube;
use crate::lattice::{GridDims, LfcField};
use crate::likelihood::{LikelihoodEngine, ResidualState};
use crate::mesh_prior::MeshPriorSpec;
use crate::profile_prior::{ProfileTransitionTable, DEFAULT_PRIOR_SWEEPS};
use crate::util::seed_stream;
use rand::Rng;

/// What the sampler needs from a prior: column conditionals as chain
/// factors, plus whole-field quantities for traces and initial states.
pub trait ColumnPrior: Sync {
    /// Markov order of the column conditional chain.
    fn chain_order(&self) -> usize;
    /// Factors of p(column j | rest of field).
    fn column_factors(&self, field: &LfcField, j: usize) -> Result<Vec<Factor>>;
    /// Whole-field log-density (or pseudo log-density) for traces.
    fn log_density(&self, field: &LfcField) -> Result<f64>;
    /// A draw from the prior to start a chain from.
    fn sample_initial(&self, dims: GridDims, seed: u64) -> Result<LfcField>;
    /// Short label used in run manifests.
    fn label(&self) -> &'static str;

    fn column_conditional(&self, field: &LfcField, j: usize) -> Result<ColumnChain> {
        let factors = self.column_factors(field, j)?;
        ColumnChain::from_factors(field.dims().rows(), &factors, self.chain_order())
    }
}

impl ColumnPrior for MeshPriorSpec {
    fn chain_order(&self) -> usize {
        MeshPriorSpec::chain_order(self)
    }

    fn column_factors(&self, field: &LfcField, j: usize) -> Result<Vec<Factor>> {
        MeshPriorSpec::column_factors(self, field, j)
    }

    fn log_density(&self, field: &LfcField) -> Result<f64> {
        Ok(MeshPriorSpec::log_density(self, field))
    }

    fn sample_initial(&self, dims: GridDims, seed: u64) -> Result<LfcField> {
        Ok(self.simulate(dims, seed))
    }

    fn label(&self) -> &'static str {
        "mesh"
    }
}

impl ColumnPrior for ProfileTransitionTable {
    fn chain_order(&self) -> usize {
        1
    }

    fn column_factors(&self, field: &LfcField, j: usize) -> Result<Vec<Factor>> {
        ProfileTransitionTable::column_factors(self, field, j)
    }

    fn log_density(&self, field: &LfcField) -> Result<f64> {
        self.pseudo_log_density(field)
    }

    fn sample_initial(&self, dims: GridDims, seed: u64) -> Result<LfcField> {
        self.simulate_prior(dims, DEFAULT_PRIOR_SWEEPS, seed)
    }

    fn label(&self) -> &'static str {
        "profile"
    }
}

#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Total sweeps, including burn-in.
    pub sweeps: usize,
    /// Sweeps discarded before retaining samples.
    pub burn_in: usize,
    /// Keep every `thin`-th post-burn-in sweep.
    pub thin: usize,
    /// Proposal coupling bandwidth; 0 keeps only the linear terms.
    pub nu: usize,
    pub seed: u64,
    /// Recheck the cached likelihood every this many sweeps (0 = never).
    pub audit_every: usize,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::Usage("sweeps must be positive".into()));
        }
        if self.burn_in >= self.sweeps {
            return Err(Error::Usage(format!(
                "burn-in {} must be below total sweeps {}",
                self.burn_in, self.sweeps
            )));
        }
        if self.thin == 0 {
            return Err(Error::Usage("thin must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub sweep: usize,
    pub log_prior: f64,
    pub log_lik: f64,
    pub sand_fraction: f64,
    pub accept_rate: f64,
}

pub struct RunResult {
    /// Retained post-burn-in fields.
    pub samples: Vec<LfcField>,
    pub trace: Vec<TraceRow>,
    pub final_field: LfcField,
    /// Accepted column proposals over all proposals, whole run.
    pub accept_rate: f64,
}

/// Builds the column-j proposal chain: prior factors plus likelihood
/// linear terms and coupling pairs within bandwidth `nu`.
pub fn build_proposal(
    prior: &dyn ColumnPrior,
    engine: &LikelihoodEngine,
    state: &ResidualState,
    field: &LfcField,
    j: usize,
    nu: usize,
) -> Result<ColumnChain> {
    let m = field.dims().rows();
    let mut factors = prior.column_factors(field, j)?;
    let (h, q) = engine.column_coupling(state, j, &field.column(j));
    for i in 0..m {
        factors.push(Factor::new(vec![i], vec![0.0, h[i]]));
    }
    for i in 0..m {
        for k in (i + 1)..m.min(i + nu + 1) {
            let w = q[(i, k)];
            if w != 0.0 {
                factors.push(Factor::new(vec![i, k], vec![0.0, 0.0, 0.0, w]));
            }
        }
    }
    ColumnChain::from_factors(m, &factors, prior.chain_order())
}

/// One column proposal and accept/reject decision; returns whether the
/// proposal was accepted.
#[allow(clippy::too_many_arguments)]
fn mh_column_update<R: Rng + ?Sized>(
    prior: &dyn ColumnPrior,
    engine: Option<&LikelihoodEngine>,
    state: &mut Option<ResidualState>,
    field: &mut LfcField,
    j: usize,
    nu: usize,
    rng: &mut R,
) -> Result<bool> {
    let prior_chain = prior.column_conditional(field, j)?;
    let (engine, state) = match (engine, state.as_mut()) {
        (Some(e), Some(s)) => (e, s),
        _ => {
            // Flat likelihood: the proposal is the prior conditional, so
            // this is an exact Gibbs update.
            let (col, _) = prior_chain.sample(rng);
            field.set_column(j, &col);
            return Ok(true);
        }
    };
    let proposal = build_proposal(prior, engine, state, field, j, nu)?;
    let old = field.column(j);
    let (new, logq_new) = proposal.sample(rng);
    if new == old {
        return Ok(true);
    }
    let m = field.dims().rows();
    let a = nalgebra::DVector::from_fn(m, |i, _| new[i] as f64 - old[i] as f64);
    let delta_ll = engine.column_delta(state, j, &a);
    let log_alpha = prior_chain.log_prob(&new) - prior_chain.log_prob(&old) + delta_ll
        + proposal.log_prob(&old)
        - logq_new;
    let accept = log_alpha >= 0.0 || rng.gen::<f64>().ln() < log_alpha;
    if accept {
        field.set_column(j, &new);
        engine.apply_column(state, j, &a, delta_ll);
    }
    Ok(accept)
}

/// Runs one chain. With `likelihood == None` the sampler targets the
/// prior alone (exact Gibbs, acceptance 1).
pub fn run_chain(
    prior: &dyn ColumnPrior,
    likelihood: Option<(&LikelihoodEngine, &SeismicCube)>,
    dims: GridDims,
    cfg: &SamplerConfig,
) -> Result<RunResult> {
    cfg.validate()?;
    let mut rng = seed_stream(cfg.seed, 10);
    let mut field = prior.sample_initial(dims, cfg.seed.wrapping_add(1))?;
    let mut state = match likelihood {
        Some((engine, data)) => Some(engine.init_state(&field, data)?),
        None => None,
    };
    let n = dims.cols();
    let mut samples = Vec::new();
    let mut trace = Vec::with_capacity(cfg.sweeps);
    let mut accepted = 0usize;
    let mut proposed = 0usize;
    for sweep in 1..=cfg.sweeps {
        let mut sweep_acc = 0usize;
        for j in 1..=n {
            let engine = likelihood.map(|(e, _)| e);
            if mh_column_update(prior, engine, &mut state, &mut field, j, cfg.nu, &mut rng)? {
                sweep_acc += 1;
            }
        }
        accepted += sweep_acc;
        proposed += n;
        if cfg.audit_every > 0 && sweep % cfg.audit_every == 0 {
            if let (Some((engine, data)), Some(s)) = (likelihood, state.as_ref()) {
                engine.audit_state(s, &field, data)?;
            }
        }
        let log_prior = prior.log_density(&field)?;
        let log_lik = state.as_ref().map(|s| s.log_lik).unwrap_or(0.0);
        trace.push(TraceRow {
            sweep,
            log_prior,
            log_lik,
            sand_fraction: field.sand_count() as f64 / dims.len() as f64,
            accept_rate: sweep_acc as f64 / n as f64,
        });
        if sweep > cfg.burn_in && (sweep - cfg.burn_in).is_multiple_of(cfg.thin) {
            samples.push(field.clone());
        }
    }
    Ok(RunResult {
        samples,
        trace,
        final_field: field,
        accept_rate: accepted as f64 / proposed as f64,
    })
}

/// Geweke-style z-score comparing early and late means of a trace
/// series; |z| below ~2 is consistent with stationarity.
pub fn geweke_z(series: &[f64], early_frac: f64, late_frac: f64) -> Option<f64> {
    let n = series.len();
    let ne = ((n as f64) * early_frac) as usize;
    let nl = ((n as f64) * late_frac) as usize;
    if ne < 2 || nl < 2 || ne + nl > n {
        return None;
    }
    let early = &series[..ne];
    let late = &series[n - nl..];
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let var = |s: &[f64], mu: f64| {
        s.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (s.len() - 1) as f64
    };
    let (me, ml) = (mean(early), mean(late));
    let (ve, vl) = (var(early, me), var(late, ml));
    let denom = (ve / ne as f64 + vl / nl as f64).sqrt();
    if denom == 0.0 {
        return Some(0.0);
    }
    Some((me - ml) / denom)
}

#[derive(Debug, Clone)]
pub struct TuneEntry {
    pub nu: usize,
    pub accept_rate: f64,
}

/// Short pilot runs over candidate bandwidths; picks the smallest `nu`
/// reaching `target` acceptance, falling back to the best observed.
pub fn tune_nu(
    prior: &dyn ColumnPrior,
    likelihood: (&LikelihoodEngine, &SeismicCube),
    dims: GridDims,
    candidates: &[usize],
    pilot_sweeps: usize,
    target: f64,
    seed: u64,
) -> Result<(usize, Vec<TuneEntry>)> {
    if candidates.is_empty() {
        return Err(Error::Usage("no bandwidth candidates given".into()));
    }
    let mut entries = Vec::with_capacity(candidates.len());
    for &nu in candidates {
        let cfg = SamplerConfig {
            sweeps: pilot_sweeps.max(2),
            burn_in: pilot_sweeps.max(2) / 2,
            thin: 1,
            nu,
            seed,
            audit_every: 0,
        };
        let run = run_chain(prior, Some(likelihood), dims, &cfg)?;
        entries.push(TuneEntry { nu, accept_rate: run.accept_rate });
    }
    let chosen = entries
        .iter()
        .filter(|e| e.accept_rate >= target)
        .map(|e| e.nu)
        .min()
        .unwrap_or_else(|| {
            entries
                .iter()
                .max_by(|a, b| a.accept_rate.total_cmp(&b.accept_rate))
                .map(|e| e.nu)
                .unwrap()
        });
    Ok((chosen, entries))
}

//! Seeded Monte Carlo sweep over the noise grid.
//!
//! Every `(noise point, trial)` pair owns a ChaCha stream selected by
//! `(seed, noise_index, trial_index)`, so results do not depend on how
//! trials are spread over worker threads. All schemes of a trial see the
//! same channel draw.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::allocation::{solve, upper_bound_c, upper_bound_q, Problem, SolveOptions, SolveOutcome};
use crate::baselines::{ps_solve, ts_solve, Objective, SwitchSolution};
use crate::error::{Error, Result};
use crate::power_alloc::{spa_pipeline, SpaConfig, SpaMode};
use crate::rf_model::{compute_metrics, sample_rayleigh, ChannelRealization, PowerVector, SubcarrierMetrics};
use crate::sim::config::{noise_variance_from_db, Scheme, SimConfig};

/// Aggregate of one scheme at one noise point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub noise_db: f64,
    pub scheme: Scheme,
    /// Mean over feasible trials; NaN when none was feasible.
    pub mean_objective: f64,
    pub mean_constraint: f64,
    pub mean_info_count: f64,
    pub mean_harvest_count: f64,
    pub infeasible_fraction: f64,
    pub trials: u64,
}

/// What one scheme produced on one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Evaluation {
    feasible: bool,
    objective: f64,
    constraint: f64,
    info_count: f64,
    harvest_count: f64,
}

impl Evaluation {
    fn from_outcome(o: &SolveOutcome) -> Self {
        Self {
            feasible: o.feasible,
            objective: o.objective,
            constraint: o.constraint_used,
            info_count: o.mask.info_count() as f64,
            harvest_count: o.mask.harvest_count() as f64,
        }
    }

    /// TS and PS use every subcarrier; the split ratio is reported as the
    /// equivalent number of harvesting subcarriers.
    fn from_switch(s: &SwitchSolution, problem: Problem, k: usize) -> Self {
        let (objective, constraint) = match problem {
            Problem::P1 => (s.capacity, s.harvested),
            Problem::P2 => (s.harvested, s.capacity),
        };
        let harvest_count = s.ratio * k as f64;
        Self { feasible: s.feasible, objective, constraint, info_count: k as f64 - harvest_count, harvest_count }
    }

    fn infeasible(problem: Problem, k: usize) -> Self {
        let (info_count, harvest_count) = match problem {
            Problem::P1 => (0.0, k as f64),
            Problem::P2 => (k as f64, 0.0),
        };
        Self { feasible: false, objective: f64::NAN, constraint: f64::NAN, info_count, harvest_count }
    }
}

/// Channel source for a `(noise_index, trial_index)` pair.
pub trait GainSource: Sync {
    fn gains(&self, noise_index: usize, trial_index: usize) -> Result<Vec<Complex64>>;
}

/// Rayleigh draws from per-trial ChaCha streams.
#[derive(Debug, Clone, Copy)]
pub struct RayleighSource {
    pub seed: u64,
    pub num_subcarriers: usize,
    pub mean_power: f64,
}

impl RayleighSource {
    pub fn from_config(cfg: &SimConfig) -> Self {
        Self { seed: cfg.seed, num_subcarriers: cfg.num_subcarriers, mean_power: cfg.mean_power }
    }

    pub fn rng(&self, noise_index: usize, trial_index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((noise_index as u64) << 40) | trial_index as u64);
        rng
    }
}

impl GainSource for RayleighSource {
    fn gains(&self, noise_index: usize, trial_index: usize) -> Result<Vec<Complex64>> {
        sample_rayleigh(self.num_subcarriers, &mut self.rng(noise_index, trial_index), self.mean_power)
    }
}

impl<F> GainSource for F
where
    F: Fn(usize, usize) -> Vec<Complex64> + Sync,
{
    fn gains(&self, noise_index: usize, trial_index: usize) -> Result<Vec<Complex64>> {
        Ok(self(noise_index, trial_index))
    }
}

/// Runs the sweep on the current rayon pool.
pub fn run_sweep(cfg: &SimConfig) -> Result<Vec<SweepRecord>> {
    run_sweep_with(cfg, &RayleighSource::from_config(cfg))
}

/// Runs the sweep on a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_sweep_threads(cfg: &SimConfig, threads: usize) -> Result<Vec<SweepRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

pub fn run_sweep_with<G: GainSource>(cfg: &SimConfig, source: &G) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let mut schemes = cfg.schemes.clone();
    schemes.sort();
    schemes.dedup();

    let mut records = Vec::with_capacity(cfg.noise_grid_db.len() * schemes.len());
    for (noise_index, &noise_db) in cfg.noise_grid_db.iter().enumerate() {
        let at_point = |e: Error| Error::AtNoisePoint { noise_db, source: Box::new(e) };
        let per_trial: Vec<Vec<Evaluation>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let gains = source.gains(noise_index, trial)?;
                evaluate_trial(cfg, &schemes, gains, noise_variance_from_db(noise_db))
            })
            .collect::<Result<_>>()
            .map_err(at_point)?;

        for (s, &scheme) in schemes.iter().enumerate() {
            records.push(aggregate(noise_db, scheme, per_trial.iter().map(|evals| &evals[s])));
        }
    }
    records.sort_by(|a, b| a.noise_db.total_cmp(&b.noise_db).then_with(|| a.scheme.name().cmp(b.scheme.name())));
    Ok(records)
}

fn evaluate_trial(
    cfg: &SimConfig,
    schemes: &[Scheme],
    gains: Vec<Complex64>,
    noise_variance_w: f64,
) -> Result<Vec<Evaluation>> {
    let k = cfg.num_subcarriers;
    let ch = ChannelRealization::uniform(cfg.bandwidth_hz(), noise_variance_w, gains, cfg.eta)?;
    let p = PowerVector::equal(k, cfg.equal_power_w())?;
    let m = compute_metrics(&ch, &p)?;
    let threshold = cfg.threshold_si();
    let opts = SolveOptions::with_resolution(cfg.resolution);
    let problem = cfg.problem;

    // FS-SA comes out of the first SPA pass when both are requested.
    let spa = if schemes.contains(&Scheme::FsSpa) {
        let mode = match problem {
            Problem::P1 => SpaMode::CapacityWaterfill,
            Problem::P2 => SpaMode::HarvestConcentrate,
        };
        let spa_cfg = SpaConfig {
            mode,
            threshold,
            equal_power_w: cfg.equal_power_w(),
            cap_w: cfg.cap_w(),
            iterations: cfg.spa_iterations,
            solve: opts,
        };
        Some(spa_pipeline(&ch, &spa_cfg)?)
    } else {
        None
    };

    let objective = match problem {
        Problem::P1 => Objective::Capacity,
        Problem::P2 => Objective::Harvest,
    };
    schemes
        .iter()
        .map(|scheme| {
            Ok(match scheme {
                Scheme::FsSa => match &spa {
                    Some(run) => Evaluation::from_outcome(&run.equal_power),
                    None => Evaluation::from_outcome(&solve(problem, &m, threshold, &opts)?),
                },
                Scheme::FsSpa => Evaluation::from_outcome(&spa.as_ref().expect("SPA ran").outcome),
                Scheme::Ts => Evaluation::from_switch(&ts_solve(&m, objective, threshold), problem, k),
                Scheme::Ps => Evaluation::from_switch(&ps_solve(&m, &ch, &p, objective, threshold)?, problem, k),
                Scheme::CUp | Scheme::QUp => relaxed(&m, problem, threshold)?,
            })
        })
        .collect()
}

fn relaxed(m: &SubcarrierMetrics, problem: Problem, threshold: f64) -> Result<Evaluation> {
    let k = m.len();
    let bound = match problem {
        Problem::P1 => upper_bound_c(m, threshold),
        Problem::P2 => upper_bound_q(m, threshold),
    };
    let bound = match bound {
        Ok(b) => b,
        Err(Error::InfeasibleConstraint { .. }) => return Ok(Evaluation::infeasible(problem, k)),
        Err(e) => return Err(e),
    };
    // Relaxed indicator share on the other side gives the constraint value.
    let other = match problem {
        Problem::P1 => m.harvests(),
        Problem::P2 => m.capacities(),
    };
    let constraint: f64 = other.iter().zip(&bound.fractional).map(|(v, s)| v * (1.0 - s)).sum();
    let selected: f64 = bound.fractional.iter().sum();
    let (info_count, harvest_count) = match problem {
        Problem::P1 => (selected, k as f64 - selected),
        Problem::P2 => (k as f64 - selected, selected),
    };
    Ok(Evaluation { feasible: true, objective: bound.value, constraint, info_count, harvest_count })
}

fn aggregate<'a>(noise_db: f64, scheme: Scheme, evals: impl Iterator<Item = &'a Evaluation> + Clone) -> SweepRecord {
    let trials = evals.clone().count();
    let feasible: Vec<&Evaluation> = evals.clone().filter(|e| e.feasible).collect();
    let mean = |xs: &mut dyn Iterator<Item = f64>, n: usize| xs.sum::<f64>() / n as f64;

    let (mean_objective, mean_constraint) = if feasible.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let n = feasible.len();
        (mean(&mut feasible.iter().map(|e| e.objective), n), mean(&mut feasible.iter().map(|e| e.constraint), n))
    };
    // Subcarrier counts follow the objective means; with no feasible trial
    // they fall back to the infeasible masks so the counts still sum to K.
    let count_pool: Vec<&Evaluation> = if feasible.is_empty() { evals.collect() } else { feasible.clone() };
    let n = count_pool.len();
    SweepRecord {
        noise_db,
        scheme,
        mean_objective,
        mean_constraint,
        mean_info_count: mean(&mut count_pool.iter().map(|e| e.info_count), n),
        mean_harvest_count: mean(&mut count_pool.iter().map(|e| e.harvest_count), n),
        infeasible_fraction: (trials - feasible.len()) as f64 / trials as f64,
        trials: trials as u64,
    }
}

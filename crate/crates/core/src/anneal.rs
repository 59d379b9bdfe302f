//! Simulated annealing over the chain-recognition thresholds.

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::eval::{point_errors, Metric};
use crate::geometry::{BitextSpace, Chain, TokenizedText};
use crate::matching::MatchConfig;
use crate::params::Params;
use crate::pipeline::run_simr;

/// Cooling schedule and proposal sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    /// `None` picks a start temperature giving roughly 80% initial acceptance.
    pub start_temp: Option<f64>,
    pub cooling: f64,
    pub steps_per_temp: usize,
    pub temps: usize,
    pub dispersal_step: f64,
    pub angle_step: f64,
    pub lcsr_step: f64,
    /// Smallest fraction of a step size used as the temperature falls.
    pub min_step_scale: f64,
    /// Inclusive bounds for the chain size.
    pub chain_sizes: (usize, usize),
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            start_temp: None,
            cooling: 0.95,
            steps_per_temp: 50,
            temps: 100,
            dispersal_step: 2.0,
            angle_step: 4.0,
            lcsr_step: 0.05,
            min_step_scale: 0.01,
            chain_sizes: (6, 9),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnnealResult {
    pub best: Params,
    pub best_value: f64,
    /// Best-ever value after every step, starting with the initial value.
    pub history: Vec<f64>,
    pub evaluations: usize,
    pub accepted: usize,
}

const TUNED: usize = 5;

fn propose(p: &Params, which: usize, scale: f64, s: &Schedule, rng: &mut ChaCha8Rng) -> Params {
    let mut q = *p;
    let mut jitter = |step: f64| (rng.random::<f64>() * 2.0 - 1.0) * step * scale;
    match which {
        0 => q.simr.max_point_dispersal = (q.simr.max_point_dispersal + jitter(s.dispersal_step)).clamp(0.1, 100.0),
        1 => q.simr.max_angle_deviation = (q.simr.max_angle_deviation + jitter(s.angle_step)).clamp(0.0, 90.0),
        2 => q.lcsr_threshold = (q.lcsr_threshold + jitter(s.lcsr_step)).clamp(0.01, 1.0),
        3 => {
            let up = rng.random_bool(0.5);
            q.simr.chain_size = if up { q.simr.chain_size + 1 } else { q.simr.chain_size.saturating_sub(1) }
                .clamp(s.chain_sizes.0, s.chain_sizes.1);
        }
        _ => {
            let up = rng.random_bool(0.5);
            q.simr.max_pal = if up { q.simr.max_pal + 1 } else { q.simr.max_pal.saturating_sub(1) }.min(20);
        }
    }
    q
}

/// Minimizes `objective` starting from `initial`. Deterministic for a
/// given seed. Non-finite objective values are never accepted.
pub fn anneal(
    mut objective: impl FnMut(&Params) -> f64,
    initial: Params,
    schedule: &Schedule,
    seed: u64,
) -> AnnealResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = initial;
    let mut value = objective(&current);
    let mut evaluations = 1;
    let mut best = (current, value);
    let mut history = vec![value];
    if schedule.temps == 0 || schedule.steps_per_temp == 0 {
        return AnnealResult {
            best: best.0,
            best_value: best.1,
            history,
            evaluations,
            accepted: 0,
        };
    }

    let t0 = match schedule.start_temp {
        Some(t) => t,
        None => {
            // mean uphill move from the start, scaled to accept ~80% of them
            let mut ups = Vec::new();
            for _ in 0..20 {
                let which = rng.random_range(0..TUNED);
                let q = propose(&current, which, 1.0, schedule, &mut rng);
                let v = objective(&q);
                evaluations += 1;
                if v.is_finite() && value.is_finite() && v > value {
                    ups.push(v - value);
                }
            }
            if ups.is_empty() {
                1.0
            } else {
                -(ups.iter().sum::<f64>() / ups.len() as f64) / 0.8f64.ln()
            }
        }
    };

    let mut accepted = 0;
    let mut temp = t0;
    for level in 0..schedule.temps {
        let scale = if t0 > 0.0 {
            (temp / t0).sqrt().max(schedule.min_step_scale)
        } else {
            schedule.min_step_scale.max(1.0 - level as f64 / schedule.temps as f64)
        };
        for _ in 0..schedule.steps_per_temp {
            let which = rng.random_range(0..TUNED);
            let q = propose(&current, which, scale, schedule, &mut rng);
            let v = if q.validate().is_ok() { objective(&q) } else { f64::NAN };
            evaluations += 1;
            let take = v.is_finite()
                && (v <= value
                    || !value.is_finite()
                    || (temp > 0.0 && rng.random::<f64>() < (-(v - value) / temp).exp()));
            if take {
                current = q;
                value = v;
                accepted += 1;
                if v < best.1 || !best.1.is_finite() {
                    best = (q, v);
                }
            }
            history.push(best.1);
        }
        debug!("temperature {temp:.4}: current {value:.4}, best {:.4}", best.1);
        temp *= schedule.cooling;
    }
    AnnealResult {
        best: best.0,
        best_value: best.1,
        history,
        evaluations,
        accepted,
    }
}

/// Tokenized bitext with reference correspondences, used for tuning.
#[derive(Debug, Clone)]
pub struct DevBitext {
    pub x: TokenizedText,
    pub y: TokenizedText,
    pub refs: Vec<(f64, f64)>,
}

/// Pooled RMS error of the final map over all dev bitexts. Any failure
/// scores as infinity.
pub fn dev_objective(dev: &[DevBitext], params: &Params, metric: Metric) -> f64 {
    let mut sq = 0.0;
    let mut n = 0usize;
    for d in dev {
        let cfg = MatchConfig::cognates(params.lcsr_threshold);
        let errs: Result<Vec<f64>> =
            run_simr(&d.x, &d.y, &cfg, &params.simr, true).and_then(|out| point_errors(&out.map, &d.refs, metric));
        match errs {
            Ok(e) => {
                sq += e.iter().map(|v| v * v).sum::<f64>();
                n += e.len();
            }
            Err(_) => return f64::INFINITY,
        }
    }
    if n == 0 {
        f64::INFINITY
    } else {
        (sq / n as f64).sqrt()
    }
}

/// Distance from the last first-pass chain's top-right corner to the
/// terminus, as a fraction of the diagonal.
pub fn trace_shortfall(first_pass: &[Chain], space: &BitextSpace) -> f64 {
    let (x, y) = first_pass.last().map_or((0.0, 0.0), Chain::top_right);
    (space.width - x).hypot(space.height - y) / space.diagonal_len()
}

/// A trace got lost when it stopped more than 10% of the diagonal short of
/// the terminus.
pub fn got_lost(first_pass: &[Chain], space: &BitextSpace) -> bool {
    trace_shortfall(first_pass, space) > 0.1
}

/// Number of dev bitexts on which the trace got lost, per chain size.
pub fn chain_size_report(dev: &[DevBitext], params: &Params, sizes: &[usize]) -> Result<Vec<(usize, usize)>> {
    let cfg = MatchConfig::cognates(params.lcsr_threshold);
    sizes
        .iter()
        .map(|&k| {
            let mut p = params.simr;
            p.chain_size = k;
            let mut lost = 0;
            for d in dev {
                let out = run_simr(&d.x, &d.y, &cfg, &p, false)?;
                if got_lost(&out.first_pass, &out.space) {
                    lost += 1;
                }
            }
            Ok((k, lost))
        })
        .collect()
}

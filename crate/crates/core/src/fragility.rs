//! Complexity and consolidation analysis: the closed-form expected-loss
//! approximations for independent technology shocks, their Monte-Carlo
//! verification, and the consolidation comparison.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::FlowGraph;
use crate::hulten::hulten_marginal;
use crate::model::{gdp, Economy, FlowState, GoodId, ShockSpec, TechId};
use crate::propagation::{propagate, PropagationConfig};

/// Supply-chain complexity measures averaged over the equilibrium network.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexityStats {
    /// Mean count of distinct non-final upstream technologies per final good.
    pub s: f64,
    /// Mean intermediate-technology expenditure over mean final-good value.
    pub q: f64,
    /// Mean count of downstream final goods per intermediate technology.
    pub m: f64,
    pub m_count: usize,
    pub f_count: usize,
}

pub fn complexity_stats(economy: &Economy, state: &FlowState) -> Result<ComplexityStats> {
    let graph = FlowGraph::from_state(state);
    let intermediates: Vec<TechId> = economy
        .technologies()
        .iter()
        .filter(|t| !economy.produces_final(t) && state.is_active(&t.id))
        .map(|t| t.id.clone())
        .collect();
    let final_goods: Vec<GoodId> = economy
        .goods()
        .iter()
        .filter(|g| {
            g.kind == crate::model::GoodKind::Final
                && economy
                    .producers_of(&g.id)
                    .iter()
                    .any(|t| state.is_active(t))
        })
        .map(|g| g.id.clone())
        .collect();
    let m_count = intermediates.len();
    let f_count = final_goods.len();

    let intermediate_set: BTreeSet<&TechId> = intermediates.iter().collect();

    // Upstream technology sets per final good (union over its producers).
    let mut pair_count = 0usize;
    let mut final_value_total = 0.0;
    for good in &final_goods {
        let producers: BTreeSet<TechId> = economy
            .producers_of(good)
            .iter()
            .filter(|t| state.is_active(t))
            .cloned()
            .collect();
        let upstream = graph.ancestors(&producers);
        pair_count += upstream
            .iter()
            .filter(|t| intermediate_set.contains(t))
            .count();
        for p in &producers {
            let price = state
                .price(p)
                .ok_or_else(|| Error::MissingPrice(p.to_string()))?;
            final_value_total += price * state.output(p);
        }
    }
    let s = if f_count > 0 {
        pair_count as f64 / f_count as f64
    } else {
        0.0
    };
    let m = if m_count > 0 {
        pair_count as f64 / m_count as f64
    } else {
        0.0
    };
    let mut intermediate_value_total = 0.0;
    for t in &intermediates {
        let price = state
            .price(t)
            .ok_or_else(|| Error::MissingPrice(t.to_string()))?;
        intermediate_value_total += price * state.output(t);
    }
    let mean_final = if f_count > 0 {
        final_value_total / f_count as f64
    } else {
        0.0
    };
    let mean_intermediate = if m_count > 0 {
        intermediate_value_total / m_count as f64
    } else {
        0.0
    };
    let q = if mean_final > 0.0 {
        mean_intermediate / mean_final
    } else {
        0.0
    };
    Ok(ComplexityStats {
        s,
        q,
        m,
        m_count,
        f_count,
    })
}

/// The small-probability approximations: expected short-run loss fraction
/// `(1-lambda) pi S` and long-run `(1-lambda) pi S q / m`. Valid while
/// `pi * S` is small.
pub fn expected_loss_formulas(stats: &ComplexityStats, pi: f64, lambda: f64) -> (f64, f64) {
    let short = (1.0 - lambda) * pi * stats.s;
    let long = if stats.m > 0.0 {
        (1.0 - lambda) * pi * stats.s * stats.q / stats.m
    } else {
        0.0
    };
    (short, long)
}

#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub short_run_mean: f64,
    pub short_run_se: f64,
    pub long_run_mean: f64,
    pub long_run_se: f64,
    pub trials: u64,
}

/// Monte-Carlo estimate of the expected loss fractions: each trial shocks
/// every intermediate technology independently with probability `pi`, runs
/// the short-run propagation, and sums Hulten extrapolations for the long
/// run. The seed and trial index fully determine each trial's shock set;
/// accumulation is compensated and chunk-ordered, so means are bit-stable
/// for a given seed regardless of thread count.
pub fn expected_loss_mc(
    economy: &Economy,
    state: &FlowState,
    pi: f64,
    lambda: f64,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::Invariant(format!("pi {pi} outside [0, 1]")));
    }
    let total_gdp = gdp(economy, state)?;
    let intermediates: Vec<TechId> = economy
        .technologies()
        .iter()
        .filter(|t| !economy.produces_final(t) && state.is_active(&t.id))
        .map(|t| t.id.clone())
        .collect();
    // Marginal shares are shock-independent; precompute them.
    let mut share: BTreeMap<TechId, f64> = BTreeMap::new();
    for t in &intermediates {
        share.insert(t.clone(), hulten_marginal(economy, state, t, 0.0)?.marginal_share);
    }
    let config = PropagationConfig::default();

    let threads = worker_threads();
    let chunk = 4096u64;
    let n_chunks = trials.div_ceil(chunk);
    let mut chunk_sums: Vec<(KahanPair, KahanPair)> =
        vec![(KahanPair::default(), KahanPair::default()); n_chunks as usize];

    let run_chunk = |c: u64| -> Result<(KahanPair, KahanPair)> {
        let mut sums = KahanPair::default();
        let mut squares = KahanPair::default();
        let lo = c * chunk;
        let hi = (lo + chunk).min(trials);
        for trial in lo..hi {
            let mut rng = trial_rng(seed, trial);
            let shocked: BTreeSet<TechId> = intermediates
                .iter()
                .filter(|_| rng.gen::<f64>() < pi)
                .cloned()
                .collect();
            let (sr, lr) = if shocked.is_empty() {
                (0.0, 0.0)
            } else {
                let shock = ShockSpec {
                    shocked: shocked.clone(),
                    lambda,
                };
                let outcome = propagate(economy, state, &shock, &config)?;
                let sr = outcome.lost_gdp_total / total_gdp;
                let lr: f64 = shocked
                    .iter()
                    .map(|t| (1.0 - lambda) * share[t])
                    .sum();
                (sr, lr)
            };
            sums.add(sr, lr);
            squares.add(sr * sr, lr * lr);
        }
        Ok((sums, squares))
    };

    if threads <= 1 || n_chunks <= 1 {
        for c in 0..n_chunks {
            chunk_sums[c as usize] = run_chunk(c)?;
        }
    } else {
        type ChunkSlot = std::sync::Mutex<Option<Result<(KahanPair, KahanPair)>>>;
        let next = std::sync::atomic::AtomicU64::new(0);
        let results: Vec<ChunkSlot> =
            (0..n_chunks).map(|_| std::sync::Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..threads.min(n_chunks as usize) {
                scope.spawn(|| loop {
                    let c = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if c >= n_chunks {
                        break;
                    }
                    let r = run_chunk(c);
                    *results[c as usize].lock().expect("poisoned") = Some(r);
                });
            }
        });
        for (c, slot) in results.into_iter().enumerate() {
            chunk_sums[c] = slot
                .into_inner()
                .expect("poisoned")
                .expect("chunk ran")?;
        }
    }

    // Combine chunks in fixed order.
    let mut sums = KahanPair::default();
    let mut squares = KahanPair::default();
    for (s, q) in &chunk_sums {
        sums.add(s.a.total(), s.b.total());
        squares.add(q.a.total(), q.b.total());
    }
    let n = trials as f64;
    let mean_sr = sums.a.total() / n;
    let mean_lr = sums.b.total() / n;
    let var = |sum_sq: f64, mean: f64| ((sum_sq / n - mean * mean).max(0.0)) / n;
    Ok(McEstimate {
        short_run_mean: mean_sr,
        short_run_se: var(squares.a.total(), mean_sr).sqrt(),
        long_run_mean: mean_lr,
        long_run_se: var(squares.b.total(), mean_lr).sqrt(),
        trials,
    })
}

fn worker_threads() -> usize {
    match std::env::var("PRODNET_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => default_threads(),
            Ok(n) => n,
        },
        Err(_) => default_threads(),
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// The seed and trial index fully determine the trial's randomness.
fn trial_rng(seed: u64, trial: u64) -> Pcg64 {
    let mixed = splitmix(seed ^ splitmix(trial));
    Pcg64::seed_from_u64(mixed)
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
    fn total(&self) -> f64 {
        self.sum
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct KahanPair {
    a: Kahan,
    b: Kahan,
}

impl KahanPair {
    fn add(&mut self, x: f64, y: f64) {
        self.a.add(x);
        self.b.add(y);
    }
}

/// Consolidation comparison: fewer upstream technologies lower the chance
/// of a disruption but raise its conditional short-run size.
#[derive(Debug, Clone, Serialize)]
pub struct ConsolidationReport {
    pub upstream_count_1: usize,
    pub upstream_count_2: usize,
    pub disruption_prob_1: f64,
    pub disruption_prob_2: f64,
    pub conditional_size_1: f64,
    pub conditional_size_2: f64,
}

pub fn consolidation_compare(
    economy1: &Economy,
    state1: &FlowState,
    economy2: &Economy,
    state2: &FlowState,
    final_good: &GoodId,
    pi: f64,
    lambda: f64,
) -> Result<ConsolidationReport> {
    let side = |economy: &Economy,
                state: &FlowState|
     -> Result<(BTreeSet<TechId>, f64, f64)> {
        let producers: BTreeSet<TechId> = economy
            .producers_of(final_good)
            .iter()
            .filter(|t| state.is_active(t))
            .cloned()
            .collect();
        if producers.is_empty() {
            return Err(Error::Precondition(format!(
                "final good {final_good} is not produced"
            )));
        }
        let graph = FlowGraph::from_state(state);
        let mut upstream = graph.ancestors(&producers);
        for p in &producers {
            upstream.remove(p);
        }
        let mut value = 0.0;
        let mut quantity = 0.0;
        for p in &producers {
            let price = state
                .price(p)
                .ok_or_else(|| Error::MissingPrice(p.to_string()))?;
            value += price * state.output(p);
            quantity += state.output(p);
        }
        Ok((upstream, value, quantity))
    };
    let (up1, value1, qty1) = side(economy1, state1)?;
    let (up2, value2, qty2) = side(economy2, state2)?;
    if !up2.is_subset(&up1) || up2.len() >= up1.len() {
        return Err(Error::Precondition(format!(
            "economy 2's upstream set ({}) is not a strict subset of economy 1's ({})",
            up2.len(),
            up1.len()
        )));
    }
    if qty2 <= qty1 {
        return Err(Error::Precondition(
            "economy 2 must produce more of the final good".into(),
        ));
    }
    let prob = |k: usize| 1.0 - (1.0 - pi).powi(k as i32);
    let report = ConsolidationReport {
        upstream_count_1: up1.len(),
        upstream_count_2: up2.len(),
        disruption_prob_1: prob(up1.len()),
        disruption_prob_2: prob(up2.len()),
        conditional_size_1: (1.0 - lambda) * value1,
        conditional_size_2: (1.0 - lambda) * value2,
    };
    debug_assert!(report.disruption_prob_2 < report.disruption_prob_1);
    debug_assert!(report.conditional_size_2 > report.conditional_size_1);
    Ok(report)
}

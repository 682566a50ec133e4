//! Randomized push broadcast.
//!
//! Two models: the synchronous round-based protocol (every vertex knowing
//! the rumor at the start of a round pushes it to one uniformly random
//! neighbor; vertices informed during a round start pushing the next round),
//! and the continuous-time variant where a vertex of degree d pushes at the
//! arrival times of a rate-d Poisson clock, each push aimed at a uniformly
//! random neighbor.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, Vertex};
use crate::rng::{exp_sample, trial_rng};
use crate::stats::{empirical_quantile, Estimate, StatsError};
use crate::walk::{scan_starts, StartPolicy};

/// Synchronous-round cap per run.
pub const DEFAULT_ROUND_CAP: u64 = 1_000_000;
/// Clock-event cap per continuous-time run.
pub const DEFAULT_EVENT_CAP: u64 = 100_000_000;

/// One broadcast run. Times are integer-valued rounds for the synchronous
/// protocol and real event times for the continuous-time model; the source
/// is informed at time 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastOutcome {
    pub source: Vertex,
    pub informed_time: Vec<f64>,
    pub completion_time: f64,
    /// False when the round/event cap fired first; uninformed vertices then
    /// carry time +inf.
    pub complete: bool,
}

impl BroadcastOutcome {
    /// Histogram of informed times binned by ceil(time); exact rounds for
    /// the synchronous protocol. Uninformed vertices are skipped.
    pub fn histogram(&self) -> BTreeMap<u64, u64> {
        let mut h = BTreeMap::new();
        for &t in &self.informed_time {
            if t.is_finite() {
                *h.entry(t.ceil() as u64).or_insert(0) += 1;
            }
        }
        h
    }
}

/// Estimate plus an optional empirical quantile of the same samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BroadcastEstimate {
    pub estimate: Estimate,
    pub quantile: Option<QuantileEstimate>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuantileEstimate {
    /// Tail mass p: the reported value is the empirical (1-p)-quantile.
    pub p: f64,
    pub value: f64,
}

/// One synchronous push-broadcast run from `s`.
pub fn run_rba(g: &Graph, s: Vertex, seed: u64) -> BroadcastOutcome {
    let mut rng = trial_rng(seed, 0);
    run_rba_rng(g, s, &mut rng, DEFAULT_ROUND_CAP, None)
}

fn run_rba_rng(
    g: &Graph,
    s: Vertex,
    rng: &mut ChaCha8Rng,
    round_cap: u64,
    stop_at: Option<Vertex>,
) -> BroadcastOutcome {
    let n = g.n() as usize;
    let mut informed_time = vec![f64::INFINITY; n];
    informed_time[s as usize] = 0.0;
    // Vertices in the order they were informed; the first `active` of them
    // push this round.
    let mut order: Vec<Vertex> = Vec::with_capacity(n);
    order.push(s);
    let mut t = 0u64;

    let reached = |order: &Vec<Vertex>| match stop_at {
        Some(v) => order.contains(&v),
        None => order.len() == n,
    };
    let mut complete = order.len() == n || stop_at == Some(s);
    while !complete && t < round_cap {
        t += 1;
        let active = order.len();
        for i in 0..active {
            let u = order[i];
            let nbrs = g.neighbors(u);
            let w = nbrs[rng.gen_range(0..nbrs.len())];
            if informed_time[w as usize].is_infinite() {
                informed_time[w as usize] = t as f64;
                order.push(w);
            }
        }
        complete = match stop_at {
            Some(v) => informed_time[v as usize].is_finite(),
            None => order.len() == n,
        };
    }
    debug_assert!(!complete || reached(&order));

    let completion_time = match stop_at {
        Some(v) => informed_time[v as usize],
        None => informed_time.iter().copied().fold(0.0f64, f64::max),
    };
    BroadcastOutcome { source: s, informed_time, completion_time, complete }
}

/// One continuous-time run from `s`: event-queue simulation of the
/// exponential push clocks. Pushes from a vertex stop once all its neighbors
/// are informed (such pushes could only hit informed vertices).
pub fn run_seq(g: &Graph, s: Vertex, seed: u64) -> BroadcastOutcome {
    let mut rng = trial_rng(seed, 0);
    run_seq_rng(g, s, &mut rng, DEFAULT_EVENT_CAP)
}

#[derive(Debug, PartialEq)]
struct SeqEvent {
    time: f64,
    seq: u64,
    vertex: Vertex,
}

impl Eq for SeqEvent {}

impl Ord for SeqEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties (measure zero) break by insertion order for determinism.
        self.time.total_cmp(&other.time).then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for SeqEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn run_seq_rng(g: &Graph, s: Vertex, rng: &mut ChaCha8Rng, event_cap: u64) -> BroadcastOutcome {
    let n = g.n() as usize;
    let mut informed_time = vec![f64::INFINITY; n];
    let mut uninformed_nbrs: Vec<u32> = g.degrees().to_vec();
    let mut queue: BinaryHeap<std::cmp::Reverse<SeqEvent>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut informed = 0usize;
    let mut events = 0u64;
    let mut complete = false;

    let inform =
        |v: Vertex,
         at: f64,
         informed_time: &mut Vec<f64>,
         uninformed_nbrs: &mut Vec<u32>,
         queue: &mut BinaryHeap<std::cmp::Reverse<SeqEvent>>,
         rng: &mut ChaCha8Rng,
         seq: &mut u64| {
            informed_time[v as usize] = at;
            for &w in g.neighbors(v) {
                uninformed_nbrs[w as usize] -= 1;
            }
            if uninformed_nbrs[v as usize] > 0 {
                let delay = exp_sample(rng, f64::from(g.degree(v)));
                queue.push(std::cmp::Reverse(SeqEvent { time: at + delay, seq: *seq, vertex: v }));
                *seq += 1;
            }
        };

    inform(s, 0.0, &mut informed_time, &mut uninformed_nbrs, &mut queue, rng, &mut seq);
    informed += 1;

    while informed < n {
        let Some(std::cmp::Reverse(ev)) = queue.pop() else {
            break; // connected graphs always finish; cap safety below
        };
        events += 1;
        if events > event_cap {
            break;
        }
        let u = ev.vertex;
        let nbrs = g.neighbors(u);
        let w = nbrs[rng.gen_range(0..nbrs.len())];
        if informed_time[w as usize].is_infinite() {
            inform(w, ev.time, &mut informed_time, &mut uninformed_nbrs, &mut queue, rng, &mut seq);
            informed += 1;
            if informed == n {
                complete = true;
                break;
            }
        }
        // u keeps its clock running while uninformed neighbors remain.
        if uninformed_nbrs[u as usize] > 0 {
            let delay = exp_sample(rng, f64::from(g.degree(u)));
            queue.push(std::cmp::Reverse(SeqEvent { time: ev.time + delay, seq, vertex: u }));
            seq += 1;
        }
    }
    complete |= informed == n;

    let completion_time = informed_time.iter().copied().fold(0.0f64, f64::max);
    BroadcastOutcome { source: s, informed_time, completion_time, complete }
}

fn completion_samples(
    g: &Graph,
    s: Vertex,
    trials: u64,
    seed: u64,
    stream_base: u64,
    stop_at: Option<Vertex>,
) -> (Vec<f64>, bool) {
    let results: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, stream_base + i);
            let out = run_rba_rng(g, s, &mut rng, DEFAULT_ROUND_CAP, stop_at);
            (out.completion_time, !out.complete)
        })
        .collect();
    let capped = results.iter().any(|&(_, c)| c);
    (results.into_iter().map(|(x, _)| x).collect(), capped)
}

/// Estimate the expected completion time of the synchronous protocol,
/// maximized over scanned starts, with an optional empirical
/// (1 - p)-quantile (default use: p = 1/n). Quantiles demand
/// trials >= 10/p.
pub fn estimate_rba(
    g: &Graph,
    trials: u64,
    seed: u64,
    policy: StartPolicy,
    quantile_p: Option<f64>,
) -> Result<BroadcastEstimate, StatsError> {
    assert!(trials >= 2, "estimators need at least 2 trials");
    let (starts, exhaustive) = match policy {
        StartPolicy::Fixed(s) => (vec![s], true),
        StartPolicy::WorstCaseScan => scan_starts(g, seed),
    };
    let mut best: Option<Estimate> = None;
    let mut worst_quantile: Option<f64> = None;
    let mut capped_any = false;
    for (idx, &s) in starts.iter().enumerate() {
        let (samples, capped) = completion_samples(g, s, trials, seed, idx as u64 * trials, None);
        capped_any |= capped;
        if let Some(p) = quantile_p {
            let q = empirical_quantile(&samples, 1.0 - p)?;
            worst_quantile = Some(worst_quantile.map_or(q, |w: f64| w.max(q)));
        }
        let est = Estimate::from_samples(&samples, seed, "rba");
        if best.as_ref().is_none_or(|b| est.mean > b.mean) {
            best = Some(est);
        }
    }
    let mut est = best.unwrap().with_capped(capped_any);
    if !exhaustive {
        est.metric_tag = "rba:sampled-start-lower-bound".into();
    }
    Ok(BroadcastEstimate {
        estimate: est,
        quantile: quantile_p
            .map(|p| QuantileEstimate { p, value: worst_quantile.unwrap() }),
    })
}

/// Estimate E[time until `v` hears a rumor started at `s`], with an optional
/// (1 - p)-quantile.
pub fn pairwise_rba(
    g: &Graph,
    s: Vertex,
    v: Vertex,
    trials: u64,
    seed: u64,
    quantile_p: Option<f64>,
) -> Result<BroadcastEstimate, StatsError> {
    assert_ne!(s, v, "pairwise broadcast needs distinct vertices");
    assert!(trials >= 2);
    let (samples, capped) = completion_samples(g, s, trials, seed, 0, Some(v));
    let quantile = match quantile_p {
        Some(p) => Some(QuantileEstimate { p, value: empirical_quantile(&samples, 1.0 - p)? }),
        None => None,
    };
    let est = Estimate::from_samples(&samples, seed, "rba-pair").with_capped(capped);
    Ok(BroadcastEstimate { estimate: est, quantile })
}

/// Estimate E[time until `v` is informed] under the continuous-time model.
pub fn pairwise_seq(g: &Graph, s: Vertex, v: Vertex, trials: u64, seed: u64) -> Estimate {
    assert_ne!(s, v);
    assert!(trials >= 2);
    let results: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let out = run_seq_rng(g, s, &mut rng, DEFAULT_EVENT_CAP);
            (out.informed_time[v as usize], !out.complete)
        })
        .collect();
    let capped = results.iter().any(|&(_, c)| c);
    let samples: Vec<f64> = results.into_iter().map(|(x, _)| x).collect();
    Estimate::from_samples(&samples, seed, "seq-pair").with_capped(capped)
}

/// Per-vertex informed-time samples from `trials` continuous-time runs:
/// result[v][i] is v's informed time in trial i. Used by distribution-level
/// comparisons against directed percolation.
pub fn seq_time_samples(g: &Graph, s: Vertex, trials: u64, seed: u64) -> Vec<Vec<f64>> {
    let runs: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            run_seq_rng(g, s, &mut rng, DEFAULT_EVENT_CAP).informed_time
        })
        .collect();
    let mut by_vertex = vec![Vec::with_capacity(trials as usize); g.n() as usize];
    for run in runs {
        for (v, t) in run.into_iter().enumerate() {
            by_vertex[v].push(t);
        }
    }
    by_vertex
}

//! Boundary vicinity scoring.
//!
//! From every boundary node, batches of independent truncated random walks
//! run inside the node's own community. Batches keep coming until the
//! Gelman–Rubin potential scale reduction factor over the per-walk visit
//! counts falls inside `[psrf_low, psrf_high]`. The summed visits are then
//! divided by the number of walkers used, scaled by the relative size of
//! the community, and accumulated into one score per node.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundarySet;
use crate::community::{community_mask, CommunityLabeling};
use crate::error::{Error, Result};
use crate::graph::{Graph, Subgraph};
use crate::rng::walker_stream;

/// Walkers are split into this many chains, in arrival order, for the
/// convergence test.
pub const PSRF_CHAINS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkConfig {
    /// Walkers per convergence batch.
    pub walknum: usize,
    /// Transitions per walk.
    pub stepnum: usize,
    pub psrf_low: f64,
    pub psrf_high: f64,
    pub max_batches: usize,
    pub seed: u64,
}

impl WalkConfig {
    pub const DEFAULT_WALKNUM: usize = 50;
    pub const DEFAULT_MAX_BATCHES: usize = 20;
    pub const DEFAULT_PSRF_LOW: f64 = 0.95;
    pub const DEFAULT_PSRF_HIGH: f64 = 1.05;

    pub fn new(stepnum: usize, seed: u64) -> Self {
        WalkConfig {
            walknum: Self::DEFAULT_WALKNUM,
            stepnum,
            psrf_low: Self::DEFAULT_PSRF_LOW,
            psrf_high: Self::DEFAULT_PSRF_HIGH,
            max_batches: Self::DEFAULT_MAX_BATCHES,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        if !(self.psrf_low < 1.0 && 1.0 < self.psrf_high) {
            return bad("psrf window must satisfy psrf_low < 1 < psrf_high");
        }
        if self.walknum < 2 * PSRF_CHAINS {
            return bad("walknum must be at least 4");
        }
        if self.stepnum < 1 {
            return bad("stepnum must be at least 1");
        }
        if self.max_batches < 1 {
            return bad("max_batches must be at least 1");
        }
        Ok(())
    }
}

/// ceil(ln n / ln ln n), the typical path length of a preferential
/// attachment network. Where ln ln n < 1 (n < 16) the ratio would exceed
/// ln n itself, so ceil(ln n) is used instead. Never less than 2.
pub fn default_step_count(n: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "step count needs at least 2 nodes, got {n}"
        )));
    }
    let ln = (n as f64).ln();
    let lnln = ln.ln();
    let steps = if lnln >= 1.0 { ln / lnln } else { ln };
    Ok((steps.ceil() as usize).max(2))
}

fn check_start(mask: &Graph, start: usize) -> Result<()> {
    if start >= mask.num_nodes() {
        return Err(Error::NodeOutOfRange {
            id: start,
            num_nodes: mask.num_nodes(),
        });
    }
    Ok(())
}

/// Node sequence of one walk: the start followed by up to `stepnum`
/// uniform-neighbor transitions. Stops early at a node with no neighbors.
pub fn walk_path<R: Rng + ?Sized>(
    mask: &Graph,
    start: usize,
    stepnum: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_start(mask, start)?;
    let mut path = Vec::with_capacity(stepnum + 1);
    let mut node = start;
    path.push(node);
    for _ in 0..stepnum {
        let nbrs = mask.neighbors(node);
        if nbrs.is_empty() {
            break;
        }
        node = nbrs[rng.gen_range(0..nbrs.len())];
        path.push(node);
    }
    Ok(path)
}

/// Dense visit counts of one walk over the nodes of `mask`.
pub fn random_walk<R: Rng + ?Sized>(
    mask: &Graph,
    start: usize,
    stepnum: usize,
    rng: &mut R,
) -> Result<Vec<u32>> {
    let mut counts = vec![0u32; mask.num_nodes()];
    for v in walk_path(mask, start, stepnum, rng)? {
        counts[v] += 1;
    }
    Ok(counts)
}

/// Visit counts of one walk as `(node, count)` pairs sorted by node.
pub type SparseVisits = Vec<(usize, u32)>;

pub fn sparse_from_dense(counts: &[u32]) -> SparseVisits {
    counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(v, &c)| (v, c))
        .collect()
}

fn sparse_walk<R: Rng + ?Sized>(
    mask: &Graph,
    start: usize,
    stepnum: usize,
    rng: &mut R,
) -> SparseVisits {
    let mut path = walk_path(mask, start, stepnum, rng).expect("start checked by caller");
    path.sort_unstable();
    let mut out: SparseVisits = Vec::with_capacity(path.len());
    for v in path {
        match out.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Gelman–Rubin potential scale reduction over per-walk visit counts.
///
/// Walks are split in arrival order into `num_chains` equal chains of
/// length n. For each node: W is the mean within-chain sample variance,
/// B/n the sample variance of the chain means, V = (n−1)/n·W + B/n and
/// PSRF = sqrt(V/W). The result is the maximum over nodes with W > 0, or
/// exactly 1 when no node has within-chain variance.
pub fn psrf(walks: &[SparseVisits], num_chains: usize) -> Result<f64> {
    if num_chains < 2 {
        return Err(Error::InvalidParameter(
            "psrf needs at least 2 chains".into(),
        ));
    }
    if !walks.len().is_multiple_of(num_chains) || walks.len() / num_chains < 2 {
        return Err(Error::InvalidParameter(format!(
            "{} walks cannot form {num_chains} chains of at least 2",
            walks.len()
        )));
    }
    let n = walks.len() / num_chains;
    let width = walks
        .iter()
        .flat_map(|w| w.iter().map(|&(v, _)| v + 1))
        .max()
        .unwrap_or(0);
    let nf = n as f64;

    // means[c][v], then squared deviations with implicit zeros folded in
    let mut means = vec![vec![0.0f64; width]; num_chains];
    let mut nonzero = vec![vec![0usize; width]; num_chains];
    for (c, chain) in walks.chunks(n).enumerate() {
        for walk in chain {
            for &(v, k) in walk {
                means[c][v] += k as f64;
                nonzero[c][v] += 1;
            }
        }
        for m in &mut means[c] {
            *m /= nf;
        }
    }
    let mut sq = vec![vec![0.0f64; width]; num_chains];
    for (c, chain) in walks.chunks(n).enumerate() {
        for walk in chain {
            for &(v, k) in walk {
                let d = k as f64 - means[c][v];
                sq[c][v] += d * d;
            }
        }
        for v in 0..width {
            let zeros = (n - nonzero[c][v]) as f64;
            sq[c][v] += zeros * means[c][v] * means[c][v];
        }
    }

    let m = num_chains as f64;
    let mut worst: Option<f64> = None;
    for v in 0..width {
        let w = (0..num_chains).map(|c| sq[c][v] / (nf - 1.0)).sum::<f64>() / m;
        if w <= 0.0 {
            continue;
        }
        let grand = (0..num_chains).map(|c| means[c][v]).sum::<f64>() / m;
        let b_over_n = (0..num_chains)
            .map(|c| (means[c][v] - grand).powi(2))
            .sum::<f64>()
            / (m - 1.0);
        let v_hat = (nf - 1.0) / nf * w + b_over_n;
        let r = (v_hat / w).sqrt();
        worst = Some(worst.map_or(r, |x: f64| x.max(r)));
    }
    Ok(worst.unwrap_or(1.0))
}

/// All walks launched from one origin until convergence (or the batch cap).
#[derive(Debug, Clone, PartialEq)]
pub struct WalkBatch {
    /// Start node, in the mask's local ids.
    pub origin: usize,
    pub rows: Vec<SparseVisits>,
    pub batches: usize,
    pub psrf: f64,
    pub converged: bool,
}

impl WalkBatch {
    pub fn walkers(&self) -> usize {
        self.rows.len()
    }

    /// Total visits per local node, summed over every walker.
    pub fn summed(&self, width: usize) -> Vec<u64> {
        let mut out = vec![0u64; width];
        for row in &self.rows {
            for &(v, c) in row {
                out[v] += c as u64;
            }
        }
        out
    }
}

/// Runs batches of `cfg.walknum` walks from `start` until the PSRF of all
/// walks so far lies in `[psrf_low, psrf_high]`. Walker streams are keyed
/// by `start`.
pub fn run_converged_walks(mask: &Graph, start: usize, cfg: &WalkConfig) -> Result<WalkBatch> {
    run_converged_walks_keyed(mask, start, cfg, start as u64)
}

/// As [`run_converged_walks`], with an explicit stream key so callers can
/// key walkers by a global node id rather than a mask-local one.
pub fn run_converged_walks_keyed(
    mask: &Graph,
    start: usize,
    cfg: &WalkConfig,
    stream_key: u64,
) -> Result<WalkBatch> {
    cfg.validate()?;
    check_start(mask, start)?;
    let mut rows: Vec<SparseVisits> = Vec::new();
    let mut value = f64::NAN;
    for batch in 1..=cfg.max_batches {
        let first = rows.len() as u64;
        let fresh: Vec<SparseVisits> = (first..first + cfg.walknum as u64)
            .into_par_iter()
            .map(|w| {
                let mut rng = walker_stream(cfg.seed, stream_key, w);
                sparse_walk(mask, start, cfg.stepnum, &mut rng)
            })
            .collect();
        rows.extend(fresh);
        let usable = rows.len() - rows.len() % PSRF_CHAINS;
        value = psrf(&rows[..usable], PSRF_CHAINS)?;
        if cfg.psrf_low <= value && value <= cfg.psrf_high {
            return Ok(WalkBatch {
                origin: start,
                rows,
                batches: batch,
                psrf: value,
                converged: true,
            });
        }
    }
    log::warn!(
        "walks from stream {stream_key} unconverged after {} batches (psrf {value:.4})",
        cfg.max_batches
    );
    Ok(WalkBatch {
        origin: start,
        rows,
        batches: cfg.max_batches,
        psrf: value,
        converged: false,
    })
}

/// Multiplies visit mass by `community_size / n_total`, so communities
/// covering more of the graph weigh more.
pub fn scale_community_weights(visits: &[f64], community_size: usize, n_total: usize) -> Vec<f64> {
    let factor = community_size as f64 / n_total as f64;
    visits.iter().map(|x| x * factor).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreStatus {
    Ok,
    /// No boundary nodes, hence nothing to walk from; all scores are zero.
    NoBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginReport {
    pub walkers_used: usize,
    pub batches: usize,
    pub psrf: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisitScores {
    /// Accumulated scaled visit mass per node.
    pub raw: Vec<f64>,
    /// `raw / max(raw)`, or all zeros when nothing was visited.
    pub normalized: Vec<f64>,
    /// Keyed by boundary node id, ascending.
    pub origins: BTreeMap<usize, OriginReport>,
    /// Scaled per-walker visit mass contributed by each boundary node.
    pub contributions: BTreeMap<usize, Vec<(usize, f64)>>,
    pub status: ScoreStatus,
}

impl VisitScores {
    pub fn zeros(n: usize, status: ScoreStatus) -> Self {
        VisitScores {
            raw: vec![0.0; n],
            normalized: vec![0.0; n],
            origins: BTreeMap::new(),
            contributions: BTreeMap::new(),
            status,
        }
    }

    pub fn walkers_used(&self) -> BTreeMap<usize, usize> {
        self.origins
            .iter()
            .map(|(&b, r)| (b, r.walkers_used))
            .collect()
    }

    pub fn unconverged(&self) -> usize {
        self.origins.values().filter(|r| !r.converged).count()
    }

    /// Recomputes `normalized` from `raw`.
    pub fn renormalize(&mut self) {
        let max = self.raw.iter().copied().fold(0.0f64, f64::max);
        self.normalized = if max > 0.0 {
            self.raw.iter().map(|x| x / max).collect()
        } else {
            vec![0.0; self.raw.len()]
        };
    }
}

/// Boundary vicinity scores over `g` with community sizes taken relative
/// to `g` itself and walker streams keyed by node id in `g`.
pub fn bva(
    g: &Graph,
    labeling: &CommunityLabeling,
    bset: &BoundarySet,
    cfg: &WalkConfig,
) -> Result<VisitScores> {
    bva_with(g, labeling, bset, cfg, g.num_nodes(), |v| v as u64)
}

/// Boundary vicinity scores with an explicit population size for the
/// community scaling and an explicit walker stream key per boundary node.
/// Used when `g` is one component of a larger graph.
pub fn bva_with<K>(
    g: &Graph,
    labeling: &CommunityLabeling,
    bset: &BoundarySet,
    cfg: &WalkConfig,
    n_total: usize,
    stream_key: K,
) -> Result<VisitScores>
where
    K: Fn(usize) -> u64 + Sync,
{
    cfg.validate()?;
    if labeling.labels.len() != g.num_nodes() {
        return Err(Error::LabelLength {
            labels: labeling.labels.len(),
            num_nodes: g.num_nodes(),
        });
    }
    if n_total < g.num_nodes() || n_total == 0 {
        return Err(Error::InvalidParameter(format!(
            "population {n_total} smaller than graph of {} nodes",
            g.num_nodes()
        )));
    }
    if bset.num_nodes() == 0 {
        log::warn!("no boundary nodes; returning zero scores");
        return Ok(VisitScores::zeros(g.num_nodes(), ScoreStatus::NoBoundary));
    }

    let mut masks: BTreeMap<usize, Subgraph> = BTreeMap::new();
    for (&node, &c) in &bset.home_community {
        if c >= labeling.num_communities || labeling.labels[node] != c {
            return Err(Error::InvalidParameter(format!(
                "boundary node {node} has home community {c} inconsistent with labeling"
            )));
        }
        if let std::collections::btree_map::Entry::Vacant(e) = masks.entry(c) {
            e.insert(community_mask(g, labeling, c)?);
        }
    }

    let origins: Vec<(usize, usize)> = bset.home_community.iter().map(|(&b, &c)| (b, c)).collect();
    type Walked = (usize, OriginReport, Vec<(usize, f64)>);
    let walked: Vec<Walked> = origins
        .par_iter()
        .map(|&(b, c)| -> Result<_> {
            let mask = &masks[&c];
            let local = mask
                .to_local(b)
                .expect("boundary node lies in its home mask");
            let batch = run_converged_walks_keyed(&mask.graph, local, cfg, stream_key(b))?;
            let walkers = batch.walkers() as f64;
            let per_walker: Vec<f64> = batch
                .summed(mask.graph.num_nodes())
                .into_iter()
                .map(|s| s as f64 / walkers)
                .collect();
            let scaled = scale_community_weights(&per_walker, mask.graph.num_nodes(), n_total);
            let contribution: Vec<(usize, f64)> = scaled
                .into_iter()
                .enumerate()
                .filter(|(_, x)| *x > 0.0)
                .map(|(v, x)| (mask.to_parent[v], x))
                .collect();
            let report = OriginReport {
                walkers_used: batch.walkers(),
                batches: batch.batches,
                psrf: batch.psrf,
                converged: batch.converged,
            };
            Ok((b, report, contribution))
        })
        .collect::<Result<_>>()?;

    let mut scores = VisitScores::zeros(g.num_nodes(), ScoreStatus::Ok);
    // ascending boundary id: fixed summation order
    for (b, report, contribution) in walked {
        for &(v, x) in &contribution {
            scores.raw[v] += x;
        }
        scores.origins.insert(b, report);
        scores.contributions.insert(b, contribution);
    }
    scores.renormalize();
    Ok(scores)
}

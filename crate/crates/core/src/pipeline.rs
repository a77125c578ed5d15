//! End-to-end ranking: split into connected components, detect communities
//! in each, skip components without community structure, extract boundary
//! nodes and score their vicinity.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::{boundary_edges, BoundarySet};
use crate::community::{
    detect_communities, CommunityLabeling, DEFAULT_MIN_MODULARITY_GAIN, DEFAULT_Q_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::graph::{connected_components, subgraph, Graph};
use crate::walker::{bva_with, default_step_count, ScoreStatus, VisitScores, WalkConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub seed: u64,
    pub q_threshold: f64,
    pub min_modularity_gain: f64,
    pub walknum: usize,
    /// Fixed step count; when unset, each component uses
    /// `step_fraction * default_step_count(component size)`, rounded up.
    pub stepnum: Option<usize>,
    pub step_fraction: f64,
    pub psrf_low: f64,
    pub psrf_high: f64,
    pub max_batches: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            q_threshold: DEFAULT_Q_THRESHOLD,
            min_modularity_gain: DEFAULT_MIN_MODULARITY_GAIN,
            walknum: WalkConfig::DEFAULT_WALKNUM,
            stepnum: None,
            step_fraction: 1.0,
            psrf_low: WalkConfig::DEFAULT_PSRF_LOW,
            psrf_high: WalkConfig::DEFAULT_PSRF_HIGH,
            max_batches: WalkConfig::DEFAULT_MAX_BATCHES,
            threads: None,
        }
    }
}

impl PipelineConfig {
    pub fn walk_config(&self, component_size: usize) -> Result<WalkConfig> {
        let stepnum = match self.stepnum {
            Some(s) => s,
            None => {
                let base = default_step_count(component_size.max(2))?;
                ((base as f64 * self.step_fraction).ceil() as usize).max(1)
            }
        };
        let cfg = WalkConfig {
            walknum: self.walknum,
            stepnum,
            psrf_low: self.psrf_low,
            psrf_high: self.psrf_high,
            max_batches: self.max_batches,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(self.step_fraction > 0.0) {
            return Err(Error::InvalidParameter(
                "step fraction must be positive".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be at least 1".into()));
        }
        self.walk_config(2).map(|_| ())
    }

    /// Louvain seed for the component at `index` (largest first).
    pub fn louvain_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    NoEdges,
    LowModularity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub index: usize,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub modularity: f64,
    pub num_communities: usize,
    pub skipped: Option<SkipReason>,
    pub stepnum: Option<usize>,
    pub boundary_nodes: usize,
    pub boundary_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub components: Vec<ComponentReport>,
    /// Graph-wide community labels: components get disjoint ranges of ids;
    /// a skipped component forms a single community.
    pub labeling: CommunityLabeling,
    pub boundary: BoundarySet,
    pub scores: VisitScores,
}

struct ComponentOutcome {
    report: ComponentReport,
    nodes: Vec<usize>,
    labels: Vec<usize>,
    boundary: BoundarySet,
    scores: Option<VisitScores>,
}

pub fn run(g: &Graph, cfg: &PipelineConfig) -> Result<PipelineResult> {
    cfg.validate()?;
    match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(|| run_in_pool(g, cfg)),
        None => run_in_pool(g, cfg),
    }
}

fn run_in_pool(g: &Graph, cfg: &PipelineConfig) -> Result<PipelineResult> {
    let n = g.num_nodes();
    let partition = connected_components(g);
    let outcomes: Vec<ComponentOutcome> = partition
        .components
        .par_iter()
        .enumerate()
        .map(|(index, nodes)| process_component(g, cfg, index, nodes))
        .collect::<Result<_>>()?;

    let mut labels = vec![0usize; n];
    let mut offset = 0;
    let mut boundary = BoundarySet::default();
    let mut scores = VisitScores::zeros(n, ScoreStatus::NoBoundary);
    let mut reports = Vec::with_capacity(outcomes.len());
    for out in outcomes {
        for (local, &parent) in out.nodes.iter().enumerate() {
            labels[parent] = offset + out.labels[local];
        }
        offset += out.labels.iter().max().map_or(0, |&m| m + 1);
        for &(u, v) in &out.boundary.boundary_edges {
            boundary.boundary_edges.push((out.nodes[u], out.nodes[v]));
        }
        if let Some(s) = out.scores {
            if s.status == ScoreStatus::Ok {
                scores.status = ScoreStatus::Ok;
            }
            for (local, x) in s.raw.iter().enumerate() {
                scores.raw[out.nodes[local]] += x;
            }
            for (b, r) in s.origins {
                scores.origins.insert(out.nodes[b], r);
            }
            for (b, c) in s.contributions {
                let mapped = c.into_iter().map(|(v, x)| (out.nodes[v], x)).collect();
                scores.contributions.insert(out.nodes[b], mapped);
            }
        }
        reports.push(out.report);
    }
    boundary.boundary_edges.sort_unstable();
    for &(u, v) in &boundary.boundary_edges {
        boundary.home_community.insert(u, labels[u]);
        boundary.home_community.insert(v, labels[v]);
    }
    scores.renormalize();
    if scores.status == ScoreStatus::NoBoundary {
        log::warn!("no component passed the modularity threshold; all scores are zero");
    }
    let labeling = CommunityLabeling::from_labels(g, &labels)?;
    Ok(PipelineResult {
        components: reports,
        labeling,
        boundary,
        scores,
    })
}

fn process_component(
    g: &Graph,
    cfg: &PipelineConfig,
    index: usize,
    nodes: &[usize],
) -> Result<ComponentOutcome> {
    let sub = subgraph(g, nodes)?;
    let cg = &sub.graph;
    let mut report = ComponentReport {
        index,
        num_nodes: cg.num_nodes(),
        num_edges: cg.num_edges(),
        modularity: 0.0,
        num_communities: 1,
        skipped: None,
        stepnum: None,
        boundary_nodes: 0,
        boundary_edges: 0,
    };
    let whole = vec![0; cg.num_nodes()];
    if cg.num_edges() == 0 {
        report.skipped = Some(SkipReason::NoEdges);
        return Ok(skipped(report, sub.to_parent, whole));
    }
    let labeling = detect_communities(cg, cfg.louvain_seed(index), cfg.min_modularity_gain);
    report.modularity = labeling.modularity;
    report.num_communities = labeling.num_communities;
    if labeling.modularity < cfg.q_threshold {
        report.skipped = Some(SkipReason::LowModularity);
        return Ok(skipped(report, sub.to_parent, whole));
    }
    let bset = boundary_edges(cg, &labeling);
    let walk = cfg.walk_config(cg.num_nodes())?;
    report.stepnum = Some(walk.stepnum);
    report.boundary_nodes = bset.num_nodes();
    report.boundary_edges = bset.boundary_edges.len();
    let to_parent = &sub.to_parent;
    let scores = bva_with(cg, &labeling, &bset, &walk, g.num_nodes(), |v| {
        to_parent[v] as u64
    })?;
    Ok(ComponentOutcome {
        report,
        labels: labeling.labels,
        boundary: bset,
        scores: Some(scores),
        nodes: sub.to_parent,
    })
}

fn skipped(report: ComponentReport, nodes: Vec<usize>, labels: Vec<usize>) -> ComponentOutcome {
    ComponentOutcome {
        report,
        nodes,
        labels,
        boundary: BoundarySet::default(),
        scores: None,
    }
}

/// Per-boundary-node convergence, for manifests.
pub fn convergence_summary(scores: &VisitScores) -> BTreeMap<usize, bool> {
    scores
        .origins
        .iter()
        .map(|(&b, r)| (b, r.converged))
        .collect()
}

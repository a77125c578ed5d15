//! Text artifacts: CSV tables and Graphviz DOT.
//!
//! Floats use Rust's shortest round-trip formatting, so identical values
//! always produce identical bytes.

use std::fmt::Write;

use crate::boundary::BoundarySet;
use crate::centrality::{CentralityScores, OverlapCurve};
use crate::community::CommunityLabeling;
use crate::graph::{ComponentPartition, Graph};
use crate::temporal::EventSeries;
use crate::walker::VisitScores;

fn label(labels: &[String], v: usize) -> &str {
    labels.get(v).map_or("?", String::as_str)
}

pub fn scores_csv(labels: &[String], scores: &VisitScores) -> String {
    let mut out = String::from("node_id,raw_score,normalized_score\n");
    for (v, (raw, norm)) in scores.raw.iter().zip(&scores.normalized).enumerate() {
        writeln!(out, "{},{raw},{norm}", label(labels, v)).unwrap();
    }
    out
}

pub fn components_csv(labels: &[String], partition: &ComponentPartition) -> String {
    let mut out = String::from("node_id,component_id\n");
    for (v, c) in partition.component_id.iter().enumerate() {
        writeln!(out, "{},{c}", label(labels, v)).unwrap();
    }
    out
}

pub fn communities_csv(labels: &[String], labeling: &CommunityLabeling) -> String {
    let mut out = String::from("node_id,community_id\n");
    for (v, c) in labeling.labels.iter().enumerate() {
        writeln!(out, "{},{c}", label(labels, v)).unwrap();
    }
    out
}

pub fn boundary_edges_csv(
    labels: &[String],
    bset: &BoundarySet,
    labeling: &CommunityLabeling,
) -> String {
    let mut out = String::from("i,j,community_i,community_j\n");
    for &(i, j) in &bset.boundary_edges {
        writeln!(
            out,
            "{},{},{},{}",
            label(labels, i),
            label(labels, j),
            labeling.labels[i],
            labeling.labels[j]
        )
        .unwrap();
    }
    out
}

pub fn boundary_nodes_csv(labels: &[String], bset: &BoundarySet) -> String {
    let mut out = String::from("node_id,community_id\n");
    for (&v, &c) in &bset.home_community {
        writeln!(out, "{},{c}", label(labels, v)).unwrap();
    }
    out
}

pub fn betweenness_csv(labels: &[String], scores: &CentralityScores) -> String {
    let mut out = String::from("node_id,betweenness\n");
    for (v, b) in scores.values.iter().enumerate() {
        writeln!(out, "{},{b}", label(labels, v)).unwrap();
    }
    out
}

pub fn overlap_csv(curve: &OverlapCurve) -> String {
    let mut out = String::from("k,proportion\n");
    for (k, p) in curve.ks.iter().zip(&curve.proportions) {
        writeln!(out, "{k},{p}").unwrap();
    }
    out
}

/// One row per window: all events, then distinct active boundary and
/// control nodes.
pub fn temporal_csv(all: &EventSeries, boundary: &EventSeries, control: &EventSeries) -> String {
    let mut out = String::from("window_index,total,boundary_active,control_active\n");
    for w in 0..all.num_windows() {
        writeln!(
            out,
            "{w},{},{},{}",
            all.totals[w], boundary.actives[w], control.actives[w]
        )
        .unwrap();
    }
    out
}

/// Undirected DOT graph. Node width grows with the normalized score and
/// boundary nodes are filled.
pub fn dot(g: &Graph, labels: &[String], normalized: &[f64], bset: Option<&BoundarySet>) -> String {
    let mut out = String::from("graph bva {\n  node [shape=circle, fixedsize=true];\n");
    for v in 0..g.num_nodes() {
        let score = normalized.get(v).copied().unwrap_or(0.0);
        let width = 0.2 + 0.8 * score;
        let fill = if bset.is_some_and(|b| b.contains(v)) {
            ", style=filled, fillcolor=\"#f4a582\""
        } else {
            ""
        };
        writeln!(
            out,
            "  {v} [label=\"{}\", width={width:.3}, score={score}{fill}];",
            label(labels, v).replace('"', "\\\"")
        )
        .unwrap();
    }
    for &(u, v) in g.edges() {
        writeln!(out, "  {u} -- {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

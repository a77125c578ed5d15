//! Seeded synthetic networks: Erdős–Rényi, preferential attachment, and
//! stitching of separate communities through a few planted cross edges.

use std::collections::{BTreeSet, HashSet};

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::rng;

pub const DEFAULT_COMMUNITY_SIZE: usize = 100;
pub const DEFAULT_ER_P: f64 = 0.06;
pub const DEFAULT_PA_M: usize = 2;
pub const DEFAULT_CROSS_LINKS: usize = 26;

const MAX_ATTEMPTS: usize = 1000;

/// G(n, p): every unordered pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges)
}

/// Barabási–Albert growth from a clique of `m + 1` nodes: each new node
/// links to `m` distinct existing nodes drawn proportionally to degree.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::InvalidParameter(format!(
            "preferential attachment needs n > m >= 1 (n = {n}, m = {m})"
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut edges = Vec::new();
    // one entry per edge endpoint: uniform picks are degree-proportional
    let mut endpoints: Vec<usize> = Vec::new();
    for i in 0..=m {
        for j in i + 1..=m {
            edges.push((i, j));
            endpoints.extend([i, j]);
        }
    }
    for v in m + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Graph::new(n, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlantedNetwork {
    #[serde(skip)]
    pub graph: Graph,
    /// Index of the part each node came from.
    pub planted_labels: Vec<usize>,
    /// The `k` selected cross-linkers, in selection order.
    pub linkers: Vec<usize>,
    /// The planted cross edges as `(linker, partner)`.
    pub cross_edges: Vec<(usize, usize)>,
    /// Linkers and their partners, ascending.
    pub planted_boundary: BTreeSet<usize>,
}

/// Disjoint union of `parts` plus `k` cross edges. `k` nodes are drawn
/// uniformly without replacement; each gets one edge to a uniform node of a
/// uniformly chosen other part. The draw is repeated until the result is
/// connected and the `k` cross edges are distinct.
pub fn connect_communities(parts: &[Graph], k: usize, seed: u64) -> Result<PlantedNetwork> {
    if parts.len() < 2 {
        return Err(Error::InvalidParameter("need at least two parts".into()));
    }
    for (i, p) in parts.iter().enumerate() {
        if p.num_nodes() == 0 || connected_components(p).components.len() != 1 {
            return Err(Error::BadPart(i));
        }
    }
    let mut offsets = Vec::with_capacity(parts.len());
    let mut planted_labels = Vec::new();
    let mut base_edges = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let off = planted_labels.len();
        offsets.push(off);
        planted_labels.extend(std::iter::repeat_n(i, p.num_nodes()));
        base_edges.extend(p.edges().iter().map(|&(u, v)| (u + off, v + off)));
    }
    let n = planted_labels.len();
    if k < parts.len() - 1 || k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must lie in {}..={n}",
            parts.len() - 1
        )));
    }

    let mut rng = rng::seeded(seed);
    for _ in 0..MAX_ATTEMPTS {
        let linkers: Vec<usize> = index::sample(&mut rng, n, k).into_vec();
        let mut cross_edges = Vec::with_capacity(k);
        let mut seen = HashSet::new();
        for &u in &linkers {
            let home = planted_labels[u];
            let mut other = rng.gen_range(0..parts.len() - 1);
            if other >= home {
                other += 1;
            }
            let partner = offsets[other] + rng.gen_range(0..parts[other].num_nodes());
            seen.insert((u.min(partner), u.max(partner)));
            cross_edges.push((u, partner));
        }
        if seen.len() != k {
            continue;
        }
        let graph = Graph::new(
            n,
            base_edges
                .iter()
                .copied()
                .chain(cross_edges.iter().copied()),
        )?;
        if connected_components(&graph).components.len() != 1 {
            continue;
        }
        let planted_boundary = cross_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        return Ok(PlantedNetwork {
            graph,
            planted_labels,
            linkers,
            cross_edges,
            planted_boundary,
        });
    }
    Err(Error::RetriesExhausted(MAX_ATTEMPTS))
}

/// Draws ER parts until each is connected. Sub-seeds follow from `seed`.
pub fn connected_er_parts(count: usize, n: usize, p: f64, seed: u64) -> Result<Vec<Graph>> {
    let mut parts = Vec::with_capacity(count);
    let mut sub = seed.wrapping_mul(1_000_003);
    for _ in 0..count {
        let mut tries = 0;
        loop {
            let g = erdos_renyi(n, p, sub)?;
            sub = sub.wrapping_add(1);
            if connected_components(&g).components.len() == 1 {
                parts.push(g);
                break;
            }
            tries += 1;
            if tries >= MAX_ATTEMPTS {
                return Err(Error::RetriesExhausted(MAX_ATTEMPTS));
            }
        }
    }
    Ok(parts)
}

/// `count` independent preferential-attachment parts (always connected).
pub fn pa_parts(count: usize, n: usize, m: usize, seed: u64) -> Result<Vec<Graph>> {
    (0..count as u64)
        .map(|i| preferential_attachment(n, m, seed.wrapping_mul(1_000_003).wrapping_add(i)))
        .collect()
}

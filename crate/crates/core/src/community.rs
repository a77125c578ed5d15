//! Louvain community detection, Newman–Girvan modularity and
//! per-community masked subgraphs.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{subgraph, Graph, Subgraph};
use crate::rng;

pub const DEFAULT_MIN_MODULARITY_GAIN: f64 = 1e-7;

/// Below this modularity a component is treated as having no community
/// structure. 0.3 is the customary rule of thumb; callers may override it.
pub const DEFAULT_Q_THRESHOLD: f64 = 0.3;

const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityLabeling {
    /// Dense community id per node.
    pub labels: Vec<usize>,
    pub modularity: f64,
    pub num_communities: usize,
}

impl CommunityLabeling {
    /// Wraps an arbitrary label vector. Labels are compacted to `0..k`
    /// preserving their relative order, and modularity is recomputed
    /// (0 for an edgeless graph).
    pub fn from_labels(g: &Graph, labels: &[usize]) -> Result<Self> {
        if labels.len() != g.num_nodes() {
            return Err(Error::LabelLength {
                labels: labels.len(),
                num_nodes: g.num_nodes(),
            });
        }
        let mut distinct = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let labels: Vec<usize> = labels
            .iter()
            .map(|l| distinct.binary_search(l).expect("present"))
            .collect();
        let q = if g.num_edges() == 0 {
            0.0
        } else {
            modularity(g, &labels)?
        };
        Ok(CommunityLabeling {
            labels,
            modularity: q,
            num_communities: distinct.len(),
        })
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&v| self.labels[v] == c)
            .collect()
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_communities];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Q = Σ_c (e_cc − a_c²) with e_cc the fraction of edges inside `c` and
/// a_c the fraction of edge endpoints attached to `c`.
pub fn modularity(g: &Graph, labels: &[usize]) -> Result<f64> {
    if labels.len() != g.num_nodes() {
        return Err(Error::LabelLength {
            labels: labels.len(),
            num_nodes: g.num_nodes(),
        });
    }
    let m = g.num_edges();
    if m == 0 {
        return Err(Error::NoEdges);
    }
    let k = labels.iter().max().map_or(0, |&x| x + 1);
    let mut inside = vec![0usize; k];
    let mut ends = vec![0usize; k];
    for &(u, v) in g.edges() {
        ends[labels[u]] += 1;
        ends[labels[v]] += 1;
        if labels[u] == labels[v] {
            inside[labels[u]] += 1;
        }
    }
    let m = m as f64;
    Ok(inside
        .iter()
        .zip(&ends)
        .map(|(&l, &d)| l as f64 / m - (d as f64 / (2.0 * m)).powi(2))
        .sum())
}

/// Modularity after each completed Louvain level, starting with the
/// all-singletons partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LouvainTrace {
    pub modularity_per_pass: Vec<f64>,
}

impl LouvainTrace {
    pub fn passes(&self) -> usize {
        self.modularity_per_pass.len().saturating_sub(1)
    }
}

pub fn detect_communities(g: &Graph, seed: u64, min_modularity_gain: f64) -> CommunityLabeling {
    detect_communities_traced(g, seed, min_modularity_gain).0
}

/// Louvain: repeated local moving followed by aggregation of communities
/// into super-nodes, until a level improves modularity by less than
/// `min_modularity_gain`.
///
/// An edgeless graph yields singleton communities with Q = 0.
pub fn detect_communities_traced(
    g: &Graph,
    seed: u64,
    min_modularity_gain: f64,
) -> (CommunityLabeling, LouvainTrace) {
    let n = g.num_nodes();
    let singletons: Vec<usize> = (0..n).collect();
    if g.num_edges() == 0 {
        let labeling = CommunityLabeling {
            labels: singletons,
            modularity: 0.0,
            num_communities: n,
        };
        return (
            labeling,
            LouvainTrace {
                modularity_per_pass: vec![0.0],
            },
        );
    }

    let mut rng = rng::seeded(seed);
    let mut level = Weighted::from_graph(g);
    let mut node_to_comm = singletons;
    let mut best_q = modularity(g, &node_to_comm).expect("edges present");
    let mut trace = vec![best_q];

    loop {
        let (moved, local) = level.local_moving(&mut rng);
        if !moved {
            break;
        }
        let (dense, k) = compact(&local);
        let candidate: Vec<usize> = node_to_comm.iter().map(|&c| dense[c]).collect();
        let q = modularity(g, &candidate).expect("edges present");
        if q < best_q {
            break;
        }
        let gain = q - best_q;
        node_to_comm = candidate;
        best_q = q;
        trace.push(q);
        if gain < min_modularity_gain || k == level.n {
            break;
        }
        level = level.aggregate(&dense, k);
    }

    let labels = relabel_by_first_member(&node_to_comm);
    let num_communities = labels.iter().max().map_or(0, |&x| x + 1);
    (
        CommunityLabeling {
            labels,
            modularity: best_q,
            num_communities,
        },
        LouvainTrace {
            modularity_per_pass: trace,
        },
    )
}

/// Induced graph on community `c`: exactly the edges with both endpoints in
/// `c`. Cross-community edges are excluded.
pub fn community_mask(g: &Graph, labeling: &CommunityLabeling, c: usize) -> Result<Subgraph> {
    if c >= labeling.num_communities {
        return Err(Error::UnknownCommunity {
            community: c,
            num_communities: labeling.num_communities,
        });
    }
    subgraph(g, &labeling.members(c))
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = vec![usize::MAX; labels.len()];
    let mut next = 0;
    let mut dense = Vec::with_capacity(labels.len());
    for &c in labels {
        if map[c] == usize::MAX {
            map[c] = next;
            next += 1;
        }
        dense.push(map[c]);
    }
    (dense, next)
}

fn relabel_by_first_member(labels: &[usize]) -> Vec<usize> {
    compact(labels).0
}

/// Weighted multigraph used between Louvain levels. Self-loop weight counts
/// internal edges of an aggregated community.
struct Weighted {
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl Weighted {
    fn from_graph(g: &Graph) -> Self {
        let n = g.num_nodes();
        let adj: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|v| g.neighbors(v).iter().map(|&w| (w, 1.0)).collect())
            .collect();
        let degree: Vec<f64> = adj.iter().map(|a| a.len() as f64).collect();
        Weighted {
            n,
            adj,
            self_loop: vec![0.0; n],
            two_m: degree.iter().sum(),
            degree,
        }
    }

    /// Sweeps nodes in shuffled order, moving each to the neighboring
    /// community of largest modularity gain, until a sweep moves nothing.
    /// Staying put wins ties; among other equal-gain targets the lowest
    /// community id wins.
    fn local_moving(&self, rng: &mut rng::Rng) -> (bool, Vec<usize>) {
        let n = self.n;
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);

        let mut link = vec![0.0f64; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut is_touched = vec![false; n];
        let mut any_move = false;
        loop {
            let mut moved = false;
            for &i in &order {
                let ki = self.degree[i];
                let own = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if !is_touched[c] {
                        is_touched[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= ki;
                let gain = |c: usize, link: &[f64]| link[c] - tot[c] * ki / self.two_m;
                let mut best = own;
                let mut best_gain = gain(own, &link);
                touched.sort_unstable();
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let g = gain(c, &link);
                    if g > best_gain + GAIN_EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += ki;
                if best != own {
                    comm[i] = best;
                    moved = true;
                    any_move = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                    is_touched[c] = false;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
        }
        (any_move, comm)
    }

    fn aggregate(&self, dense: &[usize], k: usize) -> Self {
        let mut self_loop = vec![0.0; k];
        let mut acc: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for v in 0..self.n {
            let cv = dense[v];
            self_loop[cv] += self.self_loop[v];
            for &(w, wt) in &self.adj[v] {
                let cw = dense[w];
                if cv == cw {
                    // each internal edge is seen from both ends
                    self_loop[cv] += wt / 2.0;
                } else {
                    *acc[cv].entry(cw).or_insert(0.0) += wt;
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> =
            acc.into_iter().map(|m| m.into_iter().collect()).collect();
        let degree: Vec<f64> = (0..k)
            .map(|c| adj[c].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self_loop[c])
            .collect();
        Weighted {
            n: k,
            adj,
            self_loop,
            two_m: self.two_m,
            degree,
        }
    }
}

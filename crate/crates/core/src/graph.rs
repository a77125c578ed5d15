//! Undirected simple graphs, edge-list parsing and BFS connectivity.

use std::collections::{HashMap, HashSet, VecDeque};
use std::io::BufRead;

use crate::error::{Error, Result};

/// Immutable undirected simple graph over dense node ids `0..num_nodes`.
///
/// Edges are stored once, as `(min, max)` pairs in insertion order. Each
/// node's neighbor list is sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// Counts of input edges discarded while building a [`Graph`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dropped {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Builds a graph, silently dropping self-loops and repeated edges.
    pub fn from_edges<I>(num_nodes: usize, edges: I) -> Result<(Self, Dropped)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut dropped = Dropped::default();
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        for (u, v) in edges {
            for id in [u, v] {
                if id >= num_nodes {
                    return Err(Error::NodeOutOfRange { id, num_nodes });
                }
            }
            if u == v {
                dropped.self_loops += 1;
                continue;
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                dropped.duplicates += 1;
                continue;
            }
            kept.push(e);
        }
        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, v) in &kept {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok((
            Graph {
                num_nodes,
                edges: kept,
                adjacency,
            },
            dropped,
        ))
    }

    /// Like [`Graph::from_edges`] but discards the drop counts.
    pub fn new<I>(num_nodes: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(num_nodes, edges).map(|(g, _)| g)
    }

    pub fn empty(num_nodes: usize) -> Self {
        Graph {
            num_nodes,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); num_nodes],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.num_nodes && v < self.num_nodes && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Whitespace-separated edge list, one edge per line.
    ///
    /// Isolated nodes are not representable in this format, so a round trip
    /// preserves the edge set but not trailing isolated ids.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 8);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// A parsed edge list together with the original node labels.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// Original token for each dense node id.
    pub labels: Vec<String>,
    pub dropped: Dropped,
}

impl LoadedGraph {
    pub fn id_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn label_index(&self) -> HashMap<&str, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect()
    }
}

/// Parses an edge list: two tokens per line separated by whitespace or a
/// comma, `#` starts a comment line.
///
/// When every token is a nonnegative integer, ids are assigned by ascending
/// numeric value (so a file already using `0..N` keeps its ids). Otherwise
/// tokens are interned in first-seen order.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                found: tokens.len(),
            });
        }
        pairs.push((tokens[0].to_string(), tokens[1].to_string()));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }

    let numeric: Option<Vec<(u64, u64)>> = pairs
        .iter()
        .map(|(a, b)| Some((a.parse::<u64>().ok()?, b.parse::<u64>().ok()?)))
        .collect();

    let (labels, edges): (Vec<String>, Vec<(usize, usize)>) = match numeric {
        Some(nums) => {
            let mut ids: Vec<u64> = nums.iter().flat_map(|&(a, b)| [a, b]).collect();
            ids.sort_unstable();
            ids.dedup();
            let rank = |x: u64| ids.binary_search(&x).expect("id collected above");
            let edges = nums.iter().map(|&(a, b)| (rank(a), rank(b))).collect();
            (ids.iter().map(u64::to_string).collect(), edges)
        }
        None => {
            let mut index: HashMap<String, usize> = HashMap::new();
            let mut labels = Vec::new();
            let mut intern = |tok: &String| -> usize {
                if let Some(&id) = index.get(tok) {
                    return id;
                }
                let id = labels.len();
                labels.push(tok.clone());
                index.insert(tok.clone(), id);
                id
            };
            let edges = pairs.iter().map(|(a, b)| (intern(a), intern(b))).collect();
            (labels, edges)
        }
    };

    let (graph, dropped) = Graph::from_edges(labels.len(), edges)?;
    if dropped.self_loops + dropped.duplicates > 0 {
        log::info!(
            "dropped {} self-loops and {} duplicate edges",
            dropped.self_loops,
            dropped.duplicates
        );
    }
    Ok(LoadedGraph {
        graph,
        labels,
        dropped,
    })
}

/// Convenience wrapper around [`load_edge_list`] for in-memory text.
pub fn parse_edge_list(text: &str) -> Result<LoadedGraph> {
    load_edge_list(text.as_bytes())
}

/// Connected components, largest first; equal sizes ordered by smallest
/// member id. Each component's members are sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentPartition {
    pub component_id: Vec<usize>,
    pub components: Vec<Vec<usize>>,
}

pub fn connected_components(g: &Graph) -> ComponentPartition {
    let n = g.num_nodes();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root);
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            members.push(v);
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    // Discovery order already ascends by smallest member, so a stable sort
    // on size alone settles ties correctly.
    components.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let mut component_id = vec![0; n];
    for (cid, members) in components.iter().enumerate() {
        for &v in members {
            component_id[v] = cid;
        }
    }
    ComponentPartition {
        component_id,
        components,
    }
}

/// Induced subgraph with ids re-labeled densely in ascending parent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    /// `to_parent[local] = parent id`, strictly ascending.
    pub to_parent: Vec<usize>,
}

impl Subgraph {
    pub fn to_local(&self, parent: usize) -> Option<usize> {
        self.to_parent.binary_search(&parent).ok()
    }
}

pub fn subgraph(g: &Graph, nodes: &[usize]) -> Result<Subgraph> {
    let mut to_parent = nodes.to_vec();
    to_parent.sort_unstable();
    to_parent.dedup();
    if let Some(&id) = to_parent.last() {
        if id >= g.num_nodes() {
            return Err(Error::NodeOutOfRange {
                id,
                num_nodes: g.num_nodes(),
            });
        }
    }
    let mut local = vec![usize::MAX; g.num_nodes()];
    for (i, &p) in to_parent.iter().enumerate() {
        local[p] = i;
    }
    let edges = g.edges().iter().filter_map(|&(u, v)| {
        let (lu, lv) = (local[u], local[v]);
        (lu != usize::MAX && lv != usize::MAX).then_some((lu, lv))
    });
    let graph = Graph::new(to_parent.len(), edges)?;
    Ok(Subgraph { graph, to_parent })
}

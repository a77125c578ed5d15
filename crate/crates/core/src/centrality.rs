//! Shortest-path betweenness and top-k rank overlap.
//!
//! Betweenness sums over unordered pairs `{s, t}` with `s != v != t`, so a
//! path graph 0–1–2 gives node 1 a score of 1.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const BRUTE_FORCE_LIMIT: usize = 200;

/// Sources handled per parallel task. Fixed so the floating-point merge
/// order does not depend on the thread count.
const SOURCE_CHUNK: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityScores {
    pub values: Vec<f64>,
}

/// Brandes' algorithm: one BFS per source, dependencies accumulated in
/// reverse BFS order.
pub fn betweenness_brandes(g: &Graph) -> CentralityScores {
    let n = g.num_nodes();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut state = BrandesState::new(n);
            for &s in chunk {
                state.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut values = vec![0.0; n];
    for part in partials {
        for (v, x) in values.iter_mut().zip(part) {
            *v += x;
        }
    }
    // every unordered pair was counted from both ends
    for v in &mut values {
        *v /= 2.0;
    }
    CentralityScores { values }
}

struct BrandesState {
    stack: Vec<usize>,
    preds: Vec<Vec<usize>>,
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
    queue: VecDeque<usize>,
}

impl BrandesState {
    fn new(n: usize) -> Self {
        BrandesState {
            stack: Vec::with_capacity(n),
            preds: vec![Vec::new(); n],
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
            queue: VecDeque::with_capacity(n),
        }
    }

    fn accumulate(&mut self, g: &Graph, s: usize, acc: &mut [f64]) {
        for v in self.stack.drain(..) {
            self.preds[v].clear();
            self.sigma[v] = 0.0;
            self.dist[v] = -1;
            self.delta[v] = 0.0;
        }
        self.sigma[s] = 1.0;
        self.dist[s] = 0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }
        for &w in self.stack.iter().rev() {
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] / self.sigma[w] * (1.0 + self.delta[w]);
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Reference betweenness: all-pairs distances and geodesic counts from
/// per-source BFS, then for each `v` and pair `s < t` the fraction
/// σ(s,v)·σ(v,t)/σ(s,t) whenever `v` lies on an s–t geodesic.
pub fn betweenness_bruteforce(g: &Graph) -> Result<CentralityScores> {
    let n = g.num_nodes();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            num_nodes: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut dist = vec![vec![usize::MAX; n]; n];
    let mut sigma = vec![vec![0u128; n]; n];
    for s in 0..n {
        let (d, c) = (&mut dist[s], &mut sigma[s]);
        d[s] = 0;
        c[s] = 1;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if d[w] == usize::MAX {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
                if d[w] == d[v] + 1 {
                    c[w] += c[v];
                }
            }
        }
    }
    let mut values = vec![0.0; n];
    for (v, value) in values.iter_mut().enumerate() {
        for s in 0..n {
            for t in s + 1..n {
                if s == v || t == v || dist[s][t] == usize::MAX {
                    continue;
                }
                if dist[s][v] != usize::MAX
                    && dist[v][t] != usize::MAX
                    && dist[s][v] + dist[v][t] == dist[s][t]
                {
                    *value += (sigma[s][v] * sigma[v][t]) as f64 / sigma[s][t] as f64;
                }
            }
        }
    }
    Ok(CentralityScores { values })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapCurve {
    pub ks: Vec<usize>,
    pub proportions: Vec<f64>,
}

/// Node ids ordered by descending score, ties by ascending id.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut top = ranking(scores);
    top.truncate(k);
    top
}

/// `|top_k(a) ∩ top_k(b)| / k` for each `k` in `ks`.
pub fn rank_overlap(a: &[f64], b: &[f64], ks: &[usize]) -> Result<OverlapCurve> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "score vectors differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={n}")));
    }
    let (ra, rb) = (ranking(a), ranking(b));
    let proportions = ks
        .iter()
        .map(|&k| {
            let sa: HashSet<usize> = ra[..k].iter().copied().collect();
            let common = rb[..k].iter().filter(|v| sa.contains(v)).count();
            common as f64 / k as f64
        })
        .collect();
    Ok(OverlapCurve {
        ks: ks.to_vec(),
        proportions,
    })
}

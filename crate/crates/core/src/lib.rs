//! Boundary vicinity ranking for community-structured graphs.
//!
//! Nodes are scored by how often short random walks, launched from the
//! endpoints of inter-community edges and confined to their own community,
//! pass through them. The crate also carries the pieces needed to compare
//! that ranking against shortest-path betweenness: Louvain community
//! detection, exact Brandes betweenness with a brute-force oracle, rank
//! overlap curves, seeded synthetic generators, and event-stream binning
//! with robust spike detection.

pub mod boundary;
pub mod centrality;
pub mod community;
pub mod error;
pub mod generators;
pub mod graph;
pub mod output;
pub mod pipeline;
pub mod rng;
pub mod temporal;
pub mod walker;

pub use boundary::{boundary_edges, BoundarySet};
pub use centrality::{
    betweenness_brandes, betweenness_bruteforce, rank_overlap, CentralityScores, OverlapCurve,
};
pub use community::{community_mask, detect_communities, modularity, CommunityLabeling};
pub use error::{Error, Result};
pub use graph::{
    connected_components, load_edge_list, ComponentPartition, Graph, LoadedGraph, Subgraph,
};
pub use walker::{bva, VisitScores, WalkConfig};

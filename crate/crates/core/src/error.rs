use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected 2 tokens, found {found}")]
    Parse { line: usize, found: usize },

    #[error("empty input: no edges or nodes")]
    EmptyInput,

    #[error("node id {id} out of range for graph with {num_nodes} nodes")]
    NodeOutOfRange { id: usize, num_nodes: usize },

    #[error("modularity is undefined for a graph without edges")]
    NoEdges,

    #[error("unknown community {community} (labeling has {num_communities})")]
    UnknownCommunity {
        community: usize,
        num_communities: usize,
    },

    #[error("labels length {labels} does not match node count {num_nodes}")]
    LabelLength { labels: usize, num_nodes: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has {num_nodes} nodes; brute-force betweenness is limited to {limit}")]
    TooLarge { num_nodes: usize, limit: usize },

    #[error("part {0} is empty or disconnected")]
    BadPart(usize),

    #[error("could not build a connected network after {0} attempts")]
    RetriesExhausted(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

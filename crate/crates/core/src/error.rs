use thiserror::Error;

/// Errors surfaced by graph construction, enumeration and solver routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph has color-0 edges but is not flagged as carrying color 0")]
    UnexpectedColorZero,

    #[error("operation requires a closed graph: {0}")]
    NotClosed(String),

    #[error("operation requires an open graph (free vertices), but the graph is closed")]
    NotOpen,

    #[error("operation requires a connected graph")]
    Disconnected,

    #[error("no edge with index {0}")]
    NoSuchEdge(usize),

    #[error("{0}")]
    BadParameter(String),

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("pairing enumeration cap exceeded: {got} vertices per shade > cap {cap}; use a heuristic pairing instead")]
    PairingCapExceeded { got: usize, cap: usize },

    #[error("color slice {0:?} induces a disconnected sub-bubble; the relaxed (disconnected) case is not supported")]
    DisconnectedSlice(Vec<u8>),

    #[error("bubble is not isomorphic to the reference bubble (key {expected} vs {got})")]
    BubbleMismatch { expected: String, got: String },

    #[error("malformed map: {0}")]
    MalformedMap(String),

    #[error("no critical point with t, f > 0 and 0 < u < 1 for these parameters")]
    NoCriticalPoint,

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed document: {0}")]
    Document(String),
    #[error("node {target} is unreachable from node {from}")]
    Unreachable { from: usize, target: usize },
    #[error("demand {demand} exceeds the maximum flow {max_flow}")]
    InfeasibleDemand { demand: f64, max_flow: f64 },
    #[error("linear program is infeasible")]
    LpInfeasible,
    #[error("linear program is unbounded")]
    LpUnbounded,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("instance is infeasible: {0}")]
    Infeasible(String),
    #[error("no feasible subgraph can be recovered: zero max-flow to some sink")]
    Unrecoverable,
    #[error("iteration diverged at step {step}; reduce the step sizes")]
    Diverged { step: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("instance with seed {seed} failed: {source}")]
    Instance {
        seed: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attach the seed of the instance being solved.
    pub fn at_seed(self, seed: u64) -> Error {
        match self {
            e @ Error::Instance { .. } => e,
            e => Error::Instance { seed, source: Box::new(e) },
        }
    }

    /// Seed of the failing instance, if known.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Error::Instance { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    /// Stable machine-readable tag, used in CLI error records and by the C ABI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidNetwork(_) => "invalid_network",
            Error::UnknownNode(_) => "unknown_node",
            Error::InvalidRequest(_) => "invalid_request",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Document(_) => "document",
            Error::Unreachable { .. } => "unreachable",
            Error::InfeasibleDemand { .. } => "infeasible_demand",
            Error::LpInfeasible => "lp_infeasible",
            Error::LpUnbounded => "lp_unbounded",
            Error::Numerical(_) => "numerical",
            Error::Infeasible(_) => "infeasible",
            Error::Unrecoverable => "unrecoverable",
            Error::Diverged { .. } => "diverged",
            Error::Config(_) => "config",
            Error::Instance { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

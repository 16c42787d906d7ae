use thiserror::Error;

/// Crate-wide error type. Variants carry the offending entity by name so
/// that CLI diagnostics and tests can point at the exact technology, good,
/// or country involved.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("unknown entity: {0}")]
    UnknownEntity(String),
    #[error("negative flow: {0}")]
    NegativeFlow(String),
    #[error("missing price for technology {0}")]
    MissingPrice(String),
    #[error("no producer of good {0}")]
    NoProducer(String),
    #[error("technology {0} is inactive")]
    InactiveTech(String),
    #[error("state is not an equilibrium: {0}")]
    NotEquilibrium(String),
    #[error("propagation did not converge within sweep budget (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("economy outside the solvable class: {0}")]
    UnsupportedEconomy(String),
    #[error("infeasible after shock: {0}")]
    Infeasible(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cyclic between-network: {0}")]
    Cyclic(String),
    #[error("supply network has a directed cycle: {0}")]
    CyclicNetwork(String),
    #[error("disruption is not partial: {0}")]
    NotPartial(String),
    #[error("technology {0} does not belong to {1}")]
    ForeignTech(String, String),
    #[error("aggressor {0} has no leverage over {1}")]
    NoLeverage(String, String),
    #[error("undirected cycle in supply network: {0}")]
    UndirectedCycle(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl Error {
    /// Stable short name, forwarded verbatim on the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Schema(_) => "SchemaError",
            Error::Invariant(_) => "InvariantError",
            Error::UnknownEntity(_) => "UnknownEntityError",
            Error::NegativeFlow(_) => "NegativeFlowError",
            Error::MissingPrice(_) => "MissingPriceError",
            Error::NoProducer(_) => "NoProducerError",
            Error::InactiveTech(_) => "InactiveTechError",
            Error::NotEquilibrium(_) => "NotEquilibriumError",
            Error::NonConvergence { .. } => "NonConvergenceError",
            Error::UnsupportedEconomy(_) => "UnsupportedEconomyError",
            Error::Infeasible(_) => "InfeasibleError",
            Error::TooLarge(_) => "TooLargeError",
            Error::Solver(_) => "SolverError",
            Error::Cyclic(_) => "CyclicError",
            Error::CyclicNetwork(_) => "CyclicNetworkError",
            Error::NotPartial(_) => "NotPartialError",
            Error::ForeignTech(_, _) => "ForeignTechError",
            Error::NoLeverage(_, _) => "NoLeverageError",
            Error::UndirectedCycle(_) => "UndirectedCycleError",
            Error::Precondition(_) => "PreconditionError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

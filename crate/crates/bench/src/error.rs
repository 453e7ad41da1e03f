use recall_homesim::SimError;
use recall_memstore::MemError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A family's defining constraint cannot be met in this world.
    #[error("cannot generate {task}: {constraint}")]
    Infeasible { task: String, constraint: String },
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Memory(#[from] MemError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad suite file: {0}")]
    Format(String),
}

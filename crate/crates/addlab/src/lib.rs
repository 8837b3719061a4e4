//! Set files, JSON reports, the invariant suite and the `addlab` command line.

pub mod cli;
pub mod corpus;
pub mod report;
pub mod setfile;
pub mod suite;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, unreadable input or a precondition violation; exit 2.
    #[error("{0}")]
    Usage(String),
    /// A result that does not survive verification; exit 1.
    #[error("{0}")]
    Rejected(String),
}

impl From<addlab_core::Error> for CliError {
    fn from(e: addlab_core::Error) -> Self {
        match e {
            addlab_core::Error::Inconsistent(_) | addlab_core::Error::CheckFailed(_) => {
                CliError::Rejected(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool").install(f)
}

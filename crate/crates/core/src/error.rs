use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MazeError {
    #[error("maze is empty")]
    Empty,
    #[error("maze row {row} has width {found}, expected {expected}")]
    NotRectangular { row: usize, expected: usize, found: usize },
    #[error("maze has no agent start marker")]
    NoAgent,
    #[error("maze has {0} agent start markers, expected exactly one")]
    MultipleAgents(usize),
    #[error("unknown maze character {ch:?} at row {row}, column {col}")]
    UnknownChar { ch: char, row: usize, col: usize },
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("trial exhausted: tick {tick} has reached trial length {trial_length}")]
    TrialExhausted { tick: u64, trial_length: u64 },
    #[error("invalid environment config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum MemoryError {
    #[error("interaction {0} is not known to this memory")]
    UnknownInteraction(usize),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read maze file {path}: {source}")]
    MazeFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("maze file {path}: {source}")]
    MazeParse {
        path: PathBuf,
        #[source]
        source: MazeError,
    },
    #[error(transparent)]
    Maze(#[from] MazeError),
    #[error("invalid trial configuration: {0}")]
    InvalidConfig(String),
    #[error("window length {window} does not divide trial length {trial_length}")]
    WindowMismatch { window: u64, trial_length: u64 },
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    /// Configuration errors map to exit code 2, everything else to 1.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            HarnessError::MazeFile { .. }
                | HarnessError::MazeParse { .. }
                | HarnessError::Maze(_)
                | HarnessError::InvalidConfig(_)
                | HarnessError::WindowMismatch { .. }
                | HarnessError::Env(EnvError::InvalidConfig(_))
        )
    }
}

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// An ordinal 1..=5 score (probability or severity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Score(u8);

impl Score {
    pub const MIN: Score = Score(1);
    pub const MAX: Score = Score(5);

    pub fn new(value: u8) -> Result<Self> {
        if (1..=5).contains(&value) {
            Ok(Score(value))
        } else {
            Err(Error::validation(
                "score",
                format!("must be in 1..=5, got {value}"),
            ))
        }
    }

    /// Position of a value among sorted bin edges, as a score.
    pub(crate) fn from_bin(bin: usize) -> Self {
        debug_assert!(bin < 5);
        Score(bin as u8 + 1)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Score> {
        (1..=5).map(Score)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<u8> for Score {
    type Error = Error;

    fn try_from(value: u8) -> Result<Self> {
        Score::new(value)
    }
}

impl From<Score> for u8 {
    fn from(s: Score) -> u8 {
        s.0
    }
}

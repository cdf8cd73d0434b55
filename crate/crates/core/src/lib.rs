//! Crash-risk scoring for automated vehicles from road friction and sight
//! distance.
//!
//! A reading is classified into a friction band and a visibility band. The
//! band pair carries a probability score, the stopping-sight speed model
//! gives a severity score, and their product places the reading on a 5x5
//! risk matrix.
//!
//! ```
//! use hazard_risk::hazard::EnvironmentReading;
//! use hazard_risk::risk::RiskEngine;
//!
//! let engine = RiskEngine::default();
//! let a = engine.assess(&EnvironmentReading::new(0.1, 150.0)?)?;
//! assert_eq!(a.friction_label, "Icy");
//! assert_eq!(a.risk_score.get(), 25);
//! # Ok::<(), hazard_risk::error::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod hazard;
pub mod probability;
pub mod report;
pub mod risk;
pub mod sampler;
pub mod score;
pub mod severity;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bands.md")]
    mod bands {}
    #[doc = include_str!("../../../book/src/probability.md")]
    mod probability {}
    #[doc = include_str!("../../../book/src/severity.md")]
    mod severity {}
    #[doc = include_str!("../../../book/src/risk-matrix.md")]
    mod risk_matrix {}
    #[doc = include_str!("../../../book/src/case-study.md")]
    mod case_study {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

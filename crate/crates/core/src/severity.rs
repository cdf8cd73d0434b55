//! Safe advisory speed and severity scores.
//!
//! The stopping-sight-distance speed is
//!
//! ```text
//! V = (-3.67 + sqrt(13.47 + 0.12 * S / (mu + G))) / (0.06 / (mu + G))
//! ```
//!
//! with `S` in feet and `G` a decimal grade. It is scaled by 15/22, capped at
//! the design speed, and the percent reduction from design speed is binned
//! into a severity score.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hazard::EnvironmentReading;
use crate::score::Score;

const LINEAR_TERM: f64 = 3.67;
const CONSTANT_TERM: f64 = 13.47;
const SIGHT_COEFF: f64 = 0.12;
const DENOM_COEFF: f64 = 0.06;

/// Scale factor applied to the FHWA speed.
pub const SPEED_SCALE: f64 = 15.0 / 22.0;

/// Lower (inclusive) edges of severity scores 2 through 5, in percent
/// reduction: one fifteenth, one fifth, one third and two thirds of design
/// speed. At 75 mph these are the 70, 60, 50 and 25 mph advisory speeds.
pub const SEVERITY_SCORE_EDGES: [f64; 4] = [100.0 / 15.0, 20.0, 100.0 / 3.0, 200.0 / 3.0];

/// Raw FHWA safe speed in mph. Zero sight distance yields (numerically) zero.
pub fn fhwa_safe_speed(mu: f64, grade: f64, sight_ft: f64) -> Result<f64> {
    let traction = mu + grade;
    if !traction.is_finite() || traction <= 0.0 {
        return Err(Error::Domain(format!(
            "mu + grade must be > 0, got {mu} + {grade}"
        )));
    }
    if !(sight_ft.is_finite() && sight_ft >= 0.0) {
        return Err(Error::validation(
            "sight_ft",
            format!("sight distance must be >= 0 ft, got {sight_ft}"),
        ));
    }
    let root = (CONSTANT_TERM + SIGHT_COEFF * sight_ft / traction).sqrt();
    Ok(((root - LINEAR_TERM) / (DENOM_COEFF / traction)).max(0.0))
}

/// The advisory-speed chain for one reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedProfile {
    pub v_fhwa: f64,
    pub v_scaled: f64,
    pub v_advisory: f64,
    pub v_design: f64,
    pub reduction_pct: f64,
}

pub fn advisory_speed(v_fhwa: f64, v_design: f64) -> Result<SpeedProfile> {
    if !(v_design.is_finite() && v_design > 0.0) {
        return Err(Error::validation(
            "design_speed",
            format!("must be > 0 mph, got {v_design}"),
        ));
    }
    if !(v_fhwa.is_finite() && v_fhwa >= 0.0) {
        return Err(Error::validation(
            "v_fhwa",
            format!("must be >= 0 mph, got {v_fhwa}"),
        ));
    }
    let v_scaled = SPEED_SCALE * v_fhwa;
    let v_advisory = v_design.min(v_scaled);
    let reduction_pct = 100.0 * (v_design - v_advisory) / v_design;
    Ok(SpeedProfile {
        v_fhwa,
        v_scaled,
        v_advisory,
        v_design,
        reduction_pct,
    })
}

pub fn speed_profile(reading: &EnvironmentReading) -> Result<SpeedProfile> {
    let v = fhwa_safe_speed(reading.mu, reading.grade, reading.sight_ft)?;
    advisory_speed(v, reading.design_speed_mph)
}

/// Bins a percent reduction. Bins are left-closed; 100 falls in score 5.
pub fn score_severity(reduction_pct: f64) -> Result<Score> {
    if !(0.0..=100.0).contains(&reduction_pct) {
        return Err(Error::validation(
            "reduction_pct",
            format!("must be in [0, 100], got {reduction_pct}"),
        ));
    }
    let bin = SEVERITY_SCORE_EDGES
        .iter()
        .take_while(|&&edge| reduction_pct >= edge)
        .count();
    Ok(Score::from_bin(bin))
}

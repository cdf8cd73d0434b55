//! Composite risk: probability score times severity score, and its level.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hazard::{classify, BandCatalog, EnvironmentReading, Scenario};
use crate::probability::{
    joint_probability, normalize_marginals, JointEntry, JointProbabilityTable,
};
use crate::score::Score;
use crate::severity::{score_severity, speed_profile, SpeedProfile};

/// Product of two scores, 1..=25.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RiskScore(u8);

impl RiskScore {
    pub fn new(value: u8) -> Result<Self> {
        if (1..=25).contains(&value) {
            Ok(RiskScore(value))
        } else {
            Err(Error::validation(
                "risk_score",
                format!("must be in 1..=25, got {value}"),
            ))
        }
    }

    pub fn from_scores(probability: Score, severity: Score) -> Self {
        RiskScore(probability.get() * severity.get())
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn level(self) -> RiskLevel {
        match self.0 {
            1..=5 => RiskLevel::Low,
            6..=10 => RiskLevel::LowMedium,
            11..=15 => RiskLevel::Medium,
            16..=20 => RiskLevel::High,
            _ => RiskLevel::Extreme,
        }
    }
}

impl fmt::Display for RiskScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RiskLevel {
    Low,
    LowMedium,
    Medium,
    High,
    Extreme,
}

impl RiskLevel {
    pub const ALL: [RiskLevel; 5] = [
        RiskLevel::Low,
        RiskLevel::LowMedium,
        RiskLevel::Medium,
        RiskLevel::High,
        RiskLevel::Extreme,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RiskLevel::Low => "Low",
            RiskLevel::LowMedium => "Low-Medium",
            RiskLevel::Medium => "Medium",
            RiskLevel::High => "High",
            RiskLevel::Extreme => "Extreme",
        }
    }

    /// Inclusive composite-score range of this level.
    pub fn score_range(self) -> (u8, u8) {
        let i = self as u8;
        (5 * i + 1, 5 * i + 5)
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RiskLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RiskLevel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::validation("risk_level", format!("unknown level '{s}'")))
    }
}

impl Serialize for RiskLevel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

pub fn composite_risk(probability_score: u8, severity_score: u8) -> Result<RiskScore> {
    let p = Score::new(probability_score).map_err(|_| {
        Error::validation(
            "probability_score",
            format!("must be in 1..=5, got {probability_score}"),
        )
    })?;
    let s = Score::new(severity_score).map_err(|_| {
        Error::validation(
            "severity_score",
            format!("must be in 1..=5, got {severity_score}"),
        )
    })?;
    Ok(RiskScore::from_scores(p, s))
}

pub fn risk_level(score: u8) -> Result<RiskLevel> {
    RiskScore::new(score).map(RiskScore::level)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RiskCell {
    pub probability_score: Score,
    pub severity_score: Score,
    pub risk_score: RiskScore,
    pub risk_level: RiskLevel,
}

/// The 5x5 probability-by-severity grid. Rows are severity 1..=5, columns
/// probability 1..=5.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RiskMatrix {
    rows: Vec<Vec<RiskCell>>,
}

impl RiskMatrix {
    pub fn cell(&self, probability: Score, severity: Score) -> RiskCell {
        self.rows[severity.get() as usize - 1][probability.get() as usize - 1]
    }

    pub fn rows(&self) -> &[Vec<RiskCell>] {
        &self.rows
    }

    pub fn cells(&self) -> impl Iterator<Item = &RiskCell> {
        self.rows.iter().flatten()
    }
}

pub fn risk_matrix() -> RiskMatrix {
    let rows = Score::all()
        .map(|s| {
            Score::all()
                .map(|p| {
                    let risk_score = RiskScore::from_scores(p, s);
                    RiskCell {
                        probability_score: p,
                        severity_score: s,
                        risk_score,
                        risk_level: risk_score.level(),
                    }
                })
                .collect()
        })
        .collect();
    RiskMatrix { rows }
}

/// The fully scored record for one reading.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assessment {
    pub reading: EnvironmentReading,
    pub scenario_id: usize,
    pub friction_label: String,
    pub visibility_label: String,
    pub joint_probability: f64,
    pub probability_score: Score,
    pub speed_profile: SpeedProfile,
    pub severity_score: Score,
    pub risk_score: RiskScore,
    pub risk_level: RiskLevel,
}

/// Scores a reading. The probability score belongs to the reading's band pair;
/// only the severity depends on the exact friction and sight distance.
pub fn assess(
    reading: &EnvironmentReading,
    catalog: &BandCatalog,
    joint: &JointProbabilityTable,
) -> Result<Assessment> {
    reading.validate()?;
    let bands = classify(reading, catalog);
    let entry = joint
        .get(bands.friction.label(), bands.visibility.label())
        .ok_or_else(|| {
            Error::validation(
                "joint table",
                format!(
                    "no entry for {} x {}",
                    bands.friction.label(),
                    bands.visibility.label()
                ),
            )
        })?;
    score_reading(reading, bands.scenario_id(), entry)
}

/// Scores a reading known to belong to `scenario`, skipping classification.
/// Synthetic samples use this so that every draw carries its scenario's
/// probability score, even one landing exactly on a shared band edge.
pub fn assess_for_scenario(
    reading: &EnvironmentReading,
    scenario: &Scenario,
    joint: &JointProbabilityTable,
) -> Result<Assessment> {
    reading.validate()?;
    let entry = joint
        .get(scenario.friction.label(), scenario.visibility.label())
        .ok_or_else(|| {
            Error::validation(
                "joint table",
                format!("no entry for scenario {}", scenario.name()),
            )
        })?;
    score_reading(reading, scenario.id, entry)
}

fn score_reading(
    reading: &EnvironmentReading,
    scenario_id: usize,
    entry: &JointEntry,
) -> Result<Assessment> {
    let speed = speed_profile(reading)?;
    let severity_score = score_severity(speed.reduction_pct)?;
    let risk_score = RiskScore::from_scores(entry.probability_score, severity_score);
    Ok(Assessment {
        reading: *reading,
        scenario_id,
        friction_label: entry.friction_label.clone(),
        visibility_label: entry.visibility_label.clone(),
        joint_probability: entry.normalized_joint,
        probability_score: entry.probability_score,
        speed_profile: speed,
        severity_score,
        risk_score,
        risk_level: risk_score.level(),
    })
}

/// A catalog together with the joint table derived from it.
#[derive(Debug, Clone)]
pub struct RiskEngine {
    catalog: BandCatalog,
    joint: JointProbabilityTable,
}

impl RiskEngine {
    pub fn new(catalog: BandCatalog) -> Result<Self> {
        let friction = normalize_marginals(catalog.friction_bands())?;
        let visibility = normalize_marginals(catalog.visibility_bands())?;
        let joint = joint_probability(&friction, &visibility)?;
        Ok(RiskEngine { catalog, joint })
    }

    pub fn catalog(&self) -> &BandCatalog {
        &self.catalog
    }

    pub fn joint(&self) -> &JointProbabilityTable {
        &self.joint
    }

    pub fn assess(&self, reading: &EnvironmentReading) -> Result<Assessment> {
        assess(reading, &self.catalog, &self.joint)
    }
}

impl Default for RiskEngine {
    fn default() -> Self {
        RiskEngine::new(BandCatalog::default()).expect("built-in tables are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_examples() {
        assert_eq!(composite_risk(1, 1).unwrap().get(), 1);
        assert_eq!(composite_risk(4, 5).unwrap().get(), 20);
        assert_eq!(composite_risk(5, 5).unwrap().get(), 25);
        assert!(composite_risk(0, 3).is_err());
        assert!(composite_risk(3, 6).is_err());
    }

    #[test]
    fn level_examples() {
        assert_eq!(risk_level(3).unwrap(), RiskLevel::Low);
        assert_eq!(risk_level(12).unwrap(), RiskLevel::Medium);
        assert_eq!(risk_level(25).unwrap(), RiskLevel::Extreme);
        assert!(risk_level(0).is_err());
        assert!(risk_level(26).is_err());
    }

    #[test]
    fn level_ranges_partition_one_to_25() {
        let mut covered = [0u8; 26];
        for level in RiskLevel::ALL {
            let (lo, hi) = level.score_range();
            for s in lo..=hi {
                covered[s as usize] += 1;
                assert_eq!(risk_level(s).unwrap(), level);
            }
        }
        assert!(covered[1..].iter().all(|&c| c == 1));
    }

    #[test]
    fn level_names_round_trip() {
        for level in RiskLevel::ALL {
            assert_eq!(level.as_str().parse::<RiskLevel>().unwrap(), level);
        }
        assert_eq!(RiskLevel::LowMedium.to_string(), "Low-Medium");
        assert!("Medium-High".parse::<RiskLevel>().is_err());
    }

    #[test]
    fn matrix_cells() {
        let m = risk_matrix();
        let s = |v| Score::new(v).unwrap();
        let c = m.cell(s(1), s(1));
        assert_eq!((c.risk_score.get(), c.risk_level), (1, RiskLevel::Low));
        let c = m.cell(s(5), s(5));
        assert_eq!((c.risk_score.get(), c.risk_level), (25, RiskLevel::Extreme));
        let c = m.cell(s(4), s(3));
        assert_eq!((c.risk_score.get(), c.risk_level), (12, RiskLevel::Medium));
        assert_eq!(c.probability_score.get(), 4);
        assert_eq!(c.severity_score.get(), 3);
        assert_eq!(m.cells().count(), 25);
    }

    #[test]
    fn assess_examples() {
        let engine = RiskEngine::default();
        let a = engine
            .assess(&EnvironmentReading::new(0.1, 150.0).unwrap())
            .unwrap();
        assert_eq!(
            (
                a.probability_score.get(),
                a.severity_score.get(),
                a.risk_score.get()
            ),
            (5, 5, 25)
        );
        assert_eq!(a.risk_level, RiskLevel::Extreme);
        assert_eq!(a.scenario_id, 16);

        let a = engine
            .assess(&EnvironmentReading::new(0.8, 5000.0).unwrap())
            .unwrap();
        assert_eq!(
            (
                a.probability_score.get(),
                a.severity_score.get(),
                a.risk_score.get()
            ),
            (1, 1, 1)
        );
        assert_eq!(a.risk_level, RiskLevel::Low);
        assert_eq!(a.speed_profile.v_advisory, 75.0);

        let a = engine
            .assess(&EnvironmentReading::new(0.8, 150.0).unwrap())
            .unwrap();
        assert_eq!(
            (
                a.probability_score.get(),
                a.severity_score.get(),
                a.risk_score.get()
            ),
            (4, 5, 20)
        );
        assert_eq!(a.risk_level, RiskLevel::High);
    }

    #[test]
    fn assess_rejects_invalid_reading() {
        let engine = RiskEngine::default();
        let bad = EnvironmentReading {
            mu: 0.1,
            sight_ft: 100.0,
            grade: -0.2,
            design_speed_mph: 75.0,
        };
        assert!(engine.assess(&bad).is_err());
    }
}

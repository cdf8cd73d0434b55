//! Crash rates to marginal probabilities, joint probabilities, and
//! probability scores.
//!
//! Each dimension's crash rates are normalized independently into a
//! distribution. Friction and visibility are treated as independent, so the
//! joint probability of a band pair is the product of its marginals. The 16
//! products are renormalized (an identity for proper marginals) and binned.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hazard::{Dimension, HazardBand, BANDS_PER_DIMENSION};
use crate::score::Score;

/// Upper (inclusive) edges of probability scores 1 through 4. Anything above
/// the last edge scores 5.
pub const PROBABILITY_SCORE_EDGES: [f64; 4] = [0.010, 0.020, 0.050, 0.100];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalEntry {
    pub label: String,
    pub crash_rate: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalDistribution {
    pub dimension: Dimension,
    pub entries: Vec<MarginalEntry>,
}

impl MarginalDistribution {
    pub fn probability(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.probability)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.probability).collect()
    }
}

/// Divides each band's crash rate by the dimension total.
pub fn normalize_marginals(bands: &[HazardBand]) -> Result<MarginalDistribution> {
    let Some(first) = bands.first() else {
        return Err(Error::validation("bands", "at least one band is required"));
    };
    let dimension = first.dimension();
    if bands.iter().any(|b| b.dimension() != dimension) {
        return Err(Error::validation("bands", "bands mix dimensions"));
    }
    if let Some(b) = bands
        .iter()
        .find(|b| !(b.crash_rate().is_finite() && b.crash_rate() > 0.0))
    {
        return Err(Error::validation(
            "crash_rate",
            format!(
                "band '{}' has non-positive rate {}",
                b.label(),
                b.crash_rate()
            ),
        ));
    }
    let total: f64 = bands.iter().map(HazardBand::crash_rate).sum();
    Ok(MarginalDistribution {
        dimension,
        entries: bands
            .iter()
            .map(|b| MarginalEntry {
                label: b.label().to_string(),
                crash_rate: b.crash_rate(),
                probability: b.crash_rate() / total,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointEntry {
    pub friction_label: String,
    pub visibility_label: String,
    pub raw_joint: f64,
    pub normalized_joint: f64,
    pub probability_score: Score,
}

/// Joint probabilities for every friction x visibility pair, friction-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointProbabilityTable {
    entries: Vec<JointEntry>,
}

impl JointProbabilityTable {
    pub fn entries(&self) -> &[JointEntry] {
        &self.entries
    }

    pub fn get(&self, friction_label: &str, visibility_label: &str) -> Option<&JointEntry> {
        self.entries
            .iter()
            .find(|e| e.friction_label == friction_label && e.visibility_label == visibility_label)
    }

    /// Entry for a 1-based friction-major scenario id.
    pub fn by_scenario(&self, id: usize) -> Option<&JointEntry> {
        id.checked_sub(1).and_then(|i| self.entries.get(i))
    }
}

pub fn joint_probability(
    friction: &MarginalDistribution,
    visibility: &MarginalDistribution,
) -> Result<JointProbabilityTable> {
    if friction.dimension != Dimension::Friction || visibility.dimension != Dimension::Visibility {
        return Err(Error::validation(
            "marginals",
            format!(
                "expected (friction, visibility), got ({}, {})",
                friction.dimension, visibility.dimension
            ),
        ));
    }
    for m in [friction, visibility] {
        if m.entries.len() != BANDS_PER_DIMENSION {
            return Err(Error::validation(
                format!("{} marginal", m.dimension),
                format!(
                    "expected {BANDS_PER_DIMENSION} entries, found {}",
                    m.entries.len()
                ),
            ));
        }
        if m.entries
            .iter()
            .any(|e| !(e.probability.is_finite() && e.probability > 0.0))
        {
            return Err(Error::validation(
                format!("{} marginal", m.dimension),
                "probabilities must be positive",
            ));
        }
    }

    let raw: Vec<(&MarginalEntry, &MarginalEntry, f64)> = friction
        .entries
        .iter()
        .flat_map(|f| {
            visibility
                .entries
                .iter()
                .map(move |v| (f, v, f.probability * v.probability))
        })
        .collect();
    let total: f64 = raw.iter().map(|(_, _, p)| p).sum();

    let entries = raw
        .into_iter()
        .map(|(f, v, raw_joint)| {
            let normalized_joint = raw_joint / total;
            Ok(JointEntry {
                friction_label: f.label.clone(),
                visibility_label: v.label.clone(),
                raw_joint,
                normalized_joint,
                probability_score: score_probability(normalized_joint)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JointProbabilityTable { entries })
}

/// Bins a joint probability. Bins are left-open, right-closed, except that
/// the first also includes 0.
pub fn score_probability(p: f64) -> Result<Score> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::validation(
            "probability",
            format!("must be in [0, 1], got {p}"),
        ));
    }
    let bin = PROBABILITY_SCORE_EDGES
        .iter()
        .position(|&edge| p <= edge)
        .unwrap_or(PROBABILITY_SCORE_EDGES.len());
    Ok(Score::from_bin(bin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard::default_catalog;

    fn bands(dim: Dimension, rates: &[f64]) -> Vec<HazardBand> {
        rates
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let lo = 0.2 * (rates.len() - 1 - i) as f64;
                HazardBand::new(dim, format!("b{i}"), lo, lo + 0.1, r).unwrap()
            })
            .collect()
    }

    #[test]
    fn uniform_rates_give_uniform_marginals() {
        let m = normalize_marginals(&bands(Dimension::Friction, &[1.0; 4])).unwrap();
        assert_eq!(m.probabilities(), vec![0.25; 4]);
    }

    #[test]
    fn normalize_rejects_empty_and_mixed() {
        assert!(normalize_marginals(&[]).is_err());
        let c = default_catalog();
        let mut mixed = c.friction_bands().to_vec();
        mixed.push(c.visibility_bands()[0].clone());
        assert!(normalize_marginals(&mixed).is_err());
    }

    #[test]
    fn joint_rejects_swapped_marginals() {
        let c = default_catalog();
        let f = normalize_marginals(c.friction_bands()).unwrap();
        let v = normalize_marginals(c.visibility_bands()).unwrap();
        assert!(joint_probability(&v, &f).is_err());
        assert!(joint_probability(&f, &f).is_err());
        let short = MarginalDistribution {
            dimension: Dimension::Visibility,
            entries: v.entries[..3].to_vec(),
        };
        assert!(joint_probability(&f, &short).is_err());
    }

    #[test]
    fn unnormalized_marginals_are_renormalized() {
        let c = default_catalog();
        let mut f = normalize_marginals(c.friction_bands()).unwrap();
        for e in &mut f.entries {
            e.probability *= 3.0;
        }
        let v = normalize_marginals(c.visibility_bands()).unwrap();
        let t = joint_probability(&f, &v).unwrap();
        let sum: f64 = t.entries().iter().map(|e| e.normalized_joint).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let raw: f64 = t.entries().iter().map(|e| e.raw_joint).sum();
        assert!((raw - 3.0).abs() < 1e-12);
    }

    #[test]
    fn score_examples() {
        assert_eq!(score_probability(0.00247).unwrap().get(), 1);
        assert_eq!(score_probability(0.0673).unwrap().get(), 4);
        assert_eq!(score_probability(0.3190).unwrap().get(), 5);
        assert!(score_probability(-0.01).is_err());
        assert!(score_probability(1.01).is_err());
        assert!(score_probability(f64::NAN).is_err());
    }

    #[test]
    fn edges_belong_to_lower_score() {
        let expected = [
            (0.0, 1),
            (0.010, 1),
            (0.020, 2),
            (0.050, 3),
            (0.100, 4),
            (1.0, 5),
        ];
        for (p, s) in expected {
            assert_eq!(score_probability(p).unwrap().get(), s, "p = {p}");
        }
        for (i, edge) in PROBABILITY_SCORE_EDGES.iter().enumerate() {
            let above = f64::from_bits(edge.to_bits() + 1);
            assert_eq!(score_probability(above).unwrap().get() as usize, i + 2);
        }
    }

    #[test]
    fn lookup_by_labels_and_id() {
        let c = default_catalog();
        let t = joint_probability(
            &normalize_marginals(c.friction_bands()).unwrap(),
            &normalize_marginals(c.visibility_bands()).unwrap(),
        )
        .unwrap();
        let e = t.get("Icy", "Very Dense Fog").unwrap();
        assert_eq!(t.by_scenario(16).unwrap(), e);
        assert!(t.by_scenario(0).is_none());
        assert!(t.by_scenario(17).is_none());
        assert!(t.get("Icy", "Smoke").is_none());
    }
}

//! Seeded synthetic dataset for the 16-scenario case study.
//!
//! Every scenario draws `samples_per_scenario` friction values from its
//! friction band and as many sight distances from its sensor-aligned
//! visibility band, each from a normal centred on the band midpoint with
//! `sigma = width / sigma_divisor`, truncated to the band by rejection. Draw
//! `k` of friction is paired with draw `k` of sight distance.
//!
//! Each scenario owns a ChaCha8 stream selected by its id under the run seed,
//! so scenarios are generated in parallel and the output does not depend on
//! scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::hazard::{scenario_grid, BandCatalog, EnvironmentReading, Scenario};
use crate::risk::{assess_for_scenario, Assessment, RiskEngine};
use crate::score::Score;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SAMPLES_PER_SCENARIO: usize = 100;
pub const DEFAULT_SIGMA_DIVISOR: f64 = 6.0;

/// Truncation windows holding less normal mass than this are refused.
pub const MIN_ACCEPTANCE_MASS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples_per_scenario: usize,
    /// `sigma = (upper - lower) / sigma_divisor`; the mean is always the band
    /// midpoint.
    pub sigma_divisor: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            seed: DEFAULT_SEED,
            samples_per_scenario: DEFAULT_SAMPLES_PER_SCENARIO,
            sigma_divisor: DEFAULT_SIGMA_DIVISOR,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_scenario == 0 {
            return Err(Error::validation("samples", "must be >= 1"));
        }
        if !(self.sigma_divisor.is_finite() && self.sigma_divisor > 0.0) {
            return Err(Error::validation(
                "sigma_divisor",
                format!("must be > 0, got {}", self.sigma_divisor),
            ));
        }
        Ok(())
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Normal probability mass inside `[lower, upper]`.
pub fn acceptance_mass(mean: f64, sigma: f64, lower: f64, upper: f64) -> f64 {
    std_normal_cdf((upper - mean) / sigma) - std_normal_cdf((lower - mean) / sigma)
}

/// One draw from `N(mean, sigma)` conditioned on `[lower, upper]`.
pub fn truncated_normal<R: Rng + ?Sized>(
    mean: f64,
    sigma: f64,
    lower: f64,
    upper: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(lower.is_finite() && upper.is_finite() && lower < upper) {
        return Err(Error::validation(
            "bounds",
            format!("need finite lower < upper, got [{lower}, {upper}]"),
        ));
    }
    if !(sigma.is_finite() && sigma > 0.0) || !mean.is_finite() {
        return Err(Error::validation(
            "sigma",
            format!("need finite mean and sigma > 0, got mean {mean}, sigma {sigma}"),
        ));
    }
    let mass = acceptance_mass(mean, sigma, lower, upper);
    if mass.is_nan() || mass < MIN_ACCEPTANCE_MASS {
        return Err(Error::Sampling(format!(
            "[{lower}, {upper}] holds {mass:e} of N({mean}, {sigma}); below {MIN_ACCEPTANCE_MASS:e}"
        )));
    }
    let normal = Normal::new(mean, sigma).map_err(|e| Error::Sampling(e.to_string()))?;
    // Failure odds after this many tries are about e^-64.
    let max_attempts = (64.0 / mass).ceil() as u64;
    for _ in 0..max_attempts {
        let x = normal.sample(rng);
        if lower <= x && x <= upper {
            return Ok(x);
        }
    }
    Err(Error::Sampling(format!(
        "no draw landed in [{lower}, {upper}] after {max_attempts} attempts"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRecord {
    pub scenario_id: usize,
    pub mu: f64,
    pub sight_ft: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub config: SamplerConfig,
    pub scenarios: Vec<Scenario>,
    /// Scenario-major, in scenario id order.
    pub records: Vec<SampleRecord>,
}

impl SampleSet {
    pub fn scenario(&self, id: usize) -> Option<&Scenario> {
        id.checked_sub(1).and_then(|i| self.scenarios.get(i))
    }
}

/// The generator for one scenario's substream.
pub fn scenario_rng(seed: u64, scenario_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(scenario_id as u64);
    rng
}

/// Draws one scenario's samples from its own substream.
pub fn sample_scenario(config: &SamplerConfig, scenario: &Scenario) -> Result<Vec<SampleRecord>> {
    config.validate()?;
    let mut rng = scenario_rng(config.seed, scenario.id);
    let n = config.samples_per_scenario;
    let draw = |band: &crate::hazard::HazardBand, rng: &mut ChaCha8Rng| {
        truncated_normal(
            band.midpoint(),
            band.width() / config.sigma_divisor,
            band.lower(),
            band.upper(),
            rng,
        )
    };
    let mus = (0..n)
        .map(|_| draw(&scenario.friction, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let sights = (0..n)
        .map(|_| draw(&scenario.sampling_visibility, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(mus
        .into_iter()
        .zip(sights)
        .map(|(mu, sight_ft)| SampleRecord {
            scenario_id: scenario.id,
            mu,
            sight_ft,
        })
        .collect())
}

pub fn generate_dataset(config: &SamplerConfig, catalog: &BandCatalog) -> Result<SampleSet> {
    config.validate()?;
    let scenarios = scenario_grid(catalog);
    let per_scenario = scenarios
        .par_iter()
        .map(|s| sample_scenario(config, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet {
        config: *config,
        scenarios,
        records: per_scenario.into_iter().flatten().collect(),
    })
}

/// Risk-score summary for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioStats {
    pub scenario_id: usize,
    pub friction_label: String,
    pub visibility_label: String,
    pub practicality: String,
    pub probability_score: Score,
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// `mean - 3 std`, clamped to the 1..=25 risk scale.
    pub lower_3sigma: f64,
    /// `mean + 3 std`, clamped to the 1..=25 risk scale.
    pub upper_3sigma: f64,
    pub min: u8,
    pub max: u8,
}

/// Per-scenario statistics of the assessed samples, ascending by mean risk
/// (ties by scenario id). Scenarios without samples are omitted.
pub fn scenario_statistics(samples: &SampleSet, assessments: &[Assessment]) -> Vec<ScenarioStats> {
    let mut stats: Vec<ScenarioStats> = samples
        .scenarios
        .iter()
        .filter_map(|scenario| {
            let risks: Vec<f64> = assessments
                .iter()
                .filter(|a| a.scenario_id == scenario.id)
                .map(|a| f64::from(a.risk_score.get()))
                .collect();
            if risks.is_empty() {
                return None;
            }
            let n = risks.len() as f64;
            let mean = risks.iter().sum::<f64>() / n;
            let var = risks.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
            let std = var.sqrt();
            let probability_score = assessments
                .iter()
                .find(|a| a.scenario_id == scenario.id)
                .map(|a| a.probability_score)
                .expect("non-empty");
            Some(ScenarioStats {
                scenario_id: scenario.id,
                friction_label: scenario.friction.label().to_string(),
                visibility_label: scenario.visibility.label().to_string(),
                practicality: scenario.practicality.clone(),
                probability_score,
                count: risks.len(),
                mean,
                std,
                lower_3sigma: (mean - 3.0 * std).clamp(1.0, 25.0),
                upper_3sigma: (mean + 3.0 * std).clamp(1.0, 25.0),
                min: risks.iter().copied().fold(f64::INFINITY, f64::min) as u8,
                max: risks.iter().copied().fold(f64::NEG_INFINITY, f64::max) as u8,
            })
        })
        .collect();
    stats.sort_by(|a, b| {
        a.mean
            .total_cmp(&b.mean)
            .then(a.scenario_id.cmp(&b.scenario_id))
    });
    stats
}

/// Road parameters applied to every synthetic sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoadParams {
    pub grade: f64,
    pub design_speed_mph: f64,
}

impl Default for RoadParams {
    fn default() -> Self {
        RoadParams {
            grade: crate::hazard::DEFAULT_GRADE,
            design_speed_mph: crate::hazard::DEFAULT_DESIGN_SPEED_MPH,
        }
    }
}

/// A generated, assessed and summarized case study.
#[derive(Debug, Clone)]
pub struct CaseStudy {
    pub samples: SampleSet,
    /// Parallel to `samples.records`.
    pub assessments: Vec<Assessment>,
    /// Ascending by mean risk.
    pub stats: Vec<ScenarioStats>,
}

pub fn run_case_study(
    config: &SamplerConfig,
    road: &RoadParams,
    engine: &RiskEngine,
) -> Result<CaseStudy> {
    let samples = generate_dataset(config, engine.catalog())?;
    let assessments = samples
        .records
        .iter()
        .map(|r| {
            let reading =
                EnvironmentReading::with_road(r.mu, r.sight_ft, road.grade, road.design_speed_mph)?;
            let scenario = samples
                .scenario(r.scenario_id)
                .expect("record scenario exists");
            assess_for_scenario(&reading, scenario, engine.joint())
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = scenario_statistics(&samples, &assessments);
    Ok(CaseStudy {
        samples,
        assessments,
        stats,
    })
}

//! Friction and visibility bands, reading classification and the scenario grid.
//!
//! Bands within a dimension are stored in hazard order: the most benign band
//! (highest friction, longest sight distance) first. Because both quantities
//! get more dangerous as they shrink, hazard order is descending by lower
//! bound in both dimensions.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest sight distance the visibility sensor reports (2,000 m).
pub const SENSOR_MAX_SIGHT_FT: f64 = 6562.0;
/// Smallest sight distance the visibility sensor reports (10 m).
pub const SENSOR_MIN_SIGHT_FT: f64 = 33.0;

pub const DEFAULT_DESIGN_SPEED_MPH: f64 = 75.0;
pub const DEFAULT_GRADE: f64 = 0.0;

/// Number of bands per dimension.
pub const BANDS_PER_DIMENSION: usize = 4;
pub const SCENARIO_COUNT: usize = BANDS_PER_DIMENSION * BANDS_PER_DIMENSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Friction,
    Visibility,
}

impl Dimension {
    fn bounds(self) -> (f64, f64) {
        match self {
            Dimension::Friction => (0.0, 1.0),
            Dimension::Visibility => (0.0, SENSOR_MAX_SIGHT_FT),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Friction => "friction",
            Dimension::Visibility => "visibility",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A labeled closed interval of friction coefficient (dimensionless) or sight
/// distance (feet), with its empirical crash rate in crashes per million VMT.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HazardBand {
    dimension: Dimension,
    label: String,
    lower: f64,
    upper: f64,
    crash_rate: f64,
}

impl HazardBand {
    pub fn new(
        dimension: Dimension,
        label: impl Into<String>,
        lower: f64,
        upper: f64,
        crash_rate: f64,
    ) -> Result<Self> {
        let label = label.into();
        let field = |name: &str| format!("{dimension} band '{label}' {name}");
        if label.trim().is_empty() {
            return Err(Error::validation(
                format!("{dimension} band label"),
                "must not be empty",
            ));
        }
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(Error::validation(
                field("bounds"),
                format!("need finite lower < upper, got [{lower}, {upper}]"),
            ));
        }
        let (min, max) = dimension.bounds();
        if lower < min || upper > max {
            return Err(Error::validation(
                field("bounds"),
                format!("[{lower}, {upper}] lies outside [{min}, {max}]"),
            ));
        }
        if !crash_rate.is_finite() || crash_rate <= 0.0 {
            return Err(Error::validation(
                field("crash_rate"),
                format!("must be > 0, got {crash_rate}"),
            ));
        }
        Ok(HazardBand {
            dimension,
            label,
            lower,
            upper,
            crash_rate,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn crash_rate(&self) -> f64 {
        self.crash_rate
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// The three band tables the engine works from.
///
/// `visibility` holds the literature bands that carry crash rates.
/// `sampling_visibility` holds the sensor-aligned bands used to synthesize and
/// classify sight distances. The two share labels (and order), which is how a
/// sensor band is tied back to its crash rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandCatalog {
    friction: Vec<HazardBand>,
    visibility: Vec<HazardBand>,
    sampling_visibility: Vec<HazardBand>,
}

impl BandCatalog {
    pub fn new(
        friction: Vec<HazardBand>,
        visibility: Vec<HazardBand>,
        sampling_visibility: Vec<HazardBand>,
    ) -> Result<Self> {
        check_table("friction", &friction, Dimension::Friction)?;
        check_table("visibility", &visibility, Dimension::Visibility)?;
        check_table(
            "sampling_visibility",
            &sampling_visibility,
            Dimension::Visibility,
        )?;
        for (lit, sensor) in visibility.iter().zip(&sampling_visibility) {
            if lit.label != sensor.label {
                return Err(Error::validation(
                    "sampling_visibility labels",
                    format!(
                        "must match visibility labels in order; found '{}' where '{}' was expected",
                        sensor.label, lit.label
                    ),
                ));
            }
        }
        for pair in sampling_visibility.windows(2) {
            if pair[1].upper != pair[0].lower {
                return Err(Error::validation(
                    "sampling_visibility bounds",
                    format!(
                        "bands must be contiguous; '{}' ends at {} but '{}' starts at {}",
                        pair[1].label, pair[1].upper, pair[0].label, pair[0].lower
                    ),
                ));
            }
        }
        Ok(BandCatalog {
            friction,
            visibility,
            sampling_visibility,
        })
    }

    pub fn friction_bands(&self) -> &[HazardBand] {
        &self.friction
    }

    pub fn visibility_bands(&self) -> &[HazardBand] {
        &self.visibility
    }

    pub fn sampling_visibility_bands(&self) -> &[HazardBand] {
        &self.sampling_visibility
    }

    pub fn friction_band(&self, label: &str) -> Option<&HazardBand> {
        self.friction.iter().find(|b| b.label == label)
    }

    pub fn visibility_band(&self, label: &str) -> Option<&HazardBand> {
        self.visibility.iter().find(|b| b.label == label)
    }

    pub fn sampling_visibility_band(&self, label: &str) -> Option<&HazardBand> {
        self.sampling_visibility.iter().find(|b| b.label == label)
    }
}

impl Default for BandCatalog {
    fn default() -> Self {
        default_catalog()
    }
}

fn check_table(name: &str, bands: &[HazardBand], dimension: Dimension) -> Result<()> {
    if bands.len() != BANDS_PER_DIMENSION {
        return Err(Error::validation(
            name,
            format!(
                "expected {BANDS_PER_DIMENSION} bands, found {}",
                bands.len()
            ),
        ));
    }
    if let Some(b) = bands.iter().find(|b| b.dimension != dimension) {
        return Err(Error::validation(
            name,
            format!("band '{}' is a {} band", b.label, b.dimension),
        ));
    }
    for pair in bands.windows(2) {
        // Hazard order: each band sits entirely at or below its predecessor.
        if pair[1].upper > pair[0].lower {
            return Err(Error::validation(
                name,
                format!(
                    "bands must be listed most-benign first without overlap; '{}' [{}, {}] overlaps or precedes '{}' [{}, {}]",
                    pair[1].label, pair[1].lower, pair[1].upper, pair[0].label, pair[0].lower, pair[0].upper
                ),
            ));
        }
    }
    for (i, b) in bands.iter().enumerate() {
        if bands[..i].iter().any(|o| o.label == b.label) {
            return Err(Error::validation(
                name,
                format!("duplicate label '{}'", b.label),
            ));
        }
    }
    Ok(())
}

/// The built-in crash-rate tables.
pub fn default_catalog() -> BandCatalog {
    use Dimension::{Friction, Visibility};
    let band = |d, label: &str, lo, hi, rate| {
        HazardBand::new(d, label, lo, hi, rate).expect("built-in band is valid")
    };
    let friction = vec![
        band(Friction, "Dry", 0.7, 0.9, 1.90),
        band(Friction, "Wet", 0.4, 0.6, 3.75),
        band(Friction, "Snow", 0.2, 0.3, 5.50),
        band(Friction, "Icy", 0.05, 0.15, 9.00),
    ];
    let visibility = vec![
        band(Visibility, "Clear", 1640.0, SENSOR_MAX_SIGHT_FT, 0.685),
        band(Visibility, "Rain/Snow", 328.0, 656.0, 1.85),
        band(Visibility, "Dense Fog", 164.0, 328.0, 4.95),
        band(
            Visibility,
            "Very Dense Fog",
            SENSOR_MIN_SIGHT_FT,
            164.0,
            18.70,
        ),
    ];
    let sampling_visibility = vec![
        band(Visibility, "Clear", 4000.0, 6500.0, 0.685),
        band(Visibility, "Rain/Snow", 1000.0, 4000.0, 1.85),
        band(Visibility, "Dense Fog", 164.0, 1000.0, 4.95),
        band(
            Visibility,
            "Very Dense Fog",
            SENSOR_MIN_SIGHT_FT,
            164.0,
            18.70,
        ),
    ];
    BandCatalog::new(friction, visibility, sampling_visibility).expect("built-in catalog is valid")
}

/// One roadside reading: friction coefficient, sight distance (ft), decimal
/// grade, and the roadway's design speed (mph).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvironmentReading {
    pub mu: f64,
    pub sight_ft: f64,
    pub grade: f64,
    pub design_speed_mph: f64,
}

impl EnvironmentReading {
    /// A reading on level road at the default 75 mph design speed.
    pub fn new(mu: f64, sight_ft: f64) -> Result<Self> {
        Self::with_road(mu, sight_ft, DEFAULT_GRADE, DEFAULT_DESIGN_SPEED_MPH)
    }

    pub fn with_road(mu: f64, sight_ft: f64, grade: f64, design_speed_mph: f64) -> Result<Self> {
        let reading = EnvironmentReading {
            mu,
            sight_ft,
            grade,
            design_speed_mph,
        };
        reading.validate()?;
        Ok(reading)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::validation(
                "mu",
                format!("friction coefficient must be in (0, 1], got {}", self.mu),
            ));
        }
        if !(self.sight_ft.is_finite() && self.sight_ft >= 0.0) {
            return Err(Error::validation(
                "sight_ft",
                format!("sight distance must be >= 0 ft, got {}", self.sight_ft),
            ));
        }
        if !self.grade.is_finite() || self.mu + self.grade <= 0.0 {
            return Err(Error::validation(
                "grade",
                format!("mu + grade must be > 0, got {} + {}", self.mu, self.grade),
            ));
        }
        if !(self.design_speed_mph.is_finite() && self.design_speed_mph > 0.0) {
            return Err(Error::validation(
                "design_speed",
                format!("must be > 0 mph, got {}", self.design_speed_mph),
            ));
        }
        Ok(())
    }
}

/// Which visibility table a sight distance is classified against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VisibilityBasis {
    /// Contiguous sensor-aligned bands (the ones samples are drawn from).
    #[default]
    Sensor,
    /// Literature crash-rate bands, gaps split at their midpoints.
    Literature,
}

/// The pair of bands a reading falls in, with their positions in hazard order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification<'a> {
    pub friction_index: usize,
    pub visibility_index: usize,
    pub friction: &'a HazardBand,
    pub visibility: &'a HazardBand,
}

impl Classification<'_> {
    /// 1-based scenario number in friction-major order.
    pub fn scenario_id(&self) -> usize {
        scenario_id(self.friction_index, self.visibility_index)
    }
}

pub fn scenario_id(friction_index: usize, visibility_index: usize) -> usize {
    friction_index * BANDS_PER_DIMENSION + visibility_index + 1
}

/// Classifies a reading against the sensor-aligned visibility bands.
pub fn classify<'a>(reading: &EnvironmentReading, catalog: &'a BandCatalog) -> Classification<'a> {
    classify_with(reading, catalog, VisibilityBasis::Sensor)
}

pub fn classify_with<'a>(
    reading: &EnvironmentReading,
    catalog: &'a BandCatalog,
    basis: VisibilityBasis,
) -> Classification<'a> {
    let visibility_bands = match basis {
        VisibilityBasis::Sensor => catalog.sampling_visibility_bands(),
        VisibilityBasis::Literature => catalog.visibility_bands(),
    };
    let friction_index = band_index(reading.mu, catalog.friction_bands());
    let visibility_index = band_index(reading.sight_ft, visibility_bands);
    Classification {
        friction_index,
        visibility_index,
        friction: &catalog.friction_bands()[friction_index],
        visibility: &visibility_bands[visibility_index],
    }
}

/// Index of the band `x` falls in once the bands are stretched to cover the
/// whole line: each gap is split at its midpoint, a cut point belongs to the
/// band above it, and values past either end go to the outermost band.
pub fn band_index(x: f64, bands: &[HazardBand]) -> usize {
    debug_assert!(!bands.is_empty());
    for (i, pair) in bands.windows(2).enumerate() {
        let cut = 0.5 * (pair[1].upper + pair[0].lower);
        if x >= cut {
            return i;
        }
    }
    bands.len() - 1
}

/// One friction x visibility pairing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    /// 1-based, friction-major.
    pub id: usize,
    pub friction_index: usize,
    pub visibility_index: usize,
    pub friction: HazardBand,
    /// Literature band (carries the crash rate).
    pub visibility: HazardBand,
    /// Sensor-aligned band with the same label (sampling window).
    pub sampling_visibility: HazardBand,
    pub practicality: String,
}

impl Scenario {
    pub fn name(&self) -> String {
        format!("{} x {}", self.friction.label(), self.visibility.label())
    }
}

/// All 16 pairings in friction-major order.
pub fn scenario_grid(catalog: &BandCatalog) -> Vec<Scenario> {
    let mut grid = Vec::with_capacity(SCENARIO_COUNT);
    for (fi, friction) in catalog.friction_bands().iter().enumerate() {
        for (vi, visibility) in catalog.visibility_bands().iter().enumerate() {
            grid.push(Scenario {
                id: scenario_id(fi, vi),
                friction_index: fi,
                visibility_index: vi,
                friction: friction.clone(),
                visibility: visibility.clone(),
                sampling_visibility: catalog.sampling_visibility_bands()[vi].clone(),
                practicality: practicality(friction.label(), visibility.label()).to_string(),
            });
        }
    }
    grid
}

const PRACTICALITY: [(&str, &str, &str); SCENARIO_COUNT] = [
    ("Dry", "Clear", "Common (normal driving)"),
    ("Dry", "Rain/Snow", "Rare (brief post-rain dry roads)"),
    (
        "Dry",
        "Dense Fog",
        "Possible (radiation fog on dry pavement)",
    ),
    (
        "Dry",
        "Very Dense Fog",
        "Very Rare (extreme fog, no residual moisture)",
    ),
    ("Wet", "Clear", "Common (roads slowly drying after rain)"),
    ("Wet", "Rain/Snow", "Common (ongoing precipitation)"),
    (
        "Wet",
        "Dense Fog",
        "Possible (humid/fog during or after rain)",
    ),
    ("Wet", "Very Dense Fog", "Uncommon (heavy fog while wet)"),
    ("Snow", "Clear", "Common (post-snowfall clear skies)"),
    ("Snow", "Rain/Snow", "Rare (mixed sleet/rain over snow)"),
    ("Snow", "Dense Fog", "Rare (cold fog over snow-laden roads)"),
    (
        "Snow",
        "Very Dense Fog",
        "Common (active snowfall with low visibility)",
    ),
    (
        "Icy",
        "Clear",
        "Possible (morning black ice before melting)",
    ),
    ("Icy", "Rain/Snow", "Rare (freezing rain conditions)"),
    ("Icy", "Dense Fog", "Rare (ice fog in extreme cold)"),
    (
        "Icy",
        "Very Dense Fog",
        "Common (snow/ice with blowing snow)",
    ),
];

/// Field note on how often a pairing occurs; "Unspecified" for custom labels.
pub fn practicality(friction_label: &str, visibility_label: &str) -> &'static str {
    PRACTICALITY
        .iter()
        .find(|(f, v, _)| *f == friction_label && *v == visibility_label)
        .map(|(_, _, p)| *p)
        .unwrap_or("Unspecified")
}

//! CSV and JSON emitters.
//!
//! CSV numbers carry six significant digits with trailing zeros trimmed, so
//! files are byte-identical across platforms. JSON numbers use the shortest
//! representation that round-trips. All output is UTF-8 with LF endings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::TableSource;
use crate::error::{Error, Result};
use crate::hazard::{scenario_grid, BandCatalog};
use crate::probability::{normalize_marginals, JointProbabilityTable};
use crate::risk::{risk_matrix, Assessment, RiskEngine, RiskMatrix};
use crate::sampler::{CaseStudy, RoadParams, SamplerConfig};

pub const SAMPLES_FILE: &str = "samples.csv";
pub const STATS_FILE: &str = "scenario_stats.csv";
pub const HEATMAP_FILE: &str = "heatmap.csv";
pub const MARGINALS_FILE: &str = "marginals.csv";
pub const JOINT_FILE: &str = "joint.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

pub const SAMPLES_HEADER: [&str; 14] = [
    "scenario_id",
    "friction_label",
    "visibility_label",
    "mu",
    "sight_ft",
    "joint_prob",
    "prob_score",
    "v_fhwa_mph",
    "v_scaled_mph",
    "v_advisory_mph",
    "reduction_pct",
    "severity_score",
    "risk_score",
    "risk_level",
];

pub const ASSESSMENT_HEADER: [&str; 16] = [
    "mu",
    "sight_ft",
    "grade",
    "design_speed_mph",
    "scenario_id",
    "friction_label",
    "visibility_label",
    "joint_prob",
    "prob_score",
    "v_fhwa_mph",
    "v_scaled_mph",
    "v_advisory_mph",
    "reduction_pct",
    "severity_score",
    "risk_score",
    "risk_level",
];

pub const STATS_HEADER: [&str; 13] = [
    "rank",
    "scenario_id",
    "friction_label",
    "visibility_label",
    "practicality",
    "prob_score",
    "count",
    "mean_risk",
    "std_risk",
    "lower_3sigma",
    "upper_3sigma",
    "min_risk",
    "max_risk",
];

pub const HEATMAP_HEADER: [&str; 4] = ["severity_score", "prob_score", "risk_score", "risk_level"];

pub const MARGINALS_HEADER: [&str; 6] = [
    "dimension",
    "label",
    "lower",
    "upper",
    "crash_rate",
    "probability",
];

pub const JOINT_HEADER: [&str; 7] = [
    "scenario_id",
    "friction_label",
    "visibility_label",
    "practicality",
    "raw_joint",
    "normalized_joint",
    "prob_score",
];

/// Formats `x` with six significant digits, trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // `{:.5e}` rounds correctly to six digits and tells us the exponent after
    // rounding; everything below is string surgery on that.
    let sci = format!("{:.5e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let mut out = if exp >= 5 {
        format!("{digits}{}", "0".repeat((exp - 5) as usize))
    } else if exp >= 0 {
        let split = exp as usize + 1;
        format!("{}.{}", &digits[..split], &digits[split..])
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    if x < 0.0 {
        out.insert(0, '-');
    }
    out
}

/// Flat view of an [`Assessment`], used for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssessmentRecord<'a> {
    pub mu: f64,
    pub sight_ft: f64,
    pub grade: f64,
    pub design_speed_mph: f64,
    pub scenario_id: usize,
    pub friction_label: &'a str,
    pub visibility_label: &'a str,
    pub joint_prob: f64,
    pub prob_score: u8,
    pub v_fhwa_mph: f64,
    pub v_scaled_mph: f64,
    pub v_advisory_mph: f64,
    pub reduction_pct: f64,
    pub severity_score: u8,
    pub risk_score: u8,
    pub risk_level: &'static str,
}

impl<'a> From<&'a Assessment> for AssessmentRecord<'a> {
    fn from(a: &'a Assessment) -> Self {
        AssessmentRecord {
            mu: a.reading.mu,
            sight_ft: a.reading.sight_ft,
            grade: a.reading.grade,
            design_speed_mph: a.reading.design_speed_mph,
            scenario_id: a.scenario_id,
            friction_label: &a.friction_label,
            visibility_label: &a.visibility_label,
            joint_prob: a.joint_probability,
            prob_score: a.probability_score.get(),
            v_fhwa_mph: a.speed_profile.v_fhwa,
            v_scaled_mph: a.speed_profile.v_scaled,
            v_advisory_mph: a.speed_profile.v_advisory,
            reduction_pct: a.speed_profile.reduction_pct,
            severity_score: a.severity_score.get(),
            risk_score: a.risk_score.get(),
            risk_level: a.risk_level.as_str(),
        }
    }
}

fn scored_fields(a: &Assessment) -> [String; 8] {
    [
        format_sig(a.joint_probability),
        a.probability_score.to_string(),
        format_sig(a.speed_profile.v_fhwa),
        format_sig(a.speed_profile.v_scaled),
        format_sig(a.speed_profile.v_advisory),
        format_sig(a.speed_profile.reduction_pct),
        a.severity_score.to_string(),
        a.risk_score.to_string(),
    ]
}

/// One `samples.csv` row.
pub fn sample_row(a: &Assessment) -> Vec<String> {
    let mut row = vec![
        a.scenario_id.to_string(),
        a.friction_label.clone(),
        a.visibility_label.clone(),
        format_sig(a.reading.mu),
        format_sig(a.reading.sight_ft),
    ];
    row.extend(scored_fields(a));
    row.push(a.risk_level.to_string());
    row
}

/// One row under [`ASSESSMENT_HEADER`].
pub fn assessment_row(a: &Assessment) -> Vec<String> {
    let mut row = vec![
        format_sig(a.reading.mu),
        format_sig(a.reading.sight_ft),
        format_sig(a.reading.grade),
        format_sig(a.reading.design_speed_mph),
        a.scenario_id.to_string(),
        a.friction_label.clone(),
        a.visibility_label.clone(),
    ];
    row.extend(scored_fields(a));
    row.push(a.risk_level.to_string());
    row
}

pub fn assessment_json(a: &Assessment) -> Result<String> {
    Ok(serde_json::to_string_pretty(&AssessmentRecord::from(a))?)
}

/// Renders a header and rows as CSV text.
pub fn csv_string<H, R, F>(header: &[H], rows: R) -> Result<String>
where
    H: AsRef<str>,
    R: IntoIterator<Item = Vec<F>>,
    F: AsRef<str>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header.iter().map(AsRef::as_ref))?;
    for row in rows {
        w.write_record(row.iter().map(AsRef::as_ref))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn samples_csv(assessments: &[Assessment]) -> Result<String> {
    csv_string(&SAMPLES_HEADER, assessments.iter().map(sample_row))
}

pub fn stats_csv(case: &CaseStudy) -> Result<String> {
    let rows = case.stats.iter().enumerate().map(|(i, s)| {
        vec![
            (i + 1).to_string(),
            s.scenario_id.to_string(),
            s.friction_label.clone(),
            s.visibility_label.clone(),
            s.practicality.clone(),
            s.probability_score.to_string(),
            s.count.to_string(),
            format_sig(s.mean),
            format_sig(s.std),
            format_sig(s.lower_3sigma),
            format_sig(s.upper_3sigma),
            s.min.to_string(),
            s.max.to_string(),
        ]
    });
    csv_string(&STATS_HEADER, rows)
}

pub fn heatmap_csv(matrix: &RiskMatrix) -> Result<String> {
    let rows = matrix.cells().map(|c| {
        vec![
            c.severity_score.to_string(),
            c.probability_score.to_string(),
            c.risk_score.to_string(),
            c.risk_level.to_string(),
        ]
    });
    csv_string(&HEATMAP_HEADER, rows)
}

pub fn marginals_csv(catalog: &BandCatalog) -> Result<String> {
    let mut rows = Vec::new();
    for bands in [catalog.friction_bands(), catalog.visibility_bands()] {
        let marginal = normalize_marginals(bands)?;
        for (b, e) in bands.iter().zip(&marginal.entries) {
            rows.push(vec![
                marginal.dimension.to_string(),
                b.label().to_string(),
                format_sig(b.lower()),
                format_sig(b.upper()),
                format_sig(b.crash_rate()),
                format_sig(e.probability),
            ]);
        }
    }
    csv_string(&MARGINALS_HEADER, rows)
}

pub fn joint_csv(catalog: &BandCatalog, joint: &JointProbabilityTable) -> Result<String> {
    let rows = scenario_grid(catalog).into_iter().map(|s| {
        let e = joint
            .get(s.friction.label(), s.visibility.label())
            .expect("joint table covers the grid");
        vec![
            s.id.to_string(),
            e.friction_label.clone(),
            e.visibility_label.clone(),
            s.practicality,
            format_sig(e.raw_joint),
            format_sig(e.normalized_joint),
            e.probability_score.to_string(),
        ]
    });
    csv_string(&JOINT_HEADER, rows)
}

/// Plain-text heatmap, severity 5 on top so the darkest cell is top-right.
pub fn matrix_text(matrix: &RiskMatrix) -> String {
    let mut out = format!("{:<10}", "sev\\prob");
    for p in 1..=5 {
        out.push_str(&format!("{p:<15}"));
    }
    truncate_line(&mut out);
    for row in matrix.rows().iter().rev() {
        out.push_str(&format!("{:<10}", row[0].severity_score.get()));
        for c in row {
            out.push_str(&format!(
                "{:<3}{:<12}",
                c.risk_score.get(),
                c.risk_level.as_str()
            ));
        }
        truncate_line(&mut out);
    }
    out
}

fn truncate_line(out: &mut String) {
    let trimmed = out.trim_end().len();
    out.truncate(trimmed);
    out.push('\n');
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestConfig {
    pub seed: u64,
    pub samples_per_scenario: usize,
    pub sigma_divisor: f64,
    pub design_speed_mph: f64,
    pub grade: f64,
    pub table_source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    /// Data rows, header excluded.
    pub rows: usize,
}

/// What a `simulate` run was asked to do and what it wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool: String,
    pub version: String,
    pub config: ManifestConfig,
    pub outputs: Vec<OutputFile>,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes every simulation artifact plus `manifest.json` into `dir`.
pub fn write_simulation(
    dir: &Path,
    case: &CaseStudy,
    engine: &RiskEngine,
    sampler: &SamplerConfig,
    road: &RoadParams,
    source: &TableSource,
) -> Result<RunManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let (catalog, joint, matrix) = (engine.catalog(), engine.joint(), &risk_matrix());
    let files = [
        (
            SAMPLES_FILE,
            samples_csv(&case.assessments)?,
            case.assessments.len(),
        ),
        (STATS_FILE, stats_csv(case)?, case.stats.len()),
        (HEATMAP_FILE, heatmap_csv(matrix)?, matrix.cells().count()),
        (
            MARGINALS_FILE,
            marginals_csv(catalog)?,
            catalog.friction_bands().len() + catalog.visibility_bands().len(),
        ),
        (
            JOINT_FILE,
            joint_csv(catalog, joint)?,
            joint.entries().len(),
        ),
    ];
    let mut outputs = Vec::with_capacity(files.len());
    for (name, contents, rows) in &files {
        write_file(dir, name, contents)?;
        outputs.push(OutputFile {
            file: name.to_string(),
            rows: *rows,
        });
    }
    let manifest = RunManifest {
        command: "simulate".to_string(),
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ManifestConfig {
            seed: sampler.seed,
            samples_per_scenario: sampler.samples_per_scenario,
            sigma_divisor: sampler.sigma_divisor,
            design_speed_mph: road.design_speed_mph,
            grade: road.grade,
            table_source: source.to_string(),
        },
        outputs,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write_file(dir, MANIFEST_FILE, &json)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hazard::EnvironmentReading;

    #[test]
    fn six_significant_digits() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (25.0, "25"),
            (76.4806123, "76.4806"),
            (0.0943396226, "0.0943396"),
            (0.00247, "0.00247"),
            (6562.0, "6562"),
            (9.9999996, "10"),
            (123456789.0, "123457000"),
            (-0.05, "-0.05"),
            (33.333333333, "33.3333"),
            (1e-7, "0.0000001"),
        ];
        for (x, s) in cases {
            assert_eq!(format_sig(x), s, "{x}");
        }
    }

    #[test]
    fn format_sig_round_trips_to_six_digits() {
        for &x in &[0.123456789, 987.654321, 1.5e-4, 52.1454545, 3.0e6 + 7.0] {
            let back: f64 = format_sig(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-6, "{x} -> {back}");
        }
    }

    #[test]
    fn labels_with_commas_are_quoted() {
        let engine = RiskEngine::default();
        let text = joint_csv(engine.catalog(), engine.joint()).unwrap();
        assert!(text.contains("\"Very Rare (extreme fog, no residual moisture)\""));
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn heatmap_has_25_rows() {
        let text = heatmap_csv(&risk_matrix()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 26);
        assert_eq!(lines[0], "severity_score,prob_score,risk_score,risk_level");
        assert_eq!(lines[1], "1,1,1,Low");
        assert_eq!(lines[25], "5,5,25,Extreme");
    }

    #[test]
    fn matrix_text_puts_extreme_top_right() {
        let text = matrix_text(&risk_matrix());
        let first_row = text.lines().nth(1).unwrap();
        assert!(first_row.starts_with('5'));
        assert!(first_row.ends_with("25 Extreme"));
        assert!(text.lines().last().unwrap().starts_with("1         1  Low"));
    }

    #[test]
    fn marginal_rows_match_table() {
        let text = marginals_csv(&BandCatalog::default()).unwrap();
        assert!(
            text.contains("friction,Icy,0.05,0.15,9,0.44665\n"),
            "{text}"
        );
    }

    #[test]
    fn assessment_json_is_flat() {
        let a = RiskEngine::default()
            .assess(&EnvironmentReading::new(0.1, 150.0).unwrap())
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&assessment_json(&a).unwrap()).unwrap();
        assert_eq!(v["risk_score"], 25);
        assert_eq!(v["risk_level"], "Extreme");
        assert_eq!(v["mu"], 0.1);
        assert_eq!(
            v.as_object().unwrap().len(),
            ASSESSMENT_HEADER.len(),
            "json and csv carry the same fields"
        );
    }
}

//! Text formats: XYZ+charge point files, feature rows and sweep tables.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::engine::SweepPoint;
use crate::error::{PslError, Result};
use crate::geometry::{CloudOptions, LabeledPoint, LabeledPointCloud};
use crate::protein::features::{FeatureConfig, SiteFeatureVector, LAYOUT_VERSION};
use crate::spectrum::STAT_NAMES;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| PslError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| PslError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Lines `x y z charge [element]`; `#` starts a comment, blank lines are
/// skipped. Missing elements are left empty.
pub fn parse_points(text: &str) -> Result<Vec<LabeledPoint>> {
    let mut points = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(4..=5).contains(&fields.len()) {
            return Err(PslError::MalformedRecord {
                line: i + 1,
                reason: format!("expected 4 or 5 fields, found {}", fields.len()),
            });
        }
        let mut nums = [0.0; 4];
        for (k, f) in fields[..4].iter().enumerate() {
            nums[k] = f.parse().map_err(|_| PslError::MalformedRecord {
                line: i + 1,
                reason: format!("'{f}' is not a number"),
            })?;
        }
        let element = fields.get(4).map(|e| e.to_ascii_uppercase()).unwrap_or_default();
        points.push(LabeledPoint::new(
            points.len(),
            [nums[0], nums[1], nums[2]],
            nums[3],
            element,
        ));
    }
    Ok(points)
}

pub fn read_points(path: &Path, opts: CloudOptions) -> Result<LabeledPointCloud> {
    LabeledPointCloud::with_options(parse_points(&read_text(path)?)?, opts)
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `t,betti,lambda_min` table; `lambda_min` is blank when the snapshot has
/// no nonzero eigenvalue.
pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("t,betti,lambda_min\n");
    for p in points {
        let _ = writeln!(out, "{},{},{}", p.t, p.summary.betti, opt_num(p.summary.lambda_min_nonzero));
    }
    out
}

/// Header row for feature CSV output.
pub fn feature_csv_header(vector_names: &[String]) -> String {
    let mut out = String::from("mutation");
    for n in vector_names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    out
}

/// One CSV row; values use the shortest representation that round-trips.
pub fn feature_csv_row(mutation: &str, v: &SiteFeatureVector) -> String {
    let mut out = String::with_capacity(v.values.len() * 8);
    out.push_str(mutation);
    for x in &v.values {
        let _ = write!(out, ",{x}");
    }
    out.push('\n');
    out
}

#[derive(Debug, Serialize)]
struct Conventions {
    vr_value: &'static str,
    alpha_value: &'static str,
    f_kind: &'static str,
    stats_order: [&'static str; 8],
    count_statistic: &'static str,
    neighborhood_cutoff: &'static str,
}

const CONVENTIONS: Conventions = Conventions {
    vr_value: "diameter",
    alpha_value: "radius",
    f_kind: "product_of_pairwise_distances",
    stats_order: STAT_NAMES,
    count_statistic: "nonzero",
    neighborhood_cutoff: "inclusive, atom to nearest site atom",
};

#[derive(Debug, Serialize)]
struct FeatureJson<'a> {
    spec: String,
    config: &'a FeatureConfig,
    conventions: &'a Conventions,
    layout_version: &'static str,
    values: &'a [f64],
}

pub fn feature_json(mutation: &str, config: &FeatureConfig, v: &SiteFeatureVector) -> String {
    let doc = FeatureJson {
        spec: mutation.to_string(),
        config,
        conventions: &CONVENTIONS,
        layout_version: LAYOUT_VERSION,
        values: &v.values,
    };
    serde_json::to_string(&doc).expect("feature vector serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_with_comments_and_elements() {
        let pts = parse_points("# two atoms\n0 0 0 1.0 c\n\n5 0 0 -0.5 # trailing\n").unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].element, "C");
        assert_eq!(pts[1].charge, -0.5);
        assert_eq!(pts[1].element, "");
        assert_eq!(pts[1].id, 1);
    }

    #[test]
    fn malformed_points() {
        assert!(matches!(
            parse_points("0 0 0\n"),
            Err(PslError::MalformedRecord { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("0 0 0 1\n0 x 0 1\n"),
            Err(PslError::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn csv_values_round_trip() {
        let layout = FeatureConfig::default().layout();
        let v = SiteFeatureVector {
            values: vec![0.1 + 0.2, 1.0 / 3.0],
            layout,
            empty_channels: vec![],
            warnings: vec![],
        };
        let row = feature_csv_row("A:1:G:A", &v);
        let back: Vec<f64> = row.trim().split(',').skip(1).map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, v.values);
    }
}

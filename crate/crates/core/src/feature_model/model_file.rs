//! Plain-text model files.
//!
//! ```text
//! # free-form comment lines
//! format_version = 1
//! frame = s,m
//! features = velocity,reflection
//! composite_mode = sum-of-singletons
//! param velocity s mean=0.12 variance=2.31
//! param velocity m mean=40.3 variance=15.8
//! ...
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{CompositeMode, FeatureModel, GaussianParams, ModelError, Result};
use crate::dst::Frame;
use crate::radar_data::Feature;

pub const FORMAT_VERSION: u32 = 1;

/// Renders `model`; each entry of `notes` becomes a leading `# ` comment.
/// Floats are written in shortest round-trip form.
pub fn serialize_model(model: &FeatureModel, notes: &[String]) -> String {
    let mut out = String::new();
    for note in notes {
        for line in note.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    let _ = writeln!(out, "format_version = {FORMAT_VERSION}");
    let _ = writeln!(out, "frame = {}", model.frame().labels().join(","));
    let _ = writeln!(out, "features = {}", Feature::join(model.features()));
    let _ = writeln!(out, "composite_mode = {}", model.composite_mode());
    for &feature in model.features() {
        for set in model.frame().non_empty_sets() {
            if let Some(p) = model.params(feature, set) {
                let _ = writeln!(
                    out,
                    "param {feature} {} mean={} variance={}",
                    model.frame().set_label(set),
                    p.mean,
                    p.variance
                );
            }
        }
    }
    out
}

pub fn deserialize_model(text: &str) -> Result<FeatureModel> {
    let mut header: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    let mut param_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("param ") {
            param_lines.push((line_no, rest));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| malformed(line_no, "expected key = value"))?;
        let key = key.trim();
        if !matches!(key, "format_version" | "frame" | "features" | "composite_mode") {
            return Err(malformed(line_no, &format!("unknown key {key:?}")));
        }
        if header.insert(key, (line_no, value.trim())).is_some() {
            return Err(malformed(line_no, &format!("duplicate key {key:?}")));
        }
    }
    let get = |key: &str| {
        header
            .get(key)
            .copied()
            .ok_or_else(|| malformed(0, &format!("missing key {key:?}")))
    };

    let (_, version) = get("format_version")?;
    if version.parse::<u32>().ok() != Some(FORMAT_VERSION) {
        return Err(ModelError::VersionMismatch {
            found: version.to_owned(),
            expected: FORMAT_VERSION,
        });
    }
    let (_, labels) = get("frame")?;
    let frame = Frame::new(labels.split(',').map(str::trim))?;
    let (line, names) = get("features")?;
    let features = Feature::parse_list(names).map_err(|e| malformed(line, &e.to_string()))?;
    let (line, mode) = get("composite_mode")?;
    let composite_mode: CompositeMode = mode.parse().map_err(|e: String| malformed(line, &e))?;

    let mut params = BTreeMap::new();
    for (line, rest) in param_lines {
        let fields: Vec<&str> = rest.split_whitespace().collect();
        let [feature, class, mean, variance] = fields[..] else {
            return Err(malformed(
                line,
                "expected: param <feature> <class> mean=<x> variance=<x>",
            ));
        };
        let feature: Feature = feature
            .parse()
            .map_err(|_| ModelError::UnknownFeature(feature.to_owned()))?;
        let set = frame
            .parse_set(class)
            .map_err(|_| ModelError::UnknownLabel(class.to_owned()))?;
        let number = |field: &str, key: &str| -> Result<f64> {
            field
                .strip_prefix(key)
                .and_then(|v| v.strip_prefix('='))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| malformed(line, &format!("bad {key} field {field:?}")))
        };
        let p = GaussianParams {
            mean: number(mean, "mean")?,
            variance: number(variance, "variance")?,
        };
        if params.insert((feature, set), p).is_some() {
            return Err(malformed(
                line,
                &format!("duplicate parameters for ({feature}, {class})"),
            ));
        }
    }
    FeatureModel::new(frame, features, params, composite_mode)
}

fn malformed(line: usize, reason: &str) -> ModelError {
    ModelError::Malformed {
        line,
        reason: reason.to_owned(),
    }
}

pub fn write_model(model: &FeatureModel, notes: &[String], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serialize_model(model, notes))?;
    Ok(())
}

pub fn read_model(path: impl AsRef<Path>) -> Result<FeatureModel> {
    deserialize_model(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_model::{fit, VARIANCE_FLOOR};
    use crate::radar_data::{generate, radar_frame, GeneratorConfig};

    fn fitted(mode: CompositeMode) -> FeatureModel {
        let data = generate(&GeneratorConfig::well_separated(1, 30, 30)).unwrap();
        fit(
            &data.records,
            &[Feature::Velocity, Feature::Reflection],
            &radar_frame(),
            mode,
        )
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let model = fitted(CompositeMode::SumOfSingletons);
        let text = serialize_model(&model, &["seed: 1".into()]);
        assert!(text.starts_with("# seed: 1\nformat_version = 1\nframe = s,m\nfeatures = velocity,reflection\n"));
        assert_eq!(deserialize_model(&text).unwrap(), model);

        let composite = fitted(CompositeMode::FittedComposite);
        assert_eq!(deserialize_model(&serialize_model(&composite, &[])).unwrap(), composite);
    }

    #[test]
    fn missing_pair_is_named() {
        let text = serialize_model(&fitted(CompositeMode::SumOfSingletons), &[]);
        let pruned: String = text
            .lines()
            .filter(|l| !l.starts_with("param reflection m "))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = deserialize_model(&pruned).unwrap_err();
        assert_eq!(
            err,
            ModelError::MissingParams {
                feature: "reflection".into(),
                class: "m".into()
            }
        );
        assert!(err.to_string().contains("(reflection, m)"));
    }

    #[test]
    fn tiny_variance_is_clamped() {
        let text = "format_version = 1\nframe = s,m\nfeatures = velocity\ncomposite_mode = sum-of-singletons\n\
                    param velocity s mean=0 variance=1e-15\nparam velocity m mean=40 variance=4\n";
        let model = deserialize_model(text).unwrap();
        let s = model.frame().singleton("s").unwrap();
        assert_eq!(model.params(Feature::Velocity, s).unwrap().variance, VARIANCE_FLOOR);
    }

    #[test]
    fn rejects_bad_files() {
        let good = serialize_model(&fitted(CompositeMode::SumOfSingletons), &[]);
        assert!(matches!(
            deserialize_model(&good.replace("format_version = 1", "format_version = 2")),
            Err(ModelError::VersionMismatch { .. })
        ));
        assert!(matches!(
            deserialize_model(&good.replace("format_version = 1\n", "")),
            Err(ModelError::Malformed { .. })
        ));
        assert!(matches!(
            deserialize_model(&format!("{good}nonsense\n")),
            Err(ModelError::Malformed { .. })
        ));
        assert!(matches!(
            deserialize_model(&format!("{good}param velocity sm mean=1 variance=1\n")),
            Err(ModelError::InvalidParams { .. })
        ));
        assert!(matches!(
            deserialize_model(&good.replacen("mean=", "mean=x", 1)),
            Err(ModelError::Malformed { .. })
        ));
        assert!(matches!(
            deserialize_model(&format!("{good}param speed s mean=1 variance=1\n")),
            Err(ModelError::UnknownFeature(_))
        ));
    }
}

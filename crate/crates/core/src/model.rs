//! Feature-space schema, instances, the black-box model contract and
//! output-to-utility mappings.
//!
//! Feature indices are 0-based in this API. Everything user-facing (CLI
//! flags, reports, rendered labels) uses 1-based positions `x1..xn`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when snapping mapped utilities onto the `[0, 1]` bounds.
pub const UTILITY_CLAMP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric { min: f64, max: f64 },
    Categorical { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor")]
pub struct FeatureDescriptor {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

#[derive(Deserialize)]
struct RawDescriptor {
    name: String,
    #[serde(flatten)]
    kind: FeatureKind,
}

impl TryFrom<RawDescriptor> for FeatureDescriptor {
    type Error = Error;

    fn try_from(raw: RawDescriptor) -> Result<Self> {
        match raw.kind {
            FeatureKind::Numeric { min, max } => Self::numeric(raw.name, min, max),
            FeatureKind::Categorical { categories } => Self::categorical(raw.name, categories),
        }
    }
}

impl FeatureDescriptor {
    pub fn numeric(name: impl Into<String>, min: f64, max: f64) -> Result<Self> {
        let name = name.into();
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidFeature {
                feature: name,
                reason: "range bounds must be finite".into(),
            });
        }
        if min >= max {
            return Err(Error::InvalidFeature {
                feature: name,
                reason: format!("degenerate numeric range (min={min}, max={max})"),
            });
        }
        Ok(Self {
            name,
            kind: FeatureKind::Numeric { min, max },
        })
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let categories: Vec<String> = categories.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for c in &categories {
            if !seen.insert(c.as_str()) {
                return Err(Error::InvalidFeature {
                    feature: name,
                    reason: format!("duplicate category `{c}`"),
                });
            }
        }
        if categories.len() < 2 {
            return Err(Error::InvalidFeature {
                feature: name,
                reason: "a categorical feature needs at least 2 distinct values".into(),
            });
        }
        Ok(Self {
            name,
            kind: FeatureKind::Categorical { categories },
        })
    }

    /// Boolean feature with categories `"0"` and `"1"`; level index equals the value.
    pub fn binary(name: impl Into<String>) -> Self {
        Self::categorical(name, ["0", "1"]).expect("two distinct categories")
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, FeatureKind::Numeric { .. })
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        match self.kind {
            FeatureKind::Numeric { min, max } => Some((min, max)),
            FeatureKind::Categorical { .. } => None,
        }
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.kind {
            FeatureKind::Numeric { .. } => None,
            FeatureKind::Categorical { categories } => Some(categories),
        }
    }

    /// Number of levels of a categorical feature, `None` for numeric ones.
    pub fn level_count(&self) -> Option<usize> {
        self.categories().map(<[String]>::len)
    }

    fn check(&self, value: FeatureValue) -> Result<()> {
        match (&self.kind, value) {
            (FeatureKind::Numeric { min, max }, FeatureValue::Numeric(v)) => {
                if v.is_finite() && v >= *min && v <= *max {
                    Ok(())
                } else {
                    Err(Error::OutOfRange {
                        feature: self.name.clone(),
                        value: v,
                        min: *min,
                        max: *max,
                    })
                }
            }
            (FeatureKind::Categorical { categories }, FeatureValue::Level(l)) => {
                if l < categories.len() {
                    Ok(())
                } else {
                    Err(Error::UnknownCategory {
                        feature: self.name.clone(),
                        symbol: format!("#{l}"),
                    })
                }
            }
            (FeatureKind::Numeric { .. }, FeatureValue::Level(_)) => Err(Error::KindMismatch {
                feature: self.name.clone(),
                expected: "numeric",
            }),
            (FeatureKind::Categorical { .. }, FeatureValue::Numeric(_)) => {
                Err(Error::KindMismatch {
                    feature: self.name.clone(),
                    expected: "categorical",
                })
            }
        }
    }

    /// Parses a textual value: a number for numeric features, a declared
    /// symbol for categorical ones.
    pub fn parse_value(&self, text: &str) -> Result<FeatureValue> {
        let text = text.trim();
        let value = match &self.kind {
            FeatureKind::Numeric { .. } => {
                let v: f64 = text.parse().map_err(|_| Error::KindMismatch {
                    feature: self.name.clone(),
                    expected: "numeric",
                })?;
                FeatureValue::Numeric(v)
            }
            FeatureKind::Categorical { categories } => {
                let level = categories.iter().position(|c| c == text).ok_or_else(|| {
                    Error::UnknownCategory {
                        feature: self.name.clone(),
                        symbol: text.to_string(),
                    }
                })?;
                FeatureValue::Level(level)
            }
        };
        self.check(value)?;
        Ok(value)
    }

    /// Text form of a value, inverse of [`parse_value`](Self::parse_value).
    pub fn format_value(&self, value: FeatureValue) -> String {
        match (&self.kind, value) {
            (FeatureKind::Categorical { categories }, FeatureValue::Level(l)) => categories
                .get(l)
                .cloned()
                .unwrap_or_else(|| format!("#{l}")),
            (_, v) => v.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct FeatureSpace {
    features: Vec<FeatureDescriptor>,
}

#[derive(Deserialize)]
struct RawSpace {
    features: Vec<FeatureDescriptor>,
}

impl TryFrom<RawSpace> for FeatureSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        Self::new(raw.features)
    }
}

impl FeatureSpace {
    pub fn new(features: Vec<FeatureDescriptor>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut names = HashSet::new();
        for f in &features {
            if !names.insert(f.name.as_str()) {
                return Err(Error::DuplicateFeature(f.name.clone()));
            }
        }
        Ok(Self { features })
    }

    /// Space of numeric features named `x1..xn`, one per `(min, max)` pair.
    pub fn numeric(ranges: &[(f64, f64)]) -> Result<Self> {
        let features = ranges
            .iter()
            .enumerate()
            .map(|(k, &(lo, hi))| FeatureDescriptor::numeric(format!("x{}", k + 1), lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(features)
    }

    /// Space of `n` binary categorical features named `x1..xn`.
    pub fn binary(n: usize) -> Result<Self> {
        Self::new(
            (1..=n)
                .map(|k| FeatureDescriptor::binary(format!("x{k}")))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[FeatureDescriptor] {
        &self.features
    }

    pub fn feature(&self, index: usize) -> &FeatureDescriptor {
        &self.features[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    /// Returns the instance unchanged iff it conforms to the space.
    pub fn validate_instance(&self, instance: Instance) -> Result<Instance> {
        self.check_instance(&instance)?;
        Ok(instance)
    }

    pub fn check_instance(&self, instance: &Instance) -> Result<()> {
        if instance.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: instance.len(),
            });
        }
        self.features
            .iter()
            .zip(instance.values())
            .try_for_each(|(f, &v)| f.check(v))
    }

    /// Parses one textual value per feature.
    pub fn parse_instance<S: AsRef<str>>(&self, fields: &[S]) -> Result<Instance> {
        if fields.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: fields.len(),
            });
        }
        self.features
            .iter()
            .zip(fields)
            .map(|(f, s)| f.parse_value(s.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(Instance::new)
    }
}

/// One feature value: a numeric scalar or the level index of a category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FeatureValue {
    Numeric(f64),
    Level(usize),
}

impl FeatureValue {
    /// Numeric value, or the level index for categorical values.
    pub fn as_f64(self) -> f64 {
        match self {
            FeatureValue::Numeric(v) => v,
            FeatureValue::Level(l) => l as f64,
        }
    }

    fn key_bits(self) -> u64 {
        match self {
            FeatureValue::Numeric(v) => v.to_bits(),
            FeatureValue::Level(l) => l as u64,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Numeric(v) => write!(f, "{v}"),
            FeatureValue::Level(l) => write!(f, "{l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance(Vec<FeatureValue>);

impl Instance {
    pub fn new(values: Vec<FeatureValue>) -> Self {
        Self(values)
    }

    pub fn numeric(values: &[f64]) -> Self {
        Self(values.iter().copied().map(FeatureValue::Numeric).collect())
    }

    pub fn levels(levels: &[usize]) -> Self {
        Self(levels.iter().copied().map(FeatureValue::Level).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[FeatureValue] {
        &self.0
    }

    pub fn value(&self, index: usize) -> FeatureValue {
        self.0[index]
    }

    /// Value of feature `index` as a float (level index for categoricals).
    pub fn get(&self, index: usize) -> f64 {
        self.0[index].as_f64()
    }

    pub fn set(&mut self, index: usize, value: FeatureValue) {
        self.0[index] = value;
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.0.iter().map(|v| v.as_f64()).collect()
    }

    /// Bit-level identity, usable as a cache key.
    pub(crate) fn key(&self) -> Vec<u64> {
        self.0.iter().map(|v| v.key_bits()).collect()
    }
}

/// How a model may be called from several threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Concurrency {
    /// `evaluate` may run concurrently.
    #[default]
    Parallel,
    /// Calls must be funneled one at a time.
    Serialized,
}

/// A batch-evaluable black-box function with `m >= 1` outputs.
///
/// Implementations must be deterministic and return exactly one output
/// vector of length [`output_count`](Self::output_count) per input row.
pub trait BlackBoxModel: Send + Sync {
    fn output_names(&self) -> Vec<String>;

    fn output_count(&self) -> usize {
        self.output_names().len()
    }

    fn evaluate(&self, batch: &[Instance]) -> Result<Vec<Vec<f64>>>;

    fn concurrency(&self) -> Concurrency {
        Concurrency::Parallel
    }
}

impl<M: BlackBoxModel + ?Sized> BlackBoxModel for &M {
    fn output_names(&self) -> Vec<String> {
        (**self).output_names()
    }
    fn output_count(&self) -> usize {
        (**self).output_count()
    }
    fn evaluate(&self, batch: &[Instance]) -> Result<Vec<Vec<f64>>> {
        (**self).evaluate(batch)
    }
    fn concurrency(&self) -> Concurrency {
        (**self).concurrency()
    }
}

impl<M: BlackBoxModel + ?Sized> BlackBoxModel for Box<M> {
    fn output_names(&self) -> Vec<String> {
        (**self).output_names()
    }
    fn output_count(&self) -> usize {
        (**self).output_count()
    }
    fn evaluate(&self, batch: &[Instance]) -> Result<Vec<Vec<f64>>> {
        (**self).evaluate(batch)
    }
    fn concurrency(&self) -> Concurrency {
        (**self).concurrency()
    }
}

/// Evaluates a batch and checks the shape contract, returning column `j`.
pub fn evaluate_output(
    model: &dyn BlackBoxModel,
    batch: &[Instance],
    output_index: usize,
) -> Result<Vec<f64>> {
    let m = model.output_count();
    if output_index >= m {
        return Err(Error::OutputIndex {
            index: output_index,
            count: m,
        });
    }
    if batch.is_empty() {
        return Ok(Vec::new());
    }
    let outputs = model.evaluate(batch)?;
    if outputs.len() != batch.len() {
        return Err(Error::Model {
            row: None,
            message: format!(
                "model returned {} rows for a batch of {}",
                outputs.len(),
                batch.len()
            ),
        });
    }
    outputs
        .into_iter()
        .enumerate()
        .map(|(row, out)| {
            if out.len() != m {
                return Err(Error::Model {
                    row: Some(row),
                    message: format!("expected {m} outputs, got {}", out.len()),
                });
            }
            let y = out[output_index];
            if y.is_nan() {
                return Err(Error::Model {
                    row: Some(row),
                    message: "output is NaN".into(),
                });
            }
            Ok(y)
        })
        .collect()
}

/// A model backed by a closure evaluated row by row.
pub struct FnModel<F> {
    names: Vec<String>,
    f: F,
}

impl<F> FnModel<F>
where
    F: Fn(&Instance) -> Vec<f64> + Send + Sync,
{
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>, f: F) -> Self {
        Self {
            names: names.into_iter().map(Into::into).collect(),
            f,
        }
    }
}

impl<F> BlackBoxModel for FnModel<F>
where
    F: Fn(&Instance) -> Vec<f64> + Send + Sync,
{
    fn output_names(&self) -> Vec<String> {
        self.names.clone()
    }

    fn evaluate(&self, batch: &[Instance]) -> Result<Vec<Vec<f64>>> {
        Ok(batch.iter().map(&self.f).collect())
    }
}

/// Single-output model from a scalar closure.
pub fn scalar_model<F>(f: F) -> FnModel<impl Fn(&Instance) -> Vec<f64> + Send + Sync>
where
    F: Fn(&Instance) -> f64 + Send + Sync,
{
    FnModel::new(["y"], move |x: &Instance| vec![f(x)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

/// Affine map `u(y) = A*y + b` of one model output onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum UtilityMapping {
    /// `u = y`, for outputs that already are probabilities.
    #[default]
    Identity,
    Affine {
        a: f64,
        b: f64,
    },
}

impl UtilityMapping {
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() || a == 0.0 {
            return Err(Error::InvalidUtility(format!(
                "coefficients must be finite with A != 0 (A={a}, b={b})"
            )));
        }
        Ok(Self::Affine { a, b })
    }

    /// Maps `worst` to 0 and `best` to 1. `worst > best` gives a
    /// descending mapping (lower output is preferred).
    pub fn from_range(worst: f64, best: f64) -> Result<Self> {
        if !worst.is_finite() || !best.is_finite() || worst == best {
            return Err(Error::InvalidUtility(format!(
                "output range [{worst}, {best}] is degenerate"
            )));
        }
        let a = 1.0 / (best - worst);
        Self::affine(a, -worst * a)
    }

    pub fn direction(&self) -> Direction {
        match self {
            UtilityMapping::Identity => Direction::Ascending,
            UtilityMapping::Affine { a, .. } if *a > 0.0 => Direction::Ascending,
            UtilityMapping::Affine { .. } => Direction::Descending,
        }
    }

    /// `A*y + b` without range checks.
    pub fn map(&self, y: f64) -> f64 {
        match *self {
            UtilityMapping::Identity => y,
            UtilityMapping::Affine { a, b } => a * y + b,
        }
    }

    /// Maps `y` to a utility, snapping values within
    /// [`UTILITY_CLAMP_TOLERANCE`] of a bound onto it.
    pub fn apply(&self, y: f64) -> Result<f64> {
        let u = self.map(y);
        if (0.0..=1.0).contains(&u) {
            Ok(u)
        } else if (-UTILITY_CLAMP_TOLERANCE..0.0).contains(&u) {
            Ok(0.0)
        } else if u > 1.0 && u <= 1.0 + UTILITY_CLAMP_TOLERANCE {
            Ok(1.0)
        } else {
            Err(Error::UtilityOutOfRange { y, utility: u })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> FeatureSpace {
        FeatureSpace::numeric(&[(0.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn validate_accepts_table_instance() {
        let inst = Instance::numeric(&[0.7, 0.8]);
        assert_eq!(unit_square().validate_instance(inst.clone()).unwrap(), inst);
    }

    #[test]
    fn validate_accepts_boundary() {
        let space = FeatureSpace::numeric(&[(0.0, 1.0)]).unwrap();
        assert!(space.validate_instance(Instance::numeric(&[0.0])).is_ok());
        assert!(space.validate_instance(Instance::numeric(&[1.0])).is_ok());
    }

    #[test]
    fn validate_rejects_out_of_range() {
        let space = FeatureSpace::numeric(&[(0.0, 1.0)]).unwrap();
        match space.validate_instance(Instance::numeric(&[1.5])) {
            Err(Error::OutOfRange { feature, .. }) => assert_eq!(feature, "x1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_dimension_and_category() {
        let space = unit_square();
        assert!(matches!(
            space.validate_instance(Instance::numeric(&[0.1])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        ));
        let cat = FeatureSpace::new(vec![FeatureDescriptor::categorical(
            "colour",
            ["red", "green"],
        )
        .unwrap()])
        .unwrap();
        match cat.parse_instance(&["blue"]) {
            Err(Error::UnknownCategory { feature, symbol }) => {
                assert_eq!(feature, "colour");
                assert_eq!(symbol, "blue");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(cat.validate_instance(Instance::levels(&[2])).is_err());
        assert_eq!(
            cat.parse_instance(&["green"]).unwrap(),
            Instance::levels(&[1])
        );
    }

    #[test]
    fn descriptor_invariants() {
        assert!(FeatureDescriptor::numeric("a", 1.0, 1.0).is_err());
        assert!(FeatureDescriptor::numeric("a", 0.0, f64::INFINITY).is_err());
        assert!(FeatureDescriptor::categorical("c", ["x"]).is_err());
        assert!(FeatureDescriptor::categorical("c", ["x", "x"]).is_err());
        let dup = vec![
            FeatureDescriptor::binary("a"),
            FeatureDescriptor::binary("a"),
        ];
        assert!(matches!(
            FeatureSpace::new(dup),
            Err(Error::DuplicateFeature(_))
        ));
        assert!(matches!(FeatureSpace::new(vec![]), Err(Error::EmptySpace)));
    }

    #[test]
    fn space_json_is_validated() {
        let ok: FeatureSpace = serde_json::from_str(
            r#"{"features":[{"name":"x1","kind":"numeric","min":0,"max":1},
                {"name":"c","kind":"categorical","categories":["a","b"]}]}"#,
        )
        .unwrap();
        assert_eq!(ok.len(), 2);
        let bad = serde_json::from_str::<FeatureSpace>(
            r#"{"features":[{"name":"x1","kind":"numeric","min":1,"max":0}]}"#,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn boston_mapping_endpoints() {
        let asc = UtilityMapping::affine(1.0 / 45.0, -1.0 / 9.0).unwrap();
        assert!(asc.apply(5.0).unwrap().abs() < 1e-12);
        assert!((asc.apply(50.0).unwrap() - 1.0).abs() < 1e-12);
        let desc = UtilityMapping::affine(-1.0 / 45.0, 50.0 / 45.0).unwrap();
        assert!(desc.apply(50.0).unwrap().abs() < 1e-12);
        assert!((desc.apply(5.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(UtilityMapping::Identity.apply(0.77).unwrap(), 0.77);
    }

    #[test]
    fn utility_direction_reads_sign() {
        assert_eq!(UtilityMapping::Identity.direction(), Direction::Ascending);
        let pos = UtilityMapping::affine(1.0 / 45.0, 0.0).unwrap();
        let neg = UtilityMapping::affine(-1.0 / 45.0, 1.0).unwrap();
        assert_eq!(pos.direction(), Direction::Ascending);
        assert_eq!(neg.direction(), Direction::Descending);
    }

    #[test]
    fn utility_snaps_float_noise_but_rejects_real_violations() {
        let id = UtilityMapping::Identity;
        assert_eq!(id.apply(1.0 + 1e-12).unwrap(), 1.0);
        assert_eq!(id.apply(-1e-12).unwrap(), 0.0);
        assert!(matches!(
            id.apply(1.01),
            Err(Error::UtilityOutOfRange { .. })
        ));
        assert!(UtilityMapping::affine(0.0, 1.0).is_err());
    }

    #[test]
    fn evaluate_output_checks_shape() {
        let bad = FnModel::new(["a", "b"], |_: &Instance| vec![1.0]);
        let err = evaluate_output(&bad, &[Instance::numeric(&[0.0])], 0).unwrap_err();
        assert!(matches!(err, Error::Model { row: Some(0), .. }));
        let good = scalar_model(|x| x.get(0));
        assert!(matches!(
            evaluate_output(&good, &[Instance::numeric(&[0.0])], 1),
            Err(Error::OutputIndex { .. })
        ));
    }
}

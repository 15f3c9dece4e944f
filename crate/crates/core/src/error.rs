use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("feature space must declare at least one feature")]
    EmptySpace,

    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),

    #[error("invalid feature `{feature}`: {reason}")]
    InvalidFeature { feature: String, reason: String },

    #[error("instance has {found} values but the feature space declares {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature `{feature}` value {value} lies outside [{min}, {max}]")]
    OutOfRange {
        feature: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("feature `{feature}` has no category `{symbol}`")]
    UnknownCategory { feature: String, symbol: String },

    #[error("feature `{feature}` expects a {expected} value")]
    KindMismatch {
        feature: String,
        expected: &'static str,
    },

    #[error("invalid utility mapping: {0}")]
    InvalidUtility(String),

    #[error(
        "output {y} maps to utility {utility}, outside [0, 1]; the declared output range is wrong"
    )]
    UtilityOutOfRange { y: f64, utility: f64 },

    #[error("the studied feature set is empty")]
    EmptyStudiedSet,

    #[error("feature index {index} is out of bounds for {n} features (indices are 1-based)")]
    FeatureIndex { index: usize, n: usize },

    #[error(
        "N = {n} is below the minimum {minimum} (2 rows per studied numeric feature plus one)"
    )]
    TooFewSamples { n: usize, minimum: usize },

    #[error(
        "{count} categorical combinations exceed the cap of {cap}; shrink the studied feature set"
    )]
    TooManyCombinations { count: u128, cap: usize },

    #[error("studied set {studied:?} is not a subset of target set {target:?}")]
    NotSubset {
        studied: Vec<usize>,
        target: Vec<usize>,
    },

    #[error("output index {index} is out of bounds for a model with {count} outputs")]
    OutputIndex { index: usize, count: usize },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("model evaluation failed{}: {message}", row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    Model { row: Option<usize>, message: String },

    #[error("background data is empty")]
    EmptyBackground,

    #[error("exact Shapley enumeration supports at most {max} features, got {n}")]
    TooManyFeatures { n: usize, max: usize },

    #[error("singular design matrix; collinear features: {}", features.join(", "))]
    Singular { features: Vec<String> },

    #[error("{0}")]
    Data(String),

    #[error("bridge protocol violation: {message}; raw payload: {payload:?}")]
    Bridge { message: String, payload: String },

    #[error("nothing to render: the record set is empty")]
    EmptyRecords,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

//! Additive feature attribution baselines: Shapley values and a local
//! linear surrogate. Both explain `f(x)` as `phi0 + sum(phi_i)`.

mod background;
mod shapley;
mod surrogate;

use serde::{Deserialize, Serialize};

pub use background::{generate_grid, BackgroundData, Provenance};
pub use shapley::{shapley_values, ShapleyMode, MAX_EXACT_FEATURES};
pub use surrogate::{local_surrogate, SurrogateConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributionMethod {
    Shapley,
    Surrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Coalitions (exact), permutations (Monte-Carlo) or perturbed points (surrogate).
    pub samples: usize,
    pub seed: Option<u64>,
    pub background_rows: usize,
    /// Total rows sent to the model.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionResult {
    /// One attribution per feature, in feature order.
    pub phi: Vec<f64>,
    /// Reference level.
    pub phi0: f64,
    /// Model output at the explained instance.
    pub prediction: f64,
    pub method: AttributionMethod,
    /// Weighted R² of the surrogate fit; absent for Shapley values.
    pub fit_quality: Option<f64>,
    pub output_index: usize,
    pub diagnostics: Diagnostics,
}

impl AttributionResult {
    /// `phi0 + sum(phi)`.
    pub fn reconstructed(&self) -> f64 {
        self.phi0 + self.phi.iter().sum::<f64>()
    }
}

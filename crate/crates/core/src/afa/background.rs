use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeatureKind, FeatureSpace, FeatureValue, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    GeneratedGrid,
    Loaded,
}

/// Rows standing in for the data distribution of attribution methods.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundData {
    rows: Vec<Instance>,
    provenance: Provenance,
}

impl BackgroundData {
    /// Wraps loaded rows, checking each against the space.
    pub fn loaded(space: &FeatureSpace, rows: Vec<Instance>) -> Result<Self> {
        for row in &rows {
            space.check_instance(row)?;
        }
        Ok(Self {
            rows,
            provenance: Provenance::Loaded,
        })
    }

    pub fn rows(&self) -> &[Instance] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Regular cartesian grid over the space. `steps` holds one step per
/// feature, or a single step used for every numeric feature. Each numeric
/// axis runs `min, min+step, ...` up to `max` (inclusive when the step
/// divides the range). Categorical axes enumerate all levels.
pub fn generate_grid(space: &FeatureSpace, steps: &[f64]) -> Result<BackgroundData> {
    if steps.len() != 1 && steps.len() != space.len() {
        return Err(Error::Config(format!(
            "expected 1 or {} grid steps, got {}",
            space.len(),
            steps.len()
        )));
    }
    let axes = space
        .features()
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let step = if steps.len() == 1 { steps[0] } else { steps[k] };
            match &f.kind {
                FeatureKind::Numeric { min, max } => {
                    if !(step.is_finite() && step > 0.0) {
                        return Err(Error::InvalidFeature {
                            feature: f.name.clone(),
                            reason: format!("grid step must be positive, got {step}"),
                        });
                    }
                    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
                    Ok((0..count)
                        .map(|i| FeatureValue::Numeric((min + i as f64 * step).min(*max)))
                        .collect::<Vec<_>>())
                }
                FeatureKind::Categorical { categories } => {
                    Ok((0..categories.len()).map(FeatureValue::Level).collect())
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let total: usize = axes.iter().map(Vec::len).product();
    let mut rows = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut values = vec![FeatureValue::Level(0); axes.len()];
        for (k, axis) in axes.iter().enumerate().rev() {
            values[k] = axis[code % axis.len()];
            code /= axis.len();
        }
        rows.push(Instance::new(values));
    }
    Ok(BackgroundData {
        rows,
        provenance: Provenance::GeneratedGrid,
    })
}

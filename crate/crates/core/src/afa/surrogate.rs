//! Local linear surrogate fitted by weighted least squares.
//!
//! Numeric features are perturbed with gaussian noise of standard
//! deviation `scale_fraction * (max - min)` around `x` and clamped to the
//! declared range; categorical features are redrawn uniformly. The design
//! uses standardized offsets `(v - x_k) / sigma_k` for numeric features
//! and a "same level as x" indicator for categorical ones, so each
//! coefficient is already the effect of a one-sigma (or level) change.
//! Points are weighted with `exp(-d^2 / width^2)`, `d` the standardized
//! distance to `x`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::afa::{AttributionMethod, AttributionResult, Diagnostics};
use crate::error::{Error, Result};
use crate::model::{
    evaluate_output, BlackBoxModel, FeatureKind, FeatureSpace, FeatureValue, Instance,
};
use crate::sampling::rng_for;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateConfig {
    pub samples: usize,
    pub seed: u64,
    /// Perturbation standard deviation as a fraction of each numeric range.
    pub scale_fraction: f64,
    /// Kernel width in standardized units; `None` uses `0.75 * sqrt(n)`.
    pub kernel_width: Option<f64>,
}

impl SurrogateConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            scale_fraction: 0.1,
            kernel_width: None,
        }
    }
}

pub fn local_surrogate(
    model: &dyn BlackBoxModel,
    space: &FeatureSpace,
    x: &Instance,
    config: &SurrogateConfig,
    output_index: usize,
) -> Result<AttributionResult> {
    space.check_instance(x)?;
    let n = space.len();
    if config.samples < n + 2 {
        return Err(Error::Config(format!(
            "surrogate needs at least {} samples, got {}",
            n + 2,
            config.samples
        )));
    }
    if !(config.scale_fraction.is_finite() && config.scale_fraction > 0.0) {
        return Err(Error::Config("scale fraction must be positive".into()));
    }
    let width = config.kernel_width.unwrap_or(0.75 * (n as f64).sqrt());
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::Config("kernel width must be positive".into()));
    }

    let mut rng = rng_for(config.seed);
    let mut points = Vec::with_capacity(config.samples);
    let mut design = DMatrix::<f64>::zeros(config.samples, n + 1);
    let mut distances = Vec::with_capacity(config.samples);
    for s in 0..config.samples {
        let mut row = x.clone();
        design[(s, 0)] = 1.0;
        let mut d2 = 0.0;
        // the first point is x itself
        if s > 0 {
            for (k, f) in space.features().iter().enumerate() {
                match &f.kind {
                    FeatureKind::Numeric { min, max } => {
                        let sigma = config.scale_fraction * (max - min);
                        let z: f64 = rng.sample(StandardNormal);
                        let v = (x.get(k) + sigma * z).clamp(*min, *max);
                        row.set(k, FeatureValue::Numeric(v));
                    }
                    FeatureKind::Categorical { categories } => {
                        row.set(k, FeatureValue::Level(rng.gen_range(0..categories.len())));
                    }
                }
            }
        }
        for (k, f) in space.features().iter().enumerate() {
            let z = match &f.kind {
                FeatureKind::Numeric { min, max } => {
                    (row.get(k) - x.get(k)) / (config.scale_fraction * (max - min))
                }
                FeatureKind::Categorical { .. } => {
                    if row.value(k) == x.value(k) {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            design[(s, k + 1)] = z;
            d2 += if f.is_numeric() { z * z } else { 1.0 - z };
        }
        distances.push(d2);
        points.push(row);
    }

    let ys = evaluate_output(model, &points, output_index)?;
    let prediction = ys[0];
    let weights: Vec<f64> = distances
        .iter()
        .map(|d2| (-d2 / (width * width)).exp())
        .collect();

    let mut wx = design.clone();
    let mut wy = DVector::<f64>::zeros(config.samples);
    for s in 0..config.samples {
        let sw = weights[s].sqrt();
        wx.row_mut(s).scale_mut(sw);
        wy[s] = sw * ys[s];
    }

    let qr = wx.clone().qr();
    let r = qr.r();
    let norms: Vec<f64> = (0..=n).map(|c| wx.column(c).norm()).collect();
    let collinear: Vec<String> = (1..=n)
        .filter(|&c| r[(c, c)].abs() <= 1e-10 * norms[c].max(1.0))
        .map(|c| space.feature(c - 1).name.clone())
        .collect();
    if !collinear.is_empty() {
        return Err(Error::Singular {
            features: collinear,
        });
    }
    let qty = qr.q().transpose() * &wy;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Singular {
            features: space.names(),
        })?;

    let fitted = &design * &beta;
    let total_w: f64 = weights.iter().sum();
    let mean = weights.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / total_w;
    let ss_tot: f64 = weights
        .iter()
        .zip(&ys)
        .map(|(w, y)| w * (y - mean).powi(2))
        .sum();
    let ss_res: f64 = (0..config.samples)
        .map(|s| weights[s] * (ys[s] - fitted[s]).powi(2))
        .sum();
    let fit_quality = if ss_tot <= 1e-24 * total_w.max(1.0) {
        0.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };

    Ok(AttributionResult {
        phi: beta.iter().skip(1).copied().collect(),
        phi0: beta[0],
        prediction,
        method: AttributionMethod::Surrogate,
        fit_quality: Some(fit_quality),
        output_index,
        diagnostics: Diagnostics {
            samples: config.samples,
            seed: Some(config.seed),
            background_rows: 0,
            evaluations: config.samples,
        },
    })
}

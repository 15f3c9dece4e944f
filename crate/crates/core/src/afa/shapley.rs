//! Interventional Shapley values.
//!
//! The coalition game is `v(S) = mean_b f(x_S, b_{not S})` over the
//! background rows `b`, so `v(empty)` is the mean prediction (the
//! reference level) and `v(all) = f(x)`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::afa::{AttributionMethod, AttributionResult, BackgroundData, Diagnostics};
use crate::error::{Error, Result};
use crate::model::{evaluate_output, BlackBoxModel, FeatureSpace, Instance};
use crate::sampling::rng_for;

/// Largest feature count for exhaustive coalition enumeration.
pub const MAX_EXACT_FEATURES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapleyMode {
    /// Enumerates all `2^n` coalitions.
    Exact,
    /// Averages marginal contributions along random permutations, each
    /// paired with a random background row.
    MonteCarlo { samples: usize, seed: u64 },
}

impl ShapleyMode {
    /// Exact up to [`MAX_EXACT_FEATURES`], Monte-Carlo beyond.
    pub fn auto(n: usize, samples: usize, seed: u64) -> Self {
        if n <= MAX_EXACT_FEATURES {
            ShapleyMode::Exact
        } else {
            ShapleyMode::MonteCarlo { samples, seed }
        }
    }
}

fn splice(x: &Instance, background: &Instance, mask: u64) -> Instance {
    let mut row = background.clone();
    for k in 0..x.len() {
        if mask >> k & 1 == 1 {
            row.set(k, x.value(k));
        }
    }
    row
}

pub fn shapley_values(
    model: &dyn BlackBoxModel,
    space: &FeatureSpace,
    x: &Instance,
    background: &BackgroundData,
    output_index: usize,
    mode: ShapleyMode,
) -> Result<AttributionResult> {
    if background.is_empty() {
        return Err(Error::EmptyBackground);
    }
    space.check_instance(x)?;
    let n = space.len();
    let prediction = evaluate_output(model, std::slice::from_ref(x), output_index)?[0];
    let base = evaluate_output(model, background.rows(), output_index)?;
    let phi0 = base.iter().sum::<f64>() / base.len() as f64;

    let (phi, samples, seed, evaluations) = match mode {
        ShapleyMode::Exact => {
            if n > MAX_EXACT_FEATURES {
                return Err(Error::TooManyFeatures {
                    n,
                    max: MAX_EXACT_FEATURES,
                });
            }
            let coalitions = 1usize << n;
            let mut value = vec![0.0; coalitions];
            value[0] = phi0;
            value[coalitions - 1] = prediction;
            let mut evaluations = 1 + background.len();
            for (mask, v) in value.iter_mut().enumerate().take(coalitions - 1).skip(1) {
                let rows: Vec<Instance> = background
                    .rows()
                    .iter()
                    .map(|b| splice(x, b, mask as u64))
                    .collect();
                let ys = evaluate_output(model, &rows, output_index)?;
                evaluations += rows.len();
                *v = ys.iter().sum::<f64>() / ys.len() as f64;
            }
            // weight(|S|) = |S|! (n-|S|-1)! / n!
            let mut weight = vec![0.0; n];
            for (s, w) in weight.iter_mut().enumerate() {
                *w = (0..s).fold(1.0, |acc, k| acc * (k + 1) as f64)
                    * (0..n - s - 1).fold(1.0, |acc, k| acc * (k + 1) as f64)
                    / (0..n).fold(1.0, |acc, k| acc * (k + 1) as f64);
            }
            let phi: Vec<f64> = (0..n)
                .map(|i| {
                    let bit = 1usize << i;
                    (0..coalitions)
                        .filter(|mask| mask & bit == 0)
                        .map(|mask| {
                            weight[mask.count_ones() as usize] * (value[mask | bit] - value[mask])
                        })
                        .sum()
                })
                .collect();
            (phi, coalitions, None, evaluations)
        }
        ShapleyMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::Config(
                    "Monte-Carlo Shapley needs samples > 0".into(),
                ));
            }
            let mut rng = rng_for(seed);
            let mut orders = Vec::with_capacity(samples);
            let mut rows = Vec::with_capacity(samples * (n + 1));
            for _ in 0..samples {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                let b = &background.rows()[rng.gen_range(0..background.len())];
                let mut mask = 0u64;
                rows.push(b.clone());
                for &k in &order {
                    mask |= 1 << k;
                    rows.push(splice(x, b, mask));
                }
                orders.push(order);
            }
            let ys = evaluate_output(model, &rows, output_index)?;
            let mut phi = vec![0.0; n];
            for (s, order) in orders.iter().enumerate() {
                let chain = &ys[s * (n + 1)..(s + 1) * (n + 1)];
                for (step, &k) in order.iter().enumerate() {
                    phi[k] += chain[step + 1] - chain[step];
                }
            }
            phi.iter_mut().for_each(|p| *p /= samples as f64);
            (phi, samples, Some(seed), 1 + background.len() + rows.len())
        }
    };

    Ok(AttributionResult {
        phi,
        phi0,
        prediction,
        method: AttributionMethod::Shapley,
        fit_quality: None,
        output_index,
        diagnostics: Diagnostics {
            samples,
            seed,
            background_rows: background.len(),
            evaluations,
        },
    })
}

//! Exhaustive grid extrema of a reference function. Shares nothing with
//! the sampling path, so it can check it.

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::testbed::ReferenceFunction;

pub const MIN_ORACLE_RESOLUTION: usize = 1000;

/// `(ymin, ymax)` of `function` when the studied features sweep a regular
/// grid of `resolution` points each (boolean features sweep `{0, 1}`)
/// and the others stay at `context`.
pub fn oracle_range(
    function: ReferenceFunction,
    context: &[f64],
    studied: &FeatureSet,
    resolution: usize,
) -> Result<(f64, f64)> {
    let space = function.space();
    studied.check_bounds(space.len())?;
    if studied.is_empty() {
        return Err(Error::EmptyStudiedSet);
    }
    let axes: Vec<(usize, Vec<f64>)> = studied
        .iter()
        .map(|k| {
            let values = match space.feature(k).range() {
                Some((lo, hi)) => {
                    if resolution < MIN_ORACLE_RESOLUTION {
                        return Err(Error::Config(format!(
                            "oracle resolution {resolution} is below {MIN_ORACLE_RESOLUTION}"
                        )));
                    }
                    (0..resolution)
                        .map(|s| {
                            if s + 1 == resolution {
                                hi
                            } else {
                                lo + (hi - lo) * s as f64 / (resolution - 1) as f64
                            }
                        })
                        .collect()
                }
                None => (0..space.feature(k).level_count().unwrap_or(0))
                    .map(|l| l as f64)
                    .collect(),
            };
            Ok((k, values))
        })
        .collect::<Result<_>>()?;

    let mut point = context.to_vec();
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    let mut counters = vec![0usize; axes.len()];
    loop {
        for ((k, values), &c) in axes.iter().zip(&counters) {
            point[*k] = values[c];
        }
        let y = function.eval(&point);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
        // odometer increment
        let mut d = 0;
        loop {
            if d == axes.len() {
                return Ok((ymin, ymax));
            }
            counters[d] += 1;
            if counters[d] < axes[d].1.len() {
                break;
            }
            counters[d] = 0;
            d += 1;
        }
    }
}

/// Oracle CI and CU (ascending utility) of `studied` relative to `target`.
pub fn oracle_ci(
    function: ReferenceFunction,
    context: &[f64],
    studied: &FeatureSet,
    target: &FeatureSet,
    resolution: usize,
) -> Result<(Option<f64>, Option<f64>)> {
    let (lo_i, hi_i) = oracle_range(function, context, studied, resolution)?;
    let (lo_t, hi_t) = oracle_range(function, context, target, resolution)?;
    let y = function.eval(context);
    let ci = (hi_t > lo_t).then(|| (hi_i - lo_i) / (hi_t - lo_t));
    let cu = (hi_i > lo_i).then(|| (y - lo_i) / (hi_i - lo_i));
    Ok((ci, cu))
}

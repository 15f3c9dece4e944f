//! Representative input vectors for estimating output ranges under
//! ceteris paribus.
//!
//! A sample set for context `C` and studied features `{i}` always starts
//! with `C` itself, followed by `N` rows in which only the studied
//! features vary:
//!
//! * categorical studied features contribute every combination of their
//!   levels, in seeded random order (`N` is raised to the number of
//!   combinations when that is larger);
//! * numeric studied features get one row at `min` and one at `max` each,
//!   then, when two to [`MAX_CORNER_FEATURES`] of them are studied, every
//!   corner of the studied box (`N` is raised to fit them, as for the
//!   combinations), and the remaining rows are uniform draws from
//!   `[min, max]`.
//!
//! Categorical combinations are cycled row-wise against the numeric rows.
//! With no numeric studied feature the set is `C` followed by the
//! combinations alone, which makes categorical ranges exact.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::model::{evaluate_output, BlackBoxModel, FeatureSpace, FeatureValue, Instance};

/// Default cap on enumerated categorical combinations.
pub const DEFAULT_COMBINATION_CAP: usize = 10_000;

/// Corner rows are only added for up to this many numeric studied features.
pub const MAX_CORNER_FEATURES: usize = 10;

pub(crate) fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    rows: Vec<Instance>,
    studied: FeatureSet,
    seed: u64,
}

impl SampleSet {
    /// All rows, the context first.
    pub fn rows(&self) -> &[Instance] {
        &self.rows
    }

    pub fn context(&self) -> &Instance {
        &self.rows[0]
    }

    pub fn studied(&self) -> &FeatureSet {
        &self.studied
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of generated rows, excluding the context row.
    pub fn n(&self) -> usize {
        self.rows.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    pub combination_cap: usize,
}

impl Default for Sampler {
    fn default() -> Self {
        Self {
            combination_cap: DEFAULT_COMBINATION_CAP,
        }
    }
}

/// Smallest admissible `N` for a studied set.
pub fn minimum_samples(space: &FeatureSpace, studied: &FeatureSet) -> usize {
    2 * studied
        .iter()
        .filter(|&i| space.feature(i).is_numeric())
        .count()
        + 1
}

/// [`Sampler::generate`] with the default combination cap.
pub fn generate_samples(
    space: &FeatureSpace,
    context: &Instance,
    studied: &FeatureSet,
    n: usize,
    seed: u64,
) -> Result<SampleSet> {
    Sampler::default().generate(space, context, studied, n, seed)
}

impl Sampler {
    pub fn generate(
        &self,
        space: &FeatureSpace,
        context: &Instance,
        studied: &FeatureSet,
        n: usize,
        seed: u64,
    ) -> Result<SampleSet> {
        if studied.is_empty() {
            return Err(Error::EmptyStudiedSet);
        }
        studied.check_bounds(space.len())?;
        space.check_instance(context)?;
        let minimum = minimum_samples(space, studied);
        if n < minimum {
            return Err(Error::TooFewSamples { n, minimum });
        }

        let (numeric, categorical): (Vec<usize>, Vec<usize>) =
            studied.iter().partition(|&i| space.feature(i).is_numeric());

        let mut rng = rng_for(seed);
        let combos = self.combinations(space, &categorical)?;
        let combos = {
            let mut c = combos;
            c.shuffle(&mut rng);
            c
        };

        let mut rows = Vec::new();
        rows.push(context.clone());

        if numeric.is_empty() {
            for combo in &combos {
                let mut row = context.clone();
                for (&feature, &level) in categorical.iter().zip(combo) {
                    row.set(feature, FeatureValue::Level(level));
                }
                rows.push(row);
            }
        } else {
            let ranges: Vec<(f64, f64)> = numeric
                .iter()
                .map(|&i| space.feature(i).range().expect("numeric feature"))
                .collect();
            let k = numeric.len();
            let corners = if (2..=MAX_CORNER_FEATURES).contains(&k) {
                1usize << k
            } else {
                0
            };
            let total = n.max(combos.len()).max(2 * k + corners);
            for r in 0..total {
                let mut row = context.clone();
                if r < 2 * k {
                    let t = r / 2;
                    let (lo, hi) = ranges[t];
                    let v = if r % 2 == 0 { lo } else { hi };
                    row.set(numeric[t], FeatureValue::Numeric(v));
                } else if r < 2 * k + corners {
                    let mask = r - 2 * k;
                    for (t, (&feature, &(lo, hi))) in numeric.iter().zip(&ranges).enumerate() {
                        let v = if mask >> t & 1 == 0 { lo } else { hi };
                        row.set(feature, FeatureValue::Numeric(v));
                    }
                } else {
                    for (&feature, &(lo, hi)) in numeric.iter().zip(&ranges) {
                        row.set(feature, FeatureValue::Numeric(rng.gen_range(lo..=hi)));
                    }
                }
                if !combos.is_empty() {
                    let combo = &combos[r % combos.len()];
                    for (&feature, &level) in categorical.iter().zip(combo) {
                        row.set(feature, FeatureValue::Level(level));
                    }
                }
                rows.push(row);
            }
        }

        Ok(SampleSet {
            rows,
            studied: studied.clone(),
            seed,
        })
    }

    /// Every level combination of the given categorical features, in
    /// mixed-radix order.
    fn combinations(&self, space: &FeatureSpace, features: &[usize]) -> Result<Vec<Vec<usize>>> {
        if features.is_empty() {
            return Ok(Vec::new());
        }
        let radices: Vec<usize> = features
            .iter()
            .map(|&i| space.feature(i).level_count().expect("categorical feature"))
            .collect();
        let count = radices
            .iter()
            .try_fold(1u128, |acc, &r| acc.checked_mul(r as u128))
            .unwrap_or(u128::MAX);
        if count > self.combination_cap as u128 {
            return Err(Error::TooManyCombinations {
                count,
                cap: self.combination_cap,
            });
        }
        let count = count as usize;
        let mut out = Vec::with_capacity(count);
        for mut code in 0..count {
            let mut combo = Vec::with_capacity(radices.len());
            for &r in &radices {
                combo.push(code % r);
                code /= r;
            }
            out.push(combo);
        }
        Ok(out)
    }
}

/// Raw output extremes over a sample set, plus the context's output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputRange {
    pub ymin: f64,
    pub ymax: f64,
    pub y_context: f64,
}

impl OutputRange {
    pub fn width(&self) -> f64 {
        self.ymax - self.ymin
    }

    /// Smallest range covering both.
    pub fn union(&self, other: &OutputRange) -> OutputRange {
        OutputRange {
            ymin: self.ymin.min(other.ymin),
            ymax: self.ymax.max(other.ymax),
            y_context: self.y_context,
        }
    }
}

/// Evaluates the model on the whole sample set in one batch and returns
/// the extremes of output `output_index`.
pub fn evaluate_range(
    model: &dyn BlackBoxModel,
    samples: &SampleSet,
    output_index: usize,
) -> Result<OutputRange> {
    let ys = evaluate_output(model, samples.rows(), output_index)?;
    let y_context = ys[0];
    let (ymin, ymax) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    Ok(OutputRange {
        ymin,
        ymax,
        y_context,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{scalar_model, FeatureDescriptor};

    fn unit_square() -> FeatureSpace {
        FeatureSpace::numeric(&[(0.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn numeric_single_feature_layout() {
        let c = Instance::numeric(&[0.7, 0.8]);
        let s = generate_samples(&unit_square(), &c, &FeatureSet::single(0), 100, 42).unwrap();
        assert_eq!(s.rows().len(), 101);
        assert_eq!(s.n(), 100);
        assert_eq!(s.rows()[0], c);
        assert_eq!(s.rows()[1], Instance::numeric(&[0.0, 0.8]));
        assert_eq!(s.rows()[2], Instance::numeric(&[1.0, 0.8]));
        for row in &s.rows()[3..] {
            assert_eq!(row.get(1), 0.8);
            assert!((0.0..=1.0).contains(&row.get(0)));
        }
    }

    #[test]
    fn two_numeric_features_include_corners() {
        let c = Instance::numeric(&[0.7, 0.8]);
        let s = generate_samples(&unit_square(), &c, &FeatureSet::all(2), 100, 1).unwrap();
        for corner in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
            assert!(s.rows().contains(&Instance::numeric(&corner)));
        }
        assert!(s.rows().contains(&Instance::numeric(&[0.0, 0.8])));
        assert!(s.rows().contains(&Instance::numeric(&[0.7, 1.0])));
    }

    #[test]
    fn corners_raise_small_n() {
        let c = Instance::numeric(&[0.7, 0.8]);
        let s = generate_samples(&unit_square(), &c, &FeatureSet::all(2), 5, 1).unwrap();
        assert_eq!(s.n(), 8);
        assert!(s.rows().contains(&Instance::numeric(&[1.0, 1.0])));

        let wide = FeatureSpace::numeric(&[(0.0, 1.0); 11]).unwrap();
        let c = Instance::numeric(&[0.5; 11]);
        let s = generate_samples(&wide, &c, &FeatureSet::all(11), 30, 1).unwrap();
        assert_eq!(s.n(), 30, "no corners beyond MAX_CORNER_FEATURES");
    }

    #[test]
    fn categorical_single_feature_is_exhaustive() {
        let space = FeatureSpace::binary(2).unwrap();
        let c = Instance::levels(&[1, 1]);
        let s = generate_samples(&space, &c, &FeatureSet::single(0), 100, 3).unwrap();
        assert_eq!(s.rows().len(), 3);
        assert_eq!(s.rows()[0], c);
        let mut rest: Vec<_> = s.rows()[1..].iter().map(|r| r.to_f64_vec()).collect();
        rest.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(rest, vec![vec![0.0, 1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn categorical_pair_enumerates_all_combinations() {
        let space = FeatureSpace::binary(2).unwrap();
        let c = Instance::levels(&[0, 0]);
        let s = generate_samples(&space, &c, &FeatureSet::all(2), 1, 3).unwrap();
        assert_eq!(s.n(), 4);
        for combo in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            assert!(s.rows()[1..].contains(&Instance::levels(&combo)));
        }
    }

    #[test]
    fn mixed_sets_cycle_combinations() {
        let space = FeatureSpace::new(vec![
            FeatureDescriptor::numeric("a", 0.0, 1.0).unwrap(),
            FeatureDescriptor::categorical("b", ["p", "q", "r"]).unwrap(),
        ])
        .unwrap();
        let c = Instance::new(vec![FeatureValue::Numeric(0.5), FeatureValue::Level(0)]);
        let s = generate_samples(&space, &c, &FeatureSet::all(2), 10, 9).unwrap();
        assert_eq!(s.n(), 10);
        for level in 0..3 {
            assert!(s.rows()[1..]
                .iter()
                .any(|r| r.value(1) == FeatureValue::Level(level)));
        }
        assert!(s.rows().iter().any(|r| r.get(0) == 0.0));
        assert!(s.rows().iter().any(|r| r.get(0) == 1.0));
    }

    #[test]
    fn errors() {
        let space = unit_square();
        let c = Instance::numeric(&[0.5, 0.5]);
        assert!(matches!(
            generate_samples(&space, &c, &FeatureSet::new([]), 10, 0),
            Err(Error::EmptyStudiedSet)
        ));
        assert!(matches!(
            generate_samples(&space, &c, &FeatureSet::all(2), 4, 0),
            Err(Error::TooFewSamples { n: 4, minimum: 5 })
        ));
        assert!(matches!(
            generate_samples(&space, &c, &FeatureSet::single(5), 10, 0),
            Err(Error::FeatureIndex { .. })
        ));
        let big = FeatureSpace::binary(14).unwrap();
        let sampler = Sampler::default();
        assert!(matches!(
            sampler.generate(
                &big,
                &Instance::levels(&[0; 14]),
                &FeatureSet::all(14),
                10,
                0
            ),
            Err(Error::TooManyCombinations { count: 16384, .. })
        ));
    }

    #[test]
    fn range_of_linear_slice() {
        let model = scalar_model(|x| 0.3 * x.get(0) + 0.7 * x.get(1));
        let c = Instance::numeric(&[0.7, 0.8]);
        let s = generate_samples(&unit_square(), &c, &FeatureSet::single(0), 100, 42).unwrap();
        let r = evaluate_range(&model, &s, 0).unwrap();
        // brute force over a dense x1 grid
        let ys: Vec<f64> = (0..=10_000)
            .map(|k| 0.3 * (k as f64 / 10_000.0) + 0.7 * 0.8)
            .collect();
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((r.ymin - lo).abs() < 1e-12 && (lo - 0.56).abs() < 1e-12);
        assert!((r.ymax - hi).abs() < 1e-12 && (hi - 0.86).abs() < 1e-12);
        assert!((r.y_context - 0.77).abs() < 1e-12);
    }
}

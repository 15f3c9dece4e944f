//! Contextual importance, contextual utility and contextual influence.
//!
//! For a context `C`, studied features `{i}` and a target set `{I}` with
//! `{i} ⊆ {I}`:
//!
//! ```text
//! CI  = (ymax_i - ymin_i) / (ymax_I - ymin_I)
//! CU  = |(y_C - yumin_i) / (ymax_i - ymin_i)|,  yumin = ymin if A > 0 else ymax
//! phi = (rmax - rmin) * CI * (CU - neutral_cu)
//! ```
//!
//! Ranges are estimated on raw outputs from [`SampleSet`]s; with an affine
//! utility the ratios are the same as on utilities. The `{I}` range is
//! widened to cover the `{i}` range, so `CI <= 1` holds at any `N`.
//!
//! [`SampleSet`]: crate::sampling::SampleSet

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::model::{BlackBoxModel, Concurrency, Direction, FeatureSpace, Instance, UtilityMapping};
use crate::sampling::{evaluate_range, OutputRange, Sampler};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_INFLUENCE_RANGE: (f64, f64) = (-1.0, 1.0);
pub const DEFAULT_NEUTRAL_CU: f64 = 0.5;

/// Per-run settings shared by every feature set of an explanation.
#[derive(Debug, Clone, PartialEq)]
pub struct CiuParams {
    pub n: usize,
    pub seed: u64,
    pub output_index: usize,
    pub utility: UtilityMapping,
    pub influence_range: (f64, f64),
    pub neutral_cu: f64,
    /// Replaces the sampled `{I}` range by a declared output range.
    pub target_range: Option<(f64, f64)>,
}

impl CiuParams {
    pub fn new(seed: u64) -> Self {
        Self {
            n: DEFAULT_SAMPLES,
            seed,
            output_index: 0,
            utility: UtilityMapping::Identity,
            influence_range: DEFAULT_INFLUENCE_RANGE,
            neutral_cu: DEFAULT_NEUTRAL_CU,
            target_range: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_output(mut self, output_index: usize) -> Self {
        self.output_index = output_index;
        self
    }

    pub fn with_utility(mut self, utility: UtilityMapping) -> Self {
        self.utility = utility;
        self
    }

    pub fn with_influence_range(mut self, rmin: f64, rmax: f64) -> Self {
        self.influence_range = (rmin, rmax);
        self
    }

    pub fn with_neutral_cu(mut self, neutral_cu: f64) -> Self {
        self.neutral_cu = neutral_cu;
        self
    }

    pub fn with_target_range(mut self, lo: f64, hi: f64) -> Self {
        self.target_range = Some((lo, hi));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiuQuery {
    pub instance: Instance,
    pub studied: FeatureSet,
    /// `None` means all features.
    pub target: Option<FeatureSet>,
    pub params: CiuParams,
}

impl CiuQuery {
    pub fn new(instance: Instance, studied: FeatureSet, params: CiuParams) -> Self {
        Self {
            instance,
            studied,
            target: None,
            params,
        }
    }

    pub fn with_target(mut self, target: FeatureSet) -> Self {
        self.target = Some(target);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CiuResult {
    pub ci: Option<f64>,
    pub cu: Option<f64>,
    pub influence: Option<f64>,
    pub ymin_i: f64,
    pub ymax_i: f64,
    #[serde(rename = "ymin_I")]
    pub ymin_target: f64,
    #[serde(rename = "ymax_I")]
    pub ymax_target: f64,
    #[serde(rename = "y_C")]
    pub y_context: f64,
    pub umin_i: f64,
    pub umax_i: f64,
    #[serde(rename = "umin_I")]
    pub umin_target: f64,
    #[serde(rename = "umax_I")]
    pub umax_target: f64,
    #[serde(rename = "u_C")]
    pub u_context: f64,
    /// `{i}`, 1-based.
    pub studied: FeatureSet,
    /// `{I}`, 1-based.
    pub target: FeatureSet,
    pub output_index: usize,
    pub seed: u64,
    #[serde(rename = "N")]
    pub n: usize,
    /// `ymax_i == ymin_i`: CU is undefined.
    pub degenerate_studied: bool,
    /// `ymax_I == ymin_I`: CI is undefined.
    pub degenerate_target: bool,
}

impl CiuResult {
    /// `CI * CU`, the contextual term of an additive utility. Zero when CI
    /// is zero even if CU is undefined.
    pub fn weighted_utility(&self) -> Option<f64> {
        match (self.ci, self.cu) {
            (Some(0.0), _) => Some(0.0),
            (Some(ci), Some(cu)) => Some(ci * cu),
            _ => None,
        }
    }
}

/// Results for several feature sets of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub results: Vec<CiuResult>,
    /// Feature sets whose CI or CU came out undefined.
    pub degenerate: Vec<FeatureSet>,
}

/// A named feature subset used as an intermediate concept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub name: String,
    pub features: FeatureSet,
}

impl Concept {
    pub fn new(name: impl Into<String>, features: FeatureSet) -> Self {
        Self {
            name: name.into(),
            features,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct RangeKey {
    context: Vec<u64>,
    set: FeatureSet,
    output_index: usize,
    n: usize,
    seed: u64,
}

pub struct CiuEngine<'a> {
    model: &'a dyn BlackBoxModel,
    space: &'a FeatureSpace,
    sampler: Sampler,
    cache: Option<Mutex<HashMap<RangeKey, OutputRange>>>,
    lane: Mutex<()>,
}

impl<'a> CiuEngine<'a> {
    pub fn new(model: &'a dyn BlackBoxModel, space: &'a FeatureSpace) -> Self {
        Self {
            model,
            space,
            sampler: Sampler::default(),
            cache: Some(Mutex::new(HashMap::new())),
            lane: Mutex::new(()),
        }
    }

    pub fn with_sampler(mut self, sampler: Sampler) -> Self {
        self.sampler = sampler;
        self
    }

    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn space(&self) -> &FeatureSpace {
        self.space
    }

    /// Output range over the sample set of `set` in context `instance`.
    pub fn range(
        &self,
        instance: &Instance,
        set: &FeatureSet,
        output_index: usize,
        n: usize,
        seed: u64,
    ) -> Result<OutputRange> {
        let key = RangeKey {
            context: instance.key(),
            set: set.clone(),
            output_index,
            n,
            seed,
        };
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.lock().expect("cache lock").get(&key) {
                return Ok(*hit);
            }
        }
        let samples = self.sampler.generate(self.space, instance, set, n, seed)?;
        let range = match self.model.concurrency() {
            Concurrency::Parallel => evaluate_range(self.model, &samples, output_index)?,
            Concurrency::Serialized => {
                let _guard = self.lane.lock().expect("model lane");
                evaluate_range(self.model, &samples, output_index)?
            }
        };
        if let Some(cache) = &self.cache {
            cache.lock().expect("cache lock").insert(key, range);
        }
        Ok(range)
    }

    fn validate(&self, query: &CiuQuery) -> Result<FeatureSet> {
        let n = self.space.len();
        let p = &query.params;
        if query.studied.is_empty() {
            return Err(Error::EmptyStudiedSet);
        }
        query.studied.check_bounds(n)?;
        let target = query.target.clone().unwrap_or_else(|| FeatureSet::all(n));
        target.check_bounds(n)?;
        if !query.studied.is_subset(&target) {
            return Err(Error::NotSubset {
                studied: query.studied.one_based(),
                target: target.one_based(),
            });
        }
        let (rmin, rmax) = p.influence_range;
        if !(rmin.is_finite() && rmax.is_finite() && rmin < rmax) {
            return Err(Error::InvalidQuery(format!(
                "influence range requires rmin < rmax (got [{rmin}, {rmax}])"
            )));
        }
        if !(0.0..=1.0).contains(&p.neutral_cu) {
            return Err(Error::InvalidQuery(format!(
                "neutral CU {} is outside [0, 1]",
                p.neutral_cu
            )));
        }
        if let Some((lo, hi)) = p.target_range {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidQuery(format!(
                    "declared target range [{lo}, {hi}] is invalid"
                )));
            }
        }
        let m = self.model.output_count();
        if p.output_index >= m {
            return Err(Error::OutputIndex {
                index: p.output_index,
                count: m,
            });
        }
        self.space.check_instance(&query.instance)?;
        Ok(target)
    }

    /// Computes CI, CU and contextual influence for one query.
    pub fn evaluate(&self, query: &CiuQuery) -> Result<CiuResult> {
        let target = self.validate(query)?;
        let p = &query.params;
        let studied_range =
            self.range(&query.instance, &query.studied, p.output_index, p.n, p.seed)?;
        let target_range = match p.target_range {
            Some((lo, hi)) => OutputRange {
                ymin: lo,
                ymax: hi,
                y_context: studied_range.y_context,
            },
            None if target == query.studied => studied_range,
            None => self.range(&query.instance, &target, p.output_index, p.n, p.seed)?,
        }
        .union(&studied_range);

        let utilities = |r: &OutputRange| -> Result<(f64, f64)> {
            let a = p.utility.apply(r.ymin)?;
            let b = p.utility.apply(r.ymax)?;
            Ok((a.min(b), a.max(b)))
        };
        let (umin_i, umax_i) = utilities(&studied_range)?;
        let (umin_target, umax_target) = utilities(&target_range)?;
        let u_context = p.utility.apply(studied_range.y_context)?;

        let width_i = studied_range.width();
        let width_target = target_range.width();
        let ci = (width_target > 0.0).then(|| width_i / width_target);
        let cu = (width_i > 0.0).then(|| {
            let yumin = match p.utility.direction() {
                Direction::Ascending => studied_range.ymin,
                Direction::Descending => studied_range.ymax,
            };
            ((studied_range.y_context - yumin) / width_i).abs()
        });
        let (rmin, rmax) = p.influence_range;
        let influence = match (ci, cu) {
            (Some(0.0), _) => Some(0.0),
            (Some(c), Some(u)) => Some((rmax - rmin) * c * (u - p.neutral_cu)),
            _ => None,
        };

        Ok(CiuResult {
            ci,
            cu,
            influence,
            ymin_i: studied_range.ymin,
            ymax_i: studied_range.ymax,
            ymin_target: target_range.ymin,
            ymax_target: target_range.ymax,
            y_context: studied_range.y_context,
            umin_i,
            umax_i,
            umin_target,
            umax_target,
            u_context,
            studied: query.studied.clone(),
            target,
            output_index: p.output_index,
            seed: p.seed,
            n: p.n,
            degenerate_studied: cu.is_none(),
            degenerate_target: ci.is_none(),
        })
    }

    /// CI of the query; the returned result carries CU and influence too.
    pub fn contextual_importance(&self, query: &CiuQuery) -> Result<CiuResult> {
        self.evaluate(query)
    }

    pub fn contextual_utility(&self, query: &CiuQuery) -> Result<CiuResult> {
        self.evaluate(query)
    }

    pub fn contextual_influence(&self, query: &CiuQuery) -> Result<CiuResult> {
        self.evaluate(query)
    }

    /// One result per feature set, relative to `target` (all features when
    /// `None`). The target range is sampled once and shared.
    pub fn explain(
        &self,
        instance: &Instance,
        sets: &[FeatureSet],
        target: Option<&FeatureSet>,
        params: &CiuParams,
    ) -> Result<Explanation> {
        let query = |set: &FeatureSet| {
            let q = CiuQuery::new(instance.clone(), set.clone(), params.clone());
            match target {
                Some(t) => q.with_target(t.clone()),
                None => q,
            }
        };
        let results: Vec<CiuResult> = match self.model.concurrency() {
            Concurrency::Parallel if self.cache.is_some() && sets.len() > 1 => {
                // prime the shared target range before fanning out
                let t = target
                    .cloned()
                    .unwrap_or_else(|| FeatureSet::all(self.space.len()));
                if params.target_range.is_none() && !sets.is_empty() {
                    self.space.check_instance(instance)?;
                    t.check_bounds(self.space.len())?;
                    self.range(instance, &t, params.output_index, params.n, params.seed)?;
                }
                sets.par_iter()
                    .map(|s| self.evaluate(&query(s)))
                    .collect::<Result<_>>()?
            }
            _ => sets
                .iter()
                .map(|s| self.evaluate(&query(s)))
                .collect::<Result<_>>()?,
        };
        let degenerate = results
            .iter()
            .filter(|r| r.degenerate_studied || r.degenerate_target)
            .map(|r| r.studied.clone())
            .collect();
        Ok(Explanation {
            results,
            degenerate,
        })
    }

    /// CI/CU of `concept` relative to its `parent` concept.
    pub fn explain_intermediate(
        &self,
        instance: &Instance,
        concept: &Concept,
        parent: &Concept,
        params: &CiuParams,
    ) -> Result<CiuResult> {
        if !concept.features.is_subset(&parent.features) {
            return Err(Error::NotSubset {
                studied: concept.features.one_based(),
                target: parent.features.one_based(),
            });
        }
        let query = CiuQuery::new(instance.clone(), concept.features.clone(), params.clone())
            .with_target(parent.features.clone());
        self.evaluate(&query)
    }
}

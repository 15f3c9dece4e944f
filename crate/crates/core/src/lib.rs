//! Contextual Importance and Utility (CIU) for black-box models.
//!
//! CIU explains one output of any model around one instance with two
//! absolute numbers per feature set: how much the output utility can move
//! when those features vary (contextual importance, CI) and how favorable
//! their current values are (contextual utility, CU). Contextual influence
//! turns the pair into a signed score comparable with additive attribution
//! methods, which are provided in [`afa`] as baselines.
//!
//! ```
//! use ciu::prelude::*;
//!
//! let space = FeatureSpace::numeric(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
//! let model = scalar_model(|x| 0.3 * x.get(0) + 0.7 * x.get(1));
//! let engine = CiuEngine::new(&model, &space);
//! let query = CiuQuery::new(
//!     Instance::numeric(&[0.7, 0.8]),
//!     FeatureSet::single(0),
//!     CiuParams::new(42),
//! );
//! let r = engine.evaluate(&query).unwrap();
//! assert!((r.ci.unwrap() - 0.3).abs() < 1e-9);
//! assert!((r.cu.unwrap() - 0.7).abs() < 1e-9);
//! ```

pub mod afa;
pub mod cli;
pub mod engine;
pub mod error;
pub mod feature_set;
pub mod model;
pub mod sampling;
pub mod testbed;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::afa::{
        generate_grid, local_surrogate, shapley_values, AttributionResult, BackgroundData,
        ShapleyMode, SurrogateConfig,
    };
    pub use crate::engine::{CiuEngine, CiuParams, CiuQuery, CiuResult, Concept, Explanation};
    pub use crate::error::{Error, Result};
    pub use crate::feature_set::FeatureSet;
    pub use crate::model::{
        scalar_model, BlackBoxModel, Concurrency, FeatureDescriptor, FeatureSpace, FeatureValue,
        FnModel, Instance, UtilityMapping,
    };
    pub use crate::sampling::{evaluate_range, generate_samples, OutputRange, SampleSet};
    pub use crate::testbed::{
        oracle_ci, oracle_range, reproduce_table, ReferenceFunction, TableReport,
    };
}

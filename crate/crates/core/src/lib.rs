//! Evolving fuzzy forecasting with participatory-learning antecedents,
//! kernel recursive least squares consequents and fuzzy-set compatibility
//! measures.
//!
//! The crate is organised bottom-up:
//!
//! - [`fuzzy_numeric`]: discretized type-1 sets, alpha-cuts, type-2 containers.
//! - [`fs_builder`]: turning data windows into type-1 and type-2 fuzzy sets.
//! - [`measures`]: the compatibility measures and their registry.
//! - [`epl`]: arousal, center update, activation and utility dynamics.
//! - [`krls`]: per-rule kernel recursive least squares.
//! - [`model`]: the evolving rule base tying all of the above together.
//! - [`datasets`], [`metrics`], [`experiment`]: benchmarks and evaluation.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod datasets;
pub mod epl;
pub mod error;
pub mod experiment;
pub mod fs_builder;
pub mod fuzzy_numeric;
pub mod krls;
pub mod measures;
pub mod metrics;
pub mod model;

pub use error::{Error, Result};
pub use fs_builder::{DataWindow, FsType, FuzzyRepr, GenerationMethod, Interpolation, SetSpec, Type2Kind};
pub use fuzzy_numeric::{AlphaCut, DiscretizedFuzzySet, Type2FuzzySet, UniverseGrid, ZSlice};
pub use measures::{Measure, MeasureId, MeasureRegistry};
pub use model::{EvolvingModel, ModelConfig, TrainingReport};

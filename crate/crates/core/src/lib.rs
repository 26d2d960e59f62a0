//! Weighted ultradifferentiable seminorms and composition dynamics.

pub mod conjugate;
pub mod error;
pub mod jets;
pub mod logsigned;
pub mod numeric;
pub mod polynomials;
pub mod seminorms;
pub mod weights;
pub mod witnesses;

pub use conjugate::{ConjugateMethod, LogFactor, ShiftConstants, YoungConjugate};
pub use error::{GsError, Result};
pub use jets::{FunctionModel, Jet, MultiplicityPartition};
pub use logsigned::LogSigned;
pub use seminorms::{AttainmentMatrix, AttainmentReport, SearchSpec, SeminormFamily, SeminormSpec};
pub use polynomials::{AffineMap, FixedPoint, FixedPointKind, FixedPointSet, NormalForm, Polynomial};
pub use weights::{Condition, ConditionReport, GridSpec, Verdict, Weight, WeightSequence};
pub use witnesses::{Classification, Growth, SeriesPoint, WitnessReport};

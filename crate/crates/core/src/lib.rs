//! A priori bounds for weakly singular Gronwall-type integral inequalities
//! and a Picard solver for Riemann-Liouville fractional initial value
//! problems in their Volterra form.
//!
//! The building blocks:
//!
//! * [`expr`]: the small expression language used for coefficient functions.
//! * [`special`]: Gamma, Beta, Mittag-Leffler and guarded powers.
//! * [`omega`]: the transform `Ω(x) = ∫₁ˣ dt/μ(t)` and its inverse.
//! * [`bounds`]: bound curves for the inequality families.
//! * [`operators`]: fractional integral and derivative on graded meshes.
//! * [`solver`]: Picard iteration for the Volterra equation.
//! * [`hypotheses`]: numeric checks of existence and uniqueness hypotheses.

pub mod bounds;
pub mod error;
pub mod expr;
pub mod hypotheses;
pub mod omega;
pub mod operators;
pub mod quad;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use bounds::{bound, BoundCurve, BoundFlag, InequalityProblem, Theorem};
pub use expr::{Env, Expr, Var};
pub use hypotheses::{Check, CheckOptions, HypothesisReport, Route, SampleBox, Verdict};
pub use omega::{OmegaTransform, PowerMode};
pub use operators::{GradedMesh, WeightedSample};
pub use solver::{Envelope, FivpSpec, SolutionCurve, SolveOptions};

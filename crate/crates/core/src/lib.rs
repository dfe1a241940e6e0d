//! Translating solitons of the mean curvature flow in `SL(2,R)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: NAK coordinates, the canonical left-invariant metric, the
//!   orthonormal frame, Levi-Civita connection and the Killing fields.
//! * [`ode`]: explicit Runge-Kutta integrators with event location and
//!   direction-field sampling.
//! * [`families`]: surfaces invariant under the `N`, `A` and `K` subgroups,
//!   their generating curves and closed-form normals and mean curvatures.
//! * [`oracle`]: a formula-free computation of fundamental forms and mean
//!   curvature of arbitrary parametrized surfaces.
//! * [`translator`]: the translator equation `H = <N, X>`, reduction ODEs,
//!   explicit solutions and classification checks.
//! * [`suites`]: named verification suites built from the pieces above.

pub mod error;
pub mod families;
pub mod geometry;
pub mod ode;
pub mod oracle;
pub mod suites;
pub mod translator;

pub use error::{Error, Result};
pub use families::{CurveJet, Family, GeneratingCurve, InvariantSurface, Orientation};
pub use geometry::{CoordVector, FrameVector, KillingFieldKind, MatrixClass, Sl2Matrix, Sl2Point};
pub use oracle::{FundamentalForms, SurfaceJet};
pub use translator::{ExplicitSolution, ResidualReport, SolutionKind, TranslatorProblem};

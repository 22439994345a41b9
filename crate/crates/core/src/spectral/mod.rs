//! Moving-domain spectral machinery: trajectories, the frozen-time operator on
//! a disc, its principal eigenpair, and the growing sub-solution.

pub mod coefficients;
pub mod disc;
pub mod eigen;
pub mod subsolution;
pub mod trajectory;

pub use coefficients::{coefficients, min_g_sweep, FrameCoefficients, Laplacian, OperatorCoefficients};
pub use disc::DiscGrid;
pub use eigen::{principal_eigenpair, DriftScheme, EigenOptions, EigenPair};
pub use subsolution::{assemble_subsolution, eigen_time_derivative_check, Subsolution, SubsolutionConfig, SubsolutionReport};
pub use trajectory::{constraint_sweep, trajectory_eval, ConstraintReport, TrajectoryFamily, TrajectoryState};

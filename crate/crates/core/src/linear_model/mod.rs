//! Stratified ANCOVA design matrices, QR least squares, and Student-t tails.
//!
//! The ANCOVA model regresses the outcome on one indicator per stratum (the
//! stratum fixed effects, no global intercept), the baseline covariate, and
//! the 0/1 treatment indicator. The treatment coefficient's t statistic has
//! `N - J - 2` residual degrees of freedom.

mod design;
mod lstsq;
mod special;

pub use design::{build_design, stratum_columns, ColumnKind, DesignMatrix};
pub use lstsq::{fit_least_squares, LeastSquaresFit, RANK_TOLERANCE};
pub use special::{ln_gamma, regularized_incomplete_beta, student_t_two_sided_p};

pub(crate) use lstsq::DEGENERATE_RSS;

//! Front-quality indicators, survival statistics, containment and heatmaps.

pub mod containment;
pub mod heatmap;
pub mod indicators;
pub mod survival;

use thiserror::Error;

pub use containment::{containment, convex_hull, polygon_area, Containment};
pub use heatmap::{heatmap_accumulate, Heatmap};
pub use indicators::{gd, gd_family, gd_plus, hypervolume, igd, igd_plus, IndicatorReport};
pub use survival::{chi_square_1_sf, kaplan_meier, log_rank, LogRank, Observation, SurvivalCurve};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("point set is empty")]
    EmptySet,
    #[error("points have mismatched dimensions")]
    DimensionMismatch,
    #[error("point does not dominate the reference: {0}")]
    OutsideReference(String),
    #[error("{0}")]
    InvalidArgument(String),
}

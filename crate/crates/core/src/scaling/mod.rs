//! Finite-size scaling collapse, bootstrap intervals, power-law fits and the
//! single-layer crossing model.

mod bootstrap;
mod collapse;
mod crossings;
mod optimize;
mod power;

pub use bootstrap::{bootstrap_exponents, cells_to_points, percentile, BootstrapOptions, RawCell, DY_FLOOR};
pub use collapse::{
    collapse_quality, fit_collapse, Collapse, CollapseForm, CollapseParams, DataPoint, InitGrid,
    RescaledPoint, ScalingFit, GLOBAL_S_SLICES,
};
pub use crossings::{crossing_exponent, expected_crossings};
pub use optimize::{nelder_mead, Minimum, NelderMeadOptions};
pub use power::{fit_power_law, PowerFit};

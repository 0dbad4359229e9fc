//! Piecewise expanding Markov interval maps: coding, orbits, return times, and the
//! comparison between balls and cylinders.

mod checks;
mod config;
mod map;

pub use checks::{
    ball_cylinder_check, distortion_constants, recurrence_sandwich_check, recurrence_sandwich_on_orbit, tau_grid, tau_r,
    DistortionData, RecurrenceSandwich, ReturnTime, SandwichReport,
};
pub use config::{map_from_toml, BranchConfig, MapConfig};
pub use map::{Branch, BowenDimension, BranchShape, MarkovExpandingMap};

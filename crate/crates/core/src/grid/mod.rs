//! Generalized Gram grid, the interval systems built on it and sign
//! partitions of interval collections.

pub mod interval;
pub mod sets;
pub mod sign;
pub mod solve;
pub mod window;

pub use interval::{Interval, IntervalCollection, SetLabel};
pub use sets::{build_g1, build_g2};
pub use sign::{mean_zero_gap, sign_partition, SignPartition, SignScan};
pub use solve::{default_tol, grid_points_between, grid_range, solve_grid_point, GramLikePoint};
pub use window::WindowSpec;

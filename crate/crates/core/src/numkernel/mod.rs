//! Special functions and exact nearest-neighbour queries shared by every
//! estimator call.

mod cloud;
mod knn;
mod special;

pub use cloud::PointCloud;
pub use knn::{knn_table, knn_table_with, NeighborSearch, NeighborTable};
pub use special::{digamma, gamma_ln, gamma_ln_ratio, ln_unit_ball_volume, unit_ball_volume};

//! Toom dynamics on the structure registers and the defect bookkeeping
//! built on top of it.

mod bitgrid;
mod clusters;
mod toom;
mod triangle;

pub use bitgrid::BitGrid;
pub use clusters::{
    cluster_count, decompose_clusters, is_h_healthy, min_box_cover, singular_in_region, singular_sites, Cluster,
    HealthReport, Point, Region,
};
pub use toom::{maj, structural_toom_step, structural_update, toom_adjusted, toom_step};
pub use triangle::{erosion_check, triangle_norm, Triangle, TriangleCover, DEFAULT_SITE_CAP};

//! Planar periodic frameworks: pointedness, crossings, faces,
//! pseudo-triangulations and the equal-edge honeycomb.

mod crossing;
mod faces;
mod honeycomb;
mod ppt;
mod star;

pub use crossing::is_noncrossing;
pub use faces::{classify_faces, euler_count, Corner, FaceWalk, CONVEX_TOL};
pub use honeycomb::{
    honeycomb_auxetic_test, honeycomb_surface, period_triangle_class, HoneycombPoint, HoneycombVerdict,
    TriangleClass, SURFACE_TOL,
};
pub use ppt::{
    candidate_bars, complete_ppt, enumerate_refinements, generate_ppt, is_insertable, is_ppt, random_ppt,
    DEFAULT_CANDIDATE_RADIUS, MAX_CANDIDATE_RADIUS,
};
pub use star::{is_framework_pointed, is_pointed, vertex_star, VertexStar, POINTED_TOL};

//! Mixed areas of planar convex polygons and a validated-numerics certificate
//! for a five-variable Hessian inequality used in the stability analysis of
//! the inequality `L(K)^2 >= 6√3 A(K, -K)`.

pub mod deform;
pub mod error;
pub mod geometry;
pub mod hexagon;
pub mod interval;
pub mod io;
pub mod lemma;
pub mod stability;
pub mod taylor;

pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, Vec2};
pub use interval::{Interval, IntervalBox};

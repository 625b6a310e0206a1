//! Lines in finite metric spaces, with emphasis on L1 and L∞ point sets in
//! the plane.

pub mod construction;
pub mod degenerate;
pub mod error;
pub mod family;
pub mod geometry;
pub mod io;
pub mod layers;
pub mod lines;
pub mod members;
pub mod monotone;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{Metric, Point, PointSet};
pub use lines::{enumerate_lines, Line, LineCatalog};

//! Discretized monotone functions on the unit square and down-rectangles in
//! `[0,1]^k`.
//!
//! The unit square is cut into `m × m` cells `D(i,j) = [(i-1)/m, i/m] ×
//! [(j-1)/m, j/m]`. Cell coordinates and staircase positions are 1-based
//! throughout this module so that a staircase `a` contains cell `(i,j)`
//! exactly when `j <= a_i`.

mod grid;
mod rect;
mod staircase;

pub use grid::{discretize_monotone, product_expect, CellFn, GridFunction, GridIndicator};
pub use rect::RectangleFamily;
pub use staircase::{Perturbation, StaircaseSeq};

//! Exact toric stability analysis for labelled polygons and intervals with
//! cusp facets.

pub mod classify;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod moments;
pub mod poly;
pub mod polytope;
pub mod presets;
pub mod rational;
pub mod stability;
pub mod sturm;

pub use error::{Result, TorexError};
pub use poly::{Affine, MultiPoly, Pt, UniPoly};
pub use polytope::{Facet, LabelledPolytope, Measure};
pub use rational::Q;

//! Explicit extremal metrics on labelled polygons and their verification.

pub mod ansatz;
pub mod partial;
pub mod verify;
pub mod analysis;

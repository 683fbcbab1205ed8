//! Independent reference implementations used to check the fast paths.

mod brute;
mod field;
mod monte_carlo;

pub use brute::brute_force_depth_atomic;
pub use field::{depth_field, depth_field_of, DepthField, FieldMetadata};
pub use monte_carlo::{monte_carlo_mass, McEstimate, Region, CHUNK};

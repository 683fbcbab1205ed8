//! Halfspace depth of planar measures mixing atoms with continuous
//! components, central regions, and partial recovery of a measure from its
//! depth function.

pub mod depth;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod oracle;
pub mod rational;
pub mod reconstruct;
pub mod regions;
pub mod scenarios;

pub use error::{Error, Result};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/depth.md")]
    mod depth {}
    #[doc = include_str!("../../../book/src/regions.md")]
    mod regions {}
    #[doc = include_str!("../../../book/src/reconstruction.md")]
    mod reconstruction {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/limits.md")]
    mod limits {}
}

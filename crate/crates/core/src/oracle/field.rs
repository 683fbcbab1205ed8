//! Depth on a rectangular lattice.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::depth::{DepthSource, Engine};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::measure::Measure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub bbox: [f64; 4],
    pub resolution: [usize; 2],
    pub spec_hash: Option<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub layout: String,
}

/// Depth values at the nodes of an `nx` by `ny` lattice spanning `bbox`.
/// Row `j` holds the nodes with `y = y0 + j (y1 - y0) / (ny - 1)`, and
/// within a row `x` increases.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthField {
    pub bbox: BBox,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub spec_hash: Option<String>,
    pub seed: Option<u64>,
}

impl DepthField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn metadata(&self) -> FieldMetadata {
        FieldMetadata {
            bbox: [self.bbox.min.x, self.bbox.min.y, self.bbox.max.x, self.bbox.max.y],
            resolution: [self.nx, self.ny],
            spec_hash: self.spec_hash.clone(),
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            layout: "row-major; row j at y0 + j*(y1-y0)/(ny-1), column i at x0 + i*(x1-x0)/(nx-1)".to_string(),
        }
    }

    /// One CSV line per row, values printed in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{:?}", self.get(i, j)).expect("write to string");
            }
            out.push('\n');
        }
        out
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&self.metadata()).expect("metadata serializes")
    }
}

/// Depth field of any depth source.
pub fn depth_field_of(source: &dyn DepthSource, bbox: BBox, nx: usize, ny: usize) -> Result<DepthField> {
    if nx < 2 || ny < 2 {
        return Err(Error::BadResolution(nx, ny));
    }
    let values: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|k| source.depth_value(bbox.grid_node(k % nx, k / nx, nx, ny)))
        .collect();
    Ok(DepthField {
        bbox,
        nx,
        ny,
        values,
        spec_hash: None,
        seed: None,
    })
}

/// Depth field of a measure with default search options.
pub fn depth_field(m: &Measure, bbox: BBox, nx: usize, ny: usize) -> Result<DepthField> {
    depth_field_of(&Engine::new(m), bbox, nx, ny)
}

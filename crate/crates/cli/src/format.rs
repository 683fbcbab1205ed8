use serde::Serialize;

use flagdepth::geometry::BBox;
use flagdepth::measure::spec_file::MeasureSpec;

/// `v` rounded to 12 significant digits, printed in shortest form, with an
/// exponent for magnitudes below 1e-4 or from 1e15 on.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".into();
    }
    if rounded.abs() < 1e-4 || rounded.abs() >= 1e15 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// Tool and input identification written with every output file.
#[derive(Clone, Debug, Serialize)]
pub struct Sidecar {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub spec_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Sidecar {
    pub fn new(command: &'static str, spec: &MeasureSpec) -> Self {
        Sidecar {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            spec_hash: spec.hash(),
            bbox: None,
            seed: None,
        }
    }

    pub fn with_bbox(mut self, b: BBox) -> Self {
        self.bbox = Some([b.min.x, b.min.y, b.max.x, b.max.y]);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

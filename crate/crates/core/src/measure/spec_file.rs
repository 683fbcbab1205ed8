//! JSON measure specifications.
//!
//! ```json
//! {"components": [
//!   {"type": "finite_atomic", "atoms": [{"x": 0, "y": 0, "weight": "1/2"}]},
//!   {"type": "uniform_disk", "center": [0, 0], "radius": 2, "total_mass": 1},
//!   {"type": "cauchy_product", "center": [0, 0], "dimension": 2, "weight": "1/2"},
//!   {"type": "axis_cauchy", "dimension": 2},
//!   {"type": "dirac", "location": [1, 1], "mass": "1/10"}
//! ]}
//! ```
//!
//! `weight` defaults to 1. Weights and masses are either `"p/q"` strings or
//! JSON numbers; numbers are read through their shortest decimal form, so
//! `0.1` is exactly one tenth. Coordinates are doubles and are used at their
//! exact binary value. Unknown keys are rejected. Serialization writes every
//! rational as a `"p/q"` string, so parse/serialize round-trips bit-exactly.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Point2, QPoint};
use crate::rational::{self, Rational};

use super::{Atom, Component, Measure};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Text(String),
    Number(f64),
}

impl RationalText {
    fn value(&self) -> Result<Rational> {
        match self {
            RationalText::Text(s) => rational::parse_rational(s),
            RationalText::Number(v) => {
                rational::from_f64_decimal(*v).ok_or_else(|| Error::InvalidRational(v.to_string()))
            }
        }
    }

    fn of(r: &Rational) -> Self {
        RationalText::Text(rational::format_rational(r))
    }
}

fn one() -> RationalText {
    RationalText::Text("1".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub x: f64,
    pub y: f64,
    pub weight: RationalText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ComponentSpec {
    FiniteAtomic {
        atoms: Vec<AtomSpec>,
        #[serde(default = "one")]
        weight: RationalText,
    },
    UniformDisk {
        center: [f64; 2],
        radius: f64,
        total_mass: f64,
        #[serde(default = "one")]
        weight: RationalText,
    },
    CauchyProduct {
        #[serde(default)]
        center: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dimension: Option<usize>,
        #[serde(default = "one")]
        weight: RationalText,
    },
    AxisCauchy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dimension: Option<usize>,
        #[serde(default = "one")]
        weight: RationalText,
    },
    Dirac {
        location: [f64; 2],
        mass: RationalText,
        #[serde(default = "one")]
        weight: RationalText,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub components: Vec<ComponentSpec>,
}

fn planar(dimension: Option<usize>) -> Result<()> {
    match dimension {
        None | Some(2) => Ok(()),
        Some(d) => Err(Error::UnsupportedDimension(d)),
    }
}

fn point(p: [f64; 2]) -> Result<Point2> {
    Point2::checked(p[0], p[1])
}

impl MeasureSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: MeasureSpec = serde_json::from_str(text)?;
        spec.to_measure()?;
        Ok(spec)
    }

    pub fn to_measure(&self) -> Result<Measure> {
        if self.components.is_empty() {
            return Err(Error::Spec("no components".into()));
        }
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            out.push(match c {
                ComponentSpec::FiniteAtomic { atoms, weight } => {
                    let atoms = atoms
                        .iter()
                        .map(|a| Atom::new(point([a.x, a.y])?, a.weight.value()?))
                        .collect::<Result<Vec<_>>>()?;
                    (Component::FiniteAtomic { atoms }, weight.value()?)
                }
                ComponentSpec::UniformDisk {
                    center,
                    radius,
                    total_mass,
                    weight,
                } => (
                    Component::UniformDisk {
                        center: point(*center)?,
                        radius: *radius,
                        total_mass: *total_mass,
                    },
                    weight.value()?,
                ),
                ComponentSpec::CauchyProduct {
                    center,
                    dimension,
                    weight,
                } => {
                    planar(*dimension)?;
                    (
                        Component::CauchyProduct {
                            center: point(center.unwrap_or([0.0, 0.0]))?,
                        },
                        weight.value()?,
                    )
                }
                ComponentSpec::AxisCauchy { dimension, weight } => {
                    planar(*dimension)?;
                    (Component::AxisCauchyMixture, weight.value()?)
                }
                ComponentSpec::Dirac { location, mass, weight } => (
                    Component::Dirac {
                        location: QPoint::from_f64(point(*location)?)?,
                        mass: mass.value()?,
                    },
                    weight.value()?,
                ),
            });
        }
        Measure::new(out)
    }

    pub fn from_measure(m: &Measure) -> Self {
        let components = m
            .components()
            .iter()
            .map(|(c, w)| {
                let weight = RationalText::of(w);
                match c {
                    Component::FiniteAtomic { atoms } => ComponentSpec::FiniteAtomic {
                        atoms: atoms
                            .iter()
                            .map(|a| {
                                let p = a.location.approx();
                                AtomSpec {
                                    x: p.x,
                                    y: p.y,
                                    weight: RationalText::of(&a.weight),
                                }
                            })
                            .collect(),
                        weight,
                    },
                    Component::UniformDisk {
                        center,
                        radius,
                        total_mass,
                    } => ComponentSpec::UniformDisk {
                        center: [center.x, center.y],
                        radius: *radius,
                        total_mass: *total_mass,
                        weight,
                    },
                    Component::CauchyProduct { center } => ComponentSpec::CauchyProduct {
                        center: Some([center.x, center.y]),
                        dimension: None,
                        weight,
                    },
                    Component::AxisCauchyMixture => ComponentSpec::AxisCauchy {
                        dimension: None,
                        weight,
                    },
                    Component::Dirac { location, mass } => {
                        let p = location.approx();
                        ComponentSpec::Dirac {
                            location: [p.x, p.y],
                            mass: RationalText::of(mass),
                            weight,
                        }
                    }
                }
            })
            .collect();
        MeasureSpec { components }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Hex SHA-256 of the canonical (compact) serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("spec serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Reads and validates a measure spec file.
pub fn load(path: &std::path::Path) -> Result<(MeasureSpec, Measure)> {
    let text = std::fs::read_to_string(path)?;
    let spec = MeasureSpec::parse(&text)?;
    let m = spec.to_measure()?;
    Ok((spec, m))
}

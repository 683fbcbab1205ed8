//! The two reference measures and the analytic shapes of their regions.
//!
//! *Disk with atom*: uniform mass 1 on the disk of radius 2 about the origin
//! plus an atom of mass `delta` at `(1, 1)`. Its depth has no closed
//! minimizing halfspace at `(1, 0)`, and the atom is recoverable from the
//! depth alone.
//!
//! *Cauchy cross*: `mu` is the product of two standard Cauchy laws with
//! weight `1/2` plus an atom of mass `1/4` at the origin; `nu` spreads mass
//! `1/2` along each coordinate axis as a standard Cauchy law. The two
//! measures are mutually singular yet have the same depth everywhere.

use crate::depth::closed_form::{disk_level_at_atom, disk_region_radius, ATOM, DISK_RADIUS};
use crate::depth::{cauchy_cross_depth, disk_with_atom_depth, DepthSource};
use crate::error::Result;
use crate::geometry::{self, Point2, QPoint};
use crate::measure::{Component, Measure};
use crate::rational::{self, Rational};

pub fn disk_with_atom(delta: Rational) -> Result<Measure> {
    Measure::new(vec![
        (
            Component::UniformDisk {
                center: Point2::ORIGIN,
                radius: DISK_RADIUS,
                total_mass: 1.0,
            },
            rational::int(1),
        ),
        (
            Component::Dirac {
                location: QPoint::from_f64(ATOM)?,
                mass: delta,
            },
            rational::int(1),
        ),
    ])
}

/// `mu` of the Cauchy cross: Cauchy product with weight `1/2` plus an atom
/// of mass `1/4` at the origin.
pub fn cauchy_with_atom() -> Measure {
    Measure::new(vec![
        (
            Component::CauchyProduct { center: Point2::ORIGIN },
            rational::ratio(1, 2),
        ),
        (
            Component::Dirac {
                location: QPoint::from_ints(0, 0),
                mass: rational::int(1),
            },
            rational::ratio(1, 4),
        ),
    ])
    .expect("valid components")
}

/// `nu` of the Cauchy cross: Cauchy mass `1/2` on each axis.
pub fn axis_cauchy() -> Measure {
    Measure::new(vec![(Component::AxisCauchyMixture, rational::int(1))]).expect("valid component")
}

/// Closed-form depth of [`disk_with_atom`].
#[derive(Clone, Copy, Debug)]
pub struct DiskWithAtomDepth {
    pub delta: f64,
}

impl DepthSource for DiskWithAtomDepth {
    fn depth_value(&self, x: Point2) -> f64 {
        disk_with_atom_depth(x, self.delta)
    }
}

/// Closed-form depth shared by both Cauchy cross measures.
#[derive(Clone, Copy, Debug)]
pub struct CauchyCrossDepth;

impl DepthSource for CauchyCrossDepth {
    fn depth_value(&self, x: Point2) -> f64 {
        cauchy_cross_depth(&[x.x, x.y])
    }
}

/// Which description of the central region applies at a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionCase {
    /// A disk about the origin.
    Disk,
    /// Convex hull of a disk and the atom.
    HullWithAtom,
    /// That hull intersected with a larger disk.
    ClippedHull,
}

pub fn region_case(beta: f64, delta: f64) -> RegionCase {
    let alpha = disk_level_at_atom();
    if beta <= alpha {
        RegionCase::Disk
    } else if beta <= alpha + delta {
        RegionCase::HullWithAtom
    } else {
        RegionCase::ClippedHull
    }
}

fn circle(r: f64, samples: usize) -> Vec<Point2> {
    (0..samples)
        .map(|k| Point2::from_angle(std::f64::consts::TAU * k as f64 / samples as f64) * r)
        .collect()
}

/// Inscribed polygon with `samples` points per circle approximating the
/// central region of [`disk_with_atom`] at level `beta`.
pub fn disk_with_atom_region(beta: f64, delta: f64, samples: usize) -> Vec<Point2> {
    let disk = circle(disk_region_radius(beta), samples);
    match region_case(beta, delta) {
        RegionCase::Disk => disk,
        RegionCase::HullWithAtom => {
            let mut pts = disk;
            pts.push(ATOM);
            geometry::convex_hull_f64(&pts)
        }
        RegionCase::ClippedHull => {
            let mut pts = disk;
            pts.push(ATOM);
            let hull = geometry::convex_hull_f64(&pts);
            let r2 = disk_region_radius(beta - delta);
            let mut keep: Vec<Point2> = hull.iter().copied().filter(|p| p.norm() <= r2).collect();
            // Where hull edges cross the outer circle.
            for i in 0..hull.len() {
                let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
                let d = b - a;
                let (qa, qb, qc) = (d.dot(d), 2.0 * a.dot(d), a.dot(a) - r2 * r2);
                let disc = qb * qb - 4.0 * qa * qc;
                if qa > 0.0 && disc >= 0.0 {
                    for t in [(-qb - disc.sqrt()) / (2.0 * qa), (-qb + disc.sqrt()) / (2.0 * qa)] {
                        if (0.0..=1.0).contains(&t) {
                            keep.push(a + d * t);
                        }
                    }
                }
            }
            keep.extend(
                circle(r2, samples)
                    .into_iter()
                    .filter(|p| geometry::distance_to_convex(&hull, *p) == 0.0),
            );
            geometry::convex_hull_f64(&keep)
        }
    }
}

//! Reference depth functions known in closed form.

use crate::geometry::Point2;
use crate::measure::closed_form::disk_segment_fraction;

pub use crate::measure::closed_form::cauchy_cross_depth;

/// Radius of the disk in [`disk_with_atom_depth`].
pub const DISK_RADIUS: f64 = 2.0;

/// Location of the atom in [`disk_with_atom_depth`].
pub const ATOM: Point2 = Point2::new(1.0, 1.0);

/// Depth of the uniform disk alone (radius 2, mass 1) at the atom location:
/// `(pi - 2) / (4 pi)`.
pub fn disk_level_at_atom() -> f64 {
    (std::f64::consts::PI - 2.0) / (4.0 * std::f64::consts::PI)
}

/// Depth of the uniform disk alone at `x`.
pub fn disk_depth(x: Point2) -> f64 {
    disk_segment_fraction(x.norm().min(DISK_RADIUS), DISK_RADIUS)
}

/// Radius of the central region of the uniform disk at level `beta` in `(0, 1/2]`.
pub fn disk_region_radius(beta: f64) -> f64 {
    if beta <= 0.0 {
        return DISK_RADIUS;
    }
    if beta >= 0.5 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0_f64, DISK_RADIUS);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if disk_segment_fraction(mid, DISK_RADIUS) >= beta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * DISK_RADIUS {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest radius `r` such that `x` lies in the convex hull of the disk of
/// radius `r` about the origin and the atom.
pub fn hull_radius_needed(x: Point2) -> f64 {
    let a = ATOM;
    let v = x - a;
    let len2 = v.dot(v);
    if len2 == 0.0 {
        return 0.0;
    }
    let s = -a.dot(v) / len2;
    if s >= 1.0 {
        // The line from the atom through x passes closest to the origin
        // beyond x.
        a.cross(v).abs() / len2.sqrt()
    } else {
        x.norm()
    }
}

/// Depth of the uniform disk of radius 2 and mass 1 plus an atom of mass
/// `delta` at `(1, 1)`, obtained by inverting the description of its central
/// regions: disks up to the disk level at the atom, then hulls of a disk and
/// the atom, then such hulls cut by a larger disk.
pub fn disk_with_atom_depth(x: Point2, delta: f64) -> f64 {
    let alpha = disk_level_at_atom();
    let d_disk = disk_depth(x);
    let h = disk_segment_fraction(hull_radius_needed(x).min(DISK_RADIUS), DISK_RADIUS);
    let low = d_disk.min(alpha);
    if h > alpha {
        low.max(h.min(alpha.max(d_disk) + delta))
    } else {
        low
    }
}

//! Recovering atoms and supports from depth alone.
//!
//! Atoms show up as vertices that persist across many central regions, and
//! the depth drops by at most their mass when stepping past them away from a
//! deeper point. [`detect_atoms`] works from approximate depth evaluations;
//! [`reconstruct_finite_atomic`] needs an exact oracle and recovers a finitely
//! atomic measure completely.

mod exact;

use serde::Serialize;

use crate::depth::DepthSource;
use crate::error::{Error, Result};
use crate::geometry::{BBox, Point2};
use crate::measure::{Halfspace, MassValue, Measure};
use crate::rational;
use crate::regions::{self, CentralRegion, RadialOptions};

pub use exact::{reconstruct_finite_atomic, ExactOptions, ExactReport, Verdict, VertexCandidate};

/// Depth lost when stepping past `x` along the ray from `z` through `x`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpEstimate {
    pub depth_x: f64,
    /// Last depth seen beyond `x`.
    pub limit: f64,
    /// `depth_x - limit`.
    pub jump: f64,
    /// Two successive halvings agreed to within the tolerance.
    pub stabilized: bool,
    /// Smallest and largest depth beyond `x` over the last halvings when not stabilized.
    pub bracket: Option<(f64, f64)>,
    pub evaluations: usize,
}

/// Depth limit just beyond `x` on the ray from `z`, starting `t0` past `x`
/// and halving the step until two successive values agree within `tol`.
pub fn jump_along_line(source: &dyn DepthSource, x: Point2, z: Point2, t0: f64, tol: f64) -> Result<JumpEstimate> {
    let dir = (x - z)
        .normalized()
        .ok_or_else(|| Error::Precondition("the deeper point coincides with the candidate".into()))?;
    if !(t0 > 0.0 && tol > 0.0) {
        return Err(Error::Precondition("step and tolerance must be positive".into()));
    }
    let depth_x = source.depth_value(x);
    let mut t = t0;
    let mut prev = source.depth_value(x + dir * t);
    let mut history = vec![prev];
    for _ in 0..60 {
        t *= 0.5;
        let y = x + dir * t;
        if y == x {
            break;
        }
        let next = source.depth_value(y);
        history.push(next);
        if (next - prev).abs() <= tol {
            return Ok(JumpEstimate {
                depth_x,
                limit: next,
                jump: depth_x - next,
                stabilized: true,
                bracket: None,
                evaluations: history.len() + 1,
            });
        }
        prev = next;
    }
    let tail = &history[history.len().saturating_sub(4)..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(JumpEstimate {
        depth_x,
        limit: prev,
        jump: depth_x - prev,
        stabilized: false,
        bracket: Some((lo, hi)),
        evaluations: history.len() + 1,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectOptions {
    /// Number of levels, evenly spaced strictly between zero and the maximal depth.
    pub levels: usize,
    pub radial: RadialOptions,
    /// Corners closer than this fraction of the box diagonal are merged.
    pub cluster_radius: f64,
    /// Minimum number of levels at which a corner must appear.
    pub min_levels: usize,
    /// Largest denominator tried when snapping a location to a simple rational.
    pub snap_denominator: u64,
    /// First step past the candidate, as a fraction of the box diagonal.
    pub jump_step: f64,
    pub jump_tol: f64,
    /// Jumps at or below this are treated as zero.
    pub min_mass: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            levels: 48,
            radial: RadialOptions {
                directions: 96,
                chord_tol: 1e-4,
                ..RadialOptions::default()
            },
            cluster_radius: 1e-4,
            min_levels: 3,
            snap_denominator: 1000,
            jump_step: 1e-3,
            jump_tol: 1e-9,
            min_mass: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    /// Stable positive jump from a deeper point.
    Confident,
    /// No deeper point exists; the jump cannot be measured along a ray from
    /// deeper points, so the mass is not identified.
    Undecidable,
    /// The depth beyond the candidate did not settle.
    Unstable,
    /// The depth does not drop past the candidate.
    NoJump,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AtomCandidate {
    pub location: Point2,
    /// Exact form of the location when it snapped to a simple rational point.
    pub snapped: Option<[String; 2]>,
    pub depth: f64,
    /// Depth jump past the candidate; an upper bound on its mass.
    pub mass_estimate: Option<f64>,
    /// `depth - lowest level with this corner`, capped by the jump. Segments
    /// of the region boundaries ending at an atom lie on lines of mass at
    /// least this much, and for a continuum of levels only the atom can
    /// carry that.
    pub mass_lower_bound: Option<f64>,
    /// Lowest and highest level at which the candidate was a corner.
    pub persistence: (f64, f64),
    /// Levels at which the candidate was a corner.
    pub levels_seen: usize,
    /// For candidates at the deepest point: smallest jump over a fan of
    /// directions. It cannot tell an atom from a depth spike.
    pub median_scan: Option<f64>,
    /// Largest distance of a clustered corner from the cluster mean.
    pub radius: f64,
    pub status: CandidateStatus,
    pub jump: Option<JumpEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionReport {
    pub deep_point: Point2,
    pub max_depth: f64,
    pub levels: Vec<f64>,
    pub candidates: Vec<AtomCandidate>,
    pub notes: Vec<String>,
}

impl DetectionReport {
    pub fn confident(&self) -> impl Iterator<Item = &AtomCandidate> {
        self.candidates
            .iter()
            .filter(|c| c.status == CandidateStatus::Confident)
    }
}

/// Levels `max * k / (n + 1)` for `k = 1..=n`.
fn even_levels(max: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| max * k as f64 / (n + 1) as f64).collect()
}

/// Nearest point with both coordinates of denominator at most `max_den`.
fn snap(p: Point2, max_den: u64) -> Option<(Point2, [String; 2])> {
    let (xp, xq) = rational::best_approximation(p.x, max_den)?;
    let (yp, yq) = rational::best_approximation(p.y, max_den)?;
    let (rx, ry) = (rational::from_i128_ratio(xp, xq), rational::from_i128_ratio(yp, yq));
    let s = Point2::new(rational::to_f64(&rx), rational::to_f64(&ry));
    Some((s, [rational::format_rational(&rx), rational::format_rational(&ry)]))
}

/// Candidate atoms of the measure behind `source`: corners that persist over
/// several central regions, with their depth jumps.
pub fn detect_atoms(source: &dyn DepthSource, bbox: BBox, opts: &DetectOptions) -> Result<DetectionReport> {
    if opts.levels == 0 {
        return Err(Error::ZeroSamples);
    }
    let (deep, max_depth) = regions::find_deep_point(source, &bbox, opts.radial.search_grid);
    let mut notes = Vec::new();
    if max_depth.is_nan() || max_depth <= 0.0 {
        notes.push("maximal depth found is zero".into());
        return Ok(DetectionReport {
            deep_point: deep,
            max_depth,
            levels: Vec::new(),
            candidates: Vec::new(),
            notes,
        });
    }
    let levels = even_levels(max_depth, opts.levels);
    let mut corners: Vec<(usize, regions::ExtremePoint)> = Vec::new();
    for (k, &beta) in levels.iter().enumerate() {
        let r = regions::central_region_mixture(source, beta, bbox, Some(deep), &opts.radial)?;
        corners.extend(regions::extreme_points(&r).into_iter().map(|e| (k, e)));
    }
    let radius = opts.cluster_radius * bbox.diagonal();
    // Greedy clustering in order of first appearance.
    let mut clusters: Vec<Vec<(usize, regions::ExtremePoint)>> = Vec::new();
    for c in corners {
        match clusters
            .iter_mut()
            .find(|cl| cl.iter().any(|m| m.1.location.distance(c.1.location) <= radius))
        {
            Some(cl) => cl.push(c),
            None => clusters.push(vec![c]),
        }
    }
    let mut candidates = Vec::new();
    for cl in clusters {
        let mut seen: Vec<usize> = cl.iter().map(|m| m.0).collect();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() < opts.min_levels {
            continue;
        }
        let n = cl.len() as f64;
        let mean = cl.iter().fold(Point2::ORIGIN, |s, m| s + m.1.location) * (1.0 / n);
        let spread = cl.iter().map(|m| m.1.location.distance(mean)).fold(0.0, f64::max);
        let step = opts.jump_step * bbox.diagonal();
        let at_top = |p: Point2| p.distance(deep) <= radius || source.depth_value(p) >= max_depth - opts.jump_tol;
        // The jump only shows at the atom itself, so of the cluster mean and
        // a nearby simple rational point keep the one with the larger jump.
        let mut options: Vec<(Point2, Option<[String; 2]>)> = vec![(mean, None)];
        if let Some((p, s)) = snap(mean, opts.snap_denominator).filter(|(p, _)| p.distance(mean) <= radius) {
            options.push((p, Some(s)));
        }
        let mut best: Option<(Point2, Option<[String; 2]>, Option<JumpEstimate>)> = None;
        for (p, s) in options {
            let j = if at_top(p) {
                None
            } else {
                Some(jump_along_line(source, p, deep, step, opts.jump_tol)?)
            };
            let better = match (&best, &j) {
                (None, _) => true,
                (Some((_, _, Some(b))), Some(j)) => j.stabilized && (!b.stabilized || j.jump > b.jump),
                (Some((_, _, None)), Some(_)) => false,
                (Some(_), None) => true,
            };
            if better {
                best = Some((p, s, j));
            }
        }
        let (location, snapped, jump) = best.expect("at least one option");
        let depth = source.depth_value(location);
        let persistence = (levels[seen[0]], levels[*seen.last().expect("non-empty")]);
        let mass_lower_bound = jump
            .as_ref()
            .filter(|j| j.stabilized)
            .map(|j| (depth - persistence.0).clamp(0.0, j.jump.max(0.0)));
        let median_scan = if jump.is_none() {
            let mut smallest = f64::INFINITY;
            for k in 0..16 {
                let e = Point2::from_angle((k as f64 + 0.5) * std::f64::consts::TAU / 16.0);
                let j = jump_along_line(source, location, location - e, step, opts.jump_tol)?;
                smallest = smallest.min(j.jump);
            }
            Some(smallest)
        } else {
            None
        };
        let status = match &jump {
            None => CandidateStatus::Undecidable,
            Some(j) if !j.stabilized => CandidateStatus::Unstable,
            Some(j) if j.jump > opts.min_mass => CandidateStatus::Confident,
            Some(_) => CandidateStatus::NoJump,
        };
        candidates.push(AtomCandidate {
            location,
            snapped,
            depth,
            mass_estimate: jump.as_ref().map(|j| j.jump),
            mass_lower_bound,
            persistence,
            levels_seen: seen.len(),
            median_scan,
            radius: spread,
            status,
            jump,
        });
    }
    if candidates.iter().any(|c| c.status == CandidateStatus::Undecidable) {
        notes.push("a candidate sits at the deepest point; its mass is not identified by depth".into());
    }
    Ok(DetectionReport {
        deep_point: deep,
        max_depth,
        levels,
        candidates,
        notes,
    })
}

/// Boundaries of central regions over a range of levels: the only places
/// where depth reveals anything about the support.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportReport {
    pub regions: Vec<CentralRegion>,
}

impl SupportReport {
    /// Whether `p` lies within `tol` of some region boundary.
    pub fn on_contour(&self, p: Point2, tol: f64) -> bool {
        self.regions.iter().any(|r| {
            let b = r.boundary();
            let n = b.len();
            match n {
                0 => false,
                1 => b[0].distance(p) <= tol + r.tolerance(),
                _ => (0..n).any(|i| crate::geometry::segment_distance(b[i], b[(i + 1) % n], p) <= tol + r.tolerance()),
            }
        })
    }

    /// Whether every sample point is within `tol` of a region boundary.
    pub fn covers(&self, points: &[Point2], tol: f64) -> bool {
        points.iter().all(|p| self.on_contour(*p, tol))
    }
}

/// Traces the regions at `levels` from a common deep point.
pub fn support_report(
    source: &dyn DepthSource,
    bbox: BBox,
    levels: &[f64],
    opts: &RadialOptions,
) -> Result<SupportReport> {
    let (deep, _) = regions::find_deep_point(source, &bbox, opts.search_grid);
    let regions = levels
        .iter()
        .map(|&l| regions::central_region_mixture(source, l, bbox, Some(deep), opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportReport { regions })
}

/// The closed halfspace through the face `p -> q` of a convex region whose
/// inner normal points away from the region, so that it contains `x`.
/// `x` must lie strictly beyond the line of the face.
pub fn touching_halfspace_for_face(p: Point2, q: Point2, interior: Point2, x: Point2) -> Result<Halfspace> {
    let along = (q - p)
        .normalized()
        .ok_or_else(|| Error::Precondition("face endpoints coincide".into()))?;
    let mut u = along.rot90();
    if u.dot(interior - p) > 0.0 {
        u = -u;
    }
    if u.dot(interior - p) == 0.0 {
        return Err(Error::Precondition("interior point lies on the face line".into()));
    }
    if u.dot(x - p).is_nan() || u.dot(x - p) <= 0.0 {
        return Err(Error::Precondition(format!("{x} is not strictly beyond the face")));
    }
    Halfspace::new(u, u.dot(p))
}

/// Open mass of a touching halfspace next to the level of its region.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceAudit {
    pub open_mass: MassValue,
    pub level: f64,
    pub within: bool,
}

pub fn audit_touching_halfspace(m: &Measure, h: &Halfspace, level: f64, tol: f64) -> HalfspaceAudit {
    let open_mass = m.open_halfspace_mass(h);
    let within = open_mass.to_f64() <= level + tol;
    HalfspaceAudit {
        open_mass,
        level,
        within,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::closed_form::disk_level_at_atom;
    use crate::depth::FnDepth;
    use crate::geometry::QPoint;
    use crate::scenarios::DiskWithAtomDepth;

    #[test]
    fn jump_of_a_step_function() {
        let step = FnDepth(|p: Point2| if p.x <= 0.0 { 1.0 } else { 0.25 });
        let j = jump_along_line(&step, Point2::ORIGIN, Point2::new(-1.0, 0.0), 0.1, 1e-12).unwrap();
        assert!(j.stabilized);
        assert_eq!(j.jump, 0.75);
    }

    #[test]
    fn jump_of_the_disk_atom() {
        let src = DiskWithAtomDepth { delta: 0.1 };
        let j = jump_along_line(&src, Point2::new(1.0, 1.0), Point2::ORIGIN, 1e-3, 1e-9).unwrap();
        assert!(j.stabilized);
        assert!((j.jump - 0.1).abs() < 1e-6, "{j:?}");
        assert!((j.depth_x - disk_level_at_atom() - 0.1).abs() < 1e-9);
    }

    #[test]
    fn touching_halfspace_faces_away() {
        let h = touching_halfspace_for_face(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
            Point2::new(0.3, -2.0),
        )
        .unwrap();
        assert_eq!(h.normal(), Point2::new(0.0, -1.0));
        assert!(h.contains(&QPoint::from_ints(5, -1)));
        assert!(!h.contains(&QPoint::from_ints(0, 1)));
        assert!(touching_halfspace_for_face(
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.5, 1.0),
            Point2::new(0.3, 2.0)
        )
        .is_err());
    }
}

//! Central regions `D_alpha = { x : D(x) >= alpha }`: exact polygons for
//! atomic measures and certified radial approximations otherwise.

pub(crate) mod exact;
pub mod radial;

use serde::Serialize;

use crate::depth::DepthSource;
use crate::error::{Error, Result};
use crate::geometry::{self, BBox, Point2, QPoint};
use crate::measure::{MassValue, Measure};
use crate::rational::{self, Rational};

pub use exact::achieved_levels;
pub use radial::{find_deep_point, trace_region, BoundarySample, RadialOptions};

/// Sampled boundary of a region together with its certification data.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxBody {
    /// Point of depth at least the level from which rays were cast.
    pub center: Point2,
    pub samples: Vec<BoundarySample>,
    /// Width of every inner/outer bracket.
    pub tolerance: f64,
    /// Bound, valid for convex regions, on how far the boundary bulges past
    /// the chords between neighbouring samples.
    pub chord_deviation: f64,
}

impl ApproxBody {
    /// Convex polygon through the inner samples.
    pub fn polygon(&self) -> Vec<Point2> {
        let pts: Vec<Point2> = self.samples.iter().map(|s| s.inner).collect();
        geometry::convex_hull_f64(&pts)
    }

    /// Bound on the distance from the true region to [`ApproxBody::polygon`]:
    /// the bulge bound plus bracket noise at both ends of a chord.
    pub fn hausdorff_bound(&self) -> f64 {
        2.0 * self.tolerance + self.chord_deviation
    }

    pub fn clipped(&self) -> usize {
        self.samples.iter().filter(|s| s.clipped()).count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RegionShape {
    Empty {
        diagnostic: String,
    },
    /// Exact counterclockwise vertices; one vertex for a point, two for a segment.
    Polygon {
        vertices: Vec<QPoint>,
    },
    Approx(ApproxBody),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralRegion {
    pub level: MassValue,
    pub shape: RegionShape,
}

impl CentralRegion {
    pub fn is_empty(&self) -> bool {
        matches!(self.shape, RegionShape::Empty { .. })
    }

    /// Vertices (exact mode) or inner boundary samples (approximate mode), in doubles.
    pub fn boundary(&self) -> Vec<Point2> {
        match &self.shape {
            RegionShape::Empty { .. } => Vec::new(),
            RegionShape::Polygon { vertices } => vertices.iter().map(|v| v.approx()).collect(),
            RegionShape::Approx(body) => body.samples.iter().map(|s| s.inner).collect(),
        }
    }

    /// Convex polygon representing the region in doubles.
    pub fn polygon(&self) -> Vec<Point2> {
        match &self.shape {
            RegionShape::Approx(body) => body.polygon(),
            _ => self.boundary(),
        }
    }

    /// Exact membership; `None` for approximate regions.
    pub fn contains_exact(&self, p: &QPoint) -> Option<bool> {
        match &self.shape {
            RegionShape::Empty { .. } => Some(false),
            RegionShape::Polygon { vertices } => Some(geometry::convex_contains(vertices, p)),
            RegionShape::Approx(_) => None,
        }
    }

    /// Slack to allow when testing containment against [`CentralRegion::polygon`].
    pub fn tolerance(&self) -> f64 {
        match &self.shape {
            RegionShape::Approx(body) => body.hausdorff_bound(),
            _ => 0.0,
        }
    }

    /// `x,y` rows, one per vertex or boundary sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in self.boundary() {
            out.push_str(&format!("{:?},{:?}\n", p.x, p.y));
        }
        out
    }

    pub fn export(&self) -> RegionExport {
        let (kind, exact, tolerance, chord, clipped, diagnostic) = match &self.shape {
            RegionShape::Empty { diagnostic } => ("empty", None, None, None, None, Some(diagnostic.clone())),
            RegionShape::Polygon { vertices } => (
                "polygon",
                Some(
                    vertices
                        .iter()
                        .map(|v| [rational::format_rational(v.x()), rational::format_rational(v.y())])
                        .collect(),
                ),
                None,
                None,
                None,
                None,
            ),
            RegionShape::Approx(b) => (
                "approx",
                None,
                Some(b.tolerance),
                Some(b.chord_deviation),
                Some(b.clipped()),
                None,
            ),
        };
        RegionExport {
            level: self.level.to_f64(),
            level_exact: self.level.exact().map(rational::format_rational),
            kind,
            vertices: self.boundary().iter().map(|p| [p.x, p.y]).collect(),
            exact_vertices: exact,
            tolerance,
            chord_deviation: chord,
            clipped_samples: clipped,
            diagnostic,
        }
    }
}

/// Serialized form of a region.
#[derive(Clone, Debug, Serialize)]
pub struct RegionExport {
    pub level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_exact: Option<String>,
    pub kind: &'static str,
    pub vertices: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_vertices: Option<Vec<[String; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chord_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clipped_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Exact `D_alpha` of a purely atomic measure, verified by exact evaluation
/// at every vertex and just outside every edge.
pub fn central_region_atomic(m: &Measure, alpha: &Rational) -> Result<CentralRegion> {
    let vertices = exact::region_vertices(m, alpha)?;
    let shape = if vertices.is_empty() {
        let max = achieved_levels(m)?.last().cloned().unwrap_or_default();
        RegionShape::Empty {
            diagnostic: format!(
                "level {} exceeds the maximal depth {}",
                rational::format_rational(alpha),
                rational::format_rational(&max)
            ),
        }
    } else {
        RegionShape::Polygon { vertices }
    };
    Ok(CentralRegion {
        level: MassValue::Exact(alpha.clone()),
        shape,
    })
}

/// Approximate `D_alpha` from depth evaluations only. The rays start at
/// `deep` when given, otherwise at the deepest point found over `bbox`.
pub fn central_region_mixture(
    source: &dyn DepthSource,
    alpha: f64,
    bbox: BBox,
    deep: Option<Point2>,
    opts: &RadialOptions,
) -> Result<CentralRegion> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::NonPositiveLevel(alpha.to_string()));
    }
    if !(opts.tol > 0.0 && opts.chord_tol > 0.0) {
        return Err(Error::Precondition("tolerances must be positive".into()));
    }
    let (center, depth) = match deep {
        Some(p) => (p, source.depth_value(p)),
        None => find_deep_point(source, &bbox, opts.search_grid),
    };
    let level = MassValue::Approx(alpha);
    if depth < alpha {
        return Ok(CentralRegion {
            level,
            shape: RegionShape::Empty {
                diagnostic: format!("deepest point found {center} has depth {depth:.12}, below the level"),
            },
        });
    }
    let (samples, chord_deviation) = trace_region(source, center, alpha, bbox, opts);
    Ok(CentralRegion {
        level,
        shape: RegionShape::Approx(ApproxBody {
            center,
            samples,
            tolerance: opts.tol,
            chord_deviation,
        }),
    })
}

/// Exact region for atomic measures (levels rounded exactly from the
/// double), radial approximation otherwise.
pub fn central_region(m: &Measure, alpha: f64, bbox: BBox, opts: &RadialOptions) -> Result<CentralRegion> {
    if m.is_atomic() {
        let a = rational::from_f64_decimal(alpha).ok_or_else(|| Error::NonPositiveLevel(alpha.to_string()))?;
        central_region_atomic(m, &a)
    } else {
        central_region_mixture(m, alpha, bbox, None, opts)
    }
}

/// A corner-like boundary point with the radius within which it is located.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtremePoint {
    pub location: Point2,
    pub radius: f64,
    /// Turning angle of the boundary at this point, in radians.
    pub turning: f64,
}

/// Settings for corner detection on sampled boundaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerOptions {
    /// Arc length on each side used to measure the turning, as a fraction of the perimeter.
    pub window: f64,
    /// Minimum turning angle in radians.
    pub threshold: f64,
}

impl Default for CornerOptions {
    fn default() -> Self {
        CornerOptions {
            window: 0.01,
            threshold: 0.15,
        }
    }
}

pub fn extreme_points(r: &CentralRegion) -> Vec<ExtremePoint> {
    extreme_points_with(r, &CornerOptions::default())
}

/// Vertices of exact polygons; for sampled boundaries, points where the
/// boundary turns sharply over a short arc.
pub fn extreme_points_with(r: &CentralRegion, opts: &CornerOptions) -> Vec<ExtremePoint> {
    match &r.shape {
        RegionShape::Empty { .. } => Vec::new(),
        RegionShape::Polygon { vertices } => {
            let n = vertices.len();
            (0..n)
                .map(|i| {
                    let v = vertices[i].approx();
                    let turning = if n < 3 {
                        std::f64::consts::PI
                    } else {
                        let a = v - vertices[(i + n - 1) % n].approx();
                        let b = vertices[(i + 1) % n].approx() - v;
                        a.cross(b).atan2(a.dot(b))
                    };
                    ExtremePoint {
                        location: v,
                        radius: 0.0,
                        turning,
                    }
                })
                .collect()
        }
        RegionShape::Approx(body) => sampled_corners(body, opts),
    }
}

fn sampled_corners(body: &ApproxBody, opts: &CornerOptions) -> Vec<ExtremePoint> {
    // A region no wider than the brackets is a point, which is its own corner.
    let spread = body
        .samples
        .iter()
        .map(|s| s.inner.distance(body.center))
        .fold(0.0, f64::max);
    if !body.samples.is_empty() && spread <= 2.0 * body.tolerance {
        return vec![ExtremePoint {
            location: body.center,
            radius: spread + body.hausdorff_bound(),
            turning: std::f64::consts::PI,
        }];
    }
    // Drop repeated points (several rays can end at the same corner).
    let mut pts: Vec<Point2> = Vec::with_capacity(body.samples.len());
    for s in &body.samples {
        if pts.last().is_none_or(|p| p.distance(s.inner) > 0.1 * body.tolerance) {
            pts.push(s.inner);
        }
    }
    while pts.len() > 1 && pts[0].distance(pts[pts.len() - 1]) <= 0.1 * body.tolerance {
        pts.pop();
    }
    let n = pts.len();
    if n < 8 {
        return Vec::new();
    }
    let seg: Vec<f64> = (0..n).map(|i| pts[i].distance(pts[(i + 1) % n])).collect();
    let perimeter: f64 = seg.iter().sum();
    let window = opts.window * perimeter;
    if window <= 0.0 {
        return Vec::new();
    }
    let back = |i: usize, len: f64| {
        let (mut j, mut acc) = (i, 0.0);
        while acc < len {
            j = (j + n - 1) % n;
            acc += seg[j];
            if j == i {
                break;
            }
        }
        j
    };
    let fwd = |i: usize, len: f64| {
        let (mut j, mut acc) = (i, 0.0);
        while acc < len {
            acc += seg[j];
            j = (j + 1) % n;
            if j == i {
                break;
            }
        }
        j
    };
    let turning: Vec<f64> = (0..n)
        .map(|i| {
            let a = pts[i] - pts[back(i, window)];
            let b = pts[fwd(i, window)] - pts[i];
            a.cross(b).atan2(a.dot(b))
        })
        .collect();
    let sharp: Vec<bool> = turning.iter().map(|t| *t > opts.threshold).collect();
    if sharp.iter().all(|s| *s) {
        return Vec::new();
    }
    // Rotate so that index 0 is not sharp, then collect runs of sharp samples.
    let start = sharp.iter().position(|s| !*s).expect("some sample is not sharp");
    let mut out = Vec::new();
    let mut k = 0;
    while k < n {
        let i = (start + k) % n;
        if !sharp[i] {
            k += 1;
            continue;
        }
        let mut e = k;
        while e + 1 < n && sharp[(start + e + 1) % n] {
            e += 1;
        }
        let (s_idx, e_idx) = (i, (start + e) % n);
        let peak = (k..=e)
            .map(|m| (start + m) % n)
            .max_by(|a, b| turning[*a].total_cmp(&turning[*b]))
            .expect("non-empty run");
        // Edges on both sides of the run, extended to meet.
        let p1 = pts[back(s_idx, window)];
        let p2 = pts[s_idx];
        let q1 = pts[e_idx];
        let q2 = pts[fwd(e_idx, window)];
        let location = line_intersection(p1, p2, q1, q2)
            .filter(|c| c.distance(pts[peak]) <= 2.0 * window)
            .unwrap_or(pts[peak]);
        out.push(ExtremePoint {
            location,
            radius: location.distance(pts[peak]) + body.hausdorff_bound(),
            turning: turning[peak],
        });
        k = e + 1;
    }
    out
}

fn line_intersection(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> Option<Point2> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let den = d1.cross(d2);
    if den.abs() <= 1e-12 * d1.norm() * d2.norm() {
        return None;
    }
    let t = (q1 - p1).cross(d2) / den;
    Some(p1 + d1 * t)
}

/// First failure of `D_{levels[i+1]} ⊆ D_{levels[i]}` among regions sorted by level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestingViolation {
    pub outer: usize,
    pub inner: usize,
    pub point: Point2,
    pub distance: f64,
}

pub fn check_nesting(regions: &[CentralRegion]) -> Option<NestingViolation> {
    for k in 0..regions.len().saturating_sub(1) {
        let (outer, inner) = (&regions[k], &regions[k + 1]);
        if inner.is_empty() {
            continue;
        }
        if let (RegionShape::Polygon { vertices: ov }, RegionShape::Polygon { vertices: iv }) =
            (&outer.shape, &inner.shape)
        {
            if let Some(v) = iv.iter().find(|v| !geometry::convex_contains(ov, v)) {
                return Some(NestingViolation {
                    outer: k,
                    inner: k + 1,
                    point: v.approx(),
                    distance: geometry::distance_to_convex(&outer.polygon(), v.approx()),
                });
            }
            continue;
        }
        let poly = outer.polygon();
        let slack = outer.tolerance() + inner.tolerance();
        for p in inner.boundary() {
            let d = geometry::distance_to_convex(&poly, p);
            if d > slack {
                return Some(NestingViolation {
                    outer: k,
                    inner: k + 1,
                    point: p,
                    distance: d,
                });
            }
        }
    }
    None
}

/// Computes the regions at ascending `levels` and checks their nesting.
pub fn region_nesting_check(
    m: &Measure,
    levels: &[f64],
    bbox: BBox,
    opts: &RadialOptions,
) -> Result<Option<NestingViolation>> {
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let regions = sorted
        .iter()
        .map(|&a| central_region(m, a, bbox, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(check_nesting(&regions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depth::FnDepth;
    use crate::measure::Atom;
    use crate::rational::int;

    fn triangle() -> Measure {
        Measure::atomic(vec![
            Atom::at(0.0, 0.0, 1).unwrap(),
            Atom::at(1.0, 0.0, 1).unwrap(),
            Atom::at(0.0, 1.0, 1).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn triangle_region_and_corners() {
        let r = central_region_atomic(&triangle(), &int(1)).unwrap();
        let corners = extreme_points(&r);
        assert_eq!(corners.len(), 3);
        let empty = central_region_atomic(&triangle(), &int(2)).unwrap();
        assert!(empty.is_empty());
        assert!(check_nesting(&[r, empty]).is_none());
    }

    #[test]
    fn disk_boundary_has_no_corners() {
        let disk = FnDepth(|p: Point2| (1.0 - p.norm()).max(0.0));
        let bbox = BBox::square(2.0).unwrap();
        let r = central_region_mixture(&disk, 0.5, bbox, None, &RadialOptions::default()).unwrap();
        let poly = r.polygon();
        assert!(poly.iter().all(|p| (p.norm() - 0.5).abs() < 1e-5));
        assert!(extreme_points(&r).is_empty());
    }

    #[test]
    fn square_corners_are_found() {
        let square = FnDepth(|p: Point2| (1.0 - p.x.abs().max(p.y.abs())).max(0.0));
        let bbox = BBox::square(2.0).unwrap();
        let r = central_region_mixture(&square, 0.5, bbox, None, &RadialOptions::default()).unwrap();
        let corners = extreme_points(&r);
        assert_eq!(corners.len(), 4, "{corners:?}");
        for c in corners {
            assert!((c.location.x.abs() - 0.5).abs() < 1e-5 && (c.location.y.abs() - 0.5).abs() < 1e-5);
        }
    }

    #[test]
    fn level_above_the_maximum_is_empty() {
        let disk = FnDepth(|p: Point2| (1.0 - p.norm()).max(0.0));
        let r =
            central_region_mixture(&disk, 1.5, BBox::square(2.0).unwrap(), None, &RadialOptions::default()).unwrap();
        assert!(r.is_empty());
    }
}

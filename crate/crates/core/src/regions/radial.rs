//! Certified polygonal approximation of central regions by radial bisection.
//!
//! Depth is quasi-concave, so along any ray from a point of depth at least
//! `alpha` the set where depth stays at least `alpha` is an interval
//! starting at that point. Each boundary crossing is bracketed by an inner
//! point (depth at least `alpha`) and an outer point (depth below `alpha`)
//! at most `tol` apart. Directions are added until, by convexity, the
//! boundary cannot bulge past any chord between neighbours by more than
//! `chord_tol`.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use crate::depth::DepthSource;
use crate::geometry::{BBox, Point2};

#[derive(Clone, Debug, PartialEq)]
pub struct RadialOptions {
    /// Initial number of equally spaced directions.
    pub directions: usize,
    /// Width of each inner/outer bracket.
    pub tol: f64,
    /// Target bound on how far the boundary may bulge past the chord between
    /// neighbouring samples; intervals above it are split.
    pub chord_tol: f64,
    /// Maximum number of halvings of an initial angular step.
    pub max_refine: u32,
    /// Resolution of the coarse grid searched for a deep point.
    pub search_grid: usize,
}

impl Default for RadialOptions {
    fn default() -> Self {
        RadialOptions {
            directions: 256,
            tol: 1e-6,
            chord_tol: 2e-5,
            max_refine: 30,
            search_grid: 41,
        }
    }
}

/// One boundary crossing along a ray from the deep point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundarySample {
    pub angle: f64,
    /// Depth here is at least the level.
    pub inner: Point2,
    /// Depth here is below the level; `None` when the ray left the box first.
    pub outer: Option<Point2>,
}

impl BoundarySample {
    pub fn clipped(&self) -> bool {
        self.outer.is_none()
    }
}

/// Deepest grid node over `bbox`, improved by a compass search.
pub fn find_deep_point(source: &dyn DepthSource, bbox: &BBox, grid: usize) -> (Point2, f64) {
    let n = grid.max(2);
    let nodes = bbox.grid(n, n);
    let values: Vec<f64> = nodes.par_iter().map(|p| source.depth_value(*p)).collect();
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        // Ties go to the node closest to the box center for determinism
        // and to stay away from the box edges.
        let better = *v > values[best]
            || (*v == values[best] && nodes[k].distance(bbox.center()) < nodes[best].distance(bbox.center()));
        if better {
            best = k;
        }
    }
    let (mut p, mut v) = (nodes[best], values[best]);
    let mut step = bbox.width().max(bbox.height()) / (n - 1) as f64;
    let stop = 1e-9 * bbox.diagonal();
    while step > stop {
        let moves: Vec<(Point2, f64)> = (0..8)
            .into_par_iter()
            .map(|k| {
                let q = p + Point2::from_angle(k as f64 * TAU / 8.0) * step;
                (
                    q,
                    if bbox.contains(q) {
                        source.depth_value(q)
                    } else {
                        f64::NEG_INFINITY
                    },
                )
            })
            .collect();
        match moves
            .iter()
            .copied()
            .filter(|m| m.1 > v)
            .max_by(|a, b| a.1.total_cmp(&b.1))
        {
            Some((q, w)) => {
                p = q;
                v = w;
            }
            None => step *= 0.5,
        }
    }
    (p, v)
}

struct Tracer<'a> {
    source: &'a dyn DepthSource,
    center: Point2,
    level: f64,
    bbox: BBox,
    tol: f64,
}

impl Tracer<'_> {
    fn inside(&self, p: Point2, angle: f64) -> bool {
        self.source.depth_at_least(p, self.level, Some(angle))
    }

    fn trace(&self, angle: f64, warm: Option<f64>) -> BoundarySample {
        let dir = Point2::from_angle(angle);
        let at = |t: f64| self.center + dir * t;
        let reach = self.bbox.exit_distance(self.center, dir);
        if self.inside(at(reach), angle) {
            return BoundarySample {
                angle,
                inner: at(reach),
                outer: None,
            };
        }
        let (mut lo, mut hi) = (0.0, reach);
        if let Some(r) = warm.filter(|r| *r > 0.0 && *r < reach) {
            let mut step = 64.0 * self.tol;
            if self.inside(at(r), angle) {
                lo = r;
                loop {
                    let t = lo + step;
                    if t >= reach {
                        break;
                    }
                    if self.inside(at(t), angle) {
                        lo = t;
                        step *= 4.0;
                    } else {
                        hi = t;
                        break;
                    }
                }
            } else {
                hi = r;
                loop {
                    let t = hi - step;
                    if t <= 0.0 {
                        break;
                    }
                    if self.inside(at(t), angle) {
                        lo = t;
                        break;
                    }
                    hi = t;
                    step *= 4.0;
                }
            }
        }
        while hi - lo > self.tol {
            let mid = 0.5 * (lo + hi);
            if self.inside(at(mid), angle) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        BoundarySample {
            angle,
            inner: at(lo),
            outer: Some(at(hi)),
        }
    }
}

/// How far the convex boundary between `a` and `b` can bulge past the chord
/// `ab`: it lies inside the triangle cut off by the lines extending the
/// neighbouring chords `pa` and `bq`. Turns to the right can only come from
/// bracket noise and count as straight.
fn bulge_bound(p: Point2, a: Point2, b: Point2, q: Point2) -> f64 {
    let chord = b - a;
    let len = chord.norm();
    if len == 0.0 {
        return 0.0;
    }
    let turn = |u: Point2, v: Point2| u.cross(v).atan2(u.dot(v));
    let ta = if a == p { 0.0 } else { turn(a - p, chord).max(0.0) };
    let tb = if q == b { 0.0 } else { turn(chord, q - b).max(0.0) };
    if ta == 0.0 || tb == 0.0 {
        return 0.0;
    }
    if ta + tb >= std::f64::consts::PI {
        return len;
    }
    // Apex along the extension of `pa`; its distance to the segment, not the
    // line, matters at sharp corners.
    let along = len * tb.sin() / (ta + tb).sin();
    let apex = a + (a - p) * (along / (a - p).norm());
    crate::geometry::segment_distance(a, b, apex)
}

/// Traces the boundary of `{depth >= level}` around `center`, which must
/// itself be at least `level` deep. Returns samples sorted by angle and the
/// largest bulge bound left on the final mesh.
pub fn trace_region(
    source: &dyn DepthSource,
    center: Point2,
    level: f64,
    bbox: BBox,
    opts: &RadialOptions,
) -> (Vec<BoundarySample>, f64) {
    let tracer = Tracer {
        source,
        center,
        level,
        bbox,
        tol: opts.tol,
    };
    let n = opts.directions.max(8);
    let step = TAU / n as f64;
    let min_width = step / 2f64.powi(opts.max_refine as i32);
    // First direction cold, then the rest in parallel, warm-started from it.
    let first = tracer.trace(0.0, None);
    let r0 = first.inner.distance(center);
    let mut samples: Vec<BoundarySample> = std::iter::once(first)
        .chain(
            (1..n)
                .into_par_iter()
                .map(|k| tracer.trace(k as f64 * step, Some(r0)))
                .collect::<Vec<_>>(),
        )
        .collect();
    loop {
        let m = samples.len();
        let width = |i: usize| {
            let (a, b) = (samples[i].angle, samples[(i + 1) % m].angle);
            if b > a {
                b - a
            } else {
                b + TAU - a
            }
        };
        let chord = |i: usize| samples[i].inner.distance(samples[(i + 1) % m].inner);
        let bounds: Vec<f64> = (0..m)
            .map(|i| {
                bulge_bound(
                    samples[(i + m - 1) % m].inner,
                    samples[i].inner,
                    samples[(i + 1) % m].inner,
                    samples[(i + 2) % m].inner,
                )
            })
            .collect();
        // Below a few bracket widths the chords carry no more information.
        let split: Vec<usize> = (0..m)
            .filter(|&i| bounds[i] > opts.chord_tol && chord(i) > 8.0 * opts.tol && width(i) > 2.0 * min_width)
            .collect();
        if split.is_empty() {
            let worst = bounds.iter().copied().fold(0.0, f64::max);
            return (samples, worst);
        }
        let added: Vec<BoundarySample> = split
            .par_iter()
            .map(|&i| {
                let (a, b) = (samples[i], samples[(i + 1) % m]);
                let mid = (a.angle + 0.5 * width(i)).rem_euclid(TAU);
                let warm = 0.5 * (a.inner.distance(center) + b.inner.distance(center));
                tracer.trace(mid, Some(warm))
            })
            .collect();
        samples.extend(added);
        samples.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    }
}

//! Exact recovery of a finitely atomic measure from an exact depth oracle.
//!
//! Regions of atomic measures are polygons whose edges lie on lines through
//! atoms. Each region is traced by bisecting rays in doubles while the
//! oracle is evaluated exactly at the double points, edge lines are fitted to
//! three collinear boundary points and snapped to rationals with small
//! denominators, and the resulting polygon is verified exactly. Every atom is
//! a vertex of some region, so the vertices are the atom candidates. Their
//! weights are read off depth jumps and the atom set is chosen by a pruned
//! search whose answer must reproduce the oracle exactly.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::depth::atomic::sweep_value;
use crate::depth::ExactDepth;
use crate::error::{Error, Result};
use crate::geometry::{self, BBox, Line, Point2, QPoint};
use crate::measure::{Atom, Measure};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct ExactOptions {
    /// Probe grid resolution per axis over the whole box.
    pub probe_grid: usize,
    /// Second probe grid per axis over the box around the region of positive depth.
    pub dense_grid: usize,
    /// Initial rays per region.
    pub rays: usize,
    /// Largest denominator accepted for the slope of an edge line.
    pub slope_denominator: u64,
    /// Largest denominator accepted for the offset of an edge line.
    pub offset_denominator: u64,
    /// Limit on search nodes when choosing the atom set.
    pub node_budget: usize,
    /// Number of fresh random points used for the final check.
    pub verify_points: usize,
    pub seed: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            probe_grid: 40,
            dense_grid: 160,
            rays: 16,
            slope_denominator: 4096,
            offset_denominator: 1 << 20,
            node_budget: 20_000,
            verify_points: 400,
            seed: 7,
        }
    }
}

/// Counts oracle calls.
struct Counted<'a> {
    oracle: &'a dyn ExactDepth,
    calls: AtomicU64,
}

impl Counted<'_> {
    fn depth(&self, p: &QPoint) -> Rational {
        self.calls.fetch_add(1, AtomicOrdering::Relaxed);
        self.oracle.depth_exact(p)
    }
}

fn q(v: f64) -> Rational {
    rational::from_f64_exact(v).expect("finite")
}

/// `c + t * dir` rounded to doubles, which keeps the oracle's arithmetic
/// small; the rounding is far below the accuracy the edge fits need.
fn along(c: &QPoint, dir: Point2, t: f64) -> QPoint {
    if t == 0.0 {
        return c.clone();
    }
    QPoint::from_f64(c.approx() + dir * t).expect("finite ray point")
}

/// Exact line through two nearby points after snapping to small denominators.
fn snap_line(a: Point2, b: Point2, opts: &ExactOptions) -> Option<Line> {
    let d = b - a;
    // Normal (nx, ny) with the larger component scaled to one.
    let (nx, ny) = (-d.y, d.x);
    let (ia, ib) = if nx.abs() >= ny.abs() {
        let (p, qd) = rational::best_approximation(ny / nx, opts.slope_denominator)?;
        (qd as i128, p)
    } else {
        let (p, qd) = rational::best_approximation(nx / ny, opts.slope_denominator)?;
        (p, qd as i128)
    };
    let (fa, fb) = (ia as f64, ib as f64);
    let c = 0.5 * (fa * (a.x + b.x) + fb * (a.y + b.y));
    let (cp, cq) = rational::best_approximation(c, opts.offset_denominator)?;
    let line = Line::new(
        Rational::from_integer(ia.into()),
        Rational::from_integer(ib.into()),
        rational::from_i128_ratio(cp, cq),
    )?;
    let scale = 1.0 + a.norm().max(b.norm());
    (line.distance_approx(a) <= 1e-9 * scale && line.distance_approx(b) <= 1e-9 * scale).then_some(line)
}

struct Tracer<'a> {
    oracle: &'a Counted<'a>,
    beta: &'a Rational,
    center: QPoint,
    reach: f64,
    resolution: f64,
}

impl Tracer<'_> {
    fn inside(&self, dir: Point2, t: f64) -> bool {
        self.oracle.depth(&along(&self.center, dir, t)) >= *self.beta
    }

    /// Last point along the ray still at least `beta` deep, to double
    /// precision. A guess for the distance narrows the first bracket.
    fn boundary(&self, angle: f64, guess: Option<f64>) -> (f64, Point2) {
        let dir = Point2::from_angle(angle);
        let (mut lo, mut hi) = (0.0, self.reach);
        if let Some(g) = guess.filter(|g| *g > 0.0 && *g < self.reach) {
            let mut step = 1e-6 * self.reach;
            if self.inside(dir, g) {
                lo = g;
                while lo + step < self.reach {
                    if !self.inside(dir, lo + step) {
                        hi = lo + step;
                        break;
                    }
                    lo += step;
                    step *= 8.0;
                }
            } else {
                hi = g;
                while hi - step > 0.0 {
                    if self.inside(dir, hi - step) {
                        lo = hi - step;
                        break;
                    }
                    hi -= step;
                    step *= 8.0;
                }
            }
        }
        while hi - lo > self.resolution {
            let mid = 0.5 * (lo + hi);
            if self.inside(dir, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, self.center.approx() + dir * lo)
    }

    /// Edge line through the boundary point at `angle`, from two neighbours
    /// on either side; `None` near a vertex.
    fn edge_at(&self, angle: f64, opts: &ExactOptions) -> Option<Line> {
        let (t, m) = self.boundary(angle, None);
        for h in [1e-3, 1e-5] {
            let (_, a) = self.boundary(angle - h, Some(t));
            let (_, b) = self.boundary(angle + h, Some(t));
            let span = a.distance(b);
            if span == 0.0 {
                return None;
            }
            let off = geometry::segment_distance(a, b, m);
            if off <= 1e-11 * (1.0 + self.reach) {
                return snap_line(a, b, opts);
            }
        }
        None
    }
}

/// A traced region: exact counterclockwise vertices and supporting lines.
#[derive(Clone, Debug)]
pub(crate) struct TracedRegion {
    pub level: Rational,
    pub vertices: Vec<QPoint>,
    pub lines: Vec<Line>,
}

fn bbox_polygon(bbox: &BBox) -> Vec<QPoint> {
    let (x0, y0, x1, y1) = (q(bbox.min.x), q(bbox.min.y), q(bbox.max.x), q(bbox.max.y));
    vec![
        QPoint::new(x0.clone(), y0.clone()),
        QPoint::new(x1.clone(), y0),
        QPoint::new(x1, y1.clone()),
        QPoint::new(x0, y1),
    ]
}

fn polygon_from_lines(bbox: &BBox, lines: &[Line], center: &QPoint) -> Vec<QPoint> {
    let mut poly = bbox_polygon(bbox);
    for l in lines {
        let keep = l.side(center);
        poly = crate::regions::exact::clip(&poly, l, keep);
    }
    poly
}

fn probe_step(bbox: &BBox) -> Rational {
    q(bbox.diagonal()) / Rational::from_integer((1i64 << 40).into())
}

/// Points just outside every edge of `poly` (counterclockwise, at least three vertices).
fn outside_points(poly: &[QPoint], eps: &Rational) -> Vec<QPoint> {
    let n = poly.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (p, r) = (&poly[i], &poly[(i + 1) % n]);
        let (dx, dy) = r.sub(p);
        let len = dx.abs() + dy.abs();
        let third = p.offset(&dx, &dy, &rational::ratio(1, 3));
        out.push(third.offset(&dy, &-dx.clone(), &(eps / &len)));
    }
    out
}

/// Traces `{D >= beta}` from `center`, which must be at least `beta` deep.
fn trace_region(
    oracle: &Counted,
    beta: &Rational,
    center: &QPoint,
    bbox: &BBox,
    opts: &ExactOptions,
) -> Result<TracedRegion> {
    let reach = 2.0 * bbox.diagonal();
    let mut tracer = Tracer {
        oracle,
        beta,
        center: center.clone(),
        reach,
        resolution: 1e-14 * bbox.diagonal(),
    };
    let n = opts.rays.max(8);
    let step = std::f64::consts::TAU / n as f64;
    let first: Vec<(f64, f64, Point2)> = (0..n)
        .map(|k| {
            let a = (k as f64 + 0.37) * step;
            let (t, p) = tracer.boundary(a, None);
            (a, t, p)
        })
        .collect();
    let inside: Vec<Point2> = first.iter().filter(|s| s.1 > 0.0).map(|s| s.2).collect();
    if inside.is_empty() {
        return Ok(TracedRegion {
            level: beta.clone(),
            vertices: vec![center.clone()],
            lines: Vec::new(),
        });
    }
    // Recentre at the centroid of the boundary points, which is interior
    // unless the region is degenerate.
    let centroid = first.iter().fold(Point2::ORIGIN, |s, p| s + p.2) * (1.0 / n as f64);
    let recentred = QPoint::from_f64(centroid)?;
    let width = first.iter().map(|s| s.1).fold(0.0, f64::max);
    if oracle.depth(&recentred) >= *beta && width > 0.0 {
        tracer.center = recentred;
    }
    let center = tracer.center.clone();
    let mut lines: Vec<Line> = Vec::new();
    let add = |l: Line, lines: &mut Vec<Line>| {
        if !lines.contains(&l) && l.side(&center) != Ordering::Equal {
            lines.push(l);
        }
    };
    for k in 0..n {
        if let Some(l) = tracer.edge_at((k as f64 + 0.37) * step, opts) {
            add(l, &mut lines);
        }
    }
    let eps = probe_step(bbox);
    let c0 = center.approx();
    for _round in 0..64 {
        let poly = polygon_from_lines(bbox, &lines, &center);
        if poly.len() < 3 {
            return Err(Error::RegionVerification(format!(
                "traced polygon at level {} collapsed",
                rational::format_rational(beta)
            )));
        }
        let bad = poly.iter().find(|v| oracle.depth(v) < *beta);
        let Some(v) = bad else {
            if let Some(p) = outside_points(&poly, &eps).iter().find(|p| oracle.depth(p) >= *beta) {
                return Err(Error::RegionVerification(format!(
                    "point {p:?} outside the traced polygon is deep"
                )));
            }
            return Ok(TracedRegion {
                level: beta.clone(),
                vertices: poly,
                lines,
            });
        };
        // The ray toward a shallow vertex crosses an edge not found yet.
        let towards = (v.approx() - c0).angle();
        let mut found = false;
        for jitter in [0.0, 1e-4, -1e-4, 3e-4, -3e-4, 1e-2, -1e-2] {
            if let Some(l) = tracer.edge_at(towards + jitter, opts) {
                if !lines.contains(&l) {
                    add(l, &mut lines);
                    found = true;
                    break;
                }
            }
        }
        if !found {
            return Err(Error::RegionVerification(format!(
                "no edge found toward shallow vertex {v:?} at level {}",
                rational::format_rational(beta)
            )));
        }
    }
    Err(Error::RegionVerification("edge search did not converge".into()))
}

/// Depth lost just beyond `v` moving away from `z`, stabilized by halving.
fn jump_from(
    oracle: &Counted,
    v: &QPoint,
    depth_v: &Rational,
    dir: (Rational, Rational),
    scale: f64,
) -> Option<Rational> {
    let len = dir.0.abs().max(dir.1.abs());
    if len.is_zero() {
        return None;
    }
    let mut t = q(scale * 2f64.powi(-30)) / len;
    let mut prev = oracle.depth(&v.offset(&dir.0, &dir.1, &t));
    for _ in 0..40 {
        t /= Rational::from_integer(2.into());
        let next = oracle.depth(&v.offset(&dir.0, &dir.1, &t));
        if next == prev {
            return Some(depth_v - next);
        }
        prev = next;
    }
    None
}

/// One vertex considered as an atom.
#[derive(Clone, Debug, Serialize)]
pub struct VertexCandidate {
    pub location: [String; 2],
    pub depth: String,
    pub jump: Option<String>,
    /// Jump taken over all directions because no deeper point is known.
    pub median: bool,
    /// Hull vertex of the support, hence certainly an atom.
    pub forced: bool,
    pub accepted: bool,
}

/// Outcome of [`reconstruct_finite_atomic`].
#[derive(Clone, Debug, Serialize)]
pub struct ExactReport {
    pub levels: Vec<String>,
    pub regions: usize,
    pub candidates: Vec<VertexCandidate>,
    pub search_nodes: usize,
    pub probe_points: usize,
    pub verification_points: usize,
    pub oracle_calls: u64,
    /// Largest `|reconstructed - oracle|` over the fresh points.
    pub max_deviation: String,
    pub verdict: Verdict,
    /// A point where the reconstruction disagrees with the oracle.
    pub witness: Option<[String; 2]>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

fn format_point(p: &QPoint) -> [String; 2] {
    [rational::format_rational(p.x()), rational::format_rational(p.y())]
}

fn probe_points(bbox: &BBox, n: usize) -> Vec<QPoint> {
    // Irregular offsets keep probes off the lines through lattice points.
    let n = n.max(2) as i64;
    let (x0, y0) = (q(bbox.min.x), q(bbox.min.y));
    let (w, h) = (q(bbox.width()), q(bbox.height()));
    let mut out = Vec::with_capacity((n * n) as usize);
    for j in 0..n {
        for i in 0..n {
            let fx = (Rational::from_integer(i.into()) + rational::ratio(509, 1009)) / Rational::from_integer(n.into());
            let fy = (Rational::from_integer(j.into()) + rational::ratio(487, 997)) / Rational::from_integer(n.into());
            out.push(QPoint::new(&x0 + &w * fx, &y0 + &h * fy));
        }
    }
    out
}

/// Bounding box of exact points, slightly enlarged; `None` when degenerate.
fn vertex_box(points: &[QPoint]) -> Option<BBox> {
    let approx: Vec<Point2> = points.iter().map(QPoint::approx).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &approx {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let pad = 1e-3 * ((x1 - x0) + (y1 - y0)).max(1e-9);
    BBox::new(x0 - pad, y0 - pad, x1 + pad, y1 + pad).ok()
}

fn random_points(bbox: &BBox, n: usize, seed: u64) -> Vec<QPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let den = Rational::from_integer((1i64 << 24).into());
    (0..n)
        .map(|_| {
            let fx = Rational::from_integer(rng.gen_range(0..1i64 << 24).into()) / &den;
            let fy = Rational::from_integer(rng.gen_range(0..1i64 << 24).into()) / &den;
            QPoint::new(
                q(bbox.min.x) + q(bbox.width()) * fx,
                q(bbox.min.y) + q(bbox.height()) * fy,
            )
        })
        .collect()
}

fn depths_of(atoms: &[Atom], points: &[QPoint]) -> Vec<Rational> {
    points.par_iter().map(|p| sweep_value(atoms, p)).collect()
}

struct Search<'a> {
    cands: &'a [(QPoint, Rational)],
    points: &'a [QPoint],
    target: &'a [Rational],
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    fn atoms(&self, chosen: &[bool], upto: usize, rest: bool) -> Vec<Atom> {
        let mut out = Vec::new();
        for (k, (p, w)) in self.cands.iter().enumerate() {
            if (k < upto && chosen[k]) || (rest && k >= upto) {
                out.push(Atom::exact(p.clone(), w.clone()));
            }
        }
        out
    }

    /// Adding mass never lowers depth, so the chosen atoms must stay below
    /// the target and the chosen atoms plus all undecided ones above it.
    fn feasible(&self, chosen: &[bool], k: usize) -> bool {
        let lower = self.atoms(chosen, k, false);
        let upper = self.atoms(chosen, k, true);
        self.points
            .par_iter()
            .zip(self.target.par_iter())
            .all(|(p, t)| sweep_value(&lower, p) <= *t && sweep_value(&upper, p) >= *t)
    }

    fn run(&mut self, chosen: &mut Vec<bool>, k: usize, forced: &[bool]) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget || !self.feasible(chosen, k) {
            return false;
        }
        if k == self.cands.len() {
            return true;
        }
        let options: &[bool] = if forced[k] { &[true] } else { &[true, false] };
        for &take in options {
            chosen[k] = take;
            if self.run(chosen, k + 1, forced) {
                return true;
            }
        }
        chosen[k] = false;
        false
    }
}

/// Recovers atoms and weights from an exact oracle of a finitely atomic
/// measure supported inside `bbox`. The verdict is PASS only when the
/// recovered measure has exactly the oracle's depth at every probe point
/// and at fresh random points.
pub fn reconstruct_finite_atomic(
    oracle: &dyn ExactDepth,
    bbox: BBox,
    opts: &ExactOptions,
) -> Result<(Measure, ExactReport)> {
    let counted = Counted {
        oracle,
        calls: AtomicU64::new(0),
    };
    let mut notes = Vec::new();
    let mut probes = probe_points(&bbox, opts.probe_grid);
    let mut known: BTreeMap<QPoint, Rational> = probes.par_iter().map(|p| (p.clone(), counted.depth(p))).collect();
    let mut regions: Vec<TracedRegion> = Vec::new();
    let mut done: BTreeSet<Rational> = BTreeSet::new();
    let mut dense_done = false;
    loop {
        let pending: Vec<Rational> = known
            .values()
            .filter(|d| d.is_positive() && !done.contains(*d))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if pending.is_empty() {
            // Small regions can hide between coarse probes; probe the box
            // around the lowest region densely once.
            let lowest = regions.iter().min_by(|a, b| a.level.cmp(&b.level));
            match lowest.and_then(|r| vertex_box(&r.vertices)) {
                Some(inner) if !dense_done => {
                    dense_done = true;
                    let extra: Vec<QPoint> = probe_points(&inner, opts.dense_grid)
                        .into_iter()
                        .filter(|p| !known.contains_key(p))
                        .collect();
                    let depths: Vec<Rational> = extra.par_iter().map(|p| counted.depth(p)).collect();
                    known.extend(extra.iter().cloned().zip(depths));
                    probes.extend(extra);
                    continue;
                }
                _ => break,
            }
        }
        let traced: Vec<Result<TracedRegion>> = pending
            .par_iter()
            .map(|beta| {
                let members: Vec<&QPoint> = known.iter().filter(|(_, d)| *d >= beta).map(|(p, _)| p).collect();
                let mut sx = Rational::zero();
                let mut sy = Rational::zero();
                for p in &members {
                    sx += p.x();
                    sy += p.y();
                }
                let k = Rational::from_integer((members.len() as i64).into());
                let mean = QPoint::new(sx / &k, sy / &k);
                let rounded = QPoint::from_f64(mean.approx())?;
                let center = if counted.depth(&rounded) >= *beta {
                    rounded
                } else {
                    mean
                };
                trace_region(&counted, beta, &center, &bbox, opts)
            })
            .collect();
        let mut new_points: Vec<QPoint> = Vec::new();
        for (beta, r) in pending.into_iter().zip(traced) {
            done.insert(beta);
            let r = r?;
            new_points.extend(r.vertices.iter().cloned());
            regions.push(r);
        }
        // Crossings of all edge lines can be vertices of regions whose
        // interior no probe hit.
        let mut lines: Vec<&Line> = regions.iter().flat_map(|r| r.lines.iter()).collect();
        lines.sort_by(|a, b| (&a.a, &a.b, &a.c).cmp(&(&b.a, &b.b, &b.c)));
        lines.dedup();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(p) = lines[i].intersection(lines[j]) {
                    if bbox.contains(p.approx()) {
                        new_points.push(p);
                    }
                }
            }
        }
        new_points.retain(|p| !known.contains_key(p));
        new_points.sort();
        new_points.dedup();
        let depths: Vec<Rational> = new_points.par_iter().map(|p| counted.depth(p)).collect();
        known.extend(new_points.into_iter().zip(depths));
    }
    regions.sort_by(|a, b| a.level.cmp(&b.level));
    let levels: Vec<String> = regions.iter().map(|r| rational::format_rational(&r.level)).collect();

    let Some(lowest) = regions.first() else {
        notes.push("no probe point has positive depth; the support is too thin for the probe grid".into());
        return finish(
            Vec::new(),
            Vec::new(),
            &counted,
            &probes,
            &known,
            &bbox,
            opts,
            levels,
            0,
            0,
            notes,
        );
    };
    let forced_set: BTreeSet<QPoint> = lowest.vertices.iter().cloned().collect();
    let mut vertex_set: BTreeSet<QPoint> = BTreeSet::new();
    for r in &regions {
        vertex_set.extend(r.vertices.iter().cloned());
    }
    let (deepest, max_depth) = known
        .iter()
        .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(p, d)| (p.clone(), d.clone()))
        .expect("probes are not empty");
    let scale = bbox.diagonal();
    let vertices: Vec<QPoint> = vertex_set.into_iter().collect();
    let jumps: Vec<(Rational, Option<Rational>, bool)> = vertices
        .par_iter()
        .map(|v| {
            let dv = counted.depth(v);
            if dv < max_depth {
                let dir = v.sub(&deepest);
                (dv.clone(), jump_from(&counted, v, &dv, dir, scale), false)
            } else {
                let mut best: Option<Rational> = None;
                for k in 0..16 {
                    let e = Point2::from_angle((k as f64 + 0.5) * std::f64::consts::TAU / 16.0);
                    if let Some(j) = jump_from(&counted, v, &dv, (q(e.x), q(e.y)), scale) {
                        if best.as_ref().is_none_or(|b| j > *b) {
                            best = Some(j);
                        }
                    }
                }
                (dv, best, true)
            }
        })
        .collect();

    let mut order: Vec<usize> = (0..vertices.len())
        .filter(|&k| jumps[k].1.as_ref().is_some_and(|j| j.is_positive()))
        .collect();
    order.sort_by(|&a, &b| jumps[a].0.cmp(&jumps[b].0).then_with(|| vertices[a].cmp(&vertices[b])));
    let cands: Vec<(QPoint, Rational)> = order
        .iter()
        .map(|&k| (vertices[k].clone(), jumps[k].1.clone().expect("filtered")))
        .collect();
    let forced: Vec<bool> = order.iter().map(|&k| forced_set.contains(&vertices[k])).collect();

    // Search against the vertices and a thinned probe set; the full probe
    // set is checked afterwards.
    let mut points: Vec<QPoint> = vertices.clone();
    points.extend(probes.iter().step_by(7).cloned());
    let target: Vec<Rational> = points
        .iter()
        .map(|p| known.get(p).cloned().unwrap_or_else(|| counted.depth(p)))
        .collect();
    let mut search = Search {
        cands: &cands,
        points: &points,
        target: &target,
        nodes: 0,
        budget: opts.node_budget,
    };
    let mut chosen = vec![false; cands.len()];
    let solved = search.run(&mut chosen, 0, &forced);
    let nodes = search.nodes;
    if !solved {
        notes.push(if nodes > opts.node_budget {
            "search budget exhausted".into()
        } else {
            "no subset of vertex candidates reproduces the oracle".into()
        });
    }
    let atoms: Vec<Atom> = if solved {
        cands
            .iter()
            .zip(&chosen)
            .filter(|(_, c)| **c)
            .map(|((p, w), _)| Atom::exact(p.clone(), w.clone()))
            .collect()
    } else {
        Vec::new()
    };
    let accepted: BTreeSet<&QPoint> = atoms.iter().map(|a| &a.location).collect();
    let candidates: Vec<VertexCandidate> = vertices
        .iter()
        .zip(&jumps)
        .map(|(v, (d, j, median))| VertexCandidate {
            location: format_point(v),
            depth: rational::format_rational(d),
            jump: j.as_ref().map(rational::format_rational),
            median: *median,
            forced: forced_set.contains(v),
            accepted: accepted.contains(v),
        })
        .collect();
    let regions_count = regions.len();
    if !solved {
        return finish(
            Vec::new(),
            candidates,
            &counted,
            &probes,
            &known,
            &bbox,
            opts,
            levels,
            regions_count,
            nodes,
            notes,
        );
    }
    finish(
        atoms,
        candidates,
        &counted,
        &probes,
        &known,
        &bbox,
        opts,
        levels,
        regions_count,
        nodes,
        notes,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    atoms: Vec<Atom>,
    candidates: Vec<VertexCandidate>,
    counted: &Counted,
    probes: &[QPoint],
    known: &BTreeMap<QPoint, Rational>,
    bbox: &BBox,
    opts: &ExactOptions,
    levels: Vec<String>,
    regions: usize,
    search_nodes: usize,
    notes: Vec<String>,
) -> Result<(Measure, ExactReport)> {
    let mut fresh = random_points(bbox, opts.verify_points / 2, opts.seed);
    if let Some(inner) = vertex_box(&atoms.iter().map(|a| a.location.clone()).collect::<Vec<_>>()) {
        fresh.extend(random_points(
            &inner,
            opts.verify_points - opts.verify_points / 2,
            opts.seed ^ 0x5eed,
        ));
    }
    let fresh_target: Vec<Rational> = fresh.par_iter().map(|p| counted.depth(p)).collect();
    let probe_target: Vec<Rational> = probes.iter().map(|p| known[p].clone()).collect();
    let mut witness = probes
        .iter()
        .zip(depths_of(&atoms, probes))
        .zip(&probe_target)
        .find(|((_, got), want)| got != *want)
        .map(|((p, _), _)| format_point(p));
    let mut max_dev = Rational::zero();
    for ((p, got), want) in fresh.iter().zip(depths_of(&atoms, &fresh)).zip(&fresh_target) {
        let dev = (got - want).abs();
        if dev.is_positive() && witness.is_none() {
            witness = Some(format_point(p));
        }
        max_dev = max_dev.max(dev);
    }
    let verdict = if witness.is_none() && !atoms.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let measure = Measure::atomic(atoms)?;
    Ok((
        measure,
        ExactReport {
            levels,
            regions,
            candidates,
            search_nodes,
            probe_points: probes.len(),
            verification_points: fresh.len(),
            oracle_calls: counted.calls.load(AtomicOrdering::Relaxed),
            max_deviation: rational::format_rational(&max_dev),
            verdict,
            witness,
            notes,
        },
    ))
}

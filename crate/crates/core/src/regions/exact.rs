//! Exact central regions of finitely atomic measures.
//!
//! `D_alpha` is the intersection of the closed halfplanes whose open
//! complement carries mass below `alpha`. Every edge of positive length lies
//! on a line through two atoms, and a halfplane bounded by a line through a
//! single atom can be rotated about that atom both ways until it meets a
//! second atom, so lines through atom pairs plus the convex hull of the atoms
//! generate the region. That rotation argument breaks down when all atoms are
//! collinear; then lines through each atom perpendicular to the common line
//! are added. It also needs some atom inside the halfplane, which fails only
//! for levels above the total mass, where the region is empty anyway. The
//! result is checked by exact evaluation.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::depth::atomic::sweep_value;
use crate::error::{Error, Result};
use crate::geometry::{self, Direction, Line, QPoint};
use crate::measure::{Atom, Measure};
use crate::rational::{self, Rational};

/// Every line through two distinct atoms, deduplicated.
pub(crate) fn pair_lines(atoms: &[Atom]) -> Vec<Line> {
    let mut lines = Vec::new();
    for i in 0..atoms.len() {
        for j in i + 1..atoms.len() {
            if let Some(l) = Line::through(&atoms[i].location, &atoms[j].location) {
                lines.push(l);
            }
        }
    }
    lines.sort_by(|a, b| (&a.a, &a.b, &a.c).cmp(&(&b.a, &b.b, &b.c)));
    lines.dedup();
    lines
}

/// Clips a convex polygon (counterclockwise; a point or a segment allowed)
/// to the closed side of `line` where `side` is `keep` or zero.
pub(crate) fn clip(poly: &[QPoint], line: &Line, keep: Ordering) -> Vec<QPoint> {
    let ok = |s: Ordering| s == keep || s == Ordering::Equal;
    if poly.len() == 1 {
        return if ok(line.side(&poly[0])) {
            poly.to_vec()
        } else {
            Vec::new()
        };
    }
    let sides: Vec<Ordering> = poly.iter().map(|p| line.side(p)).collect();
    if sides.iter().all(|s| ok(*s)) {
        return poly.to_vec();
    }
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let j = (i + 1) % n;
        if ok(sides[i]) {
            out.push(poly[i].clone());
        }
        let crosses = sides[i] != Ordering::Equal && sides[j] != Ordering::Equal && sides[i] != sides[j];
        if crosses {
            let edge = Line::through(&poly[i], &poly[j]).expect("distinct vertices");
            if let Some(p) = edge.intersection(line) {
                out.push(p);
            }
        }
    }
    geometry::convex_hull(&out)
}

/// Depths attained anywhere in the plane, ascending, starting with zero.
pub fn achieved_levels(m: &Measure) -> Result<Vec<Rational>> {
    if !m.is_atomic() {
        return Err(Error::NotAtomic);
    }
    let atoms = m.atoms();
    let mut points: Vec<QPoint> = atoms.iter().map(|a| a.location.clone()).collect();
    let lines = pair_lines(atoms);
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = lines[i].intersection(&lines[j]) {
                points.push(p);
            }
        }
    }
    points.sort();
    points.dedup();
    let mut levels: Vec<Rational> = points.iter().map(|p| sweep_value(atoms, p)).collect();
    levels.push(Rational::zero());
    levels.sort();
    levels.dedup();
    Ok(levels)
}

fn exact_depth(atoms: &[Atom], p: &QPoint) -> Rational {
    sweep_value(atoms, p)
}

/// Exact polygon `D_alpha` as a counterclockwise vertex list (empty, a
/// point, a segment, or a proper polygon).
pub(crate) fn region_vertices(m: &Measure, alpha: &Rational) -> Result<Vec<QPoint>> {
    if !alpha.is_positive() {
        return Err(Error::NonPositiveLevel(rational::format_rational(alpha)));
    }
    if !m.is_atomic() {
        return Err(Error::NotAtomic);
    }
    let atoms = m.atoms();
    if *alpha > m.atomic_mass() {
        return Ok(Vec::new());
    }
    let locations: Vec<QPoint> = atoms.iter().map(|a| a.location.clone()).collect();
    let mut poly = geometry::convex_hull(&locations);
    let mut lines = pair_lines(atoms);
    if poly.len() == 2 {
        let d = Direction::between(&poly[0], &poly[1]).expect("distinct hull points");
        for p in &locations {
            lines.extend(Line::through_with_direction(p, &d.rot90()));
        }
    }
    for line in lines {
        if poly.is_empty() {
            break;
        }
        let mut above = Rational::zero();
        let mut below = Rational::zero();
        for a in atoms {
            match line.side(&a.location) {
                Ordering::Greater => above += &a.weight,
                Ordering::Less => below += &a.weight,
                Ordering::Equal => {}
            }
        }
        if &above < alpha {
            poly = clip(&poly, &line, Ordering::Less);
        }
        if &below < alpha && !poly.is_empty() {
            poly = clip(&poly, &line, Ordering::Greater);
        }
    }
    verify(atoms, alpha, &poly)?;
    Ok(poly)
}

/// Exact checks: every vertex is at least `alpha` deep and points just
/// outside every edge and vertex are shallower.
fn verify(atoms: &[Atom], alpha: &Rational, poly: &[QPoint]) -> Result<()> {
    if poly.is_empty() {
        // Empty means no atom or pair-line crossing reaches alpha; probing the
        // atoms and the candidate vertices is enough for that.
        let mut probes: Vec<QPoint> = atoms.iter().map(|a| a.location.clone()).collect();
        let lines = pair_lines(atoms);
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(p) = lines[i].intersection(&lines[j]) {
                    probes.push(p);
                }
            }
        }
        if let Some(p) = probes.iter().find(|p| exact_depth(atoms, p) >= *alpha) {
            return Err(Error::RegionVerification(format!(
                "empty region but {p:?} reaches the level"
            )));
        }
        return Ok(());
    }
    for v in poly {
        if exact_depth(atoms, v) < *alpha {
            return Err(Error::RegionVerification(format!("vertex {v:?} is below the level")));
        }
    }
    for p in outside_probes(atoms, poly) {
        if exact_depth(atoms, &p) >= *alpha {
            return Err(Error::RegionVerification(format!(
                "point {p:?} outside the polygon reaches the level"
            )));
        }
    }
    Ok(())
}

/// Step used for probes just outside a region: a tiny fraction of the atom spread.
fn probe_step(atoms: &[Atom]) -> Rational {
    let mut spread = Rational::zero();
    for a in atoms {
        for b in atoms {
            let (dx, dy) = a.location.sub(&b.location);
            spread = spread.max(dx.abs() + dy.abs());
        }
    }
    if spread.is_zero() {
        spread = rational::int(1);
    }
    spread / rational::int(1i64 << 40)
}

fn outside_probes(atoms: &[Atom], poly: &[QPoint]) -> Vec<QPoint> {
    let eps = probe_step(atoms);
    let mut out = Vec::new();
    let n = poly.len();
    let nudge = |p: &QPoint, dx: &Rational, dy: &Rational| {
        let len = dx.abs() + dy.abs();
        p.offset(dx, dy, &(&eps / &len))
    };
    let axes = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    if n == 1 {
        for (dx, dy) in axes {
            out.push(nudge(&poly[0], &rational::int(dx), &rational::int(dy)));
        }
        return out;
    }
    for i in 0..n {
        let (p, q) = (&poly[i], &poly[(i + 1) % n]);
        let (dx, dy) = q.sub(p);
        // Outward normal of a counterclockwise edge.
        let (nx, ny) = (dy.clone(), -dx.clone());
        let third = p.offset(&dx, &dy, &rational::ratio(1, 3));
        out.push(nudge(&third, &nx, &ny));
        if n == 2 {
            out.push(nudge(&third, &-nx, &-ny));
            out.push(nudge(q, &dx, &dy));
        }
    }
    // Beyond each vertex along the bisector of its outward normals.
    if n >= 3 {
        for i in 0..n {
            let prev = &poly[(i + n - 1) % n];
            let v = &poly[i];
            let next = &poly[(i + 1) % n];
            let (ax, ay) = v.sub(prev);
            let (bx, by) = next.sub(v);
            let la = ax.abs() + ay.abs();
            let lb = bx.abs() + by.abs();
            let dx = &ay / &la + &by / &lb;
            let dy = -(&ax / &la) - &bx / &lb;
            if !(dx.is_zero() && dy.is_zero()) {
                out.push(nudge(v, &dx, &dy));
            }
        }
    }
    out
}

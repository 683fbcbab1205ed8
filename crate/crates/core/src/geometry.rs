//! Planar points, bounding boxes and exact predicates.
//!
//! Floating-point points are plain `f64` pairs. Everything that must decide a
//! tie (is an atom on a line, on which side of it, at which angle) goes
//! through [`QPoint`], which carries exact rational coordinates next to a
//! cached `f64` approximation. Predicates first evaluate on the approximation
//! with an error bound and fall back to rational arithmetic only when the sign
//! is in doubt.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn checked(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(Error::NonFinitePoint(x, y))
        }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point2::new(c, s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_l1(self) -> f64 {
        self.x.abs() + self.y.abs()
    }

    /// Counterclockwise quarter turn. Exact in floating point.
    pub fn rot90(self) -> Self {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| Point2::new(self.x / n, self.y / n))
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Axis-aligned box `[min.x, max.x] x [min.y, max.y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point2,
    pub max: Point2,
}

impl BBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        let min = Point2::checked(x0.min(x1), y0.min(y1))?;
        let max = Point2::checked(x0.max(x1), y0.max(y1))?;
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::DegenerateBox);
        }
        Ok(BBox { min, max })
    }

    pub fn square(half_width: f64) -> Result<Self> {
        BBox::new(-half_width, -half_width, half_width, half_width)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point2 {
        self.min.lerp(self.max, 0.5)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Node `(i, j)` of an `nx` by `ny` lattice spanning the box, row-major in `j`.
    pub fn grid_node(&self, i: usize, j: usize, nx: usize, ny: usize) -> Point2 {
        let fx = if nx > 1 { i as f64 / (nx - 1) as f64 } else { 0.5 };
        let fy = if ny > 1 { j as f64 / (ny - 1) as f64 } else { 0.5 };
        Point2::new(self.min.x + fx * self.width(), self.min.y + fy * self.height())
    }

    pub fn grid(&self, nx: usize, ny: usize) -> Vec<Point2> {
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                out.push(self.grid_node(i, j, nx, ny));
            }
        }
        out
    }

    /// Largest `t >= 0` with `origin + t * dir` still inside the box.
    pub fn exit_distance(&self, origin: Point2, dir: Point2) -> f64 {
        let mut t = f64::INFINITY;
        for (o, d, lo, hi) in [
            (origin.x, dir.x, self.min.x, self.max.x),
            (origin.y, dir.y, self.min.y, self.max.y),
        ] {
            if d > 0.0 {
                t = t.min((hi - o) / d);
            } else if d < 0.0 {
                t = t.min((lo - o) / d);
            }
        }
        t.max(0.0)
    }
}

/// A point with exact rational coordinates and a cached rounding.
#[derive(Clone)]
pub struct QPoint {
    x: Rational,
    y: Rational,
    approx: Point2,
}

impl QPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        let approx = Point2::new(rational::to_f64(&x), rational::to_f64(&y));
        QPoint { x, y, approx }
    }

    /// Exact image of a finite double point.
    pub fn from_f64(p: Point2) -> Result<Self> {
        let x = rational::from_f64_exact(p.x).ok_or(Error::NonFinitePoint(p.x, p.y))?;
        let y = rational::from_f64_exact(p.y).ok_or(Error::NonFinitePoint(p.x, p.y))?;
        Ok(QPoint { x, y, approx: p })
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        QPoint::new(rational::int(x), rational::int(y))
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn approx(&self) -> Point2 {
        self.approx
    }

    pub fn sub(&self, o: &QPoint) -> (Rational, Rational) {
        (&self.x - &o.x, &self.y - &o.y)
    }

    /// `self + t * (dx, dy)`.
    pub fn offset(&self, dx: &Rational, dy: &Rational, t: &Rational) -> QPoint {
        QPoint::new(&self.x + t * dx, &self.y + t * dy)
    }

    pub fn midpoint(&self, o: &QPoint) -> QPoint {
        let half = rational::ratio(1, 2);
        QPoint::new((&self.x + &o.x) * &half, (&self.y + &o.y) * &half)
    }
}

impl PartialEq for QPoint {
    fn eq(&self, o: &Self) -> bool {
        self.x == o.x && self.y == o.y
    }
}

impl Eq for QPoint {}

impl Hash for QPoint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
    }
}

impl PartialOrd for QPoint {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for QPoint {
    fn cmp(&self, o: &Self) -> Ordering {
        self.x.cmp(&o.x).then_with(|| self.y.cmp(&o.y))
    }
}

impl fmt::Debug for QPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {})",
            rational::format_rational(&self.x),
            rational::format_rational(&self.y)
        )
    }
}

const FILTER: f64 = 1e-14;

fn sign_of(v: &Rational) -> Ordering {
    if v.is_zero() {
        Ordering::Equal
    } else if v.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Sign of `a.0 * a.1 - b.0 * b.1`, cross-multiplied over the positive
/// denominators so that no gcd is taken.
fn product_difference_sign(a: (&Rational, &Rational), b: (&Rational, &Rational)) -> Ordering {
    let left = a.0.numer() * a.1.numer() * b.0.denom() * b.1.denom();
    let right = b.0.numer() * b.1.numer() * a.0.denom() * a.1.denom();
    left.cmp(&right)
}

fn filtered(value: f64, bound: f64) -> Option<Ordering> {
    if !value.is_finite() || !bound.is_finite() {
        return None;
    }
    if value > bound {
        Some(Ordering::Greater)
    } else if value < -bound {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Sign of `cross(b - a, c - a)`: `Greater` when `a, b, c` turn counterclockwise.
pub fn orient(a: &QPoint, b: &QPoint, c: &QPoint) -> Ordering {
    let (pa, pb, pc) = (a.approx, b.approx, c.approx);
    let det = (pb.x - pa.x) * (pc.y - pa.y) - (pb.y - pa.y) * (pc.x - pa.x);
    let bound = FILTER
        * ((pb.x.abs() + pa.x.abs()) * (pc.y.abs() + pa.y.abs())
            + (pb.y.abs() + pa.y.abs()) * (pc.x.abs() + pa.x.abs()));
    if let Some(s) = filtered(det, bound) {
        return s;
    }
    let (bx, by) = b.sub(a);
    let (cx, cy) = c.sub(a);
    sign_of(&(bx * cy - by * cx))
}

/// Sign of `<b - a, c - a>`.
pub fn dot_sign(a: &QPoint, b: &QPoint, c: &QPoint) -> Ordering {
    let (pa, pb, pc) = (a.approx, b.approx, c.approx);
    let dot = (pb.x - pa.x) * (pc.x - pa.x) + (pb.y - pa.y) * (pc.y - pa.y);
    let bound = FILTER
        * ((pb.x.abs() + pa.x.abs()) * (pc.x.abs() + pa.x.abs())
            + (pb.y.abs() + pa.y.abs()) * (pc.y.abs() + pa.y.abs()));
    if let Some(s) = filtered(dot, bound) {
        return s;
    }
    let (bx, by) = b.sub(a);
    let (cx, cy) = c.sub(a);
    sign_of(&(bx * cx + by * cy))
}

/// Sign of `cross(d, p - o)` for an exact direction `d` given by its two
/// components. Used when a line is known by a point and a direction.
pub fn side_of_direction(o: &QPoint, d: (&Rational, &Rational), p: &QPoint) -> Ordering {
    let (dx, dy) = d;
    let (fdx, fdy) = (rational::to_f64(dx), rational::to_f64(dy));
    let (po, pp) = (o.approx, p.approx);
    let val = fdx * (pp.y - po.y) - fdy * (pp.x - po.x);
    let bound = FILTER * (fdx.abs() * (pp.y.abs() + po.y.abs()) + fdy.abs() * (pp.x.abs() + po.x.abs()));
    if let Some(s) = filtered(val, bound) {
        return s;
    }
    let (vx, vy) = p.sub(o);
    sign_of(&(dx * vy - dy * vx))
}

fn exact(v: f64) -> Rational {
    rational::from_f64_exact(v).expect("finite coordinate")
}

/// Sign of `<u, p> - c`, taking `u` and `c` as the exact values of the doubles.
pub fn affine_sign(u: Point2, c: f64, p: &QPoint) -> Ordering {
    let pp = p.approx;
    let v = u.x * pp.x + u.y * pp.y - c;
    let bound = FILTER * (u.x.abs() * pp.x.abs() + u.y.abs() * pp.y.abs() + c.abs());
    if let Some(s) = filtered(v, bound) {
        return s;
    }
    sign_of(&(exact(u.x) * p.x() + exact(u.y) * p.y() - exact(c)))
}

/// Sign of `<u, p - origin>`, exact in the doubles `u` and `origin`.
pub fn projection_sign(u: Point2, origin: Point2, p: &QPoint) -> Ordering {
    let pp = p.approx;
    let v = u.x * (pp.x - origin.x) + u.y * (pp.y - origin.y);
    let bound = FILTER * (u.x.abs() * (pp.x.abs() + origin.x.abs()) + u.y.abs() * (pp.y.abs() + origin.y.abs()));
    if let Some(s) = filtered(v, bound) {
        return s;
    }
    sign_of(&(exact(u.x) * (p.x() - exact(origin.x)) + exact(u.y) * (p.y() - exact(origin.y))))
}

/// Sign of `<u, d>` for a double vector `u` and an exact direction `d`.
pub fn direction_sign(u: Point2, d: &Direction) -> Ordering {
    let a = d.approx;
    let v = u.x * a.x + u.y * a.y;
    let bound = FILTER * (u.x.abs() * a.x.abs() + u.y.abs() * a.y.abs());
    if let Some(s) = filtered(v, bound) {
        return s;
    }
    sign_of(&(exact(u.x) * &d.dx + exact(u.y) * &d.dy))
}

/// Angular half used for exact polar sorting: `0` for angles in `[0, pi)`, `1` otherwise.
fn half(dx: &Rational, dy: &Rational) -> u8 {
    if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
        0
    } else {
        1
    }
}

/// A non-zero exact direction with its rounding, ordered by polar angle in `[0, 2pi)`.
#[derive(Clone, Debug)]
pub struct Direction {
    pub dx: Rational,
    pub dy: Rational,
    approx: Point2,
}

impl Direction {
    pub fn new(dx: Rational, dy: Rational) -> Option<Self> {
        if dx.is_zero() && dy.is_zero() {
            return None;
        }
        let approx = Point2::new(rational::to_f64(&dx), rational::to_f64(&dy));
        Some(Direction { dx, dy, approx })
    }

    pub fn between(from: &QPoint, to: &QPoint) -> Option<Self> {
        let (dx, dy) = to.sub(from);
        Direction::new(dx, dy)
    }

    /// A positive multiple of `to - from` with integer components, which
    /// avoids the gcd reductions of rational subtraction.
    pub fn between_scaled(from: &QPoint, to: &QPoint) -> Option<Self> {
        let (a, b) = (to.x.numer(), to.x.denom());
        let (p, q) = (from.x.numer(), from.x.denom());
        let (c, d) = (to.y.numer(), to.y.denom());
        let (r, s) = (from.y.numer(), from.y.denom());
        let dx = (a * q - p * b) * d * s;
        let dy = (c * s - r * d) * b * q;
        Direction::new(Rational::from_integer(dx), Rational::from_integer(dy))
    }

    pub fn approx(&self) -> Point2 {
        self.approx
    }

    pub fn unit(&self) -> Point2 {
        self.approx.normalized().unwrap_or(Point2::new(1.0, 0.0))
    }

    pub fn reversed(&self) -> Direction {
        Direction {
            dx: -&self.dx,
            dy: -&self.dy,
            approx: -self.approx,
        }
    }

    fn half(&self) -> u8 {
        half(&self.dx, &self.dy)
    }

    /// Sign of `cross(self, o)`.
    pub fn cross_sign(&self, o: &Direction) -> Ordering {
        let v = self.approx.cross(o.approx);
        let bound = FILTER * (self.approx.x.abs() * o.approx.y.abs() + self.approx.y.abs() * o.approx.x.abs());
        if let Some(s) = filtered(v, bound) {
            return s;
        }
        product_difference_sign((&self.dx, &o.dy), (&self.dy, &o.dx))
    }

    /// Sign of `<self, o>`.
    pub fn dot_sign(&self, o: &Direction) -> Ordering {
        let v = self.approx.dot(o.approx);
        let bound = FILTER * (self.approx.x.abs() * o.approx.x.abs() + self.approx.y.abs() * o.approx.y.abs());
        if let Some(s) = filtered(v, bound) {
            return s;
        }
        product_difference_sign((&self.dx, &o.dx), (&-&self.dy, &o.dy))
    }

    /// Polar-angle order.
    pub fn angle_cmp(&self, o: &Direction) -> Ordering {
        self.half().cmp(&o.half()).then_with(|| o.cross_sign(self))
    }

    pub fn same_ray(&self, o: &Direction) -> bool {
        self.cross_sign(o) == Ordering::Equal && self.dot_sign(o) == Ordering::Greater
    }

    /// True when the counterclockwise angle from `self` to `o` lies in `(0, pi]`.
    pub fn within_half_turn(&self, o: &Direction) -> bool {
        match self.cross_sign(o) {
            Ordering::Greater => true,
            Ordering::Equal => self.dot_sign(o) == Ordering::Less,
            Ordering::Less => false,
        }
    }

    /// Counterclockwise quarter turn.
    pub fn rot90(&self) -> Direction {
        Direction {
            dx: -&self.dy,
            dy: self.dx.clone(),
            approx: self.approx.rot90(),
        }
    }
}

/// Exact line `a*x + b*y = c` with `(a, b) != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl Line {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Option<Self> {
        if a.is_zero() && b.is_zero() {
            return None;
        }
        Some(Line { a, b, c }.normalized())
    }

    pub fn through(p: &QPoint, q: &QPoint) -> Option<Self> {
        let (dx, dy) = q.sub(p);
        let a = -dy;
        let b = dx;
        let c = &a * p.x() + &b * p.y();
        Line::new(a, b, c)
    }

    pub fn through_with_direction(p: &QPoint, d: &Direction) -> Option<Self> {
        let a = -&d.dy;
        let b = d.dx.clone();
        let c = &a * p.x() + &b * p.y();
        Line::new(a, b, c)
    }

    /// Scales so the first non-zero of `(a, b)` is `1`: one canonical form per line.
    fn normalized(self) -> Self {
        let pivot = if !self.a.is_zero() {
            self.a.clone()
        } else {
            self.b.clone()
        };
        Line {
            a: &self.a / &pivot,
            b: &self.b / &pivot,
            c: &self.c / &pivot,
        }
    }

    /// Sign of `a*x + b*y - c`.
    pub fn side(&self, p: &QPoint) -> Ordering {
        let (fa, fb, fc) = (
            rational::to_f64(&self.a),
            rational::to_f64(&self.b),
            rational::to_f64(&self.c),
        );
        let pp = p.approx;
        let v = fa * pp.x + fb * pp.y - fc;
        let bound = FILTER * (fa.abs() * pp.x.abs() + fb.abs() * pp.y.abs() + fc.abs());
        if let Some(s) = filtered(v, bound) {
            return s;
        }
        sign_of(&(&self.a * p.x() + &self.b * p.y() - &self.c))
    }

    pub fn contains(&self, p: &QPoint) -> bool {
        self.side(p) == Ordering::Equal
    }

    pub fn intersection(&self, o: &Line) -> Option<QPoint> {
        let det = &self.a * &o.b - &self.b * &o.a;
        if det.is_zero() {
            return None;
        }
        let x = (&self.c * &o.b - &self.b * &o.c) / &det;
        let y = (&self.a * &o.c - &self.c * &o.a) / &det;
        Some(QPoint::new(x, y))
    }

    /// Direction vector `(b, -a)` along the line.
    pub fn direction(&self) -> Direction {
        Direction::new(self.b.clone(), -&self.a).expect("line has a non-zero normal")
    }

    /// Euclidean distance from an approximate point, in floating point.
    pub fn distance_approx(&self, p: Point2) -> f64 {
        let (fa, fb, fc) = (
            rational::to_f64(&self.a),
            rational::to_f64(&self.b),
            rational::to_f64(&self.c),
        );
        (fa * p.x + fb * p.y - fc).abs() / fa.hypot(fb)
    }
}

/// Exact convex hull, counterclockwise, without collinear boundary points.
/// Returns one point for a single distinct input and two for collinear inputs.
pub fn convex_hull(points: &[QPoint]) -> Vec<QPoint> {
    let mut pts: Vec<QPoint> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<QPoint> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p) != Ordering::Greater {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<QPoint> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p) != Ordering::Greater {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.truncate(1);
    }
    lower
}

/// Exact membership in a closed convex polygon given counterclockwise
/// (degenerate point and segment polygons allowed).
pub fn convex_contains(poly: &[QPoint], p: &QPoint) -> bool {
    match poly.len() {
        0 => false,
        1 => poly[0] == *p,
        2 => orient(&poly[0], &poly[1], p) == Ordering::Equal && dot_sign(p, &poly[0], &poly[1]) != Ordering::Greater,
        n => (0..n).all(|i| orient(&poly[i], &poly[(i + 1) % n], p) != Ordering::Less),
    }
}

/// Strict convexity check for a counterclockwise vertex list.
pub fn is_strictly_convex(poly: &[QPoint]) -> bool {
    let n = poly.len();
    if n < 3 {
        return true;
    }
    (0..n).all(|i| orient(&poly[i], &poly[(i + 1) % n], &poly[(i + 2) % n]) == Ordering::Greater)
}

/// Distance from `p` to the closed convex polygon (zero inside), floating point.
pub fn distance_to_convex(poly: &[Point2], p: Point2) -> f64 {
    match poly.len() {
        0 => f64::INFINITY,
        1 => p.distance(poly[0]),
        2 => segment_distance(poly[0], poly[1], p),
        n => {
            let inside = (0..n).all(|i| (poly[(i + 1) % n] - poly[i]).cross(p - poly[i]) >= 0.0);
            if inside {
                return 0.0;
            }
            (0..n)
                .map(|i| segment_distance(poly[i], poly[(i + 1) % n], p))
                .fold(f64::INFINITY, f64::min)
        }
    }
}

pub fn segment_distance(a: Point2, b: Point2, p: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Symmetric Hausdorff distance between two convex polygons (vertex lists).
pub fn hausdorff_convex(a: &[Point2], b: &[Point2]) -> f64 {
    let one = a.iter().map(|&p| distance_to_convex(b, p)).fold(0.0, f64::max);
    let two = b.iter().map(|&p| distance_to_convex(a, p)).fold(0.0, f64::max);
    one.max(two)
}

/// Floating-point convex hull (counterclockwise), used for sampled boundaries.
pub fn convex_hull_f64(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.iter().copied().filter(|p| p.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn abs_rational(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(x: i64, y: i64) -> QPoint {
        QPoint::from_ints(x, y)
    }

    #[test]
    fn orientation_of_exactly_collinear_points_is_equal() {
        // Points that are collinear in exact arithmetic but not after rounding.
        let a = QPoint::from_f64(Point2::new(0.1, 0.1)).unwrap();
        let b = QPoint::from_f64(Point2::new(0.2, 0.2)).unwrap();
        let c = QPoint::from_f64(Point2::new(0.3, 0.3)).unwrap();
        let exact = {
            let (bx, by) = b.sub(&a);
            let (cx, cy) = c.sub(&a);
            sign_of(&(bx * cy - by * cx))
        };
        assert_eq!(orient(&a, &b, &c), exact);
        assert_eq!(orient(&q(0, 0), &q(1, 1), &q(3, 3)), Ordering::Equal);
        assert_eq!(orient(&q(0, 0), &q(1, 0), &q(0, 1)), Ordering::Greater);
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let pts = vec![q(0, 0), q(2, 0), q(1, 0), q(2, 2), q(0, 2), q(1, 1)];
        let hull = convex_hull(&pts);
        assert_eq!(hull, vec![q(0, 0), q(2, 0), q(2, 2), q(0, 2)]);
        assert!(is_strictly_convex(&hull));
        assert!(convex_contains(&hull, &q(1, 1)));
        assert!(convex_contains(&hull, &q(2, 1)));
        assert!(!convex_contains(&hull, &q(3, 1)));
        assert_eq!(convex_hull(&[q(0, 0), q(1, 1), q(2, 2)]), vec![q(0, 0), q(2, 2)]);
    }

    #[test]
    fn line_intersection_is_exact() {
        let l1 = Line::through(&q(0, 0), &q(3, 1)).unwrap();
        let l2 = Line::through(&q(0, 1), &q(1, 0)).unwrap();
        let p = l1.intersection(&l2).unwrap();
        assert_eq!(p, QPoint::new(rational::ratio(3, 4), rational::ratio(1, 4)));
        assert!(l1.contains(&p) && l2.contains(&p));
        assert_eq!(Line::through(&q(0, 0), &q(2, 2)), Line::through(&q(5, 5), &q(-1, -1)));
    }

    #[test]
    fn exit_distance_reaches_the_box_boundary() {
        let b = BBox::square(2.0).unwrap();
        let t = b.exit_distance(Point2::ORIGIN, Point2::new(1.0, 0.0));
        assert_eq!(t, 2.0);
        assert!(BBox::new(0.0, 0.0, 0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn polar_order_matches_atan2(ax in -50i64..50, ay in -50i64..50, bx in -50i64..50, by in -50i64..50) {
            prop_assume!((ax, ay) != (0, 0) && (bx, by) != (0, 0));
            let da = Direction::new(rational::int(ax), rational::int(ay)).unwrap();
            let db = Direction::new(rational::int(bx), rational::int(by)).unwrap();
            let angle = |x: i64, y: i64| {
                let t = (y as f64).atan2(x as f64);
                if t < 0.0 { t + std::f64::consts::TAU } else { t }
            };
            let expected = if ax * by == ay * bx && ax * bx + ay * by > 0 {
                Ordering::Equal
            } else {
                angle(ax, ay).partial_cmp(&angle(bx, by)).unwrap()
            };
            prop_assert_eq!(da.angle_cmp(&db), expected);
        }
    }
}

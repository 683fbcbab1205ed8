//! Exact depth for finitely atomic measures.

use std::cmp::Ordering;

use num_traits::Zero;

use crate::geometry::{self, Direction, Point2, QPoint};
use crate::measure::{Atom, FlagHalfspace2D};
use crate::rational::{self, Rational};

/// Atoms seen from a query point: the mass sitting at the point itself and
/// the remaining mass grouped by ray, sorted by polar angle.
pub(crate) struct Star {
    pub at_center: Rational,
    pub rays: Vec<(Direction, Rational)>,
}

impl Star {
    pub fn new(atoms: &[Atom], x: &QPoint) -> Star {
        let mut at_center = Rational::zero();
        let mut rays: Vec<(Direction, Rational)> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match Direction::between_scaled(x, &a.location) {
                None => at_center += &a.weight,
                Some(d) => rays.push((d, a.weight.clone())),
            }
        }
        rays.sort_by(|a, b| a.0.angle_cmp(&b.0));
        let mut merged: Vec<(Direction, Rational)> = Vec::with_capacity(rays.len());
        for (d, w) in rays {
            match merged.last_mut() {
                Some(last) if last.0.angle_cmp(&d) == Ordering::Equal => last.1 += w,
                _ => merged.push((d, w)),
            }
        }
        Star {
            at_center,
            rays: merged,
        }
    }

    fn prefix(&self) -> Vec<Rational> {
        let m = self.rays.len();
        let mut p = Vec::with_capacity(2 * m + 1);
        p.push(Rational::zero());
        for i in 0..2 * m {
            let next = &p[i] + &self.rays[i % m].1;
            p.push(next);
        }
        p
    }

    /// Index range `(k, k + len)` into the doubled ray list of the rays whose
    /// counterclockwise angle from `c` lies in `(0, pi]`.
    fn half_turn(&self, c: &Direction) -> (usize, usize) {
        let m = self.rays.len();
        let k = self.rays.partition_point(|(d, _)| d.angle_cmp(c) != Ordering::Greater);
        let mut lo = 0usize;
        let mut hi = m;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if c.within_half_turn(&self.rays[(k + mid) % m].0) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        (k, k + lo)
    }

    /// Minimum over flags of the mass off the center, with the critical
    /// direction `c` realizing it: the minimizing flag holds the rays at
    /// angles in `(c, c + pi]`. Candidates are screened in doubles and only
    /// near-ties are compared exactly.
    pub fn sweep(&self) -> (Rational, Option<Direction>) {
        if self.rays.is_empty() {
            return (Rational::zero(), None);
        }
        let m = self.rays.len();
        let mut approx = Vec::with_capacity(2 * m + 1);
        approx.push(0.0);
        for i in 0..2 * m {
            approx.push(approx[i] + rational::to_f64(&self.rays[i % m].1));
        }
        let mut cands: Vec<(f64, (usize, usize), Direction)> = Vec::with_capacity(2 * m);
        for (d, _) in &self.rays {
            for c in [d.clone(), d.reversed()] {
                let (a, b) = self.half_turn(&c);
                cands.push((approx[b] - approx[a], (a, b), c));
            }
        }
        let least = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let slack = 8.0 * (2 * m + 1) as f64 * f64::EPSILON * approx[2 * m] + f64::MIN_POSITIVE;
        let prefix = self.prefix();
        let mut best: Option<(Rational, Direction)> = None;
        for (v, (a, b), c) in cands {
            if v > least + slack {
                continue;
            }
            let s = &prefix[b] - &prefix[a];
            if best.as_ref().is_none_or(|(bv, _)| s < *bv) {
                best = Some((s, c));
            }
        }
        let (s, c) = best.expect("at least one ray");
        (s, Some(c))
    }

    /// Minimum over the flags whose boundary line contains an atom or is
    /// perpendicular to an atom direction, with both ray choices.
    pub fn flag_enumeration(&self) -> Rational {
        let mut best: Option<Rational> = None;
        let mut consider = |v: Rational| {
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        };
        for (d, _) in &self.rays {
            for line in [d.clone(), d.rot90()] {
                let mut left = Rational::zero();
                let mut right = Rational::zero();
                let mut forward = Rational::zero();
                let mut backward = Rational::zero();
                for (e, w) in &self.rays {
                    match line.cross_sign(e) {
                        Ordering::Greater => left += w,
                        Ordering::Less => right += w,
                        Ordering::Equal => {
                            if line.dot_sign(e) == Ordering::Greater {
                                forward += w;
                            } else {
                                backward += w;
                            }
                        }
                    }
                }
                consider(&left + &forward);
                consider(&left + &backward);
                consider(&right + &forward);
                consider(&right + &backward);
            }
        }
        best.unwrap_or_else(Rational::zero)
    }

    /// Critical directions of the sweep (atom rays and their reversals).
    fn criticals(&self) -> Vec<Direction> {
        let mut out = Vec::with_capacity(2 * self.rays.len());
        for (d, _) in &self.rays {
            out.push(d.clone());
            out.push(d.reversed());
        }
        out
    }

    /// Mass of the flag `f` off the center, exact in the doubles of `f`.
    pub fn flag_mass_off_center(&self, f: &FlagHalfspace2D) -> Rational {
        let mut s = Rational::zero();
        for (e, w) in &self.rays {
            match geometry::direction_sign(f.plane_normal(), e) {
                Ordering::Greater => s += w,
                Ordering::Equal => {
                    if geometry::direction_sign(f.ray_direction(), e) == Ordering::Greater {
                        s += w;
                    }
                }
                Ordering::Less => {}
            }
        }
        s
    }

    /// A flag containing exactly the rays at angles in `(c, c + pi]` whose
    /// boundary line passes through no atom. The boundary is turned halfway
    /// to the next critical direction, so the witness is stable under
    /// rounding of its double coordinates except for near-coincident rays,
    /// in which case `None` is returned.
    pub fn generic_witness(&self, x: Point2, c: &Direction, target: &Rational) -> Option<FlagHalfspace2D> {
        let uc = c.unit();
        let mut next: Option<Direction> = None;
        for e in self.criticals() {
            // Smallest counterclockwise angle strictly greater than zero.
            let ahead = c.cross_sign(&e) == Ordering::Greater
                || (c.cross_sign(&e) == Ordering::Equal && c.dot_sign(&e) == Ordering::Less);
            if !ahead {
                continue;
            }
            let closer = match &next {
                None => true,
                Some(n) => {
                    let rel = |d: &Direction| {
                        // Angle of d measured from c, compared via rotation into c's frame.
                        Direction::new(&d.dx * &c.dx + &d.dy * &c.dy, &d.dy * &c.dx - &d.dx * &c.dy).expect("non-zero")
                    };
                    rel(&e).angle_cmp(&rel(n)) == Ordering::Less
                }
            };
            if closer {
                next = Some(e);
            }
        }
        let mid = match next {
            Some(n) if c.cross_sign(&n) == Ordering::Greater => (uc + n.unit()).normalized()?,
            _ => uc.rot90(),
        };
        let normal = mid.rot90();
        let f = FlagHalfspace2D::new(x, normal, mid).ok()?;
        (self.flag_mass_off_center(&f) == *target).then_some(f)
    }
}

/// Exact depth and a witness flag at `x` for atoms `atoms`.
pub(crate) fn sweep_depth(atoms: &[Atom], x: &QPoint) -> (Rational, Option<FlagHalfspace2D>) {
    let star = Star::new(atoms, x);
    let (s, c) = star.sweep();
    let value = &star.at_center + &s;
    let xf = x.approx();
    let witness = match c {
        Some(c) => star.generic_witness(xf, &c, &s),
        None => FlagHalfspace2D::new(xf, Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).ok(),
    };
    (value, witness)
}

/// Exact depth alone, skipping the witness.
pub(crate) fn sweep_value(atoms: &[Atom], x: &QPoint) -> Rational {
    let star = Star::new(atoms, x);
    &star.at_center + star.sweep().0
}

pub(crate) fn flag_depth(atoms: &[Atom], x: &QPoint) -> Rational {
    let star = Star::new(atoms, x);
    &star.at_center + star.flag_enumeration()
}

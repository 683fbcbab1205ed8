use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::QPoint;
use crate::measure::Measure;
use crate::rational::Rational;

/// Depth of an atomic measure by direct enumeration, in plain rational
/// arithmetic: for every line through `x` and an atom, both closed sides and
/// the four open-side-plus-ray flags. The atom-free directions need no
/// separate case since rotating a boundary until it hits an atom never
/// increases the mass of the open side.
pub fn brute_force_depth_atomic(m: &Measure, x: &QPoint) -> Result<Rational> {
    if !m.is_atomic() {
        return Err(Error::NotAtomic);
    }
    let atoms = m.atoms();
    let offsets: Vec<(Rational, Rational, &Rational)> = atoms
        .iter()
        .map(|a| {
            let (dx, dy) = a.location.sub(x);
            (dx, dy, &a.weight)
        })
        .collect();
    let at_x: Rational = offsets
        .iter()
        .filter(|(dx, dy, _)| dx.is_zero() && dy.is_zero())
        .map(|(_, _, w)| (*w).clone())
        .sum();
    let mut best: Option<Rational> = None;
    for (lx, ly, _) in &offsets {
        if lx.is_zero() && ly.is_zero() {
            continue;
        }
        // Normal to the line through x and this atom.
        let (nx, ny) = (-ly.clone(), lx.clone());
        let mut pos = Rational::zero();
        let mut neg = Rational::zero();
        let mut fwd = Rational::zero();
        let mut back = Rational::zero();
        for (dx, dy, w) in &offsets {
            if dx.is_zero() && dy.is_zero() {
                continue;
            }
            let side = &nx * dx + &ny * dy;
            if side.is_positive() {
                pos += *w;
            } else if side.is_negative() {
                neg += *w;
            } else if (lx * dx + ly * dy).is_positive() {
                fwd += *w;
            } else {
                back += *w;
            }
        }
        let on_line = &fwd + &back;
        let options = [
            &pos + &on_line,
            &neg + &on_line,
            &pos + &fwd,
            &pos + &back,
            &neg + &fwd,
            &neg + &back,
        ];
        for v in options {
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    Ok(at_x + best.unwrap_or_else(Rational::zero))
}

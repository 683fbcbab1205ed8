//! Halfspace depth `D(x; mu) = inf { mu(H) : H closed halfspace, x in bd H }`.
//!
//! The infimum need not be attained by a closed halfspace, but the minimum
//! over flag halfspaces always is, and it equals the depth. Every evaluator
//! here minimizes over flags and separately reports whether a closed
//! minimizer exists.

pub(crate) mod atomic;
pub mod closed_form;
pub(crate) mod mixture;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::geometry::{Point2, QPoint};
use crate::measure::{FlagHalfspace2D, MassValue, Measure};
use crate::rational::{self, Rational};

pub use closed_form::{cauchy_cross_depth, disk_with_atom_depth};

/// Tuning of the angular search used for measures with continuous parts.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthOptions {
    /// Number of equally spaced normal angles in the coarse scan.
    pub scan_angles: usize,
    /// Bracket width at which golden-section refinement stops, in radians.
    pub angle_tol: f64,
    /// How many coarse local minima are refined.
    pub refine_candidates: usize,
    /// Refined minima closer than this to a critical angle are discarded in
    /// favour of the exact evaluation at that angle.
    pub critical_gap: f64,
    /// Tolerance used when deciding whether a closed minimizer exists.
    pub attain_tol: f64,
}

impl Default for DepthOptions {
    fn default() -> Self {
        DepthOptions {
            scan_angles: 2048,
            angle_tol: 1e-10,
            refine_candidates: 6,
            critical_gap: 1e-7,
            attain_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DepthValue {
    pub value: MassValue,
    /// Whether some closed halfspace with `x` on its boundary has mass equal
    /// to the depth.
    pub attained: bool,
    /// A minimizing flag halfspace, when one could be represented in doubles.
    pub witness: Option<FlagHalfspace2D>,
}

fn exact_point(x: Point2) -> Result<QPoint> {
    QPoint::from_f64(Point2::checked(x.x, x.y)?)
}

/// Exact depth of a purely atomic measure by an angular sweep around `x`.
pub fn depth_atomic(m: &Measure, x: Point2) -> Result<DepthValue> {
    if !m.is_atomic() {
        return Err(Error::NotAtomic);
    }
    let (value, witness) = atomic::sweep_depth(m.atoms(), &exact_point(x)?);
    Ok(DepthValue {
        value: MassValue::Exact(value),
        attained: true,
        witness,
    })
}

/// Exact depth of a purely atomic measure at a rational point.
pub fn depth_atomic_exact(m: &Measure, x: &QPoint) -> Result<Rational> {
    if !m.is_atomic() {
        return Err(Error::NotAtomic);
    }
    Ok(atomic::sweep_value(m.atoms(), x))
}

/// Exact minimum over flags for a purely atomic measure, by enumerating the
/// critical boundary lines. Independent of the sweep.
pub fn flag_depth_exact(m: &Measure, x: &QPoint) -> Result<Rational> {
    if !m.is_atomic() {
        return Err(Error::NotAtomic);
    }
    Ok(atomic::flag_depth(m.atoms(), x))
}

/// Minimum of `mu(F)` over flag halfspaces centered at `x`.
pub fn depth_flag(m: &Measure, x: Point2) -> Result<DepthValue> {
    depth_flag_with(m, x, &DepthOptions::default())
}

pub fn depth_flag_with(m: &Measure, x: Point2, opts: &DepthOptions) -> Result<DepthValue> {
    let xq = exact_point(x)?;
    if m.is_atomic() {
        let value = atomic::flag_depth(m.atoms(), &xq);
        let (_, witness) = atomic::sweep_depth(m.atoms(), &xq);
        return Ok(DepthValue {
            value: MassValue::Exact(value),
            attained: true,
            witness,
        });
    }
    let search = mixture::FlagSearch::new(m, x, &xq, opts);
    let (cands, _) = search.run(None, None);
    let (value, witness, attained) = mixture::summarize(x, &cands, opts.attain_tol);
    Ok(DepthValue {
        value: MassValue::Approx(value),
        attained,
        witness,
    })
}

/// Depth at `x`: the exact sweep for atomic measures, flag minimization otherwise.
pub fn depth(m: &Measure, x: Point2) -> Result<DepthValue> {
    depth_with(m, x, &DepthOptions::default())
}

pub fn depth_with(m: &Measure, x: Point2, opts: &DepthOptions) -> Result<DepthValue> {
    if m.is_atomic() {
        depth_atomic(m, x)
    } else {
        depth_flag_with(m, x, opts)
    }
}

/// Anything that can report a depth at a point. Used by region tracing,
/// reconstruction and field export, which only need oracle access.
pub trait DepthSource: Sync {
    fn depth_value(&self, x: Point2) -> f64;

    /// Whether the depth at `x` is at least `level`. `hint` is a normal angle
    /// likely to realize a small flag mass, which lets evaluators stop early.
    fn depth_at_least(&self, x: Point2, level: f64, hint: Option<f64>) -> bool {
        let _ = hint;
        self.depth_value(x) >= level
    }
}

/// A measure evaluated with explicit search options.
#[derive(Clone, Debug)]
pub struct Engine<'a> {
    pub measure: &'a Measure,
    pub options: DepthOptions,
}

impl<'a> Engine<'a> {
    pub fn new(measure: &'a Measure) -> Self {
        Engine {
            measure,
            options: DepthOptions::default(),
        }
    }
}

impl DepthSource for Engine<'_> {
    fn depth_value(&self, x: Point2) -> f64 {
        depth_with(self.measure, x, &self.options)
            .map(|d| d.value.to_f64())
            .unwrap_or(f64::NAN)
    }

    fn depth_at_least(&self, x: Point2, level: f64, hint: Option<f64>) -> bool {
        let Ok(xq) = exact_point(x) else {
            return false;
        };
        if self.measure.is_atomic() {
            let d = atomic::sweep_value(self.measure.atoms(), &xq);
            return match rational::from_f64_exact(level) {
                Some(l) => d >= l,
                None => false,
            };
        }
        let search = mixture::FlagSearch::new(self.measure, x, &xq, &self.options);
        let (cands, stopped) = search.run(Some(level), hint);
        if stopped {
            return false;
        }
        let (value, _, _) = mixture::summarize(x, &cands, self.options.attain_tol);
        value >= level
    }
}

impl DepthSource for Measure {
    fn depth_value(&self, x: Point2) -> f64 {
        Engine::new(self).depth_value(x)
    }

    fn depth_at_least(&self, x: Point2, level: f64, hint: Option<f64>) -> bool {
        Engine::new(self).depth_at_least(x, level, hint)
    }
}

/// A depth given by a closure, for closed forms and tests.
pub struct FnDepth<F>(pub F);

impl<F: Fn(Point2) -> f64 + Sync> DepthSource for FnDepth<F> {
    fn depth_value(&self, x: Point2) -> f64 {
        (self.0)(x)
    }
}

/// Exact depth at rational points, as needed by exact reconstruction.
pub trait ExactDepth: Sync {
    fn depth_exact(&self, x: &QPoint) -> Rational;
}

/// Exact oracle of a purely atomic measure.
#[derive(Clone, Debug)]
pub struct AtomicOracle<'a> {
    measure: &'a Measure,
}

impl<'a> AtomicOracle<'a> {
    pub fn new(measure: &'a Measure) -> Result<Self> {
        if !measure.is_atomic() {
            return Err(Error::NotAtomic);
        }
        Ok(AtomicOracle { measure })
    }
}

impl ExactDepth for AtomicOracle<'_> {
    fn depth_exact(&self, x: &QPoint) -> Rational {
        atomic::sweep_value(self.measure.atoms(), x)
    }
}

impl DepthSource for AtomicOracle<'_> {
    fn depth_value(&self, x: Point2) -> f64 {
        match QPoint::from_f64(x) {
            Ok(q) => rational::to_f64(&self.depth_exact(&q)),
            Err(_) => f64::NAN,
        }
    }
}

/// Checks that a depth value lies in `[0, total]`.
pub fn in_mass_range(v: &MassValue, total: &MassValue) -> bool {
    match (v, total) {
        (MassValue::Exact(a), MassValue::Exact(t)) => !a.is_negative() && a <= t,
        _ => {
            let a = v.to_f64();
            a >= -1e-12 && a <= total.to_f64() + 1e-12
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, Component};
    use crate::rational::{int, ratio};
    use std::f64::consts::PI;

    fn triangle() -> Measure {
        Measure::atomic(vec![
            Atom::at(0.0, 0.0, 1).unwrap(),
            Atom::at(1.0, 0.0, 1).unwrap(),
            Atom::at(0.0, 1.0, 1).unwrap(),
        ])
        .unwrap()
    }

    fn disk_with_atom() -> Measure {
        Measure::new(vec![
            (
                Component::UniformDisk {
                    center: Point2::ORIGIN,
                    radius: 2.0,
                    total_mass: 1.0,
                },
                int(1),
            ),
            (
                Component::Dirac {
                    location: QPoint::from_ints(1, 1),
                    mass: ratio(1, 10),
                },
                int(1),
            ),
        ])
        .unwrap()
    }

    #[test]
    fn atomic_examples() {
        let m = triangle();
        let third = QPoint::new(ratio(1, 3), ratio(1, 3));
        assert_eq!(depth_atomic_exact(&m, &third).unwrap(), int(1));
        let d = depth_atomic(&m, Point2::new(5.0, 5.0)).unwrap();
        assert_eq!(d.value, MassValue::Exact(int(0)));
        let single = Measure::atomic(vec![Atom::at(2.0, 3.0, 7).unwrap()]).unwrap();
        let d = depth_atomic(&single, Point2::new(2.0, 3.0)).unwrap();
        assert_eq!(d.value, MassValue::Exact(int(7)));
        let empty = Measure::atomic(vec![]).unwrap();
        assert_eq!(depth(&empty, Point2::ORIGIN).unwrap().value, MassValue::Exact(int(0)));
    }

    #[test]
    fn atomic_witness_reproduces_the_value() {
        let m = triangle();
        for p in [
            Point2::new(0.2, 0.3),
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.5),
            Point2::new(-1.0, 0.5),
        ] {
            let d = depth_atomic(&m, p).unwrap();
            let w = d.witness.expect("witness");
            assert_eq!(MassValue::Exact(d.value.exact().unwrap().clone()), m.flag_mass(&w));
        }
    }

    #[test]
    fn flag_minimum_is_not_attained_next_to_the_atom() {
        let m = disk_with_atom();
        let d = depth_flag(&m, Point2::new(1.0, 0.0)).unwrap();
        let expected = 1.0 / 3.0 - 3f64.sqrt() / (4.0 * PI);
        assert!((d.value.to_f64() - expected).abs() < 1e-12, "{}", d.value);
        assert!(!d.attained);
        let w = d.witness.unwrap();
        assert_eq!(w.plane_normal(), Point2::new(1.0, 0.0));
        assert_eq!(w.ray_direction(), Point2::new(0.0, -1.0));
        assert!((m.flag_mass(&w).to_f64() - d.value.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn depth_at_the_atom_is_attained() {
        let m = disk_with_atom();
        let d = depth_flag(&m, Point2::new(1.0, 1.0)).unwrap();
        let alpha = (PI - 2.0) / (4.0 * PI);
        assert!((d.value.to_f64() - alpha - 0.1).abs() < 1e-12, "{}", d.value);
        assert!(d.attained);
    }

    #[test]
    fn early_exit_agrees_with_full_evaluation() {
        let m = disk_with_atom();
        let e = Engine::new(&m);
        for p in [Point2::new(1.0, 0.0), Point2::new(0.3, -0.7), Point2::new(1.5, 1.5)] {
            let v = e.depth_value(p);
            assert!(e.depth_at_least(p, v - 1e-9, None));
            assert!(!e.depth_at_least(p, v + 1e-9, Some(0.3)));
        }
    }
}

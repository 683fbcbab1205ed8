//! Measures in the plane and the masses they assign to halfspaces, lines,
//! rays, flags and points.
//!
//! Halfspaces use the inner-normal convention `H = {y : <u, y> >= c}`.
//! Atomic contributions are decided exactly: the doubles describing a
//! query are taken at their exact binary values and compared against exact
//! rational atom coordinates, so an atom is either on a boundary or not,
//! never "close to" it.

pub mod closed_form;
pub mod spec_file;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::{self, Point2, QPoint};
use crate::rational::{self, Rational};

use closed_form::{axis_cauchy_halfspace, cauchy_upper_tail, disk_segment_fraction, AXIS_PARALLEL_TOL};

/// Tolerance on `|u|_2 = 1` for normals and directions.
pub const UNIT_TOL: f64 = 1e-12;

fn check_unit(v: Point2) -> Result<()> {
    let n = v.norm();
    if !v.is_finite() || (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitNormal(n));
    }
    Ok(())
}

/// Closed halfspace `{y : <normal, y> >= offset}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Halfspace {
    normal: Point2,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: Point2, offset: f64) -> Result<Self> {
        check_unit(normal)?;
        if !offset.is_finite() {
            return Err(Error::NonFinitePoint(offset, offset));
        }
        Ok(Halfspace { normal, offset })
    }

    /// The halfspace with inner normal `normal` whose boundary passes through `point`.
    pub fn through(point: Point2, normal: Point2) -> Result<Self> {
        Point2::checked(point.x, point.y)?;
        Halfspace::new(normal, normal.dot(point))
    }

    pub fn normal(&self) -> Point2 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// The closure of the complement: normal and offset negated. The open
    /// version of this halfspace is the exact set complement of `self`.
    pub fn complement(&self) -> Halfspace {
        Halfspace {
            normal: -self.normal,
            offset: -self.offset,
        }
    }

    pub fn contains(&self, p: &QPoint) -> bool {
        geometry::affine_sign(self.normal, self.offset, p) != Ordering::Less
    }

    pub fn interior_contains(&self, p: &QPoint) -> bool {
        geometry::affine_sign(self.normal, self.offset, p) == Ordering::Greater
    }

    /// A point on the boundary line (the foot of the origin).
    pub fn boundary_point(&self) -> Point2 {
        self.normal * self.offset
    }
}

/// A flag halfspace in the plane: `{x}`, the open ray `{x + t r : t > 0}` and
/// the open halfplane `{y : <u, y - x> > 0}` with `<u, r> = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlagHalfspace2D {
    center: Point2,
    plane_normal: Point2,
    ray_direction: Point2,
}

impl FlagHalfspace2D {
    pub fn new(center: Point2, plane_normal: Point2, ray_direction: Point2) -> Result<Self> {
        Point2::checked(center.x, center.y)?;
        check_unit(plane_normal)?;
        check_unit(ray_direction)?;
        let ip = plane_normal.dot(ray_direction);
        if ip.abs() > UNIT_TOL {
            return Err(Error::RayNotOrthogonal(ip));
        }
        Ok(FlagHalfspace2D {
            center,
            plane_normal,
            ray_direction,
        })
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn plane_normal(&self) -> Point2 {
        self.plane_normal
    }

    pub fn ray_direction(&self) -> Point2 {
        self.ray_direction
    }

    /// Closed halfspace with the same normal through the center.
    pub fn closed_halfspace(&self) -> Halfspace {
        Halfspace {
            normal: self.plane_normal,
            offset: self.plane_normal.dot(self.center),
        }
    }

    /// Exact membership test.
    pub fn contains(&self, p: &QPoint) -> bool {
        match geometry::projection_sign(self.plane_normal, self.center, p) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => geometry::projection_sign(self.ray_direction, self.center, p) != Ordering::Less,
        }
    }
}

/// A point mass with an exact rational weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub location: QPoint,
    pub weight: Rational,
}

impl Atom {
    pub fn new(location: Point2, weight: Rational) -> Result<Self> {
        Ok(Atom {
            location: QPoint::from_f64(location)?,
            weight,
        })
    }

    /// Convenience constructor with an integer weight.
    pub fn at(x: f64, y: f64, weight: i64) -> Result<Self> {
        Atom::new(Point2::checked(x, y)?, rational::int(weight))
    }

    pub fn exact(location: QPoint, weight: Rational) -> Self {
        Atom { location, weight }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Component {
    FiniteAtomic {
        atoms: Vec<Atom>,
    },
    UniformDisk {
        center: Point2,
        radius: f64,
        total_mass: f64,
    },
    /// Independent standard Cauchy coordinates, shifted by `center`.
    CauchyProduct {
        center: Point2,
    },
    /// Mass `1/2` on each coordinate axis, standard Cauchy along it.
    AxisCauchyMixture,
    Dirac {
        location: QPoint,
        mass: Rational,
    },
}

impl Component {
    fn validate(&self) -> Result<()> {
        match self {
            Component::FiniteAtomic { atoms } => {
                for a in atoms {
                    if !a.weight.is_positive() {
                        return Err(Error::NonPositiveWeight(rational::format_rational(&a.weight)));
                    }
                }
                let mut locs: Vec<&QPoint> = atoms.iter().map(|a| &a.location).collect();
                locs.sort();
                if let Some(w) = locs.windows(2).find(|w| w[0] == w[1]) {
                    let p = w[0].approx();
                    return Err(Error::DuplicateAtom(p.x, p.y));
                }
                Ok(())
            }
            Component::UniformDisk {
                center,
                radius,
                total_mass,
            } => {
                Point2::checked(center.x, center.y)?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::NonPositiveRadius(*radius));
                }
                if !(total_mass.is_finite() && *total_mass > 0.0) {
                    return Err(Error::NonPositiveWeight(total_mass.to_string()));
                }
                Ok(())
            }
            Component::CauchyProduct { center } => {
                Point2::checked(center.x, center.y)?;
                Ok(())
            }
            Component::AxisCauchyMixture => Ok(()),
            Component::Dirac { mass, .. } => {
                if !mass.is_positive() {
                    return Err(Error::NonPositiveWeight(rational::format_rational(mass)));
                }
                Ok(())
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Component::FiniteAtomic { .. } | Component::Dirac { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Continuous {
    Disk { center: Point2, radius: f64, mass: f64 },
    Cauchy { center: Point2, mass: f64 },
    Axis { mass: f64 },
}

/// Mass of a set: exact when only atoms could contribute, otherwise a double.
#[derive(Clone, Debug, PartialEq)]
pub enum MassValue {
    Exact(Rational),
    Approx(f64),
}

impl MassValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MassValue::Exact(r) => rational::to_f64(r),
            MassValue::Approx(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            MassValue::Exact(r) => Some(r),
            MassValue::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, MassValue::Exact(_))
    }

    fn combine(atomic: Rational, continuous: Option<f64>) -> MassValue {
        match continuous {
            None => MassValue::Exact(atomic),
            Some(c) => MassValue::Approx(rational::to_f64(&atomic) + c),
        }
    }
}

impl fmt::Display for MassValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MassValue::Exact(r) => write!(f, "{}", rational::format_rational(r)),
            MassValue::Approx(v) => write!(f, "{}", format_sig(*v, 12)),
        }
    }
}

/// `v` with `digits` significant digits, trailing zeros removed.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..=15).contains(&exp) {
        return format!("{:.*e}", digits.saturating_sub(1), v);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A finite mixture of planar components with positive rational weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    components: Vec<(Component, Rational)>,
    atoms: Vec<Atom>,
    continuous: Vec<Continuous>,
}

impl Measure {
    pub fn new(components: Vec<(Component, Rational)>) -> Result<Self> {
        let mut merged: Vec<Atom> = Vec::new();
        let mut continuous = Vec::new();
        for (c, w) in &components {
            if !w.is_positive() {
                return Err(Error::NonPositiveWeight(rational::format_rational(w)));
            }
            c.validate()?;
            let wf = rational::to_f64(w);
            match c {
                Component::FiniteAtomic { atoms } => {
                    for a in atoms {
                        merged.push(Atom::exact(a.location.clone(), &a.weight * w));
                    }
                }
                Component::Dirac { location, mass } => {
                    merged.push(Atom::exact(location.clone(), mass * w));
                }
                Component::UniformDisk {
                    center,
                    radius,
                    total_mass,
                } => continuous.push(Continuous::Disk {
                    center: *center,
                    radius: *radius,
                    mass: total_mass * wf,
                }),
                Component::CauchyProduct { center } => continuous.push(Continuous::Cauchy {
                    center: *center,
                    mass: wf,
                }),
                Component::AxisCauchyMixture => continuous.push(Continuous::Axis { mass: wf }),
            }
        }
        merged.sort_by(|a, b| a.location.cmp(&b.location));
        let mut atoms: Vec<Atom> = Vec::with_capacity(merged.len());
        for a in merged {
            match atoms.last_mut() {
                Some(last) if last.location == a.location => last.weight += a.weight,
                _ => atoms.push(a),
            }
        }
        Ok(Measure {
            components,
            atoms,
            continuous,
        })
    }

    /// Purely atomic measure from distinct atoms.
    pub fn atomic(atoms: Vec<Atom>) -> Result<Self> {
        Measure::new(vec![(Component::FiniteAtomic { atoms }, rational::int(1))])
    }

    /// `self + weight * component`.
    pub fn with(&self, component: Component, weight: Rational) -> Result<Self> {
        let mut comps = self.components.clone();
        comps.push((component, weight));
        Measure::new(comps)
    }

    pub fn components(&self) -> &[(Component, Rational)] {
        &self.components
    }

    /// All atoms with their weighted masses; coincident atoms from different
    /// components are summed. Sorted lexicographically by location.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub(crate) fn continuous(&self) -> &[Continuous] {
        &self.continuous
    }

    pub fn is_atomic(&self) -> bool {
        self.continuous.is_empty()
    }

    /// True when some component has a non-smooth angular profile at
    /// axis-parallel boundaries (Cauchy product or axis mixture).
    pub(crate) fn has_axis_structure(&self) -> bool {
        self.continuous
            .iter()
            .any(|c| matches!(c, Continuous::Cauchy { .. } | Continuous::Axis { .. }))
    }

    pub fn atomic_mass(&self) -> Rational {
        self.atoms.iter().map(|a| a.weight.clone()).sum()
    }

    pub fn total_mass(&self) -> MassValue {
        let cont: Option<f64> = if self.continuous.is_empty() {
            None
        } else {
            Some(
                self.continuous
                    .iter()
                    .map(|c| match c {
                        Continuous::Disk { mass, .. } | Continuous::Cauchy { mass, .. } | Continuous::Axis { mass } => {
                            *mass
                        }
                    })
                    .sum(),
            )
        };
        MassValue::combine(self.atomic_mass(), cont)
    }

    /// Radius of a disk around the origin outside which only Cauchy tails live.
    pub fn support_radius(&self) -> f64 {
        let mut r: f64 = 0.0;
        for a in &self.atoms {
            r = r.max(a.location.approx().norm());
        }
        for c in &self.continuous {
            match c {
                Continuous::Disk { center, radius, .. } => r = r.max(center.norm() + radius),
                Continuous::Cauchy { center, .. } => r = r.max(center.norm()),
                Continuous::Axis { .. } => {}
            }
        }
        r
    }

    fn atoms_where(&self, keep: impl Fn(&QPoint) -> bool) -> Rational {
        let mut s = Rational::zero();
        for a in &self.atoms {
            if keep(&a.location) {
                s += &a.weight;
            }
        }
        s
    }

    /// Continuous mass of `{<u, y> >= c}` (`> c` when `open`).
    pub(crate) fn continuous_halfspace(&self, u: Point2, c: f64, open: bool) -> Option<f64> {
        if self.continuous.is_empty() {
            return None;
        }
        let mut total = 0.0;
        for comp in &self.continuous {
            total += match comp {
                Continuous::Disk { center, radius, mass } => mass * disk_segment_fraction(c - u.dot(*center), *radius),
                Continuous::Cauchy { center, mass } => mass * cauchy_upper_tail((c - u.dot(*center)) / u.norm_l1()),
                Continuous::Axis { mass } => mass * axis_cauchy_halfspace(&[u.x, u.y], c, open),
            };
        }
        Some(total)
    }

    /// Continuous mass on the line through `p` with direction `d`; only an
    /// axis mixture whose axis is this line contributes.
    pub(crate) fn continuous_line(&self, p: Point2, d: Point2) -> Option<f64> {
        let mut total = None;
        for comp in &self.continuous {
            if let Continuous::Axis { mass } = comp {
                let on_first = d.y.abs() <= AXIS_PARALLEL_TOL && p.y == 0.0;
                let on_second = d.x.abs() <= AXIS_PARALLEL_TOL && p.x == 0.0;
                if on_first || on_second {
                    *total.get_or_insert(0.0) += mass * 0.5;
                }
            }
        }
        total
    }

    /// Continuous mass on the open ray from `p` along `d`.
    pub(crate) fn continuous_ray(&self, p: Point2, d: Point2) -> Option<f64> {
        let mut total = None;
        for comp in &self.continuous {
            if let Continuous::Axis { mass } = comp {
                if d.y.abs() <= AXIS_PARALLEL_TOL && p.y == 0.0 {
                    let tail = if d.x > 0.0 {
                        cauchy_upper_tail(p.x)
                    } else {
                        cauchy_upper_tail(-p.x)
                    };
                    *total.get_or_insert(0.0) += mass * 0.5 * tail;
                } else if d.x.abs() <= AXIS_PARALLEL_TOL && p.x == 0.0 {
                    let tail = if d.y > 0.0 {
                        cauchy_upper_tail(p.y)
                    } else {
                        cauchy_upper_tail(-p.y)
                    };
                    *total.get_or_insert(0.0) += mass * 0.5 * tail;
                }
            }
        }
        total
    }

    /// `mu(H)` for the closed halfspace `H`.
    pub fn halfspace_mass(&self, h: &Halfspace) -> MassValue {
        let atomic = self.atoms_where(|p| h.contains(p));
        MassValue::combine(atomic, self.continuous_halfspace(h.normal, h.offset, false))
    }

    /// `mu(int H)`.
    pub fn open_halfspace_mass(&self, h: &Halfspace) -> MassValue {
        let atomic = self.atoms_where(|p| h.interior_contains(p));
        MassValue::combine(atomic, self.continuous_halfspace(h.normal, h.offset, true))
    }

    /// Mass of the full line through `p` with unit direction `direction`.
    pub fn line_mass(&self, p: Point2, direction: Point2) -> Result<MassValue> {
        check_unit(direction)?;
        Point2::checked(p.x, p.y)?;
        let n = direction.rot90();
        let atomic = self.atoms_where(|q| geometry::projection_sign(n, p, q) == Ordering::Equal);
        Ok(MassValue::combine(atomic, self.continuous_line(p, direction)))
    }

    /// Mass of the ray from `origin` along unit `direction`; the origin itself
    /// is excluded when `open`.
    pub fn ray_mass(&self, origin: Point2, direction: Point2, open: bool) -> Result<MassValue> {
        check_unit(direction)?;
        Point2::checked(origin.x, origin.y)?;
        let n = direction.rot90();
        let atomic = self.atoms_where(|q| {
            geometry::projection_sign(n, origin, q) == Ordering::Equal
                && match geometry::projection_sign(direction, origin, q) {
                    Ordering::Greater => true,
                    Ordering::Equal => !open,
                    Ordering::Less => false,
                }
        });
        Ok(MassValue::combine(atomic, self.continuous_ray(origin, direction)))
    }

    /// `mu(F)`: open halfplane, open ray and center.
    pub fn flag_mass(&self, f: &FlagHalfspace2D) -> MassValue {
        let atomic = self.atoms_where(|q| f.contains(q));
        let c = f.plane_normal.dot(f.center);
        let plane = self.continuous_halfspace(f.plane_normal, c, true);
        let ray = self.continuous_ray(f.center, f.ray_direction);
        let cont = match (plane, ray) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(0.0) + b.unwrap_or(0.0)),
        };
        MassValue::combine(atomic, cont)
    }

    /// `mu({x})`, exact.
    pub fn point_mass(&self, x: Point2) -> MassValue {
        match QPoint::from_f64(x) {
            Ok(q) => MassValue::Exact(self.point_mass_exact(&q)),
            Err(_) => MassValue::Exact(Rational::zero()),
        }
    }

    pub fn point_mass_exact(&self, x: &QPoint) -> Rational {
        match self.atoms.binary_search_by(|a| a.location.cmp(x)) {
            Ok(i) => self.atoms[i].weight.clone(),
            Err(_) => Rational::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use std::f64::consts::{PI, SQRT_2};

    fn disk() -> Measure {
        Measure::new(vec![(
            Component::UniformDisk {
                center: Point2::ORIGIN,
                radius: 2.0,
                total_mass: 1.0,
            },
            int(1),
        )])
        .unwrap()
    }

    fn two_atoms() -> Measure {
        Measure::atomic(vec![Atom::at(0.0, 0.0, 1).unwrap(), Atom::at(1.0, 1.0, 2).unwrap()]).unwrap()
    }

    fn disk_with_atom() -> Measure {
        disk()
            .with(
                Component::Dirac {
                    location: QPoint::from_ints(1, 1),
                    mass: ratio(1, 10),
                },
                int(1),
            )
            .unwrap()
    }

    #[test]
    fn disk_halfspace_masses() {
        let m = disk();
        let h = Halfspace::new(Point2::new(1.0, 0.0), 0.0).unwrap();
        assert!((m.halfspace_mass(&h).to_f64() - 0.5).abs() < 1e-15);
        let h = Halfspace::new(Point2::new(1.0, 0.0), SQRT_2).unwrap();
        let expected = (PI - 2.0) / (4.0 * PI);
        assert!((m.halfspace_mass(&h).to_f64() - expected).abs() < 1e-12);
        assert_eq!(m.open_halfspace_mass(&h), m.halfspace_mass(&h));
        assert_eq!(
            m.line_mass(Point2::ORIGIN, Point2::new(0.0, 1.0)).unwrap(),
            MassValue::Exact(int(0))
        );
    }

    #[test]
    fn boundary_atoms_count_for_closed_but_not_open_halfspaces() {
        let m = two_atoms();
        let s = SQRT_2 / 2.0;
        let h = Halfspace::new(Point2::new(s, s), SQRT_2).unwrap();
        assert_eq!(m.halfspace_mass(&h), MassValue::Exact(int(2)));
        assert_eq!(m.open_halfspace_mass(&h), MassValue::Exact(int(0)));
    }

    #[test]
    fn cauchy_product_tail() {
        let m = Measure::new(vec![(Component::CauchyProduct { center: Point2::ORIGIN }, ratio(1, 2))]).unwrap();
        let h = Halfspace::new(Point2::new(1.0, 0.0), 1.0).unwrap();
        assert!((m.halfspace_mass(&h).to_f64() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn axis_mixture_open_and_ray_masses() {
        let m = Measure::new(vec![(Component::AxisCauchyMixture, int(1))]).unwrap();
        let h = Halfspace::new(Point2::new(0.0, 1.0), 0.0).unwrap();
        assert!((m.open_halfspace_mass(&h).to_f64() - 0.25).abs() < 1e-15);
        assert!((m.halfspace_mass(&h).to_f64() - 0.75).abs() < 1e-15);
        let ray = m.ray_mass(Point2::new(1.0, 0.0), Point2::new(1.0, 0.0), true).unwrap();
        assert!((ray.to_f64() - 0.125).abs() < 1e-15);
        let line = m.line_mass(Point2::new(3.0, 0.0), Point2::new(-1.0, 0.0)).unwrap();
        assert!((line.to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn line_through_the_atom_carries_it() {
        let m = disk_with_atom();
        let v = m.line_mass(Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        assert_eq!(v, MassValue::Exact(ratio(1, 10)));
    }

    #[test]
    fn flag_masses_at_the_nonattainment_point() {
        let m = disk_with_atom();
        let x = Point2::new(1.0, 0.0);
        let seg = 1.0 / 3.0 - 3f64.sqrt() / (4.0 * PI);
        let away = FlagHalfspace2D::new(x, Point2::new(1.0, 0.0), Point2::new(0.0, -1.0)).unwrap();
        assert!((m.flag_mass(&away).to_f64() - seg).abs() < 1e-12);
        let toward = FlagHalfspace2D::new(x, Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        assert!((m.flag_mass(&toward).to_f64() - seg - 0.1).abs() < 1e-12);
        let everything =
            FlagHalfspace2D::new(Point2::new(-5.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)).unwrap();
        assert!((m.flag_mass(&everything).to_f64() - 1.1).abs() < 1e-12);
    }

    #[test]
    fn point_mass_requires_exact_location() {
        let m = disk_with_atom();
        assert_eq!(m.point_mass(Point2::new(1.0, 1.0)), MassValue::Exact(ratio(1, 10)));
        assert_eq!(m.point_mass(Point2::new(1.0 + 1e-9, 1.0)), MassValue::Exact(int(0)));
    }

    #[test]
    fn construction_rejects_invalid_inputs() {
        let dup = Measure::atomic(vec![Atom::at(0.0, 0.0, 1).unwrap(), Atom::at(0.0, 0.0, 2).unwrap()]);
        assert!(matches!(dup, Err(Error::DuplicateAtom(..))));
        let bad_radius = Measure::new(vec![(
            Component::UniformDisk {
                center: Point2::ORIGIN,
                radius: 0.0,
                total_mass: 1.0,
            },
            int(1),
        )]);
        assert!(matches!(bad_radius, Err(Error::NonPositiveRadius(_))));
        assert!(Halfspace::new(Point2::new(1.0, 1.0), 0.0).is_err());
        assert!(FlagHalfspace2D::new(Point2::ORIGIN, Point2::new(1.0, 0.0), Point2::new(1.0, 0.0)).is_err());
        assert!(Measure::atomic(vec![Atom::at(0.0, 0.0, 0).unwrap()]).is_err());
    }

    #[test]
    fn coincident_atoms_across_components_are_summed() {
        let m = two_atoms()
            .with(
                Component::Dirac {
                    location: QPoint::from_ints(0, 0),
                    mass: int(3),
                },
                ratio(1, 3),
            )
            .unwrap();
        assert_eq!(m.point_mass(Point2::ORIGIN), MassValue::Exact(int(2)));
        assert_eq!(m.total_mass(), MassValue::Exact(int(4)));
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(0.19550110051, 12), "0.19550110051");
        assert_eq!(format_sig(1234.5, 12), "1234.5");
    }
}

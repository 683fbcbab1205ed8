//! Flag minimization for measures with continuous components.
//!
//! The flag mass as a function of the normal angle is the sum of a
//! continuous part (closed forms of the continuous components) and a
//! piecewise constant atomic part that only changes at angles where the
//! boundary line hits an atom. The minimizer is therefore either at such a
//! critical angle, evaluated exactly with both ray choices, or at an interior
//! minimum of the continuous part, located by a coarse scan and golden-section
//! refinement. Axis-parallel normals are added as critical angles when a
//! Cauchy component is present, since the axis mixture jumps there.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_traits::Zero;

use super::atomic::Star;
use super::DepthOptions;
use crate::geometry::{self, Direction, Point2, QPoint};
use crate::measure::{FlagHalfspace2D, Measure};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub(crate) struct Candidate {
    pub value: f64,
    pub closed: f64,
    pub normal: Point2,
    pub ray: Point2,
    pub theta: f64,
}

pub(crate) struct FlagSearch<'a> {
    m: &'a Measure,
    x: Point2,
    star: Star,
    center_mass: f64,
    rays_f64: Vec<f64>,
    opts: &'a DepthOptions,
}

fn wrap(theta: f64) -> f64 {
    theta.rem_euclid(TAU)
}

fn angular_gap(a: f64, b: f64) -> f64 {
    let d = wrap(a - b);
    d.min(TAU - d)
}

/// Exact unit normals at the four axis angles.
fn axis_normal(k: usize) -> Point2 {
    match k % 4 {
        0 => Point2::new(1.0, 0.0),
        1 => Point2::new(0.0, 1.0),
        2 => Point2::new(-1.0, 0.0),
        _ => Point2::new(0.0, -1.0),
    }
}

impl<'a> FlagSearch<'a> {
    pub fn new(m: &'a Measure, x: Point2, xq: &QPoint, opts: &'a DepthOptions) -> Self {
        let star = Star::new(m.atoms(), xq);
        let rays_f64 = star.rays.iter().map(|(_, w)| rational::to_f64(w)).collect();
        let center_mass = rational::to_f64(&star.at_center);
        FlagSearch {
            m,
            x,
            star,
            center_mass,
            rays_f64,
            opts,
        }
    }

    fn continuous(&self, u: Point2, ray: Point2, open: bool) -> f64 {
        let c = u.dot(self.x);
        let plane = self.m.continuous_halfspace(u, c, open).unwrap_or(0.0);
        if open {
            plane + self.m.continuous_ray(self.x, ray).unwrap_or(0.0)
        } else {
            plane
        }
    }

    /// Flag value at normal `u`, minimized over the two rays, plus the closed
    /// halfspace mass with the same normal.
    pub fn eval_normal(&self, u: Point2) -> Candidate {
        let r1 = u.rot90();
        let r2 = -r1;
        let mut open = 0.0;
        let mut on1 = 0.0;
        let mut on2 = 0.0;
        for ((d, _), w) in self.star.rays.iter().zip(&self.rays_f64) {
            match geometry::direction_sign(u, d) {
                Ordering::Greater => open += w,
                Ordering::Equal => {
                    if geometry::direction_sign(r1, d) == Ordering::Greater {
                        on1 += w
                    } else {
                        on2 += w
                    }
                }
                Ordering::Less => {}
            }
        }
        let base = self.center_mass + open;
        let v1 = base + on1 + self.continuous(u, r1, true);
        let v2 = base + on2 + self.continuous(u, r2, true);
        let closed = base + on1 + on2 + self.continuous(u, r1, false);
        let (value, ray) = if v2 < v1 { (v2, r2) } else { (v1, r1) };
        Candidate {
            value,
            closed,
            normal: u,
            ray,
            theta: wrap(u.y.atan2(u.x)),
        }
    }

    pub fn eval_angle(&self, theta: f64) -> Candidate {
        self.eval_normal(Point2::from_angle(theta))
    }

    /// Flags whose boundary runs along atom ray `d`, one per open side, each
    /// with its better ray. The atomic part is decided exactly against `d`
    /// rather than against a rounded normal.
    fn eval_along(&self, d: &Direction) -> [Candidate; 2] {
        let mut left = Rational::zero();
        let mut right = Rational::zero();
        let mut forward = Rational::zero();
        let mut backward = Rational::zero();
        for (e, w) in &self.star.rays {
            match d.cross_sign(e) {
                Ordering::Greater => left += w,
                Ordering::Less => right += w,
                Ordering::Equal => {
                    if d.dot_sign(e) == Ordering::Greater {
                        forward += w
                    } else {
                        backward += w
                    }
                }
            }
        }
        let du = d.unit();
        let on_line = rational::to_f64(&(&forward + &backward));
        let mut out = Vec::with_capacity(2);
        for (side_mass, u) in [(left, du.rot90()), (right, -du.rot90())] {
            let side = self.center_mass + rational::to_f64(&side_mass);
            let vf = side + rational::to_f64(&forward) + self.continuous(u, du, true);
            let vb = side + rational::to_f64(&backward) + self.continuous(u, -du, true);
            let closed = side + on_line + self.continuous(u, du, false);
            let (value, ray) = if vb < vf { (vb, -du) } else { (vf, du) };
            out.push(Candidate {
                value,
                closed,
                normal: u,
                ray,
                theta: wrap(u.y.atan2(u.x)),
            });
        }
        [out[0].clone(), out[1].clone()]
    }

    /// Normal angles where the atomic part or the axis mixture can jump.
    fn critical_candidates(&self) -> (Vec<Candidate>, Vec<f64>) {
        let mut cands = Vec::new();
        let mut angles = Vec::new();
        for (d, _) in &self.star.rays {
            for c in self.eval_along(d) {
                angles.push(c.theta);
                cands.push(c);
            }
        }
        if self.m.has_axis_structure() {
            for k in 0..4 {
                let c = self.eval_normal(axis_normal(k));
                angles.push(c.theta);
                cands.push(c);
            }
        }
        (cands, angles)
    }

    fn golden(&self, mut a: f64, mut b: f64) -> Candidate {
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let mut fc = self.eval_angle(c);
        let mut fd = self.eval_angle(d);
        while (b - a).abs() > self.opts.angle_tol {
            if fc.value <= fd.value {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.eval_angle(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.eval_angle(d);
            }
        }
        if fc.value <= fd.value {
            fc
        } else {
            fd
        }
    }

    /// All candidate flags: critical ones, then refined interior minima.
    /// With `stop_below`, returns early once some candidate falls below it.
    pub fn run(&self, stop_below: Option<f64>, hint: Option<f64>) -> (Vec<Candidate>, bool) {
        let below = |c: &Candidate| stop_below.is_some_and(|l| c.value < l);
        let (mut cands, crit_angles) = self.critical_candidates();
        if cands.iter().any(below) {
            return (cands, true);
        }
        if self.m.continuous().is_empty() {
            return (cands, false);
        }
        let n = self.opts.scan_angles.max(8);
        let step = TAU / n as f64;
        let start = hint.map(|h| (wrap(h) / step).round() as usize % n).unwrap_or(0);
        let mut scan: Vec<Option<Candidate>> = vec![None; n];
        for j in 0..n {
            // Alternate outward from the hinted index.
            let off = j.div_ceil(2);
            let k = if j % 2 == 1 {
                (start + off) % n
            } else {
                (start + n - off) % n
            };
            let c = self.eval_angle(k as f64 * step);
            if below(&c) {
                cands.push(c);
                return (cands, true);
            }
            scan[k] = Some(c);
        }
        let scan: Vec<Candidate> = scan.into_iter().map(|c| c.expect("filled")).collect();
        let mut minima: Vec<usize> = (0..n)
            .filter(|&k| {
                let v = scan[k].value;
                v <= scan[(k + n - 1) % n].value && v <= scan[(k + 1) % n].value
            })
            .collect();
        minima.sort_by(|&a, &b| scan[a].value.total_cmp(&scan[b].value));
        minima.truncate(self.opts.refine_candidates);
        for k in minima {
            let theta = k as f64 * step;
            let refined = self.golden(theta - step, theta + step);
            let near_critical = crit_angles
                .iter()
                .any(|&a| angular_gap(a, refined.theta) < self.opts.critical_gap);
            if !near_critical {
                if below(&refined) {
                    cands.push(refined);
                    return (cands, true);
                }
                cands.push(refined);
            }
            cands.push(scan[k].clone());
        }
        (cands, false)
    }
}

/// Minimum, witness and attainment from a candidate list.
pub(crate) fn summarize(x: Point2, cands: &[Candidate], attain_tol: f64) -> (f64, Option<FlagHalfspace2D>, bool) {
    let mut best: Option<&Candidate> = None;
    for c in cands {
        if best.is_none_or(|b| c.value < b.value) {
            best = Some(c);
        }
    }
    let Some(best) = best else {
        return (0.0, None, true);
    };
    let attained = cands
        .iter()
        .any(|c| c.value <= best.value + attain_tol && c.closed <= best.value + attain_tol);
    let witness = FlagHalfspace2D::new(x, best.normal, best.ray).ok();
    (best.value, witness, attained)
}

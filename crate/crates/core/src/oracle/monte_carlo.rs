//! Monte Carlo masses of single components.
//!
//! Samples are drawn in chunks of [`CHUNK`] indices. Chunk `j` uses a
//! ChaCha8 generator seeded with `seed` on stream `j`, so sample `i` always
//! comes from stream `i / CHUNK` whatever the number of worker threads, and
//! estimates are reproducible bit for bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Point2, QPoint};
use crate::measure::{Component, FlagHalfspace2D, Halfspace};
use crate::rational::{self, Rational};

pub const CHUNK: u64 = 1024;

/// Set whose mass is estimated.
#[derive(Clone, Copy, Debug)]
pub enum Region {
    Halfspace(Halfspace),
    Flag(FlagHalfspace2D),
    Plane,
}

impl Region {
    fn contains(&self, p: Point2, exact: bool) -> bool {
        if exact {
            let Ok(q) = QPoint::from_f64(p) else {
                return false;
            };
            return match self {
                Region::Plane => true,
                Region::Halfspace(h) => h.contains(&q),
                Region::Flag(f) => f.contains(&q),
            };
        }
        match self {
            Region::Plane => true,
            Region::Halfspace(h) => h.normal().dot(p) >= h.offset(),
            Region::Flag(f) => {
                let v = p - f.center();
                let s = f.plane_normal().dot(v);
                s > 0.0 || (s == 0.0 && (f.ray_direction().dot(v) > 0.0 || v == Point2::ORIGIN))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Uniform double in the open interval `(0, 1)`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

fn cauchy(rng: &mut ChaCha8Rng) -> f64 {
    (std::f64::consts::PI * (open_unit(rng) - 0.5)).tan()
}

enum Sampler {
    Disk { center: Point2, radius: f64 },
    Cauchy { center: Point2 },
    Axis,
    Atoms { points: Vec<Point2>, cumulative: Vec<f64> },
}

impl Sampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> Point2 {
        match self {
            Sampler::Disk { center, radius } => {
                let r = radius * open_unit(rng).sqrt();
                let t = std::f64::consts::TAU * open_unit(rng);
                *center + Point2::from_angle(t) * r
            }
            Sampler::Cauchy { center } => *center + Point2::new(cauchy(rng), cauchy(rng)),
            Sampler::Axis => {
                let first = rng.next_u32() & 1 == 0;
                let s = cauchy(rng);
                if first {
                    Point2::new(s, 0.0)
                } else {
                    Point2::new(0.0, s)
                }
            }
            Sampler::Atoms { points, cumulative } => {
                let u = open_unit(rng) * cumulative.last().copied().unwrap_or(0.0);
                let i = cumulative.partition_point(|&c| c < u).min(points.len() - 1);
                points[i]
            }
        }
    }
}

fn sampler(c: &Component) -> (Sampler, f64) {
    match c {
        Component::UniformDisk {
            center,
            radius,
            total_mass,
        } => (
            Sampler::Disk {
                center: *center,
                radius: *radius,
            },
            *total_mass,
        ),
        Component::CauchyProduct { center } => (Sampler::Cauchy { center: *center }, 1.0),
        Component::AxisCauchyMixture => (Sampler::Axis, 1.0),
        Component::Dirac { location, mass } => (
            Sampler::Atoms {
                points: vec![location.approx()],
                cumulative: vec![1.0],
            },
            rational::to_f64(mass),
        ),
        Component::FiniteAtomic { atoms } => {
            let total: Rational = atoms.iter().map(|a| a.weight.clone()).sum();
            let mut acc = 0.0;
            let cumulative = atoms
                .iter()
                .map(|a| {
                    acc += rational::to_f64(&a.weight);
                    acc
                })
                .collect();
            (
                Sampler::Atoms {
                    points: atoms.iter().map(|a| a.location.approx()).collect(),
                    cumulative,
                },
                rational::to_f64(&total),
            )
        }
    }
}

/// Estimate of the unweighted mass `component(region)` from `n` samples.
/// The standard error uses `max(p(1 - p), 1/n)` so that it never vanishes.
pub fn monte_carlo_mass(component: &Component, region: &Region, n: u64, seed: u64) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::ZeroSamples);
    }
    let (sampler, total) = sampler(component);
    if let Sampler::Atoms { points, .. } = &sampler {
        if points.is_empty() {
            return Ok(McEstimate {
                estimate: 0.0,
                std_error: 0.0,
                samples: n,
            });
        }
    }
    // Atom samples can sit exactly on a boundary, so they are tested exactly.
    let exact = matches!(sampler, Sampler::Atoms { .. });
    let chunks = n.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j);
            let len = CHUNK.min(n - j * CHUNK);
            (0..len)
                .filter(|_| region.contains(sampler.draw(&mut rng), exact))
                .count() as u64
        })
        .sum();
    let p = hits as f64 / n as f64;
    let var = (p * (1.0 - p)).max(1.0 / n as f64);
    Ok(McEstimate {
        estimate: total * p,
        std_error: total * (var / n as f64).sqrt(),
        samples: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk() -> Component {
        Component::UniformDisk {
            center: Point2::ORIGIN,
            radius: 2.0,
            total_mass: 1.0,
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        let h = Region::Halfspace(Halfspace::new(Point2::new(1.0, 0.0), 0.3).unwrap());
        let a = monte_carlo_mass(&disk(), &h, 5000, 7).unwrap();
        let b = monte_carlo_mass(&disk(), &h, 5000, 7).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo_mass(&disk(), &h, 5000, 8).unwrap();
        assert_ne!(a.estimate, c.estimate);
    }

    #[test]
    fn whole_plane_is_total_mass() {
        let e = monte_carlo_mass(&disk(), &Region::Plane, 3000, 1).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert!(monte_carlo_mass(&disk(), &Region::Plane, 0, 1).is_err());
    }

    #[test]
    fn segment_and_cauchy_tail_within_three_errors() {
        let h = Region::Halfspace(Halfspace::new(Point2::new(1.0, 0.0), 2f64.sqrt()).unwrap());
        let e = monte_carlo_mass(&disk(), &h, 100_000, 11).unwrap();
        let exact = (std::f64::consts::PI - 2.0) / (4.0 * std::f64::consts::PI);
        assert!((e.estimate - exact).abs() < 3.0 * e.std_error, "{e:?}");
        let h = Region::Halfspace(Halfspace::new(Point2::new(1.0, 0.0), 1.0).unwrap());
        let e = monte_carlo_mass(&Component::CauchyProduct { center: Point2::ORIGIN }, &h, 100_000, 12).unwrap();
        assert!((e.estimate - 0.25).abs() < 3.0 * e.std_error, "{e:?}");
    }
}

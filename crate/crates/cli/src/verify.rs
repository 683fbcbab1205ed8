use std::cmp::Ordering;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use flagdepth::depth::{self, cauchy_cross_depth, AtomicOracle, Engine};
use flagdepth::geometry::{orient, BBox, Line, Point2, QPoint};
use flagdepth::measure::{Atom, Measure};
use flagdepth::oracle::{brute_force_depth_atomic, depth_field_of};
use flagdepth::rational::{self, int, ratio, Rational};
use flagdepth::reconstruct::{
    detect_atoms, reconstruct_finite_atomic, CandidateStatus, DetectOptions, ExactOptions, Verdict,
};
use flagdepth::regions::{central_region_atomic, RegionShape};
use flagdepth::scenarios;

use crate::format::sig12;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub target: &'static str,
    pub version: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Summary {
    fn new(target: &'static str, checks: Vec<Check>) -> Self {
        Summary {
            target,
            version: env!("CARGO_PKG_VERSION"),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn failed_checks(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

pub fn disk_with_atom(delta: &Rational) -> Result<Summary> {
    let m = scenarios::disk_with_atom(delta.clone())?;
    let report = detect_atoms(&Engine::new(&m), BBox::square(2.5)?, &DetectOptions::default())?;
    let found: Vec<_> = report.confident().collect();
    let mut checks = vec![check(
        "one confident candidate",
        found.len() == 1,
        format!("{} found", found.len()),
    )];
    if let [c] = found.as_slice() {
        let err = c.location.distance(Point2::new(1.0, 1.0));
        checks.push(check(
            "location within 1e-3 of (1, 1)",
            err <= 1e-3,
            format!(
                "({}, {}), error {}",
                sig12(c.location.x),
                sig12(c.location.y),
                sig12(err)
            ),
        ));
        let want = rational::to_f64(delta);
        let mass = c.mass_estimate.unwrap_or(f64::NAN);
        checks.push(check(
            "mass within 1e-3 of delta",
            (mass - want).abs() <= 1e-3,
            format!(
                "estimate {}, lower bound {}",
                sig12(mass),
                c.mass_lower_bound.map(sig12).unwrap_or_else(|| "none".into())
            ),
        ));
    }
    Ok(Summary::new("example1", checks))
}

pub fn cauchy_cross(nx: usize, ny: usize, tol: f64) -> Result<Summary> {
    let bbox = BBox::square(3.0)?;
    let mut checks = Vec::new();
    let with_atom = scenarios::cauchy_with_atom();
    for (name, m) in [
        ("atom plus Cauchy product", &with_atom),
        ("axis Cauchy mixture", &scenarios::axis_cauchy()),
    ] {
        let field = depth_field_of(&Engine::new(m), bbox, nx, ny)?;
        let mut worst: f64 = 0.0;
        for j in 0..ny {
            for i in 0..nx {
                let p = bbox.grid_node(i, j, nx, ny);
                let want = if p == Point2::ORIGIN {
                    0.5
                } else {
                    cauchy_cross_depth(&[p.x, p.y])
                };
                worst = worst.max((field.get(i, j) - want).abs());
            }
        }
        checks.push(check(
            if name.starts_with("atom") {
                "closed form, atom plus Cauchy product"
            } else {
                "closed form, axis Cauchy mixture"
            },
            worst < tol,
            format!("max deviation {} on {nx}x{ny} nodes", sig12(worst)),
        ));
        let origin = depth::depth(m, Point2::ORIGIN)?;
        checks.push(check(
            if name.starts_with("atom") {
                "origin depth 1/2, atom plus Cauchy product"
            } else {
                "origin depth 1/2, axis Cauchy mixture"
            },
            origin.value.to_f64() == 0.5,
            sig12(origin.value.to_f64()),
        ));
    }
    let report = detect_atoms(&Engine::new(&with_atom), bbox, &DetectOptions::default())?;
    let confident = report.confident().count();
    checks.push(check(
        "no confident candidate",
        confident == 0,
        format!("{confident} confident"),
    ));
    let median = report
        .candidates
        .iter()
        .any(|c| c.status == CandidateStatus::Undecidable && c.location.distance(Point2::ORIGIN) < 1e-9);
    checks.push(check(
        "median flagged undecidable",
        median,
        format!("{} candidates", report.candidates.len()),
    ));
    Ok(Summary::new("example2", checks))
}

fn random_measure(rng: &mut ChaCha8Rng) -> Measure {
    let n = rng.gen_range(1..=10);
    let mut atoms: Vec<Atom> = Vec::new();
    while atoms.len() < n {
        let p = QPoint::from_ints(rng.gen_range(-6..=6), rng.gen_range(-6..=6));
        if atoms.iter().all(|a| a.location != p) {
            atoms.push(Atom::exact(p, int(rng.gen_range(1..=5))));
        }
    }
    Measure::atomic(atoms).expect("distinct positive atoms")
}

fn random_point(rng: &mut ChaCha8Rng) -> QPoint {
    QPoint::new(
        ratio(rng.gen_range(-80..=80), rng.gen_range(1..=12)),
        ratio(rng.gen_range(-80..=80), rng.gen_range(1..=12)),
    )
}

/// No three atoms collinear and no attained level whose region is a segment.
fn round_trip_instance(rng: &mut ChaCha8Rng) -> Result<Option<Measure>> {
    let n = rng.gen_range(3..=6);
    let mut pts: Vec<QPoint> = Vec::new();
    while pts.len() < n {
        let p = QPoint::from_ints(rng.gen_range(-10..=10), rng.gen_range(-10..=10));
        let bad = pts
            .iter()
            .enumerate()
            .any(|(i, a)| *a == p || pts[i + 1..].iter().any(|b| orient(a, b, &p) == Ordering::Equal));
        if !bad {
            pts.push(p);
        }
    }
    let m = Measure::atomic(
        pts.iter()
            .map(|p| Atom::exact(p.clone(), int(rng.gen_range(1..=5))))
            .collect(),
    )?;
    let mut vertices = pts.clone();
    let lines: Vec<Line> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| Line::through(&pts[i], &pts[j]))
        .collect();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            vertices.extend(lines[i].intersection(&lines[j]));
        }
    }
    let mut levels = vertices
        .iter()
        .map(|v| depth::depth_atomic_exact(&m, v))
        .collect::<Result<Vec<_>, _>>()?;
    levels.sort();
    levels.dedup();
    for l in levels.iter().filter(|l| **l > int(0)) {
        let segment = match central_region_atomic(&m, l)?.shape {
            RegionShape::Polygon { vertices } => {
                vertices.len() >= 2
                    && vertices
                        .windows(3)
                        .all(|w| orient(&w[0], &w[1], &w[2]) == Ordering::Equal)
            }
            _ => false,
        };
        if segment {
            return Ok(None);
        }
    }
    Ok(Some(m))
}

pub fn properties(seed: u64, count: usize) -> Result<Summary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let measures: Vec<Measure> = (0..count).map(|_| random_measure(&mut rng)).collect();

    let mut queries = 0usize;
    let mut disagreement = None;
    let mut drops = 0usize;
    let mut drop_violation = None;
    let mut incidences = 0usize;
    let mut incidence_violation = None;
    for (k, m) in measures.iter().enumerate() {
        let mut pts: Vec<QPoint> = m.atoms().iter().map(|a| a.location.clone()).collect();
        pts.extend((0..10).map(|_| random_point(&mut rng)));
        let depths: Vec<Rational> = pts
            .iter()
            .map(|p| depth::depth_atomic_exact(m, p))
            .collect::<Result<_, _>>()?;
        for (p, sweep) in pts.iter().zip(&depths) {
            let flag = depth::flag_depth_exact(m, p)?;
            let brute = brute_force_depth_atomic(m, p)?;
            if (*sweep != flag || flag != brute) && disagreement.is_none() {
                disagreement = Some(format!("measure {k} at {p:?}: {sweep} {flag} {brute}"));
            }
            queries += 1;
        }
        for a in m.atoms() {
            let x = &a.location;
            let dx = depth::depth_atomic_exact(m, x)?;
            let bound = &dx - &a.weight;
            for (z, dz) in pts.iter().zip(&depths) {
                if z == x || *dz < dx {
                    continue;
                }
                let (vx, vy) = x.sub(z);
                for _ in 0..3 {
                    let t = ratio(rng.gen_range(1..=1000), 1000)
                        / Rational::from_integer((1i64 << rng.gen_range(0..=20)).into());
                    let y = x.offset(&vx, &vy, &t);
                    let dy = depth::depth_atomic_exact(m, &y)?;
                    if dy > bound && drop_violation.is_none() {
                        drop_violation = Some(format!("measure {k}: depth {dy} at {y:?} beyond {x:?} exceeds {bound}"));
                    }
                    drops += 1;
                }
            }
            for j in 0..3 {
                let beta = &dx - &a.weight * ratio(j, 3);
                let is_vertex = match central_region_atomic(m, &beta)?.shape {
                    RegionShape::Polygon { vertices } => vertices.contains(x),
                    _ => false,
                };
                if !is_vertex && incidence_violation.is_none() {
                    incidence_violation = Some(format!("measure {k}: {x:?} is not a vertex at level {beta}"));
                }
                incidences += 1;
            }
        }
    }

    let mut trips = 0;
    let mut skipped = 0;
    let mut trip_failure = None;
    while trips < 3 {
        let Some(m) = round_trip_instance(&mut rng)? else {
            skipped += 1;
            continue;
        };
        let oracle = AtomicOracle::new(&m)?;
        let opts = ExactOptions {
            seed,
            ..ExactOptions::default()
        };
        let (r, report) = reconstruct_finite_atomic(&oracle, BBox::square(15.0)?, &opts)?;
        if (report.verdict != Verdict::Pass || r.atoms() != m.atoms()) && trip_failure.is_none() {
            trip_failure = Some(format!("round trip {trips}: verdict {:?}", report.verdict));
        }
        trips += 1;
    }

    let checks = vec![
        check(
            "sweep, flag and brute-force depth agree",
            disagreement.is_none(),
            disagreement.unwrap_or_else(|| format!("{queries} queries on {count} measures")),
        ),
        check(
            "depth drops by the atom mass past an atom",
            drop_violation.is_none(),
            drop_violation.unwrap_or_else(|| format!("{drops} points")),
        ),
        check(
            "atoms are vertices of their regions",
            incidence_violation.is_none(),
            incidence_violation.unwrap_or_else(|| format!("{incidences} atom-level pairs")),
        ),
        check(
            "exact round trip",
            trip_failure.is_none(),
            trip_failure
                .unwrap_or_else(|| format!("{trips} measures, {skipped} draws with a segment level region skipped")),
        ),
    ];
    Ok(Summary::new("properties", checks))
}

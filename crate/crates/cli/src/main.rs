mod format;
mod verify;

use std::io::BufRead;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use flagdepth::depth::{self, AtomicOracle, Engine};
use flagdepth::geometry::{BBox, Point2};
use flagdepth::measure::spec_file::{self, MeasureSpec};
use flagdepth::measure::Measure;
use flagdepth::oracle::depth_field_of;
use flagdepth::rational::{self, Rational};
use flagdepth::reconstruct::{
    detect_atoms, reconstruct_finite_atomic, CandidateStatus, DetectOptions, ExactOptions, Verdict,
};
use flagdepth::regions::{central_region_atomic, central_region_mixture, RadialOptions, RegionExport};

use format::{sig12, Sidecar};

#[derive(Parser, Debug)]
#[command(
    name = "flagdepth",
    version,
    about = "Halfspace depth of planar measures and reconstruction from depth"
)]
struct Cli {
    /// Cap on worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Depth at query points given as `x y` pairs, or read one pair per line from stdin.
    Depth(DepthArgs),
    /// Depth on a lattice, written as CSV or JSON with a metadata sidecar.
    Field(FieldArgs),
    /// Central regions at the given levels.
    Regions(RegionArgs),
    /// Recover atoms from depth values only.
    Reconstruct(ReconstructArgs),
    /// Scripted checks of the two reference measures and of exact invariants.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct DepthArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Coordinates `x y`, pairwise.
    #[arg(allow_negative_numbers = true)]
    coords: Vec<f64>,
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[arg(long)]
    spec: PathBuf,
    /// `x0,y0,x1,y1`
    #[arg(long, default_value = "-3,-3,3,3", allow_hyphen_values = true)]
    bbox: String,
    /// `NxM` lattice nodes.
    #[arg(long, default_value = "61x61")]
    resolution: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated levels; `p/q` allowed.
    #[arg(long)]
    levels: String,
    #[arg(long, default_value = "-3,-3,3,3", allow_hyphen_values = true)]
    bbox: String,
    /// Bracket width of traced boundaries (continuous measures only).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Exact search for atomic measures, detection otherwise.
    Auto,
    Exact,
    Detect,
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Search box; defaults to the atoms' box with a margin for atomic
    /// measures and `-3,-3,3,3` otherwise.
    #[arg(long, allow_hyphen_values = true)]
    bbox: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    mode: Mode,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(subcommand)]
    target: VerifyTarget,
    /// Also write the summary to this directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyTarget {
    /// Atom recovery for the disk plus an atom at (1, 1).
    Example1 {
        /// Atom mass.
        #[arg(long, default_value = "1/10")]
        delta: String,
    },
    /// Depth identity of the two Cauchy cross measures and the negative control.
    Example2 {
        #[arg(long, default_value = "61x61")]
        resolution: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Exact invariants on random atomic measures.
    Properties {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Number of random measures.
        #[arg(long, default_value_t = 40)]
        count: usize,
    },
}

/// Failure classes, mapped to exit codes.
enum Failure {
    Usage(anyhow::Error),
    Verification(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<flagdepth::Error> for Failure {
    fn from(e: flagdepth::Error) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Depth(a) => cmd_depth(a),
        Command::Field(a) => cmd_field(a),
        Command::Regions(a) => cmd_regions(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_spec(path: &Path) -> Result<(MeasureSpec, Measure)> {
    spec_file::load(path).with_context(|| format!("reading measure spec {}", path.display()))
}

fn parse_bbox(text: &str) -> Result<BBox> {
    let v = parse_numbers(text, 4).context("--bbox expects x0,y0,x1,y1")?;
    Ok(BBox::new(v[0], v[1], v[2], v[3])?)
}

fn parse_numbers(text: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| anyhow!("{s:?}: {e}")))
        .collect::<Result<_>>()?;
    if v.len() != n || v.iter().any(|x| !x.is_finite()) {
        bail!("expected {n} finite numbers, got {text:?}");
    }
    Ok(v)
}

fn parse_resolution(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text.split_once(['x', 'X']).context("--resolution expects NxM")?;
    let nx: usize = a.trim().parse().context("--resolution expects NxM")?;
    let ny: usize = b.trim().parse().context("--resolution expects NxM")?;
    if nx < 2 || ny < 2 {
        bail!("resolution must be at least 2x2, got {text}");
    }
    Ok((nx, ny))
}

fn parse_levels(text: &str) -> Result<Vec<Rational>> {
    let levels: Vec<Rational> = text
        .split(',')
        .map(|s| rational::parse_rational(s.trim()).map_err(|e| anyhow!(e)))
        .collect::<Result<_>>()?;
    if levels.is_empty() {
        bail!("no levels given");
    }
    if let Some(l) = levels.iter().find(|l| **l <= rational::int(0)) {
        bail!("levels must be positive, got {}", rational::format_rational(l));
    }
    Ok(levels)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct DepthRow {
    x: String,
    y: String,
    depth: String,
    exact: Option<String>,
    attained: bool,
    normal: Option<[String; 2]>,
}

fn cmd_depth(a: DepthArgs) -> Result<(), Failure> {
    let (_, m) = load_spec(&a.spec)?;
    if !a.coords.len().is_multiple_of(2) {
        return Err(anyhow!("query coordinates come in x y pairs, got {} numbers", a.coords.len()).into());
    }
    let mut points = Vec::new();
    for c in a.coords.chunks(2) {
        points.push(Point2::checked(c[0], c[1])?);
    }
    if a.coords.is_empty() {
        for line in std::io::stdin().lock().lines() {
            let line = line.context("reading stdin")?;
            if line.trim().is_empty() {
                continue;
            }
            let v = parse_numbers(&line, 2).with_context(|| format!("query point {line:?}"))?;
            points.push(Point2::new(v[0], v[1]));
        }
    }
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let d = depth::depth(&m, p)?;
        rows.push(DepthRow {
            x: sig12(p.x),
            y: sig12(p.y),
            depth: sig12(d.value.to_f64()),
            exact: d.value.exact().map(rational::format_rational),
            attained: d.attained,
            normal: d
                .witness
                .map(|w| [sig12(w.plane_normal().x), sig12(w.plane_normal().y)]),
        });
    }
    match a.format {
        Format::Json => print!("{}", to_json(&rows)),
        Format::Csv => {
            println!("x,y,depth,exact,attained,normal_x,normal_y");
            for r in rows {
                let (nx, ny) = r.normal.map(|[a, b]| (a, b)).unwrap_or_default();
                println!(
                    "{},{},{},{},{},{nx},{ny}",
                    r.x,
                    r.y,
                    r.depth,
                    r.exact.unwrap_or_default(),
                    r.attained
                );
            }
        }
    }
    Ok(())
}

fn cmd_field(a: FieldArgs) -> Result<(), Failure> {
    let (spec, m) = load_spec(&a.spec)?;
    let bbox = parse_bbox(&a.bbox)?;
    let (nx, ny) = parse_resolution(&a.resolution)?;
    let mut field = depth_field_of(&Engine::new(&m), bbox, nx, ny)?;
    field.spec_hash = Some(spec.hash());
    match a.format {
        Format::Csv => {
            let mut csv = String::new();
            for j in 0..ny {
                let row: Vec<String> = (0..nx).map(|i| sig12(field.get(i, j))).collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            write_file(&a.out, "field.csv", &csv)?;
            write_file(&a.out, "field.meta.json", &format!("{}\n", field.sidecar_json()))?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct FieldJson {
                metadata: flagdepth::oracle::FieldMetadata,
                values: Vec<Vec<f64>>,
            }
            let values = (0..ny).map(|j| (0..nx).map(|i| field.get(i, j)).collect()).collect();
            write_file(
                &a.out,
                "field.json",
                &to_json(&FieldJson {
                    metadata: field.metadata(),
                    values,
                }),
            )?;
        }
    }
    Ok(())
}

fn cmd_regions(a: RegionArgs) -> Result<(), Failure> {
    let (spec, m) = load_spec(&a.spec)?;
    let levels = parse_levels(&a.levels)?;
    let bbox = parse_bbox(&a.bbox)?;
    if !(a.tol > 0.0 && a.tol.is_finite()) {
        return Err(anyhow!("--tol must be positive").into());
    }
    let opts = RadialOptions {
        tol: a.tol,
        ..RadialOptions::default()
    };
    let mut regions: Vec<RegionExport> = Vec::with_capacity(levels.len());
    for level in &levels {
        let r = if m.is_atomic() {
            central_region_atomic(&m, level)
        } else {
            central_region_mixture(&Engine::new(&m), rational::to_f64(level), bbox, None, &opts)
        }?;
        regions.push(r.export());
    }
    for r in regions.iter().filter(|r| r.kind == "empty") {
        eprintln!("level {}: empty region", sig12(r.level));
    }
    let sidecar = Sidecar::new("regions", &spec).with_bbox(bbox);
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct RegionsJson {
                metadata: Sidecar,
                regions: Vec<RegionExport>,
            }
            write_file(
                &a.out,
                "regions.json",
                &to_json(&RegionsJson {
                    metadata: sidecar,
                    regions,
                }),
            )?;
        }
        Format::Csv => {
            let mut csv = String::from("level,index,x,y\n");
            for r in &regions {
                for (k, p) in r.vertices.iter().enumerate() {
                    csv.push_str(&format!("{},{k},{},{}\n", sig12(r.level), sig12(p[0]), sig12(p[1])));
                }
            }
            write_file(&a.out, "regions.csv", &csv)?;
            write_file(&a.out, "regions.meta.json", &to_json(&sidecar))?;
        }
    }
    Ok(())
}

fn default_box(m: &Measure) -> Result<BBox> {
    if !m.is_atomic() || m.atoms().is_empty() {
        return Ok(BBox::square(3.0)?);
    }
    let pts: Vec<Point2> = m.atoms().iter().map(|a| a.location.approx()).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let pad = 1.0 + 0.25 * (x1 - x0).max(y1 - y0);
    Ok(BBox::new(x0 - pad, y0 - pad, x1 + pad, y1 + pad)?)
}

fn cmd_reconstruct(a: ReconstructArgs) -> Result<(), Failure> {
    let (spec, m) = load_spec(&a.spec)?;
    let bbox = match &a.bbox {
        Some(b) => parse_bbox(b)?,
        None => default_box(&m)?,
    };
    let exact = match a.mode {
        Mode::Auto => m.is_atomic(),
        Mode::Exact => {
            if !m.is_atomic() {
                return Err(anyhow!("exact reconstruction needs a purely atomic measure").into());
            }
            true
        }
        Mode::Detect => false,
    };
    let sidecar = Sidecar::new("reconstruct", &spec).with_bbox(bbox).with_seed(a.seed);
    let (json, passed, summary) = if exact {
        let oracle = AtomicOracle::new(&m)?;
        let opts = ExactOptions {
            seed: a.seed,
            ..ExactOptions::default()
        };
        let (found, report) = reconstruct_finite_atomic(&oracle, bbox, &opts)?;
        #[derive(Serialize)]
        struct Out<'a> {
            metadata: Sidecar,
            mode: &'static str,
            atoms: Vec<[String; 3]>,
            report: &'a flagdepth::reconstruct::ExactReport,
        }
        let atoms = found
            .atoms()
            .iter()
            .map(|at| {
                [
                    rational::format_rational(at.location.x()),
                    rational::format_rational(at.location.y()),
                    rational::format_rational(&at.weight),
                ]
            })
            .collect::<Vec<_>>();
        let verdict = if report.verdict == Verdict::Pass {
            "PASS"
        } else {
            "FAIL"
        };
        let summary = format!("{} atoms, verdict {verdict}", atoms.len());
        let json = to_json(&Out {
            metadata: sidecar,
            mode: "exact",
            atoms,
            report: &report,
        });
        (json, report.verdict == Verdict::Pass, summary)
    } else {
        let report = detect_atoms(&Engine::new(&m), bbox, &DetectOptions::default())?;
        let confident = report.confident().count();
        let unresolved = report
            .candidates
            .iter()
            .filter(|c| matches!(c.status, CandidateStatus::Undecidable | CandidateStatus::Unstable))
            .count();
        // Detection has no round-trip check; it passes when it names at least
        // one atom and leaves no candidate unresolved.
        let passed = confident > 0 && unresolved == 0;
        #[derive(Serialize)]
        struct Out<'a> {
            metadata: Sidecar,
            mode: &'static str,
            verdict: &'static str,
            report: &'a flagdepth::reconstruct::DetectionReport,
        }
        let json = to_json(&Out {
            metadata: sidecar,
            mode: "detect",
            verdict: if passed { "PASS" } else { "FAIL" },
            report: &report,
        });
        (
            json,
            passed,
            format!("{confident} confident candidates, {unresolved} unresolved"),
        )
    };
    let path = write_file(&a.out, "reconstruction.json", &json)?;
    println!("{}: {summary}", path.display());
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification(summary))
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    let (name, summary) = match a.target {
        VerifyTarget::Example1 { delta } => {
            let delta = rational::parse_rational(&delta).map_err(|e| anyhow!(e))?;
            if delta <= rational::int(0) {
                return Err(anyhow!("--delta must be positive").into());
            }
            ("example1", verify::disk_with_atom(&delta)?)
        }
        VerifyTarget::Example2 { resolution, tol } => {
            let (nx, ny) = parse_resolution(&resolution)?;
            ("example2", verify::cauchy_cross(nx, ny, tol)?)
        }
        VerifyTarget::Properties { seed, count } => ("properties", verify::properties(seed, count)?),
    };
    let json = to_json(&summary);
    print!("{json}");
    if let Some(dir) = &a.out {
        write_file(dir, &format!("verify-{name}.json"), &json)?;
    }
    if summary.passed {
        Ok(())
    } else {
        Err(Failure::Verification(format!(
            "{name}: {}",
            summary.failed_checks().join(", ")
        )))
    }
}

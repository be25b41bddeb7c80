//! `billiard`: analyze, unfold, quantize and verify rational polygon billiards.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use billiard_core::contfrac::best_convergent;
use billiard_core::error::Error;
use billiard_core::exactgeom::{rationalize_angles, rationalize_angles_on_grid, Polygon};
use billiard_core::io::{load_polygon, parse_rational, preset, Rationalize};
use billiard_core::lattice::PeriodLattice;
use billiard_core::oracle::{self, BrokenRectangle};
use billiard_core::quantize::{
    momentum_aperiodic, momentum_periodic, periodic_skeleton_check, quantum_momentum, spectrum,
    spectrum_csv, SkeletonKind, SpectrumOptions,
};
use billiard_core::swf::{self, Branch};
use billiard_core::unfold::{build_epp, classify_periods, find_pocs, period_basis, Epp};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;

const OK: u8 = 0;
const INPUT: u8 = 2;
const NOT_DRPB: u8 = 3;
const BAD_PRESCRIPTION: u8 = 4;
const VERIFY_FAILED: u8 = 5;

#[derive(Parser)]
#[command(
    name = "billiard",
    version,
    about = "Semiclassical quantization of rational polygon billiards"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, EPP size, period basis, relation table and DRPB verdict.
    Analyze(AnalyzeArgs),
    /// Dump the elementary polygon pattern.
    Unfold(UnfoldArgs),
    /// Quantized energy spectrum as CSV.
    Quantize(QuantizeArgs),
    /// Compile a semiclassical wave function, verify it and export a grid.
    Swf(SwfArgs),
    /// Compare against finite differences; deformation and incompleteness studies.
    Verify(VerifyArgs),
    /// Rational approximation of angles or relation coefficients.
    Rationalize(RationalizeArgs),
}

#[derive(Args, Clone)]
struct Input {
    /// Polygon JSON file.
    #[arg(short, long, conflicts_with = "shape")]
    polygon: Option<PathBuf>,
    /// Built-in shape, e.g. parallelogram:2/3 or broken-rectangle:1,2,1,2.
    #[arg(short, long)]
    shape: Option<String>,
    /// Rationalize float angles with denominators ≤ Q.
    #[arg(long, conflicts_with = "grid_den")]
    angle_q: Option<i64>,
    /// Rationalize float angles by truncation to denominator D.
    #[arg(long)]
    grid_den: Option<i64>,
}

impl Input {
    fn polygon(&self) -> Result<Polygon, Error> {
        let mode = match (self.angle_q, self.grid_den) {
            (Some(q), _) => Rationalize::MaxDen(q),
            (_, Some(d)) => Rationalize::Grid(d),
            _ => Rationalize::Never,
        };
        match (&self.polygon, &self.shape) {
            (Some(p), _) => load_polygon(p, mode),
            (_, Some(s)) => preset(s),
            _ => Err(Error::Parse("give --polygon FILE or --shape NAME".into())),
        }
    }
}

#[derive(Args, Clone)]
struct LatticeOpts {
    /// Basis pair as two 1-based period indices, e.g. 1,2.
    #[arg(long)]
    pair: Option<String>,
    /// Quantize on the intrinsic lattice of all periods instead of a pair.
    #[arg(long)]
    full_lattice: bool,
    /// Rationalize irrational relations with denominators ≤ Q.
    #[arg(long)]
    rationalize: Option<i64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    lattice: LatticeOpts,
    /// Trace periodic orbit channels with this many rays per pair.
    #[arg(long, default_value_t = 64)]
    poc_samples: usize,
}

#[derive(Args)]
struct UnfoldArgs {
    #[command(flatten)]
    input: Input,
    /// Write image vertices as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct QuantizeArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    lattice: LatticeOpts,
    #[arg(long, default_value_t = 200.0)]
    emax: f64,
    /// Comma-separated: aperiodic, periodic, quantum.
    #[arg(long, default_value = "aperiodic")]
    kinds: String,
    /// Transverse/longitudinal ratio above which quantum levels are flagged.
    #[arg(long, default_value_t = 0.2)]
    max_ratio: f64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SwfArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    lattice: LatticeOpts,
    /// 1-based prescription id (see the printed list).
    #[arg(long, default_value_t = 1)]
    prescription: usize,
    #[arg(short, default_value_t = 1, allow_hyphen_values = true)]
    m: i64,
    #[arg(short, default_value_t = 1, allow_hyphen_values = true)]
    n: i64,
    /// aperiodic, periodic or quantum.
    #[arg(long, default_value = "aperiodic")]
    kind: String,
    /// plus, minus, cos or sin.
    #[arg(long, default_value = "plus")]
    branch: String,
    #[arg(long, default_value = "200x200")]
    grid: String,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Scale to unit L² norm over the polygon.
    #[arg(long)]
    normalize: bool,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    lattice: LatticeOpts,
    /// Grid spacing, a rational like 1/64.
    #[arg(long, default_value = "1/64")]
    h: String,
    /// Semiclassical levels up to this energy are compared.
    #[arg(long, default_value_t = 60.0)]
    emax: f64,
    /// Number of finite-difference eigenvalues.
    #[arg(long, default_value_t = 40)]
    count: usize,
    #[arg(long, default_value_t = 0.02)]
    rel_tol: f64,
    /// 1-based prescription id; defaults to all-Dirichlet.
    #[arg(long)]
    prescription: Option<usize>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Deformation study over these ε (e.g. 1/10,1/20,1/40); needs --study-base.
    #[arg(long)]
    study: Option<String>,
    /// Broken rectangle x1,x2,y1,y2 for the deformation study.
    #[arg(long)]
    study_base: Option<String>,
    /// Levels per ε in the study.
    #[arg(long, default_value_t = 10)]
    study_count: usize,
    #[arg(long)]
    study_out: Option<PathBuf>,
    /// Run only the symbolic broken-rectangle incompleteness check with this k.
    #[arg(long)]
    incompleteness: Option<i64>,
}

#[derive(Args)]
struct RationalizeArgs {
    /// Angles as float multiples of π, comma-separated.
    #[arg(long, conflicts_with = "value", allow_hyphen_values = true)]
    angles: Option<String>,
    /// A single relation coefficient.
    #[arg(long, allow_hyphen_values = true)]
    value: Option<f64>,
    /// Denominator cap.
    #[arg(short, long, default_value_t = 100)]
    q: i64,
    /// Truncate angles to this denominator instead.
    #[arg(long)]
    grid_den: Option<i64>,
}

struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotDoublyRational => NOT_DRPB,
            Error::BadPrescription(_) => BAD_PRESCRIPTION,
            Error::MomentumMismatch
            | Error::UnquantizedMomentum(_)
            | Error::ConvergenceFailure(_) => VERIFY_FAILED,
            _ => INPUT,
        };
        Failure(code, e.to_string())
    }
}

type Res = Result<u8, Failure>;

fn emit(path: &Option<PathBuf>, text: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(Failure(INPUT, format!("stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn write_file(p: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(p, bytes).map_err(|e| Failure(INPUT, format!("{}: {e}", p.display())))
}

fn parse_pair(s: &str) -> Result<(usize, usize), Failure> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure(INPUT, format!("bad pair {s:?}")))?;
    match v[..] {
        [a, b] if a >= 1 && b >= 1 && a != b => Ok((a - 1, b - 1)),
        _ => Err(Failure(
            INPUT,
            format!("pair must be two distinct 1-based indices, got {s:?}"),
        )),
    }
}

fn parse_kinds(s: &str) -> Result<Vec<SkeletonKind>, Failure> {
    s.split(',')
        .map(|k| {
            SkeletonKind::parse(k).ok_or_else(|| Failure(INPUT, format!("unknown kind {k:?}")))
        })
        .collect()
}

fn positive(what: &str, x: f64) -> Result<(), Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Failure(INPUT, format!("{what} must be positive")))
    }
}

/// Builds the lattice; exit 3 when the relations are irrational and no Q
/// was given.
fn lattice(epp: &Epp, opts: &LatticeOpts) -> Result<PeriodLattice, Failure> {
    let basis = period_basis(epp)?;
    let pair = opts.pair.as_deref().map(parse_pair).transpose()?;
    let mut lat = PeriodLattice::from_basis(&basis, pair)?;
    if lat.rational.is_none() {
        match opts.rationalize {
            Some(q) => {
                lat = lat.rationalized(q)?;
                let (c1, c2) = lat.c()?;
                eprintln!(
                    "approximation: irrational relations rationalized with Q={q} (C1={c1}, C2={c2}); \
                     levels belong to a nearby doubly rational billiard"
                );
            }
            None => return Err(Error::NotDoublyRational.into()),
        }
    }
    if opts.full_lattice {
        lat = lat.full_lattice()?;
    }
    Ok(lat)
}

fn analyze(a: &AnalyzeArgs) -> Res {
    let poly = a.input.polygon()?;
    let epp = build_epp(&poly)?;
    let mut basis = period_basis(&epp)?;
    let pocs = find_pocs(&epp, a.poc_samples);
    classify_periods(&mut basis, &pocs);
    println!("polygon: {}", poly.describe());
    for w in poly.warnings() {
        println!("warning: {w}");
    }
    println!("N = {}", poly.half_order());
    println!("genus g = {}", basis.genus);
    println!("EPP images (2C) = {}", epp.image_count());
    println!("side segment counts: {:?}", epp.side_segment_counts());
    println!(
        "periods = {} (planar rank {}, formal rank {})",
        basis.periods.len(),
        basis.planar_rank(),
        basis.formal_rank()
    );
    for (k, p) in basis.periods.iter().enumerate() {
        let v = p.approx();
        println!(
            "  D{} = ({:.12}, {:.12})  {}",
            k + 1,
            v[0],
            v[1],
            p.kind.label()
        );
    }
    println!("periodic orbit channels: {}", pocs.len());
    for c in &pocs {
        println!(
            "  pair {}: period ({:.9}, {:.9}), direction {:.9} rad",
            c.pair + 1,
            c.period_f64[0],
            c.period_f64[1],
            c.direction
        );
    }
    let pair = a.lattice.pair.as_deref().map(parse_pair).transpose()?;
    let lat = PeriodLattice::from_basis(&basis, pair)?;
    print!("{}", lat.report());
    let verdict = match &lat.rational {
        Some(r) if !r.heuristic => "yes".to_string(),
        Some(_) => "yes (heuristic)".to_string(),
        None => "no (irrational relations)".to_string(),
    };
    println!(
        "summary: g={}, images={}, periods={}, DRPB={}",
        basis.genus,
        epp.image_count(),
        basis.periods.len(),
        verdict
    );
    if let Some(d) = periodic_skeleton_check(&lat) {
        println!(
            "periodic skeleton on this pair: k={}, alpha={:.12}",
            d.k, d.alpha
        );
    }
    Ok(OK)
}

fn unfold(a: &UnfoldArgs) -> Res {
    let poly = a.input.polygon()?;
    let epp = build_epp(&poly)?;
    print!("{}", epp.dump());
    println!("# side segment counts {:?}", epp.side_segment_counts());
    if let Some(p) = &a.csv {
        let mut s = String::from("image,vertex,x,y\n");
        for im in &epp.images {
            for (k, v) in im.vertices.iter().enumerate() {
                s.push_str(&format!(
                    "{},{},{:.12},{:.12}\n",
                    im.index + 1,
                    k + 1,
                    v[0],
                    v[1]
                ));
            }
        }
        write_file(p, s.as_bytes())?;
    }
    Ok(OK)
}

fn quantize(a: &QuantizeArgs) -> Res {
    positive("--emax", a.emax)?;
    positive("--max-ratio", a.max_ratio)?;
    let kinds = parse_kinds(&a.kinds)?;
    let poly = a.input.polygon()?;
    let epp = build_epp(&poly)?;
    let lat = lattice(&epp, &a.lattice)?;
    let opts = SpectrumOptions {
        max_ratio: a.max_ratio,
        ..Default::default()
    };
    if kinds.iter().any(|k| *k != SkeletonKind::ClassicalAperiodic)
        && periodic_skeleton_check(&lat).is_none()
    {
        eprintln!(
            "note: this pair admits no periodic skeleton; periodic and quantum levels omitted"
        );
    }
    let levels = spectrum(&lat, a.emax, &kinds, &opts)?;
    let flagged = levels.iter().filter(|l| l.flagged).count();
    if flagged > 0 {
        eprintln!(
            "note: {flagged} quantum levels exceed the transverse ratio {} and are flagged",
            a.max_ratio
        );
    }
    emit(&a.out, spectrum_csv(&levels).as_bytes())?;
    Ok(OK)
}

fn parse_grid(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure(INPUT, format!("grid must look like 200x200, got {s:?}"));
    let (w, h) = s.split_once('x').ok_or_else(bad)?;
    let w: usize = w.parse().map_err(|_| bad())?;
    let h: usize = h.parse().map_err(|_| bad())?;
    if w == 0 || h == 0 {
        return Err(bad());
    }
    Ok((w, h))
}

fn swf_cmd(a: &SwfArgs) -> Res {
    let (gw, gh) = parse_grid(&a.grid)?;
    let poly = a.input.polygon()?;
    let epp = build_epp(&poly)?;
    let list = swf::enumerate_prescriptions(&epp);
    println!("consistent prescriptions: {}", list.len());
    for (i, p) in list.iter().enumerate() {
        println!("  {}: {} ({})", i + 1, p.code(), p.label());
    }
    if a.prescription == 0 || a.prescription > list.len() {
        return Err(Error::BadPrescription(a.prescription).into());
    }
    let pres = &list[a.prescription - 1];
    let lat = lattice(&epp, &a.lattice)?;
    let kind = SkeletonKind::parse(&a.kind)
        .ok_or_else(|| Failure(INPUT, format!("unknown kind {:?}", a.kind)))?;
    let q = match kind {
        SkeletonKind::ClassicalAperiodic => momentum_aperiodic(&lat, a.m, a.n)?,
        SkeletonKind::ClassicalPeriodic | SkeletonKind::Quantum => {
            let data = periodic_skeleton_check(&lat).ok_or(Error::NotPeriodicSkeleton)?;
            if kind == SkeletonKind::Quantum {
                quantum_momentum(&lat, &data, a.m, a.n, 0.2)?
            } else {
                momentum_periodic(&lat, &data, a.n)?
            }
        }
    };
    let pair = swf::compile_swf(&epp, pres, &q)?;
    let branch = match a.branch.as_str() {
        "plus" => Branch::Plus,
        "minus" => Branch::Minus,
        "cos" => Branch::Cos,
        "sin" => Branch::Sin,
        b => return Err(Failure(INPUT, format!("unknown branch {b:?}"))),
    };
    let mut f = pair.0.with_branch(branch);
    if a.normalize {
        f = swf::normalize(&f, &poly)?;
    }
    println!(
        "momentum ({:.12}, {:.12}), energy {:.12}, {} plane waves",
        q.vector[0],
        q.vector[1],
        q.energy(),
        f.terms.len()
    );
    let real = swf::real_combinations(&pair, &poly);
    if real.cos_degenerate || real.sin_degenerate {
        println!(
            "degenerate real combination: cos {} sin {}",
            if real.cos_degenerate {
                "vanishes"
            } else {
                "ok"
            },
            if real.sin_degenerate {
                "vanishes"
            } else {
                "ok"
            }
        );
    }
    let bnd = swf::verify_boundary(&f, &poly, pres, a.samples, a.tol);
    for e in &bnd.edges {
        println!(
            "  side {} {:?}: residual {:.3e}",
            e.side + 1,
            e.condition,
            e.residual
        );
    }
    let helm = swf::verify_helmholtz(&f, &poly)?;
    println!(
        "boundary max residual {:.3e} ({}), momentum spread {:.3e}, Helmholtz FD residual {:.3e} ({})",
        bnd.max_residual,
        if bnd.pass { "pass" } else { "FAIL" },
        helm.norm_spread,
        helm.fd_residual,
        if helm.pass { "pass" } else { "FAIL" }
    );
    if a.csv.is_some() || a.pgm.is_some() {
        let g = swf::grid(&f, &poly, gw, gh);
        if let Some(p) = &a.csv {
            write_file(p, swf::grid_csv(&g).as_bytes())?;
        }
        if let Some(p) = &a.pgm {
            write_file(p, &swf::grid_pgm(&g, gw, gh))?;
        }
    }
    Ok(if bnd.pass && helm.pass {
        OK
    } else {
        VERIFY_FAILED
    })
}

fn rationals(s: &str) -> Result<Vec<BigRational>, Failure> {
    s.split(',')
        .map(|t| parse_rational(t).map_err(Failure::from))
        .collect()
}

fn verify(a: &VerifyArgs) -> Res {
    if let Some(k) = a.incompleteness {
        let r = oracle::incompleteness_check(k, 10, 20)?;
        println!(
            "k={}: max |E'/E-1| over matched levels {:.3e} (bound 1/(k-1) = {:.3e}) {}",
            r.k,
            r.max_rel_error,
            r.bound,
            if r.bound_ok { "pass" } else { "FAIL" }
        );
        println!(
            "every k-th level matched at fixed n: {}; unmatched fraction {:.6}",
            r.every_kth, r.unmatched_fraction
        );
        return Ok(if r.bound_ok && r.every_kth {
            OK
        } else {
            VERIFY_FAILED
        });
    }
    positive("--emax", a.emax)?;
    positive("--rel-tol", a.rel_tol)?;
    let h = parse_rational(&a.h)?;
    let hf = h.to_f64().unwrap_or(f64::NAN);
    positive("--h", hf)?;
    let poly = a.input.polygon()?;
    let epp = build_epp(&poly)?;
    let list = swf::enumerate_prescriptions(&epp);
    let pres = match a.prescription {
        Some(i) if i == 0 || i > list.len() => return Err(Error::BadPrescription(i).into()),
        Some(i) => list[i - 1].clone(),
        None => list
            .iter()
            .find(|p| p.is_dirichlet())
            .cloned()
            .ok_or_else(|| Failure(INPUT, "no Dirichlet prescription".into()))?,
    };
    let lat = lattice(&epp, &a.lattice)?;
    let semi = swf::realized_levels(&epp, &lat, &pres, a.emax)?;
    let dom = oracle::rasterize(&poly, hf, &pres.bc)?;
    let fd = oracle::fd_eigenvalues(&dom, a.count.min(dom.unknowns().div_ceil(4)))?;
    let rep = oracle::compare_spectra(&semi, &fd, a.rel_tol);
    println!(
        "{} semiclassical levels ≤ {}, {} FD levels (h = {}, {} unknowns)",
        semi.len(),
        a.emax,
        fd.len(),
        a.h,
        dom.unknowns()
    );
    println!(
        "max rel error {:.3e}, mean {:.3e}, unmatched FD fraction {:.3} → {}",
        rep.max_rel_error,
        rep.mean_rel_error,
        rep.unmatched_fraction,
        if rep.pass { "pass" } else { "FAIL" }
    );
    emit(&a.out, oracle::match_csv(&rep).as_bytes())?;
    let mut ok = rep.pass;
    if let Some(eps) = &a.study {
        let base = a
            .study_base
            .as_deref()
            .ok_or_else(|| Failure(INPUT, "--study needs --study-base x1,x2,y1,y2".into()))?;
        let b = rationals(base)?;
        if b.len() != 4 {
            return Err(Failure(INPUT, "--study-base takes four numbers".into()));
        }
        let br = BrokenRectangle {
            x1: b[0].clone(),
            x2: b[1].clone(),
            y1: b[2].clone(),
            y2: b[3].clone(),
        };
        let study = oracle::perturbation_study(&br, &rationals(eps)?, a.study_count, hf)?;
        for r in &study.rows {
            println!(
                "eps {:.6}: x3 {:.6}, eta {:.6e}, map sup {:.6} ({})",
                r.eps,
                r.x3,
                r.eta,
                r.map_sup,
                if r.map_ok { "within ε" } else { "EXCEEDS ε" }
            );
        }
        println!("eta strictly decreasing: {}", study.decreasing);
        if let Some(p) = &a.study_out {
            write_file(p, oracle::study_csv(&study).as_bytes())?;
        }
        ok &= study.decreasing && study.rows.iter().all(|r| r.map_ok);
    }
    Ok(if ok { OK } else { VERIFY_FAILED })
}

fn rationalize(a: &RationalizeArgs) -> Res {
    if a.q < 1 {
        return Err(Failure(INPUT, "-q must be at least 1".into()));
    }
    if let Some(x) = a.value {
        let (p, q) = best_convergent(x, a.q);
        let err = (x - p as f64 / q as f64).abs();
        println!(
            "{p}/{q}  error {err:.3e}  bound 1/(qQ) {:.3e}",
            1.0 / (q as f64 * a.q as f64)
        );
        return Ok(OK);
    }
    let s = a
        .angles
        .as_deref()
        .ok_or_else(|| Failure(INPUT, "give --angles or --value".into()))?;
    let xs: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure(INPUT, format!("bad angle list {s:?}")))?;
    let radians: Vec<f64> = xs.iter().map(|x| x * std::f64::consts::PI).collect();
    let out = match a.grid_den {
        Some(d) => rationalize_angles_on_grid(&radians, d)?,
        None => rationalize_angles(&radians, a.q)?,
    };
    for (x, r) in xs.iter().zip(&out) {
        println!(
            "{x} → {}/{}  error {:.3e}",
            r.p(),
            r.q(),
            (x - r.p() as f64 / r.q() as f64).abs()
        );
    }
    Ok(OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Unfold(a) => unfold(a),
        Command::Quantize(a) => quantize(a),
        Command::Swf(a) => swf_cmd(a),
        Command::Verify(a) => verify(a),
        Command::Rationalize(a) => rationalize(a),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

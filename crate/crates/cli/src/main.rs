//! `flat-torus`: least-distortion embeddings of flat tori from the command
//! line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flat_torus::bounds::{bounds_summary, least_distortion};
use flat_torus::contour::{contour_grid, MIN_RESOLUTION};
use flat_torus::embed2d::{
    identity_decomposition, least_distortion_2d_with, obtuse_superbasis, verify_certificate,
    SearchConfig,
};
use flat_torus::io::{
    read_certificate, read_lattice, read_weights, to_pretty_json, write_certificate, write_weights,
};
use flat_torus::lattice::{covering_radius, shortest_vector, voronoi_cell};
use flat_torus::postype::reduce_support;
use flat_torus::presets::preset;
use flat_torus::{Error, Lattice};
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "flat-torus", version, about = "Least-distortion Euclidean embeddings of flat tori")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Lattice file: {"basis": [[..], ..]}, rows are basis vectors.
    #[arg(long, global = true, value_name = "FILE", conflicts_with = "preset")]
    lattice: Option<PathBuf>,
    /// Built-in lattice: L90, L93, L105 or L120.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Grid points per axis for contour output.
    #[arg(long, global = true, default_value_t = 256, value_name = "N")]
    resolution: usize,
    /// Certificate enumeration radius, in units of the dual minimum.
    #[arg(long = "enum-factor", global = true, default_value_t = 8.0, value_name = "R")]
    enum_factor: f64,
    /// Tolerance for bound gaps and stored-value comparisons.
    #[arg(long, global = true, default_value_t = 1e-9, value_name = "EPS")]
    tolerance: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minima, covering radius and Voronoi cell of a lattice.
    Analyze,
    /// Optimal embedding of a 2D torus with a verified dual certificate.
    Embed {
        /// Where to write the primal weight function
        /// (default: next to --out with a .weights.json suffix).
        #[arg(long, value_name = "FILE")]
        weights_out: Option<PathBuf>,
    },
    /// Re-verify a stored certificate against a lattice.
    Certify {
        #[arg(long, value_name = "FILE")]
        certificate: PathBuf,
    },
    /// Distortion ratio samples over the Voronoi cell, as CSV.
    Contour,
    /// Lower bounds, and for 2D the gap to the certified optimum.
    Bounds,
    /// Support reduction of a weight function.
    Reduce {
        #[arg(long, value_name = "FILE")]
        weights: PathBuf,
    },
}

/// A failure with its exit code and a one-line message.
struct Failure {
    code: u8,
    tag: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 3, tag: "input", message: message.into() }
    }

    fn verification(message: impl Into<String>) -> Self {
        Failure { code: 2, tag: "verification", message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, tag) = match e {
            Error::UnsupportedDimension { .. } => (4, "unsupported-dimension"),
            Error::Parse { .. }
            | Error::DimensionMismatch(_)
            | Error::SingularBasis { .. }
            | Error::IllConditioned { .. }
            | Error::InvalidWeights(_)
            | Error::InvalidArgument(_)
            | Error::NotALatticeVector { .. }
            | Error::EmptyFactorList => (3, "input"),
            _ => (1, "internal"),
        };
        Failure { code, tag, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[input]: {}", first.trim_start_matches("error: "));
            return ExitCode::from(3);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.tag, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze => analyze(g),
        Command::Embed { weights_out } => embed(g, weights_out.as_deref()),
        Command::Certify { certificate } => certify(g, certificate),
        Command::Contour => contour(g),
        Command::Bounds => bounds(g),
        Command::Reduce { weights } => reduce(g, weights),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe is not an error.
fn say(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn emit(g: &Global, text: &str) -> CliResult<()> {
    match &g.out {
        Some(p) => write_file(p, text),
        None => {
            say(&format!("{text}\n"));
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn load_lattice(g: &Global) -> CliResult<Lattice> {
    match (&g.lattice, &g.preset) {
        (Some(p), _) => Ok(read_lattice(&read(p)?).map_err(|e| match e {
            Error::Parse { .. } => Failure::input(format!("{}: {e}", p.display())),
            other => other.into(),
        })?),
        (None, Some(name)) => Ok(preset(name)?),
        (None, None) => Err(Failure::input("one of --lattice or --preset is required")),
    }
}

fn require_2d(l: &Lattice) -> CliResult<()> {
    if l.dim() != 2 {
        return Err(Error::UnsupportedDimension { expected: "2".into(), found: l.dim() }.into());
    }
    Ok(())
}

fn search_config(g: &Global) -> CliResult<SearchConfig> {
    if !(g.enum_factor.is_finite() && g.enum_factor >= 1.0) {
        return Err(Failure::input(format!("--enum-factor must be at least 1, got {}", g.enum_factor)));
    }
    Ok(SearchConfig::default())
}

#[derive(Serialize)]
struct RelevantVector {
    coords: [i64; 2],
    vector: [f64; 2],
}

fn analyze(g: &Global) -> CliResult<()> {
    let l = load_lattice(g)?;
    let report = match l.dim() {
        1 => {
            let a = l.basis()[(0, 0)].abs();
            json!({
                "dim": 1,
                "lambda": a,
                "lambda_dual": 1.0 / a,
                "mu": a / 2.0,
                "cell": "interval",
                "vertices": [[-a / 2.0], [a / 2.0]],
            })
        }
        2 => {
            let cell = voronoi_cell(&l)?;
            let relevant: Vec<RelevantVector> = cell
                .relevant_vectors
                .iter()
                .map(|p| RelevantVector { coords: p.coords, vector: [p.vector.x, p.vector.y] })
                .collect();
            json!({
                "dim": 2,
                "lambda": shortest_vector(&l)?.length,
                "lambda_dual": shortest_vector(&l.dual())?.length,
                "mu": covering_radius(&l)?,
                "cell": cell.kind(),
                "vertices": cell.vertices.iter().map(|v| [v.x, v.y]).collect::<Vec<_>>(),
                "relevant_vectors": relevant,
                "deep_hole": [cell.deep_hole.x, cell.deep_hole.y],
                "area": cell.area(),
            })
        }
        n => {
            return Err(Error::UnsupportedDimension { expected: "1 or 2".into(), found: n }.into())
        }
    };
    emit(g, &to_pretty_json(&report))
}

fn embed(g: &Global, weights_out: Option<&Path>) -> CliResult<()> {
    let l = load_lattice(g)?;
    require_2d(&l)?;
    let e = least_distortion_2d_with(&l, &search_config(g)?, g.enum_factor)?;
    let cert = write_certificate(&e);
    let weights = write_weights(&e.weights);
    let weights_path = weights_out.map(Path::to_path_buf).or_else(|| {
        g.out.as_ref().map(|p| p.with_extension("weights.json"))
    });
    emit(g, &cert)?;
    if let Some(p) = &weights_path {
        write_file(p, &weights)?;
    }
    if g.out.is_some() {
        let summary = json!({
            "c2": e.c2,
            "D": e.result.d,
            "verified": e.verified(),
            "certificate": g.out,
            "weights": weights_path,
        });
        say(&format!("{}\n", to_pretty_json(&summary)));
    }
    if !e.verified() {
        return Err(Failure::verification(format!(
            "certificate failed checks: {}",
            e.report.failed().join(", ")
        )));
    }
    Ok(())
}

fn certify(g: &Global, path: &Path) -> CliResult<()> {
    let l = load_lattice(g)?;
    require_2d(&l)?;
    let stored = read_certificate(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let lstar = l.dual();
    let sb = obtuse_superbasis(&lstar)?;
    let dec = identity_decomposition(&sb)?;
    let cert = stored.certificate();
    let report = verify_certificate(&cert, &dec, &lstar, g.enum_factor)?;

    let stored_sb = stored.stored_superbasis();
    let sb_dev = stored_sb
        .vectors
        .iter()
        .zip(&sb.vectors)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let sb_match = stored_sb.coords == sb.coords && sb_dev <= g.tolerance * sb.vectors[1].norm().max(1.0);
    let c2_match = (stored.c2 - stored.d.sqrt()).abs() <= g.tolerance;

    let mut failed = report.failed();
    if !sb_match {
        failed.push("superbasis".into());
    }
    if !c2_match {
        failed.push("c2".into());
    }
    let out = json!({
        "verified": failed.is_empty(),
        "checks": report.checks().iter().map(|(n, c)| (n.to_string(), json!(c))).collect::<serde_json::Map<_, _>>(),
        "superbasis_matches": sb_match,
        "c2_matches": c2_match,
        "enumerated": report.enumerated,
    });
    emit(g, &to_pretty_json(&out))?;
    if !failed.is_empty() {
        return Err(Failure::verification(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(())
}

fn contour(g: &Global) -> CliResult<()> {
    if g.resolution < MIN_RESOLUTION {
        return Err(Failure::input(format!(
            "--resolution {} is below the minimum {MIN_RESOLUTION}",
            g.resolution
        )));
    }
    let l = load_lattice(g)?;
    require_2d(&l)?;
    let e = least_distortion_2d_with(&l, &search_config(g)?, g.enum_factor)?;
    let grid = contour_grid(&e, g.resolution, Default::default())?;
    let mut buf = Vec::new();
    grid.write_csv(&mut buf).expect("writing to memory");
    let text = String::from_utf8(buf).expect("ascii output");
    match &g.out {
        Some(p) => write_file(p, &text),
        None => {
            say(&text);
            Ok(())
        }
    }
}

fn bounds(g: &Global) -> CliResult<()> {
    let l = load_lattice(g)?;
    let s = bounds_summary(&l)?;
    let mut out = serde_json::to_value(&s).expect("plain data");
    let mut gap = None;
    match l.dim() {
        1 => {
            out["note"] = json!("one-dimensional torus: least distortion is pi/2, pipeline skipped");
            out["c2"] = json!(std::f64::consts::FRAC_PI_2);
            gap = Some(std::f64::consts::FRAC_PI_2 - s.thm51);
        }
        2 => {
            let e = least_distortion_2d_with(&l, &search_config(g)?, g.enum_factor)?;
            out["c2"] = json!(e.c2);
            out["verified"] = json!(e.verified());
            gap = Some(e.c2 - s.thm51);
        }
        _ => match least_distortion(&l) {
            Ok(c2) => {
                out["c2"] = json!(c2);
                gap = Some(c2 - s.thm51);
            }
            Err(_) => out["note"] = json!("least distortion not computed for this lattice"),
        },
    }
    if let Some(gap) = gap {
        out["gap"] = json!(gap);
    }
    emit(g, &to_pretty_json(&out))?;
    if let Some(gap) = gap {
        if gap < -g.tolerance {
            return Err(Failure::verification(format!("lower bound exceeds c2 by {}", -gap)));
        }
    }
    Ok(())
}

fn reduce(g: &Global, path: &Path) -> CliResult<()> {
    let z = read_weights(&read(path)?).map_err(|e| match e {
        Error::Parse { .. } => Failure::input(format!("{}: {e}", path.display())),
        other => other.into(),
    })?;
    let (out, report) = reduce_support(&z)?;
    let text = write_weights(&out);
    match &g.out {
        Some(p) => {
            write_file(p, &text)?;
            say(&format!("{}\n", to_pretty_json(&report)));
        }
        None => {
            let weights: serde_json::Value = serde_json::from_str(&text).expect("own output");
            say(&format!("{}\n", to_pretty_json(&json!({ "weights": weights, "report": report }))));
        }
    }
    Ok(())
}

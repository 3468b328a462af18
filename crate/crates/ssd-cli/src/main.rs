use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ssd::combinat::enumerate_face_vectors;
use ssd::doc::{read_off, write_obj, write_off, PolytopeDocument};
use ssd::ltype::construct_ltype;
use ssd::reconstruct::{reconstruct_from_face, ReconstructOptions};
use ssd::search::{assemble_ssd23, grid_refine, kmw8, ssd23, SearchParams};
use ssd::verifier::{verify_ssd, DEFAULT_TOL};
use ssd::{Polytope, SsdError, Vec3};

#[derive(Parser)]
#[command(name = "ssd", version, about = "Strongly self-dual polyhedra inscribed in the unit sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a polytope from a construction.
    #[command(subcommand)]
    Construct(Construct),
    /// Check a polytope document for strong self-duality.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Grow the polytope having the given face.
    Reconstruct {
        /// Either a list of `x y z` lines or a polytope document.
        #[arg(long)]
        face: PathBuf,
        /// Face to take when FACE is a polytope document.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Merge radius for points that should coincide.
        #[arg(long)]
        assume_closure: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_vertices: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Parameter searches.
    #[command(subcommand)]
    Search(Search),
    /// The two polytopes found by search.
    Preset {
        name: PresetName,
        #[command(flatten)]
        out: Output,
    },
    /// Face vectors admissible for n vertices.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Write a polytope document as a mesh.
    Export {
        file: PathBuf,
        #[arg(long, value_enum)]
        format: MeshFormat,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// Layered polytope P(k,l) over a regular odd l-gon.
    Ltype {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Also write the polytope as an OFF mesh.
        #[arg(long)]
        off: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum Search {
    /// Refine (kappa, lambda, r) of the pentagon seed until the
    /// construction closes.
    Pentagon(PentagonArgs),
}

#[derive(Args)]
struct PentagonArgs {
    /// Degrees.
    #[arg(long, default_value_t = 45.0)]
    kappa: f64,
    /// Degrees.
    #[arg(long, default_value_t = 135.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.8)]
    r: f64,
    /// Initial half-width of the box, in radians for the angles and
    /// absolute for r.
    #[arg(long, default_value_t = 0.1)]
    delta0: f64,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    shrink: f64,
    #[arg(long, default_value_t = 1e-15)]
    tol: f64,
    #[arg(long, default_value_t = 40)]
    max_steps: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Output {
    /// Write the polytope document here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    Ssd23,
    Kmw8,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeshFormat {
    Off,
    Obj,
}

/// A failure with its exit code and one-line class.
struct Failure {
    code: u8,
    class: String,
    message: String,
}

impl From<SsdError> for Failure {
    fn from(e: SsdError) -> Self {
        let code = if e.is_numerical() {
            3
        } else {
            match e {
                SsdError::InvalidParams(_) | SsdError::InvalidN(_) => 2,
                _ => 1,
            }
        };
        Failure { code, class: e.class().to_string(), message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, class: "Io".into(), message: format!("{}: {e}", path.display()) }
}

type CliResult = std::result::Result<(), Failure>;

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| io_failure(path, e))
}

fn emit(text: &str, to: Option<&Path>) -> CliResult {
    match to {
        Some(p) => fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            // A closed pipe downstream is not an error of ours.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn emit_polytope(p: &Polytope, provenance: String, out: &Output) -> CliResult {
    emit(&PolytopeDocument::from_polytope(p, provenance).write(), out.output.as_deref())
}

/// A polytope from a document, or from an OFF mesh as a fallback.
fn load_polytope(path: &Path) -> std::result::Result<Polytope, Failure> {
    let text = read_text(path)?;
    if text.trim_start().starts_with("OFF") {
        return Ok(read_off(&text)?);
    }
    Ok(PolytopeDocument::read(&text)?.to_polytope()?)
}

fn load_face(path: &Path, index: usize) -> std::result::Result<Vec<Vec3>, Failure> {
    let text = read_text(path)?;
    if text.trim_start().starts_with("format_version") {
        let p = PolytopeDocument::read(&text)?.to_polytope()?;
        if index >= p.faces.len() {
            return Err(SsdError::InvalidParams(format!("face index {index} out of range")).into());
        }
        return Ok(p.face_points(index));
    }
    let mut pts = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let c: Vec<f64> = line
            .split(|ch: char| ch.is_whitespace() || ch == ',')
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| SsdError::InvalidParams(format!("face line {}: {e}", ln + 1)))?;
        if c.len() != 3 {
            return Err(SsdError::InvalidParams(format!("face line {}: need three coordinates", ln + 1)).into());
        }
        pts.push(Vec3::new(c[0], c[1], c[2]));
    }
    Ok(pts)
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Construct(Construct::Ltype { k, l, tol, off, out }) => {
            let p = construct_ltype(k, l, tol)?;
            if let Some(path) = off {
                fs::write(&path, write_off(&p)).map_err(|e| io_failure(&path, e))?;
            }
            emit_polytope(&p, format!("construct ltype --k {k} --l {l} --tol {tol:e}"), &out)
        }
        Command::Verify { file, tol } => {
            let p = load_polytope(&file)?;
            let report = verify_ssd(&p, tol)?;
            emit(&report.to_string(), None)?;
            if report.passed {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    class: "VerificationFailed".into(),
                    message: format!("worst deviation {:e} at tol {tol:e}", report.worst_deviation()),
                })
            }
        }
        Command::Reconstruct { face, index, assume_closure, tol, max_vertices, out } => {
            let pts = load_face(&face, index)?;
            let opts = ReconstructOptions { tol, assume_closure, max_vertices, ..Default::default() };
            let p = reconstruct_from_face(&pts, &opts)?;
            emit_polytope(&p, format!("reconstruct --face {}", face.display()), &out)
        }
        Command::Search(Search::Pentagon(a)) => {
            let params = SearchParams {
                kappa: a.kappa.to_radians(),
                lambda: a.lambda.to_radians(),
                r: a.r,
                delta0: a.delta0,
                n: a.n,
                shrink: a.shrink,
                tol: a.tol,
                max_steps: a.max_steps,
            };
            let outcome = match grid_refine(&params) {
                Ok(o) => o,
                Err(SsdError::NoConvergence(o)) => {
                    eprint!("{o}");
                    return Err(SsdError::NoConvergence(o).into());
                }
                Err(e) => return Err(e.into()),
            };
            eprint!("{outcome}");
            eprintln!("kappa_deg: {:.16}", outcome.kappa.to_degrees());
            eprintln!("lambda_deg: {:.16}", outcome.lambda.to_degrees());
            eprintln!("r: {:.17}", outcome.r);
            eprintln!("error: {:e}", outcome.error);
            eprintln!("steps: {}", outcome.steps);
            let p = assemble_ssd23(outcome.kappa, outcome.lambda, outcome.r, DEFAULT_TOL)?;
            let provenance = format!(
                "search pentagon: kappa {:.16} deg, lambda {:.16} deg, r {:.17}, {} steps",
                outcome.kappa.to_degrees(),
                outcome.lambda.to_degrees(),
                outcome.r,
                outcome.steps
            );
            emit_polytope(&p, provenance, &a.out)
        }
        Command::Preset { name, out } => {
            let (p, label) = match name {
                PresetName::Ssd23 => (ssd23(DEFAULT_TOL)?, "preset ssd23"),
                PresetName::Kmw8 => (kmw8(1e-8)?, "preset kmw8"),
            };
            emit_polytope(&p, label.to_string(), &out)
        }
        Command::Enumerate { n } => {
            emit(&enumerate_face_vectors(n)?.to_string(), None)
        }
        Command::Export { file, format, output } => {
            let p = load_polytope(&file)?;
            let text = match format {
                MeshFormat::Off => write_off(&p),
                MeshFormat::Obj => write_obj(&p),
            };
            emit(&text, output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = f.message.replace('\n', " ");
            if msg.starts_with(&f.class) {
                eprintln!("error: {msg}");
            } else {
                eprintln!("error: {}: {msg}", f.class);
            }
            ExitCode::from(f.code)
        }
    }
}

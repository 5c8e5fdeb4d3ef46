//! Command-line surface: loading, axiom checks, distance and probe
//! evaluation, product construction, function-space distance, proof-chain
//! replay, exponentiability decision, and seeded generation.
//!
//! Exit codes: 0 = check passed (or evaluation succeeded), 1 = check
//! failed with a printed witness, 2 = invalid input (parse error, shape
//! error, invalid space without --pseudo, uncertified function, bad flag).
//! JSON reports carry the tool version and a sha256 digest of every input
//! file, with stable field order.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use appcheck_core::approach::{check_rows, ApproachSpace, AxiomViolation, SpaceError};
use appcheck_core::cost::Cost;
use appcheck_core::expcheck::{
    check_exponentiable_exact, check_exponentiable_grid, classify_finite, dense_grid, CheckReport,
};
use appcheck_core::exponential::{d_principal, replay, ContractionFn, ReplayReport};
use appcheck_core::gen;
use appcheck_core::io::{to_json_string, FnFile, IoError, SpaceFile};
use appcheck_core::numrel::{PointSet, RelError};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "appcheck", version, about = "Finite approach space toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the convergence axioms of one or more space files.
    CheckAxioms {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Distance from a set of points to a point.
    Dist {
        file: PathBuf,
        /// Comma-separated point labels; an empty string is the empty set.
        #[arg(long, default_value = "")]
        set: String,
        #[arg(long)]
        at: String,
        /// Admit a merely reflexive structure.
        #[arg(long)]
        pseudo: bool,
        #[arg(long)]
        json: bool,
    },
    /// Componentwise-join product of two spaces, written to a file.
    Product {
        first: PathBuf,
        second: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        pseudo: bool,
        #[arg(long)]
        json: bool,
    },
    /// The two-variable probe function at a base point.
    Phi {
        file: PathBuf,
        #[arg(long)]
        z: String,
        #[arg(long)]
        u: Cost,
        #[arg(long)]
        v: Cost,
        #[arg(long)]
        pseudo: bool,
        #[arg(long)]
        json: bool,
    },
    /// Function-space distance from one function to another.
    ExpD {
        space: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        pseudo: bool,
        #[arg(long)]
        json: bool,
    },
    /// Replay the proof chain at one instance.
    Replay {
        space: PathBuf,
        #[arg(long)]
        z: String,
        #[arg(long)]
        x0: String,
        #[arg(long)]
        u: Cost,
        #[arg(long)]
        v: Cost,
        #[arg(long)]
        json: bool,
    },
    /// Decide the exponentiability criterion.
    CheckExponentiable {
        space: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Evaluation grid for --method grid; defaults to the dense grid
        /// derived from the space.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<Cost>>,
        #[arg(long)]
        json: bool,
    },
    /// Generate a seeded random valid space.
    Gen {
        #[arg(long)]
        points: usize,
        /// Comma-separated pool of entry values.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<Cost>>,
        #[arg(long, default_value_t = gen::DEFAULT_SEED)]
        seed: u64,
        /// Output path; omit to write the space to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Exact,
    Grid,
    Classify,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Grid => "grid",
            Method::Classify => "classify",
        }
    }
}

enum CliError {
    Io(IoError),
    Space { path: String, source: SpaceError },
    Rel { path: String, source: RelError },
    Certificate { path: String, detail: String },
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Space { path, source } => write!(f, "{path}: {source}"),
            CliError::Rel { path, source } => write!(f, "{path}: {source}"),
            CliError::Certificate { path, detail } => write!(f, "{path}: {detail}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> CliError {
        CliError::Io(e)
    }
}

#[derive(Serialize, Clone)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    tool_version: &'static str,
    command: &'static str,
    inputs: Vec<InputDigest>,
    #[serde(flatten)]
    payload: T,
}

fn print_json<T: Serialize>(command: &'static str, inputs: Vec<InputDigest>, payload: T) {
    let envelope = Envelope { tool_version: TOOL_VERSION, command, inputs, payload };
    print!("{}", to_json_string(&envelope));
}

fn read_with_digest(path: &Path) -> Result<(String, InputDigest), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let sha256 = format!("{:x}", Sha256::digest(text.as_bytes()));
    Ok((text, InputDigest { path: path.display().to_string(), sha256 }))
}

fn parse_json<T: for<'de> serde::Deserialize<'de>>(path: &Path, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text)
        .map_err(|source| IoError::Parse { path: path.display().to_string(), source }.into())
}

fn load_space(path: &Path, pseudo: bool) -> Result<(ApproachSpace, InputDigest), CliError> {
    let (text, digest) = read_with_digest(path)?;
    let file: SpaceFile = parse_json(path, &text)?;
    let space = file
        .to_space(pseudo)
        .map_err(|source| CliError::Space { path: path.display().to_string(), source })?;
    Ok((space, digest))
}

fn load_fn(path: &Path, space: &ApproachSpace) -> Result<(ContractionFn, InputDigest), CliError> {
    let (text, digest) = read_with_digest(path)?;
    let file: FnFile = parse_json(path, &text)?;
    let values = file.resolve(space.points(), &path.display().to_string())?;
    let f = ContractionFn::certify(space, values).map_err(|v| CliError::Certificate {
        path: path.display().to_string(),
        detail: v.to_string(),
    })?;
    Ok((f, digest))
}

fn resolve_point(space: &ApproachSpace, label: &str, flag: &str) -> Result<usize, CliError> {
    space
        .points()
        .index_of(label)
        .ok_or_else(|| CliError::Usage(format!("--{flag}: unknown point `{label}`")))
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, CliError> {
    match cmd {
        Cmd::CheckAxioms { files, json } => check_axioms_cmd(&files, json),
        Cmd::Dist { file, set, at, pseudo, json } => dist_cmd(&file, &set, &at, pseudo, json),
        Cmd::Product { first, second, output, pseudo, json } => {
            product_cmd(&first, &second, &output, pseudo, json)
        }
        Cmd::Phi { file, z, u, v, pseudo, json } => phi_cmd(&file, &z, u, v, pseudo, json),
        Cmd::ExpD { space, psi, phi, pseudo, json } => expd_cmd(&space, &psi, &phi, pseudo, json),
        Cmd::Replay { space, z, x0, u, v, json } => replay_cmd(&space, &z, &x0, u, v, json),
        Cmd::CheckExponentiable { space, method, grid, json } => {
            check_exponentiable_cmd(&space, method, grid, json)
        }
        Cmd::Gen { points, values, seed, output } => gen_cmd(points, values, seed, output.as_deref()),
    }
}

#[derive(Serialize)]
struct AxiomFileReport {
    path: String,
    valid: bool,
    violation: Option<AxiomViolation>,
}

fn check_axioms_cmd(files: &[PathBuf], json: bool) -> Result<u8, CliError> {
    let mut inputs = Vec::new();
    let mut reports = Vec::new();
    for path in files {
        let (text, digest) = read_with_digest(path)?;
        let file: SpaceFile = parse_json(path, &text)?;
        let points = PointSet::new(file.points.clone())
            .map_err(|source| CliError::Rel { path: digest.path.clone(), source })?;
        let report = check_rows(&points, file.conv)
            .map_err(|source| CliError::Space { path: digest.path.clone(), source })?;
        reports.push(AxiomFileReport {
            path: digest.path.clone(),
            valid: report.pass(),
            violation: report.violation,
        });
        inputs.push(digest);
    }
    let all_valid = reports.iter().all(|r| r.valid);
    if json {
        #[derive(Serialize)]
        struct Payload {
            reports: Vec<AxiomFileReport>,
        }
        print_json("check-axioms", inputs, Payload { reports });
    } else {
        for r in &reports {
            match &r.violation {
                None => println!("{}: valid approach space", r.path),
                Some(v) => println!("{}: INVALID: {v}", r.path),
            }
        }
    }
    Ok(if all_valid { 0 } else { 1 })
}

fn dist_cmd(file: &Path, set: &str, at: &str, pseudo: bool, json: bool) -> Result<u8, CliError> {
    let (space, digest) = load_space(file, pseudo)?;
    let labels: Vec<&str> = set.split(',').filter(|s| !s.is_empty()).collect();
    let mut mask = 0u64;
    for label in &labels {
        mask |= 1 << resolve_point(&space, label, "set")?;
    }
    let x = resolve_point(&space, at, "at")?;
    let value = space.dist(mask, x);
    if json {
        #[derive(Serialize)]
        struct Payload {
            set: Vec<String>,
            at: String,
            value: Cost,
        }
        print_json(
            "dist",
            vec![digest],
            Payload {
                set: labels.iter().map(|s| s.to_string()).collect(),
                at: at.to_string(),
                value,
            },
        );
    } else {
        println!("delta({{{}}}, {at}) = {value}", labels.join(", "));
    }
    Ok(0)
}

fn product_cmd(
    first: &Path,
    second: &Path,
    output: &Path,
    pseudo: bool,
    json: bool,
) -> Result<u8, CliError> {
    let (s, d1) = load_space(first, pseudo)?;
    let (t, d2) = load_space(second, pseudo)?;
    let p = s.product(&t);
    appcheck_core::io::save_json(output, &SpaceFile::from_space(&p))?;
    if json {
        #[derive(Serialize)]
        struct Payload {
            output: String,
            points: usize,
            valid: bool,
        }
        print_json(
            "product",
            vec![d1, d2],
            Payload {
                output: output.display().to_string(),
                points: p.len(),
                valid: p.is_approach(),
            },
        );
    } else {
        println!("wrote {}: {} points", output.display(), p.len());
    }
    Ok(0)
}

fn phi_cmd(file: &Path, z: &str, u: Cost, v: Cost, pseudo: bool, json: bool) -> Result<u8, CliError> {
    let (space, digest) = load_space(file, pseudo)?;
    let zi = resolve_point(&space, z, "z")?;
    let values = space.phi(zi, u, v);
    if json {
        #[derive(Serialize)]
        struct Payload {
            z: String,
            u: Cost,
            v: Cost,
            values: FnFile,
        }
        print_json(
            "phi",
            vec![digest],
            Payload {
                z: z.to_string(),
                u,
                v,
                values: FnFile::from_values(space.points(), &values),
            },
        );
    } else {
        println!("phi at z={z}, u={u}, v={v}:");
        for (i, value) in values.iter().enumerate() {
            println!("  {:<8} {}", space.points().label(i), value);
        }
    }
    Ok(0)
}

fn expd_cmd(space: &Path, psi: &Path, phi: &Path, pseudo: bool, json: bool) -> Result<u8, CliError> {
    let (s, d0) = load_space(space, pseudo)?;
    let (psi_fn, d1) = load_fn(psi, &s)?;
    let (phi_fn, d2) = load_fn(phi, &s)?;
    let value = d_principal(&psi_fn, &phi_fn);
    if json {
        #[derive(Serialize)]
        struct Payload {
            value: Cost,
        }
        print_json("exp-d", vec![d0, d1, d2], Payload { value });
    } else {
        println!("d(psi, phi) = {value}");
    }
    Ok(0)
}

fn replay_cmd(space: &Path, z: &str, x0: &str, u: Cost, v: Cost, json: bool) -> Result<u8, CliError> {
    let (s, digest) = load_space(space, false)?;
    let zi = resolve_point(&s, z, "z")?;
    let xi = resolve_point(&s, x0, "x0")?;
    let report = replay(&s, zi, xi, u, v);
    let ok = report.first_failure().is_none();
    if json {
        #[derive(Serialize)]
        struct Payload {
            report: ReplayReport,
        }
        print_json("replay", vec![digest], Payload { report });
    } else {
        print_replay(&report);
    }
    Ok(if ok { 0 } else { 1 })
}

fn print_replay(report: &ReplayReport) {
    println!(
        "replay at z={}, x0={}, u={}, v={}",
        report.z, report.x0, report.u, report.v
    );
    let phi: Vec<String> = report.phi.iter().map(|c| c.to_string()).collect();
    println!("probe function: [{}]", phi.join(", "));
    println!("{:<16} {:<12} {:<4} {:<12} holds", "step", "lhs", "rel", "rhs");
    for step in &report.steps {
        let rel = match step.relation {
            appcheck_core::exponential::StepRelation::Equal => "=",
            appcheck_core::exponential::StepRelation::AtLeast => ">=",
        };
        println!(
            "{:<16} {:<12} {:<4} {:<12} {}",
            step.name,
            step.lhs.to_string(),
            rel,
            step.rhs.to_string(),
            if step.holds { "yes" } else { "NO" }
        );
    }
    match report.first_failure() {
        None => println!("verdict: full chain holds"),
        Some(step) => println!("verdict: first failing step is {}", step.name),
    }
}

fn check_exponentiable_cmd(
    space: &Path,
    method: Method,
    grid: Option<Vec<Cost>>,
    json: bool,
) -> Result<u8, CliError> {
    if grid.is_some() && method != Method::Grid {
        return Err(CliError::Usage("--grid is only valid with --method grid".into()));
    }
    let (s, digest) = load_space(space, false)?;
    let report = match method {
        Method::Exact => check_exponentiable_exact(&s),
        Method::Grid => {
            let grid = grid.unwrap_or_else(|| dense_grid(&s));
            check_exponentiable_grid(&s, &grid)
        }
        Method::Classify => classify_finite(&s),
    };
    let code = if report.exponentiable { 0 } else { 1 };
    if json {
        #[derive(Serialize)]
        struct Payload {
            method: &'static str,
            report: CheckReport,
        }
        print_json(
            "check-exponentiable",
            vec![digest],
            Payload { method: method.name(), report },
        );
    } else {
        match &report.witness {
            None => println!(
                "exponentiable (pairs examined: {}, candidates: {})",
                report.stats.pairs_examined, report.stats.candidates_examined
            ),
            Some(w) => println!("not exponentiable: {w}"),
        }
    }
    Ok(code)
}

fn gen_cmd(
    points: usize,
    values: Option<Vec<Cost>>,
    seed: u64,
    output: Option<&Path>,
) -> Result<u8, CliError> {
    if points == 0 {
        return Err(CliError::Usage("--points must be at least 1".into()));
    }
    let pool = values.unwrap_or_else(gen::standard_pool);
    if pool.is_empty() {
        return Err(CliError::Usage("--values must name at least one cost".into()));
    }
    let mut rng = gen::rng_from_seed(seed);
    let space = gen::random_space(&mut rng, points, &pool);
    let file = SpaceFile::from_space(&space);
    match output {
        Some(path) => {
            appcheck_core::io::save_json(path, &file)?;
            println!("wrote {}: {} points (seed {seed})", path.display(), points);
        }
        None => print!("{}", to_json_string(&file)),
    }
    Ok(0)
}

//! Command line front-end. Certificates are printed as one JSON object per
//! line, iteration tables as CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::batch::Mode;
use crate::error::{Error, Result};
use crate::extraction::{self, FunctionalFamily};
use crate::hyperplane::{Classification, WfSpace};
use crate::quotientproj::{self, oracle, ProjectionData, VanishingSubspace};
use crate::rational::{self, Rational};
use crate::sample;
use crate::seq::{CSeq, L1Seq, Progression, Subsequence};
use crate::witness::{self, Basis, MapKind, SimplexPoint};
use crate::{citations, fixtures};

#[derive(Debug, Parser)]
#[command(name = "fpp-lab", version, about = "Exact computations with hyperplanes of c and the weak-star FPP of l1")]
pub struct Cli {
    /// Seed for sampled checks; defaults to FPP_LAB_SEED, then a fixed value.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run batch checks on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide the classification predicates of W_f.
    Classify(HyperplaneArg),
    /// Evaluate f(x), membership and the limit identity for x.
    Pair {
        #[command(flatten)]
        hyperplane: HyperplaneArg,
        x: PathBuf,
    },
    /// Fixed-point-free maps on a weak-star compact convex set.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Extract a basic subsequence from a family of functionals.
    #[command(subcommand)]
    Extract(ExtractCmd),
    /// Quotients of W_f isometric to c.
    #[command(subcommand)]
    Quotient(QuotientCmd),
    /// Apply a projection to x and check it exactly.
    Project { data: PathBuf, x: PathBuf },
    /// Emit the built-in fixtures.
    Fixtures {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(name = "witness-build", hide = true)]
    WitnessBuild(BuildArgs),
    #[command(name = "witness-iterate", hide = true)]
    WitnessIterate(IterateArgs),
    #[command(name = "extract-run", hide = true)]
    ExtractRun(ExtractArgs),
    #[command(name = "quotient-norm", hide = true)]
    QuotientNorm(NormArgs),
    #[command(name = "quotient-example31", hide = true)]
    QuotientExample31 { x: PathBuf },
}

#[derive(Debug, Args)]
struct HyperplaneArg {
    /// JSON file with f as an l1 sequence.
    f: PathBuf,
    /// Divide f by its norm first.
    #[arg(long)]
    normalize: bool,
}

#[derive(Debug, Subcommand)]
enum WitnessCmd {
    /// Build the generator dictionary of a bad W_f.
    Build(BuildArgs),
    /// Iterate a fixed-point-free map and print displacements as CSV.
    Iterate(IterateArgs),
}

#[derive(Debug, Args)]
struct BuildArgs {
    #[command(flatten)]
    hyperplane: HyperplaneArg,
    /// Subsequence of N+, e.g. "1,3,5:2".
    #[arg(long)]
    subseq: Option<String>,
    #[arg(long, default_value_t = 64)]
    samples: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MapArg {
    Shift,
    Contraction,
}

#[derive(Debug, Args)]
struct IterateArgs {
    map: MapArg,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Hyperplane driving the dictionary; defaults to f = (1/2, 1/2, 0, …).
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    subseq: Option<String>,
    /// Start from a seeded random point of this width instead of vertex 1.
    #[arg(long)]
    random_width: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum ExtractCmd {
    /// Run the extraction pipeline on a family of functionals.
    Run(ExtractArgs),
}

#[derive(Debug, Args)]
struct ExtractArgs {
    family: PathBuf,
    /// Target masses "s+,s-", e.g. "3/4,-1/4".
    #[arg(long)]
    targets: Option<String>,
    #[arg(long, default_value_t = extraction::DEFAULT_DEPTH)]
    depth: usize,
}

#[derive(Debug, Subcommand)]
enum QuotientCmd {
    /// Quotient norm of v modulo the subspace vanishing on S.
    Norm(NormArgs),
    /// The isometry of c onto the quotient of the example31 hyperplane.
    Example31 { x: PathBuf },
}

#[derive(Debug, Args)]
struct NormArgs {
    f: PathBuf,
    /// Vanishing set "start:step".
    s: String,
    v: PathBuf,
    /// Single oracle truncation depth; all of 16/32/64 by default.
    #[arg(long)]
    truncation: Option<usize>,
    /// Also report some y ∈ Y with ‖v − y‖ within this margin of the norm.
    #[arg(long)]
    margin: Option<String>,
}

/// What a command printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Output { code, stdout: text, stderr: String::new() }
            } else {
                Output { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Output { code: 0, stdout, stderr: String::new() },
        Err(e) => Output { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let seed = cli.seed.unwrap_or_else(sample::default_seed);
    let mode = if cli.sequential { Mode::Sequential } else { Mode::Parallel };
    match &cli.command {
        Command::Classify(h) => classify(h),
        Command::Pair { hyperplane, x } => pair(hyperplane, x),
        Command::Witness(WitnessCmd::Build(a)) | Command::WitnessBuild(a) => witness_build(a, seed),
        Command::Witness(WitnessCmd::Iterate(a)) | Command::WitnessIterate(a) => witness_iterate(a, seed),
        Command::Extract(ExtractCmd::Run(a)) | Command::ExtractRun(a) => extract(a, seed, mode),
        Command::Quotient(QuotientCmd::Norm(a)) | Command::QuotientNorm(a) => quotient_norm(a),
        Command::Quotient(QuotientCmd::Example31 { x }) | Command::QuotientExample31 { x } => example31(x),
        Command::Project { data, x } => project(data, x),
        Command::Fixtures { out } => emit_fixtures(out.as_deref()),
    }
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn hyperplane(h: &HyperplaneArg) -> Result<WfSpace> {
    let f: L1Seq = read(&h.f)?;
    if h.normalize {
        WfSpace::normalized(f)
    } else {
        WfSpace::new(f)
    }
}

fn line(v: Value) -> Result<String> {
    Ok(serde_json::to_string(&v)? + "\n")
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

/// `{tag: statement}` for the given tags.
fn cite(tags: &[&str]) -> Value {
    let map: serde_json::Map<String, Value> = tags
        .iter()
        .map(|t| (t.to_string(), Value::from(citations::describe(t).unwrap_or_default())))
        .collect();
    Value::Object(map)
}

fn classify(h: &HyperplaneArg) -> Result<String> {
    let w = hyperplane(h)?;
    let c = w.classify();
    let witnesses = Classification::witnesses();
    let tags: Vec<&str> = witnesses.values().copied().collect();
    line(json!({
        "command": "classify",
        "f": to_value(w.f())?,
        "classification": to_value(&c)?,
        "witnesses": to_value(&witnesses)?,
        "citations": cite(&tags),
    }))
}

fn pair(h: &HyperplaneArg, x: &Path) -> Result<String> {
    let w = hyperplane(h)?;
    let x: CSeq = read(x)?;
    let value = w.f().pair_c(&x);
    let member = value == Rational::from_integer(0.into());
    let mut out = json!({
        "command": "pair",
        "value": rational::format(&value),
        "member": member,
        "limit": rational::format(x.limit()),
    });
    if member && w.check_dual_hypotheses().is_ok() {
        let e = w.wstar_limit()?;
        let ex = w.dual_action(&e, &x)?;
        out["e_star"] = to_value(&e)?;
        out["e_star_x"] = Value::from(rational::format(&ex));
        out["limit_identity"] = Value::from(&ex == x.limit());
        out["citations"] = cite(&["fact:limit-functional"]);
    }
    line(out)
}

fn subseq(s: &Option<String>) -> Result<Option<Subsequence>> {
    s.as_deref().map(Subsequence::parse).transpose()
}

fn witness_build(a: &BuildArgs, seed: u64) -> Result<String> {
    let w = hyperplane(&a.hyperplane)?;
    let d = witness::build_witness(&w, subseq(&a.subseq)?, seed)?;
    let cert = d.certify(seed, a.samples)?;
    let basis = match &d.basis {
        Basis::Units(s) => json!({ "units": to_value(s)? }),
        Basis::Explicit(v) => json!({ "explicit": to_value(v)? }),
    };
    line(json!({
        "command": "witness-build",
        "seed": seed,
        "w_tilde": to_value(&d.w_tilde)?,
        "basis": basis,
        "provenance": to_value(&d.provenance)?,
        "certificate": to_value(&cert)?,
        "citations": cite(&["def:bad-hyperplane", "thm:bad-subspace"]),
    }))
}

fn witness_iterate(a: &IterateArgs, seed: u64) -> Result<String> {
    let w = match &a.f {
        Some(p) => WfSpace::new(read(p)?)?,
        None => fixtures::c_like(),
    };
    let d = witness::build_witness(&w, subseq(&a.subseq)?, seed)?;
    let map = match a.map {
        MapArg::Shift => MapKind::Shift,
        MapArg::Contraction => MapKind::Contraction,
    };
    let mut cur = match a.random_width {
        Some(width) => sample::simplex_point(&mut sample::rng(seed), width, false),
        None => SimplexPoint::vertex(1),
    };
    let mut out = String::from("step,displacement,via\n");
    for step in 1..=a.steps {
        let next = map.apply(&cur)?;
        let (dist, via) = d.distance(&cur, &next)?;
        let via = serde_json::to_value(via)?;
        writeln!(out, "{step},{},{}", rational::format(&dist), via.as_str().unwrap_or_default()).unwrap();
        cur = next;
    }
    Ok(out)
}

fn parse_targets(s: &str) -> Result<(Rational, Rational)> {
    let (p, m) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("targets must be \"s+,s-\", got {s:?}")))?;
    Ok((rational::parse(p.trim())?, rational::parse(m.trim())?))
}

fn extract(a: &ExtractArgs, seed: u64, mode: Mode) -> Result<String> {
    let fam: FunctionalFamily = read(&a.family)?;
    let targets = a.targets.as_deref().map(parse_targets).transpose()?;
    let cert = extraction::run_pipeline(&fam, targets, a.depth, mode, seed)?;
    line(json!({
        "command": "extract-run",
        "certificate": to_value(&cert)?,
        "citations": cite(&["thm:basis-limit", "def:bad-hyperplane"]),
    }))
}

fn quotient_norm(a: &NormArgs) -> Result<String> {
    let f: L1Seq = read(&a.f)?;
    let y = VanishingSubspace::new(WfSpace::new(f)?, Progression::parse(&a.s)?);
    let v: CSeq = read(&a.v)?;
    let depths: Vec<usize> = match a.truncation {
        Some(d) => vec![d],
        None => oracle::DEPTHS.to_vec(),
    };
    let cmp = oracle::compare(&y, &v, &depths)?;
    if !cmp.agree {
        return Err(Error::Check("closed form and oracle disagree".into()));
    }
    let q = quotientproj::quotient_norm(&y, &v)?;
    let mut out = json!({
        "command": "quotient-norm",
        "quotient": to_value(&q)?,
        "oracle": to_value(&cmp.oracle)?,
        "citations": cite(&["thm:c-quotient"]),
    });
    if let Some(m) = &a.margin {
        let margin = rational::parse(m)?;
        let w = quotientproj::quotient_witness(&y, &v, &margin)?;
        out["witness"] = to_value(&w)?;
        out["witness_distance"] = Value::from(rational::format(&v.sub(&w).sup_norm()));
    }
    line(out)
}

fn example31(x: &Path) -> Result<String> {
    let x: CSeq = read(x)?;
    let img = quotientproj::example31_isometry(&x)?;
    line(json!({
        "command": "quotient-example31",
        "image": to_value(&img)?,
        "contains_c": to_value(&fixtures::example31().classify().contains_c)?,
        "citations": cite(&["thm:c-quotient", "prop:c-subspace"]),
    }))
}

fn project(data: &Path, x: &Path) -> Result<String> {
    let p: ProjectionData = read(data)?;
    let x: CSeq = read(x)?;
    let px = quotientproj::projection(&p, &x)?;
    let report = quotientproj::projection_checks(&p, std::slice::from_ref(&x));
    if !report.passed() {
        return Err(Error::Check(report.failures.join("; ")));
    }
    line(json!({
        "command": "project",
        "px": to_value(&px)?,
        "checks": to_value(&report)?,
        "citations": cite(&["prop:one-complemented"]),
    }))
}

fn emit_fixtures(out: Option<&Path>) -> Result<String> {
    let mut s = String::new();
    for (name, body) in fixtures::files() {
        if let Some(dir) = out {
            std::fs::create_dir_all(dir).map_err(|e| Error::Parse(format!("{}: {e}", dir.display())))?;
            let path = dir.join(&name);
            std::fs::write(&path, &body).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        }
        let content: Value = serde_json::from_str(&body)?;
        s += &line(json!({ "file": name, "bytes": body.len(), "content": content }))?;
    }
    Ok(s)
}

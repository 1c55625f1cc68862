//! Command-line front end. Every command prints one JSON document (keys
//! sorted) or, with `--text`, one `key: value` line per top-level field.
//!
//! Exit status: 0 when the checked property holds, 1 when it fails, 2 on
//! usage errors and unreadable or malformed input.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{evaluate_bound, BoundQuery, TheoremId};
use crate::embedding::{build_embedding, report, sha256_hex, trace_faces, CombinatorialEmbedding};
use crate::error::Error;
use crate::heffter::{
    is_globally_simple, search_heffter, validate_heffter, SearchParams, SkeletonConstraint,
};
use crate::iso::{classify, find_isomorphism};
use crate::knight::{self, FamilyOptions, OrientationPair, Torus};
use crate::pfarray::PartiallyFilledArray;

#[derive(Parser, Debug)]
#[command(name = "heffter", version, about = "Heffter arrays, crazy knight's tours and their biembeddings")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Print `key: value` lines instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pub text: bool,
    /// Print JSON (the default).
    #[arg(long, global = true)]
    pub json: bool,
    /// Write a run manifest (command, arguments, input hashes) to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Orientation {
    /// Row orientations, comma separated; defaults to all +1.
    #[arg(long = "R", allow_hyphen_values = true, value_name = "LIST")]
    pub r: Option<String>,
    /// Column orientations, comma separated; defaults to all +1.
    #[arg(long = "C", allow_hyphen_values = true, value_name = "LIST")]
    pub c: Option<String>,
    /// Solution file with `R` and `C` (overrides --R/--C).
    #[arg(long, value_name = "FILE")]
    pub solution: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "3diag")]
    ThreeDiag,
    Power2,
    K7,
    Prime,
    Pairs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SkeletonArg {
    Auto,
    Full,
    Cyclic,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a relative Heffter array.
    Verify { array: PathBuf },
    /// Follow the crazy knight's tour from a cell.
    Tour {
        array: PathBuf,
        #[command(flatten)]
        orientation: Orientation,
        /// Start cell as `row,col` (1-based).
        #[arg(long, default_value = "1,1")]
        start: String,
    },
    /// Enumerate every solution of the tour problem.
    TourEnum {
        array: PathBuf,
        /// Keep R = (1, ..., 1) and vary C only.
        #[arg(long)]
        trivial_r: bool,
        /// Maximum number of orientation vectors to try.
        #[arg(long, default_value_t = 1 << 22)]
        budget: u128,
    },
    /// Generate a family of trivial-R solutions on a diagonal skeleton.
    TourFamily {
        #[arg(value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        s1: Option<usize>,
        /// Override |E|.
        #[arg(long)]
        r: Option<usize>,
        /// Generate despite failed admissibility checks.
        #[arg(long)]
        force: bool,
        /// Print at most this many pairs.
        #[arg(long, default_value_t = 100)]
        limit: usize,
        /// Run the direct tour on every printed pair.
        #[arg(long)]
        check: bool,
    },
    /// Build the biembedding induced by an orientation pair and check it.
    Embed {
        #[arg(long)]
        array: PathBuf,
        #[command(flatten)]
        orientation: Orientation,
        /// Write the embedding as JSON to this path.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Dump every face of the biembedding.
    Faces {
        #[arg(long)]
        array: PathBuf,
        #[command(flatten)]
        orientation: Orientation,
        /// Refuse to dump more faces than this.
        #[arg(long, default_value_t = 100_000)]
        max_faces: usize,
    },
    /// Look for an isomorphism between two embeddings.
    Iso { first: PathBuf, second: PathBuf },
    /// Partition the embeddings (`*.json`) of a directory into isomorphism classes.
    Classify { dir: PathBuf },
    /// Exhaustive search for Heffter arrays.
    Search {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        t: u32,
        #[arg(long, default_value_t = 1)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = SkeletonArg::Auto)]
        skeleton: SkeletonArg,
        /// Write each array found to `<dir>/array_<i>.arr`.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Evaluate a counting lower bound.
    Bounds {
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        /// Subgroup order.
        #[arg(long)]
        t: Option<u64>,
        #[arg(long)]
        s1: Option<u64>,
        #[arg(long)]
        force: bool,
    },
    /// Array to solutions to embeddings to isomorphism classes.
    Pipeline {
        array: PathBuf,
        #[arg(long)]
        trivial_r: bool,
        #[arg(long, default_value_t = 1 << 22)]
        budget: u128,
        /// Write the embeddings to this directory.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

/// Failure modes of a command, mapped to exit codes 1 and 2.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Parameters(_) | Error::OrientationLength { .. } | Error::SubgroupOrder { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Math(other),
        }
    }
}

struct Outcome {
    body: Value,
    pass: bool,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl Outcome {
    fn new(body: impl Serialize, pass: bool) -> Self {
        Outcome { body: to_value(body), pass, inputs: Vec::new(), outputs: Vec::new() }
    }

    fn inputs(mut self, paths: &[&Path]) -> Self {
        self.inputs.extend(paths.iter().map(|p| p.to_path_buf()));
        self
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_array(path: &Path) -> Result<PartiallyFilledArray, Failure> {
    PartiallyFilledArray::parse(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read_embedding(path: &Path) -> Result<CombinatorialEmbedding, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parse_signs(s: &str, what: &str) -> Result<Vec<i8>, Failure> {
    s.split(',')
        .map(|f| match f.trim() {
            "1" | "+1" => Ok(1),
            "-1" => Ok(-1),
            other => Err(Failure::Usage(format!("{what}: `{other}` is not +1 or -1"))),
        })
        .collect()
}

fn orientation(o: &Orientation, a: &PartiallyFilledArray) -> Result<(OrientationPair, Vec<PathBuf>), Failure> {
    if let Some(path) = &o.solution {
        let pair: OrientationPair =
            serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        return Ok((pair, vec![path.clone()]));
    }
    let r = match &o.r {
        Some(s) => parse_signs(s, "--R")?,
        None => vec![1; a.rows()],
    };
    let c = match &o.c {
        Some(s) => parse_signs(s, "--C")?,
        None => vec![1; a.cols()],
    };
    Ok((OrientationPair::new(r, c)?, Vec::new()))
}

fn parse_cell(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::Usage(format!("cell `{s}` is not `row,col`"));
    let (r, c) = s.split_once(',').ok_or_else(bad)?;
    Ok((r.trim().parse().map_err(|_| bad())?, c.trim().parse().map_err(|_| bad())?))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn execute(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Verify { array } => {
            let a = read_array(array)?;
            let rep = validate_heffter(&a)?;
            let profile = a.skeleton().classify_diagonality().ok();
            let gs = rep.pass && is_globally_simple(&a);
            let pass = rep.pass;
            Ok(Outcome::new(json!({ "pass": pass, "globally_simple": gs, "report": rep, "diagonal_profile": profile }), pass)
                .inputs(&[array]))
        }
        Command::Tour { array, orientation: o, start } => {
            let a = read_array(array)?;
            let (pair, extra) = orientation(o, &a)?;
            let torus = Torus::new(&a.skeleton())?;
            let t = torus.tour(&pair, parse_cell(start)?)?;
            let pass = t.covers_all;
            let mut out = Outcome::new(json!({ "pair": pair, "tour": t, "filled": torus.filled() }), pass).inputs(&[array]);
            out.inputs.extend(extra);
            Ok(out)
        }
        Command::TourEnum { array, trivial_r, budget } => {
            let a = read_array(array)?;
            let sols = knight::enumerate_solutions(&a.skeleton(), *trivial_r, *budget)?;
            Ok(Outcome::new(json!({ "count": sols.len(), "solutions": sols, "trivial_r": trivial_r }), true).inputs(&[array]))
        }
        Command::TourFamily { family, n, k, i, s1, r, force, limit, check } => {
            let opts = FamilyOptions { r: *r, force: *force };
            let spec = match family {
                FamilyArg::ThreeDiag => knight::gen_family_3diag(*n)?,
                FamilyArg::Power2 => knight::gen_family_power2(*n, *k, &opts)?,
                FamilyArg::K7 => knight::gen_family_k7(*n, &opts)?,
                FamilyArg::Prime => knight::gen_family_prime(*n, *k, &opts)?,
                FamilyArg::Pairs => {
                    let (i, s1) = i.zip(*s1).ok_or_else(|| Failure::Usage("pairs needs --i and --s1".into()))?;
                    knight::gen_family_pairs(*n, *k, i, s1, &opts)?
                }
            };
            let pairs: Vec<OrientationPair> = spec.pairs().take(*limit).collect();
            let mut pass = true;
            let mut checked = Value::Null;
            if *check {
                let torus = Torus::new(&spec.skeleton())?;
                let results = pairs.iter().map(|p| torus.is_solution(p)).collect::<Result<Vec<_>, _>>()?;
                pass = results.iter().all(|&b| b);
                checked = json!(results.iter().filter(|&&b| b).count());
            }
            let multiplier = if spec.cyclic() { 4 } else { 2 };
            let body = json!({
                "family": spec,
                "base_count": spec.base_count().to_string(),
                "pair_count_at_most": (spec.base_count() * multiplier).to_string(),
                "pairs": pairs,
                "verified": checked,
            });
            if spec.admissible() {
                Ok(Outcome::new(body, pass))
            } else {
                let mut body = body;
                body["warning"] = json!("admissibility checks failed; generated because of --force");
                Ok(Outcome::new(body, pass))
            }
        }
        Command::Embed { array, orientation: o, out } => {
            let a = read_array(array)?;
            let (pair, extra) = orientation(o, &a)?;
            let e = build_embedding(&a, &pair)?;
            let rep = report(&a, &e)?;
            let mut outcome = Outcome::new(json!({ "report": rep, "rho0_sha256": e.rho0_hash() }), rep.pass).inputs(&[array]);
            outcome.inputs.extend(extra);
            if let Some(path) = out {
                write_file(path, &pretty(&to_value(&e)))?;
                outcome.outputs.push(path.clone());
            }
            Ok(outcome)
        }
        Command::Faces { array, orientation: o, max_faces } => {
            let a = read_array(array)?;
            let (pair, extra) = orientation(o, &a)?;
            let e = build_embedding(&a, &pair)?;
            let expected = e.modulus() as usize * (a.rows() + a.cols());
            if expected > *max_faces {
                return Err(Failure::Usage(format!("{expected} faces; raise --max-faces")));
            }
            let faces = trace_faces(&e);
            let mut outcome = Outcome::new(json!({ "count": faces.len(), "faces": faces }), true).inputs(&[array]);
            outcome.inputs.extend(extra);
            Ok(outcome)
        }
        Command::Iso { first, second } => {
            let (p1, p2) = (read_embedding(first)?, read_embedding(second)?);
            let m = find_isomorphism(&p1, &p2)?;
            let pass = m.is_some();
            Ok(Outcome::new(json!({ "isomorphic": pass, "map": m }), pass).inputs(&[first, second]))
        }
        Command::Classify { dir } => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)
                .map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            let family = paths.iter().map(|p| read_embedding(p)).collect::<Result<Vec<_>, _>>()?;
            let res = classify(&family)?;
            let reps: Vec<String> = res.classes.iter().map(|c| res.family[c.representative].rho0_hash()).collect();
            let mut out = Outcome::new(
                json!({
                    "input_size": res.input_size,
                    "distinct": res.distinct,
                    "class_sizes": res.class_sizes(),
                    "representatives": reps,
                    "classes": res.classes,
                }),
                true,
            );
            out.inputs = paths;
            Ok(out)
        }
        Command::Search { m, n, h, k, t, limit, skeleton, out } => {
            let sk = match skeleton {
                SkeletonArg::Auto => SkeletonConstraint::Auto,
                SkeletonArg::Full => SkeletonConstraint::Full,
                SkeletonArg::Cyclic => SkeletonConstraint::CyclicDiagonal,
            };
            let found = search_heffter(&SearchParams::new(*m, *n, *h, *k, *t).limit(*limit).skeleton(sk))?;
            let texts: Vec<String> = found.iter().map(|a| a.to_text()).collect();
            let mut outcome = Outcome::new(json!({ "count": found.len(), "arrays": texts }), !found.is_empty());
            if let Some(dir) = out {
                for (i, text) in texts.iter().enumerate() {
                    let path = dir.join(format!("array_{i}.arr"));
                    write_file(&path, text)?;
                    outcome.outputs.push(path);
                }
            }
            Ok(outcome)
        }
        Command::Bounds { theorem, n, k, t, s1, force } => {
            let id: TheoremId = theorem.parse()?;
            let q = BoundQuery { theorem: id, n: *n, k: *k, subgroup_t: *t, s1: *s1, force: *force };
            let r = evaluate_bound(&q)?;
            let pass = r.hypotheses_hold;
            Ok(Outcome::new(r, pass))
        }
        Command::Pipeline { array, trivial_r, budget, out } => {
            let a = read_array(array)?;
            let rep = validate_heffter(&a)?;
            if !rep.pass {
                return Ok(Outcome::new(json!({ "validation": rep }), false).inputs(&[array]));
            }
            let sols = knight::enumerate_solutions(&a.skeleton(), *trivial_r, *budget)?;
            let embs = sols.iter().map(|p| build_embedding(&a, p)).collect::<Result<Vec<_>, _>>()?;
            let reports = embs.iter().map(|e| report(&a, e)).collect::<Result<Vec<_>, _>>()?;
            let all_pass = reports.iter().all(|r| r.pass);
            let res = classify(&embs)?;
            let mut outcome = Outcome::new(
                json!({
                    "validation": rep,
                    "globally_simple": is_globally_simple(&a),
                    "solutions": sols.len(),
                    "embeddings_pass": all_pass,
                    "distinct_rotations": res.distinct,
                    "class_sizes": res.class_sizes(),
                    "genus": reports.first().map(|r| r.genus_euler),
                }),
                all_pass,
            )
            .inputs(&[array]);
            if let Some(dir) = out {
                for (i, e) in embs.iter().enumerate() {
                    let path = dir.join(format!("embedding_{i}.json"));
                    write_file(&path, &pretty(&to_value(e)))?;
                    outcome.outputs.push(path);
                }
            }
            Ok(outcome)
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    arguments: Vec<String>,
    input_sha256: BTreeMap<String, String>,
    tool_version: &'static str,
    randomness: &'static str,
    outputs: Vec<String>,
}

fn render_text(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, x)| match x {
                Value::String(s) => format!("{k}: {s}\n"),
                other => format!("{k}: {other}\n"),
            })
            .collect(),
        other => format!("{other}\n"),
    }
}

/// Run the CLI on `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            return 2;
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            let text = if cli.global.text { render_text(&outcome.body) } else { pretty(&outcome.body) + "\n" };
            let _ = out.write_all(text.as_bytes());
            if let Some(path) = &cli.global.manifest {
                let hashes = outcome
                    .inputs
                    .iter()
                    .filter_map(|p| fs::read(p).ok().map(|b| (p.display().to_string(), sha256_hex(&b))))
                    .collect();
                let manifest = RunManifest {
                    command: format!("{:?}", cli.command).split_whitespace().next().unwrap_or_default().to_string(),
                    arguments: args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
                    input_sha256: hashes,
                    tool_version: env!("CARGO_PKG_VERSION"),
                    randomness: "none; every command is deterministic",
                    outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
                };
                if let Err(Failure::Usage(msg)) = write_file(path, &pretty(&to_value(&manifest))) {
                    let _ = writeln!(err, "error: {msg}");
                    return 2;
                }
            }
            if outcome.pass {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Math(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

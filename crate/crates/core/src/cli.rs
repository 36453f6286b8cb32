//! The `convindex` command line.
//!
//! Reports go to standard output as JSON (SVG for `plot`); failures print a
//! JSON object on standard error and exit with 1 (invalid input), 2 (refused
//! by a precondition) or 3 (a checked identity failed).

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::gen::disk_example;
use crate::index::{global_index, global_irregularity, limit_decide};
use crate::instance::{InstanceError, InstanceFile, Operators};
use crate::operator::{young_polygon, young_profile, young_radii, OperatorError};
use crate::plot::plot;
use crate::radii::{sigma_plfs, Equation, FieldConfig, MultiRadiusProfile, ProfileError};
use crate::rational::Rational;
use crate::skeleton::SkeletonError;
use crate::suites::{disk_report, run_checks, Suite};

#[derive(Parser, Debug)]
#[command(name = "convindex", version, about = "Radii of convergence and de Rham indices on curve skeletons")]
struct Cli {
    /// Seed for the random refinements of `check --suite invariance`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse and validate an instance.
    Validate { file: String },
    /// Global index with both sides of the cross-check.
    Index { file: String },
    /// Global irregularity.
    Irregularity { file: String },
    /// Young radii of the operators, along each carrier or at one point.
    Young {
        file: String,
        #[arg(long)]
        at: Option<Rational>,
    },
    /// Run check suites.
    Check {
        file: String,
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Decide the index of the exhaustion described by the growth rule.
    Limit {
        file: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 5)]
        window: usize,
    },
    /// Localize `dd^c H_r` to a tube centred at a vertex.
    Localize {
        file: String,
        #[arg(long)]
        vertex: String,
        #[arg(long, default_value = "canonical")]
        tube: String,
    },
    /// Draw the radii along one carrier as SVG.
    Plot {
        file: String,
        /// Radius index; all radii when omitted.
        #[arg(long)]
        index: Option<usize>,
        /// Edge or ray; the first edge (else the first ray) when omitted.
        #[arg(long)]
        edge: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in instance.
    Example { name: String },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub report: Option<serde_json::Value>,
}

impl Failure {
    fn invalid(m: impl ToString) -> Self {
        Failure { code: 1, kind: "validation", message: m.to_string(), report: None }
    }
    fn refused(m: impl ToString) -> Self {
        Failure { code: 2, kind: "refusal", message: m.to_string(), report: None }
    }
    fn assertion(m: impl ToString, report: serde_json::Value) -> Self {
        Failure { code: 3, kind: "assertion", message: m.to_string(), report: Some(report) }
    }
}

impl From<ProfileError> for Failure {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::Refusal(_) | ProfileError::Precondition(_) => Failure::refused(e),
            ProfileError::Skeleton(SkeletonError::Precondition(_)) => Failure::refused(e),
            _ => Failure::invalid(e),
        }
    }
}

impl From<OperatorError> for Failure {
    fn from(e: OperatorError) -> Self {
        match e {
            OperatorError::Refusal(_) | OperatorError::Inapplicable(_) => Failure::refused(e),
            _ => Failure::invalid(e),
        }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        match e {
            InstanceError::Profile(p) => p.into(),
            InstanceError::Operator(o) => o.into(),
            other => Failure::invalid(other),
        }
    }
}

type Out = Result<String, Failure>;

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn load(path: &str, stdin: &mut dyn Read) -> Result<(InstanceFile, MultiRadiusProfile), Failure> {
    let mut text = String::new();
    if path == "-" {
        stdin.read_to_string(&mut text).map_err(Failure::invalid)?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("{path}: {e}")))?;
    }
    let inst = InstanceFile::parse(&text)?;
    let prof = inst.validate()?;
    Ok((inst, prof))
}

fn validate(inst: &InstanceFile, prof: &MultiRadiusProfile) -> Out {
    let eq = Equation::new(&inst.skeleton, prof)?;
    Ok(to_json(&json!({
        "valid": true,
        "rank": eq.rank,
        "vertices": inst.skeleton.vertices.len(),
        "edges": inst.skeleton.edges.len(),
        "rays": inst.skeleton.rays.len(),
        "disk_components": inst.skeleton.disk_components,
        "chi_c": crate::skeleton::chi_c_with(&inst.skeleton, &eq.topo),
    })))
}

fn index(inst: &InstanceFile, prof: &MultiRadiusProfile) -> Out {
    let eq = Equation::new(&inst.skeleton, prof)?;
    let rep = global_index(&eq, &inst.flags);
    let v = serde_json::to_value(&rep).unwrap();
    if rep.agree == Some(false) {
        return Err(Failure::assertion("the two sides of the index formula differ", v));
    }
    Ok(to_json(&rep))
}

fn young(inst: &InstanceFile, at: Option<Rational>) -> Out {
    let ops = inst.operator.as_ref().map(Operators::as_slice).ok_or_else(|| Failure::refused("the instance gives no operator"))?;
    let topo = inst.skeleton.validated().map_err(ProfileError::from)?;
    let sigma = sigma_plfs(&inst.skeleton, &topo);
    let mut out = Vec::new();
    for op in ops {
        let sig = match &op.carrier {
            Some(c) => {
                let i = topo
                    .eindex
                    .get(c)
                    .copied()
                    .or_else(|| topo.rindex.get(c).map(|r| inst.skeleton.edges.len() + r))
                    .ok_or_else(|| Failure::invalid(format!("unknown carrier {c}")))?;
                sigma[i].clone()
            }
            None => crate::plf::PLFunction::constant(&op.domain, Rational::zero()),
        };
        let entry = match &at {
            Some(t) => {
                let st = sig.eval(t).map_err(|e| Failure::invalid(format!("--at {t}: {e}")))?;
                json!({
                    "carrier": op.carrier,
                    "at": t,
                    "sigma": st,
                    "radii": young_radii(op, &inst.field, t, &st)?,
                    "polygon": young_polygon(op, t)?,
                })
            }
            None => json!({ "carrier": op.carrier, "radii": young_profile(op, &inst.field, &sig)? }),
        };
        out.push(entry);
    }
    Ok(to_json(&out))
}

fn localize(inst: &InstanceFile, prof: &MultiRadiusProfile, vertex: &str, tube: &str) -> Out {
    if tube != "canonical" {
        return Err(Failure::invalid(format!("unknown tube {tube}; only 'canonical' is supported")));
    }
    let eq = Equation::new(&inst.skeleton, prof)?;
    let x = eq.vertex(vertex)?;
    let tube = eq.canonical_tube(&x);
    let loc = eq.localize_tube_laplacian(&x, &tube)?;
    Ok(to_json(&json!({
        "vertex": vertex,
        "tube": tube,
        "dd_h_r": eq.laplacian(&x, crate::radii::Func::H(eq.rank)),
        "localized": loc,
    })))
}

fn example(name: &str) -> Out {
    if name != "paper-3-4" {
        return Err(Failure::invalid(format!("unknown example {name}; available: paper-3-4")));
    }
    let (sk, ops) = disk_example();
    let inst = InstanceFile {
        field: FieldConfig::zero(),
        skeleton: sk,
        profile: None,
        operator: Some(Operators::Many(ops)),
        flags: crate::index::EquationFlags::all_liouville(),
        growth: None,
    };
    let prof = inst.validate()?;
    let eq = Equation::new(&inst.skeleton, &prof)?;
    let rep = disk_report(&eq, "end@inf")?;
    if !rep.holds {
        return Err(Failure::assertion("the disk example lost its vanishing index", serde_json::to_value(&rep).unwrap()));
    }
    let mut s = inst.to_json();
    s.push('\n');
    Ok(s)
}

fn dispatch(cli: Cli, stdin: &mut dyn Read) -> Out {
    match cli.cmd {
        Cmd::Validate { file } => {
            let (inst, prof) = load(&file, stdin)?;
            validate(&inst, &prof)
        }
        Cmd::Index { file } => {
            let (inst, prof) = load(&file, stdin)?;
            index(&inst, &prof)
        }
        Cmd::Irregularity { file } => {
            let (inst, prof) = load(&file, stdin)?;
            let eq = Equation::new(&inst.skeleton, &prof)?;
            Ok(to_json(&global_irregularity(&eq)?))
        }
        Cmd::Young { file, at } => {
            let (inst, _) = load(&file, stdin)?;
            young(&inst, at)
        }
        Cmd::Check { file, suite } => {
            let (inst, prof) = load(&file, stdin)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let rep = run_checks(&mut rng, &inst.skeleton, &prof, suite)?;
            if !rep.passed {
                return Err(Failure::assertion("a check suite failed", serde_json::to_value(&rep).unwrap()));
            }
            Ok(to_json(&rep))
        }
        Cmd::Limit { file, steps, window } => {
            let (inst, _) = load(&file, stdin)?;
            let rule = inst.growth.as_ref().ok_or_else(|| Failure::refused("the instance has no growth rule"))?;
            let rep = limit_decide(rule, &inst.flags, steps, window)?;
            if !rep.telescoping || rep.agree == Some(false) {
                return Err(Failure::assertion("limit identities failed", serde_json::to_value(&rep).unwrap()));
            }
            Ok(to_json(&rep))
        }
        Cmd::Localize { file, vertex, tube } => {
            let (inst, prof) = load(&file, stdin)?;
            localize(&inst, &prof, &vertex, &tube)
        }
        Cmd::Plot { file, index, edge, out } => {
            let (inst, prof) = load(&file, stdin)?;
            let eq = Equation::new(&inst.skeleton, &prof)?;
            let carrier = match edge {
                Some(e) => e,
                None => inst
                    .skeleton
                    .edges
                    .first()
                    .map(|e| e.id.clone())
                    .or_else(|| inst.skeleton.rays.first().map(|r| r.id.clone()))
                    .ok_or_else(|| Failure::invalid("the skeleton has no edge or ray to plot"))?,
            };
            let svg = plot(&eq, &carrier, index)?;
            match out {
                Some(p) if p.as_os_str() != "-" => {
                    std::fs::write(&p, &svg).map_err(|e| Failure::invalid(format!("{}: {e}", p.display())))?;
                    Ok(to_json(&json!({ "written": p, "carrier": carrier })))
                }
                _ => Ok(svg),
            }
        }
        Cmd::Example { name } => example(&name),
    }
}

/// Runs one command line; returns the exit code.
pub fn run<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(stderr, "{}", json!({ "error": "usage", "message": e.to_string().trim() }));
            return 1;
        }
    };
    match dispatch(cli, stdin) {
        Ok(s) => {
            let _ = stdout.write_all(s.as_bytes());
            0
        }
        Err(f) => {
            let mut obj = json!({ "error": f.kind, "message": f.message });
            if let Some(r) = f.report {
                obj["report"] = r;
            }
            let _ = writeln!(stderr, "{obj}");
            f.code
        }
    }
}

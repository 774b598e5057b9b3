//! The `filtra` command line.
//!
//! Every command prints one JSON document on stdout (or to `--out`) and a
//! one-line summary on stderr. Exit codes: 0 success, 1 invalid input or a
//! failed check, 2 element cap exceeded, 3 fingerprints differ.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algrep::{jacobson_radical, op_embed};
use crate::bimap::{invariant_ring, satisfies, RingKind};
use crate::error::{Error, Result};
use crate::filter::{Filter, FilterJson};
use crate::group::{eta_series, gamma_series, kappa_series, make_heisenberg, make_ut, GroupSpec, UnipotentGroup, DEFAULT_CAP};
use crate::liering::GradedLieRing;
use crate::refine::{factor_dims, fingerprint, refine_stable, RefinementConfig, Selection};
use crate::ring::parse_poly_spec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_DIFFER: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "filtra", version, about = "Characteristic filters of unipotent matrix groups over Z_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Largest subgroup (in elements) any computation may build.
    #[arg(long, global = true, env = "FILTRA_CAP")]
    pub cap: Option<usize>,

    /// Seed for the randomized irreducibility search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// A characteristic series of the group.
    Series {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_enum, default_value_t = Which::Gamma)]
        which: Which,
    },
    /// Refine the lower central series by the radical of an invariant ring.
    Refine {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        refine: RefineArgs,
        /// Repeat until the chain stops changing.
        #[arg(long)]
        stable: bool,
    },
    /// Isomorphism invariants; with a second group, compare them.
    Fingerprint {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        against: AgainstArgs,
        #[command(flatten)]
        refine: RefineArgs,
    },
    /// Check filter axioms, Lie identities, ring identities and radicals.
    Verify {
        #[command(flatten)]
        group: GroupArgs,
        /// A filter JSON file (as written by `series` or `refine`).
        #[arg(long, conflicts_with_all = ["ut", "heisenberg", "group"])]
        filter: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
pub struct GroupArgs {
    /// Unitriangular group UT(d, p).
    #[arg(long, num_args = 2, value_names = ["D", "P"])]
    pub ut: Option<Vec<u32>>,
    /// Heisenberg group over Z_p[x]/(f): `p,c0,c1,…,1` lists the monic f from
    /// the constant term up, e.g. `2,0,0,1` for F_2[x]/(x²).
    #[arg(long, value_name = "SPEC")]
    pub heisenberg: Option<String>,
    /// Group JSON file: {"p", "degree", "generators": [[row-major entries]], "name"}.
    #[arg(long, value_name = "FILE")]
    pub group: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct AgainstArgs {
    #[arg(long, num_args = 2, value_names = ["D", "P"])]
    pub against_ut: Option<Vec<u32>>,
    #[arg(long, value_name = "SPEC")]
    pub against_heisenberg: Option<String>,
    #[arg(long, value_name = "FILE")]
    pub against_group: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RefineArgs {
    #[arg(long, value_enum, default_value_t = Method::Adjoint)]
    pub method: Method,
    /// Round limit for stable refinement.
    #[arg(long, default_value_t = 64)]
    pub rounds: usize,
    /// Refine the least component whose refinement is proper instead of
    /// always the least component.
    #[arg(long)]
    pub first_proper: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Gamma,
    Eta,
    Kappa,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Adjoint,
    Centroid,
    Derivation,
}

impl From<Method> for RingKind {
    fn from(m: Method) -> Self {
        match m {
            Method::Adjoint => RingKind::Adjoint,
            Method::Centroid => RingKind::Centroid,
            Method::Derivation => RingKind::Derivation,
        }
    }
}

fn load_group(ut: &Option<Vec<u32>>, heis: &Option<String>, file: &Option<PathBuf>, cap: usize) -> Result<Option<UnipotentGroup>> {
    match (ut, heis, file) {
        (Some(v), None, None) => Ok(Some(make_ut(v[0] as usize, v[1], cap)?)),
        (None, Some(s), None) => Ok(Some(make_heisenberg(&parse_poly_spec(s)?, cap)?)),
        (None, None, Some(path)) => {
            let spec: GroupSpec = read_json(path)?;
            Ok(Some(UnipotentGroup::from_spec(&spec, cap)?))
        }
        (None, None, None) => Ok(None),
        _ => Err(Error::InvalidInput("give exactly one of --ut, --heisenberg, --group".into())),
    }
}

impl GroupArgs {
    fn load(&self, cap: usize) -> Result<Arc<UnipotentGroup>> {
        load_group(&self.ut, &self.heisenberg, &self.group, cap)?
            .map(Arc::new)
            .ok_or_else(|| Error::InvalidInput("no group given (use --ut, --heisenberg or --group)".into()))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn series_filter(g: &Arc<UnipotentGroup>, which: Which) -> Result<Filter> {
    let s = match which {
        Which::Gamma => gamma_series(g, g.whole())?,
        Which::Eta => eta_series(g, g.whole())?,
        Which::Kappa => kappa_series(g, g.whole())?,
    };
    Filter::from_series(g.clone(), s)
}

fn order_exps(f: &Filter) -> Vec<u32> {
    f.flatten().iter().map(|h| h.order_exp()).collect()
}

/// The outcome of a command: JSON, a summary line and an exit code.
pub struct Outcome {
    pub json: Value,
    pub summary: String,
    pub code: i32,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn config(args: &RefineArgs, rounds: usize, cap: usize, seed: u64) -> RefinementConfig {
    RefinementConfig {
        method: args.method.into(),
        max_rounds: rounds,
        cap,
        seed,
        selection: if args.first_proper { Selection::FirstProper } else { Selection::Leading },
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cap = cli.cap.unwrap_or(DEFAULT_CAP);
    match &cli.command {
        Command::Series { group, which } => {
            let g = group.load(cap)?;
            let f = series_filter(&g, *which)?;
            let exps = order_exps(&f);
            let summary = format!("{} {:?}: exponents {:?}, length {}", g.name(), which, exps, f.length());
            let json = json!({
                "group": g.name(),
                "which": format!("{which:?}").to_lowercase(),
                "order_exps": exps,
                "factor_dims": factor_dims(&f),
                "length": f.length(),
                "filter": to_value(&f.to_json()),
            });
            Ok(Outcome { json, summary, code: EXIT_OK })
        }
        Command::Refine { group, refine, stable } => {
            let g = group.load(cap)?;
            let f = series_filter(&g, Which::Gamma)?;
            let rounds = if *stable { refine.rounds } else { 1 };
            let cfg = config(refine, rounds, cap, cli.seed);
            let r = refine_stable(&f, &cfg)?;
            let out = r.to_json(cfg.method);
            let summary = format!(
                "{} {}: exponents {:?}, length {} after {} round(s)",
                g.name(),
                cfg.method,
                out.order_exps,
                r.filter.length(),
                r.rounds.len()
            );
            Ok(Outcome { json: to_value(&out), summary, code: EXIT_OK })
        }
        Command::Fingerprint { group, against, refine } => {
            let cfg = config(refine, refine.rounds, cap, cli.seed);
            let g = group.load(cap)?;
            let a = fingerprint(&g, &cfg)?;
            let Some(h) = load_group(&against.against_ut, &against.against_heisenberg, &against.against_group, cap)? else {
                let summary = format!("{}: length {}, factors {:?}", g.name(), a.length, a.factor_dims);
                return Ok(Outcome { json: to_value(&a), summary, code: EXIT_OK });
            };
            let b = fingerprint(&Arc::new(h), &cfg)?;
            let equal = a == b;
            let verdict = if equal { "inconclusive" } else { "non-isomorphic" };
            let json = json!({ "a": to_value(&a), "b": to_value(&b), "equal": equal, "verdict": verdict });
            let code = if equal { EXIT_OK } else { EXIT_DIFFER };
            Ok(Outcome { json, summary: format!("fingerprints {verdict}"), code })
        }
        Command::Verify { group, filter } => {
            let report = match filter {
                Some(path) => {
                    let fj: FilterJson = read_json(path)?;
                    let f = Filter::from_json(&fj, cap)?;
                    let mut r = Report::default();
                    check_filter(&mut r, "filter", &f, cli.seed);
                    r
                }
                None => verify_group(&group.load(cap)?, cli.seed)?,
            };
            let ok = report.checks.iter().all(|c| c.ok);
            let failed = report.checks.iter().filter(|c| !c.ok).count();
            let summary = format!("{} checks, {} failed", report.checks.len(), failed);
            let json = json!({ "ok": ok, "checks": to_value(&report.checks) });
            Ok(Outcome { json, summary, code: if ok { EXIT_OK } else { EXIT_INVALID } })
        }
    }
}

#[derive(Serialize, Debug)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
}

impl Report {
    fn push(&mut self, name: String, witness: Option<String>) {
        self.checks.push(Check { name, ok: witness.is_none(), witness });
    }
}

fn check_filter(r: &mut Report, name: &str, f: &Filter, seed: u64) {
    r.push(format!("{name}: filter axioms"), f.verify_axioms().err().map(|v| format!("{v:?}")));
    let ring = match GradedLieRing::build(f) {
        Ok(ring) => ring,
        Err(e) => return r.push(format!("{name}: graded Lie ring"), Some(e.to_string())),
    };
    r.push(format!("{name}: Lie identities"), ring.check_jacobi().err().map(|v| format!("{v:?}")));
    let Some(s) = ring.components().keys().next().cloned() else { return };
    let m = match ring.bimap_at(&s, &s) {
        Ok(m) => m,
        Err(e) => return r.push(format!("{name}: leading bracket"), Some(e.to_string())),
    };
    for kind in [RingKind::Adjoint, RingKind::Centroid, RingKind::Derivation] {
        let inv = invariant_ring(&m, kind);
        let bad = inv.basis().iter().position(|e| !satisfies(&m, kind, e));
        let witness = match bad {
            Some(i) => Some(format!("basis element {i} fails the defining identity")),
            None if !inv.is_closed() => Some("basis not closed under products".into()),
            None => None,
        };
        r.push(format!("{name}: {kind} ring identities"), witness);
        let radical = op_embed(&inv).and_then(|a| jacobson_radical(&a, seed));
        r.push(format!("{name}: {kind} radical"), radical.err().map(|e| e.to_string()));
    }
}

fn verify_group(g: &Arc<UnipotentGroup>, seed: u64) -> Result<Report> {
    let mut r = Report::default();
    for which in [Which::Gamma, Which::Eta, Which::Kappa] {
        let f = series_filter(g, which)?;
        let name = format!("{which:?}").to_lowercase();
        check_filter(&mut r, &name, &f, seed);
    }
    let f = series_filter(g, Which::Gamma)?;
    if !f.components().is_empty() {
        let cfg = RefinementConfig { seed, ..RefinementConfig::default() };
        let mut cur = f;
        for round in 1..=cfg.max_rounds {
            let step = crate::refine::refine_step(&cur, &cfg)?;
            if !step.info.proper {
                break;
            }
            let contained = crate::refine::contains_chain(&step.filter, &cur);
            r.push(format!("adjoint round {round}: refines"), (!contained).then(|| "lost a term".to_string()));
            check_filter(&mut r, &format!("adjoint round {round}"), &step.filter, seed);
            cur = step.filter;
        }
    }
    Ok(r)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded(_) => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

/// Runs the parsed command, printing JSON and the summary; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(out) => {
            let text = serde_json::to_string_pretty(&out.json).expect("serializable") + "\n";
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &text) {
                        eprintln!("error: {}: {e}", path.display());
                        return EXIT_INVALID;
                    }
                }
                None => print!("{text}"),
            }
            eprintln!("{}", out.summary);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

//! Command-line entry points.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::json;
use thiserror::Error;

use crate::behaviour::{
    dual_pool, in_behaviour, tensor_generators, BehaviourError, BehaviourHandle,
};
use crate::delocalize::{check_fax_theorem, substitute_prefix, DelocError};
use crate::design::Design;
use crate::enumerate::{enumerate_designs, random_design, Bounds, EnumError};
use crate::formulas::{detect_petitio, detect_presupposition_gap, Evidence};
use crate::interaction::{
    closed_pair_trace, make_net, normalize, NetError, OrthError, Trace, Verdict,
};
use crate::locus::Locus;
use crate::service::SessionStore;
use crate::syntax::{
    parse_fork, parse_source, serialize_design, serialize_designs, SourceFile, SyntaxError,
};

#[derive(Debug, Parser)]
#[command(
    name = "ludics",
    version,
    about = "Interaction engine for ludics designs"
)]
pub struct Cli {
    /// Interaction steps allowed before giving up.
    #[arg(long, global = true, env = "LUDIC_FUEL", default_value_t = 10_000)]
    pub fuel: usize,
    /// Height used when comparing or unfolding infinite designs.
    #[arg(long, global = true, default_value_t = 4)]
    pub depth: usize,
    /// Structured output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a file, listing its designs.
    Check { file: PathBuf },
    /// Normalize a net of designs from a file.
    Normalize {
        file: PathBuf,
        /// Member designs, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        net: Vec<String>,
        /// Cut loci, comma separated; inferred from the bases when absent.
        #[arg(long, value_delimiter = ',')]
        cut: Vec<String>,
        /// Print every step of the interaction.
        #[arg(long)]
        trace: bool,
    },
    /// Decide orthogonality of two designs on dual bases.
    Orth {
        file: PathBuf,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        trace: bool,
    },
    /// Move a design from one locus to another.
    Deloc {
        file: PathBuf,
        #[arg(long)]
        design: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Check that the copy-cat design relocates a design, or random ones.
    FaxCheck {
        file: Option<PathBuf>,
        /// Design to check; random designs are sampled when absent.
        #[arg(long)]
        design: Option<String>,
        /// Target locus.
        #[arg(long, default_value = "1")]
        to: String,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sampling bounds as depth,bias,ramification size.
        #[arg(long, value_delimiter = ',', default_values_t = [3, 3, 2])]
        bounds: Vec<usize>,
    },
    /// Generators of the tensor of two behaviours.
    Tensor {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        left: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        right: Vec<String>,
    },
    /// Membership of designs in the behaviour spanned by generators.
    Behaviour {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        generators: Vec<String>,
        /// Designs to test; every design of the file on the same base when absent.
        #[arg(long, value_delimiter = ',')]
        designs: Vec<String>,
        #[arg(long, default_value_t = 2)]
        pool_depth: usize,
        #[arg(long, default_value_t = 2)]
        pool_width: u32,
    },
    /// Enumerate the finite designs on a base.
    Enum {
        /// A base such as `|- 0` or `0 |-`.
        #[arg(long)]
        base: String,
        /// Bounds as depth,bias,ramification size.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 2, 2])]
        bounds: Vec<usize>,
        /// Only print how many there are.
        #[arg(long)]
        count: bool,
    },
    /// Look for fallacies in designs.
    Fallacy {
        #[command(subcommand)]
        kind: Fallacy,
    },
    /// Run the session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Append session events to this JSON-lines file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Fallacy {
    /// Justifications that restate their thesis.
    Petitio {
        file: PathBuf,
        #[arg(long)]
        design: Option<String>,
    },
    /// Loci some rule silently leaves behind.
    Gap {
        file: PathBuf,
        #[arg(long)]
        design: Option<String>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Syntax { path: String, source: SyntaxError },
    #[error("no design `{0}` in the file")]
    UnknownDesign(String),
    #[error("bounds need three numbers: depth,bias,ramification size")]
    Bounds,
    #[error("a file is needed with --design")]
    NoFile,
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Orth(#[from] OrthError),
    #[error(transparent)]
    Deloc(#[from] DelocError),
    #[error(transparent)]
    Behaviour(#[from] BehaviourError),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Engine(#[from] crate::interaction::EngineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

struct Loaded {
    src: SourceFile,
}

impl Loaded {
    fn open(path: &PathBuf) -> Result<Loaded, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let src = parse_source(&text).map_err(|source| CliError::Syntax {
            path: path.display().to_string(),
            source,
        })?;
        Ok(Loaded { src })
    }

    fn design(&self, name: &str) -> Result<&Design, CliError> {
        self.src
            .design(name)
            .ok_or_else(|| CliError::UnknownDesign(name.to_string()))
    }

    fn locus(&self, text: &str) -> Result<Locus, CliError> {
        self.src.locus(text).map_err(|source| CliError::Syntax {
            path: "argument".into(),
            source,
        })
    }

    /// `xi.1.1` rather than `0.1.1` when `xi` is bound to `0`.
    fn pretty(&self, l: &Locus) -> String {
        pretty_locus(l, &self.src.bindings)
    }
}

/// Writes a locus using the longest binding that is a prefix of it.
pub fn pretty_locus(l: &Locus, bindings: &BTreeMap<String, Locus>) -> String {
    let best = bindings
        .iter()
        .filter(|(_, b)| b.is_prefix_of(l) && !b.is_empty())
        .max_by_key(|(_, b)| b.len());
    match best {
        Some((name, b)) => {
            let rest = l.strip_prefix(b).unwrap_or_default();
            let mut s = name.clone();
            for i in rest {
                s.push_str(&format!(".{i}"));
            }
            s
        }
        None => l.to_string(),
    }
}

fn bounds(v: &[usize]) -> Result<Bounds, CliError> {
    match v {
        [d, b, r] => Ok(Bounds::new(
            *d,
            u32::try_from(*b).map_err(|_| CliError::Bounds)?,
            *r,
        )),
        _ => Err(CliError::Bounds),
    }
}

fn verdict_code(v: &Verdict) -> i32 {
    if v.is_converged() {
        0
    } else {
        1
    }
}

fn print_trace(
    out: &mut dyn Write,
    trace: &Trace,
    steps: bool,
    json: bool,
) -> Result<(), CliError> {
    if json {
        writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(trace).expect("trace serializes")
        )?;
        return Ok(());
    }
    if steps {
        write!(out, "{}", trace.to_text())?;
    } else {
        writeln!(out, "VERDICT: {}", trace.verdict)?;
    }
    if let Verdict::Converged { residual } = &trace.verdict {
        if !residual.base.tines.is_empty() || residual.base.handle.is_some() {
            writeln!(out, "{}", serialize_design(residual))?;
        }
    }
    Ok(())
}

/// Runs one command, writing its report to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let fuel = cli.fuel;
    let json = cli.json;
    match cli.command {
        Command::Check { file } => {
            let f = Loaded::open(&file)?;
            if json {
                let list: Vec<_> = f
                    .src
                    .designs()
                    .map(|d| json!({"name": d.name, "base": d.base.to_string(), "design": serialize_design(d)}))
                    .collect();
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&list).expect("json")
                )?;
            } else {
                for d in f.src.designs() {
                    writeln!(out, "{}\t{}", d.name, d.base)?;
                }
                for name in f.src.formulas.keys() {
                    writeln!(out, "formula {name}")?;
                }
            }
            Ok(0)
        }
        Command::Normalize {
            file,
            net,
            cut,
            trace,
        } => {
            let f = Loaded::open(&file)?;
            let designs = net
                .iter()
                .map(|n| f.design(n).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            let cuts: BTreeSet<Locus> = if cut.is_empty() {
                designs
                    .iter()
                    .filter_map(|d| d.base.handle.clone())
                    .filter(|h| designs.iter().any(|e| e.base.tines.contains(h)))
                    .collect()
            } else {
                cut.iter().map(|c| f.locus(c)).collect::<Result<_, _>>()?
            };
            let net = make_net(designs, cuts, &f.src.library)?;
            let t = normalize(&net, fuel)?;
            print_trace(out, &t, trace, json)?;
            Ok(verdict_code(&t.verdict))
        }
        Command::Orth {
            file,
            left,
            right,
            trace,
        } => {
            let f = Loaded::open(&file)?;
            let t = closed_pair_trace(f.design(&left)?, f.design(&right)?, &f.src.library, fuel)?;
            let answer = match &t.verdict {
                Verdict::Converged { .. } => "yes",
                Verdict::Diverged { .. } => "no",
                Verdict::OutOfFuel { .. } => "unknown",
            };
            if json {
                let v = json!({"orthogonal": answer, "trace": t});
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            } else {
                if trace {
                    write!(out, "{}", t.to_text())?;
                }
                writeln!(out, "{answer}")?;
            }
            Ok(verdict_code(&t.verdict))
        }
        Command::Deloc {
            file,
            design,
            from,
            to,
        } => {
            let f = Loaded::open(&file)?;
            let moved = substitute_prefix(f.design(&design)?, &f.locus(&from)?, &f.locus(&to)?)?;
            if json {
                let v = json!({"design": serialize_design(&moved)});
                writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            } else {
                writeln!(out, "{}", serialize_design(&moved))?;
            }
            Ok(0)
        }
        Command::FaxCheck {
            file,
            design,
            to,
            samples,
            seed,
            bounds: b,
        } => match design {
            Some(name) => {
                let f = Loaded::open(file.as_ref().ok_or(CliError::NoFile)?)?;
                let rho = f.locus(&to)?;
                let check = check_fax_theorem(f.design(&name)?, &rho, fuel, &f.src.library)?;
                if json {
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&check).expect("json")
                    )?;
                } else {
                    writeln!(out, "expected: {}", serialize_design(&check.expected))?;
                    writeln!(out, "VERDICT: {}", check.verdict)?;
                    if let Some(d) = &check.diagnostic {
                        writeln!(out, "diagnostic: {d}")?;
                    }
                    writeln!(out, "{}", if check.holds { "holds" } else { "fails" })?;
                }
                Ok(if check.holds { 0 } else { 1 })
            }
            None => {
                let b = bounds(&b)?;
                let rho =
                    crate::syntax::parse_locus_plain(&to).map_err(|source| CliError::Syntax {
                        path: "argument".into(),
                        source,
                    })?;
                let base = crate::locus::Fork::positive([Locus::new(vec![0])]);
                let mut rng = StdRng::seed_from_u64(seed);
                let lib = crate::design::Library::empty();
                let mut failures = Vec::new();
                for k in 0..samples {
                    let d = random_design(&base, b, &mut rng);
                    let check = check_fax_theorem(&d, &rho, fuel, lib)?;
                    if !check.holds {
                        failures.push((
                            k,
                            serialize_design(&d),
                            check.diagnostic.unwrap_or_default(),
                        ));
                    }
                }
                if json {
                    let v = json!({"samples": samples, "failures": failures.len()});
                    writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
                } else {
                    for (k, d, why) in &failures {
                        writeln!(out, "sample {k}: {why}\n  {d}")?;
                    }
                    writeln!(
                        out,
                        "{} of {} samples hold",
                        samples - failures.len(),
                        samples
                    )?;
                }
                Ok(if failures.is_empty() { 0 } else { 1 })
            }
        },
        Command::Tensor { file, left, right } => {
            let f = Loaded::open(&file)?;
            let gens = |names: &[String]| -> Result<BehaviourHandle, CliError> {
                let ds = names
                    .iter()
                    .map(|n| f.design(n).cloned())
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(BehaviourHandle::new(ds, Vec::new(), fuel)?)
            };
            let t = tensor_generators(&gens(&left)?, &gens(&right)?)?;
            if json {
                let list: Vec<String> = t.generators.iter().map(serialize_design).collect();
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&json!({"generators": list})).expect("json")
                )?;
            } else {
                write!(out, "{}", serialize_designs(&t.generators))?;
            }
            Ok(0)
        }
        Command::Behaviour {
            file,
            generators,
            designs,
            pool_depth,
            pool_width,
        } => {
            let f = Loaded::open(&file)?;
            let gens = generators
                .iter()
                .map(|n| f.design(n).cloned())
                .collect::<Result<Vec<_>, _>>()?;
            let base = gens
                .first()
                .map(|g| g.base.clone())
                .ok_or(BehaviourError::NoGenerators)?;
            let pool = dual_pool(&base, pool_depth, pool_width)?;
            let handle = BehaviourHandle::new(gens, pool, fuel)?;
            let tested: Vec<&Design> = if designs.is_empty() {
                f.src.designs().filter(|d| d.base == base).collect()
            } else {
                designs
                    .iter()
                    .map(|n| f.design(n))
                    .collect::<Result<_, _>>()?
            };
            let set = format!("{{{}}}", generators.join(","));
            let mut rows = Vec::new();
            for d in tested {
                let m = in_behaviour(d, &handle, &f.src.library)?;
                rows.push((d.name.clone(), m));
            }
            if json {
                let list: Vec<_> = rows
                    .iter()
                    .map(|(n, m)| {
                        json!({"design": n, "generators": set, "verdict": m.verdict, "pool_size": handle.pool.len(),
                               "tested": m.tested, "fuel": fuel, "pool_relative": m.pool_relative,
                               "witness": m.witness.as_ref().map(serialize_design)})
                    })
                    .collect();
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&list).expect("json")
                )?;
            } else {
                writeln!(out, "design\tgenerator-set\tverdict\tpool-size\tfuel")?;
                for (n, m) in &rows {
                    writeln!(
                        out,
                        "{n}\t{set}\t{}\t{}\t{fuel}",
                        m.verdict,
                        handle.pool.len()
                    )?;
                }
            }
            Ok(0)
        }
        Command::Enum {
            base,
            bounds: b,
            count,
        } => {
            let fork = parse_fork(&base, &BTreeMap::new()).map_err(|source| CliError::Syntax {
                path: "--base".into(),
                source,
            })?;
            let e = enumerate_designs(&fork, bounds(&b)?)?;
            if json {
                let list: Vec<String> = e.iter().map(serialize_design).collect();
                writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&json!({"count": e.len(), "designs": list}))
                        .expect("json")
                )?;
            } else if count {
                writeln!(out, "{}", e.len())?;
            } else {
                write!(out, "{}", serialize_designs(&e))?;
            }
            Ok(0)
        }
        Command::Fallacy { kind } => match kind {
            Fallacy::Petitio { file, design } => {
                let f = Loaded::open(&file)?;
                let targets = select(&f, design.as_deref())?;
                let mut found = Vec::new();
                for d in targets {
                    for p in detect_petitio(d, &f.src.library, cli.depth) {
                        found.push((d.name.clone(), p));
                    }
                }
                if json {
                    let list: Vec<_> = found
                        .iter()
                        .map(|(n, p)| json!({"design": n, "thesis": f.pretty(&p.thesis), "justification": f.pretty(&p.justification), "evidence": p.evidence}))
                        .collect();
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&list).expect("json")
                    )?;
                } else {
                    for (n, p) in &found {
                        let why = match &p.evidence {
                            Evidence::SelfReference { name } => format!("refers back to {name}"),
                            Evidence::Delocalized { depth } => {
                                format!("same design moved, compared to height {depth}")
                            }
                        };
                        writeln!(
                            out,
                            "{n}: ({}, {}) {why}",
                            f.pretty(&p.thesis),
                            f.pretty(&p.justification)
                        )?;
                    }
                    if found.is_empty() {
                        writeln!(out, "no circular justification found")?;
                    }
                }
                Ok(0)
            }
            Fallacy::Gap { file, design } => {
                let f = Loaded::open(&file)?;
                let targets = select(&f, design.as_deref())?;
                let mut found = Vec::new();
                for d in targets {
                    for l in detect_presupposition_gap(d, &f.src.library) {
                        found.push((d.name.clone(), l));
                    }
                }
                if json {
                    let list: Vec<_> = found
                        .iter()
                        .map(|(n, l)| json!({"design": n, "locus": f.pretty(l)}))
                        .collect();
                    writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&list).expect("json")
                    )?;
                } else {
                    for (n, l) in &found {
                        writeln!(out, "{n}: {} is never answered", f.pretty(l))?;
                    }
                    if found.is_empty() {
                        writeln!(out, "no unanswered locus found")?;
                    }
                }
                Ok(0)
            }
        },
        Command::Serve { addr, log } => {
            let store = Arc::new(match log {
                Some(p) => SessionStore::with_log(p),
                None => SessionStore::new(),
            });
            let rt = tokio::runtime::Runtime::new()?;
            writeln!(out, "listening on http://{addr}")?;
            out.flush()?;
            rt.block_on(crate::service::serve(addr, store))?;
            Ok(0)
        }
    }
}

fn select<'f>(f: &'f Loaded, name: Option<&str>) -> Result<Vec<&'f Design>, CliError> {
    match name {
        Some(n) => Ok(vec![f.design(n)?]),
        None => Ok(f.src.designs().collect()),
    }
}

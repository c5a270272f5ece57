//! `homalg` command-line front end.
//!
//! Every invocation prints exactly one JSON document on stdout. Exit codes:
//! 0 success, 1 non-isomorphic verdict or failed selftest, 2 malformed input,
//! 3 budget exhausted, 4 internal error (a library invariant or the agreement
//! between decision procedures failed).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use homalg::counterexample::{demonstrate_violation, CounterexampleSpec, ViolationOptions};
use homalg::hom::{hom_partial_with, hom_with};
use homalg::isomorphism::{decide_after_contraction, decide_pinned_iso, IsoCertificate, Mode};
use homalg::tensor::{orbit_count, verify_column_space, verify_rank_theorem, RankOptions};
use homalg::twin::contract;
use homalg::witness::{find_witness, WitnessOptions};
use homalg::{selftest, Error, Exec, LabelMap, LabeledGraph, Limits, WeightedGraph};
use serde_json::{json, Value};

const BUDGET_ENV: &str = "HOMALG_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "homalg",
    version,
    about = "Exact weighted graph homomorphisms and isomorphism certificates"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Indented JSON on stdout and a one-line summary on stderr.
    #[arg(long, global = true)]
    pretty: bool,
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Field operations allowed per homomorphism evaluation [default: $HOMALG_BUDGET or 100000000].
    #[arg(long, global = true, value_name = "OPS")]
    hom_budget: Option<u64>,
    /// Largest exponent grid scanned by a moment check.
    #[arg(long, global = true, value_name = "N")]
    moment_budget: Option<u64>,
    /// Largest vertex count given to the permutation-search oracle.
    #[arg(long, global = true, value_name = "M")]
    oracle_vertices: Option<usize>,
    /// Largest number of label maps enumerated at once.
    #[arg(long, global = true, value_name = "N")]
    map_budget: Option<u64>,
    /// Largest number of connection matrix or tensor entries.
    #[arg(long, global = true, value_name = "N")]
    tensor_budget: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// hom(G, H), or hom_ψ(G, H) when --pin is given.
    Hom {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Pinning "label:vertex,..." with 1-based labels and vertices.
        #[arg(long)]
        pin: Option<String>,
    },
    /// Twin contraction of a weighted graph.
    Contract {
        #[arg(long)]
        target: PathBuf,
    },
    /// Decides (pinned) isomorphism and prints a certificate.
    Iso {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "")]
        pin_a: String,
        #[arg(long, default_value = "")]
        pin_b: String,
        /// oracle, constructive or both.
        #[arg(long, default_value = "both")]
        mode: Mode,
        /// Contract twins first and report matching twin classes.
        #[arg(long)]
        contract: bool,
    },
    /// Searches for a simple graph whose pinned hom values differ.
    Witness {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// The same pinning applied to both graphs.
        #[arg(long, conflicts_with_all = ["pin_a", "pin_b"])]
        pins: Option<String>,
        #[arg(long, default_value = "")]
        pin_a: String,
        #[arg(long, default_value = "")]
        pin_b: String,
        /// Largest vertex count (labeled plus free) of enumerated witnesses [default: k + 4].
        #[arg(long)]
        max_vertices: Option<usize>,
    },
    /// Ranks of the truncated connection matrices and tensor against the orbit count.
    Rank {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = RankOptions::default().max_free)]
        max_free: usize,
        #[arg(long, default_value_t = RankOptions::default().tensor_order)]
        tensor_order: usize,
        #[arg(long, default_value_t = RankOptions::default().product_rounds)]
        product_rounds: usize,
        /// Also check that the column space does not depend on the chosen columns.
        #[arg(long)]
        column_space: bool,
    },
    /// Number of orbits of Aut(H) on k-tuples of vertices.
    Orbits {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Builds the finite-characteristic construction and checks the hom collapse.
    Counterexample {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        /// Comma-separated block sizes, one per block.
        #[arg(long)]
        ells: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = ViolationOptions::default().max_free)]
        max_free: usize,
    },
    /// Runs the seeded property suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A finished command: the JSON document, its exit code and a human summary.
struct Outcome {
    body: Value,
    code: u8,
    summary: String,
}

impl Outcome {
    fn ok(body: Value, summary: String) -> Self {
        Outcome {
            body,
            code: 0,
            summary,
        }
    }
}

enum Failure {
    Usage(String),
    Library(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(..) => 2,
            Failure::Library(e) if e.is_budget() => 3,
            Failure::Library(e) if e.is_input_error() => 2,
            Failure::Library(_) => 4,
        }
    }

    fn body(&self) -> Value {
        let kind = match self.code() {
            2 => "malformed_input",
            3 => "budget_exhausted",
            _ => "internal",
        };
        let message = match self {
            Failure::Usage(m) => m.clone(),
            Failure::Library(e) => e.to_string(),
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
        };
        json!({ "error": kind, "message": message })
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn weighted(path: &Path) -> Result<WeightedGraph, Failure> {
    Ok(WeightedGraph::from_json_str(&read(path)?)?)
}

fn labeled(path: &Path) -> Result<LabeledGraph, Failure> {
    Ok(LabeledGraph::from_json_str(&read(path)?)?)
}

fn limits(global: &Global) -> Result<Limits, Failure> {
    let mut limits = Limits::default();
    if let Ok(raw) = std::env::var(BUDGET_ENV) {
        limits.hom_ops = raw.trim().parse().map_err(|_| {
            Failure::Usage(format!("{BUDGET_ENV}={raw:?} is not a nonnegative integer"))
        })?;
    }
    if let Some(v) = global.hom_budget {
        limits.hom_ops = v;
    }
    if let Some(v) = global.moment_budget {
        limits.moment_evaluations = v;
    }
    if let Some(v) = global.oracle_vertices {
        limits.oracle_vertices = v;
    }
    if let Some(v) = global.map_budget {
        limits.map_enumeration = v;
    }
    if let Some(v) = global.tensor_budget {
        limits.tensor_entries = v;
    }
    if global.sequential {
        limits.exec = Exec::Sequential;
    }
    Ok(limits)
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize to JSON")
}

fn certificate_outcome(cert: &IsoCertificate, body: Value) -> Outcome {
    match cert {
        IsoCertificate::Iso { .. } => Outcome {
            body,
            code: 0,
            summary: "isomorphic".into(),
        },
        IsoCertificate::NonIso { witness, lhs, rhs } => Outcome {
            body,
            code: 1,
            summary: format!(
                "not isomorphic: witness on {} vertices gives {lhs} vs {rhs}",
                witness.n()
            ),
        },
    }
}

fn execute(command: Command, limits: &Limits) -> Result<Outcome, Failure> {
    match command {
        Command::Hom { graph, target, pin } => {
            let g = labeled(&graph)?;
            let h = weighted(&target)?;
            let value = match pin {
                Some(pin) => hom_partial_with(&g, &h, &LabelMap::parse_pins(&pin)?, limits)?,
                None => hom_with(&g, &h, limits)?,
            };
            let summary = format!("value {value}");
            Ok(Outcome::ok(json!({ "value": value }), summary))
        }
        Command::Contract { target } => {
            let h = weighted(&target)?;
            let c = contract(&h);
            let summary = format!("{} vertices contracted to {}", h.order(), c.order());
            Ok(Outcome::ok(to_value(&c.to_json()), summary))
        }
        Command::Iso {
            a,
            b,
            pin_a,
            pin_b,
            mode,
            contract,
        } => {
            let h = weighted(&a)?;
            let h2 = weighted(&b)?;
            let phi = LabelMap::parse_pins(&pin_a)?;
            let psi = LabelMap::parse_pins(&pin_b)?;
            if contract {
                if phi.k() > 0 || psi.k() > 0 {
                    return Err(Failure::Usage("--contract does not accept pins".into()));
                }
                let verdict = decide_after_contraction(&h, &h2, mode, limits)?;
                let one_based = |classes: &[Vec<usize>]| -> Vec<Vec<usize>> {
                    classes
                        .iter()
                        .map(|c| c.iter().map(|v| v + 1).collect())
                        .collect()
                };
                let body = json!({
                    "classes_a": one_based(&verdict.classes_a),
                    "classes_b": one_based(&verdict.classes_b),
                    "certificate": verdict.certificate,
                    "class_matching": verdict.class_matching.as_ref().map(|m| m.iter().map(|&(x, y)| (x + 1, y + 1)).collect::<Vec<_>>()),
                });
                Ok(certificate_outcome(&verdict.certificate, body))
            } else {
                let cert = decide_pinned_iso(&h, &h2, &phi, &psi, mode, limits)?;
                Ok(certificate_outcome(&cert, to_value(&cert)))
            }
        }
        Command::Witness {
            a,
            b,
            pins,
            pin_a,
            pin_b,
            max_vertices,
        } => {
            let h = weighted(&a)?;
            let h2 = weighted(&b)?;
            let (phi, psi) = match pins {
                Some(p) => {
                    let shared = LabelMap::parse_pins(&p)?;
                    (shared.clone(), shared)
                }
                None => (LabelMap::parse_pins(&pin_a)?, LabelMap::parse_pins(&pin_b)?),
            };
            let mut options = WitnessOptions::default();
            if let Some(n) = max_vertices {
                options.max_free = n.checked_sub(phi.k()).ok_or_else(|| {
                    Failure::Usage(format!(
                        "--max-vertices {n} is below the {} labeled vertices",
                        phi.k()
                    ))
                })?;
            }
            match find_witness(&h, &h2, &phi, &psi, &options, limits)? {
                Some(w) => {
                    let summary = format!(
                        "witness on {} vertices ({:?}): {} vs {}",
                        w.graph.n(),
                        w.source,
                        w.lhs,
                        w.rhs
                    );
                    Ok(Outcome::ok(json!({ "found": true, "witness": w }), summary))
                }
                None => Ok(Outcome::ok(
                    json!({ "found": false, "message": "none found within bound", "max_vertices": phi.k() + options.max_free }),
                    "none found within bound".into(),
                )),
            }
        }
        Command::Rank {
            target,
            k,
            max_free,
            tensor_order,
            product_rounds,
            column_space,
        } => {
            let h = weighted(&target)?;
            let options = RankOptions {
                max_free,
                tensor_order,
                product_rounds,
            };
            let report = verify_rank_theorem(&h, k, &options, limits)?;
            let mut summary = format!(
                "rank N {} rank M {} orbits {} bound {}: {}",
                report.rank_n,
                report.rank_m,
                report.orbit_count,
                report.bound,
                if report.holds { "holds" } else { "fails" }
            );
            let body = if column_space {
                let cs = verify_column_space(&h, k, &options, limits)?;
                summary.push_str(&format!(
                    "; column space {}",
                    if cs.holds { "invariant" } else { "varies" }
                ));
                json!({ "rank": report, "column_space": cs })
            } else {
                to_value(&report)
            };
            Ok(Outcome::ok(body, summary))
        }
        Command::Orbits { target, k } => {
            let h = weighted(&target)?;
            let count = orbit_count(&h, k, limits)?;
            let bound = (h.order() as u128).checked_pow(k as u32);
            Ok(Outcome::ok(
                json!({ "k": k, "orbit_count": count, "bound": bound }),
                format!("{count} orbits"),
            ))
        }
        Command::Counterexample {
            p,
            n,
            ells,
            k,
            max_free,
        } => {
            let ells = ells
                .split(',')
                .map(|s| {
                    s.trim().parse::<u64>().map_err(|_| {
                        Failure::Usage(format!("--ells entry {s:?} is not an integer"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let spec = CounterexampleSpec::new(p, n, ells)?;
            let options = ViolationOptions {
                max_free,
                control_max_free: max_free,
            };
            let report = demonstrate_violation(&spec, k, &options, limits)?;
            let summary = format!(
                "{} graphs checked, hom values {}, violation {}",
                report.graphs_checked,
                if report.hom_equal_on_all {
                    "equal"
                } else {
                    "differ"
                },
                report.violation
            );
            Ok(Outcome::ok(to_value(&report), summary))
        }
        Command::Selftest { seed } => {
            let report = selftest::run(seed, limits);
            let failed: Vec<_> = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name)
                .collect();
            let summary = if failed.is_empty() {
                format!("{} checks passed", report.checks.len())
            } else {
                format!("failed: {}", failed.join(", "))
            };
            let code = if report.passed { 0 } else { 1 };
            Ok(Outcome {
                body: to_value(&report),
                code,
                summary,
            })
        }
    }
}

fn emit(body: &Value, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(body)
    } else {
        serde_json::to_string(body)
    };
    println!("{}", text.expect("JSON values serialize"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // Help and version requests.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let failure = Failure::Usage(e.render().to_string().trim().to_string());
            emit(&failure.body(), false);
            return ExitCode::from(failure.code());
        }
    };
    let pretty = cli.global.pretty;
    let result = limits(&cli.global).and_then(|l| execute(cli.command, &l));
    match result {
        Ok(outcome) => {
            emit(&outcome.body, pretty);
            if pretty {
                eprintln!("{}", outcome.summary);
            }
            ExitCode::from(outcome.code)
        }
        Err(failure) => {
            emit(&failure.body(), pretty);
            if pretty {
                eprintln!(
                    "error: {}",
                    failure.body()["message"].as_str().unwrap_or_default()
                );
            }
            ExitCode::from(failure.code())
        }
    }
}

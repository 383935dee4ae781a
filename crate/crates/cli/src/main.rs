use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use trumpkit::catalysis::{
    catalyst_from_copies, combine_catalysts, lift_catalyst, multicopy_catalyst_scan, search_catalyst,
    CatalystCert,
};
use trumpkit::majorize::majorizes;
use trumpkit::mlocc::{classify_membership, classify_usefulness, scan_mk, DEFAULT_K_MAX};
use trumpkit::renyi::{parse_alpha_grid, r_filter, Alpha};
use trumpkit::{Error, ProbVec, Rational, Scalar, ScalarBackend};

/// Decide convertibility of probability vectors under majorization, with
/// multiple copies, or with a catalyst.
///
/// Vectors are JSON arrays of decimal or fraction strings, e.g.
/// `["0.4", "0.4", "0.1", "0.1"]`. Exit status: 0 positive verdict,
/// 1 negative verdict, 2 input error.
#[derive(Debug, Parser)]
#[command(name = "trumpkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Debug, Args)]
struct RunConfig {
    /// Arithmetic backend.
    #[arg(long, value_enum, default_value_t = BackendArg::Exact, global = true)]
    backend: BackendArg,
    /// Comparison tolerance for the float backend.
    #[arg(long, default_value_t = ScalarBackend::DEFAULT_EPS, global = true)]
    eps: f64,
    /// Largest copy count tried when scanning for multi-copy conversions.
    #[arg(long, default_value_t = DEFAULT_K_MAX, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    k_max: u32,
    /// Largest number of catalyst copies tried by `catalyst scan`.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..), global = true)]
    m_max: u32,
    /// Comma-separated Renyi orders; `inf` and `-inf` are accepted.
    #[arg(long, global = true)]
    alpha_grid: Option<String>,
    /// Candidate budget for `catalyst search`.
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    budget: u64,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Rescale input vectors to unit mass instead of rejecting them.
    #[arg(long, global = true)]
    normalize: bool,
    /// Include the prefix positions checked during catalyst verification.
    #[arg(long, global = true)]
    transcript: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
}

#[derive(Debug, Args)]
struct Pair {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-copy check x ≺ y.
    Majorize(Pair),
    /// Search k = 1..k-max for x^⊗k ≺ y^⊗k.
    Mlocc(Pair),
    /// Construct, search for, or check catalysts.
    #[command(subcommand)]
    Catalyst(CatalystCommand),
    /// Whether multiple copies or catalysts help for target y; with --x also
    /// locate x relative to the multi-copy set and run the Renyi filter.
    Classify {
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        x: Option<PathBuf>,
    },
    /// Look for a Renyi order at which x has less entropy than y.
    Rfilter(Pair),
}

#[derive(Debug, Subcommand)]
enum CatalystCommand {
    /// Build the catalyst implied by x^⊗k ≺ y^⊗k (k found by scanning if omitted).
    Build {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: Option<u32>,
    },
    /// Tensor the k-copy construction with a catalyst for the k-copy pair.
    Combine {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        #[arg(long)]
        c: PathBuf,
    },
    /// Raise a catalyst for x → y to a catalyst for x^⊗n → y^⊗n.
    Lift {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        c: PathBuf,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        copies: u32,
    },
    /// Heuristic search for a catalyst of the given dimension.
    Search {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        dim_c: u64,
    },
    /// For m = 1..m-max, whether x ⊗ c^⊗m ≺ y ⊗ c^⊗m.
    Scan {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        c: PathBuf,
    },
}

/// A verdict to print and its exit status.
struct Outcome {
    value: Value,
    text: String,
    positive: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results always serialize")
}

struct Session {
    config: RunConfig,
    backend: ScalarBackend,
}

impl Session {
    fn load<S: Scalar>(&self, path: &Path) -> anyhow::Result<ProbVec<S>> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        ProbVec::from_json(&text, self.config.normalize, self.backend)
            .with_context(|| format!("parsing {}", path.display()))
    }

    fn pair<S: Scalar>(&self, p: &Pair) -> anyhow::Result<(ProbVec<S>, ProbVec<S>)> {
        Ok((self.load(&p.x)?, self.load(&p.y)?))
    }

    fn grid(&self) -> anyhow::Result<Vec<Alpha>> {
        match &self.config.alpha_grid {
            Some(csv) => Ok(parse_alpha_grid(csv)?),
            None => Ok(Alpha::default_grid()),
        }
    }

    fn cert<S: Scalar>(&self, cert: CatalystCert<S>) -> Outcome {
        let cert = if self.config.transcript {
            cert
        } else {
            cert.without_transcript()
        };
        let mut text = format!(
            "catalyst ({} entries): {}\nsource: {}\nverified: {}\ndimension as constructed: {}",
            cert.catalyst.dim(),
            cert.catalyst,
            to_value(&cert.source),
            cert.verified,
            cert.dim_bound_ok
        );
        for c in &cert.transcript {
            text.push_str(&format!("\n  l={}: {} vs {}", c.l, c.ex, c.ey));
        }
        Outcome {
            value: to_value(&cert),
            positive: cert.verified,
            text,
        }
    }

    fn run<S: Scalar>(&self, command: &Command) -> anyhow::Result<Outcome> {
        match command {
            Command::Majorize(p) => {
                let (x, y) = self.pair::<S>(p)?;
                let r = majorizes(&x, &y)?;
                let mut text = format!("verdict: {}", to_value(&r.verdict).as_str().unwrap_or_default());
                if let Some(v) = &r.first_violation {
                    text.push_str(&format!("\nfirst violation at l={}: {} > {}", v.l, v.ex, v.ey));
                }
                if !r.equality_indices.is_empty() {
                    let eq: Vec<String> = r.equality_indices.iter().map(|l| l.to_string()).collect();
                    text.push_str(&format!("\nequality at l = {}", eq.join(", ")));
                }
                Ok(Outcome {
                    value: to_value(&r),
                    positive: r.holds(),
                    text,
                })
            }
            Command::Mlocc(p) => {
                let (x, y) = self.pair::<S>(p)?;
                let scan = scan_mk(&x, &y, self.config.k_max)?;
                let status = match (scan.first_success, scan.filtered) {
                    (Some(_), _) => "member",
                    (None, true) => "not_member",
                    (None, false) => "unknown",
                };
                let mut value = to_value(&scan);
                value["status"] = json!(status);
                let mut text = String::new();
                for (k, v) in &scan.results {
                    text.push_str(&format!("k={k}: {}\n", to_value(v).as_str().unwrap_or_default()));
                }
                text.push_str(&match scan.first_success {
                    Some(k) => format!("first success at k={k}"),
                    None if scan.filtered => "not_member: endpoint conditions fail".to_string(),
                    None => format!("unknown: no success up to k={}", scan.k_max),
                });
                Ok(Outcome {
                    value,
                    positive: scan.first_success.is_some(),
                    text,
                })
            }
            Command::Catalyst(sub) => self.catalyst::<S>(sub),
            Command::Classify { y, x } => {
                let y = self.load::<S>(y)?;
                let verdict = classify_usefulness(&y);
                let mut value = json!({ "usefulness": to_value(&verdict) });
                let mut text = format!("useful: {}", verdict.useful);
                if let (Some(l), Some(w)) = (verdict.witness_l, &verdict.witness_x) {
                    text.push_str(&format!("\nsplit index: {l}\nwitness: {w}"));
                }
                if let Some(x) = x {
                    let x = self.load::<S>(x)?;
                    let filter = r_filter(&x, &y, &self.grid()?)?;
                    let membership = classify_membership(&x, &y, self.config.k_max)?;
                    text.push_str(&format!(
                        "\nrenyi filter: {}\nmulti-copy membership (k <= {}): {}",
                        to_value(&filter.status).as_str().unwrap_or_default(),
                        self.config.k_max,
                        to_value(&membership).as_str().unwrap_or_default()
                    ));
                    value["rfilter"] = to_value(&filter);
                    value["membership"] = to_value(&membership);
                }
                Ok(Outcome {
                    value,
                    positive: true,
                    text,
                })
            }
            Command::Rfilter(p) => {
                let (x, y) = self.pair::<S>(p)?;
                let v = r_filter(&x, &y, &self.grid()?)?;
                let mut text = format!(
                    "status: {}\nmode: {}",
                    to_value(&v.status).as_str().unwrap_or_default(),
                    to_value(&v.mode).as_str().unwrap_or_default()
                );
                if let Some(a) = v.violating_alpha {
                    text.push_str(&format!("\nviolating alpha: {a}"));
                }
                Ok(Outcome {
                    value: to_value(&v),
                    positive: !v.violated(),
                    text,
                })
            }
        }
    }

    fn catalyst<S: Scalar>(&self, sub: &CatalystCommand) -> anyhow::Result<Outcome> {
        match sub {
            CatalystCommand::Build { pair, k } => {
                let (x, y) = self.pair::<S>(pair)?;
                let k = match k {
                    Some(k) => *k,
                    None => match scan_mk(&x, &y, self.config.k_max)?.first_success {
                        Some(k) => k,
                        None => {
                            return Ok(Outcome {
                                value: json!({ "found": false, "k_max": self.config.k_max }),
                                text: format!("no k <= {} with x^⊗k ≺ y^⊗k", self.config.k_max),
                                positive: false,
                            })
                        }
                    },
                };
                Ok(self.cert(catalyst_from_copies(&x, &y, k)?))
            }
            CatalystCommand::Combine { pair, k, c } => {
                let (x, y) = self.pair::<S>(pair)?;
                let c = self.load::<S>(c)?;
                Ok(self.cert(combine_catalysts(&x, &y, *k, &c)?))
            }
            CatalystCommand::Lift { pair, c, copies } => {
                let (x, y) = self.pair::<S>(pair)?;
                let c = self.load::<S>(c)?;
                Ok(self.cert(lift_catalyst(&x, &y, &c, *copies)?))
            }
            CatalystCommand::Search { pair, dim_c } => {
                let (x, y) = self.pair::<S>(pair)?;
                let dim = usize::try_from(*dim_c).context("--dim-c too large")?;
                match search_catalyst(&x, &y, dim, self.config.budget, self.config.seed)? {
                    Some(cert) => Ok(self.cert(cert)),
                    None => Ok(Outcome {
                        value: json!({ "found": false, "budget": self.config.budget, "seed": self.config.seed }),
                        text: format!(
                            "no catalyst of dimension {dim} found within {} candidates (not a proof of absence)",
                            self.config.budget
                        ),
                        positive: false,
                    }),
                }
            }
            CatalystCommand::Scan { pair, c } => {
                let (x, y) = self.pair::<S>(pair)?;
                let c = self.load::<S>(c)?;
                let scan = multicopy_catalyst_scan(&x, &y, &c, self.config.m_max)?;
                let text = scan
                    .iter()
                    .map(|(m, ok)| format!("m={m}: {ok}"))
                    .collect::<Vec<_>>()
                    .join("\n");
                let value = Value::Object(scan.iter().map(|(m, ok)| (m.to_string(), json!(ok))).collect());
                Ok(Outcome {
                    value,
                    positive: scan.values().any(|ok| *ok),
                    text,
                })
            }
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<Outcome> {
    let backend = match cli.config.backend {
        BackendArg::Exact => ScalarBackend::Exact,
        BackendArg::Float => ScalarBackend::float(cli.config.eps)?,
    };
    let session = Session {
        config: cli.config,
        backend,
    };
    if session.config.k_max > 64 {
        bail!("--k-max above 64 is not supported");
    }
    match backend {
        ScalarBackend::Exact => session.run::<Rational>(&cli.command),
        ScalarBackend::Float { eps } => {
            eprintln!("note: float backend (eps = {eps:e}); comparisons within eps count as equal, results are heuristic");
            session.run::<f64>(&cli.command)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_output = cli.config.json;
    match execute(cli) {
        Ok(outcome) => {
            if json_output {
                println!("{}", outcome.value);
            } else {
                println!("{}", outcome.text);
            }
            ExitCode::from(if outcome.positive { 0 } else { 1 })
        }
        Err(err) => {
            // an unmet precondition is a negative answer, not bad input
            if let Some(Error::Precondition(reason)) = err.downcast_ref::<Error>() {
                if json_output {
                    println!("{}", json!({ "precondition_failed": reason }));
                } else {
                    println!("precondition not met: {reason}");
                }
                return ExitCode::from(1);
            }
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

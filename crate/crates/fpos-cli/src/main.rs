//! Batch command-line front end for the fpos library.
//!
//! Every subcommand reads its inputs from flags, writes JSON (or CSV where
//! the output is tabular) to stdout, and reports errors as a single line on
//! stderr. Exit codes: 0 on success, 2 for parameter errors, 3 for
//! resource or certification errors. Randomized subcommands take `--seed`;
//! when it is omitted an entropy seed is drawn and echoed to stderr so the
//! run can be reproduced.

use std::io::Write;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use fpos::bayes::{self, Prior};
use fpos::normal;
use fpos::oracle::{self, EnumerationBudget};
use fpos::sampler::{self, SimulationRequest};
use fpos::tank;
use fpos::{Error, OrderStatSpec, Population, RankSet};

/// Largest population size for the exact big-rational mode.
const EXACT_POP_LIMIT: u64 = 64;

#[derive(Parser)]
#[command(
    name = "fpos",
    version,
    about = "Order statistics under sampling without replacement: exact distributions, \
             samplers, and population-size estimators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Probability mass function of the k-th order statistic
    Pmf {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        pop_size: u64,
        /// Evaluate at a single point instead of the whole support
        #[arg(long)]
        x: Option<u64>,
        /// Exact rational arithmetic (N <= 64); masses print as p/q
        #[arg(long)]
        exact: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Cumulative distribution function over the support
    Cdf {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        pop_size: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Mean, variance, skewness and kurtosis
    Moments {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        pop_size: u64,
        /// Exact rational mean and variance (N <= 64)
        #[arg(long)]
        exact: bool,
    },
    /// Draw from the distribution via the beta-binomial mixture
    Sample {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        pop_size: u64,
        #[arg(long)]
        count: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Joint mass of a vector of order statistics
    JointPmf {
        /// Comma-separated strictly increasing ranks, e.g. 1,3,4
        #[arg(long, value_delimiter = ',')]
        ranks: Vec<u64>,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        pop_size: u64,
        /// Comma-separated observation vector, one value per rank
        #[arg(long, value_delimiter = ',')]
        x: Vec<u64>,
    },
    /// Simulate order-statistic vectors from a population file (CSV out)
    Simulate {
        /// Population file: one decimal value per line
        #[arg(long)]
        population: String,
        /// Sample size n
        #[arg(long)]
        size: u64,
        /// Comma-separated ranks; output columns follow this order
        #[arg(long, value_delimiter = ',')]
        ranks: Vec<u64>,
        #[arg(long)]
        sims: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimate the population size from an observed order statistic
    Estimate {
        #[arg(long)]
        n: u64,
        /// Observed sample maximum (uses k = n)
        #[arg(long, conflicts_with_all = ["rank", "x"])]
        max: Option<u64>,
        /// Rank of the observed order statistic
        #[arg(long, requires = "x")]
        rank: Option<u64>,
        /// Observed value of the order statistic
        #[arg(long)]
        x: Option<u64>,
        /// Also report the estimator variance at this population size
        #[arg(long, conflicts_with = "plugin_variance")]
        variance_at: Option<f64>,
        /// Also report the variance with the estimate plugged in as N
        #[arg(long)]
        plugin_variance: bool,
    },
    /// Posterior distribution of the population size
    Posterior {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        x: u64,
        /// Prior: uniform:a,b | pointmass:N0 | powerlaw:alpha,Nmin
        #[arg(long)]
        prior: String,
        /// Certified truncation tolerance for the normalizing sum
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Normal-approximation error grid over all (k, n) (CSV out)
    Heatmap {
        #[arg(long = "N")]
        pop_size: u64,
    },
    /// Time the rank-based sampler against sample-and-sort
    Bench {
        #[arg(long = "N")]
        pop_size: u64,
        #[arg(long)]
        n: u64,
        #[arg(long, value_delimiter = ',')]
        ranks: Vec<u64>,
        #[arg(long)]
        sims: u64,
        #[arg(long)]
        reps: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Brute-force enumeration of exact mass tables (debugging aid)
    Oracle {
        /// Univariate rank; use --ranks for a joint table
        #[arg(long, conflicts_with = "ranks")]
        k: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        ranks: Option<Vec<u64>>,
        #[arg(long)]
        n: u64,
        #[arg(long = "N")]
        pop_size: u64,
        /// Subset budget for the enumeration
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("bad arguments");
            eprintln!("error: {}", line.strip_prefix("error: ").unwrap_or(line));
            std::process::exit(2);
        }
    };
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).expect("write to stdout");
}

fn emit_json(value: &serde_json::Value) {
    emit(&format!("{value}\n"));
}

fn fraction(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s: u64 = rand::rng().random();
            eprintln!("seed: {s}");
            s
        }
    }
}

fn check_exact_limit(pop_size: u64) -> Result<(), Error> {
    if pop_size > EXACT_POP_LIMIT {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("--exact supports N <= {EXACT_POP_LIMIT}, got {pop_size}"),
        });
    }
    Ok(())
}

fn parse_prior(text: &str) -> Result<Prior, Error> {
    let bad = |reason: String| Error::InvalidParameter {
        name: "prior",
        reason,
    };
    let (kind, args) = text
        .split_once(':')
        .ok_or_else(|| bad(format!("expected kind:args, got {text:?}")))?;
    let parts: Vec<&str> = args.split(',').collect();
    let int = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| bad(format!("not an integer: {s:?}")))
    };
    let real = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(format!("not a number: {s:?}")))
    };
    match (kind, parts.as_slice()) {
        ("uniform", [a, b]) => Prior::uniform(int(a)?, int(b)?),
        ("pointmass", [at]) => Prior::point_mass(int(at)?),
        ("powerlaw", [alpha, min]) => Prior::power_law(real(alpha)?, int(min)?),
        _ => Err(bad(format!(
            "unknown prior {text:?}; use uniform:a,b, pointmass:N0 or powerlaw:alpha,Nmin"
        ))),
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Pmf {
            k,
            n,
            pop_size,
            x,
            exact,
            format,
        } => {
            let spec = OrderStatSpec::new(k, n, pop_size)?;
            if exact {
                check_exact_limit(pop_size)?;
            }
            let support: Vec<u64> = match x {
                Some(x) => vec![x],
                None => spec.support().collect(),
            };
            match (exact, format) {
                (true, Format::Json) => {
                    let mass: Vec<String> = support
                        .iter()
                        .map(|&x| fraction(&fpos::exact::pmf(&spec, x)))
                        .collect();
                    emit_json(&json!({ "support": support, "mass": mass }));
                }
                (false, Format::Json) => {
                    let mass: Vec<f64> = support.iter().map(|&x| spec.pmf(x)).collect();
                    emit_json(&json!({ "support": support, "mass": mass }));
                }
                (exact, Format::Csv) => {
                    let mut out = String::from("x,mass\n");
                    for &x in &support {
                        if exact {
                            out.push_str(&format!(
                                "{x},{}\n",
                                fraction(&fpos::exact::pmf(&spec, x))
                            ));
                        } else {
                            out.push_str(&format!("{x},{}\n", spec.pmf(x)));
                        }
                    }
                    emit(&out);
                }
            }
        }
        Command::Cdf {
            k,
            n,
            pop_size,
            format,
        } => {
            let spec = OrderStatSpec::new(k, n, pop_size)?;
            let support: Vec<u64> = spec.support().collect();
            let table = spec.pmf_table();
            let mut cum = 0.0;
            let cdf: Vec<f64> = table
                .iter()
                .map(|p| {
                    cum += p;
                    cum.min(1.0)
                })
                .collect();
            match format {
                Format::Json => emit_json(&json!({ "support": support, "cdf": cdf })),
                Format::Csv => {
                    let mut out = String::from("x,cdf\n");
                    for (x, c) in support.iter().zip(&cdf) {
                        out.push_str(&format!("{x},{c}\n"));
                    }
                    emit(&out);
                }
            }
        }
        Command::Moments {
            k,
            n,
            pop_size,
            exact,
        } => {
            let spec = OrderStatSpec::new(k, n, pop_size)?;
            if exact {
                check_exact_limit(pop_size)?;
                emit_json(&json!({
                    "mean": fraction(&fpos::exact::mean(&spec)),
                    "variance": fraction(&fpos::exact::variance(&spec)),
                }));
            } else {
                let m = spec.moments();
                emit_json(&json!({
                    "mean": m.mean,
                    "variance": m.variance,
                    "skewness": m.skewness,
                    "kurtosis": m.kurtosis,
                }));
            }
        }
        Command::Sample {
            k,
            n,
            pop_size,
            count,
            seed,
        } => {
            let spec = OrderStatSpec::new(k, n, pop_size)?;
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed));
            let samples = spec.sample(&mut rng, count as usize);
            emit_json(&json!({ "samples": samples }));
        }
        Command::JointPmf {
            ranks,
            n,
            pop_size,
            x,
        } => {
            let ranks = RankSet::new(ranks, n, pop_size)?;
            let pmf = fpos::joint::joint_pmf(&ranks, &x)?;
            emit_json(&json!({ "ranks": ranks.ranks(), "x": x, "pmf": pmf }));
        }
        Command::Simulate {
            population,
            size,
            ranks,
            sims,
            seed,
        } => {
            let text =
                std::fs::read_to_string(&population).map_err(|e| Error::InvalidParameter {
                    name: "population",
                    reason: format!("{population}: {e}"),
                })?;
            let req = SimulationRequest::new(Population::parse(&text)?, size, ranks, sims)?;
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed));
            emit(&sampler::sample_order_stats(&req, &mut rng).to_csv());
        }
        Command::Estimate {
            n,
            max,
            rank,
            x,
            variance_at,
            plugin_variance,
        } => {
            let result = match (max, rank, x) {
                (Some(x_max), None, None) => tank::estimate_from_max(n, x_max)?,
                (None, Some(k), Some(x_k)) => tank::estimate_from_kth(n, k, x_k)?,
                _ => {
                    return Err(Error::InvalidParameter {
                        name: "estimate",
                        reason: "supply either --max X or --rank K --x X".into(),
                    })
                }
            };
            let hypothesized = if plugin_variance {
                Some(result.estimate)
            } else {
                variance_at
            };
            let mut out = json!({
                "estimate": result.estimate,
                "k": result.k,
                "n": result.n,
                "rounded": result.rounded(),
            });
            if let Some(at) = hypothesized {
                let variance = tank::estimator_variance(at, result.n, result.k)?;
                out["variance_at"] = json!(at);
                out["variance"] = json!(variance);
                out["standard_error"] = json!(variance.sqrt());
            }
            emit_json(&out);
        }
        Command::Posterior {
            n,
            k,
            x,
            prior,
            tol,
        } => {
            let prior = parse_prior(&prior)?;
            let table = bayes::posterior_summary(n, k, x, &prior, tol)?;
            emit_json(&json!({
                "support_min": table.support_min,
                "masses": table.masses,
                "mean": table.mean,
                "variance": table.variance,
                "error_bound": table.error_bound,
                "truncation_point": table.truncation_point,
            }));
        }
        Command::Heatmap { pop_size } => {
            emit(&normal::heatmap(pop_size)?.to_csv());
        }
        Command::Bench {
            pop_size,
            n,
            ranks,
            sims,
            reps,
            seed,
        } => {
            let values: Vec<f64> = (1..=pop_size).map(|v| v as f64).collect();
            let req = SimulationRequest::new(Population::new(values)?, n, ranks, sims)?;
            let mut rng = ChaCha8Rng::seed_from_u64(resolve_seed(seed));
            let report = sampler::benchmark(&req, reps, &mut rng);
            emit_json(&serde_json::to_value(&report).expect("report serializes"));
        }
        Command::Oracle {
            k,
            ranks,
            n,
            pop_size,
            budget,
        } => {
            let budget = EnumerationBudget {
                max_subsets: budget,
            };
            match (k, ranks) {
                (Some(k), None) => {
                    let spec = OrderStatSpec::new(k, n, pop_size)?;
                    let table = oracle::enumerate_pmf(&spec, &budget)?;
                    let support: Vec<u64> = table.keys().copied().collect();
                    let mass: Vec<String> = table.values().map(fraction).collect();
                    emit_json(&json!({ "support": support, "mass": mass }));
                }
                (None, Some(ranks)) => {
                    let ranks = RankSet::new(ranks, n, pop_size)?;
                    let table = oracle::enumerate_joint_pmf(&ranks, &budget)?;
                    let points: Vec<Vec<u64>> = table.keys().cloned().collect();
                    let mass: Vec<String> = table.values().map(fraction).collect();
                    emit_json(&json!({ "points": points, "mass": mass }));
                }
                _ => {
                    return Err(Error::InvalidParameter {
                        name: "oracle",
                        reason: "supply exactly one of --k or --ranks".into(),
                    })
                }
            }
        }
    }
    Ok(())
}

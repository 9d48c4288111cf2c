//! Command-line front end. [`dispatch`] does all the work so the binary stays
//! a one-liner and the behaviour is testable in-process.

use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::lazyline::{Budget, LazyLine};
use crate::meander::{count_meanders, sample_meander};
use crate::noncrossing::NcMatching;
use crate::realizer::{realize_at, rewire, FiniteEnergyCase, RealizeRequest};
use crate::render::{render_svg, RenderStyle, Subject};
use crate::stats::{
    boundary_growth, circle_density_mc, circle_density_series, closure_report, trifurcation_scan,
    witness_window, ScanEnv,
};
use crate::window::{decompose, EndProfile, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircleMode {
    Series,
    Mc,
}

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "arches",
    version,
    about = "Random arc configurations on the integer line"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Worker threads for seed- and enumeration-parallel work.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Leave out version and wall time so records compare byte for byte.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_meta: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sites of a window of the random line.
    Sample {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        lo: i64,
        #[arg(long, default_value_t = 40)]
        len: usize,
    },
    /// Cluster of one site, explored within a budget.
    Trace {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        origin: i64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: u64,
        #[arg(long, default_value_t = 100_000)]
        halfwidth: u64,
        /// Include the vertex list in the JSON record.
        #[arg(long)]
        vertices: bool,
        /// Instead of one trace, report how often the cluster closes over this many seeds.
        #[arg(long)]
        closure_seeds: Option<u64>,
    },
    /// Density of circles, from the exact series or by simulation.
    Circles {
        #[arg(long, value_enum, default_value_t = CircleMode::Series)]
        mode: CircleMode,
        #[arg(long, default_value_t = 1_000_000)]
        kmax: usize,
        /// First seed; replicas use consecutive seeds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 8)]
        replicas: u64,
        #[arg(long, default_value_t = 1_000_000)]
        len: usize,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        offset: i64,
        #[arg(long, default_value_t = crate::stats::DEFAULT_MARGIN)]
        margin: usize,
    },
    /// Number of dangling ends of [1, N] for several N.
    Ends {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        replicas: u64,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "10,100,1000,10000,100000,1000000"
        )]
        lengths: Vec<usize>,
    },
    /// Meanders: exhaustive counts and rejection sampling.
    Meander {
        #[command(subcommand)]
        action: MeanderCommand,
    },
    /// Window realising a given end profile and boundary matching.
    Realize {
        #[arg(long)]
        len: usize,
        /// End counts "a+,b+,a-,b-".
        #[arg(long, value_parser = parse_profile)]
        profile: EndProfile,
        /// Boundary matching "1-4,2-3" on the ends in cyclic order.
        #[arg(long, value_parser = parse_matching, default_value = "")]
        sigma: NcMatching,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        lo: i64,
    },
    /// Reconnect two dangling ends of a window.
    Rewire {
        /// Window JSON, or @FILE to read it from a file.
        #[arg(long)]
        window: String,
        /// Zero-based end indices in cyclic order.
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// Exhaustive finite-energy check on random instances.
    FiniteEnergy {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        len: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Scan a window for trifurcation points.
    Trifurcations {
        #[arg(long)]
        seed: Option<u64>,
        /// Scan the built-in witness configuration instead of the random line.
        #[arg(long)]
        witness: bool,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        lo: i64,
        #[arg(long, default_value_t = 10_000)]
        len: usize,
        #[arg(long, default_value_t = 100_000)]
        max_steps: u64,
        #[arg(long, default_value_t = 100_000)]
        halfwidth: u64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeanderCommand {
    Count {
        #[arg(long)]
        order: usize,
        /// Allow orders above the soft limit.
        #[arg(long)]
        allow_large: bool,
    },
    Sample {
        #[arg(long)]
        order: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_tries: u64,
    },
}

fn parse_profile(s: &str) -> Result<EndProfile, String> {
    s.parse::<EndProfile>().map_err(|e| e.to_string())
}

fn parse_matching(s: &str) -> Result<NcMatching, String> {
    s.parse::<NcMatching>().map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub subcommand: String,
    pub params: Value,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    pub result: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(Cli::command().error(kind, msg).render().to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(format!("error: {e}\n"))
}

/// What a subcommand produced before formatting.
enum Payload {
    Json {
        seeds: Vec<u64>,
        result: Value,
    },
    Table {
        seeds: Vec<u64>,
        result: Value,
        csv: String,
    },
    Svg(String),
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serialises")
}

fn csv_of<T: Serialize>(rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(runtime)?;
    }
    let bytes = w.into_inner().map_err(runtime)?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn seed_range(seed: u64, replicas: u64) -> Vec<u64> {
    (0..replicas).map(|i| seed.wrapping_add(i)).collect()
}

fn svg(subject: Subject<'_>) -> Result<Payload, Failure> {
    render_svg(subject, &RenderStyle::default())
        .map(Payload::Svg)
        .map_err(runtime)
}

fn read_window(arg: &str) -> Result<Window, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| runtime(format!("{path}: {e}")))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| {
        usage(
            ErrorKind::ValueValidation,
            format!("invalid value for '--window': {e}"),
        )
    })
}

#[derive(Serialize)]
struct EnergyRow {
    trial: usize,
    subset: String,
    event_size: usize,
    p_event: String,
    p_modified: String,
    factor: String,
    bound_ok: bool,
}

fn run(cli: &Cli) -> Result<Payload, Failure> {
    let fmt = cli.format;
    let wants_svg = fmt == Format::Svg;
    match &cli.command {
        Command::Sample { seed, lo, len } => {
            let w = LazyLine::new(*seed).window(*lo, *len);
            if wants_svg {
                return svg(Subject::Window(&w));
            }
            Ok(Payload::Json {
                seeds: vec![*seed],
                result: to_value(&w),
            })
        }
        Command::Trace {
            seed,
            origin,
            max_steps,
            halfwidth,
            vertices,
            closure_seeds,
        } => {
            let budget = Budget::new(*max_steps, *halfwidth);
            if let Some(k) = closure_seeds {
                let seeds = seed_range(*seed, *k);
                let report = closure_report(&seeds, *origin, budget);
                return Ok(Payload::Json {
                    seeds,
                    result: to_value(&report),
                });
            }
            let t = LazyLine::new(*seed).trace_cluster(*origin, budget);
            if wants_svg {
                return svg(Subject::Trace(&t));
            }
            let mut result = to_value(&t.to_record(*seed, *vertices));
            result["budget"] = to_value(&budget);
            Ok(Payload::Json {
                seeds: vec![*seed],
                result,
            })
        }
        Command::Circles {
            mode,
            kmax,
            seed,
            replicas,
            len,
            offset,
            margin,
        } => match mode {
            CircleMode::Series => Ok(Payload::Json {
                seeds: vec![],
                result: to_value(&circle_density_series(*kmax)),
            }),
            CircleMode::Mc => {
                let Some(seed) = seed else {
                    return Err(usage(
                        ErrorKind::MissingRequiredArgument,
                        "'--mode mc' requires '--seed <SEED>'",
                    ));
                };
                if *len < 2 + 2 * margin {
                    return Err(usage(
                        ErrorKind::ValueValidation,
                        "'--len' must exceed twice '--margin'",
                    ));
                }
                let seeds = seed_range(*seed, *replicas);
                let est = circle_density_mc(&seeds, *len, *offset, *margin);
                Ok(Payload::Json {
                    seeds,
                    result: to_value(&est),
                })
            }
        },
        Command::Ends {
            seed,
            replicas,
            lengths,
        } => {
            if lengths.contains(&0) {
                return Err(usage(
                    ErrorKind::ValueValidation,
                    "'--lengths' must be positive",
                ));
            }
            let seeds = seed_range(*seed, *replicas);
            let rows = boundary_growth(lengths, &seeds);
            let csv = csv_of(&rows)?;
            Ok(Payload::Table {
                seeds,
                result: to_value(&rows),
                csv,
            })
        }
        Command::Meander { action } => match action {
            MeanderCommand::Count { order, allow_large } => {
                eprintln!("counting meanders of order {order}");
                let count = count_meanders(*order, *allow_large).map_err(runtime)?;
                Ok(Payload::Json {
                    seeds: vec![],
                    result: json!({ "order": order, "count": count.to_string().parse::<Value>().expect("integer") }),
                })
            }
            MeanderCommand::Sample {
                order,
                seed,
                max_tries,
            } => {
                let s = sample_meander(*order, *seed, *max_tries).map_err(runtime)?;
                if wants_svg {
                    return svg(Subject::Meander(&s.diagram));
                }
                let mut result = to_value(&s.diagram);
                result["tries"] = json!(s.tries);
                result["cycle"] = to_value(&s.diagram.cycle());
                Ok(Payload::Json {
                    seeds: vec![*seed],
                    result,
                })
            }
        },
        Command::Realize {
            len,
            profile,
            sigma,
            lo,
        } => {
            let req = RealizeRequest::new(*len, *profile, sigma.clone()).map_err(runtime)?;
            let w = realize_at(&req, *lo).map_err(runtime)?;
            if wants_svg {
                return svg(Subject::Window(&w));
            }
            let d = decompose(&w);
            Ok(Payload::Json {
                seeds: vec![],
                result: json!({ "window": w, "profile": d.profile().to_string(), "sigma": d.sigma.to_string() }),
            })
        }
        Command::Rewire { window, i, j } => {
            let w = read_window(window)?;
            let before = decompose(&w);
            let out = rewire(&w, *i, *j).map_err(runtime)?;
            if wants_svg {
                return svg(Subject::Window(&out));
            }
            let after = decompose(&out);
            Ok(Payload::Json {
                seeds: vec![],
                result: json!({
                    "window": out,
                    "profile": after.profile().to_string(),
                    "sigma_before": before.sigma.to_string(),
                    "sigma_after": after.sigma.to_string(),
                }),
            })
        }
        Command::FiniteEnergy { seed, len, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut rows = Vec::with_capacity(*trials);
            for trial in 0..*trials {
                let case = FiniteEnergyCase::sample(*len, &mut rng).map_err(runtime)?;
                let r = case.verify().map_err(runtime)?;
                rows.push(EnergyRow {
                    trial,
                    subset: case
                        .subset
                        .iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    event_size: case.event.len(),
                    p_event: r.p_event.to_string(),
                    p_modified: r.p_modified.to_string(),
                    factor: r.factor.to_string(),
                    bound_ok: r.bound_ok,
                });
            }
            let csv = csv_of(&rows)?;
            let all_ok = rows.iter().all(|r| r.bound_ok);
            Ok(Payload::Table {
                seeds: vec![*seed],
                result: json!({ "all_ok": all_ok, "trials": rows }),
                csv,
            })
        }
        Command::Trifurcations {
            seed,
            witness,
            lo,
            len,
            max_steps,
            halfwidth,
        } => {
            if *len == 0 {
                return Err(usage(
                    ErrorKind::ValueValidation,
                    "'--len' must be positive",
                ));
            }
            let budget = Budget::new(*max_steps, *halfwidth);
            let hi = lo + *len as i64 - 1;
            let (seeds, report) = if *witness {
                let w = witness_window();
                (
                    vec![],
                    trifurcation_scan(ScanEnv::Frozen(&w), *lo, hi, budget),
                )
            } else {
                let Some(seed) = seed else {
                    return Err(usage(
                        ErrorKind::MissingRequiredArgument,
                        "'--seed <SEED>' is required unless '--witness' is given",
                    ));
                };
                let mut line = LazyLine::new(*seed);
                (
                    vec![*seed],
                    trifurcation_scan(ScanEnv::Line(&mut line), *lo, hi, budget),
                )
            };
            Ok(Payload::Json {
                seeds,
                result: to_value(&report),
            })
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Sample { .. } => "sample",
        Command::Trace { .. } => "trace",
        Command::Circles { .. } => "circles",
        Command::Ends { .. } => "ends",
        Command::Meander {
            action: MeanderCommand::Count { .. },
        } => "meander count",
        Command::Meander {
            action: MeanderCommand::Sample { .. },
        } => "meander sample",
        Command::Realize { .. } => "realize",
        Command::Rewire { .. } => "rewire",
        Command::FiniteEnergy { .. } => "finite-energy",
        Command::Trifurcations { .. } => "trifurcations",
    }
}

fn supports(c: &Command, f: Format) -> bool {
    match f {
        Format::Json => true,
        Format::Csv => matches!(c, Command::Ends { .. } | Command::FiniteEnergy { .. }),
        Format::Svg => matches!(
            c,
            Command::Sample { .. }
                | Command::Trace {
                    closure_seeds: None,
                    ..
                }
                | Command::Realize { .. }
                | Command::Rewire { .. }
                | Command::Meander {
                    action: MeanderCommand::Sample { .. }
                }
        ),
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    if !supports(&cli.command, cli.format) {
        return Err(usage(
            ErrorKind::InvalidValue,
            format!(
                "'--format {}' is not available for '{}'",
                to_value(&cli.format).as_str().unwrap_or_default(),
                subcommand_name(&cli.command)
            ),
        ));
    }
    let start = Instant::now();
    let payload = match cli.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(runtime)?;
            pool.install(|| run(cli))?
        }
        None => run(cli)?,
    };
    let (seeds, result) = match payload {
        Payload::Svg(s) => return Ok(s),
        Payload::Table { csv, .. } if cli.format == Format::Csv => return Ok(csv),
        Payload::Table { seeds, result, .. } | Payload::Json { seeds, result } => (seeds, result),
    };
    let record = RunRecord {
        subcommand: subcommand_name(&cli.command).to_string(),
        params: to_value(cli),
        seeds,
        version: (!cli.no_meta).then(|| env!("CARGO_PKG_VERSION").to_string()),
        wall_time_ms: (!cli.no_meta).then(|| start.elapsed().as_millis() as u64),
        result,
    };
    let mut text = serde_json::to_string_pretty(&record).map_err(runtime)?;
    text.push('\n');
    Ok(text)
}

/// Parses `args` (program name first) and runs the subcommand. Exit code 0
/// on success, 2 on usage errors, 1 on runtime errors.
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match execute(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Outcome {
                    code: 0,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: format!("error: {}: {e}\n", path.display()),
                },
            },
            None => Outcome {
                code: 0,
                stdout: text,
                stderr: String::new(),
            },
        },
        Err(Failure::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: msg,
        },
        Err(Failure::Runtime(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: msg,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &str) -> Outcome {
        dispatch(std::iter::once("arches").chain(args.split_whitespace()))
    }

    fn result(o: &Outcome) -> Value {
        assert_eq!(o.code, 0, "{}", o.stderr);
        serde_json::from_str::<Value>(&o.stdout).unwrap()["result"].clone()
    }

    #[test]
    fn meander_count_three() {
        assert_eq!(result(&run_args("meander count --order 3"))["count"], 8);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args("frobnicate").code, 2);
        let o = run_args("circles --mode mc");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("--seed"));
        let o = run_args("realize --len 4 --profile 1,2");
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("--profile"));
        assert_eq!(run_args("sample --seed 1 --format csv").code, 2);
    }

    #[test]
    fn runtime_errors_exit_one() {
        let o = run_args("realize --len 3 --profile 1,0,0,0 --sigma 1-2");
        assert_eq!(o.code, 1, "{}", o.stderr);
    }

    #[test]
    fn realize_reports_what_was_asked() {
        let r = result(&run_args(
            "realize --len 10 --profile 2,0,1,1 --sigma 1-4,2-3",
        ));
        assert_eq!(r["profile"], "2,0,1,1");
        assert_eq!(r["sigma"], "1-4,2-3");
    }

    #[test]
    fn no_meta_is_byte_stable() {
        let a = run_args("sample --seed 4 --len 10 --no-meta");
        assert_eq!(a, run_args("sample --seed 4 --len 10 --no-meta"));
        assert!(!a.stdout.contains("wall_time"));
    }
}

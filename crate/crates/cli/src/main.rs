use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kernel_extend::extension::{compact_support_lp, jodeit_bound, jodeit_piecewise, lp_extend, parse_rational, q_range, DEFAULT_R_SCHEDULE};
use kernel_extend::function::{extend, periodization_sup, periodize, poisson_constant};
use kernel_extend::io;
use kernel_extend::measure::{transfer, wiener_energy, SpectrumSamples, DEFAULT_LAMBDAS, EPS_ATOM};
use kernel_extend::norms::{block_sum_criterion, classify_s1, classify_s2, fiber_norms, DEFAULT_SEED};
use kernel_extend::{Error, FunctionSpec, GridConfig, GridFunction, SequenceSpec};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "kernel-extend", version, about = "Extend integer multipliers to the line through summability kernels")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Window half-width L of the sample grid
    #[arg(long, global = true)]
    halfwidth: Option<f64>,
    /// Sample spacing
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Lattice truncation N
    #[arg(long, global = true)]
    truncation: Option<u64>,
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Seed for the randomized norm estimator
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output stem: writes <stem>.json and, where grid data exists, <stem>.csv
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// W(ξ) = Σ φ(n) Λ(ξ − n) on the grid
    Extend {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        kernel: PathBuf,
    },
    /// Periodization supremum δ_Λ
    Delta {
        #[arg(long)]
        kernel: PathBuf,
    },
    /// Membership test for a kernel class
    CheckKernel {
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, value_enum, default_value_t = Class::S2)]
        class: Class,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Block count for the block-sum criterion
        #[arg(long, default_value_t = 64)]
        blocks: u64,
    },
    /// Transfer a torus measure to the line
    Transfer {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        kernel: PathBuf,
    },
    /// Transfer, then recover atom masses from the transform by Wiener averages
    Atoms {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        kernel: PathBuf,
        /// Extra probe locations
        #[arg(long = "at", value_delimiter = ',', allow_hyphen_values = true)]
        at: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long, default_value_t = EPS_ATOM)]
        eps: f64,
    },
    /// Transfer, then estimate the atomic energy Σ|μ{y}|²
    Energy {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long, value_delimiter = ',')]
        lambdas: Option<Vec<f64>>,
        #[arg(long, default_value_t = EPS_ATOM)]
        eps: f64,
    },
    /// Exponent range q for a given p
    Qrange {
        /// Rational exponent such as 4/3 or 2.5
        #[arg(long)]
        p: String,
    },
    /// l_p extension with Abel regularization
    ExtendLp {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        s: PathBuf,
        #[arg(long)]
        p: String,
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<f64>>,
        /// Use the compact-support scheme (1 < p < 2)
        #[arg(long)]
        compact: bool,
    },
    /// Piecewise extension (with --order) or the τ-bound construction
    Jodeit {
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        s: Option<PathBuf>,
        #[arg(long)]
        order: Option<u8>,
    },
    /// Σ Ŝ(x + n) against S(0)
    Poisson {
        #[arg(long)]
        s: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    S1,
    S2,
    Fiber,
    Block,
}

enum Failure {
    Input(String),
    Rejected(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Structural(_) => Failure::Input(e.to_string()),
            other => Failure::Rejected(other),
        }
    }
}

struct Output {
    json: Value,
    csv: Option<String>,
    text: Option<String>,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_function(path: &Path) -> Result<FunctionSpec, Failure> {
    io::parse_function_spec(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_sequence(path: &Path) -> Result<SequenceSpec, Failure> {
    io::parse_sequence_spec(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_measure(path: &Path) -> Result<kernel_extend::measure::TorusMeasure, Failure> {
    io::parse_measure_spec(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn grid_summary(w: &GridFunction) -> Value {
    json!({
        "origin": w.origin,
        "step": w.step,
        "samples": w.len(),
        "max_abs": w.max_abs(),
        "tail_bound": w.tail_bound,
    })
}

fn grid_config(c: &Common) -> Result<GridConfig, Failure> {
    let mut g = GridConfig::default();
    if let Some(v) = c.halfwidth {
        g.halfwidth = v;
    }
    if let Some(v) = c.step {
        g.step = v;
    }
    if let Some(v) = c.truncation {
        g.truncation = v;
    }
    if let Some(v) = c.tolerance {
        g.tolerance = v;
    }
    g.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(g)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let grid = grid_config(&cli.common)?;
    let seed = cli.common.seed;
    let out = match &cli.command {
        Command::Extend { phi, kernel } => {
            let phi = read_sequence(phi)?;
            let k = read_function(kernel)?;
            let w = extend(&phi, &k, &grid)?;
            Output {
                json: json!({ "command": "extend", "grid": to_value(&grid), "w": grid_summary(&w) }),
                csv: Some(io::grid_to_csv(&w)),
                text: None,
            }
        }
        Command::Delta { kernel } => {
            let k = read_function(kernel)?;
            let d = periodization_sup(&k, &grid)?;
            let samples = periodize(&k, &grid)?;
            Output {
                json: json!({
                    "command": "delta",
                    "delta": d.delta,
                    "tail": d.tail_bound,
                    "argmax": d.argmax,
                    "certified": d.certified(),
                }),
                csv: Some(io::grid_to_csv(&samples)),
                text: None,
            }
        }
        Command::CheckKernel { kernel, class, p, blocks } => {
            let k = read_function(kernel)?;
            let report = match class {
                Class::S2 => classify_s2(&k, &grid)?,
                Class::S1 => classify_s1(&k, &grid)?,
                Class::Fiber => fiber_norms(&k, *p, &grid, seed)?,
                Class::Block => block_sum_criterion(&k, *p, &grid, *blocks, seed)?,
            };
            Output {
                json: to_value(&report),
                csv: None,
                text: None,
            }
        }
        Command::Transfer { measure, kernel } => {
            let nu = read_measure(measure)?;
            let k = read_function(kernel)?;
            let mu = transfer(&nu, &k, &grid)?;
            let spectrum = mu.fourier_transform(grid.tolerance)?;
            let rows = grid.points().into_iter().map(|x| (x, spectrum.eval(x)));
            Output {
                json: io::line_measure_to_value(&mu),
                csv: Some(io::samples_to_csv(mu.tail_bound, rows)),
                text: None,
            }
        }
        Command::Atoms {
            measure,
            kernel,
            at,
            lambdas,
            eps,
        } => {
            let nu = read_measure(measure)?;
            let k = read_function(kernel)?;
            let mu = transfer(&nu, &k, &grid)?;
            let spectrum = mu.fourier_transform(grid.tolerance)?;
            let lambdas = lambdas.clone().unwrap_or(DEFAULT_LAMBDAS.to_vec());
            let samples = SpectrumSamples::new(|x| spectrum.eval(x), &lambdas)?;
            let mut ys: Vec<f64> = mu.atoms.iter().map(|a| a.y).collect();
            ys.extend(at);
            let rows: Vec<Value> = ys
                .iter()
                .map(|&y| {
                    let est = samples.atom(y, *eps);
                    let exact = mu.atom_at(y);
                    json!({
                        "y": y,
                        "closed_form": [exact.re, exact.im],
                        "wiener": [est.estimate.re, est.estimate.im],
                        "difference": (est.estimate - exact).norm(),
                        "converged": est.converged,
                    })
                })
                .collect();
            Output {
                json: json!({ "command": "atoms", "line_measure": io::line_measure_to_value(&mu), "lambdas": lambdas, "atoms": rows }),
                csv: Some(io::samples_to_csv(
                    mu.tail_bound,
                    grid.points().into_iter().map(|x| (x, spectrum.eval(x))),
                )),
                text: None,
            }
        }
        Command::Energy {
            measure,
            kernel,
            lambdas,
            eps,
        } => {
            let nu = read_measure(measure)?;
            let k = read_function(kernel)?;
            let mu = transfer(&nu, &k, &grid)?;
            let spectrum = mu.fourier_transform(grid.tolerance)?;
            let lambdas = lambdas.clone().unwrap_or(DEFAULT_LAMBDAS.to_vec());
            let est = wiener_energy(|x| spectrum.eval(x), &lambdas, *eps)?;
            let closed: f64 = mu.atoms.iter().map(|a| a.weight.norm_sqr()).sum();
            Output {
                json: json!({
                    "command": "energy",
                    "closed_form_energy": closed,
                    "estimate": to_value(&est),
                }),
                csv: None,
                text: None,
            }
        }
        Command::Qrange { p } => {
            let r = q_range(parse_rational(p)?)?;
            Output {
                json: to_value(&r),
                csv: None,
                text: Some(r.to_string()),
            }
        }
        Command::ExtendLp { phi, s, p, r, compact } => {
            let phi = read_sequence(phi)?;
            let s = read_function(s)?;
            let pr = parse_rational(p)?;
            let pf = *pr.numer() as f64 / *pr.denom() as f64;
            let result = if *compact {
                compact_support_lp(&phi, &s, pf, &grid)?
            } else {
                let sched = r.clone().unwrap_or(DEFAULT_R_SCHEDULE.to_vec());
                lp_extend(&phi, &s, pf, &sched, &grid)?
            };
            Output {
                json: to_value(&result),
                csv: Some(io::grid_to_csv(&result.w)),
                text: None,
            }
        }
        Command::Jodeit { phi, s, order } => {
            let phi = read_sequence(phi)?;
            match (order, s) {
                (Some(o), _) => {
                    let w = jodeit_piecewise(&phi, *o, &grid)?;
                    Output {
                        json: json!({ "command": "jodeit", "order": o, "w": grid_summary(&w) }),
                        csv: Some(io::grid_to_csv(&w)),
                        text: None,
                    }
                }
                (None, Some(s)) => {
                    let s = read_function(s)?;
                    let result = jodeit_bound(&phi, &s, &grid)?;
                    Output {
                        json: to_value(&result),
                        csv: Some(io::grid_to_csv(&result.w)),
                        text: None,
                    }
                }
                (None, None) => return Err(Failure::Input("jodeit needs --order or --s".into())),
            }
        }
        Command::Poisson { s } => {
            let s = read_function(s)?;
            let report = poisson_constant(&s, &grid)?;
            Output {
                json: to_value(&report),
                csv: None,
                text: None,
            }
        }
    };
    Ok(out)
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, out: Output) -> Result<(), Failure> {
    let json = io::to_json_string(&out.json);
    if let Some(text) = &out.text {
        println!("{text}");
    }
    match &cli.common.output {
        Some(stem) => {
            write_file(&stem.with_extension("json"), &json)?;
            if let Some(csv) = &out.csv {
                write_file(&stem.with_extension("csv"), csv)?;
            }
        }
        None if out.text.is_none() => print!("{json}"),
        None => {}
    }
    Ok(())
}

fn threads_from_env() {
    if let Some(n) = std::env::var("KERNEL_EXTEND_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    threads_from_env();
    match run(&cli).and_then(|out| emit(&cli, out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Rejected(e)) => {
            eprintln!("rejected: {e}");
            let body = match &e {
                Error::Precondition {
                    reason,
                    report: Some(report),
                } => json!({ "rejected": reason, "report": to_value(report.as_ref()) }),
                other => json!({ "rejected": other.to_string() }),
            };
            print!("{}", io::to_json_string(&body));
            ExitCode::from(2)
        }
    }
}

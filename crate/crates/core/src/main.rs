// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use bqf_sieve::character::{average_exceptional_report_with, ExceptionalGrid};
use bqf_sieve::forms::{delta_f, enumerate_class_set, Form};
use bqf_sieve::lattice::{count_congruence, local_density_report, EllipseWindow};
use bqf_sieve::sieve::{offset_li, pi_f, selberg_upper_bound, theorem_rhs, SieveParams};
use bqf_sieve::verify::{
    family_summary_line, fmt_float, run_sweep, summary_line, write_csv, write_family_csv,
    write_family_json, write_json, x_rule_from_exponent, y_rule_from_exponent, Rule, SweepConfig,
    Theorem,
};
use bqf_sieve::Error;

#[derive(Parser)]
#[command(name = "bqf", version, about = "Primes represented by binary quadratic forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a form and print its discriminant, delta and primitivity.
    Reduce {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
        #[arg(long)]
        json: bool,
    },
    /// List the reduced primitive forms of discriminant -D.
    Classgroup {
        d: u64,
        #[arg(long)]
        json: bool,
    },
    /// Lattice counts in f <= x, optionally split by a squarefree modulus.
    Count {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
        x: f64,
        #[arg(long, default_value_t = 1)]
        ell: u64,
        #[arg(long)]
        json: bool,
    },
    /// Primes represented by f up to x, or in (x - y, x].
    Pif {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
        x: f64,
        #[arg(long)]
        interval: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// One Selberg sieve run plus the theorem bounds at (x, y).
    Sieve {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
        x: f64,
        /// Interval length; defaults to x.
        #[arg(long)]
        y: Option<f64>,
        /// Override the sifting variable.
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        phi: f64,
        #[arg(long, default_value_t = 0.2)]
        epsilon: f64,
    },
    /// Check a theorem bound on every reduced form with D <= Q.
    Verify(VerifyArgs),
    /// Character-sum error functionals averaged over D <= Q.
    Family {
        #[arg(long = "Q", default_value_t = 100)]
        q: u64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Lower end of the x-grid is this constant times D^epsilon.
        #[arg(long, default_value_t = 1.0)]
        c_low: f64,
        #[arg(long, default_value_t = 1.0e6)]
        x_cap: f64,
        #[arg(long, default_value_t = 12)]
        points: u32,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long = "Q", default_value_t = 200)]
    q: u64,
    #[arg(long, default_value = "1.1")]
    theorem: String,
    #[arg(long, default_value_t = 0.25)]
    phi: f64,
    #[arg(long, default_value_t = 0.2)]
    epsilon: f64,
    /// x = (D^(1+4 phi) / a)^e; defaults to 1 + epsilon for 1.1.
    #[arg(long)]
    x_exp: Option<f64>,
    /// y = (x D^(1+4 phi) / a)^e; defaults to 1/2 + epsilon.
    #[arg(long)]
    y_exp: Option<f64>,
    /// Expression in D, a, b, c, h, phi, eps; overrides --x-exp.
    #[arg(long)]
    x_rule: Option<String>,
    /// Expression that may also use x; overrides --y-exp.
    #[arg(long)]
    y_rule: Option<String>,
    #[arg(long, default_value_t = 1.0e7)]
    xmax: f64,
    #[arg(long, default_value_t = 1.5)]
    slack: f64,
    /// Total wall-clock budget in milliseconds; later rows are skipped.
    #[arg(long)]
    time_budget: Option<u64>,
    /// Worker threads; BQF_THREADS takes precedence.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Evaluate a seeded random subset of this many rows.
    #[arg(long)]
    sample: Option<usize>,
    /// Override the sifting variable in every sieve run.
    #[arg(long)]
    z: Option<f64>,
    /// Record per-row wall time instead of 0.
    #[arg(long)]
    timings: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Invalid(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(v: &serde_json::Value) -> io::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)
}

fn jobs_from_env(default: usize) -> Result<usize, Failure> {
    match std::env::var("BQF_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Invalid(format!("BQF_THREADS = {v:?} is not a positive integer"))),
        Err(_) => Ok(default),
    }
}

fn verify(args: VerifyArgs) -> Result<bool, Failure> {
    let theorem: Theorem = args.theorem.parse()?;
    let eps = args.epsilon;
    let x_rule = match (&args.x_rule, args.x_exp) {
        (Some(src), _) => Rule::parse(src)?,
        (None, Some(e)) => x_rule_from_exponent(e),
        (None, None) => match theorem {
            Theorem::Uniform => x_rule_from_exponent(1.0 + eps),
            // smallest x for which the default y stays below x, with room
            Theorem::ShortInterval => x_rule_from_exponent((0.5 + eps) / (0.5 - eps).max(0.05) + 0.1),
        },
    };
    let y_rule = match (&args.y_rule, args.y_exp) {
        (Some(src), _) => Rule::parse(src)?,
        (None, Some(e)) => y_rule_from_exponent(e),
        (None, None) => match theorem {
            Theorem::Uniform => Rule::parse("x")?,
            Theorem::ShortInterval => y_rule_from_exponent(0.5 + eps),
        },
    };
    let config = SweepConfig {
        q: args.q,
        theorem,
        x_rule,
        y_rule,
        phi: args.phi,
        epsilon: eps,
        x_max: args.xmax,
        slack: args.slack,
        time_budget_ms: args.time_budget,
        seed: args.seed,
        sample: args.sample,
        jobs: jobs_from_env(args.jobs)?,
        z_override: args.z,
        timings: args.timings,
    };
    let outcome = run_sweep(&config)?;
    let mut out = output(&args.out)?;
    match args.format {
        Format::Csv => {
            write_csv(&outcome, &mut out)?;
            eprintln!("{}", summary_line(&outcome.summary));
        }
        Format::Json => write_json(&outcome, &config, &mut out)?,
    }
    out.flush()?;
    Ok(!outcome.failed())
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Reduce { a, b, c, json } => {
            let f = Form::new(a, b, c)?;
            let r = f.reduce();
            let delta = delta_f(&r)?;
            if json {
                print_json(&json!({ "input": f, "reduced": r, "D": r.d(), "delta_f": delta, "primitive": r.is_primitive() }))?;
            } else {
                println!("{r} D={} delta={} primitive={}", r.d(), fmt_float(delta), r.is_primitive() as u8);
            }
        }
        Command::Classgroup { d, json } => {
            let set = enumerate_class_set(d)?;
            if json {
                print_json(&serde_json::to_value(&set).expect("serializable"))?;
            } else {
                println!("D={} h={} w={}", set.d, set.h, set.w);
                for f in &set.forms {
                    println!("{f} delta={}", fmt_float(delta_f(f)?));
                }
            }
        }
        Command::Count { a, b, c, x, ell, json } => {
            let f = Form::new(a, b, c)?;
            let window = EllipseWindow::new(f, x)?;
            let counts = count_congruence(&window, ell)?;
            let report = if f.is_primitive() { Some(local_density_report(&window, ell)?) } else { None };
            if json {
                print_json(&json!({ "counts": counts, "labels": counts.labels(), "density": report }))?;
            } else {
                println!("|A|={}", bqf_sieve::lattice::count_a(&window));
                for (label, n) in counts.labels() {
                    println!("|{label}|={n}");
                }
                if let Some(r) = report {
                    println!(
                        "main={} residual={} envelope={} constant={}",
                        fmt_float(r.main),
                        fmt_float(r.residual),
                        fmt_float(r.envelope),
                        fmt_float(r.constant)
                    );
                }
            }
        }
        Command::Pif { a, b, c, x, interval, json } => {
            let f = Form::new(a, b, c)?;
            let y = interval.unwrap_or(x);
            if !(0.0..=x).contains(&y) {
                return Err(Failure::Invalid(format!("interval y = {y} must lie in [0, x]")));
            }
            let count = pi_f(&f, x)? - if y < x { pi_f(&f, x - y)? } else { 0 };
            let r = f.reduce();
            let set = enumerate_class_set(r.d())?;
            let delta = delta_f(&r)?;
            let li = if x >= 2.0 { offset_li(x)? - if x - y >= 2.0 { offset_li(x - y)? } else { 0.0 } } else { 0.0 };
            let main = delta * li / set.h as f64;
            if json {
                print_json(&json!({ "form": f, "x": x, "y": y, "count": count, "h": set.h, "delta_f": delta, "main": main }))?;
            } else {
                println!("{count}");
                println!("main={} delta={} h={}", fmt_float(main), fmt_float(delta), set.h);
            }
        }
        Command::Sieve { a, b, c, x, y, z, phi, epsilon } => {
            let f = Form::new(a, b, c)?;
            let y = y.unwrap_or(x);
            let mut params = SieveParams::new(f, x, y, phi, epsilon)?;
            if let Some(z) = z {
                params = params.with_z(z);
            }
            let report = selberg_upper_bound(&params)?;
            let bounds = match theorem_rhs(&f, x, y, phi, epsilon) {
                Ok(b) => serde_json::to_value(b).expect("serializable"),
                Err(Error::VacuousBound(msg)) => json!({ "vacuous": msg }),
                Err(e) => return Err(e.into()),
            };
            print_json(&json!({ "sieve": report, "theorem": bounds }))?;
        }
        Command::Verify(args) => return verify(args),
        Command::Family { q, epsilon, c_low, x_cap, points, format, out } => {
            let grid = ExceptionalGrid { points, c_low, x_cap };
            let report = average_exceptional_report_with(q, epsilon, grid)?;
            let mut w = output(&out)?;
            match format {
                Format::Csv => {
                    write_family_csv(&report, &mut w)?;
                    eprintln!("{}", family_summary_line(&report));
                }
                Format::Json => write_family_json(&report, &mut w)?,
            }
            w.flush()?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

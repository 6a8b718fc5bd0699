// SPDX-License-Identifier: Apache-2.0

//! Sweeps over every reduced form of every discriminant up to `Q`,
//! comparing exact prime counts and sieve bounds with the explicit
//! theorem bounds, and the CSV / JSON writers for the results.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use evalexpr::{build_operator_tree, ContextWithMutableVariables, HashMapContext, Node, Value};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{sieve_primes, PrimeTable};
use crate::character::{family, ExceptionalReport};
use crate::error::{Error, Result};
use crate::forms::{delta_f, enumerate_class_set, Form};
use crate::sieve::{
    check_phi, pi_f_interval_with, pi_f_with, selberg_upper_bound, theorem_rhs_with_h, SieveParams,
};

pub const SCHEMA: &str = "bqf-sieve/1";

/// Which bound a sweep checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// `pi_f(x) < 4/(1 - theta) delta x / (h log x)`
    #[serde(rename = "1.1")]
    Uniform,
    /// `pi_f(x) - pi_f(x - y) < 2/(1 - theta') delta y / (h log y)`
    #[serde(rename = "1.3")]
    ShortInterval,
}

impl std::str::FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1.1" => Ok(Theorem::Uniform),
            "1.3" => Ok(Theorem::ShortInterval),
            _ => Err(Error::InvalidArgument(format!("unknown theorem {s:?}; expected 1.1 or 1.3"))),
        }
    }
}

/// An arithmetic expression in `D, a, b, c, h, phi, eps` (and `x` for the
/// `y` rule).
#[derive(Debug, Clone)]
pub struct Rule {
    source: String,
    tree: Node,
}

impl Rule {
    pub fn parse(source: &str) -> Result<Self> {
        let tree = build_operator_tree(source)
            .map_err(|e| Error::InvalidArgument(format!("rule {source:?}: {e}")))?;
        Ok(Rule { source: source.to_string(), tree })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, vars: &[(&str, f64)]) -> Result<f64> {
        let mut ctx = HashMapContext::new();
        for &(k, v) in vars {
            ctx.set_value(k.to_string(), Value::Float(v)).expect("fresh context");
        }
        let v = self
            .tree
            .eval_number_with_context(&ctx)
            .map_err(|e| Error::InvalidArgument(format!("rule {:?}: {e}", self.source)))?;
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("rule {:?} gave {v}", self.source)));
        }
        Ok(v)
    }
}

/// `x = (D^(1 + 4 phi) / a)^e`
pub fn x_rule_from_exponent(e: f64) -> Rule {
    Rule::parse(&format!("(D^(1 + 4 * phi) / a)^({e})")).expect("well-formed")
}

/// `y = (x D^(1 + 4 phi) / a)^e`, never above `x`.
pub fn y_rule_from_exponent(e: f64) -> Rule {
    Rule::parse(&format!("min(x, (x * D^(1 + 4 * phi) / a)^({e}))")).expect("well-formed")
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub q: u64,
    pub theorem: Theorem,
    pub x_rule: Rule,
    pub y_rule: Rule,
    pub phi: f64,
    pub epsilon: f64,
    pub x_max: f64,
    /// Multiplier absorbing the `1 + O(log log x / log x)` factor.
    pub slack: f64,
    /// Rows whose start exceeds this many milliseconds are skipped.
    pub time_budget_ms: Option<u64>,
    pub seed: u64,
    /// Keep a random subset of this many rows.
    pub sample: Option<usize>,
    pub jobs: usize,
    /// Replaces the sifting variable `z` of every sieve run.
    pub z_override: Option<f64>,
    pub timings: bool,
}

impl SweepConfig {
    /// The defaults of the uniform-bound sweep: `phi = 1/4`, `eps = 0.2`,
    /// `x = (D^2 / a)^(1 + eps)` capped at `10^7`, slack 1.5.
    pub fn uniform(q: u64) -> Self {
        let (phi, epsilon) = (0.25, 0.2);
        SweepConfig {
            q,
            theorem: Theorem::Uniform,
            x_rule: x_rule_from_exponent(1.0 + epsilon),
            y_rule: Rule::parse("x").expect("well-formed"),
            phi,
            epsilon,
            x_max: 1.0e7,
            slack: 1.5,
            time_budget_ms: None,
            seed: 0,
            sample: None,
            jobs: 1,
            z_override: None,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_phi(self.phi)?;
        if self.q < 3 {
            return Err(Error::InvalidArgument(format!("Q = {} must be >= 3", self.q)));
        }
        if !(self.epsilon > 0.0) || !(self.x_max >= 2.0) || !(self.slack > 0.0) || self.jobs == 0 {
            return Err(Error::InvalidArgument("epsilon, xmax, slack and jobs must be positive".into()));
        }
        if self.x_max > 1.0e9 {
            return Err(Error::InvalidArgument(format!("xmax = {} exceeds 1e9", self.x_max)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// The theorem's range condition fails at the chosen `x`, `y`.
    OutOfRange,
    /// `theta >= 1` or `theta' >= 1`.
    Vacuous,
    /// Time budget exhausted before the row started.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub d: u64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub h: usize,
    pub delta_f: f64,
    pub x: f64,
    pub y: f64,
    pub z: Option<f64>,
    pub exact_count: Option<u64>,
    pub sifted_count: Option<u64>,
    pub upper_bound: Option<f64>,
    pub rhs_theorem: Option<f64>,
    pub theta_or_theta_prime: Option<f64>,
    /// `exact_count / rhs_theorem`
    pub ratio: Option<f64>,
    /// `exact_count / (delta y / (h log y))`
    pub density_ratio: Option<f64>,
    pub sieve_valid: Option<bool>,
    pub pass: Option<bool>,
    pub status: RowStatus,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub total: usize,
    pub evaluated: usize,
    pub passes: usize,
    pub failures: usize,
    pub sieve_violations: usize,
    pub skipped: usize,
    pub partial: bool,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub summary: SweepSummary,
}

impl SweepOutcome {
    pub fn failed(&self) -> bool {
        self.summary.failures > 0 || self.summary.sieve_violations > 0
    }
}

struct Job {
    form: Form,
    h: usize,
    x: f64,
    y: f64,
}

fn plan(config: &SweepConfig) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    for d in family(config.q)?.members {
        let set = enumerate_class_set(d)?;
        for f in &set.forms {
            let vars = [
                ("D", d as f64),
                ("a", f.a as f64),
                ("b", f.b as f64),
                ("c", f.c as f64),
                ("h", set.h as f64),
                ("phi", config.phi),
                ("eps", config.epsilon),
            ];
            let x = config.x_rule.eval(&vars)?.min(config.x_max).ceil();
            let mut y_vars = vars.to_vec();
            y_vars.push(("x", x));
            let y = match config.theorem {
                Theorem::Uniform => x,
                Theorem::ShortInterval => config.y_rule.eval(&y_vars)?.min(x).floor(),
            };
            if !(x >= 2.0) || !(y >= 2.0) {
                return Err(Error::InvalidArgument(format!(
                    "rules give x = {x}, y = {y} for {f}; both must be >= 2"
                )));
            }
            jobs.push(Job { form: *f, h: set.h, x, y });
        }
    }
    if let Some(n) = config.sample {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        jobs.shuffle(&mut rng);
        jobs.truncate(n);
    }
    Ok(jobs)
}

fn run_job(job: &Job, config: &SweepConfig, table: &PrimeTable) -> Result<SweepRecord> {
    let f = job.form;
    let delta = delta_f(&f)?;
    let mut rec = SweepRecord {
        d: f.d(),
        a: f.a,
        b: f.b,
        c: f.c,
        h: job.h,
        delta_f: delta,
        x: job.x,
        y: job.y,
        z: None,
        exact_count: None,
        sifted_count: None,
        upper_bound: None,
        rhs_theorem: None,
        theta_or_theta_prime: None,
        ratio: None,
        density_ratio: None,
        sieve_valid: None,
        pass: None,
        status: RowStatus::Ok,
        runtime_ms: 0,
    };
    let bounds = match theorem_rhs_with_h(&f, job.h, job.x, job.y, config.phi, config.epsilon) {
        Ok(b) => b,
        Err(Error::VacuousBound(_)) => {
            rec.status = RowStatus::Vacuous;
            return Ok(rec);
        }
        Err(e) => return Err(e),
    };
    let (rhs, theta, range_ok) = match config.theorem {
        Theorem::Uniform => (bounds.rhs_11, bounds.theta, bounds.range_ok_11),
        Theorem::ShortInterval => (bounds.rhs_13, bounds.theta_prime, bounds.range_ok_13),
    };
    rec.rhs_theorem = Some(rhs);
    rec.theta_or_theta_prime = Some(theta);
    if !range_ok {
        rec.status = RowStatus::OutOfRange;
        return Ok(rec);
    }

    let exact = match config.theorem {
        Theorem::Uniform => pi_f_with(table, &f, job.x)?,
        Theorem::ShortInterval => pi_f_interval_with(table, &f, job.x, job.y)?,
    };
    let mut params = SieveParams::new(f, job.x, job.y, config.phi, config.epsilon)?;
    if let Some(z) = config.z_override {
        params = params.with_z(z);
    }
    let sieve = selberg_upper_bound(&params)?;
    rec.z = Some(params.z);
    rec.exact_count = Some(exact);
    rec.sifted_count = Some(sieve.exact_interval_count);
    rec.upper_bound = Some(sieve.upper_bound);
    rec.sieve_valid = Some(sieve.upper_bound >= sieve.exact_interval_count as f64);
    rec.ratio = Some(exact as f64 / rhs);
    rec.density_ratio = Some(exact as f64 / (delta * job.y / (job.h as f64 * job.y.ln())));
    rec.pass = Some((exact as f64) < config.slack * rhs);
    Ok(rec)
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let jobs = plan(config)?;
    let top = jobs.iter().map(|j| j.x as u64).max().unwrap_or(2).max(2);
    let table = sieve_primes(top)?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let mut records = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                if let Some(budget) = config.time_budget_ms {
                    if start.elapsed().as_millis() as u64 > budget {
                        let f = job.form;
                        return Ok(SweepRecord {
                            d: f.d(),
                            a: f.a,
                            b: f.b,
                            c: f.c,
                            h: job.h,
                            delta_f: delta_f(&f)?,
                            x: job.x,
                            y: job.y,
                            z: None,
                            exact_count: None,
                            sifted_count: None,
                            upper_bound: None,
                            rhs_theorem: None,
                            theta_or_theta_prime: None,
                            ratio: None,
                            density_ratio: None,
                            sieve_valid: None,
                            pass: None,
                            status: RowStatus::Skipped,
                            runtime_ms: 0,
                        });
                    }
                }
                let t = Instant::now();
                let mut rec = run_job(job, config, &table)?;
                if config.timings {
                    rec.runtime_ms = t.elapsed().as_millis() as u64;
                }
                Ok(rec)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by(|p, q| {
        (p.d, p.a, p.b, p.c)
            .cmp(&(q.d, q.a, q.b, q.c))
            .then(p.x.total_cmp(&q.x))
    });
    let summary = summarize(&records);
    Ok(SweepOutcome { records, summary })
}

pub fn summarize(records: &[SweepRecord]) -> SweepSummary {
    let passes = records.iter().filter(|r| r.pass == Some(true)).count();
    let failures = records.iter().filter(|r| r.pass == Some(false)).count();
    let skipped = records.iter().filter(|r| r.status == RowStatus::Skipped).count();
    SweepSummary {
        total: records.len(),
        evaluated: passes + failures,
        passes,
        failures,
        sieve_violations: records.iter().filter(|r| r.sieve_valid == Some(false)).count(),
        skipped,
        partial: skipped > 0,
        max_ratio: records.iter().filter_map(|r| r.ratio.filter(|_| r.pass.is_some())).fold(0.0, f64::max),
    }
}

/// Ten significant digits, shortest form; `NA` for non-finite values.
pub fn fmt_float(v: f64) -> String {
    if !v.is_finite() {
        return "NA".into();
    }
    let rounded: f64 = format!("{v:.9e}").parse().expect("own output");
    format!("{rounded}")
}

fn round10(v: f64) -> f64 {
    if v.is_finite() {
        format!("{v:.9e}").parse().expect("own output")
    } else {
        v
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_else(|| "NA".into())
}

fn flag(b: bool) -> String {
    (b as u8).to_string()
}

pub const CSV_HEADER: &str = "D,a,b,c,h,delta_f,x,y,z,exact_count,sifted_count,upper_bound,rhs_theorem,theta_or_theta_prime,ratio,density_ratio,sieve_valid,pass,status,runtime_ms";

fn status_str(s: RowStatus) -> &'static str {
    match s {
        RowStatus::Ok => "ok",
        RowStatus::OutOfRange => "out_of_range",
        RowStatus::Vacuous => "vacuous",
        RowStatus::Skipped => "skipped",
    }
}

pub fn write_csv(outcome: &SweepOutcome, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in &outcome.records {
        let fields = [
            r.d.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            r.c.to_string(),
            r.h.to_string(),
            fmt_float(r.delta_f),
            fmt_float(r.x),
            fmt_float(r.y),
            opt(r.z, fmt_float),
            opt(r.exact_count, |v| v.to_string()),
            opt(r.sifted_count, |v| v.to_string()),
            opt(r.upper_bound, fmt_float),
            opt(r.rhs_theorem, fmt_float),
            opt(r.theta_or_theta_prime, fmt_float),
            opt(r.ratio, fmt_float),
            opt(r.density_ratio, fmt_float),
            opt(r.sieve_valid, flag),
            opt(r.pass, flag),
            status_str(r.status).to_string(),
            r.runtime_ms.to_string(),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn summary_line(s: &SweepSummary) -> String {
    format!(
        "total={} evaluated={} passes={} failures={} sieve_violations={} skipped={} partial={} max_ratio={}",
        s.total,
        s.evaluated,
        s.passes,
        s.failures,
        s.sieve_violations,
        s.skipped,
        flag(s.partial),
        fmt_float(s.max_ratio)
    )
}

#[derive(Serialize)]
struct JsonConfig<'a> {
    q: u64,
    theorem: Theorem,
    x_rule: &'a str,
    y_rule: &'a str,
    phi: f64,
    epsilon: f64,
    x_max: f64,
    slack: f64,
    seed: u64,
    sample: Option<usize>,
    z_override: Option<f64>,
}

fn round_record(r: &SweepRecord) -> SweepRecord {
    SweepRecord {
        delta_f: round10(r.delta_f),
        x: round10(r.x),
        y: round10(r.y),
        z: r.z.map(round10),
        upper_bound: r.upper_bound.map(round10),
        rhs_theorem: r.rhs_theorem.map(round10),
        theta_or_theta_prime: r.theta_or_theta_prime.map(round10),
        ratio: r.ratio.map(round10),
        density_ratio: r.density_ratio.map(round10),
        ..r.clone()
    }
}

pub fn write_json(outcome: &SweepOutcome, config: &SweepConfig, out: &mut impl Write) -> std::io::Result<()> {
    let rows: Vec<SweepRecord> = outcome.records.iter().map(round_record).collect();
    let mut summary = outcome.summary.clone();
    summary.max_ratio = round10(summary.max_ratio);
    let doc = serde_json::json!({
        "schema": SCHEMA,
        "config": JsonConfig {
            q: config.q,
            theorem: config.theorem,
            x_rule: config.x_rule.source(),
            y_rule: config.y_rule.source(),
            phi: config.phi,
            epsilon: config.epsilon,
            x_max: config.x_max,
            slack: config.slack,
            seed: config.seed,
            sample: config.sample,
            z_override: config.z_override,
        },
        "summary": summary,
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

pub const FAMILY_CSV_HEADER: &str = "D,worst_e0,worst_e1,violates_e,log_derivative,violates_l";

pub fn write_family_csv(report: &ExceptionalReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{FAMILY_CSV_HEADER}")?;
    for v in &report.verdicts {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            v.d,
            fmt_float(v.worst_e0),
            fmt_float(v.worst_e1),
            flag(v.violates_e),
            fmt_float(v.log_derivative),
            flag(v.violates_l)
        )?;
    }
    Ok(())
}

pub fn family_summary_line(r: &ExceptionalReport) -> String {
    format!(
        "Q={} epsilon={} total={} violators_e={} (E0 {}, E1 {}) violators_l={} fraction_e={} fraction_l={}",
        r.q,
        fmt_float(r.epsilon),
        r.total,
        r.violators_e,
        r.violators_e0,
        r.violators_e1,
        r.violators_l,
        fmt_float(r.fraction_e),
        fmt_float(r.fraction_l)
    )
}

pub fn write_family_json(r: &ExceptionalReport, out: &mut impl Write) -> std::io::Result<()> {
    let doc = serde_json::json!({ "schema": SCHEMA, "family": r });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

/// Class numbers for every member of the family, keyed by `D`.
pub fn class_numbers(q: u64) -> Result<HashMap<u64, usize>> {
    family(q)?
        .members
        .into_iter()
        .map(|d| Ok((d, enumerate_class_set(d)?.h)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(1.0 / 3.0), "0.3333333333");
        assert_eq!(fmt_float(1e7), "10000000");
        assert_eq!(fmt_float(f64::NAN), "NA");
    }

    #[test]
    fn rules() {
        let r = x_rule_from_exponent(1.2);
        let v = r.eval(&[("D", 4.0), ("a", 1.0), ("phi", 0.25)]).unwrap();
        assert!((v - 16f64.powf(1.2)).abs() < 1e-9);
        assert!(Rule::parse("D ^ (").is_err());
        assert!(Rule::parse("q + 1").unwrap().eval(&[("D", 1.0)]).is_err());
    }

    #[test]
    fn single_discriminant_sweep() {
        let out = run_sweep(&SweepConfig::uniform(3)).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.summary.failures, 0);
        assert_eq!(out.records[0].pass, Some(true));
    }

    #[test]
    fn sweep_to_200_passes() {
        let out = run_sweep(&SweepConfig::uniform(200)).unwrap();
        assert_eq!(out.summary.failures, 0);
        assert_eq!(out.summary.sieve_violations, 0);
        assert!(out.summary.evaluated > 0);
    }
}

//! Command-line front end for `padic-wieferich`.
//!
//! [`run`] parses arguments, dispatches to the library and writes the
//! result in the chosen format. Exit codes: 0 success, 1 input or
//! precondition error, 2 budget exhausted, 3 invariant or pinned value
//! mismatch.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use serde::Serialize;

use padic_wieferich::abc::{avg_power, factor_split, AvgPowerReport, FactorSplit};
use padic_wieferich::arith::{
    modpow, multiplicative_order, vp_rational, FactorBudget, OrderResult,
};
use padic_wieferich::flt::{
    check_flt_candidate, gen_primitive_triples, sweep_triples, verify_triple, CriterionVerdict,
    PythTriple, SweepSummary,
};
use padic_wieferich::fuzz::{fuzz_identity, FuzzConfig, FuzzReport};
use padic_wieferich::identity::{defect_report, lemma13_check, DEFAULT_BIT_BUDGET};
use padic_wieferich::scan::{
    construct_base, scan_pair_with, survey, wa_spectrum, wieferich_order, ScanOptions,
    SpectrumReport, SurveyReport, WieferichRecord, DEFAULT_CAP,
};
use padic_wieferich::{
    is_prime, BasePair, DefectReport, Error, ErrorKind, Prime, Sign, WieferichOrder,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Environment variable read when `--workers` is absent.
pub const WORKERS_ENV: &str = "WIEFERICH_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "wieferich",
    version,
    about = "p-adic valuations, Wieferich pairs and related checks"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::JsonLines, global = true)]
    pub format: Format,
    /// Worker threads for scans and sweeps; never changes the output.
    #[arg(long, env = WORKERS_ENV, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    JsonLines,
    Csv,
    Human,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: i64,
}

impl PairArgs {
    fn pair(&self) -> Result<BasePair, Error> {
        BasePair::new(self.a, self.b)
    }
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Trial division bound.
    #[arg(long, default_value_t = FactorBudget::default().trial_limit)]
    pub trial_limit: u64,
    /// Pollard rho iterations per cofactor.
    #[arg(long, default_value_t = FactorBudget::default().rho_iterations)]
    pub rho_iterations: u64,
}

impl BudgetArgs {
    fn budget(&self) -> FactorBudget {
        FactorBudget {
            trial_limit: self.trial_limit,
            rho_iterations: self.rho_iterations,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// vp(x), or vp(x/den) with --den.
    Valuation {
        #[arg(long, allow_negative_numbers = true)]
        x: BigInt,
        #[arg(long, allow_negative_numbers = true)]
        den: Option<BigInt>,
        #[arg(long)]
        p: u64,
    },
    /// Both sides of the identity and the defect vp(a^n ± b^n) - vp(n).
    Defect {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "minus")]
        sign: Sign,
        /// Largest a^n, in bits, evaluated directly.
        #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
        bit_budget: u64,
    },
    /// Multiplicative order of a modulo p.
    Order {
        #[arg(long, allow_negative_numbers = true)]
        a: i64,
        #[arg(long)]
        p: u64,
    },
    /// vp(a^n ± b^n) under the hypothesis p | a ± b.
    Lemma13 {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "minus")]
        sign: Sign,
        #[arg(long, default_value_t = DEFAULT_BIT_BUDGET)]
        bit_budget: u64,
    },
    /// vp(a^(p-1) - b^(p-1)), exact below the cap.
    WieferichOrder {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
    },
    /// Wieferich primes to a base pair up to a limit.
    Scan {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
        /// Progress file, used for limits of at least 10^7.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Every coprime pair 1 <= a < b <= a-max against all odd primes.
    Survey {
        #[arg(long, default_value_t = 100)]
        a_max: i64,
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = 4)]
        min_order: u32,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
    },
    /// The pair (3^k - t, 3^k + t) and its order at 3.
    ConstructBase {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 64)]
        cap: u32,
    },
    /// Largest Wieferich order of base a over primes up to a limit.
    WaSpectrum {
        #[arg(long)]
        a: i64,
        #[arg(long)]
        limit: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
    },
    /// Primitive Pythagorean triples with z <= z-limit.
    Triples {
        #[arg(long)]
        z_limit: u64,
        /// Check the criterion on every triple and print a summary.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// The criterion on one Pythagorean triple.
    VerifyTriple {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        z: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// The criterion on a candidate solution of x^n + y^n = z^n.
    FltCheck {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        #[arg(long)]
        z: u64,
        #[arg(long)]
        n: u64,
    },
    /// Split a^n - 1 into m1, mN, mW and m22.
    Split {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// log(a^n - 1) / log(rad(a^n - 1)) for n = 2..=n-max.
    AvgPower {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        n_max: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Seeded comparison of the identity against direct evaluation.
    FuzzIdentity {
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        max_base: i64,
        #[arg(long, default_value_t = 60)]
        max_n: u64,
        #[arg(long, default_value_t = 97)]
        max_prime: u64,
    },
    /// Re-run a pinned experiment; exit 3 on any mismatch.
    Repro {
        #[arg(value_enum)]
        preset: Preset,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "base313-1e6")]
    Base313,
    #[value(name = "survey-1e6")]
    Survey,
    #[value(name = "big-triple")]
    BigTriple,
    #[value(name = "wieferich-2")]
    Wieferich2,
}

/// Output rows: one JSON object per item in json-lines mode, fixed
/// columns in csv mode.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
    fn rows(&self) -> Vec<Vec<String>>;
    fn human(&self) -> String;
}

struct Emitter<'a> {
    format: Format,
    out: &'a mut dyn Write,
    header_done: bool,
}

impl Emitter<'_> {
    fn emit<T: Row>(&mut self, item: &T) -> io::Result<()> {
        match self.format {
            Format::JsonLines => {
                serde_json::to_writer(&mut *self.out, item)?;
                writeln!(self.out)
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
                if !self.header_done {
                    w.write_record(T::HEADER)?;
                    self.header_done = true;
                }
                for r in item.rows() {
                    w.write_record(&r)?;
                }
                let bytes = w.into_inner().map_err(|e| e.into_error())?;
                self.out.write_all(&bytes)
            }
            Format::Human => writeln!(self.out, "{}", item.human()),
        }
    }

    fn emit_all<T: Row>(&mut self, items: &[T]) -> io::Result<()> {
        if items.is_empty() && self.format == Format::Csv && !self.header_done {
            let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
            w.write_record(T::HEADER)?;
            self.header_done = true;
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            return self.out.write_all(&bytes);
        }
        items.iter().try_for_each(|i| self.emit(i))
    }
}

fn s<T: ToString>(v: T) -> String {
    v.to_string()
}

#[derive(Debug, Serialize)]
pub struct ValuationOut {
    pub x: String,
    pub den: Option<String>,
    pub p: Prime,
    pub valuation: i64,
}

impl Row for ValuationOut {
    const HEADER: &'static [&'static str] = &["x", "den", "p", "valuation"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.x.clone(),
            self.den.clone().unwrap_or_default(),
            s(self.p),
            s(self.valuation),
        ]]
    }
    fn human(&self) -> String {
        match &self.den {
            Some(d) => format!("v_{}({}/{}) = {}", self.p, self.x, d, self.valuation),
            None => format!("v_{}({}) = {}", self.p, self.x, self.valuation),
        }
    }
}

fn sign_char(sign: Sign) -> char {
    match sign {
        Sign::Minus => '-',
        Sign::Plus => '+',
    }
}

fn sign_word(sign: Sign) -> &'static str {
    match sign {
        Sign::Minus => "minus",
        Sign::Plus => "plus",
    }
}

impl Row for DefectReport {
    const HEADER: &'static [&'static str] = &[
        "a",
        "b",
        "n",
        "p",
        "sign",
        "lhs_valuation",
        "vp_n",
        "rhs_valuation",
        "defect",
        "identity_holds",
    ];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.pair.a()),
            s(self.pair.b()),
            s(self.n),
            s(self.p),
            s(sign_word(self.sign)),
            s(self.lhs_valuation),
            s(self.vp_n),
            s(self.rhs_valuation),
            s(self.defect),
            s(self.identity_holds),
        ]]
    }
    fn human(&self) -> String {
        format!(
            "v_{p}({a}^{n} {c} {b}^{n}) = {l}, v_{p}({n}) = {vn}, defect {d}, v_{p}({a}^{pm} - {b}^{pm}) = {r}, identity {ok}",
            p = self.p,
            a = self.pair.a(),
            b = self.pair.b(),
            n = self.n,
            c = sign_char(self.sign),
            l = self.lhs_valuation,
            vn = self.vp_n,
            d = self.defect,
            pm = self.p.get() - 1,
            r = self.rhs_valuation,
            ok = if self.identity_holds { "holds" } else { "FAILS" },
        )
    }
}

impl Row for OrderResult {
    const HEADER: &'static [&'static str] = &["base", "p", "d"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![s(self.base), s(self.p), s(self.d)]]
    }
    fn human(&self) -> String {
        format!("ord_{}({}) = {}", self.p, self.base, self.d)
    }
}

#[derive(Debug, Serialize)]
pub struct Lemma13Out {
    pub a: i64,
    pub b: i64,
    pub n: u64,
    pub p: Prime,
    pub sign: Sign,
    pub valuation: u32,
}

impl Row for Lemma13Out {
    const HEADER: &'static [&'static str] = &["a", "b", "n", "p", "sign", "valuation"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.a),
            s(self.b),
            s(self.n),
            s(self.p),
            s(sign_word(self.sign)),
            s(self.valuation),
        ]]
    }
    fn human(&self) -> String {
        format!(
            "v_{p}({a}^{n} {c} {b}^{n}) = {v}",
            p = self.p,
            a = self.a,
            b = self.b,
            n = self.n,
            c = sign_char(self.sign),
            v = self.valuation
        )
    }
}

impl Row for WieferichRecord {
    const HEADER: &'static [&'static str] = &["p", "a", "b", "order"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.p),
            s(self.pair.a()),
            s(self.pair.b()),
            s(self.order),
        ]]
    }
    fn human(&self) -> String {
        format!("p = {} base {} order {}", self.p, self.pair, self.order)
    }
}

impl Row for SurveyReport {
    const HEADER: &'static [&'static str] = WieferichRecord::HEADER;
    fn rows(&self) -> Vec<Vec<String>> {
        self.records.iter().flat_map(|r| r.rows()).collect()
    }
    fn human(&self) -> String {
        let mut h = format!(
            "{} pairs, primes <= {}, order >= {}: {} records on {} pairs, largest prime {}",
            self.pair_count,
            self.prime_limit,
            self.min_order,
            self.records.len(),
            self.distinct_pairs_hit,
            self.max_prime_seen
        );
        for r in &self.records {
            h.push_str("\n  ");
            h.push_str(&r.human());
        }
        h
    }
}

#[derive(Debug, Serialize)]
pub struct ConstructOut {
    pub k: u32,
    pub t: u64,
    pub a: i64,
    pub b: i64,
    pub order_at_3: WieferichOrder,
}

impl Row for ConstructOut {
    const HEADER: &'static [&'static str] = &["k", "t", "a", "b", "order_at_3"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.k),
            s(self.t),
            s(self.a),
            s(self.b),
            s(self.order_at_3),
        ]]
    }
    fn human(&self) -> String {
        format!(
            "k = {}, t = {}: base ({}, {}), order {} at 3",
            self.k, self.t, self.a, self.b, self.order_at_3
        )
    }
}

impl Row for SpectrumReport {
    const HEADER: &'static [&'static str] = &["a", "prime_limit", "w_observed", "argmax_primes"];
    fn rows(&self) -> Vec<Vec<String>> {
        let ps: Vec<String> = self.argmax_primes.iter().map(|p| p.to_string()).collect();
        vec![vec![
            s(self.a),
            s(self.prime_limit),
            s(self.w_observed),
            ps.join(";"),
        ]]
    }
    fn human(&self) -> String {
        let ps: Vec<String> = self.argmax_primes.iter().map(|p| p.to_string()).collect();
        format!(
            "base {}, primes <= {}: largest order {} at {}",
            self.a,
            self.prime_limit,
            self.w_observed,
            ps.join(", ")
        )
    }
}

impl Row for PythTriple {
    const HEADER: &'static [&'static str] = &["x", "y", "z", "primitive"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![s(self.x), s(self.y), s(self.z), s(self.primitive)]]
    }
    fn human(&self) -> String {
        format!("{}^2 + {}^2 = {}^2", self.x, self.y, self.z)
    }
}

impl Row for SweepSummary {
    const HEADER: &'static [&'static str] = &[
        "z_limit",
        "triples",
        "verdicts",
        "odd_verdicts",
        "two_verdicts",
        "exception_count",
        "unfactored",
    ];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.z_limit),
            s(self.triples),
            s(self.verdicts),
            s(self.odd_verdicts),
            s(self.two_verdicts),
            s(self.exception_count),
            s(self.unfactored),
        ]]
    }
    fn human(&self) -> String {
        format!(
            "z <= {}: {} triples, {} verdicts ({} odd, {} at 2), {} exceptions, {} unfactored",
            self.z_limit,
            self.triples,
            self.verdicts,
            self.odd_verdicts,
            self.two_verdicts,
            self.exception_count,
            self.unfactored
        )
    }
}

impl Row for CriterionVerdict {
    const HEADER: &'static [&'static str] = &[
        "x",
        "y",
        "z",
        "p",
        "divides",
        "clause",
        "pair_a",
        "pair_b",
        "order",
        "required",
        "exact_multiplicity",
        "holds",
    ];
    fn rows(&self) -> Vec<Vec<String>> {
        let (x, y, z) = self.triple;
        vec![vec![
            s(x),
            s(y),
            s(z),
            s(self.p),
            s(self.divides.name()),
            serde_json::to_value(self.clause)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
            s(self.complementary_pair.a()),
            s(self.complementary_pair.b()),
            s(self.observed_order),
            s(self.required_order),
            s(self.multiplicity_identity_holds),
            s(self.holds()),
        ]]
    }
    fn human(&self) -> String {
        let (x, y, z) = self.triple;
        format!(
            "({x}, {y}, {z}): p = {} divides {}, order {} to base {} (required {}){}",
            self.p,
            self.divides.name(),
            self.observed_order,
            self.complementary_pair,
            self.required_order,
            if self.holds() { "" } else { "  FAILS" }
        )
    }
}

impl Row for FactorSplit {
    const HEADER: &'static [&'static str] = &["a", "n", "m1", "mN", "mW", "m22", "bound_mN_ok"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.a),
            s(self.n),
            s(&self.m1),
            s(&self.m_n),
            s(&self.m_w),
            s(&self.m22),
            s(self.bound_m_n_ok),
        ]]
    }
    fn human(&self) -> String {
        format!(
            "{}^{} - 1: m1 = {}, mN = {}, mW = {}, m22 = {}, mN <= n rad(n): {}",
            self.a, self.n, self.m1, self.m_n, self.m_w, self.m22, self.bound_m_n_ok
        )
    }
}

impl Row for AvgPowerReport {
    const HEADER: &'static [&'static str] =
        &["a", "n", "value", "squarefree_n", "w_local", "bound_ok"];
    fn rows(&self) -> Vec<Vec<String>> {
        self.samples
            .iter()
            .map(|x| {
                vec![
                    s(self.a),
                    s(x.n),
                    s(x.value),
                    s(x.squarefree_n),
                    s(x.w_local),
                    s(x.bound_ok),
                ]
            })
            .collect()
    }
    fn human(&self) -> String {
        let mut h = format!(
            "base {}: max over squarefree n = {:.6}, {} samples, unfactored n: {:?}",
            self.a,
            self.max_over_squarefree_n,
            self.samples.len(),
            self.unfactored_n
        );
        for x in &self.samples {
            h.push_str(&format!(
                "\n  n = {}: {:.6} (W = {}, bound {})",
                x.n,
                x.value,
                x.w_local,
                if x.bound_ok { "ok" } else { "FAILS" }
            ));
        }
        h
    }
}

impl Row for FuzzReport {
    const HEADER: &'static [&'static str] =
        &["seed", "cases", "cases_at_two", "draws", "mismatches"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.config.seed),
            s(self.cases),
            s(self.cases_at_two),
            s(self.draws),
            s(self.mismatches.len()),
        ]]
    }
    fn human(&self) -> String {
        let mut h = format!(
            "seed {}: {} cases ({} at p = 2) from {} draws, {} mismatches",
            self.config.seed,
            self.cases,
            self.cases_at_two,
            self.draws,
            self.mismatches.len()
        );
        for m in &self.mismatches {
            h.push_str(&format!("\n  {m:?}"));
        }
        h
    }
}

/// One pinned expectation of a `repro` preset.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub preset: &'static str,
    pub check: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Row for Check {
    const HEADER: &'static [&'static str] = &["preset", "check", "pass", "detail"];
    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            s(self.preset),
            s(self.check),
            s(self.pass),
            self.detail.clone(),
        ]]
    }
    fn human(&self) -> String {
        format!(
            "{} {} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.preset,
            self.check,
            self.detail
        )
    }
}

fn prime(p: u64) -> Result<Prime, Error> {
    Prime::new(p)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let workers = cli.workers.map_or_else(default_workers, |w| w as usize);
    let mut em = Emitter {
        format: cli.format,
        out,
        header_done: false,
    };
    match dispatch(cli.command, workers, &mut em) {
        Ok(code) => code,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Resource => EXIT_RESOURCE,
                ErrorKind::Invariant => EXIT_INVARIANT,
            }
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

enum Failure {
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn dispatch(cmd: Command, workers: usize, em: &mut Emitter) -> Result<i32, Failure> {
    let opts = ScanOptions::with_workers(workers);
    match cmd {
        Command::Valuation { x, den, p } => {
            let one = BigInt::from(1);
            let v = vp_rational(&x, den.as_ref().unwrap_or(&one), prime(p)?)?;
            em.emit(&ValuationOut {
                x: x.to_string(),
                den: den.map(|d| d.to_string()),
                p: prime(p)?,
                valuation: v,
            })?;
        }
        Command::Defect {
            pair,
            n,
            p,
            sign,
            bit_budget,
        } => {
            let r = defect_report(pair.pair()?, n, prime(p)?, sign, bit_budget)?;
            em.emit(&r)?;
            if !r.identity_holds {
                return Ok(EXIT_INVARIANT);
            }
        }
        Command::Order { a, p } => em.emit(&multiplicative_order(a, prime(p)?)?)?,
        Command::Lemma13 {
            pair,
            n,
            p,
            sign,
            bit_budget,
        } => {
            let bp = pair.pair()?;
            let valuation = lemma13_check(bp, n, prime(p)?, sign, bit_budget)?;
            em.emit(&Lemma13Out {
                a: bp.a(),
                b: bp.b(),
                n,
                p: prime(p)?,
                sign,
                valuation,
            })?;
        }
        Command::WieferichOrder { pair, p, cap } => {
            let bp = pair.pair()?;
            let p = prime(p)?;
            let order = wieferich_order(p, bp, cap)?;
            em.emit(&WieferichRecord { p, pair: bp, order })?;
        }
        Command::Scan {
            pair,
            limit,
            cap,
            checkpoint,
        } => {
            let opts = ScanOptions { checkpoint, ..opts };
            em.emit_all(&scan_pair_with(pair.pair()?, limit, cap, &opts)?)?;
        }
        Command::Survey {
            a_max,
            limit,
            min_order,
            cap,
        } => {
            em.emit(&survey(a_max, limit, min_order, cap, &opts)?)?;
        }
        Command::ConstructBase { k, t, cap } => {
            let bp = construct_base(k, t)?;
            em.emit(&ConstructOut {
                k,
                t,
                a: bp.a(),
                b: bp.b(),
                order_at_3: wieferich_order(prime(3)?, bp, cap)?,
            })?;
        }
        Command::WaSpectrum { a, limit, cap } => em.emit(&wa_spectrum(a, limit, cap, &opts)?)?,
        Command::Triples {
            z_limit,
            verify,
            budget,
        } => {
            if verify {
                let summary = sweep_triples(z_limit, &budget.budget(), workers)?;
                em.emit(&summary)?;
                if summary.exception_count > 0 {
                    return Ok(EXIT_INVARIANT);
                }
            } else {
                em.emit_all(&gen_primitive_triples(z_limit))?;
            }
        }
        Command::VerifyTriple { x, y, z, budget } => {
            let vs = verify_triple(PythTriple::new(x, y, z)?, &budget.budget())?;
            em.emit_all(&vs)?;
            if !vs.iter().all(CriterionVerdict::holds) {
                return Ok(EXIT_INVARIANT);
            }
        }
        Command::FltCheck { x, y, z, n } => {
            let vs = check_flt_candidate(x, y, z, n)?;
            em.emit_all(&vs)?;
            if !vs.iter().all(CriterionVerdict::holds) {
                return Ok(EXIT_INVARIANT);
            }
        }
        Command::Split { a, n, budget } => em.emit(&factor_split(a, n, &budget.budget())?)?,
        Command::AvgPower { a, n_max, budget } => {
            let r = avg_power(a, n_max, &budget.budget())?;
            em.emit(&r)?;
            if !r.samples.iter().all(|x| x.bound_ok) {
                return Ok(EXIT_INVARIANT);
            }
        }
        Command::FuzzIdentity {
            count,
            seed,
            max_base,
            max_n,
            max_prime,
        } => {
            let r = fuzz_identity(&FuzzConfig {
                cases: count,
                seed,
                max_base,
                max_n,
                max_prime,
            })?;
            em.emit(&r)?;
            if !r.mismatches.is_empty() {
                return Ok(EXIT_INVARIANT);
            }
        }
        Command::Repro { preset } => {
            let checks = repro(preset, workers)?;
            em.emit_all(&checks)?;
            if !checks.iter().all(|c| c.pass) {
                return Ok(EXIT_INVARIANT);
            }
        }
    }
    Ok(EXIT_OK)
}

fn order_list(recs: &[WieferichRecord]) -> Vec<(u64, WieferichOrder)> {
    recs.iter().map(|r| (r.p.get(), r.order)).collect()
}

fn check(preset: &'static str, name: &'static str, pass: bool, detail: String) -> Check {
    Check {
        preset,
        check: name,
        pass,
        detail,
    }
}

/// Runs a preset and compares against its pinned values.
pub fn repro(preset: Preset, workers: usize) -> Result<Vec<Check>, Error> {
    let opts = ScanOptions::with_workers(workers);
    let two = WieferichOrder::Exact(2);
    let mut out = Vec::new();
    match preset {
        Preset::Base313 => {
            let name = "base313-1e6";
            let recs = scan_pair_with(BasePair::new(3, 13)?, 1_000_000, DEFAULT_CAP, &opts)?;
            let got = order_list(&recs);
            out.push(check(
                name,
                "records",
                got == [(19, two), (269, two)],
                format!("expected [(19, 2), (269, 2)], got {got:?}"),
            ));
        }
        Preset::Survey => {
            let name = "survey-1e6";
            let r = survey(100, 1_000_000, 4, DEFAULT_CAP, &opts)?;
            out.push(check(
                name,
                "pair_count",
                r.pair_count == 3043,
                format!("expected 3043, got {}", r.pair_count),
            ));
            out.push(check(
                name,
                "distinct_pairs_hit",
                r.distinct_pairs_hit == 61,
                format!("expected 61, got {}", r.distinct_pairs_hit),
            ));
            out.push(check(
                name,
                "max_prime",
                r.max_prime_seen <= 17,
                format!("expected <= 17, got {}", r.max_prime_seen),
            ));
            let mut five: Vec<(u64, i64, i64)> = r
                .records
                .iter()
                .filter(|x| x.order.is_at_least(5))
                .map(|x| (x.p.get(), x.pair.a(), x.pair.b()))
                .collect();
            five.sort();
            out.push(check(
                name,
                "order_5_pairs",
                five == [(5, 3, 79), (5, 38, 41)],
                format!("expected [(5, 3, 79), (5, 38, 41)], got {five:?}"),
            ));
        }
        Preset::BigTriple => {
            let name = "big-triple";
            let (x, y, z) = (38_399u64, 2_042_040u64, 2_042_401u64);
            out.push(check(
                name,
                "z_prime",
                is_prime(z),
                format!("is_prime({z})"),
            ));
            let zz = BigUint::from(z) * z;
            let e = BigUint::from(z - 1);
            let lhs = modpow(&BigInt::from(y), &e, &zz)?;
            let rhs = modpow(&BigInt::from(x), &e, &zz)?;
            out.push(check(
                name,
                "square_divides",
                lhs == rhs,
                format!(
                    "{y}^{} mod {z}^2 = {lhs}, {x}^{} mod {z}^2 = {rhs}",
                    z - 1,
                    z - 1
                ),
            ));
            let sum = BigUint::from(x).pow(2) + BigUint::from(y).pow(2);
            out.push(check(
                name,
                "equation",
                sum == BigUint::from(z).pow(2),
                format!("{x}^2 + {y}^2 = {sum}"),
            ));
            let verdicts = check_flt_candidate(x, y, z, 2)?;
            let at_z = verdicts.iter().find(|v| v.p.get() == z);
            out.push(check(
                name,
                "verdict",
                at_z.is_some_and(|v| v.holds() && v.observed_order >= 2),
                match at_z {
                    Some(v) => v.human(),
                    None => format!("no verdict at p = {z}"),
                },
            ));
        }
        Preset::Wieferich2 => {
            let name = "wieferich-2";
            let pair = BasePair::new(1, 2)?;
            let recs = scan_pair_with(pair, 10_000, DEFAULT_CAP, &opts)?;
            let got = order_list(&recs);
            out.push(check(
                name,
                "records",
                got == [(1093, two)],
                format!("expected [(1093, 2)], got {got:?}"),
            ));
            let ord = multiplicative_order(2, prime(1093)?)?;
            out.push(check(
                name,
                "order",
                ord.d == 364,
                format!("ord_1093(2) = {}", ord.d),
            ));
            let d = defect_report(pair, 364, prime(1093)?, Sign::Minus, DEFAULT_BIT_BUDGET)?;
            out.push(check(
                name,
                "defect",
                d.defect == 2 && d.identity_holds,
                d.human(),
            ));
        }
    }
    Ok(out)
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use tansec::deduction::{conclude, theorem_report, ConcludeError, FactBase};
use tansec::geometry::{self, classify, expected_dim_secant, expected_dim_w, s_i};
use tansec::monomials::dim_sd;
use tansec::verifier::{self, base_case_suite, check_attempts, file_name_for, replay, BaseCase, Certificate, VerdictStatus};
use tansec::{Error, FieldModulus, Statement};

const EXIT_PROVEN: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "tansec", version, about = "Verify nondefectivity statements for secant varieties of tangential varieties")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct RunConfig {
    /// Characteristic of the prime field.
    #[arg(long, global = true, env = "TANSEC_PRIME", default_value_t = 8191)]
    prime: u64,
    /// Random seed; defaults to the current time and is always echoed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sampling attempts per statement.
    #[arg(long, global = true, default_value_t = verifier::DEFAULT_RETRIES)]
    retries: usize,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "TANSEC_THREADS")]
    threads: Option<usize>,
    /// Width of the coordinate blocks.
    #[arg(long, global = true, default_value_t = 24)]
    block_width: usize,
    /// Degree of the forms.
    #[arg(long, global = true, default_value_t = 3)]
    d: usize,
    /// Directory for certificate files.
    #[arg(long, global = true, default_value = "certificates")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check T(n, s; a1, a2, a3) at random points.
    Check { n: usize, s: usize, a1: usize, a2: usize, a3: usize },
    /// Run a base-case family (i, ii, iii or iv).
    BaseCases {
        case: String,
        /// Restrict to one value of i; both are run when omitted.
        #[arg(long)]
        i: Option<u8>,
        #[arg(long)]
        max_n: Option<usize>,
    },
    /// Print the closed-form quantities for n.
    Formulas { n: usize },
    /// Replay a certificate file.
    Verify { cert: PathBuf },
    /// Derive nondefectivity for n from a directory of certificates.
    Conclude {
        n: usize,
        /// Certificate directory; defaults to --out.
        #[arg(long)]
        facts: Option<PathBuf>,
        /// Accept every cubic statement with n <= 9 as an axiom.
        #[arg(long)]
        axiom_small_n: bool,
        /// Derive only T(n, s_i(n); 0, 0, 0).
        #[arg(long)]
        i: Option<u8>,
    },
    /// Print the expected dimension of a statement.
    ExpectedDim {
        n: usize,
        s: usize,
        #[arg(default_value_t = 0)]
        a1: usize,
        #[arg(default_value_t = 0)]
        a2: usize,
        #[arg(default_value_t = 0)]
        a3: usize,
    },
}

/// Failure with an exit code.
struct Exit(u8, String);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Self {
        Exit(EXIT_USAGE, format!("{e:#}"))
    }
}

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RankMismatch { .. } => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        };
        Exit(code, e.to_string())
    }
}

type CmdResult = Result<u8, Exit>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_PROVEN });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, msg)) => {
            eprintln!("error: {msg}");
            if code == EXIT_USAGE {
                eprintln!("run `tansec --help` for usage");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    if let Some(t) = cli.cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let modulus = FieldModulus::new(cli.cfg.prime)?;
    let cfg = &cli.cfg;
    match &cli.cmd {
        Command::Check { n, s, a1, a2, a3 } => {
            let st = Statement::new(*n, cfg.d, *s, [*a1, *a2, *a3], cfg.block_width)?;
            cmd_check(cfg, modulus, &st)
        }
        Command::BaseCases { case, i, max_n } => cmd_base_cases(cfg, modulus, case, *i, *max_n),
        Command::Formulas { n } => cmd_formulas(*n),
        Command::Verify { cert } => cmd_verify(cfg, cert),
        Command::Conclude {
            n,
            facts,
            axiom_small_n,
            i,
        } => cmd_conclude(cfg, *n, facts.as_deref().unwrap_or(&cfg.out), *axiom_small_n, *i),
        Command::ExpectedDim { n, s, a1, a2, a3 } => {
            let st = Statement::new(*n, cfg.d, *s, [*a1, *a2, *a3], cfg.block_width)?;
            println!("statement: {st}");
            println!("N(n, d) = {}", dim_sd(*n, cfg.d));
            if st.is_unconstrained() {
                println!("secant expected dimension = {}", expected_dim_secant(*n, cfg.d, *s));
            }
            println!("expected dimension = {}", expected_dim_w(&st));
            println!("class = {}", classify(&st));
            Ok(EXIT_PROVEN)
        }
    }
}

fn seed_of(cfg: &RunConfig) -> u64 {
    cfg.seed
        .unwrap_or_else(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

fn write_certificate(dir: &Path, cert: &Certificate) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(cert.file_name());
    fs::write(&path, cert.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Runs all attempts for one statement, prints them and stores the last.
fn run_statement(cfg: &RunConfig, modulus: FieldModulus, st: &Statement, seed: u64) -> Result<(VerdictStatus, Certificate), Exit> {
    let attempts = check_attempts(st, seed, modulus, cfg.retries)?;
    for (_, cert) in &attempts {
        match cfg.format {
            Format::Text => print!("{}", cert.to_log()),
            Format::Json => println!("{}", cert.to_json()),
        }
    }
    let (verdict, cert) = attempts.into_iter().last().expect("at least one attempt");
    let path = write_certificate(&cfg.out, &cert)?;
    if cfg.format == Format::Text {
        println!("Certificate written to {}", path.display());
    }
    Ok((verdict.status, cert))
}

fn cmd_check(cfg: &RunConfig, modulus: FieldModulus, st: &Statement) -> CmdResult {
    let (status, _) = run_statement(cfg, modulus, st, seed_of(cfg))?;
    Ok(match status {
        VerdictStatus::ProvenTrue => EXIT_PROVEN,
        VerdictStatus::Unknown => EXIT_UNKNOWN,
    })
}

/// True when `path` holds a certificate for `st` that replays to a proof.
fn checkpoint_valid(path: &Path, st: &Statement) -> bool {
    let Ok(text) = fs::read_to_string(path) else {
        return false;
    };
    let Ok(cert) = Certificate::from_json(&text) else {
        return false;
    };
    cert.statement().ok().as_ref() == Some(st) && replay(&cert).is_ok_and(|v| v.is_proven())
}

fn cmd_base_cases(cfg: &RunConfig, modulus: FieldModulus, case: &str, i: Option<u8>, max_n: Option<usize>) -> CmdResult {
    let case: BaseCase = case.parse()?;
    if cfg.d != 3 || cfg.block_width != 24 {
        return Err(anyhow::anyhow!("base cases are defined for d = 3 and block width 24").into());
    }
    let is: Vec<u8> = match (case.depends_on_i(), i) {
        (_, Some(i)) => vec![i],
        (true, None) => vec![1, 2],
        (false, None) => vec![1],
    };
    let mut statements = Vec::new();
    for i in is {
        statements.extend(base_case_suite(case, i)?);
    }
    statements.retain(|st| max_n.is_none_or(|m| st.n() <= m));
    let seed = seed_of(cfg);
    let mut rows = Vec::new();
    for st in &statements {
        let path = cfg.out.join(file_name_for(st));
        if checkpoint_valid(&path, st) {
            println!("{st}: certificate {} replays, skipping", path.display());
            rows.push((*st, "PROVEN (checkpoint)".to_string()));
            continue;
        }
        let (status, cert) = run_statement(cfg, modulus, st, seed)?;
        let label = match status {
            VerdictStatus::ProvenTrue => "PROVEN",
            VerdictStatus::Unknown => "UNKNOWN",
        };
        rows.push((*st, format!("{label} rank {} in {:.3}s", cert.rank, cert.times_ms.total / 1000.0)));
    }
    println!();
    println!("Summary ({} statements):", rows.len());
    for (st, label) in &rows {
        println!("  {st:<32} {label}");
    }
    let failed = rows.iter().filter(|(_, l)| l.starts_with("UNKNOWN")).count();
    if failed > 0 {
        println!("{failed} statement(s) not proven");
        Ok(EXIT_UNKNOWN)
    } else {
        Ok(EXIT_PROVEN)
    }
}

fn cmd_formulas(n: usize) -> CmdResult {
    if n < 8 {
        return Err(anyhow::anyhow!("n >= 8 required; T(7,3;8) handled directly, use `check 7 8 0 0 0`").into());
    }
    let big_n = dim_sd(n, 3);
    let (s1, s2) = (s_i(1, n)?, s_i(2, n)?);
    println!("n = {n}");
    println!("N(n) = {big_n}");
    println!("2n+1 = {}", 2 * n + 1);
    println!("s1(n) = {s1}");
    println!("s2(n) = {s2}");
    if n >= 32 {
        println!("t(n) = {}", geometry::t(n)?);
        println!("c(n) = {}", geometry::c(n)?);
    }
    for s in [s1, s2] {
        let st = Statement::cubic(n, s, [0; 3])?;
        println!("{st}: {} (expected dimension {})", classify(&st), expected_dim_w(&st));
    }
    if n >= 32 {
        for i in [1u8, 2] {
            let st = Statement::cubic(n, geometry::t(n)?, [s_i(i, n - 24)?, 0, 0])?;
            println!("P1 premise (i = {i}): {st}: {}", classify(&st));
        }
    }
    if n >= 56 {
        let tp = geometry::t(n - 24)?;
        let st = Statement::cubic(n, 96, [tp, tp, 0])?;
        println!("type (ii) statement: {st}: {} (t(n-24) = {tp})", classify(&st));
    }
    if n >= 71 {
        let st = Statement::cubic(n, 0, [96, 96, 96])?;
        println!("type (i) statement: {st}: {}", classify(&st));
    }
    Ok(EXIT_PROVEN)
}

fn cmd_verify(cfg: &RunConfig, path: &Path) -> CmdResult {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cert = Certificate::from_json(&text)?;
    let st = cert.statement()?;
    let verdict = replay(&cert)?;
    match cfg.format {
        Format::Text => {
            println!("{st}: replayed rank {} over F_{} matches the certificate", verdict.rank, cert.prime);
            println!("Found {} + {} = {} vs. {} expected.", verdict.base_dim, verdict.rank, verdict.base_dim + verdict.rank, verdict.expected);
            println!("{}", cert.verdict_line());
        }
        Format::Json => println!(
            "{{\"statement\": \"{st}\", \"rank\": {}, \"verdict\": \"{}\"}}",
            verdict.rank,
            if verdict.is_proven() { "proven_true" } else { "unknown" }
        ),
    }
    Ok(if verdict.is_proven() { EXIT_PROVEN } else { EXIT_UNKNOWN })
}

fn cmd_conclude(cfg: &RunConfig, n: usize, dir: &Path, axiom: bool, i: Option<u8>) -> CmdResult {
    let mut facts = FactBase::new().with_small_n_axiom(axiom);
    if dir.is_dir() {
        for (file, err) in facts.load_dir(dir)? {
            eprintln!("rejected {file}: {err}");
        }
    } else {
        eprintln!("no certificate directory at {}; starting from an empty fact base", dir.display());
    }
    println!("{} fact(s) loaded", facts.len());
    if let Some(i) = i {
        return match conclude(&facts, n, i) {
            Ok(d) => {
                d.validate(&facts)?;
                match cfg.format {
                    Format::Text => print!("{}", d.to_text()),
                    Format::Json => println!("{}", d.to_json()),
                }
                Ok(EXIT_PROVEN)
            }
            Err(ConcludeError::Domain(e)) => Err(e.into()),
            Err(e) => {
                print!("{e}");
                Ok(EXIT_UNKNOWN)
            }
        };
    }
    let report = theorem_report(&facts, n)?;
    for side in [&report.lower, &report.upper] {
        if let Ok(d) = &side.result {
            d.validate(&facts)?;
        }
    }
    print!("{report}");
    Ok(if report.complete() { EXIT_PROVEN } else { EXIT_UNKNOWN })
}

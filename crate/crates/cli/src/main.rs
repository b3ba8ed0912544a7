//! Command-line front end: coefficient tables, eta-quotient certificates,
//! congruence-family verification, density scans and Hecke application.
//!
//! Exit codes: 0 when every requested check holds, 1 when a verification
//! scan produced a counterexample (the witness is in the output), 2 for
//! usage or parse errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qregular::congruence::{instantiate_family, FamilyParams, Lab, Verdict, VerificationReport};
use qregular::eta::parse_eta_spec;
use qregular::hecke::{apply_tp, nilpotency_probe, HeckeContext};
use qregular::partitions::bipartition_series;
use qregular::series::Coefficient;

const DENSITY_X_CAP: u64 = 1_000_000;

#[derive(Parser)]
#[command(
    name = "qregular",
    version,
    about = "q-series toolkit for l-regular bipartitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Write output to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Reserved; every current code path is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Table of l-regular bipartition counts B_l(n) for n = 0..=trunc.
    Coeffs {
        /// Regularity parameter l >= 2.
        #[arg(long)]
        ell: u64,
        /// Largest n to print.
        #[arg(long)]
        trunc: usize,
        /// Reduce mod M instead of exact integers.
        #[arg(long = "mod")]
        modulus: Option<u64>,
    },
    /// Modularity certificate for an eta-quotient spec like "12^2" or
    /// "48^10 * 24^-2 * 96^-4".
    Certify {
        spec: String,
        /// Certify at this level instead of the minimal admissible one.
        #[arg(long)]
        level: Option<u64>,
    },
    /// Instantiate a congruence family and scan every instance.
    ///
    /// Families: thm6.1, cor6.2, thm6.3, cor6.4, thm8.1, cor8.2, thm8.3,
    /// cor8.4. Parameters are key=value tokens: p=5 (or p=3,3), k=0, j=1,
    /// r=0, as each family requires.
    Verify {
        family: String,
        /// key=value parameters.
        params: Vec<String>,
        /// Scan bound: n runs over 0..=nmax.
        #[arg(long, default_value_t = 2000)]
        nmax: u64,
    },
    /// Empirical density of n <= X with B_l(n) = 0 mod M at checkpoints.
    Density {
        #[arg(long)]
        ell: u64,
        #[arg(long = "mod")]
        modulus: u64,
        /// Ascending checkpoints, e.g. 1000,10000,100000.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<u64>,
    },
    /// Expand an eta-quotient and apply Hecke operators T_p left to right.
    ///
    /// With a power-of-two --mod, also probes for the nilpotency prefix.
    Hecke {
        spec: String,
        /// Primes to apply, in order, e.g. 13 or 5,7,11.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        #[arg(long = "mod")]
        modulus: Option<u64>,
        /// Truncation of the initial expansion.
        #[arg(long, default_value_t = 5000)]
        trunc: usize,
    },
}

struct Failure {
    message: String,
    exit: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            exit: 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let _ = cli.seed; // reserved
    let result = match &cli.command {
        Command::Coeffs {
            ell,
            trunc,
            modulus,
        } => cmd_coeffs(&cli, *ell, *trunc, *modulus),
        Command::Certify { spec, level } => cmd_certify(&cli, spec, *level),
        Command::Verify {
            family,
            params,
            nmax,
        } => cmd_verify(&cli, family, params, *nmax),
        Command::Density {
            ell,
            modulus,
            checkpoints,
        } => cmd_density(&cli, *ell, *modulus, checkpoints),
        Command::Hecke {
            spec,
            primes,
            modulus,
            trunc,
        } => cmd_hecke(&cli, spec, primes, *modulus, *trunc),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.exit)
        }
    }
}

fn emit(cli: &Cli, content: String) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn validate_modulus(modulus: Option<u64>) -> Result<(), Failure> {
    if let Some(m) = modulus {
        if !(2..qregular::series::MAX_MODULUS).contains(&m) {
            return Err(Failure::usage(format!(
                "modulus must satisfy 2 <= M < 2^32, got {m}"
            )));
        }
    }
    Ok(())
}

fn cmd_coeffs(
    cli: &Cli,
    ell: u64,
    trunc: usize,
    modulus: Option<u64>,
) -> Result<ExitCode, Failure> {
    if ell < 2 {
        return Err(Failure::usage("--ell must be at least 2"));
    }
    validate_modulus(modulus)?;
    let series = bipartition_series(ell, trunc, modulus).series;
    let values: Vec<String> = (0..=trunc)
        .map(|n| match series.coeff(n) {
            Coefficient::Exact(v) => v.to_string(),
            Coefficient::Residue(r) => r.to_string(),
        })
        .collect();
    let mut out = String::new();
    match cli.format {
        Format::Plain => {
            for (n, v) in values.iter().enumerate() {
                writeln!(out, "{n} {v}").unwrap();
            }
        }
        Format::Csv => {
            writeln!(out, "n,value").unwrap();
            for (n, v) in values.iter().enumerate() {
                writeln!(out, "{n},{v}").unwrap();
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                n: usize,
                value: &'a str,
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                ell: u64,
                modulus: Option<u64>,
                rows: Vec<Row<'a>>,
            }
            let doc = Doc {
                ell,
                modulus,
                rows: values
                    .iter()
                    .enumerate()
                    .map(|(n, value)| Row { n, value })
                    .collect(),
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).unwrap();
        }
    }
    emit(cli, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_certify(cli: &Cli, spec: &str, level: Option<u64>) -> Result<ExitCode, Failure> {
    let quotient = parse_eta_spec(spec).map_err(|e| Failure::usage(e.to_string()))?;
    let cert = match level {
        Some(n) => {
            if quotient.terms().keys().any(|&d| n % d != 0) {
                return Err(Failure::usage(format!(
                    "level {n} is not a multiple of every eta scale"
                )));
            }
            quotient.certify_at(n)
        }
        None => quotient.certify(),
    };
    let mut doc = cert.document();
    let lead = quotient.leading_exponent();
    if !lead.is_integer() || lead < qregular::eta::Rational::new(0, 1) {
        doc.warnings.push(format!(
            "leading exponent {}/{} is not a nonnegative integer; no q-expansion exists",
            lead.numer(),
            lead.denom()
        ));
    }
    let mut out = String::new();
    match cli.format {
        Format::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).unwrap();
        }
        Format::Csv => {
            writeln!(out, "spec,level,weight,holomorphic").unwrap();
            writeln!(
                out,
                "{},{},{},{}",
                quotient, cert.level, cert.weight, cert.holomorphic
            )
            .unwrap();
        }
        Format::Plain => {
            writeln!(out, "quotient:    {quotient}").unwrap();
            writeln!(out, "level:       {}", cert.level).unwrap();
            writeln!(out, "weight:      {}", cert.weight).unwrap();
            match &cert.character_top {
                Some(top) => writeln!(out, "character:   ({top} / .)").unwrap(),
                None => writeln!(out, "character:   none (weight not integral)").unwrap(),
            }
            writeln!(out, "holomorphic: {}", cert.holomorphic).unwrap();
            writeln!(out, "cusp orders (by divisor d of the level):").unwrap();
            for (d, order) in &cert.cusp_orders {
                writeln!(out, "  d={d}: {order}").unwrap();
            }
            for w in &doc.warnings {
                writeln!(out, "warning: {w}").unwrap();
            }
        }
    }
    emit(cli, out)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_family_params(tokens: &[String]) -> Result<FamilyParams, Failure> {
    let mut params = FamilyParams::default();
    for token in tokens {
        let Some((key, value)) = token.split_once('=') else {
            return Err(Failure::usage(format!(
                "expected key=value parameter, got {token:?}"
            )));
        };
        let parse_u64 = |v: &str| {
            v.parse::<u64>()
                .map_err(|_| Failure::usage(format!("bad value for {key}: {v:?}")))
        };
        match key {
            "p" => {
                params.primes = value
                    .split(',')
                    .map(parse_u64)
                    .collect::<Result<Vec<_>, _>>()?;
            }
            "k" => params.k = Some(parse_u64(value)?),
            "j" => params.j = Some(parse_u64(value)?),
            "r" => params.r = Some(parse_u64(value)?),
            other => {
                return Err(Failure::usage(format!("unknown parameter key {other:?}")));
            }
        }
    }
    Ok(params)
}

fn cmd_verify(cli: &Cli, family: &str, tokens: &[String], nmax: u64) -> Result<ExitCode, Failure> {
    let params = parse_family_params(tokens)?;
    let instances =
        instantiate_family(family, &params).map_err(|e| Failure::usage(e.to_string()))?;
    let lab = Lab::new();
    let reports: Vec<VerificationReport> = instances
        .iter()
        .map(|instance| lab.check_progression(instance, nmax))
        .collect();
    let any_failed = reports.iter().any(|r| !r.verdict.holds());
    let mut out = String::new();
    match cli.format {
        Format::Csv => {
            writeln!(out, "{}", VerificationReport::CSV_HEADER).unwrap();
            for r in &reports {
                writeln!(out, "{}", r.csv_row()).unwrap();
            }
        }
        Format::Json => {
            let docs: Vec<_> = reports.iter().map(|r| r.document()).collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&docs).unwrap()).unwrap();
        }
        Format::Plain => {
            for r in &reports {
                let head = format!(
                    "{} [{}] B_{}({}n+{}) mod {}",
                    r.family,
                    r.parameters,
                    r.progression.ell,
                    r.progression.step,
                    r.progression.offset,
                    r.progression.modulus,
                );
                match &r.verdict {
                    Verdict::Holds => writeln!(
                        out,
                        "{head}: holds for n <= {} ({} oracle checks)",
                        r.n_max, r.oracle_samples
                    )
                    .unwrap(),
                    Verdict::Fails {
                        witness_n,
                        lhs,
                        rhs,
                    } => writeln!(out, "{head}: FAILS at n={witness_n} (lhs={lhs}, rhs={rhs})")
                        .unwrap(),
                }
            }
        }
    }
    emit(cli, out)?;
    Ok(if any_failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_density(
    cli: &Cli,
    ell: u64,
    modulus: u64,
    checkpoints: &[u64],
) -> Result<ExitCode, Failure> {
    if ell < 2 {
        return Err(Failure::usage("--ell must be at least 2"));
    }
    validate_modulus(Some(modulus))?;
    if checkpoints.is_empty() {
        return Err(Failure::usage("need at least one checkpoint"));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::usage("checkpoints must be strictly ascending"));
    }
    let max_x = *checkpoints.last().unwrap();
    if max_x > DENSITY_X_CAP {
        return Err(Failure::usage(format!(
            "checkpoint {max_x} exceeds the documented capability {DENSITY_X_CAP}"
        )));
    }
    let lab = Lab::new();
    let report = lab.density_scan(ell, modulus, checkpoints);
    let mut out = String::new();
    match cli.format {
        Format::Plain => {
            writeln!(out, "density of B_{ell}(n) = 0 mod {modulus}").unwrap();
            for p in &report.checkpoints {
                writeln!(out, "X={} count={} ratio={:.6}", p.x, p.zero_count, p.ratio).unwrap();
            }
        }
        Format::Csv => {
            writeln!(out, "X,zero_count,ratio").unwrap();
            for p in &report.checkpoints {
                writeln!(out, "{},{},{:.6}", p.x, p.zero_count, p.ratio).unwrap();
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                ell: u64,
                modulus: u64,
                checkpoints: &'a [qregular::congruence::DensityPoint],
            }
            let doc = Doc {
                ell,
                modulus,
                checkpoints: &report.checkpoints,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).unwrap();
        }
    }
    emit(cli, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_hecke(
    cli: &Cli,
    spec: &str,
    primes: &[u64],
    modulus: Option<u64>,
    trunc: usize,
) -> Result<ExitCode, Failure> {
    validate_modulus(modulus)?;
    let quotient = parse_eta_spec(spec).map_err(|e| Failure::usage(e.to_string()))?;
    let cert = quotient.certify();
    let ctx = HeckeContext::from_certificate(&cert).map_err(|e| {
        Failure::usage(format!(
            "cannot attach a Hecke context to this quotient: {e}"
        ))
    })?;
    // p^{k-1} is materialized exactly when no modulus is given; cap the
    // weight there so gigantic powers cannot wedge the process.
    if modulus.is_none() && ctx.weight > 1 << 20 {
        return Err(Failure::usage(format!(
            "weight {} needs a modulus: exact application would materialize p^(k-1)",
            ctx.weight
        )));
    }
    let initial = quotient
        .q_expansion(trunc, modulus)
        .map_err(|e| Failure::usage(e.to_string()))?;

    // Probe semantics only make sense modulo a power of two.
    let probing = matches!(modulus, Some(m) if m.is_power_of_two());
    let vanished_after = if probing && !primes.is_empty() {
        let report =
            nilpotency_probe(&initial, primes, &ctx).map_err(|e| Failure::usage(e.to_string()))?;
        report.vanished_after
    } else {
        None
    };

    let mut series = initial;
    for &p in primes {
        series = apply_tp(&series, p, &ctx).map_err(|e| Failure::usage(e.to_string()))?;
    }
    let head: Vec<(usize, String)> = (0..=series.truncation())
        .filter_map(|n| {
            let c = series.coeff(n);
            if c.is_zero() {
                None
            } else {
                Some((n, c.to_string()))
            }
        })
        .take(20)
        .collect();

    let mut out = String::new();
    match cli.format {
        Format::Plain => {
            writeln!(out, "quotient:  {quotient}").unwrap();
            writeln!(
                out,
                "level={} weight={} applied={:?}",
                cert.level, cert.weight, primes
            )
            .unwrap();
            writeln!(out, "final truncation: {}", series.truncation()).unwrap();
            if probing {
                match vanished_after {
                    Some(r) => writeln!(out, "probe: vanished after {r} operator(s)").unwrap(),
                    None => writeln!(out, "probe: not reached within truncation").unwrap(),
                }
            }
            if head.is_empty() {
                writeln!(out, "all coefficients vanish up to the truncation").unwrap();
            } else {
                writeln!(out, "first surviving coefficients:").unwrap();
                for (n, v) in &head {
                    writeln!(out, "  q^{n}: {v}").unwrap();
                }
            }
        }
        Format::Csv => {
            writeln!(out, "n,value").unwrap();
            for (n, v) in &head {
                writeln!(out, "{n},{v}").unwrap();
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct HeadRow<'a> {
                n: usize,
                value: &'a str,
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                spec: String,
                level: u64,
                primes: &'a [u64],
                modulus: Option<u64>,
                final_truncation: usize,
                vanished_after: Option<usize>,
                head: Vec<HeadRow<'a>>,
            }
            let doc = Doc {
                spec: quotient.to_string(),
                level: cert.level,
                primes,
                modulus,
                final_truncation: series.truncation(),
                vanished_after,
                head: head
                    .iter()
                    .map(|(n, v)| HeadRow { n: *n, value: v })
                    .collect(),
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap()).unwrap();
        }
    }
    emit(cli, out)?;
    Ok(ExitCode::SUCCESS)
}

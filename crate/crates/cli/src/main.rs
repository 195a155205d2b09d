mod commands;
mod doc;
mod report;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::report::Report;

#[derive(Parser, Debug)]
#[command(name = "orepi", version, about = "Exact PI checks for quantum algebra families")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Selects an algebra: either a family with parameters, or a presentation file.
#[derive(Args, Debug, Clone, Default)]
pub struct Instance {
    /// Family tag (Bh, Hpq, M2, UqB2, WeylMalt, WeylAJ, BiQuad3, ThreeCyclic, DownUp, Bqf, QuantumPlane).
    #[arg(long)]
    pub family: Option<String>,
    /// Field spec: Q, cyclo:N, ratfunc:p,q,... or gf:p[:poly]. Inferred from the parameters when omitted.
    #[arg(long)]
    pub field: Option<String>,
    /// Parameters as name=expr, comma separated or repeated.
    #[arg(long = "params", value_delimiter = ',')]
    pub params: Vec<String>,
    /// The polynomial f(t) of a Bqf algebra.
    #[arg(long = "f")]
    pub f: Option<String>,
    /// Shorthand for --params q=EXPR.
    #[arg(long = "q")]
    pub q: Option<String>,
    /// Presentation JSON file, used instead of --family.
    #[arg(long, conflicts_with = "family")]
    pub file: Option<std::path::PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in families and their parameters.
    Families,
    /// Build a presentation and print it as JSON.
    Build {
        #[command(flatten)]
        inst: Instance,
        /// Also write the presentation file here.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Reduce expressions to normal form.
    Normalize {
        #[command(flatten)]
        inst: Instance,
        /// Expression in the generators, e.g. "y*x^2 - 3*t".
        #[arg(long = "expr", required = true)]
        exprs: Vec<String>,
    },
    /// Verify the family identities for exponents up to --n-max.
    IdentityCheck {
        #[command(flatten)]
        inst: Instance,
        /// Lemma name such as H.yxn; defaults to every lemma of the family.
        #[arg(long)]
        lemma: Vec<String>,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
    },
    /// Check centrality of the family's candidates or of given elements.
    CentralCheck {
        #[command(flatten)]
        inst: Instance,
        #[arg(long = "element")]
        elements: Vec<String>,
    },
    /// Decide whether the algebra satisfies a polynomial identity.
    PiDecide {
        #[command(flatten)]
        inst: Instance,
        /// Report the verdict without verifying its witness.
        #[arg(long)]
        no_verify: bool,
    },
    /// Resolve every overlap and containment ambiguity of the rules.
    Confluence {
        #[command(flatten)]
        inst: Instance,
    },
    /// Check that central elements and bounded words span up to a degree.
    Spanning {
        #[command(flatten)]
        inst: Instance,
        /// Exponent caps per generator in generator order; taken from the decider when omitted.
        #[arg(long, value_delimiter = ',')]
        caps: Vec<u32>,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Build the n x n quantum-plane representation at a primitive n-th root of unity.
    Matrep {
        #[arg(long)]
        n: usize,
        /// The root of unity; defaults to zN.
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        field: Option<String>,
    },
    /// Compute the multilinear identities of degree d of the full matrix algebra M_n.
    IdentitySearch {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value = "Q")]
        field: String,
    },
}

/// Failure to run a command at all; exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    let start = Instant::now();
    let (name, out) = match cli.command {
        Command::Families => ("families", commands::families()),
        Command::Build { inst, out } => ("build", commands::build(&inst, out.as_deref())),
        Command::Normalize { inst, exprs } => ("normalize", commands::normalize(&inst, &exprs)),
        Command::IdentityCheck { inst, lemma, n_max } => ("identity-check", commands::identity_check(&inst, &lemma, n_max)),
        Command::CentralCheck { inst, elements } => ("central-check", commands::central_check(&inst, &elements)),
        Command::PiDecide { inst, no_verify } => ("pi-decide", commands::pi_decide(&inst, !no_verify)),
        Command::Confluence { inst } => ("confluence", commands::confluence(&inst)),
        Command::Spanning { inst, caps, degree } => ("spanning", commands::spanning(&inst, &caps, degree)),
        Command::Matrep { n, q, field } => ("matrep", commands::matrep(n, q.as_deref(), field.as_deref())),
        Command::IdentitySearch { n, degree, field } => {
            ("identity-search", commands::identity_search(n, degree, &field))
        }
    };
    match out {
        Ok((checks, result)) => {
            let report = Report::new(name, args, checks, result, start.elapsed().as_millis() as u64);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

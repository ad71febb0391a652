//! `bosesep`: command-line front end.
//!
//! Exit codes: 0 ok or Separable, 2 bad arguments / invalid input /
//! failed precondition, 3 I/O, 4 EntangledNPT, 5 Undetermined,
//! 6 extraction failed, 7 verification failed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use bosesep::bosonic::{bosonic_dim, OccupationVector};
use bosesep::format::{read_state, write_json, write_state, CertificateFile, ReportFile};
use bosesep::hunt::{run_hunt, verify_candidate, CandidateRecord, Detector, HuntConfig};
use bosesep::linalg::{normalized, partial_transpose};
use bosesep::rng::Seed;
use bosesep::separability::{
    classify, extract_certificate, ExtractionConfig, SearchConfig, Verdict,
};
use bosesep::states::{self, Basis, StateRecord};
use bosesep::{Error, Execution, SystemShape, C64};
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NPT: u8 = 4;
const EXIT_UNDETERMINED: u8 = 5;
const EXIT_EXTRACTION: u8 = 6;
const EXIT_VERIFY: u8 = 7;

#[derive(Parser)]
#[command(
    name = "bosesep",
    version,
    about = "Separability analysis for multipartite identical-boson states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the dimension of the symmetric subspace.
    Dim {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Write a named or random state file.
    Gen(GenArgs),
    /// Classify a state and print the verdict.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Also write a report file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Extract an explicit separable decomposition.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Attempt extraction even if the classifier does not say Separable.
        #[arg(long)]
        force: bool,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Partially transpose a state over the given parties.
    Pt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        parties: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search the bound-entanglement rank window for flagged PPT states.
    Hunt(HuntArgs),
    /// Re-check every record of a hunt output file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Product,
    Ghz,
    Dicke,
    RandomPure,
    RandomSeparable,
    RandomRank,
    BasisMixture,
    SymmetricMixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Full,
    Symmetric,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    rank: Option<usize>,
    /// Occupation numbers for `dicke`, e.g. `2,1,0`.
    #[arg(long, value_delimiter = ',')]
    occ: Option<Vec<usize>>,
    /// Local vector for `product`, e.g. `0.6,0+0.8i`; normalized before use.
    #[arg(long, value_delimiter = ',')]
    vector: Option<Vec<String>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to `full` for k <= 3 and `symmetric` otherwise.
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
    /// Standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetectorArg {
    Ccnr,
    ExtractionFailure,
    Both,
}

#[derive(clap::Args)]
struct HuntArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSONL output; records go to standard output and the summary to
    /// standard error when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, value_enum, default_value_t = DetectorArg::Ccnr)]
    detector: DetectorArg,
    /// Search restarts per extraction step.
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            Error::ExtractionFailed { .. } => EXIT_EXTRACTION,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dim { n, k } => cmd_dim(n, k),
        Command::Gen(args) => cmd_gen(args),
        Command::Classify { input, report } => cmd_classify(&input, report.as_deref()),
        Command::Decompose {
            input,
            out,
            seed,
            force,
            restarts,
        } => cmd_decompose(&input, &out, seed, force, restarts),
        Command::Pt {
            input,
            parties,
            out,
        } => cmd_pt(&input, &parties, &out),
        Command::Hunt(args) => cmd_hunt(args),
        Command::Verify { input } => cmd_verify(&input),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn cmd_dim(n: usize, k: usize) -> CmdResult {
    println!("{}", bosonic_dim(n, k)?);
    Ok(0)
}

fn parse_vector(entries: &[String]) -> Result<Vec<C64>, Failure> {
    let v = entries
        .iter()
        .map(|s| {
            C64::from_str(s.trim())
                .map_err(|_| usage(format!("cannot parse {s:?} as a complex number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    normalized(&v).ok_or_else(|| usage("vector is zero"))
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let shape = SystemShape::new(args.n, args.k)?;
    let seed = Seed::new(args.seed, 0);
    let need_rank = || {
        args.rank
            .ok_or_else(|| usage("--rank is required for this kind"))
    };
    let state = match args.kind {
        Kind::Product => {
            let entries = args
                .vector
                .as_deref()
                .ok_or_else(|| usage("--vector is required for product"))?;
            let f = parse_vector(entries)?;
            if f.len() != args.n {
                return Err(usage(format!(
                    "vector has {} entries, expected n={}",
                    f.len(),
                    args.n
                )));
            }
            states::product_power(&f, args.k)?
        }
        Kind::Ghz => states::ghz_like(args.n, args.k)?,
        Kind::Dicke => {
            let occ = args
                .occ
                .clone()
                .ok_or_else(|| usage("--occ is required for dicke"))?;
            states::dicke_state(&OccupationVector::new(occ), shape)?
        }
        Kind::RandomPure => states::random_symmetric_pure(shape, seed)?,
        Kind::RandomSeparable => states::random_separable_mixture(shape, need_rank()?, seed)?.0,
        Kind::RandomRank => states::random_rank_r_symmetric(shape, need_rank()?, seed)?,
        Kind::BasisMixture => states::basis_mixture(args.n, args.k)?,
        Kind::SymmetricMixed => states::symmetric_mixed(shape)?,
    };
    let basis = match args.basis {
        Some(BasisArg::Full) => Basis::Full,
        Some(BasisArg::Symmetric) => Basis::Symmetric,
        None if args.k >= 4 => Basis::Symmetric,
        None => Basis::Full,
    };
    let state = state.to_basis(basis)?;
    match &args.out {
        Some(path) => write_state(path, &state).map_err(with_path(path))?,
        None => {
            let text = bosesep::format::to_json(&bosesep::format::StateFile::from_record(&state))?;
            println!("{text}");
        }
    }
    Ok(0)
}

fn with_path(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    }
}

fn load(path: &Path) -> Result<StateRecord, Failure> {
    read_state(path).map_err(with_path(path))
}

fn cmd_classify(input: &Path, report_path: Option<&Path>) -> CmdResult {
    let state = load(input)?;
    let report = classify(&state);
    println!("{}", report.summary());
    if let Some(path) = report_path {
        write_json(path, &ReportFile::new(report.clone(), None)).map_err(with_path(path))?;
    }
    Ok(match report.verdict {
        Verdict::Separable => 0,
        Verdict::EntangledNpt => EXIT_NPT,
        Verdict::Undetermined => EXIT_UNDETERMINED,
        Verdict::InvalidInput => EXIT_USAGE,
    })
}

fn cmd_decompose(input: &Path, out: &Path, seed: u64, force: bool, restarts: usize) -> CmdResult {
    let state = load(input)?;
    let config = ExtractionConfig {
        search: SearchConfig {
            restarts,
            ..SearchConfig::default()
        },
        seed: Seed::new(seed, 0),
        force,
        ..ExtractionConfig::default()
    };
    let cert = extract_certificate(&state, &config)?;
    write_json(out, &CertificateFile::from_certificate(&cert)).map_err(with_path(out))?;
    println!(
        "terms={} trace_distance={:e}",
        cert.terms.len(),
        cert.trace_distance
    );
    Ok(0)
}

fn cmd_pt(input: &Path, parties: &[usize], out: &Path) -> CmdResult {
    let state = load(input)?;
    let full = state.full_matrix()?;
    let pt = partial_transpose(&full, &state.shape, parties)?;
    let provenance = format!(
        "partial_transpose(parties={parties:?}) of {}",
        state.provenance
    );
    write_state(
        out,
        &StateRecord::new(state.shape, Basis::Full, pt, provenance)?,
    )
    .map_err(with_path(out))?;
    Ok(0)
}

fn cmd_hunt(args: HuntArgs) -> CmdResult {
    let shape = SystemShape::new(args.n, args.k)?;
    let mut config = HuntConfig::new(shape, args.rank, args.trials, args.seed)?;
    config.projection_iters = args.iters;
    config.detector = match args.detector {
        DetectorArg::Ccnr => Detector::Ccnr,
        DetectorArg::ExtractionFailure => Detector::ExtractionFailure,
        DetectorArg::Both => Detector::Both,
    };
    config.search.restarts = args.restarts;
    if args.sequential {
        config.exec = Execution::Sequential;
        config.search.exec = Execution::Sequential;
    }
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| with_path(path)(e.into()))?;
            let mut sink = BufWriter::new(file);
            let summary = run_hunt(&config, &mut sink)?;
            sink.flush()?;
            println!("{summary}");
        }
        None => {
            let stdout = io::stdout();
            let mut sink = stdout.lock();
            let summary = run_hunt(&config, &mut sink)?;
            eprintln!("{summary}");
        }
    }
    Ok(0)
}

fn cmd_verify(input: &Path) -> CmdResult {
    let text = std::fs::read_to_string(input).map_err(|e| with_path(input)(e.into()))?;
    let (mut ok, mut failed) = (0usize, 0usize);
    for (line_no, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let record = CandidateRecord::from_json_line(line)
            .map_err(|e| usage(format!("line {}: {e}", line_no + 1)))?;
        let v =
            verify_candidate(&record).map_err(|e| usage(format!("line {}: {e}", line_no + 1)))?;
        if v.passed {
            ok += 1;
        } else {
            failed += 1;
            for m in &v.mismatches {
                println!("trial {}: {m}", record.trial_index);
            }
        }
    }
    println!("verified={ok} failed={failed}");
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
}

//! `nlab` — generate, select, and analyze long digit streams, and run the
//! built-in verification recipes.
//!
//! Exit codes: 0 success (recipe passed), 1 recipe failed, 2 usage or
//! hypothesis error.

use clap::{Args, Parser, Subcommand};
use nlab::cli::{self, AnalyzeOptions, Defaults, StreamFile};
use nlab::selectors::SelectionSequence;
use nlab::Error;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nlab",
    version,
    about = "digit-stream laboratory: normality analysis of generated and selected streams"
)]
struct Cli {
    /// Key=value config file overriding analyzer defaults
    /// (tau_scale, tau_floor, max_table_entries).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a digit stream from a generator spec.
    Gen {
        /// Generator spec, e.g. "champernowne:b=2", "iid:b=2,seed=42",
        /// "thm3:b=2,K=2,seed=7", "dup:r=2,inner=(champernowne:b=2)".
        #[arg(short, long)]
        spec: String,
        /// Number of digits to emit.
        #[arg(short, long)]
        n: u64,
        /// Output stream file ("-" for stdout).
        #[arg(short, long, default_value = "-")]
        out: String,
    },
    /// Select a subsequence of a stream file.
    Select {
        /// Selection spec, e.g. "ap:k=2,l=3", "periodic:m=6,r=1|2|4|5",
        /// "evper:pre=3|7;m=2,r=1", "explicit:5|17|99".
        #[arg(short, long)]
        sel: String,
        /// Input stream file ("-" for stdin).
        #[arg(short, long, default_value = "-")]
        input: String,
        /// Output stream file ("-" for stdout).
        #[arg(short, long, default_value = "-")]
        out: String,
    },
    /// Count pattern frequencies and judge consistency with normality.
    Analyze {
        /// Input stream file ("-" for stdin).
        #[arg(short, long, default_value = "-")]
        input: String,
        /// Maximum pattern length.
        #[arg(short = 'k', long, default_value_t = 3)]
        max_len: u32,
        /// Target measure spec ("uniform:b=2", "weights:1/3|2/3",
        /// "thm3:b=2,K=2"); defaults to uniform over the analyzed alphabet.
        #[arg(short, long)]
        measure: Option<String>,
        /// Recode into width-K blocks before analysis.
        #[arg(long)]
        block: Option<u32>,
        /// Also count one block-aligned starred pattern, e.g. "0*|*1"
        /// (requires --block).
        #[arg(long)]
        starred: Option<String>,
        /// Flat deviation tolerance (default: adaptive policy).
        #[arg(long)]
        tau: Option<f64>,
        /// Comma-separated checkpoint horizons (default: N/1000,N/100,N/10,N).
        #[arg(long)]
        schedule: Option<String>,
        /// Horizon; defaults to everything the payload supports.
        #[arg(short, long)]
        n: Option<u64>,
        /// Write the machine-readable report here ("-" for stdout).
        #[arg(short, long)]
        out: Option<String>,
        /// Print the human table to stderr as well.
        #[arg(long)]
        table: bool,
    },
    /// Run an end-to-end verification recipe.
    Verify {
        #[command(subcommand)]
        recipe: Recipe,
    },
}

#[derive(Subcommand)]
enum Recipe {
    /// Doubled-digit stream: non-normal overall, normal along every
    /// arithmetic progression of step >= 2.
    Thm1(Thm1Args),
    /// Zero-filled stream of exact density: non-normal by a computable
    /// margin, recoverable bit-exactly by selection.
    Prop2(Prop2Args),
    /// Near-full periodic selections preserve small discrepancy; low-density
    /// filling breaks it.
    Thm2(Thm2Args),
    /// Parity-perturbed block point: non-normal at block level, normal along
    /// thin periodic selections.
    Thm3(Thm3Args),
}

#[derive(Args)]
struct Thm1Args {
    #[arg(short, long, default_value_t = 2)]
    base: u32,
    #[arg(short, long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(short, long)]
    out: Option<String>,
}

#[derive(Args)]
struct Prop2Args {
    #[arg(short, long, default_value_t = 2)]
    base: u32,
    /// Selection carrying the inner stream (default: even positions,
    /// density 1/2).
    #[arg(short, long, default_value = "periodic:m=2,r=2")]
    sel: String,
    #[arg(long, default_value_t = 11)]
    seed: u64,
    #[arg(short, long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(short, long)]
    out: Option<String>,
}

#[derive(Args)]
struct Thm2Args {
    #[arg(short, long, default_value_t = 2)]
    base: u32,
    /// Family parameter list: selections of density 1-1/t.
    #[arg(long, default_value = "2,4,8,16", value_delimiter = ',')]
    family: Vec<u64>,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    #[arg(short, long, default_value_t = 1_000_000)]
    n: u64,
    #[arg(short, long)]
    out: Option<String>,
}

#[derive(Args)]
struct Thm3Args {
    #[arg(short, long, default_value_t = 2)]
    base: u32,
    /// Block width K.
    #[arg(short = 'K', long, default_value_t = 2)]
    width: u32,
    /// Periodic selection to test (must pass the thickness check).
    #[arg(short, long, default_value = "periodic:m=2,r=1")]
    sel: String,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Horizon in blocks.
    #[arg(short, long, default_value_t = 1_000_000)]
    n_blocks: u64,
    /// Block-alignment offset L >= 1 (L-1 padding digits are prefixed).
    #[arg(short = 'L', long, default_value_t = 1)]
    offset: u64,
    #[arg(short, long)]
    out: Option<String>,
}

fn read_input(path: &str) -> nlab::Result<StreamFile> {
    if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        cli::read_stream(&mut buf.as_slice())
    } else {
        cli::read_stream_from_path(Path::new(path))
    }
}

fn write_output(
    path: &str,
    base: u32,
    digits: &[u32],
    extra: &cli::StreamHeaderExtra,
) -> nlab::Result<()> {
    if path == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        cli::write_stream(&mut lock, base, digits, extra)
    } else {
        cli::write_stream_to_path(Path::new(path), base, digits, extra)
    }
}

fn write_text(path: &Option<String>, text: &str) -> nlab::Result<()> {
    match path.as_deref() {
        None | Some("-") => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(p) => {
            let path = Path::new(p);
            let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = match dir {
                Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
                None => tempfile::NamedTempFile::new_in(".")?,
            };
            tmp.as_file_mut().write_all(text.as_bytes())?;
            tmp.persist(path).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

fn parse_schedule(text: &str) -> nlab::Result<Vec<u64>> {
    text.split(',')
        .map(|x| {
            x.trim().parse().map_err(|_| Error::Parse {
                input: text.to_string(),
                pos: 0,
                msg: format!("bad horizon {x:?}"),
            })
        })
        .collect()
}

fn run(cli: Cli) -> nlab::Result<bool> {
    let defaults = match &cli.config {
        Some(path) => Defaults::from_config_text(&std::fs::read_to_string(path)?)?,
        None => Defaults::default(),
    };
    match cli.command {
        Command::Gen { spec, n, out } => {
            let (base, digits, extra) = cli::cmd_gen(&spec, n)?;
            write_output(&out, base, &digits, &extra)?;
            Ok(true)
        }
        Command::Select { sel, input, out } => {
            let stream = read_input(&input)?;
            let selected = cli::cmd_select(&stream, &sel)?;
            if selected.missing > 0 {
                eprintln!(
                    "warning: {} selected indices past the end of the input",
                    selected.missing
                );
            }
            write_output(&out, stream.base, &selected.digits, &selected.extra)?;
            Ok(true)
        }
        Command::Analyze {
            input,
            max_len,
            measure,
            block,
            starred,
            tau,
            schedule,
            n,
            out,
            table,
        } => {
            let stream = read_input(&input)?;
            let opts = AnalyzeOptions {
                max_len,
                measure: measure
                    .as_deref()
                    .map(nlab::generators::MeasureSpec::parse)
                    .transpose()?,
                block_width: block,
                starred,
                tau,
                schedule: schedule.as_deref().map(parse_schedule).transpose()?,
                n,
                defaults,
            };
            let output = cli::cmd_analyze(&stream, &opts)?;
            write_text(&out, &output.doc.to_text())?;
            if table || out.is_some() {
                eprint!("{}", output.doc.human_table());
            }
            Ok(true)
        }
        Command::Verify { recipe } => {
            let (outcome, out_path) = match recipe {
                Recipe::Thm1(a) => (cli::recipes::thm1(a.base, a.n, &defaults.budget)?, a.out),
                Recipe::Prop2(a) => {
                    let sel = SelectionSequence::parse(&a.sel)?;
                    (
                        cli::recipes::prop2(a.base, &sel, a.seed, a.n, &defaults.budget)?,
                        a.out,
                    )
                }
                Recipe::Thm2(a) => (
                    cli::recipes::thm2(a.base, &a.family, a.seed, a.n, &defaults.budget)?,
                    a.out,
                ),
                Recipe::Thm3(a) => {
                    let sel = SelectionSequence::parse(&a.sel)?;
                    (
                        cli::recipes::thm3(
                            a.base,
                            a.width,
                            &sel,
                            a.seed,
                            a.n_blocks,
                            a.offset,
                            &defaults.budget,
                        )?,
                        a.out,
                    )
                }
            };
            let doc = outcome.to_doc();
            eprint!("{}", doc.human_table());
            if out_path.is_some() {
                write_text(&out_path, &doc.to_text())?;
            }
            Ok(outcome.pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

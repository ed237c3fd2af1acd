use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magcat::commands::{self, CommandError, Emission, Format};
use magcat::corpus;
use magcat::fcat::MetricSpace;
use magcat::formats::{parse_input, parse_point_map, parse_twists, Input, Kind};
use magcat::magnitude::Side;
use magcat::novikov::Exponent;

#[derive(Parser)]
#[command(name = "magcat", version, about = "Exact magnitude and magnitude homology of enriched categories")]
struct Cli {
    /// Keep terms up to q^CUTOFF (an integer or p/q).
    #[arg(long, global = true, default_value = "5")]
    cutoff: String,
    /// Highest chain degree to build.
    #[arg(long, global = true)]
    max_n: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Text)]
    format: OutFormat,
    /// Refuse complexes with more cells than this.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    guardrail_cells: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct Source {
    /// File path, `-` for stdin, or `builtin:<name>`.
    input: Option<String>,
    /// Literal input text instead of a file.
    #[arg(long, conflicts_with = "input")]
    inline: Option<String>,
    /// graph, digraph, metric, poset, category, group or action; inferred when absent.
    #[arg(long)]
    kind: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Magnitude as a truncated series.
    Mag(Source),
    /// Weighting at each object.
    Weighting(Source),
    /// Coweighting at each object.
    Coweighting(Source),
    /// Structural properties and the applicable inversion strategies.
    Classify(Source),
    /// Magnitude homology at one level.
    Homology {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "1")]
        level: String,
        /// Start object for pointed homology.
        #[arg(long)]
        start: Option<String>,
        /// End object; needs --start.
        #[arg(long)]
        end: Option<String>,
    },
    /// Alternating betti sums against magnitude coefficients.
    EulerCheck(Source),
    /// Graded Hochschild homology against magnitude homology.
    HochschildCheck {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "1")]
        level: String,
    },
    /// Pages of the length-filtration spectral sequence.
    Specseq {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2)]
        page: u64,
        /// Largest filtration degree.
        #[arg(long, default_value_t = 5)]
        max_l: u64,
    },
    /// Reduced path homology of a digraph.
    Pathhom {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 2)]
        max_p: usize,
    },
    /// Möbius function of a finite poset.
    Mobius(Source),
    /// Poincaré polynomial of a ranked poset.
    Poincare(Source),
    /// Growth series and magnitude of a group.
    Growth(Source),
    /// Metric fibrations.
    Fib {
        #[command(subcommand)]
        command: FibCommand,
    },
    /// Parse, validate and print the canonical form.
    Validate(Source),
    /// Run the acceptance suite.
    Check {
        #[command(subcommand)]
        command: CheckCommand,
    },
}

#[derive(Subcommand)]
enum FibCommand {
    /// Total space of a base with twisted copies of a fiber.
    Build {
        #[arg(long)]
        base: String,
        #[arg(long)]
        fiber: String,
        /// Lines `u -- v : labels`, one per twisted base edge.
        #[arg(long)]
        twists: Option<String>,
    },
    /// Decide whether a map of metric spaces is a metric fibration.
    Check {
        #[arg(long)]
        total: String,
        #[arg(long)]
        base: String,
        /// Lines `a -> x`.
        #[arg(long)]
        map: String,
    },
    /// Compare Mag E with Mag X times Mag F.
    ProductCheck(Source),
}

#[derive(Subcommand)]
enum CheckCommand {
    All {
        #[arg(long, default_value = "builtin")]
        corpus: String,
    },
}

fn read_text(spec: &str) -> Result<String, CommandError> {
    if spec == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CommandError::Validation(format!("stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(spec).map_err(|e| CommandError::Validation(format!("{spec}: {e}")))
}

fn load(spec: &str, kind: Option<Kind>) -> Result<Input, CommandError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let input = corpus::get(name).ok_or_else(|| {
            CommandError::Validation(format!("unknown built-in '{name}'; known: {}", corpus::NAMES.join(", ")))
        })?;
        return match kind {
            Some(k) if k != input.kind() => {
                Err(CommandError::Validation(format!("built-in '{name}' is a {}, not a {k}", input.kind())))
            }
            _ => Ok(input),
        };
    }
    let text = read_text(spec)?;
    parse_input(&text, kind).map_err(|e| CommandError::Validation(format!("{spec}: {e}")))
}

fn source(s: &Source) -> Result<Input, CommandError> {
    let kind = s.kind.as_deref().map(str::parse::<Kind>).transpose().map_err(|e| CommandError::Validation(e.to_string()))?;
    match (&s.input, &s.inline) {
        (_, Some(text)) => parse_input(text, kind).map_err(|e| CommandError::Validation(e.to_string())),
        (Some(path), None) => load(path, kind),
        (None, None) => Err(CommandError::Validation("no input given".into())),
    }
}

fn metric_of(spec: &str) -> Result<MetricSpace, CommandError> {
    let input = load(spec, None)?;
    input.metric().ok_or_else(|| CommandError::Validation(format!("{spec}: a {} is not a metric space", input.kind())))
}

fn exponent(s: &str, what: &str) -> Result<Exponent, CommandError> {
    s.parse().map_err(|e| CommandError::Validation(format!("--{what}: {e}")))
}

fn level(s: &str) -> Result<Exponent, CommandError> {
    exponent(s, "level")
}

fn run(cli: &Cli) -> Result<(Emission, bool), CommandError> {
    let cutoff = || exponent(&cli.cutoff, "cutoff");
    let ok = |e: Emission| (e, true);
    Ok(match &cli.command {
        Command::Mag(s) => ok(commands::magnitude(&source(s)?, &cutoff()?)?),
        Command::Weighting(s) => ok(commands::weights(&source(s)?, &cutoff()?, Side::Weighting)?),
        Command::Coweighting(s) => ok(commands::weights(&source(s)?, &cutoff()?, Side::Coweighting)?),
        Command::Classify(s) => ok(commands::classify(&source(s)?)?),
        Command::Homology { source: s, level: l, start, end } => ok(commands::homology(
            &source(s)?,
            &level(l)?,
            cli.max_n.unwrap_or(4),
            start.as_deref(),
            end.as_deref(),
        )?),
        Command::EulerCheck(s) => ok(commands::euler_check(&source(s)?, &cutoff()?, cli.max_n)?),
        Command::HochschildCheck { source: s, level: l } => ok(commands::hochschild_check(
            &source(s)?,
            &level(l)?,
            cli.max_n.unwrap_or(3),
            cli.guardrail_cells,
        )?),
        Command::Specseq { source: s, page, max_l } => {
            ok(commands::specseq(&source(s)?, *page, *max_l, cli.max_n.unwrap_or(5))?)
        }
        Command::Pathhom { source: s, max_p } => ok(commands::pathhom(&source(s)?, *max_p)?),
        Command::Mobius(s) => ok(commands::mobius(&source(s)?)?),
        Command::Poincare(s) => ok(commands::poincare(&source(s)?)?),
        Command::Growth(s) => ok(commands::growth(&source(s)?, &cutoff()?)?),
        Command::Fib { command } => match command {
            FibCommand::Build { base, fiber, twists } => {
                let (base, fiber) = (metric_of(base)?, metric_of(fiber)?);
                let twists = match twists {
                    Some(path) => parse_twists(&read_text(path)?, &base, &fiber)
                        .map_err(|e| CommandError::Validation(format!("{path}: {e}")))?,
                    None => Vec::new(),
                };
                ok(commands::fib_build(&base, &fiber, &twists)?)
            }
            FibCommand::Check { total, base, map } => {
                let (total, base) = (metric_of(total)?, metric_of(base)?);
                let projection = parse_point_map(&read_text(map)?, &total, &base)
                    .map_err(|e| CommandError::Validation(format!("{map}: {e}")))?;
                ok(commands::fib_check(&total, &base, &projection)?)
            }
            FibCommand::ProductCheck(s) => ok(commands::fib_product_check(&source(s)?, &cutoff()?)?),
        },
        Command::Validate(s) => ok(commands::validate(&source(s)?)?),
        Command::Check { command: CheckCommand::All { corpus } } => {
            if corpus != "builtin" {
                return Err(CommandError::Validation(format!("unknown corpus '{corpus}'; only 'builtin' ships")));
            }
            commands::check_all()
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let format = match cli.format {
        OutFormat::Text => Format::Text,
        OutFormat::Json => Format::Json,
    };
    match run(&cli) {
        Ok((emission, passed)) => {
            print!("{}", emission.render(format));
            ExitCode::from(if passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

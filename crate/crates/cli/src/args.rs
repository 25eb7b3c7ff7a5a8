use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "gelkit", version, about = "Degree distributions, gelation and component sizes of step-growth polymer networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Marginal degree distribution u(n).
    Degree(StateCmd),
    /// First three degree moments, by summation and in closed form.
    Moments(StateCmd),
    /// Gelation criterion, gel time and gel conversion.
    Gel(GelCmd),
    /// Finite-component size distribution w(n).
    Sizedist(SizeCmd),
    /// Gel fraction, smallest fixed point r0 and expected component size.
    Stats(StateCmd),
    /// Coefficients of the n^-3/2 large-size asymptote.
    Asymptote(StateCmd),
    /// Monte Carlo ensemble of simulated networks.
    Mc(McCmd),
    /// Simulated against analytic w(n), with distances and z-scores.
    Validate(ValidateCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fft,
    Direct,
    Newton,
}

impl From<MethodArg> for gelkit::Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fft => gelkit::Method::PerSizeFft,
            MethodArg::Direct => gelkit::Method::DirectConvolution,
            MethodArg::Newton => gelkit::Method::SeriesInversion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AssignmentArg {
    Quota,
    Multinomial,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MixArgs {
    /// Functionality distribution, e.g. "1:24/25,6:1/25" or '{"3":1}'.
    #[arg(long)]
    pub mix: Option<String>,
    /// File holding the functionality distribution in either syntax.
    #[arg(long, value_name = "PATH")]
    pub mix_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MixOpts {
    #[command(flatten)]
    pub source: MixArgs,
    /// Rescale fractions that do not add up to one.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct AtArgs {
    /// Conversion c: a value, a list "a,b,c" or a grid "start:step:end".
    #[arg(long, value_name = "X")]
    pub conversion: Option<String>,
    /// Time t, same syntax as --conversion; "inf" is accepted.
    #[arg(long, value_name = "X")]
    pub time: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateCmd {
    #[command(flatten)]
    pub mix: MixOpts,
    #[command(flatten)]
    pub at: AtArgs,
    /// Rate constant k_p; time is measured in units of 1/k_p.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct GelCmd {
    #[command(flatten)]
    pub mix: MixOpts,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct SizeArgs {
    /// Largest component size to report.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub nmax: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Newton)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct SizeCmd {
    #[command(flatten)]
    pub state: StateCmd,
    #[command(flatten)]
    pub size: SizeArgs,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..=u32::MAX as u64))]
    pub vertices: u64,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = AssignmentArg::Quota)]
    pub assignment: AssignmentArg,
    /// Accept bonds between two stubs of the same vertex.
    #[arg(long)]
    pub allow_self_loops: bool,
    /// Reject a second bond between an already linked pair.
    #[arg(long)]
    pub no_multi_edges: bool,
    /// Gzipped `size<TAB>count` table of all components over all runs.
    #[arg(long, value_name = "PATH")]
    pub dump_components: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McCmd {
    #[command(flatten)]
    pub state: StateCmd,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
pub struct ValidateCmd {
    #[command(flatten)]
    pub state: StateCmd,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Largest component size to compare.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub nmax: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Newton)]
    pub method: MethodArg,
}

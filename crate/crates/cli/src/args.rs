use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eikotomo::reconstruct::CombineMode;
use eikotomo::transforms::{FilterKind, FilterSpec, Normalization, Padding};

#[derive(Debug, Parser)]
#[command(name = "eikotomo", version, about = "Eikonal travel-time tomography experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a slowness model as a grid file and PGM preview.
    Phantom(PhantomCmd),
    /// Solve the eikonal equation for every source and record boundary times.
    Forward(ForwardCmd),
    /// Reconstruct slowness from an eikonal sinogram.
    Reconstruct(ReconstructCmd),
    /// Compare two grid files.
    Compare(CompareCmd),
    /// Run a named end-to-end experiment.
    Run(RunCmd),
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Grid spacing.
    #[arg(long, default_value_t = 0.01)]
    pub h: f64,
    /// The grid covers [-extent, extent]^2.
    #[arg(long, default_value_t = 0.8)]
    pub extent: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 0.75)]
    pub radius: f64,
    #[arg(long, default_value_t = 18)]
    pub sources: usize,
    #[arg(long, default_value_t = 153)]
    pub receivers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Stop sweeping once no node changes by more than this.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_sweeps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PhantomSource {
    /// Preset name (see `phantom --phantom help` for the list).
    #[arg(long, alias = "name")]
    pub phantom: Option<String>,
    /// Custom phantom as a JSON spec.
    #[arg(long, conflicts_with = "phantom")]
    pub phantom_file: Option<PathBuf>,
    /// Contrast of the example1 box.
    #[arg(long)]
    pub f0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PhantomCmd {
    #[command(flatten)]
    pub source: PhantomSource,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseScaleArg {
    PerSource,
    Global,
}

#[derive(Debug, Args)]
pub struct ForwardCmd {
    #[command(flatten)]
    pub source: PhantomSource,
    /// Slowness as an EIK-GRID file instead of a phantom.
    #[arg(long, conflicts_with_all = ["phantom", "phantom_file"])]
    pub slowness: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Relative noise level; a noisy copy is written when positive.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = NoiseScaleArg::PerSource)]
    pub noise_scale: NoiseScaleArg,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Fbp,
    Twostep,
    AdjointBp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Ramp,
    HilbertDerivative,
    ScalingS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizationArg {
    Calibrated,
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaddingArg {
    Zero,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CombineArg {
    Mean,
    Sum,
}

impl From<CombineArg> for CombineMode {
    fn from(c: CombineArg) -> Self {
        match c {
            CombineArg::Mean => CombineMode::Mean,
            CombineArg::Sum => CombineMode::Sum,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    #[arg(long, value_enum, default_value_t = FilterArg::Ramp)]
    pub filter: FilterArg,
    /// Regularisation parameter of the scaling filter (default: half-Nyquist cut-off).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value_t = NormalizationArg::Calibrated)]
    pub normalization: NormalizationArg,
    #[arg(long, value_enum, default_value_t = PaddingArg::Zero)]
    pub padding: PaddingArg,
}

impl FilterArgs {
    pub fn spec(&self) -> FilterSpec {
        FilterSpec {
            kind: match self.filter {
                FilterArg::Ramp => FilterKind::Ramp,
                FilterArg::HilbertDerivative => FilterKind::HilbertDerivative,
                FilterArg::ScalingS => FilterKind::ScalingS,
            },
            c: self.c,
            normalization: match self.normalization {
                NormalizationArg::Calibrated => Normalization::Calibrated,
                NormalizationArg::PaperLiteral => Normalization::PaperLiteral,
            },
            padding: match self.padding {
                PaddingArg::Zero => Padding::Zero,
                PaddingArg::Periodic => Padding::Periodic,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct ReconstructCmd {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// EIK-SINO file with the measured travel times.
    #[arg(long)]
    pub sinogram: PathBuf,
    /// Assumed background for adjoint-bp: a preset name, a JSON spec or an
    /// EIK-GRID file.
    #[arg(long)]
    pub background: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Expected acquisition radius; checked against the sinogram header.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Expected source count; checked against the sinogram header.
    #[arg(long)]
    pub sources: Option<usize>,
    /// Expected receiver count; checked against the sinogram header.
    #[arg(long)]
    pub receivers: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Viscosity of the adjoint solve (default 2h).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Mollification width of the directions (default 3h).
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, default_value_t = eikotomo::reconstruct::DEFAULT_KAPPA)]
    pub kappa: f64,
    #[arg(long, value_enum, default_value_t = CombineArg::Mean)]
    pub combine: CombineArg,
    /// Also write per-source corrections or multipliers.
    #[arg(long)]
    pub save_intermediates: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareCmd {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long)]
    pub max_l2: Option<f64>,
    #[arg(long)]
    pub max_linf: Option<f64>,
    /// Expected feature centres as `x,y;x,y;...`; maxima of A are matched to them.
    #[arg(long, allow_hyphen_values = true)]
    pub targets: Option<String>,
    /// Largest allowed distance between a target and its maximum.
    #[arg(long, default_value_t = 0.07)]
    pub match_radius: f64,
    /// Value of A that counts as featureless.
    #[arg(long, default_value_t = 1.0)]
    pub baseline: f64,
    /// Keep maxima above baseline + fraction * (peak - baseline).
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0.05)]
    pub window: f64,
    /// Write the report as JSON here as well.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunCmd {
    /// Experiment name; `--list` shows them all.
    #[arg(long, required_unless_present = "list")]
    pub recipe: Option<String>,
    #[arg(long)]
    pub list: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

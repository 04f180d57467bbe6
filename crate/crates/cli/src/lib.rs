//! Experiment harness for the sumrank workbench: argument parsing, verb
//! dispatch and record emission. The `srk` binary is a thin wrapper around
//! [`run_and_emit`].

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sumrank::{field_build, FieldSpec, SpaceParams};

pub mod record;
mod verbs;

pub use record::{emit, Format, Record, CSV_HEADER, OUTPUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "srk", version, about = "Sum-rank metric code workbench")]
pub struct Cli {
    /// Master seed; trial i draws from the stream derived from (seed, i).
    #[arg(long, global = true, default_value_t = sumrank::rng::DEFAULT_SEED)]
    pub seed: u64,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output file; relative paths resolve under $SRK_OUTPUT_DIR when set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Append a wall-clock runtime record (breaks byte-identical reruns).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FieldArgs {
    /// Field order q: a prime up to 251, or 4, 8, 9, 16, 25, 27 (built-in moduli).
    #[arg(long, conflicts_with_all = ["p", "e"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    /// Characteristic p (with --e and optional --modulus).
    #[arg(long, requires = "e")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    /// Extension degree e.
    #[arg(long, requires = "p")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<u32>,
    /// Monic irreducible modulus, comma-separated coefficients, constant term first.
    #[arg(long, value_delimiter = ',', requires = "p")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u32>>,
}

impl FieldArgs {
    pub fn build(&self) -> Result<FieldSpec> {
        match (self.q, self.p, self.e) {
            (Some(q), None, None) => Ok(FieldSpec::of_order(q)?),
            (None, Some(p), Some(e)) => Ok(field_build(p, e, self.modulus.as_deref())?),
            _ => bail!("specify the field with --q, or with --p and --e"),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Rows per block.
    #[arg(long)]
    pub m: usize,
    /// Columns per block.
    #[arg(long)]
    pub eta: usize,
    /// Number of blocks.
    #[arg(long)]
    pub ell: usize,
}

impl SpaceArgs {
    pub fn build(&self) -> Result<SpaceParams> {
        Ok(SpaceParams::new(self.field.build()?, self.m, self.eta, self.ell)?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact sphere and ball volumes with their log_q bounds.
    Volume(VolumeArgs),
    /// Exact count of ell-decomposable subspaces with bounds.
    CountDecomposable(CountDecomposableArgs),
    /// List-decoding capacity 1 - kappa_b(rho) against the q-ary entropy curve.
    Capacity(CapacityArgs),
    /// Run an exact verification sweep; exits nonzero on any violation.
    Verify(VerifyArgs),
    /// Draw samples from the workbench distributions.
    Sample(SampleArgs),
    /// Monte-Carlo experiments.
    Experiment(ExperimentArgs),
    /// Increasing-chain search over shifts of a vector set.
    Chain(ChainArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VolumeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub space: SpaceArgs,
    /// Radius; all radii when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountDecomposableArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    #[arg(long)]
    pub eta: usize,
    #[arg(long)]
    pub ell: usize,
    /// Total dimension; all w when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CapacityArgs {
    /// b = eta/m, as a decimal or fraction in (0, 1].
    #[arg(long)]
    pub b: String,
    /// Error fraction; a grid of --steps points in (0, 1) when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    /// Grid size when --rho is omitted.
    #[arg(long, default_value_t = 20)]
    pub steps: u32,
    /// Field order for the entropy comparison.
    #[arg(long, default_value_t = 2)]
    pub q: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// [eta*ell w]_q dominates the decomposable count.
    #[value(alias = "lemma2")]
    GrassmannianDominance,
    /// Sphere and ball volumes lie within their log_q bounds (m = eta).
    #[value(alias = "prop1")]
    VolumeBounds,
    /// q^{(eta-k)k} <= [eta k]_q <= K_q^-1 q^{(eta-k)k}.
    #[value(alias = "lemma1")]
    GaussianBounds,
    /// Decomposable count equals enumeration (under guard) and lies within bounds.
    #[value(alias = "lemma3")]
    DecomposableCount,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub sweep: Sweep,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 4)]
    pub eta_max: usize,
    #[arg(long, default_value_t = 4)]
    pub ell_max: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    #[command(subcommand)]
    #[serde(skip)]
    pub what: SampleKind,
    /// Number of samples.
    #[arg(long, global = true, default_value_t = 10)]
    pub trials: u64,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SampleKind {
    /// Uniform point of B(0, r) (distribution D1).
    Ball {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        r: usize,
    },
    /// D2: rows from a uniform decomposable subspace of dimension w.
    D2 {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        w: usize,
    },
    /// Uniform rank-r m x eta matrix.
    RankMatrix {
        #[command(flatten)]
        #[serde(flatten)]
        field: FieldArgs,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        r: usize,
    },
    /// Uniform k-dimensional subspace of F_q^eta.
    Subspace {
        #[command(flatten)]
        #[serde(flatten)]
        field: FieldArgs,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        k: usize,
    },
    /// Uniform ell-decomposable subspace of dimension w.
    Decomposable {
        #[command(flatten)]
        #[serde(flatten)]
        field: FieldArgs,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        w: usize,
    },
    /// Random linear code of dimension k (or rate R with R*mn integral).
    LinearCode {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long, conflicts_with = "rate")]
        #[serde(skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        rate: Option<String>,
    },
    /// Random general code with inclusion probability q^{(R-1)mn}.
    GeneralCode {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        rate: String,
    },
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    #[serde(skip)]
    pub what: ExperimentKind,
    /// Monte-Carlo trials (or code draws for list-size).
    #[arg(long, global = true, default_value_t = 10_000)]
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeFamily {
    Linear,
    General,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ExperimentKind {
    /// Pr[X1 + X2 in B(0, floor(rho n))] for X1, X2 from D1.
    Correlation {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        rho: String,
    },
    /// Pr[dim(X cap Y) >= alpha w_x] (or = d) for uniform decomposable X, Y.
    Dimension {
        #[command(flatten)]
        #[serde(flatten)]
        field: FieldArgs,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        wx: usize,
        #[arg(long)]
        wy: usize,
        #[arg(long, conflicts_with = "d")]
        #[serde(skip_serializing_if = "Option::is_none")]
        alpha: Option<String>,
        #[arg(long)]
        #[serde(skip_serializing_if = "Option::is_none")]
        d: Option<usize>,
    },
    /// Pr[|span(X_1..X_gamma) cap B(0, floor(rho n))| >= K gamma].
    SpanCorrelation {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        gamma: usize,
        #[arg(long = "k-factor")]
        k_factor: u64,
    },
    /// Pr[sum a_i X_i in B(0, floor(rho n)) for all a in A].
    SubsetEvent {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        rho: String,
        /// Vectors of A as digit strings separated by commas, e.g. 10,01,11.
        #[arg(long, value_delimiter = ',')]
        a: Vec<String>,
    },
    /// Exhaustive max list size profile of random codes at rate 1 - kappa_b(rho) - epsilon.
    ListSize {
        #[command(flatten)]
        #[serde(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        epsilon: String,
        #[arg(long, value_enum, default_value_t = CodeFamily::Linear)]
        family: CodeFamily,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftSearch {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChainArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldArgs,
    /// Vector length.
    #[arg(long)]
    pub gamma: usize,
    /// Required support increase per step.
    #[arg(long, default_value_t = 2)]
    pub c: usize,
    /// Explicit vectors as digit strings, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "size")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<String>>,
    /// Size of a random set A per instance.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    /// Number of random instances.
    #[arg(long, default_value_t = 1)]
    pub instances: u64,
    #[arg(long, value_enum, default_value_t = ShiftSearch::Exhaustive)]
    pub search: ShiftSearch,
    /// Shifts tried in random search.
    #[arg(long, default_value_t = 256)]
    pub shifts: u64,
}

/// Records of a run plus whether every check it performed passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub ok: bool,
}

/// Runs the parsed command and returns its sorted records.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let start = std::time::Instant::now();
    let mut out = verbs::dispatch(cli)?;
    record::sort_records(&mut out.records);
    if cli.timing {
        let cfg = serde_json::json!({});
        out.records.push(Record::float(
            "timing",
            "runtime_ms",
            start.elapsed().as_secs_f64() * 1e3,
            &cfg,
        ));
    }
    Ok(out)
}

/// Runs and emits; returns whether every check passed.
pub fn run_and_emit(cli: &Cli) -> Result<bool> {
    let outcome = run(cli)?;
    emit(&outcome.records, cli.format, cli.out.as_deref()).context("emitting records")?;
    Ok(outcome.ok)
}

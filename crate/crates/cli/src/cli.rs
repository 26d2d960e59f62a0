use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gsdyn_core::polynomials::{parse_rational, Rational};
use gsdyn_core::witnesses::Direction;
use gsdyn_core::{FunctionModel, Polynomial, Weight};
use serde::{Serialize, Serializer};

#[derive(Debug, Parser)]
#[command(name = "gsdyn", version, about = "Weighted seminorms and composition-operator growth experiments")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Output format; defaults to pretty text on a terminal and JSON otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// JSON file whose keys mirror the command-line flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Expected verdict; a mismatch exits with status 1.
    #[arg(long, global = true)]
    pub expect: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Young conjugate and seminorm weight factors.
    Conjugate(ConjugateArgs),
    /// Grid-certified weight conditions.
    WeightCheck(WeightCheckArgs),
    /// Evaluate a seminorm with attainment indices.
    Seminorm(SeminormArgs),
    /// Polynomial iterates, fixed points and normal forms.
    #[command(subcommand)]
    Poly(PolyCommand),
    /// Growth experiments for iterated composition operators.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Run a suite file of experiments with expectations.
    Suite(SuiteArgs),
}

fn ser_display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Auto,
    Closed,
    Numeric,
}

#[derive(Debug, Args, Serialize)]
pub struct ConjugateArgs {
    #[arg(long)]
    pub weight: Weight,
    #[arg(long, allow_negative_numbers = true)]
    pub x: Vec<f64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Method,
    /// Compare the closed form with the numeric supremum (Gevrey weights).
    #[arg(long)]
    pub check: bool,
    /// Also report `ln exp(−λφ*(n/λ))` for this λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightCheckArgs {
    #[arg(long)]
    pub weight: Weight,
    /// Conditions to check; all weight conditions when omitted.
    #[arg(long = "condition")]
    #[serde(serialize_with = "ser_conditions")]
    pub conditions: Vec<gsdyn_core::Condition>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Also check the Gevrey weight sequence `(p!)^s` up to this index.
    #[arg(long)]
    pub sequence_max: Option<usize>,
}

fn ser_conditions<S: Serializer>(v: &[gsdyn_core::Condition], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&format!("{c:?}").to_lowercase())?;
    }
    seq.end()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    PlainP,
    GlobalP,
    ExpQ,
    GevreySeq,
}

#[derive(Debug, Args, Serialize)]
pub struct SeminormArgs {
    #[arg(long, default_value = "gauss:1")]
    pub model: FunctionModel,
    #[arg(long, default_value = "gevrey:2")]
    pub weight: Weight,
    #[arg(long, value_enum, default_value = "plain-p")]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Fixed truncation order instead of the automatic one.
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, default_value_t = 200)]
    pub max_order: usize,
    #[arg(long, default_value_t = 1024)]
    pub half_points: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub at: Option<f64>,
    #[arg(long)]
    pub certify: bool,
    /// Emit the attainment matrix up to this order.
    #[arg(long)]
    pub matrix: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum PolyCommand {
    Iterate(PolyIterArgs),
    FixedPoints(PolyArgs),
    NormalForm(PolyArgs),
    Minorant(PolyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PolyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Polynomial,
}

#[derive(Debug, Args, Serialize)]
pub struct PolyIterArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Polynomial,
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "witness", rename_all = "kebab-case")]
pub enum WitnessCommand {
    Translation(TranslationArgs),
    Dilation(DilationArgs),
    Repelling(RepellingArgs),
    Square(SquareArgs),
    Deg2(Deg2Args),
    Delta(DeltaArgs),
    Rho(RhoArgs),
    Fourier(FourierArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct TranslationArgs {
    #[arg(long, default_value = "gevrey:2")]
    pub weight: Weight,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value = "gauss:1")]
    pub model: FunctionModel,
    #[arg(long, default_value_t = 15)]
    pub m_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DilationArgs {
    #[arg(long, default_value = "gevrey:2")]
    pub weight: Weight,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 2.0)]
    pub h: f64,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 8)]
    pub l_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct RepellingArgs {
    #[arg(long, default_value = "x^2", allow_hyphen_values = true)]
    pub psi: Polynomial,
    #[arg(long, default_value = "1", value_parser = parse_rat, allow_hyphen_values = true)]
    #[serde(serialize_with = "ser_display")]
    pub x0: Rational,
    #[arg(long, default_value_t = 2.0)]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 60)]
    pub m_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SquareArgs {
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 60)]
    pub m_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct Deg2Args {
    #[arg(long, default_value = "gevrey:2")]
    pub weight: Weight,
    #[arg(long, default_value_t = 3.0)]
    pub a: f64,
    #[arg(long, default_value = "x^2 + 5", allow_hyphen_values = true)]
    pub psi: Polynomial,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 6)]
    pub m_max: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DeltaArgs {
    #[arg(long, default_value = "gevrey:2")]
    pub weight: Weight,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct RhoArgs {
    #[arg(long, default_value = "gauss:1")]
    pub model: FunctionModel,
    #[arg(long, default_value = "gevrey:2")]
    pub weight: Weight,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value = "derivative", value_parser = |s: &str| s.parse::<Direction>().map_err(|e| e.to_string()))]
    pub direction: Direction,
}

#[derive(Debug, Args, Serialize)]
pub struct FourierArgs {
    #[arg(long, default_value = "gauss:1")]
    pub model: FunctionModel,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
    pub eta_min: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 201)]
    pub eta_points: usize,
    /// Largest discrepancy that still counts as a pass.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SuiteArgs {
    pub file: PathBuf,
    /// Leave the per-entry reports out of the summary.
    #[arg(long)]
    pub brief: bool,
}

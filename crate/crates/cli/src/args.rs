use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "slagkit", version, about = "Construct and verify special Lagrangian immersions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Directory that relative output paths are resolved against.
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// TOML file whose keys mirror the long flags of the subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate and export plane curves.
    #[command(subcommand)]
    Curve(CurveCommand),
    /// Build a product surface and export it as a mesh.
    #[command(subcommand)]
    Surface(SurfaceCommand),
    /// Sample the phase of an assembled ambient immersion.
    #[command(subcommand)]
    Ambient(AmbientCommand),
    /// Sample matrix orbit families.
    Orbit(OrbitArgs),
    /// Solve the regularized potential equation.
    #[command(subcommand)]
    Pde(PdeCommand),
    /// Run a verification suite and write a JSON report.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum CurveCommand {
    Alpha(CurveArgs),
    Gamma(CurveArgs),
    /// Principal root of `c + i s`.
    GammaC(GammaCArgs),
    /// Period and closedness of a gamma curve.
    Period(PeriodArgs),
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    /// Initial point as `x1,x2` with positive entries.
    #[arg(long, value_parser = parse_pair)]
    pub init: Option<[f64; 2]>,
    /// Use the explicit special gamma curve (gamma only).
    #[arg(long)]
    pub special: bool,
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Samples on each side of `t = 0`.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Allowed drift of the conserved quantities.
    #[arg(long, default_value_t = 1e-8)]
    pub drift_tol: f64,
    #[arg(long, default_value = "curve.csv")]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GammaCArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub c: f64,
    #[arg(long, value_parser = parse_pair, default_value = "-2,2")]
    pub s_range: [f64; 2],
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    #[arg(long, default_value = "gamma_c.csv")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PeriodArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_parser = parse_pair)]
    pub init: [f64; 2],
    /// Tolerance of the rational classification.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_denominator: u32,
    #[arg(long, default_value = "period.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Projection {
    #[value(name = "re1-im1-re2")]
    Re1Im1Re2,
    #[value(name = "re1-re2-im2")]
    Re1Re2Im2,
    #[value(name = "moduli-phase")]
    ModuliPhase,
}

#[derive(Debug, Subcommand)]
pub enum SurfaceCommand {
    /// Product of an alpha curve and a gamma curve.
    Product(SurfaceArgs),
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_parser = parse_pair)]
    pub a: [f64; 2],
    /// Initial point of the gamma factor; omit with `--special`.
    #[arg(long, value_parser = parse_pair)]
    pub b: Option<[f64; 2]>,
    #[arg(long)]
    pub special: bool,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, value_parser = parse_pair, default_value = "-3,3")]
    pub s_range: [f64; 2],
    #[arg(long, value_parser = parse_grid, default_value = "50x50")]
    pub grid: (usize, usize),
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "re1-im1-re2")]
    pub projection: Projection,
    #[arg(long, default_value = "surface.obj")]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Factor {
    /// The constant map, for a zero exponent.
    Point,
    /// Geodesic sphere of the matching dimension.
    Sphere,
    /// Great circle in S^3 (dimension 1).
    Circle,
    /// Legendrian torus of the matching dimension.
    Torus,
    /// Hopf fiber, a non-Legendrian control (dimension 1).
    Hopf,
}

#[derive(Debug, Subcommand)]
pub enum AmbientCommand {
    /// Product immersion built from a surface and two Legendrian factors.
    Product(AmbientProductArgs),
    /// Cone-type immersion built from a curve and one Legendrian factor.
    Cone(AmbientConeArgs),
}

#[derive(Debug, Args)]
pub struct AmbientProductArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_parser = parse_pair, default_value = "1,2")]
    pub a: [f64; 2],
    #[arg(long, value_parser = parse_pair, default_value = "0.9,0.8")]
    pub b: [f64; 2],
    #[arg(long, value_enum)]
    pub psi: Factor,
    #[arg(long, value_enum)]
    pub phi: Factor,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Bound on the circular standard deviation of the phase.
    #[arg(long, default_value_t = 1e-6)]
    pub phase_tol: f64,
    /// Bound on the determinant identity residual.
    #[arg(long, default_value_t = 1e-8)]
    pub identity_tol: f64,
    #[arg(long, default_value = "ambient.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AmbientConeArgs {
    /// Power of the curve; the factor has dimension `n - 1`.
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_enum)]
    pub psi: Factor,
    #[arg(long, value_parser = parse_pair, default_value = "-2,2")]
    pub s_range: [f64; 2],
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub phase_tol: f64,
    #[arg(long, default_value = "ambient.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Gl,
    Sym,
    Skew,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    #[arg(long, value_enum)]
    pub variant: Variant,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_parser = parse_pair, default_value = "-2,2")]
    pub s_range: [f64; 2],
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value = "orbit.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum PdeCommand {
    Solve(PdeArgs),
}

#[derive(Debug, Args)]
pub struct PdeArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub a1: f64,
    #[arg(long)]
    pub a2: f64,
    /// Closed-form boundary data: bilinear, product, quadratic, cubic,
    /// quartic or exp-sin.
    #[arg(long, conflicts_with = "boundary_file")]
    pub boundary: Option<String>,
    /// CSV file with columns `edge,k,value`, edges bottom/top/left/right.
    #[arg(long)]
    pub boundary_file: Option<PathBuf>,
    /// Rectangle as `x0,x1,y0,y1`.
    #[arg(long, value_parser = parse_domain, default_value = "0,1,0,1")]
    pub domain: [f64; 4],
    #[arg(long, value_parser = parse_grid, default_value = "33x33")]
    pub grid: (usize, usize),
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, default_value = "potential.csv")]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Drift of the conserved quantities of both curve families.
    Conservation(VerifyConservationArgs),
    /// Angle condition and symplectic residual of a product surface.
    Angle(VerifyAngleArgs),
    /// Membership of a special product in its level set.
    Corollary2(VerifyCorollary2Args),
    /// Total curvature of the cylinder against its closed form.
    Curvature(VerifyCurvatureArgs),
    /// Contact residual of a factor map.
    Legendrian(VerifyLegendrianArgs),
    /// Harmonic oracle convergence of the potential solver.
    Pde(VerifyPdeArgs),
}

#[derive(Debug, Args)]
pub struct VerifyConservationArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_parser = parse_pair)]
    pub init: [f64; 2],
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub integrator_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyAngleArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_parser = parse_pair)]
    pub a: [f64; 2],
    #[arg(long, value_parser = parse_pair)]
    pub b: [f64; 2],
    #[arg(long, value_parser = parse_grid, default_value = "50x50")]
    pub grid: (usize, usize),
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub symplectic_tol: f64,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyCorollary2Args {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_parser = parse_pair)]
    pub a: [f64; 2],
    #[arg(long, value_parser = parse_grid, default_value = "50x50")]
    pub grid: (usize, usize),
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyCurvatureArgs {
    #[arg(long, default_value_t = 6.0)]
    pub t_max: f64,
    /// Grid shape; both interval counts must be multiples of 4.
    #[arg(long, value_parser = parse_grid, default_value = "481x33")]
    pub grid: (usize, usize),
    /// Relative bound on the distance to `-4 pi`.
    #[arg(long, default_value_t = 0.05)]
    pub tol: f64,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyLegendrianArgs {
    #[arg(long, value_enum)]
    pub map: Factor,
    /// Domain dimension of the map.
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyPdeArgs {
    #[arg(long, default_value = "quartic")]
    pub boundary: String,
    /// Grid sizes, each the previous one refined by halving.
    #[arg(long, value_delimiter = ',', default_value = "17,33,65")]
    pub sizes: Vec<usize>,
    #[arg(long, value_parser = parse_pair, default_value = "3.5,4.5")]
    pub band: [f64; 2],
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number")))
        .collect()
}

pub fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    match parse_floats(s)?.as_slice() {
        &[a, b] => Ok([a, b]),
        _ => Err("expected two comma-separated numbers, e.g. `1,2`".into()),
    }
}

pub fn parse_domain(s: &str) -> Result<[f64; 4], String> {
    match parse_floats(s)?.as_slice() {
        &[a, b, c, d] => Ok([a, b, c, d]),
        _ => Err("expected `x0,x1,y0,y1`".into()),
    }
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or("expected `NxM`, e.g. `50x50`")?;
    let a = a.trim().parse().map_err(|_| format!("`{a}` is not a count"))?;
    let b = b.trim().parse().map_err(|_| format!("`{b}` is not a count"))?;
    Ok((a, b))
}

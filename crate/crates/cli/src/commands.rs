//! Command-line definitions and the command implementations.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crofton_core::crofton::{
    estimate_area, estimate_double_integral, estimate_surface_integral, CroftonEstimate,
};
use crofton_core::rng::ScalarSource;
use crofton_core::samplers::{
    cloud_lines, cloud_parametric_with, cloud_triangulated, Cloud, ImplicitSamplerConfig, LineKind,
    RootMethod, DEFAULT_LINE_BUDGET,
};
use crofton_core::stats::{curse_benchmark, BenchTable};
use crofton_core::surfaces::Expr;

use crate::audit;
use crate::error::{CliError, Result, EXIT_OK};
use crate::format::{read_cloud, write_cloud, CloudFile, FilePoint, Format};
use crate::shard::{run_shards, split, thread_count};
use crate::surface::{resolve, ResolvedSurface, Sampler};

#[derive(Debug, Parser)]
#[command(
    name = "crofton",
    version,
    about = "Equidistributed point clouds and area estimates from random lines"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a point cloud and write it to a file.
    Generate(GenerateArgs),
    /// Estimate surface area from line crossings.
    Area(EstimateArgs),
    /// Estimate a surface integral of an expression in x, y, z.
    Integrate(IntegrateArgs),
    /// Run equidistribution tests on a cloud file.
    Audit(AuditArgs),
    /// Compare Monte Carlo and midpoint-rule integration on [0,1]^dim.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RootArg {
    Bisection,
    RegulaFalsi,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    /// Catalog name, path to an .off/.stl mesh, or a level-set expression in x, y, z.
    #[arg(long)]
    pub surface: String,
    /// Radius of the ball the lines meet; also clips level sets.
    #[arg(long)]
    pub r: Option<f64>,
    /// Subintervals scanned for sign changes along each chord.
    #[arg(long, default_value_t = 256)]
    pub scan_steps: usize,
    /// Absolute tolerance on refined crossings.
    #[arg(long, default_value_t = 1e-10)]
    pub root_tol: f64,
    #[arg(long, value_enum, default_value_t = RootArg::Bisection)]
    pub root_method: RootArg,
    /// Grid resolution of parametric charts.
    #[arg(long)]
    pub chart_res: Option<usize>,
}

impl SurfaceArgs {
    fn scan_config(&self) -> Result<ImplicitSamplerConfig> {
        let cfg = ImplicitSamplerConfig {
            scan_steps: self.scan_steps,
            root_tol: self.root_tol,
            method: match self.root_method {
                RootArg::Bisection => RootMethod::Bisection,
                RootArg::RegulaFalsi => RootMethod::RegulaFalsi,
            },
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn resolve(&self) -> Result<ResolvedSurface> {
        resolve(&self.surface, self.r, self.chart_res)
    }

    fn header(&self, s: &ResolvedSurface) -> Vec<(String, String)> {
        let mut h = vec![
            ("surface".to_string(), self.surface.clone()),
            ("r".to_string(), s.radius.to_string()),
            ("scan_steps".to_string(), self.scan_steps.to_string()),
            ("root_tol".to_string(), self.root_tol.to_string()),
            (
                "root_method".to_string(),
                format!("{:?}", self.root_method).to_lowercase(),
            ),
        ];
        if let Some(p) = &s.parametric {
            let (u, v) = p.resolution();
            h.push(("chart_res".to_string(), format!("{u}x{v}")));
        }
        h
    }
}

#[derive(Debug, Clone, Args)]
pub struct ShardArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent streams with seeds seed, seed+1, ...; results are combined in order.
    #[arg(long, default_value_t = 4)]
    pub shards: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, value_enum, default_value_t = Sampler::Crofton)]
    pub sampler: Sampler,
    /// Minimum number of points.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[command(flatten)]
    pub shard: ShardArgs,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
    /// File format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    /// Number of lines.
    #[arg(long, default_value_t = 1_000_000)]
    pub m: u64,
    #[command(flatten)]
    pub shard: ShardArgs,
    /// Print the estimate as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub estimate: EstimateArgs,
    /// Integrand f(x, y, z).
    #[arg(long)]
    pub f: String,
    /// Second factor: integrate f(p)·g(q) over pairs of surface points.
    #[arg(long)]
    pub g: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct AuditArgs {
    /// Cloud file (XYZ or PLY).
    pub cloud: PathBuf,
    /// Catalog surface the cloud claims to sample; enables region and density tests.
    #[arg(long)]
    pub surface: Option<String>,
    /// Seed for bootstrap resampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report as JSON lines.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Integrand {
    /// Product of cos(x_i), integral sin(1)^dim.
    CosProduct,
    /// The constant 1.
    Constant,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 6)]
    pub dim: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1_000, 10_000, 100_000, 1_000_000])]
    pub budgets: Vec<u64>,
    /// Monte Carlo repetitions per budget.
    #[arg(long, default_value_t = 32)]
    pub seeds: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Integrand::CosProduct)]
    pub integrand: Integrand,
    /// Also write the table as JSON lines.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
}

fn check_shards(shards: usize) -> Result<()> {
    if shards == 0 {
        return Err(CliError::Usage("--shards must be at least 1".into()));
    }
    Ok(())
}

/// Samples the cloud described by `args`, returning the file contents and
/// the number of lines drawn.
pub fn generate_cloud(args: &GenerateArgs) -> Result<(CloudFile, u64)> {
    check_shards(args.shard.shards)?;
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let surface = args.surface.resolve()?;
    let cfg = args.surface.scan_config()?;
    let counts = split(args.n as u64, args.shard.shards);
    let threads = thread_count();
    let shards: Vec<Cloud> = match args.sampler {
        Sampler::Crofton | Sampler::AxisAligned => {
            let isect = surface.line_intersector(cfg)?;
            let kind = if args.sampler == Sampler::Crofton {
                LineKind::Kinematic
            } else {
                LineKind::AxisAligned
            };
            run_shards(args.shard.shards, args.shard.seed, threads, |i, seed| {
                if counts[i] == 0 {
                    return Ok(Cloud::default());
                }
                let mut src = ScalarSource::pseudo(seed);
                cloud_lines(
                    &isect,
                    &mut src,
                    counts[i] as usize,
                    surface.radius,
                    kind,
                    DEFAULT_LINE_BUDGET,
                )
            })?
        }
        Sampler::Triangulated => {
            let mesh = surface.triangles()?;
            run_shards(args.shard.shards, args.shard.seed, threads, |i, seed| {
                if counts[i] == 0 {
                    return Ok(Cloud::default());
                }
                cloud_triangulated(&mesh, &mut ScalarSource::pseudo(seed), counts[i] as usize)
            })?
        }
        Sampler::Parametric => {
            let chart = surface.chart()?;
            let tri = chart.triangulate()?;
            run_shards(args.shard.shards, args.shard.seed, threads, |i, seed| {
                if counts[i] == 0 {
                    return Ok(Cloud::default());
                }
                cloud_parametric_with(
                    chart,
                    &tri,
                    &mut ScalarSource::pseudo(seed),
                    counts[i] as usize,
                )
            })?
        }
    };
    let lines: u64 = shards.iter().map(|c| c.lines_used).sum();
    let points: Vec<FilePoint> = shards
        .iter()
        .flat_map(|c| c.points.iter())
        .map(|p| FilePoint {
            position: p.position,
            normal: p.normal,
        })
        .collect();
    let mut header = vec![
        (
            "generator".to_string(),
            format!("crofton {}", env!("CARGO_PKG_VERSION")),
        ),
        ("seed".to_string(), args.shard.seed.to_string()),
        ("shards".to_string(), args.shard.shards.to_string()),
        ("sampler".to_string(), args.sampler.name().to_string()),
        ("n".to_string(), args.n.to_string()),
    ];
    header.extend(args.surface.header(&surface));
    header.push(("points".to_string(), points.len().to_string()));
    header.push(("lines".to_string(), lines.to_string()));
    Ok((CloudFile { header, points }, lines))
}

fn write_file(path: &Path, format: Format, cloud: &CloudFile) -> Result<()> {
    let wrap = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let f = fs::File::create(path).map_err(wrap)?;
    let mut w = BufWriter::new(f);
    write_cloud(&mut w, format, cloud).map_err(wrap)?;
    w.flush().map_err(wrap)
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    let format = match args.format.or_else(|| Format::from_extension(&args.output)) {
        Some(f) => f,
        None => {
            return Err(CliError::Usage(format!(
                "cannot infer a format from {}; pass --format",
                args.output.display()
            )))
        }
    };
    let start = Instant::now();
    let (cloud, lines) = generate_cloud(args)?;
    write_file(&args.output, format, &cloud)?;
    let mut s = format!("points {}\n", cloud.points.len());
    if lines > 0 {
        let _ = writeln!(
            s,
            "lines {lines}\nmean crossings per line {}",
            cloud.points.len() as f64 / lines as f64
        );
    }
    let _ = writeln!(
        s,
        "seed {}\nelapsed {:.3} s",
        args.shard.seed,
        start.elapsed().as_secs_f64()
    );
    out.write_all(s.as_bytes()).map_err(stdout_error)
}

fn stdout_error(source: std::io::Error) -> CliError {
    CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

/// Runs a line estimator over shards and pools the results.
fn sharded_estimate<F>(args: &EstimateArgs, job: F) -> Result<CroftonEstimate>
where
    F: Fn(&mut ScalarSource, u64, f64) -> crofton_core::Result<CroftonEstimate> + Sync,
{
    check_shards(args.shard.shards)?;
    if args.m < args.shard.shards as u64 {
        return Err(CliError::Usage(
            "--m must be at least the number of shards".into(),
        ));
    }
    let r = args.surface.resolve()?.radius;
    let counts = split(args.m, args.shard.shards);
    let parts = run_shards(
        args.shard.shards,
        args.shard.seed,
        thread_count(),
        |i, seed| job(&mut ScalarSource::pseudo(seed), counts[i], r),
    )?;
    Ok(CroftonEstimate::merge(&parts)?)
}

/// Area estimate for `area`.
pub fn area_estimate(args: &EstimateArgs) -> Result<CroftonEstimate> {
    let surface = args.surface.resolve()?;
    let isect = surface.line_intersector(args.surface.scan_config()?)?;
    sharded_estimate(args, |src, m, r| estimate_area(&isect, src, m, r))
}

/// Integral estimate for `integrate`.
pub fn integral_estimate(args: &IntegrateArgs) -> Result<CroftonEstimate> {
    let e = &args.estimate;
    let surface = e.surface.resolve()?;
    let isect = surface.line_intersector(e.surface.scan_config()?)?;
    let f = Expr::parse(&args.f)?;
    match &args.g {
        None => sharded_estimate(e, |src, m, r| {
            estimate_surface_integral(&isect, |p| f.eval(p), src, m, r)
        }),
        Some(g) => {
            let g = Expr::parse(g)?;
            if e.m < 2 * e.shard.shards as u64 {
                return Err(CliError::Usage(
                    "--m must be at least twice the number of shards".into(),
                ));
            }
            // Each term of a double integral consumes two lines.
            sharded_estimate(e, |src, m, r| {
                estimate_double_integral(&isect, |p, q| f.eval(p) * g.eval(q), src, m / 2, r)
            })
        }
    }
}

fn estimate_text(label: &str, e: &CroftonEstimate) -> String {
    let mut s = format!("{label}\n");
    let _ = writeln!(
        s,
        "estimate {} ± {} (standard error)",
        e.value, e.standard_error
    );
    let _ = writeln!(s, "lines {}", e.lines_used);
    if e.lines_used == e.samples {
        let _ = writeln!(s, "mean crossings per line {}", e.mean_hits());
    }
    let hist: Vec<String> = e
        .histogram
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect();
    let _ = writeln!(s, "crossings histogram {}", hist.join(" "));
    for w in &e.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

fn print_estimate(
    args: &EstimateArgs,
    label: &str,
    e: &CroftonEstimate,
    out: &mut dyn Write,
) -> Result<()> {
    let text = if args.json {
        serde_json::to_string(e).expect("plain estimate serializes") + "\n"
    } else {
        estimate_text(label, e)
    };
    out.write_all(text.as_bytes()).map_err(stdout_error)
}

fn cmd_audit(args: &AuditArgs, out: &mut dyn Write) -> Result<()> {
    let bytes = fs::read(&args.cloud).map_err(|source| CliError::Read {
        path: args.cloud.clone(),
        source,
    })?;
    let cloud = read_cloud(&bytes).map_err(|source| CliError::Format {
        path: args.cloud.clone(),
        source,
    })?;
    if let Some(s) = &args.surface {
        if audit::surface_checks(s).is_none() {
            return Err(CliError::Usage(format!(
                "no region tests are defined for surface '{s}'"
            )));
        }
    }
    let report = audit::audit(&cloud.positions(), args.surface.as_deref(), args.seed)?;
    out.write_all(report.to_text().as_bytes())
        .map_err(stdout_error)?;
    if let Some(path) = &args.jsonl {
        fs::write(path, report.to_json_lines()).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }
    let failed = report.records.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::AuditFailed {
            failed,
            total: report.records.len(),
        });
    }
    Ok(())
}

/// Benchmark table for `bench`.
pub fn bench_table(args: &BenchArgs) -> Result<BenchTable> {
    let table = match args.integrand {
        Integrand::CosProduct => curse_benchmark(
            |x: &[f64]| x.iter().map(|v| v.cos()).product(),
            args.dim,
            1f64.sin().powi(args.dim as i32),
            &args.budgets,
            args.seeds,
            args.seed,
        )?,
        Integrand::Constant => curse_benchmark(
            |_: &[f64]| 1.0,
            args.dim,
            1.0,
            &args.budgets,
            args.seeds,
            args.seed,
        )?,
    };
    Ok(table)
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let table = bench_table(args)?;
    out.write_all(table.to_text().as_bytes())
        .map_err(stdout_error)?;
    if let Some(path) = &args.jsonl {
        let mut s = String::new();
        for row in &table.rows {
            s.push_str(&serde_json::to_string(row).expect("plain row serializes"));
            s.push('\n');
        }
        let summary = serde_json::json!({ "dim": table.dim, "truth": table.truth, "mc_slope": table.mc_slope });
        s.push_str(&summary.to_string());
        s.push('\n');
        fs::write(path, s).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a, out),
        Command::Area(a) => {
            let e = area_estimate(a)?;
            print_estimate(a, &format!("area of {}", a.surface.surface), &e, out)
        }
        Command::Integrate(a) => {
            let e = integral_estimate(a)?;
            let label = match &a.g {
                None => format!("integral of {} over {}", a.f, a.estimate.surface.surface),
                Some(g) => format!(
                    "double integral of ({})·({}) over {}",
                    a.f, g, a.estimate.surface.surface
                ),
            };
            print_estimate(&a.estimate, &label, &e, out)
        }
        Command::Audit(a) => cmd_audit(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                crate::error::EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

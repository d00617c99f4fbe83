use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use chromacount::diagnostics::{self, ReportOptions, Thresholds, CSV_HEADER};
use chromacount::enumerate::enumerate_copies;
use chromacount::families::FamilySpec;
use chromacount::graph::load_edge_list;
use chromacount::moments::{
    exact_moments_bruteforce, exact_moments_kernel, good_join_census, triangle_sixth_asymptotic,
    triangle_sixth_exact, JoinLimits, MomentKernel,
};
use chromacount::poly::build_form;
use chromacount::rational::to_f64;
use chromacount::simulate::{exact_distribution, histogram_csv, sample_t};
use chromacount::spectral::{mixture_limit, spectrum_of, TriangleForm};
use chromacount::{Error, Graph, Pattern};

#[derive(Parser)]
#[command(name = "chromacount", version, about = "Monochromatic subgraph count diagnostics")]
struct Cli {
    /// Worker threads (falls back to CHROMACOUNT_THREADS, then all cores).
    #[arg(long, global = true, env = "CHROMACOUNT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family graph as an edge list.
    Gen(GenArgs),
    /// Full diagnostics report.
    Analyze(AnalyzeArgs),
    /// Exact moments of the standardized count.
    Moments(MomentArgs),
    /// Monte Carlo sampling, or the exact law on small hosts.
    Simulate(SimulateArgs),
    /// Triangle quadratic-form spectrum and mixture prediction.
    Spectrum(SpectrumArgs),
    /// Census of connected 4-joins and the fourth-cumulant decomposition.
    Joins(CommonArgs),
    /// Normality verdict.
    Verdict(VerdictArgs),
}

#[derive(Args)]
#[group(skip)]
#[command(group(clap::ArgGroup::new("source").required(true).multiple(false)))]
struct Source {
    /// Edge-list file.
    #[arg(long, group = "source")]
    graph: Option<PathBuf>,
    /// Family name, e.g. book, windmill, exbad_full.
    #[arg(long, group = "source")]
    family: Option<String>,
    /// Family parameters as k=v,k=v.
    #[arg(long, requires = "family")]
    params: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CommonArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value = "triangle")]
    pattern: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 0.25)]
    eps_pair: f64,
    #[arg(long, default_value_t = 0.25)]
    eps_vertex: f64,
    #[arg(long, default_value_t = 0.1)]
    eps_strong: f64,
    #[arg(long, default_value_t = 0.05)]
    moment_tol: f64,
    #[arg(long, default_value_t = 16)]
    vertex_bound: usize,
}

impl ThresholdArgs {
    fn get(&self) -> Result<Thresholds, Error> {
        for (name, v) in [
            ("eps-pair", self.eps_pair),
            ("eps-vertex", self.eps_vertex),
            ("eps-strong", self.eps_strong),
            ("moment-tol", self.moment_tol),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidArgument(format!("--{name} must be non-negative")));
            }
        }
        Ok(Thresholds {
            eps_pair: self.eps_pair,
            eps_vertex: self.eps_vertex,
            eps_strong: self.eps_strong,
            moment_tol: self.moment_tol,
            vertex_bound: self.vertex_bound,
        })
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Omit timings.
    #[arg(long)]
    deterministic: bool,
}

#[derive(Args)]
struct VerdictArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    thresholds: ThresholdArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Bruteforce,
    TupleKernel,
    ClosedForm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Rademacher,
    Gaussian,
}

#[derive(Args)]
struct MomentArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Highest moment order.
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, value_enum, default_value = "rademacher")]
    kernel: KernelArg,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 40)]
    bins: usize,
    /// Write the histogram CSV here as well.
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Enumerate all colorings instead of sampling.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Vertices to condition on, comma separated.
    #[arg(long)]
    condition: Option<String>,
}

fn parse_params(s: Option<&str>) -> Result<Vec<(String, String)>, Error> {
    let Some(s) = s else { return Ok(Vec::new()) };
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidFamily(format!("parameter {p:?} is not key=value")))
        })
        .collect()
}

fn family_graph(name: &str, params: Option<&str>) -> Result<Graph, Error> {
    FamilySpec::from_params(name, &parse_params(params)?)?.generate()
}

fn load(src: &Source) -> Result<Graph, Error> {
    match (&src.graph, &src.family) {
        (Some(path), None) => {
            let f = fs::File::open(path)?;
            Ok(load_edge_list(io::BufReader::new(f))?.graph)
        }
        (None, Some(name)) => family_graph(name, src.params.as_deref()),
        _ => Err(Error::InvalidArgument(
            "give exactly one of --graph or --family".into(),
        )),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(output: &Output, v: &Value) -> Result<(), Error> {
    if output.format == Format::Csv {
        return Err(Error::InvalidArgument(
            "CSV output is available for analyze and simulate only".into(),
        ));
    }
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    emit(&output.out, &s)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn moments(a: &MomentArgs) -> Result<Value, Error> {
    let c = &a.common;
    let g = load(&c.source)?;
    let h = Pattern::parse(&c.pattern)?;
    let kernel = match a.kernel {
        KernelArg::Rademacher => MomentKernel::Rademacher,
        KernelArg::Gaussian => MomentKernel::Gaussian,
    };
    let method = match a.method {
        Method::Auto if h.is_triangle() && a.order <= 6 => Method::ClosedForm,
        Method::Auto if g.vertex_count() <= 20 && kernel == MomentKernel::Rademacher => {
            Method::Bruteforce
        }
        Method::Auto => Method::TupleKernel,
        m => m,
    };
    match method {
        Method::Bruteforce => {
            if kernel == MomentKernel::Gaussian {
                return Err(Error::InvalidArgument(
                    "brute force covers the Rademacher kernel only".into(),
                ));
            }
            Ok(to_value(&exact_moments_bruteforce(&g, &h, a.order)?))
        }
        Method::TupleKernel => {
            let (_, idx) = enumerate_copies(&g, &h)?;
            Ok(to_value(&exact_moments_kernel(&build_form(&idx)?, a.order, kernel)?))
        }
        _ => {
            if !h.is_triangle() {
                return Err(Error::InvalidArgument(
                    "closed forms exist for the triangle pattern only".into(),
                ));
            }
            if a.order != 4 && a.order != 6 {
                return Err(Error::InvalidArgument(
                    "closed forms cover orders 4 and 6".into(),
                ));
            }
            let (_, idx) = enumerate_copies(&g, &h)?;
            let f = diagnostics::fourth_moment(&g, &h, &idx, kernel)?;
            let mut v = to_value(&f);
            if a.order == 6 {
                if kernel == MomentKernel::Gaussian {
                    return Err(Error::InvalidArgument(
                        "the sixth-moment closed form is Rademacher only".into(),
                    ));
                }
                let six = triangle_sixth_exact(&idx)?;
                v["sixth"] = json!({
                    "num": six.numer().to_string(),
                    "den": six.denom().to_string(),
                    "float": to_f64(&six),
                });
                v["sixth_terms"] = to_value(&triangle_sixth_asymptotic(&idx)?);
            }
            Ok(v)
        }
    }
}

fn simulate(a: &SimulateArgs) -> Result<(), Error> {
    let c = &a.common;
    if a.samples == 0 && !a.exact {
        return Err(Error::InvalidArgument("--samples must be at least 1".into()));
    }
    let g = load(&c.source)?;
    let h = Pattern::parse(&c.pattern)?;
    if a.exact {
        return emit_json(&c.output, &to_value(&exact_distribution(&g, &h)?));
    }
    let run = sample_t(&g, &h, a.samples, a.seed)?;
    let csv = histogram_csv(&run.standardized, a.bins);
    if let Some(p) = &a.histogram {
        fs::write(p, &csv)?;
    }
    match c.output.format {
        Format::Csv => emit(&c.output.out, &csv),
        Format::Json => emit_json(&c.output, &to_value(&run)),
    }
}

fn spectrum(a: &SpectrumArgs) -> Result<Value, Error> {
    let c = &a.common;
    let g = load(&c.source)?;
    let h = Pattern::parse(&c.pattern)?;
    if !h.is_triangle() {
        return Err(Error::InvalidPattern(
            "the spectrum is defined for the triangle pattern only".into(),
        ));
    }
    let form = TriangleForm::from_graph(&g)?;
    let mut v = json!({ "spectrum": to_value(&spectrum_of(&form)?) });
    if let Some(list) = &a.condition {
        let set = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidArgument(format!("bad vertex {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        v["mixture"] = to_value(&mixture_limit(&form, &set)?);
    }
    Ok(v)
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Gen(a) => {
            let g = family_graph(&a.family, a.params.as_deref())?;
            emit(&a.out, &g.to_edge_list())
        }
        Command::Analyze(a) => {
            let c = &a.common;
            let g = load(&c.source)?;
            let h = Pattern::parse(&c.pattern)?;
            let options = ReportOptions {
                thresholds: a.thresholds.get()?,
                deterministic: a.deterministic,
                ..ReportOptions::default()
            };
            let rep = diagnostics::report(&g, &h, options)?;
            match c.output.format {
                Format::Csv => emit(&c.output.out, &format!("{CSV_HEADER}\n{}\n", rep.csv_row())),
                Format::Json => emit_json(&c.output, &to_value(&rep)),
            }
        }
        Command::Moments(a) => emit_json(&a.common.output, &moments(a)?),
        Command::Simulate(a) => simulate(a),
        Command::Spectrum(a) => emit_json(&a.common.output, &spectrum(a)?),
        Command::Joins(c) => {
            let g = load(&c.source)?;
            let h = Pattern::parse(&c.pattern)?;
            emit_json(&c.output, &to_value(&good_join_census(&g, &h, JoinLimits::default())?))
        }
        Command::Verdict(a) => {
            let c = &a.common;
            let g = load(&c.source)?;
            let h = Pattern::parse(&c.pattern)?;
            emit_json(&c.output, &to_value(&diagnostics::verdict(&g, &h, a.thresholds.get()?)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("{}", json!({"error": "usage", "message": "--threads must be positive"}));
            return ExitCode::from(2);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(match e.kind() {
                "usage" | "parse" => 2,
                "capability" => 3,
                _ => 1,
            })
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use moebius_energy::continuous_energy::{energies, DiagonalHandling, QuadratureSpec};
use moebius_energy::discrete_energy::{e_cos_m, DiscreteEnergy};
use moebius_energy::experiments::{
    convergence_svg, gamma_limsup_sweep, invariance_sweep, minimize, EnergyMix, MinimizeOptions,
};
use moebius_energy::io::{self, PolygonFile};
use moebius_energy::moebius::apply_polygon;
use moebius_energy::{Curve, CurveFamily, Error, ErrorClass, Partition, Polygon, Transform};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "moebius-energy", version, about = "Discrete and continuous Moebius knot energies")]
struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one energy on a polygon file or an analytic curve.
    Energy(EnergyArgs),
    /// Check Moebius invariance of E^m_cos; exits 1 above --tol.
    Invariance(InvarianceArgs),
    /// Energies of inscribed polygons against a reference value.
    Gamma(GammaArgs),
    /// Finite-difference gradient descent on a polygon.
    Minimize(MinimizeArgs),
    /// List the analytic curve families and their spec grammar.
    Curves,
    /// Write the polygon inscribed in a curve at equally spaced parameters.
    Inscribe(InscribeArgs),
}

#[derive(Args, Debug)]
struct Source {
    /// Polygon file (JSON, or CSV with one vertex per row).
    #[arg(long, conflicts_with = "curve", required_unless_present = "curve")]
    polygon: Option<PathBuf>,
    /// Curve spec such as `circle:R=1`, `ellipse:a=2,b=1`, `torus:p=2,q=3,R=2,r=0.5`.
    #[arg(long)]
    curve: Option<String>,
    /// Ambient dimension for curves.
    #[arg(long, default_value_t = 3)]
    dim: usize,
}

#[derive(Args, Debug)]
struct Quadrature {
    #[arg(long, default_value_t = 512)]
    panels: usize,
    /// Diagonal band width in parameter units [default: 2 / panels].
    #[arg(long)]
    band: Option<f64>,
    #[arg(long, default_value = "limit-fill")]
    diagonal: DiagonalHandling,
}

impl Quadrature {
    fn spec(&self) -> Result<QuadratureSpec<f64>, Error> {
        let mut spec = QuadratureSpec::new(self.panels)?;
        if let Some(band) = self.band {
            spec.band = band;
        }
        spec.diagonal = self.diagonal;
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct EnergyArgs {
    #[command(flatten)]
    source: Source,
    /// ecos, kk, simon, continuous-E or continuous-Ecos.
    #[arg(long)]
    energy: String,
    /// Include per-pair terms (ecos only; implied by --format csv).
    #[arg(long)]
    terms: bool,
    #[command(flatten)]
    quadrature: Quadrature,
}

#[derive(Args, Debug)]
struct InvarianceArgs {
    #[arg(long)]
    polygon: PathBuf,
    /// Number of random transforms.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Evaluate this transform file instead of random ones.
    #[arg(long)]
    transform: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Args, Debug)]
struct GammaArgs {
    #[arg(long)]
    curve: String,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Comma-separated increasing vertex counts.
    #[arg(long, value_delimiter = ',', default_value = "32,64,128,256,512")]
    ms: Vec<usize>,
    /// ecos or kk.
    #[arg(long, default_value = "ecos")]
    energy: DiscreteEnergy,
    #[arg(long, default_value = "parameter")]
    partition: Partition,
    /// Reference value [default: quadrature E_cos for ecos, E for kk].
    #[arg(long)]
    reference: Option<f64>,
    /// Also write a log-log error plot.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    quadrature: Quadrature,
}

#[derive(Args, Debug)]
struct MinimizeArgs {
    #[arg(long)]
    polygon: PathBuf,
    /// Energy or weighted mix, e.g. `ecos` or `ecos+0.01*kk`.
    #[arg(long, default_value = "ecos")]
    energy: EnergyMix,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-7)]
    grad_tol: f64,
    /// First trial displacement as a fraction of the diameter.
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Where to write the final polygon JSON (CSV output only; JSON output embeds it).
    #[arg(long)]
    final_polygon: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InscribeArgs {
    #[arg(long)]
    curve: String,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value = "parameter")]
    partition: Partition,
}

enum Failure {
    Lib(Error),
    Io(String),
    Tolerance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn write_output(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_line(fields: &[String]) -> String {
    let mut s = fields.join(",");
    s.push('\n');
    s
}

fn build_curve(spec: &str, dim: usize) -> Result<Curve, Error> {
    spec.parse::<CurveFamily>()?.build(dim)
}

fn cmd_energy(cli: &Cli, a: &EnergyArgs) -> Outcome {
    let continuous = match a.energy.as_str() {
        "continuous-E" => Some(true),
        "continuous-Ecos" => Some(false),
        _ => None,
    };
    if let Some(want_e) = continuous {
        let curve = match (&a.source.curve, &a.source.polygon) {
            (Some(c), _) => build_curve(c, a.source.dim)?,
            _ => return Err(Error::InvalidParameter("continuous energies need --curve".into()).into()),
        };
        let r = energies(&curve, &a.quadrature.spec()?)?;
        let value = if want_e { r.e } else { r.e_cos };
        let text = match cli.format {
            Format::Json => pretty(&json!({
                "energy": a.energy,
                "value": value,
                "E": r.e,
                "E_cos": r.e_cos,
                "difference": r.difference,
                "panels": r.panels,
                "band": r.band,
            })),
            Format::Csv => {
                csv_line(&["energy", "value", "E", "E_cos", "difference", "panels", "band"].map(String::from))
                    + &csv_line(&[
                        a.energy.clone(),
                        value.to_string(),
                        r.e.to_string(),
                        r.e_cos.to_string(),
                        r.difference.to_string(),
                        r.panels.to_string(),
                        r.band.to_string(),
                    ])
            }
        };
        return write_output(cli.out.as_deref(), &text);
    }

    let energy: DiscreteEnergy = a.energy.parse()?;
    let polygon = match (&a.source.polygon, &a.source.curve) {
        (Some(path), _) => io::read_polygon(path)?,
        (None, Some(c)) => {
            return Err(Error::InvalidParameter(format!(
                "discrete energy '{}' needs --polygon; use `inscribe --curve {c}` first",
                energy.name()
            ))
            .into())
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    let keep = energy == DiscreteEnergy::ECos && (a.terms || cli.format == Format::Csv);
    let report = energy.report(&polygon, keep)?;
    let text = match cli.format {
        Format::Json => pretty(&serde_json::to_value(&report).expect("report serializes")),
        Format::Csv if energy == DiscreteEnergy::ECos => io::report_terms_csv(&report),
        Format::Csv => {
            csv_line(&["energy", "value", "m", "fineness"].map(String::from))
                + &csv_line(&[
                    energy.name().to_string(),
                    report.value.to_string(),
                    report.m.to_string(),
                    report.fineness.to_string(),
                ])
        }
    };
    write_output(cli.out.as_deref(), &text)
}

fn cmd_invariance(cli: &Cli, a: &InvarianceArgs) -> Outcome {
    let polygon = io::read_polygon(&a.polygon)?;
    let (max_deviation, value) = if let Some(path) = &a.transform {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let t: Transform = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        let baseline = e_cos_m(&polygon, false)?.value;
        let image = e_cos_m(&apply_polygon(&t, &polygon)?, false)?.value;
        let dev = if baseline.abs() <= 1e-10 {
            image.abs()
        } else {
            (image - baseline).abs() / baseline.abs()
        };
        let v = json!({
            "baseline": baseline,
            "transformed": image,
            "max_deviation": dev,
            "kind": if baseline.abs() <= 1e-10 { "absolute" } else { "relative" },
            "transform": t,
        });
        (dev, v)
    } else {
        let r = invariance_sweep(&polygon, a.n, cli.seed)?;
        (r.max_deviation, serde_json::to_value(&r).expect("report serializes"))
    };
    let pass = max_deviation <= a.tol;
    let text = match cli.format {
        Format::Json => {
            let mut v = value;
            v["tol"] = json!(a.tol);
            v["pass"] = json!(pass);
            pretty(&v)
        }
        Format::Csv => {
            csv_line(&["max_deviation", "tol", "pass"].map(String::from))
                + &csv_line(&[max_deviation.to_string(), a.tol.to_string(), pass.to_string()])
        }
    };
    write_output(cli.out.as_deref(), &text)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Tolerance(format!("max deviation {max_deviation:e} exceeds {:e}", a.tol)))
    }
}

fn cmd_gamma(cli: &Cli, a: &GammaArgs) -> Outcome {
    let curve = build_curve(&a.curve, a.dim)?;
    let reference = match a.reference {
        Some(r) => r,
        None => {
            let r = energies(&curve, &a.quadrature.spec()?)?;
            match a.energy {
                DiscreteEnergy::ECos => r.e_cos,
                DiscreteEnergy::KimKusner => r.e,
                DiscreteEnergy::SimonMd => {
                    return Err(Error::InvalidParameter("simon has no continuum reference; pass --reference".into()).into())
                }
            }
        }
    };
    let table = gamma_limsup_sweep(&curve, &a.ms, a.partition, a.energy, reference)?;
    if let Some(path) = &a.svg {
        std::fs::write(path, convergence_svg(&table)).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    let text = match cli.format {
        Format::Json => pretty(&serde_json::to_value(&table).expect("table serializes")),
        Format::Csv => io::table_csv(&table),
    };
    write_output(cli.out.as_deref(), &text)
}

fn cmd_minimize(cli: &Cli, a: &MinimizeArgs) -> Outcome {
    let polygon = io::read_polygon(&a.polygon)?;
    let opts = MinimizeOptions {
        max_iter: a.max_iter,
        grad_tol: a.grad_tol,
        initial_step: a.step,
        ..MinimizeOptions::default()
    };
    let trace = minimize(&polygon, &a.energy, &opts)?;
    let final_file = PolygonFile::from_polygon(&trace.final_polygon);
    let text = match cli.format {
        Format::Json => {
            let mut v = serde_json::to_value(&trace).expect("trace serializes");
            v["final_polygon"] = serde_json::to_value(&final_file).expect("polygon serializes");
            pretty(&v)
        }
        Format::Csv => io::trace_csv(&trace),
    };
    if let Some(path) = &a.final_polygon {
        std::fs::write(path, io::polygon_to_json(&trace.final_polygon))
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    write_output(cli.out.as_deref(), &text)
}

fn cmd_curves(cli: &Cli) -> Outcome {
    let families = CurveFamily::catalogue();
    let text = match cli.format {
        Format::Json => pretty(&json!(families
            .iter()
            .map(|(name, grammar)| json!({ "family": name, "spec": grammar }))
            .collect::<Vec<_>>())),
        Format::Csv => {
            let mut s = csv_line(&["family".into(), "spec".into()]);
            for (name, grammar) in families {
                s += &csv_line(&[name.to_string(), format!("\"{grammar}\"")]);
            }
            s
        }
    };
    write_output(cli.out.as_deref(), &text)
}

fn cmd_inscribe(cli: &Cli, a: &InscribeArgs) -> Outcome {
    let curve = build_curve(&a.curve, a.dim)?;
    let p = Polygon::inscribe(&curve, a.m, a.partition)?;
    let text = match cli.format {
        Format::Json => io::polygon_to_json(&p) + "\n",
        Format::Csv => io::polygon_to_csv(&p),
    };
    write_output(cli.out.as_deref(), &text)
}

fn run(cli: &Cli) -> Outcome {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| Failure::Io(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Energy(a) => cmd_energy(cli, a),
        Command::Invariance(a) => cmd_invariance(cli, a),
        Command::Gamma(a) => cmd_gamma(cli, a),
        Command::Minimize(a) => cmd_minimize(cli, a),
        Command::Curves => cmd_curves(cli),
        Command::Inscribe(a) => cmd_inscribe(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance(msg)) => {
            eprintln!("tolerance check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Geometry => 3,
                ErrorClass::Pole => 4,
            })
        }
    }
}

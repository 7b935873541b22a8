use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use aal_core::catalog::{self, entries, entry, lattice_scan, table1_verify, table1_verify_all};
use aal_core::connections::{curvature, gauduchon, holonomy_span};
use aal_core::flows::{
    anomaly_flow, balanced_flow_metric, bracket_flow, soliton_check, BracketState, FlowTrajectory, OdeOptions,
};
use aal_core::hermitian::{classify, closed_n0_obstruction};
use aal_core::io::{read_input, to_input, AlmostAbelianInput, AlgebraInput, Resolved};
use aal_core::samples::{random_data, SampleClass};
use aal_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "aal", version, about = "Hermitian geometry and flows on almost abelian Lie algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct Source {
    /// JSON input file.
    #[arg(long, short)]
    input: Option<PathBuf>,
    /// Catalog entry to use instead of an input file.
    #[arg(long)]
    catalog: Option<String>,
    /// Catalog parameters, e.g. `p=1,q=-2`.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    params: String,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Integration {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t_end: f64,
    #[arg(long, default_value_t = 1e-9)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Metric classes, Lee form, Ricci forms and closed (n,0)-form obstruction.
    Check {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Curvature forms of a Gauduchon connection.
    Curvature {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        tau: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Span of the curvature operators of a Gauduchon connection.
    Holonomy {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        tau: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Integrate a flow and write the trajectory.
    Flow {
        #[command(subcommand)]
        kind: FlowCommand,
    },
    /// Algebraic soliton test for the balanced flow (n = 3).
    Soliton {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Catalog of six-dimensional almost abelian Lie algebras.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCommand,
    },
    /// Random almost abelian data in a metric class, as an input document.
    Sample {
        #[arg(long, default_value = "generic")]
        class: SampleClass,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum FlowCommand {
    /// Bracket flow on (a, A).
    Bracket {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        int: Integration,
        #[command(flatten)]
        out: Output,
    },
    /// Balanced flow on the metric.
    Balanced {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        int: Integration,
        #[command(flatten)]
        out: Output,
    },
    /// Rescaled anomaly flow on the metric.
    Anomaly {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha_prime: f64,
        #[command(flatten)]
        int: Integration,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// List entries with their conditions.
    List {
        #[command(flatten)]
        out: Output,
    },
    /// Structure equations and canonical structure of an entry.
    Construct {
        name: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        #[command(flatten)]
        out: Output,
    },
    /// Compare recorded unimodular and balanced conditions with computation.
    VerifyTable1 {
        /// Restrict to one entry.
        name: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Search for lattice candidates.
    LatticeScan {
        name: String,
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        #[arg(long, default_value_t = 10_000)]
        kmax: u64,
        #[command(flatten)]
        out: Output,
    },
}

type CliResult<T> = Result<T, Error>;

fn parse_params(text: &str) -> CliResult<Vec<(String, f64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("parameter `{kv}` is not of the form name=value")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::InvalidInput(format!("bad value in `{kv}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn catalog_params(name: &str, text: &str) -> CliResult<Vec<f64>> {
    entry(name)?.params_from_named(&parse_params(text)?)
}

impl Source {
    fn resolve(&self) -> CliResult<Resolved> {
        match (&self.input, &self.catalog) {
            (Some(path), None) => read_input(path),
            (None, Some(name)) => Resolved::from_catalog(name, &catalog_params(name, &self.params)?),
            _ => Err(Error::InvalidInput("give exactly one of --input and --catalog".into())),
        }
    }
}

impl Integration {
    fn options(&self) -> CliResult<OdeOptions> {
        if !self.t_end.is_finite() {
            return Err(Error::InvalidInput("--t-end must be finite".into()));
        }
        let opts = OdeOptions { rtol: self.rtol, atol: self.atol, ..OdeOptions::default() };
        opts.validate()?;
        Ok(opts)
    }
}

impl Output {
    fn write(&self, text: &str) -> CliResult<()> {
        match &self.output {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                let _ = stdout.write_all(text.as_bytes());
                Ok(())
            }
        }
    }

    fn format(&self, default: Format, allowed: &[Format]) -> CliResult<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidInput("output format not available for this command".into()))
        }
    }

    fn json<T: Serialize>(&self, value: &T) -> CliResult<()> {
        self.format(Format::Json, &[Format::Json])?;
        self.write(&(json(value) + "\n"))
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

#[derive(Serialize)]
struct CheckReport {
    #[serde(flatten)]
    classes: aal_core::hermitian::MetricClassReport,
    /// `|a + tr A_ℂ|`; zero iff a closed (n,0)-form exists.
    obstruction_norm: f64,
    closed_volume_form: bool,
}

fn check(source: &Source, out: &Output) -> CliResult<()> {
    let r = source.resolve()?;
    let classes = classify(&r.data)?;
    let obs = closed_n0_obstruction(&r.data).norm();
    let report = CheckReport { classes, obstruction_norm: obs, closed_volume_form: obs <= 1e-9 };
    match out.format(Format::Json, &[Format::Json, Format::Text])? {
        Format::Text => {
            let c = &report.classes;
            let flag = |b: bool| if b { "yes" } else { "no" };
            let balanced = c.balanced.map_or("n/a", flag);
            out.write(&format!(
                "n = {}\nkahler: {}\nbalanced: {}\nskt: {}\nlck: {}\nunimodular: {}\nclosed (n,0)-form: {} (obstruction {:.3e})\noracle agrees: {}\n",
                c.n,
                flag(c.kahler),
                balanced,
                flag(c.skt),
                flag(c.lck),
                flag(c.unimodular),
                flag(report.closed_volume_form),
                report.obstruction_norm,
                flag(c.oracle_agrees)
            ))
        }
        _ => out.write(&(json(&report) + "\n")),
    }
}

#[derive(Serialize)]
struct FormEntry {
    i: usize,
    j: usize,
    /// 1-based index lists with coefficients.
    terms: Vec<(Vec<usize>, f64)>,
}

fn curvature_cmd(source: &Source, tau: f64, out: &Output) -> CliResult<()> {
    let r = source.resolve()?;
    let curv = curvature(&gauduchon(&r.algebra, &r.hermitian, &tau)?, &r.algebra);
    match out.format(Format::Text, &[Format::Json, Format::Text])? {
        Format::Text => out.write(&curv.display_with("e")),
        _ => {
            let dim = curv.dim();
            let mut forms = Vec::new();
            for i in 0..dim {
                for j in i + 1..dim {
                    let terms: Vec<_> = curv
                        .get(i, j)
                        .terms()
                        .into_iter()
                        .filter(|(_, c)| *c != 0.0)
                        .map(|(idx, c)| (idx.into_iter().map(|k| k + 1).collect(), c))
                        .collect();
                    if !terms.is_empty() {
                        forms.push(FormEntry { i: i + 1, j: j + 1, terms });
                    }
                }
            }
            out.write(&(json(&forms) + "\n"))
        }
    }
}

fn holonomy_cmd(source: &Source, tau: f64, out: &Output) -> CliResult<()> {
    let r = source.resolve()?;
    let curv = curvature(&gauduchon(&r.algebra, &r.hermitian, &tau)?, &r.algebra);
    out.json(&holonomy_span(&curv, &r.hermitian))
}

fn write_trajectory(traj: &FlowTrajectory, out: &Output) -> CliResult<()> {
    match out.format(Format::Csv, &[Format::Csv, Format::Json])? {
        Format::Json => out.write(&(json(traj) + "\n")),
        _ => out.write(&traj.to_csv()),
    }
}

fn flow(kind: &FlowCommand) -> CliResult<()> {
    match kind {
        FlowCommand::Bracket { source, int, out } => {
            let opts = int.options()?;
            let s0 = BracketState::from_data(&source.resolve()?.data)?;
            write_trajectory(&bracket_flow(&s0, int.t_end, &opts)?, out)
        }
        FlowCommand::Balanced { source, int, out } => {
            let opts = int.options()?;
            let r = source.resolve()?;
            write_trajectory(&balanced_flow_metric(&r.algebra, &r.hermitian.j, &r.hermitian.g, int.t_end, &opts)?, out)
        }
        FlowCommand::Anomaly { source, tau, alpha_prime, int, out } => {
            if !tau.is_finite() || !alpha_prime.is_finite() {
                return Err(Error::InvalidInput("--tau and --alpha-prime must be finite".into()));
            }
            let opts = int.options()?;
            let r = source.resolve()?;
            write_trajectory(&anomaly_flow(&r.data, *tau, *alpha_prime, int.t_end, &opts)?, out)
        }
    }
}

fn soliton_cmd(source: &Source, out: &Output) -> CliResult<()> {
    let r = source.resolve()?;
    #[derive(Serialize)]
    struct Report {
        soliton: bool,
        certificate: Option<aal_core::flows::SolitonCertificate>,
    }
    let certificate = soliton_check(&r.data)?;
    out.json(&Report { soliton: certificate.is_some(), certificate })
}

fn catalog_cmd(cmd: &CatalogCommand) -> CliResult<()> {
    match cmd {
        CatalogCommand::List { out } => match out.format(Format::Text, &[Format::Json, Format::Text])? {
            Format::Json => out.write(&(json(&entries()) + "\n")),
            _ => {
                let mut text = String::new();
                for e in entries() {
                    text.push_str(&format!(
                        "{:<10} params {:?}  {}  unimodular: {}  balanced: {}\n",
                        e.name, e.params, e.equations, e.unimodular, e.balanced
                    ));
                }
                out.write(&text)
            }
        },
        CatalogCommand::Construct { name, params, out } => {
            let values = catalog_params(name, params)?;
            let exact: Vec<_> = values.iter().map(|p| <aal_core::Rational as aal_core::Scalar>::from_f64(*p)).collect();
            let c = catalog::construct_exact(name, &exact)?;
            match out.format(Format::Json, &[Format::Json, Format::Text])? {
                Format::Text => out.write(&(catalog::format_equations(&c.algebra) + "\n")),
                _ => {
                    let r = Resolved::from_catalog(name, &values)?;
                    out.write(&(json(&to_input(&r.algebra, &r.hermitian)) + "\n"))
                }
            }
        }
        CatalogCommand::VerifyTable1 { name, out } => {
            let reports = match name {
                Some(n) => vec![table1_verify(n, entry(n)?.grid())?],
                None => table1_verify_all()?,
            };
            let failed = reports.iter().filter(|r| !r.passed()).count();
            match out.format(Format::Text, &[Format::Json, Format::Text])? {
                Format::Json => out.write(&(json(&reports) + "\n"))?,
                _ => {
                    let mut text = String::new();
                    for r in &reports {
                        let status = if r.passed() { "ok" } else { "MISMATCH" };
                        text.push_str(&format!("{:<10} {} points  {}\n", r.name, r.points.len(), status));
                    }
                    out.write(&text)?;
                }
            }
            if failed > 0 {
                return Err(Error::InvalidInput(format!("{failed} entries disagree with the table")));
            }
            Ok(())
        }
        CatalogCommand::LatticeScan { name, params, kmax, out } => {
            out.json(&lattice_scan(name, &catalog_params(name, params)?, *kmax)?)
        }
    }
}

fn sample(class: SampleClass, n: usize, seed: u64, out: &Output) -> CliResult<()> {
    if n < 2 {
        return Err(Error::UnsupportedDimension { n, reason: "complex dimension must be at least 2" });
    }
    let d = random_data(&mut ChaCha8Rng::seed_from_u64(seed), n, class);
    let m = d.a_mat.rows();
    let doc = AlgebraInput {
        almost_abelian: Some(AlmostAbelianInput {
            n,
            a: d.a,
            v: d.v.clone(),
            a_mat: (0..m).map(|i| (0..m).map(|j| d.a_mat[(i, j)]).collect()).collect(),
        }),
        ..AlgebraInput::default()
    };
    out.json(&doc)
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Check { source, out } => check(source, out),
        Command::Curvature { source, tau, out } => curvature_cmd(source, *tau, out),
        Command::Holonomy { source, tau, out } => holonomy_cmd(source, *tau, out),
        Command::Flow { kind } => flow(kind),
        Command::Soliton { source, out } => soliton_cmd(source, out),
        Command::Catalog { cmd } => catalog_cmd(cmd),
        Command::Sample { class, n, seed, out } => sample(*class, *n, *seed, out),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("AAL_NUM_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::StepSizeUnderflow { last_state, .. } = &e {
                eprintln!("last state: {last_state:?}");
            }
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

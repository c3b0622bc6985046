use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use paretoinfer::analytics::{
    categorize_variables, extremes, knee, trade_off, AnalyticsBundle, AnalyticsError,
    FrontSolution, ImportanceTiers, ParetoFront,
};
use paretoinfer::emo::{run_nsga2, NsgaParams};
use paretoinfer::inference::{
    build_context, build_prompt, fmt_cost, fmt_impact, infer, render_report, ContextOptions,
    Expertise, Goal, Mode, Persona, Question, Register, RenderFormat, ReportStore, TemplateId,
    DEFAULT_CHARACTER_BUDGET,
};
use paretoinfer::problem::calibration::{calibrate, Calibration, CalibrationDesign};
use paretoinfer::problem::{benchmark_schema, make_benchmark_instance};

use crate::api::{Gateway, SelectionItem};
use crate::config::{GatewayConfig, Overrides};
use crate::error::ApiError;
use crate::store::RunStore;
use crate::worker;

#[derive(Debug, Parser)]
#[command(name = "paretoinfer", version, about = "Optimize, analyze and explain infrastructure trade-off fronts")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run store directory.
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize the benchmark and write the front export.
    Run(RunArgs),
    /// Print or export the rows of a stored run or a front file.
    Front(FrontArgs),
    /// Extremes, knee, tiers or a pairwise trade-off.
    Analyze(AnalyzeArgs),
    /// Explain a front through the offline or live backend.
    Infer(InferArgs),
    /// Start the HTTP API.
    Serve(ServeArgs),
    /// Refit the benchmark calibration.
    Calibrate(CalibrateArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
    /// CSV export path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the run document here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Record the run in the store.
    #[arg(long)]
    save: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Front export (CSV).
    #[arg(long)]
    front: Option<PathBuf>,
    /// Stored run id.
    #[arg(long)]
    run: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FrontFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct FrontArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value_t = FrontFormat::Csv)]
    format: FrontFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum What {
    Extremes,
    Knee,
    Tiers,
    Tradeoff,
    All,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value_t = What::All)]
    what: What,
    /// Trade-off start (solution number).
    #[arg(long, requires = "to")]
    from: Option<usize>,
    /// Trade-off end (solution number).
    #[arg(long, requires = "from")]
    to: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExpertiseArg {
    DomainExpert,
    MidTechnical,
    Executive,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GoalArg {
    None,
    Environmental,
    Investor,
    Community,
    Regulatory,
    Socioeconomic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegisterArg {
    Technical,
    Plain,
}

#[derive(Debug, Args)]
struct InferArgs {
    #[command(flatten)]
    source: Source,
    /// Solution number, or knee, min_cost, min_impact. Repeatable.
    #[arg(long = "select")]
    select: Vec<String>,
    #[arg(long, default_value = "solution_brief")]
    template: String,
    /// Free-text question instead of a template.
    #[arg(long)]
    question: Option<String>,
    #[arg(long, value_enum, default_value_t = ExpertiseArg::Executive)]
    expertise: ExpertiseArg,
    #[arg(long, value_enum, default_value_t = GoalArg::None)]
    goal: GoalArg,
    #[arg(long, value_enum)]
    register: Option<RegisterArg>,
    #[arg(long, conflicts_with = "live")]
    offline: bool,
    #[arg(long)]
    live: bool,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, default_value_t = DEFAULT_CHARACTER_BUDGET)]
    budget: usize,
    #[arg(long)]
    include_secondary: bool,
    #[arg(long)]
    include_additional: bool,
    /// Print the report document instead of the narrative.
    #[arg(long)]
    structured: bool,
    /// Report directory; defaults to the store's.
    #[arg(long)]
    reports: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long)]
    bind: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Write the fitted calibration here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 1 unless the fit equals the committed calibration.
    #[arg(long)]
    check: bool,
}

type CliResult = Result<(), String>;

/// Entry point shared by the binary and tests. Usage errors exit 2, other
/// failures 1.
pub fn cli_main<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CliResult {
    let mut flags = Overrides {
        store_dir: cli.store.clone(),
        ..Overrides::default()
    };
    match cli.command {
        Command::Run(a) => cmd_run(a, &cli.config, &flags, out),
        Command::Front(a) => cmd_front(a, &cli.config, &flags, out),
        Command::Analyze(a) => cmd_analyze(a, &cli.config, &flags, out),
        Command::Infer(a) => {
            if a.offline {
                flags.mode = Some(Mode::Offline);
            } else if a.live {
                flags.mode = Some(Mode::Live);
            }
            flags.endpoint_url = a.endpoint.clone();
            cmd_infer(a, &cli.config, &flags, out)
        }
        Command::Serve(a) => {
            flags.bind = a.bind;
            flags.workers = a.workers;
            cmd_serve(&cli.config, &flags, out)
        }
        Command::Calibrate(a) => cmd_calibrate(a, out),
    }
}

fn msg(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn api(e: ApiError) -> String {
    e.message
}

fn config(file: &Option<PathBuf>, flags: &Overrides) -> Result<GatewayConfig, String> {
    GatewayConfig::from_process_env(file.as_deref(), flags).map_err(api)
}

fn io_ctx(path: &Path) -> impl Fn(std::io::Error) -> String + '_ {
    move |e| format!("{}: {e}", path.display())
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_ctx(p)),
        None => out.write_all(text.as_bytes()).map_err(msg),
    }
}

fn cmd_run(a: RunArgs, file: &Option<PathBuf>, flags: &Overrides, out: &mut dyn Write) -> CliResult {
    let mut params = NsgaParams {
        seed: a.seed,
        ..NsgaParams::default()
    };
    if let Some(p) = a.pop {
        params.population_size = p;
    }
    if let Some(g) = a.gens {
        params.generations = g;
    }
    params.validate().map_err(msg)?;
    let (csv, doc, id) = if a.save {
        let cfg = config(file, flags)?;
        let store = RunStore::attach(&cfg.store_dir).map_err(api)?;
        let d = store.create(params, a.instance_seed).map_err(api)?;
        worker::execute(&store, &d.run_id);
        let d = store.get(&d.run_id).map_err(api)?;
        if let Some(e) = d.error {
            return Err(e);
        }
        let doc = serde_json::to_string_pretty(&store.run_document(&d.run_id).map_err(api)?).map_err(msg)?;
        (store.export_csv(&d.run_id).map_err(api)?, doc, Some(d.run_id))
    } else {
        let instance = make_benchmark_instance(a.instance_seed);
        let run = run_nsga2(&instance, &params).map_err(msg)?;
        let front = ParetoFront::from_run(&run, &benchmark_schema()).map_err(msg)?;
        (front.to_csv(), run.to_json(), None)
    };
    if let Some(p) = &a.json {
        std::fs::write(p, doc + "\n").map_err(io_ctx(p))?;
    }
    emit(out, a.out.as_deref(), &csv)?;
    if let Some(p) = &a.out {
        let rows = csv.lines().count().saturating_sub(1);
        writeln!(out, "wrote {rows} solutions to {}", p.display()).map_err(msg)?;
    }
    if let Some(id) = id {
        writeln!(out, "run_id {id}").map_err(msg)?;
    }
    Ok(())
}

/// Reads an export; headers are matched against the benchmark schema when
/// they all name benchmark variables, otherwise numbered by position.
pub fn load_front(path: &Path) -> Result<ParetoFront, String> {
    let text = std::fs::read_to_string(path).map_err(io_ctx(path))?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("front").to_string();
    match ParetoFront::from_csv(&text, name.clone(), Some(&benchmark_schema())) {
        Ok(f) => Ok(f),
        Err(AnalyticsError::Csv(e)) if e.starts_with("unknown variable") => {
            ParetoFront::from_csv(&text, name, None).map_err(msg)
        }
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

fn source_front(
    s: &Source,
    file: &Option<PathBuf>,
    flags: &Overrides,
) -> Result<(ParetoFront, Option<RunStore>), String> {
    if let Some(p) = &s.front {
        return Ok((load_front(p)?, None));
    }
    let id = s.run.as_deref().expect("clap enforces one source");
    let cfg = config(file, flags)?;
    let store = RunStore::attach(&cfg.store_dir).map_err(api)?;
    let front = store.front(id).map_err(api)?;
    Ok((front, Some(store)))
}

fn cmd_front(a: FrontArgs, file: &Option<PathBuf>, flags: &Overrides, out: &mut dyn Write) -> CliResult {
    let (front, _) = source_front(&a.source, file, flags)?;
    let text = match a.format {
        FrontFormat::Csv => front.to_csv(),
        FrontFormat::Json => serde_json::to_string_pretty(&front).map_err(msg)? + "\n",
    };
    emit(out, a.out.as_deref(), &text)
}

fn row_line(s: &FrontSolution) -> String {
    let mut parts = vec![s.number.to_string(), fmt_cost(s.cost()), fmt_impact(s.impact())];
    parts.extend(s.x.iter().map(|v| v.to_string()));
    parts.join(",")
}

fn header_line(front: &ParetoFront) -> String {
    let mut h = vec![
        paretoinfer::analytics::COL_NUMBER.to_string(),
        paretoinfer::analytics::COL_COST.to_string(),
        paretoinfer::analytics::COL_IMPACT.to_string(),
    ];
    h.extend(front.columns().iter().map(|c| c.header()));
    h.join(",")
}

fn cmd_analyze(a: AnalyzeArgs, file: &Option<PathBuf>, flags: &Overrides, out: &mut dyn Write) -> CliResult {
    let (front, _) = source_front(&a.source, file, flags)?;
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(msg);
    if a.json {
        let value = match a.what {
            What::All => serde_json::to_value(AnalyticsBundle::compute(&front).map_err(msg)?),
            What::Extremes => {
                let e = extremes(&front).map_err(msg)?;
                serde_json::to_value(serde_json::json!({"min_cost": e.min_cost, "min_impact": e.min_impact}))
            }
            What::Knee => {
                let k = knee(&front).map_err(msg)?;
                serde_json::to_value(serde_json::json!({"solution": k.solution, "distance": k.distance}))
            }
            What::Tiers => serde_json::to_value(categorize_variables(&front).map_err(msg)?),
            What::Tradeoff => serde_json::to_value(tradeoff(&a, &front)?),
        }
        .map_err(msg)?;
        return w(out, serde_json::to_string_pretty(&value).map_err(msg)?);
    }
    let all = a.what == What::All;
    if all || a.what == What::Extremes {
        let e = extremes(&front).map_err(msg)?;
        w(out, format!("min_cost: {}", row_line(e.min_cost)))?;
        w(out, format!("min_impact: {}", row_line(e.min_impact)))?;
    }
    if all || a.what == What::Knee {
        match knee(&front) {
            Ok(k) => {
                if !all {
                    w(out, header_line(&front))?;
                    w(out, row_line(k.solution))?;
                } else {
                    w(out, format!("knee: {}", row_line(k.solution)))?;
                }
                w(out, format!("chord distance {:.4}", k.distance))?;
            }
            Err(e) if all => w(out, format!("knee: {e}"))?,
            Err(e) => return Err(msg(e)),
        }
    }
    if all || a.what == What::Tiers {
        let t = match categorize_variables(&front) {
            Ok(t) => t,
            Err(e) if all => {
                w(out, format!("tiers: {e}"))?;
                ImportanceTiers::unscored(&front)
            }
            Err(e) => return Err(msg(e)),
        };
        if t.is_low_support() {
            w(out, format!("note: {} solutions; scores are weakly supported", t.front_size))?;
        }
        for s in &t.scores {
            w(out, format!("{:<10} {:>3}  {:.2}  {}", s.tier.as_str(), s.index, s.score, s.name))?;
        }
    }
    if a.what == What::Tradeoff {
        let t = tradeoff(&a, &front)?;
        w(out, format!(
            "{} -> {}: Total Cost {:+.2} M$, Env. Impact {:+.3}",
            t.solution_a, t.solution_b, t.delta_cost, t.delta_impact
        ))?;
        for d in &t.top_variable_deltas {
            w(out, format!("  {} {:+} {}", d.name, d.delta, d.unit))?;
        }
    }
    Ok(())
}

fn tradeoff(a: &AnalyzeArgs, front: &ParetoFront) -> Result<paretoinfer::analytics::TradeOffReport, String> {
    match (a.from, a.to) {
        (Some(x), Some(y)) => trade_off(front, x, y).map_err(msg),
        _ => Err("tradeoff needs --from and --to".into()),
    }
}

fn cmd_infer(a: InferArgs, file: &Option<PathBuf>, flags: &Overrides, out: &mut dyn Write) -> CliResult {
    let cfg = config(file, flags)?;
    let (front, store) = source_front(&a.source, file, flags)?;
    let bundle = match (&store, &a.source.run) {
        (Some(s), Some(id)) => s.analytics(id).map_err(api)?,
        _ => AnalyticsBundle::compute(&front).map_err(msg)?,
    };
    let items: Vec<SelectionItem> = a
        .select
        .iter()
        .map(|s| s.parse().map(SelectionItem::Number).unwrap_or_else(|_| SelectionItem::Named(s.clone())))
        .collect();
    let selection = crate::api::resolve(&items, &bundle).map_err(api)?;
    let tiers = bundle.tiers.clone().unwrap_or_else(|| ImportanceTiers::unscored(&front));
    let opts = ContextOptions {
        include_secondary: a.include_secondary,
        include_additional: a.include_additional,
    };
    let ctx = build_context(&front, &bundle, &selection, &tiers, opts).map_err(msg)?;
    let expertise = match a.expertise {
        ExpertiseArg::DomainExpert => Expertise::DomainExpert,
        ExpertiseArg::MidTechnical => Expertise::MidTechnical,
        ExpertiseArg::Executive => Expertise::Executive,
    };
    let goal = match a.goal {
        GoalArg::None => Goal::None,
        GoalArg::Environmental => Goal::Environmental,
        GoalArg::Investor => Goal::Investor,
        GoalArg::Community => Goal::Community,
        GoalArg::Regulatory => Goal::Regulatory,
        GoalArg::Socioeconomic => Goal::Socioeconomic,
    };
    let persona = match a.register {
        None => Persona::of(expertise, goal),
        Some(RegisterArg::Plain) => Persona::new(expertise, goal, Register::Plain).map_err(msg)?,
        Some(RegisterArg::Technical) => Persona::new(expertise, goal, Register::Technical).map_err(msg)?,
    };
    let question = match &a.question {
        Some(q) => Question::Text(q.clone()),
        None => Question::Template(
            TemplateId::parse(&a.template).ok_or_else(|| format!("unknown template {:?}", a.template))?,
        ),
    };
    let prompt = build_prompt(&ctx, &persona, &question, a.budget).map_err(msg)?;
    let reports = match (&a.reports, store) {
        (Some(dir), _) => ReportStore::open(dir).map_err(msg)?,
        (None, Some(s)) => ReportStore::open(s.reports().dir()).map_err(msg)?,
        (None, None) => ReportStore::open(cfg.store_dir.join("reports")).map_err(msg)?,
    };
    let (report, name) = infer(&prompt, &cfg.backend, &reports).map_err(|e| match e.report() {
        Some(r) => format!("{e} (report {r})"),
        None => e.to_string(),
    })?;
    let format = if a.structured { RenderFormat::Structured } else { RenderFormat::Plain };
    write!(out, "{}", render_report(&report, format)).map_err(msg)?;
    if !a.structured {
        writeln!(out, "\nreport {name}").map_err(msg)?;
    }
    Ok(())
}

fn cmd_serve(file: &Option<PathBuf>, flags: &Overrides, out: &mut dyn Write) -> CliResult {
    let cfg = config(file, flags)?;
    let rt = tokio::runtime::Runtime::new().map_err(msg)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&cfg.bind).await.map_err(|e| format!("{}: {e}", cfg.bind))?;
        let addr = listener.local_addr().map_err(msg)?;
        let gw = Gateway::open(&cfg.store_dir, cfg.workers, cfg.backend.clone()).map_err(api)?;
        writeln!(out, "listening on http://{addr} (store {})", cfg.store_dir.display()).map_err(msg)?;
        out.flush().map_err(msg)?;
        gw.serve(listener).await.map_err(msg)
    })
}

fn cmd_calibrate(a: CalibrateArgs, out: &mut dyn Write) -> CliResult {
    let cal = calibrate(&CalibrationDesign::default()).map_err(msg)?;
    if a.check {
        if cal != Calibration::committed() {
            return Err("fitted calibration differs from the committed one".into());
        }
        return writeln!(out, "calibration matches the committed fixture").map_err(msg);
    }
    emit(out, a.out.as_deref(), &cal.to_json())
}

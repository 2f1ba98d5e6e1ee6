use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tdgen::campaign::{
    rows_from_csv, run_campaign_with, CampaignConfig, CampaignRow, MaxSize, RunOptions, ShapeMode,
    ShapeSpace, StopReason, StopRule,
};
use tdgen::interp::{execute, DEFAULT_STEP_BUDGET};
use tdgen::oracle::{enumerate_with, predict, Construct, HeuristicEntry, OracleOptions};
use tdgen::schema::InputVector;
use tdgen::suite::{
    export, extract_suite, upsert_heuristic, Exportable, Format, HeuristicStore, Source, TestSuite,
};
use tdgen::trace::render_trace;
use tdgen::{Subject, SubjectError};

const EXIT_USAGE: u8 = 1;
const EXIT_SUBJECT: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Random path-coverage test data generation for loop-heavy programs.
#[derive(Parser)]
#[command(name = "tdgen", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one input and print its path string.
    Run {
        subject: PathBuf,
        /// Input as JSON, e.g. '{"a":[0],"d":1,"z":7}'.
        #[arg(long, conflicts_with = "input_file")]
        input: Option<String>,
        #[arg(long)]
        input_file: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        step_budget: u64,
        /// Also print final parameter values and the return value.
        #[arg(long)]
        outputs: bool,
    },
    /// Run a campaign; write report.csv, suite.json and summary.json.
    Explore(ExploreArgs),
    /// Enumerate every feasible path over a small domain.
    Oracle {
        subject: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        /// Cap per dimension: `N` or `name=N,...`. Every shape up to the cap is enumerated.
        #[arg(long)]
        max_size: String,
        #[arg(long, default_value_t = 3)]
        domain: u64,
        #[arg(long, default_value_t = tdgen::oracle::DEFAULT_ORACLE_CAP)]
        cap: u64,
        /// Output file (suite JSON); standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the closed-form heuristic entry for a construct.
    Predict {
        construct: String,
        /// Comma-separated dimensions, e.g. `4,4,4` for matrix (m,n,q).
        #[arg(long)]
        dims: String,
        /// Heuristic table to upsert the prediction into.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Validate a suite by replay and re-export it.
    Suite {
        suite: PathBuf,
        #[arg(long)]
        subject: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Merge report CSVs and write plot-ready k/ufp and k/nfp tables.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StopArg {
    Saturation,
    LongestPath,
    KMax,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeModeArg {
    CostBudget,
    Fixed,
}

#[derive(Args)]
struct ExploreArgs {
    subject: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Campaign configuration JSON; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Maximum array size / dimension value: `N` or `name=N,...`.
    #[arg(long)]
    max_size: Option<String>,
    /// Elements are drawn from [0, domain).
    #[arg(long)]
    domain: Option<u64>,
    /// Maximum number of budget steps.
    #[arg(long)]
    max_k: Option<u64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Saturation window.
    #[arg(long)]
    window: Option<u64>,
    #[arg(long, value_enum)]
    stop: Option<StopArg>,
    #[arg(long, value_enum)]
    shape_mode: Option<ShapeModeArg>,
    #[arg(long)]
    step_budget: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Zero the timing column so reruns are byte-identical.
    #[arg(long)]
    stable_time: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Heuristic table to record the measured entry in (needs --construct).
    #[arg(long, requires = "construct")]
    heuristics: Option<PathBuf>,
    #[arg(long)]
    construct: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn runtime(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_RUNTIME,
            message: message.to_string(),
        }
    }
}

impl From<SubjectError> for Failure {
    fn from(e: SubjectError) -> Self {
        Failure {
            code: EXIT_SUBJECT,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tdgen: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            subject,
            input,
            input_file,
            step_budget,
            outputs,
        } => cmd_run(&subject, input, input_file, step_budget, outputs),
        Command::Explore(args) => cmd_explore(args),
        Command::Oracle {
            subject,
            schema,
            max_size,
            domain,
            cap,
            out,
        } => cmd_oracle(&subject, schema.as_deref(), &max_size, domain, cap, out),
        Command::Predict {
            construct,
            dims,
            store,
        } => cmd_predict(&construct, &dims, store),
        Command::Suite {
            suite,
            subject,
            schema,
            out,
            format,
        } => cmd_suite(&suite, &subject, schema.as_deref(), out, &format),
        Command::Report { reports, out } => cmd_report(&reports, &out),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

/// Load a subject; the schema is only required by commands that sample.
fn load_program_only(
    path: &Path,
) -> Result<(tdgen::dsl::Program, tdgen::dsl::DecisionTable), Failure> {
    let source = fs::read_to_string(path).map_err(|source| {
        Failure::from(SubjectError::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    let program = tdgen::dsl::parse(&source).map_err(|e| Failure::from(SubjectError::from(e)))?;
    let table = tdgen::dsl::assign_labels(&program);
    Ok((program, table))
}

fn cmd_run(
    subject: &Path,
    input: Option<String>,
    input_file: Option<PathBuf>,
    step_budget: u64,
    outputs: bool,
) -> Result<(), Failure> {
    let (program, table) = load_program_only(subject)?;
    let text = match (input, input_file) {
        (Some(s), _) => s,
        (None, Some(p)) => read(&p)?,
        (None, None) => return Err(Failure::usage("one of --input or --input-file is required")),
    };
    let input = InputVector::from_json(&text).map_err(|e| Failure::usage(format!("input: {e}")))?;
    input
        .check_against(&program)
        .map_err(|e| Failure::usage(format!("input: {e}")))?;
    let run = execute(&program, &table, &input, step_budget).map_err(Failure::runtime)?;
    let key = render_trace(&run.trace, &table).map_err(Failure::runtime)?;
    println!("{key}");
    if outputs {
        eprintln!("params: {}", run.outputs.params.to_json());
        match run.outputs.returned {
            Some(v) => eprintln!("returned: {v}"),
            None => eprintln!("returned: (none)"),
        }
    }
    Ok(())
}

fn parse_max_size(spec: &str) -> Result<MaxSize, Failure> {
    if let Ok(n) = spec.trim().parse::<usize>() {
        return Ok(MaxSize::Uniform(n));
    }
    let mut map = BTreeMap::new();
    for part in spec.split(',') {
        let (name, value) = part.split_once('=').ok_or_else(|| {
            Failure::usage(format!("--max-size: expected N or name=N, got `{part}`"))
        })?;
        let value = value
            .trim()
            .parse::<usize>()
            .map_err(|e| Failure::usage(format!("--max-size: {name}: {e}")))?;
        map.insert(name.trim().to_string(), value);
    }
    Ok(MaxSize::PerDim(map))
}

#[derive(Serialize)]
struct Summary<'a> {
    subject: &'a str,
    k_longest: Option<u64>,
    k_saturation: Option<u64>,
    k_cap: u64,
    stop: StopReason,
    last_k: u64,
    ufp: usize,
    llp: usize,
    executions: u64,
    skipped: u64,
}

fn cmd_explore(args: ExploreArgs) -> Result<(), Failure> {
    let subject = Subject::load(&args.subject, args.schema.as_deref())?;
    let mut config = match &args.config {
        Some(p) => CampaignConfig::from_json(&read(p)?).map_err(Failure::usage)?,
        None => CampaignConfig::default(),
    };
    if let Some(s) = &args.max_size {
        config.max_size = parse_max_size(s)?;
    }
    if let Some(v) = args.domain {
        config.domain = v;
    }
    if let Some(v) = args.max_k {
        config.k_max = v;
    }
    if let Some(v) = args.batch {
        config.batch = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.step_budget {
        config.step_budget = v;
    }
    if let Some(m) = args.shape_mode {
        config.shape_mode = match m {
            ShapeModeArg::CostBudget => ShapeMode::CostBudget,
            ShapeModeArg::Fixed => ShapeMode::Fixed,
        };
    }
    let window = args.window.unwrap_or(config.stop_rule.window());
    config.stop_rule = match args.stop {
        Some(StopArg::Saturation) => StopRule::Saturation { window },
        Some(StopArg::LongestPath) => StopRule::LongestPath,
        Some(StopArg::KMax) => StopRule::KMax,
        None => match config.stop_rule {
            StopRule::Saturation { .. } => StopRule::Saturation { window },
            other => other,
        },
    };
    config.validate().map_err(Failure::usage)?;
    let construct = args
        .construct
        .as_deref()
        .map(str::parse::<Construct>)
        .transpose()
        .map_err(Failure::usage)?;

    let options = RunOptions {
        workers: args.workers.max(1),
        stable_time: args.stable_time,
    };
    let (report, set) = run_campaign_with(
        &subject.program,
        &subject.table,
        &subject.schema,
        &config,
        options,
    )
    .map_err(Failure::runtime)?;
    let config_json = serde_json::to_value(&config).map_err(Failure::runtime)?;
    let suite =
        extract_suite(&set, &subject, config_json, Some(config.seed)).map_err(Failure::runtime)?;

    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::runtime(format!("{}: {e}", args.out.display())))?;
    write(
        &args.out.join("report.csv"),
        &export(Exportable::Report(&report), Format::Csv).map_err(Failure::runtime)?,
    )?;
    write(
        &args.out.join("suite.json"),
        &export(Exportable::Suite(&suite), Format::Json).map_err(Failure::runtime)?,
    )?;
    let last = report.final_row().cloned().unwrap_or(CampaignRow {
        k: 0,
        test_cases: 0,
        ufp: 0,
        nfp: 0,
        llp: 0,
        etime_ms: 0.0,
    });
    let summary = Summary {
        subject: subject.name(),
        k_longest: report.k_longest,
        k_saturation: report.k_saturation,
        k_cap: report.k_cap,
        stop: report.stop,
        last_k: last.k,
        ufp: last.ufp,
        llp: last.llp,
        executions: report.executions,
        skipped: report.skipped,
    };
    let mut summary_bytes = serde_json::to_vec_pretty(&summary).map_err(Failure::runtime)?;
    summary_bytes.push(b'\n');
    write(&args.out.join("summary.json"), &summary_bytes)?;

    let show = |v: Option<u64>| v.map_or_else(|| "not-reached".to_string(), |k| k.to_string());
    println!(
        "{}: k_L={} k_S={} ufp={} llp={} last_k={} stop={:?} skipped={}",
        subject.name(),
        show(report.k_longest),
        show(report.k_saturation),
        last.ufp,
        last.llp,
        last.k,
        report.stop,
        report.skipped
    );

    if let (Some(path), Some(construct)) = (&args.heuristics, construct) {
        let Some(k_l) = report.k_longest else {
            return Err(Failure::runtime("k_L not reached; nothing to record"));
        };
        let space = ShapeSpace::new(&subject.schema, &config).map_err(Failure::runtime)?;
        let dims = space
            .all()
            .iter()
            .max_by_key(|s| (s.cost, s.elements, s.shape.clone()))
            .map(|s| s.shape.0.iter().map(|&d| d as u64).collect())
            .unwrap_or_default();
        let entry = HeuristicEntry {
            construct,
            dims,
            k_l,
            k_s: report.k_saturation,
            l_max: last.llp as u64,
        };
        update_store(path, entry, Source::Measured)?;
    }
    Ok(())
}

fn update_store(path: &Path, entry: HeuristicEntry, source: Source) -> Result<(), Failure> {
    let mut store = if path.exists() {
        HeuristicStore::from_json(read(path)?.as_bytes()).map_err(Failure::usage)?
    } else {
        HeuristicStore::default()
    };
    upsert_heuristic(&mut store, entry, source);
    write(
        path,
        &export(Exportable::Heuristics(&store), Format::Json).map_err(Failure::runtime)?,
    )
}

fn cmd_oracle(
    subject_path: &Path,
    schema: Option<&Path>,
    max_size: &str,
    domain: u64,
    cap: u64,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let subject = Subject::load(subject_path, schema)?;
    let config = CampaignConfig {
        max_size: parse_max_size(max_size)?,
        domain,
        ..CampaignConfig::default()
    };
    config.validate().map_err(Failure::usage)?;
    let space = ShapeSpace::new(&subject.schema, &config).map_err(Failure::usage)?;
    let options = OracleOptions {
        cap,
        ..OracleOptions::default()
    };
    let mut set = tdgen::campaign::PathSet::new();
    for info in space.all() {
        let part = enumerate_with(
            &subject.program,
            &subject.table,
            &subject.schema,
            &info.shape,
            domain,
            options,
        )
        .map_err(Failure::runtime)?;
        set.absorb(part);
    }
    let provenance = serde_json::json!({
        "oracle": { "domain": domain, "max_size": config.max_size }
    });
    let suite = extract_suite(&set, &subject, provenance, None).map_err(Failure::runtime)?;
    let bytes = export(Exportable::Suite(&suite), Format::Json).map_err(Failure::runtime)?;
    match out {
        Some(p) => write(&p, &bytes)?,
        None => print!("{}", String::from_utf8_lossy(&bytes)),
    }
    eprintln!("{}: {} feasible paths", subject.name(), set.len());
    Ok(())
}

fn cmd_predict(construct: &str, dims: &str, store: Option<PathBuf>) -> Result<(), Failure> {
    let construct: Construct = construct.parse().map_err(Failure::usage)?;
    let dims = dims
        .split(',')
        .map(|d| d.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage(format!("--dims: {e}")))?;
    let entry = predict(construct, &dims).map_err(Failure::usage)?;
    println!("{entry}");
    if let Some(path) = store {
        update_store(&path, entry, Source::Predicted)?;
    }
    Ok(())
}

fn cmd_suite(
    suite_path: &Path,
    subject_path: &Path,
    schema: Option<&Path>,
    out: Option<PathBuf>,
    format: &str,
) -> Result<(), Failure> {
    let subject = Subject::load(subject_path, schema)?;
    let format: Format = format.parse().map_err(Failure::usage)?;
    let suite = TestSuite::from_json(read(suite_path)?.as_bytes()).map_err(Failure::usage)?;
    suite.verify(&subject).map_err(Failure::runtime)?;
    if suite.schema_digest != subject.schema.digest() {
        eprintln!("tdgen: warning: schema digest differs from the suite's");
    }
    let bytes = export(Exportable::Suite(&suite), format).map_err(Failure::runtime)?;
    match out {
        Some(p) => write(&p, &bytes)?,
        None => eprintln!("{}: {} entries replay", suite.subject, suite.entries.len()),
    }
    Ok(())
}

fn cmd_report(reports: &[PathBuf], out: &Path) -> Result<(), Failure> {
    let mut runs: Vec<(String, Vec<CampaignRow>)> = Vec::new();
    for path in reports {
        let bytes =
            fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let rows = rows_from_csv(&bytes)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let mut name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if name == "report" {
            if let Some(parent) = path.parent().and_then(Path::file_name) {
                name = parent.to_string_lossy().into_owned();
            }
        }
        runs.push((name, rows));
    }
    fs::create_dir_all(out).map_err(|e| Failure::runtime(format!("{}: {e}", out.display())))?;

    let csv_err = |e: csv::Error| Failure::runtime(e);
    let mut merged = csv::Writer::from_writer(Vec::new());
    merged
        .write_record(["source", "k", "test_cases", "ufp", "nfp", "llp", "etime_ms"])
        .map_err(csv_err)?;
    for (name, rows) in &runs {
        for r in rows {
            merged
                .write_record([
                    name.clone(),
                    r.k.to_string(),
                    r.test_cases.to_string(),
                    r.ufp.to_string(),
                    r.nfp.to_string(),
                    r.llp.to_string(),
                    format!("{:.3}", r.etime_ms),
                ])
                .map_err(csv_err)?;
        }
    }
    write(
        &out.join("merged.csv"),
        &merged
            .into_inner()
            .map_err(|e| Failure::runtime(e.to_string()))?,
    )?;

    let ks: BTreeSet<u64> = runs
        .iter()
        .flat_map(|(_, rows)| rows.iter().map(|r| r.k))
        .collect();
    for (file, column) in [("ufp_vs_k.csv", 0), ("nfp_vs_k.csv", 1)] {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["k".to_string()];
        header.extend(runs.iter().map(|(n, _)| n.clone()));
        w.write_record(&header).map_err(csv_err)?;
        for k in &ks {
            let mut record = vec![k.to_string()];
            for (_, rows) in &runs {
                let cell = rows
                    .iter()
                    .find(|r| r.k == *k)
                    .map(|r| if column == 0 { r.ufp } else { r.nfp }.to_string())
                    .unwrap_or_default();
                record.push(cell);
            }
            w.write_record(&record).map_err(csv_err)?;
        }
        write(
            &out.join(file),
            &w.into_inner()
                .map_err(|e| Failure::runtime(e.to_string()))?,
        )?;
    }
    eprintln!("merged {} reports into {}", runs.len(), out.display());
    Ok(())
}

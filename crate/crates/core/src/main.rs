use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use dgsem::config::{parse_config, ParsedConfig, RunConfig, RunSettings, StudyMatrix};
use dgsem::report::{emit_table, sci3, write_atomic, ReportError, TableFormat};
use dgsem::verification::{run_convergence_study, run_level, run_level_traced, ConvergenceTable};
use dgsem::{presets, selftest, DgError};

#[derive(Parser)]
#[command(name = "dgsem", version, about = "DGSEM convergence studies for the 3D Euler equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration over its refinement levels.
    Run(Common),
    /// Run a study matrix from a config file or a built-in table preset.
    Study(Common),
    /// Operator, flux and entropy property checks.
    Selftest,
}

#[derive(Args)]
struct Common {
    /// key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in table preset (1-9, or ms for 7-9).
    #[arg(long)]
    table: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long, env = "DGSEM_THREADS")]
    threads: Option<usize>,
    /// Directory for CSV output.
    #[arg(long, env = "DGSEM_OUT_DIR")]
    out: Option<PathBuf>,
    /// Fixed CFL number (default: chosen per degree and case).
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    first_level: Option<usize>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(DgError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{0} self-test check(s) failed")]
    Selftest(usize),
}

impl From<DgError> for CliError {
    fn from(e: DgError) -> Self {
        if is_numerical(&e) {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn is_numerical(e: &DgError) -> bool {
    match e {
        DgError::AtLevel { source, .. } => is_numerical(source),
        DgError::NonFinite { .. }
        | DgError::InvalidState { .. }
        | DgError::StateAt { .. }
        | DgError::NonPositiveMean(..)
        | DgError::DegenerateWaveSpeeds(_) => true,
        _ => false,
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) | CliError::Selftest(_) => 2,
            CliError::Read { .. } | CliError::Report(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Selftest => run_selftest(),
        Command::Run(c) => {
            let parsed = load_config(&c)?;
            let ParsedConfig::Run(mut run) = parsed else {
                return Err(CliError::Config("`run` needs a single configuration; use `study` for lists".into()));
            };
            apply_overrides(&mut run.settings, &c)?;
            with_threads(run.settings.threads, || execute_run(&run))
        }
        Command::Study(c) => {
            let mut matrices = match (&c.table, &c.config) {
                (Some(t), None) => presets::table(t)?,
                (None, Some(_)) => match load_config(&c)? {
                    ParsedConfig::Study(m) => vec![m],
                    ParsedConfig::Run(r) => vec![single_matrix(r)],
                },
                _ => return Err(CliError::Config("study needs exactly one of --table or --config".into())),
            };
            for m in &mut matrices {
                apply_overrides(&mut m.settings, &c)?;
                m.validate()?;
            }
            let threads = matrices[0].settings.threads;
            with_threads(threads, || execute_study(&matrices))
        }
    }
}

fn load_config(c: &Common) -> Result<ParsedConfig, CliError> {
    if c.table.is_some() {
        return Err(CliError::Config("--table is only valid with `study`".into()));
    }
    let path = c.config.as_ref().ok_or_else(|| CliError::Config("missing --config".into()))?;
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn apply_overrides(s: &mut RunSettings, c: &Common) -> Result<(), CliError> {
    if c.cfl.is_some() {
        s.cfl = c.cfl;
    }
    if let Some(l) = c.levels {
        s.levels = l;
    }
    if let Some(l) = c.first_level {
        s.first_level = l;
    }
    if c.threads.is_some() {
        s.threads = c.threads;
    }
    if c.out.is_some() {
        s.out.clone_from(&c.out);
    }
    if let Some(cfl) = s.cfl.filter(|c| !(*c > 0.0 && *c <= 1.0)) {
        return Err(CliError::Config(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    if s.levels == 0 || s.first_level >= s.levels {
        return Err(CliError::Config("need levels >= 1 and first_level < levels".into()));
    }
    if s.threads == Some(0) {
        return Err(CliError::Config("threads must be at least 1".into()));
    }
    Ok(())
}

fn single_matrix(r: RunConfig) -> StudyMatrix {
    StudyMatrix {
        name: "run".into(),
        nodes: r.scheme.nodes,
        volume: r.scheme.volume,
        gas: r.scheme.gas,
        fluxes: vec![r.scheme.flux],
        degrees: vec![r.scheme.degree],
        cases: vec![r.case],
        settings: r.settings,
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn file_stem(prefix: &str, run: &RunConfig) -> String {
    format!(
        "{prefix}_{}_n{}_{}",
        run.scheme.label().to_ascii_lowercase(),
        run.scheme.degree,
        run.case.name()
    )
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| {
        CliError::Report(ReportError::Io {
            path: dir.display().to_string(),
            source,
        })
    })
}

fn execute_run(run: &RunConfig) -> Result<(), CliError> {
    let spec = run.study_spec();
    let s = &run.settings;
    let tracing = s.entropy_trace || s.conservation_trace;
    let mut table = ConvergenceTable::default();
    println!("{} {} cfl={}", run.scheme, run.case.name(), spec.cfl);
    for level in s.first_level..s.levels {
        let outcome = if tracing {
            let mut trace = String::from("step,t");
            if s.entropy_trace {
                trace.push_str(",entropy");
            }
            if s.conservation_trace {
                trace.push_str(",mass,momentum_x,momentum_y,momentum_z,energy");
            }
            trace.push('\n');
            let o = run_level_traced(&spec, level, |step, t, dg, u| {
                trace.push_str(&format!("{step},{t}"));
                if s.entropy_trace {
                    let e = dg.total_entropy(u).map(|e| e.to_string()).unwrap_or_else(|_| "NaN".into());
                    trace.push_str(&format!(",{e}"));
                }
                if s.conservation_trace {
                    for c in dg.conserved_totals(u) {
                        trace.push_str(&format!(",{c}"));
                    }
                }
                trace.push('\n');
            })?;
            match &s.out {
                Some(dir) => {
                    ensure_dir(dir)?;
                    let path = dir.join(format!("{}_level{level}_trace.csv", file_stem("run", run)));
                    write_atomic(&path, &trace)?;
                }
                None => eprint!("{trace}"),
            }
            o
        } else {
            run_level(&spec, level)?
        };
        table.rows.push(outcome.row);
    }
    table.attach_eoc();
    print!("{}", emit_table(&table, TableFormat::Console)?);
    if let Some(dir) = &s.out {
        ensure_dir(dir)?;
        let path = dir.join(format!("{}.csv", file_stem("run", run)));
        write_atomic(&path, &emit_table(&table, TableFormat::Csv)?)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn execute_study(matrices: &[StudyMatrix]) -> Result<(), CliError> {
    let mut jobs = Vec::new();
    for m in matrices {
        for run in m.runs()? {
            jobs.push((m.name.clone(), run));
        }
    }
    let out_dir = matrices[0].settings.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    ensure_dir(&out_dir)?;
    let results: Vec<Result<(String, ConvergenceTable), CliError>> = jobs
        .par_iter()
        .map(|(name, run)| {
            let table = run_convergence_study(&run.study_spec())?;
            let path = out_dir.join(format!("{}.csv", file_stem(name, run)));
            write_atomic(&path, &emit_table(&table, TableFormat::Csv)?)?;
            Ok((path.display().to_string(), table))
        })
        .collect();
    let mut first_err = None;
    for ((_, run), res) in jobs.iter().zip(results) {
        match res {
            Ok((path, table)) => {
                let finest = table.finest().expect("non-empty table");
                let eoc = finest.eoc.map(|e| format!("{e:.2}")).unwrap_or_else(|| "-".into());
                println!(
                    "{:<24} {:<5} error {} EOC {:>5}  {path}",
                    run.scheme.to_string(),
                    run.case.name(),
                    sci3(finest.l2_error_density),
                    eoc
                );
            }
            Err(e) => {
                eprintln!("{} {}: {e}", run.scheme, run.case.name());
                first_err.get_or_insert(e);
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn run_selftest() -> Result<(), CliError> {
    let checks = selftest::run_all();
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed() { "ok" } else { "FAILED" };
        println!("{status:>6}  {:<60} worst {:.3e} (bound {:.0e})", c.name, c.worst, c.bound);
        failed += usize::from(!c.passed());
    }
    let roe = selftest::entropy_violation(dgsem::flux::FluxKind::Roe, 10_000, 1);
    println!("  note  plain Roe flux is not entropy stable: worst production {roe:.3e}");
    if failed > 0 {
        return Err(CliError::Selftest(failed));
    }
    Ok(())
}

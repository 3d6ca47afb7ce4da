use clap::{Parser, ValueEnum};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use symnorm::jobs::{parse_job, render_text, run_job};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Run symplectic normal-form jobs described in JSON files.
#[derive(Parser, Debug)]
#[command(name = "symnorm", version)]
struct Cli {
    /// Job file to run.
    #[arg(short, long, conflicts_with = "jobs", required_unless_present = "jobs")]
    input: Option<PathBuf>,

    /// Directory of `*.json` job files to run in parallel.
    #[arg(long, value_name = "DIR")]
    jobs: Option<PathBuf>,

    /// Report destination. A file for `--input` (stdout if omitted), a
    /// directory for `--jobs` (the job directory if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Override the truncation order of every job.
    #[arg(long)]
    order: Option<usize>,

    /// Override the random seed of every job.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for `--jobs`.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs one job file and returns the rendered report with its exit code.
fn process(path: &Path, cli: &Cli) -> (String, i32) {
    let (report, code) = match fs::read_to_string(path) {
        Err(e) => (error_report(path, "IoError", &e.to_string()), 1),
        Ok(text) => match parse_job(&text) {
            Err(e) => (error_report(path, e.kind(), &e.to_string()), 1),
            Ok(mut job) => {
                if let Some(o) = cli.order {
                    job.order = o;
                }
                if let Some(s) = cli.seed {
                    job.seed = s;
                }
                let out = run_job(&job);
                (out.report, out.exit_code)
            }
        },
    };
    let rendered = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
        Format::Text => render_text(&report),
    };
    (rendered, code)
}

fn error_report(path: &Path, kind: &str, message: &str) -> Value {
    json!({
        "job": { "file": path.display().to_string() },
        "status": "error",
        "error": { "kind": kind, "message": message },
        "exit_code": 1,
    })
}

fn run_single(input: &Path, cli: &Cli) -> Result<i32, String> {
    let (rendered, code) = process(input, cli);
    match &cli.output {
        Some(p) => fs::write(p, rendered).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{rendered}"),
    }
    Ok(code)
}

fn run_dir(dir: &Path, cli: &Cli) -> Result<i32, String> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && !p.file_name().is_some_and(|n| n.to_string_lossy().ends_with(".report.json"))
        })
        .collect();
    files.sort();
    let out_dir = cli.output.clone().unwrap_or_else(|| dir.to_path_buf());
    fs::create_dir_all(&out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;
    let ext = match cli.format {
        Format::Json => "report.json",
        Format::Text => "report.txt",
    };
    let next = AtomicUsize::new(0);
    let codes = Mutex::new(vec![0; files.len()]);
    let failures = Mutex::new(Vec::new());
    std::thread::scope(|s| {
        for _ in 0..cli.workers.clamp(1, files.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let (rendered, code) = process(path, cli);
                let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                let dest = out_dir.join(format!("{stem}.{ext}"));
                if let Err(e) = fs::write(&dest, rendered) {
                    failures.lock().unwrap().push(format!("{}: {e}", dest.display()));
                }
                codes.lock().unwrap()[i] = code;
            });
        }
    });
    let failures = failures.into_inner().unwrap();
    if !failures.is_empty() {
        return Err(failures.join("\n"));
    }
    let codes = codes.into_inner().unwrap();
    for (path, code) in files.iter().zip(&codes) {
        eprintln!("{}: exit {code}", path.display());
    }
    Ok(codes.into_iter().max().unwrap_or(0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match (&cli.input, &cli.jobs) {
        (Some(input), _) => run_single(input, &cli),
        (None, Some(dir)) => run_dir(dir, &cli),
        (None, None) => unreachable!("clap requires one of --input and --jobs"),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("symnorm: {msg}");
            ExitCode::from(1)
        }
    }
}

//! `multieig bench --suite paper`: the published experiments with their
//! reference distances.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use multieig::record::{write_result, ResultRecord};
use multieig::roster::{paper_cases, PaperCase, Tolerance, DATA_ENV};
use serde::Serialize;

use crate::CliResult;

#[derive(Clone, Copy, ValueEnum)]
pub enum Suite {
    Paper,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Run only this case.
    #[arg(long)]
    case: Option<String>,
    /// Directory for bench.json and one result file per case.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Treat a missing data file as a failure instead of skipping the case.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Outcome {
    Pass,
    Fail,
    WaivedLocal,
    Skipped,
}

impl Outcome {
    fn label(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::WaivedLocal => "WAIVED-LOCAL",
            Outcome::Skipped => "SKIPPED",
        }
    }
}

#[derive(Debug, Serialize)]
struct Row {
    case: String,
    target: f64,
    tolerance: Tolerance,
    obtained: Option<f64>,
    relative_error: Option<f64>,
    seconds: Option<f64>,
    verified: Option<bool>,
    outcome: Outcome,
    note: Option<String>,
}

fn run_case(case: &PaperCase, args: &BenchArgs) -> CliResult<Row> {
    let mut row = Row {
        case: case.name.to_string(),
        target: case.target,
        tolerance: case.tolerance,
        obtained: None,
        relative_error: None,
        seconds: None,
        verified: None,
        outcome: Outcome::Skipped,
        note: None,
    };
    if !case.data_available() {
        let msg = format!("{} unavailable; set {DATA_ENV}", case.matrix.trim_start_matches("file:"));
        eprintln!("warning: {}: {msg}", case.name);
        row.outcome = if args.strict { Outcome::Fail } else { Outcome::Skipped };
        row.note = Some(msg);
        return Ok(row);
    }
    let run = case.run(args.jobs)?;
    let best = run.outcome.best_result();
    let obtained = best.distance;
    row.obtained = Some(obtained);
    row.relative_error = Some((obtained - case.target).abs() / case.target.abs());
    row.seconds = Some(run.seconds);
    row.verified = Some(best.verification.passed);
    let accepted = best.feasible && case.tolerance.accepts(obtained, case.target);
    row.outcome = match (case.waived, accepted) {
        (true, true) => Outcome::WaivedLocal,
        (_, true) => Outcome::Pass,
        (_, false) => Outcome::Fail,
    };
    if case.waived {
        row.note = Some(format!(
            "local minimum; gap to the reference {:.4e} is {:.4e}",
            case.target,
            obtained - case.target
        ));
    }
    if let Some(dir) = &args.out {
        let record = ResultRecord::new(case.matrix, case.structure, &run.subspace, &case.config, &run.outcome);
        write_result(&record, dir.join(format!("{}.json", case.name)))?;
    }
    Ok(row)
}

fn fmt_opt(x: Option<f64>, width: usize) -> String {
    match x {
        Some(v) => format!("{v:>width$.6e}"),
        None => format!("{:>width$}", "-"),
    }
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<u8> {
    let Suite::Paper = args.suite;
    if args.jobs == 0 {
        return Err("--jobs must be at least 1".to_string().into());
    }
    let cases: Vec<PaperCase> = match &args.case {
        Some(name) => {
            let all = paper_cases();
            let names: Vec<&str> = all.iter().map(|c| c.name).collect();
            let found: Vec<PaperCase> = all.iter().filter(|c| c.name == name).cloned().collect();
            if found.is_empty() {
                return Err(format!("unknown case {name:?}; known cases: {}", names.join(", ")).into());
            }
            found
        }
        None => paper_cases(),
    };
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }

    println!(
        "{:<26} {:>14} {:>14} {:>14} {:>10}  {}",
        "case", "target", "obtained", "rel.err", "time[s]", "result"
    );
    let mut rows = Vec::new();
    for case in &cases {
        let row = run_case(case, args)?;
        println!(
            "{:<26} {:>14.6e} {} {} {}  {}",
            row.case,
            row.target,
            fmt_opt(row.obtained, 14),
            fmt_opt(row.relative_error, 14),
            match row.seconds {
                Some(t) => format!("{t:>10.2}"),
                None => format!("{:>10}", "-"),
            },
            row.outcome.label()
        );
        if let Some(note) = &row.note {
            println!("{:<26} {note}", "");
        }
        rows.push(row);
    }
    if let Some(dir) = &args.out {
        let text = serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?;
        fs::write(dir.join("bench.json"), text + "\n").map_err(|e| e.to_string())?;
    }
    let failed = rows.iter().filter(|r| r.outcome == Outcome::Fail).count();
    Ok(if failed == 0 { 0 } else { super::EXIT_UNVERIFIED })
}

//! Command implementations: case evaluation, sweep orchestration, output
//! assembly and exit codes. Sweep cases may evaluate in parallel; output
//! is assembled single-threaded in deterministic case order.

use std::io::Write;

use kummer_core::engine::{verify, DeltaSequence, IdentityCase, Theorem};
use kummer_core::scalar::{make_context, parse_scalar, PrecisionContext};
use kummer_core::Error;
use rayon::prelude::*;

use crate::grid::GridSpec;
use crate::report::{ForensicsRow, ReportRow, CSV_HEADER, FORENSICS_CSV_HEADER};
use crate::{aggregate_exit, exit_code, CaseArgs, CommonArgs, ForensicsArgs, FormatArg, SweepArgs};

pub fn run_verify(args: &CaseArgs) -> i32 {
    run_single(args, false)
}

/// `eval` reports the same row but never gates on the verdict: any
/// computed outcome exits 0, only configuration and domain problems exit 2.
pub fn run_eval(args: &CaseArgs) -> i32 {
    run_single(args, true)
}

fn run_single(args: &CaseArgs, eval_only: bool) -> i32 {
    let ctx = match build_ctx(&args.common) {
        Ok(ctx) => ctx,
        Err(msg) => return config_error(&msg),
    };
    let row = match build_case(args, &ctx) {
        Ok(case) => match verify(&case, &ctx) {
            Ok(report) => {
                for diag in &report.diagnostics {
                    eprintln!("note: {diag}");
                }
                ReportRow::from_report(&report, &ctx)
            }
            Err(Error::Domain(msg)) => {
                eprintln!("domain error: {msg}");
                ReportRow::domain_error(&case, &ctx)
            }
            Err(e) => return config_error(&e.to_string()),
        },
        Err(BuildCaseError::Domain(msg)) => {
            eprintln!("domain error: {msg}");
            ReportRow::domain_error_raw(
                &args.theorem,
                &args.rho,
                args.i,
                &args.x,
                &args.delta,
                args.mode.to_mode().as_str(),
                ctx.digits(),
            )
        }
        Err(BuildCaseError::Config(msg)) => return config_error(&msg),
    };
    let payload = match args.common.format {
        FormatArg::Json => match serde_json::to_string_pretty(&row) {
            Ok(s) => s + "\n",
            Err(e) => return config_error(&e.to_string()),
        },
        FormatArg::Csv => format!("{CSV_HEADER}\n{}\n", row.csv_line()),
    };
    if let Err(msg) = write_output(&args.common, &payload) {
        return config_error(&msg);
    }
    if eval_only {
        if row.verdict == "domain_error" {
            exit_code::CONFIG_OR_DOMAIN
        } else {
            exit_code::PASS
        }
    } else {
        aggregate_exit(&[row.verdict.as_str()])
    }
}

pub fn run_sweep(args: &SweepArgs) -> i32 {
    let ctx = match build_ctx(&args.common) {
        Ok(ctx) => ctx,
        Err(msg) => return config_error(&msg),
    };
    let text = match std::fs::read_to_string(&args.grid) {
        Ok(t) => t,
        Err(e) => return config_error(&format!("cannot read {}: {e}", args.grid.display())),
    };
    let spec = match GridSpec::parse(&text) {
        Ok(s) => s,
        Err(msg) => return config_error(&msg),
    };
    let cases = match spec.expand() {
        Ok(c) => c,
        Err(msg) => return config_error(&msg),
    };
    if cases.is_empty() {
        return config_error("grid expands to no cases");
    }
    // Parallel evaluation, deterministic order on collect.
    let rows: Vec<ReportRow> = cases
        .par_iter()
        .map(|gc| {
            let args = CaseArgs {
                theorem: gc.theorem.clone(),
                rho: gc.rho.clone(),
                i: gc.i,
                x: gc.x.clone(),
                delta: gc.delta.clone(),
                mode: if gc.mode == "as-printed" {
                    crate::ModeArg::AsPrinted
                } else {
                    crate::ModeArg::Corrected
                },
                common: CommonArgs {
                    digits: ctx.digits(),
                    max_terms: ctx.max_terms(),
                    format: FormatArg::Json,
                    out: None,
                },
            };
            match build_case(&args, &ctx) {
                Ok(case) => match verify(&case, &ctx) {
                    Ok(report) => ReportRow::from_report(&report, &ctx),
                    Err(Error::Domain(_)) => ReportRow::domain_error(&case, &ctx),
                    Err(e) => {
                        let mut row = ReportRow::domain_error(&case, &ctx);
                        row.verdict = "fail".to_string();
                        eprintln!("evaluation error: {e}");
                        row
                    }
                },
                Err(_) => ReportRow::domain_error_raw(
                    &gc.theorem,
                    &gc.rho,
                    gc.i,
                    &gc.x,
                    &gc.delta,
                    &gc.mode,
                    ctx.digits(),
                ),
            }
        })
        .collect();

    let payload = match args.common.format {
        FormatArg::Json => match serde_json::to_string_pretty(&rows) {
            Ok(s) => s + "\n",
            Err(e) => return config_error(&e.to_string()),
        },
        FormatArg::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for row in &rows {
                out.push_str(&row.csv_line());
                out.push('\n');
            }
            out
        }
    };
    if let Err(msg) = write_output(&args.common, &payload) {
        return config_error(&msg);
    }
    let verdicts: Vec<&str> = rows.iter().map(|r| r.verdict.as_str()).collect();
    aggregate_exit(&verdicts)
}

pub fn run_forensics(args: &ForensicsArgs) -> i32 {
    let rows: Vec<ForensicsRow> = match crate::forensics::run_rows(
        args.common.digits,
        args.common.max_terms,
        &args.delta,
        args.only.as_deref(),
    ) {
        Ok(rows) => rows,
        Err(msg) => return config_error(&msg),
    };
    let payload = match args.common.format {
        FormatArg::Json => match serde_json::to_string_pretty(&rows) {
            Ok(s) => s + "\n",
            Err(e) => return config_error(&e.to_string()),
        },
        FormatArg::Csv => {
            let mut out = String::from(FORENSICS_CSV_HEADER);
            out.push('\n');
            for row in &rows {
                out.push_str(&row.csv_line());
                out.push('\n');
            }
            out
        }
    };
    if let Err(msg) = write_output(&args.common, &payload) {
        return config_error(&msg);
    }
    if rows.iter().any(|r| r.verdict == "inconclusive") {
        exit_code::INCONCLUSIVE
    } else {
        exit_code::PASS
    }
}

enum BuildCaseError {
    Config(String),
    Domain(String),
}

fn build_ctx(common: &CommonArgs) -> Result<PrecisionContext, String> {
    make_context(common.digits)
        .and_then(|c| c.with_max_terms(common.max_terms))
        .map_err(|e| e.to_string())
}

fn build_case(args: &CaseArgs, ctx: &PrecisionContext) -> Result<IdentityCase, BuildCaseError> {
    let theorem = Theorem::parse(&args.theorem)
        .ok_or_else(|| BuildCaseError::Config(format!("unknown theorem {:?}", args.theorem)))?;
    let rho = parse_scalar(&args.rho, ctx)
        .map_err(|e| BuildCaseError::Config(format!("--rho: {e}")))?;
    let x = parse_scalar(&args.x, ctx).map_err(|e| BuildCaseError::Config(format!("--x: {e}")))?;
    let delta = DeltaSequence::parse_spec(&args.delta, ctx).map_err(|e| match e {
        Error::Domain(msg) => BuildCaseError::Domain(msg),
        other => BuildCaseError::Config(format!("--delta: {other}")),
    })?;
    IdentityCase::new(theorem, rho, args.i, x, delta, args.mode.to_mode(), ctx).map_err(|e| {
        match e {
            Error::Domain(msg) => BuildCaseError::Domain(msg),
            other => BuildCaseError::Config(other.to_string()),
        }
    })
}

fn config_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    exit_code::CONFIG_OR_DOMAIN
}

fn write_output(common: &CommonArgs, payload: &str) -> Result<(), String> {
    match &common.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .map_err(|e| e.to_string())
        }
    }
}

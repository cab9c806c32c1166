//! Misprint forensics: each suspected misprint is adjudicated by comparing
//! the as-printed and corrected evaluations against a brute-force oracle
//! running at `digits + 20` precision and doubled truncation depth, so the
//! oracle's error budget dominates both candidates'.

use kummer_core::engine::{
    lhs_double_series, rhs_corollary_32, rhs_theorem, DeltaSequence, IdentityCase, Theorem,
};
use kummer_core::scalar::{
    make_context, mixed_relative_error, parse_scalar, render_real, PrecisionContext,
};
use kummer_core::series::f21_terminating;
use kummer_core::theorems::{kummer_general_minus, KummerInput, Mode};

use crate::report::ForensicsRow;

pub const MISPRINTS: [&str; 4] = ["kst2", "t22", "t23", "c32"];

/// Runs the requested adjudications. `only` filters to a single misprint.
pub fn run_rows(
    digits: u32,
    max_terms: u32,
    delta_spec: &str,
    only: Option<&str>,
) -> Result<Vec<ForensicsRow>, String> {
    let ctx = make_context(digits)
        .and_then(|c| c.with_max_terms(max_terms))
        .map_err(|e| e.to_string())?;
    let oracle_ctx = ctx.oracle_context(20, 2).map_err(|e| e.to_string())?;
    let delta = DeltaSequence::parse_spec(delta_spec, &ctx).map_err(|e| e.to_string())?;
    let delta_hi = DeltaSequence::parse_spec(delta_spec, &oracle_ctx).map_err(|e| e.to_string())?;

    let wanted: Vec<&str> = match only {
        Some(one) => {
            if !MISPRINTS.contains(&one) {
                return Err(format!(
                    "unknown misprint {one:?}; expected one of {MISPRINTS:?}"
                ));
            }
            vec![one]
        }
        None => MISPRINTS.to_vec(),
    };

    let mut rows = Vec::new();
    for name in wanted {
        let row = match name {
            "kst2" => kst2_prefactor(&ctx, &oracle_ctx)?,
            "t22" => theorem_row(
                Theorem::T22,
                "t22",
                "stray alternating sign in the rho-i series",
                "1.3",
                1,
                "0.5",
                &delta,
                &delta_hi,
                &ctx,
                &oracle_ctx,
            )?,
            "t23" => theorem_row(
                Theorem::T23,
                "t23",
                "second prefactor denominator gamma printed 3/2 low",
                "0.7",
                1,
                "0.5",
                &delta,
                &delta_hi,
                &ctx,
                &oracle_ctx,
            )?,
            "c32" => c32_delta_index(&delta, &delta_hi, &ctx, &oracle_ctx)?,
            _ => unreachable!(),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Verdict from the two relative errors: a mode wins only when it matches
/// the oracle within `10^-(digits-20)` while the other misses by more than
/// `10^-6`.
fn adjudicate(
    rel_printed: &kummer_core::BigFloat,
    rel_corrected: &kummer_core::BigFloat,
    ctx: &PrecisionContext,
) -> &'static str {
    let match_tol = ctx.pow10(-(ctx.digits() as i32 - 20));
    let split_tol = ctx.pow10(-6);
    let le = |a: &kummer_core::BigFloat, b: &kummer_core::BigFloat| {
        matches!(a.cmp(b), Some(c) if c <= 0)
    };
    let corrected_matches = le(rel_corrected, &match_tol);
    let printed_matches = le(rel_printed, &match_tol);
    let corrected_off = !le(rel_corrected, &split_tol);
    let printed_off = !le(rel_printed, &split_tol);
    if corrected_matches && printed_off {
        "corrected"
    } else if printed_matches && corrected_off {
        "as-printed"
    } else {
        "inconclusive"
    }
}

/// The `-i` generalized Kummer theorem on a terminating instance, where the
/// finite sum is exact at any precision.
fn kst2_prefactor(
    ctx: &PrecisionContext,
    oracle_ctx: &PrecisionContext,
) -> Result<ForensicsRow, String> {
    let a = parse_scalar("-6", ctx).map_err(|e| e.to_string())?;
    let b = parse_scalar("2.5", ctx).map_err(|e| e.to_string())?;
    let i = 2u32;
    // c = 1 + a - b - i
    let c_hi = parse_scalar("-9.5", oracle_ctx).map_err(|e| e.to_string())?;
    let b_hi = parse_scalar("2.5", oracle_ctx).map_err(|e| e.to_string())?;
    let oracle = f21_terminating(6, &b_hi, &c_hi, oracle_ctx).map_err(|e| e.to_string())?;
    let eval = |mode: Mode| {
        kummer_general_minus(
            &KummerInput {
                a: a.clone(),
                b: b.clone(),
                i,
                mode,
            },
            ctx,
        )
    };
    let printed = eval(Mode::AsPrinted).map_err(|e| e.to_string())?;
    let corrected = eval(Mode::Corrected).map_err(|e| e.to_string())?;
    let rel_printed = mixed_relative_error(&printed, &oracle, ctx);
    let rel_corrected = mixed_relative_error(&corrected, &oracle, ctx);
    Ok(ForensicsRow {
        misprint: "kst2".to_string(),
        description: "prefactor of the -i Kummer summation (a=-6, b=2.5, i=2 vs exact finite sum)"
            .to_string(),
        digits: ctx.digits(),
        rel_error_as_printed: render_real(&rel_printed, ctx),
        rel_error_corrected: render_real(&rel_corrected, ctx),
        verdict: adjudicate(&rel_printed, &rel_corrected, ctx).to_string(),
    })
}

#[allow(clippy::too_many_arguments)]
fn theorem_row(
    theorem: Theorem,
    name: &str,
    description: &str,
    rho: &str,
    i: u32,
    x: &str,
    delta: &DeltaSequence,
    delta_hi: &DeltaSequence,
    ctx: &PrecisionContext,
    oracle_ctx: &PrecisionContext,
) -> Result<ForensicsRow, String> {
    let case = |mode: Mode, c: &PrecisionContext, d: &DeltaSequence| {
        IdentityCase::new(
            theorem,
            parse_scalar(rho, c).unwrap(),
            i,
            parse_scalar(x, c).unwrap(),
            d.clone(),
            mode,
            c,
        )
    };
    let oracle_case = case(Mode::Corrected, oracle_ctx, delta_hi).map_err(|e| e.to_string())?;
    let oracle = lhs_double_series(&oracle_case, oracle_ctx).map_err(|e| e.to_string())?;
    let printed_case = case(Mode::AsPrinted, ctx, delta).map_err(|e| e.to_string())?;
    let corrected_case = case(Mode::Corrected, ctx, delta).map_err(|e| e.to_string())?;
    let printed = rhs_theorem(&printed_case, ctx).map_err(|e| e.to_string())?;
    let corrected = rhs_theorem(&corrected_case, ctx).map_err(|e| e.to_string())?;
    let rel_printed = mixed_relative_error(printed.value(), oracle.value(), ctx);
    let rel_corrected = mixed_relative_error(corrected.value(), oracle.value(), ctx);
    Ok(ForensicsRow {
        misprint: name.to_string(),
        description: format!("{description} (rho={rho}, i={i}, x={x})"),
        digits: ctx.digits(),
        rel_error_as_printed: render_real(&rel_printed, ctx),
        rel_error_corrected: render_real(&rel_corrected, ctx),
        verdict: adjudicate(&rel_printed, &rel_corrected, ctx).to_string(),
    })
}

fn c32_delta_index(
    delta: &DeltaSequence,
    delta_hi: &DeltaSequence,
    ctx: &PrecisionContext,
    oracle_ctx: &PrecisionContext,
) -> Result<ForensicsRow, String> {
    let rho = parse_scalar("0.7", ctx).map_err(|e| e.to_string())?;
    let x = parse_scalar("0.3", ctx).map_err(|e| e.to_string())?;
    let oracle_case = IdentityCase::new(
        Theorem::C32,
        parse_scalar("0.7", oracle_ctx).map_err(|e| e.to_string())?,
        0,
        parse_scalar("0.3", oracle_ctx).map_err(|e| e.to_string())?,
        delta_hi.clone(),
        Mode::Corrected,
        oracle_ctx,
    )
    .map_err(|e| e.to_string())?;
    let oracle = lhs_double_series(&oracle_case, oracle_ctx).map_err(|e| e.to_string())?;
    let printed = rhs_corollary_32(&rho, &x, delta, Mode::AsPrinted, ctx).map_err(|e| e.to_string())?;
    let corrected =
        rhs_corollary_32(&rho, &x, delta, Mode::Corrected, ctx).map_err(|e| e.to_string())?;
    let rel_printed = mixed_relative_error(printed.value(), oracle.value(), ctx);
    let rel_corrected = mixed_relative_error(corrected.value(), oracle.value(), ctx);
    Ok(ForensicsRow {
        misprint: "c32".to_string(),
        description: "delta index of the odd-power corollary series (rho=0.7, x=0.3)".to_string(),
        digits: ctx.digits(),
        rel_error_as_printed: render_real(&rel_printed, ctx),
        rel_error_corrected: render_real(&rel_corrected, ctx),
        verdict: adjudicate(&rel_printed, &rel_corrected, ctx).to_string(),
    })
}

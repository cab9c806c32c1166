//! Report serialization: the published JSON schema, its CSV projection,
//! and validation helpers.
//!
//! JSON is the canonical format; CSV is a lossy projection for
//! spreadsheets (complex values stay in the `a+bi` grammar). All scalars
//! are rendered at full working precision; numeric comparisons are never
//! performed on rendered strings.

use kummer_core::engine::{IdentityCase, VerificationReport};
use kummer_core::scalar::{render_real, render_scalar, PrecisionContext};
use serde::{Deserialize, Serialize};

/// One verification report row in the published schema. Field order is the
/// serialization order.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ReportRow {
    pub theorem: String,
    pub rho: String,
    pub i: u32,
    pub x: String,
    pub delta: String,
    pub mode: String,
    pub digits: u32,
    pub lhs: String,
    pub rhs: String,
    pub abs_error: String,
    pub rel_error: String,
    pub lhs_tail: String,
    pub rhs_tail: String,
    pub verdict: String,
    pub terms_used_lhs: u32,
    pub terms_used_rhs: u32,
}

pub const CSV_HEADER: &str = "theorem,rho,i,x,delta,mode,digits,lhs,rhs,abs_error,rel_error,lhs_tail,rhs_tail,verdict,terms_used_lhs,terms_used_rhs";

impl ReportRow {
    pub fn from_report(report: &VerificationReport, ctx: &PrecisionContext) -> Self {
        let case = &report.case;
        let opt_scalar = |v: &Option<kummer_core::Scalar>| {
            v.as_ref()
                .map(|s| render_scalar(s, ctx))
                .unwrap_or_default()
        };
        let opt_real = |v: &Option<kummer_core::BigFloat>| {
            v.as_ref().map(|s| render_real(s, ctx)).unwrap_or_default()
        };
        ReportRow {
            theorem: case.theorem.as_str().to_string(),
            rho: render_scalar(&case.rho, ctx),
            i: case.i,
            x: render_scalar(&case.x, ctx),
            delta: case.delta.spec_string(ctx),
            mode: case.mode.as_str().to_string(),
            digits: ctx.digits(),
            lhs: opt_scalar(&report.lhs),
            rhs: opt_scalar(&report.rhs),
            abs_error: opt_real(&report.abs_error),
            rel_error: opt_real(&report.rel_error),
            lhs_tail: opt_real(&report.lhs_tail),
            rhs_tail: opt_real(&report.rhs_tail),
            verdict: report.verdict.as_str().to_string(),
            terms_used_lhs: report.terms_used_lhs,
            terms_used_rhs: report.terms_used_rhs,
        }
    }

    /// Row for a case rejected by the domain guard before evaluation.
    pub fn domain_error(case: &IdentityCase, ctx: &PrecisionContext) -> Self {
        ReportRow {
            theorem: case.theorem.as_str().to_string(),
            rho: render_scalar(&case.rho, ctx),
            i: case.i,
            x: render_scalar(&case.x, ctx),
            delta: case.delta.spec_string(ctx),
            mode: case.mode.as_str().to_string(),
            digits: ctx.digits(),
            lhs: String::new(),
            rhs: String::new(),
            abs_error: String::new(),
            rel_error: String::new(),
            lhs_tail: String::new(),
            rhs_tail: String::new(),
            verdict: "domain_error".to_string(),
            terms_used_lhs: 0,
            terms_used_rhs: 0,
        }
    }

    /// Row for raw case inputs that never built an [`IdentityCase`].
    pub fn domain_error_raw(
        theorem: &str,
        rho: &str,
        i: u32,
        x: &str,
        delta: &str,
        mode: &str,
        digits: u32,
    ) -> Self {
        ReportRow {
            theorem: theorem.to_string(),
            rho: rho.to_string(),
            i,
            x: x.to_string(),
            delta: delta.to_string(),
            mode: mode.to_string(),
            digits,
            lhs: String::new(),
            rhs: String::new(),
            abs_error: String::new(),
            rel_error: String::new(),
            lhs_tail: String::new(),
            rhs_tail: String::new(),
            verdict: "domain_error".to_string(),
            terms_used_lhs: 0,
            terms_used_rhs: 0,
        }
    }

    pub fn csv_line(&self) -> String {
        [
            csv_field(&self.theorem),
            csv_field(&self.rho),
            self.i.to_string(),
            csv_field(&self.x),
            csv_field(&self.delta),
            csv_field(&self.mode),
            self.digits.to_string(),
            csv_field(&self.lhs),
            csv_field(&self.rhs),
            csv_field(&self.abs_error),
            csv_field(&self.rel_error),
            csv_field(&self.lhs_tail),
            csv_field(&self.rhs_tail),
            csv_field(&self.verdict),
            self.terms_used_lhs.to_string(),
            self.terms_used_rhs.to_string(),
        ]
        .join(",")
    }
}

/// One misprint-forensics row.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ForensicsRow {
    pub misprint: String,
    pub description: String,
    pub digits: u32,
    pub rel_error_as_printed: String,
    pub rel_error_corrected: String,
    pub verdict: String,
}

pub const FORENSICS_CSV_HEADER: &str =
    "misprint,description,digits,rel_error_as_printed,rel_error_corrected,verdict";

impl ForensicsRow {
    pub fn csv_line(&self) -> String {
        [
            csv_field(&self.misprint),
            csv_field(&self.description),
            self.digits.to_string(),
            csv_field(&self.rel_error_as_printed),
            csv_field(&self.rel_error_corrected),
            csv_field(&self.verdict),
        ]
        .join(",")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        let escaped = s.replace('"', "\"\"");
        format!("\"{escaped}\"")
    } else {
        s.to_string()
    }
}

/// Validates a JSON value against the published report schema: exactly the
/// schema fields with the right types, and a verdict from the closed set.
pub fn validate_report_json(value: &serde_json::Value) -> Result<(), String> {
    let row: ReportRow =
        serde_json::from_value(value.clone()).map_err(|e| format!("schema violation: {e}"))?;
    match row.verdict.as_str() {
        "pass" | "fail" | "inconclusive" | "domain_error" => Ok(()),
        other => Err(format!("verdict {other:?} outside the schema domain")),
    }
}

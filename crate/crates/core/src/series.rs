//! Generic truncated evaluation of pFq series with tail control, plus
//! terminating-series detection.
//!
//! The term recurrence `t_{n+1} = t_n * prod(a_j + n) / prod(b_j + n) * x/(n+1)`
//! needs nothing beyond field arithmetic, so this module is independent of
//! the gamma kernel — which is what makes it usable as an oracle for the
//! closed forms built on gammas.

use alloc::vec::Vec;

use astro_float_num::BigFloat;

use crate::error::Error;
use crate::gamma::nonpositive_integer_at;
use crate::scalar::{real_le, real_lt, PrecisionContext, Scalar, RM};
use crate::Result;

/// Parameters of a generalized hypergeometric series `pFq`.
///
/// Lower parameters must not be nonpositive integers unless some upper
/// parameter is a nonpositive integer `-m` with `m` strictly smaller than
/// the least such lower parameter in absolute value (the terminating
/// escape).
#[derive(Debug, Clone)]
pub struct HyperParams {
    upper: Vec<Scalar>,
    lower: Vec<Scalar>,
    x: Scalar,
}

impl HyperParams {
    pub fn new(upper: Vec<Scalar>, lower: Vec<Scalar>, x: Scalar) -> Self {
        HyperParams { upper, lower, x }
    }

    pub fn upper(&self) -> &[Scalar] {
        &self.upper
    }

    pub fn lower(&self) -> &[Scalar] {
        &self.lower
    }

    pub fn x(&self) -> &Scalar {
        &self.x
    }
}

/// Outcome of a truncated series evaluation.
#[derive(Debug, Clone)]
pub struct SeriesResult {
    value: Scalar,
    terms_used: u32,
    tail_estimate: BigFloat,
    terminated: bool,
}

impl SeriesResult {
    pub(crate) fn new(
        value: Scalar,
        terms_used: u32,
        tail_estimate: BigFloat,
        terminated: bool,
    ) -> Self {
        debug_assert!(!terminated || tail_estimate.is_zero());
        SeriesResult {
            value,
            terms_used,
            tail_estimate,
            terminated,
        }
    }

    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn terms_used(&self) -> u32 {
        self.terms_used
    }

    /// Upper estimate of the truncation error. Zero for finite sums.
    pub fn tail_estimate(&self) -> &BigFloat {
        &self.tail_estimate
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }
}

// ---------------------------------------------------------------------------
// Stopping rule
// ---------------------------------------------------------------------------

/// Shared truncation policy: stop after `consecutive_small` consecutive
/// terms below `tail_epsilon * (1 + |S|)`; estimate the tail geometrically
/// from the observed term ratio when it is safely below 1, conservatively
/// otherwise.
pub(crate) struct TailRule {
    small_run: u32,
    seen: u32,
    prev_mag: Option<BigFloat>,
    last_mag: Option<BigFloat>,
}

pub(crate) enum TailStep {
    Continue,
    Stop,
}

impl TailRule {
    pub(crate) fn new() -> Self {
        TailRule {
            small_run: 0,
            seen: 0,
            prev_mag: None,
            last_mag: None,
        }
    }

    pub(crate) fn update(
        &mut self,
        term_mag: BigFloat,
        sum_mag: &BigFloat,
        ctx: &PrecisionContext,
    ) -> TailStep {
        let p = ctx.bits();
        let bound = ctx
            .tail_epsilon()
            .mul(&BigFloat::from_word(1, p).add(sum_mag, p, RM), p, RM);
        if real_le(&term_mag, &bound) {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        self.seen += 1;
        self.prev_mag = self.last_mag.take();
        self.last_mag = Some(term_mag);
        if self.small_run >= ctx.consecutive_small() {
            TailStep::Stop
        } else {
            TailStep::Continue
        }
    }

    /// True when term magnitudes are asymptotically non-decreasing:
    /// `|t_N| >= |t_{N-1}| * (1 - 1/(2N))`. Terms of a convergent
    /// alternating tail shrink at least like `1/N`, so a ratio inside the
    /// `1/(2N)` band after the full budget signals a sum that is not going
    /// to zero.
    pub(crate) fn non_decreasing(&self, ctx: &PrecisionContext) -> bool {
        let p = ctx.bits();
        match (&self.prev_mag, &self.last_mag) {
            (Some(prev), Some(last)) => {
                if prev.is_zero() {
                    return !last.is_zero();
                }
                let n = BigFloat::from_word(u64::from(self.seen.max(2)), p);
                let slack = BigFloat::from_word(1, p).div(
                    &n.mul(&BigFloat::from_word(2, p), p, RM),
                    p,
                    RM,
                );
                let threshold = prev.mul(&BigFloat::from_word(1, p).sub(&slack, p, RM), p, RM);
                !real_lt(last, &threshold)
            }
            _ => false,
        }
    }

    pub(crate) fn tail_estimate(&self, ctx: &PrecisionContext) -> BigFloat {
        let p = ctx.bits();
        let last = match &self.last_mag {
            Some(last) => last.clone(),
            None => return BigFloat::new(p),
        };
        if let Some(prev) = &self.prev_mag {
            if !prev.is_zero() {
                let ratio = last.div(prev, p, RM);
                let nine_tenths = BigFloat::from_word(9, p).div(&BigFloat::from_word(10, p), p, RM);
                if real_lt(&ratio, &nine_tenths) {
                    // Geometric bound |t| * r / (1 - r).
                    let one = BigFloat::from_word(1, p);
                    return last.mul(&ratio, p, RM).div(&one.sub(&ratio, p, RM), p, RM);
                }
            }
        }
        last.mul(&BigFloat::from_word(ctx.max_terms() as u64, p), p, RM)
    }
}

// ---------------------------------------------------------------------------
// pFq evaluation
// ---------------------------------------------------------------------------

/// Evaluates a pFq series by direct summation.
///
/// Terminating series (a nonpositive-integer upper parameter) are summed
/// exactly and flagged; otherwise summation stops by the tail rule.
/// Reaching the truncation budget with non-decreasing terms is reported as
/// divergence; with decreasing terms the partial sum is returned carrying a
/// conservative tail estimate.
pub fn pfq(params: &HyperParams, ctx: &PrecisionContext) -> Result<SeriesResult> {
    let p = ctx.bits();
    // Canonical parameter order makes permutation invariance exact.
    let mut upper = params.upper.clone();
    let mut lower = params.lower.clone();
    sort_params(&mut upper);
    sort_params(&mut lower);

    let termination = upper
        .iter()
        .filter_map(|a| nonpositive_integer_at(a, ctx))
        .map(|k| k.unsigned_abs())
        .min();
    let lower_pole = lower
        .iter()
        .filter_map(|b| nonpositive_integer_at(b, ctx))
        .map(|k| k.unsigned_abs())
        .min();
    if let Some(lp) = lower_pole {
        let escaped = matches!(termination, Some(m) if m < lp);
        if !escaped {
            return Err(Error::DomainPole(alloc::format!(
                "lower parameter is the nonpositive integer -{lp} with no terminating escape"
            )));
        }
    }

    if params.x.is_zero() {
        return Ok(SeriesResult::new(
            Scalar::one(ctx),
            1,
            BigFloat::new(p),
            false,
        ));
    }

    let mut term = Scalar::one(ctx);
    let mut sum = Scalar::one(ctx);
    let mut rule = TailRule::new();
    let mut n: u32 = 0;
    loop {
        if let Some(m) = termination {
            if u64::from(n) == m {
                return Ok(SeriesResult::new(sum, n + 1, BigFloat::new(p), true));
            }
        }
        if n + 1 >= ctx.max_terms() {
            if rule.non_decreasing(ctx) {
                return Err(Error::Divergence(alloc::format!(
                    "pFq terms not decreasing after {} terms",
                    ctx.max_terms()
                )));
            }
            let tail = rule.tail_estimate(ctx);
            return Ok(SeriesResult::new(sum, n + 1, tail, false));
        }
        // t_{n+1} = t_n * prod(a+n)/prod(b+n) * x/(n+1)
        let nn = Scalar::from_integer(n as i64, ctx);
        for a in &upper {
            term = term.mul(&a.add(&nn, ctx), ctx);
        }
        for b in &lower {
            term = term.div(&b.add(&nn, ctx), ctx)?;
        }
        term = term.mul(&params.x, ctx);
        term = term
            .div(&Scalar::from_integer(n as i64 + 1, ctx), ctx)
            .expect("n+1 is nonzero");
        n += 1;
        sum = sum.add(&term, ctx);
        if let TailStep::Stop = rule.update(term.abs(ctx), &sum.abs(ctx), ctx) {
            let tail = rule.tail_estimate(ctx);
            return Ok(SeriesResult::new(sum, n + 1, tail, false));
        }
    }
}

fn sort_params(params: &mut [Scalar]) {
    params.sort_by(|a, b| {
        let re = a.re().cmp(b.re()).unwrap_or(0);
        if re != 0 {
            return re.cmp(&0);
        }
        a.im().cmp(b.im()).unwrap_or(0).cmp(&0)
    });
}

/// Exact finite sum `2F1[-m, b; c; -1] = sum_{n=0}^{m} (-m)_n (b)_n / ((c)_n n!) (-1)^n`.
pub fn f21_terminating(m: u32, b: &Scalar, c: &Scalar, ctx: &PrecisionContext) -> Result<Scalar> {
    if let Some(k) = nonpositive_integer_at(c, ctx) {
        if k.unsigned_abs() < u64::from(m) {
            return Err(Error::DomainPole(alloc::format!(
                "lower parameter c = {k} vanishes inside the {m}-term sum"
            )));
        }
    }
    let mut term = Scalar::one(ctx);
    let mut sum = Scalar::one(ctx);
    for n in 0..m {
        let nn = Scalar::from_integer(n as i64, ctx);
        let a_factor = Scalar::from_integer(-(m as i64) + n as i64, ctx);
        term = term.mul(&a_factor, ctx);
        term = term.mul(&b.add(&nn, ctx), ctx);
        term = term.div(&c.add(&nn, ctx), ctx)?;
        term = term
            .div(&Scalar::from_integer(n as i64 + 1, ctx), ctx)
            .expect("n+1 is nonzero");
        term = term.neg();
        sum = sum.add(&term, ctx);
    }
    Ok(sum)
}

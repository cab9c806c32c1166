//! Complex scalars at a configurable decimal precision, and the context
//! object that carries precision, truncation and tolerance policy.
//!
//! All arithmetic is routed through [`PrecisionContext`]: values are plain
//! data, the context decides the working binary precision. Precision is
//! configured in decimal digits because every tolerance in a verification
//! report is a decimal quantity; internally a fixed guard of extra digits
//! absorbs roundoff accumulated across series summation.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use astro_float_num::{BigFloat, Consts, Radix, RoundingMode, Sign};

use crate::error::Error;
use crate::gamma::StirlingTable;
use crate::Result;

/// Rounding mode used for every operation in the crate.
pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Decimal guard digits added on top of the requested precision.
const GUARD_DIGITS: u32 = 16;

const LOG2_10: f64 = core::f64::consts::LOG2_10;

/// Scratch space for operations that need cached mathematical constants.
///
/// A workspace is cheap to create and warms up lazily; evaluation loops
/// create one per top-level operation and thread it through, so constants
/// like pi are computed once per evaluation rather than once per call.
/// Workspaces are never shared: identical inputs produce identical results
/// regardless of the workspace they ran in.
pub struct Workspace {
    cc: Consts,
}

impl Workspace {
    pub fn new() -> Self {
        // Allocation of the empty cache cannot fail in practice; astro-float
        // only reports allocation errors here.
        Workspace {
            cc: Consts::new().expect("constants cache allocation"),
        }
    }

    pub(crate) fn cc(&mut self) -> &mut Consts {
        &mut self.cc
    }
}

impl Default for Workspace {
    fn default() -> Self {
        Self::new()
    }
}

/// Precision, truncation and tolerance policy for one evaluation.
///
/// Immutable after construction and freely shareable across threads.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    digits: u32,
    max_terms: u32,
    consecutive_small: u32,
    bits: usize,
    tail_epsilon: BigFloat,
    pole_tolerance: BigFloat,
    pi: BigFloat,
    sqrt_pi: BigFloat,
    ln2: BigFloat,
    half_ln_2pi: BigFloat,
    stirling: StirlingTable,
}

/// Builds a context with defaults derived from `digits`:
/// `max_terms = 400`, `tail_epsilon = 10^(10-digits)`,
/// `consecutive_small = 5`.
pub fn make_context(digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::new(digits)
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < 20 {
            return Err(Error::Config(alloc::format!(
                "digits must be at least 20, got {digits}"
            )));
        }
        let bits = working_bits(digits);
        let mut cc = Consts::new().expect("constants cache allocation");
        let pi = cc.pi(bits, RM);
        let sqrt_pi = pi.sqrt(bits, RM);
        let ln2 = cc.ln_2(bits, RM);
        // ln(2*pi)/2
        let two_pi = pi.mul(&BigFloat::from_word(2, bits), bits, RM);
        let half_ln_2pi = two_pi
            .ln(bits, RM, &mut cc)
            .div(&BigFloat::from_word(2, bits), bits, RM);
        let tail_epsilon = pow10_with(10 - digits as i32, bits);
        let pole_tolerance = pow10_with(5 - digits as i32, bits);
        let stirling = StirlingTable::build(bits);
        Ok(PrecisionContext {
            digits,
            max_terms: 400,
            consecutive_small: 5,
            bits,
            tail_epsilon,
            pole_tolerance,
            pi,
            sqrt_pi,
            ln2,
            half_ln_2pi,
            stirling,
        })
    }

    /// Replaces the truncation budget. Must stay at least 10.
    pub fn with_max_terms(mut self, max_terms: u32) -> Result<Self> {
        if max_terms < 10 {
            return Err(Error::Config(alloc::format!(
                "max_terms must be at least 10, got {max_terms}"
            )));
        }
        self.max_terms = max_terms;
        Ok(self)
    }

    /// Context used to adjudicate between candidate formulas: more digits
    /// and a deeper truncation budget, so its error budget dominates both
    /// candidates'.
    pub fn oracle_context(&self, extra_digits: u32, terms_factor: u32) -> Result<Self> {
        let ctx = Self::new(self.digits + extra_digits)?;
        ctx.with_max_terms(self.max_terms.saturating_mul(terms_factor.max(1)))
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn max_terms(&self) -> u32 {
        self.max_terms
    }

    pub fn consecutive_small(&self) -> u32 {
        self.consecutive_small
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn tail_epsilon(&self) -> &BigFloat {
        &self.tail_epsilon
    }

    /// Absolute distance below which an argument counts as a nonpositive
    /// integer (a gamma pole). Kept a few orders above `tail_epsilon` so
    /// that rounding noise near a genuine pole is still classified as the
    /// pole rather than as a catastrophic near-pole value.
    pub fn pole_tolerance(&self) -> &BigFloat {
        &self.pole_tolerance
    }

    /// `10^e` at working precision.
    pub fn pow10(&self, e: i32) -> BigFloat {
        pow10_with(e, self.bits)
    }

    /// Pi at working precision.
    pub fn pi(&self) -> &BigFloat {
        &self.pi
    }

    /// Square root of pi at working precision.
    pub fn sqrt_pi(&self) -> &BigFloat {
        &self.sqrt_pi
    }

    pub(crate) fn ln2(&self) -> &BigFloat {
        &self.ln2
    }

    pub(crate) fn half_ln_2pi(&self) -> &BigFloat {
        &self.half_ln_2pi
    }

    pub(crate) fn stirling(&self) -> &StirlingTable {
        &self.stirling
    }
}

fn working_bits(digits: u32) -> usize {
    let raw = ((digits + GUARD_DIGITS) as f64 * LOG2_10).ceil() as usize;
    raw.div_ceil(64) * 64
}

/// `10^e` as a `BigFloat` with precision `bits`.
pub(crate) fn pow10_with(e: i32, bits: usize) -> BigFloat {
    let ten = BigFloat::from_word(10, bits);
    let p = ten.powi(e.unsigned_abs() as usize, bits, RM);
    if e >= 0 {
        p
    } else {
        p.reciprocal(bits, RM)
    }
}

// ---------------------------------------------------------------------------
// Real-number helpers
// ---------------------------------------------------------------------------

/// `a < b` on finite values. NaN compares false.
pub(crate) fn real_lt(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c < 0)
}

/// `a <= b` on finite values. NaN compares false.
pub(crate) fn real_le(a: &BigFloat, b: &BigFloat) -> bool {
    matches!(a.cmp(b), Some(c) if c <= 0)
}

/// Crude `f64` approximation for diagnostics and magnitude reporting.
/// Never used for a numerical decision without exact re-validation.
pub fn to_f64_approx(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf() {
        return if x.is_inf_pos() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
    }
    let Some((words, _n, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let Some(top) = words.last() else {
        return 0.0;
    };
    // Mantissa words are little-endian; the top word is normalized.
    let m = *top as f64 / 18446744073709551616.0;
    let v = m * (2f64).powi(exp);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Nearest integer to the real value `x`, with the exact absolute distance.
/// Returns `None` when `x` is too large for a safe integer proposal.
pub(crate) fn nearest_integer(x: &BigFloat, bits: usize) -> Option<(i64, BigFloat)> {
    let approx = to_f64_approx(x);
    if !approx.is_finite() || approx.abs() >= 4.0e15 {
        return None;
    }
    let k = approx.round() as i64;
    let dist = x.sub(&BigFloat::from_i64(k, bits), bits, RM).abs();
    Some((k, dist))
}

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

/// A complex number at the working precision of the context that produced it.
///
/// Components are always finite; operations that could produce a non-finite
/// value (division by zero) return an error instead of propagating NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct Scalar {
    re: BigFloat,
    im: BigFloat,
}

impl Scalar {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Scalar { re, im }
    }

    pub fn from_real(re: BigFloat) -> Self {
        Scalar {
            re,
            im: BigFloat::new(1),
        }
    }

    /// The imaginary unit.
    pub fn i(ctx: &PrecisionContext) -> Self {
        Scalar {
            re: BigFloat::new(ctx.bits),
            im: BigFloat::from_i64(1, ctx.bits),
        }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Scalar {
            re: BigFloat::new(ctx.bits),
            im: BigFloat::new(ctx.bits),
        }
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::from_integer(1, ctx)
    }

    pub fn from_integer(i: i64, ctx: &PrecisionContext) -> Self {
        Scalar {
            re: BigFloat::from_i64(i, ctx.bits),
            im: BigFloat::new(ctx.bits),
        }
    }

    /// Exact rational `n / d` rounded once to working precision.
    pub fn from_ratio(n: i64, d: i64, ctx: &PrecisionContext) -> Result<Self> {
        if d == 0 {
            return Err(Error::Numeric("zero denominator in from_ratio".into()));
        }
        let num = BigFloat::from_i64(n, ctx.bits);
        let den = BigFloat::from_i64(d, ctx.bits);
        Ok(Scalar {
            re: num.div(&den, ctx.bits, RM),
            im: BigFloat::new(ctx.bits),
        })
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.re.is_nan() || self.re.is_inf() || self.im.is_nan() || self.im.is_inf())
    }

    pub fn add(&self, rhs: &Scalar, ctx: &PrecisionContext) -> Scalar {
        let p = ctx.bits;
        Scalar {
            re: self.re.add(&rhs.re, p, RM),
            im: self.im.add(&rhs.im, p, RM),
        }
    }

    pub fn sub(&self, rhs: &Scalar, ctx: &PrecisionContext) -> Scalar {
        let p = ctx.bits;
        Scalar {
            re: self.re.sub(&rhs.re, p, RM),
            im: self.im.sub(&rhs.im, p, RM),
        }
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> Scalar {
        Scalar {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, rhs: &Scalar, ctx: &PrecisionContext) -> Scalar {
        let p = ctx.bits;
        // Real operands dominate in practice; skip the full complex product.
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar {
                re: self.re.mul(&rhs.re, p, RM),
                im: BigFloat::new(p),
            };
        }
        if self.im.is_zero() {
            return Scalar {
                re: self.re.mul(&rhs.re, p, RM),
                im: self.re.mul(&rhs.im, p, RM),
            };
        }
        if rhs.im.is_zero() {
            return Scalar {
                re: self.re.mul(&rhs.re, p, RM),
                im: self.im.mul(&rhs.re, p, RM),
            };
        }
        let ac = self.re.mul(&rhs.re, p, RM);
        let bd = self.im.mul(&rhs.im, p, RM);
        let ad = self.re.mul(&rhs.im, p, RM);
        let bc = self.im.mul(&rhs.re, p, RM);
        Scalar {
            re: ac.sub(&bd, p, RM),
            im: ad.add(&bc, p, RM),
        }
    }

    pub fn mul_real(&self, rhs: &BigFloat, ctx: &PrecisionContext) -> Scalar {
        let p = ctx.bits;
        Scalar {
            re: self.re.mul(rhs, p, RM),
            im: if self.im.is_zero() {
                BigFloat::new(p)
            } else {
                self.im.mul(rhs, p, RM)
            },
        }
    }

    pub fn div(&self, rhs: &Scalar, ctx: &PrecisionContext) -> Result<Scalar> {
        let p = ctx.bits;
        if rhs.is_zero() {
            return Err(Error::Numeric("division by zero".into()));
        }
        if rhs.im.is_zero() {
            return Ok(Scalar {
                re: self.re.div(&rhs.re, p, RM),
                im: if self.im.is_zero() {
                    BigFloat::new(p)
                } else {
                    self.im.div(&rhs.re, p, RM)
                },
            });
        }
        // (a+bi)/(c+di) = (a+bi)(c-di) / (c^2+d^2)
        let c2 = rhs.re.mul(&rhs.re, p, RM);
        let d2 = rhs.im.mul(&rhs.im, p, RM);
        let den = c2.add(&d2, p, RM);
        let num = self.mul(&rhs.conj(), ctx);
        Ok(Scalar {
            re: num.re.div(&den, p, RM),
            im: num.im.div(&den, p, RM),
        })
    }

    pub fn recip(&self, ctx: &PrecisionContext) -> Result<Scalar> {
        Scalar::one(ctx).div(self, ctx)
    }

    /// Complex modulus as a real value.
    pub fn abs(&self, ctx: &PrecisionContext) -> BigFloat {
        let p = ctx.bits;
        if self.im.is_zero() {
            return self.re.abs();
        }
        if self.re.is_zero() {
            return self.im.abs();
        }
        let r2 = self.re.mul(&self.re, p, RM);
        let i2 = self.im.mul(&self.im, p, RM);
        r2.add(&i2, p, RM).sqrt(p, RM)
    }

    /// Integer power by binary exponentiation.
    pub fn powi(&self, n: u64, ctx: &PrecisionContext) -> Scalar {
        let mut result = Scalar::one(ctx);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base, ctx);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, ctx);
            }
        }
        result
    }

    /// `e^self`. Real inputs stay on the real fast path.
    pub(crate) fn exp(&self, ctx: &PrecisionContext, ws: &mut Workspace) -> Scalar {
        let p = ctx.bits;
        let mag = self.re.exp(p, RM, ws.cc());
        if self.im.is_zero() {
            return Scalar {
                re: mag,
                im: BigFloat::new(p),
            };
        }
        let c = self.im.cos(p, RM, ws.cc());
        let s = self.im.sin(p, RM, ws.cc());
        Scalar {
            re: mag.mul(&c, p, RM),
            im: mag.mul(&s, p, RM),
        }
    }

    /// Principal logarithm, restricted to the right half-plane `Re > 0`
    /// where the argument function needs no quadrant bookkeeping.
    pub(crate) fn ln_right_half(&self, ctx: &PrecisionContext, ws: &mut Workspace) -> Result<Scalar> {
        let p = ctx.bits;
        if !self.re.is_positive() || self.re.is_zero() {
            return Err(Error::Numeric("logarithm outside right half-plane".into()));
        }
        if self.im.is_zero() {
            return Ok(Scalar {
                re: self.re.ln(p, RM, ws.cc()),
                im: BigFloat::new(p),
            });
        }
        let modulus = self.abs(ctx);
        let angle = self.im.div(&self.re, p, RM).atan(p, RM, ws.cc());
        Ok(Scalar {
            re: modulus.ln(p, RM, ws.cc()),
            im: angle,
        })
    }
}

/// `2^a` on the principal branch, `exp(a * ln 2)`.
pub(crate) fn pow2(a: &Scalar, ctx: &PrecisionContext, ws: &mut Workspace) -> Scalar {
    a.mul_real(ctx.ln2(), ctx).exp(ctx, ws)
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

/// Mixed absolute/relative comparison:
/// `|a-b| <= rel_tol * (1 + max(|a|, |b|))`.
pub fn approx_equal(a: &Scalar, b: &Scalar, rel_tol: &BigFloat, ctx: &PrecisionContext) -> bool {
    let p = ctx.bits;
    let diff = a.sub(b, ctx).abs(ctx);
    let scale = a.abs(ctx).max(&b.abs(ctx));
    let bound = rel_tol.mul(&BigFloat::from_word(1, p).add(&scale, p, RM), p, RM);
    real_le(&diff, &bound)
}

/// `|a-b| / (1 + max(|a|, |b|))` — the quantity `approx_equal` bounds.
pub fn mixed_relative_error(a: &Scalar, b: &Scalar, ctx: &PrecisionContext) -> BigFloat {
    let p = ctx.bits;
    let diff = a.sub(b, ctx).abs(ctx);
    let scale = a.abs(ctx).max(&b.abs(ctx));
    diff.div(&BigFloat::from_word(1, p).add(&scale, p, RM), p, RM)
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Parses the scalar grammar:
/// `[-]D+[.D*][e[-]D+]` optionally followed by `[+|-]D+[.D*][e[-]D+]i`,
/// with the pure-imaginary shorthand `2i` also accepted.
pub fn parse_scalar(text: &str, ctx: &PrecisionContext) -> Result<Scalar> {
    let mut ws = Workspace::new();
    parse_scalar_in(text, ctx, &mut ws)
}

pub(crate) fn parse_scalar_in(
    text: &str,
    ctx: &PrecisionContext,
    ws: &mut Workspace,
) -> Result<Scalar> {
    let s = text.trim();
    let err = || Error::Parse(String::from(text));
    if s.is_empty() {
        return Err(err());
    }
    let bytes = s.as_bytes();
    if let Some(stripped) = s.strip_suffix('i') {
        // Either "<re><+|-><im>i" or pure-imaginary "<im>i".
        if let Some(split) = find_component_split(stripped) {
            let re = parse_real(&stripped[..split], ctx, ws).ok_or_else(err)?;
            let im = parse_real(&stripped[split..], ctx, ws).ok_or_else(err)?;
            return Ok(Scalar { re, im });
        }
        let im = parse_real(stripped, ctx, ws).ok_or_else(err)?;
        return Ok(Scalar {
            re: BigFloat::new(ctx.bits),
            im,
        });
    }
    if let Some(split) = find_component_split(s) {
        // A sign split without a trailing 'i' is not a valid complex form.
        let _ = split;
        let _ = bytes;
        return Err(err());
    }
    let re = parse_real(s, ctx, ws).ok_or_else(err)?;
    Ok(Scalar {
        re,
        im: BigFloat::new(ctx.bits),
    })
}

/// Position of the `+`/`-` separating real and imaginary components, if any.
/// Signs directly after `e`/`E` belong to an exponent, a sign at position 0
/// belongs to the real part.
fn find_component_split(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    for idx in (1..bytes.len()).rev() {
        let b = bytes[idx];
        if b == b'+' || b == b'-' {
            let prev = bytes[idx - 1];
            if prev != b'e' && prev != b'E' {
                return Some(idx);
            }
        }
    }
    None
}

/// Validates one real component against the grammar and converts it.
fn parse_real(s: &str, ctx: &PrecisionContext, ws: &mut Workspace) -> Option<BigFloat> {
    if !valid_real_grammar(s) {
        return None;
    }
    let v = BigFloat::parse(s, Radix::Dec, ctx.bits, RM, ws.cc());
    if v.is_nan() || v.is_inf() {
        return None;
    }
    Some(v)
}

fn valid_real_grammar(s: &str) -> bool {
    let mut chars = s.as_bytes();
    if chars.is_empty() {
        return false;
    }
    if chars[0] == b'-' || chars[0] == b'+' {
        chars = &chars[1..];
    }
    if chars.is_empty() {
        return false;
    }
    // mantissa: D+ [. D*]
    let mut i = 0;
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    if i == 0 {
        return false;
    }
    if i < chars.len() && chars[i] == b'.' {
        i += 1;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i == chars.len() {
        return true;
    }
    // exponent: e [-|+] D+
    if chars[i] != b'e' && chars[i] != b'E' {
        return false;
    }
    i += 1;
    if i < chars.len() && (chars[i] == b'-' || chars[i] == b'+') {
        i += 1;
    }
    if i == chars.len() {
        return false;
    }
    while i < chars.len() {
        if !chars[i].is_ascii_digit() {
            return false;
        }
        i += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

/// Renders a scalar in the same grammar `parse_scalar` accepts, at the
/// context's full decimal precision (trailing zeros trimmed). Rendering is
/// deterministic: identical values produce identical strings.
pub fn render_scalar(s: &Scalar, ctx: &PrecisionContext) -> String {
    render_scalar_with_digits(s, ctx.digits, ctx)
}

pub(crate) fn render_scalar_with_digits(
    s: &Scalar,
    digits: u32,
    ctx: &PrecisionContext,
) -> String {
    let mut ws = Workspace::new();
    if s.im.is_zero() {
        return render_real_with(&s.re, digits, ctx, &mut ws);
    }
    if s.re.is_zero() {
        let mut out = render_real_with(&s.im, digits, ctx, &mut ws);
        out.push('i');
        return out;
    }
    let mut out = render_real_with(&s.re, digits, ctx, &mut ws);
    let im = render_real_with(&s.im, digits, ctx, &mut ws);
    if !im.starts_with('-') {
        out.push('+');
    }
    out.push_str(&im);
    out.push('i');
    out
}

/// Renders a real value at the context's decimal precision.
pub fn render_real(x: &BigFloat, ctx: &PrecisionContext) -> String {
    let mut ws = Workspace::new();
    render_real_with(x, ctx.digits, ctx, &mut ws)
}

fn render_real_with(
    x: &BigFloat,
    digits: u32,
    _ctx: &PrecisionContext,
    ws: &mut Workspace,
) -> String {
    if x.is_zero() {
        return String::from("0");
    }
    debug_assert!(!x.is_nan() && !x.is_inf(), "rendering non-finite value");
    let (sign, mut ds, mut e10) = x
        .convert_to_radix(Radix::Dec, RM, ws.cc())
        .expect("finite value converts to decimal");
    // convert_to_radix yields value = 0.d1 d2 ... * 10^e10.
    // Strip leading zeros the conversion may produce.
    while ds.first() == Some(&0) {
        ds.remove(0);
        e10 -= 1;
    }
    round_digit_string(&mut ds, &mut e10, digits as usize);
    let mut out = String::new();
    if sign == Sign::Neg {
        out.push('-');
    }
    // Trim trailing zeros; full precision is preserved, zeros carry none.
    while ds.len() > 1 && ds.last() == Some(&0) {
        ds.pop();
    }
    if ds.is_empty() {
        return String::from("0");
    }
    let e = e10 as i64;
    let n = ds.len() as i64;
    if e > 0 && e <= digits as i64 + 2 {
        // Positional with digits before the point.
        if n <= e {
            for &d in &ds {
                out.push(digit_char(d));
            }
            for _ in 0..(e - n) {
                out.push('0');
            }
        } else {
            for &d in &ds[..e as usize] {
                out.push(digit_char(d));
            }
            out.push('.');
            for &d in &ds[e as usize..] {
                out.push(digit_char(d));
            }
        }
    } else if e <= 0 && e > -5 {
        out.push_str("0.");
        for _ in 0..(-e) {
            out.push('0');
        }
        for &d in &ds {
            out.push(digit_char(d));
        }
    } else {
        // Scientific: d1.d2... e (e10 - 1)
        out.push(digit_char(ds[0]));
        if ds.len() > 1 {
            out.push('.');
            for &d in &ds[1..] {
                out.push(digit_char(d));
            }
        }
        out.push('e');
        out.push_str(&(e - 1).to_string());
    }
    out
}

fn digit_char(d: u8) -> char {
    (b'0' + d) as char
}

/// Rounds a digit vector to `keep` significant digits, half-up, carrying
/// into the exponent when the leading digit overflows.
fn round_digit_string(ds: &mut Vec<u8>, e10: &mut astro_float_num::Exponent, keep: usize) {
    if ds.len() <= keep {
        return;
    }
    let round_up = ds[keep] >= 5;
    ds.truncate(keep);
    if round_up {
        let mut i = keep;
        loop {
            if i == 0 {
                ds.insert(0, 1);
                *e10 += 1;
                ds.truncate(keep);
                break;
            }
            i -= 1;
            if ds[i] == 9 {
                ds[i] = 0;
            } else {
                ds[i] += 1;
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx50() -> PrecisionContext {
        make_context(50).unwrap()
    }

    #[test]
    fn context_defaults_derive_from_digits() {
        let ctx = ctx50();
        assert_eq!(ctx.digits(), 50);
        assert_eq!(ctx.max_terms(), 400);
        assert_eq!(ctx.consecutive_small(), 5);
        assert_eq!(ctx.tail_epsilon(), &ctx.pow10(-40));

        let ctx20 = make_context(20).unwrap();
        assert_eq!(ctx20.tail_epsilon(), &ctx20.pow10(-10));
    }

    #[test]
    fn context_rejects_low_digits() {
        assert!(matches!(make_context(5), Err(Error::Config(_))));
        assert!(matches!(make_context(19), Err(Error::Config(_))));
    }

    #[test]
    fn max_terms_floor_enforced() {
        let ctx = ctx50();
        assert!(matches!(ctx.with_max_terms(3), Err(Error::Config(_))));
    }

    #[test]
    fn parse_plain_decimal() {
        let ctx = ctx50();
        let v = parse_scalar("0.5", &ctx).unwrap();
        assert!(v.is_real());
        assert_eq!(render_scalar(&v, &ctx), "0.5");
    }

    #[test]
    fn parse_complex_forms() {
        let ctx = ctx50();
        let v = parse_scalar("1.5-2i", &ctx).unwrap();
        assert_eq!(render_scalar(&v, &ctx), "1.5-2i");
        let w = parse_scalar("2i", &ctx).unwrap();
        assert!(w.re().is_zero());
        assert_eq!(render_scalar(&w, &ctx), "2i");
        let u = parse_scalar("-1e-3+2.5e2i", &ctx).unwrap();
        assert_eq!(render_scalar(&u, &ctx), "-0.001+250i");
    }

    #[test]
    fn parse_rejects_garbage() {
        let ctx = ctx50();
        for bad in ["abc", "", "1.2.3", "i", "+i", "1e", "2x", "1+-2i", "nan", "inf"] {
            assert!(parse_scalar(bad, &ctx).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn render_roundtrip_preserves_value() {
        let ctx = ctx50();
        let cases = [
            "3.1415926535897932384626433832795028841971693993751",
            "-42",
            "1e-45",
            "0.3",
            "2.6",
            "123456789.125",
            "7e20",
        ];
        let tol = ctx.pow10(-(ctx.digits() as i32 - 2));
        for c in cases {
            let v = parse_scalar(c, &ctx).unwrap();
            let s = render_scalar(&v, &ctx);
            let w = parse_scalar(&s, &ctx).unwrap();
            assert!(
                approx_equal(&v, &w, &tol, &ctx),
                "roundtrip moved {c}: {s}"
            );
            // Rendering is deterministic.
            assert_eq!(s, render_scalar(&w, &ctx), "{c}");
        }
    }

    #[test]
    fn approx_equal_mixed_tolerance() {
        let ctx = ctx50();
        let one = Scalar::one(&ctx);
        let two = Scalar::from_integer(2, &ctx);
        assert!(approx_equal(&one, &one, &ctx.pow10(-30), &ctx));
        assert!(!approx_equal(&one, &two, &ctx.pow10(-30), &ctx));
        // Absolute difference below the mixed tolerance.
        let tiny = parse_scalar("1e-45", &ctx).unwrap();
        let zero = Scalar::zero(&ctx);
        assert!(approx_equal(&zero, &tiny, &ctx.pow10(-40), &ctx));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let ctx = ctx50();
        let one = Scalar::one(&ctx);
        let zero = Scalar::zero(&ctx);
        assert!(one.div(&zero, &ctx).is_err());
    }

    #[test]
    fn complex_arithmetic_basics() {
        let ctx = ctx50();
        let a = parse_scalar("1+2i", &ctx).unwrap();
        let b = parse_scalar("3-1i", &ctx).unwrap();
        let prod = a.mul(&b, &ctx);
        assert_eq!(render_scalar(&prod, &ctx), "5+5i");
        let q = prod.div(&b, &ctx).unwrap();
        let tol = ctx.pow10(-45);
        assert!(approx_equal(&q, &a, &tol, &ctx));
        let sq = a.powi(2, &ctx);
        assert_eq!(render_scalar(&sq, &ctx), "-3+4i");
    }

    #[test]
    fn rendering_carry_propagates() {
        let ctx = ctx50();
        // 51 nines round up into a fresh leading digit.
        let nines = "9.".to_string() + &"9".repeat(50);
        let v = parse_scalar(&nines, &ctx).unwrap();
        assert_eq!(render_scalar(&v, &ctx), "10");
        let small = parse_scalar(&("0.".to_string() + &"9".repeat(51)), &ctx).unwrap();
        assert_eq!(render_scalar(&small, &ctx), "1");
        // Negative zero normalizes.
        let neg_zero = Scalar::zero(&ctx).neg();
        assert_eq!(render_scalar(&neg_zero, &ctx), "0");
    }

    #[test]
    fn nearest_integer_proposals() {
        let ctx = ctx50();
        let v = parse_scalar("-3.0000000000000000000000000000000000000000000001", &ctx).unwrap();
        let (k, dist) = nearest_integer(v.re(), ctx.bits()).unwrap();
        assert_eq!(k, -3);
        assert!(real_lt(&dist, &ctx.pow10(-40)));
        let w = parse_scalar("2.4", &ctx).unwrap();
        let (k2, dist2) = nearest_integer(w.re(), ctx.bits()).unwrap();
        assert_eq!(k2, 2);
        assert!(real_lt(&ctx.pow10(-2), &dist2));
    }
}

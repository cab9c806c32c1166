//! Closed-form evaluators for the classical Kummer summation theorem and
//! its contiguous generalizations `2F1[a, b; 1+a-b+i; -1]` and
//! `2F1[a, b; 1+a-b-i; -1]`.
//!
//! The `-i` family ships in two modes. `Corrected` uses the prefactor
//! consistent with the `+i` theorem's own specializations
//! (`Gamma(1+a-b-i)` and `-i/2` displacements in the prefactor
//! denominators); `AsPrinted` keeps the widely circulated form whose
//! prefactor carries `+i` displacements. Which one matches a brute-force
//! evaluation of the series is a question for the verification engine, not
//! for this module: both are implemented faithfully and the caller decides.
//!
//! Evaluation routes every potentially singular ratio through
//! [`GammaProduct`] so that terminating parameter families (`a` a
//! nonpositive even integer) evaluate to their analytic limits instead of
//! tripping over formal poles.

use crate::error::Error;
use crate::gamma::{
    binomial, gamma_in, gamma_ratio_shift, nonpositive_integer_at, rgamma_in, Drift, GammaProduct,
};
use crate::scalar::{pow2, render_scalar_with_digits, PrecisionContext, Scalar, Workspace};
use crate::Result;

use alloc::vec::Vec;

use astro_float_num::BigFloat;

/// Whether a formula is evaluated exactly as circulated in print or with
/// the internally consistent prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    AsPrinted,
    Corrected,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::AsPrinted => "as-printed",
            Mode::Corrected => "corrected",
        }
    }
}

/// Input to the generalized Kummer theorems.
#[derive(Debug, Clone)]
pub struct KummerInput {
    pub a: Scalar,
    pub b: Scalar,
    pub i: u32,
    pub mode: Mode,
}

/// Classical Kummer summation theorem:
/// `2F1[a, b; 1+a-b; -1] = Gamma(1+a/2) Gamma(1+a-b) / (Gamma(1+a) Gamma(1+a/2-b))`.
///
/// All four gamma arguments must be non-poles; the closed form has no limit
/// interpretation here (unlike the generalized forms, poles of different
/// factors approach at unequal rates), so any pole is an error naming the
/// offending factor.
pub fn kummer_classical(a: &Scalar, b: &Scalar, ctx: &PrecisionContext) -> Result<Scalar> {
    let mut ws = Workspace::new();
    kummer_classical_in(a, b, ctx, &mut ws)
}

pub fn kummer_classical_in(
    a: &Scalar,
    b: &Scalar,
    ctx: &PrecisionContext,
    ws: &mut Workspace,
) -> Result<Scalar> {
    let one = Scalar::one(ctx);
    let a_half = a.mul(&Scalar::from_ratio(1, 2, ctx)?, ctx);
    let n1 = one.add(&a_half, ctx);
    let n2 = one.add(a, ctx).sub(b, ctx);
    let d1 = one.add(a, ctx);
    let d2 = n1.sub(b, ctx);
    for (arg, name) in [
        (&n1, "Gamma(1+a/2)"),
        (&n2, "Gamma(1+a-b)"),
        (&d1, "Gamma(1+a)"),
        (&d2, "Gamma(1+a/2-b)"),
    ] {
        if let Some(k) = nonpositive_integer_at(arg, ctx) {
            return Err(Error::Pole {
                nearest: k,
                factor: alloc::format!(
                    "{name} at {}",
                    render_scalar_with_digits(arg, 8, ctx)
                ),
            });
        }
    }
    let num = gamma_in(&n1, ctx, ws)?.mul(&gamma_in(&n2, ctx, ws)?, ctx);
    let den = rgamma_in(&d1, ctx, ws)?.mul(&rgamma_in(&d2, ctx, ws)?, ctx);
    Ok(num.mul(&den, ctx))
}

/// Closed form for `2F1[a, b; 1+a-b+i; -1]`.
///
/// Both modes coincide for this family; `input.mode` is accepted for
/// interface symmetry with the `-i` theorem.
pub fn kummer_general_plus(input: &KummerInput, ctx: &PrecisionContext) -> Result<Scalar> {
    let mut ws = Workspace::new();
    kummer_general_plus_in(input, ctx, &mut ws)
}

pub fn kummer_general_plus_in(
    input: &KummerInput,
    ctx: &PrecisionContext,
    ws: &mut Workspace,
) -> Result<Scalar> {
    closed_form(
        &input.a,
        &input.b,
        input.i,
        FormulaVariant::Plus,
        Drift::Fixed,
        ctx,
        ws,
    )
}

/// Closed form for `2F1[a, b; 1+a-b-i; -1]`, mode-dependent (see module
/// docs).
pub fn kummer_general_minus(input: &KummerInput, ctx: &PrecisionContext) -> Result<Scalar> {
    let mut ws = Workspace::new();
    kummer_general_minus_in(input, ctx, &mut ws)
}

pub fn kummer_general_minus_in(
    input: &KummerInput,
    ctx: &PrecisionContext,
    ws: &mut Workspace,
) -> Result<Scalar> {
    let variant = match input.mode {
        Mode::Corrected => FormulaVariant::Minus,
        Mode::AsPrinted => FormulaVariant::MinusMismatched,
    };
    closed_form(&input.a, &input.b, input.i, variant, Drift::Fixed, ctx, ws)
}

// ---------------------------------------------------------------------------
// Shared closed-form core
// ---------------------------------------------------------------------------

/// Shape of the prefactor and inner sum. The four variants share the
/// skeleton
/// `2^(-a) sqrt(pi) [Gamma(b-i)/Gamma(b)] Gamma(G) / (Gamma(P1) Gamma(P2))
///  * sum_r s^r C(i,r) Gamma(N_r) / Gamma(D_r)`
/// and differ in the `+i`/`-i` displacements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FormulaVariant {
    /// `+i` family: `G = 1+a-b+i`, displacements `+i/2`, alternating signs,
    /// with the `Gamma(b-i)/Gamma(b)` ratio.
    Plus,
    /// `Plus` with the second prefactor denominator printed `3/2` lower —
    /// the suspected misprint in the third double-series identity.
    PlusShiftedPrefactor,
    /// `-i` family, corrected: `G = 1+a-b-i`, displacements `-i/2`.
    Minus,
    /// `-i` family as printed: prefactor keeps `+i` displacements while the
    /// inner numerators carry `-i/2`.
    MinusMismatched,
}

struct VariantShape {
    g_plus: bool,
    pden_plus: bool,
    numr_plus: bool,
    p2_halves_offset: i64,
    alternating: bool,
    with_ratio: bool,
}

impl FormulaVariant {
    fn shape(self) -> VariantShape {
        match self {
            FormulaVariant::Plus => VariantShape {
                g_plus: true,
                pden_plus: true,
                numr_plus: true,
                p2_halves_offset: 0,
                alternating: true,
                with_ratio: true,
            },
            FormulaVariant::PlusShiftedPrefactor => VariantShape {
                g_plus: true,
                pden_plus: true,
                numr_plus: true,
                p2_halves_offset: -3,
                alternating: true,
                with_ratio: true,
            },
            FormulaVariant::Minus => VariantShape {
                g_plus: false,
                pden_plus: false,
                numr_plus: false,
                p2_halves_offset: 0,
                alternating: false,
                with_ratio: false,
            },
            FormulaVariant::MinusMismatched => VariantShape {
                g_plus: true,
                pden_plus: true,
                numr_plus: false,
                p2_halves_offset: 0,
                alternating: false,
                with_ratio: false,
            },
        }
    }
}

/// Evaluates the shared closed form.
///
/// `s_den_drift` classifies the inner denominator arguments
/// `D_r = a/2 - i/2 + r/2 + 1/2`: callers for which they depend only on
/// summation indices pass [`Drift::Fixed`] (standalone theorem use, where
/// `b` is the analytic parameter), callers for which they move with the
/// analytic parameter pass [`Drift::Moving`]. Every parameter-dependent
/// gamma argument in these formulas drifts at the same rate, which is what
/// makes the matched-pole limits in [`GammaProduct`] well defined.
pub(crate) fn closed_form(
    a: &Scalar,
    b: &Scalar,
    i: u32,
    variant: FormulaVariant,
    s_den_drift: Drift,
    ctx: &PrecisionContext,
    ws: &mut Workspace,
) -> Result<Scalar> {
    let shape = variant.shape();
    let half = Scalar::from_ratio(1, 2, ctx)?;
    let one = Scalar::one(ctx);
    let a_half = a.mul(&half, ctx);
    let base = a_half.sub(b, ctx);
    let i_half = Scalar::from_ratio(i as i64, 2, ctx)?;
    let signed_i_half = |plus: bool| if plus { i_half.clone() } else { i_half.neg() };

    let g_shift = Scalar::from_integer(if shape.g_plus { i as i64 } else { -(i as i64) }, ctx);
    let g_arg = one.add(a, ctx).sub(b, ctx).add(&g_shift, ctx);
    let p1 = base.add(&signed_i_half(shape.pden_plus), ctx).add(&half, ctx);
    let p2 = p1
        .add(&half, ctx)
        .add(&Scalar::from_ratio(shape.p2_halves_offset, 2, ctx)?, ctx);

    let ratio = if shape.with_ratio {
        gamma_ratio_shift(b, i, ctx)?
    } else {
        one.clone()
    };

    // N_r = a/2 - b ± i/2 + r/2 + 1/2 and D_r = a/2 - i/2 + r/2 + 1/2.
    let num_base = base.add(&signed_i_half(shape.numr_plus), ctx).add(&half, ctx);
    let den_base = a_half.sub(&i_half, ctx).add(&half, ctx);
    let mut num_args = Vec::with_capacity(i as usize + 1);
    let mut den_args = Vec::with_capacity(i as usize + 1);
    for r in 0..=i {
        let r_half = Scalar::from_ratio(r as i64, 2, ctx)?;
        num_args.push(num_base.add(&r_half, ctx));
        den_args.push(den_base.add(&r_half, ctx));
    }

    let prefactor_poles = nonpositive_integer_at(&g_arg, ctx).is_some()
        || nonpositive_integer_at(&p1, ctx).is_some()
        || nonpositive_integer_at(&p2, ctx).is_some()
        || num_args
            .iter()
            .any(|z| nonpositive_integer_at(z, ctx).is_some());

    let inner = if prefactor_poles {
        // Matched-pole path: fold the shared prefactor gammas into every
        // r-term so numerator poles meet the denominator zeros they cancel
        // against.
        let mut sum = Scalar::zero(ctx);
        for r in 0..=i {
            let mut product = GammaProduct::new();
            product
                .num(g_arg.clone(), Drift::Moving)
                .num(num_args[r as usize].clone(), Drift::Moving)
                .den(p1.clone(), Drift::Moving)
                .den(p2.clone(), Drift::Moving)
                .den(den_args[r as usize].clone(), s_den_drift);
            let mut term = product.eval(ctx, ws)?;
            term = term.mul(&binomial_scalar(i, r, ctx)?, ctx);
            if shape.alternating && r % 2 == 1 {
                term = term.neg();
            }
            sum = sum.add(&term, ctx);
        }
        sum
    } else {
        // No poles anywhere in the prefactor or numerators: hoist the
        // shared gammas out of the sum and walk Gamma(N_r) up by the
        // recurrence instead of re-evaluating it. The ladder remembers
        // which index it holds so skipped terms cannot desynchronize it.
        let mut sum = Scalar::zero(ctx);
        let mut gamma_ladder: [Option<(u32, Scalar)>; 2] = [None, None];
        for r in 0..=i {
            let d = &den_args[r as usize];
            if nonpositive_integer_at(d, ctx).is_some() {
                // Reciprocal gamma zero: the term vanishes exactly.
                continue;
            }
            let parity = (r % 2) as usize;
            let g_num = match gamma_ladder[parity].take() {
                // Gamma(z+1) = z Gamma(z) with z = N_{r-2}.
                Some((prev_r, prev)) if prev_r + 2 == r => {
                    prev.mul(&num_args[(r - 2) as usize], ctx)
                }
                _ => gamma_in(&num_args[r as usize], ctx, ws)?,
            };
            let mut term = g_num.mul(&rgamma_in(d, ctx, ws)?, ctx);
            term = term.mul(&binomial_scalar(i, r, ctx)?, ctx);
            if shape.alternating && parity == 1 {
                term = term.neg();
            }
            sum = sum.add(&term, ctx);
            gamma_ladder[parity] = Some((r, g_num));
        }
        let hoisted = gamma_in(&g_arg, ctx, ws)?
            .mul(&rgamma_in(&p1, ctx, ws)?, ctx)
            .mul(&rgamma_in(&p2, ctx, ws)?, ctx);
        sum.mul(&hoisted, ctx)
    };

    let two_pow = pow2(&a.neg(), ctx, ws);
    Ok(inner
        .mul(&ratio, ctx)
        .mul(&two_pow, ctx)
        .mul_real(ctx.sqrt_pi(), ctx))
}

fn binomial_scalar(i: u32, r: u32, ctx: &PrecisionContext) -> Result<Scalar> {
    let c = binomial(i, r)?;
    Ok(Scalar::from_real(BigFloat::from_u128(c, ctx.bits())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{approx_equal, make_context, parse_scalar, render_scalar};
    use crate::series::f21_terminating;

    fn ctx() -> PrecisionContext {
        make_context(50).unwrap()
    }

    fn s(text: &str, ctx: &PrecisionContext) -> Scalar {
        parse_scalar(text, ctx).unwrap()
    }

    fn assert_close(a: &Scalar, b: &Scalar, ctx: &PrecisionContext) {
        let tol = ctx.pow10(-(ctx.digits() as i32 - 10));
        assert!(
            approx_equal(a, b, &tol, ctx),
            "expected {} ~ {}",
            render_scalar(a, ctx),
            render_scalar(b, ctx)
        );
    }

    fn quarter_pi(ctx: &PrecisionContext) -> Scalar {
        Scalar::from_real(ctx.pi().clone())
            .div(&Scalar::from_integer(4, ctx), ctx)
            .unwrap()
    }

    #[test]
    fn classical_at_one_half() {
        let ctx = ctx();
        let v = kummer_classical(&s("1", &ctx), &s("0.5", &ctx), &ctx).unwrap();
        assert_close(&v, &quarter_pi(&ctx), &ctx);
    }

    #[test]
    fn classical_at_a_zero_is_one() {
        let ctx = ctx();
        let v = kummer_classical(&s("0", &ctx), &s("0.7", &ctx), &ctx).unwrap();
        assert_close(&v, &Scalar::one(&ctx), &ctx);
    }

    #[test]
    fn classical_pole_is_reported() {
        let ctx = ctx();
        // 1+a-b = 0.
        assert!(matches!(
            kummer_classical(&s("1", &ctx), &s("2", &ctx), &ctx),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn generalized_reduce_to_classical_at_i_zero() {
        let ctx = ctx();
        for mode in [Mode::Corrected, Mode::AsPrinted] {
            let input = KummerInput {
                a: s("1", &ctx),
                b: s("0.5", &ctx),
                i: 0,
                mode,
            };
            let plus = kummer_general_plus(&input, &ctx).unwrap();
            let minus = kummer_general_minus(&input, &ctx).unwrap();
            assert_close(&plus, &quarter_pi(&ctx), &ctx);
            assert_close(&minus, &quarter_pi(&ctx), &ctx);
        }
    }

    #[test]
    fn plus_family_analytic_spot_value() {
        let ctx = ctx();
        // 2F1(1, 1/2; 5/2; -1) = (3/4)(pi - 2) by partial fractions of the
        // term ratio against the arctan series.
        let input = KummerInput {
            a: s("1", &ctx),
            b: s("0.5", &ctx),
            i: 1,
            mode: Mode::Corrected,
        };
        let v = kummer_general_plus(&input, &ctx).unwrap();
        let expect = Scalar::from_real(ctx.pi().clone())
            .sub(&Scalar::from_integer(2, &ctx), &ctx)
            .mul(&Scalar::from_ratio(3, 4, &ctx).unwrap(), &ctx);
        assert_close(&v, &expect, &ctx);
    }

    #[test]
    fn plus_family_terminating_matches_finite_sum() {
        let ctx = ctx();
        // a = -4, b = -6, i = 2: lower parameter 1+a-b+i = 5.
        let input = KummerInput {
            a: s("-4", &ctx),
            b: s("-6", &ctx),
            i: 2,
            mode: Mode::Corrected,
        };
        let v = kummer_general_plus(&input, &ctx).unwrap();
        let oracle = f21_terminating(4, &s("-6", &ctx), &s("5", &ctx), &ctx).unwrap();
        assert_close(&v, &oracle, &ctx);
        // Same value as the hand-reduced rational 9/70.
        assert_close(&v, &Scalar::from_ratio(9, 70, &ctx).unwrap(), &ctx);
    }

    #[test]
    fn minus_family_analytic_spot_value() {
        let ctx = ctx();
        // 2F1(3, 1/2; 5/2; -1) = 3/8 + 3 pi/32: partial fractions of the
        // term ratio against the arctan series, cross-checked through the
        // Euler transform 2^(-1) 2F1(-1/2, 2; 5/2; -1).
        let input = KummerInput {
            a: s("3", &ctx),
            b: s("0.5", &ctx),
            i: 1,
            mode: Mode::Corrected,
        };
        let v = kummer_general_minus(&input, &ctx).unwrap();
        let expect = Scalar::from_ratio(3, 8, &ctx)
            .unwrap()
            .add(
                &Scalar::from_real(ctx.pi().clone())
                    .mul(&Scalar::from_ratio(3, 32, &ctx).unwrap(), &ctx),
                &ctx,
            );
        assert_close(&v, &expect, &ctx);
        // The as-printed prefactor lands somewhere else entirely.
        let printed = kummer_general_minus(
            &KummerInput {
                mode: Mode::AsPrinted,
                ..input
            },
            &ctx,
        )
        .unwrap();
        assert!(!approx_equal(&printed, &expect, &ctx.pow10(-6), &ctx));
    }

    #[test]
    fn minus_family_degenerate_terminating_limit() {
        let ctx = ctx();
        // a = -4, b = -2, i = 1: the lower parameter collides with b and
        // the value is the analytic limit 6 along the b-family.
        let input = KummerInput {
            a: s("-4", &ctx),
            b: s("-2", &ctx),
            i: 1,
            mode: Mode::Corrected,
        };
        let v = kummer_general_minus(&input, &ctx).unwrap();
        assert_close(&v, &Scalar::from_integer(6, &ctx), &ctx);
    }

    #[test]
    fn minus_family_terminating_against_oracle() {
        let ctx = ctx();
        // a = -6, b = 2.5, i = 2: c = 1+a-b-i = -9.5, harmless non-integer.
        let input = KummerInput {
            a: s("-6", &ctx),
            b: s("2.5", &ctx),
            i: 2,
            mode: Mode::Corrected,
        };
        let v = kummer_general_minus(&input, &ctx).unwrap();
        let oracle = f21_terminating(6, &s("2.5", &ctx), &s("-9.5", &ctx), &ctx).unwrap();
        assert_close(&v, &oracle, &ctx);
    }
}

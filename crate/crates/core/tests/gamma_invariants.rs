//! Randomized invariant suites for the gamma kernel: reflection,
//! recurrence, reciprocal-gamma, Pochhammer shift and factorial shift
//! identities, and the gamma-ratio/Pochhammer inverse pair.

use kummer_core::gamma::{gamma, gamma_ratio_shift, pochhammer, rgamma};
use kummer_core::scalar::{approx_equal, make_context, PrecisionContext, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx() -> PrecisionContext {
    make_context(50).unwrap()
}

/// Random scalar with 5-decimal-digit granularity in [-span, span],
/// optionally complex. Exactly representable, so runs are reproducible.
fn random_scalar(rng: &mut ChaCha8Rng, span: i64, complex: bool, ctx: &PrecisionContext) -> Scalar {
    let den = 100_000i64;
    let re = Scalar::from_ratio(rng.gen_range(-span * den..=span * den), den, ctx).unwrap();
    if !complex {
        return re;
    }
    let im = Scalar::from_ratio(rng.gen_range(-span * den..=span * den), den, ctx).unwrap();
    re.add(&im.mul(&Scalar::i(ctx), ctx), ctx)
}

fn non_pole(rng: &mut ChaCha8Rng, span: i64, complex: bool, ctx: &PrecisionContext) -> Scalar {
    loop {
        let z = random_scalar(rng, span, complex, ctx);
        if kummer_core::gamma::nonpositive_integer_at(&z, ctx).is_none() && !z.is_zero() {
            return z;
        }
    }
}

#[test]
fn reflection_identity_holds() {
    let ctx = ctx();
    let tol = ctx.pow10(-45);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut checked = 0;
    while checked < 100 {
        let z = non_pole(&mut rng, 10, checked % 3 == 0, &ctx);
        // Positive integers are zeros of sin(pi z): skip exact integers entirely.
        let one_minus = Scalar::one(&ctx).sub(&z, &ctx);
        if kummer_core::gamma::nonpositive_integer_at(&one_minus, &ctx).is_some() {
            continue;
        }
        let g = gamma(&z, &ctx).unwrap();
        let g1 = gamma(&one_minus, &ctx).unwrap();
        let s = kummer_core::gamma::sin_pi(&z, &ctx);
        let lhs = g
            .mul(&g1, &ctx)
            .mul(&s, &ctx)
            .div(&Scalar::from_real(ctx.pi().clone()), &ctx)
            .unwrap();
        assert!(
            approx_equal(&lhs, &Scalar::one(&ctx), &tol, &ctx),
            "reflection failed at {}",
            kummer_core::scalar::render_scalar(&z, &ctx)
        );
        checked += 1;
    }
}

#[test]
fn recurrence_identity_holds() {
    let ctx = ctx();
    let tol = ctx.pow10(-45);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for k in 0..100 {
        let z = non_pole(&mut rng, 20, k % 2 == 0, &ctx);
        let g = gamma(&z, &ctx).unwrap();
        let g1 = gamma(&z.add(&Scalar::one(&ctx), &ctx), &ctx).unwrap();
        let want = z.mul(&g, &ctx);
        assert!(
            approx_equal(&g1, &want, &tol, &ctx),
            "recurrence failed at {}",
            kummer_core::scalar::render_scalar(&z, &ctx)
        );
    }
}

#[test]
fn reciprocal_gamma_inverts_gamma() {
    let ctx = ctx();
    let tol = ctx.pow10(-45);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for k in 0..100 {
        let z = non_pole(&mut rng, 15, k % 4 == 1, &ctx);
        let prod = rgamma(&z, &ctx)
            .unwrap()
            .mul(&gamma(&z, &ctx).unwrap(), &ctx);
        assert!(approx_equal(&prod, &Scalar::one(&ctx), &tol, &ctx));
    }
    for k in 0..=40i64 {
        let z = Scalar::from_integer(-k, &ctx);
        assert!(rgamma(&z, &ctx).unwrap().is_zero(), "rgamma(-{k}) not zero");
    }
}

#[test]
fn pochhammer_shift_identity() {
    // (alpha)_{m-n} (1 - alpha - m)_n = (-1)^n (alpha)_m
    let ctx = ctx();
    let tol = ctx.pow10(-42);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for trial in 0..50 {
        let alpha = random_scalar(&mut rng, 5, trial % 5 == 0, &ctx);
        let one_minus = Scalar::one(&ctx).sub(&alpha, &ctx);
        for m in 0..=30u32 {
            let rhs_base = pochhammer(&alpha, m, &ctx);
            let shifted = one_minus.sub(&Scalar::from_integer(m as i64, &ctx), &ctx);
            for n in 0..=m {
                let lhs = pochhammer(&alpha, m - n, &ctx).mul(&pochhammer(&shifted, n, &ctx), &ctx);
                let rhs = if n % 2 == 1 {
                    rhs_base.neg()
                } else {
                    rhs_base.clone()
                };
                assert!(
                    approx_equal(&lhs, &rhs, &tol, &ctx),
                    "pochhammer shift failed: m={m} n={n}"
                );
            }
        }
    }
}

#[test]
fn factorial_shift_identity() {
    // (m-n)! (-m)_n = (-1)^n m!
    let ctx = ctx();
    let tol = ctx.pow10(-45);
    let fact = |k: u32| pochhammer(&Scalar::one(&ctx), k, &ctx);
    for m in 0..=30u32 {
        let m_fact = fact(m);
        let neg_m = Scalar::from_integer(-(m as i64), &ctx);
        for n in 0..=m {
            let lhs = fact(m - n).mul(&pochhammer(&neg_m, n, &ctx), &ctx);
            let rhs = if n % 2 == 1 { m_fact.neg() } else { m_fact.clone() };
            assert!(
                approx_equal(&lhs, &rhs, &tol, &ctx),
                "factorial shift failed: m={m} n={n}"
            );
        }
    }
}

#[test]
fn ratio_shift_inverts_pochhammer() {
    let ctx = ctx();
    let tol = ctx.pow10(-42);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut checked = 0;
    while checked < 60 {
        let z = random_scalar(&mut rng, 8, checked % 3 == 2, &ctx);
        let i = (checked % 6) as u32;
        let Ok(ratio) = gamma_ratio_shift(&z, i, &ctx) else {
            continue;
        };
        let base = z.sub(&Scalar::from_integer(i as i64, &ctx), &ctx);
        let prod = ratio.mul(&pochhammer(&base, i, &ctx), &ctx);
        assert!(
            approx_equal(&prod, &Scalar::one(&ctx), &tol, &ctx),
            "ratio/pochhammer inverse failed at i={i}"
        );
        checked += 1;
    }
}

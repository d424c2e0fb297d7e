//! Clebsch–Gordan coefficients in the Condon–Shortley convention.
//!
//! Evaluated with Racah's closed-form sum. The sum and the radicand are
//! accumulated as exact big-integer rationals, so the only rounding happens
//! in the final square root.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn doubled(x: f64) -> Result<i64> {
    let t = 2.0 * x;
    if !x.is_finite() || (t - t.round()).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "{x} is not a multiple of 1/2"
        )));
    }
    Ok(t.round() as i64)
}

/// `⟨j1 m1; j2 m2 | J M⟩` for half-integer arguments.
///
/// Returns `Ok(0.0)` when a selection rule fails and an error when any
/// argument is not a multiple of 1/2 or a `j` is negative.
pub fn clebsch_gordan(j1: f64, m1: f64, j2: f64, m2: f64, j: f64, m: f64) -> Result<f64> {
    let args = [
        doubled(j1)?,
        doubled(m1)?,
        doubled(j2)?,
        doubled(m2)?,
        doubled(j)?,
        doubled(m)?,
    ];
    if args[0] < 0 || args[2] < 0 || args[4] < 0 {
        return Err(Error::InvalidArgument(
            "angular momenta must be nonnegative".into(),
        ));
    }
    Ok(clebsch_gordan_twice(
        args[0], args[1], args[2], args[3], args[4], args[5],
    ))
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Clebsch–Gordan coefficient with every argument given as twice its value.
pub fn clebsch_gordan_twice(tj1: i64, tm1: i64, tj2: i64, tm2: i64, tj: i64, tm: i64) -> f64 {
    if tj1 < 0 || tj2 < 0 || tj < 0 {
        return 0.0;
    }
    if tm != tm1 + tm2 || tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tj {
        return 0.0;
    }
    // j − m must be an integer for every pair.
    if (tj1 - tm1) % 2 != 0 || (tj2 - tm2) % 2 != 0 || (tj - tm) % 2 != 0 {
        return 0.0;
    }
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return 0.0;
    }

    // All of the following are integers once halved.
    let h = |x: i64| x / 2;
    let a = h(tj1 + tj2 - tj);
    let b = h(tj1 - tm1);
    let cc = h(tj2 + tm2);
    let d = h(tj - tj2 + tm1);
    let e = h(tj - tj1 - tm2);

    let radicand_num = BigInt::from(tj + 1)
        * factorial(h(tj + tj1 - tj2))
        * factorial(h(tj - tj1 + tj2))
        * factorial(a)
        * factorial(h(tj + tm))
        * factorial(h(tj - tm))
        * factorial(b)
        * factorial(h(tj1 + tm1))
        * factorial(h(tj2 - tm2))
        * factorial(cc);
    let radicand_den = factorial(h(tj1 + tj2 + tj) + 1);
    let radicand = BigRational::new(radicand_num, radicand_den);

    let k_min = 0.max(-d).max(-e);
    let k_max = a.min(b).min(cc);
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(a - k)
            * factorial(b - k)
            * factorial(cc - k)
            * factorial(d + k)
            * factorial(e + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let square = radicand * &sum * &sum;
    let magnitude = square.to_f64().unwrap_or(f64::NAN).sqrt();
    if sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

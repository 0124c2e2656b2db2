use super::{Ball, Dyadic, Mag};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

static PI_CACHE: OnceLock<Mutex<HashMap<u32, Ball>>> = OnceLock::new();

/// Enclosure of π at the given working precision, cached per precision.
pub fn pi(prec: u32) -> Ball {
    let cache = PI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&prec) {
        return b.clone();
    }
    let b = machin_pi(prec);
    cache.lock().unwrap().insert(prec, b.clone());
    b
}

/// π = 16 atan(1/5) - 4 atan(1/239), evaluated in scaled integer arithmetic
/// with one counted ulp of error per floored term.
fn machin_pi(prec: u32) -> Ball {
    let s = prec as u64 + 12;
    let (a5, n5) = atan_inv_scaled(5, s);
    let (a239, n239) = atan_inv_scaled(239, s);
    let man = BigInt::from(16) * a5 - BigInt::from(4) * a239;
    // each floored term is short by less than one ulp and each truncated tail
    // by less than one more, scaled by the Machin coefficients
    let err_ulps = 16 * (n5 + 1) + 4 * (n239 + 1);
    let mid = Dyadic::new(man, -(s as i64));
    let rad = Mag::from_u64(err_ulps).mul_pow2(-(s as i64));
    Ball::new(mid, rad, prec)
}

/// `round(2^s * atan(1/x))` by the alternating series, flooring every term
/// toward zero.  Returns the scaled sum and the number of terms used.
fn atan_inv_scaled(x: u64, s: u64) -> (BigInt, u64) {
    let scale = BigInt::one() << s;
    let x2 = BigInt::from(x * x);
    let mut xpow = BigInt::from(x);
    let mut acc = BigInt::zero();
    let mut j = 0u64;
    loop {
        let term = &scale / (&xpow * BigInt::from(2 * j + 1));
        if term.is_zero() {
            return (acc, j);
        }
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        xpow *= &x2;
        j += 1;
    }
}

/// Taylor series for sin on a ball, rigorous for any real argument: the
/// omitted tail is bounded by the first omitted term (Lagrange form).  Only
/// efficient for small `|t|`; callers reduce the argument first.
pub(crate) fn sin_taylor(t: &Ball) -> Result<Ball> {
    let wp = t.prec();
    let tail_exp = -(wp as i64 + 8);
    let t2 = t.mul(t);
    let mut term = t.clone();
    let mut sum = t.clone();
    let mut j: u64 = 1;
    loop {
        term = term
            .mul(&t2)
            .div_bigint(&BigInt::from((2 * j) * (2 * j + 1)))?;
        let bound = term.abs_upper();
        if bound.is_below_pow2(tail_exp) {
            return Ok(sum.widen(&bound));
        }
        sum = if j % 2 == 1 {
            sum.sub(&term)
        } else {
            sum.add(&term)
        };
        j += 1;
    }
}

/// Like [`sin_taylor`] for cosine; same remainder bound.
pub(crate) fn cos_taylor(t: &Ball) -> Result<Ball> {
    let wp = t.prec();
    let tail_exp = -(wp as i64 + 8);
    let t2 = t.mul(t);
    let mut term = Ball::one(wp);
    let mut sum = Ball::one(wp);
    let mut j: u64 = 1;
    loop {
        term = term
            .mul(&t2)
            .div_bigint(&BigInt::from((2 * j - 1) * (2 * j)))?;
        let bound = term.abs_upper();
        if bound.is_below_pow2(tail_exp) {
            return Ok(sum.widen(&bound));
        }
        sum = if j % 2 == 1 {
            sum.sub(&term)
        } else {
            sum.add(&term)
        };
        j += 1;
    }
}

/// `2 sin(π m / n)` for integers `m` and `n > 0`.
///
/// The argument is reduced by the symmetries of sine before any series runs,
/// and the points where the value is an integer — multiples of π, odd
/// multiples of π/2, and the ±π/6 family — come back exact with zero radius.
/// Everything else is evaluated by Taylor series on `[0, π/2]`.
pub fn two_sin_pi_rational(m: i64, n: i64, prec: u32) -> Result<Ball> {
    if n <= 0 {
        return Err(Error::InvalidParams(format!(
            "sine denominator must be positive, got {n}"
        )));
    }
    if n > (1 << 40) {
        return Err(Error::ParameterTooLarge(format!(
            "sine denominator {n} exceeds the supported range"
        )));
    }
    // periodicity: reduce m into [0, 2n), then sin(π(m-n)/n) = -sin(πm/n)
    let mut m0 = m.rem_euclid(2 * n);
    let negate = m0 >= n;
    if negate {
        m0 -= n;
    }
    // reflection about π/2 folds [0, n) onto [0, n/2]
    if 2 * m0 > n {
        m0 = n - m0;
    }
    let value = if m0 == 0 {
        Ball::zero(prec)
    } else if 2 * m0 == n {
        Ball::from_i64(2, prec)
    } else if 6 * m0 == n {
        Ball::one(prec)
    } else {
        let wp = prec + 12;
        let x = pi(wp).mul_i64(m0).div_bigint(&BigInt::from(n))?;
        sin_taylor(&x)?.mul_pow2(1).with_prec(prec)
    };
    Ok(if negate { value.neg() } else { value })
}

//! Certified real and complex interval arithmetic.
//!
//! A [`Ball`] is a midpoint–radius pair: an exact dyadic midpoint plus a
//! round-up [`Mag`] radius guaranteed to contain the represented real number.
//! Midpoints are rounded to the ball's working precision after every
//! operation, with the rounding error folded into the radius, so results are
//! always rigorous enclosures regardless of precision.

mod complex;
mod dyadic;
mod exp;
mod mag;
mod sin;

pub use complex::{exp_2pi_i_rational, ComplexBall};
pub use dyadic::Dyadic;
pub use mag::Mag;
pub use sin::{pi, two_sin_pi_rational};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Rigorous enclosure of a real number: every operation returns a ball whose
/// interval `[mid - rad, mid + rad]` contains the exact result.
#[derive(Clone)]
pub struct Ball {
    mid: Dyadic,
    rad: Mag,
    prec: u32,
}

impl Ball {
    /// An exact value: zero radius.
    pub fn exact(mid: Dyadic, prec: u32) -> Self {
        Ball::rounded(mid, Mag::zero(), prec)
    }

    pub fn zero(prec: u32) -> Self {
        Ball {
            mid: Dyadic::zero(),
            rad: Mag::zero(),
            prec,
        }
    }

    pub fn one(prec: u32) -> Self {
        Ball {
            mid: Dyadic::one(),
            rad: Mag::zero(),
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Ball::exact(Dyadic::from_i64(v), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        Ball::exact(Dyadic::from_bigint(v.clone()), prec)
    }

    pub fn new(mid: Dyadic, rad: Mag, prec: u32) -> Self {
        Ball::rounded(mid, rad, prec)
    }

    /// Rounds the midpoint to `prec` bits, absorbing the discarded tail into
    /// the radius.
    fn rounded(mid: Dyadic, rad: Mag, prec: u32) -> Self {
        let bits = mid.bits();
        if bits <= prec as u64 {
            return Ball { mid, rad, prec };
        }
        // the bits dropped by truncation lie strictly below one unit of the
        // last kept place
        let ulp_exp = mid.exponent() + (bits - prec as u64) as i64;
        let (t, inexact) = mid.truncate_to(prec);
        let rad = if inexact {
            rad.add(&Mag::pow2(ulp_exp))
        } else {
            rad
        };
        Ball { mid: t, rad, prec }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Mag {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Same enclosure re-rounded at a new working precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Ball::rounded(self.mid.clone(), self.rad, prec)
    }

    pub fn neg(&self) -> Self {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    pub fn add(&self, rhs: &Ball) -> Self {
        let prec = self.prec.max(rhs.prec);
        Ball::rounded(self.mid.add(&rhs.mid), self.rad.add(&rhs.rad), prec)
    }

    pub fn sub(&self, rhs: &Ball) -> Self {
        let prec = self.prec.max(rhs.prec);
        Ball::rounded(self.mid.sub(&rhs.mid), self.rad.add(&rhs.rad), prec)
    }

    pub fn mul(&self, rhs: &Ball) -> Self {
        let prec = self.prec.max(rhs.prec);
        let mid = self.mid.mul(&rhs.mid);
        // |a||db| + |b||da| + |da||db|
        let am = Mag::from_dyadic_upper(&self.mid);
        let bm = Mag::from_dyadic_upper(&rhs.mid);
        let rad = am
            .mul(&rhs.rad)
            .add(&bm.mul(&self.rad))
            .add(&self.rad.mul(&rhs.rad));
        Ball::rounded(mid, rad, prec)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul_bigint(&BigInt::from(k))
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        let mid = self.mid.mul_bigint(k);
        let km = Mag::from_dyadic_upper(&Dyadic::from_bigint(k.clone()));
        Ball::rounded(mid, km.mul(&self.rad), self.prec)
    }

    /// Exact scaling by `2^e`.
    pub fn mul_pow2(&self, e: i64) -> Self {
        Ball {
            mid: self.mid.mul_pow2(e),
            rad: self.rad.mul_pow2(e),
            prec: self.prec,
        }
    }

    /// Division by a nonzero integer.
    pub fn div_bigint(&self, k: &BigInt) -> Result<Ball> {
        if k.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let q = Ball::from_ratio(self.mid.mantissa(), k, self.prec)?
            .mul_pow2(self.mid.exponent());
        let rad = if self.rad.is_zero() {
            q.rad
        } else {
            let k_low = Mag::from_dyadic_lower(&Dyadic::from_bigint(k.abs()));
            q.rad.add(&self.rad.div_up(&k_low))
        };
        Ok(Ball {
            mid: q.mid,
            rad,
            prec: self.prec,
        })
    }

    /// Enclosure of `|x|` over the ball.
    pub fn abs(&self) -> Ball {
        Ball {
            mid: self.mid.abs(),
            rad: self.rad,
            prec: self.prec,
        }
    }

    /// Same midpoint with the radius enlarged by `extra`; used to absorb
    /// truncated series tails.
    pub(crate) fn widen(&self, extra: &Mag) -> Ball {
        Ball {
            mid: self.mid.clone(),
            rad: self.rad.add(extra),
            prec: self.prec,
        }
    }

    /// Reciprocal.  Fails with [`Error::BallContainsZero`] when the enclosure
    /// does not exclude zero, since the image is then unbounded.
    pub fn inv(&self) -> Result<Ball> {
        let lo = self.abs_lower();
        if lo.is_zero() || lo.is_negative() {
            return Err(Error::BallContainsZero);
        }
        let prec = self.prec;
        // reciprocal of the midpoint to prec + 2 bits
        let man = self.mid.mantissa();
        let s = man.bits() + prec as u64 + 2;
        let q: BigInt = (BigInt::one() << s) / man;
        let rec_mid = Dyadic::new(q, -(s as i64) - self.mid.exponent());
        let rec_err = Mag::pow2(-(s as i64) - self.mid.exponent());
        // |1/x - 1/m| <= rad / (|m| (|m| - rad)) over the whole ball
        let m_low = Mag::from_dyadic_lower(&self.mid.abs());
        let lo_low = Mag::from_dyadic_lower(&lo);
        let prop = self.rad.div_up(&m_low).div_up(&lo_low);
        Ok(Ball::rounded(rec_mid, rec_err.add(&prop), prec))
    }

    pub fn div(&self, rhs: &Ball) -> Result<Ball> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Integer power by binary exponentiation.  `x^0` is exactly one even for
    /// a ball containing zero; negative exponents invert first.
    pub fn pow_i64(&self, n: i64) -> Result<Ball> {
        if n == 0 {
            return Ok(Ball::one(self.prec));
        }
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc: Option<Ball> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.unwrap())
    }

    /// Exact rational `num/den` enclosed to working precision.
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Result<Ball> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Ball::zero(prec));
        }
        let shift = prec as u64 + 2 + den.bits();
        let scaled: BigInt = num << shift;
        let (q, r) = scaled.div_rem(den);
        let mid = Dyadic::new(q, -(shift as i64));
        let rad = if r.is_zero() {
            Mag::zero()
        } else {
            Mag::pow2(-(shift as i64))
        };
        Ok(Ball::rounded(mid, rad, prec))
    }

    /// Parses a plain or scientific decimal literal (`-1.25`, `3e-2`) into an
    /// enclosure of its exact value.
    pub fn from_decimal_str(s: &str, prec: u32) -> Result<Ball> {
        let (num, pow10) = parse_decimal(s)
            .ok_or_else(|| Error::InvalidParams(format!("not a decimal number: {s:?}")))?;
        let den = BigInt::from(10u8).pow(pow10);
        Ball::from_ratio(&num, &den, prec)
    }

    /// Exact lower bound for the distance of the ball from zero; negative or
    /// zero when the ball contains zero.
    fn abs_lower(&self) -> Dyadic {
        self.mid.abs().sub(&self.rad.to_dyadic())
    }

    pub fn contains_zero(&self) -> bool {
        let lo = self.abs_lower();
        lo.is_zero() || lo.is_negative()
    }

    pub fn contains_dyadic(&self, v: &Dyadic) -> bool {
        let dist = self.mid.sub(v).abs();
        dist.cmp_value(&self.rad.to_dyadic()) != Ordering::Greater
    }

    pub fn contains_i64(&self, v: i64) -> bool {
        self.contains_dyadic(&Dyadic::from_i64(v))
    }

    /// Does this ball contain the whole of `other`?
    pub fn contains_ball(&self, other: &Ball) -> bool {
        let dist = self.mid.sub(&other.mid).abs().add(&other.rad.to_dyadic());
        dist.cmp_value(&self.rad.to_dyadic()) != Ordering::Greater
    }

    /// Do the two enclosures intersect?  Two balls around the same exact
    /// value always do, whatever their precisions.
    pub fn overlaps(&self, other: &Ball) -> bool {
        let dist = self.mid.sub(&other.mid).abs();
        let reach = self.rad.to_dyadic().add(&other.rad.to_dyadic());
        dist.cmp_value(&reach) != Ordering::Greater
    }

    /// Upper bound for `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        Mag::from_dyadic_upper(&self.mid).add(&self.rad)
    }

    /// Loose printable form; the exact data lives in `mid`/`rad`.
    pub fn approx_string(&self) -> String {
        format!("{:.6e} ± {:.3e}", self.mid.to_f64(), self.rad.to_dyadic().to_f64())
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ball({} @ {} bits)", self.approx_string(), self.prec)
    }
}

/// Integer certified to be the unique integer inside a ball, together with
/// how much room was left: `margin = 1/2 - |mid - value| - rad`, computed
/// exactly in dyadic arithmetic.
#[derive(Clone, Debug)]
pub struct CertifiedInteger {
    pub value: BigInt,
    pub source: Ball,
    pub margin: Dyadic,
}

/// Proves a ball contains exactly one integer and returns it.
///
/// The criterion is strict: `|mid - nearest| + rad < 1/2` must hold in exact
/// arithmetic.  A ball straddling a half-integer boundary fails, as does any
/// radius at or above one half.
pub fn certify_integer(ball: &Ball) -> Result<CertifiedInteger> {
    let (value, diff) = ball.mid.round_to_int();
    let half = Dyadic::new(BigInt::one(), -1);
    let margin = half.sub(&diff.abs()).sub(&ball.rad.to_dyadic());
    if margin.is_zero() || margin.is_negative() {
        return Err(Error::CertificationFailed {
            mid: ball.mid.to_decimal(),
            rad: ball.rad.to_dyadic().to_decimal(),
        });
    }
    Ok(CertifiedInteger {
        value,
        source: ball.clone(),
        margin,
    })
}

/// Splits a decimal literal into `(numerator, power of ten)` so that the
/// value is exactly `numerator / 10^pow`.
fn parse_decimal(s: &str) -> Option<(BigInt, u32)> {
    let s = s.trim();
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().ok()?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let num: BigInt = joined.parse().ok()?;
    let scale = frac_part.len() as i64 - exp10;
    let (num, pow10) = if scale >= 0 {
        (num, scale as u32)
    } else {
        (num * BigInt::from(10u8).pow((-scale) as u32), 0)
    };
    Some((if sign < 0 { -num } else { num }, pow10))
}

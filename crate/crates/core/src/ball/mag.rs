use super::dyadic::Dyadic;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::cmp::Ordering;
use std::fmt;

/// Fixed-precision magnitude bound `man * 2^exp`, always rounded upward.
///
/// The mantissa is kept in `[2^31, 2^32)` (or zero), so every operation has a
/// cheap, branch-light normalization and two bounds compare by `(exp, man)`.
/// Directed rounding is the whole point: whatever sequence of operations is
/// performed, the result never underestimates the true magnitude.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Mag {
    man: u64,
    exp: i64,
}

const MAG_BITS: u32 = 32;

impl Mag {
    pub fn zero() -> Self {
        Mag { man: 0, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    /// Exactly `2^e`.
    pub fn pow2(e: i64) -> Self {
        Mag {
            man: 1u64 << (MAG_BITS - 1),
            exp: e - (MAG_BITS as i64 - 1),
        }
    }

    pub fn from_u64(v: u64) -> Self {
        normalize(v as u128, 0)
    }

    /// Upper bound for `|d|`.
    pub fn from_dyadic_upper(d: &Dyadic) -> Self {
        if d.is_zero() {
            return Mag::zero();
        }
        let (t, inexact) = d.abs().truncate_to(MAG_BITS);
        // discarded bits are below one unit of t's last place, so bumping the
        // kept mantissa restores an upper bound
        let m = t.mantissa().magnitude().to_u64().unwrap() as u128 + u128::from(inexact);
        normalize(m, t.exponent())
    }

    /// Lower bound for `|d|`, rounding the mantissa down.  This deliberately
    /// inverts the type's usual direction; it exists solely to feed
    /// [`Mag::div_up`] a safe divisor.
    pub fn from_dyadic_lower(d: &Dyadic) -> Self {
        if d.is_zero() {
            return Mag::zero();
        }
        let (t, _) = d.abs().truncate_to(MAG_BITS);
        // truncate_to floors the magnitude for nonnegative input
        let m = t.mantissa().magnitude().to_u64().unwrap();
        normalize_down(m, t.exponent())
    }

    /// Exact value of the bound as a dyadic.
    pub fn to_dyadic(&self) -> Dyadic {
        Dyadic::new(BigInt::from(self.man), self.exp)
    }

    pub fn add(&self, rhs: &Mag) -> Self {
        if self.is_zero() {
            return *rhs;
        }
        if rhs.is_zero() {
            return *self;
        }
        let (lo, hi) = if self.exp <= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let diff = (hi.exp - lo.exp) as u64;
        if diff >= 64 {
            // the smaller term is below one ulp of the larger; bump instead
            return normalize(hi.man as u128 + 1, hi.exp);
        }
        let shifted = ceil_shr(lo.man as u128, diff as u32);
        normalize(hi.man as u128 + shifted, hi.exp)
    }

    pub fn mul(&self, rhs: &Mag) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Mag::zero();
        }
        normalize(self.man as u128 * rhs.man as u128, self.exp + rhs.exp)
    }

    /// Upper bound for `self / denom_lower` where `denom_lower` is a lower
    /// bound of the (positive) denominator.
    pub fn div_up(&self, denom_lower: &Mag) -> Self {
        assert!(!denom_lower.is_zero(), "division by an unbounded-below denominator");
        if self.is_zero() {
            return Mag::zero();
        }
        let num = (self.man as u128) << MAG_BITS;
        let den = denom_lower.man as u128;
        let q = num.div_ceil(den);
        normalize(q, self.exp - denom_lower.exp - MAG_BITS as i64)
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return *self;
        }
        Mag {
            man: self.man,
            exp: self.exp + e,
        }
    }

    pub fn max(&self, rhs: &Mag) -> Self {
        if self.cmp(rhs) == Ordering::Less {
            *rhs
        } else {
            *self
        }
    }

    pub fn cmp(&self, rhs: &Mag) -> Ordering {
        if self.is_zero() || rhs.is_zero() {
            return self.man.cmp(&rhs.man);
        }
        match self.exp.cmp(&rhs.exp) {
            Ordering::Equal => self.man.cmp(&rhs.man),
            o => o,
        }
    }

    /// Is the bound strictly below `2^e`?  The mantissa window makes this a
    /// pure exponent test: the value lies in `[2^(exp+31), 2^(exp+32))`.
    pub fn is_below_pow2(&self, e: i64) -> bool {
        self.is_zero() || self.exp + MAG_BITS as i64 <= e
    }

    /// Smallest `e` with the bound `< 2^e`; very negative for zero.
    pub fn upper_exp(&self) -> i64 {
        if self.is_zero() {
            i64::MIN / 2
        } else {
            self.exp + MAG_BITS as i64
        }
    }
}

/// Rounds a `u128` mantissa up into the canonical window.
fn normalize(man: u128, exp: i64) -> Mag {
    if man == 0 {
        return Mag::zero();
    }
    let bits = 128 - man.leading_zeros();
    if bits > MAG_BITS {
        let shift = bits - MAG_BITS;
        let mut m = ceil_shr(man, shift) as u64;
        let mut e = exp + shift as i64;
        if m == 1u64 << MAG_BITS {
            m >>= 1;
            e += 1;
        }
        Mag { man: m, exp: e }
    } else {
        let shift = MAG_BITS - bits;
        Mag {
            man: (man as u64) << shift,
            exp: exp - shift as i64,
        }
    }
}

fn normalize_down(man: u64, exp: i64) -> Mag {
    if man == 0 {
        return Mag::zero();
    }
    let bits = 64 - man.leading_zeros();
    if bits > MAG_BITS {
        let shift = bits - MAG_BITS;
        Mag {
            man: man >> shift,
            exp: exp + shift as i64,
        }
    } else {
        let shift = MAG_BITS - bits;
        Mag {
            man: man << shift,
            exp: exp - shift as i64,
        }
    }
}

fn ceil_shr(v: u128, shift: u32) -> u128 {
    if shift == 0 {
        return v;
    }
    if shift >= 128 {
        return u128::from(v != 0);
    }
    let floor = v >> shift;
    if (floor << shift) == v {
        floor
    } else {
        floor + 1
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "Mag(0)")
        } else {
            write!(f, "Mag({} * 2^{} ~ {:.3e})", self.man, self.exp, self.to_dyadic().to_f64())
        }
    }
}

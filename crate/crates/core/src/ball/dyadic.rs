use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Exact dyadic rational `man * 2^exp` with an arbitrary-precision mantissa.
///
/// Kept normalized: the mantissa is odd (or zero with `exp == 0`), so equality
/// of representations is equality of values.  All arithmetic here is exact;
/// rounding to a working precision happens at the [`Ball`](super::Ball) level
/// where the discarded bits are absorbed into the radius.
#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Dyadic {
                man,
                exp: 0,
            };
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { man, exp }
        } else {
            Dyadic {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            man: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Dyadic::new(v, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// Number of bits in the mantissa (0 for zero).
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Exponent of the leading bit: the value lies in `[2^e, 2^{e+1})` up to
    /// sign.  Meaningless for zero.
    pub fn msb_exp(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.exp + self.man.bits() as i64 - 1
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn add(&self, rhs: &Dyadic) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (lo, hi) = if self.exp <= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = (hi.exp - lo.exp) as u64;
        Dyadic::new((&hi.man << shift) + &lo.man, lo.exp)
    }

    pub fn sub(&self, rhs: &Dyadic) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Dyadic) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            man: &self.man * &rhs.man,
            exp: self.exp + rhs.exp,
        }
    }

    pub fn mul_bigint(&self, rhs: &BigInt) -> Self {
        Dyadic::new(&self.man * rhs, self.exp)
    }

    /// Exact multiplication by `2^e`.
    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + e,
        }
    }

    pub fn cmp_value(&self, rhs: &Dyadic) -> Ordering {
        let d = self.sub(rhs);
        match d.man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    /// Truncates the mantissa toward zero... strictly speaking toward minus
    /// infinity (arithmetic shift), keeping at most `prec` bits.  Returns the
    /// truncated value and whether any nonzero bits were discarded; when they
    /// were, the error is below one unit in the last kept place, i.e. below
    /// `2^result.exp`.
    pub fn truncate_to(&self, prec: u32) -> (Dyadic, bool) {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return (self.clone(), false);
        }
        let shift = bits - prec as u64;
        let kept = &self.man >> shift;
        let exact = (&kept << shift) == self.man;
        (Dyadic::new(kept, self.exp + shift as i64), !exact)
    }

    /// Nearest integer together with the exact remainder `self - nearest`.
    /// Exact half-integers round toward even, which certification rejects
    /// anyway (the distance is then exactly 1/2).
    pub fn round_to_int(&self) -> (BigInt, Dyadic) {
        if self.exp >= 0 {
            return (&self.man << self.exp as u64, Dyadic::zero());
        }
        let shift = (-self.exp) as u64;
        let floor = &self.man >> shift;
        let rem = &self.man - (&floor << shift);
        // rem/2^shift in [0,1); round up when it is > 1/2, to even at 1/2
        let twice: BigInt = &rem << 1u8;
        let half: BigInt = BigInt::one() << shift;
        let up = match twice.cmp(&half) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (&floor % 2) != BigInt::zero(),
        };
        let v = if up { floor + 1 } else { floor };
        let diff = self.sub(&Dyadic::from_bigint(v.clone()));
        (v, diff)
    }

    /// Smallest integer `>= self`.
    pub fn ceil_int(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.man << self.exp as u64;
        }
        let shift = (-self.exp) as u64;
        let floor = &self.man >> shift;
        if (&floor << shift) == self.man {
            floor
        } else {
            floor + 1
        }
    }

    /// Non-rigorous double approximation, for magnitude estimates and display
    /// only; never used in radius bookkeeping.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (top, e) = if bits > 53 {
            let shift = bits - 53;
            (&self.man >> shift, self.exp + shift as i64)
        } else {
            (self.man.clone(), self.exp)
        };
        let t = top.to_string().parse::<f64>().unwrap_or(f64::NAN);
        t * 2f64.powi(e.clamp(-1074, 1024) as i32)
    }

    /// Exact decimal representation.  Every dyadic rational has a finite one.
    pub fn to_decimal(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sign = if self.man.is_negative() { "-" } else { "" };
        let mag = self.man.magnitude();
        if self.exp >= 0 {
            let v: BigUint = mag << self.exp as u64;
            return format!("{sign}{v}");
        }
        let t = (-self.exp) as u64;
        let int: BigUint = mag >> t;
        let frac = mag - (&int << t);
        // frac / 2^t = frac * 5^t / 10^t
        let five = BigUint::from(5u8);
        let digits = (frac * pow_biguint(&five, t)).to_string();
        let mut padded = "0".repeat((t as usize).saturating_sub(digits.len()));
        padded.push_str(&digits);
        let trimmed = padded.trim_end_matches('0');
        if trimmed.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{trimmed}")
        }
    }
}

fn pow_biguint(base: &BigUint, mut e: u64) -> BigUint {
    let mut acc = BigUint::one();
    let mut b = base.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({} * 2^{})", self.man, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal())
    }
}

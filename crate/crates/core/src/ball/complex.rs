use super::sin::two_sin_pi_rational;
use super::Ball;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use std::fmt;

/// Rectangular complex enclosure: independent real and imaginary balls.
#[derive(Clone)]
pub struct ComplexBall {
    re: Ball,
    im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        ComplexBall { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexBall {
            re: Ball::zero(prec),
            im: Ball::zero(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        ComplexBall {
            re: Ball::one(prec),
            im: Ball::zero(prec),
        }
    }

    pub fn from_real(re: Ball) -> Self {
        let prec = re.prec();
        ComplexBall {
            re,
            im: Ball::zero(prec),
        }
    }

    pub fn re(&self) -> &Ball {
        &self.re
    }

    pub fn im(&self) -> &Ball {
        &self.im
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexBall {
            re: self.re.with_prec(prec),
            im: self.im.with_prec(prec),
        }
    }

    pub fn neg(&self) -> Self {
        ComplexBall {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexBall {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn add(&self, rhs: &ComplexBall) -> Self {
        ComplexBall {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }

    pub fn sub(&self, rhs: &ComplexBall) -> Self {
        ComplexBall {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }

    pub fn mul(&self, rhs: &ComplexBall) -> Self {
        let re = self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im));
        let im = self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re));
        ComplexBall { re, im }
    }

    pub fn scale(&self, k: &Ball) -> Self {
        ComplexBall {
            re: self.re.mul(k),
            im: self.im.mul(k),
        }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        ComplexBall {
            re: self.re.mul_i64(k),
            im: self.im.mul_i64(k),
        }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        ComplexBall {
            re: self.re.mul_bigint(k),
            im: self.im.mul_bigint(k),
        }
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        ComplexBall {
            re: self.re.mul_pow2(e),
            im: self.im.mul_pow2(e),
        }
    }

    pub fn div_bigint(&self, k: &BigInt) -> Result<Self> {
        Ok(ComplexBall {
            re: self.re.div_bigint(k)?,
            im: self.im.div_bigint(k)?,
        })
    }

    /// `|z|²` as a real ball.
    pub fn abs_sq(&self) -> Ball {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// Both components contain zero, i.e. the enclosure does not exclude 0.
    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Reciprocal via `1/z = conj(z) / |z|²`; fails when the enclosure of
    /// `|z|²` does not exclude zero.
    pub fn inv(&self) -> Result<ComplexBall> {
        let dinv = self.abs_sq().inv()?;
        Ok(ComplexBall {
            re: self.re.mul(&dinv),
            im: self.im.neg().mul(&dinv),
        })
    }

    pub fn div(&self, rhs: &ComplexBall) -> Result<ComplexBall> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow_i64(&self, n: i64) -> Result<ComplexBall> {
        if n == 0 {
            return Ok(ComplexBall::one(self.prec()));
        }
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc: Option<ComplexBall> = None;
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

    /// `e^z = e^Re(z) (cos Im(z) + i sin Im(z))`.
    pub fn exp(&self) -> ComplexBall {
        let r = self.re.exp();
        let (s, c) = self.im.sin_cos();
        ComplexBall {
            re: r.mul(&c),
            im: r.mul(&s),
        }
    }

    pub fn approx_string(&self) -> String {
        format!("({}) + ({})i", self.re.approx_string(), self.im.approx_string())
    }
}

impl fmt::Debug for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexBall({})", self.approx_string())
    }
}

/// `exp(2πi a / den)` on the unit circle.
///
/// Both components go through the reduced rational sine, so the values at
/// multiples of a quarter turn (and the ±1/12 turns) are exact with zero
/// radius — the phases that later feed sign bookkeeping lose nothing.
pub fn exp_2pi_i_rational(a: i64, den: i64, prec: u32) -> Result<ComplexBall> {
    if den == 0 {
        return Err(Error::ZeroDenominator);
    }
    let (a, den) = if den < 0 { (-a, -den) } else { (a, den) };
    if a.checked_mul(4).is_none() || den.checked_mul(2).is_none() {
        return Err(Error::ParameterTooLarge(format!(
            "phase {a}/{den} exceeds the supported range"
        )));
    }
    // cos θ = sin(θ + π/2): with θ = 2πa/den this is π(4a + den)/(2 den)
    let re = two_sin_pi_rational(4 * a + den, 2 * den, prec)?.mul_pow2(-1);
    let im = two_sin_pi_rational(2 * a, den, prec)?.mul_pow2(-1);
    Ok(ComplexBall { re, im })
}

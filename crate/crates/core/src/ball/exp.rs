use super::sin::{cos_taylor, sin_taylor};
use super::Ball;
use num_bigint::BigInt;

impl Ball {
    /// Rigorous enclosure of `e^x`.
    ///
    /// The argument is halved until it fits in `[-1/2, 1/2]`, the series is
    /// summed there with a Lagrange tail bound, and the result is squared
    /// back up.  Working precision grows with the number of halvings so the
    /// squarings do not eat the accuracy.
    pub fn exp(&self) -> Ball {
        let prec = self.prec();
        let j = (self.abs_upper().upper_exp() + 1).max(0) as u32;
        let wp = prec + 16 + 2 * j;
        let t = self.with_prec(wp).mul_pow2(-(j as i64));
        let mut sum = exp_taylor_small(&t);
        for _ in 0..j {
            sum = sum.mul(&sum);
        }
        sum.with_prec(prec)
    }

    /// Rigorous enclosures of `(sin x, cos x)` by the same
    /// halve-series-reconstruct scheme, using `sin 2t = 2 sin t cos t` and
    /// `cos 2t = 1 - 2 sin² t`.
    pub fn sin_cos(&self) -> (Ball, Ball) {
        let prec = self.prec();
        let j = (self.abs_upper().upper_exp() + 1).max(0) as u32;
        let wp = prec + 16 + 2 * j;
        let t = self.with_prec(wp).mul_pow2(-(j as i64));
        let mut s = sin_taylor(&t).expect("integer factorials are nonzero");
        let mut c = cos_taylor(&t).expect("integer factorials are nonzero");
        for _ in 0..j {
            let s2 = s.mul(&c).mul_pow2(1);
            let c2 = Ball::one(wp).sub(&s.mul(&s).mul_pow2(1));
            s = s2;
            c = c2;
        }
        (s.with_prec(prec), c.with_prec(prec))
    }
}

/// `e^t` for `|t| <= 1/2`: plain series, tail below twice the first omitted
/// term since `e^{1/2} < 2`.
fn exp_taylor_small(t: &Ball) -> Ball {
    let wp = t.prec();
    let tail_exp = -(wp as i64 + 8);
    let mut term = t.clone();
    let mut sum = Ball::one(wp).add(t);
    let mut n: u64 = 1;
    loop {
        n += 1;
        term = term
            .mul(t)
            .div_bigint(&BigInt::from(n))
            .expect("integer factorials are nonzero");
        let bound = term.abs_upper();
        if bound.is_below_pow2(tail_exp) {
            return sum.widen(&bound.mul_pow2(1));
        }
        sum = sum.add(&term);
    }
}

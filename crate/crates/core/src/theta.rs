//! The Jacobi theta series `θ₀,₀(z|τ) = Σ_{n∈ℤ} exp(πin²τ + 2πinz)` and its
//! odd scaled translate, with rigorously bounded truncation: the series is
//! cut at an index whose geometric tail bound is folded into the radius of
//! the returned ball.  On top of the two series sit the quadratic addition
//! identity (as a residual that must contain zero) and the rank-one duality
//! matrix, recovered by sampling the identity at generic points and solving
//! the resulting linear system in ball arithmetic.
//!
//! Series lengths here are tiny (a few dozen terms even at thousands of
//! bits), so summation is sequential; the parallel machinery is reserved for
//! the combinatorial sums.
//!
//! Moduli with `Im τ < 1/10` are rejected rather than transformed into the
//! fundamental domain — the module deliberately contains no modular-group
//! machinery, so extremely thin moduli would need astronomically many terms.

use crate::ball::{pi, Ball, ComplexBall, Dyadic, Mag};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;

/// A modulus in the upper half-plane together with an argument.  Validation
/// happens at evaluation time, since the fields are plain balls.
#[derive(Clone, Debug)]
pub struct ModulusPoint {
    pub tau: ComplexBall,
    pub z: ComplexBall,
}

impl ModulusPoint {
    pub fn new(tau: ComplexBall, z: ComplexBall) -> Self {
        ModulusPoint { tau, z }
    }
}

/// A theta evaluation: the enclosing ball, where the series was cut, and the
/// tail bound that was added to the radius.
#[derive(Clone, Debug)]
pub struct ThetaValue {
    pub value: ComplexBall,
    pub truncation_n: u32,
    pub tail_bound: Mag,
}

fn validate_tau(tau: &ComplexBall) -> Result<()> {
    let lo = tau.im().mid().sub(&tau.im().rad().to_dyadic());
    if lo.is_zero() || lo.is_negative() {
        return Err(Error::NotInUpperHalfPlane);
    }
    if lo.mul(&Dyadic::from_i64(10)).cmp_value(&Dyadic::one()) == Ordering::Less {
        return Err(Error::ImTauTooSmall);
    }
    Ok(())
}

/// `i·v`.
fn mul_i(v: &ComplexBall) -> ComplexBall {
    ComplexBall::new(v.im().neg(), v.re().clone())
}

/// Bound for `4·exp(b(N+1) - a(N+1)²)` as a power of two, using
/// `e^y ≤ 2^⌈y⌉` for `y ≤ 0`.
fn tail_for(a_lo: &Dyadic, b_up: &Dyadic, n: u32) -> Mag {
    let np1 = Dyadic::from_i64(n as i64 + 1);
    let y = b_up.mul(&np1).sub(&a_lo.mul(&np1).mul(&np1));
    let e = y.ceil_int().to_i64().unwrap_or(i64::MIN / 4).min(1 << 40);
    Mag::pow2(2 + e)
}

/// Smallest cut index N such that (i) successive term magnitudes shrink at
/// least geometrically with ratio ≤ e⁻¹ and (ii) the summed two-sided tail
/// `Σ_{|n|>N}` is below `2^{-(prec+9)}`.  `a_lo` is an exact lower bound for
/// `π·Im τ`, `b_up` an exact upper bound for `2π·|Im z|`.
fn truncation_for(a_lo: &Dyadic, b_up: &Dyadic, prec: u32) -> Result<u32> {
    if a_lo.is_zero() || a_lo.is_negative() {
        return Err(Error::ImTauTooSmall);
    }
    let minus_one = Dyadic::from_i64(-1);
    let mut n: u32 = 1;
    loop {
        // ratio between terms n+1 and n is exp(b - a(2n+1)) for n > N
        let ratio = b_up.sub(&a_lo.mul(&Dyadic::from_i64(2 * n as i64 + 3)));
        let ratio_ok = ratio.cmp_value(&minus_one) != Ordering::Greater;
        let np1 = Dyadic::from_i64(n as i64 + 1);
        let y = b_up.mul(&np1).sub(&a_lo.mul(&np1).mul(&np1));
        if ratio_ok && y.ceil_int() <= BigInt::from(-(prec as i64 + 11)) {
            return Ok(n);
        }
        n += 1;
        if n > 1 << 24 {
            return Err(Error::ParameterTooLarge(
                "theta series truncation index exceeds 2^24".into(),
            ));
        }
    }
}

/// `θ₀,₀(z|τ)` with the truncation tail folded into the radius.
pub fn theta00(p: &ModulusPoint, prec: u32) -> Result<ThetaValue> {
    theta00_impl(p, prec, None)
}

/// Same series cut at `max(auto, force_n)` — lets tests verify that a longer
/// summation lands inside the shorter one's ball.
pub(crate) fn theta00_impl(
    p: &ModulusPoint,
    prec: u32,
    force_n: Option<u32>,
) -> Result<ThetaValue> {
    validate_tau(&p.tau)?;
    let wp = prec.max(2) + 16;

    // exact one-sided bounds for the tail parameters, at scouting precision
    let pi_lo = pi(64);
    let a_ball = pi_lo.mul(p.tau.im());
    let a_lo = a_ball.mid().sub(&a_ball.rad().to_dyadic());
    let b_ball = pi_lo.mul(&p.z.im().abs()).mul_pow2(1);
    let b_up = b_ball.mid().add(&b_ball.rad().to_dyadic());
    let auto_n = truncation_for(&a_lo, &b_up, prec)?;
    let trunc_n = force_n.unwrap_or(auto_n).max(auto_n);
    let tail = tail_for(&a_lo, &b_up, trunc_n);

    let pib = pi(wp);
    let q = mul_i(&p.tau.scale(&pib)).exp();
    let two_pi_z = p.z.scale(&pib).mul_pow2(1);
    let w = mul_i(&two_pi_z).exp();
    let winv = mul_i(&two_pi_z.neg()).exp();

    // q^{(n+1)²} = q^{n²} · q^{2n+1}, so the whole sum needs one short
    // multiplication ladder and no powering
    let qsq = q.mul(&q);
    let mut qn2 = q.clone();
    let mut qstep = q.mul(&qsq);
    let mut wn = w.clone();
    let mut winvn = winv.clone();
    let mut sum = ComplexBall::one(wp);
    for n in 1..=trunc_n {
        sum = sum.add(&qn2.mul(&wn.add(&winvn)));
        if n < trunc_n {
            qn2 = qn2.mul(&qstep);
            qstep = qstep.mul(&qsq);
            wn = wn.mul(&w);
            winvn = winvn.mul(&winv);
        }
    }
    let value =
        ComplexBall::new(sum.re().widen(&tail), sum.im().widen(&tail)).with_prec(prec);
    Ok(ThetaValue {
        value,
        truncation_n: trunc_n,
        tail_bound: tail,
    })
}

/// `θ_{½,½}(z|τ) = exp(πiτ/4 + πi(z+½)) · θ₀,₀(z + (τ+1)/2 | τ)` — the odd
/// translate, evaluated exactly by this formula.
pub fn theta_half_half(p: &ModulusPoint, prec: u32) -> Result<ThetaValue> {
    validate_tau(&p.tau)?;
    let wp = prec.max(2) + 16;
    let half = ComplexBall::from_real(Ball::exact(Dyadic::new(BigInt::from(1), -1), wp));
    let shifted = ModulusPoint {
        tau: p.tau.clone(),
        z: p.z.add(&p.tau.add(&ComplexBall::one(wp)).mul_pow2(-1)),
    };
    let inner = theta00_impl(&shifted, wp, None)?;
    let pib = pi(wp);
    let u = p.tau.mul_pow2(-2).add(&p.z).add(&half);
    let pref = mul_i(&u.scale(&pib)).exp();
    let prod = pref.mul(&inner.value);
    // report the truncation contribution at its post-scaling size
    let pref_mag = pref.re().abs_upper().add(&pref.im().abs_upper());
    let tail = inner.tail_bound.mul(&pref_mag);
    let value =
        ComplexBall::new(prod.re().widen(&tail), prod.im().widen(&tail)).with_prec(prec);
    Ok(ThetaValue {
        value,
        truncation_n: inner.truncation_n,
        tail_bound: tail,
    })
}

/// `θ(z+w)θ(w−z)θ(0)² − θ(z)²θ(w)² − θ_{½,½}(z)²θ_{½,½}(w)²`: the quadratic
/// addition identity as a residual ball, which must contain zero.
pub fn addition_residual(
    tau: &ComplexBall,
    z: &ComplexBall,
    w: &ComplexBall,
    prec: u32,
) -> Result<ComplexBall> {
    let wp = prec.max(2) + 16;
    let at = |arg: ComplexBall| -> Result<ComplexBall> {
        Ok(theta00(&ModulusPoint::new(tau.clone(), arg), wp)?.value)
    };
    let t0 = at(ComplexBall::zero(wp))?;
    let tz = at(z.clone())?;
    let tw = at(w.clone())?;
    let tzw = at(z.add(w))?;
    let twz = at(w.sub(z))?;
    let hz = theta_half_half(&ModulusPoint::new(tau.clone(), z.clone()), wp)?.value;
    let hw = theta_half_half(&ModulusPoint::new(tau.clone(), w.clone()), wp)?.value;
    let lhs = tzw.mul(&twz).mul(&t0.mul(&t0));
    let rhs = tz.mul(&tz).mul(&tw.mul(&tw)).add(&hz.mul(&hz).mul(&hw.mul(&hw)));
    Ok(lhs.sub(&rhs).with_prec(prec))
}

/// Coefficient matrix of the section `θ(z+w)θ(w−z)` in the product basis
/// `{θ₀,₀², θ_{½,½}²} ⊗ {θ₀,₀², θ_{½,½}²}`, recovered by sampling at four
/// generic `(z, w)` pairs and solving the 4×4 system in ball arithmetic.
/// For this form the matrix is `1/θ₀,₀(0)²` times the identity:
/// off-diagonal entries are balls containing zero and the diagonal entries
/// agree.
///
/// Sample points come from a fixed pseudo-random sequence seeded by τ's bit
/// pattern, so a given modulus always sees the same points; if a pivot ball
/// straddles zero the points are redrawn from the same stream, and eight
/// failed draws give up.
pub fn duality_matrix_rk1(tau: &ComplexBall, prec: u32) -> Result<[[ComplexBall; 2]; 2]> {
    validate_tau(tau)?;
    const ATTEMPTS: u32 = 8;
    let wp = prec.max(2) + 32;
    let mut rng = ChaCha8Rng::from_seed(seed_from_tau(tau));
    for _ in 0..ATTEMPTS {
        let mut rows: Vec<[ComplexBall; 4]> = Vec::with_capacity(4);
        let mut rhs: Vec<ComplexBall> = Vec::with_capacity(4);
        for _ in 0..4 {
            let zpt = sample_point(&mut rng, wp);
            let wpt = sample_point(&mut rng, wp);
            let tz = theta00(&ModulusPoint::new(tau.clone(), zpt.clone()), wp)?.value;
            let tw = theta00(&ModulusPoint::new(tau.clone(), wpt.clone()), wp)?.value;
            let hz = theta_half_half(&ModulusPoint::new(tau.clone(), zpt.clone()), wp)?.value;
            let hw = theta_half_half(&ModulusPoint::new(tau.clone(), wpt.clone()), wp)?.value;
            let tz2 = tz.mul(&tz);
            let tw2 = tw.mul(&tw);
            let hz2 = hz.mul(&hz);
            let hw2 = hw.mul(&hw);
            let tzw = theta00(&ModulusPoint::new(tau.clone(), zpt.add(&wpt)), wp)?.value;
            let twz = theta00(&ModulusPoint::new(tau.clone(), wpt.sub(&zpt)), wp)?.value;
            rows.push([tz2.mul(&tw2), tz2.mul(&hw2), hz2.mul(&tw2), hz2.mul(&hw2)]);
            rhs.push(tzw.mul(&twz));
        }
        if let Some(c) = solve4(&mut rows, &mut rhs) {
            return Ok([
                [c[0].with_prec(prec), c[1].with_prec(prec)],
                [c[2].with_prec(prec), c[3].with_prec(prec)],
            ]);
        }
    }
    Err(Error::SingularSystem { attempts: ATTEMPTS })
}

/// Gaussian elimination with partial pivoting on midpoint magnitude; `None`
/// when a pivot ball straddles zero (system not provably invertible).
fn solve4(rows: &mut [[ComplexBall; 4]], rhs: &mut [ComplexBall]) -> Option<[ComplexBall; 4]> {
    let n = rows.len();
    for col in 0..n {
        let mut best = col;
        for r in col + 1..n {
            if rows[r][col]
                .abs_sq()
                .mid()
                .cmp_value(rows[best][col].abs_sq().mid())
                == Ordering::Greater
            {
                best = r;
            }
        }
        rows.swap(col, best);
        rhs.swap(col, best);
        let inv = rows[col][col].inv().ok()?;
        let pivot_row = rows[col].clone();
        let pivot_rhs = rhs[col].clone();
        for r in col + 1..n {
            let f = rows[r][col].mul(&inv);
            for c in col..n {
                let updated = rows[r][c].sub(&f.mul(&pivot_row[c]));
                rows[r][c] = updated;
            }
            rhs[r] = rhs[r].sub(&f.mul(&pivot_rhs));
        }
    }
    let wp = rhs[0].prec();
    let mut x = vec![ComplexBall::zero(wp); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for c in row + 1..n {
            acc = acc.sub(&rows[row][c].mul(&x[c]));
        }
        x[row] = acc.mul(&rows[row][row].inv().ok()?);
    }
    Some([x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()])
}

/// Deterministic 32-byte seed from the exact bit pattern of τ's midpoint.
fn seed_from_tau(tau: &ComplexBall) -> [u8; 32] {
    let mut bytes: Vec<u8> = Vec::new();
    for part in [tau.re(), tau.im()] {
        bytes.extend_from_slice(&part.mid().mantissa().to_signed_bytes_le());
        bytes.extend_from_slice(&part.mid().exponent().to_le_bytes());
    }
    let mut seed = [0u8; 32];
    seed[0] = bytes.len() as u8;
    for (i, b) in bytes.iter().enumerate() {
        let s = &mut seed[(i + 1) % 32];
        *s = s.wrapping_mul(31).wrapping_add(*b);
    }
    seed
}

/// An exact dyadic point with both coordinates in `[-1/2, 1/2)` on a
/// `2^{-16}` grid.
fn sample_point(rng: &mut ChaCha8Rng, prec: u32) -> ComplexBall {
    let coord = |rng: &mut ChaCha8Rng| {
        let v = (rng.next_u32() & 0xFFFF) as i64 - 0x8000;
        Ball::exact(Dyadic::new(BigInt::from(v), -16), prec)
    };
    let re = coord(rng);
    let im = coord(rng);
    ComplexBall::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA_I: &str = "1.08643481121330801457531612151";
    const THETA_2I: &str = "1.00373488548773909104767959507";
    const INV_SQ_2I: &str = "0.9925718697047319315461515";

    fn exact(num: i64, exp: i64, prec: u32) -> Ball {
        Ball::exact(Dyadic::new(BigInt::from(num), exp), prec)
    }

    fn cpx(re_num: i64, re_exp: i64, im_num: i64, im_exp: i64, prec: u32) -> ComplexBall {
        ComplexBall::new(exact(re_num, re_exp, prec), exact(im_num, im_exp, prec))
    }

    fn tau_i(prec: u32) -> ComplexBall {
        cpx(0, 0, 1, 0, prec)
    }

    fn point(tau: &ComplexBall, z: ComplexBall) -> ModulusPoint {
        ModulusPoint::new(tau.clone(), z)
    }

    /// Reference ball around a truncated decimal constant.
    fn reference(digits: &str, slack_pow2: i64) -> Ball {
        Ball::from_decimal_str(digits, 256)
            .unwrap()
            .widen(&Mag::pow2(slack_pow2))
    }

    /// Independent oracle: same series summed term by term, each term through
    /// its own complex exponential — no shared ladder, no tail machinery.
    /// The dropped tail for every point used here is far below the slack.
    fn direct_theta00(
        tau: &ComplexBall,
        z: &ComplexBall,
        terms: i64,
        prec: u32,
    ) -> ComplexBall {
        let pib = pi(prec);
        let mut sum = ComplexBall::one(prec);
        for n in 1..=terms {
            for s in [n, -n] {
                let arg = tau.mul_i64(n * n).add(&z.mul_i64(2 * s));
                sum = sum.add(&mul_i(&arg.scale(&pib)).exp());
            }
        }
        let slack = Mag::pow2(-(prec as i64) + 8);
        ComplexBall::new(sum.re().widen(&slack), sum.im().widen(&slack))
    }

    /// Independent oracle for the odd translate via its half-integer series
    /// `Σ_n exp(πi(n+½)²τ + 2πi(n+½)(z+½))`, bypassing the prefactor route.
    fn direct_theta_half(
        tau: &ComplexBall,
        z: &ComplexBall,
        terms: i64,
        prec: u32,
    ) -> ComplexBall {
        let pib = pi(prec);
        let half = ComplexBall::from_real(Ball::exact(Dyadic::new(BigInt::from(1), -1), prec));
        let zh = z.add(&half);
        let mut sum = ComplexBall::zero(prec);
        for n in -terms..=terms {
            let c = 2 * n + 1;
            let arg = tau.mul_i64(c * c).mul_pow2(-2).add(&zh.mul_i64(c));
            sum = sum.add(&mul_i(&arg.scale(&pib)).exp());
        }
        let slack = Mag::pow2(-(prec as i64) + 8);
        ComplexBall::new(sum.re().widen(&slack), sum.im().widen(&slack))
    }

    fn assert_overlap(a: &ComplexBall, b: &ComplexBall, what: &str) {
        assert!(a.re().overlaps(b.re()), "{what}: real parts disjoint");
        assert!(a.im().overlaps(b.im()), "{what}: imaginary parts disjoint");
    }

    #[test]
    fn matches_direct_summation() {
        let prec = 192;
        let cases = [
            (tau_i(prec), cpx(0, 0, 0, 0, prec)),
            (cpx(0, 0, 2, 0, prec), cpx(0, 0, 0, 0, prec)),
            (tau_i(prec), cpx(19, -6, 13, -6, prec)),
            (cpx(1, -2, 1, 0, prec), cpx(-3, -3, 5, -4, prec)),
            (cpx(1, 0, 2, 0, prec), cpx(1, -1, 0, 0, prec)),
        ];
        for (tau, z) in cases {
            let v = theta00(&point(&tau, z.clone()), prec).unwrap();
            let oracle = direct_theta00(&tau, &z, 24, 288);
            assert_overlap(&v.value, &oracle, "theta00 vs direct sum");
            assert!(v.value.re().rad().is_below_pow2(-(prec as i64) + 16));
        }
    }

    #[test]
    fn frozen_constants() {
        let prec = 160;
        let vi = theta00(&point(&tau_i(prec), cpx(0, 0, 0, 0, prec)), prec).unwrap();
        assert!(vi.value.re().overlaps(&reference(THETA_I, -93)));
        assert!(vi.value.im().contains_i64(0));

        let tau2 = cpx(0, 0, 2, 0, prec);
        let v2 = theta00(&point(&tau2, cpx(0, 0, 0, 0, prec)), prec).unwrap();
        assert!(v2.value.re().overlaps(&reference(THETA_2I, -93)));
        assert!(v2.value.im().contains_i64(0));
    }

    #[test]
    fn tail_bound_is_small_and_inside_radius() {
        let prec = 128;
        let v = theta00(&point(&tau_i(prec), cpx(3, -3, 0, 0, prec)), prec).unwrap();
        assert!(v.tail_bound.is_below_pow2(-(prec as i64) - 8));
        let rad = v.value.re().rad().to_dyadic();
        assert!(v.tail_bound.to_dyadic().cmp_value(&rad) != Ordering::Greater);
    }

    #[test]
    fn longer_truncation_lands_inside() {
        // ten more terms refine the estimate; if the tail bound were unsound
        // the refined value would escape the original radius.  (The refined
        // ball itself carries fresh rounding from the extra terms, so the
        // containment claim is about its value, not its radius.)
        let prec = 128;
        let p = point(&tau_i(prec), cpx(3, -3, 1, -4, prec));
        let v = theta00_impl(&p, prec, None).unwrap();
        let longer = theta00_impl(&p, prec, Some(v.truncation_n + 10)).unwrap();
        assert!(longer.truncation_n == v.truncation_n + 10);
        assert!(v.value.re().contains_dyadic(longer.value.re().mid()));
        assert!(v.value.im().contains_dyadic(longer.value.im().mid()));
        assert!(v.value.re().overlaps(longer.value.re()));
        assert!(v.value.im().overlaps(longer.value.im()));
    }

    #[test]
    fn period_one_in_z() {
        let prec = 160;
        let tau = tau_i(prec);
        let a = theta00(&point(&tau, cpx(1, 0, 0, 0, prec)), prec).unwrap();
        let b = theta00(&point(&tau, cpx(0, 0, 0, 0, prec)), prec).unwrap();
        assert_overlap(&a.value, &b.value, "z=1 vs z=0");

        let z = cpx(7, -4, -5, -5, prec);
        let zp1 = z.add(&ComplexBall::one(prec));
        let c = theta00(&point(&tau, z), prec).unwrap();
        let d = theta00(&point(&tau, zp1), prec).unwrap();
        assert_overlap(&c.value, &d.value, "z vs z+1");
    }

    #[test]
    fn evenness() {
        let prec = 160;
        let tau = cpx(1, -2, 1, 0, prec);
        let z = cpx(-11, -5, 9, -5, prec);
        let a = theta00(&point(&tau, z.clone()), prec).unwrap();
        let b = theta00(&point(&tau, z.neg()), prec).unwrap();
        assert_overlap(&a.value, &b.value, "θ(-z) vs θ(z)");
    }

    #[test]
    fn quasi_periodicity_in_tau() {
        // θ(z+τ) = exp(-πiτ - 2πiz)·θ(z)
        let prec = 160;
        for (tau, z) in [
            (tau_i(prec), cpx(5, -4, -3, -5, prec)),
            (cpx(1, -2, 1, 0, prec), cpx(5, -4, -3, -5, prec)),
            (cpx(-1, -1, 3, -1, prec), cpx(1, -3, 1, -3, prec)),
        ] {
            let lhs = theta00(&point(&tau, z.add(&tau)), prec).unwrap().value;
            let pib = pi(prec + 16);
            let m = tau.add(&z.mul_pow2(1)).scale(&pib).neg();
            let factor = mul_i(&m).exp();
            let rhs = factor.mul(&theta00(&point(&tau, z.clone()), prec).unwrap().value);
            let resid = lhs.sub(&rhs);
            assert!(resid.contains_zero(), "residual {}", resid.approx_string());
        }
    }

    #[test]
    fn odd_translate_vanishes_at_origin() {
        let prec = 160;
        let v = theta_half_half(&point(&tau_i(prec), cpx(0, 0, 0, 0, prec)), prec).unwrap();
        assert!(v.value.contains_zero());
        assert!(v.value.re().abs_upper().is_below_pow2(-120));
        assert!(v.value.im().abs_upper().is_below_pow2(-120));
    }

    #[test]
    fn odd_translate_nonzero_away_from_origin() {
        let prec = 160;
        let v = theta_half_half(&point(&tau_i(prec), cpx(1, -1, 0, 0, prec)), prec).unwrap();
        assert!(!v.value.contains_zero());
    }

    #[test]
    fn odd_translate_matches_half_integer_series() {
        let prec = 160;
        for (tau, z) in [
            (tau_i(prec), cpx(19, -6, 5, -6, prec)),
            (cpx(1, 0, 2, 0, prec), cpx(-7, -5, 3, -4, prec)),
            (cpx(1, -3, 1, 0, prec), cpx(0, 0, 0, 0, prec)),
        ] {
            let v = theta_half_half(&point(&tau, z.clone()), prec).unwrap();
            let oracle = direct_theta_half(&tau, &z, 24, 256);
            assert_overlap(&v.value, &oracle, "odd translate vs half-integer series");
        }
    }

    #[test]
    fn addition_residual_pinned_examples() {
        let prec = 128;
        let zero = cpx(0, 0, 0, 0, prec);
        let r0 = addition_residual(&tau_i(prec), &zero, &zero, prec).unwrap();
        assert!(r0.contains_zero());

        let z = ComplexBall::from_real(Ball::from_decimal_str("0.3", prec).unwrap());
        let w = ComplexBall::from_real(Ball::from_decimal_str("0.7", prec).unwrap());
        let r1 = addition_residual(&tau_i(prec), &z, &w, prec).unwrap();
        assert!(r1.contains_zero(), "residual {}", r1.approx_string());
        assert!(r1.re().rad().is_below_pow2(-64));

        let tau = cpx(1, 0, 2, 0, prec);
        let z2 = ComplexBall::new(
            Ball::from_decimal_str("0.1", prec).unwrap(),
            Ball::from_decimal_str("0.2", prec).unwrap(),
        );
        let w2 = ComplexBall::new(
            Ball::from_decimal_str("-0.4", prec).unwrap(),
            Ball::from_decimal_str("0.1", prec).unwrap(),
        );
        let r2 = addition_residual(&tau, &z2, &w2, prec).unwrap();
        assert!(r2.contains_zero(), "residual {}", r2.approx_string());
    }

    #[test]
    fn addition_residual_random_points() {
        let prec = 128;
        let mut rng = ChaCha8Rng::from_seed([7u8; 32]);
        for _ in 0..8 {
            let re = ((rng.next_u32() & 0x7FFF) as i64) - 0x4000;
            let tau = ComplexBall::new(
                Ball::exact(Dyadic::new(BigInt::from(re), -15), prec),
                Ball::exact(
                    Dyadic::new(BigInt::from(0x4000 + (rng.next_u32() & 0x7FFF) as i64), -15),
                    prec,
                ),
            );
            let z = sample_point(&mut rng, prec);
            let w = sample_point(&mut rng, prec);
            let r = addition_residual(&tau, &z, &w, prec).unwrap();
            assert!(
                r.contains_zero(),
                "residual {} at tau {}",
                r.approx_string(),
                tau.approx_string()
            );
        }
    }

    #[test]
    fn duality_matrix_is_diagonal() {
        let prec = 128;
        let m = duality_matrix_rk1(&tau_i(prec), prec).unwrap();
        assert!(m[0][1].contains_zero());
        assert!(m[1][0].contains_zero());
        for od in [&m[0][1], &m[1][0]] {
            assert!(od.re().rad().is_below_pow2(-67));
            assert!(od.im().rad().is_below_pow2(-67));
        }
        assert_overlap(&m[0][0], &m[1][1], "diagonal entries");

        // the common diagonal value is 1/θ₀,₀(0)²
        let t0 = theta00(&point(&tau_i(192), cpx(0, 0, 0, 0, 192)), 192)
            .unwrap()
            .value;
        let expect = t0.mul(&t0).inv().unwrap();
        assert_overlap(&m[0][0], &expect, "diagonal vs 1/θ(0)²");
    }

    #[test]
    fn duality_matrix_at_two_i_matches_reference() {
        let prec = 128;
        let tau = cpx(0, 0, 2, 0, prec);
        let m = duality_matrix_rk1(&tau, prec).unwrap();
        assert!(m[0][1].contains_zero() && m[1][0].contains_zero());
        assert!(m[0][0].re().overlaps(&reference(INV_SQ_2I, -80)));
        assert!(m[0][0].im().contains_i64(0));
    }

    #[test]
    fn duality_matrix_reproduces_addition_identity() {
        let prec = 128;
        let wp = prec + 16;
        let tau = cpx(0, 0, 2, 0, wp);
        let m = duality_matrix_rk1(&tau, wp).unwrap();
        let z = cpx(3, -4, 1, -3, wp);
        let w = cpx(-5, -5, 7, -6, wp);
        let tz = theta00(&point(&tau, z.clone()), wp).unwrap().value;
        let tw = theta00(&point(&tau, w.clone()), wp).unwrap().value;
        let hz = theta_half_half(&point(&tau, z.clone()), wp).unwrap().value;
        let hw = theta_half_half(&point(&tau, w.clone()), wp).unwrap().value;
        let tzw = theta00(&point(&tau, z.add(&w)), wp).unwrap().value;
        let twz = theta00(&point(&tau, w.sub(&z)), wp).unwrap().value;
        let tz2 = tz.mul(&tz);
        let tw2 = tw.mul(&tw);
        let hz2 = hz.mul(&hz);
        let hw2 = hw.mul(&hw);
        let combo = m[0][0]
            .mul(&tz2.mul(&tw2))
            .add(&m[0][1].mul(&tz2.mul(&hw2)))
            .add(&m[1][0].mul(&hz2.mul(&tw2)))
            .add(&m[1][1].mul(&hz2.mul(&hw2)));
        let resid = tzw.mul(&twz).sub(&combo);
        assert!(resid.contains_zero(), "residual {}", resid.approx_string());
    }

    #[test]
    fn rejects_bad_moduli() {
        let prec = 64;
        let lower = cpx(0, 0, -1, 0, prec);
        assert!(matches!(
            theta00(&point(&lower, cpx(0, 0, 0, 0, prec)), prec),
            Err(Error::NotInUpperHalfPlane)
        ));
        let thin = cpx(0, 0, 1, -4, prec);
        assert!(matches!(
            theta00(&point(&thin, cpx(0, 0, 0, 0, prec)), prec),
            Err(Error::ImTauTooSmall)
        ));
        assert!(matches!(
            duality_matrix_rk1(&lower, prec),
            Err(Error::NotInUpperHalfPlane)
        ));
        assert!(matches!(
            theta_half_half(&point(&thin, cpx(0, 0, 0, 0, prec)), prec),
            Err(Error::ImTauTooSmall)
        ));
    }
}

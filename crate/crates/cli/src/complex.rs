use verlinde_core::{Ball, ComplexBall};

/// Parses a complex literal like `1+2i`, `-0.5i`, `i`, `3e-2`, or `1.5-i`.
/// Components are decimal (optionally scientific); the result is the tightest
/// ball at `prec` bits around the exact decimal value.
pub fn parse_complex(s: &str, prec: u32) -> Result<ComplexBall, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = |lit: &str| format!("cannot parse '{lit}' in complex literal '{s}'");

    let (re_part, im_part) = match s.strip_suffix(['i', 'I']) {
        None => (s.as_str(), None),
        Some(body) => match split_at_sign(body) {
            Some(i) => (&body[..i], Some(&body[i..])),
            None => ("", Some(body)),
        },
    };

    let re = if re_part.is_empty() {
        Ball::zero(prec)
    } else {
        Ball::from_decimal_str(re_part, prec).map_err(|_| bad(re_part))?
    };
    let im = match im_part {
        None => Ball::zero(prec),
        Some("") | Some("+") => Ball::one(prec),
        Some("-") => Ball::one(prec).neg(),
        Some(lit) => Ball::from_decimal_str(lit, prec).map_err(|_| bad(lit))?,
    };
    Ok(ComplexBall::new(re, im))
}

/// Index of the `+`/`-` separating real from imaginary part, skipping a
/// leading sign and exponent signs (`1e-3+2i` splits at the second `-`... at
/// the `+`).
fn split_at_sign(body: &str) -> Option<usize> {
    let bytes = body.as_bytes();
    for i in (1..bytes.len()).rev() {
        let c = bytes[i];
        if c == b'+' || c == b'-' {
            let prev = bytes[i - 1];
            if prev != b'e' && prev != b'E' {
                return Some(i);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use verlinde_core::Dyadic;

    fn dy(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    #[test]
    fn parses_common_forms() {
        let p = 64;
        for (lit, re, im) in [
            ("i", dy(0, 0), dy(1, 0)),
            ("-i", dy(0, 0), dy(-1, 0)),
            ("2i", dy(0, 0), dy(2, 0)),
            ("1+2i", dy(1, 0), dy(2, 0)),
            ("1.5-0.25i", dy(3, -1), dy(-1, -2)),
            ("-3", dy(-3, 0), dy(0, 0)),
            ("0.5", dy(1, -1), dy(0, 0)),
            ("1e1+2e0i", dy(10, 0), dy(2, 0)),
            ("1e-1i", dy(0, 0), dy(0, 0)), // inexact; checked below by containment
        ] {
            let c = parse_complex(lit, p).unwrap();
            if lit == "1e-1i" {
                assert!(!c.im().contains_dyadic(&dy(0, 0)), "{lit}");
                continue;
            }
            assert_eq!(c.re().mid().cmp_value(&re), std::cmp::Ordering::Equal, "{lit}");
            assert_eq!(c.im().mid().cmp_value(&im), std::cmp::Ordering::Equal, "{lit}");
        }
    }

    #[test]
    fn splits_exponent_signs_correctly() {
        let c = parse_complex("1e-3+2e-4i", 64).unwrap();
        assert!(c.re().contains_ball(&Ball::from_decimal_str("0.001", 80).unwrap()));
        assert!(c.im().contains_ball(&Ball::from_decimal_str("0.0002", 80).unwrap()));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_complex("", 64).is_err());
        assert!(parse_complex("1+2j", 64).is_err());
        assert!(parse_complex("i+i", 64).is_err());
        assert!(parse_complex("--3", 64).is_err());
    }
}

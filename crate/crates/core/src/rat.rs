//! Exact rational scalars and the helpers the rest of the crate leans on.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational. Always stored in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

/// Error produced by [`parse_rat`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseRatError {
    pub token: String,
}

impl fmt::Display for ParseRatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed numeric token {:?}", self.token)
    }
}

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"12"`, `"-2.5"`, `"+0.1"`, `"3/7"` or `"-3/7"` exactly.
///
/// Decimals are expanded in base 10, never through a float.
pub fn parse_rat(text: &str) -> Result<Rat, ParseRatError> {
    let err = || ParseRatError { token: String::from(text) };
    let s = text.trim();
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    if body.is_empty() {
        return Err(err());
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num).ok_or_else(err)?;
        let den = parse_digits(den).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        Rat::new(BigInt::from(num), BigInt::from(den))
    } else if let Some((whole, frac)) = body.split_once('.') {
        if whole.is_empty() && frac.is_empty() {
            return Err(err());
        }
        let whole = if whole.is_empty() {
            BigUint::zero()
        } else {
            parse_digits(whole).ok_or_else(err)?
        };
        let frac_digits = if frac.is_empty() {
            BigUint::zero()
        } else {
            parse_digits(frac).ok_or_else(err)?
        };
        let scale = num_traits::pow(BigUint::from(10u32), frac.len());
        let num = whole * &scale + frac_digits;
        Rat::new(BigInt::from(num), BigInt::from(scale))
    } else {
        Rat::from_integer(BigInt::from(parse_digits(body).ok_or_else(err)?))
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigUint::parse_bytes(s.as_bytes(), 10)
}

/// Renders as `"p"` for integers and `"p/q"` otherwise.
pub fn format_rat(q: &Rat) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    if q.is_integer() {
        let _ = write!(out, "{}", q.numer());
    } else {
        let _ = write!(out, "{}/{}", q.numer(), q.denom());
    }
    out
}

/// Nearest-ish double for display and float cross-checks.
pub fn to_f64(q: &Rat) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `floor(sqrt(q) * den) / den`, a lower bound on `sqrt(q)` for `q >= 0`.
pub fn sqrt_lower(q: &Rat, den: &BigInt) -> Rat {
    let scaled = q * Rat::from_integer(den * den);
    let root = scaled.floor().to_integer().sqrt();
    Rat::new(root, den.clone())
}

/// `ceil(sqrt(q) * den) / den`, an upper bound on `sqrt(q)` for `q >= 0`.
pub fn sqrt_upper(q: &Rat, den: &BigInt) -> Rat {
    let scaled = (q * Rat::from_integer(den * den)).ceil().to_integer();
    let mut root = scaled.sqrt();
    if &root * &root < scaled {
        root += 1;
    }
    Rat::new(root, den.clone())
}

/// Float square root of a nonnegative rational, good to ~1e-15 relative.
pub fn sqrt_f64(q: &Rat) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let den = num_traits::pow(BigInt::from(10), 24);
    to_f64(&sqrt_lower(q, &den))
}

/// Rescales a nonzero vector by a positive factor so its entries are
/// coprime integers. Zero vectors are returned unchanged.
pub fn primitive(v: &[Rat]) -> Vec<Rat> {
    if v.iter().all(Zero::is_zero) {
        return v.to_vec();
    }
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let gcd = ints
        .iter()
        .fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.into_iter()
        .map(|x| Rat::from_integer(x / &gcd))
        .collect()
}

/// [`primitive`] with the sign chosen so the first nonzero entry is positive.
pub fn primitive_normalized(v: &[Rat]) -> Vec<Rat> {
    let mut p = primitive(v);
    if let Some(first) = p.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in &mut p {
                *x = -&*x;
            }
        }
    }
    p
}

/// Sign of `p*sqrt(s) + q*sqrt(t) + w` for rationals `p, q, w` and
/// nonnegative `s, t`, decided exactly.
pub fn sign_of_sqrt_sum(p: &Rat, s: &Rat, q: &Rat, t: &Rat, w: &Rat) -> Sign {
    // Split into the two-root part L and the rational target R = -w.
    let left = sign_of_two_roots(p, s, q, t);
    let right = sign_of(&-w);
    match (left, right) {
        (l, r) if l != r => {
            if sign_rank(l) > sign_rank(r) {
                Sign::Plus
            } else {
                Sign::Minus
            }
        }
        (Sign::NoSign, _) => Sign::NoSign,
        (same, _) => {
            // Same strict sign: compare L^2 with R^2.
            // L^2 - R^2 = 2pq sqrt(st) + (p^2 s + q^2 t - w^2)
            let two = int(2);
            let c1 = &two * p * q;
            let c0 = p * p * s + q * q * t - w * w;
            let sq = sign_of_one_root(&c1, &(s * t), &c0);
            match same {
                Sign::Plus => sq,
                _ => flip(sq),
            }
        }
    }
}

fn sign_rank(s: Sign) -> i8 {
    match s {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Minus => Sign::Plus,
        Sign::NoSign => Sign::NoSign,
        Sign::Plus => Sign::Minus,
    }
}

fn sign_of(x: &Rat) -> Sign {
    if x.is_zero() {
        Sign::NoSign
    } else if x.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// Sign of `c1*sqrt(u) + c0` with `u >= 0`.
fn sign_of_one_root(c1: &Rat, u: &Rat, c0: &Rat) -> Sign {
    let a = if u.is_zero() { Sign::NoSign } else { sign_of(c1) };
    let b = sign_of(c0);
    if a == Sign::NoSign {
        return b;
    }
    if b == Sign::NoSign || a == b {
        return a;
    }
    // Opposite signs: compare magnitudes squared.
    let lhs = c1 * c1 * u;
    let rhs = c0 * c0;
    match lhs.cmp(&rhs) {
        core::cmp::Ordering::Greater => a,
        core::cmp::Ordering::Less => b,
        core::cmp::Ordering::Equal => Sign::NoSign,
    }
}

fn sign_of_two_roots(p: &Rat, s: &Rat, q: &Rat, t: &Rat) -> Sign {
    let a = if s.is_zero() { Sign::NoSign } else { sign_of(p) };
    let b = if t.is_zero() { Sign::NoSign } else { sign_of(q) };
    if a == Sign::NoSign {
        return b;
    }
    if b == Sign::NoSign || a == b {
        return a;
    }
    let lhs = p * p * s;
    let rhs = q * q * t;
    match lhs.cmp(&rhs) {
        core::cmp::Ordering::Greater => a,
        core::cmp::Ordering::Less => b,
        core::cmp::Ordering::Equal => Sign::NoSign,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_and_fraction_agree() {
        assert_eq!(parse_rat("0.1").unwrap(), parse_rat("1/10").unwrap());
        assert_eq!(parse_rat("-2.5").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rat("+12").unwrap(), int(12));
        assert_eq!(parse_rat(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rat("-6/4").unwrap(), ratio(-3, 2));
    }

    #[test]
    fn malformed_tokens_rejected() {
        for bad in ["", "-", "1/0", "1e3", "a", "1/-2", "1.2.3", ".", "--1", "1/"] {
            assert!(parse_rat(bad).is_err(), "{bad:?} accepted");
        }
    }

    #[test]
    fn format_is_lowest_terms() {
        assert_eq!(format_rat(&ratio(4, -6)), "-2/3");
        assert_eq!(format_rat(&int(7)), "7");
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let den = BigInt::from(1_000_000);
        let three = int(3);
        let lo = sqrt_lower(&three, &den);
        let hi = sqrt_upper(&three, &den);
        assert!(&lo * &lo <= three && &hi * &hi >= three);
        assert_eq!(&hi - &lo, ratio(1, 1_000_000));
        let four = int(4);
        assert_eq!(sqrt_upper(&four, &den), int(2));
        assert_eq!(sqrt_lower(&four, &den), int(2));
    }

    #[test]
    fn primitive_scaling() {
        let v = [ratio(-1, 2), ratio(-1, 4), int(0)];
        assert_eq!(primitive(&v), [int(-2), int(-1), int(0)]);
        assert_eq!(primitive_normalized(&v), [int(2), int(1), int(0)]);
    }

    #[test]
    fn sqrt_sum_signs() {
        // sqrt(3) - 2 < 0
        assert_eq!(
            sign_of_sqrt_sum(&int(1), &int(3), &int(0), &int(0), &int(-2)),
            Sign::Minus
        );
        // sqrt(2) + sqrt(3) - 3 > 0
        assert_eq!(
            sign_of_sqrt_sum(&int(1), &int(2), &int(1), &int(3), &int(-3)),
            Sign::Plus
        );
        // 2 sqrt(2) - sqrt(8) = 0
        assert_eq!(
            sign_of_sqrt_sum(&int(2), &int(2), &int(-1), &int(8), &int(0)),
            Sign::NoSign
        );
        // -sqrt(2) - sqrt(3) + 3.2 > 0 (3.146 < 3.2)
        assert_eq!(
            sign_of_sqrt_sum(&int(-1), &int(2), &int(-1), &int(3), &ratio(16, 5)),
            Sign::Plus
        );
        // -sqrt(2) - sqrt(3) + 3.1 < 0
        assert_eq!(
            sign_of_sqrt_sum(&int(-1), &int(2), &int(-1), &int(3), &ratio(31, 10)),
            Sign::Minus
        );
    }
}

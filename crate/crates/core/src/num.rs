//! Exact rationals and extended rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q` (or a bare integer). Rejects zero denominators.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Strict form used in game files: `p/q` with q > 0 and gcd(p, q) = 1.
pub fn parse_q_canonical(s: &str) -> Result<Q, Error> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Parse(format!("rational must be written p/q: {s:?}")))?;
    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
    if !d.is_positive() {
        return Err(Error::Parse(format!("denominator must be positive: {s:?}")));
    }
    let r = Q::new(n.clone(), d.clone());
    if r.numer() != &n || r.denom() != &d {
        return Err(Error::Parse(format!("rational not in lowest terms: {s:?}")));
    }
    Ok(r)
}

pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn q_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Extended rationals: {-inf} ∪ Q ∪ {+inf}, totally ordered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    NegInf,
    Fin(Q),
    PosInf,
}

impl Ext {
    pub fn zero() -> Ext {
        Ext::Fin(Q::zero())
    }

    pub fn int(n: i64) -> Ext {
        Ext::Fin(q(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Ext::Fin(x) => Some(x),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Result<Ext, Error> {
        match s.trim() {
            "+inf" | "inf" => Ok(Ext::PosInf),
            "-inf" => Ok(Ext::NegInf),
            t => parse_q(t).map(Ext::Fin),
        }
    }

    pub fn checked_add(&self, other: &Ext) -> Result<Ext, Error> {
        use Ext::*;
        match (self, other) {
            (Fin(a), Fin(b)) => Ok(Fin(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => {
                Err(Error::Arithmetic("undefined sum of +inf and -inf".into()))
            }
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn checked_sub(&self, other: &Ext) -> Result<Ext, Error> {
        self.checked_add(&-other.clone())
    }

    pub fn max(self, other: Ext) -> Ext {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Ext) -> Ext {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::PosInf => f64::INFINITY,
            Ext::Fin(x) => q_to_f64(x),
        }
    }
}

impl From<Q> for Ext {
    fn from(x: Q) -> Ext {
        Ext::Fin(x)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Ext) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Ext) -> Ordering {
        use Ext::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Fin(a), Fin(b)) => a.cmp(b),
        }
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Fin(x) => Ext::Fin(-x),
        }
    }
}

/// Panics on +inf + -inf; use [`Ext::checked_add`] where that can happen.
impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        self.checked_add(&rhs).expect("extended rational arithmetic")
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        self.checked_sub(&rhs).expect("extended rational arithmetic")
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::PosInf => write!(f, "+inf"),
            Ext::Fin(x) => write!(f, "{}", fmt_q(x)),
        }
    }
}

/// Least common multiple of the denominators.
pub fn common_denom<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    use num_integer::Integer;
    let mut d = BigInt::one();
    for x in xs {
        d = d.lcm(x.denom());
    }
    d
}

/// Simplest rational (smallest denominator) in the closed interval [lo, hi], lo <= hi.
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi.clone(), &-lo.clone());
    }
    // 0 < lo <= hi: continued-fraction descent.
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if &(fl.clone() + Q::one()) <= hi {
        return fl + Q::one();
    }
    let frac_lo = lo - &fl;
    let frac_hi = hi - &fl;
    // Both fractional parts lie in (0, 1); recurse on reciprocals.
    let inner = simplest_between(&frac_hi.recip(), &frac_lo.recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_order_and_parse() {
        assert!(Ext::NegInf < Ext::int(-5));
        assert!(Ext::int(5) < Ext::PosInf);
        assert_eq!(Ext::parse("3/6").unwrap(), Ext::Fin(qf(1, 2)));
        assert_eq!(Ext::parse("+inf").unwrap().to_string(), "+inf");
        assert!(Ext::PosInf.checked_add(&Ext::NegInf).is_err());
    }

    #[test]
    fn canonical_rationals() {
        assert!(parse_q_canonical("2/4").is_err());
        assert!(parse_q_canonical("1/-2").is_err());
        assert!(parse_q_canonical("3").is_err());
        assert_eq!(parse_q_canonical("-1/2").unwrap(), qf(-1, 2));
        assert_eq!(fmt_q(&q(3)), "3/1");
    }

    #[test]
    fn simplest() {
        assert_eq!(simplest_between(&qf(9, 10), &qf(11, 10)), q(1));
        assert_eq!(simplest_between(&qf(1, 3), &qf(2, 5)), qf(1, 3));
        assert_eq!(simplest_between(&qf(3, 10), &qf(7, 20)), qf(1, 3));
        assert_eq!(simplest_between(&qf(-7, 20), &qf(-3, 10)), qf(-1, 3));
        assert_eq!(simplest_between(&qf(5, 7), &qf(5, 7)), qf(5, 7));
    }
}

//! Exact arithmetic in `Q(√2)`, used to check fidelities of states whose
//! amplitudes involve `1/√2`.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::state::{Ket, StateError};

/// `a + b·√2` with rational `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub a: BigRational,
    pub b: BigRational,
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Surd {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        Surd { a, b }
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Surd {
            a: q(n, d),
            b: BigRational::zero(),
        }
    }

    /// `n/d · √2`
    pub fn root2(n: i64, d: i64) -> Self {
        Surd {
            a: BigRational::zero(),
            b: q(n, d),
        }
    }

    /// `1/√2 = √2/2`
    pub fn inv_sqrt2() -> Self {
        Surd::root2(1, 2)
    }

    pub fn zero() -> Self {
        Surd::rational(0, 1)
    }

    pub fn one() -> Self {
        Surd::rational(1, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        Surd {
            a: self.a.clone(),
            b: -self.b.clone(),
        }
    }

    /// `a² − 2b²`
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(2.into()) * &self.b * &self.b
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(Surd {
            a: c.a / &n,
            b: c.b / n,
        })
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * std::f64::consts::SQRT_2
    }

    pub fn is_positive(&self) -> bool {
        // sign of a + b√2 from the signs of a, b and a² − 2b²
        let (sa, sb) = (self.a.signum(), self.b.signum());
        if !sa.is_negative() && !sb.is_negative() {
            return !self.is_zero();
        }
        if sa.is_negative() && sb.is_negative() || sa.is_negative() && sb.is_zero() {
            return false;
        }
        let n = self.norm();
        if sa.is_positive() {
            n.is_positive()
        } else {
            n.is_negative()
        }
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        Surd {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        Surd {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd {
            a: -self.a,
            b: -self.b,
        }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        let two = BigRational::from_integer(2.into());
        Surd {
            a: &self.a * &o.a + two * &self.b * &o.b,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Surd {
    type Output = Surd;
    fn div(self, o: Surd) -> Surd {
        self * o.recip().expect("division by zero in Q(sqrt 2)")
    }
}

/// Squared overlap `|<a|b>|² / (<a|a><b|b>)` for real amplitudes in `Q(√2)`.
pub fn fidelity(a: &[(Ket, Surd)], b: &[(Ket, Surd)]) -> Result<Surd, StateError> {
    let collect = |terms: &[(Ket, Surd)]| {
        let mut map: BTreeMap<Ket, Surd> = BTreeMap::new();
        for (k, x) in terms {
            let slot = map.entry(k.clone()).or_insert_with(Surd::zero);
            *slot = slot.clone() + x.clone();
        }
        map.retain(|_, x| !x.is_zero());
        map
    };
    let (ma, mb) = (collect(a), collect(b));
    let (la, lb) = match (ma.keys().next(), mb.keys().next()) {
        (Some(x), Some(y)) => (x.len(), y.len()),
        _ => return Err(StateError::EmptyState),
    };
    if la != lb {
        return Err(StateError::DimensionMismatch(la, lb));
    }
    let dot = |m: &BTreeMap<Ket, Surd>, n: &BTreeMap<Ket, Surd>| {
        m.iter()
            .filter_map(|(k, x)| n.get(k).map(|y| x.clone() * y.clone()))
            .fold(Surd::zero(), |acc, v| acc + v)
    };
    let overlap = dot(&ma, &mb);
    let denom = dot(&ma, &ma) * dot(&mb, &mb);
    Ok(overlap.clone() * overlap / denom)
}

impl Default for Surd {
    fn default() -> Self {
        Surd::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_identities() {
        let r = Surd::inv_sqrt2();
        assert_eq!(r.clone() * r.clone(), Surd::rational(1, 2));
        let x = Surd::new(q(3, 1), q(2, 1));
        assert_eq!(x.clone() / x.clone(), Surd::one());
        assert_eq!(x.norm(), q(1, 1));
    }

    #[test]
    fn sign() {
        assert!(Surd::new(q(-1, 1), q(1, 1)).is_positive());
        assert!(!Surd::new(q(1, 1), q(-1, 1)).is_positive());
        assert!(Surd::new(q(3, 1), q(-2, 1)).is_positive());
        assert!(!Surd::zero().is_positive());
    }

    #[test]
    fn ghz_example_exact() {
        let k = |s: &str| Ket::from_letters(s).unwrap();
        let h = Surd::inv_sqrt2();
        let ghz = vec![(k("xxxx"), h.clone()), (k("yyyy"), h.clone())];
        let psi = vec![
            (k("xxxx"), h),
            (k("yyyy"), Surd::rational(1, 2)),
            (k("yyxx"), Surd::rational(1, 2)),
        ];
        let f = fidelity(&ghz, &psi).unwrap();
        assert_eq!(f, Surd::new(q(3, 8), q(2, 8)));
        assert!((f.to_f64() - 0.7285533906).abs() < 1e-10);
    }
}

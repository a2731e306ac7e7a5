//! Rational functions in `q`, the coefficients of motivic values.
//!
//! Denominators are restricted at construction to polynomials with no integer
//! root >= 2: every evaluation target has q >= 2, so a valid measure
//! coefficient can always be evaluated.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::poly::PolyQ;
use super::rat::Rat;
use super::QringError;

/// A reduced rational function num/den in `q`. The denominator is an
/// integer-primitive polynomial with positive leading coefficient and no
/// integer root >= 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFuncQ {
    num: PolyQ,
    den: PolyQ,
}

impl RatFuncQ {
    /// Build num/den, validating the denominator.
    pub fn new(num: PolyQ, den: PolyQ) -> Result<Self, QringError> {
        if den.is_zero() {
            return Err(QringError::DivisionByZero);
        }
        match den.integer_root_geq2() {
            Ok(None) => {}
            Ok(Some(root)) => {
                return Err(QringError::InvalidDenominator {
                    den: den.to_string(),
                    root: root.to_string(),
                })
            }
            Err(()) => {
                return Err(QringError::InvalidDenominator {
                    den: den.to_string(),
                    root: "unverifiable (coefficient bound too large)".into(),
                })
            }
        }
        Ok(Self::reduce(num, den))
    }

    /// Internal constructor for denominators already known valid (products of
    /// valid denominators stay valid).
    fn new_unchecked(num: PolyQ, den: PolyQ) -> Self {
        debug_assert!(!den.is_zero());
        Self::reduce(num, den)
    }

    fn reduce(num: PolyQ, den: PolyQ) -> Self {
        if num.is_zero() {
            return RatFuncQ { num, den: PolyQ::one() };
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        // Canonical scale: denominator integer-primitive, positive leading.
        let scale = den.content();
        den = den.scale(&scale.recip());
        num = num.scale(&scale.recip());
        RatFuncQ { num, den }
    }

    pub fn from_poly(p: PolyQ) -> Self {
        RatFuncQ { num: p, den: PolyQ::one() }
    }

    pub fn from_rat(c: Rat) -> Self {
        Self::from_poly(PolyQ::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_int(n))
    }

    pub fn zero() -> Self {
        Self::from_poly(PolyQ::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(PolyQ::one())
    }

    /// q^k for k of either sign.
    pub fn q_pow(k: i64) -> Self {
        if k >= 0 {
            Self::from_poly(PolyQ::monomial(k as u32, Rat::one()))
        } else {
            RatFuncQ {
                num: PolyQ::one(),
                den: PolyQ::monomial((-k) as u32, Rat::one()),
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn num(&self) -> &PolyQ {
        &self.num
    }

    pub fn den(&self) -> &PolyQ {
        &self.den
    }

    /// As a polynomial, when the denominator is 1.
    pub fn as_poly(&self) -> Option<&PolyQ> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn recip(&self) -> Result<Self, QringError> {
        if self.is_zero() {
            return Err(QringError::DivisionByZero);
        }
        RatFuncQ::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, QringError> {
        if rhs.is_zero() {
            return Err(QringError::DivisionByZero);
        }
        RatFuncQ::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        RatFuncQ::new_unchecked(self.num.scale(c), self.den.clone())
    }

    /// Multiply by q^k, k of either sign.
    pub fn scale_qpow(&self, k: i64) -> Self {
        self * &RatFuncQ::q_pow(k)
    }

    pub fn eval(&self, x: &Rat) -> Result<Rat, QringError> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(QringError::DenominatorVanishes { at: x.to_string() });
        }
        Ok(&self.num.eval(x) / &d)
    }

    pub fn eval_u64(&self, x: u64) -> Result<Rat, QringError> {
        self.eval(&Rat::from_int(x as i64))
    }

    pub fn latex(&self) -> String {
        if self.den.is_one() {
            poly_to_latex(&self.num)
        } else {
            format!("\\frac{{{}}}{{{}}}", poly_to_latex(&self.num), poly_to_latex(&self.den))
        }
    }
}

pub(crate) fn poly_to_latex(p: &PolyQ) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    let mut first = true;
    let mut terms: Vec<_> = p.coeffs().collect();
    terms.reverse();
    for (&e, c) in terms {
        let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
        if first {
            if sign == "-" {
                out.push('-');
            }
            first = false;
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let mag_str = if mag.is_integer() {
            format!("{mag}")
        } else {
            format!("\\tfrac{{{}}}{{{}}}", mag.numer(), mag.denom())
        };
        match (e, mag.is_one()) {
            (0, _) => out.push_str(&mag_str),
            (1, true) => out.push('q'),
            (1, false) => out.push_str(&format!("{mag_str} q")),
            (_, true) => out.push_str(&format!("q^{{{e}}}")),
            (_, false) => out.push_str(&format!("{mag_str} q^{{{e}}}")),
        }
    }
    out
}

impl Add for &RatFuncQ {
    type Output = RatFuncQ;
    fn add(self, rhs: &RatFuncQ) -> RatFuncQ {
        RatFuncQ::new_unchecked(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RatFuncQ {
    type Output = RatFuncQ;
    fn sub(self, rhs: &RatFuncQ) -> RatFuncQ {
        self + &-rhs
    }
}

impl Mul for &RatFuncQ {
    type Output = RatFuncQ;
    fn mul(self, rhs: &RatFuncQ) -> RatFuncQ {
        RatFuncQ::new_unchecked(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RatFuncQ {
    type Output = RatFuncQ;
    fn neg(self) -> RatFuncQ {
        RatFuncQ { num: -&self.num, den: self.den.clone() }
    }
}

impl fmt::Display for RatFuncQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            let num = if self.num.coeffs().count() > 1 {
                format!("({})", self.num)
            } else {
                format!("{}", self.num)
            };
            write!(f, "{num}/({})", self.den)
        }
    }
}

impl fmt::Debug for RatFuncQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Polynomials serialize as exponent -> coefficient string maps.
pub(crate) fn serialize_poly<S: Serializer>(p: &PolyQ, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(p.coeffs().count()))?;
    for (e, c) in p.coeffs() {
        map.serialize_entry(&e.to_string(), &c.to_string())?;
    }
    map.end()
}

impl Serialize for RatFuncQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Parts<'a> {
            #[serde(serialize_with = "serialize_poly")]
            num: &'a PolyQ,
            #[serde(serialize_with = "serialize_poly")]
            den: &'a PolyQ,
        }
        Parts { num: &self.num, den: &self.den }.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(pairs: &[(u32, i64)]) -> PolyQ {
        PolyQ::from_coeffs(pairs.iter().map(|&(e, c)| (e, Rat::from_int(c))))
    }

    #[test]
    fn sum_of_simple_fractions() {
        // 1/(q-1) + 1/(q+1) = 2q/(q^2-1)
        let a = RatFuncQ::new(PolyQ::one(), poly(&[(1, 1), (0, -1)])).unwrap();
        let b = RatFuncQ::new(PolyQ::one(), poly(&[(1, 1), (0, 1)])).unwrap();
        let expect = RatFuncQ::new(poly(&[(1, 2)]), poly(&[(2, 1), (0, -1)])).unwrap();
        assert_eq!(&a + &b, expect);
    }

    #[test]
    fn square_measure_product() {
        // (q-1)/2 * q/(q^2-1) = q/(2(q+1))
        let a = RatFuncQ::from_poly(poly(&[(1, 1), (0, -1)])).scale(&Rat::new(1, 2));
        let b = RatFuncQ::new(poly(&[(1, 1)]), poly(&[(2, 1), (0, -1)])).unwrap();
        let expect = RatFuncQ::new(poly(&[(1, 1)]), poly(&[(1, 2), (0, 2)])).unwrap();
        assert_eq!(&a * &b, expect);
        assert_eq!((&a * &b).eval(&Rat::from_int(7)).unwrap(), Rat::new(7, 16));
    }

    #[test]
    fn denominator_validation() {
        assert!(RatFuncQ::new(PolyQ::one(), poly(&[(1, 1), (0, -7)])).is_err());
        assert!(RatFuncQ::new(PolyQ::one(), poly(&[(1, 1), (0, -1)])).is_ok());
        assert!(RatFuncQ::new(PolyQ::one(), PolyQ::zero()).is_err());
    }

    #[test]
    fn canonical_denominator_scale() {
        // q / (q/2 + 1/2) normalizes to 2q/(q+1).
        let a = RatFuncQ::new(
            poly(&[(1, 1)]),
            PolyQ::from_coeffs([(1, Rat::new(1, 2)), (0, Rat::new(1, 2))]),
        )
        .unwrap();
        assert_eq!(a.den(), &poly(&[(1, 1), (0, 1)]));
        assert_eq!(a.num(), &poly(&[(1, 2)]));
    }

    #[test]
    fn q_pow_negative() {
        let a = RatFuncQ::q_pow(-3);
        assert_eq!(a.eval(&Rat::from_int(2)).unwrap(), Rat::new(1, 8));
    }
}

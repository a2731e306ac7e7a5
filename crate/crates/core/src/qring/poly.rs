//! Sparse univariate polynomials over the rationals, in the formal variable
//! `q` (the residue field cardinality).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::rat::Rat;

/// A polynomial in `q` with rational coefficients. No zero coefficients are
/// stored; the zero polynomial has an empty coefficient map.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PolyQ {
    coeffs: BTreeMap<u32, Rat>,
}

impl PolyQ {
    pub fn zero() -> Self {
        PolyQ::default()
    }

    pub fn one() -> Self {
        PolyQ::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        PolyQ { coeffs }
    }

    /// The variable `q` itself.
    pub fn q() -> Self {
        PolyQ::monomial(1, Rat::one())
    }

    pub fn monomial(exp: u32, coeff: Rat) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        PolyQ { coeffs }
    }

    pub fn from_coeffs<I: IntoIterator<Item = (u32, Rat)>>(iter: I) -> Self {
        let mut p = PolyQ::zero();
        for (e, c) in iter {
            p.add_term(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(Rat::is_one)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|&e| e == 0)
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn trailing_degree(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> Rat {
        self.degree().map_or_else(Rat::zero, |d| self.coeffs[&d].clone())
    }

    pub fn coeff(&self, exp: u32) -> Rat {
        self.coeffs.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&u32, &Rat)> {
        self.coeffs.iter()
    }

    pub fn add_term(&mut self, exp: u32, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(exp).or_insert_with(Rat::zero);
        *entry += &coeff;
        if entry.is_zero() {
            self.coeffs.remove(&exp);
        }
    }

    pub fn scale(&self, c: &Rat) -> PolyQ {
        if c.is_zero() {
            return PolyQ::zero();
        }
        PolyQ {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiply by q^k.
    pub fn shift(&self, k: u32) -> PolyQ {
        PolyQ {
            coeffs: self.coeffs.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> PolyQ {
        let mut base = self.clone();
        let mut acc = PolyQ::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        // Horner over the sparse representation.
        let mut acc = Rat::zero();
        let mut last_exp = None;
        for (&e, c) in self.coeffs.iter().rev() {
            if let Some(prev) = last_exp {
                acc = acc * x.pow((prev - e) as i32);
            }
            acc += c;
            last_exp = Some(e);
        }
        if let Some(e) = last_exp {
            acc = acc * x.pow(e as i32);
        }
        acc
    }

    pub fn derivative(&self) -> PolyQ {
        PolyQ::from_coeffs(
            self.coeffs
                .iter()
                .filter(|(&e, _)| e > 0)
                .map(|(&e, c)| (e - 1, c * &Rat::from_int(e as i64))),
        )
    }

    /// Euclidean division; panics on zero divisor.
    pub fn divrem(&self, den: &PolyQ) -> (PolyQ, PolyQ) {
        assert!(!den.is_zero(), "polynomial division by zero");
        let dd = den.degree().unwrap();
        let lc = den.leading_coeff();
        let mut rem = self.clone();
        let mut quot = PolyQ::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = &rem.coeff(rd) / &lc;
            let shift = rd - dd;
            quot.add_term(shift, c.clone());
            rem = &rem - &den.shift(shift).scale(&c);
        }
        (quot, rem)
    }

    /// Exact division; panics when the divisor does not divide self.
    pub fn div_exact(&self, den: &PolyQ) -> PolyQ {
        let (q, r) = self.divrem(den);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &PolyQ) -> PolyQ {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.leading_coeff();
        a.scale(&lc.recip())
    }

    /// Least common multiple of coefficient denominators and gcd of cleared
    /// numerators: `self = content * primitive` with primitive in Z[q],
    /// coprime coefficients, positive leading coefficient.
    pub fn content(&self) -> Rat {
        if self.is_zero() {
            return Rat::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in self.coeffs.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.coeffs.values() {
            let cleared = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&cleared);
        }
        let mut content = Rat::new(num_gcd, den_lcm);
        if self.leading_coeff().is_negative() {
            content = -content;
        }
        content
    }

    pub fn primitive_part(&self) -> PolyQ {
        if self.is_zero() {
            return PolyQ::zero();
        }
        self.scale(&self.content().recip())
    }

    /// First integer root >= 2, if any. Used to validate measure
    /// denominators, which must not vanish at any admissible q.
    ///
    /// Integer roots are bounded by the Cauchy bound 1 + max |c_i / c_d|; the
    /// scan is capped at 2^21, far above the bound of any denominator the
    /// engine produces (q-power and q^m - 1 factors have bound 2). A larger
    /// bound is reported as unverifiable rather than silently accepted.
    pub fn integer_root_geq2(&self) -> Result<Option<BigInt>, ()> {
        if self.is_zero() {
            return Ok(None);
        }
        let prim = self.primitive_part();
        // Strip the q^v factor; q = 0 is not a candidate anyway.
        let tdeg = prim.trailing_degree().unwrap();
        let shifted = PolyQ::from_coeffs(prim.coeffs().map(|(&e, c)| (e - tdeg, c.clone())));
        if shifted.is_constant() {
            return Ok(None);
        }
        let lead = shifted.leading_coeff().abs();
        let mut max_ratio = Rat::zero();
        for (_, c) in shifted.coeffs() {
            let r = &c.abs() / &lead;
            if r > max_ratio {
                max_ratio = r;
            }
        }
        let bound = (Rat::one() + max_ratio).floor_int() + BigInt::one();
        let bound = match bound.to_u64() {
            Some(b) if b <= 1 << 21 => b,
            _ => return Err(()),
        };
        for k in 2..=bound {
            if shifted.eval(&Rat::from_int(k as i64)).is_zero() {
                return Ok(Some(BigInt::from(k)));
            }
        }
        Ok(None)
    }
}

impl Add for &PolyQ {
    type Output = PolyQ;
    fn add(self, rhs: &PolyQ) -> PolyQ {
        let mut out = self.clone();
        for (&e, c) in rhs.coeffs.iter() {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &PolyQ {
    type Output = PolyQ;
    fn sub(self, rhs: &PolyQ) -> PolyQ {
        let mut out = self.clone();
        for (&e, c) in rhs.coeffs.iter() {
            out.add_term(e, -c);
        }
        out
    }
}

impl Mul for &PolyQ {
    type Output = PolyQ;
    fn mul(self, rhs: &PolyQ) -> PolyQ {
        let mut out = PolyQ::zero();
        for (&e1, c1) in self.coeffs.iter() {
            for (&e2, c2) in rhs.coeffs.iter() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &PolyQ {
    type Output = PolyQ;
    fn neg(self) -> PolyQ {
        PolyQ {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

impl fmt::Display for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in self.coeffs.iter().rev() {
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{mag}*q^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(u32, i64)]) -> PolyQ {
        PolyQ::from_coeffs(pairs.iter().map(|&(e, c)| (e, Rat::from_int(c))))
    }

    #[test]
    fn arithmetic_basics() {
        let a = p(&[(2, 1), (0, -1)]); // q^2 - 1
        let b = p(&[(1, 1), (0, 1)]); // q + 1
        let c = p(&[(1, 1), (0, -1)]); // q - 1
        assert_eq!(&b * &c, a);
        assert_eq!(a.div_exact(&b), c);
        assert_eq!(a.eval(&Rat::from_int(3)), Rat::from_int(8));
    }

    #[test]
    fn gcd_is_monic() {
        let a = p(&[(2, 2), (0, -2)]); // 2q^2 - 2
        let b = p(&[(1, 4), (0, 4)]); // 4q + 4
        assert_eq!(a.gcd(&b), p(&[(1, 1), (0, 1)]));
    }

    #[test]
    fn content_primitive() {
        let a = PolyQ::from_coeffs([(1, Rat::new(3, 2)), (0, Rat::new(9, 4))]);
        assert_eq!(a.content(), Rat::new(3, 4));
        assert_eq!(a.primitive_part(), p(&[(1, 2), (0, 3)]));
        let neg = p(&[(1, -2), (0, 4)]);
        assert_eq!(neg.content(), Rat::from_int(-2));
        assert_eq!(neg.primitive_part(), p(&[(1, 1), (0, -2)]));
    }

    #[test]
    fn integer_roots() {
        // q^3 - 1 vanishes at q = 1 only; fine for q >= 2.
        assert_eq!(p(&[(3, 1), (0, -1)]).integer_root_geq2(), Ok(None));
        // q - 7 vanishes at 7.
        assert_eq!(p(&[(1, 1), (0, -7)]).integer_root_geq2(), Ok(Some(BigInt::from(7))));
        // q^2(q - 3) catches the shifted root.
        assert_eq!(p(&[(3, 1), (2, -3)]).integer_root_geq2(), Ok(Some(BigInt::from(3))));
        assert_eq!(p(&[(1, 1)]).integer_root_geq2(), Ok(None));
    }

    #[test]
    fn derivative() {
        assert_eq!(p(&[(3, 2), (1, 5)]).derivative(), p(&[(2, 6), (0, 5)]));
    }
}

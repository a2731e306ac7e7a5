//! Bivariate polynomials and rational functions in `q` and `T`, the home of
//! Poincare-type series. All series identities are formal in `T`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::poly::PolyQ;
use super::rat::Rat;
use super::ratfunc::{poly_to_latex, RatFuncQ};
use super::QringError;

/// A polynomial in `T` with coefficients in Q[q]. No zero coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PolyQT {
    coeffs: BTreeMap<u32, PolyQ>,
}

impl PolyQT {
    pub fn zero() -> Self {
        PolyQT::default()
    }

    pub fn one() -> Self {
        PolyQT::constant(PolyQ::one())
    }

    pub fn constant(c: PolyQ) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        PolyQT { coeffs }
    }

    /// c(q) * T^t
    pub fn monomial(t_exp: u32, c: PolyQ) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(t_exp, c);
        }
        PolyQT { coeffs }
    }

    /// q^a T^b
    pub fn qt_monomial(q_exp: u32, t_exp: u32) -> Self {
        PolyQT::monomial(t_exp, PolyQ::monomial(q_exp, Rat::one()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(PolyQ::is_one)
    }

    pub fn t_degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, t_exp: u32) -> PolyQ {
        self.coeffs.get(&t_exp).cloned().unwrap_or_else(PolyQ::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&u32, &PolyQ)> {
        self.coeffs.iter()
    }

    pub fn leading(&self) -> PolyQ {
        self.t_degree().map_or_else(PolyQ::zero, |d| self.coeffs[&d].clone())
    }

    pub fn add_term(&mut self, t_exp: u32, c: PolyQ) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(t_exp) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale_q(&self, c: &PolyQ) -> PolyQT {
        if c.is_zero() {
            return PolyQT::zero();
        }
        PolyQT {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> PolyQT {
        self.scale_q(&PolyQ::constant(c.clone()))
    }

    /// Substitute T -> q^n T.
    pub fn subst_t_scale(&self, n: u32) -> PolyQT {
        PolyQT {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&e, v)| (e, v.shift(n * e)))
                .collect(),
        }
    }

    /// Content in Q[q]: monic gcd of the coefficients.
    fn content_q(&self) -> PolyQ {
        let mut g = PolyQ::zero();
        for c in self.coeffs.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Schoolbook division for a known-exact divisor.
    fn div_exact(&self, den: &PolyQT) -> PolyQT {
        assert!(!den.is_zero());
        let dd = den.t_degree().unwrap();
        let lc = den.leading();
        let mut rem = self.clone();
        let mut quot = PolyQT::zero();
        while let Some(rd) = rem.t_degree() {
            if rd < dd {
                break;
            }
            let c = rem.coeff(rd).div_exact(&lc);
            let shift = rd - dd;
            quot.add_term(shift, c.clone());
            let sub = den.mul(&PolyQT::monomial(shift, c));
            rem = rem.sub(&sub);
        }
        assert!(rem.is_zero(), "inexact bivariate division");
        quot
    }

    fn mul(&self, rhs: &PolyQT) -> PolyQT {
        let mut out = PolyQT::zero();
        for (&e1, c1) in &self.coeffs {
            for (&e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    fn add(&self, rhs: &PolyQT) -> PolyQT {
        let mut out = self.clone();
        for (&e, c) in &rhs.coeffs {
            out.add_term(e, c.clone());
        }
        out
    }

    fn sub(&self, rhs: &PolyQT) -> PolyQT {
        let mut out = self.clone();
        for (&e, c) in &rhs.coeffs {
            out.add_term(e, -c);
        }
        out
    }

    /// Gcd in (Q[q])[T] via content/primitive-part and a primitive
    /// pseudo-remainder sequence.
    fn gcd(&self, other: &PolyQT) -> PolyQT {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let content = self.content_q().gcd(&other.content_q());
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.t_degree() < b.t_degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.primitive_part().scale_q(&content)
    }

    fn primitive_part(&self) -> PolyQT {
        if self.is_zero() {
            return PolyQT::zero();
        }
        let c = self.content_q();
        PolyQT {
            coeffs: self.coeffs.iter().map(|(&e, v)| (e, v.div_exact(&c))).collect(),
        }
    }

    /// Pseudo-remainder of self by den in (Q[q])[T]: each step multiplies by
    /// the divisor's leading coefficient so elimination stays in Q[q].
    fn pseudo_rem(&self, den: &PolyQT) -> PolyQT {
        let dd = den.t_degree().unwrap();
        let lc = den.leading();
        let mut rem = self.clone();
        while let Some(rd) = rem.t_degree() {
            if rd < dd {
                break;
            }
            let lead = rem.coeff(rd);
            rem = rem.scale_q(&lc);
            rem = rem.sub(&den.mul(&PolyQT::monomial(rd - dd, lead)));
        }
        rem
    }

    /// Evaluate the q variable, producing a polynomial in T over Q.
    pub fn eval_q(&self, q: &Rat) -> Vec<Rat> {
        let deg = match self.t_degree() {
            Some(d) => d,
            None => return Vec::new(),
        };
        let mut out = vec![Rat::zero(); deg as usize + 1];
        for (&e, c) in &self.coeffs {
            out[e as usize] = c.eval(q);
        }
        out
    }
}

impl fmt::Display for PolyQT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let cs = if c.coeffs().count() > 1 { format!("({c})") } else { format!("{c}") };
            match e {
                0 => write!(f, "{cs}")?,
                1 if c.is_one() => write!(f, "T")?,
                1 => write!(f, "{cs}*T")?,
                _ if c.is_one() => write!(f, "T^{e}")?,
                _ => write!(f, "{cs}*T^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PolyQT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A reduced bivariate rational function in (q, T). The denominator is
/// normalized to integer-primitive content with its lowest (T, then q) term
/// positive, so structural equality is semantic equality.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFuncQT {
    num: PolyQT,
    den: PolyQT,
}

impl RatFuncQT {
    pub fn new(num: PolyQT, den: PolyQT) -> Result<Self, QringError> {
        if den.is_zero() {
            return Err(QringError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: PolyQT, den: PolyQT) -> Self {
        if num.is_zero() {
            return RatFuncQT { num, den: PolyQT::one() };
        }
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        // Canonical scalar: denominator integer-primitive with its lowest
        // (T, then q) coefficient positive, so 1 - qT stays 1 - qT and
        // q - T stays q - T.
        let lowest = den.coeffs().next().map(|(_, c)| c.clone()).unwrap();
        let trailing = lowest.coeff(lowest.trailing_degree().unwrap());
        let mut int_content = Rat::zero();
        for (_, c) in den.coeffs() {
            let cc = c.content().abs();
            int_content = if int_content.is_zero() { cc } else { rat_gcd(&int_content, &cc) };
        }
        let scale = if trailing.is_negative() { -int_content } else { int_content };
        let inv = scale.recip();
        num = num.scale(&inv);
        den = den.scale(&inv);
        RatFuncQT { num, den }
    }

    pub fn zero() -> Self {
        RatFuncQT { num: PolyQT::zero(), den: PolyQT::one() }
    }

    pub fn one() -> Self {
        RatFuncQT { num: PolyQT::one(), den: PolyQT::one() }
    }

    pub fn from_poly(p: PolyQT) -> Self {
        RatFuncQT { num: p, den: PolyQT::one() }
    }

    /// Laurent monomial c * q^a T^b with a of either sign.
    pub fn laurent_monomial(c: Rat, q_exp: i64, t_exp: u32) -> Self {
        if q_exp >= 0 {
            Self::from_poly(PolyQT::monomial(t_exp, PolyQ::monomial(q_exp as u32, c)))
        } else {
            RatFuncQT {
                num: PolyQT::monomial(t_exp, PolyQ::constant(c)),
                den: PolyQT::constant(PolyQ::monomial((-q_exp) as u32, Rat::one())),
            }
        }
    }

    pub fn from_ratfunc_q(f: &RatFuncQ) -> Self {
        RatFuncQT {
            num: PolyQT::constant(f.num().clone()),
            den: PolyQT::constant(f.den().clone()),
        }
    }

    pub fn num(&self) -> &PolyQT {
        &self.num
    }

    pub fn den(&self) -> &PolyQT {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, QringError> {
        if rhs.is_zero() {
            return Err(QringError::DivisionByZero);
        }
        Ok(Self::reduce(self.num.mul(&rhs.den), self.den.mul(&rhs.num)))
    }

    /// Substitute T -> q^n T (the passage from measures to point counts).
    pub fn subst_t_scale(&self, n: u32) -> Self {
        Self::reduce(self.num.subst_t_scale(n), self.den.subst_t_scale(n))
    }

    pub fn mul_scalar(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::reduce(self.num.scale(c), self.den.clone())
    }

    /// Formal power-series expansion in T with exact coefficients in Q(q).
    pub fn expand(&self, order: usize) -> Result<Vec<RatFuncQ>, QringError> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(QringError::NotExpandable);
        }
        let d0 = RatFuncQ::new(PolyQ::one(), d0)?;
        let mut out = Vec::with_capacity(order);
        for s in 0..order {
            let mut acc = RatFuncQ::from_poly(self.num.coeff(s as u32));
            for j in 1..=s {
                let dj = self.den.coeff(j as u32);
                if dj.is_zero() {
                    continue;
                }
                acc = &acc - &(&out[s - j] * &RatFuncQ::from_poly(dj));
            }
            out.push(&acc * &d0);
        }
        Ok(out)
    }

    /// Expansion at a numeric q.
    pub fn expand_at(&self, q: &Rat, order: usize) -> Result<Vec<Rat>, QringError> {
        let den = self.den.eval_q(q);
        let num = self.num.eval_q(q);
        if den.is_empty() || den[0].is_zero() {
            return Err(QringError::NotExpandable);
        }
        let d0 = den[0].recip();
        let mut out: Vec<Rat> = Vec::with_capacity(order);
        for s in 0..order {
            let mut acc = num.get(s).cloned().unwrap_or_else(Rat::zero);
            for j in 1..=s.min(den.len() - 1) {
                acc = acc - &den[j] * &out[s - j];
            }
            out.push(acc * d0.clone());
        }
        Ok(out)
    }

    /// Specialize q, returning a reduced pair of T-polynomials over Q with
    /// den normalized to constant term 1 when possible.
    pub fn eval_q(&self, q: &Rat) -> Result<(Vec<Rat>, Vec<Rat>), QringError> {
        let num = self.num.eval_q(q);
        let den = self.den.eval_q(q);
        if den.iter().all(Rat::is_zero) {
            return Err(QringError::DenominatorVanishes { at: q.to_string() });
        }
        Ok(normalize_rational_t(num, den))
    }

    pub fn latex(&self) -> String {
        let fmt_poly = |p: &PolyQT| -> String {
            let mut parts = Vec::new();
            for (&e, c) in p.coeffs() {
                let cs = poly_to_latex(c);
                let cs = if c.coeffs().count() > 1 { format!("({cs})") } else { cs };
                match e {
                    0 => parts.push(cs),
                    1 if c.is_one() => parts.push("T".into()),
                    1 => parts.push(format!("{cs} T")),
                    _ if c.is_one() => parts.push(format!("T^{{{e}}}")),
                    _ => parts.push(format!("{cs} T^{{{e}}}")),
                }
            }
            parts.join(" + ")
        };
        if self.den.is_one() {
            fmt_poly(&self.num)
        } else {
            format!("\\frac{{{}}}{{{}}}", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

/// Reduce a rational function in T over Q and normalize den[0] = 1 (or the
/// lowest nonzero den coefficient to 1 when den[0] = 0).
pub fn normalize_rational_t(num: Vec<Rat>, den: Vec<Rat>) -> (Vec<Rat>, Vec<Rat>) {
    let num_p = rat_vec_to_poly(&num);
    let den_p = rat_vec_to_poly(&den);
    let g = num_p.gcd(&den_p);
    let mut num_p = num_p.div_exact(&g);
    let mut den_p = den_p.div_exact(&g);
    let pivot = den_p
        .trailing_degree()
        .map(|d| den_p.coeff(d))
        .unwrap_or_else(Rat::one);
    num_p = num_p.scale(&pivot.recip());
    den_p = den_p.scale(&pivot.recip());
    (poly_to_rat_vec(&num_p), poly_to_rat_vec(&den_p))
}

fn rat_vec_to_poly(v: &[Rat]) -> PolyQ {
    PolyQ::from_coeffs(v.iter().enumerate().map(|(i, c)| (i as u32, c.clone())))
}

fn poly_to_rat_vec(p: &PolyQ) -> Vec<Rat> {
    match p.degree() {
        None => vec![],
        Some(d) => (0..=d).map(|e| p.coeff(e)).collect(),
    }
}

fn rat_gcd(a: &Rat, b: &Rat) -> Rat {
    use num_integer::Integer;
    // gcd of numerators over lcm of denominators.
    let num = a.numer().gcd(b.numer());
    let den = a.denom().lcm(b.denom());
    Rat::new(num, den)
}

impl Add for &RatFuncQT {
    type Output = RatFuncQT;
    fn add(self, rhs: &RatFuncQT) -> RatFuncQT {
        RatFuncQT::reduce(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl Sub for &RatFuncQT {
    type Output = RatFuncQT;
    fn sub(self, rhs: &RatFuncQT) -> RatFuncQT {
        self + &-rhs
    }
}

impl Mul for &RatFuncQT {
    type Output = RatFuncQT;
    fn mul(self, rhs: &RatFuncQT) -> RatFuncQT {
        RatFuncQT::reduce(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl Neg for &RatFuncQT {
    type Output = RatFuncQT;
    fn neg(self) -> RatFuncQT {
        RatFuncQT { num: self.num.scale(&Rat::from_int(-1)), den: self.den.clone() }
    }
}

impl fmt::Display for RatFuncQT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFuncQT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for RatFuncQT {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        fn poly_qt<S: Serializer>(p: &PolyQT, s: S) -> Result<S::Ok, S::Error> {
            // Keys are "q_exp,t_exp".
            let mut map = s.serialize_map(None)?;
            for (&t_exp, c) in p.coeffs() {
                for (&q_exp, v) in c.coeffs() {
                    map.serialize_entry(&format!("{q_exp},{t_exp}"), &v.to_string())?;
                }
            }
            map.end()
        }
        #[derive(Serialize)]
        struct Parts<'a> {
            #[serde(serialize_with = "poly_qt")]
            num: &'a PolyQT,
            #[serde(serialize_with = "poly_qt")]
            den: &'a PolyQT,
        }
        Parts { num: &self.num, den: &self.den }.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qt(q_exp: i64, t_exp: u32) -> RatFuncQT {
        RatFuncQT::laurent_monomial(Rat::one(), q_exp, t_exp)
    }

    /// 1/(1 - q^u T^m) as a RatFuncQT, u of either sign.
    fn geom(u: i64, m: u32) -> RatFuncQT {
        RatFuncQT::one().div(&(&RatFuncQT::one() - &qt(u, m))).unwrap()
    }

    #[test]
    fn clearing_negative_q_powers() {
        // 1/(1 - q^-1 T) = q/(q - T)
        let f = geom(-1, 1);
        let expect = qt(1, 0).div(&(&qt(1, 0) - &qt(0, 1))).unwrap();
        assert_eq!(f, expect);
    }

    #[test]
    fn expansion_of_geometric() {
        let f = geom(-1, 1); // sum q^-s T^s
        let coeffs = f.expand(6).unwrap();
        for (s, c) in coeffs.iter().enumerate() {
            assert_eq!(c, &RatFuncQ::q_pow(-(s as i64)), "coefficient {s}");
        }
        let at2 = f.expand_at(&Rat::from_int(2), 5).unwrap();
        assert_eq!(at2[3], Rat::new(1, 8));
    }

    #[test]
    fn t_rescaling() {
        // q/(q - T) under T -> qT becomes 1/(1 - T).
        let f = geom(-1, 1);
        let g = f.subst_t_scale(1);
        let expect = RatFuncQT::one().div(&(&RatFuncQT::one() - &qt(0, 1))).unwrap();
        assert_eq!(g, expect);
    }

    #[test]
    fn arithmetic_reduces() {
        // 1/(1-T) - 1/(1-T) = 0; (1-T^2)/(1-T) = 1+T.
        let one_minus_t = &RatFuncQT::one() - &qt(0, 1);
        let a = RatFuncQT::one().div(&one_minus_t).unwrap();
        assert!((&a - &a).is_zero());
        let frac = RatFuncQT::new(
            (&RatFuncQT::one() - &qt(0, 2)).num.clone(),
            one_minus_t.num.clone(),
        )
        .unwrap();
        let expect = &RatFuncQT::one() + &qt(0, 1);
        assert_eq!(frac, expect);
    }

    #[test]
    fn eval_q_normalizes() {
        // (1+T)/(1-5T^2) at q = 5 from (q+T... build directly.
        let f = geom(-2, 2); // 1/(1-q^-2 T^2) = q^2/(q^2-T^2)
        let (num, den) = f.eval_q(&Rat::from_int(2)).unwrap();
        assert_eq!(num, vec![Rat::one()]);
        assert_eq!(den, vec![Rat::one(), Rat::zero(), Rat::new(-1, 4)]);
    }
}

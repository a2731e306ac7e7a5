//! The formal ring of motivic values: finite sums of rational functions in q
//! times products of residue-class symbols. A motivic value denotes one real
//! number per local field of sufficiently large residue characteristic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Serialize, Serializer};

use super::poly::PolyQ;
use super::rat::Rat;
use super::ratfunc::RatFuncQ;
use super::residue::{CountMode, ResidueClass};
use super::QringError;

/// One normalized term: coefficient times a multiset of oracle-only class
/// symbols (polynomial-count classes are folded into the coefficient).
#[derive(Clone, PartialEq, Eq)]
pub struct MvTerm {
    pub coeff: RatFuncQ,
    pub classes: Vec<ResidueClass>,
}

/// An element of the ring of uniform measures. Terms are kept normalized:
/// classes sorted, like terms merged, zero terms dropped, terms sorted by
/// their class multiset.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MotivicValue {
    terms: Vec<MvTerm>,
}

impl MotivicValue {
    pub fn zero() -> Self {
        MotivicValue::default()
    }

    pub fn one() -> Self {
        MotivicValue::from_ratfunc(RatFuncQ::one())
    }

    pub fn from_ratfunc(coeff: RatFuncQ) -> Self {
        MotivicValue::from_terms(vec![MvTerm { coeff, classes: Vec::new() }])
    }

    pub fn from_rat(c: Rat) -> Self {
        MotivicValue::from_ratfunc(RatFuncQ::from_rat(c))
    }

    pub fn from_int(n: i64) -> Self {
        MotivicValue::from_ratfunc(RatFuncQ::from_int(n))
    }

    /// The symbol #Z for a class Z.
    pub fn from_class(class: ResidueClass) -> Self {
        MotivicValue::from_terms(vec![MvTerm {
            coeff: RatFuncQ::one(),
            classes: vec![class],
        }])
    }

    /// The symbol q.
    pub fn q() -> Self {
        MotivicValue::from_ratfunc(RatFuncQ::from_poly(PolyQ::q()))
    }

    pub fn q_pow(k: i64) -> Self {
        MotivicValue::from_ratfunc(RatFuncQ::q_pow(k))
    }

    /// Normalizing constructor.
    pub fn from_terms(terms: Vec<MvTerm>) -> Self {
        let mut out: Vec<MvTerm> = Vec::new();
        for mut term in terms {
            // Fold polynomial-count classes into the coefficient.
            let mut classes = Vec::new();
            for class in term.classes.drain(..) {
                match class.count_mode() {
                    CountMode::Polynomial(h) => {
                        term.coeff = &term.coeff * &RatFuncQ::from_poly(h.clone());
                    }
                    CountMode::OracleOnly => classes.push(class),
                }
            }
            classes.sort();
            term.classes = classes;
            if term.coeff.is_zero() {
                continue;
            }
            match out.iter_mut().find(|t| t.classes == term.classes) {
                Some(existing) => existing.coeff = &existing.coeff + &term.coeff,
                None => out.push(term),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        out.sort_by(|a, b| a.classes.cmp(&b.classes));
        MotivicValue { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[MvTerm] {
        &self.terms
    }

    /// The purely rational part, if no opaque class symbols remain.
    pub fn as_ratfunc(&self) -> Option<RatFuncQ> {
        match self.terms.len() {
            0 => Some(RatFuncQ::zero()),
            1 if self.terms[0].classes.is_empty() => Some(self.terms[0].coeff.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &RatFuncQ) -> MotivicValue {
        MotivicValue::from_terms(
            self.terms
                .iter()
                .map(|t| MvTerm { coeff: &t.coeff * c, classes: t.classes.clone() })
                .collect(),
        )
    }

    /// Largest validity threshold over the class symbols (2 when none).
    pub fn validity_threshold(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|t| t.classes.iter().map(ResidueClass::validity_threshold))
            .max()
            .unwrap_or(2)
    }

    /// Interpret at K = Q_p: substitute q := p and count every class symbol
    /// over F_p.
    pub fn eval(&self, p: u64) -> Result<Rat, QringError> {
        let x = Rat::from_int(p as i64);
        let mut acc = Rat::zero();
        for term in &self.terms {
            let mut v = term.coeff.eval(&x)?;
            for class in &term.classes {
                v = v * class.count_at(p)?;
            }
            acc += &v;
        }
        Ok(acc)
    }

    pub fn latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            out.push_str(&term.coeff.latex());
            for class in &term.classes {
                out.push_str(&format!(" \\cdot \\#Z_{{\\mathrm{{{}}}}}", class.id()));
            }
        }
        out
    }
}

impl Add for &MotivicValue {
    type Output = MotivicValue;
    fn add(self, rhs: &MotivicValue) -> MotivicValue {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        MotivicValue::from_terms(terms)
    }
}

impl Sub for &MotivicValue {
    type Output = MotivicValue;
    fn sub(self, rhs: &MotivicValue) -> MotivicValue {
        self + &-rhs
    }
}

impl Neg for &MotivicValue {
    type Output = MotivicValue;
    fn neg(self) -> MotivicValue {
        MotivicValue {
            terms: self
                .terms
                .iter()
                .map(|t| MvTerm { coeff: -&t.coeff, classes: t.classes.clone() })
                .collect(),
        }
    }
}

impl Mul for &MotivicValue {
    type Output = MotivicValue;
    fn mul(self, rhs: &MotivicValue) -> MotivicValue {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let mut classes = a.classes.clone();
                classes.extend(b.classes.iter().cloned());
                terms.push(MvTerm { coeff: &a.coeff * &b.coeff, classes });
            }
        }
        MotivicValue::from_terms(terms)
    }
}

impl fmt::Display for MotivicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", term.coeff)?;
            for class in &term.classes {
                write!(f, "*[{}]", class.id())?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MotivicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for MotivicValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct TermJson<'a> {
            #[serde(serialize_with = "super::ratfunc::serialize_poly")]
            coeff_num: &'a PolyQ,
            #[serde(serialize_with = "super::ratfunc::serialize_poly")]
            coeff_den: &'a PolyQ,
            classes: Vec<&'a str>,
        }
        #[derive(Serialize)]
        struct ValueJson<'a> {
            terms: Vec<TermJson<'a>>,
        }
        let v = ValueJson {
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    coeff_num: t.coeff.num(),
                    coeff_den: t.coeff.den(),
                    classes: t.classes.iter().map(ResidueClass::id).collect(),
                })
                .collect(),
        };
        v.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qring::residue::catalog;
    use crate::qring::Formula;

    fn q() -> MotivicValue {
        MotivicValue::q()
    }

    /// A deliberately oracle-only squares class, distinct id, same set.
    fn sq_oracle() -> ResidueClass {
        ResidueClass::new(
            "sq_oracle",
            1,
            catalog::nth_powers(2).definition().clone(),
            CountMode::OracleOnly,
            3,
        )
    }

    #[test]
    fn additive_inverse() {
        assert!((&q() + &-&q()).is_zero());
    }

    #[test]
    fn like_terms_merge() {
        let z = MotivicValue::from_class(sq_oracle());
        let t = z.scale(&RatFuncQ::q_pow(-1));
        let sum = &t + &t;
        assert_eq!(sum, t.scale(&RatFuncQ::from_int(2)));
        assert_eq!(sum.terms().len(), 1);
    }

    #[test]
    fn polynomial_classes_fold() {
        // [rf] has polynomial count q, so it folds and equals the symbol q.
        let rf = MotivicValue::from_class(catalog::full_rf());
        assert_eq!(rf, q());
        assert_eq!(rf.eval(5).unwrap(), Rat::from_int(5));
    }

    #[test]
    fn eval_counts_oracle_classes() {
        let z = MotivicValue::from_class(sq_oracle());
        assert_eq!(z.eval(7).unwrap(), Rat::from_int(3));
        assert!(z.eval(2).is_err());
    }

    #[test]
    fn eval_is_multiplicative() {
        let a = &MotivicValue::from_class(sq_oracle()) + &MotivicValue::q_pow(-1);
        let b = &q() - &MotivicValue::from_int(3);
        let prod = &a * &b;
        for p in [5u64, 7, 11] {
            let lhs = prod.eval(p).unwrap();
            let rhs = a.eval(p).unwrap() * b.eval(p).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn distinct_symbols_do_not_merge() {
        // Squares and non-squares have equal counts for p >= 3 but must stay
        // distinct symbols.
        let nonsq = ResidueClass::new(
            "nonsq",
            1,
            Formula::and(vec![
                Formula::not(catalog::nth_powers(2).definition().clone()),
                catalog::units().definition().clone(),
            ]),
            CountMode::OracleOnly,
            3,
        );
        let a = MotivicValue::from_class(sq_oracle());
        let b = MotivicValue::from_class(nonsq);
        assert_ne!(a, b);
        assert_eq!(a.eval(11).unwrap(), b.eval(11).unwrap());
    }
}

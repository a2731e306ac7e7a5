//! Residue-field classes: named definable subsets of RF^r whose cardinality
//! enters motivic values either as an explicit polynomial in q or as an
//! opaque symbol counted by enumeration.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::formula::{Atom, Formula, IntPoly};
use super::poly::PolyQ;
use super::rat::Rat;
use super::QringError;

/// How the cardinality #Z(F_p) of a class is obtained.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum CountMode {
    /// #Z(F_p) = h(p) for every prime p above the validity threshold.
    Polynomial(PolyQ),
    /// Counted by exhaustive enumeration of the defining formula.
    OracleOnly,
}

/// A definable subset of RF^arity. Classes are compared by definition, so
/// structurally identical classes merge during normalization while distinct
/// opaque symbols are kept apart.
#[derive(Clone)]
pub struct ResidueClass {
    inner: Arc<ClassInner>,
}

impl Eq for ResidueClass {}

struct ClassInner {
    id: String,
    arity: u32,
    definition: Formula,
    count_mode: CountMode,
    validity_threshold: u32,
}

impl PartialEq for ResidueClass {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.arity == other.inner.arity
                && self.inner.definition == other.inner.definition)
    }
}

impl PartialOrd for ResidueClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ResidueClass {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.inner
            .id
            .cmp(&other.inner.id)
            .then_with(|| self.inner.arity.cmp(&other.inner.arity))
            .then_with(|| self.inner.definition.cmp(&other.inner.definition))
    }
}

impl std::hash::Hash for ResidueClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.inner.arity.hash(state);
        self.inner.definition.hash(state);
    }
}

impl ResidueClass {
    pub fn new(
        id: impl Into<String>,
        arity: u32,
        definition: Formula,
        count_mode: CountMode,
        validity_threshold: u32,
    ) -> Self {
        assert!(definition.vars() <= arity, "formula uses more variables than the arity");
        ResidueClass {
            inner: Arc::new(ClassInner {
                id: id.into(),
                arity,
                definition,
                count_mode,
                validity_threshold: validity_threshold.max(2),
            }),
        }
    }

    pub fn id(&self) -> &str {
        &self.inner.id
    }

    pub fn arity(&self) -> u32 {
        self.inner.arity
    }

    pub fn definition(&self) -> &Formula {
        &self.inner.definition
    }

    pub fn count_mode(&self) -> &CountMode {
        &self.inner.count_mode
    }

    pub fn validity_threshold(&self) -> u32 {
        self.inner.validity_threshold
    }

    pub fn is_oracle_only(&self) -> bool {
        self.inner.count_mode == CountMode::OracleOnly
    }

    /// Exact cardinality over F_p by exhaustive enumeration of the defining
    /// formula (regardless of count mode; used to validate Polynomial modes).
    pub fn count_by_enumeration(&self, p: u64) -> u64 {
        let compiled = self.inner.definition.compile(p);
        let arity = self.inner.arity as usize;
        let mut args = vec![0u64; arity];
        let mut count = 0u64;
        loop {
            if compiled.eval(&args) {
                count += 1;
            }
            // Odometer over F_p^arity.
            let mut i = 0;
            loop {
                if i == arity {
                    return count;
                }
                args[i] += 1;
                if args[i] < p {
                    break;
                }
                args[i] = 0;
                i += 1;
            }
        }
    }

    /// Cardinality at p, honoring the count mode.
    pub fn count_at(&self, p: u64) -> Result<Rat, QringError> {
        if p < self.inner.validity_threshold as u64 {
            return Err(QringError::ThresholdViolation {
                p,
                threshold: self.inner.validity_threshold,
                class: self.inner.id.clone(),
            });
        }
        match &self.inner.count_mode {
            CountMode::Polynomial(h) => Ok(h.eval(&Rat::from_int(p as i64))),
            CountMode::OracleOnly => Ok(Rat::from_int(self.count_by_enumeration(p) as i64)),
        }
    }

    /// Membership of a point of F_p^arity.
    pub fn contains(&self, point: &[u64], p: u64) -> bool {
        self.inner.definition.compile(p).eval(point)
    }

    /// Membership with a precompiled formula.
    pub fn compile(&self, p: u64) -> super::formula::CompiledFormula {
        self.inner.definition.compile(p)
    }

    /// Intersection of two arity-1 classes (used for ac-refinements).
    /// `units` acts as the identity since every ac class excludes 0.
    pub fn intersect(&self, other: &ResidueClass) -> ResidueClass {
        assert_eq!(self.arity(), 1);
        assert_eq!(other.arity(), 1);
        if self == other || other.id() == "units" {
            return self.clone();
        }
        if self.id() == "units" {
            return other.clone();
        }
        let definition = Formula::and(vec![
            self.inner.definition.clone(),
            other.inner.definition.clone(),
        ]);
        ResidueClass::new(
            format!("{}&{}", self.id(), other.id()),
            1,
            definition,
            CountMode::OracleOnly,
            self.validity_threshold().max(other.validity_threshold()),
        )
    }

    /// Pullback under multiplication: { t : factor * t in self }, for a
    /// nonzero rational factor. Cardinality is preserved (t -> factor*t is a
    /// bijection of F_p for p not dividing factor), so the count mode
    /// carries over; the threshold grows by the primes of the factor.
    pub fn multiplicative_pullback(&self, factor: &Rat) -> ResidueClass {
        assert_eq!(self.arity(), 1);
        assert!(!factor.is_zero());
        if factor.is_one() {
            return self.clone();
        }
        let definition = substitute_unary(&self.inner.definition, factor, &Rat::zero());
        let mut threshold = self.validity_threshold();
        for part in [factor.numer(), factor.denom()] {
            if let Some(lpf) = largest_prime_factor(part) {
                threshold = threshold.max(lpf.saturating_add(1) as u32);
            }
        }
        ResidueClass::new(
            format!("{}/[{}]", self.id(), factor),
            1,
            definition,
            self.inner.count_mode.clone(),
            threshold,
        )
    }
}

/// Substitute t -> a*t + b into every atom of a unary formula, clearing
/// denominators. Valid for primes not dividing the cleared constants, which
/// callers account for in thresholds.
pub fn substitute_unary(f: &Formula, a: &Rat, b: &Rat) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Not(inner) => Formula::not(substitute_unary(inner, a, b)),
        Formula::And(fs) => Formula::and(fs.iter().map(|f| substitute_unary(f, a, b)).collect()),
        Formula::Or(fs) => Formula::or(fs.iter().map(|f| substitute_unary(f, a, b)).collect()),
        Formula::Atom(atom) => {
            let (poly, n) = match atom {
                Atom::Eq(p) | Atom::Neq(p) => (p, None),
                Atom::NthPow { n, poly } => (poly, Some(*n)),
            };
            let (cleared, denom_power) = poly.subst_affine_cleared(0, a, b);
            Formula::Atom(match (atom, n) {
                (Atom::Eq(_), _) => Atom::Eq(cleared),
                (Atom::Neq(_), _) => Atom::Neq(cleared),
                (Atom::NthPow { .. }, Some(n)) => {
                    // f((at+b)) = cleared / d with d = denom_power; a nonzero
                    // n-th power iff cleared * d^(n-1) is one.
                    let scaled = cleared.mul_scalar(&denom_power.pow(n - 1));
                    Atom::NthPow { n, poly: scaled }
                }
                _ => unreachable!(),
            })
        }
    }
}

/// Largest prime factor via trial division. Returns None for 0, +-1.
/// Values with a factor that survives trial division up to 2^20 fall back to
/// the remaining cofactor, which is an upper bound on its prime factors.
pub fn largest_prime_factor(n: &BigInt) -> Option<u64> {
    let mut n = n.abs();
    let one: BigInt = BigInt::from(1);
    if n <= one {
        return None;
    }
    let mut largest = 0u64;
    let mut d = 2u64;
    while d <= 1 << 20 {
        let db = BigInt::from(d);
        if &db * &db > n {
            break;
        }
        while (&n % &db).is_zero() {
            largest = largest.max(d);
            n /= &db;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > one {
        use num_traits::ToPrimitive;
        largest = largest.max(n.to_u64().unwrap_or(u64::MAX));
    }
    Some(largest)
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.inner.id)
    }
}

impl fmt::Debug for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.inner.id)
    }
}

/// The built-in class catalog. Only classes with genuinely polynomial counts
/// carry a Polynomial mode; power classes for n >= 3 are oracle-only because
/// their count (q-1)/gcd(n, q-1) is not a polynomial in q.
pub mod catalog {
    use super::*;

    fn t() -> IntPoly {
        IntPoly::var(1, 0)
    }

    /// The full residue field, count q.
    pub fn full_rf() -> ResidueClass {
        ResidueClass::new("rf", 1, Formula::True, CountMode::Polynomial(PolyQ::q()), 2)
    }

    /// The units RF^x, count q - 1.
    pub fn units() -> ResidueClass {
        ResidueClass::new(
            "units",
            1,
            Formula::Atom(Atom::Neq(t())),
            CountMode::Polynomial(PolyQ::from_coeffs([
                (1, Rat::one()),
                (0, Rat::from_int(-1)),
            ])),
            2,
        )
    }

    /// The singleton {1}, count 1.
    pub fn one() -> ResidueClass {
        let poly = t().sub(&IntPoly::constant(1, 1));
        ResidueClass::new(
            "one",
            1,
            Formula::Atom(Atom::Eq(poly)),
            CountMode::Polynomial(PolyQ::one()),
            2,
        )
    }

    /// The singleton {c} for a nonzero rational constant, count 1.
    pub fn singleton(c: &Rat) -> ResidueClass {
        assert!(!c.is_zero(), "ac classes exclude 0");
        if c.is_one() {
            return one();
        }
        // den*t - num = 0
        let poly = t()
            .mul_scalar(c.denom())
            .sub(&IntPoly::constant(1, c.numer().clone()));
        let mut threshold = 2;
        for part in [c.numer(), c.denom()] {
            if let Some(lpf) = largest_prime_factor(part) {
                threshold = threshold.max(lpf.saturating_add(1) as u32);
            }
        }
        ResidueClass::new(
            format!("is({c})"),
            1,
            Formula::Atom(Atom::Eq(poly)),
            CountMode::Polynomial(PolyQ::one()),
            threshold,
        )
    }

    /// Nonzero n-th powers. Polynomial count (q-1)/2 for n = 2 (valid for
    /// p >= 3), oracle-only for n >= 3. Threshold n + 1 comes from the
    /// Hensel characterization of n-th powers, which needs p > n.
    pub fn nth_powers(n: u32) -> ResidueClass {
        assert!(n >= 2);
        let definition = Formula::Atom(Atom::NthPow { n, poly: t() });
        let (id, mode): (String, CountMode) = match n {
            2 => (
                "sq_nz".into(),
                CountMode::Polynomial(PolyQ::from_coeffs([
                    (1, Rat::new(1, 2)),
                    (0, Rat::new(-1, 2)),
                ])),
            ),
            3 => ("cube_nz".into(), CountMode::OracleOnly),
            n => (format!("pow{n}_nz"), CountMode::OracleOnly),
        };
        ResidueClass::new(id, 1, definition, mode, n + 1)
    }

    /// Resolve a class name from the DSL. Accepts the catalog names plus
    /// `powN_nz` for N >= 2.
    pub fn by_name(name: &str) -> Option<ResidueClass> {
        match name {
            "rf" => Some(full_rf()),
            "units" => Some(units()),
            "one" => Some(one()),
            "sq_nz" => Some(nth_powers(2)),
            "cube_nz" => Some(nth_powers(3)),
            _ => {
                let n: u32 = name.strip_prefix("pow")?.strip_suffix("_nz")?.parse().ok()?;
                (n >= 2).then(|| nth_powers(n))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_counts_match_enumeration() {
        for p in [3u64, 5, 7, 11, 13] {
            for class in [catalog::full_rf(), catalog::units(), catalog::one()] {
                let poly_count = class.count_at(p).unwrap();
                assert_eq!(poly_count, Rat::from_int(class.count_by_enumeration(p) as i64));
            }
            let sq = catalog::nth_powers(2);
            assert_eq!(sq.count_at(p).unwrap(), Rat::from_int(sq.count_by_enumeration(p) as i64));
        }
    }

    #[test]
    fn squares_mod_7() {
        let sq = catalog::nth_powers(2);
        assert_eq!(sq.count_by_enumeration(7), 3);
        assert!(sq.contains(&[2], 7));
        assert!(!sq.contains(&[3], 7));
        assert!(!sq.contains(&[0], 7));
    }

    #[test]
    fn cubes_mod_7() {
        // (7-1)/gcd(3,6) = 2 nonzero cubes: {1, 6}.
        let cubes = catalog::nth_powers(3);
        assert_eq!(cubes.count_by_enumeration(7), 2);
        assert!(cubes.is_oracle_only());
        assert_eq!(cubes.validity_threshold(), 4);
    }

    #[test]
    fn threshold_enforced() {
        let sq = catalog::nth_powers(2);
        assert!(matches!(sq.count_at(2), Err(QringError::ThresholdViolation { .. })));
    }

    #[test]
    fn intersection_with_units_is_identity() {
        let sq = catalog::nth_powers(2);
        assert_eq!(sq.intersect(&catalog::units()), sq);
        assert_eq!(catalog::units().intersect(&sq), sq);
        let both = sq.intersect(&catalog::one());
        // 1 is a square, so the intersection counts 1 element.
        assert_eq!(both.count_by_enumeration(7), 1);
        assert!(both.is_oracle_only());
    }

    #[test]
    fn pullback_preserves_count() {
        // {t : 3t is a square mod 7}: bijection, still 3 elements.
        let pulled = catalog::nth_powers(2).multiplicative_pullback(&Rat::from_int(3));
        assert_eq!(pulled.count_by_enumeration(7), 3);
        assert_eq!(pulled.count_at(7).unwrap(), Rat::from_int(3));
        assert!(pulled.validity_threshold() >= 4);
        // And the membership is the translated set.
        for t in 0..7u64 {
            let member = pulled.contains(&[t], 7);
            let expect = catalog::nth_powers(2).contains(&[(3 * t) % 7], 7);
            assert_eq!(member, expect);
        }
    }

    #[test]
    fn classes_compare_by_definition() {
        let a = catalog::nth_powers(2);
        let b = ResidueClass::new(
            "renamed",
            1,
            a.definition().clone(),
            CountMode::OracleOnly,
            3,
        );
        assert_eq!(a, b);
        let c = catalog::nth_powers(3);
        assert_ne!(a, c);
    }
}

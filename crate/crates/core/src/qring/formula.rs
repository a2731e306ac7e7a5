//! Multivariate integer polynomials and quantifier-free formulas over the
//! residue field, the defining language of residue classes.
//!
//! Atoms are polynomial equations `f = 0`, inequations `f != 0`, and the
//! n-th-power predicate `f in (F_p^x)^n` needed for the Hensel cell
//! constructors (squares and higher powers are not equation-definable by a
//! single p-independent formula, so the predicate is primitive here and is
//! evaluated by enumeration).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rat::{mul_mod, Rat};

/// A sparse multivariate polynomial with integer coefficients. Keys are
/// exponent vectors; the number of variables is fixed per polynomial.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntPoly {
    vars: u32,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPoly {
    pub fn zero(vars: u32) -> Self {
        IntPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: u32, c: impl Into<BigInt>) -> Self {
        let mut p = IntPoly::zero(vars);
        p.add_term(vec![0; vars as usize], c.into());
        p
    }

    pub fn var(vars: u32, index: u32) -> Self {
        assert!(index < vars);
        let mut exps = vec![0; vars as usize];
        exps[index as usize] = 1;
        let mut p = IntPoly::zero(vars);
        p.add_term(exps, BigInt::one());
        p
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<&BigInt> {
        if self.is_zero() {
            return None;
        }
        self.is_constant().then(|| self.terms.values().next().unwrap())
    }

    pub fn add_term(&mut self, exps: Vec<u32>, coeff: BigInt) {
        assert_eq!(exps.len(), self.vars as usize);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.vars, rhs.vars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &IntPoly) -> IntPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &IntPoly) -> IntPoly {
        assert_eq!(self.vars, rhs.vars);
        let mut out = IntPoly::zero(self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let exps: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(exps, c1 * c2);
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero(self.vars);
        }
        IntPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> IntPoly {
        let mut base = self.clone();
        let mut acc = IntPoly::constant(self.vars, 1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, index: u32) -> u32 {
        self.terms.keys().map(|e| e[index as usize]).max().unwrap_or(0)
    }

    /// Reduce coefficients mod m for fast repeated evaluation.
    pub fn reduced(&self, m: u64) -> ReducedPoly {
        let mb = BigInt::from(m);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), c.mod_floor(&mb).to_u64().unwrap()))
            .filter(|(_, c)| *c != 0)
            .collect();
        ReducedPoly { vars: self.vars, terms, modulus: m }
    }

    /// Exact evaluation at rational arguments.
    pub fn eval_rat(&self, args: &[Rat]) -> Rat {
        assert_eq!(args.len(), self.vars as usize);
        let mut acc = Rat::zero();
        for (exps, c) in &self.terms {
            let mut term = Rat::from_int(c.clone());
            for (x, &e) in args.iter().zip(exps) {
                if e > 0 {
                    term = term * x.pow(e as i32);
                }
            }
            acc += &term;
        }
        acc
    }

    /// Substitute variable `index` by the affine rational map
    /// `x -> (a*x + b) / d` and clear denominators: returns the integer
    /// polynomial d^deg * f(..., (a x + b)/d, ...), where deg is the degree
    /// of f in that variable.
    pub fn subst_affine_cleared(&self, index: u32, a: &Rat, b: &Rat) -> (IntPoly, BigInt) {
        let deg = self.degree_in(index);
        // Common denominator d of a and b.
        let d: BigInt = a.denom().lcm(b.denom());
        let an = a.numer() * (&d / a.denom());
        let bn = b.numer() * (&d / b.denom());
        // d^deg * f = sum_e coeff * (an x + bn)^e * d^(deg - e) * rest.
        let lin = {
            let mut p = IntPoly::zero(self.vars);
            let mut exps = vec![0; self.vars as usize];
            exps[index as usize] = 1;
            p.add_term(exps, an);
            p.add_term(vec![0; self.vars as usize], bn);
            p
        };
        let mut out = IntPoly::zero(self.vars);
        for (exps, c) in &self.terms {
            let e = exps[index as usize];
            let mut rest = exps.clone();
            rest[index as usize] = 0;
            let mut term = IntPoly::zero(self.vars);
            term.add_term(rest, c * d.pow(deg - e));
            out = out.add(&term.mul(&lin.pow(e)));
        }
        (out, d.pow(deg))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in self.terms.iter().rev() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let is_const = exps.iter().all(|&e| e == 0);
            if !mag.is_one() || is_const {
                write!(f, "{mag}")?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut first_var = true;
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                let name = if self.vars == 1 { "x".to_string() } else { format!("x{i}") };
                if e == 1 {
                    write!(f, "{name}")?;
                } else {
                    write!(f, "{name}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An integer polynomial with coefficients reduced mod a fixed modulus.
pub struct ReducedPoly {
    vars: u32,
    terms: Vec<(Vec<u32>, u64)>,
    modulus: u64,
}

impl ReducedPoly {
    pub fn eval(&self, args: &[u64]) -> u64 {
        debug_assert_eq!(args.len(), self.vars as usize);
        let m = self.modulus;
        let mut acc: u64 = 0;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (&x, &e) in args.iter().zip(exps) {
                for _ in 0..e {
                    t = mul_mod(t, x % m, m);
                }
            }
            acc = (acc + t) % m;
        }
        acc
    }
}

/// A quantifier-free formula over residue-field points.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// f(x) = 0
    Eq(IntPoly),
    /// f(x) != 0
    Neq(IntPoly),
    /// f(x) is a nonzero n-th power
    NthPow { n: u32, poly: IntPoly },
}

impl Atom {
    fn vars(&self) -> u32 {
        match self {
            Atom::Eq(p) | Atom::Neq(p) => p.vars(),
            Atom::NthPow { poly, .. } => poly.vars(),
        }
    }
}

impl Formula {
    pub fn and(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::True,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::False,
            1 => flat.pop().unwrap(),
            _ => Formula::Or(flat),
        }
    }

    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    /// Number of free variables (max over atoms; constants allowed).
    pub fn vars(&self) -> u32 {
        match self {
            Formula::True | Formula::False => 0,
            Formula::Atom(a) => a.vars(),
            Formula::Not(f) => f.vars(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::vars).max().unwrap_or(0),
        }
    }

    /// Largest n over NthPow atoms (1 when none).
    pub fn max_power(&self) -> u32 {
        match self {
            Formula::True | Formula::False => 1,
            Formula::Atom(Atom::NthPow { n, .. }) => *n,
            Formula::Atom(_) => 1,
            Formula::Not(f) => f.max_power(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::max_power).max().unwrap_or(1)
            }
        }
    }

    /// Compile against a fixed prime for fast repeated evaluation.
    pub fn compile(&self, p: u64) -> CompiledFormula {
        let mut power_sets = std::collections::HashMap::new();
        let node = compile_node(self, p, &mut power_sets);
        CompiledFormula { node, power_sets }
    }

    /// Short deterministic rendering, used for derived class ids.
    pub fn short_name(&self) -> String {
        match self {
            Formula::True => "T".into(),
            Formula::False => "F".into(),
            Formula::Atom(Atom::Eq(p)) => format!("{p}=0"),
            Formula::Atom(Atom::Neq(p)) => format!("{p}!=0"),
            Formula::Atom(Atom::NthPow { n, poly }) => format!("pow{n}({poly})"),
            Formula::Not(f) => format!("!({})", f.short_name()),
            Formula::And(fs) => {
                fs.iter().map(Formula::short_name).collect::<Vec<_>>().join(" & ")
            }
            Formula::Or(fs) => {
                let inner = fs.iter().map(Formula::short_name).collect::<Vec<_>>().join(" | ");
                format!("({inner})")
            }
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.short_name())
    }
}

/// A formula specialized to one prime: coefficients reduced, power sets
/// tabulated.
pub struct CompiledFormula {
    node: CNode,
    power_sets: std::collections::HashMap<u32, std::collections::HashSet<u64>>,
}

enum CNode {
    True,
    False,
    Eq(ReducedPoly),
    Neq(ReducedPoly),
    NthPow(u32, ReducedPoly),
    Not(Box<CNode>),
    And(Vec<CNode>),
    Or(Vec<CNode>),
}

fn compile_node(
    f: &Formula,
    p: u64,
    power_sets: &mut std::collections::HashMap<u32, std::collections::HashSet<u64>>,
) -> CNode {
    match f {
        Formula::True => CNode::True,
        Formula::False => CNode::False,
        Formula::Not(inner) => CNode::Not(Box::new(compile_node(inner, p, power_sets))),
        Formula::And(fs) => CNode::And(fs.iter().map(|f| compile_node(f, p, power_sets)).collect()),
        Formula::Or(fs) => CNode::Or(fs.iter().map(|f| compile_node(f, p, power_sets)).collect()),
        Formula::Atom(Atom::Eq(poly)) => CNode::Eq(poly.reduced(p)),
        Formula::Atom(Atom::Neq(poly)) => CNode::Neq(poly.reduced(p)),
        Formula::Atom(Atom::NthPow { n, poly }) => {
            power_sets.entry(*n).or_insert_with(|| nth_power_set(*n, p));
            CNode::NthPow(*n, poly.reduced(p))
        }
    }
}

impl CompiledFormula {
    pub fn eval(&self, args: &[u64]) -> bool {
        self.eval_node(&self.node, args)
    }

    fn eval_node(&self, node: &CNode, args: &[u64]) -> bool {
        match node {
            CNode::True => true,
            CNode::False => false,
            CNode::Eq(p) => p.eval(args) == 0,
            CNode::Neq(p) => p.eval(args) != 0,
            CNode::NthPow(n, p) => {
                let v = p.eval(args);
                v != 0 && self.power_sets[n].contains(&v)
            }
            CNode::Not(inner) => !self.eval_node(inner, args),
            CNode::And(fs) => fs.iter().all(|f| self.eval_node(f, args)),
            CNode::Or(fs) => fs.iter().any(|f| self.eval_node(f, args)),
        }
    }
}

/// The set { t^n : t in F_p^x }.
pub fn nth_power_set(n: u32, p: u64) -> std::collections::HashSet<u64> {
    let mut out = std::collections::HashSet::new();
    for t in 1..p {
        out.insert(super::rat::pow_mod(t, n as u64, p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_square_predicate() {
        // squares mod 7: {1, 2, 4}
        let f = Formula::Atom(Atom::NthPow { n: 2, poly: IntPoly::var(1, 0) });
        let c = f.compile(7);
        let squares: Vec<u64> = (0..7).filter(|&t| c.eval(&[t])).collect();
        assert_eq!(squares, vec![1, 2, 4]);
    }

    #[test]
    fn affine_substitution_clears_denominators() {
        // f(x) = x^2 + 1; substitute x -> (2x + 1/3): 9 f = (6x+1)^2 + 9.
        let mut f = IntPoly::var(1, 0).pow(2);
        f = f.add(&IntPoly::constant(1, 1));
        let (g, d) = f.subst_affine_cleared(0, &Rat::from_int(2), &Rat::new(1, 3));
        assert_eq!(d, BigInt::from(9));
        let mut expect = {
            let mut lin = IntPoly::var(1, 0).mul_scalar(&BigInt::from(6));
            lin = lin.add(&IntPoly::constant(1, 1));
            lin.pow(2)
        };
        expect = expect.add(&IntPoly::constant(1, 9));
        assert_eq!(g, expect);
    }

    #[test]
    fn boolean_simplification() {
        let t = Formula::True;
        let f = Formula::False;
        assert_eq!(Formula::and(vec![t.clone(), t.clone()]), Formula::True);
        assert_eq!(Formula::and(vec![t.clone(), f.clone()]), Formula::False);
        assert_eq!(Formula::or(vec![f.clone(), f.clone()]), Formula::False);
        assert_eq!(Formula::not(Formula::not(t.clone())), Formula::True);
    }

    #[test]
    fn reduced_eval_matches_exact() {
        let f = {
            let x = IntPoly::var(2, 0);
            let y = IntPoly::var(2, 1);
            x.pow(2).mul(&y).sub(&y.mul_scalar(&BigInt::from(3))).add(&IntPoly::constant(2, 7))
        };
        let red = f.reduced(11);
        for x in 0..11u64 {
            for y in 0..11u64 {
                let exact = f.eval_rat(&[Rat::from_int(x as i64), Rat::from_int(y as i64)]);
                let m = exact.numer().mod_floor(&BigInt::from(11)).to_u64().unwrap();
                assert_eq!(red.eval(&[x, y]), m);
            }
        }
    }
}

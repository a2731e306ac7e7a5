//! Closed-form rational generating functions for step-linear sequences:
//! exact values of sums of the shape
//!
//! ```text
//!   sum over s in a range, s = lambda mod m, of  s^a * q^(e(s)) * T^s
//! ```
//!
//! where the exponent `e` is eventually affine on congruence classes. Sums
//! in `T` are formal power series and always rational; `T`-free sums in `q`
//! converge for q > 1 exactly when every infinite branch has negative slope.

use num_integer::Integer;
use thiserror::Error;

use crate::qring::{
    MotivicValue, MvTerm, PolyQ, QringError, Rat, RatFuncQ, RatFuncQT, ResidueClass,
};
use crate::qring::{CountMode, PolyQT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresburgerError {
    /// An infinite branch with nonnegative slope in a T-free q-sum.
    #[error("divergent sum: infinite branch with q-exponent slope {slope} >= 0")]
    Divergent { slope: i64 },
    #[error(transparent)]
    Qring(#[from] QringError),
}

/// An integer affine form `a*j + b` in the branch index `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub a: i64,
    pub b: i64,
}

impl Affine {
    pub fn constant(b: i64) -> Self {
        Affine { a: 0, b }
    }

    pub fn eval(&self, j: i64) -> i64 {
        self.a * j + self.b
    }
}

/// An eventually affine function N -> Z: explicit values below a threshold,
/// then one affine branch per residue class. On the branch for `rho mod m`
/// the value at `s = rho + m*j` is `a*j + b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepLinear {
    prefix: Vec<i64>,
    modulus: u32,
    branches: Vec<Affine>,
}

impl StepLinear {
    pub fn new(prefix: Vec<i64>, modulus: u32, branches: Vec<Affine>) -> Self {
        assert!(modulus >= 1);
        assert_eq!(branches.len(), modulus as usize);
        StepLinear { prefix, modulus, branches }
    }

    pub fn constant(c: i64) -> Self {
        StepLinear::new(Vec::new(), 1, vec![Affine::constant(c)])
    }

    /// The affine function u*s + w of s itself.
    pub fn affine_in_s(u: i64, w: i64) -> Self {
        StepLinear::new(Vec::new(), 1, vec![Affine { a: u, b: w }])
    }

    /// -ceil(s/n), the exponent of the measure of n-th power preimages.
    pub fn neg_ceil_div(n: u32) -> Self {
        assert!(n >= 1);
        let branches = (0..n)
            .map(|rho| Affine { a: -1, b: if rho > 0 { -1 } else { 0 } })
            .collect();
        StepLinear::new(Vec::new(), n, branches)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn threshold(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn branch(&self, rho: u32) -> Affine {
        self.branches[(rho % self.modulus) as usize]
    }

    pub fn eval(&self, s: u64) -> i64 {
        if (s as usize) < self.prefix.len() {
            return self.prefix[s as usize];
        }
        let rho = (s % self.modulus as u64) as u32;
        let j = (s / self.modulus as u64) as i64;
        self.branches[rho as usize].eval(j)
    }

    /// Pointwise `mult * self + offset`.
    pub fn affine_transform(&self, mult: i64, offset: i64) -> StepLinear {
        StepLinear {
            prefix: self.prefix.iter().map(|v| mult * v + offset).collect(),
            modulus: self.modulus,
            branches: self
                .branches
                .iter()
                .map(|f| Affine { a: mult * f.a, b: mult * f.b + offset })
                .collect(),
        }
    }

    /// Override finitely many initial values.
    pub fn with_prefix(mut self, prefix: Vec<i64>) -> StepLinear {
        self.prefix = prefix;
        self
    }
}

/// One summation request: `sum s^a q^(e(s)) T^s` over a congruence class
/// intersected with a range.
#[derive(Debug, Clone)]
pub struct SeriesTerm {
    pub s_power: u32,
    pub q_exponent: StepLinear,
    /// (lambda, m): restrict to s = lambda mod m.
    pub congruence: (u32, u32),
    /// [lo, hi]; None is an infinite upper end.
    pub range: (u64, Option<u64>),
}

impl SeriesTerm {
    pub fn full(s_power: u32, q_exponent: StepLinear) -> Self {
        SeriesTerm { s_power, q_exponent, congruence: (0, 1), range: (0, None) }
    }

    fn admissible(&self, s: u64) -> bool {
        let (lambda, m) = self.congruence;
        let (lo, hi) = self.range;
        s >= lo && hi.is_none_or(|h| s <= h) && s % m as u64 == lambda as u64
    }

    /// Direct evaluation of the summand at one s (the term-by-term oracle
    /// that closed forms are checked against).
    pub fn summand(&self, s: u64) -> RatFuncQ {
        if !self.admissible(s) {
            return RatFuncQ::zero();
        }
        let sa = Rat::from_int(s as i64).pow(self.s_power as i32);
        RatFuncQ::q_pow(self.q_exponent.eval(s)).scale(&sa)
    }
}

/// Eulerian numerators: G_k(y) = sum_{j>=0} j^k y^j = A_k(y) / (1-y)^(k+1).
/// A_0 = 1 and A_k = y * (A'_{k-1} * (1-y) + k * A_{k-1}).
fn eulerian_numerator(k: u32) -> PolyQ {
    let one_minus_y = PolyQ::from_coeffs([(0, Rat::one()), (1, Rat::from_int(-1))]);
    let y = PolyQ::q();
    let mut a = PolyQ::one();
    for i in 1..=k {
        let da = a.derivative();
        a = &y * &(&(&da * &one_minus_y) + &a.scale(&Rat::from_int(i as i64)));
    }
    a
}

/// (num, den) in y for sum_{t >= t0} t^i y^t, den = (1-y)^(i+1).
fn power_tail_in_y(i: u32, t0: u64) -> (PolyQ, PolyQ) {
    let one_minus_y = PolyQ::from_coeffs([(0, Rat::one()), (1, Rat::from_int(-1))]);
    // sum_{t>=t0} t^i y^t = y^t0 * sum_j C(i,j) t0^(i-j) G_j(y) (1-y)^(i-j) / (1-y)^(i+1)
    let mut num = PolyQ::zero();
    let t0r = Rat::from_int(t0 as i64);
    for j in 0..=i {
        let c = binomial(i, j);
        let scal = &Rat::from_int(c as i64) * &t0r.pow((i - j) as i32);
        let part = eulerian_numerator(j).scale(&scal);
        num = &num + &(&part * &one_minus_y.pow(i - j));
    }
    let t0_exp = u32::try_from(t0).expect("summation start too large");
    (num.shift(t0_exp), one_minus_y.pow(i + 1))
}

fn binomial(n: u32, k: u32) -> u64 {
    let mut acc = 1u64;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Substitute y := q^alpha * T^mstep into num/den over y and clear negative
/// q-exponents.
fn subst_y_qt(num: &PolyQ, den: &PolyQ, alpha: i64, mstep: u32) -> RatFuncQT {
    let max_deg = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0)) as i64;
    let clear = if alpha < 0 { -alpha * max_deg } else { 0 };
    let build = |p: &PolyQ| -> PolyQT {
        let mut out = PolyQT::zero();
        for (&e, c) in p.coeffs() {
            let q_exp = alpha * e as i64 + clear;
            debug_assert!(q_exp >= 0);
            out.add_term(mstep * e, PolyQ::monomial(q_exp as u32, c.clone()));
        }
        out
    };
    RatFuncQT::new(build(num), build(den)).expect("nonzero denominator")
}

/// Substitute y := q^alpha (alpha < 0 on infinite tails) and clear.
fn subst_y_q(num: &PolyQ, den: &PolyQ, alpha: i64) -> RatFuncQ {
    let max_deg = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0)) as i64;
    let clear = if alpha < 0 { -alpha * max_deg } else { 0 };
    let build = |p: &PolyQ| -> PolyQ {
        let mut out = PolyQ::zero();
        for (&e, c) in p.coeffs() {
            let q_exp = alpha * e as i64 + clear;
            debug_assert!(q_exp >= 0);
            out.add_term(q_exp as u32, c.clone());
        }
        out
    };
    RatFuncQ::new(build(num), build(den)).expect("geometric denominators are valid")
}

/// The branches of a term after merging the congruence constraint with the
/// step structure of the exponent: s = rho + M*t for t >= t_first, exponent
/// alpha*t + beta.
struct MergedBranch {
    rho: u64,
    big_m: u64,
    t_first: u64,
    t_last: Option<u64>,
    alpha: i64,
    beta: i64,
}

fn merged_branches(term: &SeriesTerm) -> Vec<MergedBranch> {
    let (lambda, mc) = term.congruence;
    let step = &term.q_exponent;
    let ms = step.modulus() as u64;
    let big_m = (mc as u64).lcm(&ms);
    let (lo, hi) = term.range;
    let lo = lo.max(step.threshold());
    let mut out = Vec::new();
    for rho in 0..big_m {
        if rho % mc as u64 != lambda as u64 {
            continue;
        }
        // First admissible s >= lo with s = rho (mod M).
        let s_first = if lo <= rho { rho } else { rho + (lo - rho).div_ceil(big_m) * big_m };
        if let Some(h) = hi {
            if s_first > h {
                continue;
            }
        }
        let branch = step.branch((rho % ms) as u32);
        // j = s div ms = (rho - rho % ms)/ms + (M/ms) * t.
        let alpha = branch.a * (big_m / ms) as i64;
        let beta = branch.a * ((rho - rho % ms) / ms) as i64 + branch.b;
        out.push(MergedBranch {
            rho,
            big_m,
            t_first: (s_first - rho) / big_m,
            t_last: hi.map(|h| (h - rho) / big_m),
            alpha,
            beta,
        });
    }
    out
}

const TERMWISE_LIMIT: u64 = 64;

/// Closed form of `sum s^a q^(e(s)) T^s` as a reduced rational function in
/// (q, T). Formal in T: always rational, no convergence condition.
pub fn sum_series_qt(term: &SeriesTerm) -> RatFuncQT {
    let mut total = RatFuncQT::zero();
    // Prefix region, term by term.
    let s0 = term.q_exponent.threshold();
    for s in term.range.0..s0.min(term.range.1.map_or(s0, |h| h + 1)) {
        if term.admissible(s) {
            let sa = Rat::from_int(s as i64).pow(term.s_power as i32);
            total = &total
                + &RatFuncQT::laurent_monomial(
                    sa,
                    term.q_exponent.eval(s),
                    u32::try_from(s).expect("prefix exponent too large"),
                );
        }
    }
    for br in merged_branches(term) {
        if let Some(t_last) = br.t_last {
            if t_last - br.t_first < TERMWISE_LIMIT {
                for t in br.t_first..=t_last {
                    let s = br.rho + br.big_m * t;
                    let sa = Rat::from_int(s as i64).pow(term.s_power as i32);
                    total = &total
                        + &RatFuncQT::laurent_monomial(
                            sa,
                            br.alpha * t as i64 + br.beta,
                            u32::try_from(s).unwrap(),
                        );
                }
                continue;
            }
        }
        // sum_t (rho + M t)^a z^t with z = q^alpha T^M, shifted by q^beta T^rho.
        let a = term.s_power;
        let mut branch_sum = RatFuncQT::zero();
        for i in 0..=a {
            let c = binomial(a, i) as i64;
            let scal = &Rat::from_int(c)
                * &Rat::from_int(br.rho as i64).pow((a - i) as i32);
            let scal = scal * Rat::from_int(br.big_m as i64).pow(i as i32);
            if scal.is_zero() {
                continue;
            }
            let (num0, den0) = power_tail_in_y(i, br.t_first);
            let mut part = subst_y_qt(&num0, &den0, br.alpha, br.big_m as u32);
            if let Some(t_last) = br.t_last {
                let (num1, den1) = power_tail_in_y(i, t_last + 1);
                part = &part - &subst_y_qt(&num1, &den1, br.alpha, br.big_m as u32);
            }
            branch_sum = &branch_sum + &part.mul_scalar(&scal);
        }
        let shift = RatFuncQT::laurent_monomial(
            Rat::one(),
            br.beta,
            u32::try_from(br.rho).expect("residue too large"),
        );
        total = &total + &(&branch_sum * &shift);
    }
    total
}

/// Closed form of the T-free sum `sum s^a q^(e(s))`, exact for every real
/// q > 1. Errors when an infinite branch has nonnegative slope.
pub fn sum_series_q(term: &SeriesTerm) -> Result<RatFuncQ, PresburgerError> {
    let mut total = RatFuncQ::zero();
    let s0 = term.q_exponent.threshold();
    for s in term.range.0..s0.min(term.range.1.map_or(s0, |h| h + 1)) {
        if term.admissible(s) {
            total = &total + &term.summand(s);
        }
    }
    for br in merged_branches(term) {
        let a = term.s_power;
        if br.t_last.is_none() && br.alpha >= 0 {
            return Err(PresburgerError::Divergent { slope: br.alpha });
        }
        let mut branch_sum = RatFuncQ::zero();
        match br.t_last {
            Some(t_last) if t_last - br.t_first < TERMWISE_LIMIT => {
                for t in br.t_first..=t_last {
                    let s = br.rho + br.big_m * t;
                    let sa = Rat::from_int(s as i64).pow(a as i32);
                    branch_sum =
                        &branch_sum + &RatFuncQ::q_pow(br.alpha * t as i64).scale(&sa);
                }
                total = &total + &branch_sum.scale_qpow(br.beta);
                continue;
            }
            _ => {}
        }
        for i in 0..=a {
            let c = binomial(a, i) as i64;
            let scal = &(&Rat::from_int(c)
                * &Rat::from_int(br.rho as i64).pow((a - i) as i32))
                * &Rat::from_int(br.big_m as i64).pow(i as i32);
            if scal.is_zero() {
                continue;
            }
            let part = finite_or_tail_power_sum_q(i, br.t_first, br.t_last, br.alpha)?;
            branch_sum = &branch_sum + &part.scale(&scal);
        }
        total = &total + &branch_sum.scale_qpow(br.beta);
    }
    Ok(total)
}

/// sum over t in [t0, t1 or infinity) of t^i q^(alpha t), as an exact
/// rational function valid for all q > 1.
fn finite_or_tail_power_sum_q(
    i: u32,
    t0: u64,
    t1: Option<u64>,
    alpha: i64,
) -> Result<RatFuncQ, PresburgerError> {
    match t1 {
        None => {
            if alpha >= 0 {
                return Err(PresburgerError::Divergent { slope: alpha });
            }
            let (num, den) = power_tail_in_y(i, t0);
            Ok(subst_y_q(&num, &den, alpha))
        }
        Some(t1) => {
            if alpha < 0 {
                let (n0, d0) = power_tail_in_y(i, t0);
                let (n1, d1) = power_tail_in_y(i, t1 + 1);
                Ok(&subst_y_q(&n0, &d0, alpha) - &subst_y_q(&n1, &d1, alpha))
            } else if alpha == 0 {
                // Faulhaber: exact power sums of a plain integer range.
                let sum = &faulhaber(i, t1) - &if t0 == 0 { Rat::zero() } else { faulhaber(i, t0 - 1) };
                Ok(RatFuncQ::from_rat(sum))
            } else {
                // Reverse the index to make the slope negative:
                // t = t1 - u, t^i q^(alpha t) = q^(alpha t1) (t1-u)^i q^(-alpha u).
                let n = t1 - t0;
                let mut acc = RatFuncQ::zero();
                for k in 0..=i {
                    let c = Rat::from_int(binomial(i, k) as i64)
                        * Rat::from_int(t1 as i64).pow((i - k) as i32)
                        * Rat::from_int(-1).pow(k as i32);
                    let part = finite_or_tail_power_sum_q(k, 0, Some(n), -alpha)?;
                    acc = &acc + &part.scale(&c);
                }
                Ok(acc.scale_qpow(alpha * t1 as i64))
            }
        }
    }
}

/// sum_{t=0}^{n} t^i, exact.
fn faulhaber(i: u32, n: u64) -> Rat {
    // S_i(n) = ((n+1)^(i+1) - sum_{j<i} C(i+1, j) S_j(n)) / (i+1)
    let np1 = Rat::from_int(n as i64) + Rat::one();
    let mut table: Vec<Rat> = Vec::with_capacity(i as usize + 1);
    for m in 0..=i {
        let mut acc = np1.pow(m as i32 + 1);
        for (j, prev) in table.iter().enumerate() {
            acc = acc - &Rat::from_int(binomial(m + 1, j as u32) as i64) * prev;
        }
        table.push(acc / Rat::from_int(m as i64 + 1));
    }
    table.pop().unwrap()
}

/// Spec entry point: geometric sums (a = 0).
pub fn sum_geometric(term: &SeriesTerm) -> RatFuncQT {
    assert_eq!(term.s_power, 0, "sum_geometric expects s_power = 0");
    sum_series_qt(term)
}

/// Spec entry point: polynomial-geometric sums (a >= 1).
pub fn sum_poly_geometric(term: &SeriesTerm) -> RatFuncQT {
    assert!(term.s_power >= 1, "sum_poly_geometric expects s_power >= 1");
    sum_series_qt(term)
}

/// Spec entry point: the T-free measure sums.
pub fn sum_power_q(term: &SeriesTerm) -> Result<RatFuncQ, PresburgerError> {
    sum_series_q(term)
}

/// One term of a motivic function of s in prepared shape:
/// coeff * #classes * s^a * q^(e(s)) on a congruence class and range.
#[derive(Debug, Clone)]
pub struct StepTerm {
    pub coeff: RatFuncQ,
    pub classes: Vec<ResidueClass>,
    pub series: SeriesTerm,
}

impl StepTerm {
    /// Normalizes polynomial-count classes into the coefficient.
    pub fn new(coeff: RatFuncQ, classes: Vec<ResidueClass>, series: SeriesTerm) -> Self {
        let mut folded = coeff;
        let mut opaque = Vec::new();
        for class in classes {
            match class.count_mode() {
                CountMode::Polynomial(h) => {
                    folded = &folded * &RatFuncQ::from_poly(h.clone());
                }
                CountMode::OracleOnly => opaque.push(class),
            }
        }
        opaque.sort();
        StepTerm { coeff: folded, classes: opaque, series }
    }
}

/// A motivic function of one value-group parameter in prepared shape.
#[derive(Debug, Clone, Default)]
pub struct MotivicStepFunction {
    pub terms: Vec<StepTerm>,
}

impl MotivicStepFunction {
    pub fn eval_at(&self, s: u64) -> MotivicValue {
        let mut acc = MotivicValue::zero();
        for term in &self.terms {
            let v = term.series.summand(s);
            if v.is_zero() {
                continue;
            }
            acc = &acc
                + &MotivicValue::from_terms(vec![MvTerm {
                    coeff: &v * &term.coeff,
                    classes: term.classes.clone(),
                }]);
        }
        acc
    }

    /// Largest validity threshold over the classes involved.
    pub fn validity_threshold(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|t| t.classes.iter().map(ResidueClass::validity_threshold))
            .max()
            .unwrap_or(2)
    }
}

/// The summed series, one bivariate rational function per residue-class
/// multiset (class symbols pull out of the sum).
#[derive(Debug, Clone)]
pub struct ClassSeries {
    pub parts: Vec<(Vec<ResidueClass>, RatFuncQT)>,
}

impl ClassSeries {
    /// The single rational function, when no opaque class symbols remain.
    pub fn as_single(&self) -> Option<RatFuncQT> {
        match self.parts.len() {
            0 => Some(RatFuncQT::zero()),
            1 if self.parts[0].0.is_empty() => Some(self.parts[0].1.clone()),
            _ => None,
        }
    }

    /// Expansion coefficients as motivic values.
    pub fn expand(&self, order: usize) -> Result<Vec<MotivicValue>, QringError> {
        let mut out = vec![MotivicValue::zero(); order];
        for (classes, series) in &self.parts {
            let coeffs = series.expand(order)?;
            for (s, c) in coeffs.into_iter().enumerate() {
                out[s] = &out[s]
                    + &MotivicValue::from_terms(vec![MvTerm { coeff: c, classes: classes.clone() }]);
            }
        }
        Ok(out)
    }

    /// Specialize q := p, counting class symbols, and reduce to a rational
    /// function in T over Q with den(0) = 1.
    pub fn eval_q(&self, p: u64) -> Result<(Vec<Rat>, Vec<Rat>), QringError> {
        let mut num_acc = PolyQ::zero(); // polynomials in T over Q
        let mut den_acc = PolyQ::one();
        for (classes, series) in &self.parts {
            let mut weight = Rat::one();
            for class in classes {
                weight = weight * class.count_at(p)?;
            }
            let (num, den) = series.eval_q(&Rat::from_int(p as i64))?;
            let num = PolyQ::from_coeffs(
                num.iter().enumerate().map(|(i, c)| (i as u32, c * &weight)),
            );
            let den = PolyQ::from_coeffs(
                den.iter().enumerate().map(|(i, c)| (i as u32, c.clone())),
            );
            // num_acc/den_acc + num/den
            num_acc = &(&num_acc * &den) + &(&num * &den_acc);
            den_acc = &den_acc * &den;
        }
        let num_v: Vec<Rat> = (0..=num_acc.degree().unwrap_or(0)).map(|e| num_acc.coeff(e)).collect();
        let den_v: Vec<Rat> = (0..=den_acc.degree().unwrap_or(0)).map(|e| den_acc.coeff(e)).collect();
        Ok(crate::qring::normalize_rational_t(num_v, den_v))
    }
}

/// Sum a prepared motivic function of s against T^s: the residue-class
/// ingredients pull out of the sum and each scalar part is rational.
pub fn sum_motivic_series(f: &MotivicStepFunction) -> ClassSeries {
    let mut parts: Vec<(Vec<ResidueClass>, RatFuncQT)> = Vec::new();
    for term in &f.terms {
        let scalar = sum_series_qt(&term.series);
        let scaled = &scalar * &RatFuncQT::from_ratfunc_q(&term.coeff);
        match parts.iter_mut().find(|(classes, _)| *classes == term.classes) {
            Some((_, acc)) => *acc = &*acc + &scaled,
            None => parts.push((term.classes.clone(), scaled)),
        }
    }
    parts.retain(|(_, series)| !series.is_zero());
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    ClassSeries { parts }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qt_frac(num: RatFuncQT, den: RatFuncQT) -> RatFuncQT {
        num.div(&den).unwrap()
    }

    fn qt_mono(c: i64, q_exp: i64, t_exp: u32) -> RatFuncQT {
        RatFuncQT::laurent_monomial(Rat::from_int(c), q_exp, t_exp)
    }

    fn one_minus(m: RatFuncQT) -> RatFuncQT {
        &RatFuncQT::one() - &m
    }

    #[test]
    fn geometric_qt() {
        // sum (qT)^s = 1/(1-qT)
        let t = SeriesTerm::full(0, StepLinear::affine_in_s(1, 0));
        assert_eq!(sum_geometric(&t), qt_frac(RatFuncQT::one(), one_minus(qt_mono(1, 1, 1))));
    }

    #[test]
    fn even_geometric() {
        // sum over even s of T^s = 1/(1-T^2)
        let t = SeriesTerm {
            s_power: 0,
            q_exponent: StepLinear::constant(0),
            congruence: (0, 2),
            range: (0, None),
        };
        assert_eq!(sum_geometric(&t), qt_frac(RatFuncQT::one(), one_minus(qt_mono(1, 0, 2))));
    }

    #[test]
    fn finite_geometric() {
        // sum_{0<=s<=2} T^s = 1 + T + T^2
        let t = SeriesTerm {
            s_power: 0,
            q_exponent: StepLinear::constant(0),
            congruence: (0, 1),
            range: (0, Some(2)),
        };
        let expect = &(&RatFuncQT::one() + &qt_mono(1, 0, 1)) + &qt_mono(1, 0, 2);
        assert_eq!(sum_geometric(&t), expect);
    }

    #[test]
    fn derivative_geometric() {
        // sum s T^s = T/(1-T)^2
        let t = SeriesTerm::full(1, StepLinear::constant(0));
        let omt = one_minus(qt_mono(1, 0, 1));
        assert_eq!(sum_poly_geometric(&t), qt_frac(qt_mono(1, 0, 1), &omt * &omt));
    }

    #[test]
    fn weighted_derivative() {
        // sum s q^-s T^s = qT/(q-T)^2
        let t = SeriesTerm::full(1, StepLinear::affine_in_s(-1, 0));
        let q_minus_t = &qt_mono(1, 1, 0) - &qt_mono(1, 0, 1);
        let expect = qt_frac(qt_mono(1, 1, 1), &q_minus_t * &q_minus_t);
        assert_eq!(sum_poly_geometric(&t), expect);
    }

    #[test]
    fn expansion_matches_termwise() {
        // Mixed step-linear exponent with prefix overrides, checked
        // symbolically against direct summation.
        let step = StepLinear::new(vec![5, -2], 2, vec![Affine { a: -2, b: 0 }, Affine { a: 1, b: -3 }]);
        let term = SeriesTerm {
            s_power: 2,
            q_exponent: step,
            congruence: (1, 2),
            range: (1, None),
        };
        let closed = sum_series_qt(&term);
        let coeffs = closed.expand(25).unwrap();
        for (s, c) in coeffs.iter().enumerate() {
            assert_eq!(c, &term.summand(s as u64), "coefficient at s = {s}");
        }
    }

    #[test]
    fn q_sums() {
        // sum_{r>=0} q^(-r-1) = 1/(q-1)
        let t = SeriesTerm::full(0, StepLinear::affine_in_s(-1, -1));
        let expect = RatFuncQ::new(
            PolyQ::one(),
            PolyQ::from_coeffs([(1, Rat::one()), (0, Rat::from_int(-1))]),
        )
        .unwrap();
        assert_eq!(sum_power_q(&t).unwrap(), expect);

        // sum over even r of q^(-r-1) = q/(q^2-1)
        let t_even = SeriesTerm {
            s_power: 0,
            q_exponent: StepLinear::affine_in_s(-1, -1),
            congruence: (0, 2),
            range: (0, None),
        };
        let expect_even = RatFuncQ::new(
            PolyQ::q(),
            PolyQ::from_coeffs([(2, Rat::one()), (0, Rat::from_int(-1))]),
        )
        .unwrap();
        assert_eq!(sum_power_q(&t_even).unwrap(), expect_even);

        // sum r q^(-r-1) = 1/(q-1)^2
        let t_bla = SeriesTerm::full(1, StepLinear::affine_in_s(-1, -1));
        let qm1 = PolyQ::from_coeffs([(1, Rat::one()), (0, Rat::from_int(-1))]);
        let expect_bla = RatFuncQ::new(PolyQ::one(), &qm1 * &qm1).unwrap();
        assert_eq!(sum_power_q(&t_bla).unwrap(), expect_bla);
    }

    #[test]
    fn q_sum_divergence() {
        let t = SeriesTerm::full(0, StepLinear::affine_in_s(0, 0));
        assert!(matches!(sum_power_q(&t), Err(PresburgerError::Divergent { .. })));
        let ok = SeriesTerm {
            range: (0, Some(10)),
            ..SeriesTerm::full(0, StepLinear::affine_in_s(0, 0))
        };
        assert_eq!(sum_power_q(&ok).unwrap(), RatFuncQ::from_int(11));
    }

    #[test]
    fn q_sum_partial_matches_closed_form() {
        // Numeric tail check at q = 5: partial sums approach the closed form.
        let term = SeriesTerm {
            s_power: 2,
            q_exponent: StepLinear::affine_in_s(-2, 3),
            congruence: (1, 3),
            range: (2, None),
        };
        let closed = sum_power_q(&term).unwrap();
        let at5 = closed.eval(&Rat::from_int(5)).unwrap();
        let mut partial = Rat::zero();
        for s in 0..60u64 {
            partial += &term.summand(s).eval(&Rat::from_int(5)).unwrap();
        }
        let tail = (&at5 - &partial).abs();
        // |tail| <= C * 5^(-2*60) for a crude C; just check it is tiny.
        assert!(tail < Rat::new(1, num_bigint::BigInt::from(5).pow(100)));
    }

    #[test]
    fn faulhaber_matches_direct() {
        for i in 0..=4u32 {
            for n in 0..20u64 {
                let direct: i64 = (0..=n).map(|t| (t as i64).pow(i)).sum();
                assert_eq!(faulhaber(i, n), Rat::from_int(direct), "i={i} n={n}");
            }
        }
    }

    #[test]
    fn finite_big_range_positive_slope() {
        // sum_{s=0}^{200} q^s = (q^201 - 1)/(q - 1), via the reversal path.
        let t = SeriesTerm {
            s_power: 0,
            q_exponent: StepLinear::affine_in_s(1, 0),
            congruence: (0, 1),
            range: (0, Some(200)),
        };
        let got = sum_power_q(&t).unwrap();
        let expect = RatFuncQ::new(
            PolyQ::from_coeffs([(201, Rat::one()), (0, Rat::from_int(-1))]),
            PolyQ::from_coeffs([(1, Rat::one()), (0, Rat::from_int(-1))]),
        )
        .unwrap();
        assert_eq!(got, expect);
    }

    #[test]
    fn motivic_series_scalar_class_factor() {
        use crate::qring::catalog;
        // f(s) = [Z] q^-s -> [Z] * q/(q-T) for an opaque Z.
        let z = ResidueClass::new(
            "z_opaque",
            1,
            catalog::nth_powers(3).definition().clone(),
            CountMode::OracleOnly,
            4,
        );
        let f = MotivicStepFunction {
            terms: vec![StepTerm::new(
                RatFuncQ::one(),
                vec![z.clone()],
                SeriesTerm::full(0, StepLinear::affine_in_s(-1, 0)),
            )],
        };
        let series = sum_motivic_series(&f);
        assert_eq!(series.parts.len(), 1);
        assert_eq!(series.parts[0].0, vec![z]);
        let expect = qt_frac(qt_mono(1, 1, 0), &qt_mono(1, 1, 0) - &qt_mono(1, 0, 1));
        assert_eq!(series.parts[0].1, expect);
        assert!(series.as_single().is_none());
    }

    #[test]
    fn prefix_splitting_is_polynomial() {
        // Changing finitely many initial values changes the closed form by
        // exactly the corresponding polynomial in T.
        let base = SeriesTerm::full(0, StepLinear::affine_in_s(-1, 0));
        let patched = SeriesTerm::full(
            0,
            StepLinear::affine_in_s(-1, 0).with_prefix(vec![3, -1]),
        );
        let diff = &sum_series_qt(&patched) - &sum_series_qt(&base);
        // difference = (q^3 - 1) + (q^-1... s=0: q^3 - q^0; s=1: q^-1 - q^-1 = wait
        // prefix [3, -1]: s=0 -> 3 (was 0), s=1 -> -1 (was -1): only s=0 changes.
        let expect = &qt_mono(1, 3, 0) - &qt_mono(1, 0, 0);
        assert_eq!(diff, expect);
    }
}

//! Rational functions in one variable `s` whose denominators split into
//! linear factors `N*s + nu` over the integers.
//!
//! Canonical form: every denominator factor is primitive with `N >= 1`,
//! `nu >= 1`; any integer constant of the denominator is kept in `scale`;
//! `gcd(content(numerator), scale) = 1` and no denominator factor divides
//! the numerator.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// The linear form `n*s + nu`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct LinearFactor {
    pub n: BigInt,
    pub nu: BigInt,
}

impl LinearFactor {
    pub fn new(n: impl Into<BigInt>, nu: impl Into<BigInt>) -> Self {
        LinearFactor { n: n.into(), nu: nu.into() }
    }

    /// `s + 1`, the factor contributed by every strict-transform branch.
    pub fn branch() -> Self {
        LinearFactor::new(1, 1)
    }

    /// The root `-nu/n`, or `None` for a constant.
    pub fn root(&self) -> Option<BigRational> {
        if self.n.is_zero() {
            None
        } else {
            Some(BigRational::new(-self.nu.clone(), self.n.clone()))
        }
    }

    fn as_poly(&self) -> Vec<BigInt> {
        vec![self.nu.clone(), self.n.clone()]
    }
}

impl fmt::Display for LinearFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&poly_to_string(&self.as_poly()))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    /// Integer coefficients, lowest degree first, no trailing zeros.
    numer: Vec<BigInt>,
    /// Positive integer constant of the denominator.
    scale: BigInt,
    /// Primitive factors with their exponents (all `>= 1`).
    denom: BTreeMap<LinearFactor, u32>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct DenominatorEntry {
    #[serde(rename = "N")]
    pub n: String,
    pub nu: String,
    pub exp: u32,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RationalFunctionJson {
    pub numerator: Vec<String>,
    pub denominator: Vec<DenominatorEntry>,
}

/// A pole `value` of the given order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Pole {
    pub value: BigRational,
    pub order: u32,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { numer: Vec::new(), scale: BigInt::one(), denom: BTreeMap::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::term(vec![c.into()], &[])
    }

    /// `numer(s) / prod(factors)`, normalized. Factors may be non-primitive
    /// or constant (`n = 0`), but must have `nu > 0` and `n >= 0`.
    pub fn term(numer: Vec<BigInt>, factors: &[LinearFactor]) -> Self {
        let mut rf = Self::raw(numer, factors);
        rf.normalize();
        rf
    }

    /// `c / prod(factors)`.
    pub fn simple(c: impl Into<BigInt>, factors: &[LinearFactor]) -> Self {
        Self::term(vec![c.into()], factors)
    }

    fn raw(numer: Vec<BigInt>, factors: &[LinearFactor]) -> Self {
        let mut rf = RationalFunction { numer: trimmed(numer), scale: BigInt::one(), denom: BTreeMap::new() };
        for f in factors {
            assert!(f.nu.is_positive() && !f.n.is_negative(), "linear factor {f} out of range");
            if f.n.is_zero() {
                rf.scale *= &f.nu;
                continue;
            }
            let g = f.n.gcd(&f.nu);
            rf.scale *= &g;
            *rf.denom.entry(LinearFactor::new(&f.n / &g, &f.nu / &g)).or_insert(0) += 1;
        }
        rf
    }

    pub fn is_zero(&self) -> bool {
        self.numer.is_empty()
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.numer
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn denominator(&self) -> impl Iterator<Item = (&LinearFactor, u32)> {
        self.denom.iter().map(|(f, e)| (f, *e))
    }

    pub fn denominator_degree(&self) -> u32 {
        self.denom.values().sum()
    }

    pub fn numerator_degree(&self) -> Option<usize> {
        self.numer.len().checked_sub(1)
    }

    /// Restores the canonical form: cancels denominator factors dividing
    /// the numerator, then the common integer content.
    pub fn normalize(&mut self) {
        if self.numer.is_empty() {
            *self = Self::zero();
            return;
        }
        let mut emptied = Vec::new();
        for (factor, exp) in self.denom.iter_mut() {
            while *exp > 0 {
                match div_linear(&self.numer, factor) {
                    Some(q) => {
                        self.numer = q;
                        *exp -= 1;
                    }
                    None => break,
                }
            }
            if *exp == 0 {
                emptied.push(factor.clone());
            }
        }
        for f in emptied {
            self.denom.remove(&f);
        }
        let g = self.numer.iter().fold(self.scale.clone(), |g, c| g.gcd(c));
        if !g.is_one() {
            for c in &mut self.numer {
                *c /= &g;
            }
            self.scale /= &g;
        }
    }

    fn add_raw(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let mut denom = self.denom.clone();
        for (f, e) in &other.denom {
            let slot = denom.entry(f.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        let scale = self.scale.lcm(&other.scale);
        let lift = |rf: &Self| {
            let mut p = poly_scale(&rf.numer, &(&scale / &rf.scale));
            for (f, e) in &denom {
                for _ in rf.denom.get(f).copied().unwrap_or(0)..*e {
                    p = poly_mul(&p, &f.as_poly());
                }
            }
            p
        };
        let numer = trimmed(poly_add(&lift(self), &lift(other)));
        RationalFunction { numer, scale, denom }
    }

    /// Sums many terms with balanced pairing, normalizing every partial sum
    /// so that factors cancelling between neighbouring terms drop out early.
    pub fn sum<I: IntoIterator<Item = RationalFunction>>(terms: I) -> Self {
        let mut layer: Vec<RationalFunction> = terms.into_iter().collect();
        if layer.is_empty() {
            return Self::zero();
        }
        while layer.len() > 1 {
            layer = layer.chunks(2).map(|c| if c.len() == 2 { c[0].add(&c[1]) } else { c[0].clone() }).collect();
        }
        let mut total = layer.pop().expect("nonempty");
        total.normalize();
        total
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut r = self.add_raw(other);
        r.normalize();
        r
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        for c in &mut r.numer {
            *c = -c.clone();
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut denom = self.denom.clone();
        for (f, e) in &other.denom {
            *denom.entry(f.clone()).or_insert(0) += e;
        }
        let mut r = RationalFunction {
            numer: trimmed(poly_mul(&self.numer, &other.numer)),
            scale: &self.scale * &other.scale,
            denom,
        };
        r.normalize();
        r
    }

    /// Division is only supported by functions whose numerator is constant,
    /// since the quotient must keep a linear-factor denominator.
    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if other.numer.len() > 1 {
            return Err(Error::NotRepresentable(
                "divisor numerator must be constant to keep a linear-factor denominator".into(),
            ));
        }
        // self / (c / (scale * D)) = self * scale * D / c
        let c = other.numer[0].clone();
        let mut numer = poly_scale(&self.numer, &other.scale);
        for (f, e) in &other.denom {
            for _ in 0..*e {
                numer = poly_mul(&numer, &f.as_poly());
            }
        }
        let (sign, c_abs) = if c.is_negative() { (-BigInt::one(), -c) } else { (BigInt::one(), c) };
        let mut r = RationalFunction {
            numer: trimmed(poly_scale(&numer, &sign)),
            scale: &self.scale * c_abs,
            denom: self.denom.clone(),
        };
        r.normalize();
        Ok(r)
    }

    /// Value at a rational point, `None` at a pole.
    pub fn eval(&self, s: &BigRational) -> Option<BigRational> {
        let mut den = BigRational::from_integer(self.scale.clone());
        for (f, e) in &self.denom {
            let v = BigRational::from_integer(f.n.clone()) * s + BigRational::from_integer(f.nu.clone());
            if v.is_zero() {
                return None;
            }
            for _ in 0..*e {
                den *= &v;
            }
        }
        Some(poly_eval(&self.numer, s) / den)
    }

    /// Distinct denominator roots with their exact orders, sorted by value.
    /// Orders are computed by repeated division, so this also works on
    /// non-canonical input.
    pub fn poles(&self) -> Vec<Pole> {
        let mut out = Vec::new();
        if self.numer.is_empty() {
            return out;
        }
        for (f, e) in &self.denom {
            let mut numer = self.numer.clone();
            let mut cancelled = 0u32;
            while cancelled < *e && !numer.is_empty() {
                match div_linear(&numer, f) {
                    Some(q) => {
                        numer = q;
                        cancelled += 1;
                    }
                    None => break,
                }
            }
            if *e > cancelled {
                out.push(Pole { value: f.root().expect("non-constant factor"), order: e - cancelled });
            }
        }
        out.sort_by(|a, b| a.value.cmp(&b.value));
        out
    }

    pub fn to_json(&self) -> RationalFunctionJson {
        let mut denominator: Vec<DenominatorEntry> = self
            .denom
            .iter()
            .map(|(f, e)| DenominatorEntry { n: f.n.to_string(), nu: f.nu.to_string(), exp: *e })
            .collect();
        if !self.scale.is_one() {
            denominator.insert(0, DenominatorEntry { n: "0".into(), nu: self.scale.to_string(), exp: 1 });
        }
        RationalFunctionJson { numerator: self.numer.iter().map(|c| c.to_string()).collect(), denominator }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = poly_to_string(&self.numer);
        if self.denom.is_empty() && self.scale.is_one() {
            return f.write_str(&num);
        }
        if self.numer.len() > 1 {
            write!(f, "({num})/")?;
        } else {
            write!(f, "{num}/")?;
        }
        let mut parts = Vec::new();
        if !self.scale.is_one() {
            parts.push(self.scale.to_string());
        }
        for (lf, e) in &self.denom {
            let base = format!("({lf})");
            parts.push(if *e == 1 { base } else { format!("{base}^{e}") });
        }
        if parts.len() == 1 {
            f.write_str(&parts[0])
        } else {
            write!(f, "({})", parts.concat())
        }
    }
}

fn trimmed(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            let y = b.get(i).cloned().unwrap_or_default();
            x + y
        })
        .collect()
}

fn poly_scale(a: &[BigInt], c: &BigInt) -> Vec<BigInt> {
    a.iter().map(|x| x * c).collect()
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_eval(p: &[BigInt], s: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * s + BigRational::from_integer(c.clone()))
}

/// Exact quotient `p / (n*s + nu)` when the primitive factor divides `p`.
/// By Gauss's lemma the quotient then has integer coefficients.
fn div_linear(p: &[BigInt], f: &LinearFactor) -> Option<Vec<BigInt>> {
    if p.len() < 2 {
        return None;
    }
    let mut rem: Vec<BigInt> = p.to_vec();
    let mut q = vec![BigInt::zero(); p.len() - 1];
    for deg in (1..p.len()).rev() {
        let (c, r) = rem[deg].div_rem(&f.n);
        if !r.is_zero() {
            return None;
        }
        rem[deg - 1] -= &c * &f.nu;
        q[deg - 1] = c;
    }
    rem[0].is_zero().then_some(q)
}

/// `4s + 5`, `-s^2 + 1`, `0`.
pub(crate) fn poly_to_string(p: &[BigInt]) -> String {
    let mut out = String::new();
    for (deg, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let abs = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let coeff = if abs.is_one() && deg > 0 { String::new() } else { abs.to_string() };
        out.push_str(&coeff);
        match deg {
            0 => {}
            1 => out.push('s'),
            _ => out.push_str(&format!("s^{deg}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(n: i64, nu: i64) -> LinearFactor {
        LinearFactor::new(n, nu)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn sum_of_equal_terms() {
        let x = RationalFunction::simple(1, &[lf(1, 1)]);
        assert_eq!(x.add(&x), RationalFunction::simple(2, &[lf(1, 1)]));
    }

    #[test]
    fn partial_fraction_difference() {
        // 5/(6s+5) - s/((s+1)(6s+5)) = (4s+5)/((s+1)(6s+5))
        let a = RationalFunction::simple(5, &[lf(6, 5)]);
        let b = RationalFunction::term(ints(&[0, 1]), &[lf(1, 1), lf(6, 5)]);
        let want = RationalFunction::term(ints(&[5, 4]), &[lf(1, 1), lf(6, 5)]);
        assert_eq!(a.sub(&b), want);
        assert_eq!(want.to_string(), "(4s + 5)/((s + 1)(6s + 5))");
    }

    #[test]
    fn cancellation() {
        let x = RationalFunction::term(ints(&[1, 1]), &[lf(1, 1)]);
        assert_eq!(x, RationalFunction::constant(1));
        let y = RationalFunction::term(ints(&[5, 6]), &[lf(6, 5), lf(6, 5), lf(1, 1)]);
        assert_eq!(y, RationalFunction::simple(1, &[lf(1, 1), lf(6, 5)]));
    }

    #[test]
    fn non_primitive_factors_merge() {
        let a = RationalFunction::simple(1, &[lf(2, 2), lf(1, 1)]);
        assert_eq!(a.denominator().collect::<Vec<_>>(), vec![(&lf(1, 1), 2)]);
        assert_eq!(a.scale(), &BigInt::from(2));
        let doubled = a.add(&a);
        assert_eq!(doubled, RationalFunction::simple(1, &[lf(1, 1), lf(1, 1)]));
        assert_eq!(a.to_json().denominator[0].n, "0");
    }

    #[test]
    fn division() {
        let x = RationalFunction::simple(3, &[lf(1, 1)]);
        assert_eq!(x.checked_div(&RationalFunction::zero()), Err(Error::DivisionByZero));
        let y = RationalFunction::simple(-3, &[lf(2, 3)]);
        // (3/(s+1)) / (-3/(2s+3)) = -(2s+3)/(s+1)
        assert_eq!(x.checked_div(&y).unwrap(), RationalFunction::term(ints(&[-3, -2]), &[lf(1, 1)]));
        let nonconst = RationalFunction::term(ints(&[1, 1]), &[lf(2, 3)]);
        assert!(x.checked_div(&nonconst).is_err());
    }

    #[test]
    fn poles_examples() {
        let cusp = RationalFunction::term(ints(&[5, 4]), &[lf(1, 1), lf(6, 5)]);
        let p = cusp.poles();
        assert_eq!(p, vec![Pole { value: q(-1, 1), order: 1 }, Pole { value: q(-5, 6), order: 1 }]);
        let node = RationalFunction::simple(1, &[lf(1, 1), lf(1, 1)]);
        assert_eq!(node.poles(), vec![Pole { value: q(-1, 1), order: 2 }]);
        // Non-canonical input: (6s+5)/((6s+5)^2 (s+1)).
        let raw = RationalFunction::raw(ints(&[5, 6]), &[lf(6, 5), lf(6, 5), lf(1, 1)]);
        assert_eq!(
            raw.poles(),
            vec![Pole { value: q(-1, 1), order: 1 }, Pole { value: q(-5, 6), order: 1 }]
        );
    }

    #[test]
    fn eval_matches_definition() {
        let f = RationalFunction::term(ints(&[5, 4]), &[lf(1, 1), lf(6, 5)]);
        assert_eq!(f.eval(&q(1, 1)), Some(q(9, 22)));
        assert_eq!(f.eval(&q(-1, 1)), None);
    }

    #[test]
    fn zero_is_canonical() {
        let x = RationalFunction::simple(1, &[lf(3, 2)]);
        assert_eq!(x.sub(&x), RationalFunction::zero());
        assert!(RationalFunction::zero().poles().is_empty());
    }
}

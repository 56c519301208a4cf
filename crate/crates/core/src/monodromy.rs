//! Products of cyclotomic-type factors `prod_n (1 - t^n)^{e_n}`, the
//! monodromy zeta function, the characteristic polynomial of the monodromy
//! on the first cohomology of the Milnor fibre, and the eigenvalue check
//! behind the monodromy conjecture.
//!
//! Eigenvalue questions are answered exactly: a primitive `d`-th root of
//! unity is a root of `prod_n (1 - t^n)^{e_n}` with multiplicity
//! `sum_{d | n} e_n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::equitree::AnnotatedTree;
use crate::error::{Error, Result};
use crate::oracle::{NodeKind, ResolutionGraph};
use crate::zeta::{poles, zeta_general, Pole};

/// Default bound on `mu` above which `Delta` is not expanded.
pub const DEFAULT_EXPANSION_CAP: u64 = 1_000_000;

/// `prod_n (1 - t^n)^{e_n}`; zero exponents are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CycloProduct {
    factors: BTreeMap<BigInt, i64>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CycloEntry {
    pub n: String,
    pub e: i64,
}

impl CycloProduct {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (BigInt, i64)>>(pairs: I) -> Self {
        let mut c = Self::one();
        for (n, e) in pairs {
            c.push(n, e);
        }
        c
    }

    /// Multiplies by `(1 - t^n)^e`.
    pub fn push(&mut self, n: BigInt, e: i64) {
        assert!(n.is_positive(), "cyclotomic index must be positive");
        if e == 0 {
            return;
        }
        let slot = self.factors.entry(n.clone()).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.factors.remove(&n);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, e) in &other.factors {
            out.push(n.clone(), *e);
        }
        out
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, n: &BigInt) -> i64 {
        self.factors.get(n).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigInt, i64)> {
        self.factors.iter().map(|(n, e)| (n, *e))
    }

    /// `sum n * e_n`, the degree of the product as a rational function.
    pub fn degree(&self) -> BigInt {
        self.factors.iter().map(|(n, e)| n * BigInt::from(*e)).sum()
    }

    /// Multiplicity of a primitive `d`-th root of unity: `sum_{d | n} e_n`.
    pub fn root_multiplicity(&self, d: &BigInt) -> i64 {
        self.factors
            .iter()
            .filter(|(n, _)| n.is_multiple_of(d))
            .map(|(_, e)| *e)
            .sum()
    }

    /// The orders `d` at which the multiplicity can differ from zero, up to
    /// equivalence: every `d` divides the same indices as the gcd of those
    /// indices, and that gcd lies in the gcd-closure of the index set.
    fn relevant_orders(&self) -> BTreeSet<BigInt> {
        let mut closure: BTreeSet<BigInt> = self.factors.keys().cloned().collect();
        let mut frontier: Vec<BigInt> = closure.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            let fresh: Vec<BigInt> = closure
                .iter()
                .map(|y| x.gcd(y))
                .filter(|g| !closure.contains(g))
                .collect();
            for g in fresh {
                if closure.insert(g.clone()) {
                    frontier.push(g);
                }
            }
        }
        closure
    }

    /// `true` iff the product is a polynomial, i.e. every root of unity has
    /// nonnegative multiplicity.
    pub fn is_polynomial(&self) -> bool {
        self.first_negative_order().is_none()
    }

    fn first_negative_order(&self) -> Option<(BigInt, i64)> {
        self.relevant_orders()
            .into_iter()
            .map(|d| {
                let m = self.root_multiplicity(&d);
                (d, m)
            })
            .find(|(_, m)| *m < 0)
    }

    pub fn to_json(&self) -> Vec<CycloEntry> {
        self.factors.iter().map(|(n, e)| CycloEntry { n: n.to_string(), e: *e }).collect()
    }
}

impl fmt::Display for CycloProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |n: &BigInt, e: i64| {
            let base = if n.is_one() { "(1 - t)".to_string() } else { format!("(1 - t^{n})") };
            if e == 1 { base } else { format!("{base}^{e}") }
        };
        let num: String = self.factors.iter().filter(|(_, e)| **e > 0).map(|(n, e)| render(n, *e)).collect();
        let den: Vec<String> = self.factors.iter().filter(|(_, e)| **e < 0).map(|(n, e)| render(n, -e)).collect();
        let num = if num.is_empty() { "1".to_string() } else { num };
        match den.len() {
            0 => f.write_str(&num),
            1 => write!(f, "{num}/{}", den[0]),
            _ => write!(f, "{num}/({})", den.concat()),
        }
    }
}

/// `Delta(t) = (1 - t) * Z_mon(t)`; `expanded` holds its integer
/// coefficients (lowest degree first) when `mu` is within the cap.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharPoly {
    pub cyclo: CycloProduct,
    pub expanded: Option<Vec<BigInt>>,
    pub mu: BigInt,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CharPolyJson {
    pub cyclo: Vec<CycloEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<String>>,
    pub mu: String,
}

impl CharPoly {
    pub fn root_multiplicity(&self, d: &BigInt) -> i64 {
        self.cyclo.root_multiplicity(d)
    }

    /// `coeffs[j] = +-coeffs[mu - j]` with one global sign. `None` when the
    /// polynomial was not expanded.
    pub fn is_palindromic(&self) -> Option<bool> {
        self.expanded.as_ref().map(|c| is_palindromic_up_to_sign(c))
    }

    pub fn to_json(&self) -> CharPolyJson {
        CharPolyJson {
            cyclo: self.cyclo.to_json(),
            coeffs: self.expanded.as_ref().map(|c| c.iter().map(|x| x.to_string()).collect()),
            mu: self.mu.to_string(),
        }
    }

    /// `1 - t + t^2` style rendering of the expansion, falling back to the
    /// product form.
    pub fn render(&self) -> String {
        match &self.expanded {
            Some(c) => render_t_poly(c),
            None => self.cyclo.to_string(),
        }
    }
}

pub fn is_palindromic_up_to_sign(c: &[BigInt]) -> bool {
    let n = c.len();
    if n == 0 {
        return true;
    }
    let same = (0..n).all(|j| c[j] == c[n - 1 - j]);
    let opposite = (0..n).all(|j| c[j] == -c[n - 1 - j].clone());
    same || opposite
}

fn render_t_poly(c: &[BigInt]) -> String {
    let mut out = String::new();
    for (deg, coef) in c.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        let abs = coef.abs();
        if out.is_empty() {
            if coef.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if coef.is_negative() { " - " } else { " + " });
        }
        if !abs.is_one() || deg == 0 {
            out.push_str(&abs.to_string());
        }
        match deg {
            0 => {}
            1 => out.push('t'),
            _ => out.push_str(&format!("t^{deg}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn characteristic_poly(z: &CycloProduct) -> Result<CharPoly> {
    characteristic_poly_with_cap(z, DEFAULT_EXPANSION_CAP)
}

/// `(1 - t) * z`, expanded when its degree is at most `cap`.
pub fn characteristic_poly_with_cap(z: &CycloProduct, cap: u64) -> Result<CharPoly> {
    let mut cyclo = z.clone();
    cyclo.push(BigInt::one(), 1);
    if let Some((d, m)) = cyclo.first_negative_order() {
        return Err(Error::NotPolynomial { order: d.to_string(), multiplicity: m });
    }
    let mu = cyclo.degree();
    let expanded = match mu.to_u64() {
        Some(m) if m <= cap => Some(expand(&cyclo, m as usize)),
        _ => None,
    };
    Ok(CharPoly { cyclo, expanded, mu })
}

/// Coefficients of a product known to be a polynomial of degree `mu`,
/// computed as a power series modulo `t^(mu+1)`.
fn expand(cyclo: &CycloProduct, mu: usize) -> Vec<BigInt> {
    let steps: Vec<(usize, i64)> = cyclo
        .iter()
        .filter_map(|(n, e)| n.to_usize().filter(|n| *n <= mu).map(|n| (n, e)))
        .collect();
    expand_i128(&steps, mu).unwrap_or_else(|| expand_big(&steps, mu))
}

fn expand_i128(steps: &[(usize, i64)], mu: usize) -> Option<Vec<BigInt>> {
    let mut c = vec![0i128; mu + 1];
    c[0] = 1;
    for &(n, e) in steps {
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                for j in (n..=mu).rev() {
                    c[j] = c[j].checked_sub(c[j - n])?;
                }
            } else {
                for j in n..=mu {
                    c[j] = c[j].checked_add(c[j - n])?;
                }
            }
        }
    }
    Some(c.into_iter().map(BigInt::from).collect())
}

fn expand_big(steps: &[(usize, i64)], mu: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); mu + 1];
    c[0] = BigInt::one();
    for &(n, e) in steps {
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                for j in (n..=mu).rev() {
                    let prev = c[j - n].clone();
                    c[j] -= prev;
                }
            } else {
                for j in n..=mu {
                    let prev = c[j - n].clone();
                    c[j] += prev;
                }
            }
        }
    }
    c
}

/// Closed-form monodromy zeta function of an annotated tree:
/// `1/(1 - t^{N(T_1)}) * prod_B [prod_i (1 - t^{N(P_i)})^{r_i} / (1 - t^{N(T_m)})]`
/// where `N(T_1) = N(P_1)/b_1` on the root bamboo and `N(T_m) = N(P_k)/a_k`
/// on every bamboo.
pub fn monodromy_zeta(tree: &AnnotatedTree) -> Result<CycloProduct> {
    let mut z = CycloProduct::one();
    let root = &tree.root;
    let first = &root.faces[0];
    z.push(exact_div(&first.n, first.b(), "N(P_1) / b_1 on the root bamboo")?, -1);
    for bamboo in tree.bamboos() {
        for face in &bamboo.faces {
            z.push(face.n.clone(), face.r() as i64);
        }
        let last = bamboo.last();
        let what = format!("N(P_k) / a_k on bamboo '{}'", bamboo.path);
        z.push(exact_div(&last.n, last.a(), &what)?, -1);
    }
    Ok(z)
}

fn exact_div(n: &BigInt, d: &BigInt, what: &str) -> Result<BigInt> {
    let (q, r) = n.div_rem(d);
    if !r.is_zero() {
        return Err(Error::Consistency(format!("{what} is not exact: {n} / {d}")));
    }
    Ok(q)
}

/// A'Campo's product over the exceptional divisors,
/// `prod_E (1 - t^{N_E})^{-chi(E°)}`.
pub fn acampo_from_graph(graph: &ResolutionGraph) -> CycloProduct {
    let mut z = CycloProduct::one();
    for node in &graph.nodes {
        if node.kind == NodeKind::Exceptional {
            z.push(node.n.clone(), -node.chi_open);
        }
    }
    z
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "via", rename_all = "snake_case")]
pub enum EigenvalueWitness {
    /// `exp(2 pi i theta) = 1`, the eigenvalue on degree-zero cohomology.
    H0,
    /// Primitive `order`-th roots of unity are roots of `Delta` with the
    /// given multiplicity; `contributing` lists the `(n, e_n)` with `order | n`.
    H1 { order: String, multiplicity: i64, contributing: Vec<CycloEntry> },
    /// Not an eigenvalue.
    Absent { order: String, multiplicity: i64 },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct EigenvalueCertificate {
    pub is_eigenvalue: bool,
    pub witness: EigenvalueWitness,
}

pub fn is_eigenvalue(delta: &CharPoly, theta: &BigRational) -> EigenvalueCertificate {
    let d = theta.denom().abs();
    if d.is_one() {
        return EigenvalueCertificate { is_eigenvalue: true, witness: EigenvalueWitness::H0 };
    }
    let multiplicity = delta.root_multiplicity(&d);
    if multiplicity >= 1 {
        let contributing = delta
            .cyclo
            .iter()
            .filter(|(n, _)| n.is_multiple_of(&d))
            .map(|(n, e)| CycloEntry { n: n.to_string(), e })
            .collect();
        EigenvalueCertificate {
            is_eigenvalue: true,
            witness: EigenvalueWitness::H1 { order: d.to_string(), multiplicity, contributing },
        }
    } else {
        EigenvalueCertificate {
            is_eigenvalue: false,
            witness: EigenvalueWitness::Absent { order: d.to_string(), multiplicity },
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoleVerdict {
    pub pole: Pole,
    pub certificate: EigenvalueCertificate,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConjectureReport {
    pub verdicts: Vec<PoleVerdict>,
}

impl ConjectureReport {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(|v| v.certificate.is_eigenvalue)
    }
}

/// Checks each pole against the eigenvalues of `delta`.
pub fn check_poles(pole_list: &[Pole], delta: &CharPoly) -> ConjectureReport {
    let verdicts = pole_list
        .iter()
        .map(|p| PoleVerdict { pole: p.clone(), certificate: is_eigenvalue(delta, &p.value) })
        .collect();
    ConjectureReport { verdicts }
}

pub fn verify_conjecture(tree: &AnnotatedTree) -> Result<ConjectureReport> {
    let z = zeta_general(tree);
    let delta = characteristic_poly(&monodromy_zeta(tree)?)?;
    Ok(check_poles(&poles(&z), &delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equitree::{annotate, Bamboo, BranchClass, Face};

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn cyclo(pairs: &[(i64, i64)]) -> CycloProduct {
        CycloProduct::from_pairs(pairs.iter().map(|&(n, e)| (big(n), e)))
    }

    fn leaf_face(a: i64, b: i64, leaves: usize) -> Face {
        Face::new(a, b, vec![BranchClass::Leaf; leaves])
    }

    fn cusp() -> AnnotatedTree {
        annotate(&Bamboo::new(vec![leaf_face(2, 3, 1)])).unwrap()
    }

    fn two_pair() -> AnnotatedTree {
        let sub = Bamboo::new(vec![leaf_face(2, 7, 1)]);
        annotate(&Bamboo::new(vec![Face::new(2, 3, vec![BranchClass::Sub(sub)])])).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn monodromy_zeta_examples() {
        assert_eq!(monodromy_zeta(&cusp()).unwrap(), cyclo(&[(6, 1), (2, -1), (3, -1)]));
        let two = annotate(&Bamboo::new(vec![leaf_face(2, 3, 2)])).unwrap();
        assert_eq!(monodromy_zeta(&two).unwrap(), cyclo(&[(12, 2), (4, -1), (6, -1)]));
        assert_eq!(
            monodromy_zeta(&two_pair()).unwrap(),
            cyclo(&[(12, 1), (4, -1), (6, -1), (38, 1), (19, -1)])
        );
    }

    #[test]
    fn char_poly_examples() {
        let d = characteristic_poly(&monodromy_zeta(&cusp()).unwrap()).unwrap();
        assert_eq!(d.expanded, Some(vec![big(1), big(-1), big(1)]));
        assert_eq!(d.mu, big(2));
        assert_eq!(d.render(), "1 - t + t^2");
        let d = characteristic_poly(&CycloProduct::one()).unwrap();
        assert_eq!(d.expanded, Some(vec![big(1), big(-1)]));
        assert_eq!(d.mu, big(1));
        assert_eq!(d.is_palindromic(), Some(true));
    }

    #[test]
    fn not_a_polynomial() {
        // (1 - t)/(1 - t^2) has a pole at t = -1.
        let err = characteristic_poly(&cyclo(&[(2, -1)])).unwrap_err();
        assert!(matches!(err, Error::NotPolynomial { .. }), "{err}");
        // 1/((1-t^4)(1-t^6)) * (1-t^12): the order-2 roots have multiplicity -1.
        assert!(!cyclo(&[(1, 1), (4, -1), (6, -1), (12, 1)]).is_polynomial());
    }

    #[test]
    fn expansion_cap() {
        let z = monodromy_zeta(&two_pair()).unwrap();
        let full = characteristic_poly(&z).unwrap();
        assert_eq!(full.mu, big(22));
        assert_eq!(full.is_palindromic(), Some(true));
        let capped = characteristic_poly_with_cap(&z, 10).unwrap();
        assert_eq!(capped.expanded, None);
        assert_eq!(capped.mu, big(22));
    }

    #[test]
    fn root_multiplicities() {
        let d = characteristic_poly(&monodromy_zeta(&cusp()).unwrap()).unwrap();
        assert_eq!(d.root_multiplicity(&big(6)), 1);
        assert_eq!(d.root_multiplicity(&big(2)), 0);
        assert_eq!(d.root_multiplicity(&big(3)), 0);
        let total: i64 = d.cyclo.iter().map(|(_, e)| e).sum();
        assert_eq!(d.root_multiplicity(&big(1)), total);
    }

    #[test]
    fn eigenvalues() {
        let d = characteristic_poly(&monodromy_zeta(&cusp()).unwrap()).unwrap();
        assert!(is_eigenvalue(&d, &q(-5, 6)).is_eigenvalue);
        assert_eq!(is_eigenvalue(&d, &q(-1, 1)).witness, EigenvalueWitness::H0);
        assert!(!is_eigenvalue(&d, &q(-1, 2)).is_eigenvalue);
    }

    #[test]
    fn conjecture_on_examples() {
        let r = verify_conjecture(&cusp()).unwrap();
        assert!(r.holds());
        assert_eq!(r.verdicts.len(), 2);
        let r = verify_conjecture(&two_pair()).unwrap();
        assert!(r.holds());
        let values: Vec<_> = r.verdicts.iter().map(|v| v.pole.value.clone()).collect();
        assert_eq!(values, vec![q(-1, 1), q(-17, 38), q(-5, 12)]);
    }

    #[test]
    fn display() {
        assert_eq!(cyclo(&[(6, 1), (2, -1), (3, -1)]).to_string(), "(1 - t^6)/((1 - t^2)(1 - t^3))");
        assert_eq!(CycloProduct::one().to_string(), "1");
    }
}

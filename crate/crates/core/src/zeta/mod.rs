//! Closed-form local topological zeta functions and their poles.

mod ratfunc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub use ratfunc::{DenominatorEntry, LinearFactor, Pole, RationalFunction, RationalFunctionJson};

use crate::equitree::{validate_triples, AnnotatedBamboo, AnnotatedTree, BambooPath, FaceTriple};
use crate::error::Result;
use crate::lattice::{det, PrimitiveVector};

fn factor(n: &BigInt, nu: &BigInt) -> LinearFactor {
    LinearFactor::new(n.clone(), nu.clone())
}

/// Zeta function of a Newton-nondegenerate curve from its face list:
///
/// `sum_{i=0..k} det(P_i,P_{i+1}) / ((N_i s + nu_i)(N_{i+1} s + nu_{i+1}))
///   - s/(s+1) * sum_{i=1..k} r_i / (N_i s + nu_i)`
///
/// with frames `P_0 = (1,0)`, `P_{k+1} = (0,1)` carrying `(N, nu) = (0, 1)`.
pub fn zeta_nondegenerate(faces: &[FaceTriple]) -> Result<RationalFunction> {
    validate_triples(faces)?;
    let k = faces.len();
    let mut rays = vec![PrimitiveVector::x_axis()];
    let mut data = vec![(BigInt::zero(), BigInt::one())];
    for (i, face) in faces.iter().enumerate() {
        let below: BigInt = faces[..=i].iter().map(|t| &t.b * BigInt::from(t.r)).sum();
        let above: BigInt = faces[i + 1..].iter().map(|t| &t.a * BigInt::from(t.r)).sum();
        data.push((&face.a * below + &face.b * above, &face.a + &face.b));
        rays.push(PrimitiveVector::new(face.a.clone(), face.b.clone())?);
    }
    rays.push(PrimitiveVector::y_axis());
    data.push((BigInt::zero(), BigInt::one()));

    let mut terms = Vec::with_capacity(2 * k + 1);
    for i in 0..=k {
        terms.push(RationalFunction::simple(
            det(&rays[i], &rays[i + 1]),
            &[factor(&data[i].0, &data[i].1), factor(&data[i + 1].0, &data[i + 1].1)],
        ));
    }
    let s = vec![BigInt::zero(), BigInt::one()];
    for (i, face) in faces.iter().enumerate() {
        let (n, nu) = &data[i + 1];
        let numer: Vec<BigInt> = s.iter().map(|c| -c * BigInt::from(face.r)).collect();
        terms.push(RationalFunction::term(numer, &[LinearFactor::branch(), factor(n, nu)]));
    }
    Ok(RationalFunction::sum(terms))
}

/// Contribution of one non-top bamboo, without its leaf terms.
fn bamboo_terms(bamboo: &AnnotatedBamboo, terms: &mut Vec<RationalFunction>) {
    let first = &bamboo.faces[0];
    terms.push(RationalFunction::simple(
        first.b().clone(),
        &[factor(&bamboo.root_n, &bamboo.root_nu), factor(&first.n, &first.nu)],
    ));
    for (i, face) in bamboo.faces.iter().enumerate() {
        let here = factor(&face.n, &face.nu);
        match bamboo.faces.get(i + 1) {
            Some(next) => terms.push(RationalFunction::simple(
                det(&face.vector, &next.vector),
                &[here.clone(), factor(&next.n, &next.nu)],
            )),
            // det(P_k, (0,1)) = a_k against the frame (N, nu) = (0, 1).
            None => terms.push(RationalFunction::simple(face.a().clone(), &[here.clone()])),
        }
        terms.push(RationalFunction::simple(-BigInt::from(face.r()), &[here.clone()]));
        for _ in 0..face.leaf_count() {
            terms.push(RationalFunction::simple(1, &[here.clone(), LinearFactor::branch()]));
        }
    }
}

/// Zeta function of a general curve from its annotated tree: a sum over
/// every non-top bamboo, plus one `1/((N s + nu)(s + 1))` per leaf.
pub fn zeta_general(tree: &AnnotatedTree) -> RationalFunction {
    let mut terms = Vec::new();
    for bamboo in tree.bamboos() {
        bamboo_terms(bamboo, &mut terms);
    }
    RationalFunction::sum(terms)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(untagged)]
pub enum Provenance {
    /// Principal vertex `face` (0-based) of the bamboo at `bamboo`.
    Vertex { bamboo: BambooPath, face: usize },
    /// The pole `-1` coming from the strict transform.
    Universal,
}

impl Provenance {
    pub fn describe(&self) -> String {
        match self {
            Provenance::Vertex { bamboo, face } => bamboo.face_path(*face),
            Provenance::Universal => "strict transform".into(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Candidate {
    pub value: BigRational,
    pub provenance: Provenance,
}

/// `-nu(P_i)/N(P_i)` for every principal vertex, then the universal `-1`.
/// Coinciding values keep their separate provenance.
pub fn candidate_poles(tree: &AnnotatedTree) -> Vec<Candidate> {
    let mut out = Vec::new();
    for bamboo in tree.bamboos() {
        for (i, face) in bamboo.faces.iter().enumerate() {
            out.push(Candidate {
                value: BigRational::new(-face.nu.clone(), face.n.clone()),
                provenance: Provenance::Vertex { bamboo: bamboo.path.clone(), face: i },
            });
        }
    }
    out.push(Candidate { value: -BigRational::one(), provenance: Provenance::Universal });
    out
}

pub fn poles(z: &RationalFunction) -> Vec<Pole> {
    z.poles()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleOrderClass {
    AtMostOne,
    OrderTwoCandidate,
}

/// Order-two candidate iff `D_i = nu_root * beta_i - alpha_i` vanishes at
/// the principal vertex. `None` if the path or index does not exist.
pub fn pole_order_predicate(tree: &AnnotatedTree, bamboo: &BambooPath, face: usize) -> Option<PoleOrderClass> {
    let b = tree.bamboo(bamboo)?;
    let f = b.faces.get(face)?;
    Some(if f.d.is_zero() { PoleOrderClass::OrderTwoCandidate } else { PoleOrderClass::AtMostOne })
}

//! Equisingularity trees: bamboos of Newton pairs decorated with branch
//! classes, and their annotation with multiplicities `N` and discrepancy
//! data `nu` at every principal vertex.
//!
//! A bamboo is a list of faces `(a_i, b_i)` in increasing slope order. Each
//! face carries the classes of branches whose initial expansion is a power
//! of `y^a + xi * x^b` for one root `xi`. A class is either a single smooth
//! branch ([`BranchClass::Leaf`]) or a successor bamboo describing the
//! further resolution of that class.

mod json;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{det, PrimitiveVector};

pub use json::{parse_tree_json, tree_to_json};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BranchClass {
    Leaf,
    Sub(Bamboo),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Face {
    pub a: BigInt,
    pub b: BigInt,
    pub classes: Vec<BranchClass>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Bamboo {
    pub faces: Vec<Face>,
}

/// One face of a nondegenerate Newton polygon: normal `(a, b)` and the
/// number `r` of distinct roots of its face polynomial.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct FaceTriple {
    #[serde(serialize_with = "decimal")]
    pub a: BigInt,
    #[serde(serialize_with = "decimal")]
    pub b: BigInt,
    pub r: usize,
}

fn decimal<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl FaceTriple {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, r: usize) -> Self {
        FaceTriple { a: a.into(), b: b.into(), r }
    }
}

impl Face {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, classes: Vec<BranchClass>) -> Self {
        Face { a: a.into(), b: b.into(), classes }
    }
}

impl Bamboo {
    pub fn new(faces: Vec<Face>) -> Self {
        Bamboo { faces }
    }

    /// A leaf-only bamboo with `r` leaves on each face.
    pub fn from_triples(triples: &[FaceTriple]) -> Self {
        let faces = triples
            .iter()
            .map(|t| Face::new(t.a.clone(), t.b.clone(), vec![BranchClass::Leaf; t.r]))
            .collect();
        Bamboo { faces }
    }

    /// Checks every face and bamboo constraint recursively; the error names
    /// the first violation and its path.
    pub fn validate(&self) -> Result<()> {
        validate_bamboo(self, "", 2)
    }

    pub fn depth(&self) -> usize {
        1 + self
            .faces
            .iter()
            .flat_map(|f| f.classes.iter())
            .map(|c| match c {
                BranchClass::Leaf => 0,
                BranchClass::Sub(b) => b.depth(),
            })
            .max()
            .unwrap_or(0)
    }
}

/// Constraints for the nondegenerate pipeline: `a, b >= 1` instead of 2.
pub fn validate_triples(triples: &[FaceTriple]) -> Result<()> {
    validate_bamboo(&Bamboo::from_triples(triples), "", 1)
}

fn validate_bamboo(bamboo: &Bamboo, path: &str, min_ab: i64) -> Result<()> {
    if bamboo.faces.is_empty() {
        return Err(Error::tree(format!("{path}/faces"), "a bamboo needs at least one face"));
    }
    let mut prev: Option<PrimitiveVector> = None;
    for (i, face) in bamboo.faces.iter().enumerate() {
        let fpath = format!("{path}/faces/{i}");
        let min = BigInt::from(min_ab);
        if face.a < min || face.b < min {
            return Err(Error::tree(
                &fpath,
                format!("a and b must be at least {min_ab}, got ({},{})", face.a, face.b),
            ));
        }
        if !face.a.gcd(&face.b).is_one() {
            return Err(Error::tree(&fpath, format!("gcd(a,b)≠1 for ({},{})", face.a, face.b)));
        }
        let p = PrimitiveVector::new(face.a.clone(), face.b.clone())?;
        if let Some(q) = &prev {
            if !det(q, &p).is_positive() {
                return Err(Error::tree(
                    &fpath,
                    format!("slope order violated: {q} must precede {p} with increasing b/a"),
                ));
            }
        }
        if face.classes.is_empty() {
            return Err(Error::tree(format!("{fpath}/classes"), "a face needs at least one class"));
        }
        for (l, class) in face.classes.iter().enumerate() {
            if let BranchClass::Sub(sub) = class {
                validate_bamboo(sub, &format!("{fpath}/classes/{l}"), min_ab)?;
            }
        }
        prev = Some(p);
    }
    Ok(())
}

/// `1` for a leaf; `sum_t a'_t A'_t` over the faces of a successor bamboo.
pub fn class_multiplicity(class: &BranchClass) -> BigInt {
    match class {
        BranchClass::Leaf => BigInt::one(),
        BranchClass::Sub(sub) => sub
            .faces
            .iter()
            .map(|f| &f.a * face_multiplicity(f))
            .sum(),
    }
}

fn face_multiplicity(face: &Face) -> BigInt {
    face.classes.iter().map(class_multiplicity).sum()
}

/// Location of a bamboo: the sequence of (face, class) indices leading to it
/// from the root bamboo.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct BambooPath(pub Vec<(usize, usize)>);

impl BambooPath {
    pub fn child(&self, face: usize, class: usize) -> Self {
        let mut v = self.0.clone();
        v.push((face, class));
        BambooPath(v)
    }

    pub fn face_path(&self, face: usize) -> String {
        format!("{self}/faces/{face}")
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl Serialize for BambooPath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for BambooPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (face, class) in &self.0 {
            write!(f, "/faces/{face}/classes/{class}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AnnotatedClass {
    Leaf,
    Sub(AnnotatedBamboo),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnnotatedFace {
    pub vector: PrimitiveVector,
    pub classes: Vec<AnnotatedClass>,
    /// `A_{i l}` per class.
    pub class_multiplicities: Vec<BigInt>,
    /// `A_i`.
    pub multiplicity: BigInt,
    /// `N_root + sum_{t<=i} b_t A_t`.
    pub alpha: BigInt,
    /// `sum_{t>i} a_t A_t`.
    pub beta: BigInt,
    pub n: BigInt,
    pub nu: BigInt,
    /// `nu_root * beta - alpha`; zero exactly when the neighbouring segment
    /// has constant ratio `nu/N`.
    pub d: BigInt,
}

impl AnnotatedFace {
    pub fn a(&self) -> &BigInt {
        self.vector.a()
    }

    pub fn b(&self) -> &BigInt {
        self.vector.b()
    }

    /// `r_i`, the number of classes.
    pub fn r(&self) -> usize {
        self.classes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.classes.iter().filter(|c| matches!(c, AnnotatedClass::Leaf)).count()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnnotatedBamboo {
    pub path: BambooPath,
    pub root_n: BigInt,
    pub root_nu: BigInt,
    /// `sum_t a_t A_t`, the `beta` of the segment before the first face.
    pub beta0: BigInt,
    pub faces: Vec<AnnotatedFace>,
}

impl AnnotatedBamboo {
    /// Segment `i` runs from principal vertex `i` to `i + 1`, with `0` and
    /// `k + 1` the frames. Returns `(alpha_i, beta_i)` so that
    /// `N(c,d) = c*alpha_i + d*beta_i` on that segment.
    pub fn segment_weights(&self, segment: usize) -> (BigInt, BigInt) {
        if segment == 0 {
            (self.root_n.clone(), self.beta0.clone())
        } else {
            let f = &self.faces[segment - 1];
            (f.alpha.clone(), f.beta.clone())
        }
    }

    pub fn k(&self) -> usize {
        self.faces.len()
    }

    pub fn last(&self) -> &AnnotatedFace {
        self.faces.last().expect("bamboo has faces")
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AnnotatedTree {
    pub root: AnnotatedBamboo,
}

/// A leaf class: the bamboo it hangs from, the face and class indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LeafRef {
    pub bamboo: BambooPath,
    pub face: usize,
    pub class: usize,
}

impl AnnotatedTree {
    /// Every non-top bamboo, depth-first, parents before children.
    pub fn bamboos(&self) -> Vec<&AnnotatedBamboo> {
        let mut out = Vec::new();
        collect_bamboos(&self.root, &mut out);
        out
    }

    pub fn bamboo(&self, path: &BambooPath) -> Option<&AnnotatedBamboo> {
        let mut cur = &self.root;
        for (face, class) in &path.0 {
            match cur.faces.get(*face)?.classes.get(*class)? {
                AnnotatedClass::Sub(sub) => cur = sub,
                AnnotatedClass::Leaf => return None,
            }
        }
        Some(cur)
    }

    pub fn leaves(&self) -> Vec<LeafRef> {
        let mut out = Vec::new();
        for bamboo in self.bamboos() {
            for (i, face) in bamboo.faces.iter().enumerate() {
                for (l, class) in face.classes.iter().enumerate() {
                    if matches!(class, AnnotatedClass::Leaf) {
                        out.push(LeafRef { bamboo: bamboo.path.clone(), face: i, class: l });
                    }
                }
            }
        }
        out
    }
}

fn collect_bamboos<'a>(bamboo: &'a AnnotatedBamboo, out: &mut Vec<&'a AnnotatedBamboo>) {
    out.push(bamboo);
    for face in &bamboo.faces {
        for class in &face.classes {
            if let AnnotatedClass::Sub(sub) = class {
                collect_bamboos(sub, out);
            }
        }
    }
}

/// Validates and annotates an equisingularity tree; the root bamboo has
/// context `(N_root, nu_root) = (0, 1)`.
pub fn annotate(tree: &Bamboo) -> Result<AnnotatedTree> {
    tree.validate()?;
    Ok(AnnotatedTree {
        root: annotate_bamboo(tree, BambooPath::default(), BigInt::zero(), BigInt::one()),
    })
}

/// Annotation of a nondegenerate face list, seen as a one-bamboo tree with
/// `r_i` leaves on face `i`.
pub fn annotate_triples(triples: &[FaceTriple]) -> Result<AnnotatedTree> {
    validate_triples(triples)?;
    Ok(AnnotatedTree {
        root: annotate_bamboo(
            &Bamboo::from_triples(triples),
            BambooPath::default(),
            BigInt::zero(),
            BigInt::one(),
        ),
    })
}

fn annotate_bamboo(bamboo: &Bamboo, path: BambooPath, root_n: BigInt, root_nu: BigInt) -> AnnotatedBamboo {
    let class_mults: Vec<Vec<BigInt>> = bamboo
        .faces
        .iter()
        .map(|f| f.classes.iter().map(class_multiplicity).collect())
        .collect();
    let face_mults: Vec<BigInt> = class_mults.iter().map(|c| c.iter().sum()).collect();
    let beta0: BigInt = bamboo.faces.iter().zip(&face_mults).map(|(f, m)| &f.a * m).sum();

    let mut alpha = root_n.clone();
    let mut beta = beta0.clone();
    let mut faces = Vec::with_capacity(bamboo.faces.len());
    for (i, (face, mult)) in bamboo.faces.iter().zip(&face_mults).enumerate() {
        alpha += &face.b * mult;
        beta -= &face.a * mult;
        let n = &face.a * &alpha + &face.b * &beta;
        let nu = &face.a * &root_nu + &face.b;
        let d = &root_nu * &beta - &alpha;
        let classes = face
            .classes
            .iter()
            .enumerate()
            .map(|(l, class)| match class {
                BranchClass::Leaf => AnnotatedClass::Leaf,
                BranchClass::Sub(sub) => {
                    AnnotatedClass::Sub(annotate_bamboo(sub, path.child(i, l), n.clone(), nu.clone()))
                }
            })
            .collect();
        faces.push(AnnotatedFace {
            vector: PrimitiveVector::new(face.a.clone(), face.b.clone()).expect("validated face"),
            classes,
            class_multiplicities: class_mults[i].clone(),
            multiplicity: mult.clone(),
            alpha: alpha.clone(),
            beta: beta.clone(),
            n,
            nu,
            d,
        });
    }
    AnnotatedBamboo { path, root_n, root_nu, beta0, faces }
}

//! Primitive weight vectors in the closed positive quadrant and regular
//! simplicial subdivisions of the quadrant.
//!
//! Vectors are ordered by angle: `P < Q` iff `det(P, Q) > 0`, so `(1,0)` is
//! the smallest vector and `(0,1)` the largest. A subdivision is regular when
//! consecutive vectors, framed by `(1,0)` and `(0,1)`, have determinant 1.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A primitive lattice vector `(a, b)` with `a, b >= 0` and `gcd(a, b) = 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PrimitiveVector {
    a: BigInt,
    b: BigInt,
}

impl PrimitiveVector {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if a.is_negative() || b.is_negative() {
            return Err(Error::Lattice(format!("({a},{b}) leaves the positive quadrant")));
        }
        if !a.gcd(&b).is_one() {
            return Err(Error::Lattice(format!("({a},{b}) is not primitive")));
        }
        Ok(PrimitiveVector { a, b })
    }

    /// Shorthand for small literals; panics on non-primitive input.
    pub fn of(a: i64, b: i64) -> Self {
        Self::new(a, b).expect("primitive vector literal")
    }

    pub fn x_axis() -> Self {
        PrimitiveVector { a: BigInt::one(), b: BigInt::zero() }
    }

    pub fn y_axis() -> Self {
        PrimitiveVector { a: BigInt::zero(), b: BigInt::one() }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_frame(&self) -> bool {
        self.a.is_zero() || self.b.is_zero()
    }
}

impl fmt::Display for PrimitiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Serialize for PrimitiveVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string()].serialize(s)
    }
}

impl Ord for PrimitiveVector {
    fn cmp(&self, other: &Self) -> Ordering {
        // det(P, Q) > 0 means P comes first.
        BigInt::zero().cmp(&det(self, other))
    }
}

impl PartialOrd for PrimitiveVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `det((a,b),(a',b')) = a*b' - b*a'`, the vectors taken as columns.
pub fn det(p: &PrimitiveVector, q: &PrimitiveVector) -> BigInt {
    &p.a * &q.b - &p.b * &q.a
}

pub fn slope_less(p: &PrimitiveVector, q: &PrimitiveVector) -> bool {
    det(p, q).is_positive()
}

/// The lattice points on the compact boundary of the convex hull of the
/// nonzero lattice points of the cone spanned by `u` and `v`, strictly
/// between `u` and `v`.
///
/// Each step picks the unique vector `w = (v + q*cur)/d` with `0 < q < d`,
/// where `d = det(cur, v)`; then `det(cur, w) = 1` and `det(w, v) = q`.
pub fn minimal_regular_refinement(u: &PrimitiveVector, v: &PrimitiveVector) -> Result<Vec<PrimitiveVector>> {
    let mut d = det(u, v);
    if !d.is_positive() {
        return Err(Error::Lattice(format!("det({u},{v}) = {d} is not positive")));
    }
    let mut out = Vec::new();
    let mut cur = u.clone();
    while !d.is_one() {
        let eg = cur.a.extended_gcd(&cur.b);
        debug_assert!(eg.gcd.is_one());
        let dot = &eg.x * &v.a + &eg.y * &v.b;
        let q = (-dot).mod_floor(&d);
        let wa = &v.a + &q * &cur.a;
        let wb = &v.b + &q * &cur.b;
        debug_assert!(wa.is_multiple_of(&d) && wb.is_multiple_of(&d));
        let w = PrimitiveVector { a: wa / &d, b: wb / &d };
        out.push(w.clone());
        cur = w;
        d = q;
    }
    Ok(out)
}

/// A regular simplicial subdivision `T_1 < ... < T_m` of the positive
/// quadrant, frames excluded.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(transparent)]
pub struct Subdivision {
    vectors: Vec<PrimitiveVector>,
}

impl Subdivision {
    pub fn new(vectors: Vec<PrimitiveVector>) -> Result<Self> {
        let sub = Subdivision { vectors };
        sub.check_regular()?;
        Ok(sub)
    }

    pub fn vectors(&self) -> &[PrimitiveVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Rays with both frames attached: `(1,0), T_1, ..., T_m, (0,1)`.
    pub fn framed(&self) -> Vec<PrimitiveVector> {
        let mut all = Vec::with_capacity(self.vectors.len() + 2);
        all.push(PrimitiveVector::x_axis());
        all.extend(self.vectors.iter().cloned());
        all.push(PrimitiveVector::y_axis());
        all
    }

    fn check_regular(&self) -> Result<()> {
        for pair in self.framed().windows(2) {
            let d = det(&pair[0], &pair[1]);
            if !d.is_one() {
                return Err(Error::Lattice(format!(
                    "det({},{}) = {d}, subdivision is not regular",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }
}

/// The minimal regular subdivision containing every principal vector.
pub fn admissible_subdivision(principal: &[PrimitiveVector]) -> Result<Subdivision> {
    for p in principal {
        if p.is_frame() {
            return Err(Error::Lattice(format!("principal vector {p} lies on a frame")));
        }
    }
    for pair in principal.windows(2) {
        if !slope_less(&pair[0], &pair[1]) {
            return Err(Error::Lattice(format!(
                "principal vectors {} and {} are not strictly increasing",
                pair[0], pair[1]
            )));
        }
    }
    let mut rays = Vec::with_capacity(principal.len() + 2);
    rays.push(PrimitiveVector::x_axis());
    rays.extend(principal.iter().cloned());
    rays.push(PrimitiveVector::y_axis());
    regularize(&rays)
}

/// Refines `sub` so that it also contains every ray of `extra`.
pub fn insert_rays(sub: &Subdivision, extra: &[PrimitiveVector]) -> Result<Subdivision> {
    let mut rays = sub.framed();
    for ray in extra {
        if ray.is_frame() {
            return Err(Error::Lattice(format!("extra ray {ray} lies on a frame")));
        }
        match rays.binary_search(ray) {
            Ok(_) => return Err(Error::Lattice(format!("extra ray {ray} is already present"))),
            Err(pos) => rays.insert(pos, ray.clone()),
        }
    }
    regularize(&rays)
}

/// `rays` is framed and strictly increasing.
fn regularize(rays: &[PrimitiveVector]) -> Result<Subdivision> {
    let mut vectors = Vec::new();
    for (idx, pair) in rays.windows(2).enumerate() {
        if idx > 0 {
            vectors.push(pair[0].clone());
        }
        vectors.extend(minimal_regular_refinement(&pair[0], &pair[1])?);
    }
    let sub = Subdivision { vectors };
    debug_assert!(sub.check_regular().is_ok());
    Ok(sub)
}

//! Polynomial input: parsing, Newton polygon faces, the nondegeneracy test
//! and conversion to face triples.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::equitree::{annotate_triples, FaceTriple};
use crate::error::{Error, Result};
use crate::lattice::PrimitiveVector;
use crate::oracle::{build_graph, ResolutionGraph, Strategy};

/// Exponent pair `(i, j)` of `x^i y^j`.
pub type Exponent = (u64, u64);

/// Sparse bivariate polynomial with rational coefficients, no constant term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparsePoly {
    terms: BTreeMap<Exponent, BigRational>,
}

impl SparsePoly {
    /// Drops zero coefficients; rejects the zero polynomial and a nonzero
    /// constant term.
    pub fn new(terms: BTreeMap<Exponent, BigRational>) -> Result<Self> {
        let terms: BTreeMap<_, _> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        if terms.contains_key(&(0, 0)) {
            return Err(Error::ConstantTerm);
        }
        Ok(SparsePoly { terms })
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, e: Exponent) -> Option<&BigRational> {
        self.terms.get(&e)
    }

    pub fn scale(&self, c: &BigRational) -> Result<Self> {
        SparsePoly::new(self.terms.iter().map(|(e, v)| (*e, v * c)).collect())
    }
}

/// Graded order: total degree, then descending power of `x`.
fn graded_key(e: &Exponent) -> (u64, std::cmp::Reverse<u64>) {
    (e.0 + e.1, std::cmp::Reverse(e.0))
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut exps: Vec<&Exponent> = self.terms.keys().collect();
        exps.sort_by_key(|e| graded_key(e));
        for (idx, e) in exps.into_iter().enumerate() {
            let c = &self.terms[e];
            let abs = c.abs();
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut parts = Vec::new();
            if !abs.is_one() {
                parts.push(abs.to_string());
            }
            for (var, k) in [("x", e.0), ("y", e.1)] {
                match k {
                    0 => {}
                    1 => parts.push(var.to_string()),
                    _ => parts.push(format!("{var}^{k}")),
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

struct Lexer {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Lexer {
    fn new(src: &str) -> Self {
        let chars: Vec<(usize, char)> = src.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        Lexer { chars, pos: 0, len: src.len() }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        self.pos += 1;
        c
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { position: self.offset(), message: message.into() })
    }

    fn integer(&mut self) -> Result<BigInt> {
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return self.error("expected an integer");
        }
        Ok(digits.parse().expect("ascii digits"))
    }

    fn exponent(&mut self) -> Result<u64> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let at = self.offset();
        let k = self.integer()?;
        u64::try_from(&k).map_err(|_| Error::Syntax { position: at, message: "exponent too large".into() })
    }

    fn term(&mut self) -> Result<(Exponent, BigRational)> {
        let mut coef = BigRational::one();
        let mut seen = false;
        if self.peek().is_some_and(|c| c.is_ascii_digit()) {
            let num = self.integer()?;
            let mut den = BigInt::one();
            if self.peek() == Some('/') {
                self.pos += 1;
                let at = self.offset();
                den = self.integer()?;
                if den.is_zero() {
                    return Err(Error::Syntax { position: at, message: "zero denominator".into() });
                }
            }
            coef = BigRational::new(num, den);
            seen = true;
        }
        let mut exp = (0u64, 0u64);
        loop {
            let save = self.pos;
            let star = self.peek() == Some('*');
            if star {
                if !seen {
                    return self.error("unexpected '*'");
                }
                self.pos += 1;
            }
            match self.peek() {
                Some('x') => {
                    self.pos += 1;
                    exp.0 += self.exponent()?;
                }
                Some('y') => {
                    self.pos += 1;
                    exp.1 += self.exponent()?;
                }
                _ if star => return self.error("expected 'x' or 'y' after '*'"),
                _ => {
                    self.pos = save;
                    break;
                }
            }
            seen = true;
        }
        if !seen {
            return match self.peek() {
                Some(c) => self.error(format!("unexpected '{c}'")),
                None => self.error("unexpected end of input"),
            };
        }
        Ok((exp, coef))
    }
}

/// Parses `[sign] term {(+|-) term}` with
/// `term = [int[/int]][*][x[^int]][*][y[^int]]`; whitespace is ignored.
pub fn parse_poly(text: &str) -> Result<SparsePoly> {
    let mut lx = Lexer::new(text);
    let mut terms: BTreeMap<Exponent, BigRational> = BTreeMap::new();
    let mut first = true;
    loop {
        let negative = match lx.peek() {
            Some('+') => {
                lx.bump();
                false
            }
            Some('-') => {
                lx.bump();
                true
            }
            None if first => return lx.error("empty input"),
            _ if first => false,
            Some(c) => return lx.error(format!("expected '+' or '-', found '{c}'")),
            None => break,
        };
        let (e, c) = lx.term()?;
        *terms.entry(e).or_insert_with(BigRational::zero) += if negative { -c } else { c };
        first = false;
        if lx.peek().is_none() {
            break;
        }
    }
    SparsePoly::new(terms)
}

/// Univariate polynomial over the rationals, lowest degree first, no
/// trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FacePoly(pub Vec<BigRational>);

impl FacePoly {
    fn trimmed(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        FacePoly(c)
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn derivative(&self) -> Self {
        FacePoly::trimmed(
            self.0.iter().enumerate().skip(1).map(|(j, c)| c * BigRational::from_integer(j.into())).collect(),
        )
    }

    fn rem(&self, d: &Self) -> Self {
        let mut r = self.0.clone();
        let lead = d.0.last().expect("nonzero divisor");
        while r.len() >= d.0.len() && !r.is_empty() {
            let shift = r.len() - d.0.len();
            let q = r.last().expect("nonempty") / lead;
            for (j, c) in d.0.iter().enumerate() {
                r[shift + j] -= &q * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        FacePoly(r)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.0.is_empty() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.0.last().cloned() {
            Some(lead) => FacePoly(a.0.iter().map(|c| c / &lead).collect()),
            None => a,
        }
    }
}

impl fmt::Display for FacePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: BTreeMap<Exponent, BigRational> =
            self.0.iter().enumerate().map(|(j, c)| ((j as u64, 0), c.clone())).collect();
        let terms: BTreeMap<_, _> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return f.write_str("0");
        }
        let mut parts: Vec<(u64, &BigRational)> = terms.iter().map(|(e, c)| (e.0, c)).collect();
        parts.reverse();
        for (idx, (k, c)) in parts.into_iter().enumerate() {
            let abs = c.abs();
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match k {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    if k == 1 {
                        f.write_str("z")?;
                    } else {
                        write!(f, "z^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NewtonFace {
    pub normal: PrimitiveVector,
    /// Lattice points of the face from the high-`y` end.
    pub lattice_points: Vec<Exponent>,
    /// Coefficient `j` is the coefficient of `f` at `lattice_points[j]`.
    pub face_poly: FacePoly,
}

fn cross(o: Exponent, a: Exponent, b: Exponent) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

/// Compact faces of the Newton polygon, ordered by the slope of their
/// primitive inner normals.
pub fn newton_faces(f: &SparsePoly) -> Result<Vec<NewtonFace>> {
    let x_end = f.terms.keys().filter(|e| e.1 == 0).map(|e| e.0).min();
    let y_end = f.terms.keys().filter(|e| e.0 == 0).map(|e| e.1).min();
    let (Some(x_end), Some(_)) = (x_end, y_end) else {
        return Err(Error::MonomialFactor);
    };
    // Lowest point in each column left of the x-axis vertex.
    let mut columns: BTreeMap<u64, u64> = BTreeMap::new();
    for &(i, j) in f.terms.keys().filter(|e| e.0 <= x_end) {
        columns.entry(i).and_modify(|m| *m = (*m).min(j)).or_insert(j);
    }
    let mut hull: Vec<Exponent> = Vec::new();
    for (i, j) in columns {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], (i, j)) <= 0 {
            hull.pop();
        }
        hull.push((i, j));
    }
    let mut faces = Vec::new();
    for w in hull.windows(2) {
        let (p, q) = (w[0], w[1]);
        let dx = q.0 - p.0;
        let dy = p.1 - q.1;
        let g = dx.gcd(&dy);
        let (b, a) = (dx / g, dy / g);
        let lattice_points: Vec<Exponent> = (0..=g).map(|j| (p.0 + j * b, p.1 - j * a)).collect();
        let coeffs = lattice_points
            .iter()
            .map(|e| f.terms.get(e).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        faces.push(NewtonFace {
            normal: PrimitiveVector::new(a, b)?,
            lattice_points,
            face_poly: FacePoly::trimmed(coeffs),
        });
    }
    faces.sort_by(|u, v| u.normal.cmp(&v.normal));
    Ok(faces)
}

/// `Err(Degenerate)` names the first face whose polynomial has a repeated
/// root, together with `gcd(G, G')`.
pub fn nondegeneracy_check(faces: &[NewtonFace]) -> Result<()> {
    for face in faces {
        let g = face.face_poly.gcd(&face.face_poly.derivative());
        if g.degree() > 0 {
            return Err(Error::Degenerate {
                face: face.normal.to_string(),
                face_poly: face.face_poly.to_string(),
                gcd: g.to_string(),
            });
        }
    }
    Ok(())
}

pub fn to_face_specs(faces: &[NewtonFace]) -> Result<Vec<FaceTriple>> {
    nondegeneracy_check(faces)?;
    Ok(faces
        .iter()
        .map(|f| FaceTriple::new(f.normal.a().clone(), f.normal.b().clone(), f.face_poly.degree()))
        .collect())
}

/// Parses, extracts faces and checks nondegeneracy in one step.
pub fn face_specs_of(text: &str) -> Result<Vec<FaceTriple>> {
    to_face_specs(&newton_faces(&parse_poly(text)?)?)
}

pub fn build_graph_nondegenerate(specs: &[FaceTriple]) -> Result<ResolutionGraph> {
    build_graph(&annotate_triples(specs)?, Strategy::Minimal)
}

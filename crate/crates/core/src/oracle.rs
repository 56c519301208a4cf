//! The full resolution graph of an equisingularity tree, and zeta functions
//! recomputed from it by the defining stratum sum.
//!
//! Every bamboo contributes one exceptional divisor per vector of a regular
//! subdivision of the quadrant. On the segment between principal vectors
//! `P_i <= T < P_{i+1}` the data of `T = (c, d)` are
//! `N(T) = c*alpha_i + d*beta_i` and `nu(T) = c*nu_root + d`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equitree::{AnnotatedBamboo, AnnotatedClass, AnnotatedTree, BambooPath};
use crate::error::{Error, Result};
use crate::lattice::{admissible_subdivision, insert_rays, PrimitiveVector};
use crate::zeta::{LinearFactor, RationalFunction};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Exceptional,
    Branch,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DivisorNode {
    pub id: usize,
    pub kind: NodeKind,
    /// Subdivision vector; `None` for branches.
    pub vector: Option<PrimitiveVector>,
    pub bamboo: BambooPath,
    /// Segment index `i` with `P_i <= T < P_{i+1}` (exceptional only).
    pub segment: usize,
    /// Face index when the node is a principal vertex.
    pub principal: Option<usize>,
    pub n: BigInt,
    pub nu: BigInt,
    /// `chi` of the divisor minus its intersection points, `2 - degree`;
    /// zero for branches.
    pub chi_open: i64,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ResolutionGraph {
    pub nodes: Vec<DivisorNode>,
    pub edges: Vec<(usize, usize)>,
    /// `nu_root * beta_i - alpha_i` for every (bamboo, segment).
    pub segment_constants: BTreeMap<(BambooPath, usize), BigInt>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    Minimal,
    /// Inserts `per_bamboo` random rays into every bamboo's subdivision.
    WithExtraRays { seed: u64, per_bamboo: usize },
}

impl Strategy {
    pub fn with_extra_rays(seed: u64) -> Self {
        Strategy::WithExtraRays { seed, per_bamboo: 3 }
    }
}

/// Bound on the coordinates of random extra rays.
const EXTRA_RAY_BOUND: i64 = 24;

struct Builder {
    nodes: Vec<DivisorNode>,
    edges: Vec<(usize, usize)>,
    segment_constants: BTreeMap<(BambooPath, usize), BigInt>,
    rng: Option<(ChaCha8Rng, usize)>,
}

pub fn build_graph(tree: &AnnotatedTree, strategy: Strategy) -> Result<ResolutionGraph> {
    let rng = match strategy {
        Strategy::Minimal => None,
        Strategy::WithExtraRays { seed, per_bamboo } => Some((ChaCha8Rng::seed_from_u64(seed), per_bamboo)),
    };
    let mut b = Builder { nodes: Vec::new(), edges: Vec::new(), segment_constants: BTreeMap::new(), rng };
    b.add_bamboo(&tree.root, None)?;
    let mut degree = vec![0i64; b.nodes.len()];
    for &(u, v) in &b.edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    for node in &mut b.nodes {
        if node.kind == NodeKind::Exceptional {
            node.chi_open = 2 - degree[node.id];
        }
    }
    Ok(ResolutionGraph { nodes: b.nodes, edges: b.edges, segment_constants: b.segment_constants })
}

impl Builder {
    fn extra_rays(&mut self, existing: &[PrimitiveVector]) -> Vec<PrimitiveVector> {
        let Some((rng, count)) = self.rng.as_mut() else {
            return Vec::new();
        };
        let mut out: Vec<PrimitiveVector> = Vec::new();
        while out.len() < *count {
            let a = rng.gen_range(1..=EXTRA_RAY_BOUND);
            let b = rng.gen_range(1..=EXTRA_RAY_BOUND);
            let Ok(p) = PrimitiveVector::new(a, b) else { continue };
            if !existing.contains(&p) && !out.contains(&p) {
                out.push(p);
            }
        }
        out
    }

    fn add_bamboo(&mut self, bamboo: &AnnotatedBamboo, parent: Option<usize>) -> Result<()> {
        let principal: Vec<PrimitiveVector> = bamboo.faces.iter().map(|f| f.vector.clone()).collect();
        let mut sub = admissible_subdivision(&principal)?;
        let extra = self.extra_rays(sub.vectors());
        if !extra.is_empty() {
            sub = insert_rays(&sub, &extra)?;
        }
        for seg in 0..=bamboo.k() {
            let (alpha, beta) = bamboo.segment_weights(seg);
            let constant = &bamboo.root_nu * &beta - &alpha;
            self.segment_constants.insert((bamboo.path.clone(), seg), constant);
        }

        let mut ids = Vec::with_capacity(sub.len());
        let mut principal_ids = vec![0usize; bamboo.k()];
        for t in sub.vectors() {
            let segment = principal.iter().filter(|p| *p <= t).count();
            let (alpha, beta) = bamboo.segment_weights(segment);
            let n = t.a() * &alpha + t.b() * &beta;
            let nu = t.a() * &bamboo.root_nu + t.b();
            let face = principal.iter().position(|p| p == t);
            if let Some(i) = face {
                if n != bamboo.faces[i].n || nu != bamboo.faces[i].nu {
                    return Err(Error::Consistency(format!(
                        "principal vertex {} of bamboo '{}': graph gives ({n},{nu}), tree gives ({},{})",
                        t, bamboo.path, bamboo.faces[i].n, bamboo.faces[i].nu
                    )));
                }
            }
            let id = self.nodes.len();
            self.nodes.push(DivisorNode {
                id,
                kind: NodeKind::Exceptional,
                vector: Some(t.clone()),
                bamboo: bamboo.path.clone(),
                segment,
                principal: face,
                n,
                nu,
                chi_open: 0,
            });
            if let Some(i) = face {
                principal_ids[i] = id;
            }
            ids.push(id);
        }
        for pair in ids.windows(2) {
            self.edges.push((pair[0], pair[1]));
        }
        if let Some(p) = parent {
            self.edges.push((p, ids[0]));
        }
        for (i, face) in bamboo.faces.iter().enumerate() {
            for class in &face.classes {
                match class {
                    AnnotatedClass::Leaf => {
                        let id = self.nodes.len();
                        self.nodes.push(DivisorNode {
                            id,
                            kind: NodeKind::Branch,
                            vector: None,
                            bamboo: bamboo.path.clone(),
                            segment: 0,
                            principal: None,
                            n: BigInt::one(),
                            nu: BigInt::one(),
                            chi_open: 0,
                        });
                        self.edges.push((principal_ids[i], id));
                    }
                    AnnotatedClass::Sub(child) => self.add_bamboo(child, Some(principal_ids[i]))?,
                }
            }
        }
        Ok(())
    }
}

impl DivisorNode {
    pub fn factor(&self) -> LinearFactor {
        LinearFactor::new(self.n.clone(), self.nu.clone())
    }

    pub fn is_exceptional(&self) -> bool {
        self.kind == NodeKind::Exceptional
    }
}

impl ResolutionGraph {
    pub fn exceptional_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_exceptional()).count()
    }

    pub fn degree(&self, id: usize) -> usize {
        self.edges.iter().filter(|(u, v)| *u == id || *v == id).count()
    }

    /// Tree shape, branch attachment and path structure of each bamboo.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.edges.len() + 1 != n {
            return Err(Error::Consistency(format!("{} nodes but {} edges", n, self.edges.len())));
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return Err(Error::Consistency(format!("cycle through edge ({u},{v})")));
            }
            parent[ru] = rv;
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in &self.edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        for &(u, v) in &self.edges {
            for (a, b) in [(u, v), (v, u)] {
                if !self.nodes[a].is_exceptional() {
                    if degree[a] != 1 {
                        return Err(Error::Consistency(format!("branch node {a} has degree {}", degree[a])));
                    }
                    if self.nodes[b].principal.is_none() {
                        return Err(Error::Consistency(format!("branch node {a} hangs off non-principal node {b}")));
                    }
                }
            }
            let (nu_, nv) = (&self.nodes[u], &self.nodes[v]);
            if nu_.is_exceptional() && nv.is_exceptional() && nu_.bamboo == nv.bamboo {
                let (p, q) = (nu_.vector.as_ref().expect("exceptional"), nv.vector.as_ref().expect("exceptional"));
                if crate::lattice::det(p, q) != BigInt::one() {
                    return Err(Error::Consistency(format!("edge ({u},{v}) joins non-adjacent rays {p}, {q}")));
                }
            }
        }
        Ok(())
    }

    /// `sum chi_open + #intersection points = #exceptional + 1`, the Euler
    /// characteristic of a tree of projective lines.
    pub fn euler_characteristic_check(&self) -> Result<()> {
        let chi: i64 = self.nodes.iter().filter(|n| n.is_exceptional()).map(|n| n.chi_open).sum();
        let points = self
            .edges
            .iter()
            .filter(|(u, v)| self.nodes[*u].is_exceptional() || self.nodes[*v].is_exceptional())
            .count() as i64;
        let m = self.exceptional_count() as i64;
        if chi + points != m + 1 {
            return Err(Error::Consistency(format!(
                "strata Euler characteristics sum to {} instead of {}",
                chi + points,
                m + 1
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id,
                    kind: n.kind,
                    vector: n.vector.clone(),
                    n: n.n.to_string(),
                    nu: n.nu.to_string(),
                    chi: n.is_exceptional().then_some(n.chi_open),
                })
                .collect(),
            edges: self.edges.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeJson {
    pub id: usize,
    pub kind: NodeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vector: Option<PrimitiveVector>,
    #[serde(rename = "N")]
    pub n: String,
    pub nu: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphJson {
    pub nodes: Vec<NodeJson>,
    pub edges: Vec<(usize, usize)>,
}

/// `sum_E chi(E°)/(N_E s + nu_E) + sum_{E ∩ E'} 1/((N_E s + nu_E)(N_E' s + nu_E'))`
/// over strata meeting the exceptional set; strata made only of branches
/// are not local to the origin.
pub fn definitional_zeta(graph: &ResolutionGraph) -> RationalFunction {
    // Graph order: each edge is listed just before its later endpoint.
    let mut edges: Vec<(usize, usize)> = graph.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    edges.sort_by_key(|&(u, v)| (v, u));
    let mut edges = edges.into_iter().peekable();
    let mut terms = Vec::new();
    for node in &graph.nodes {
        while let Some((u, v)) = edges.next_if(|&(_, v)| v == node.id) {
            let (a, b) = (&graph.nodes[u], &graph.nodes[v]);
            if a.is_exceptional() || b.is_exceptional() {
                terms.push(RationalFunction::simple(1, &[a.factor(), b.factor()]));
            }
        }
        if node.is_exceptional() && node.chi_open != 0 {
            terms.push(RationalFunction::simple(node.chi_open, &[node.factor()]));
        }
    }
    RationalFunction::sum(terms)
}

/// Along every edge between exceptional divisors of one segment,
/// `N(T_{j+1}) nu(T_j) - N(T_j) nu(T_{j+1})` equals the segment constant
/// `nu_root * beta_i - alpha_i`. The edge from a parent principal vertex to
/// the first divisor of a successor bamboo belongs to that bamboo's
/// segment 0.
pub fn chain_determinant_check(graph: &ResolutionGraph) -> Result<()> {
    for &(u, v) in &graph.edges {
        let (a, b) = (&graph.nodes[u], &graph.nodes[v]);
        if !a.is_exceptional() || !b.is_exceptional() {
            continue;
        }
        let (lo, hi, key) = if a.bamboo == b.bamboo {
            let (lo, hi) = if a.vector < b.vector { (a, b) } else { (b, a) };
            (lo, hi, (lo.bamboo.clone(), lo.segment))
        } else {
            let (parent, child) = if a.bamboo.depth() < b.bamboo.depth() { (a, b) } else { (b, a) };
            (parent, child, (child.bamboo.clone(), 0))
        };
        let lhs = &hi.n * &lo.nu - &lo.n * &hi.nu;
        let want = graph.segment_constants.get(&key).cloned().unwrap_or_else(BigInt::zero);
        if lhs != want {
            return Err(Error::Consistency(format!(
                "chain determinant on edge ({u},{v}) of bamboo '{}' segment {}: {lhs} != {want}",
                key.0, key.1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equitree::{annotate, annotate_triples, Bamboo, BranchClass, Face, FaceTriple};
    use crate::monodromy::{acampo_from_graph, CycloProduct};

    fn cusp() -> AnnotatedTree {
        annotate(&Bamboo::new(vec![Face::new(2, 3, vec![BranchClass::Leaf])])).unwrap()
    }

    fn data(g: &ResolutionGraph) -> Vec<(i64, i64, i64)> {
        g.nodes
            .iter()
            .filter(|n| n.is_exceptional())
            .map(|n| {
                (
                    i64::try_from(&n.n).unwrap(),
                    i64::try_from(&n.nu).unwrap(),
                    n.chi_open,
                )
            })
            .collect()
    }

    #[test]
    fn cusp_graph() {
        let g = build_graph(&cusp(), Strategy::Minimal).unwrap();
        assert_eq!(data(&g), vec![(2, 2, 1), (6, 5, -1), (3, 3, 1)]);
        assert_eq!(g.nodes.len(), 4);
        g.check_structure().unwrap();
        g.euler_characteristic_check().unwrap();
        chain_determinant_check(&g).unwrap();
        let want = RationalFunction::term(vec![5.into(), 4.into()], &[LinearFactor::new(1, 1), LinearFactor::new(6, 5)]);
        assert_eq!(definitional_zeta(&g), want);
        assert_eq!(
            acampo_from_graph(&g),
            CycloProduct::from_pairs([(6.into(), 1), (2.into(), -1), (3.into(), -1)])
        );
    }

    #[test]
    fn cusp_segment_constants() {
        let g = build_graph(&cusp(), Strategy::Minimal).unwrap();
        let root = BambooPath::default();
        assert_eq!(g.segment_constants[&(root.clone(), 0)], BigInt::from(2));
        assert_eq!(g.segment_constants[&(root, 1)], BigInt::from(-3));
    }

    #[test]
    fn node_graph() {
        let t = annotate_triples(&[FaceTriple::new(1, 1, 2)]).unwrap();
        let g = build_graph(&t, Strategy::Minimal).unwrap();
        assert_eq!(data(&g), vec![(2, 2, 0)]);
        assert_eq!(g.nodes.len(), 3);
        assert_eq!(
            definitional_zeta(&g),
            RationalFunction::simple(1, &[LinearFactor::new(1, 1), LinearFactor::new(1, 1)])
        );
        assert!(acampo_from_graph(&g).is_one());
    }

    #[test]
    fn extra_rays_are_neutral() {
        let g0 = build_graph(&cusp(), Strategy::Minimal).unwrap();
        for seed in 0..5 {
            let g = build_graph(&cusp(), Strategy::with_extra_rays(seed)).unwrap();
            assert!(g.exceptional_count() > g0.exceptional_count());
            g.check_structure().unwrap();
            chain_determinant_check(&g).unwrap();
            assert_eq!(definitional_zeta(&g), definitional_zeta(&g0));
            assert_eq!(acampo_from_graph(&g), acampo_from_graph(&g0));
        }
    }

    #[test]
    fn tampered_graph_fails_checks() {
        let mut g = build_graph(&cusp(), Strategy::Minimal).unwrap();
        g.nodes[1].n = BigInt::from(7);
        assert!(chain_determinant_check(&g).is_err());
        let mut g = build_graph(&cusp(), Strategy::Minimal).unwrap();
        g.edges.pop();
        assert!(g.check_structure().is_err());
    }

    #[test]
    fn sub_bamboo_hangs_off_principal_vertex() {
        let sub = Bamboo::new(vec![Face::new(2, 7, vec![BranchClass::Leaf])]);
        let t = annotate(&Bamboo::new(vec![Face::new(2, 3, vec![BranchClass::Sub(sub)])])).unwrap();
        let g = build_graph(&t, Strategy::Minimal).unwrap();
        g.check_structure().unwrap();
        chain_determinant_check(&g).unwrap();
        let ns: Vec<_> = data(&g).into_iter().map(|(n, _, _)| n).collect();
        assert_eq!(ns, vec![4, 12, 6, 14, 16, 18, 38, 19]);
    }
}

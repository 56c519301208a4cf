//! Seeded random trees and face lists, and the differential checks run on
//! each instance.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::equitree::{annotate, tree_to_json, AnnotatedTree, Bamboo, BranchClass, Face, FaceTriple};
use crate::error::{Error, Result};
use crate::frontend::{Exponent, SparsePoly};
use crate::monodromy::{acampo_from_graph, characteristic_poly_with_cap, check_poles, monodromy_zeta};
use crate::oracle::{build_graph, chain_determinant_check, definitional_zeta, ResolutionGraph, Strategy};
use crate::zeta::{candidate_poles, poles, zeta_general};

/// Expansion cap for `Delta` in fuzz runs; larger Milnor numbers are
/// checked through their cyclotomic exponents only.
pub const FUZZ_EXPANSION_CAP: u64 = 20_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuzzConfig {
    pub count: usize,
    pub seed: u64,
    /// Bamboo nesting depth; a tree without successors has depth 1.
    pub max_depth: usize,
    pub max_k: usize,
    pub max_ab: u32,
    pub max_classes: usize,
    /// Probability `(num, den)` that a class is a leaf when a successor
    /// bamboo would still fit.
    pub leaf_probability: (u32, u32),
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig { count: 1, seed: 0, max_depth: 3, max_k: 3, max_ab: 9, max_classes: 3, leaf_probability: (1, 2) }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Input("count must be at least 1".into()));
        }
        if self.max_depth == 0 || self.max_k == 0 || self.max_classes == 0 {
            return Err(Error::Input("max-depth, max-k and max-classes must be at least 1".into()));
        }
        if self.max_ab < 3 {
            return Err(Error::Input("max-ab must be at least 3".into()));
        }
        let (num, den) = self.leaf_probability;
        if den == 0 || num > den {
            return Err(Error::Input("leaf probability must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Coprime pairs `(a, b)` with `lo <= a, b <= hi`.
fn coprime_pairs(lo: u32, hi: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for a in lo..=hi {
        for b in lo..=hi {
            if a.gcd(&b) == 1 {
                out.push((a, b));
            }
        }
    }
    out
}

/// `k` distinct pairs sorted by increasing slope `b/a`.
fn pick_faces<R: Rng>(rng: &mut R, pool: &[(u32, u32)], k: usize) -> Vec<(u32, u32)> {
    let mut faces: Vec<(u32, u32)> = pool.choose_multiple(rng, k.min(pool.len())).copied().collect();
    faces.sort_by(|p, q| (u64::from(p.1) * u64::from(q.0)).cmp(&(u64::from(q.1) * u64::from(p.0))));
    faces
}

fn random_bamboo<R: Rng>(rng: &mut R, cfg: &FuzzConfig, pool: &[(u32, u32)], depth: usize) -> Bamboo {
    let k = rng.gen_range(1..=cfg.max_k);
    let faces = pick_faces(rng, pool, k)
        .into_iter()
        .map(|(a, b)| {
            let n = rng.gen_range(1..=cfg.max_classes);
            let classes = (0..n)
                .map(|_| {
                    let (num, den) = cfg.leaf_probability;
                    if depth >= cfg.max_depth || rng.gen_ratio(num, den) {
                        BranchClass::Leaf
                    } else {
                        BranchClass::Sub(random_bamboo(rng, cfg, pool, depth + 1))
                    }
                })
                .collect();
            Face::new(a, b, classes)
        })
        .collect();
    Bamboo::new(faces)
}

pub fn random_tree<R: Rng>(rng: &mut R, cfg: &FuzzConfig) -> Bamboo {
    random_bamboo(rng, cfg, &coprime_pairs(2, cfg.max_ab), 1)
}

/// `count` trees; instance `i` depends only on `(seed, i)` and the bounds.
pub fn generate_trees(cfg: &FuzzConfig) -> Vec<Bamboo> {
    (0..cfg.count).map(|i| random_tree(&mut instance_rng(cfg.seed, i as u64), cfg)).collect()
}

pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Face triples with `1 <= a, b <= max_ab` coprime, distinct slopes and
/// `1 <= r <= max_r`.
pub fn random_face_triples<R: Rng>(rng: &mut R, max_k: usize, max_ab: u32, max_r: usize) -> Vec<FaceTriple> {
    let pool = coprime_pairs(1, max_ab);
    let k = rng.gen_range(1..=max_k);
    pick_faces(rng, &pool, k)
        .into_iter()
        .map(|(a, b)| FaceTriple::new(a, b, rng.gen_range(1..=max_r)))
        .collect()
}

/// A polynomial whose Newton polygon has exactly the given faces, each face
/// polynomial having distinct nonzero integer roots, plus terms above the
/// polygon.
pub fn polynomial_with_faces<R: Rng>(rng: &mut R, faces: &[FaceTriple]) -> SparsePoly {
    let mut terms: BTreeMap<Exponent, BigRational> = BTreeMap::new();
    let to_u64 = |v: &BigInt| u64::try_from(v).expect("small face data");
    let height: u64 = faces.iter().map(|f| to_u64(&f.a) * f.r as u64).sum();
    let width: u64 = faces.iter().map(|f| to_u64(&f.b) * f.r as u64).sum();
    let mut point = (0u64, height);
    let mut scale = BigRational::one();
    for f in faces {
        let (a, b) = (to_u64(&f.a), to_u64(&f.b));
        let mut roots: Vec<i64> = Vec::new();
        while roots.len() < f.r {
            let z = rng.gen_range(-6i64..=6);
            if z != 0 && !roots.contains(&z) {
                roots.push(z);
            }
        }
        // prod (z - root), lowest degree first.
        let mut g = vec![BigInt::one()];
        for root in &roots {
            let mut next = vec![BigInt::zero(); g.len() + 1];
            for (j, c) in g.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * root;
            }
            g = next;
        }
        // Match the coefficient already placed at the shared vertex.
        let lambda = &scale / BigRational::from_integer(g[0].clone());
        for (j, c) in g.iter().enumerate() {
            let e = (point.0 + j as u64 * b, point.1 - j as u64 * a);
            terms.insert(e, &lambda * BigRational::from_integer(c.clone()));
        }
        scale = &lambda * BigRational::from_integer(g.last().expect("monic").clone());
        point = (point.0 + f.r as u64 * b, point.1 - f.r as u64 * a);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let e = if rng.gen_ratio(1, 2) {
            (width + rng.gen_range(0..3), rng.gen_range(1..3))
        } else {
            (rng.gen_range(1..3), height + rng.gen_range(0..3))
        };
        terms.entry(e).or_insert_with(|| BigRational::from_integer(rng.gen_range(1i64..=5).into()));
    }
    SparsePoly::new(terms).expect("nonzero polynomial without constant term")
}

pub fn tree_hash(tree: &Bamboo) -> String {
    let digest = Sha256::digest(tree_to_json(tree).to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Failures of the differential checks on one annotated tree; empty when
/// everything agrees.
pub fn check_instance(tree: &AnnotatedTree, ray_seed: u64) -> Vec<String> {
    let mut failures = Vec::new();
    let z = zeta_general(tree);
    let graph = match build_graph(tree, Strategy::Minimal) {
        Ok(g) => g,
        Err(e) => return vec![format!("graph: {e}")],
    };
    let graph_def = definitional_zeta(&graph);
    if graph_def != z {
        failures.push(format!("closed-form zeta {z} != definitional {graph_def}"));
    }
    let mon = match monodromy_zeta(tree) {
        Ok(m) => m,
        Err(e) => return [failures, vec![format!("monodromy zeta: {e}")]].concat(),
    };
    let acampo = acampo_from_graph(&graph);
    if acampo != mon {
        failures.push(format!("monodromy zeta {mon} != A'Campo {acampo}"));
    }
    failures.extend(graph_failures(&graph, "minimal graph"));
    match build_graph(tree, Strategy::with_extra_rays(ray_seed)) {
        Ok(refined) => {
            if definitional_zeta(&refined) != graph_def {
                failures.push("definitional zeta changes under extra rays".into());
            }
            if acampo_from_graph(&refined) != acampo {
                failures.push("A'Campo product changes under extra rays".into());
            }
            failures.extend(graph_failures(&refined, "refined graph"));
        }
        Err(e) => failures.push(format!("refined graph: {e}")),
    }
    match characteristic_poly_with_cap(&mon, FUZZ_EXPANSION_CAP) {
        Ok(delta) => {
            if delta.is_palindromic() == Some(false) {
                failures.push("Delta is not palindromic up to sign".into());
            }
            if let Some(c) = &delta.expanded {
                if BigInt::from(c.len() - 1) != delta.mu {
                    failures.push(format!("deg Delta = {} but mu = {}", c.len() - 1, delta.mu));
                }
            }
            let conj = check_poles(&poles(&z), &delta);
            for v in conj.verdicts.iter().filter(|v| !v.certificate.is_eigenvalue) {
                failures.push(format!("pole {} gives no monodromy eigenvalue", v.pole.value));
            }
        }
        Err(e) => failures.push(format!("Delta: {e}")),
    }
    let candidates = candidate_poles(tree);
    for p in poles(&z) {
        if !candidates.iter().any(|c| c.value == p.value) {
            failures.push(format!("pole {} is not a candidate", p.value));
        }
    }
    failures
}

fn graph_failures(graph: &ResolutionGraph, what: &str) -> Vec<String> {
    [graph.check_structure(), graph.euler_characteristic_check(), chain_determinant_check(graph)]
        .into_iter()
        .filter_map(|r| r.err().map(|e| format!("{what}: {e}")))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceOutcome {
    pub index: usize,
    pub hash: String,
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub count: usize,
    pub passed: usize,
    pub failed: usize,
    pub instances: Vec<InstanceOutcome>,
}

impl FuzzSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("fuzz seed {}: {}/{} passed\n", self.seed, self.passed, self.count);
        for inst in &self.instances {
            let status = if inst.failures.is_empty() { "ok" } else { "FAIL" };
            out.push_str(&format!("  #{} {} {}\n", inst.index, inst.hash, status));
            for f in &inst.failures {
                out.push_str(&format!("      {f}\n"));
            }
            if let Some(d) = &inst.dump {
                out.push_str(&format!("      dumped to {}\n", d.display()));
            }
        }
        out
    }
}

/// Runs the checks on every generated tree in parallel. Failing trees are
/// written as `<hash>.json` (tree JSON) into `dump_dir` when given.
pub fn run(cfg: &FuzzConfig, dump_dir: Option<&Path>) -> Result<FuzzSummary> {
    cfg.validate()?;
    let trees = generate_trees(cfg);
    let mut instances: Vec<InstanceOutcome> = trees
        .par_iter()
        .enumerate()
        .map(|(index, tree)| {
            let failures = match annotate(tree) {
                Ok(t) => check_instance(&t, cfg.seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)),
                Err(e) => vec![format!("generated tree is invalid: {e}")],
            };
            InstanceOutcome { index, hash: tree_hash(tree), failures, dump: None }
        })
        .collect();
    if let Some(dir) = dump_dir {
        for inst in instances.iter_mut().filter(|i| !i.failures.is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
            let path = dir.join(format!("{}.json", inst.hash));
            let body = serde_json::to_string_pretty(&tree_to_json(&trees[inst.index])).expect("tree serializes");
            std::fs::write(&path, body + "\n").map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            inst.dump = Some(path);
        }
    }
    let failed = instances.iter().filter(|i| !i.failures.is_empty()).count();
    Ok(FuzzSummary { seed: cfg.seed, count: cfg.count, passed: cfg.count - failed, failed, instances })
}

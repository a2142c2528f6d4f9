//! Exact verification of the defining relations of the shifted Yangian and of
//! the truncation relation on the weight spaces of bounded total degree.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{axpy, ActionEngine, GeneratorLabel, Normalization, SparseVec};
use crate::error::{Error, Result};
use crate::patterns::{degree_vectors_up_to, Composition, DegreeVector, GTPattern};
use crate::scalar::{make_spec_env, Scalar, SpecEnv};

/// Extra room in the genericity guard: relations raise degrees by up to three
/// units above the cap before lowering again.
pub const GENERIC_MARGIN: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    Truncation,
}

impl RelationId {
    pub const ALL: [RelationId; 13] = [
        RelationId::A,
        RelationId::B,
        RelationId::C,
        RelationId::D,
        RelationId::E,
        RelationId::F,
        RelationId::G,
        RelationId::H,
        RelationId::I,
        RelationId::J,
        RelationId::K,
        RelationId::L,
        RelationId::Truncation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RelationId::A => "a",
            RelationId::B => "b",
            RelationId::C => "c",
            RelationId::D => "d",
            RelationId::E => "e",
            RelationId::F => "f",
            RelationId::G => "g",
            RelationId::H => "h",
            RelationId::I => "i",
            RelationId::J => "j",
            RelationId::K => "k",
            RelationId::L => "l",
            RelationId::Truncation => "truncation",
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RelationId::ALL
            .iter()
            .copied()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown relation '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct RelationCheck {
    pub pi: Composition,
    pub degree_cap: u32,
    pub seed: u64,
    pub trials: u32,
    pub normalization: Normalization,
    /// Test hook: adds 1 to one right-hand-side coefficient.
    pub perturb: bool,
}

impl RelationCheck {
    pub fn new(pi: &Composition, degree_cap: u32, seed: u64, trials: u32) -> RelationCheck {
        RelationCheck {
            pi: pi.clone(),
            degree_cap,
            seed,
            trials,
            normalization: Normalization::Geometric,
            perturb: false,
        }
    }

    /// Largest superscript exercised: `cap * max p + max (p_{i+1} - p_i) + 2`.
    pub fn superscript_bound(&self) -> u32 {
        let pi = &self.pi;
        let max_shift = (1..pi.n()).map(|i| pi.shift(i)).max().unwrap_or(0);
        self.degree_cap * pi.max_part() + max_shift + 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub relation: String,
    pub pi: Vec<u32>,
    pub degree: Vec<u32>,
    pub instance: BTreeMap<String, i64>,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub source: String,
    pub target: String,
    pub normalization: Normalization,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub relation: RelationId,
    pub holds: bool,
    /// Evaluations made: admissible instances times source basis vectors.
    pub instances: usize,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
struct Instance {
    params: Vec<(&'static str, u32)>,
    /// net change of the degree vector, indexed by `i - 1`
    shift: Vec<(usize, i32)>,
}

impl Instance {
    fn get(&self, key: &str) -> u32 {
        self.params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).unwrap()
    }
}

fn instances(rel: RelationId, pi: &Composition, bound: u32) -> Vec<Instance> {
    let n = pi.n();
    let e_range = |i: usize| (pi.shift(i) + 1)..=bound;
    let all = || 1..=bound;
    let mut out = Vec::new();
    let mut push = |params: Vec<(&'static str, u32)>, shift: Vec<(usize, i32)>| {
        out.push(Instance { params, shift })
    };
    match rel {
        RelationId::A => {
            for i in 1..=n {
                for j in 1..=n {
                    for r in all() {
                        for s in all() {
                            push(vec![("i", i as u32), ("j", j as u32), ("r", r), ("s", s)], vec![]);
                        }
                    }
                }
            }
        }
        RelationId::B => {
            for i in 1..n {
                for j in 1..n {
                    for r in e_range(i) {
                        for s in all() {
                            push(
                                vec![("i", i as u32), ("j", j as u32), ("r", r), ("s", s)],
                                vec![(i, -1), (j, 1)],
                            );
                        }
                    }
                }
            }
        }
        RelationId::C | RelationId::D => {
            let lowering = rel == RelationId::C;
            for i in 1..=n {
                for j in 1..n {
                    for r in all() {
                        let s_range = if lowering { e_range(j) } else { all() };
                        for s in s_range {
                            push(
                                vec![("i", i as u32), ("j", j as u32), ("r", r), ("s", s)],
                                vec![(j, if lowering { -1 } else { 1 })],
                            );
                        }
                    }
                }
            }
        }
        RelationId::E | RelationId::F => {
            let lowering = rel == RelationId::E;
            for i in 1..n {
                let range: Vec<u32> = if lowering { e_range(i).collect() } else { all().collect() };
                for &r in &range {
                    for &s in &range {
                        let d = if lowering { -2 } else { 2 };
                        push(vec![("i", i as u32), ("r", r), ("s", s)], vec![(i, d)]);
                    }
                }
            }
        }
        RelationId::G | RelationId::H => {
            let lowering = rel == RelationId::G;
            for i in 1..n.saturating_sub(1) {
                let (ri, si): (Vec<u32>, Vec<u32>) = if lowering {
                    (e_range(i).collect(), e_range(i + 1).collect())
                } else {
                    (all().collect(), all().collect())
                };
                let d = if lowering { -1 } else { 1 };
                for &r in &ri {
                    for &s in &si {
                        push(vec![("i", i as u32), ("r", r), ("s", s)], vec![(i, d), (i + 1, d)]);
                    }
                }
            }
        }
        RelationId::I | RelationId::J => {
            let lowering = rel == RelationId::I;
            let d = if lowering { -1 } else { 1 };
            for i in 1..n {
                for j in 1..n {
                    if i.abs_diff(j) <= 1 {
                        continue;
                    }
                    let (ri, sj): (Vec<u32>, Vec<u32>) = if lowering {
                        (e_range(i).collect(), e_range(j).collect())
                    } else {
                        (all().collect(), all().collect())
                    };
                    for &r in &ri {
                        for &s in &sj {
                            push(
                                vec![("i", i as u32), ("j", j as u32), ("r", r), ("s", s)],
                                vec![(i, d), (j, d)],
                            );
                        }
                    }
                }
            }
        }
        RelationId::K | RelationId::L => {
            let lowering = rel == RelationId::K;
            let d = if lowering { -1 } else { 1 };
            for i in 1..n {
                for j in 1..n {
                    if i.abs_diff(j) != 1 {
                        continue;
                    }
                    let (ri, tj): (Vec<u32>, Vec<u32>) = if lowering {
                        (e_range(i).collect(), e_range(j).collect())
                    } else {
                        (all().collect(), all().collect())
                    };
                    // symmetric in r <-> s
                    for (x, &r) in ri.iter().enumerate() {
                        for &s in &ri[x..] {
                            for &t in &tj {
                                push(
                                    vec![("i", i as u32), ("j", j as u32), ("r", r), ("s", s), ("t", t)],
                                    vec![(i, 2 * d), (j, d)],
                                );
                            }
                        }
                    }
                }
            }
        }
        RelationId::Truncation => {
            for r in (pi.part(1) + 1)..=bound {
                push(vec![("r", r)], vec![]);
            }
        }
    }
    out
}

fn sub(a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = a.clone();
    axpy(&mut out, &-Scalar::one(), b);
    out
}

fn add(a: &SparseVec, b: &SparseVec) -> SparseVec {
    let mut out = a.clone();
    axpy(&mut out, &Scalar::one(), b);
    out
}

fn scaled(c: &Scalar, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    axpy(&mut out, c, v);
    out
}

struct Ops<'a> {
    engine: &'a ActionEngine,
}

impl Ops<'_> {
    fn ap(&self, label: GeneratorLabel, v: &SparseVec) -> Result<SparseVec> {
        if v.is_empty() {
            return Ok(SparseVec::new());
        }
        self.engine.apply(label, v)
    }

    /// `x y v`
    fn ap2(&self, x: GeneratorLabel, y: GeneratorLabel, v: &SparseVec) -> Result<SparseVec> {
        self.ap(x, &self.ap(y, v)?)
    }

    /// `[x, y] v`
    fn comm(&self, x: GeneratorLabel, y: GeneratorLabel, v: &SparseVec) -> Result<SparseVec> {
        Ok(sub(&self.ap2(x, y, v)?, &self.ap2(y, x, v)?))
    }

    /// `[x, [y, z]] v`
    fn comm_nested(&self, x: GeneratorLabel, y: GeneratorLabel, z: GeneratorLabel, v: &SparseVec) -> Result<SparseVec> {
        let inner = self.comm(y, z, v)?;
        let left = self.ap(x, &inner)?;
        let right = self.comm(y, z, &self.ap(x, v)?)?;
        Ok(sub(&left, &right))
    }
}

fn kron(a: usize, b: usize) -> i64 {
    (a == b) as i64
}

/// Both sides of one relation instance applied to the basis vector `pat`.
fn evaluate(rel: RelationId, inst: &Instance, ops: &Ops, pat: &GTPattern) -> Result<(SparseVec, SparseVec)> {
    use GeneratorLabel as G;
    let hbar = ops.engine.env().hbar.clone();
    let mut v = SparseVec::new();
    v.insert(pat.clone(), Scalar::one());
    let g = |k: &str| inst.get(k);
    let gi = |k: &str| inst.get(k) as usize;
    let zero = SparseVec::new();
    let out = match rel {
        RelationId::A => (ops.comm(G::d(gi("i"), g("r")), G::d(gi("j"), g("s")), &v)?, zero),
        RelationId::B => {
            let (i, j, r, s) = (gi("i"), gi("j"), g("r"), g("s"));
            let lhs = ops.comm(G::e(i, r), G::f(j, s), &v)?;
            let rhs = if i == j {
                let mut c = Scalar::zero();
                for t in 0..=(r + s - 1) {
                    c += ops.engine.d_prime_eigenvalue(pat, i, t)? * ops.engine.d_eigenvalue(pat, i + 1, r + s - 1 - t)?;
                }
                scaled(&(-(c / &hbar)), &v)
            } else {
                zero
            };
            (lhs, rhs)
        }
        RelationId::C => {
            let (i, j, r, s) = (gi("i"), gi("j"), g("r"), g("s"));
            let lhs = ops.comm(G::d(i, r), G::e(j, s), &v)?;
            let coef = kron(i, j) - kron(i, j + 1);
            let mut rhs = SparseVec::new();
            if coef != 0 {
                for t in 0..r {
                    axpy(&mut rhs, &Scalar::one(), &ops.ap2(G::d(i, t), G::e(j, r + s - t - 1), &v)?);
                }
                rhs = scaled(&(&hbar * Scalar::from_int(coef)), &rhs);
            }
            (lhs, rhs)
        }
        RelationId::D => {
            let (i, j, r, s) = (gi("i"), gi("j"), g("r"), g("s"));
            let lhs = ops.comm(G::d(i, r), G::f(j, s), &v)?;
            let coef = kron(i, j + 1) - kron(i, j);
            let mut rhs = SparseVec::new();
            if coef != 0 {
                for t in 0..r {
                    axpy(&mut rhs, &Scalar::one(), &ops.ap2(G::f(j, r + s - t - 1), G::d(i, t), &v)?);
                }
                rhs = scaled(&(&hbar * Scalar::from_int(coef)), &rhs);
            }
            (lhs, rhs)
        }
        RelationId::E => {
            let (i, r, s) = (gi("i"), g("r"), g("s"));
            let lhs = sub(
                &ops.comm(G::e(i, r), G::e(i, s + 1), &v)?,
                &ops.comm(G::e(i, r + 1), G::e(i, s), &v)?,
            );
            let rhs = add(&ops.ap2(G::e(i, r), G::e(i, s), &v)?, &ops.ap2(G::e(i, s), G::e(i, r), &v)?);
            (lhs, scaled(&hbar, &rhs))
        }
        RelationId::F => {
            let (i, r, s) = (gi("i"), g("r"), g("s"));
            let lhs = sub(
                &ops.comm(G::f(i, r + 1), G::f(i, s), &v)?,
                &ops.comm(G::f(i, r), G::f(i, s + 1), &v)?,
            );
            let rhs = add(&ops.ap2(G::f(i, r), G::f(i, s), &v)?, &ops.ap2(G::f(i, s), G::f(i, r), &v)?);
            (lhs, scaled(&hbar, &rhs))
        }
        RelationId::G => {
            let (i, r, s) = (gi("i"), g("r"), g("s"));
            let lhs = sub(
                &ops.comm(G::e(i, r), G::e(i + 1, s + 1), &v)?,
                &ops.comm(G::e(i, r + 1), G::e(i + 1, s), &v)?,
            );
            let rhs = ops.ap2(G::e(i, r), G::e(i + 1, s), &v)?;
            (lhs, scaled(&-&hbar, &rhs))
        }
        RelationId::H => {
            let (i, r, s) = (gi("i"), g("r"), g("s"));
            let lhs = sub(
                &ops.comm(G::f(i, r + 1), G::f(i + 1, s), &v)?,
                &ops.comm(G::f(i, r), G::f(i + 1, s + 1), &v)?,
            );
            let rhs = ops.ap2(G::f(i + 1, s), G::f(i, r), &v)?;
            (lhs, scaled(&-&hbar, &rhs))
        }
        RelationId::I => (ops.comm(G::e(gi("i"), g("r")), G::e(gi("j"), g("s")), &v)?, zero),
        RelationId::J => (ops.comm(G::f(gi("i"), g("r")), G::f(gi("j"), g("s")), &v)?, zero),
        RelationId::K | RelationId::L => {
            let (i, j, r, s, t) = (gi("i"), gi("j"), g("r"), g("s"), g("t"));
            let mk = if rel == RelationId::K { G::e } else { G::f };
            let lhs = add(
                &ops.comm_nested(mk(i, r), mk(i, s), mk(j, t), &v)?,
                &ops.comm_nested(mk(i, s), mk(i, r), mk(j, t), &v)?,
            );
            (lhs, zero)
        }
        RelationId::Truncation => (ops.ap(G::d(1, g("r")), &v)?, zero),
    };
    Ok(out)
}

fn shifted_degree(d: &DegreeVector, shift: &[(usize, i32)]) -> Option<DegreeVector> {
    let mut out: Vec<i64> = d.0.iter().map(|&x| x as i64).collect();
    for &(i, delta) in shift {
        out[i - 1] += delta as i64;
    }
    if out.iter().any(|&x| x < 0) {
        None
    } else {
        Some(DegreeVector(out.into_iter().map(|x| x as u32).collect()))
    }
}

fn first_difference(lhs: &SparseVec, rhs: &SparseVec) -> Option<(GTPattern, Scalar, Scalar)> {
    let mut keys: Vec<&GTPattern> = lhs.keys().chain(rhs.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().find_map(|k| {
        let l = lhs.get(k).cloned().unwrap_or_default();
        let r = rhs.get(k).cloned().unwrap_or_default();
        (l != r).then(|| (k.clone(), l, r))
    })
}

struct WorkItem {
    env: SpecEnv,
    degree: DegreeVector,
}

/// First failure on one work item, and the number of evaluations made.
fn check_item(rel: RelationId, check: &RelationCheck, insts: &[Instance], item: &WorkItem) -> Result<(Option<Witness>, usize)> {
    let engine = ActionEngine::new(&check.pi, &item.env, check.normalization)?;
    let ops = Ops { engine: &engine };
    let basis = engine.space(&item.degree)?;
    let mut perturb = check.perturb;
    let mut evaluated = 0;
    for inst in insts {
        let Some(target_degree) = shifted_degree(&item.degree, &inst.shift) else {
            continue;
        };
        for pat in basis.iter() {
            evaluated += 1;
            let (lhs, mut rhs) = evaluate(rel, inst, &ops, pat)?;
            if perturb {
                let key = lhs
                    .keys()
                    .next()
                    .or_else(|| rhs.keys().next())
                    .cloned()
                    .or_else(|| engine.space(&target_degree).ok().and_then(|s| s.first().cloned()));
                if let Some(key) = key {
                    *rhs.entry(key.clone()).or_default() += Scalar::one();
                    if rhs[&key].is_zero() {
                        rhs.remove(&key);
                    }
                    perturb = false;
                }
            }
            if let Some((target, l, r)) = first_difference(&lhs, &rhs) {
                let witness = Witness {
                    relation: rel.name().to_string(),
                    pi: check.pi.parts().to_vec(),
                    degree: item.degree.0.clone(),
                    instance: inst.params.iter().map(|(k, v)| (k.to_string(), *v as i64)).collect(),
                    lhs: l,
                    rhs: r,
                    source: pat.key(),
                    target: target.key(),
                    normalization: check.normalization,
                    seed: item.env.seed,
                };
                return Ok((Some(witness), evaluated));
            }
        }
    }
    Ok((None, evaluated))
}

/// Checks one relation family on every weight space of total degree at most
/// the cap, for every admissible index/superscript combination, at
/// `trials` independent specializations. Failure is reported through the
/// witness, not as an error.
pub fn verify_relation(rel: RelationId, check: &RelationCheck) -> Result<RelationReport> {
    if check.trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    let pi = &check.pi;
    let insts = instances(rel, pi, check.superscript_bound());
    let mut items = Vec::new();
    for t in 0..check.trials {
        let env = make_spec_env(
            pi.total() as usize,
            check.degree_cap + GENERIC_MARGIN,
            SpecEnv::trial_seed(check.seed, t),
        )?;
        for degree in degree_vectors_up_to(pi.n() - 1, check.degree_cap) {
            items.push(WorkItem { env: env.clone(), degree });
        }
    }
    let results: Vec<Result<(Option<Witness>, usize)>> =
        items.par_iter().map(|item| check_item(rel, check, &insts, item)).collect();
    let mut witness = None;
    let mut evaluated = 0;
    for r in results {
        let (w, count) = r?;
        evaluated += count;
        if witness.is_none() {
            witness = w;
        }
    }
    Ok(RelationReport { relation: rel, holds: witness.is_none(), instances: evaluated, witness })
}

//! Action of the shifted Yangian `Y_pi(gl_n)` (and its truncation, the finite
//! W-algebra of `gl_N`) on the Gelfand-Tsetlin basis.
//!
//! Conventions fixed here and used throughout the crate:
//!
//! * `e_i^{(s)}` lowers `d_i` by one, `f_i^{(s)}` raises it; the p-values in a
//!   matrix coefficient are read off the SOURCE pattern ([`P_VALUES_ON_SOURCE`]).
//! * The canonical normalization is [`Normalization::Geometric`] (fixed-point
//!   basis). [`Normalization::Fmo`] differs by the diagonal map of [`to_fmo`].
//! * `d_k^{(r)}` is `hbar^r` times the coefficient of `u^{-r}` in the
//!   eigenvalue series `d_k(u)`. With this grading the commutator
//!   `[e_i^{(r)}, f_i^{(s)}]` equals `-hbar^{-1} sum_t d'_i^{(t)} d_{i+1}^{(r+s-1-t)}`.

mod relations;
mod series;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::{enumerate_patterns, p_raw, Composition, DegreeVector, GTPattern};
use crate::scalar::{Scalar, SpecEnv};

pub use relations::{verify_relation, GENERIC_MARGIN, RelationCheck, RelationId, RelationReport, Witness};
pub use series::{
    a_eigenvalue, b_series, c_series, d_generator, d_series, interpolate_bc, SeriesKind,
};

/// Matrix coefficients read p-values off the source pattern. Flipping this to
/// the target breaks the `[e, f]` relation and Shapovalov path-independence.
pub const P_VALUES_ON_SOURCE: bool = true;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Geometric,
    Fmo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorKind {
    E,
    F,
    D,
    A,
    B,
    C,
}

/// One generator (or one `u`-coefficient of `A_i(u)`, `B_i(u)`, `C_i(u)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorLabel {
    pub kind: GeneratorKind,
    pub index: usize,
    /// superscript for e/f/d, power of `u` for A/B/C
    pub power: u32,
}

impl GeneratorLabel {
    pub fn e(i: usize, s: u32) -> Self {
        GeneratorLabel { kind: GeneratorKind::E, index: i, power: s }
    }
    pub fn f(i: usize, s: u32) -> Self {
        GeneratorLabel { kind: GeneratorKind::F, index: i, power: s }
    }
    pub fn d(i: usize, r: u32) -> Self {
        GeneratorLabel { kind: GeneratorKind::D, index: i, power: r }
    }
    pub fn a(i: usize, k: u32) -> Self {
        GeneratorLabel { kind: GeneratorKind::A, index: i, power: k }
    }
    pub fn b(i: usize, k: u32) -> Self {
        GeneratorLabel { kind: GeneratorKind::B, index: i, power: k }
    }
    pub fn c(i: usize, k: u32) -> Self {
        GeneratorLabel { kind: GeneratorKind::C, index: i, power: k }
    }

    pub fn validate(&self, pi: &Composition) -> Result<()> {
        let n = pi.n();
        let i = self.index;
        let ok = match self.kind {
            GeneratorKind::E => (1..n).contains(&i) && self.power > pi.shift(i),
            GeneratorKind::F => (1..n).contains(&i) && self.power >= 1,
            GeneratorKind::D => (1..=n).contains(&i),
            GeneratorKind::A => i <= n,
            GeneratorKind::B | GeneratorKind::C => (1..n).contains(&i),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::NoSuchGenerator(format!("{self} for pi={pi:?}")))
        }
    }

    /// Change of `d_index` caused by the operator.
    pub fn degree_shift(&self) -> i32 {
        match self.kind {
            GeneratorKind::E | GeneratorKind::B => -1,
            GeneratorKind::F | GeneratorKind::C => 1,
            GeneratorKind::D | GeneratorKind::A => 0,
        }
    }

    pub fn target_degree(&self, d: &DegreeVector) -> Option<DegreeVector> {
        match self.degree_shift() {
            -1 => d.lowered(self.index),
            1 => Some(d.raised(self.index)),
            _ => Some(d.clone()),
        }
    }
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GeneratorKind::E => "e",
            GeneratorKind::F => "f",
            GeneratorKind::D => "d",
            GeneratorKind::A => "A",
            GeneratorKind::B => "B",
            GeneratorKind::C => "C",
        };
        match self.kind {
            GeneratorKind::A | GeneratorKind::B | GeneratorKind::C => {
                write!(f, "{name}_{}[u^{}]", self.index, self.power)
            }
            _ => write!(f, "{name}_{}^({})", self.index, self.power),
        }
    }
}

pub type SparseVec = BTreeMap<GTPattern, Scalar>;

/// `out += c * v`, dropping cancelled entries.
pub(crate) fn axpy(out: &mut SparseVec, c: &Scalar, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        let term = c * x;
        match out.get_mut(k) {
            Some(slot) => {
                *slot += term;
                if slot.is_zero() {
                    out.remove(k);
                }
            }
            None => {
                if !term.is_zero() {
                    out.insert(k.clone(), term);
                }
            }
        }
    }
}

/// Element of one weight space of the Gelfand-Tsetlin module.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightVector {
    pub pi: Composition,
    pub degree: DegreeVector,
    #[serde(serialize_with = "serialize_keyed")]
    pub coeffs: SparseVec,
}

fn serialize_keyed<S: serde::Serializer>(
    coeffs: &SparseVec,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = s.serialize_map(Some(coeffs.len()))?;
    for (p, c) in coeffs {
        map.serialize_entry(&p.key(), c)?;
    }
    map.end()
}

impl WeightVector {
    pub fn zero(pi: &Composition, degree: DegreeVector) -> WeightVector {
        WeightVector { pi: pi.clone(), degree, coeffs: SparseVec::new() }
    }

    pub fn basis(pat: &GTPattern) -> WeightVector {
        let mut coeffs = SparseVec::new();
        coeffs.insert(pat.clone(), Scalar::one());
        WeightVector { pi: pat.composition().clone(), degree: pat.degree(), coeffs }
    }

    /// Drops explicit zeros and checks every key has the stated degree.
    pub fn from_coeffs(pi: &Composition, degree: DegreeVector, coeffs: SparseVec) -> Result<Self> {
        let coeffs: SparseVec = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if let Some(bad) = coeffs.keys().find(|p| p.degree() != degree) {
            return Err(Error::DegreeMismatch { left: degree.0.clone(), right: bad.degree().0 });
        }
        Ok(WeightVector { pi: pi.clone(), degree, coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, pat: &GTPattern) -> Scalar {
        self.coeffs.get(pat).cloned().unwrap_or_default()
    }
}

/// Sparse matrix of one generator between two weight spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub pi: Composition,
    pub label: GeneratorLabel,
    pub source_degree: DegreeVector,
    pub target_degree: DegreeVector,
    /// `(source, target) -> coefficient of target in label(source)`
    pub entries: BTreeMap<(GTPattern, GTPattern), Scalar>,
}

// ---------------------------------------------------------------------------
// Matrix coefficients

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum StepKind {
    Lower,
    Raise,
}

/// One nonzero transition `source -> source -/+ delta_{ij}^{(a)}`; the
/// coefficient at superscript `s` is `factor * base^{s - 1 - offset}`.
#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub target: GTPattern,
    pub factor: Scalar,
    pub base: Scalar,
    pub offset: u32,
}

impl Step {
    pub fn coeff(&self, s: u32) -> Scalar {
        &self.factor * self.base.pow((s - 1 - self.offset) as i32)
    }
}

fn product_terms(source: &GTPattern, i: usize, j: usize, a: usize, env: &SpecEnv) -> Result<(Scalar, Scalar)> {
    let pi = source.composition();
    let p = p_raw(source, i, j, a, env);
    let mut denom = Scalar::one();
    for (k, b) in pi.row_cells(i) {
        if (k, b) != (j, a) {
            denom *= &(&p - p_raw(source, i, k, b, env));
        }
    }
    if denom.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok((p, denom))
}

fn neighbour_product(source: &GTPattern, p: &Scalar, row: usize, env: &SpecEnv) -> Scalar {
    let pi = source.composition();
    pi.row_cells(row).map(|(k, b)| p - p_raw(source, row, k, b, env)).product()
}

/// Geometric-normalization formula for `e_i^{(s)}` from `source` to
/// `source - delta_{ij}^{(a)}`, evaluated whether or not that target is a
/// valid pattern.
pub fn e_coeff_formula(source: &GTPattern, i: usize, j: usize, a: usize, s: u32, env: &SpecEnv) -> Result<Scalar> {
    let pi = source.composition();
    GeneratorLabel::e(i, s).validate(pi)?;
    let (p, denom) = product_terms(source, i, j, a, env)?;
    let num = neighbour_product(source, &p, i + 1, env);
    let base = &p - &env.hbar * Scalar::from_int(i as i64);
    Ok(base.pow((s - 1 - pi.shift(i)) as i32) * num / denom / &env.hbar)
}

/// Geometric-normalization formula for `f_i^{(s)}` from `source` to
/// `source + delta_{ij}^{(a)}`.
pub fn f_coeff_formula(source: &GTPattern, i: usize, j: usize, a: usize, s: u32, env: &SpecEnv) -> Result<Scalar> {
    let pi = source.composition();
    GeneratorLabel::f(i, s).validate(pi)?;
    let (p, denom) = product_terms(source, i, j, a, env)?;
    let num = if i > 1 { neighbour_product(source, &p, i - 1, env) } else { Scalar::one() };
    let base = &p + &env.hbar * Scalar::from_int(1 - i as i64);
    Ok(-(base.pow((s - 1) as i32) * num / denom / &env.hbar))
}

fn find_move(source: &GTPattern, target: &GTPattern, i: usize, delta: i32) -> Option<(usize, usize)> {
    let pi = source.composition();
    pi.row_cells(i)
        .find(|&(j, a)| source.moved(i, j, a, delta).as_ref() == Some(target))
}

/// Matrix coefficient of `target` in `e_i^{(s)} source` (geometric
/// normalization); zero unless `target = source - delta_{ij}^{(a)}`.
pub fn e_coeff(pi: &Composition, source: &GTPattern, target: &GTPattern, i: usize, s: u32, env: &SpecEnv) -> Result<Scalar> {
    GeneratorLabel::e(i, s).validate(pi)?;
    match find_move(source, target, i, -1) {
        Some((j, a)) => e_coeff_formula(source, i, j, a, s, env),
        None => Ok(Scalar::zero()),
    }
}

/// Matrix coefficient of `target` in `f_i^{(s)} source` (geometric
/// normalization); zero unless `target = source + delta_{ij}^{(a)}`.
pub fn f_coeff(pi: &Composition, source: &GTPattern, target: &GTPattern, i: usize, s: u32, env: &SpecEnv) -> Result<Scalar> {
    GeneratorLabel::f(i, s).validate(pi)?;
    match find_move(source, target, i, 1) {
        Some((j, a)) => f_coeff_formula(source, i, j, a, s, env),
        None => Ok(Scalar::zero()),
    }
}

// ---------------------------------------------------------------------------
// Cached action

/// Memoizing evaluator for generator actions at one specialization.
///
/// Not `Sync`; build one engine per worker thread.
pub struct ActionEngine {
    pi: Composition,
    env: SpecEnv,
    norm: Normalization,
    steps: RefCell<HashMap<(GTPattern, StepKind, usize), Rc<Vec<Step>>>>,
    columns: RefCell<HashMap<(GTPattern, GeneratorLabel), Rc<SparseVec>>>,
    d_eigen: RefCell<HashMap<(GTPattern, usize), Rc<Vec<Scalar>>>>,
    d_prime: RefCell<HashMap<(GTPattern, usize), Rc<Vec<Scalar>>>>,
    spaces: RefCell<HashMap<DegreeVector, Rc<Vec<GTPattern>>>>,
}

impl ActionEngine {
    pub fn new(pi: &Composition, env: &SpecEnv, norm: Normalization) -> Result<ActionEngine> {
        if env.x.len() != pi.total() as usize {
            return Err(Error::Parameter(format!(
                "environment has {} x-values, composition {:?} needs {}",
                env.x.len(),
                pi,
                pi.total()
            )));
        }
        Ok(ActionEngine {
            pi: pi.clone(),
            env: env.clone(),
            norm,
            steps: RefCell::default(),
            columns: RefCell::default(),
            d_eigen: RefCell::default(),
            d_prime: RefCell::default(),
            spaces: RefCell::default(),
        })
    }

    pub fn composition(&self) -> &Composition {
        &self.pi
    }

    pub fn env(&self) -> &SpecEnv {
        &self.env
    }

    pub fn normalization(&self) -> Normalization {
        self.norm
    }

    /// Basis of the weight space of degree `d`.
    pub fn space(&self, d: &DegreeVector) -> Result<Rc<Vec<GTPattern>>> {
        if let Some(s) = self.spaces.borrow().get(d) {
            return Ok(s.clone());
        }
        let pats = Rc::new(enumerate_patterns(&self.pi, d)?);
        self.spaces.borrow_mut().insert(d.clone(), pats.clone());
        Ok(pats)
    }

    fn steps(&self, source: &GTPattern, kind: StepKind, i: usize) -> Result<Rc<Vec<Step>>> {
        let key = (source.clone(), kind, i);
        if let Some(s) = self.steps.borrow().get(&key) {
            return Ok(s.clone());
        }
        let pi = &self.pi;
        let hbar = &self.env.hbar;
        let mut out = Vec::new();
        for (j, a) in pi.row_cells(i) {
            let delta = if kind == StepKind::Lower { -1 } else { 1 };
            let Some(target) = source.moved(i, j, a, delta) else {
                continue;
            };
            let (p, denom) = product_terms(source, i, j, a, &self.env)?;
            let (num, base, offset, sign) = match kind {
                StepKind::Lower => (
                    neighbour_product(source, &p, i + 1, &self.env),
                    &p - hbar * Scalar::from_int(i as i64),
                    pi.shift(i),
                    Scalar::one(),
                ),
                StepKind::Raise => (
                    if i > 1 { neighbour_product(source, &p, i - 1, &self.env) } else { Scalar::one() },
                    &p + hbar * Scalar::from_int(1 - i as i64),
                    0,
                    -Scalar::one(),
                ),
            };
            if num.is_zero() {
                continue;
            }
            let mut factor = sign * num / denom / hbar;
            if self.norm == Normalization::Fmo {
                // Psi-conjugation: e picks up -hbar^{-p_i}, f picks up -hbar^{p_i}
                let pw = pi.part(i) as i32;
                let scale = hbar.pow(if kind == StepKind::Lower { -pw } else { pw });
                factor = -(factor * scale);
            }
            out.push(Step { target, factor, base, offset });
        }
        let out = Rc::new(out);
        self.steps.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    pub(crate) fn lowering_steps(&self, source: &GTPattern, i: usize) -> Result<Rc<Vec<Step>>> {
        self.steps(source, StepKind::Lower, i)
    }

    pub(crate) fn raising_steps(&self, source: &GTPattern, i: usize) -> Result<Rc<Vec<Step>>> {
        self.steps(source, StepKind::Raise, i)
    }

    /// Eigenvalue of `d_k^{(r)}` on the basis vector `pat` (`d_k^{(0)} = 1`).
    pub fn d_eigenvalue(&self, pat: &GTPattern, k: usize, r: u32) -> Result<Scalar> {
        if r == 0 {
            return Ok(Scalar::one());
        }
        let key = (pat.clone(), k);
        let cached = self.d_eigen.borrow().get(&key).cloned();
        let vals = match cached {
            Some(v) if v.len() > r as usize => v,
            _ => {
                let order = (r as usize).max(2 * self.pi.total() as usize + 8);
                let series = d_series(&self.pi, k, pat, &self.env, order)?;
                let vals: Vec<Scalar> = (0..=order)
                    .map(|t| series.coeff(t) * self.env.hbar.pow(t as i32))
                    .collect();
                let vals = Rc::new(vals);
                self.d_eigen.borrow_mut().insert(key, vals.clone());
                vals
            }
        };
        Ok(vals[r as usize].clone())
    }

    /// Eigenvalue of `d'_k^{(t)}`, defined by `sum_t d_k^{(t)} d'_k^{(r-t)} = delta_{r0}`.
    pub fn d_prime_eigenvalue(&self, pat: &GTPattern, k: usize, t: u32) -> Result<Scalar> {
        let key = (pat.clone(), k);
        let cached = self.d_prime.borrow().get(&key).cloned();
        if let Some(v) = cached.as_ref().filter(|v| v.len() > t as usize) {
            return Ok(v[t as usize].clone());
        }
        let len = (t as usize + 1).max(2 * self.pi.total() as usize + 8);
        let d: Vec<Scalar> = (0..len as u32).map(|r| self.d_eigenvalue(pat, k, r)).collect::<Result<_>>()?;
        let mut inv = vec![Scalar::one()];
        for r in 1..len {
            let acc: Scalar = (1..=r).map(|q| &d[q] * &inv[r - q]).sum();
            inv.push(-acc);
        }
        let value = inv[t as usize].clone();
        self.d_prime.borrow_mut().insert(key, Rc::new(inv));
        Ok(value)
    }

    /// Image of one basis vector.
    pub fn column(&self, label: GeneratorLabel, pat: &GTPattern) -> Result<Rc<SparseVec>> {
        let key = (pat.clone(), label);
        if let Some(c) = self.columns.borrow().get(&key) {
            return Ok(c.clone());
        }
        label.validate(&self.pi)?;
        let i = label.index;
        let mut out = SparseVec::new();
        match label.kind {
            GeneratorKind::E | GeneratorKind::F => {
                let steps = if label.kind == GeneratorKind::E {
                    self.lowering_steps(pat, i)?
                } else {
                    self.raising_steps(pat, i)?
                };
                for st in steps.iter() {
                    let c = st.coeff(label.power);
                    if !c.is_zero() {
                        out.insert(st.target.clone(), c);
                    }
                }
            }
            GeneratorKind::D => {
                let v = self.d_eigenvalue(pat, i, label.power)?;
                if !v.is_zero() {
                    out.insert(pat.clone(), v);
                }
            }
            GeneratorKind::A => {
                let v = a_eigenvalue(&self.pi, i, pat, &self.env)?.coeff(label.power as usize);
                if !v.is_zero() {
                    out.insert(pat.clone(), v);
                }
            }
            GeneratorKind::B | GeneratorKind::C => {
                let polys = if label.kind == GeneratorKind::B {
                    series::b_series_in(self, i, pat)?
                } else {
                    series::c_series_in(self, i, pat)?
                };
                for (t, poly) in polys {
                    let v = poly.coeff(label.power as usize);
                    if !v.is_zero() {
                        out.insert(t, v);
                    }
                }
            }
        }
        let out = Rc::new(out);
        self.columns.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    /// `B_i(u)` on `xi_source` in this engine's normalization.
    pub fn b_polys(&self, i: usize, source: &GTPattern) -> Result<BTreeMap<GTPattern, crate::scalar::UPoly>> {
        series::b_series_in(self, i, source)
    }

    /// `C_i(u)` on `xi_source` in this engine's normalization.
    pub fn c_polys(&self, i: usize, source: &GTPattern) -> Result<BTreeMap<GTPattern, crate::scalar::UPoly>> {
        series::c_series_in(self, i, source)
    }

    pub fn apply(&self, label: GeneratorLabel, v: &SparseVec) -> Result<SparseVec> {
        let mut out = SparseVec::new();
        for (pat, c) in v {
            let col = self.column(label, pat)?;
            axpy(&mut out, c, &col);
        }
        Ok(out)
    }

    /// Applies a word of generators, rightmost first.
    pub fn apply_word(&self, word: &[GeneratorLabel], v: &SparseVec) -> Result<SparseVec> {
        let mut cur = v.clone();
        for label in word.iter().rev() {
            if cur.is_empty() {
                break;
            }
            cur = self.apply(*label, &cur)?;
        }
        Ok(cur)
    }

    pub fn operator_matrix(&self, label: GeneratorLabel, source_degree: &DegreeVector) -> Result<Option<OperatorMatrix>> {
        label.validate(&self.pi)?;
        let Some(target_degree) = label.target_degree(source_degree) else {
            return Ok(None);
        };
        let mut entries = BTreeMap::new();
        for src in self.space(source_degree)?.iter() {
            for (tgt, c) in self.column(label, src)?.iter() {
                entries.insert((src.clone(), tgt.clone()), c.clone());
            }
        }
        Ok(Some(OperatorMatrix {
            pi: self.pi.clone(),
            label,
            source_degree: source_degree.clone(),
            target_degree,
            entries,
        }))
    }
}

/// Applies one generator to a weight vector. `Ok(None)` means the target weight
/// space is empty (the degree would leave the positive cone), i.e. the image is
/// zero.
pub fn apply_generator(label: GeneratorLabel, v: &WeightVector, env: &SpecEnv) -> Result<Option<WeightVector>> {
    apply_generator_in(Normalization::Geometric, label, v, env)
}

pub fn apply_generator_in(
    norm: Normalization,
    label: GeneratorLabel,
    v: &WeightVector,
    env: &SpecEnv,
) -> Result<Option<WeightVector>> {
    label.validate(&v.pi)?;
    let Some(target_degree) = label.target_degree(&v.degree) else {
        return Ok(None);
    };
    let engine = ActionEngine::new(&v.pi, env, norm)?;
    let coeffs = engine.apply(label, &v.coeffs)?;
    Ok(Some(WeightVector { pi: v.pi.clone(), degree: target_degree, coeffs }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    ToFmo,
    ToGeometric,
}

/// The isomorphism `[d] -> (-1)^{|d|} hbar^{sum_i d_i p_i} xi_d` (or its inverse),
/// applied coefficientwise.
pub fn to_fmo(v: &WeightVector, direction: Direction, env: &SpecEnv) -> WeightVector {
    let pi = &v.pi;
    let weight: i64 = v
        .degree
        .0
        .iter()
        .enumerate()
        .map(|(k, &d)| d as i64 * pi.part(k + 1) as i64)
        .sum();
    let mut factor = Scalar::sign_power(v.degree.total() as u64) * env.hbar.pow(weight as i32);
    if direction == Direction::ToGeometric {
        factor = factor.inv().expect("hbar is nonzero");
    }
    WeightVector {
        pi: pi.clone(),
        degree: v.degree.clone(),
        coeffs: v.coeffs.iter().map(|(p, c)| (p.clone(), c * &factor)).collect(),
    }
}

#[cfg(test)]
mod tests;

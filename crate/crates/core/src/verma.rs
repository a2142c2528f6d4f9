//! Weight-space linear algebra on the universal Verma module: Whittaker
//! components, the Shapovalov form, and highest-weight checks. Everything
//! here is in the geometric normalization.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{solve, Solution};
use crate::patterns::{degree_vectors_up_to, Composition, DegreeVector, GTPattern};
use crate::scalar::{poly_from_roots, Scalar, SpecEnv};
use crate::yangian::{
    a_eigenvalue, d_series, ActionEngine, GeneratorLabel, Normalization, SparseVec, WeightVector,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhittakerComponent {
    pub degree: DegreeVector,
    pub vector: WeightVector,
}

impl Serialize for WhittakerComponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let coeffs: BTreeMap<String, &Scalar> =
            self.vector.coeffs.iter().map(|(p, c)| (p.key(), c)).collect();
        let mut st = s.serialize_struct("WhittakerComponent", 2)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// Diagonal Shapovalov norms `N(pat)`, `N(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShapovalovTable {
    pub norms: BTreeMap<GTPattern, Scalar>,
}

/// One recursion route into a pattern: the predecessor differs in cell
/// `(i, j, a)` and the route uses `f_i^{(s)}` / `e_i^{(s + p_{i+1} - p_i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormRoute {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub s: u32,
    pub value: Scalar,
}

/// Whittaker components, Shapovalov norms and pairings at one specialization.
pub struct VermaEngine {
    engine: ActionEngine,
    chi_top: Scalar,
    whittaker: RefCell<BTreeMap<DegreeVector, Rc<WeightVector>>>,
    norms: RefCell<HashMap<GTPattern, Scalar>>,
}

impl VermaEngine {
    pub fn new(pi: &Composition, env: &SpecEnv) -> Result<VermaEngine> {
        let chi_top = env.hbar.inv()?;
        Ok(VermaEngine {
            engine: ActionEngine::new(pi, env, Normalization::Geometric)?,
            chi_top,
            whittaker: RefCell::default(),
            norms: RefCell::default(),
        })
    }

    /// Replaces `chi(e_i^{(p_{i+1})})`, normally `1/hbar`.
    pub fn with_character(mut self, chi_top: Scalar) -> VermaEngine {
        self.chi_top = chi_top;
        self.whittaker.borrow_mut().clear();
        self
    }

    pub fn action(&self) -> &ActionEngine {
        &self.engine
    }

    pub fn composition(&self) -> &Composition {
        self.engine.composition()
    }

    pub fn env(&self) -> &SpecEnv {
        self.engine.env()
    }

    /// `chi(e_i^{(s)})` for `s` in `[p_{i+1} - p_i + 1, p_{i+1}]`.
    pub fn chi(&self, i: usize, s: u32) -> Scalar {
        if s == self.composition().part(i + 1) {
            self.chi_top.clone()
        } else {
            Scalar::zero()
        }
    }

    fn space(&self, d: &DegreeVector) -> Result<Rc<Vec<GTPattern>>> {
        self.engine.space(d)
    }

    pub fn whittaker(&self, d: &DegreeVector) -> Result<Rc<WeightVector>> {
        if let Some(w) = self.whittaker.borrow().get(d) {
            return Ok(w.clone());
        }
        let pi = self.composition().clone();
        let w = if d.total() == 0 {
            WeightVector::basis(&GTPattern::zero(&pi))
        } else {
            self.solve_component(d)?
        };
        let w = Rc::new(w);
        self.whittaker.borrow_mut().insert(d.clone(), w.clone());
        Ok(w)
    }

    fn solve_component(&self, d: &DegreeVector) -> Result<WeightVector> {
        let pi = self.composition().clone();
        let basis = self.space(d)?;
        let index: HashMap<&GTPattern, usize> = basis.iter().enumerate().map(|(k, p)| (p, k)).collect();
        let unknowns = basis.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 1..pi.n() {
            let Some(lower) = d.lowered(i) else { continue };
            let w_lower = self.whittaker(&lower)?;
            let targets = self.space(&lower)?;
            let tindex: HashMap<&GTPattern, usize> = targets.iter().enumerate().map(|(k, p)| (p, k)).collect();
            for s in (pi.shift(i) + 1)..=pi.part(i + 1) {
                let mut block = vec![vec![Scalar::zero(); unknowns]; targets.len()];
                for pat in basis.iter() {
                    for (t, c) in self.engine.column(GeneratorLabel::e(i, s), pat)?.iter() {
                        block[tindex[t]][index[pat]] = c.clone();
                    }
                }
                let chi = self.chi(i, s);
                for (t, row) in targets.iter().zip(block) {
                    rows.push(row);
                    rhs.push(&chi * w_lower.coeff(t));
                }
            }
        }
        match solve(rows, rhs, unknowns) {
            Solution::Unique(x) => {
                let coeffs: SparseVec = basis
                    .iter()
                    .zip(x)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(p, c)| (p.clone(), c))
                    .collect();
                Ok(WeightVector { pi, degree: d.clone(), coeffs })
            }
            Solution::RankDeficient { rank, unknowns } => Err(Error::WhittakerSystem {
                degree: d.0.clone(),
                reason: format!("rank-deficient (rank {rank} of {unknowns})"),
            }),
            Solution::Inconsistent => Err(Error::WhittakerSystem { degree: d.0.clone(), reason: "inconsistent".into() }),
        }
    }

    /// `c` with `hbar e_i^{(p_{i+1})} w_d = c w_{d - delta_i}`, or `None` when the
    /// image is not proportional to the lower component.
    pub fn unit_class_constant(&self, i: usize, d: &DegreeVector) -> Result<Option<Scalar>> {
        let s = self.composition().part(i + 1);
        let c = self.eigen_constant(i, s, d)?;
        Ok(c.map(|c| c * &self.env().hbar))
    }

    /// `c` with `e_i^{(s)} w_d = c w_{d - delta_i}`, or `None` if not proportional.
    pub fn eigen_constant(&self, i: usize, s: u32, d: &DegreeVector) -> Result<Option<Scalar>> {
        let lower = d
            .lowered(i)
            .ok_or_else(|| Error::Parameter(format!("degree {:?} cannot be lowered at {i}", d.0)))?;
        let w = self.whittaker(d)?;
        let image = self.engine.apply(GeneratorLabel::e(i, s), &w.coeffs)?;
        let w_lower = self.whittaker(&lower)?;
        Ok(proportionality(&image, &w_lower.coeffs))
    }

    /// Predecessor routes into `pat`, for superscripts `1..=max_s`.
    pub fn norm_routes(&self, pat: &GTPattern, max_s: u32) -> Result<Vec<NormRoute>> {
        let pi = self.composition().clone();
        let mut out = Vec::new();
        for i in 1..pi.n() {
            for (j, a) in pi.row_cells(i) {
                let Some(prev) = pat.moved(i, j, a, -1) else { continue };
                for s in 1..=max_s {
                    if let Some(value) = self.route_value(&prev, pat, i, s)? {
                        out.push(NormRoute { i, j, a, s, value });
                    }
                }
            }
        }
        Ok(out)
    }

    fn route_value(&self, prev: &GTPattern, pat: &GTPattern, i: usize, s: u32) -> Result<Option<Scalar>> {
        let sh = self.composition().shift(i);
        let f = self.engine.column(GeneratorLabel::f(i, s), prev)?.get(pat).cloned().unwrap_or_default();
        if f.is_zero() {
            return Ok(None);
        }
        let e = self.engine.column(GeneratorLabel::e(i, s + sh), pat)?.get(prev).cloned().unwrap_or_default();
        Ok(Some(e * self.norm(prev)? / f))
    }

    /// `N(pat)` along the first route (lexicographic cell order, `s = 1`)
    /// with a nonzero f-coefficient.
    pub fn norm(&self, pat: &GTPattern) -> Result<Scalar> {
        if let Some(n) = self.norms.borrow().get(pat) {
            return Ok(n.clone());
        }
        let value = if pat.degree().total() == 0 {
            Scalar::one()
        } else {
            let pi = self.composition().clone();
            let mut found = None;
            'outer: for i in 1..pi.n() {
                for (j, a) in pi.row_cells(i) {
                    let Some(prev) = pat.moved(i, j, a, -1) else { continue };
                    if let Some(v) = self.route_value(&prev, pat, i, 1)? {
                        found = Some(v);
                        break 'outer;
                    }
                }
            }
            found.ok_or_else(|| Error::ShapovalovBlocked(pat.key()))?
        };
        self.norms.borrow_mut().insert(pat.clone(), value.clone());
        Ok(value)
    }

    pub fn pairing(&self, v: &WeightVector, w: &WeightVector) -> Result<Scalar> {
        if v.degree != w.degree {
            return Err(Error::DegreeMismatch { left: v.degree.0.clone(), right: w.degree.0.clone() });
        }
        pair_sparse(self, &v.coeffs, &w.coeffs)
    }

    pub fn table(&self, cap: u32) -> Result<ShapovalovTable> {
        let pi = self.composition().clone();
        let mut norms = BTreeMap::new();
        for d in degree_vectors_up_to(pi.n() - 1, cap) {
            for p in self.space(&d)?.iter() {
                norms.insert(p.clone(), self.norm(p)?);
            }
        }
        Ok(ShapovalovTable { norms })
    }
}

fn pair_sparse(ve: &VermaEngine, v: &SparseVec, w: &SparseVec) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for (p, a) in v {
        if let Some(b) = w.get(p) {
            acc += a * b * ve.norm(p)?;
        }
    }
    Ok(acc)
}

/// `c` with `image = c * base`, if any (`base` nonzero).
fn proportionality(image: &SparseVec, base: &SparseVec) -> Option<Scalar> {
    let (p0, b0) = base.iter().next()?;
    let c = image.get(p0).cloned().unwrap_or_default() / b0;
    let keys_ok = image.keys().all(|k| base.contains_key(k));
    let vals_ok = base.iter().all(|(k, b)| image.get(k).cloned().unwrap_or_default() == &c * b);
    (keys_ok && vals_ok).then_some(c)
}

pub fn whittaker_component(pi: &Composition, d: &DegreeVector, env: &SpecEnv) -> Result<WhittakerComponent> {
    let ve = VermaEngine::new(pi, env)?;
    let w = ve.whittaker(d)?;
    Ok(WhittakerComponent { degree: d.clone(), vector: (*w).clone() })
}

pub fn shapovalov_norm(pi: &Composition, pat: &GTPattern, env: &SpecEnv) -> Result<Scalar> {
    VermaEngine::new(pi, env)?.norm(pat)
}

pub fn shapovalov_pairing(pi: &Composition, v: &WeightVector, w: &WeightVector, env: &SpecEnv) -> Result<Scalar> {
    VermaEngine::new(pi, env)?.pairing(v, w)
}

/// Compares the `d_i(u)` eigenvalue on the highest vector with
/// `u^{-p_i} prod_{j in block i} (u + i - 1 + x_j / hbar)`, where the
/// prediction is evaluated at `predicted` (normally the same environment).
pub fn highest_weight_check_against(pi: &Composition, env: &SpecEnv, predicted: &SpecEnv, order: usize) -> Result<bool> {
    let z = GTPattern::zero(pi);
    let hinv = predicted.hbar.inv()?;
    for (k, block) in pi.blocks().into_iter().enumerate() {
        let i = k + 1;
        let roots: Vec<Scalar> = block.map(|x| Scalar::from_int(k as i64) + &predicted.x[x] * &hinv).collect();
        let poly = poly_from_roots(&roots);
        let deg = roots.len();
        let series = d_series(pi, i, &z, env, order)?;
        for t in 0..=order {
            let want = if t <= deg { poly.coeff(deg - t) } else { Scalar::zero() };
            if series.coeff(t) != want {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn highest_weight_check(pi: &Composition, env: &SpecEnv, order: usize) -> Result<bool> {
    highest_weight_check_against(pi, env, env, order)
}

/// Distinct patterns of one degree have distinct `(A_1, .., A_{n-1})`
/// eigenvalue tuples.
pub fn a_eigenvalues_separate(pi: &Composition, d: &DegreeVector, env: &SpecEnv) -> Result<bool> {
    let ve = ActionEngine::new(pi, env, Normalization::Geometric)?;
    let mut seen = std::collections::HashSet::new();
    for p in ve.space(d)?.iter() {
        let tuple = (1..pi.n()).map(|i| a_eigenvalue(pi, i, p, env)).collect::<Result<Vec<_>>>()?;
        if !seen.insert(tuple) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathMismatch {
    pub pattern: String,
    pub routes: Vec<NormRoute>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathReport {
    pub patterns: usize,
    pub multi_route: usize,
    pub mismatch: Option<PathMismatch>,
}

/// Recomputes every norm up to `cap` along all routes (`s <= max_s`) and
/// checks they agree. `tamper` adds 1 to the second route of the first
/// multi-route pattern (detector test hook).
pub fn path_independence(ve: &VermaEngine, cap: u32, max_s: u32, tamper: bool) -> Result<PathReport> {
    let pi = ve.composition().clone();
    let mut report = PathReport { patterns: 0, multi_route: 0, mismatch: None };
    let mut tampered = !tamper;
    for d in degree_vectors_up_to(pi.n() - 1, cap) {
        if d.total() == 0 {
            continue;
        }
        for p in ve.space(&d)?.iter() {
            report.patterns += 1;
            let mut routes = ve.norm_routes(p, max_s)?;
            if routes.len() > 1 {
                report.multi_route += 1;
                if !tampered {
                    routes[1].value += Scalar::one();
                    tampered = true;
                }
            }
            let n = ve.norm(p)?;
            if routes.iter().any(|r| r.value != n) && report.mismatch.is_none() {
                report.mismatch = Some(PathMismatch { pattern: p.key(), routes });
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjointFailure {
    pub degree: Vec<u32>,
    pub i: usize,
    pub s: u32,
    pub lhs: Scalar,
    pub rhs: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjointReport {
    pub pairs: usize,
    pub adjoint_failure: Option<AdjointFailure>,
    pub symmetry_failures: usize,
}

fn random_vector(rng: &mut ChaCha8Rng, basis: &[GTPattern]) -> SparseVec {
    basis
        .iter()
        .map(|p| (p.clone(), Scalar::new(rng.gen_range(-9..=9), rng.gen_range(1..=5))))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Random audit of `(f_i^{(s)} v, w) = (v, e_i^{(s + p_{i+1} - p_i)} w)` and of
/// the symmetry of the pairing, `pairs` draws per degree up to `cap`.
/// `tamper` scales one f-image by 2.
pub fn adjointness_audit(ve: &VermaEngine, cap: u32, pairs: usize, seed: u64, tamper: bool) -> Result<AdjointReport> {
    let pi = ve.composition().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = AdjointReport { pairs: 0, adjoint_failure: None, symmetry_failures: 0 };
    let bound = cap * pi.max_part() + 2;
    let mut tampered = !tamper;
    for d in degree_vectors_up_to(pi.n() - 1, cap) {
        let basis = ve.space(&d)?;
        for _ in 0..pairs {
            let v = random_vector(&mut rng, &basis);
            let v2 = random_vector(&mut rng, &basis);
            if pair_sparse(ve, &v, &v2)? != pair_sparse(ve, &v2, &v)? {
                report.symmetry_failures += 1;
            }
            report.pairs += 1;
            if pi.n() < 2 || d.total() >= cap {
                continue;
            }
            let i = rng.gen_range(1..pi.n());
            let s = rng.gen_range(1..=bound);
            let up = d.raised(i);
            let w = random_vector(&mut rng, &ve.space(&up)?);
            let mut fv = ve.action().apply(GeneratorLabel::f(i, s), &v)?;
            if !tampered && !fv.is_empty() {
                for c in fv.values_mut() {
                    *c *= &Scalar::from_int(2);
                }
                tampered = true;
            }
            let ew = ve.action().apply(GeneratorLabel::e(i, s + pi.shift(i)), &w)?;
            let lhs = pair_sparse(ve, &fv, &w)?;
            let rhs = pair_sparse(ve, &v, &ew)?;
            if lhs != rhs && report.adjoint_failure.is_none() {
                report.adjoint_failure = Some(AdjointFailure { degree: d.0.clone(), i, s, lhs, rhs });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::make_spec_env;

    fn env2() -> SpecEnv {
        SpecEnv::from_values(vec![Scalar::new(3, 2), Scalar::new(-2, 5)], Scalar::new(7, 3), 8).unwrap()
    }

    #[test]
    fn rank_one_whittaker_and_norm() {
        let pi = Composition::new(vec![1, 1]).unwrap();
        let env = env2();
        let (x1, x2, h) = (&env.x[0], &env.x[1], &env.hbar);
        let gap = h - x1 + x2;
        let ve = VermaEngine::new(&pi, &env).unwrap();
        let w0 = ve.whittaker(&DegreeVector(vec![0])).unwrap();
        assert_eq!(w0.coeff(&GTPattern::zero(&pi)), Scalar::one());
        let p1 = GTPattern::from_cells(&pi, vec![1]).unwrap();
        let w1 = ve.whittaker(&DegreeVector(vec![1])).unwrap();
        assert_eq!(w1.coeff(&p1), (h * &gap).inv().unwrap());
        assert_eq!(ve.norm(&p1).unwrap(), -(h * &gap));
        assert_eq!(ve.norm(&GTPattern::zero(&pi)).unwrap(), Scalar::one());
    }

    #[test]
    fn unit_classes_and_uniqueness() {
        for parts in [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 1], vec![1, 1, 2]] {
            let pi = Composition::new(parts).unwrap();
            let env = make_spec_env(pi.total() as usize, 8, 21).unwrap();
            let ve = VermaEngine::new(&pi, &env).unwrap();
            for d in degree_vectors_up_to(pi.n() - 1, 2) {
                ve.whittaker(&d).unwrap();
                for i in 1..pi.n() {
                    if d.0[i - 1] > 0 {
                        assert_eq!(ve.unit_class_constant(i, &d).unwrap(), Some(Scalar::one()));
                    }
                }
            }
        }
    }

    #[test]
    fn wrong_character_breaks_unit_class() {
        let pi = Composition::new(vec![1, 2]).unwrap();
        let env = make_spec_env(3, 8, 2).unwrap();
        let ve = VermaEngine::new(&pi, &env).unwrap().with_character(Scalar::from_int(2) / &env.hbar);
        assert_eq!(ve.unit_class_constant(1, &DegreeVector(vec![1])).unwrap(), Some(Scalar::from_int(2)));
    }

    #[test]
    fn norms_are_path_independent() {
        for parts in [vec![1, 2], vec![2, 2], vec![1, 1, 1]] {
            let pi = Composition::new(parts).unwrap();
            let env = make_spec_env(pi.total() as usize, 8, 5).unwrap();
            let ve = VermaEngine::new(&pi, &env).unwrap();
            let rep = path_independence(&ve, 2, 3, false).unwrap();
            assert!(rep.mismatch.is_none(), "{rep:?}");
            assert!(rep.multi_route > 0);
            assert!(path_independence(&ve, 2, 3, true).unwrap().mismatch.is_some());
        }
    }

    #[test]
    fn adjointness_holds() {
        let pi = Composition::new(vec![1, 1, 2]).unwrap();
        let env = make_spec_env(4, 8, 6).unwrap();
        let ve = VermaEngine::new(&pi, &env).unwrap();
        let rep = adjointness_audit(&ve, 2, 5, 1, false).unwrap();
        assert!(rep.adjoint_failure.is_none() && rep.symmetry_failures == 0, "{rep:?}");
        assert!(adjointness_audit(&ve, 2, 5, 1, true).unwrap().adjoint_failure.is_some());
    }

    #[test]
    fn highest_weight() {
        for parts in [vec![1, 1], vec![2, 2], vec![1, 1, 2]] {
            let pi = Composition::new(parts).unwrap();
            let env = make_spec_env(pi.total() as usize, 4, 3).unwrap();
            assert!(highest_weight_check(&pi, &env, 6).unwrap());
            let mut other = env.clone();
            other.x[0] += Scalar::one();
            assert!(!highest_weight_check_against(&pi, &env, &other, 6).unwrap());
        }
    }

    #[test]
    fn separation() {
        let pi = Composition::new(vec![2, 2]).unwrap();
        let env = make_spec_env(4, 8, 3).unwrap();
        for d in degree_vectors_up_to(1, 3) {
            assert!(a_eigenvalues_separate(&pi, &d, &env).unwrap());
        }
    }

    #[test]
    fn pairing_degree_mismatch() {
        let pi = Composition::new(vec![1, 1]).unwrap();
        let env = env2();
        let a = WeightVector::basis(&GTPattern::zero(&pi));
        let b = WeightVector::basis(&GTPattern::from_cells(&pi, vec![1]).unwrap());
        assert!(matches!(shapovalov_pairing(&pi, &a, &b, &env), Err(Error::DegreeMismatch { .. })));
        assert_eq!(shapovalov_pairing(&pi, &a, &a, &env).unwrap(), Scalar::one());
    }
}

//! Verification suites shared by the command line and the acceptance tests.
//!
//! Every suite returns a [`SuiteReport`]. A [`Mutation`] perturbs one formula
//! or one reference value so that a working detector has to fail.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::partition::{sl2_oracle, wl_invariance_report, z_coefficient, Orientation};
use crate::patterns::{degree_vectors_up_to, Composition, DegreeVector};
use crate::scalar::{make_spec_env, Scalar, SpecEnv, UPoly};
use crate::verma::{a_eigenvalues_separate, adjointness_audit, highest_weight_check_against, path_independence, VermaEngine};
use crate::virasoro::{
    agt_params, dictionary_check_with, ff_params, gram_by_words, random_triples, VirParams, VirasoroModule,
};
use crate::yangian::{
    a_eigenvalue, interpolate_bc, verify_relation, ActionEngine, Normalization, RelationCheck, RelationId, SeriesKind,
    GENERIC_MARGIN,
};

/// Series order used by the highest-weight comparison.
pub const HIGHEST_WEIGHT_ORDER: usize = 6;
/// Random vector pairs per degree in the adjointness audit.
pub const ADJOINT_PAIRS: usize = 20;
/// Largest Virasoro level checked.
pub const VIRASORO_LEVELS: u32 = 6;
/// Random `(a, eps1, eps2)` triples in the dictionary check.
pub const DICTIONARY_TRIALS: u32 = 20;
/// Largest superscript used for alternative norm routes.
const ROUTE_SUPERSCRIPTS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Relations,
    HighestWeight,
    Interpolation,
    Shapovalov,
    Whittaker,
    Sl2,
    Wl,
    Virasoro,
    Dictionary,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Relations,
        Suite::HighestWeight,
        Suite::Interpolation,
        Suite::Shapovalov,
        Suite::Whittaker,
        Suite::Sl2,
        Suite::Wl,
        Suite::Virasoro,
        Suite::Dictionary,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Relations => "relations",
            Suite::HighestWeight => "highest-weight",
            Suite::Interpolation => "interpolation",
            Suite::Shapovalov => "shapovalov",
            Suite::Whittaker => "whittaker",
            Suite::Sl2 => "sl2",
            Suite::Wl => "wl",
            Suite::Virasoro => "virasoro",
            Suite::Dictionary => "dictionary",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown check '{s}'")))
    }
}

/// Controlled perturbation for detector tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Adds 1 to one right-hand side of the given relation.
    Relation(RelationId),
    /// Shifts `x_1` in the predicted highest weight.
    HighestWeight,
    /// Adds 1 to the constant term of one interpolated polynomial.
    Interpolation,
    /// Tampers one alternative norm route and one adjoint image.
    Shapovalov,
    /// Doubles the Whittaker character.
    Whittaker,
    /// Adds 1 to every oracle value.
    Sl2,
    /// Adds an x-value to the z-series, breaking block symmetry.
    Wl,
    /// Runs the Gram oracle at `c + 1`.
    Virasoro,
    /// Adds 1 to the FF-side `Delta`.
    Dictionary,
}

impl Mutation {
    /// The mutation that targets `suite`.
    pub fn for_suite(suite: Suite) -> Mutation {
        match suite {
            Suite::Relations => Mutation::Relation(RelationId::B),
            Suite::HighestWeight => Mutation::HighestWeight,
            Suite::Interpolation => Mutation::Interpolation,
            Suite::Shapovalov => Mutation::Shapovalov,
            Suite::Whittaker => Mutation::Whittaker,
            Suite::Sl2 => Mutation::Sl2,
            Suite::Wl => Mutation::Wl,
            Suite::Virasoro => Mutation::Virasoro,
            Suite::Dictionary => Mutation::Dictionary,
        }
    }
}

/// Accepts a relation name (`b`, `truncation`, ..) or a suite name.
impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mutation> {
        if let Ok(r) = s.parse::<RelationId>() {
            return Ok(Mutation::Relation(r));
        }
        s.parse::<Suite>()
            .map(Mutation::for_suite)
            .map_err(|_| Error::Parse(format!("unknown mutation '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub pi: Composition,
    pub cap: u32,
    pub seed: u64,
    pub trials: u32,
    pub normalization: Normalization,
    pub relations: Vec<RelationId>,
    pub mutation: Option<Mutation>,
}

impl SuiteConfig {
    pub fn new(pi: &Composition, cap: u32, seed: u64, trials: u32) -> SuiteConfig {
        SuiteConfig {
            pi: pi.clone(),
            cap,
            seed,
            trials,
            normalization: Normalization::Geometric,
            relations: RelationId::ALL.to_vec(),
            mutation: None,
        }
    }

    fn env(&self, pi: &Composition, trial: u32) -> Result<SpecEnv> {
        make_spec_env(pi.total() as usize, self.cap + GENERIC_MARGIN, SpecEnv::trial_seed(self.seed, trial))
    }

    fn mutated(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    /// Number of individual comparisons made.
    pub checked: usize,
    pub detail: Value,
}

impl SuiteReport {
    fn new(suite: Suite, passed: bool, checked: usize, detail: Value) -> SuiteReport {
        SuiteReport { suite, passed, checked, detail }
    }
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    match suite {
        Suite::Relations => relations_suite(cfg),
        Suite::HighestWeight => highest_weight_suite(cfg),
        Suite::Interpolation => interpolation_suite(cfg),
        Suite::Shapovalov => shapovalov_suite(cfg),
        Suite::Whittaker => whittaker_suite(cfg),
        Suite::Sl2 => sl2_suite(cfg),
        Suite::Wl => wl_suite(cfg),
        Suite::Virasoro => virasoro_suite(cfg),
        Suite::Dictionary => dictionary_suite(cfg),
    }
}

pub fn relations_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut rows = Vec::new();
    let mut witness = None;
    let mut checked = 0;
    for &rel in &cfg.relations {
        let mut check = RelationCheck::new(&cfg.pi, cfg.cap, cfg.seed, cfg.trials);
        check.normalization = cfg.normalization;
        check.perturb = cfg.mutated(Mutation::Relation(rel));
        let report = verify_relation(rel, &check)?;
        checked += report.instances;
        rows.push(json!({"relation": rel.name(), "holds": report.holds, "instances": report.instances}));
        if witness.is_none() {
            witness = report.witness;
        }
    }
    let passed = witness.is_none();
    Ok(SuiteReport::new(Suite::Relations, passed, checked, json!({"relations": rows, "witness": witness})))
}

/// `d_i(u)` on the highest vector against the predicted weight, plus monicity,
/// degree and separation of the `A_i` eigenvalues on every pattern up to cap.
pub fn highest_weight_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let pi = &cfg.pi;
    let mut checked = 0;
    for t in 0..cfg.trials {
        let env = cfg.env(pi, t)?;
        let mut predicted = env.clone();
        if cfg.mutated(Mutation::HighestWeight) {
            predicted.x[0] += Scalar::one();
        }
        checked += 1;
        if !highest_weight_check_against(pi, &env, &predicted, HIGHEST_WEIGHT_ORDER)? {
            let detail = json!({"failure": "highest weight", "seed": env.seed});
            return Ok(SuiteReport::new(Suite::HighestWeight, false, checked, detail));
        }
        let engine = ActionEngine::new(pi, &env, Normalization::Geometric)?;
        for d in degree_vectors_up_to(pi.n() - 1, cfg.cap) {
            for pat in engine.space(&d)?.iter() {
                for i in 0..=pi.n() {
                    let a = a_eigenvalue(pi, i, pat, &env)?;
                    checked += 1;
                    if !a.is_monic() || a.degree() != Some(pi.prefix(i) as usize) {
                        let detail = json!({"failure": "A eigenvalue", "pattern": pat.key(), "i": i, "seed": env.seed});
                        return Ok(SuiteReport::new(Suite::HighestWeight, false, checked, detail));
                    }
                }
            }
            checked += 1;
            if !a_eigenvalues_separate(pi, &d, &env)? {
                let detail = json!({"failure": "A eigenvalues coincide", "degree": d.0, "seed": env.seed});
                return Ok(SuiteReport::new(Suite::HighestWeight, false, checked, detail));
            }
        }
    }
    Ok(SuiteReport::new(Suite::HighestWeight, true, checked, json!({"order": HIGHEST_WEIGHT_ORDER})))
}

/// `B_i`, `C_i` assembled from the `e`/`f` action against Lagrange
/// interpolation of their point values, in both normalizations.
pub fn interpolation_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let pi = &cfg.pi;
    let mut checked = 0;
    let mut tamper = cfg.mutated(Mutation::Interpolation);
    for t in 0..cfg.trials {
        let env = cfg.env(pi, t)?;
        for norm in [Normalization::Geometric, Normalization::Fmo] {
            let engine = ActionEngine::new(pi, &env, norm)?;
            for d in degree_vectors_up_to(pi.n() - 1, cfg.cap) {
                for pat in engine.space(&d)?.iter() {
                    for i in 1..pi.n() {
                        for kind in [SeriesKind::B, SeriesKind::C] {
                            let direct = match kind {
                                SeriesKind::B => engine.b_polys(i, pat)?,
                                SeriesKind::C => engine.c_polys(i, pat)?,
                            };
                            let mut interp = interpolate_bc(kind, norm, pi, i, pat, &env)?;
                            if tamper {
                                if let Some(poly) = interp.values_mut().next() {
                                    let mut coeffs = poly.coeffs().to_vec();
                                    coeffs[0] += Scalar::one();
                                    *poly = UPoly::new(coeffs);
                                    tamper = false;
                                }
                            }
                            checked += 1;
                            if direct != interp {
                                let detail = json!({
                                    "kind": format!("{kind:?}"),
                                    "i": i,
                                    "pattern": pat.key(),
                                    "normalization": norm,
                                    "seed": env.seed,
                                });
                                return Ok(SuiteReport::new(Suite::Interpolation, false, checked, detail));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(SuiteReport::new(Suite::Interpolation, true, checked, json!({})))
}

/// Path independence of the norms plus the adjointness and symmetry audits.
pub fn shapovalov_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let pi = &cfg.pi;
    let tamper = cfg.mutated(Mutation::Shapovalov);
    let mut checked = 0;
    let mut multi_route = 0;
    for t in 0..cfg.trials {
        let env = cfg.env(pi, t)?;
        let ve = VermaEngine::new(pi, &env)?;
        let paths = path_independence(&ve, cfg.cap, ROUTE_SUPERSCRIPTS, tamper)?;
        checked += paths.patterns;
        multi_route += paths.multi_route;
        if let Some(m) = paths.mismatch {
            let detail = json!({"failure": "path dependence", "mismatch": m, "seed": env.seed});
            return Ok(SuiteReport::new(Suite::Shapovalov, false, checked, detail));
        }
        let adj = adjointness_audit(&ve, cfg.cap, ADJOINT_PAIRS, env.seed, tamper)?;
        checked += adj.pairs;
        if adj.adjoint_failure.is_some() || adj.symmetry_failures > 0 {
            let detail = json!({"failure": "adjointness", "audit": adj, "seed": env.seed});
            return Ok(SuiteReport::new(Suite::Shapovalov, false, checked, detail));
        }
    }
    Ok(SuiteReport::new(Suite::Shapovalov, true, checked, json!({"multi_route_patterns": multi_route})))
}

/// Unique Whittaker components up to cap and the unit constant
/// `hbar e_i^{(p_{i+1})} w_d = w_{d - delta_i}`. The detail also records the
/// constants for the first two superscripts above `p_{i+1}`, which the
/// defining system leaves unconstrained.
pub fn whittaker_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let pi = &cfg.pi;
    let mut checked = 0;
    let mut audit = Vec::new();
    for t in 0..cfg.trials {
        let env = cfg.env(pi, t)?;
        let mut ve = VermaEngine::new(pi, &env)?;
        if cfg.mutated(Mutation::Whittaker) {
            ve = ve.with_character(Scalar::from_int(2) * env.hbar.inv()?);
        }
        for d in degree_vectors_up_to(pi.n() - 1, cfg.cap) {
            checked += 1;
            if let Err(e) = ve.whittaker(&d) {
                let detail = json!({"failure": e.to_string(), "degree": d.0, "seed": env.seed});
                return Ok(SuiteReport::new(Suite::Whittaker, false, checked, detail));
            }
            for i in 1..pi.n() {
                if d.0[i - 1] == 0 {
                    continue;
                }
                checked += 1;
                let c = ve.unit_class_constant(i, &d)?;
                if c.as_ref().is_none_or(|c| !c.is_one()) {
                    let detail = json!({"failure": "unit constant", "degree": d.0, "i": i, "constant": c, "seed": env.seed});
                    return Ok(SuiteReport::new(Suite::Whittaker, false, checked, detail));
                }
                if t == 0 && d.total() <= 2 {
                    let top = pi.part(i + 1);
                    for s in top + 1..=top + 2 {
                        let c = ve.eigen_constant(i, s, &d)?;
                        audit.push(json!({"degree": d.0, "i": i, "s": s, "constant": c}));
                    }
                }
            }
        }
    }
    Ok(SuiteReport::new(Suite::Whittaker, true, checked, json!({"above_top": audit})))
}

/// `z_(m)` for `pi = (1, 1)` against the rank-one Verma oracle, `m <= cap`,
/// under both x-orientations. Ignores `cfg.pi`.
pub fn sl2_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let pi = Composition::new(vec![1, 1])?;
    let bump = if cfg.mutated(Mutation::Sl2) { Scalar::one() } else { Scalar::zero() };
    let mut matches = [true, true];
    let orientations = [Orientation::X2MinusX1, Orientation::X1MinusX2];
    let mut checked = 0;
    let mut first_mismatch = None;
    for t in 0..cfg.trials {
        let env = cfg.env(&pi, t)?;
        for m in 0..=cfg.cap {
            let z = z_coefficient(&pi, &DegreeVector(vec![m]), &env)?;
            for (k, o) in orientations.iter().enumerate() {
                checked += 1;
                let oracle = sl2_oracle(m, &env, *o)? + &bump;
                if z != oracle {
                    matches[k] = false;
                    if first_mismatch.is_none() {
                        first_mismatch = Some(json!({"m": m, "z": z, "oracle": oracle, "orientation": o, "seed": env.seed}));
                    }
                }
            }
        }
    }
    let matching: Vec<Orientation> = orientations.iter().zip(matches).filter(|(_, ok)| *ok).map(|(o, _)| *o).collect();
    let passed = !matching.is_empty();
    let detail = json!({"matching_orientations": matching, "first_mismatch": first_mismatch});
    Ok(SuiteReport::new(Suite::Sl2, passed, checked, detail))
}

pub fn wl_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let fake = cfg.mutated(Mutation::Wl);
    for t in 0..cfg.trials {
        let seed = SpecEnv::trial_seed(cfg.seed, t);
        if let Some(f) = wl_invariance_report(&cfg.pi, cfg.cap, seed, fake)? {
            return Ok(SuiteReport::new(Suite::Wl, false, t as usize + 1, json!({"failure": f, "seed": seed})));
        }
    }
    let trivial = cfg.pi.blocks().iter().all(|b| b.len() < 2);
    Ok(SuiteReport::new(Suite::Wl, true, cfg.trials as usize, json!({"trivial_symmetry": trivial})))
}

/// Random `(Delta, c)`, redrawn until the Whittaker system is solvable up to
/// the checked level.
fn random_vir_params(seed: u64) -> Result<VirParams> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || loop {
        let v = Scalar::new(rng.gen_range(-40..=40), rng.gen_range(1..=9));
        if !v.is_zero() {
            return v;
        }
    };
    for _ in 0..100 {
        let params = VirParams { delta: draw(), c: draw() };
        if VirasoroModule::new(params.clone()).whittaker(VIRASORO_LEVELS).is_ok() {
            return Ok(params);
        }
    }
    Err(Error::GenericityExhausted(100))
}

/// Gram matrices against [`gram_by_words`], the Whittaker relations and
/// `<w_1, w_1> = 1/(2 Delta)` at random `(Delta, c)`.
pub fn virasoro_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut checked = 0;
    for t in 0..cfg.trials {
        let params = random_vir_params(SpecEnv::trial_seed(cfg.seed, t))?;
        let mut oracle_params = params.clone();
        if cfg.mutated(Mutation::Virasoro) {
            oracle_params.c += Scalar::one();
        }
        let mut module = VirasoroModule::new(params.clone());
        let fail = |checked, what: &str, level: u32| {
            let detail = json!({"failure": what, "level": level, "delta": params.delta, "c": params.c});
            Ok(SuiteReport::new(Suite::Virasoro, false, checked, detail))
        };
        for d in 0..=VIRASORO_LEVELS {
            checked += 1;
            if module.gram(d) != gram_by_words(&oracle_params, d) {
                return fail(checked, "gram", d);
            }
        }
        let ws = match module.whittaker(VIRASORO_LEVELS) {
            Ok(ws) => ws,
            Err(e) => return fail(checked, &e.to_string(), 0),
        };
        for d in 1..=VIRASORO_LEVELS {
            checked += 1;
            let w = &ws[d as usize].coeffs;
            let l1 = module.apply_state(1, w);
            if l1 != ws[d as usize - 1].coeffs {
                return fail(checked, "L_1 w_d = w_{d-1}", d);
            }
            let l2 = module.apply_state(2, w);
            if !l2.is_empty() {
                return fail(checked, "L_2 w_d = 0", d);
            }
            for n in 3..=d as i64 {
                if !module.apply_state(n, w).is_empty() {
                    return fail(checked, "L_n w_d = 0", d);
                }
            }
        }
        checked += 1;
        let n1 = module.pairing(1, &ws[1], &ws[1]);
        if n1 != (Scalar::from_int(2) * &params.delta).inv()? {
            return fail(checked, "<w_1, w_1> = 1/(2 Delta)", 1);
        }
    }
    Ok(SuiteReport::new(Suite::Virasoro, true, checked, json!({"levels": VIRASORO_LEVELS})))
}

/// `ff o chic = agt` at random triples plus the two substitution examples
/// `(a, 1, -1) -> (a^2, 1)` and `(0, e, e) -> (1, 25)`.
pub fn dictionary_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let broken = cfg.mutated(Mutation::Dictionary);
    let ff = |chi: &Scalar, k: &Scalar| {
        let mut p = ff_params(chi, k)?;
        if broken {
            p.delta += Scalar::one();
        }
        Ok(p)
    };
    if let Some((a, e1, e2)) = dictionary_check_with(DICTIONARY_TRIALS, cfg.seed, ff)? {
        let detail = json!({"failure": "ff o chic != agt", "a": a, "eps1": e1, "eps2": e2});
        return Ok(SuiteReport::new(Suite::Dictionary, false, DICTIONARY_TRIALS as usize, detail));
    }
    let mut checked = DICTIONARY_TRIALS as usize;
    for (a, e, _) in random_triples(cfg.trials, cfg.seed ^ 1) {
        checked += 2;
        let one = Scalar::one();
        let p = agt_params(&a, &one, &-one.clone())?;
        if p != (VirParams { delta: &a * &a, c: one.clone() }) {
            return Ok(SuiteReport::new(Suite::Dictionary, false, checked, json!({"failure": "(a,1,-1)", "a": a})));
        }
        let p = agt_params(&Scalar::zero(), &e, &e)?;
        if p != (VirParams { delta: one, c: Scalar::from_int(25) }) {
            return Ok(SuiteReport::new(Suite::Dictionary, false, checked, json!({"failure": "(0,e,e)", "eps": e})));
        }
    }
    Ok(SuiteReport::new(Suite::Dictionary, true, checked, json!({"trials": DICTIONARY_TRIALS})))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!("b".parse::<Mutation>().unwrap(), Mutation::Relation(RelationId::B));
        assert_eq!("sl2".parse::<Mutation>().unwrap(), Mutation::Sl2);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn every_suite_flips_under_its_mutation() {
        let pi = Composition::new(vec![1, 2]).unwrap();
        let mut cfg = SuiteConfig::new(&pi, 2, 3, 1);
        cfg.relations = vec![RelationId::B];
        for suite in Suite::ALL {
            if suite == Suite::Wl {
                continue;
            }
            cfg.mutation = None;
            assert!(run_suite(suite, &cfg).unwrap().passed, "{suite} clean");
            cfg.mutation = Some(Mutation::for_suite(suite));
            assert!(!run_suite(suite, &cfg).unwrap().passed, "{suite} mutated");
        }
    }
}

//! Virasoro Verma modules: Gram matrices, Whittaker vectors, the conjectural
//! instanton series `<w_d, w_d>` and the AGT parameter dictionaries.
//!
//! Bracket: `[L_m, L_n] = (m - n) L_{m+n} + c/12 (m^3 - m) delta_{m+n,0}`.
//! Basis of level `d`: `L_{-mu_1} .. L_{-mu_k} m` for partitions
//! `mu_1 >= .. >= mu_k` of `d`.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve, Solution};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VirParams {
    pub delta: Scalar,
    pub c: Scalar,
}

pub type Partition = Vec<u32>;

/// Partitions of `d`, parts decreasing, in reverse lexicographic order
/// (`[d]` first, `[1, .., 1]` last).
pub fn partitions(d: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Partition, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// Element of one level of the Verma module.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct VirState {
    pub level: u32,
    pub coeffs: BTreeMap<Partition, Scalar>,
}

type Sparse = BTreeMap<Partition, Scalar>;

fn add_into(out: &mut Sparse, c: &Scalar, v: &Sparse) {
    for (k, x) in v {
        let slot = out.entry(k.clone()).or_default();
        *slot += c * x;
        if slot.is_zero() {
            out.remove(k);
        }
    }
}

/// Action of the modes `L_n` on PBW monomials, memoized.
pub struct VirasoroModule {
    pub params: VirParams,
    memo: HashMap<(i64, Partition), Sparse>,
}

impl VirasoroModule {
    pub fn new(params: VirParams) -> VirasoroModule {
        VirasoroModule { params, memo: HashMap::new() }
    }

    fn central(&self, m: i64) -> Scalar {
        &self.params.c * Scalar::new(m * m * m - m, 12)
    }

    /// `L_n (L_{-mu_1} .. L_{-mu_k} m)` in the PBW basis.
    pub fn apply_mode(&mut self, n: i64, word: &[u32]) -> Sparse {
        let key = (n, word.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let out = self.apply_uncached(n, word);
        self.memo.insert(key, out.clone());
        out
    }

    fn apply_uncached(&mut self, n: i64, word: &[u32]) -> Sparse {
        let mut out = Sparse::new();
        let Some((&head, rest)) = word.split_first() else {
            if n == 0 {
                out.insert(vec![], self.params.delta.clone());
            } else if n < 0 {
                out.insert(vec![(-n) as u32], Scalar::one());
            }
            return out;
        };
        let mu = head as i64;
        if n < 0 && -n >= mu {
            let mut w = vec![(-n) as u32];
            w.extend_from_slice(word);
            out.insert(w, Scalar::one());
            return out;
        }
        // L_n L_{-mu} R = L_{-mu} (L_n R) + [L_n, L_{-mu}] R
        let inner = self.apply_mode(n, rest);
        for (w, c) in &inner {
            let moved = self.apply_mode(-mu, w);
            add_into(&mut out, c, &moved);
        }
        let bracket = Scalar::from_int(n + mu);
        if n - mu != 0 {
            if !bracket.is_zero() {
                let v = self.apply_mode(n - mu, rest);
                add_into(&mut out, &bracket, &v);
            }
        } else {
            let mut r = Sparse::new();
            r.insert(rest.to_vec(), Scalar::one());
            let coef = &bracket * self.apply_mode(0, rest).get(rest).cloned().unwrap_or_default()
                + self.central(n);
            // L_0 acts diagonally, so [L_n, L_{-n}] R = (2n L_0 + c/12 (n^3 - n)) R
            add_into(&mut out, &coef, &r);
        }
        out
    }

    pub fn apply_state(&mut self, n: i64, v: &Sparse) -> Sparse {
        let mut out = Sparse::new();
        for (w, c) in v {
            let img = self.apply_mode(n, w);
            add_into(&mut out, c, &img);
        }
        out
    }

    /// `<L_{-lambda} m, L_{-mu} m>`: apply `L_{lambda_1}` first, `L_{lambda_k}` last,
    /// and read off the coefficient of `m`.
    pub fn gram_entry(&mut self, lambda: &[u32], mu: &[u32]) -> Scalar {
        let mut v = Sparse::new();
        v.insert(mu.to_vec(), Scalar::one());
        for &l in lambda {
            v = self.apply_state(l as i64, &v);
            if v.is_empty() {
                return Scalar::zero();
            }
        }
        v.get(&Vec::new()).cloned().unwrap_or_default()
    }

    pub fn gram(&mut self, d: u32) -> Vec<Vec<Scalar>> {
        let basis = partitions(d);
        let k = basis.len();
        let mut g = vec![vec![Scalar::zero(); k]; k];
        for a in 0..k {
            for b in a..k {
                let v = self.gram_entry(&basis[a], &basis[b]);
                g[b][a] = v.clone();
                g[a][b] = v;
            }
        }
        g
    }

    /// Whittaker components `w_0 .. w_cap`: `L_1 w_d = w_{d-1}`, `L_2 w_d = 0`.
    pub fn whittaker(&mut self, cap: u32) -> Result<Vec<VirState>> {
        let mut out = vec![VirState { level: 0, coeffs: [(vec![], Scalar::one())].into_iter().collect() }];
        for d in 1..=cap {
            let basis = partitions(d);
            let images: Vec<(Sparse, Sparse)> =
                basis.iter().map(|w| (self.apply_mode(1, w), self.apply_mode(2, w))).collect();
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            let prev = &out[d as usize - 1].coeffs;
            for t in partitions(d - 1) {
                rows.push(images.iter().map(|(l1, _)| l1.get(&t).cloned().unwrap_or_default()).collect());
                rhs.push(prev.get(&t).cloned().unwrap_or_default());
            }
            if d >= 2 {
                for t in partitions(d - 2) {
                    rows.push(images.iter().map(|(_, l2)| l2.get(&t).cloned().unwrap_or_default()).collect());
                    rhs.push(Scalar::zero());
                }
            }
            match solve(rows, rhs, basis.len()) {
                Solution::Unique(x) => {
                    let coeffs = basis.into_iter().zip(x).filter(|(_, c)| !c.is_zero()).collect();
                    out.push(VirState { level: d, coeffs });
                }
                _ => return Err(Error::DegenerateGram(d as usize)),
            }
        }
        Ok(out)
    }

    /// `<v, w>` at level `d` through the Gram matrix.
    pub fn pairing(&mut self, d: u32, v: &VirState, w: &VirState) -> Scalar {
        let basis = partitions(d);
        let g = self.gram(d);
        let mut acc = Scalar::zero();
        for (a, pa) in basis.iter().enumerate() {
            let Some(x) = v.coeffs.get(pa) else { continue };
            for (b, pb) in basis.iter().enumerate() {
                if let Some(y) = w.coeffs.get(pb) {
                    acc += x * y * &g[a][b];
                }
            }
        }
        acc
    }
}

/// `<w_d, w_d>` for `d = 0..=cap`.
pub fn nekrasov_series(params: &VirParams, cap: u32) -> Result<Vec<Scalar>> {
    let mut module = VirasoroModule::new(params.clone());
    let ws = module.whittaker(cap)?;
    Ok(ws.iter().map(|w| module.pairing(w.level, w, w)).collect())
}

/// The same norms read off as the coefficient of `L_{-1}^d m` in `w_d`.
pub fn nekrasov_series_by_adjointness(params: &VirParams, cap: u32) -> Result<Vec<Scalar>> {
    let mut module = VirasoroModule::new(params.clone());
    let ws = module.whittaker(cap)?;
    Ok(ws
        .iter()
        .map(|w| w.coeffs.get(&vec![1; w.level as usize]).cloned().unwrap_or_default())
        .collect())
}

pub fn vir_gram(params: &VirParams, d: u32) -> Vec<Vec<Scalar>> {
    VirasoroModule::new(params.clone()).gram(d)
}

pub fn vir_whittaker(params: &VirParams, d: u32) -> Result<VirState> {
    let mut ws = VirasoroModule::new(params.clone()).whittaker(d)?;
    Ok(ws.pop().unwrap())
}

/// Gram matrix by an independent route: the vacuum expectation
/// `<m| L_{lambda_k} .. L_{lambda_1} L_{-mu_1} .. L_{-mu_j} |m>` is evaluated by
/// moving the rightmost non-negative mode towards the vacuum one commutator
/// at a time.
pub fn gram_by_words(params: &VirParams, d: u32) -> Vec<Vec<Scalar>> {
    fn vev(word: &[i64], params: &VirParams, memo: &mut HashMap<Vec<i64>, Scalar>) -> Scalar {
        if word.is_empty() {
            return Scalar::one();
        }
        if word[0] < 0 {
            return Scalar::zero();
        }
        if let Some(v) = memo.get(word) {
            return v.clone();
        }
        // rightmost mode with n >= 0; everything to its right creates
        let k = word.iter().rposition(|&n| n >= 0).unwrap();
        let a = word[k];
        let out = if k + 1 == word.len() {
            if a == 0 {
                &params.delta * vev(&word[..k], params, memo)
            } else {
                Scalar::zero()
            }
        } else {
            let b = word[k + 1];
            let mut swapped = word.to_vec();
            swapped.swap(k, k + 1);
            let mut acc = vev(&swapped, params, memo);
            let mut merged = word[..k].to_vec();
            merged.push(a + b);
            merged.extend_from_slice(&word[k + 2..]);
            acc += Scalar::from_int(a - b) * vev(&merged, params, memo);
            if a + b == 0 {
                let mut dropped = word[..k].to_vec();
                dropped.extend_from_slice(&word[k + 2..]);
                acc += &params.c * Scalar::new(a * a * a - a, 12) * vev(&dropped, params, memo);
            }
            acc
        };
        memo.insert(word.to_vec(), out.clone());
        out
    }
    let basis = partitions(d);
    let mut memo = HashMap::new();
    basis
        .iter()
        .map(|lam| {
            basis
                .iter()
                .map(|mu| {
                    let mut word: Vec<i64> = lam.iter().rev().map(|&l| l as i64).collect();
                    word.extend(mu.iter().map(|&m| -(m as i64)));
                    vev(&word, params, &mut memo)
                })
                .collect()
        })
        .collect()
}

/// `Delta = -a^2/(e1 e2) + (e1+e2)^2/(4 e1 e2)`, `c = 1 + 6 (e1+e2)^2/(e1 e2)`.
pub fn agt_params(a: &Scalar, eps1: &Scalar, eps2: &Scalar) -> Result<VirParams> {
    let prod = eps1 * eps2;
    if prod.is_zero() {
        return Err(Error::Parameter("eps1 * eps2 must be nonzero".into()));
    }
    let sum2 = (eps1 + eps2) * (eps1 + eps2);
    let delta = -(a * a) / &prod + &sum2 / (Scalar::from_int(4) * &prod);
    let c = Scalar::one() + Scalar::from_int(6) * &sum2 / &prod;
    Ok(VirParams { delta, c })
}

/// `Delta = ((chi+1)^2 - (k+1)^2) / (4(k+2))`, `c = 1 - 6(k+1)^2/(k+2)`.
pub fn ff_params(chi: &Scalar, k: &Scalar) -> Result<VirParams> {
    let k2 = k + Scalar::from_int(2);
    if k2.is_zero() {
        return Err(Error::Parameter("critical level k = -2".into()));
    }
    let c1 = chi + Scalar::one();
    let k1 = k + Scalar::one();
    let delta = (&c1 * &c1 - &k1 * &k1) / (Scalar::from_int(4) * &k2);
    let c = Scalar::one() - Scalar::from_int(6) * &k1 * &k1 / &k2;
    Ok(VirParams { delta, c })
}

/// `chi = -2a/e2 - 1`, `k = -e1/e2 - 2`.
pub fn chic_map(a: &Scalar, eps1: &Scalar, eps2: &Scalar) -> Result<(Scalar, Scalar)> {
    if eps2.is_zero() {
        return Err(Error::Parameter("eps2 must be nonzero".into()));
    }
    let chi = -(Scalar::from_int(2) * a / eps2) - Scalar::one();
    let k = -(eps1 / eps2) - Scalar::from_int(2);
    Ok((chi, k))
}

fn draw(rng: &mut ChaCha8Rng) -> Scalar {
    loop {
        let v = Scalar::new(rng.gen_range(-30..=30), rng.gen_range(1..=7));
        if !v.is_zero() {
            return v;
        }
    }
}

/// Random parameter triples `(a, eps1, eps2)` with nonzero eps and `k != -2`.
pub fn random_triples(trials: u32, seed: u64) -> Vec<(Scalar, Scalar, Scalar)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| (draw(&mut rng), draw(&mut rng), draw(&mut rng))).collect()
}

/// `ff_params(chic_map(a, e1, e2)) == agt_params(a, e1, e2)` at random triples,
/// with the FF side supplied by `ff` (normally [`ff_params`]).
pub fn dictionary_check_with(
    trials: u32,
    seed: u64,
    ff: impl Fn(&Scalar, &Scalar) -> Result<VirParams>,
) -> Result<Option<(Scalar, Scalar, Scalar)>> {
    for (a, e1, e2) in random_triples(trials, seed) {
        let (chi, k) = chic_map(&a, &e1, &e2)?;
        if ff(&chi, &k)? != agt_params(&a, &e1, &e2)? {
            return Ok(Some((a, e1, e2)));
        }
    }
    Ok(None)
}

pub fn dictionary_check(trials: u32, seed: u64) -> Result<bool> {
    Ok(dictionary_check_with(trials, seed, ff_params)?.is_none())
}

//! Generating series `A_i(u)`, `d_k(u)`, `B_i(u)`, `C_i(u)` on basis vectors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ActionEngine, Normalization};
use crate::error::{Error, Result};
use crate::patterns::{p_raw, Composition, GTPattern};
use crate::scalar::{poly_from_roots, series_inverse, Scalar, SpecEnv, UPoly, USeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeriesKind {
    B,
    C,
}

/// How many negative powers of `u` are checked to vanish when assembling B/C.
const POLYNOMIALITY_CHECKS: usize = 3;

fn check_row(pi: &Composition, i: usize, lo: usize, hi: usize) -> Result<()> {
    if i < lo || i > hi {
        return Err(Error::IndexOutOfRange(format!("series index {i} for {pi:?}")));
    }
    Ok(())
}

/// Eigenvalue of `A_i(u)` on `xi_pat`: `prod_{j<=i, a} (u - p_{ij}^{(a)}/hbar)`.
pub fn a_eigenvalue(pi: &Composition, i: usize, pat: &GTPattern, env: &SpecEnv) -> Result<UPoly> {
    check_row(pi, i, 0, pi.n())?;
    let hinv = env.hbar.inv()?;
    let roots: Vec<Scalar> = pi.row_cells(i).map(|(j, a)| -(p_raw(pat, i, j, a, env) * &hinv)).collect();
    Ok(poly_from_roots(&roots))
}

/// `u^{-deg} A_k(u + k - 1)` as a series in `u^{-1}`.
fn shifted_a_series(pi: &Composition, row: usize, k: usize, pat: &GTPattern, env: &SpecEnv, order: usize) -> Result<USeries> {
    let poly = a_eigenvalue(pi, row, pat, env)?.shift(&Scalar::from_int(k as i64 - 1));
    let deg = poly.degree().unwrap_or(0);
    let coeffs: Vec<Scalar> = (0..=order.min(deg)).map(|s| poly.coeff(deg - s)).collect();
    Ok(USeries::new(coeffs, order))
}

/// Eigenvalue series of `d_k(u)` on `xi_pat`,
/// `u^{-p_k} A_k(u+k-1) A_{k-1}(u+k-1)^{-1}`.
pub fn d_series(pi: &Composition, k: usize, pat: &GTPattern, env: &SpecEnv, order: usize) -> Result<USeries> {
    check_row(pi, k, 1, pi.n())?;
    let num = shifted_a_series(pi, k, k, pat, env, order)?;
    let den = shifted_a_series(pi, k - 1, k, pat, env, order)?;
    Ok(num.mul(&series_inverse(&den)?))
}

/// Eigenvalue of `d_k^{(r)}` on `xi_pat`: `hbar^r` times the `u^{-r}`
/// coefficient of [`d_series`].
pub fn d_generator(pi: &Composition, k: usize, r: u32, pat: &GTPattern, env: &SpecEnv) -> Result<Scalar> {
    if r == 0 {
        return Ok(Scalar::one());
    }
    let s = d_series(pi, k, pat, env, r as usize)?;
    Ok(s.coeff(r as usize) * env.hbar.pow(r as i32))
}

/// Polynomial part of `g(y) * sum_{s >= lo} c_s y^{-s}` where only finitely
/// many `c_s` matter; errors if the first few negative powers survive.
fn polynomial_part(g: &UPoly, lo: u32, coeff: impl Fn(u32) -> Scalar, what: &str) -> Result<UPoly> {
    let deg = g.degree().unwrap_or(0);
    let mut q = Vec::new();
    for m in 0..deg {
        let mut acc = Scalar::zero();
        for s in lo.max(1)..=(deg - m) as u32 {
            let gc = g.coeff(m + s as usize);
            if !gc.is_zero() {
                acc += gc * coeff(s);
            }
        }
        q.push(acc);
    }
    for m in 1..=POLYNOMIALITY_CHECKS {
        let mut acc = Scalar::zero();
        for s in (lo.max(m as u32))..=(deg + m) as u32 {
            let gc = g.coeff(s as usize - m);
            if !gc.is_zero() {
                acc += gc * coeff(s);
            }
        }
        if !acc.is_zero() {
            return Err(Error::NotPolynomial(format!("{what}: coefficient of u^-{m} is {acc}")));
        }
    }
    Ok(UPoly::new(q))
}

/// `B_i(u) xi_source` in the engine's normalization, from the e-coefficients:
/// `B_i(u) = (u-i+1)^{p_{i+1}-p_i} A_i(u) e_i(u-i+1)`,
/// `e_i(u) = sum_s hbar^{1-s} e_i^{(s)} u^{-s}`.
pub(crate) fn b_series_in(engine: &ActionEngine, i: usize, source: &GTPattern) -> Result<BTreeMap<GTPattern, UPoly>> {
    let pi = engine.composition();
    let env = engine.env();
    check_row(pi, i, 1, pi.n() - 1)?;
    let sh = pi.shift(i);
    let back = Scalar::from_int(1 - i as i64);
    let fwd = Scalar::from_int(i as i64 - 1);
    let mut out = BTreeMap::new();
    for st in engine.lowering_steps(source, i)?.iter() {
        // g(y) = y^sh A_i^{target}(y + i - 1)
        let a = a_eigenvalue(pi, i, &st.target, env)?.shift(&fwd);
        let mut gc = vec![Scalar::zero(); sh as usize];
        gc.extend(a.coeffs().iter().cloned());
        let g = UPoly::new(gc);
        let coeff = |s: u32| {
            if s <= sh {
                Scalar::zero()
            } else {
                st.coeff(s) * env.hbar.pow(1 - s as i32)
            }
        };
        let q = polynomial_part(&g, sh + 1, coeff, "B")?;
        let poly = q.shift(&back);
        if !poly.is_zero() {
            out.insert(st.target.clone(), poly);
        }
    }
    Ok(out)
}

/// `C_i(u) xi_source` in the engine's normalization:
/// `C_i(u) = f_i(u-i+1) A_i(u)`, with `A_i` evaluated on the source.
pub(crate) fn c_series_in(engine: &ActionEngine, i: usize, source: &GTPattern) -> Result<BTreeMap<GTPattern, UPoly>> {
    let pi = engine.composition();
    let env = engine.env();
    check_row(pi, i, 1, pi.n() - 1)?;
    let back = Scalar::from_int(1 - i as i64);
    let g = a_eigenvalue(pi, i, source, env)?.shift(&Scalar::from_int(i as i64 - 1));
    let mut out = BTreeMap::new();
    for st in engine.raising_steps(source, i)?.iter() {
        let coeff = |s: u32| st.coeff(s) * env.hbar.pow(1 - s as i32);
        let q = polynomial_part(&g, 1, coeff, "C")?;
        let poly = q.shift(&back);
        if !poly.is_zero() {
            out.insert(st.target.clone(), poly);
        }
    }
    Ok(out)
}

/// `B_i(u)` on `xi_source` (geometric normalization), keyed by target pattern.
pub fn b_series(pi: &Composition, i: usize, source: &GTPattern, env: &SpecEnv) -> Result<BTreeMap<GTPattern, UPoly>> {
    let engine = ActionEngine::new(pi, env, Normalization::Geometric)?;
    b_series_in(&engine, i, source)
}

/// `C_i(u)` on `xi_source` (geometric normalization), keyed by target pattern.
pub fn c_series(pi: &Composition, i: usize, source: &GTPattern, env: &SpecEnv) -> Result<BTreeMap<GTPattern, UPoly>> {
    let engine = ActionEngine::new(pi, env, Normalization::Geometric)?;
    c_series_in(&engine, i, source)
}

/// `lambda_{r,k}(u) = prod_b (u + lambda_{r,k}^{(b)})` with
/// `lambda_{r,k}^{(b)} = -p_{r,k}^{(b)}/hbar + k - 1`.
fn lambda_poly(pat: &GTPattern, r: usize, k: usize, env: &SpecEnv, hinv: &Scalar) -> UPoly {
    let pi = pat.composition();
    let shift = Scalar::from_int(k as i64 - 1);
    let roots: Vec<Scalar> = (1..=pi.part(k) as usize)
        .map(|b| -(p_raw(pat, r, k, b, env) * hinv) + &shift)
        .collect();
    poly_from_roots(&roots)
}

/// Reconstructs `B_i` or `C_i` on `xi_source` by Lagrange interpolation from
/// the point values at `u = p_{ij}^{(a)}/hbar`. In the FMO normalization these
/// are `-prod_k lambda_{i+1,k}(c-k+1)` and `prod_k lambda_{i-1,k}(c-k+1)`; the
/// geometric values carry an extra `-hbar^{p_i}` resp. `-hbar^{-p_i}`.
pub fn interpolate_bc(
    kind: SeriesKind,
    norm: Normalization,
    pi: &Composition,
    i: usize,
    source: &GTPattern,
    env: &SpecEnv,
) -> Result<BTreeMap<GTPattern, UPoly>> {
    check_row(pi, i, 1, pi.n() - 1)?;
    let hinv = env.hbar.inv()?;
    let cells: Vec<(usize, usize)> = pi.row_cells(i).collect();
    let nodes: Vec<Scalar> = cells.iter().map(|&(j, a)| p_raw(source, i, j, a, env) * &hinv).collect();
    let pw = pi.part(i) as i32;
    let (row, sign, geo_scale, delta) = match kind {
        SeriesKind::B => (i + 1, -Scalar::one(), -env.hbar.pow(pw), -1),
        SeriesKind::C => (i - 1, Scalar::one(), -env.hbar.pow(-pw), 1),
    };
    let mut out = BTreeMap::new();
    for (idx, &(j, a)) in cells.iter().enumerate() {
        let c = &nodes[idx];
        let mut value = sign.clone();
        for k in 1..=row {
            value *= &lambda_poly(source, row, k, env, &hinv).eval(&(c - Scalar::from_int(k as i64 - 1)));
        }
        if norm == Normalization::Geometric {
            value *= &geo_scale;
        }
        if value.is_zero() {
            continue;
        }
        let target = source.moved(i, j, a, delta).ok_or_else(|| {
            Error::Parameter(format!("nonzero {kind:?} point value at an invalid move ({i},{j},{a})"))
        })?;
        let mut values = vec![Scalar::zero(); nodes.len()];
        values[idx] = value;
        out.insert(target, UPoly::interpolate(&nodes, &values)?);
    }
    Ok(out)
}

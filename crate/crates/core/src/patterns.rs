//! Compositions `pi = (p_1 <= .. <= p_n)`, degree vectors and Gelfand-Tsetlin
//! patterns `d_{ij}^{(a)}`, which index both the Gelfand-Tsetlin basis and the
//! torus fixed points of based parabolic Laumon spaces.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, SpecEnv};

#[derive(Debug, PartialEq, Eq, Hash)]
struct CompositionData {
    parts: Vec<u32>,
    /// `prefix[j] = p_1 + .. + p_j`
    prefix: Vec<u32>,
    /// flat index of the first cell of row `i` (index `i - 1`)
    row_start: Vec<usize>,
}

/// A weakly increasing composition of `N`. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Composition(Arc<CompositionData>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Composition> {
        if parts.is_empty() {
            return Err(Error::InvalidComposition("composition must have at least one part".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidComposition("parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidComposition("parts must be weakly increasing".into()));
        }
        let mut prefix = vec![0];
        for p in &parts {
            prefix.push(prefix.last().unwrap() + p);
        }
        let n = parts.len();
        let mut row_start = Vec::with_capacity(n);
        let mut acc = 0usize;
        for i in 1..n {
            row_start.push(acc);
            acc += prefix[i] as usize;
        }
        row_start.push(acc);
        Ok(Composition(Arc::new(CompositionData { parts, prefix, row_start })))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0.parts
    }

    /// Number of parts `n`.
    pub fn n(&self) -> usize {
        self.0.parts.len()
    }

    /// `N = p_1 + .. + p_n`
    pub fn total(&self) -> u32 {
        *self.0.prefix.last().unwrap()
    }

    /// `p_j`, 1-based.
    pub fn part(&self, j: usize) -> u32 {
        self.0.parts[j - 1]
    }

    /// `p_1 + .. + p_i`
    pub fn prefix(&self, i: usize) -> u32 {
        self.0.prefix[i]
    }

    pub fn max_part(&self) -> u32 {
        *self.0.parts.last().unwrap()
    }

    /// `p_{i+1} - p_i`, the shift of the `e_i` superscripts.
    pub fn shift(&self, i: usize) -> u32 {
        self.part(i + 1) - self.part(i)
    }

    /// 0-based index into `x` of the variable attached to column `j`, slot `a`.
    pub fn x_index(&self, j: usize, a: usize) -> usize {
        self.0.prefix[j - 1] as usize + a - 1
    }

    /// Number of stored cells `d_{ij}^{(a)}`, `n-1 >= i >= j`.
    pub fn cell_count(&self) -> usize {
        *self.0.row_start.last().unwrap()
    }

    fn cell_index(&self, i: usize, j: usize, a: usize) -> usize {
        self.0.row_start[i - 1] + self.0.prefix[j - 1] as usize + a - 1
    }

    /// Cells of row `i` as `(j, a)` pairs in storage order.
    pub fn row_cells(&self, i: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=i).flat_map(move |j| (1..=self.part(j) as usize).map(move |a| (j, a)))
    }

    /// Blocks of x-indices permuted by `W_L`.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        (1..=self.n())
            .map(|j| self.0.prefix[j - 1] as usize..self.0.prefix[j] as usize)
            .collect()
    }

    pub fn zero_degree(&self) -> DegreeVector {
        DegreeVector(vec![0; self.n() - 1])
    }

    fn check_degree(&self, d: &DegreeVector) -> Result<()> {
        if d.0.len() != self.n() - 1 {
            return Err(Error::DegreeLength { expected: self.n() - 1, got: d.0.len() });
        }
        Ok(())
    }
}

impl fmt::Debug for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.parts)
    }
}

impl Serialize for Composition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Composition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Composition::new(Vec::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// `(d_1, .., d_{n-1})`, an element of the positive degree cone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeVector(pub Vec<u32>);

impl DegreeVector {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `d + delta_i` (1-based `i`).
    pub fn raised(&self, i: usize) -> DegreeVector {
        let mut d = self.clone();
        d.0[i - 1] += 1;
        d
    }

    /// `d - delta_i`, `None` when that coordinate is already zero.
    pub fn lowered(&self, i: usize) -> Option<DegreeVector> {
        let mut d = self.clone();
        d.0[i - 1] = d.0[i - 1].checked_sub(1)?;
        Some(d)
    }

    /// Dash-joined form used as a CSV key.
    pub fn dash_key(&self) -> String {
        self.0.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
    }
}

/// All degree vectors of length `len` with total at most `cap`, ordered by
/// total degree and then lexicographically.
pub fn degree_vectors_up_to(len: usize, cap: u32) -> Vec<DegreeVector> {
    fn rec(len: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            if budget == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=budget {
            cur.push(v);
            rec(len, budget - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=cap {
        let mut level = Vec::new();
        rec(len, total, &mut Vec::new(), &mut level);
        out.extend(level.into_iter().map(DegreeVector));
    }
    out
}

/// Gelfand-Tsetlin pattern `d_{ij}^{(a)}`, `n-1 >= i >= j >= 1`, `1 <= a <= p_j`.
#[derive(Clone)]
pub struct GTPattern {
    pi: Composition,
    cells: Vec<u32>,
}

impl PartialEq for GTPattern {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.pi == other.pi
    }
}

impl Eq for GTPattern {}

impl Hash for GTPattern {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.cells.hash(state);
    }
}

impl PartialOrd for GTPattern {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GTPattern {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cells
            .cmp(&other.cells)
            .then_with(|| self.pi.parts().cmp(other.pi.parts()))
    }
}

impl GTPattern {
    pub fn zero(pi: &Composition) -> GTPattern {
        GTPattern { pi: pi.clone(), cells: vec![0; pi.cell_count()] }
    }

    /// Builds a pattern from its flat cell list (rows top to bottom, columns
    /// left to right, slots in order) and validates it.
    pub fn from_cells(pi: &Composition, cells: Vec<u32>) -> Result<GTPattern> {
        if cells.len() != pi.cell_count() {
            return Err(Error::IndexOutOfRange(format!(
                "pattern for {:?} needs {} cells, got {}",
                pi,
                pi.cell_count(),
                cells.len()
            )));
        }
        let pat = GTPattern { pi: pi.clone(), cells };
        if !pat.is_valid() {
            return Err(Error::InvalidComposition(format!(
                "pattern {} violates column monotonicity",
                pat.key()
            )));
        }
        Ok(pat)
    }

    pub fn composition(&self) -> &Composition {
        &self.pi
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    /// `d_{ij}^{(a)}`; panics on out-of-range indices.
    pub fn get(&self, i: usize, j: usize, a: usize) -> u32 {
        self.cells[self.pi.cell_index(i, j, a)]
    }

    pub fn checked_get(&self, i: usize, j: usize, a: usize) -> Result<u32> {
        let n = self.pi.n();
        if i == 0 || i >= n || j == 0 || j > i || a == 0 || a > self.pi.part(j) as usize {
            return Err(Error::IndexOutOfRange(format!("cell ({i},{j},{a}) for {:?}", self.pi)));
        }
        Ok(self.get(i, j, a))
    }

    /// Column monotonicity `d_{kj} >= d_{ij}` for `i >= k >= j`.
    pub fn is_valid(&self) -> bool {
        let n = self.pi.n();
        for i in 2..n {
            for (j, a) in self.pi.row_cells(i - 1) {
                if self.get(i, j, a) > self.get(i - 1, j, a) {
                    return false;
                }
            }
        }
        true
    }

    /// Pattern with `d_{ij}^{(a)}` moved by `delta`, if the result is a valid
    /// pattern.
    pub fn moved(&self, i: usize, j: usize, a: usize, delta: i32) -> Option<GTPattern> {
        let idx = self.pi.cell_index(i, j, a);
        let v = self.cells[idx] as i64 + delta as i64;
        if v < 0 {
            return None;
        }
        let mut cells = self.cells.clone();
        cells[idx] = v as u32;
        // only the column neighbours of the changed cell can break monotonicity
        if i > j && cells[idx] > self.get(i - 1, j, a) {
            return None;
        }
        if i + 1 < self.pi.n() && cells[self.pi.cell_index(i + 1, j, a)] > cells[idx] {
            return None;
        }
        Some(GTPattern { pi: self.pi.clone(), cells })
    }

    /// Row sums `d_i = sum_{j <= i} |d_{ij}|`.
    pub fn degree(&self) -> DegreeVector {
        let n = self.pi.n();
        DegreeVector(
            (1..n)
                .map(|i| self.pi.row_cells(i).map(|(j, a)| self.get(i, j, a)).sum())
                .collect(),
        )
    }

    /// Stable textual key, e.g. `1,1=1;2,1=0;2,2=1` (slots joined by `.`).
    pub fn key(&self) -> String {
        let n = self.pi.n();
        let mut parts = Vec::new();
        for i in 1..n {
            for j in 1..=i {
                let vals: Vec<String> = (1..=self.pi.part(j) as usize)
                    .map(|a| self.get(i, j, a).to_string())
                    .collect();
                parts.push(format!("{i},{j}={}", vals.join(".")));
            }
        }
        parts.join(";")
    }

    fn rows_map(&self) -> BTreeMap<String, Vec<u32>> {
        let n = self.pi.n();
        let mut rows = BTreeMap::new();
        for i in 1..n {
            for j in 1..=i {
                let vals = (1..=self.pi.part(j) as usize).map(|a| self.get(i, j, a)).collect();
                rows.insert(format!("{i},{j}"), vals);
            }
        }
        rows
    }
}

impl fmt::Debug for GTPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.key())
    }
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    pi: Vec<u32>,
    rows: BTreeMap<String, Vec<u32>>,
}

impl Serialize for GTPattern {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PatternJson { pi: self.pi.parts().to_vec(), rows: self.rows_map() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GTPattern {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PatternJson::deserialize(d)?;
        let pi = Composition::new(raw.pi).map_err(D::Error::custom)?;
        let mut cells = vec![0; pi.cell_count()];
        let mut seen = 0;
        for (key, vals) in &raw.rows {
            let (i, j) = key
                .split_once(',')
                .and_then(|(i, j)| Some((i.trim().parse::<usize>().ok()?, j.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| D::Error::custom(format!("bad row key {key:?}")))?;
            if i == 0 || i >= pi.n() || j == 0 || j > i || vals.len() != pi.part(j) as usize {
                return Err(D::Error::custom(format!("row {key:?} does not fit {pi:?}")));
            }
            for (a, v) in vals.iter().enumerate() {
                cells[pi.cell_index(i, j, a + 1)] = *v;
            }
            seen += 1;
        }
        if seen != (pi.n() - 1) * pi.n() / 2 {
            return Err(D::Error::custom("missing rows"));
        }
        GTPattern::from_cells(&pi, cells).map_err(D::Error::custom)
    }
}

/// All patterns with row sums `d`, in lexicographic order of the flat cells.
pub fn enumerate_patterns(pi: &Composition, d: &DegreeVector) -> Result<Vec<GTPattern>> {
    pi.check_degree(d)?;
    let n = pi.n();
    let mut out = Vec::new();
    if n == 1 {
        out.push(GTPattern::zero(pi));
        return Ok(out);
    }
    // caps[idx] is the upper bound for cell idx given the row above; filled row by row
    let mut cells = vec![0u32; pi.cell_count()];
    let slots: Vec<(usize, usize, usize)> =
        (1..n).flat_map(|i| pi.row_cells(i).map(move |(j, a)| (i, j, a))).collect();

    fn rec(
        pi: &Composition,
        d: &DegreeVector,
        slots: &[(usize, usize, usize)],
        pos: usize,
        remaining: u32,
        cells: &mut Vec<u32>,
        out: &mut Vec<GTPattern>,
    ) {
        if pos == slots.len() {
            if remaining == 0 {
                out.push(GTPattern { pi: pi.clone(), cells: cells.clone() });
            }
            return;
        }
        let (i, j, a) = slots[pos];
        let last_in_row = pos + 1 == slots.len() || slots[pos + 1].0 != i;
        let cap = if j < i {
            cells[pi.cell_index(i - 1, j, a)].min(remaining)
        } else {
            remaining
        };
        let range: Vec<u32> = if last_in_row {
            if remaining <= cap { vec![remaining] } else { vec![] }
        } else {
            (0..=cap).collect()
        };
        for v in range {
            let idx = pi.cell_index(i, j, a);
            cells[idx] = v;
            let next_remaining = remaining - v;
            if last_in_row {
                let next_row_sum = if i + 1 < pi.n() { d.0[i] } else { 0 };
                rec(pi, d, slots, pos + 1, next_row_sum, cells, out);
            } else {
                rec(pi, d, slots, pos + 1, next_remaining, cells, out);
            }
            cells[idx] = 0;
        }
    }

    rec(pi, d, &slots, 0, d.0[0], &mut cells, &mut out);
    Ok(out)
}

/// Unchecked `p_{ij}^{(a)} = hbar d_{ij}^{(a)} - x_{p_1+..+p_{j-1}+a}`, with the
/// top row `i = n` fixed at `-x`.
pub(crate) fn p_raw(pat: &GTPattern, i: usize, j: usize, a: usize, env: &SpecEnv) -> Scalar {
    let x = &env.x[pat.pi.x_index(j, a)];
    if i == pat.pi.n() {
        -x
    } else {
        let d = pat.get(i, j, a);
        if d == 0 {
            -x
        } else {
            &env.hbar * Scalar::from_int(d as i64) - x
        }
    }
}

/// Weight value `p_{ij}^{(a)}` of a pattern at a specialization.
pub fn p_value(pat: &GTPattern, i: usize, j: usize, a: usize, env: &SpecEnv) -> Result<Scalar> {
    let pi = &pat.pi;
    if i == 0 || i > pi.n() || j == 0 || j > i || a == 0 || a > pi.part(j) as usize {
        return Err(Error::IndexOutOfRange(format!("p-value ({i},{j},{a}) for {pi:?}")));
    }
    if env.x.len() != pi.total() as usize {
        return Err(Error::IndexOutOfRange(format!(
            "environment has {} x-values, composition needs {}",
            env.x.len(),
            pi.total()
        )));
    }
    Ok(p_raw(pat, i, j, a, env))
}

pub fn degree_of(pat: &GTPattern) -> DegreeVector {
    pat.degree()
}

/// Dimension of the (based or unbased) quasiflag space of degree `d`:
/// `sum d_i (p_i + p_{i+1})`, plus `dim G/P = sum_{i<j} p_i p_j` when unbased.
pub fn quasiflag_dimension(pi: &Composition, d: &DegreeVector, based: bool) -> Result<u64> {
    pi.check_degree(d)?;
    let moving: u64 = d
        .0
        .iter()
        .enumerate()
        .map(|(k, &di)| di as u64 * (pi.part(k + 1) + pi.part(k + 2)) as u64)
        .sum();
    if based {
        return Ok(moving);
    }
    let parts = pi.parts();
    let flag: u64 = (0..parts.len())
        .flat_map(|i| ((i + 1)..parts.len()).map(move |j| (i, j)))
        .map(|(i, j)| parts[i] as u64 * parts[j] as u64)
        .sum();
    Ok(flag + moving)
}

//! Digital nets: generating matrices, exact point sets, the net property,
//! dual sets and the point-set text format.
//!
//! Coordinates are kept as integer numerators over `b^n`. Digit vectors of
//! the running index `r` and of dual frequencies `t` are stored least
//! significant digit first; the output digits `h_{r,i,1..n}` of a point are
//! stored most significant first (position 1 carries weight `b^-1`).

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{checked_count, PrimeBase};
use crate::linalg;
use crate::walsh;

/// An exact base-b fraction `num / b^exp` with `num < b^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BAdic {
    pub num: u64,
    pub exp: u32,
}

impl BAdic {
    pub fn new(base: PrimeBase, num: u64, exp: u32) -> Result<Self> {
        let den = base
            .checked_pow(exp)
            .ok_or_else(|| Error::InvalidRange(format!("{}^{} overflows", base, exp)))?;
        if num >= den {
            return Err(Error::InvalidRange(format!("{num}/{den} not in [0,1)")));
        }
        Ok(BAdic { num, exp })
    }

    /// Converts `num / den` after checking that its reduced denominator is a
    /// power of `b`.
    pub fn from_rational(base: PrimeBase, num: u64, den: u64) -> Result<Self> {
        if den == 0 || num >= den {
            return Err(Error::InvalidRange(format!("{num}/{den} not in [0,1)")));
        }
        let g = gcd(num, den);
        let (mut num, mut den) = (num / g, den / g);
        let b = base.get() as u64;
        let mut exp = 0;
        while den > 1 {
            if den % b != 0 {
                return Err(Error::NonTerminatingExpansion(format!("{num}/{}", den)));
            }
            den /= b;
            exp += 1;
        }
        if num == 0 {
            exp = 0;
        }
        // num already reduced against the original denominator
        num %= base.checked_pow(exp).unwrap_or(u64::MAX).max(1);
        Ok(BAdic { num, exp })
    }

    pub fn zero() -> Self {
        BAdic { num: 0, exp: 0 }
    }

    /// The `pos`-th digit after the point (1-based); zero past `exp`.
    #[inline]
    pub fn digit(self, base: PrimeBase, pos: u32) -> u32 {
        if pos == 0 || pos > self.exp {
            return 0;
        }
        let b = base.get() as u64;
        ((self.num / b.pow(self.exp - pos)) % b) as u32
    }

    /// Re-expresses the value over `b^exp` (requires `exp >= self.exp`).
    pub fn rescale(self, base: PrimeBase, exp: u32) -> Option<u64> {
        if exp < self.exp {
            return None;
        }
        base.checked_pow(exp - self.exp)?.checked_mul(self.num)
    }

    pub fn to_f64(self, base: PrimeBase) -> f64 {
        self.num as f64 / (base.get() as f64).powi(self.exp as i32)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `d` square `n x n` matrices over F_b.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingMatrices {
    #[serde(rename = "b")]
    pub base: PrimeBase,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "matrices")]
    pub mats: Vec<Vec<Vec<u32>>>,
}

impl GeneratingMatrices {
    pub fn new(base: PrimeBase, n: usize, mats: Vec<Vec<Vec<u32>>>) -> Result<Self> {
        let g = GeneratingMatrices { base, n, d: mats.len(), mats };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.mats.len() != self.d {
            return Err(Error::InvalidParams(format!(
                "expected {} matrices, found {}",
                self.d,
                self.mats.len()
            )));
        }
        for (i, m) in self.mats.iter().enumerate() {
            if m.len() != self.n || m.iter().any(|row| row.len() != self.n) {
                return Err(Error::InvalidParams(format!("matrix {} is not {}x{}", i + 1, self.n, self.n)));
            }
            if m.iter().flatten().any(|&v| v >= self.base.get()) {
                return Err(Error::InvalidParams(format!("matrix {} has entries outside F_{}", i + 1, self.base)));
            }
        }
        Ok(())
    }

    pub fn identity(base: PrimeBase, n: usize, d: usize) -> Self {
        let id: Vec<Vec<u32>> = (0..n)
            .map(|i| (0..n).map(|k| (i == k) as u32).collect())
            .collect();
        GeneratingMatrices { base, n, d, mats: vec![id; d] }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: GeneratingMatrices =
            serde_json::from_str(s).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrices serialize")
    }

    /// Output digits `C_i r` for the digit vector `r` (least significant first).
    pub(crate) fn apply(&self, i: usize, r: &[u32]) -> Vec<u32> {
        self.mats[i]
            .iter()
            .map(|row| linalg::dot(self.base, row, r))
            .collect()
    }
}

/// A point of a net, with both digit rows and numerators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NetPoint {
    /// `digits[i][v]` is digit `v + 1` after the point of coordinate `i`.
    pub digits: Vec<Vec<u32>>,
    /// `numerators[i] / b^n` is coordinate `i`.
    pub numerators: Vec<u64>,
}

impl NetPoint {
    pub fn from_digits(base: PrimeBase, digits: Vec<Vec<u32>>) -> Self {
        let numerators = digits.iter().map(|row| phi_map(base, row)).collect();
        NetPoint { digits, numerators }
    }

    pub fn from_numerators(base: PrimeBase, n: u32, numerators: Vec<u64>) -> Self {
        let digits = numerators
            .iter()
            .map(|&k| {
                let mut row = base.digits(k, n as usize);
                row.reverse();
                row
            })
            .collect();
        NetPoint { digits, numerators }
    }

    pub fn coords(&self, n: u32) -> Vec<BAdic> {
        self.numerators.iter().map(|&num| BAdic { num, exp: n }).collect()
    }
}

/// An ordered point set with coordinates over `b^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub base: PrimeBase,
    pub n: u32,
    pub d: usize,
    pub points: Vec<NetPoint>,
}

impl PointSet {
    /// Builds a point set from numerator rows, rejecting values `>= b^n`.
    pub fn from_numerators(base: PrimeBase, n: u32, d: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        let den = base
            .checked_pow(n)
            .ok_or_else(|| Error::InvalidParams(format!("{base}^{n} overflows")))?;
        let mut points = Vec::with_capacity(rows.len());
        for (idx, row) in rows.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidParams(format!("point {idx} has {} coordinates, expected {d}", row.len())));
            }
            if let Some(&k) = row.iter().find(|&&k| k >= den) {
                return Err(Error::InvalidRange(format!("point {idx}: numerator {k} >= {den}")));
            }
            points.push(NetPoint::from_numerators(base, n, row));
        }
        Ok(PointSet { base, n, d, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `b^n`.
    pub fn denominator(&self) -> u64 {
        self.base.checked_pow(self.n).expect("denominator fits by construction")
    }

    pub fn numerator(&self, point: usize, coord: usize) -> u64 {
        self.points[point].numerators[coord]
    }

    pub fn coords(&self, point: usize) -> Vec<BAdic> {
        self.points[point].coords(self.n)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let den = self.denominator() as f64;
        self.points
            .iter()
            .map(|p| p.numerators.iter().map(|&k| k as f64 / den).collect())
            .collect()
    }
}

/// Numerator `sum_v a_v b^(n - v)` of `Phi_n(a)` over the denominator `b^n`.
pub fn phi_map(base: PrimeBase, a: &[u32]) -> u64 {
    let b = base.get() as u64;
    a.iter().fold(0u64, |acc, &digit| acc * b + digit as u64)
}

/// Componentwise `Phi_n^d` of concatenated blocks of length `n`.
pub fn phi_map_d(base: PrimeBase, a: &[u32], n: usize) -> Vec<u64> {
    if n == 0 {
        return vec![0];
    }
    a.chunks(n).map(|block| phi_map(base, block)).collect()
}

/// Runs the digital method: point `r` is built from `C_i r`.
pub fn generate_points(g: &GeneratingMatrices) -> Result<PointSet> {
    g.validate()?;
    let count = checked_count(g.base, g.n as u32, "digital net")?;
    let mut points = Vec::with_capacity(count as usize);
    for r in 0..count {
        let rbar = g.base.digits(r, g.n);
        let digits: Vec<Vec<u32>> = (0..g.d).map(|i| g.apply(i, &rbar)).collect();
        points.push(NetPoint::from_digits(g.base, digits));
    }
    Ok(PointSet { base: g.base, n: g.n as u32, d: g.d, points })
}

/// All `(j_1, .., j_d)` with `sum j_i = n`, in lexicographic order.
pub fn box_shapes(n: u32, d: usize) -> Vec<Vec<u32>> {
    fn rec(rem: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 1 {
            cur.push(rem);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=rem {
            cur.push(v);
            rec(rem - v, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::with_capacity(d), &mut out);
    out
}

/// A box of volume `b^-n` whose point count is not one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetWitness {
    pub shape: Vec<u32>,
    pub m: Vec<u64>,
    pub count: u64,
}

impl NetWitness {
    /// Box edges `[m_i b^-j_i, (m_i + 1) b^-j_i)` as floating values.
    pub fn intervals(&self, base: PrimeBase) -> Vec<(f64, f64)> {
        self.shape
            .iter()
            .zip(&self.m)
            .map(|(&j, &m)| {
                let w = (base.get() as f64).powi(-(j as i32));
                (m as f64 * w, (m + 1) as f64 * w)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetCheck {
    Net,
    NotNet(NetWitness),
}

impl NetCheck {
    pub fn is_net(&self) -> bool {
        matches!(self, NetCheck::Net)
    }
}

/// Checks that every elementary box of volume `b^-n` holds exactly one
/// point. On failure the first empty box is returned as witness.
pub fn is_net(p: &PointSet) -> Result<NetCheck> {
    let total = p.denominator();
    if p.len() as u64 != total {
        return Err(Error::NotPowerCardinality { got: p.len() });
    }
    let shapes = box_shapes(p.n, p.d);
    let b = p.base.get() as u64;
    for shape in &shapes {
        let mut counts = vec![0u64; total as usize];
        for point in &p.points {
            let mut key = 0u64;
            for (&k, &j) in point.numerators.iter().zip(shape) {
                let prefix = k / b.pow(p.n - j);
                key = key * b.pow(j) + prefix;
            }
            counts[key as usize] += 1;
        }
        if let Some(pos) = counts.iter().position(|&c| c != 1) {
            // N points in N boxes: a bad box implies an empty one
            let empty = counts.iter().position(|&c| c == 0).unwrap_or(pos);
            let mut m = vec![0u64; p.d];
            let mut rest = empty as u64;
            for i in (0..p.d).rev() {
                let w = b.pow(shape[i]);
                m[i] = rest % w;
                rest /= w;
            }
            return Ok(NetCheck::NotNet(NetWitness {
                shape: shape.clone(),
                m,
                count: counts[empty],
            }));
        }
    }
    Ok(NetCheck::Net)
}

/// Nonzero frequency tuples annihilated by the transposed matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSet {
    pub base: PrimeBase,
    pub n: usize,
    pub d: usize,
    pub nullity: usize,
    pub elements: Vec<Vec<u64>>,
}

impl DualSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, t: &[u64]) -> bool {
        self.elements.iter().any(|e| e == t)
    }
}

/// The `n x dn` system `[C_1^T | .. | C_d^T]` whose kernel is the dual set.
pub(crate) fn stacked_transpose(g: &GeneratingMatrices) -> Vec<Vec<u32>> {
    let n = g.n;
    (0..n)
        .map(|row| {
            let mut out = Vec::with_capacity(n * g.d);
            for m in &g.mats {
                // row `row` of C^T is column `row` of C
                out.extend((0..n).map(|k| m[k][row]));
            }
            out
        })
        .collect()
}

/// Integer frequency vector of a kernel element (blocks least significant digit first).
pub(crate) fn digits_to_frequencies(base: PrimeBase, v: &[u32], n: usize, d: usize) -> Vec<u64> {
    let b = base.get() as u64;
    (0..d)
        .map(|i| {
            v[i * n..(i + 1) * n]
                .iter()
                .rev()
                .fold(0u64, |acc, &digit| acc * b + digit as u64)
        })
        .collect()
}

pub fn dual_set(g: &GeneratingMatrices) -> Result<DualSet> {
    g.validate()?;
    let (n, d) = (g.n, g.d);
    let system = stacked_transpose(g);
    let basis = linalg::null_space(g.base, &system, n * d);
    let mut span = linalg::Span::new(g.base, &basis, n * d)?;
    let mut elements = Vec::new();
    span.next_ref(); // zero
    while let Some(v) = span.next_ref() {
        elements.push(digits_to_frequencies(g.base, v, n, d));
    }
    elements.sort();
    Ok(DualSet { base: g.base, n, d, nullity: basis.len(), elements })
}

/// A sum of b-th roots of unity kept as multiplicities per exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSum {
    pub counts: Vec<u64>,
}

impl RootSum {
    pub fn value(&self) -> Complex64 {
        let b = self.counts.len();
        self.counts
            .iter()
            .enumerate()
            .map(|(e, &c)| c as f64 * walsh::root_of_unity(b as u32, e as u64))
            .sum()
    }

    /// Exact integer value when the sum is real and rational. For prime
    /// `b` this happens iff all nonzero exponents share one multiplicity.
    pub fn exact_integer(&self) -> Option<i64> {
        let rest = self.counts.get(1..)?;
        let c = *rest.first().unwrap_or(&0);
        if rest.iter().all(|&x| x == c) {
            Some(self.counts[0] as i64 - c as i64)
        } else {
            None
        }
    }
}

/// `sum_h wal_t(x_h)` as exact root-of-unity multiplicities.
pub fn char_sum(p: &PointSet, t: &[u64]) -> RootSum {
    let b = p.base.get();
    let mut counts = vec![0u64; b as usize];
    for point in &p.points {
        let mut e = 0u32;
        for (i, &ti) in t.iter().enumerate() {
            e = p.base.add(e, walsh::wal_phase(p.base, ti, BAdic { num: point.numerators[i], exp: p.n }));
        }
        counts[e as usize] += 1;
    }
    RootSum { counts }
}

/// Parsed point-set file: the points plus any comment lines after the header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetFile {
    pub points: PointSet,
    pub comments: Vec<String>,
}

impl NetFile {
    pub fn new(points: PointSet) -> Self {
        NetFile { points, comments: Vec::new() }
    }

    /// Header `#qmcnet v1 b=.. n=.. d=.. N=..`, comment lines, then one line
    /// of `d` numerators per point.
    pub fn to_text(&self) -> String {
        let p = &self.points;
        let mut out = String::with_capacity(p.len() * (p.d * 8 + 1) + 64);
        writeln!(out, "#qmcnet v1 b={} n={} d={} N={}", p.base, p.n, p.d, p.len()).unwrap();
        for c in &self.comments {
            writeln!(out, "#{c}").unwrap();
        }
        for point in &p.points {
            let mut first = true;
            for k in &point.numerators {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{k}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<NetFile> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty file".into() })?;
        let perr = |line: usize, msg: String| Error::Parse { line, msg };
        let rest = header
            .strip_prefix("#qmcnet v1")
            .ok_or_else(|| perr(1, "missing `#qmcnet v1` header".into()))?;
        let mut fields = std::collections::HashMap::new();
        for tok in rest.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| perr(1, format!("bad header field `{tok}`")))?;
            let v: u64 = v.parse().map_err(|_| perr(1, format!("bad value in `{tok}`")))?;
            fields.insert(k.to_string(), v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| perr(1, format!("header lacks `{k}`")));
        let base = PrimeBase::new(get("b")?)?;
        let (n, d, count) = (get("n")? as u32, get("d")? as usize, get("N")? as usize);
        if d == 0 {
            return Err(perr(1, "d must be >= 1".into()));
        }
        let den = base
            .checked_pow(n)
            .ok_or_else(|| perr(1, format!("{base}^{n} overflows")))?;
        let mut comments = Vec::new();
        let mut rows = Vec::with_capacity(count);
        for (idx, line) in lines {
            if let Some(c) = line.strip_prefix('#') {
                if rows.is_empty() {
                    comments.push(c.to_string());
                    continue;
                }
                return Err(perr(idx + 1, "comment after data".into()));
            }
            if line.trim().is_empty() {
                continue;
            }
            let row: Vec<u64> = line
                .split_whitespace()
                .map(|t| t.parse::<u64>().map_err(|_| perr(idx + 1, format!("bad numerator `{t}`"))))
                .collect::<Result<_>>()?;
            if row.len() != d {
                return Err(perr(idx + 1, format!("expected {d} numerators, found {}", row.len())));
            }
            if let Some(k) = row.iter().find(|&&k| k >= den) {
                return Err(perr(idx + 1, format!("numerator {k} out of range [0, {den})")));
            }
            rows.push(row);
        }
        if rows.len() != count {
            return Err(perr(0, format!("header says N={count}, found {} points", rows.len())));
        }
        let points = PointSet::from_numerators(base, n, d, rows)?;
        Ok(NetFile { points, comments })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: u64) -> PrimeBase {
        PrimeBase::new(v).unwrap()
    }

    fn tiny_net() -> GeneratingMatrices {
        GeneratingMatrices::new(b(2), 1, vec![vec![vec![1]], vec![vec![1]]]).unwrap()
    }

    #[test]
    fn generate_tiny_two_dim() {
        let p = generate_points(&tiny_net()).unwrap();
        let coords = p.to_f64();
        assert_eq!(coords, vec![vec![0.0, 0.0], vec![0.5, 0.5]]);
    }

    #[test]
    fn generate_identity_is_digit_reversal() {
        let g = GeneratingMatrices::identity(b(2), 2, 1);
        let p = generate_points(&g).unwrap();
        let xs: Vec<f64> = p.to_f64().into_iter().map(|c| c[0]).collect();
        assert_eq!(xs, vec![0.0, 0.5, 0.25, 0.75]);
    }

    #[test]
    fn generate_empty_matrices() {
        let g = GeneratingMatrices::identity(b(3), 0, 3);
        let p = generate_points(&g).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.points[0].numerators, vec![0, 0, 0]);
        assert!(is_net(&p).unwrap().is_net());
    }

    #[test]
    fn tiny_net_property() {
        let p = generate_points(&tiny_net()).unwrap();
        assert!(is_net(&p).unwrap().is_net());
    }

    #[test]
    fn duplicated_first_coordinate_fails() {
        let p = PointSet::from_numerators(b(2), 1, 2, vec![vec![0, 0], vec![0, 1]]).unwrap();
        match is_net(&p).unwrap() {
            NetCheck::NotNet(w) => {
                assert_eq!(w.shape, vec![1, 0]);
                assert_eq!(w.m, vec![1, 0]);
                assert_eq!(w.count, 0);
                assert_eq!(w.intervals(b(2)), vec![(0.5, 1.0), (0.0, 1.0)]);
            }
            NetCheck::Net => panic!("expected failure"),
        }
    }

    #[test]
    fn is_net_rejects_wrong_cardinality() {
        let p = PointSet::from_numerators(b(2), 2, 1, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(is_net(&p), Err(Error::NotPowerCardinality { got: 3 }));
    }

    #[test]
    fn box_shape_count() {
        assert_eq!(box_shapes(4, 2).len(), 5);
        assert_eq!(box_shapes(3, 3).len(), 10);
        assert_eq!(box_shapes(0, 2), vec![vec![0, 0]]);
    }

    #[test]
    fn dual_set_examples() {
        let g = GeneratingMatrices::identity(b(3), 3, 1);
        assert!(dual_set(&g).unwrap().is_empty());
        let ds = dual_set(&tiny_net()).unwrap();
        assert_eq!(ds.elements, vec![vec![1, 1]]);
        assert_eq!(ds.nullity, 1);
    }

    #[test]
    fn char_sum_examples() {
        let p = generate_points(&tiny_net()).unwrap();
        assert_eq!(char_sum(&p, &[0, 0]).exact_integer(), Some(2));
        assert_eq!(char_sum(&p, &[1, 1]).exact_integer(), Some(2));
        assert_eq!(char_sum(&p, &[1, 0]).exact_integer(), Some(0));
        assert!((char_sum(&p, &[1, 0]).value()).norm() < 1e-15);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_map(b(11), &[1, 0, 0, 0]), 1331);
        assert_eq!(phi_map(b(11), &[0, 0, 0, 0]), 0);
        assert_eq!(phi_map(b(11), &[10, 0, 0, 1]), 13311);
        assert_eq!(phi_map_d(b(2), &[1, 0, 0, 1], 2), vec![2, 1]);
    }

    #[test]
    fn badic_from_rational() {
        let x = BAdic::from_rational(b(2), 6, 8).unwrap();
        assert_eq!(x, BAdic { num: 3, exp: 2 });
        assert_eq!(x.digit(b(2), 1), 1);
        assert_eq!(x.digit(b(2), 2), 1);
        assert_eq!(x.digit(b(2), 3), 0);
        assert!(matches!(BAdic::from_rational(b(2), 1, 3), Err(Error::NonTerminatingExpansion(_))));
        assert_eq!(BAdic::from_rational(b(3), 0, 9).unwrap(), BAdic::zero());
    }

    #[test]
    fn netfile_round_trip_and_rejects() {
        let p = generate_points(&tiny_net()).unwrap();
        let mut f = NetFile::new(p);
        f.comments.push(" provenance {\"x\":1}".into());
        let text = f.to_text();
        assert!(text.starts_with("#qmcnet v1 b=2 n=1 d=2 N=2\n"));
        let back = NetFile::parse(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_text(), text);
        let bad = "#qmcnet v1 b=2 n=1 d=2 N=1\n2 0\n";
        assert!(matches!(NetFile::parse(bad), Err(Error::Parse { line: 2, .. })));
        let short = "#qmcnet v1 b=2 n=1 d=2 N=2\n0 0\n";
        assert!(NetFile::parse(short).is_err());
        assert!(matches!(NetFile::parse("#qmcnet v1 b=4 n=1 d=1 N=0\n"), Err(Error::NotPrime(4))));
    }

    #[test]
    fn char_sum_matches_dual_exhaustive_b2() {
        // Hammersley-type and a random-ish pair of 3x3 matrices
        let cases = vec![
            vec![
                vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]],
                vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            ],
            vec![
                vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
                vec![vec![1, 0, 1], vec![1, 1, 1], vec![0, 1, 0]],
            ],
        ];
        for mats in cases {
            let g = GeneratingMatrices::new(b(2), 3, mats).unwrap();
            let p = generate_points(&g).unwrap();
            let ds = dual_set(&g).unwrap();
            for t1 in 0..8u64 {
                for t2 in 0..8u64 {
                    let s = char_sum(&p, &[t1, t2]).exact_integer().unwrap();
                    let in_dual = (t1, t2) == (0, 0) || ds.contains(&[t1, t2]);
                    assert_eq!(s, if in_dual { 8 } else { 0 }, "t=({t1},{t2})");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn dual_cardinality_and_roundtrip(
            p in prop::sample::select(vec![2u64, 3, 5]),
            n in 1usize..3,
            d in 1usize..3,
            seed in prop::collection::vec(0u32..1000, 18),
        ) {
            let base = b(p);
            let mut it = seed.into_iter();
            let mats: Vec<Vec<Vec<u32>>> = (0..d)
                .map(|_| (0..n).map(|_| (0..n).map(|_| it.next().unwrap() % p as u32).collect()).collect())
                .collect();
            let g = GeneratingMatrices::new(base, n, mats).unwrap();
            let ds = dual_set(&g).unwrap();
            let r = linalg::rank(base, &stacked_transpose(&g), n * d);
            prop_assert_eq!(ds.len() as u64 + 1, p.pow((n * d - r) as u32));
            let pts = generate_points(&g).unwrap();
            for pt in &pts.points {
                let again = NetPoint::from_numerators(base, n as u32, pt.numerators.clone());
                prop_assert_eq!(&again, pt);
            }
        }
    }
}

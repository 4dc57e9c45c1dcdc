//! The d-dimensional b-adic Haar system, closed-form Haar coefficients of
//! the volume and indicator parts of the discrepancy function, per-level
//! aggregation, and the Parseval and Besov quasi-norm assembly.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::PrimeBase;
use crate::net::{BAdic, PointSet};
use crate::walsh::Roots;

/// `(j, m, l)` with `j_i >= -1`; `m_i = 0, l_i = 1` where `j_i = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HaarIndex {
    pub j: Vec<i32>,
    pub m: Vec<u64>,
    pub l: Vec<u32>,
}

impl HaarIndex {
    pub fn new(base: PrimeBase, j: Vec<i32>, m: Vec<u64>, l: Vec<u32>) -> Result<Self> {
        if j.len() != m.len() || j.len() != l.len() {
            return Err(Error::InvalidRange("j, m, l must have equal length".into()));
        }
        let b = base.get();
        for i in 0..j.len() {
            let ok = match j[i] {
                -1 => m[i] == 0 && l[i] == 1,
                ji if ji >= 0 => {
                    let width = (b as u128).checked_pow(ji as u32).unwrap_or(u128::MAX);
                    (m[i] as u128) < width && (1..b).contains(&l[i])
                }
                _ => false,
            };
            if !ok {
                return Err(Error::InvalidRange(format!(
                    "coordinate {}: (j, m, l) = ({}, {}, {}) out of range",
                    i + 1,
                    j[i],
                    m[i],
                    l[i]
                )));
            }
        }
        Ok(HaarIndex { j, m, l })
    }

    pub fn full_cube(d: usize) -> Self {
        HaarIndex { j: vec![-1; d], m: vec![0; d], l: vec![1; d] }
    }

    /// Number of coordinates with `j_i != -1`.
    pub fn s(&self) -> usize {
        self.j.iter().filter(|&&j| j >= 0).count()
    }

    /// Sum of the nonnegative `j_i`.
    pub fn abs_j(&self) -> u32 {
        level_abs(&self.j)
    }
}

pub fn level_abs(j: &[i32]) -> u32 {
    j.iter().filter(|&&v| v >= 0).map(|&v| v as u32).sum()
}

/// `floor(x b^j)` for an exact coordinate.
fn box_of(base: PrimeBase, x: BAdic, j: u32) -> u128 {
    let b = base.get() as u128;
    if x.exp >= j {
        x.num as u128 / b.pow(x.exp - j)
    } else {
        x.num as u128 * b.pow(j - x.exp)
    }
}

pub fn haar_eval(base: PrimeBase, idx: &HaarIndex, x: &[BAdic]) -> Complex64 {
    let b = base.get() as u64;
    let mut e = 0u64;
    for ((&j, &m), (&l, &xi)) in idx.j.iter().zip(&idx.m).zip(idx.l.iter().zip(x)) {
        if j < 0 {
            continue;
        }
        let j = j as u32;
        if box_of(base, xi, j) != m as u128 {
            return Complex64::new(0.0, 0.0);
        }
        let k = (box_of(base, xi, j + 1) % b as u128) as u64;
        e += l as u64 * k;
    }
    crate::walsh::root_of_unity(base.get(), e)
}

/// Haar coefficient of `x_1 .. x_d`; independent of `m`.
pub fn volume_coeff(idx: &HaarIndex, base: PrimeBase) -> Complex64 {
    let roots = Roots::new(base);
    idx.j
        .iter()
        .zip(&idx.l)
        .map(|(&j, &l)| volume_factor(&roots, base, j, l))
        .product()
}

fn volume_factor(roots: &Roots, base: PrimeBase, j: i32, l: u32) -> Complex64 {
    if j < 0 {
        return Complex64::new(0.5, 0.0);
    }
    let b = base.get() as f64;
    b.powi(-2 * j - 1) / (roots.get(l as u64) - 1.0)
}

/// Per-coordinate factor of the indicator coefficient for all `l = 1..b-1`,
/// or `false` when `z` is not interior to `I_{jm}`.
fn indicator_factors(roots: &Roots, base: PrimeBase, j: u32, m: u64, z: BAdic, out: &mut [Complex64]) -> bool {
    let b = base.get() as u128;
    if box_of(base, z, j) != m as u128 {
        return false;
    }
    // left edge of the box is not interior
    let scale = if z.exp > j { b.pow(z.exp - j) } else { 1 };
    let zs = if z.exp >= j { z.num as u128 } else { z.num as u128 * b.pow(j - z.exp) };
    if zs == m as u128 * scale {
        return false;
    }
    let k = (box_of(base, z, j + 1) % b) as u64;
    // (b m + k + 1) - b^{j+1} z as an exact fraction over b^{max(0, exp-j-1)}
    let (num, den) = if z.exp > j + 1 {
        let den = b.pow(z.exp - j - 1);
        ((b * m as u128 + k as u128 + 1) * den - z.num as u128, den)
    } else {
        ((b * m as u128 + k as u128 + 1) - z.num as u128 * b.pow(j + 1 - z.exp), 1)
    };
    let lin = num as f64 / den as f64;
    let pre = (base.get() as f64).powi(-(j as i32) - 1);
    let bu = base.get() as u64;
    for (li, slot) in out.iter_mut().enumerate() {
        let l = li as u64 + 1;
        let mut s = roots.get(k * l) * lin;
        for r in k + 1..bu {
            s += roots.get(r * l);
        }
        *slot = s * pre;
    }
    true
}

/// One-coordinate indicator factor; `1 - z` for `j = -1`.
fn indicator_factor(roots: &Roots, base: PrimeBase, j: i32, m: u64, l: u32, z: BAdic) -> Complex64 {
    if j < 0 {
        return Complex64::new(1.0 - z.to_f64(base), 0.0);
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); base.get() as usize - 1];
    if indicator_factors(roots, base, j as u32, m, z, &mut buf) {
        buf[l as usize - 1]
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Haar coefficient of `x -> chi_{[0,x)}(z)`.
pub fn indicator_coeff(z: &[BAdic], idx: &HaarIndex, base: PrimeBase) -> Complex64 {
    let roots = Roots::new(base);
    let mut v = Complex64::new(1.0, 0.0);
    for i in 0..idx.j.len() {
        v *= indicator_factor(&roots, base, idx.j[i], idx.m[i], idx.l[i], z[i]);
        if v == Complex64::new(0.0, 0.0) {
            break;
        }
    }
    v
}

pub fn discrepancy_coeff(p: &PointSet, idx: &HaarIndex) -> Complex64 {
    let roots = Roots::new(p.base);
    let mut sum = Complex64::new(0.0, 0.0);
    for pt in &p.points {
        let mut v = Complex64::new(1.0, 0.0);
        for i in 0..p.d {
            v *= indicator_factor(&roots, p.base, idx.j[i], idx.m[i], idx.l[i], BAdic { num: pt.numerators[i], exp: p.n });
        }
        sum += v;
    }
    sum / p.len() as f64 - volume_coeff(idx, p.base)
}

/// Number of `s`-tuples of nonnegative integers summing to `lambda`.
pub fn composition_count(lambda: u64, s: u64) -> u128 {
    assert!(s >= 1, "s must be positive");
    // C(lambda + s - 1, s - 1), built incrementally to stay exact
    let k = s - 1;
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = c * (lambda as u128 + i) / i;
    }
    c
}

/// Enumeration of the l-tuples of a level: active coordinates take
/// `1..b-1`, index `sum (l_i - 1) (b-1)^pos` over active positions.
fn l_tuples(base: PrimeBase, j: &[i32]) -> Vec<Vec<u32>> {
    let b1 = base.get() - 1;
    let active: Vec<usize> = (0..j.len()).filter(|&i| j[i] >= 0).collect();
    let count = (b1 as usize).pow(active.len() as u32);
    (0..count)
        .map(|mut c| {
            let mut l = vec![1u32; j.len()];
            for &i in &active {
                l[i] = (c % b1 as usize) as u32 + 1;
                c /= b1 as usize;
            }
            l
        })
        .collect()
}

/// Counting parts `(1/N) sum_{z in I_jm} mu(chi(z))` of the occupied boxes of
/// one level, plus the number of boxes without interior points.
#[derive(Clone, Debug)]
pub struct LevelAggregate {
    pub base: PrimeBase,
    pub j: Vec<i32>,
    /// `l`-tuples in the order used by `occupied` and `volume`.
    pub ls: Vec<Vec<u32>>,
    /// Volume coefficient per l-tuple.
    pub volume: Vec<Complex64>,
    /// Boxes with a nonzero counting part candidate, sorted by `m`.
    pub occupied: Vec<(Vec<u64>, Vec<Complex64>)>,
    pub total_boxes: u128,
    /// `total_boxes - occupied.len()`.
    pub empty_count: u128,
}

impl LevelAggregate {
    /// `mu_{jml}(D)` for the `k`-th occupied box and `l`-tuple index `li`.
    pub fn coeff(&self, k: usize, li: usize) -> Complex64 {
        self.occupied[k].1[li] - self.volume[li]
    }

    pub fn abs_j(&self) -> u32 {
        level_abs(&self.j)
    }
}

/// Largest supported level per coordinate.
pub const MAX_LEVEL: u32 = 60;

fn total_boxes(base: PrimeBase, j: &[i32]) -> Result<u128> {
    (base.get() as u128)
        .checked_pow(level_abs(j))
        .ok_or_else(|| Error::CapExceeded { cap: level_abs(j), reason: "b^|j| overflows".into() })
}

/// Whether no point of a `b^n`-grid set can be interior at this level.
pub fn is_point_free_level(j: &[i32], n: u32) -> bool {
    j.iter().any(|&v| v >= 0 && v as u32 >= n)
}

/// Buckets the points of `p` into the boxes of level `j`. With `shortcut`,
/// point-free levels skip the bucketing and report every box empty.
pub fn level_aggregate_with(p: &PointSet, j: &[i32], shortcut: bool) -> Result<LevelAggregate> {
    if j.len() != p.d || j.iter().any(|&v| v < -1) {
        return Err(Error::InvalidRange(format!("level {j:?} invalid for d = {}", p.d)));
    }
    if let Some(&bad) = j.iter().find(|&&v| v > MAX_LEVEL as i32) {
        return Err(Error::CapExceeded { cap: MAX_LEVEL, reason: format!("level component {bad}") });
    }
    let base = p.base;
    let roots = Roots::new(base);
    let total = total_boxes(base, j)?;
    let ls = l_tuples(base, j);
    let volume: Vec<Complex64> = ls
        .iter()
        .map(|l| j.iter().zip(l).map(|(&ji, &li)| volume_factor(&roots, base, ji, li)).product())
        .collect();
    let mut agg = LevelAggregate {
        base,
        j: j.to_vec(),
        ls,
        volume,
        occupied: Vec::new(),
        total_boxes: total,
        empty_count: total,
    };
    if shortcut && is_point_free_level(j, p.n) {
        return Ok(agg);
    }
    let b1 = base.get() as usize - 1;
    let active: Vec<usize> = (0..p.d).filter(|&i| j[i] >= 0).collect();
    let n_l = agg.ls.len();
    // (box key, point index), keyed by m in row-major order
    let mut keyed: Vec<(u128, usize)> = p
        .points
        .iter()
        .enumerate()
        .map(|(idx, pt)| {
            let mut key = 0u128;
            for &i in &active {
                let ji = j[i] as u32;
                key = key * (base.get() as u128).pow(ji) + box_of(base, BAdic { num: pt.numerators[i], exp: p.n }, ji);
            }
            (key, idx)
        })
        .collect();
    keyed.sort_unstable();
    let inv_n = 1.0 / p.len() as f64;
    let mut factors = vec![vec![Complex64::new(0.0, 0.0); b1]; p.d];
    let mut start = 0;
    while start < keyed.len() {
        let key = keyed[start].0;
        let mut end = start;
        while end < keyed.len() && keyed[end].0 == key {
            end += 1;
        }
        let first = &p.points[keyed[start].1];
        let m: Vec<u64> = (0..p.d)
            .map(|i| {
                if j[i] < 0 {
                    0
                } else {
                    box_of(base, BAdic { num: first.numerators[i], exp: p.n }, j[i] as u32) as u64
                }
            })
            .collect();
        // compensated: the counting part nearly cancels the volume part
        let mut acc = vec![(Sum::default(), Sum::default()); n_l];
        for &(_, idx) in &keyed[start..end] {
            let pt = &p.points[idx];
            let mut scalar = 1.0;
            let mut interior = true;
            for i in 0..p.d {
                let z = BAdic { num: pt.numerators[i], exp: p.n };
                if j[i] < 0 {
                    scalar *= 1.0 - z.to_f64(base);
                } else if !indicator_factors(&roots, base, j[i] as u32, m[i], z, &mut factors[i]) {
                    interior = false;
                    break;
                }
            }
            if !interior || scalar == 0.0 {
                continue;
            }
            for (li, slot) in acc.iter_mut().enumerate() {
                let mut v = Complex64::new(scalar, 0.0);
                let mut c = li;
                for &i in &active {
                    v *= factors[i][c % b1];
                    c /= b1;
                }
                slot.0.add(v.re);
                slot.1.add(v.im);
            }
        }
        let acc = acc.iter().map(|(re, im)| Complex64::new(re.value(), im.value()) * inv_n).collect();
        agg.occupied.push((m, acc));
        start = end;
    }
    agg.empty_count = total - agg.occupied.len() as u128;
    Ok(agg)
}

pub fn level_aggregate(p: &PointSet, j: &[i32]) -> Result<LevelAggregate> {
    level_aggregate_with(p, j, true)
}

/// Every level in `{-1, .., cap}^d`, first coordinate slowest.
pub fn levels_up_to(d: usize, cap: u32) -> Vec<Vec<i32>> {
    let side = cap as usize + 2;
    let count = side.pow(d as u32);
    (0..count)
        .map(|mut c| {
            let mut j = vec![0i32; d];
            for slot in j.iter_mut().rev() {
                *slot = (c % side) as i32 - 1;
                c /= side;
            }
            j
        })
        .collect()
}

/// Summation and integrability exponents, `inf` included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovParams {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl BesovParams {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        let bp = BesovParams { p, q, r };
        bp.validate()?;
        Ok(bp)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if v.is_nan() || v < 1.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must lie in [1, inf]")));
            }
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidParams(format!("r = {} must be finite", self.r)));
        }
        Ok(())
    }

    /// Warning when `r` falls outside `0 < r < 1/p`.
    pub fn window_warning(&self) -> Option<String> {
        let upper = 1.0 / self.p;
        (!(self.r > 0.0 && self.r < upper)).then(|| format!("r = {} outside 0 < r < 1/p window", self.r))
    }
}

fn ser_exponent<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReportParams {
    #[serde(serialize_with = "ser_exponent")]
    pub p: f64,
    #[serde(serialize_with = "ser_exponent")]
    pub q: f64,
    pub r: f64,
}

/// A computed norm expression with its truncation record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormReport {
    pub schema: u32,
    pub kind: String,
    pub value: f64,
    pub tail_bound: f64,
    pub cap: u32,
    pub params: ReportParams,
    pub b: u32,
    pub n: u32,
    pub d: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub warnings: Vec<String>,
}

impl NormReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.s + self.c
    }
}

/// `sum_l |omega^l - 1|^{-p}`, or the maximum for `p = inf`.
fn a_p(base: PrimeBase, roots: &Roots, p: f64) -> f64 {
    let vals = (1..base.get() as u64).map(|l| 1.0 / (roots.get(l) - 1.0).norm());
    if p.is_infinite() {
        vals.fold(0.0, f64::max)
    } else {
        vals.map(|v| v.powf(p)).sum()
    }
}

/// Level term `b^{|j| (r - 1/p + 1)} ||mu_j||_p`.
fn level_weight(base: PrimeBase, j: &[i32], bp: &BesovParams) -> f64 {
    let inv_p = if bp.p.is_infinite() { 0.0 } else { 1.0 / bp.p };
    (base.get() as f64).powf(level_abs(j) as f64 * (bp.r - inv_p + 1.0))
}

/// `||mu_j||_p^p` (or the sup for `p = inf`) of the discrepancy function.
fn level_p_sum(agg: &LevelAggregate, p: f64) -> f64 {
    let vol_p: Vec<f64> = agg.volume.iter().map(|v| v.norm()).collect();
    if p.is_infinite() {
        let mut best = 0.0f64;
        for k in 0..agg.occupied.len() {
            for li in 0..agg.ls.len() {
                best = best.max(agg.coeff(k, li).norm());
            }
        }
        if agg.empty_count > 0 {
            best = best.max(vol_p.iter().cloned().fold(0.0, f64::max));
        }
        return best;
    }
    let mut acc = Sum::default();
    for k in 0..agg.occupied.len() {
        for li in 0..agg.ls.len() {
            acc.add(pow_abs(agg.coeff(k, li).norm(), p));
        }
    }
    let per_box: f64 = vol_p.iter().map(|&v| pow_abs(v, p)).sum();
    acc.add(agg.empty_count as f64 * per_box);
    acc.value()
}

#[inline]
fn pow_abs(v: f64, p: f64) -> f64 {
    if p == 2.0 {
        v * v
    } else {
        v.powf(p)
    }
}

/// One-coordinate factor `l(j)` of the level term on point-free levels.
fn empty_factor(base: PrimeBase, j: i32, bp: &BesovParams, ap_root: f64) -> f64 {
    if j < 0 {
        0.5
    } else {
        (base.get() as f64).powf(j as f64 * (bp.r - 1.0) - 1.0) * ap_root
    }
}

/// Outer aggregation of level terms: `sum L^q` or `sup L`.
#[derive(Clone, Copy, Debug)]
struct Outer {
    q: f64,
}

impl Outer {
    fn lift(&self, l: f64) -> f64 {
        if self.q.is_infinite() {
            l
        } else {
            l.powf(self.q)
        }
    }

    fn combine(&self, a: f64, c: f64) -> f64 {
        if self.q.is_infinite() {
            a.max(c)
        } else {
            a + c
        }
    }

    fn root(&self, s: f64) -> f64 {
        if self.q.is_infinite() {
            s
        } else {
            s.powf(1.0 / self.q)
        }
    }
}

/// Combined `sum_j L_j^q` (or sup) over levels outside `{-1..cap}^d`, for
/// terms that factorize as `prod f(j_i)` with `f(j) = f(0) ratio^j` for
/// `j >= 0`. Summed as `sum_k I^k O T^{d-1-k}` with `T = I + O` so that no
/// term cancels.
fn factorized_tail(d: usize, cap: u32, lift_factor: &dyn Fn(i32) -> f64, ratio: f64, outer: Outer) -> f64 {
    // sum (or sup) over j_i in {-1..cap} of lift(f(j_i))
    let mut inside = 0.0;
    for j in -1..=cap as i32 {
        inside = outer.combine(inside, lift_factor(j));
    }
    let beyond = lift_factor(cap as i32 + 1);
    if outer.q.is_infinite() {
        // the factors decay past cap, so the best choice is j = cap + 1 there
        // and the inside max elsewhere
        let others = inside.max(beyond);
        return beyond * others.powi(d as i32 - 1);
    }
    let outside = beyond / (1.0 - ratio);
    let total = inside + outside;
    (0..d as i32).map(|k| inside.powi(k) * outside * total.powi(d as i32 - 1 - k)).sum()
}

/// Shared engine: returns (partial + exact tail, tail bound).
fn assemble(p: &PointSet, bp: &BesovParams, cap: u32) -> Result<(f64, f64)> {
    if cap > MAX_LEVEL {
        return Err(Error::CapExceeded { cap, reason: format!("cap above {MAX_LEVEL}") });
    }
    let levels_count = (cap as u64 + 2).checked_pow(p.d as u32).unwrap_or(u64::MAX);
    if levels_count > 1 << 20 {
        return Err(Error::CapExceeded { cap, reason: format!("{levels_count} levels") });
    }
    if bp.r >= 1.0 {
        return Err(Error::InvalidParams(format!("quasi-norm diverges for r = {} >= 1", bp.r)));
    }
    let base = p.base;
    let roots = Roots::new(base);
    let outer = Outer { q: bp.q };
    let inv_p = if bp.p.is_infinite() { 0.0 } else { 1.0 / bp.p };
    let ap_root = if bp.p.is_infinite() {
        a_p(base, &roots, bp.p)
    } else {
        a_p(base, &roots, bp.p).powf(inv_p)
    };
    let levels = levels_up_to(p.d, cap);
    let terms: Vec<f64> = levels
        .par_iter()
        .map(|j| -> Result<f64> {
            let agg = level_aggregate(p, j)?;
            let inner = level_p_sum(&agg, bp.p);
            let norm_p = if bp.p.is_infinite() { inner } else { inner.powf(inv_p) };
            Ok(outer.lift(level_weight(base, j, bp) * norm_p))
        })
        .collect::<Result<_>>()?;
    let mut partial = Sum::default();
    let mut sup = 0.0f64;
    for &t in &terms {
        if outer.q.is_infinite() {
            sup = sup.max(t);
        } else {
            partial.add(t);
        }
    }
    let partial = if outer.q.is_infinite() { sup } else { partial.value() };

    let lifted = |j: i32| outer.lift(empty_factor(base, j, bp, ap_root));
    // lift(f(j + 1)) / lift(f(j)) for j >= 0
    let ratio = (base.get() as f64).powf((bp.r - 1.0) * bp.q);
    let n = p.n;
    // levels with a coordinate >= n carry no interior points: exact closed form
    let exact_from = cap.max(n.saturating_sub(1));
    let exact_tail = factorized_tail(p.d, exact_from, &lifted, ratio, outer);
    // levels with every j_i < n and some j_i > cap: bounded, not computed
    let mut bound = 0.0;
    if exact_from > cap {
        let mid = levels_up_to(p.d, exact_from)
            .into_iter()
            .filter(|j| j.iter().any(|&v| v > cap as i32));
        let b = base.get() as f64;
        for j in mid {
            let s = j.iter().filter(|&&v| v >= 0).count() as i32;
            let aj = level_abs(&j) as f64;
            let boxes = b.powf(aj);
            let vol: f64 = j.iter().map(|&v| empty_factor(base, v, bp, ap_root)).product::<f64>()
                / level_weight(base, &j, bp);
            // |mu| <= |C/N| + |V| with sum_m |C_m / N| <= b^-|j| per l
            let l_count = (b - 1.0).powi(s);
            let level_norm = if bp.p.is_infinite() {
                b.powf(-aj) + vol
            } else {
                let vol_per_box = vol.powf(bp.p) / boxes;
                (2f64.powf(bp.p - 1.0) * (l_count * b.powf(-aj * bp.p) + boxes * vol_per_box)).powf(inv_p)
            };
            bound = outer.combine(bound, outer.lift(level_weight(base, &j, bp) * level_norm));
        }
    }
    let total = outer.combine(partial, exact_tail);
    let upper = outer.combine(total, bound);
    let value = outer.root(total);
    // allowance for rounding in the level sums
    let rounding = 1e-12 * value.abs();
    Ok((value, (outer.root(upper) - value).max(0.0) + rounding))
}

fn report(kind: &str, p: &PointSet, bp: &BesovParams, cap: u32, value: f64, tail: f64, warnings: Vec<String>) -> NormReport {
    NormReport {
        schema: 1,
        kind: kind.to_string(),
        value,
        tail_bound: tail,
        cap,
        params: ReportParams { p: bp.p, q: bp.q, r: bp.r },
        b: p.base.get(),
        n: p.n,
        d: p.d,
        big_n: p.len(),
        warnings,
    }
}

/// Default truncation: `n + 2` per coordinate.
pub fn default_cap(p: &PointSet) -> u32 {
    p.n + 2
}

/// `||D_P||_2^2` through Parseval. Levels beyond the cap contribute in
/// closed form where they are point-free; the rest is bounded.
pub fn parseval_l2(p: &PointSet, cap: u32) -> Result<NormReport> {
    let bp = BesovParams { p: 2.0, q: 2.0, r: 0.0 };
    let (value, tail) = assemble(p, &bp, cap)?;
    let sq = value * value;
    let sq_tail = (value + tail) * (value + tail) - sq;
    let mut warnings = Vec::new();
    if cap + 1 < p.n {
        warnings.push(format!("cap {cap} below n - 1 = {}; tail is a bound", p.n - 1));
    }
    Ok(report("parseval", p, &bp, cap, sq, sq_tail, warnings))
}

pub fn besov_quasi_norm(p: &PointSet, bp: &BesovParams, cap: u32) -> Result<NormReport> {
    bp.validate()?;
    let (value, tail) = assemble(p, bp, cap)?;
    let warnings = bp.window_warning().into_iter().collect();
    Ok(report("besov", p, bp, cap, value, tail, warnings))
}

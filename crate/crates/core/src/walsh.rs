//! The b-adic Walsh system, Fine–Price coefficients of interval
//! indicators, the Θ/R split of the discrepancy function, and character
//! identities on `F_b^{dn}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cs::{nrt_weight, CodeSpace};
use crate::error::{Error, Result};
use crate::field::{checked_count_with, PrimeBase};
use crate::haar::HaarIndex;
use crate::linalg;
use crate::net::{BAdic, DualSet, PointSet, RootSum};
use crate::norms;

/// `exp(2 pi i e / b)`.
pub fn root_of_unity(b: u32, e: u64) -> Complex64 {
    let e = (e % b as u64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * e / b as f64)
}

/// The b-th roots of unity, indexed by exponent.
#[derive(Clone, Debug)]
pub struct Roots {
    table: Vec<Complex64>,
}

impl Roots {
    pub fn new(base: PrimeBase) -> Self {
        let b = base.get();
        Roots { table: (0..b as u64).map(|e| root_of_unity(b, e)).collect() }
    }

    #[inline]
    pub fn get(&self, e: u64) -> Complex64 {
        self.table[(e % self.table.len() as u64) as usize]
    }
}

/// Exponent `alpha_0 x_1 + alpha_1 x_2 + ..` mod b of `wal_alpha(x)`.
pub fn wal_phase(base: PrimeBase, alpha: u64, x: BAdic) -> u32 {
    let b = base.get() as u64;
    let mut a = alpha;
    let mut pos = 1;
    let mut e = 0u32;
    while a > 0 && pos <= x.exp {
        e = base.add(e, base.mul((a % b) as u32, x.digit(base, pos)));
        a /= b;
        pos += 1;
    }
    e
}

/// Tensor-product Walsh function at an exact point.
pub fn walsh_eval(base: PrimeBase, alpha: &[u64], x: &[BAdic]) -> Complex64 {
    let e = alpha
        .iter()
        .zip(x)
        .fold(0u32, |acc, (&a, &xi)| base.add(acc, wal_phase(base, a, xi)));
    root_of_unity(base.get(), e as u64)
}

/// As [`walsh_eval`] for rational coordinates `(num, den)`.
pub fn walsh_eval_rational(base: PrimeBase, alpha: &[u64], x: &[(u64, u64)]) -> Result<Complex64> {
    let pts: Vec<BAdic> = x
        .iter()
        .map(|&(num, den)| BAdic::from_rational(base, num, den))
        .collect::<Result<_>>()?;
    Ok(walsh_eval(base, alpha, &pts))
}

/// Per-base constants for the Fine–Price formulas.
#[derive(Clone, Debug)]
pub struct FinePrice {
    base: PrimeBase,
    roots: Roots,
    /// `sum_{z=1}^{b-1} w^{-z k} / (w^z - 1)` for digit `k`.
    digit_sums: Vec<Complex64>,
}

impl FinePrice {
    pub fn new(base: PrimeBase) -> Self {
        let roots = Roots::new(base);
        let b = base.get() as u64;
        let digit_sums = (0..b)
            .map(|k| {
                (1..b)
                    .map(|z| roots.get(b * b - z * k) / (roots.get(z) - 1.0))
                    .sum()
            })
            .collect();
        FinePrice { base, roots, digit_sums }
    }

    /// `int_0^y conj(wal_t(x)) dx`. Series terms past the last digit of `y`
    /// share one Walsh value and are summed as a geometric series.
    pub fn coeff(&self, t: u64, y: BAdic) -> Complex64 {
        let base = self.base;
        if t == 0 {
            return Complex64::new(y.to_f64(base), 0.0);
        }
        let b = base.get() as u64;
        let bf = b as f64;
        let rho = nrt_weight(base, t);
        let top = b.pow(rho - 1);
        let tau = t / top;
        let t_prime = t - tau * top;
        let w_t = self.roots.get(b - wal_phase(base, t, y) as u64);
        let w_tp = self.roots.get(b - wal_phase(base, t_prime, y) as u64);
        let om_neg_tau = self.roots.get(b - tau);
        let mut sum = w_tp / (1.0 - om_neg_tau) + w_t * ((om_neg_tau - 1.0).inv() + 0.5);
        let mut a = 1u32;
        loop {
            let pos = rho + a;
            if pos > y.exp {
                // sum_{z} 1/(w^z - 1) = -(b-1)/2 and sum_{a' >= a} b^-a' = b^{1-a}/(b-1)
                sum -= w_t * (0.5 * bf.powi(1 - a as i32));
                break;
            }
            let k = y.digit(base, pos) as usize;
            sum += w_t * self.digit_sums[k] * bf.powi(-(a as i32));
            a += 1;
        }
        sum * bf.powi(-(rho as i32))
    }

    /// `chi_hat(t; y)` for all `t < b^n`.
    pub fn table(&self, y: BAdic, n: u32) -> Result<Vec<Complex64>> {
        let count = checked_count_with(self.base, n, "Fine-Price table", 1 << 26)?;
        Ok((0..count).map(|t| self.coeff(t, y)).collect())
    }
}

/// `int_0^y conj(wal_t)` by summing cells of level `max(rho(t), exp(y))`,
/// on which both the Walsh function and the cut-off are constant.
pub fn fine_price_direct(t: u64, y: BAdic, base: PrimeBase) -> Result<Complex64> {
    let roots = Roots::new(base);
    let level = nrt_weight(base, t).max(y.exp);
    let cells = checked_count_with(base, level, "Fine-Price cells", 1 << 26)?;
    let upto = y.rescale(base, level).expect("level >= exp");
    let b = base.get() as u64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..upto.min(cells) {
        sum += roots.get(b - wal_phase(base, t, BAdic { num: k, exp: level }) as u64);
    }
    Ok(sum / cells as f64)
}

pub fn fine_price_coeff(t: u64, y: BAdic, base: PrimeBase) -> Complex64 {
    FinePrice::new(base).coeff(t, y)
}

/// Walsh series of `y` itself: `1/2 + sum_a sum_z wal_{z b^{a-1}}(y) / (b^a (w^-z - 1))`.
/// Zero digits past `y.exp` contribute `-b^{-exp} / 2` in total.
pub fn fine_price_zero_series(y: BAdic, base: PrimeBase) -> Complex64 {
    let roots = Roots::new(base);
    let b = base.get() as u64;
    let mut sum = Complex64::new(0.5 - 0.5 * (b as f64).powi(-(y.exp as i32)), 0.0);
    for a in 1..=y.exp {
        let k = y.digit(base, a) as u64;
        for z in 1..b {
            sum += roots.get(z * k) / ((roots.get(b - z) - 1.0) * (b as f64).powi(a as i32));
        }
    }
    sum
}

/// `sum_{t < b^n} chi_hat(t; y) wal_t(x)`, tensored over coordinates.
pub fn truncated_indicator_series(base: PrimeBase, y: &[BAdic], n: u32, x: &[BAdic]) -> Result<Complex64> {
    let fp = FinePrice::new(base);
    let roots = Roots::new(base);
    let mut prod = Complex64::new(1.0, 0.0);
    for (&yi, &xi) in y.iter().zip(x) {
        let table = fp.table(yi, n)?;
        let s: Complex64 = table
            .iter()
            .enumerate()
            .map(|(t, &c)| c * roots.get(wal_phase(base, t as u64, xi) as u64))
            .sum();
        prod *= s;
    }
    Ok(prod)
}

/// `b^n |[0, y) ∩ I|` for the level-n cell `I` containing `x`, which is the
/// value of the one-dimensional truncated series.
pub fn cell_projection(base: PrimeBase, y: BAdic, n: u32, x: BAdic) -> f64 {
    let b = base.get() as u128;
    let cell = if x.exp >= n {
        x.num as u128 / b.pow(x.exp - n)
    } else {
        x.num as u128 * b.pow(n - x.exp)
    };
    if y.exp <= n {
        let yb = y.num as u128 * b.pow(n - y.exp);
        (yb > cell) as u8 as f64
    } else {
        let scale = b.pow(y.exp - n);
        let lo = cell * scale;
        let over = (y.num as u128).saturating_sub(lo).min(scale);
        over as f64 / scale as f64
    }
}

/// Projection form of the truncated indicator.
pub fn truncated_indicator(base: PrimeBase, y: &[BAdic], n: u32, x: &[BAdic]) -> f64 {
    y.iter().zip(x).map(|(&yi, &xi)| cell_projection(base, yi, n, xi)).product()
}

/// Both evaluations of `Theta_P(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Theta {
    pub dual_sum: Complex64Ser,
    pub definition: f64,
}

/// Serializable complex value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Complex64Ser {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex64Ser {
    fn from(c: Complex64) -> Self {
        Complex64Ser { re: c.re, im: c.im }
    }
}

impl From<Complex64Ser> for Complex64 {
    fn from(c: Complex64Ser) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// `(1/N) sum_z chi^{(n)}(z) - y_1 .. y_d`.
pub fn theta_definition(p: &PointSet, y: &[BAdic]) -> f64 {
    let total: f64 = p
        .points
        .iter()
        .map(|pt| {
            y.iter()
                .zip(&pt.numerators)
                .map(|(&yi, &num)| cell_projection(p.base, yi, p.n, BAdic { num, exp: p.n }))
                .product::<f64>()
        })
        .sum();
    total / p.len() as f64 - y.iter().map(|yi| yi.to_f64(p.base)).product::<f64>()
}

/// `sum_{t in D'} prod_i chi_hat(t_i; y_i)`.
pub fn theta_dual_sum(dual: &DualSet, y: &[BAdic]) -> Result<Complex64> {
    let fp = FinePrice::new(dual.base);
    let tables: Vec<Vec<Complex64>> = y
        .iter()
        .map(|&yi| fp.table(yi, dual.n as u32))
        .collect::<Result<_>>()?;
    Ok(theta_dual_sum_with_tables(dual, &tables))
}

fn theta_dual_sum_with_tables(dual: &DualSet, tables: &[Vec<Complex64>]) -> Complex64 {
    dual.elements
        .iter()
        .map(|t| {
            t.iter()
                .zip(tables)
                .map(|(&ti, tab)| tab[ti as usize])
                .product::<Complex64>()
        })
        .sum()
}

pub fn theta(p: &PointSet, dual: &DualSet, y: &[BAdic]) -> Result<Theta> {
    Ok(Theta {
        dual_sum: theta_dual_sum(dual, y)?.into(),
        definition: theta_definition(p, y),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub samples: usize,
    pub max_abs_residual: f64,
    /// `sup |R(y)| b^n` over the sample.
    pub max_scaled_residual: f64,
    pub argmax: Vec<f64>,
}

/// `R = D - Theta` on the given sample, with `D` counted exactly.
pub fn residual_check(p: &PointSet, ys: &[Vec<BAdic>]) -> ResidualReport {
    let residuals: Vec<f64> = ys
        .par_iter()
        .map(|y| (norms::disc_value_f64(p, y) - theta_definition(p, y)).abs())
        .collect();
    let (mut best, mut arg) = (0.0f64, 0usize);
    for (i, &r) in residuals.iter().enumerate() {
        if r > best {
            best = r;
            arg = i;
        }
    }
    ResidualReport {
        samples: ys.len(),
        max_abs_residual: best,
        max_scaled_residual: best * p.denominator() as f64,
        argmax: ys.get(arg).map_or_else(Vec::new, |y| y.iter().map(|c| c.to_f64(p.base)).collect()),
    }
}

/// Dense complex function on `F_b^len`; index `sum_k A_k b^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupFunction {
    pub base: PrimeBase,
    pub len: usize,
    pub table: Vec<Complex64>,
}

pub const DENSE_TABLE_LIMIT: u64 = 1 << 24;

impl GroupFunction {
    pub fn new(base: PrimeBase, len: usize, table: Vec<Complex64>) -> Result<Self> {
        let size = checked_count_with(base, len as u32, "group table", DENSE_TABLE_LIMIT)?;
        if table.len() as u64 != size {
            return Err(Error::InvalidParams(format!("table has {} entries, expected {size}", table.len())));
        }
        Ok(GroupFunction { base, len, table })
    }

    pub fn from_fn(base: PrimeBase, len: usize, f: impl Fn(&[u32]) -> Complex64) -> Result<Self> {
        let size = checked_count_with(base, len as u32, "group table", DENSE_TABLE_LIMIT)?;
        let table = (0..size).map(|idx| f(&base.digits(idx, len))).collect();
        Ok(GroupFunction { base, len, table })
    }

    pub fn index_of(&self, a: &[u32]) -> usize {
        a.iter().rev().fold(0usize, |acc, &v| acc * self.base.get() as usize + v as usize)
    }

    pub fn at(&self, a: &[u32]) -> Complex64 {
        self.table[self.index_of(a)]
    }
}

/// `f_hat(B) = sum_A w^{A.B} f(A)`, computed directly.
pub fn group_walsh_transform(f: &GroupFunction) -> Result<GroupFunction> {
    let base = f.base;
    let size = f.table.len();
    let roots = Roots::new(base);
    let digits: Vec<Vec<u32>> = (0..size as u64).map(|i| base.digits(i, f.len)).collect();
    let table = digits
        .par_iter()
        .map(|bv| {
            digits
                .iter()
                .zip(&f.table)
                .map(|(av, &fa)| roots.get(linalg::dot(base, av, bv) as u64) * fa)
                .sum()
        })
        .collect();
    GroupFunction::new(base, f.len, table)
}

/// Both sides of `sum_{A in C} f(A) = (#C / b^len) sum_{B in C^perp} f_hat(B)`.
pub fn poisson_sides(c: &CodeSpace, f: &GroupFunction) -> Result<(Complex64, Complex64)> {
    let fh = group_walsh_transform(f)?;
    let lhs: Complex64 = c.elements()?.map(|a| f.at(&a)).sum();
    let dual = crate::cs::dual_code(c);
    let rhs_sum: Complex64 = dual.elements()?.map(|bv| fh.at(&bv)).sum();
    let scale = c.cardinality()? as f64 / (f.table.len() as f64);
    Ok((lhs, rhs_sum * scale))
}

/// `sum_{A in C} w^{A.B}` as exact multiplicities.
pub fn subgroup_char_sum(c: &CodeSpace, bword: &[u32]) -> Result<RootSum> {
    let mut counts = vec![0u64; c.base.get() as usize];
    let mut span = c.elements()?;
    while let Some(a) = span.next_ref() {
        counts[linalg::dot(c.base, a, bword) as usize] += 1;
    }
    Ok(RootSum { counts })
}

/// Result of the `V_{gamma,lambda}` counting identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VCount {
    pub count_in_c: u64,
    pub count_in_dual: u64,
    pub sigma: usize,
    pub identity_ok: bool,
    /// Present when the hypotheses `|gamma| >= n+1`, `|lambda| + d <= n`,
    /// `dim C = n` hold; then `count_in_dual <= b^d` is checked.
    pub bound_ok: Option<bool>,
}

/// Membership masks: `v_free[i][k]` says whether 1-based position `k + 1`
/// of block `i` may be nonzero in `V_{gamma,lambda}`, similarly for the dual.
fn v_masks(n: usize, gamma: &[usize], lambda: &[usize]) -> (Vec<Vec<bool>>, Vec<Vec<bool>>) {
    let mut v = Vec::new();
    let mut vp = Vec::new();
    for (&g, &l) in gamma.iter().zip(lambda) {
        let pos = |k: usize| k + 1;
        v.push((0..n).map(|k| pos(k) > l && pos(k) != g && (pos(k) > g || l < g)).collect());
        vp.push((0..n).map(|k| pos(k) <= l || pos(k) == g).collect());
    }
    (v, vp)
}

fn within(word: &[u32], n: usize, mask: &[Vec<bool>]) -> bool {
    word.chunks(n.max(1))
        .zip(mask)
        .all(|(block, m)| block.iter().zip(m).all(|(&x, &free)| free || x == 0))
}

pub fn v_gamma_lambda(c: &CodeSpace, gamma: &[usize], lambda: &[usize]) -> Result<VCount> {
    let (d, n) = (c.d, c.n);
    if gamma.len() != d || lambda.len() != d {
        return Err(Error::InvalidRange(format!("gamma and lambda need {d} entries")));
    }
    if gamma.iter().zip(lambda).any(|(&g, &l)| l > g || g > n) {
        return Err(Error::InvalidRange("need 0 <= lambda_i <= gamma_i <= n".into()));
    }
    let (v, vp) = v_masks(n, gamma, lambda);
    let count_in_c = c.elements()?.filter(|a| within(a, n, &v)).count() as u64;
    let dual = crate::cs::dual_code(c);
    let count_in_dual = dual.elements()?.filter(|a| within(a, n, &vp)).count() as u64;
    let sigma = gamma.iter().zip(lambda).filter(|(g, l)| l < g).count();
    let lam: usize = lambda.iter().sum();
    let b = c.base.get() as u128;
    let lhs = count_in_c as u128 * b.pow((lam + sigma) as u32);
    let rhs = c.cardinality()? as u128 * count_in_dual as u128;
    let gam: usize = gamma.iter().sum();
    let bound_ok = (gam > n && lam + d <= n && c.dim() == n).then(|| count_in_dual as u128 <= b.pow(d as u32));
    Ok(VCount { count_in_c, count_in_dual, sigma, identity_ok: lhs == rhs, bound_ok })
}

/// `<h_{jml}, wal_alpha> = int h conj(wal_alpha)`, by coordinates: for
/// `j >= 0` it is `b^-j conj(wal_{alpha mod b^j}(m b^-j))` when `alpha` has
/// exactly `j + 1` digits with leading digit `l`, and zero otherwise.
pub fn haar_walsh_inner(base: PrimeBase, idx: &HaarIndex, alpha: &[u64]) -> Complex64 {
    let b = base.get() as u64;
    let mut value = Complex64::new(1.0, 0.0);
    for ((&j, &m), (&l, &a)) in idx.j.iter().zip(&idx.m).zip(idx.l.iter().zip(alpha)) {
        if j < 0 {
            if a != 0 {
                return Complex64::new(0.0, 0.0);
            }
            continue;
        }
        let j = j as u32;
        if nrt_weight(base, a) != j + 1 || a / b.pow(j) != l as u64 {
            return Complex64::new(0.0, 0.0);
        }
        let low = a % b.pow(j);
        let e = wal_phase(base, low, BAdic { num: m, exp: j });
        value *= root_of_unity(base.get(), b - e as u64) * (b as f64).powi(-(j as i32));
    }
    value
}

/// `<chi_hat(t; .), wal_alpha>` over `[0,1)`. The integrand is linear on
/// cells of level `max(rho(t), rho(alpha))` against a constant Walsh value,
/// so the trapezoid rule is exact there.
pub fn fine_price_walsh_inner(base: PrimeBase, t: u64, alpha: u64) -> Complex64 {
    let fp = FinePrice::new(base);
    let roots = Roots::new(base);
    let level = nrt_weight(base, t).max(nrt_weight(base, alpha));
    let cells = (base.get() as u64).pow(level);
    let h = 1.0 / cells as f64;
    let value_at = |k: u64| {
        if k == cells {
            // chi_hat(t; 1) = int_0^1 conj(wal_t)
            Complex64::new((t == 0) as u8 as f64, 0.0)
        } else {
            fp.coeff(t, BAdic { num: k, exp: level })
        }
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut left = value_at(0);
    for k in 0..cells {
        let right = value_at(k + 1);
        let w = roots.get(base.get() as u64 - wal_phase(base, alpha, BAdic { num: k, exp: level }) as u64);
        sum += (left + right) * 0.5 * h * w;
        left = right;
    }
    sum
}

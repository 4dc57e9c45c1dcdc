//! Direct discrepancy evaluation, the exact L2 discrepancy oracle,
//! the Haar coefficient audit, and multi-size scaling tables.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cs::{cs_generating_matrices, CSParams};
use crate::error::{Error, Result};
use crate::field::PrimeBase;
use crate::haar::{
    besov_quasi_norm, default_cap, is_point_free_level, level_abs, level_aggregate_with, levels_up_to, BesovParams,
};
use crate::net::{generate_points, BAdic, GeneratingMatrices, PointSet};

/// Number of points strictly below `x` in every coordinate.
fn count_below(p: &PointSet, x: &[BAdic]) -> u64 {
    let b = p.base.get() as u128;
    // compare k / b^n < num / b^exp over the common denominator
    let limits: Vec<(u128, u128)> = x
        .iter()
        .map(|xi| {
            let e = xi.exp.max(p.n);
            (b.pow(e - p.n), xi.num as u128 * b.pow(e - xi.exp))
        })
        .collect();
    p.points
        .iter()
        .filter(|pt| {
            pt.numerators
                .iter()
                .zip(&limits)
                .all(|(&k, &(scale, lim))| (k as u128) * scale < lim)
        })
        .count() as u64
}

fn volume_rational(base: PrimeBase, x: &[BAdic]) -> BigRational {
    let b = BigInt::from(base.get());
    x.iter().fold(BigRational::one(), |acc, xi| {
        acc * BigRational::new(BigInt::from(xi.num), b.pow(xi.exp))
    })
}

/// `D_P(x) = #{z in [0,x)} / N - |[0,x)|`, exactly.
pub fn disc_eval(p: &PointSet, x: &[BAdic]) -> BigRational {
    let count = count_below(p, x);
    BigRational::new(BigInt::from(count), BigInt::from(p.len())) - volume_rational(p.base, x)
}

/// Floating value of [`disc_eval`] with exact counting.
pub fn disc_value_f64(p: &PointSet, x: &[BAdic]) -> f64 {
    let count = count_below(p, x);
    count as f64 / p.len() as f64 - x.iter().map(|xi| xi.to_f64(p.base)).product::<f64>()
}

/// Largest point count accepted by [`warnock_l2`].
pub const WARNOCK_LIMIT: usize = 1 << 18;

/// Exact `||D_P||_2^2` as a rational number.
pub fn warnock_l2_squared(p: &PointSet) -> Result<BigRational> {
    let n_pts = p.len();
    if n_pts == 0 {
        return Err(Error::InvalidParams("empty point set".into()));
    }
    if n_pts > WARNOCK_LIMIT {
        return Err(Error::SizeOverflow {
            what: "pair sum",
            needed: format!("{n_pts}^2"),
            limit: (WARNOCK_LIMIT as u64).pow(2),
        });
    }
    let d = p.d as u32;
    let den = p.denominator() as u128;
    // 1 - z = (B - k) / B, so min(1-z, 1-z') = (B - max(k, k')) / B
    let comp: Vec<Vec<u64>> = p
        .points
        .iter()
        .map(|pt| pt.numerators.iter().map(|&k| (den as u64) - k).collect())
        .collect();
    let fits = (den.checked_pow(d).and_then(|v| v.checked_mul(n_pts as u128))).is_some();
    let pair_sum: BigUint = if fits {
        comp.par_iter()
            .map(|a| {
                let mut row = 0u128;
                for c in &comp {
                    let mut prod = 1u128;
                    for (&x, &y) in a.iter().zip(c) {
                        prod *= x.min(y) as u128;
                    }
                    row += prod;
                }
                BigUint::from(row)
            })
            .reduce(BigUint::zero, |x, y| x + y)
    } else {
        comp.par_iter()
            .map(|a| {
                let mut row = BigUint::zero();
                for c in &comp {
                    let mut prod = BigUint::one();
                    for (&x, &y) in a.iter().zip(c) {
                        prod *= x.min(y);
                    }
                    row += prod;
                }
                row
            })
            .reduce(BigUint::zero, |x, y| x + y)
    };
    // sum_z prod (B^2 - k^2)
    let den_b = BigUint::from(den);
    let den2 = &den_b * &den_b;
    let single: BigUint = p
        .points
        .iter()
        .map(|pt| {
            pt.numerators
                .iter()
                .fold(BigUint::one(), |acc, &k| acc * (&den2 - BigUint::from(k) * BigUint::from(k)))
        })
        .sum();
    let n_big = BigInt::from(n_pts);
    let three = BigRational::new(BigInt::one(), BigInt::from(3u32).pow(d));
    let two_d = BigInt::from(2u32).pow(d);
    let den2_d = BigInt::from(den2).pow(d);
    let second = BigRational::new(BigInt::from(2) * BigInt::from(single), &n_big * two_d * den2_d);
    let third = BigRational::new(BigInt::from(pair_sum), &n_big * &n_big * BigInt::from(den_b).pow(d));
    Ok(three - second + third)
}

/// `||D_P||_2` through the Warnock formula, with exact rational arithmetic.
pub fn warnock_l2(p: &PointSet) -> Result<f64> {
    let sq = warnock_l2_squared(p)?;
    Ok(rational_to_f64(&sq).max(0.0).sqrt())
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    // scale to keep precision when numerator and denominator are huge
    let (num, den) = (r.numer(), r.denom());
    let shift = (den.bits() as i64 - 60).max(0) as u64;
    let nbits = num.bits();
    let shift_n = (nbits as i64 - 60).max(0) as u64;
    let n = (num >> shift_n).to_f64().unwrap_or(f64::NAN);
    let dd = (den >> shift).to_f64().unwrap_or(f64::NAN);
    n / dd * 2f64.powi(shift_n as i32 - shift as i32)
}

/// Empirical constants for the four coefficient regimes and the
/// structural counts behind them.
#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub schema: u32,
    pub b: u32,
    pub n: u32,
    pub d: usize,
    pub cap: u32,
    /// `|mu| b^n` for the full-cube coefficient.
    pub c_full_cube: f64,
    /// `sup |mu| b^{|j| + n}` over levels with `|j| <= n`.
    pub c_coarse: f64,
    /// `sup |mu| b^{|j| + n}` over levels with `|j| > n`, all `j_i < n`.
    pub c_fine: f64,
    /// `sup |mu| b^{2|j|}` over the volume-only coefficients of those levels.
    pub c_fine_envelope: f64,
    /// `sup |mu| b^{2|j|}` over levels with some `j_i >= n`.
    pub c_point_free: f64,
    pub fine_levels: Vec<ExceptionalCount>,
    pub point_free_levels: usize,
    pub point_free_exceptions: u64,
    pub pass: bool,
}

/// Boxes (and coefficients) of one level whose coefficient exceeds the
/// volume-only magnitude.
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionalCount {
    pub j: Vec<i32>,
    pub boxes: u64,
    pub coefficients: u64,
    pub limit: u64,
}

/// Relative slack separating "exceeds the volume magnitude" from rounding.
const EXCEPTION_SLACK: f64 = 1e-9;

pub fn coeff_bound_audit(p: &PointSet, cap: u32) -> Result<AuditReport> {
    let b = p.base.get() as f64;
    let n = p.n;
    let limit = p.denominator();
    let levels = levels_up_to(p.d, cap);
    struct LevelOut {
        j: Vec<i32>,
        max_abs: f64,
        max_volume: f64,
        boxes: u64,
        coefficients: u64,
        exact_miss: u64,
    }
    let outs: Vec<LevelOut> = levels
        .par_iter()
        .map(|j| -> Result<LevelOut> {
            let point_free = is_point_free_level(j, n);
            let agg = level_aggregate_with(p, j, false)?;
            let mut max_abs = 0.0f64;
            let (mut boxes, mut coefficients, mut exact_miss) = (0u64, 0u64, 0u64);
            let max_volume = agg.volume.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for k in 0..agg.occupied.len() {
                let mut exceeds = false;
                for li in 0..agg.ls.len() {
                    let mu = agg.coeff(k, li);
                    max_abs = max_abs.max(mu.norm());
                    if mu.norm() > agg.volume[li].norm() * (1.0 + EXCEPTION_SLACK) {
                        exceeds = true;
                        coefficients += 1;
                    }
                    if point_free && mu != -agg.volume[li] {
                        exact_miss += 1;
                    }
                }
                boxes += exceeds as u64;
            }
            if agg.empty_count > 0 {
                max_abs = max_abs.max(max_volume);
            }
            Ok(LevelOut { j: j.clone(), max_abs, max_volume, boxes, coefficients, exact_miss })
        })
        .collect::<Result<_>>()?;
    let mut rep = AuditReport {
        schema: 1,
        b: p.base.get(),
        n,
        d: p.d,
        cap,
        c_full_cube: 0.0,
        c_coarse: 0.0,
        c_fine: 0.0,
        c_fine_envelope: 0.0,
        c_point_free: 0.0,
        fine_levels: Vec::new(),
        point_free_levels: 0,
        point_free_exceptions: 0,
        pass: true,
    };
    for o in outs {
        let aj = level_abs(&o.j) as i32;
        if o.j.iter().all(|&v| v < 0) {
            rep.c_full_cube = o.max_abs * b.powi(n as i32);
        } else if is_point_free_level(&o.j, n) {
            rep.point_free_levels += 1;
            rep.point_free_exceptions += o.exact_miss;
            rep.c_point_free = rep.c_point_free.max(o.max_abs * b.powi(2 * aj));
        } else if aj as u32 <= n {
            rep.c_coarse = rep.c_coarse.max(o.max_abs * b.powi(aj + n as i32));
        } else {
            rep.c_fine = rep.c_fine.max(o.max_abs * b.powi(aj + n as i32));
            rep.c_fine_envelope = rep.c_fine_envelope.max(o.max_volume * b.powi(2 * aj));
            if o.boxes > limit {
                rep.pass = false;
            }
            rep.fine_levels.push(ExceptionalCount { j: o.j, boxes: o.boxes, coefficients: o.coefficients, limit });
        }
    }
    if rep.point_free_exceptions > 0 {
        rep.pass = false;
    }
    Ok(rep)
}

impl AuditReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("audit serializes")
    }
}

/// A family of digital nets indexed by `n`.
#[derive(Clone, Debug, PartialEq)]
pub enum NetFamily {
    /// Chen–Skriganov nets with `n = 2 d w`.
    ChenSkriganov { base: PrimeBase, d: usize },
    /// Base 2, two dimensions: `C_1` the anti-identity, `C_2` upper
    /// triangular with all entries above the diagonal set.
    BinaryTwoDim,
    /// Caller-provided matrices for each `n`.
    Fixed(Vec<GeneratingMatrices>),
}

impl NetFamily {
    pub fn matrices(&self, n: usize) -> Result<GeneratingMatrices> {
        match self {
            NetFamily::ChenSkriganov { base, d } => {
                if n % (2 * d) != 0 || n == 0 {
                    return Err(Error::InvalidParams(format!("n = {n} is not a positive multiple of 2d")));
                }
                cs_generating_matrices(&CSParams::new(*base, *d, n / (2 * d))?)
            }
            NetFamily::BinaryTwoDim => Ok(binary_two_dim(n)),
            NetFamily::Fixed(list) => list
                .iter()
                .find(|g| g.n == n)
                .cloned()
                .ok_or_else(|| Error::InvalidParams(format!("no matrices for n = {n}"))),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            NetFamily::ChenSkriganov { d, .. } => *d,
            NetFamily::BinaryTwoDim => 2,
            NetFamily::Fixed(list) => list.first().map_or(0, |g| g.d),
        }
    }
}

pub fn binary_two_dim(n: usize) -> GeneratingMatrices {
    let base = PrimeBase::new(2).expect("2 is prime");
    let anti: Vec<Vec<u32>> = (0..n).map(|r| (0..n).map(|c| (r + c + 1 == n) as u32).collect()).collect();
    let upper: Vec<Vec<u32>> = (0..n).map(|r| (0..n).map(|c| (c >= r) as u32).collect()).collect();
    GeneratingMatrices { base, n, d: 2, mats: vec![anti, upper] }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub norm_kind: String,
    pub value: f64,
    pub tail_bound: f64,
    /// `N^{r-1} (ln N)^{(d-1)/q}` for Besov rows, `(ln N)^{(d-1)/2} / N` for L2 rows.
    pub envelope: f64,
    /// Fitted exponent over the rows of this kind so far.
    pub slope_running: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Slope of `ln(||D||_2 N)` against `ln ln N`.
    pub l2_log_slope: Option<f64>,
    /// Slope of `ln ||D||_2` against `ln N`.
    pub l2_power_slope: Option<f64>,
    /// Exponent `s` of the fit `N^2 ||D||_2^2 = beta + alpha (ln N)^{2s}`;
    /// a diagnostic that separates a constant offset from the growth.
    pub l2_offset_exponent: Option<f64>,
    /// Slope of `ln(besov / N^{r-1})` against `ln ln N`.
    pub besov_log_slope: Option<f64>,
    pub degenerate: bool,
    pub notices: Vec<String>,
}

/// Least-squares slope, `None` with fewer than two distinct abscissae.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Best `s` for `y = beta + alpha x^{2s}` over `beta` in `[0, min y)`, with
/// `x = ln N`, `y = N^2 ||D||^2`. Needs three or more sizes.
pub fn offset_exponent(ln_n: &[f64], scaled_sq: &[f64]) -> Option<f64> {
    if ln_n.len() < 3 {
        return None;
    }
    let lx: Vec<f64> = ln_n.iter().map(|x| x.ln()).collect();
    let ymin = scaled_sq.iter().cloned().fold(f64::INFINITY, f64::min);
    // least-squares residual of ln(y - beta) against ln ln N
    let resid = |beta: f64| -> (f64, f64) {
        let ly: Vec<f64> = scaled_sq.iter().map(|y| (y - beta).ln()).collect();
        let slope = ls_slope(&lx, &ly).unwrap_or(0.0);
        let n = lx.len() as f64;
        let icpt = (ly.iter().sum::<f64>() - slope * lx.iter().sum::<f64>()) / n;
        let r = lx.iter().zip(&ly).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
        (r, slope)
    };
    let steps = 4000;
    let (mut best_r, mut best_s) = (f64::INFINITY, None);
    for k in 0..steps {
        let beta = ymin * k as f64 / steps as f64;
        let (r, slope) = resid(beta);
        if r < best_r {
            best_r = r;
            best_s = Some(slope / 2.0);
        }
    }
    best_s
}

/// Besov and L2 rows for each size; sizes that fail are skipped with a notice.
pub fn scaling_table(family: &NetFamily, sizes: &[usize], bp: &BesovParams) -> ScalingTable {
    let mut rows = Vec::new();
    let mut notices = Vec::new();
    let (mut lx, mut ly, mut px, mut py, mut bx, mut by) = (vec![], vec![], vec![], vec![], vec![], vec![]);
    let (mut ox, mut oy) = (vec![], vec![]);
    let d = family.d() as f64;
    for &n in sizes {
        let pts = match family.matrices(n).and_then(|g| generate_points(&g)) {
            Ok(p) => p,
            Err(e) => {
                notices.push(format!("n = {n} skipped: {e}"));
                continue;
            }
        };
        let big_n = pts.len();
        let ln_n = (big_n as f64).ln();
        match warnock_l2(&pts) {
            Ok(l2) => {
                lx.push(ln_n.ln());
                ly.push((l2 * big_n as f64).ln());
                px.push(ln_n);
                py.push(l2.ln());
                ox.push(ln_n);
                oy.push((l2 * big_n as f64).powi(2));
                rows.push(ScalingRow {
                    n,
                    big_n,
                    norm_kind: "l2".into(),
                    value: l2,
                    tail_bound: 0.0,
                    envelope: ln_n.powf((d - 1.0) / 2.0) / big_n as f64,
                    slope_running: ls_slope(&lx, &ly),
                });
            }
            Err(e) => notices.push(format!("n = {n} l2 skipped: {e}")),
        }
        match besov_quasi_norm(&pts, bp, default_cap(&pts)) {
            Ok(rep) => {
                let q_exp = if bp.q.is_infinite() { 0.0 } else { (d - 1.0) / bp.q };
                bx.push(ln_n.ln());
                by.push(rep.value.ln() - (bp.r - 1.0) * ln_n);
                rows.push(ScalingRow {
                    n,
                    big_n,
                    norm_kind: "besov".into(),
                    value: rep.value,
                    tail_bound: rep.tail_bound,
                    envelope: (big_n as f64).powf(bp.r - 1.0) * ln_n.powf(q_exp),
                    slope_running: ls_slope(&bx, &by),
                });
            }
            Err(e) => notices.push(format!("n = {n} besov skipped: {e}")),
        }
    }
    let l2_log_slope = ls_slope(&lx, &ly);
    let degenerate = l2_log_slope.is_none();
    if degenerate {
        notices.push("fewer than two sizes: slope undefined".into());
    }
    ScalingTable {
        rows,
        l2_log_slope,
        l2_power_slope: ls_slope(&px, &py),
        l2_offset_exponent: offset_exponent(&ox, &oy),
        besov_log_slope: ls_slope(&bx, &by),
        degenerate,
        notices,
    }
}

impl ScalingTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,N,norm_kind,value,tail_bound,envelope,slope_running\n");
        for r in &self.rows {
            let slope = r.slope_running.map_or_else(String::new, |s| format!("{s:.6}"));
            out.push_str(&format!(
                "{},{},{},{:.12e},{:.6e},{:.12e},{}\n",
                r.n, r.big_n, r.norm_kind, r.value, r.tail_bound, r.envelope, slope
            ));
        }
        out
    }
}

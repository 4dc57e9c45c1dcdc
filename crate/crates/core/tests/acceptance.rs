//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line.
//! Oracles here are written independently of the library's closed forms.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmcnet::cs::{dual_code, verify_dual_properties, CSParams, CodeSpace};
use qmcnet::haar::{besov_quasi_norm, indicator_coeff, parseval_l2, volume_coeff, BesovParams, HaarIndex};
use qmcnet::harness::{integration_errors, IntegrandSpec};
use qmcnet::net::{box_shapes, char_sum, dual_set, generate_points, is_net, BAdic, GeneratingMatrices, PointSet};
use qmcnet::norms::{coeff_bound_audit, scaling_table, warnock_l2, warnock_l2_squared, NetFamily};
use qmcnet::walsh::{fine_price_coeff, poisson_sides, residual_check, theta, v_gamma_lambda, GroupFunction};
use qmcnet::{cs_point_set, PrimeBase};

fn report(id: &str, pass: bool, detail: String) {
    // bypasses the test harness capture so every line reaches the log
    let line = format!("criterion {id}: {} | {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn base(v: u64) -> PrimeBase {
    PrimeBase::new(v).unwrap()
}

fn cs_instance() -> (CSParams, PointSet) {
    let params = CSParams::new(base(11), 2, 1).unwrap();
    let p = cs_point_set(&params).unwrap();
    (params, p)
}

fn omega(b: u64, e: u64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (e % b) as f64 / b as f64)
}

fn to_f64(x: BAdic, b: u64) -> f64 {
    x.num as f64 / (b as f64).powi(x.exp as i32)
}

#[test]
fn c01_cs_instance_is_net() {
    let start = Instant::now();
    let (_, p) = cs_instance();
    let shapes = box_shapes(4, 2).len();
    let ok = is_net(&p).unwrap().is_net();
    let secs = start.elapsed().as_secs_f64();
    let pass = ok && p.len() == 14641 && shapes == 5 && secs < 30.0;
    report("1", pass, format!("N = {}, shapes = {shapes}, net = {ok}, {secs:.2} s", p.len()));
    assert!(pass);
}

#[test]
fn c02_dual_code_weights() {
    let (params, _) = cs_instance();
    let dual = dual_code(&CodeSpace::chen_skriganov(&params).unwrap());
    let props = verify_dual_properties(&dual, 2, 4).unwrap();
    let pass = props.words == 14640 && props.kappa_min >= 5 && props.delta_min >= 5;
    report(
        "2",
        pass,
        format!("{} nonzero words, kappa_min = {}, delta_min = {}", props.words, props.kappa_min, props.delta_min),
    );
    assert!(pass);
}

/// `h` of one coordinate on the level-`(j+1)` cell `k` of the support;
/// the whole interval with weight 1 for `j = -1`.
fn haar_value(b: u64, j: i32, l: u32, sub: u64) -> Complex64 {
    if j < 0 {
        Complex64::new(1.0, 0.0)
    } else {
        omega(b, l as u64 * sub)
    }
}

/// `int f h` cell by cell on the level-`(j+1)` grid inside the support,
/// for `f` given per cell by `cell_integral(i, lo, hi)`.
fn piecewise_oracle(b: u64, idx: &HaarIndex, cell_integral: &dyn Fn(usize, f64, f64) -> f64) -> Complex64 {
    let d = idx.j.len();
    let per: Vec<u64> = idx.j.iter().map(|&j| if j < 0 { 1 } else { b }).collect();
    let total: u64 = per.iter().product();
    let mut sum = Complex64::new(0.0, 0.0);
    for cell in 0..total {
        let mut c = cell;
        let mut v = Complex64::new(1.0, 0.0);
        for i in 0..d {
            let sub = c % per[i];
            c /= per[i];
            let (lo, hi) = if idx.j[i] < 0 {
                (0.0, 1.0)
            } else {
                let w = (b as f64).powi(-idx.j[i] - 1);
                let left = (b * idx.m[i] + sub) as f64 * w;
                (left, left + w)
            };
            v *= haar_value(b, idx.j[i], idx.l[i], sub) * cell_integral(i, lo, hi);
        }
        sum += v;
    }
    sum
}

fn random_index(rng: &mut ChaCha8Rng, b: u64, d: usize) -> HaarIndex {
    let j: Vec<i32> = (0..d).map(|_| rng.gen_range(-1..=3)).collect();
    let m: Vec<u64> = j.iter().map(|&ji| if ji < 0 { 0 } else { rng.gen_range(0..b.pow(ji as u32)) }).collect();
    let l: Vec<u32> = j.iter().map(|&ji| if ji < 0 { 1 } else { rng.gen_range(1..b as u32) }).collect();
    HaarIndex::new(base(b), j, m, l).unwrap()
}

#[test]
fn c03_haar_lemmas_vs_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut cases, mut worst_vol, mut worst_ind) = (0, 0.0f64, 0.0f64);
    for &b in &[2u64, 3, 5] {
        for _ in 0..100 {
            let d = rng.gen_range(1..=3);
            let idx = random_index(&mut rng, b, d);
            // x_i over [lo, hi): (hi^2 - lo^2) / 2
            let want = piecewise_oracle(b, &idx, &|_, lo, hi| (hi * hi - lo * lo) / 2.0);
            worst_vol = worst_vol.max((volume_coeff(&idx, base(b)) - want).norm());
            // points inside or near the support, including edges
            let z: Vec<BAdic> = (0..d)
                .map(|i| {
                    let exp = rng.gen_range(0..=5u32);
                    let top = b.pow(exp);
                    let num = if idx.j[i] >= 0 && exp > idx.j[i] as u32 && rng.gen_bool(0.8) {
                        let scale = b.pow(exp - idx.j[i] as u32);
                        idx.m[i] * scale + rng.gen_range(0..=scale.min(top - idx.m[i] * scale - 1))
                    } else {
                        rng.gen_range(0..top)
                    };
                    BAdic { num, exp }
                })
                .collect();
            let zf: Vec<f64> = z.iter().map(|&zi| to_f64(zi, b)).collect();
            // chi_{[0,x)}(z) as a function of x is the indicator of (z, 1)
            let want = piecewise_oracle(b, &idx, &|i, lo, hi| (hi - lo.max(zf[i])).max(0.0));
            worst_ind = worst_ind.max((indicator_coeff(&z, &idx, base(b)) - want).norm());
            cases += 1;
        }
    }
    let pass = cases >= 200 && worst_vol <= 1e-12 && worst_ind <= 1e-12;
    report("3", pass, format!("{cases} cases per lemma, max |err| volume = {worst_vol:.2e}, indicator = {worst_ind:.2e}"));
    assert!(pass);
}

/// `int_0^y conj(wal_t(x)) dx` by direct summation over cells on which both
/// the Walsh function and the cut-off are constant.
fn fine_price_oracle(b: u64, t: u64, y: BAdic) -> Complex64 {
    let mut rho = 0u32;
    while b.pow(rho) <= t {
        rho += 1;
    }
    let level = rho.max(y.exp);
    let cells = b.pow(level);
    let upto = y.num * b.pow(level - y.exp);
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..upto {
        // digit a of t (weight b^a) pairs with digit a + 1 of x = k / b^level
        let mut e = 0u64;
        let (mut tt, mut a) = (t, 0u32);
        while tt > 0 {
            let xd = (k / b.pow(level - a - 1)) % b;
            e += (tt % b) * xd;
            tt /= b;
            a += 1;
        }
        s += omega(b, b - e % b);
    }
    s / cells as f64
}

#[test]
fn c04_fine_price_vs_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for &b in &[2u64, 3, 5] {
        for _ in 0..50 {
            let exp = rng.gen_range(0..=5u32);
            let y = BAdic { num: rng.gen_range(0..=b.pow(exp)), exp };
            for t in 0..b.pow(3) {
                let got = fine_price_coeff(t, y, base(b));
                worst = worst.max((got - fine_price_oracle(b, t, y)).norm());
                count += 1;
            }
        }
    }
    let pass = worst <= 1e-12;
    report("4", pass, format!("{count} (t, y) pairs, max |err| = {worst:.2e}"));
    assert!(pass);
}

/// `(1/N) sum_z prod_i b^n |[0, y_i) ∩ cell_n(z_i)| - prod y_i` with
/// integer cell overlaps.
fn theta_oracle(p: &PointSet, y: &[BAdic]) -> f64 {
    let b = p.base.get() as u128;
    let n = p.n;
    let mut total = 0.0;
    for pt in &p.points {
        let mut prod = 1.0;
        for (&yi, &k) in y.iter().zip(&pt.numerators) {
            let e = yi.exp.max(n);
            let scale = b.pow(e - n);
            let ynum = yi.num as u128 * b.pow(e - yi.exp);
            let lo = k as u128 * scale;
            prod *= ynum.saturating_sub(lo).min(scale) as f64 / scale as f64;
        }
        total += prod;
    }
    total / p.len() as f64 - y.iter().map(|&yi| to_f64(yi, p.base.get() as u64)).product::<f64>()
}

fn random_nonsingular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<u32>> {
    let b = base(2);
    loop {
        let m: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..2)).collect()).collect();
        if qmcnet::linalg::rank(b, &m, n) == n {
            return m;
        }
    }
}

#[test]
fn c05_theta_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    let mut worst_def = 0.0f64;
    let mut scaled = Vec::new();
    let mut pairs: Vec<(PointSet, GeneratingMatrices)> = Vec::new();
    for n in 1..=4usize {
        let g1 = qmcnet::norms::binary_two_dim(n);
        let g2 = GeneratingMatrices::new(base(2), n, vec![random_nonsingular(&mut rng, n), random_nonsingular(&mut rng, n)]).unwrap();
        for g in [g1, g2] {
            pairs.push((generate_points(&g).unwrap(), g));
        }
    }
    let (params, cs) = cs_instance();
    pairs.push((cs, qmcnet::cs_generating_matrices(&params).unwrap()));
    for (p, g) in &pairs {
        let dual = dual_set(g).unwrap();
        let b = p.base.get() as u64;
        let ys: Vec<Vec<BAdic>> = (0..100)
            .map(|_| {
                (0..2)
                    .map(|_| {
                        let exp = rng.gen_range(0..=p.n + 2);
                        BAdic { num: rng.gen_range(0..=b.pow(exp)), exp }
                    })
                    .collect()
            })
            .collect();
        for y in &ys {
            let th = theta(p, &dual, y).unwrap();
            let ds: Complex64 = th.dual_sum.into();
            let oracle = theta_oracle(p, y);
            worst = worst.max((ds - th.definition).norm());
            worst_def = worst_def.max((th.definition - oracle).abs());
        }
        scaled.push(residual_check(p, &ys).max_scaled_residual);
    }
    let sup = scaled.iter().cloned().fold(0.0, f64::max);
    let pass = worst <= 1e-12 && worst_def <= 1e-12 && scaled.iter().all(|s| s.is_finite());
    report(
        "5",
        pass,
        format!(
            "{} nets x 100 points, max |dual - def| = {worst:.2e}, def vs oracle {worst_def:.2e}, sup |R| b^n = {sup:.4} (CS {:.4})",
            pairs.len(),
            scaled.last().unwrap()
        ),
    );
    assert!(pass);
}

#[test]
fn c06_parseval_vs_warnock() {
    let (_, cs) = cs_instance();
    let par = parseval_l2(&cs, 8).unwrap();
    let w_sq = qmcnet_ratio(&warnock_l2_squared(&cs).unwrap());
    let gap_cs = (par.value - w_sq).abs();
    let mut pass = gap_cs <= par.tail_bound && gap_cs / w_sq <= 1e-3;
    let mut worst_1d = 0.0f64;
    let sets = [(2u64, 8usize), (3, 5), (5, 3), (7, 2), (11, 2)];
    for &(b, n) in &sets {
        let mut rng = ChaCha8Rng::seed_from_u64(b);
        let g = loop {
            let m: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..b as u32)).collect()).collect();
            if qmcnet::linalg::rank(base(b), &m, n) == n {
                break GeneratingMatrices::new(base(b), n, vec![m]).unwrap();
            }
        };
        let p = generate_points(&g).unwrap();
        let r = parseval_l2(&p, n as u32 + 10).unwrap();
        let w = warnock_l2(&p).unwrap();
        let gap = (r.value - w * w).abs();
        worst_1d = worst_1d.max(gap / (w * w));
        pass &= gap <= r.tail_bound && gap / (w * w) <= 1e-9;
    }
    report(
        "6",
        pass,
        format!(
            "CS cap 8: rel gap {:.2e} (tail {:.2e}); d = 1 sets cap n+10: worst rel gap {worst_1d:.2e}",
            gap_cs / w_sq,
            par.tail_bound
        ),
    );
    assert!(pass);
}

fn qmcnet_ratio(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap()
}

#[test]
fn c07_coefficient_audit() {
    let (_, cs) = cs_instance();
    let rep = coeff_bound_audit(&cs, 8).unwrap();
    let worst_boxes = rep.fine_levels.iter().map(|l| l.boxes).max().unwrap_or(0);
    let consts = [rep.c_full_cube, rep.c_coarse, rep.c_fine, rep.c_point_free];
    let pass = rep.point_free_exceptions == 0
        && rep.point_free_levels > 0
        && !rep.fine_levels.is_empty()
        && rep.fine_levels.iter().all(|l| l.boxes <= 14641)
        && consts.iter().all(|c| c.is_finite());
    report(
        "7",
        pass,
        format!(
            "point-free levels {} with {} exceptions; fine levels {} with max {worst_boxes} exceptional boxes; c_i = {:.4}, c_ii = {:.4}, c_iii = {:.4}",
            rep.point_free_levels,
            rep.point_free_exceptions,
            rep.fine_levels.len(),
            rep.c_full_cube,
            rep.c_coarse,
            rep.c_fine
        ),
    );
    assert!(pass);
}

#[test]
fn c08a_besov_envelope_single_instance() {
    let (_, cs) = cs_instance();
    let bp = BesovParams::new(2.0, 2.0, 0.25).unwrap();
    let rep = besov_quasi_norm(&cs, &bp, 8).unwrap();
    let n = cs.len() as f64;
    let envelope = n.powf(bp.r - 1.0) * n.ln().sqrt();
    let c = (rep.value + rep.tail_bound) / envelope;
    let pass = rep.value > 0.0 && c.is_finite() && rep.value <= c * envelope;
    report("8a", pass, format!("besov(2,2,1/4) = {:.6e} + {:.1e}, C = {c:.4}", rep.value, rep.tail_bound));
    assert!(pass);
}

#[test]
fn c08b_scaling_binary_family() {
    let bp = BesovParams::new(2.0, 2.0, 0.25).unwrap();
    let sizes: Vec<usize> = (4..=14).collect();
    let table = scaling_table(&NetFamily::BinaryTwoDim, &sizes, &bp);
    let power = table.l2_power_slope.unwrap();
    let log_slope = table.l2_log_slope.unwrap();
    let pass = !table.degenerate && (0.4..=0.6).contains(&log_slope);
    report(
        "8b",
        pass,
        format!(
            "ln||D|| vs ln N slope {power:.4}; ln(||D|| N) vs ln ln N slope {log_slope:.4} (want [0.4, 0.6]); offset-corrected exponent {:.4}",
            table.l2_offset_exponent.unwrap_or(f64::NAN)
        ),
    );
    assert!(pass, "slope {log_slope} outside [0.4, 0.6]");
}

/// `wal_t(x)` for one coordinate in base 2, from digits directly.
fn wal2(t: u64, x: u64, n: u32) -> i64 {
    let mut e = 0;
    for a in 0..n {
        e += ((t >> a) & 1) * ((x >> (n - 1 - a)) & 1);
    }
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

fn in_dual(g: &GeneratingMatrices, t: &[u64]) -> bool {
    let (n, b) = (g.n, g.base.get() as u64);
    (0..n).all(|c| {
        let mut s = 0u64;
        for (i, &ti) in t.iter().enumerate() {
            for k in 0..n {
                s += g.mats[i][k][c] as u64 * ((ti / b.pow(k as u32)) % b);
            }
        }
        s % b == 0
    })
}

fn mask_ok(word: &[u32], n: usize, free: &dyn Fn(usize, usize) -> bool) -> bool {
    word.iter().enumerate().all(|(idx, &x)| x == 0 || free(idx / n, idx % n + 1))
}

#[test]
fn c09_group_lemmas() {
    // character sums over all 64 frequencies, for two matrix pairs
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut char_ok = true;
    let mut char_checked = 0;
    for g in [
        qmcnet::norms::binary_two_dim(3),
        GeneratingMatrices::new(base(2), 3, vec![random_nonsingular(&mut rng, 3), random_nonsingular(&mut rng, 3)]).unwrap(),
    ] {
        let p = generate_points(&g).unwrap();
        let dual = dual_set(&g).unwrap();
        for t1 in 0..8u64 {
            for t2 in 0..8u64 {
                let t = [t1, t2];
                let direct: i64 = p.points.iter().map(|pt| wal2(t1, pt.numerators[0], 3) * wal2(t2, pt.numerators[1], 3)).sum();
                let member = in_dual(&g, &t);
                let want = if member { 8 } else { 0 };
                char_ok &= direct == want
                    && char_sum(&p, &t).exact_integer() == Some(want)
                    && (t == [0, 0] || dual.contains(&t) == member);
                char_checked += 1;
            }
        }
    }
    // Poisson summation and the V identity over random subspaces of F_3^4
    let b3 = base(3);
    let mut poisson_worst = 0.0f64;
    let mut v_ok = true;
    let mut v_pairs = 0;
    for trial in 0..12 {
        let k = trial % 5;
        let rows: Vec<Vec<u32>> = (0..k).map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect()).collect();
        let c = CodeSpace::from_rows(b3, 2, 2, &rows).unwrap();
        let table: Vec<(f64, f64)> = (0..81).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let f = GroupFunction::from_fn(b3, 4, |a| {
            let idx: usize = a.iter().rev().fold(0, |acc, &x| acc * 3 + x as usize);
            Complex64::new(table[idx].0, table[idx].1)
        })
        .unwrap();
        let (lhs, rhs) = poisson_sides(&c, &f).unwrap();
        // independent left side: sum f over members found by brute force
        let mut brute = Complex64::new(0.0, 0.0);
        for idx in 0..81u64 {
            let a = b3.digits(idx, 4);
            if c.contains(&a) {
                brute += f.at(&a);
            }
        }
        poisson_worst = poisson_worst.max((lhs - rhs).norm()).max((lhs - brute).norm());
        let dual = dual_code(&c);
        for g1 in 0..=2usize {
            for g2 in 0..=2usize {
                for l1 in 0..=g1 {
                    for l2 in 0..=g2 {
                        let (gamma, lambda) = ([g1, g2], [l1, l2]);
                        let vc = v_gamma_lambda(&c, &gamma, &lambda).unwrap();
                        let v_free = |i: usize, pos: usize| {
                            pos > lambda[i] && pos != gamma[i] && (pos > gamma[i] || lambda[i] < gamma[i])
                        };
                        let vp_free = |i: usize, pos: usize| pos <= lambda[i] || pos == gamma[i];
                        let (mut in_c, mut in_dual_v) = (0u64, 0u64);
                        for idx in 0..81u64 {
                            let a = b3.digits(idx, 4);
                            in_c += (c.contains(&a) && mask_ok(&a, 2, &v_free)) as u64;
                            in_dual_v += (dual.contains(&a) && mask_ok(&a, 2, &vp_free)) as u64;
                        }
                        v_ok &= vc.identity_ok && vc.count_in_c == in_c && vc.count_in_dual == in_dual_v;
                        v_pairs += 1;
                    }
                }
            }
        }
    }
    // counting bound on admissible pairs of the CS code
    let (params, _) = cs_instance();
    let code = CodeSpace::chen_skriganov(&params).unwrap();
    let (n, d) = (4usize, 2usize);
    let mut admissible = 0;
    let mut worst_count = 0u64;
    let mut bound_ok = true;
    for g1 in 0..=n {
        for g2 in 0..=n {
            if g1 + g2 <= n {
                continue;
            }
            for l1 in 0..=g1 {
                for l2 in 0..=g2 {
                    if l1 + l2 + d > n {
                        continue;
                    }
                    let vc = v_gamma_lambda(&code, &[g1, g2], &[l1, l2]).unwrap();
                    admissible += 1;
                    worst_count = worst_count.max(vc.count_in_dual);
                    bound_ok &= vc.bound_ok == Some(true) && vc.count_in_dual <= 121 && vc.identity_ok;
                }
            }
        }
    }
    let pass = char_ok && char_checked == 128 && poisson_worst <= 1e-9 && v_ok && bound_ok && admissible >= 20;
    report(
        "9",
        pass,
        format!(
            "char sums {char_checked} exact = {char_ok}; Poisson max gap {poisson_worst:.2e}; V identity on {v_pairs} pairs = {v_ok}; \
             {admissible} admissible CS pairs, max count {worst_count} <= 121 = {bound_ok}"
        ),
    );
    assert!(pass);
}

#[test]
fn c10_qmc_smoke() {
    let (_, cs) = cs_instance();
    let specs = [
        IntegrandSpec::ProductMonomial { exponents: vec![1, 1] },
        IntegrandSpec::ProductMonomial { exponents: vec![0] },
    ];
    let rows = integration_errors(&cs, &specs);
    let pass = rows[0].abs_error <= 1e-2 && rows[1].abs_error == 0.0;
    report(
        "10",
        pass,
        format!("x1 x2 error {:.3e}; f = 1 error {:e}", rows[0].abs_error, rows[1].abs_error),
    );
    assert!(pass);
}

//! Exact L2 discrepancy, its Parseval expansion, and Besov quasi-norms on
//! the Chen–Skriganov instance.

use qmcnet::haar::{besov_quasi_norm, parseval_l2, BesovParams};
use qmcnet::norms::{disc_eval, warnock_l2};
use qmcnet::{cs_point_set, BAdic, CSParams, PrimeBase};

fn main() -> qmcnet::Result<()> {
    let params = CSParams::new(PrimeBase::new(11)?, 2, 1)?;
    let p = cs_point_set(&params)?;
    let b = params.base;
    let x = [BAdic::new(b, 6, 1)?, BAdic::new(b, 50, 2)?];
    println!("D(6/11, 50/121) = {}", disc_eval(&p, &x));

    let w = warnock_l2(&p)?;
    println!("||D||_2^2 (Warnock) = {:.12e}", w * w);
    for cap in [2, 4, 8] {
        let r = parseval_l2(&p, cap)?;
        println!("Parseval cap {cap}: {:.12e} (+ at most {:.1e})", r.value, r.tail_bound);
    }
    for &(pp, q, r) in &[(2.0, 2.0, 0.25), (1.0, 2.0, 0.5), (f64::INFINITY, f64::INFINITY, 0.0)] {
        let rep = besov_quasi_norm(&p, &BesovParams::new(pp, q, r)?, 6)?;
        println!("{}", rep.to_json());
    }
    Ok(())
}

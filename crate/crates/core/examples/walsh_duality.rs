//! Walsh functions, Fine–Price coefficients, and the dual-sum form of
//! the discrepancy's projection onto the level-n grid.

use qmcnet::net::{dual_set, BAdic};
use qmcnet::walsh::{fine_price_coeff, residual_check, theta, walsh_eval};
use qmcnet::{cs_generating_matrices, generate_points, CSParams, PrimeBase};

fn main() -> qmcnet::Result<()> {
    let b2 = PrimeBase::new(2)?;
    let x = [BAdic::new(b2, 3, 3)?];
    for t in 0..4 {
        println!("wal_{t}(3/8) = {:+.0}", walsh_eval(b2, &[t], &x).re);
    }
    let y = BAdic::new(b2, 3, 2)?;
    for t in 0..4 {
        println!("int_0^(3/4) wal_{t} = {:+.4}", fine_price_coeff(t, y, b2).re);
    }

    let params = CSParams::new(PrimeBase::new(11)?, 2, 1)?;
    let g = cs_generating_matrices(&params)?;
    let p = generate_points(&g)?;
    let dual = dual_set(&g)?;
    let b = params.base;
    let ys = vec![
        vec![BAdic::new(b, 5, 1)?, BAdic::new(b, 7, 2)?],
        vec![BAdic::new(b, 1234, 4)?, BAdic::new(b, 99999, 5)?],
    ];
    for y in &ys {
        let th = theta(&p, &dual, y)?;
        println!(
            "Theta at {:?}: dual sum {:+.3e}{:+.1e}i, definition {:+.3e}",
            y.iter().map(|c| c.to_f64(b)).collect::<Vec<_>>(),
            th.dual_sum.re,
            th.dual_sum.im,
            th.definition
        );
    }
    // a deterministic scatter on the level-(n+1) grid
    let fine: Vec<Vec<BAdic>> = (1..200u64)
        .map(|k| vec![BAdic { num: k * 523 % 161051, exp: 5 }, BAdic { num: k * 7919 % 161051, exp: 5 }])
        .collect();
    let r = residual_check(&p, &fine);
    println!("sup |D - Theta| * b^n on the sample: {:.4}", r.max_scaled_residual);
    Ok(())
}

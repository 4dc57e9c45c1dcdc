//! Empirical constants for the four regimes of Haar coefficient bounds.

use qmcnet::norms::coeff_bound_audit;
use qmcnet::{cs_point_set, CSParams, PrimeBase};

fn main() -> qmcnet::Result<()> {
    let params = CSParams::new(PrimeBase::new(11)?, 2, 1)?;
    let p = cs_point_set(&params)?;
    let rep = coeff_bound_audit(&p, 2 * p.n)?;
    println!("full cube    |mu| b^n          <= {:.4}", rep.c_full_cube);
    println!("|j| <= n     |mu| b^(|j|+n)    <= {:.4}", rep.c_coarse);
    println!("|j| >  n     |mu| b^(|j|+n)    <= {:.4}", rep.c_fine);
    println!("             volume-only b^2|j| <= {:.4}", rep.c_fine_envelope);
    println!("point-free   |mu| b^2|j|       <= {:.4}", rep.c_point_free);
    for lv in &rep.fine_levels {
        println!("  level {:?}: {} boxes exceed the volume magnitude (limit {})", lv.j, lv.boxes, lv.limit);
    }
    println!("{} point-free levels, {} exceptions, pass = {}", rep.point_free_levels, rep.point_free_exceptions, rep.pass);
    Ok(())
}

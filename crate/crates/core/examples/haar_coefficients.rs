//! b-adic Haar coefficients of the volume, the indicator and the local
//! discrepancy, plus one level aggregated over all boxes.

use qmcnet::haar::{discrepancy_coeff, indicator_coeff, level_aggregate, volume_coeff, HaarIndex};
use qmcnet::net::{BAdic, GeneratingMatrices};
use qmcnet::{generate_points, PrimeBase};

fn main() -> qmcnet::Result<()> {
    let b3 = PrimeBase::new(3)?;
    let idx = HaarIndex::new(b3, vec![1, -1], vec![2, 0], vec![1, 1])?;
    println!("index j = {:?}, m = {:?}, l = {:?}", idx.j, idx.m, idx.l);
    println!("  volume    {:.6}", volume_coeff(&idx, b3));
    let z = [BAdic::new(b3, 22, 3)?, BAdic::new(b3, 1, 2)?];
    println!("  indicator {:.6} at z = (22/27, 1/9)", indicator_coeff(&z, &idx, b3));

    let p = generate_points(&GeneratingMatrices::identity(b3, 2, 2))?;
    println!("  discrepancy of a 9-point set {:.6}", discrepancy_coeff(&p, &idx));

    let agg = level_aggregate(&p, &[1, 0])?;
    println!(
        "level (1, 0): {} boxes, {} occupied, {} l-tuples",
        agg.total_boxes,
        agg.occupied.len(),
        agg.ls.len()
    );
    for (k, (m, _)) in agg.occupied.iter().enumerate().take(3) {
        println!("  m = {m:?}: mu = {:.6}", agg.coeff(k, 0));
    }
    // on point-free levels every coefficient is minus the volume coefficient
    let fine = level_aggregate(&p, &[2, 2])?;
    println!("level (2, 2) point-free: occupied = {}, mu = {:.3e}", fine.occupied.len(), -fine.volume[0]);
    Ok(())
}

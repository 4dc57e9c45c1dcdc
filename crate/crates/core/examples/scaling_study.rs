//! Discrepancy norms across a base-2 family of nets of growing size.

use qmcnet::haar::BesovParams;
use qmcnet::norms::{scaling_table, NetFamily};

fn main() -> qmcnet::Result<()> {
    let bp = BesovParams::new(2.0, 2.0, 0.25)?;
    let sizes: Vec<usize> = (4..=14).collect();
    let table = scaling_table(&NetFamily::BinaryTwoDim, &sizes, &bp);
    print!("{}", table.to_csv());
    println!("ln ||D||_2 vs ln N:          {:.4}", table.l2_power_slope.unwrap_or(f64::NAN));
    println!("ln(N ||D||_2) vs ln ln N:    {:.4}", table.l2_log_slope.unwrap_or(f64::NAN));
    println!("offset-corrected exponent:   {:.4}", table.l2_offset_exponent.unwrap_or(f64::NAN));
    for row in table.rows.iter().filter(|r| r.norm_kind == "l2") {
        println!("n = {:2}: N^2 ||D||^2 = {:.4}", row.n, (row.value * row.big_n as f64).powi(2));
    }
    Ok(())
}

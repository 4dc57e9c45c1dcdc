//! Quasi-Monte Carlo integration error on the Chen–Skriganov instance.

use qmcnet::harness::{integration_errors, IntegrandSpec};
use qmcnet::{cs_point_set, CSParams, PrimeBase};

fn main() -> qmcnet::Result<()> {
    let p = cs_point_set(&CSParams::new(PrimeBase::new(11)?, 2, 1)?)?;
    let mut specs = vec![
        IntegrandSpec::ProductMonomial { exponents: vec![0] },
        IntegrandSpec::ProductMonomial { exponents: vec![1, 1] },
        IntegrandSpec::TensorSpline { c: 0.25, k: 2 },
    ];
    specs.extend([0.5, 1.0, 1.5, 2.5, 3.5].map(|c| IntegrandSpec::ProductCosine { c }));
    for row in integration_errors(&p, &specs) {
        println!("{:24} exact {:+.10}  qmc {:+.10}  err {:.3e}", row.integrand, row.exact, row.estimate, row.abs_error);
    }
    Ok(())
}

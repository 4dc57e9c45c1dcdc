//! The Chen–Skriganov construction for d = 2, b = 11, w = 1: 14641 points,
//! the net property, and the weights of the dual code.

use std::time::Instant;

use qmcnet::cs::{cs_generating_matrices, dual_code, encode_poly, verify_dual_properties, word_weights, CSParams, CodeSpace};
use qmcnet::field::Polynomial;
use qmcnet::net::{generate_points, is_net};
use qmcnet::PrimeBase;

fn main() -> qmcnet::Result<()> {
    let params = CSParams::new(PrimeBase::new(11)?, 2, 1)?;
    println!("params: {}", params.to_json());

    let f = Polynomial::new(params.base, &[3, 1, 4, 1]);
    let word = encode_poly(&f, &params)?;
    println!("encode({f}) = {:?}  weights {:?}", word.blocks, word_weights(&word));

    let start = Instant::now();
    let g = cs_generating_matrices(&params)?;
    let p = generate_points(&g)?;
    let net = is_net(&p)?.is_net();
    println!("N = {}, (0, 4, 2)-net: {net}, {:.2?}", p.len(), start.elapsed());

    let code = CodeSpace::chen_skriganov(&params)?;
    let dual = dual_code(&code);
    println!("dim C = {}, dim C^perp = {}", code.dim(), dual.dim());
    let props = verify_dual_properties(&dual, params.d, params.n())?;
    println!(
        "over {} dual words: kappa_min = {} (need >= {}), delta_min = {} (need > {})",
        props.words,
        props.kappa_min,
        2 * params.d + 1,
        props.delta_min,
        params.n()
    );
    Ok(())
}

//! Prime-field arithmetic, polynomials and Hasse derivatives over F_11.

use qmcnet::field::{field_arith, lucas_binomial, FieldOp, Polynomial, PrimeBase};

fn main() -> qmcnet::Result<()> {
    let f11 = PrimeBase::new(11)?;
    let (a, c) = (f11.elem(7), f11.elem(5));
    println!("7 + 5 = {}", field_arith(a, FieldOp::Add, c)?);
    println!("7 * 5 = {}", field_arith(a, FieldOp::Mul, c)?);
    println!("7^-1  = {}", field_arith(a, FieldOp::Inv, a)?);
    println!("C(12, 3) mod 11 = {}", lucas_binomial(12, 3, f11));

    // f(z) = 1 + 2z + 3z^2 + z^5
    let f = Polynomial::new(f11, &[1, 2, 3, 0, 0, 1]);
    println!("f = {f}");
    for lambda in 0..4 {
        let g = f.hasse_derivative(lambda);
        println!("  D^{lambda} f = {g},  (D^{lambda} f)(2) = {}", g.eval(f11.elem(2))?);
    }
    // Hasse derivatives survive characteristic p where ordinary ones vanish
    let z11 = Polynomial::monomial(f11, 11, 1);
    println!("D^11 z^11 = {} (ordinary 11th derivative is 11! = 0)", z11.hasse_derivative(11));

    match PrimeBase::new(12) {
        Ok(_) => unreachable!(),
        Err(e) => println!("PrimeBase::new(12): {e}"),
    }
    Ok(())
}

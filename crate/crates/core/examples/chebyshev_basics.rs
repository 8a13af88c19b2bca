//! Chebyshev-basis polynomials: evaluation, arithmetic, derivatives and grid norms.

use robustpoly::cheb::{norm_1, norm_inf};
use robustpoly::{cheb_eval, poly_lincomb, ChebPoly, GridSpec};

fn main() {
    // T_3(x) = 4x^3 - 3x
    for x in [-1.0, -0.5, 0.0, 0.3, 1.0] {
        println!("T_3({x:5.2}) = {:8.5}", cheb_eval(3, x));
    }

    let p = ChebPoly::from_monomial(&[0.5, -1.0, 0.0, 2.0]);
    let q = ChebPoly::basis(4);
    println!("p in the Chebyshev basis: {:?}", p.coeffs());
    println!("p back to monomials:      {:?}", p.to_monomial());

    let r = poly_lincomb(2.0, &p, -0.5, &q);
    println!(
        "2p - q/2 has degree {} and value {:.6} at 0.7",
        r.degree(),
        r.eval(0.7)
    );
    println!("p' = {:?}", p.derivative().coeffs());
    println!("p * q has degree {}", p.mul(&q).degree());
    println!("p(x/2 + 1/2) = {:?}", p.compose_affine(0.5, 0.5).coeffs());

    let coarse = robustpoly::norm_inf_grid(&p, &GridSpec::chebyshev(64));
    println!(
        "||p||_inf: grid(64) {coarse:.6}, default {:.6}",
        norm_inf(&p)
    );
    println!("||p||_1:   {:.6}", norm_1(&p));
}

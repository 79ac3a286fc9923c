//! Exponent bookkeeping for a few `(n, p, q)` triples.

use tracelab::exponents::{interpolation_exponents, ExponentSet, LebesgueExponent};

fn main() -> tracelab::Result<()> {
    for (n, p, q) in [(3, 2.0, 8.0), (3, 2.0, 12.0), (2, 1.5, 8.0)] {
        let e = ExponentSet::new(n, p, q)?;
        let (q, r, beta) = e.finite_triplet()?;
        let gn = interpolation_exponents(n, p, q)?;
        println!(
            "n={n} p={p} q={q}: p*={} p̄={} r={r} β={beta} (q-β={}) GN endpoint={} interpolation={}",
            e.p_star,
            e.p_bar,
            q - beta,
            gn.p_max,
            gn.r_tilde
        );
    }
    let bounded = ExponentSet::new(3, 2.0, LebesgueExponent::Infinite)?;
    println!("q = inf gives r = {:?}, no truncation exponent: {:?}", bounded.r, bounded.beta);
    Ok(())
}

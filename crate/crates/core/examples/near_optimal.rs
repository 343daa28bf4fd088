//! The photon-counting protocol: optimised amplitudes, its shortfall against
//! the bound, and the outcomes that carry most of the weight.

use coherent_entanglement::bound::{optimal_concurrence, ChannelSpec};
use coherent_entanglement::entanglement::Monotone;
use coherent_entanglement::protocol::{optimize_near_optimal, top_outcomes};

fn main() -> coherent_entanglement::Result<()> {
    let ch = ChannelSpec::new((-1.0f64).exp())?;
    let mono = Monotone::Concurrence;
    for &p in &[1e-3, 0.05, 0.2, 0.5, 0.8] {
        let r = optimize_near_optimal(p, &ch, 0.01, &mono)?;
        let bound = optimal_concurrence(p, &ch)?;
        println!(
            "p_s {p:<6} alpha {:9.3} beta {:9.3}  E = {:.6}  bound {:.6}  ({:.2e} short)",
            r.params.alpha,
            r.params.beta,
            r.e_bar,
            bound,
            1.0 - r.e_bar / bound
        );
    }

    let r = optimize_near_optimal(0.5, &ch, 0.01, &mono)?;
    println!("\nlikeliest heralds at p_s = 0.5:");
    for o in top_outcomes(&r.params, &mono, 6)? {
        println!("  (m, n) = ({}, {})  P = {:.5}  C = {:.5}", o.m, o.n, o.probability, o.concurrence);
    }

    // the same search under entanglement of formation
    let eof = optimize_near_optimal(0.5, &ch, 0.01, &Monotone::EntanglementOfFormation)?;
    println!("\nEoF-optimised at p_s = 0.5: E = {:.6}", eof.e_bar);
    Ok(())
}

//! Brute-force photon-number simulation of the optical chain, checked against
//! the closed forms on the standard grid.

use std::time::Instant;

use coherent_entanglement::bound::ChannelSpec;
use coherent_entanglement::oracle::{commutation_discrepancy, verify_standard_grid, DEFAULT_ORACLE_TOL};
use coherent_entanglement::protocol::ProtocolParams;

fn main() -> coherent_entanglement::Result<()> {
    let start = Instant::now();
    let checks = verify_standard_grid(None)?;
    println!("{:>5} {:>5} {:>6} {:>4} {:>5} {:>10} {:>10} {:>10} {:>10} {:>10}", "alpha", "beta", "theta", "T", "nmax", "p_s", "dP_s", "dC_qnd", "dP_mn", "dC_mn");
    for c in &checks {
        println!(
            "{:5.2} {:5.2} {:6.3} {:4.1} {:5} {:10.6} {:10.1e} {:10.1e} {:10.1e} {:10.1e}",
            c.alpha, c.beta, c.theta, c.t, c.nmax, c.p_s, c.p_s_error, c.qnd_concurrence_error, c.outcome_probability_error, c.outcome_concurrence_error
        );
    }
    let worst = checks.iter().map(|c| c.max_discrepancy()).fold(0.0, f64::max);
    println!("worst discrepancy {worst:.2e} (tolerance {DEFAULT_ORACLE_TOL:.0e}) in {:.1?}", start.elapsed());

    let p = ProtocolParams::new(0.8, 1.3, 0.2, ChannelSpec::new(0.7)?)?;
    println!("trace-then-Bob vs Bob-then-trace: {:.2e}", commutation_discrepancy(&p, None)?);
    Ok(())
}

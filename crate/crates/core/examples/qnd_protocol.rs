//! Calibrating the QND-heralded protocol so it sits exactly on the bound.

use coherent_entanglement::bound::{optimal_concurrence, ChannelSpec};
use coherent_entanglement::protocol::{branch_amplitudes, calibrate_optimal, qnd_concurrence, success_probability};

fn main() -> coherent_entanglement::Result<()> {
    let ch = ChannelSpec::new((-2.0f64).exp())?;
    let theta = 0.01;
    println!("{:>5} {:>10} {:>10} {:>8} {:>10} {:>10}", "p_s", "alpha", "beta", "u_alpha", "C", "bound");
    for &p in &[0.01, 0.1, 0.3, 0.5, 0.7, 0.9] {
        let params = calibrate_optimal(p, &ch, theta)?;
        let b = branch_amplitudes(&params);
        assert!((success_probability(&params) - p).abs() < 1e-12);
        println!(
            "{p:5.2} {:10.4} {:10.4} {:8.5} {:10.8} {:10.8}",
            params.alpha,
            params.beta,
            b.u_alpha,
            qnd_concurrence(&params)?,
            optimal_concurrence(p, &ch)?
        );
    }
    Ok(())
}

//! Random local filters on a dephased pure state never beat the Bob-only
//! filtering bound.

use coherent_entanglement::entanglement::PhaseFlipChannel;
use coherent_entanglement::proposition::{c_max, montecarlo_filter_audit, optimal_filter, phase_flipped_state, FilterScenario};

fn main() -> coherent_entanglement::Result<()> {
    let (l0, f) = (0.8, 0.75);
    let sc = FilterScenario::phase_flipped(l0, f)?;
    let input = phase_flipped_state(l0, &PhaseFlipChannel::new(f)?)?;

    for &p in &[0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0] {
        let (w0, w1) = optimal_filter(p, &sc)?;
        println!("p_s {p:.1}: C_max {:.6}  Bob filter diag({w0:.4}, {w1:.4})", c_max(p, &sc)?);
    }

    for seed in 0..3 {
        let r = montecarlo_filter_audit(&sc, &input, 20_000, seed)?;
        println!("seed {seed}: worst p_s C - p_s C_max = {:.3e} at p_s = {:.4}", r.max_violation, r.worst.0);
    }
    Ok(())
}

//! Concurrence of pure and mixed two-qubit states, phase-flip damage, and the
//! entanglement of formation.

use coherent_entanglement::entanglement::{
    apply_phase_flip, concurrence_pure, concurrence_wootters, monotone_value, schmidt_coefficients, Monotone,
    PhaseFlipChannel, TwoQubitDensity,
};
use coherent_entanglement::linalg::C64;

fn main() -> coherent_entanglement::Result<()> {
    let (a, b) = (0.8f64.sqrt(), 0.2f64.sqrt());
    let psi = [C64::new(a, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(b, 0.0)];
    let (l0, l1) = schmidt_coefficients(&psi)?;
    let rho = TwoQubitDensity::from_pure(&psi)?;
    println!("Schmidt ({l0:.3}, {l1:.3}): pure formula {:.6}, Wootters {:.6}", concurrence_pure(l0, l1)?, concurrence_wootters(&rho));

    for &f in &[1.0, 0.9, 0.75, 0.5] {
        let out = apply_phase_flip(&rho, &PhaseFlipChannel::new(f)?);
        let c = concurrence_wootters(&out);
        println!("f = {f:.2}: C = {c:.6}  EoF = {:.6}", monotone_value(&Monotone::EntanglementOfFormation, c)?);
    }
    Ok(())
}

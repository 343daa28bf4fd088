//! Both curves on one grid, written in the CSV layout the plotting script reads.

use std::io::Write;

use coherent_entanglement::bound::{optimal_bound_curve, ChannelSpec};
use coherent_entanglement::cli::curve_csv;
use coherent_entanglement::entanglement::Monotone;
use coherent_entanglement::protocol::near_optimal_curve;

fn main() -> coherent_entanglement::Result<()> {
    let ch = ChannelSpec::new((-2.0f64).exp())?;
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 / 21.0).collect();
    let mono = Monotone::Concurrence;
    let mut pts: Vec<_> = optimal_bound_curve(&ch, &grid, &mono)?.into_iter().map(|p| p.with_label("theta", 0.01)).collect();
    pts.extend(near_optimal_curve(&ch, 0.01, &grid, &mono)?);
    std::io::stdout().write_all(curve_csv(&pts).as_bytes()).expect("stdout");
    Ok(())
}

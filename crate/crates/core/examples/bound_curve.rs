//! The optimal bound on average concurrence versus success probability, for a
//! few fibre lengths.

use coherent_entanglement::bound::{optimal_concurrence, u_star, ChannelSpec, DEFAULT_L0_KM};

fn main() -> coherent_entanglement::Result<()> {
    let lengths = [0.0, 10.0, 25.0, 50.0, 100.0];
    print!("{:>6}", "p_s");
    for l in lengths {
        print!("  {:>9}", format!("{l} km"));
    }
    println!();
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        print!("{p:6.2}");
        for l in lengths {
            let ch = ChannelSpec::from_length(l, DEFAULT_L0_KM)?;
            print!("  {:9.6}", optimal_concurrence(p, &ch)?);
        }
        println!();
    }

    let ch = ChannelSpec::new(0.5)?;
    println!("T = 0.5, p_s = 0.5: u* = {}, C = {:.10}", u_star(0.5, &ch)?, optimal_concurrence(0.5, &ch)?);
    Ok(())
}

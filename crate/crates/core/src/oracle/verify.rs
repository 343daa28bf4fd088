//! Oracle against closed forms, point by point and over the standard grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::{qnd_project_and_measure, run_optical_chain, standard_grid, verify_virtual_reduction, OracleReport};
use crate::entanglement::overlap_power;
use crate::error::Result;
use crate::protocol::{branch_amplitudes, outcome_concurrence, outcome_probability, qnd_concurrence, success_probability, ProtocolParams};

/// Outcomes lighter than this are not compared on concurrence.
pub const OUTCOME_FLOOR: f64 = 1e-12;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-8;

/// Largest deviations found at one parameter point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointCheck {
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub nmax: usize,
    pub p_s: f64,
    pub p_s_error: f64,
    pub qnd_concurrence_error: f64,
    pub outcome_probability_error: f64,
    pub outcome_concurrence_error: f64,
    /// `|p_s + sum_n P_nn - 1|` from the oracle.
    pub completeness_error: f64,
    pub f_measured: f64,
    pub f_error: f64,
    pub virtual_discrepancy: f64,
    pub outcomes_compared: usize,
}

impl PointCheck {
    /// Largest closed-form deviation at this point.
    pub fn max_discrepancy(&self) -> f64 {
        [
            self.p_s_error,
            self.qnd_concurrence_error,
            self.outcome_probability_error,
            self.outcome_concurrence_error,
            self.completeness_error,
            self.f_error,
            self.virtual_discrepancy,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Runs the oracle at `p` and measures it against every closed form.
pub fn check_point(p: &ProtocolParams, nmax: Option<usize>) -> Result<(PointCheck, OracleReport)> {
    let state = run_optical_chain(p, nmax)?;
    let mut report = qnd_project_and_measure(&state)?;
    let ch = p.channel;
    let b = branch_amplitudes(p);

    let p_s = success_probability(p);
    let qnd_err = match report.qnd_concurrence {
        Some(c) => (c - qnd_concurrence(p)?).abs(),
        None => 0.0,
    };
    let mut prob_err: f64 = 0.0;
    let mut conc_err: f64 = 0.0;
    let mut compared = 0;
    for o in &report.outcomes {
        prob_err = prob_err.max((o.probability - outcome_probability(&b, o.m, o.n)).abs());
        if o.probability > OUTCOME_FLOOR {
            let c = outcome_concurrence(&b, &ch, o.m, o.n)?;
            conc_err = conc_err.max((o.concurrence - c).abs());
            compared += 1;
        }
    }

    let virt = verify_virtual_reduction(p, Some(state.nmax))?;
    let f_expected = 0.5 * (1.0 + overlap_power(b.u_alpha, ch.transmittance()));
    let check = PointCheck {
        alpha: p.alpha,
        beta: p.beta,
        theta: p.theta,
        t: ch.transmittance(),
        nmax: state.nmax,
        p_s: report.p_s,
        p_s_error: (report.p_s - p_s).abs(),
        qnd_concurrence_error: qnd_err,
        outcome_probability_error: prob_err,
        outcome_concurrence_error: conc_err,
        completeness_error: (report.p_s + report.diagonal_mass - 1.0).abs(),
        f_measured: virt.f_measured,
        f_error: (virt.f_measured - f_expected).abs(),
        virtual_discrepancy: virt.discrepancy,
        outcomes_compared: compared,
    };
    report.phase_flip_f = Some(virt.f_measured);
    report.max_discrepancy = Some(check.max_discrepancy());
    Ok((check, report))
}

/// Every point of [`standard_grid`], evaluated in parallel.
pub fn verify_standard_grid(nmax: Option<usize>) -> Result<Vec<PointCheck>> {
    standard_grid().par_iter().map(|p| check_point(p, nmax).map(|(c, _)| c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::ChannelSpec;

    #[test]
    fn reference_point_at_nmax_40() {
        let p = ProtocolParams::new(0.8, 1.3, 0.2, ChannelSpec::new(0.7).unwrap()).unwrap();
        let (c, report) = check_point(&p, Some(40)).unwrap();
        assert!(c.p_s_error < 1e-8, "{c:?}");
        assert!(c.qnd_concurrence_error < 1e-8, "{c:?}");
        let b = branch_amplitudes(&p);
        let o10 = report.outcomes.iter().find(|o| o.m == 1 && o.n == 0).unwrap();
        assert!((o10.probability - outcome_probability(&b, 1, 0)).abs() < 1e-8);
        assert!((o10.concurrence - outcome_concurrence(&b, &p.channel, 1, 0).unwrap()).abs() < 1e-8);
        assert!(c.max_discrepancy() < 1e-8, "{c:?}");
    }
}

//! Brute-force photon-number-basis simulation of both protocols, independent
//! of the closed forms it is used to check.

pub mod chain;
pub mod fock;
pub mod verify;

pub use chain::{
    commutation_discrepancy, default_nmax, qnd_project_and_measure, run_optical_chain, standard_grid,
    verify_virtual_reduction, OpticalState, OracleReport, VirtualCheck,
};
pub use fock::{coherent_fock, displacement_matrix, required_nmax, FockRegister};
pub use verify::{check_point, verify_standard_grid, PointCheck, DEFAULT_ORACLE_TOL};

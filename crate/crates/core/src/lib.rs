//! Numerical laboratory for effective one-particle evolution equations
//! (Hartree, semi-relativistic Hartree, Gross-Pitaevskii), the zero-energy
//! scattering machinery that fixes the Gross-Pitaevskii coupling, and an
//! exact small-N boson simulator with reduced-density-matrix extraction.

pub mod grid;
pub mod onebody;
pub mod scattering;

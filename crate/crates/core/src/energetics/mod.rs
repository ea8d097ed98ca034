//! Energies of the reduced wave maps, ADM and AV masses, and the equivariant
//! Hamiltonian constraint.

mod adm;
mod constraint;
mod cutoff;
mod stress;

pub use adm::{adm_mass, adm_mass_with, AdmOptions, AdmResult};
pub use constraint::{
    amplitude_sweep, critical_amplitude, mass_identities, solve_constraint, ConstraintOptions,
    ConstraintSolution, ConstraintStatus, EquivariantData, MassIdentities, Profile,
    ProfileValues, SweepPoint,
};
pub use cutoff::{
    divergence_fit, energy_cutoff, energy_cutoff_series, CutoffOptions, EnergyReport, EnergySample, FitThresholds,
    Verdict,
};
pub use stress::{
    lapse, reduced_energy_density, stress_energy, t_nn, EnergyDensity, WaveMapField,
};

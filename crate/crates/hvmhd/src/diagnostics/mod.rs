//! Measurements on states and histories: energies and their exchange
//! rates, conserved totals, moment bounds and weak-form residuals.

mod audit;
mod bounds;
mod energy;
mod weak;

pub use audit::{energy_exchange_audit, AuditFrame, AuditReport};
pub use bounds::{
    ensemble_bound_report, moment_bound_constant, moment_bound_report, BoundReport, BOUND_TOLERANCE,
};
pub use energy::{
    conserved_quantities, conversion_rates, conversion_rates_with, diagnostics_row, particle_exchange_rate,
    total_energy, DiagnosticsRow, EnergyReport, EnergyTracker,
};
pub use weak::{
    weak_residual, ScalarTest, SpaceFactor, TestSuite, VectorTest, VelocityFactor, WeakEquation, WeakResidualRow,
};

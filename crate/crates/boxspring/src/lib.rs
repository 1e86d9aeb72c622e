//! Energy bookkeeping for a pair of spring-suspended boxes exchanging
//! liquid drop by drop, and for the matching two-capacitor circuit.
//!
//! A full box on a spring stores `M²g²/(2k)`; after half of its liquid has
//! dripped into an identical, initially empty box, the two springs together
//! store only half of that. The [`transfer`] module runs the exchange one
//! drop at a time and keeps an exact ledger showing where the other half
//! goes: every equilibrium hop's elastic change equals the gravity work on
//! the moved box minus a fixed `½kq²` settling loss, and the ledger closes
//! to rounding error at every step and in total.
//!
//! The same arithmetic, with charge in place of weight and capacitance in
//! place of stiffness, is the classic two-capacitor circuit; [`capacitor`]
//! carries the parameter map in both directions and the RC transient that
//! produces the missing `Q₀²/(4C)` as heat for any non-zero resistance.
//!
//! Modules:
//! - [`model`] — parameter types and every closed form (exact and the
//!   first-order large-`N` series totals);
//! - [`transfer`] — the per-drop ledger, its audit, and the
//!   approximation-error sweep;
//! - [`capacitor`] — circuit energies, closed-form and fixed-step
//!   fourth-order transients, and the mechanical↔electrical map;
//! - [`numeric`] — compensated summation and a log-log slope fit.

pub mod capacitor;
pub mod error;
pub mod model;
pub mod numeric;
pub mod transfer;

pub use capacitor::{
    analogy_energy_residual, capacitor_energy_breakdown, electrical_to_mechanical,
    mechanical_to_electrical, rc_total_dissipation, rc_transient_closed_form, rc_transient_numeric,
    write_series_csv, AnalogyMap, CapacitorCircuit, TransientPoint, TransientSample,
    SERIES_CSV_HEADER,
};
pub use error::{Error, Result};
pub use model::{
    delta1_paper_sum, delta2_paper_sum, elastic_energy, energy_breakdown, equilibrium_position,
    photon_drop_mass, EnergyBreakdown, EnergyDomain, MassSource, SpringBoxParams, TransferPlan,
    MAX_DROP_COUNT, SPEED_OF_LIGHT,
};
pub use transfer::{
    audit_ledger, convergence_sweep, simulate_transfer, simulate_transfer_with_limit, sweep_row,
    validate_sweep_counts, write_records_csv, write_sweep_csv, AuditCheck, AuditReport, BoxId,
    StepRecord, SweepRow, TransferSummary, AUDIT_REL_TOL, DEFAULT_RECORD_LIMIT, RECORDS_CSV_HEADER,
    SWEEP_CSV_HEADER,
};

//! The electrical counterpart: two identical capacitors sharing a charge.
//!
//! Closing the switch between a charged and an uncharged capacitor of the
//! same capacitance ends with the charge split evenly and only half of the
//! initial field energy left, whatever the series resistance was — the
//! transient current dissipates exactly `Q₀²/(4C)` for every `R > 0`. That
//! is the same bookkeeping as the box pair: map charge to weight (`Q ↔ Mg`)
//! and capacitance to stiffness (`C ↔ k`) and the stored energies
//! `Q²/(2C)` and `(Mg)²/(2k)` coincide, voltage playing the role of the
//! spring displacement.
//!
//! The ideal `R = 0` circuit is represented by its endpoint energies only;
//! the transient is available in closed form and as a fixed-step
//! fourth-order integration for any `R > 0`.

use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{EnergyBreakdown, EnergyDomain, SpringBoxParams};

/// Two identical capacitors of capacitance `C` each, all of the charge
/// `Q₀` initially on the first, joined through a series resistance
/// `R ≥ 0` (`0` means the ideal circuit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacitorCircuit {
    capacitance: f64,
    initial_charge: f64,
    resistance: f64,
}

impl CapacitorCircuit {
    pub fn new(capacitance: f64, initial_charge: f64, resistance: f64) -> Result<Self> {
        for (name, value) in [
            ("capacitance", capacitance),
            ("initial_charge", initial_charge),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidParam(format!(
                    "{name} must be a positive finite number, got {value}"
                )));
            }
        }
        if !resistance.is_finite() || resistance < 0.0 {
            return Err(Error::InvalidParam(format!(
                "resistance must be a non-negative finite number, got {resistance}"
            )));
        }
        Ok(Self {
            capacitance,
            initial_charge,
            resistance,
        })
    }

    /// Ideal circuit with no series resistance.
    pub fn ideal(capacitance: f64, initial_charge: f64) -> Result<Self> {
        Self::new(capacitance, initial_charge, 0.0)
    }

    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }

    pub fn initial_charge(&self) -> f64 {
        self.initial_charge
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    /// Relaxation time of the charge imbalance, `τ = R C / 2`; the ideal
    /// circuit has no transient and is rejected.
    pub fn time_constant(&self) -> Result<f64> {
        if self.resistance == 0.0 {
            return Err(Error::InvalidParam(
                "ideal circuit (R = 0) has no transient; use capacitor_energy_breakdown".into(),
            ));
        }
        Ok(0.5 * self.resistance * self.capacitance)
    }
}

/// Endpoint energies of the charge transfer: `Q₀²/(2C)` initially, a
/// quarter of that per capacitor at the end (the charge splits evenly and
/// equal voltage fixes the endpoint regardless of `R`).
pub fn capacitor_energy_breakdown(circuit: &CapacitorCircuit) -> EnergyBreakdown {
    let q0 = circuit.initial_charge;
    let initial = q0 * q0 / (2.0 * circuit.capacitance);
    EnergyBreakdown::from_initial(EnergyDomain::Electrical, initial)
}

/// Total energy turned into heat over the whole transient, `Q₀²/(4C)`;
/// independent of the resistance.
pub fn rc_total_dissipation(circuit: &CapacitorCircuit) -> f64 {
    let q0 = circuit.initial_charge;
    q0 * q0 / (4.0 * circuit.capacitance)
}

/// Charges and instantaneous dissipated power at one instant of the
/// closed-form transient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransientPoint {
    pub q1: f64,
    pub q2: f64,
    pub power_dissipated: f64,
}

/// Closed-form transient: `q1(t) = Q₀/2·(1 + e^(−t/τ))`,
/// `q2(t) = Q₀/2·(1 − e^(−t/τ))` with `τ = RC/2`, and `P = I²R` with
/// `I = (q1/C − q2/C)/R`. Requires `R > 0` and `t ≥ 0`.
pub fn rc_transient_closed_form(circuit: &CapacitorCircuit, t: f64) -> Result<TransientPoint> {
    let tau = circuit.time_constant()?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidParam(format!(
            "t must be a non-negative finite time, got {t}"
        )));
    }
    let decay = (-t / tau).exp();
    let half = 0.5 * circuit.initial_charge;
    let q1 = half * (1.0 + decay);
    let q2 = half * (1.0 - decay);
    let current = (q1 / circuit.capacitance - q2 / circuit.capacitance) / circuit.resistance;
    Ok(TransientPoint {
        q1,
        q2,
        power_dissipated: current * current * circuit.resistance,
    })
}

/// One sample of the numerically integrated transient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransientSample {
    pub t: f64,
    pub q1: f64,
    pub q2: f64,
    /// Heat produced up to `t`, integrated with the same quadrature order
    /// as the charges; converges to `Q₀²/(4C)`.
    pub cumulative_dissipated: f64,
}

/// Guard against runaway sample counts from a tiny step over a huge horizon.
pub const MAX_TRANSIENT_STEPS: u64 = 50_000_000;

/// Fixed-step classic fourth-order integration of
/// `dq1/dt = −I`, `dq2/dt = +I`, `I = (q1/C − q2/C)/R`, with the heat
/// `∫ I²R dt` carried as a third state variable. Steps are uniform so two
/// runs with the same arguments are bit-identical.
///
/// Requires `R > 0`, `0 < step ≤ τ/50` and `horizon ≥ 10 τ`; the series is
/// sampled at every step from `t = 0` to the first multiple of `step` at
/// or beyond `horizon`.
pub fn rc_transient_numeric(
    circuit: &CapacitorCircuit,
    step: f64,
    horizon: f64,
) -> Result<Vec<TransientSample>> {
    let tau = circuit.time_constant()?;
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "step must be a positive finite time, got {step}"
        )));
    }
    if step > tau / 50.0 {
        return Err(Error::InvalidParam(format!(
            "step must not exceed tau/50 = {} s, got {step}",
            tau / 50.0
        )));
    }
    if !horizon.is_finite() || horizon < 10.0 * tau {
        return Err(Error::InvalidParam(format!(
            "horizon must be at least 10*tau = {} s, got {horizon}",
            10.0 * tau
        )));
    }
    let steps = (horizon / step).ceil() as u64;
    if steps > MAX_TRANSIENT_STEPS {
        return Err(Error::InvalidParam(format!(
            "step/horizon combination needs {steps} samples, above the supported {MAX_TRANSIENT_STEPS}"
        )));
    }

    let r = circuit.resistance;
    let c = circuit.capacitance;
    let derivative = |q1: f64, q2: f64| {
        let current = (q1 / c - q2 / c) / r;
        (-current, current, current * current * r)
    };

    let mut q1 = circuit.initial_charge;
    let mut q2 = 0.0f64;
    let mut heat = 0.0f64;
    let mut series = Vec::with_capacity(steps as usize + 1);
    series.push(TransientSample {
        t: 0.0,
        q1,
        q2,
        cumulative_dissipated: 0.0,
    });
    for i in 1..=steps {
        let (a1, a2, a3) = derivative(q1, q2);
        let (b1, b2, b3) = derivative(q1 + 0.5 * step * a1, q2 + 0.5 * step * a2);
        let (c1, c2, c3) = derivative(q1 + 0.5 * step * b1, q2 + 0.5 * step * b2);
        let (d1, d2, d3) = derivative(q1 + step * c1, q2 + step * c2);
        let sixth = step / 6.0;
        q1 += sixth * (a1 + 2.0 * b1 + 2.0 * c1 + d1);
        q2 += sixth * (a2 + 2.0 * b2 + 2.0 * c2 + d2);
        heat += sixth * (a3 + 2.0 * b3 + 2.0 * c3 + d3);
        series.push(TransientSample {
            t: i as f64 * step,
            q1,
            q2,
            cumulative_dissipated: heat,
        });
    }
    Ok(series)
}

/// Map a box-spring system onto its ideal circuit: `Q₀ = M g`, `C = k`,
/// `R = 0`. The stored energies agree by construction.
pub fn mechanical_to_electrical(params: &SpringBoxParams) -> CapacitorCircuit {
    CapacitorCircuit {
        capacitance: params.stiffness(),
        initial_charge: params.weight(),
        resistance: 0.0,
    }
}

/// Inverse of [`mechanical_to_electrical`] at a given gravity:
/// `M = Q₀ / g`, `k = C`.
pub fn electrical_to_mechanical(
    circuit: &CapacitorCircuit,
    gravity: f64,
) -> Result<SpringBoxParams> {
    if !gravity.is_finite() || gravity <= 0.0 {
        return Err(Error::InvalidParam(format!(
            "gravity must be a positive finite number, got {gravity}"
        )));
    }
    SpringBoxParams::new(
        circuit.initial_charge / gravity,
        circuit.capacitance,
        gravity,
    )
}

/// The correspondence ratios between one box-spring system and one
/// circuit. For a pair produced by the maps above all three ratios are 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalogyMap {
    /// `Q₀ / (M g)`, coulomb per newton.
    pub charge_per_weight: f64,
    /// `C / k`, farad per (N/m).
    pub capacitance_per_stiffness: f64,
    /// Initial voltage over full spring extension, `(Q₀/C) / (Mg/k)`.
    pub voltage_per_displacement: f64,
}

impl AnalogyMap {
    pub fn between(params: &SpringBoxParams, circuit: &CapacitorCircuit) -> Self {
        Self {
            charge_per_weight: circuit.initial_charge / params.weight(),
            capacitance_per_stiffness: circuit.capacitance / params.stiffness(),
            voltage_per_displacement: (circuit.initial_charge / circuit.capacitance)
                / params.full_extension(),
        }
    }
}

/// Relative mismatch between the two stored energies, `Q₀²/(2C)` against
/// `(Mg)²/(2k)`; zero (to rounding) when the pair is related by the map.
pub fn analogy_energy_residual(params: &SpringBoxParams, circuit: &CapacitorCircuit) -> f64 {
    let mechanical = crate::model::energy_breakdown(params).initial_total;
    let electrical = capacitor_energy_breakdown(circuit).initial_total;
    (electrical - mechanical).abs() / mechanical
}

/// Header of the transient CSV emitted by [`write_series_csv`].
pub const SERIES_CSV_HEADER: &str = "t,q1,q2,cumulative_dissipated";

/// Write a transient series as CSV ('.' decimal separator, '\n' line ends).
pub fn write_series_csv<W: Write>(series: &[TransientSample], mut out: W) -> io::Result<()> {
    out.write_all(SERIES_CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for s in series {
        writeln!(out, "{},{},{},{}", s.t, s.q1, s.q2, s.cumulative_dissipated)?;
    }
    Ok(())
}

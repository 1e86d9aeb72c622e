//! Drop-by-drop transfer simulation with an exact per-step energy ledger.
//!
//! For every drop `n = 1 … N/2` two equilibrium hops happen: box 1 loses a
//! drop and rises by `q`, box 2 receives it and descends by `q`. Each hop is
//! quasi-static: the box arrives at its new equilibrium at rest, which fixes
//! the energy it must shed while settling to exactly `½ k q²` per hop. The
//! ledger therefore closes identically at every step:
//!
//! ```text
//! delta_elastic_exact = gravity_work - settle_dissipation
//! ```
//!
//! with box 2 gaining `(n - ½) k q²` of elastic energy per hop against
//! `n k q²` of gravity work, and box 1 losing `(N - n + ½) k q²` against
//! `-(N - n) k q²`. Summed over the transfer the exact elastic changes are
//! `+E_in/4` and `-3 E_in/4` for every even `N`, so half of the initial
//! energy leaves the springs no matter how finely the liquid is divided —
//! the net gravity work minus the total settling loss accounts for all of it.
//!
//! The `*_paper` fields carry the first-order (large-`N`) estimates that
//! drop the constant `½ k q²` settling term; see the field docs for the
//! box 1 index subtlety.
//!
//! Kinetic energy picked up by a drop while falling between the boxes is
//! excluded from the ledger by construction, as is the growing gap between
//! the box openings; the model covers the springs and the settling only.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, SpringBoxParams, TransferPlan};
use crate::numeric::KahanSum;

/// Relative tolerance a passing audit check must meet.
pub const AUDIT_REL_TOL: f64 = 1e-10;

/// Largest drop count for which `simulate_transfer` retains the full
/// record list; above it only totals are accumulated.
pub const DEFAULT_RECORD_LIMIT: u64 = 1_000_000;

/// Which box a ledger row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoxId {
    /// The initially full box; it rises as drops leave.
    Box1,
    /// The initially empty box underneath; it descends as drops arrive.
    Box2,
}

impl fmt::Display for BoxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxId::Box1 => f.write_str("Box1"),
            BoxId::Box2 => f.write_str("Box2"),
        }
    }
}

/// One ledger row: the state change of a single box for a single drop.
///
/// Positions are displacement magnitudes from the unloaded spring length;
/// direction of travel is implied by the box (box 1 rises, box 2 descends).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    /// Drop number `n` in `1..=N/2`.
    pub drop_index: u64,
    #[serde(rename = "box")]
    pub box_id: BoxId,
    pub mass_before: f64,
    pub mass_after: f64,
    pub position_before: f64,
    pub position_after: f64,
    /// Exact elastic-energy change of this hop: `(n - ½) k q²` for box 2,
    /// `-(N - n + ½) k q²` for box 1.
    pub delta_elastic_exact: f64,
    /// First-order estimate of the same change: the hop's gravity work
    /// alone, with the constant `½ k q²` settling term dropped. Equals
    /// `gravity_work` on every row.
    pub delta_elastic_paper: f64,
    /// Work done by gravity on the box's contents during the hop, signed
    /// positive when force and displacement are aligned: `n k q²` for
    /// box 2 (it descends), `-(N - n) k q²` for box 1 (it rises).
    pub gravity_work: f64,
    /// Energy shed while the box settles at the new equilibrium, exactly
    /// `½ k q²` per hop. Always non-negative.
    pub settle_dissipation: f64,
}

/// Totals over a complete transfer of `N/2` drops.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferSummary {
    /// Exact elastic-energy change of box 1, `-3 k N² q² / 8 = -¾ E_in`.
    pub delta1_exact: f64,
    /// Exact elastic-energy change of box 2, `k N² q² / 8 = ¼ E_in`.
    pub delta2_exact: f64,
    /// `delta1_exact + delta2_exact`, always `-E_in / 2`.
    pub delta_total_exact: f64,
    /// First-order total for box 1, `-½ (N/2)(1 + 3N/2) k q²`, accumulated
    /// from the series terms `-(N - n + 1) k q²`. Note the per-row
    /// `delta_elastic_paper` column stores the hop's gravity work
    /// `-(N - n) k q²` instead, one `k q²` less negative per hop; the two
    /// first-order forms differ by an index shift that vanishes relative
    /// to `E_in` as `1/N`, and both are reported deliberately.
    pub delta1_paper: f64,
    /// First-order total for box 2, `½ (N/2)(1 + N/2) k q²`; here the
    /// series terms `n k q²` are exactly the per-row column values.
    pub delta2_paper: f64,
    /// Net gravity work over both boxes, `-k N² q² / 4 + k N q² / 2`.
    pub gravity_work_total: f64,
    /// Total settling loss, `N` hops times `½ k q²` = `k N q² / 2`.
    pub dissipation_total: f64,
    /// Elastic energy of box 1 at the end, `E_in / 4`.
    pub final_elastic_box1: f64,
    /// Elastic energy of box 2 at the end, `E_in / 4`.
    pub final_elastic_box2: f64,
    /// The ledger rows, two per drop (box 1 first), `N` in total; empty
    /// when the simulation ran above its record-retention limit.
    pub records: Vec<StepRecord>,
}

/// Simulate the full transfer, retaining records for plans up to
/// [`DEFAULT_RECORD_LIMIT`] drops.
pub fn simulate_transfer(params: &SpringBoxParams, plan: &TransferPlan) -> Result<TransferSummary> {
    simulate_transfer_with_limit(params, plan, DEFAULT_RECORD_LIMIT)
}

/// Simulate the full transfer, retaining the record list only when the
/// plan's drop count does not exceed `record_limit` (pass 0 to always
/// stream totals only).
pub fn simulate_transfer_with_limit(
    params: &SpringBoxParams,
    plan: &TransferPlan,
    record_limit: u64,
) -> Result<TransferSummary> {
    plan.validate_against(params)?;
    let n = plan.drop_count();
    let half = n / 2;
    let k = params.stiffness();
    let q = plan.step();
    let m = plan.drop_mass();
    let kq2 = k * q * q;
    let half_kq2 = 0.5 * kq2;

    let keep_records = n <= record_limit;
    let mut records = if keep_records {
        Vec::with_capacity(n as usize)
    } else {
        Vec::new()
    };

    let mut delta1 = KahanSum::new();
    let mut delta2 = KahanSum::new();
    let mut delta1_paper = KahanSum::new();
    let mut delta2_paper = KahanSum::new();
    let mut gravity = KahanSum::new();
    let mut dissipation = KahanSum::new();

    for drop in 1..=half {
        let arrived = drop as f64;
        let remaining = (n - drop) as f64;

        // Box 1: the drop leaves, the box rises by q to its new equilibrium.
        let box1 = StepRecord {
            drop_index: drop,
            box_id: BoxId::Box1,
            mass_before: (remaining + 1.0) * m,
            mass_after: remaining * m,
            position_before: (remaining + 1.0) * q,
            position_after: remaining * q,
            delta_elastic_exact: -((remaining + 0.5) * kq2),
            delta_elastic_paper: -(remaining * kq2),
            gravity_work: -(remaining * kq2),
            settle_dissipation: half_kq2,
        };
        // Box 2: the drop arrives, the box descends by q.
        let box2 = StepRecord {
            drop_index: drop,
            box_id: BoxId::Box2,
            mass_before: (arrived - 1.0) * m,
            mass_after: arrived * m,
            position_before: (arrived - 1.0) * q,
            position_after: arrived * q,
            delta_elastic_exact: (arrived - 0.5) * kq2,
            delta_elastic_paper: arrived * kq2,
            gravity_work: arrived * kq2,
            settle_dissipation: half_kq2,
        };

        delta1.add(box1.delta_elastic_exact);
        delta2.add(box2.delta_elastic_exact);
        // Box 1's first-order series term carries the pre-hop index.
        delta1_paper.add(-((remaining + 1.0) * kq2));
        delta2_paper.add(box2.delta_elastic_paper);
        gravity.add(box1.gravity_work);
        gravity.add(box2.gravity_work);
        dissipation.add(box1.settle_dissipation);
        dissipation.add(box2.settle_dissipation);

        if keep_records {
            records.push(box1);
            records.push(box2);
        }
    }

    let final_position = half as f64 * q;
    let final_energy = 0.5 * k * final_position * final_position;

    Ok(TransferSummary {
        delta1_exact: delta1.value(),
        delta2_exact: delta2.value(),
        delta_total_exact: delta1.value() + delta2.value(),
        delta1_paper: delta1_paper.value(),
        delta2_paper: delta2_paper.value(),
        gravity_work_total: gravity.value(),
        dissipation_total: dissipation.value(),
        final_elastic_box1: final_energy,
        final_elastic_box2: final_energy,
        records,
    })
}

/// One named audit check. `residual` is the absolute mismatch in the
/// quantity's own units, `scale` the magnitude it is judged against; the
/// check passes when `residual <= AUDIT_REL_TOL * scale`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditCheck {
    pub name: &'static str,
    pub residual: f64,
    pub scale: f64,
    pub passed: bool,
}

/// Result of auditing a [`TransferSummary`]; failures are entries, not
/// errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
    pub passed: bool,
}

impl AuditReport {
    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect()
    }
}

/// Tracks the worst (largest relative) mismatch seen for one check.
struct WorstResidual {
    residual: f64,
    scale: f64,
    rel: f64,
}

impl WorstResidual {
    fn new() -> Self {
        Self {
            residual: 0.0,
            scale: 1.0,
            rel: 0.0,
        }
    }

    fn observe(&mut self, lhs: f64, rhs: f64, scale: f64) {
        let residual = (lhs - rhs).abs();
        let rel = if scale > 0.0 {
            residual / scale
        } else {
            residual
        };
        if rel > self.rel || !rel.is_finite() {
            self.rel = rel;
            self.residual = residual;
            self.scale = scale;
        }
    }

    fn into_check(self, name: &'static str) -> AuditCheck {
        AuditCheck {
            name,
            residual: self.residual,
            scale: self.scale,
            passed: self.rel.is_finite() && self.rel <= AUDIT_REL_TOL,
        }
    }
}

/// Re-derive every ledger invariant from `summary` and report the measured
/// residuals. Per-row checks cover whatever records the summary retained;
/// the totals are always checked against the closed forms.
pub fn audit_ledger(
    summary: &TransferSummary,
    params: &SpringBoxParams,
    plan: &TransferPlan,
) -> AuditReport {
    let n = plan.drop_count();
    let k = params.stiffness();
    let q = plan.step();
    let m = plan.drop_mass();
    let kq2 = k * q * q;
    let e_in = model::energy_breakdown(params).initial_total;

    let mut ledger_identity = WorstResidual::new();
    let mut mass_change = WorstResidual::new();
    let mut position_change = WorstResidual::new();
    let mut delta_exact_form = WorstResidual::new();
    let mut gravity_form = WorstResidual::new();
    let mut dissipation_form = WorstResidual::new();

    for record in &summary.records {
        let drop = record.drop_index as f64;
        let identity_scale = record
            .delta_elastic_exact
            .abs()
            .max(record.gravity_work.abs())
            .max(record.settle_dissipation.abs());
        ledger_identity.observe(
            record.delta_elastic_exact,
            record.gravity_work - record.settle_dissipation,
            identity_scale,
        );
        dissipation_form.observe(record.settle_dissipation, 0.5 * kq2, kq2);
        match record.box_id {
            BoxId::Box1 => {
                let remaining = (n - record.drop_index) as f64;
                mass_change.observe(record.mass_before - record.mass_after, m, m);
                position_change.observe(record.position_before - record.position_after, q, q);
                let expected_delta = -((remaining + 0.5) * kq2);
                delta_exact_form.observe(
                    record.delta_elastic_exact,
                    expected_delta,
                    expected_delta.abs(),
                );
                let expected_work = -(remaining * kq2);
                gravity_form.observe(record.gravity_work, expected_work, expected_work.abs());
            }
            BoxId::Box2 => {
                mass_change.observe(record.mass_after - record.mass_before, m, m);
                position_change.observe(record.position_after - record.position_before, q, q);
                let expected_delta = (drop - 0.5) * kq2;
                delta_exact_form.observe(
                    record.delta_elastic_exact,
                    expected_delta,
                    expected_delta.abs(),
                );
                let expected_work = drop * kq2;
                gravity_form.observe(record.gravity_work, expected_work, expected_work.abs());
            }
        }
    }

    let nf = n as f64;
    let closed_delta1 = -3.0 * kq2 * nf * nf / 8.0;
    let closed_delta2 = kq2 * nf * nf / 8.0;

    let mut checks = Vec::with_capacity(15);
    checks.push(ledger_identity.into_check("step_ledger_identity"));
    checks.push(mass_change.into_check("step_mass_change"));
    checks.push(position_change.into_check("step_position_change"));
    checks.push(delta_exact_form.into_check("step_delta_elastic_exact"));
    checks.push(gravity_form.into_check("step_gravity_work"));
    checks.push(dissipation_form.into_check("step_settle_dissipation"));

    let mut total = |name: &'static str, lhs: f64, rhs: f64| {
        let mut w = WorstResidual::new();
        w.observe(lhs, rhs, e_in);
        checks.push(w.into_check(name));
    };
    total(
        "summary_delta1_closed_form",
        summary.delta1_exact,
        closed_delta1,
    );
    total(
        "summary_delta2_closed_form",
        summary.delta2_exact,
        closed_delta2,
    );
    total(
        "summary_total_consistency",
        summary.delta_total_exact,
        summary.delta1_exact + summary.delta2_exact,
    );
    total(
        "summary_half_energy",
        summary.delta_total_exact,
        -0.5 * e_in,
    );
    total(
        "summary_work_minus_dissipation",
        summary.gravity_work_total - summary.dissipation_total,
        summary.delta_total_exact,
    );
    total(
        "summary_final_box1",
        summary.final_elastic_box1,
        0.25 * e_in,
    );
    total(
        "summary_final_box2",
        summary.final_elastic_box2,
        0.25 * e_in,
    );
    total(
        "summary_paper_delta1",
        summary.delta1_paper,
        model::delta1_paper_sum(params, plan).unwrap_or(f64::NAN),
    );
    total(
        "summary_paper_delta2",
        summary.delta2_paper,
        model::delta2_paper_sum(params, plan).unwrap_or(f64::NAN),
    );

    let passed = checks.iter().all(|c| c.passed);
    AuditReport { checks, passed }
}

/// Approximation error of the first-order totals at one drop count, all
/// relative to the initial energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub drop_count: u64,
    pub relative_error_delta1: f64,
    pub relative_error_delta2: f64,
    pub relative_error_total: f64,
}

/// Check a sweep's drop-count list: non-empty, all even and at least 2,
/// strictly increasing.
pub fn validate_sweep_counts(drop_counts: &[u64]) -> Result<()> {
    if drop_counts.is_empty() {
        return Err(Error::InvalidParam(
            "sweep needs at least one drop count".into(),
        ));
    }
    for window in drop_counts.windows(2) {
        if window[1] <= window[0] {
            return Err(Error::InvalidParam(format!(
                "sweep drop counts must be strictly increasing, got {} after {}",
                window[1], window[0]
            )));
        }
    }
    Ok(())
}

/// Errors of the first-order totals at a single drop count.
pub fn sweep_row(params: &SpringBoxParams, drop_count: u64) -> Result<SweepRow> {
    let plan = TransferPlan::liquid(params, drop_count)?;
    let summary = simulate_transfer_with_limit(params, &plan, 0)?;
    let e_in = model::energy_breakdown(params).initial_total;
    Ok(SweepRow {
        drop_count,
        relative_error_delta1: (summary.delta1_paper - summary.delta1_exact).abs() / e_in,
        relative_error_delta2: (summary.delta2_paper - summary.delta2_exact).abs() / e_in,
        relative_error_total: (summary.delta1_paper + summary.delta2_paper
            - summary.delta_total_exact)
            .abs()
            / e_in,
    })
}

/// Approximation-error table across several drop counts. In exact
/// arithmetic the per-box error is `1/(2N)` and the total error is zero.
pub fn convergence_sweep(params: &SpringBoxParams, drop_counts: &[u64]) -> Result<Vec<SweepRow>> {
    validate_sweep_counts(drop_counts)?;
    drop_counts.iter().map(|&n| sweep_row(params, n)).collect()
}

/// Header of the ledger CSV emitted by [`write_records_csv`].
pub const RECORDS_CSV_HEADER: &str = "drop_index,box,mass_before,mass_after,position_before,\
position_after,delta_elastic_exact,delta_elastic_paper,gravity_work,settle_dissipation";

/// Write the record list as CSV ('.' decimal separator, '\n' line ends).
pub fn write_records_csv<W: Write>(records: &[StepRecord], mut out: W) -> io::Result<()> {
    out.write_all(RECORDS_CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.drop_index,
            r.box_id,
            r.mass_before,
            r.mass_after,
            r.position_before,
            r.position_after,
            r.delta_elastic_exact,
            r.delta_elastic_paper,
            r.gravity_work,
            r.settle_dissipation
        )?;
    }
    Ok(())
}

/// Header of the sweep CSV emitted by [`write_sweep_csv`].
pub const SWEEP_CSV_HEADER: &str =
    "N,relative_error_delta1,relative_error_delta2,relative_error_total";

/// Write a sweep table as CSV.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    out.write_all(SWEEP_CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.drop_count,
            row.relative_error_delta1,
            row.relative_error_delta2,
            row.relative_error_total
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::energy_breakdown;

    fn setup(n: u64) -> (SpringBoxParams, TransferPlan) {
        let params = SpringBoxParams::new(1.0, 100.0, 10.0).unwrap();
        let plan = TransferPlan::liquid(&params, n).unwrap();
        (params, plan)
    }

    #[test]
    fn ten_drop_summary_matches_closed_forms() {
        let (params, plan) = setup(10);
        let s = simulate_transfer(&params, &plan).unwrap();
        assert!((s.delta_total_exact + 0.25).abs() < 1e-15);
        assert!((s.delta1_exact + 0.375).abs() < 1e-15);
        assert!((s.delta2_exact - 0.125).abs() < 1e-15);
        assert!((s.final_elastic_box1 - 0.125).abs() < 1e-15);
        assert!((s.final_elastic_box2 - 0.125).abs() < 1e-15);
        assert_eq!(s.records.len(), 10);
    }

    #[test]
    fn first_box2_record_of_ten() {
        let (params, plan) = setup(10);
        let s = simulate_transfer(&params, &plan).unwrap();
        let r = s
            .records
            .iter()
            .find(|r| r.box_id == BoxId::Box2 && r.drop_index == 1)
            .unwrap();
        assert!((r.delta_elastic_exact - 0.005).abs() < 1e-16);
        assert!((r.gravity_work - 0.01).abs() < 1e-16);
        assert!((r.settle_dissipation - 0.005).abs() < 1e-16);
        assert_eq!(r.mass_before, 0.0);
        assert!((r.mass_after - 0.1).abs() < 1e-16);
        assert_eq!(r.position_before, 0.0);
        assert!((r.position_after - 0.01).abs() < 1e-16);
    }

    #[test]
    fn records_come_in_drop_order_box1_first() {
        let (params, plan) = setup(6);
        let s = simulate_transfer(&params, &plan).unwrap();
        assert_eq!(s.records.len(), 6);
        for (i, pair) in s.records.chunks(2).enumerate() {
            let drop = i as u64 + 1;
            assert_eq!(pair[0].box_id, BoxId::Box1);
            assert_eq!(pair[0].drop_index, drop);
            assert_eq!(pair[1].box_id, BoxId::Box2);
            assert_eq!(pair[1].drop_index, drop);
        }
    }

    #[test]
    fn smallest_transfer_still_halves_the_energy() {
        let (params, plan) = setup(2);
        let s = simulate_transfer(&params, &plan).unwrap();
        let e_in = energy_breakdown(&params).initial_total;
        assert_eq!(s.records.len(), 2);
        assert!((s.delta_total_exact + 0.5 * e_in).abs() <= 1e-15 * e_in);
        assert!((s.final_elastic_box1 - 0.25 * e_in).abs() <= 1e-15 * e_in);
    }

    #[test]
    fn box_energies_are_strictly_monotone_per_step() {
        let (params, plan) = setup(100);
        let s = simulate_transfer(&params, &plan).unwrap();
        for r in &s.records {
            match r.box_id {
                BoxId::Box1 => assert!(r.delta_elastic_exact < 0.0),
                BoxId::Box2 => assert!(r.delta_elastic_exact > 0.0),
            }
            assert!(r.settle_dissipation > 0.0);
        }
    }

    #[test]
    fn ledger_identity_holds_on_every_record() {
        let (params, plan) = setup(1000);
        let s = simulate_transfer(&params, &plan).unwrap();
        for r in &s.records {
            let residual = (r.delta_elastic_exact - (r.gravity_work - r.settle_dissipation)).abs();
            let scale = r.delta_elastic_exact.abs().max(r.gravity_work.abs());
            assert!(
                residual <= 1e-12 * scale,
                "drop {} {:?}",
                r.drop_index,
                r.box_id
            );
        }
    }

    #[test]
    fn streaming_mode_drops_records_but_keeps_totals() {
        let (params, plan) = setup(1000);
        let full = simulate_transfer(&params, &plan).unwrap();
        let streamed = simulate_transfer_with_limit(&params, &plan, 0).unwrap();
        assert!(streamed.records.is_empty());
        assert_eq!(streamed.delta_total_exact, full.delta_total_exact);
        assert_eq!(streamed.delta1_paper, full.delta1_paper);
        assert_eq!(streamed.dissipation_total, full.dissipation_total);
    }

    #[test]
    fn integer_arithmetic_oracle_matches_small_n() {
        // Factor out kq²/2: box 2 gains the odd number 2n-1 per hop, box 1
        // loses 2(N-n)+1, so exact integer sums pin every total.
        let params = SpringBoxParams::new(0.7, 31.0, 9.81).unwrap();
        for n in (2..=100u64).step_by(2) {
            let plan = TransferPlan::liquid(&params, n).unwrap();
            let s = simulate_transfer(&params, &plan).unwrap();
            let kq2_half = 0.5 * params.stiffness() * plan.step() * plan.step();

            let mut gain2: i128 = 0;
            let mut loss1: i128 = 0;
            let mut work: i128 = 0;
            for drop in 1..=(n as i128) / 2 {
                gain2 += 2 * drop - 1;
                loss1 += 2 * (n as i128 - drop) + 1;
                work += 2 * drop - 2 * (n as i128 - drop);
            }
            let diss: i128 = n as i128;

            let to_energy = |units: i128| units as f64 * kq2_half;
            let scale = to_energy(gain2 + loss1);
            assert!(
                (s.delta2_exact - to_energy(gain2)).abs() <= 1e-12 * scale,
                "N = {n}"
            );
            assert!(
                (s.delta1_exact + to_energy(loss1)).abs() <= 1e-12 * scale,
                "N = {n}"
            );
            assert!(
                (s.gravity_work_total - to_energy(work)).abs() <= 1e-12 * scale,
                "N = {n}"
            );
            assert!(
                (s.dissipation_total - to_energy(diss)).abs() <= 1e-12 * scale,
                "N = {n}"
            );
        }
    }

    #[test]
    fn simulate_rejects_a_plan_for_different_params() {
        let (params, plan) = setup(10);
        let other = SpringBoxParams::new(2.0, params.stiffness(), params.gravity()).unwrap();
        assert!(simulate_transfer(&other, &plan).is_err());
        assert!(simulate_transfer(&params, &plan).is_ok());
    }

    #[test]
    fn audit_of_a_streamed_summary_still_checks_the_totals() {
        let (params, plan) = setup(1000);
        let s = simulate_transfer_with_limit(&params, &plan, 0).unwrap();
        let report = audit_ledger(&s, &params, &plan);
        assert!(report.passed, "failures: {:?}", report.failures());
    }

    #[test]
    fn audit_passes_on_simulation_output() {
        let (params, plan) = setup(10);
        let s = simulate_transfer(&params, &plan).unwrap();
        let report = audit_ledger(&s, &params, &plan);
        assert!(report.passed, "failures: {:?}", report.failures());
        assert_eq!(report.checks.len(), 15);
    }

    #[test]
    fn audit_catches_a_perturbed_gravity_work() {
        let (params, plan) = setup(10);
        let mut s = simulate_transfer(&params, &plan).unwrap();
        s.records[3].gravity_work += 1e-6;
        let report = audit_ledger(&s, &params, &plan);
        assert!(!report.passed);
        let check = report
            .checks
            .iter()
            .find(|c| c.name == "step_ledger_identity")
            .unwrap();
        assert!(!check.passed);
        assert!(
            (check.residual - 1e-6).abs() < 1e-9,
            "residual = {}",
            check.residual
        );
    }

    #[test]
    fn audit_totals_match_closed_form_work_and_dissipation() {
        // Net gravity work is kq²·N(2-N)/4 and the settling loss is
        // N·kq²/2; their difference must be the exact energy change.
        let (params, plan) = setup(10);
        let s = simulate_transfer(&params, &plan).unwrap();
        let kq2 = params.stiffness() * plan.step() * plan.step();
        let n = plan.drop_count() as f64;
        let expected_work = kq2 * n * (2.0 - n) / 4.0;
        let expected_diss = 0.5 * n * kq2;
        assert!((s.gravity_work_total - expected_work).abs() < 1e-15);
        assert!((s.dissipation_total - expected_diss).abs() < 1e-15);
        assert!((s.gravity_work_total - s.dissipation_total - s.delta_total_exact).abs() < 1e-15);
    }

    #[test]
    fn sweep_matches_the_half_over_n_law() {
        let params = SpringBoxParams::new(1.0, 100.0, 10.0).unwrap();
        let rows = convergence_sweep(&params, &[10, 1000]).unwrap();
        assert!((rows[0].relative_error_delta2 - 0.05).abs() < 1e-12);
        assert!((rows[0].relative_error_delta1 - 0.05).abs() < 1e-12);
        assert!((rows[1].relative_error_delta2 - 5e-4).abs() < 1e-12);
        assert!(rows[0].relative_error_total <= 1e-12);
        assert!(rows[1].relative_error_total <= 1e-12);
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let params = SpringBoxParams::new(1.0, 100.0, 10.0).unwrap();
        assert!(convergence_sweep(&params, &[]).is_err());
        assert!(convergence_sweep(&params, &[10, 10]).is_err());
        assert!(convergence_sweep(&params, &[100, 10]).is_err());
        assert!(convergence_sweep(&params, &[10, 11]).is_err());
    }

    #[test]
    fn records_csv_layout() {
        let (params, plan) = setup(2);
        let s = simulate_transfer(&params, &plan).unwrap();
        let mut buf = Vec::new();
        write_records_csv(&s.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RECORDS_CSV_HEADER);
        let first = lines.next().unwrap();
        assert!(first.starts_with("1,Box1,"), "row: {first}");
        assert_eq!(first.split(',').count(), 10);
        assert_eq!(text.matches('\n').count(), 3);
    }
}

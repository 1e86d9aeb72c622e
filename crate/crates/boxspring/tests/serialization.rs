//! Wire-format contracts: JSON field names, CSV layout, lossless numbers.

use boxspring::{
    audit_ledger, capacitor_energy_breakdown, energy_breakdown, rc_transient_numeric,
    simulate_transfer, write_records_csv, write_series_csv, CapacitorCircuit, SpringBoxParams,
    TransferPlan, RECORDS_CSV_HEADER, SERIES_CSV_HEADER,
};
use proptest::prelude::*;
use serde_json::Value;

fn setup() -> (SpringBoxParams, TransferPlan) {
    let params = SpringBoxParams::new(1.0, 100.0, 10.0).unwrap();
    let plan = TransferPlan::liquid(&params, 10).unwrap();
    (params, plan)
}

#[test]
fn transfer_summary_json_field_names() {
    let (params, plan) = setup();
    let summary = simulate_transfer(&params, &plan).unwrap();
    let value: Value = serde_json::to_value(&summary).unwrap();
    let object = value.as_object().unwrap();
    let expected = [
        "delta1_exact",
        "delta2_exact",
        "delta_total_exact",
        "delta1_paper",
        "delta2_paper",
        "gravity_work_total",
        "dissipation_total",
        "final_elastic_box1",
        "final_elastic_box2",
        "records",
    ];
    assert_eq!(object.len(), expected.len());
    for key in expected {
        assert!(object.contains_key(key), "missing {key}");
    }

    let record = value["records"][0].as_object().unwrap();
    let record_fields = [
        "drop_index",
        "box",
        "mass_before",
        "mass_after",
        "position_before",
        "position_after",
        "delta_elastic_exact",
        "delta_elastic_paper",
        "gravity_work",
        "settle_dissipation",
    ];
    assert_eq!(record.len(), record_fields.len());
    for key in record_fields {
        assert!(record.contains_key(key), "missing record field {key}");
    }
    assert_eq!(value["records"][0]["box"], "Box1");
    assert_eq!(value["records"][1]["box"], "Box2");
}

#[test]
fn audit_report_json_shape() {
    let (params, plan) = setup();
    let summary = simulate_transfer(&params, &plan).unwrap();
    let report = audit_ledger(&summary, &params, &plan);
    let value: Value = serde_json::to_value(&report).unwrap();
    assert!(value["passed"].as_bool().unwrap());
    let checks = value["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for check in checks {
        let object = check.as_object().unwrap();
        for key in ["name", "residual", "scale", "passed"] {
            assert!(object.contains_key(key));
        }
    }
}

#[test]
fn energy_breakdown_json_carries_the_domain() {
    let (params, _) = setup();
    let mechanical: Value = serde_json::to_value(energy_breakdown(&params)).unwrap();
    assert_eq!(mechanical["domain"], "mechanical");
    for key in [
        "initial_total",
        "initial_box1",
        "final_per_box",
        "final_total",
        "delta_total",
    ] {
        assert!(mechanical.get(key).is_some(), "missing {key}");
    }

    let circuit = CapacitorCircuit::ideal(1.0, 1.0).unwrap();
    let electrical: Value = serde_json::to_value(capacitor_energy_breakdown(&circuit)).unwrap();
    assert_eq!(electrical["domain"], "electrical");
    assert_eq!(
        mechanical.as_object().unwrap().len(),
        electrical.as_object().unwrap().len()
    );
}

#[test]
fn ledger_csv_round_trips_every_number() {
    let (params, plan) = setup();
    let summary = simulate_transfer(&params, &plan).unwrap();
    let mut buf = Vec::new();
    write_records_csv(&summary.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();

    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), RECORDS_CSV_HEADER);
    for (line, record) in lines.zip(summary.records.iter()) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 10);
        assert_eq!(fields[0].parse::<u64>().unwrap(), record.drop_index);
        let parsed: Vec<f64> = fields[2..].iter().map(|f| f.parse().unwrap()).collect();
        let original = [
            record.mass_before,
            record.mass_after,
            record.position_before,
            record.position_after,
            record.delta_elastic_exact,
            record.delta_elastic_paper,
            record.gravity_work,
            record.settle_dissipation,
        ];
        for (a, b) in parsed.iter().zip(original.iter()) {
            assert_eq!(a.to_bits(), b.to_bits(), "line: {line}");
        }
    }
}

#[test]
fn transient_csv_round_trips_every_number() {
    let circuit = CapacitorCircuit::new(1.0, 1.0, 1.0).unwrap();
    let tau = circuit.time_constant().unwrap();
    let series = rc_transient_numeric(&circuit, tau / 50.0, 10.0 * tau).unwrap();
    let mut buf = Vec::new();
    write_series_csv(&series, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();

    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), SERIES_CSV_HEADER);
    for (line, sample) in lines.zip(series.iter()) {
        let parsed: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(parsed.len(), 4);
        let original = [sample.t, sample.q1, sample.q2, sample.cumulative_dissipated];
        for (a, b) in parsed.iter().zip(original.iter()) {
            assert_eq!(a.to_bits(), b.to_bits(), "line: {line}");
        }
    }
}

proptest! {
    /// The display form of any finite f64 parses back to the same bits,
    /// both through `format!` (CSV) and through serde_json.
    #[test]
    fn float_formatting_is_lossless(value in any::<f64>()) {
        prop_assume!(value.is_finite());
        let display: f64 = format!("{value}").parse().unwrap();
        prop_assert_eq!(display.to_bits(), value.to_bits());
        let json: f64 = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
        prop_assert_eq!(json.to_bits(), value.to_bits());
    }
}

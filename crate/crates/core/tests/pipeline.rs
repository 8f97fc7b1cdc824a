use rcrae::ansatz::{build_enhanced_circuit, build_h2_ansatz, build_ldca, LDCA_REFERENCE_THETAS};
use rcrae::harness::{run_compare, run_scan_l, ExperimentConfig, ResultTable};
use rcrae::inference::{estimate, p_even_model, EstimatorOptions, ParityDataset, ParityRecord};
use rcrae::linalg::phase_aligned_distance;
use rcrae::noise::{zz_khz_to_rad_per_s, NoiseConfig};
use rcrae::pauli::Observable;
use rcrae::sim::{expectation, Simulator};
use rcrae::twirl::make_ensemble;

#[test]
fn twirled_enhanced_circuits_keep_their_unitary() {
    let p: Observable = "XX".parse().unwrap();
    let a = build_ldca(&LDCA_REFERENCE_THETAS).unwrap();
    for layers in 0..3 {
        let c = build_enhanced_circuit(&a, &p, layers).unwrap();
        let ens = make_ensemble(&c, 8, 800, layers as u64).unwrap();
        let u = c.unitary().unwrap();
        for d in &ens.duplicates {
            assert!(phase_aligned_distance(&d.unitary().unwrap(), &u) < 1e-9);
            assert_eq!(d.kinds(), c.kinds());
        }
        assert_eq!(ens.total_shots(), 800);
    }
}

#[test]
fn twirling_leaves_incoherent_only_results_close() {
    // Damping commutes with nothing in particular, so only closeness is expected;
    // without coherent errors the twirl should not change the parity much.
    let p: Observable = "XXXX".parse().unwrap();
    let a = build_h2_ansatz(-6.057).unwrap();
    let c = build_enhanced_circuit(&a, &p, 1).unwrap();
    let cfg = NoiseConfig::incoherent(84e-6, 110e-6);
    let sim = Simulator::new(4, Some(&cfg)).unwrap();
    let bare = sim.p_even(&c, &p).unwrap();
    let ens = make_ensemble(&c, 10, 1000, 3).unwrap();
    for d in &ens.duplicates {
        assert!((sim.p_even(d, &p).unwrap() - bare).abs() < 0.05);
    }
}

#[test]
fn simulated_noiseless_data_estimates_the_anchor() {
    let p: Observable = "XXXX".parse().unwrap();
    let a = build_h2_ansatz(-6.057).unwrap();
    let sim = Simulator::noiseless(4).unwrap();
    let pi = expectation(&sim.run(&a).unwrap(), &p).unwrap();
    let shots = 1_000_000u64;
    let records = (0..=3)
        .map(|l| {
            let c = build_enhanced_circuit(&a, &p, l).unwrap();
            let pe = sim.p_even(&c, &p).unwrap();
            assert!((pe - p_even_model(pi, 1.0, l as u32)).abs() < 1e-9);
            ParityRecord {
                layers: l as u32,
                shots,
                even_count: (pe * shots as f64).round() as u64,
            }
        })
        .collect();
    let est = estimate(&ParityDataset::new(records).unwrap(), &EstimatorOptions::default(), 1).unwrap();
    assert!((est.params.pi_hat - 0.2238).abs() < 1e-3);
}

#[test]
fn coherent_coupling_changes_results_through_the_harness() {
    let base = r#"{"scenario": "scan_L", "ansatz": {"kind": "h2"}, "shots": 900, "lmax": 4, "arm": "bare",
                   "noise": {"t1_us": 84, "t2_us": 110, "zz_khz": ZZ}}"#;
    let r2 = |zz: &str| {
        let cfg = ExperimentConfig::from_json_str(&base.replace("ZZ", zz)).unwrap();
        match run_scan_l(&cfg).unwrap().table {
            ResultTable::ScanL(rows) => rows[0].r2,
            _ => unreachable!(),
        }
    };
    assert!(r2("0") > r2("45"));
    assert!((zz_khz_to_rad_per_s(45.0) - 282_743.338_823_081_4).abs() < 1e-6);
}

#[test]
fn compare_accounts_for_shots_and_runtime() {
    let cfg = ExperimentConfig::from_json_str(
        r#"{"scenario": "compare", "ansatz": {"kind": "h2"}, "shots": 1001, "layers": [0, 2], "repeats": 3, "runs": 2,
            "duplicates": 4, "grid": {"pi_points": 201, "f_points": 51}, "seed": 5}"#,
    )
    .unwrap();
    let out = run_compare(&cfg).unwrap();
    let per: Vec<u64> = out.details["shots_per_depth"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["shots"].as_u64().unwrap())
        .collect();
    assert_eq!(per, [1001, 333]);
    assert_eq!(out.details["n_O"], 14);
    assert_eq!(out.details["n_A"], 3);
    let ResultTable::Compare(rows) = out.table else { panic!() };
    let lmaxes: Vec<(String, u32)> = rows.iter().map(|r| (r.method.clone(), r.lmax)).collect();
    assert_eq!(
        lmaxes,
        [("SS".into(), 0), ("RAE".into(), 0), ("RAE".into(), 2), ("RC-RAE".into(), 0), ("RC-RAE".into(), 2)]
    );
    let rae2 = &rows[2];
    assert!((rae2.runtime_units_a - (1001.0 * 3.0 + 1001.0 * 14.0 * 2.0 / 6.0)).abs() < 1e-9);
    for r in &rows {
        assert!(r.rmse * r.rmse >= r.bias * r.bias - 1e-12);
    }
}

#[test]
fn scan_l_rc_ensembles_split_each_depth_budget() {
    let cfg = ExperimentConfig::from_json_str(
        r#"{"scenario": "scan_L", "ansatz": {"kind": "ldca"}, "shots": 1000, "lmax": 3, "duplicates": 7, "arm": "rc"}"#,
    )
    .unwrap();
    let out = run_scan_l(&cfg).unwrap();
    let per = out.details["shots_per_layer"].as_u64().unwrap();
    assert_eq!(per, 250);
    for ens in out.details["rc_ensembles"].as_array().unwrap() {
        let dups = ens["duplicates"].as_array().unwrap();
        assert_eq!(dups.len(), 7);
        assert_eq!(dups.iter().map(|d| d["shots"].as_u64().unwrap()).sum::<u64>(), per);
    }
}

//! Round trips through the instance, solution and CSV formats.

mod common;

use clustp::bench::{compare, run_trials, summarize_pi};
use clustp::gen::{generate_clustered, generate_grid};
use clustp::io::{
    parse_baselines_csv, parse_instance, parse_results_csv, parse_solution, write_instance, write_results_csv,
    write_solution,
};
use clustp::objective::total_cost;
use clustp::{nrga_run, NrgaParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euclidean_instances_round_trip(seed in any::<u64>(), n in 1usize..=60, k in 1usize..=12, spread in 0.0f64..50.0) {
        let inst = generate_clustered(n, k.min(n), spread, 1000.0, seed).unwrap();
        let back = parse_instance(&write_instance(&inst)).unwrap();
        prop_assert_eq!(&back, &inst);
    }

    #[test]
    fn explicit_instances_round_trip(seed in any::<u64>(), n in 1usize..=25, k in 1usize..=6, density in 0.0f64..1.0) {
        let inst = common::random_sparse(seed, n, k.min(n), density);
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn solutions_round_trip(seed in any::<u64>(), n in 2usize..=30, k in 1usize..=6) {
        let inst = common::random_euclidean(seed, n, k.min(n));
        let tree = nrga_run(&inst, &NrgaParams::new(20.0, seed).unwrap()).unwrap();
        let cost = total_cost(&tree, &inst).unwrap();
        let parsed = parse_solution(&write_solution(&inst, &tree, cost)).unwrap();
        prop_assert_eq!(parsed.tree, tree);
        prop_assert_eq!(parsed.cost, Some(cost));
        prop_assert_eq!(parsed.dimension, n);
    }
}

#[test]
fn results_csv_round_trip() {
    let inst = generate_grid(52, 2, 5, 1000.0, 3).unwrap();
    let reports: Vec<_> = [1.0, 50.0].iter().map(|&g| run_trials(&inst, g, 5, 11).unwrap()).collect();
    let text = write_results_csv(&reports);
    assert!(text.starts_with("instance,gamma,runs,best_found,average,seconds_per_run,master_seed\n"));
    let rows = parse_results_csv(&text).unwrap();
    assert_eq!(rows.len(), 2);
    for (row, rep) in rows.iter().zip(&reports) {
        assert_eq!(row.instance, "10rand52-2x5");
        assert_eq!(row.gamma, rep.gamma);
        assert_eq!(row.runs, 5);
        assert!((row.best_found - rep.best_found).abs() <= 5e-7);
        assert!((row.average - rep.average).abs() <= 5e-7);
        assert_eq!(row.master_seed, 11);
    }
}

#[test]
fn published_tables_load() {
    let rows = parse_baselines_csv(common::PUBLISHED_TABLES).unwrap();
    assert_eq!(rows.len(), 205);
    for algo in ["E-MFEA", "C-MFEA", "NRGA"] {
        assert!(rows.iter().any(|r| r.algorithm == algo));
    }
    let eil = rows.iter().find(|r| r.instance == "10eil51" && r.algorithm == "C-MFEA").unwrap();
    assert_eq!((eil.best_found, eil.average), (3027.7, 3513.3));
    // every instance has exactly one published NRGA row
    let nrga = rows.iter().filter(|r| r.algorithm == "NRGA").count();
    assert_eq!(nrga, 83);
}

#[test]
fn compare_against_published_rows() {
    let baselines = parse_baselines_csv(common::PUBLISHED_TABLES).unwrap();
    let ours: Vec<_> = baselines
        .iter()
        .filter(|b| b.algorithm == "NRGA")
        .map(|b| clustp::io::ResultRow {
            instance: b.instance.clone(),
            gamma: 50.0,
            runs: 30,
            best_found: b.best_found,
            average: b.average,
            seconds_per_run: 0.0,
            master_seed: 0,
        })
        .collect();
    let rows = compare(&ours, &baselines).unwrap();
    let eil = rows.iter().find(|r| r.instance == "10eil51" && r.algorithm == "C-MFEA").unwrap();
    assert!((eil.pi - 43.42).abs() < 0.005);
    let summary = summarize_pi(&rows);
    let nrga = summary.iter().find(|s| s.0 == "NRGA").unwrap();
    assert_eq!((nrga.1, nrga.2), (0.0, 0.0));
}

#[test]
fn rejects_malformed_files() {
    let good = write_instance(&generate_grid(8, 1, 2, 10.0, 0).unwrap());
    assert!(parse_instance(&good).is_ok());
    assert!(parse_instance(&good.replace("EOF\n", "")).is_err());
    assert!(parse_instance(&good.replace("DIMENSION: 8", "DIMENSION: 9")).is_err());
    assert!(parse_instance(&good.replace(" -1\n2 ", " 1 -1\n2 ")).is_err());
    assert!(parse_instance("").is_err());
}

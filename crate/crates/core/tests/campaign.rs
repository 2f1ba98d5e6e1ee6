use proptest::prelude::*;

use tdgen::campaign::{
    rows_from_csv, rows_to_csv, run_campaign, run_campaign_with, shape_for_budget, CampaignConfig,
    MaxSize, RunOptions, ShapeMode, StopReason, StopRule,
};
use tdgen::corpus;
use tdgen::oracle::enumerate_shapes;
use tdgen::schema::Shape;
use tdgen::Subject;

fn config(max_size: usize, domain: u64, seed: u64, stop_rule: StopRule) -> CampaignConfig {
    CampaignConfig {
        domain,
        max_size: MaxSize::Uniform(max_size),
        k_max: 40,
        batch: 30,
        seed,
        stop_rule,
        ..CampaignConfig::default()
    }
}

fn subject(i: usize) -> Subject {
    match i {
        0 => corpus::linear_search(),
        1 => corpus::bubble_sort(),
        2 => corpus::matrix_mult(),
        _ => corpus::merge_sorted(),
    }
}

fn stop_rule() -> impl Strategy<Value = StopRule> {
    prop_oneof![
        (1u64..5).prop_map(|window| StopRule::Saturation { window }),
        Just(StopRule::LongestPath),
        Just(StopRule::KMax),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reports_are_consistent_and_within_the_oracle(
        which in 0usize..4,
        seed in any::<u64>(),
        stop in stop_rule(),
        max_size in 1usize..4,
    ) {
        let s = subject(which);
        let max_size = if which == 2 { max_size.min(2) } else { max_size };
        let cfg = config(max_size, 3, seed, stop);
        let (report, set) = run_campaign(&s.program, &s.table, &s.schema, &cfg).unwrap();

        let mut prev = 0;
        for (i, row) in report.rows.iter().enumerate() {
            prop_assert_eq!(row.k, i as u64);
            prop_assert!(row.ufp >= prev);
            prop_assert_eq!(row.nfp, row.ufp - prev);
            prop_assert_eq!(row.test_cases, cfg.batch as u64 * (i as u64 + 1));
            prev = row.ufp;
        }
        let last = report.final_row().unwrap();
        prop_assert_eq!(last.ufp, set.len());
        prop_assert_eq!(last.llp, set.longest_length());
        for rec in set.records() {
            prop_assert!(rec.cost <= rec.first_k);
        }

        let shapes: Vec<Shape> = shape_for_budget(&s.schema, u64::MAX, &cfg).unwrap();
        let oracle = enumerate_shapes(&s.program, &s.table, &s.schema, &shapes, 3).unwrap();
        prop_assert!(set.is_subset_of(&oracle));
    }

    #[test]
    fn worker_count_does_not_change_results(which in 0usize..4, seed in any::<u64>(), workers in 2usize..6) {
        let s = subject(which);
        let cfg = config(2, 50, seed, StopRule::KMax);
        let stable = |workers| RunOptions { workers, stable_time: true };
        let (r1, s1) = run_campaign_with(&s.program, &s.table, &s.schema, &cfg, stable(1)).unwrap();
        let (rn, sn) = run_campaign_with(&s.program, &s.table, &s.schema, &cfg, stable(workers)).unwrap();
        prop_assert_eq!(r1, rn);
        prop_assert_eq!(s1.records(), sn.records());
    }
}

#[test]
fn stop_rules_terminate_where_documented() {
    let s = corpus::linear_search();
    let mut cfg = config(4, 1000, 1, StopRule::KMax);
    let (report, _) = run_campaign(&s.program, &s.table, &s.schema, &cfg).unwrap();
    assert_eq!(report.stop, StopReason::KMax);
    assert_eq!(report.final_row().unwrap().k, cfg.k_max);

    cfg.stop_rule = StopRule::LongestPath;
    let (report, _) = run_campaign(&s.program, &s.table, &s.schema, &cfg).unwrap();
    assert_eq!(report.stop, StopReason::LongestPath);
    let rows = &report.rows;
    let last = rows.last().unwrap();
    assert!(last.k > report.k_cap);
    assert_eq!(last.llp, rows[rows.len() - 2].llp);
    assert_eq!(report.k_longest, Some(4));

    cfg.stop_rule = StopRule::Saturation { window: 3 };
    let (report, _) = run_campaign(&s.program, &s.table, &s.schema, &cfg).unwrap();
    assert_eq!(report.stop, StopReason::Saturation);
    let tail = &report.rows[report.rows.len() - 3..];
    assert!(tail.iter().all(|r| r.nfp == 0));
    assert!(report.final_row().unwrap().k >= report.k_cap + 3);
}

#[test]
fn same_seed_same_campaign() {
    let s = corpus::bubble_sort();
    let cfg = config(4, 1000, 99, StopRule::KMax);
    let stable = RunOptions {
        workers: 1,
        stable_time: true,
    };
    let a = run_campaign_with(&s.program, &s.table, &s.schema, &cfg, stable).unwrap();
    let b = run_campaign_with(&s.program, &s.table, &s.schema, &cfg, stable).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1.records(), b.1.records());
    assert!(a.0.rows.iter().all(|r| r.etime_ms == 0.0));

    let other = CampaignConfig { seed: 100, ..cfg };
    let c = run_campaign_with(&s.program, &s.table, &s.schema, &other, stable).unwrap();
    assert_ne!(a.1.records(), c.1.records());
}

#[test]
fn budget_admits_shapes_by_cost() {
    let linear = corpus::linear_search();
    let cfg = config(5, 10, 1, StopRule::KMax);
    assert_eq!(
        shape_for_budget(&linear.schema, 0, &cfg).unwrap(),
        vec![Shape(vec![0])]
    );
    assert_eq!(shape_for_budget(&linear.schema, 2, &cfg).unwrap().len(), 3);
    assert_eq!(shape_for_budget(&linear.schema, 99, &cfg).unwrap().len(), 6);

    // bubble of length 1 costs nothing, like the empty array
    let bubble = corpus::bubble_sort();
    assert_eq!(
        shape_for_budget(&bubble.schema, 0, &cfg).unwrap(),
        vec![Shape(vec![0]), Shape(vec![1])]
    );
}

#[test]
fn fixed_mode_uses_only_the_largest_shape() {
    let s = corpus::linear_search();
    let cfg = CampaignConfig {
        shape_mode: ShapeMode::Fixed,
        ..config(4, 1000, 3, StopRule::KMax)
    };
    let (_, set) = run_campaign(&s.program, &s.table, &s.schema, &cfg).unwrap();
    assert!(set.records().iter().all(|r| r.length == 9));
}

#[test]
fn report_csv_round_trip() {
    let s = corpus::merge_sorted();
    let (report, _) = run_campaign(
        &s.program,
        &s.table,
        &s.schema,
        &config(3, 1000, 5, StopRule::KMax),
    )
    .unwrap();
    let csv = rows_to_csv(&report.rows);
    assert!(csv.starts_with(b"k,test_cases,ufp,nfp,llp,etime_ms\n"));
    let back = rows_from_csv(&csv).unwrap();
    assert_eq!(back.len(), report.rows.len());
    for (a, b) in back.iter().zip(&report.rows) {
        assert_eq!(
            (a.k, a.test_cases, a.ufp, a.nfp, a.llp),
            (b.k, b.test_cases, b.ufp, b.nfp, b.llp)
        );
        assert!((a.etime_ms - b.etime_ms).abs() < 1e-3);
    }
    assert!(rows_from_csv(b"k,ufp\n1,2\n").is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let s = corpus::linear_search();
    for bad in [
        CampaignConfig {
            batch: 0,
            ..CampaignConfig::default()
        },
        CampaignConfig {
            domain: 0,
            ..CampaignConfig::default()
        },
        CampaignConfig {
            stop_rule: StopRule::Saturation { window: 0 },
            ..CampaignConfig::default()
        },
    ] {
        assert!(run_campaign(&s.program, &s.table, &s.schema, &bad).is_err());
    }
    let parsed =
        CampaignConfig::from_json(r#"{"domain": 5, "stop_rule": {"type": "longest-path"}}"#)
            .unwrap();
    assert_eq!(parsed.domain, 5);
    assert_eq!(parsed.stop_rule, StopRule::LongestPath);
    assert_eq!(
        CampaignConfig::from_json(&parsed.to_json()).unwrap(),
        parsed
    );
}

use qexp_cli::suite::{instance_seed, invariants, run_suite, run_suite_with};

#[test]
fn instances_do_not_depend_on_which_invariants_run() {
    let all = run_suite(&[2, 3], 6, 99, &[]).unwrap();
    let one = run_suite(&[2, 3], 6, 99, &["pythagorean".to_string()]).unwrap();
    let a = all.summary("pythagorean").unwrap();
    let b = one.summary("pythagorean").unwrap();
    assert_eq!(a.worst.to_bits(), b.worst.to_bits());
    assert_eq!(a.instances, b.instances);
}

#[test]
fn seeds_separate_invariants_dims_and_trials() {
    let s = instance_seed(7, "chain_rule", 2, 0);
    assert_ne!(s, instance_seed(7, "chain_rule", 2, 1));
    assert_ne!(s, instance_seed(7, "chain_rule", 3, 0));
    assert_ne!(s, instance_seed(7, "gradient", 2, 0));
    assert_ne!(s, instance_seed(8, "chain_rule", 2, 0));
    assert_eq!(s, instance_seed(7, "chain_rule", 2, 0));
}

#[test]
fn names_are_unique() {
    let inv = invariants();
    let mut names: Vec<_> = inv.iter().map(|i| i.name).collect();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), inv.len());
}

#[test]
fn largest_supported_dimension_passes() {
    let o = run_suite(&[8], 2, 3, &[]).unwrap();
    let failing: Vec<_> = o.summaries.iter().filter(|s| !s.passed()).map(|s| (s.name, s.worst)).collect();
    assert!(failing.is_empty(), "{failing:?}");
}

#[test]
fn vacuous_checks_are_skipped_in_dimension_one() {
    let o = run_suite(&[1], 3, 5, &[]).unwrap();
    assert!(o.passed());
    assert_eq!(o.summary("sufficiency_negative").unwrap().instances, 0);
}

#[test]
fn overridden_threshold_records_failures_with_inputs() {
    let o = run_suite_with(&[2], 4, 1, &["divergence_forms".into()], &[("divergence_forms".into(), -1.0)]).unwrap();
    let s = o.summary("divergence_forms").unwrap();
    assert_eq!(s.failed, 4);
    assert!(!s.failures.is_empty());
    assert!(s.failures.iter().all(|f| f.error.is_none() && f.inputs.len() == 3));
}

mod common;

use common::{all_schemes, random_instance, tiny_instance};
use edgecloud::baselines::{brute_force, combination_count, rsn_sample, BruteForceBudget, UniformSampler};
use edgecloud::model::{check_feasibility, compute_flows, OptionTable};
use edgecloud::sampling::best_of;
use edgecloud::{rng, Error};

#[test]
fn tiny_instances_have_729_combinations() {
    for seed in 0..5 {
        let inst = tiny_instance(seed);
        let table = OptionTable::build(&inst.topology).unwrap();
        assert_eq!(combination_count(&inst, &table), 729);
        let result = brute_force(&inst, BruteForceBudget::default()).unwrap();
        assert_eq!(result.n_combinations, 729);
        assert!(result.n_evaluated <= 729);
    }
}

#[test]
fn brute_force_matches_plain_enumeration() {
    for seed in 0..12 {
        let inst = tiny_instance(seed);
        let table = OptionTable::build(&inst.topology).unwrap();
        let mut expected: Option<f64> = None;
        for scheme in all_schemes(&inst, &table) {
            if check_feasibility(&inst, &table, &scheme).unwrap().feasible {
                let c = compute_flows(&inst, &table, &scheme).unwrap().cost_total;
                expected = Some(expected.map_or(c, |e: f64| e.min(c)));
            }
        }
        let got = brute_force(&inst, BruteForceBudget::default()).unwrap();
        assert_eq!(got.best.as_ref().map(|(_, c)| *c), expected, "seed {seed}");
        if let Some((scheme, cost)) = got.best {
            assert!(check_feasibility(&inst, &table, &scheme).unwrap().feasible);
            assert_eq!(compute_flows(&inst, &table, &scheme).unwrap().cost_total, cost);
        }
    }
}

#[test]
fn single_option_instance_has_one_combination() {
    let mut inst = random_instance(4, 1, 5, 2, 3);
    inst.topology.admissible = vec![vec![0b010], vec![0b100]];
    let table = OptionTable::build(&inst.topology).unwrap();
    assert_eq!(combination_count(&inst, &table), 1);
    let r = brute_force(&inst, BruteForceBudget::default()).unwrap();
    assert_eq!(r.n_combinations, 1);
    if let Some((scheme, _)) = r.best {
        assert!(scheme.option.iter().all(|&p| p == 0));
    }
}

#[test]
fn oversized_search_is_refused() {
    let inst = random_instance(5, 3, 12, 4, 4);
    match brute_force(&inst, BruteForceBudget { max_combinations: 1000 }) {
        Err(Error::BudgetExceeded { budget: 1000, required }) => assert!(required > 1000),
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn rsn_picks_each_of_three_options_a_third_of_the_time() {
    let inst = tiny_instance(1);
    let table = OptionTable::build(&inst.topology).unwrap();
    let sampler = UniformSampler::new(&inst, &table);
    let mut r = rng::stream(1, 0);
    let draws = 60_000;
    let mut counts = [[0usize; 3]; 6];
    for _ in 0..draws {
        for (row, &p) in sampler.draw(&mut r).option.iter().enumerate() {
            counts[row][p as usize] += 1;
        }
    }
    // Chi-square with 2 degrees of freedom per row; 0.001 quantile 13.82.
    for row in counts {
        assert!(row.iter().all(|&c| (c as f64 / draws as f64 - 1.0 / 3.0).abs() < 0.01));
        let e = draws as f64 / 3.0;
        let chi: f64 = row.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        assert!(chi < 13.82, "{row:?}");
    }
}

#[test]
fn rsn_samples_are_always_validly_encoded() {
    let inst = random_instance(8, 3, 10, 4, 4);
    let table = OptionTable::build(&inst.topology).unwrap();
    let mut r = rng::stream(8, 0);
    for _ in 0..200 {
        let s = rsn_sample(&inst, &table, &mut r);
        for (row, &p) in s.option.iter().enumerate() {
            let (k, n) = (row % 4, (row / 4) % 3);
            assert!((p as usize) < table.n_valid(k, n));
        }
    }
}

#[test]
fn sampling_never_beats_the_oracle() {
    for seed in 0..8 {
        let inst = tiny_instance(seed);
        let table = OptionTable::build(&inst.topology).unwrap();
        let oracle = brute_force(&inst, BruteForceBudget::default()).unwrap();
        let sampled =
            best_of(&UniformSampler::new(&inst, &table), &inst, &table, 200, &mut rng::stream(seed, 1)).unwrap();
        match (oracle.best_cost(), sampled.best_cost()) {
            (Some(o), Some(s)) => assert!(o <= s),
            (None, s) => assert_eq!(s, None),
            (Some(_), None) => {}
        }
    }
}

#[test]
fn best_of_keeps_the_cheapest_feasible_sample() {
    let inst = random_instance(9, 2, 20, 3, 4);
    let table = OptionTable::build(&inst.topology).unwrap();
    let r = best_of(&UniformSampler::new(&inst, &table), &inst, &table, 300, &mut rng::stream(9, 0)).unwrap();
    assert_eq!(r.n_samples, 300);
    assert_eq!(r.n_feasible, r.feasible_costs.len());
    if let Some(best) = r.best_cost() {
        assert!(r.feasible_costs.iter().all(|&c| best <= c));
    }
    assert!(best_of(&UniformSampler::new(&inst, &table), &inst, &table, 0, &mut rng::stream(9, 0)).is_err());
}

mod common;

use common::{random_instance, random_scheme, solve_lp_text, tiny_instance};
use edgecloud::baselines::{brute_force, BruteForceBudget};
use edgecloud::milp::{
    assignment_for_scheme, linearize, parse_lp, read_solution, write_lp, write_warmstart, Sense, VarKind,
};
use edgecloud::model::{check_feasibility, compute_flows, AllocationScheme, DemandTensor, OptionTable};
use edgecloud::{rng, Error};

fn lambda_pins(model: &edgecloud::milp::MilpModel, scheme: &AllocationScheme) -> Vec<(String, f64)> {
    let l = &model.layout;
    let mut pins = Vec::new();
    for (row, &p) in scheme.option.iter().enumerate() {
        for q in 0..l.n_valid[row] as usize {
            pins.push((model.variables[l.lambda_start[row] + q].name.clone(), if q == p as usize { 1.0 } else { 0.0 }));
        }
    }
    pins
}

#[test]
fn binary_count_and_exemption_budget() {
    let inst = random_instance(1, 2, 48, 3, 4);
    let table = OptionTable::build(&inst.topology).unwrap();
    let model = linearize(&inst).unwrap();
    let options: usize = (0..3).flat_map(|k| (0..2).map(move |n| (k, n))).map(|(k, n)| table.n_valid(k, n)).sum();
    let (nu, nt, el) = (2, 48, 4);
    assert_eq!(model.n_binaries(), nt * options + 2 * nu * el * nt + 2 * el * nt);
    let budgets: Vec<_> = model.constraints.iter().filter(|c| c.name.starts_with("budget_")).collect();
    assert_eq!(budgets.len(), 2 * nu * el + 2 * el);
    assert!(budgets.iter().all(|c| c.sense == Sense::Le && c.rhs == 2.0 && c.terms.len() == nt));
}

#[test]
fn fixing_the_options_reproduces_the_cost() {
    let mut n_feasible = 0;
    for seed in 0..6 {
        let inst = random_instance(seed, 2, 6, 2, 3);
        let table = OptionTable::build(&inst.topology).unwrap();
        let model = linearize(&inst).unwrap();
        let lp = write_lp(&model);
        let mut r = rng::stream(seed, 0);
        for _ in 0..3 {
            let scheme = random_scheme(&inst, &table, &mut r);
            let feasible = check_feasibility(&inst, &table, &scheme).unwrap().feasible;
            let solved = solve_lp_text(&lp, &lambda_pins(&model, &scheme));
            assert_eq!(solved.is_some(), feasible, "seed {seed}");
            if let Some((obj, _)) = solved {
                let cost = compute_flows(&inst, &table, &scheme).unwrap().cost_total;
                assert!((obj - cost).abs() <= 1e-6 * cost.max(1.0), "{obj} vs {cost}");
                n_feasible += 1;
            }
        }
    }
    assert!(n_feasible > 0);
}

#[test]
fn fixed_options_price_the_percentile_with_exemptions() {
    // With T = 20 one sample per series is exempt, so the solver must find
    // the exemption that bills the second-largest sample.
    let mut priced = 0;
    for seed in 0..4 {
        let inst = random_instance(seed, 1, 20, 1, 2);
        let table = OptionTable::build(&inst.topology).unwrap();
        let model = linearize(&inst).unwrap();
        let scheme = random_scheme(&inst, &table, &mut rng::stream(seed, 1));
        let solved = solve_lp_text(&write_lp(&model), &lambda_pins(&model, &scheme));
        let feasible = check_feasibility(&inst, &table, &scheme).unwrap().feasible;
        assert_eq!(solved.is_some(), feasible, "seed {seed}");
        if let Some((obj, _)) = solved {
            let cost = compute_flows(&inst, &table, &scheme).unwrap().cost_total;
            assert!((obj - cost).abs() <= 1e-6 * cost.max(1.0), "seed {seed}: {obj} vs {cost}");
            priced += 1;
        }
    }
    assert!(priced > 0);
}

#[test]
fn zero_demand_optimum_is_zero() {
    let mut inst = random_instance(2, 1, 4, 2, 2);
    inst.demands = DemandTensor::zeros(2, 1, 4);
    let (obj, _) = solve_lp_text(&write_lp(&linearize(&inst).unwrap()), &[]).unwrap();
    assert!(obj.abs() < 1e-9);
}

#[test]
fn solver_optimum_equals_brute_force() {
    for seed in 100..106 {
        let inst = tiny_instance(seed);
        let oracle = brute_force(&inst, BruteForceBudget::default()).unwrap();
        let solved = solve_lp_text(&write_lp(&linearize(&inst).unwrap()), &[]);
        match (oracle.best_cost(), solved) {
            (Some(c), Some((obj, _))) => assert!((c - obj).abs() <= 1e-6 * c.max(1.0), "seed {seed}: {c} vs {obj}"),
            (None, None) => {}
            (a, b) => panic!("seed {seed}: oracle {a:?} vs solver {:?}", b.map(|s| s.0)),
        }
    }
}

#[test]
fn lp_text_is_deterministic_and_matches_the_snapshot() {
    let inst = tiny_instance(7);
    let text = write_lp(&linearize(&inst).unwrap());
    assert_eq!(text, write_lp(&linearize(&inst).unwrap()));
    let golden = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/tiny-7.lp");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &text).unwrap();
    }
    let expected = std::fs::read_to_string(&golden).expect("snapshot exists (set UPDATE_GOLDEN=1 to create it)");
    assert_eq!(text, expected);
}

#[test]
fn lp_text_parses_back_to_the_same_model() {
    let inst = random_instance(3, 2, 20, 2, 4);
    let model = linearize(&inst).unwrap();
    let parsed = parse_lp(&write_lp(&model)).unwrap();
    assert_eq!(parsed.constraints.len(), model.constraints.len());
    assert_eq!(parsed.binaries.len(), model.n_binaries());
    for (p, c) in parsed.constraints.iter().zip(&model.constraints) {
        assert_eq!(p.name, c.name);
        assert_eq!((p.sense, p.rhs), (c.sense, c.rhs));
        let terms: Vec<(String, f64)> = c.terms.iter().map(|&(v, a)| (model.variables[v].name.clone(), a)).collect();
        assert_eq!(p.terms, terms);
    }
    let obj: Vec<(String, f64)> = model.objective.iter().map(|&(v, a)| (model.variables[v].name.clone(), a)).collect();
    assert_eq!(parsed.objective, obj);
}

#[test]
fn warm_start_is_a_feasible_one_hot_assignment() {
    let inst = random_instance(4, 2, 20, 2, 4);
    let table = OptionTable::build(&inst.topology).unwrap();
    let model = linearize(&inst).unwrap();
    let mut r = rng::stream(4, 0);
    let scheme = (0..500)
        .map(|_| random_scheme(&inst, &table, &mut r))
        .find(|s| check_feasibility(&inst, &table, s).unwrap().feasible)
        .expect("a feasible random scheme");
    let x = assignment_for_scheme(&model, &inst, &scheme).unwrap();
    assert!(model.violated(&x, 1e-9).is_empty(), "{:?}", model.violated(&x, 1e-9));
    let cost = compute_flows(&inst, &table, &scheme).unwrap().cost_total;
    assert!((model.objective_value(&x) - cost).abs() <= 1e-6 * cost.max(1.0));

    let text = write_warmstart(&model, &inst, &scheme).unwrap();
    let header: f64 = text.lines().find_map(|l| l.strip_prefix("# Objective value = ")).unwrap().parse().unwrap();
    assert!((header - cost).abs() <= 1e-6 * cost.max(1.0));
    let lam: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("lam_"))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(lam.len(), model.layout.n_valid.iter().map(|&s| s as usize).sum::<usize>());
    assert!(lam.iter().all(|&v| v == 0.0 || v == 1.0));
    assert_eq!(lam.iter().sum::<f64>() as usize, inst.n_rows());
    let binaries = model.variables.iter().filter(|v| v.kind == VarKind::Binary).count();
    assert_eq!(binaries, model.n_binaries());
}

#[test]
fn infeasible_scheme_assignment_is_flagged() {
    let mut inst = random_instance(5, 1, 20, 1, 2);
    inst.topology.admissible = vec![vec![0b01]];
    inst.demands.inbound.fill(inst.topology.edge_links[0][0].cap_max * 1.5);
    let model = linearize(&inst).unwrap();
    let x = assignment_for_scheme(&model, &inst, &AllocationScheme::uniform_option(20, 1, 1, 0)).unwrap();
    assert!(model.violated(&x, 1e-9).iter().any(|n| n.starts_with("zcap_") || n.starts_with("cap_")));
}

#[test]
fn solution_round_trip_and_rejections() {
    let inst = tiny_instance(2);
    let table = OptionTable::build(&inst.topology).unwrap();
    let model = linearize(&inst).unwrap();
    let scheme = AllocationScheme::uniform_option(3, 1, 2, 2);
    let text = write_warmstart(&model, &inst, &scheme).unwrap();
    let import = read_solution(&text, &inst).unwrap();
    assert_eq!(import.scheme, scheme);
    assert_eq!(import.cost, compute_flows(&inst, &table, &scheme).unwrap().cost_total);

    let fractional = text.replacen("lam_t0_n0_k0_p2 1", "lam_t0_n0_k0_p2 0.4", 1);
    assert!(matches!(read_solution(&fractional, &inst), Err(Error::Verification(_))));
    let missing: String =
        text.lines().filter(|l| !l.starts_with("lam_t1_n0_k1_p0 ")).map(|l| format!("{l}\n")).collect();
    assert!(matches!(read_solution(&missing, &inst), Err(Error::Format { .. })));
    let double = text.replacen("lam_t0_n0_k0_p0 0", "lam_t0_n0_k0_p0 1", 1);
    assert!(matches!(read_solution(&double, &inst), Err(Error::Verification(_))));
    let wrong: String = text
        .lines()
        .map(|l| {
            if l.starts_with("# Objective") {
                format!("# Objective value = {}\n", import.cost + 50.0)
            } else {
                format!("{l}\n")
            }
        })
        .collect();
    assert!(matches!(read_solution(&wrong, &inst), Err(Error::Verification(_))));
}

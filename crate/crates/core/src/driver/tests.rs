use super::*;
use crate::frontend::parse_while_program;
use crate::Rat;

fn run(src: &str) -> AnalysisResult<Rat> {
    let p: Program<Rat> = parse_while_program(src).unwrap();
    analyze(&p, &AnalysisConfig::default())
}

fn program(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/programs/{}.wprog", env!("CARGO_MANIFEST_DIR"), name)).unwrap()
}

#[test]
fn sort_terminates_with_both_ranking_shapes() {
    let r = run(&program("sort"));
    assert_eq!(r.verdict, Verdict::Terminating);
    let zero = Rat::from_integer(0.into());
    let shapes: Vec<(bool, bool)> = r
        .modules
        .iter()
        .map(|m| {
            let (ci, cj) = (m.rank.coeff("i"), m.rank.coeff("j"));
            (ci > zero && cj < zero, ci > zero && cj == zero)
        })
        .collect();
    assert!(shapes.iter().any(|s| s.0), "{:?}", shapes);
    assert!(shapes.iter().any(|s| s.1), "{:?}", shapes);
    assert!(progress_guarantee_check(&r.lassos));
    let s = &r.stats;
    assert_eq!(s.modules_trivial_rf + s.modules_nontrivial_rf, r.modules.len());
    assert!(s.lasso_analysis + s.module_construction + s.inclusion <= s.overall);
}

#[test]
fn diverge_is_unknown() {
    let r = run(&program("diverge"));
    match &r.verdict {
        Verdict::Unknown { lasso: Some(t), .. } => {
            let p: Program<Rat> = parse_while_program(&program("diverge")).unwrap();
            let texts: Vec<String> = t.normal_form().cycle.iter().map(|&l| p.stmts.text(l)).collect();
            assert_eq!(texts, ["assume true", "x := x + 1"]);
        }
        other => panic!("{:?}", other),
    }
}

#[test]
fn straight_line_needs_no_iteration() {
    let r = run(&program("straight"));
    assert_eq!(r.verdict, Verdict::Terminating);
    assert_eq!(r.stats.iterations, 0);
    assert!(r.modules.is_empty());
}

#[test]
fn two_counters() {
    let r = run(&program("counters"));
    assert_eq!(r.verdict, Verdict::Terminating);
    assert!(r.stats.iterations <= 6, "{}", r.stats.iterations);
}

#[test]
fn iteration_cap_is_budget() {
    let p: Program<Rat> = parse_while_program(&program("sort")).unwrap();
    let cfg = AnalysisConfig { max_iterations: 1, emit_remainder: true, ..Default::default() };
    let r = analyze(&p, &cfg);
    assert!(matches!(r.verdict, Verdict::BudgetExhausted { .. }), "{:?}", r.verdict);
    assert_eq!(r.modules.len(), 1);
    assert!(r.remainder.is_some());
}

#[test]
fn progress_check_detects_repeats() {
    use crate::program::Letter;
    let a = LassoTrace::new(vec![Letter(0)], vec![Letter(1), Letter(2)]);
    let b = LassoTrace::new(vec![Letter(0), Letter(1)], vec![Letter(2), Letter(1)]);
    let c = LassoTrace::new(vec![], vec![Letter(1)]);
    assert!(!progress_guarantee_check(&[a.clone(), a.clone()]));
    assert!(!progress_guarantee_check(&[a.clone(), b]));
    assert!(progress_guarantee_check(&[a, c]));
}

#[test]
fn regression_programs() {
    for name in ["havoc_dec", "branch_dec", "nested", "upcount", "choice", "step2", "phases"] {
        let r = run(&program(name));
        assert_eq!(r.verdict, Verdict::Terminating, "{}", name);
    }
}

#[test]
fn budget_exhaustion_keeps_valid_modules() {
    // needs a ranking function over both branches at once; single-branch
    // modules pile up until the state budget runs out
    let p: Program<Rat> = parse_while_program(&program("gcd")).unwrap();
    let cfg = AnalysisConfig { state_budget: 20_000, ..Default::default() };
    let r = analyze(&p, &cfg);
    assert!(matches!(r.verdict, Verdict::BudgetExhausted { .. }), "{:?}", r.verdict);
    assert!(!r.modules.is_empty());
    for m in &r.modules {
        assert!(check_certificate(m).is_empty());
    }
}

use std::sync::Arc;

use super::*;
use crate::automata::{is_empty, lasso_member, module_to_buchi};
use crate::frontend::{parse_statement, parse_while_program};
use crate::program::{Letter, Statement};
use crate::scalar::int;
use crate::Rat;

fn table(stmts: &[&str]) -> (StatementTable<Rat>, Vec<Letter>) {
    let mut t = StatementTable::new();
    let ls = stmts
        .iter()
        .map(|s| t.intern(parse_statement::<Rat>(s).unwrap()))
        .collect();
    (t, ls)
}

fn lasso(stem: &[&str], cycle: &[&str]) -> (StatementTable<Rat>, LassoTrace) {
    let all: Vec<&str> = stem.iter().chain(cycle.iter()).copied().collect();
    let (t, ls) = table(&all);
    let (u, v) = ls.split_at(stem.len());
    (t, LassoTrace::new(u.to_vec(), v.to_vec()))
}

fn ranked(r: &RankerResult<Rat>) -> &RankingFunction<Rat> {
    match r {
        RankerResult::Ranked { f, .. } => f,
        other => panic!("expected a ranking function, got {:?}", other),
    }
}

#[test]
fn summary_of_sort_lasso() {
    let (t, l) = lasso(&["assume i >= 1", "j := 1"], &["assume i - j >= 1", "j := j + 1"]);
    let rel = summarize(&l, &t).unwrap();
    assert_eq!(rel.stem_post.to_string(), "i >= 1 && j == 1");
    // j <= i - 1, j' = j + 1, i' = i
    let expect = crate::frontend::parse_predicate::<Rat>("{j <= i - 1 && j' == j + 1 && i' == i}");
    let got = crate::logic::Predicate::from_cube(rel.loop_rel.clone());
    assert!(crate::logic::equivalent(&got, &expect.unwrap()).unwrap(), "{}", got);
}

#[test]
fn false_guard_makes_loop_unsat() {
    let (t, l) = lasso(&[], &["assume false"]);
    let rel = summarize(&l, &t).unwrap();
    assert!(rel.loop_rel.is_falsum());
}

#[test]
fn countdown_is_ranked_by_x() {
    let (t, l) = lasso(&[], &["assume x >= 0", "x := x - 1"]);
    let r = synthesize(&summarize(&l, &t).unwrap());
    let f = ranked(&r);
    assert!(f.coeff("x") > int(0));
}

#[test]
fn increment_has_no_rank() {
    let (t, l) = lasso(&[], &["x := x + 1"]);
    assert_eq!(synthesize(&summarize(&l, &t).unwrap()), RankerResult::NoRankFound);
    let a = analyze_lasso(&l, &t).unwrap();
    assert_eq!(a.result, RankerResult::NoRankFound);
}

#[test]
fn contradictory_guard_is_infeasible() {
    let (t, l) = lasso(&[], &["assume x >= 1", "assume x <= 0"]);
    let r = synthesize(&summarize(&l, &t).unwrap());
    assert!(matches!(r, RankerResult::InfeasibleLoop { .. }));
}

#[test]
fn infeasible_through_stem() {
    let (t, l) = lasso(&["x := 0"], &["assume x >= 1", "x := x + 1"]);
    let rel = summarize(&l, &t).unwrap();
    match synthesize(&rel) {
        RankerResult::InfeasibleLoop { inv } => assert_eq!(inv.to_string(), "x <= 0"),
        r => panic!("{:?}", r),
    }
}

#[test]
fn sort_lasso_is_ranked_by_i_minus_j() {
    let (t, l) = lasso(&["assume i >= 1", "j := 1"], &["assume i - j >= 1", "j := j + 1"]);
    let f = ranked(&synthesize(&summarize(&l, &t).unwrap())).clone();
    assert!(f.coeff("i") > int(0));
    assert!(f.coeff("j") < int(0));
    assert_eq!(f.coeff("i"), -f.coeff("j"));
}

#[test]
fn needs_supporting_invariant() {
    // y is fixed negative by the stem; x decreases through x := x + y
    let (t, l) = lasso(&["y := -1"], &["assume x >= 0", "x := x + y"]);
    let rel = summarize(&l, &t).unwrap();
    match synthesize(&rel) {
        RankerResult::Ranked { f, inv } => {
            assert!(f.coeff("x") > int(0));
            assert!(!inv.is_empty());
            assert!(validate(&rel, &f, &inv));
        }
        r => panic!("{:?}", r),
    }
}

#[test]
fn synthesized_invariant_inequality() {
    // stem gives y >= 1 only through a non-inductive equality y == 5;
    // the loop keeps y >= 1 but not y == 5.
    let (t, l) = lasso(&["y := 5"], &["assume x >= 0", "x := x - y", "y := y + 1"]);
    let rel = summarize(&l, &t).unwrap();
    let r = synthesize(&rel);
    let f = ranked(&r);
    assert!(f.coeff("x") > int(0));
}

#[test]
fn doubling_rescues_alternating_loop() {
    // x alternates sign-dependent steps: one iteration does not decrease
    // any affine function, two do.
    let (t, l) = lasso(&[], &["assume x >= 0", "x := -x + 1", "assume x <= 0", "x := -x - 2"]);
    let a = analyze_lasso(&l, &t).unwrap();
    assert!(matches!(a.result, RankerResult::Ranked { .. } | RankerResult::InfeasibleLoop { .. }));
}

#[test]
fn deterministic() {
    let (t, l) = lasso(&["assume i >= 1", "j := 1"], &["assume i - j >= 1", "j := j + 1"]);
    let rel = summarize(&l, &t).unwrap();
    assert_eq!(synthesize(&rel), synthesize(&rel));
}

#[test]
fn lasso_module_of_example_four() {
    let p = parse_while_program::<Rat>(include_str!("../../tests/programs/sort.wprog")).unwrap();
    let s = |x: &str| p.stmts.lookup(x).unwrap();
    let t = LassoTrace::new(
        vec![s("assume i >= 1"), s("j := 1")],
        vec![s("assume i - j >= 1"), s("j := j + 1")],
    );
    let m = lasso_module_of(&t, &p.stmts);
    assert_eq!(m.module.program.num_locations(), 4);
    assert_eq!(m.final_loc(), 2);
    let b = module_to_buchi(&m.module);
    let found = is_empty(&b).unwrap().unwrap();
    assert!(found.same_word(&t));
    assert!(lasso_member(&b, &t).unwrap());
}

#[test]
fn empty_stem_is_unrolled() {
    let (t, l) = lasso(&[], &["assume x >= 1", "x := x - 1"]);
    let m = lasso_module_of(&l, &Arc::new(t));
    assert_eq!(m.module.program.num_locations(), 4);
    assert_eq!(m.final_loc(), 2);
    assert!(lasso_member(&module_to_buchi(&m.module), &l).unwrap());
}

#[test]
fn precedes_order() {
    type R = RankingFunction<Rat>;
    assert!(R::precedes(&Some(int(3)), &None));
    assert!(!R::precedes(&None, &None));
    assert!(R::precedes(&Some(int(-5)), &Some(int(0))));
    assert!(!R::precedes(&Some(int(-5)), &Some(int(-1))));
    let _ = Statement::<Rat>::Havoc(Var::new("x"));
}

use super::*;
use crate::program::Statement;
use crate::Rat;

const SORT: &str = include_str!("../../tests/programs/sort.wprog");
const SORT_CFG: &str = include_str!("../../tests/programs/sort.cfg");

fn wprog(src: &str) -> Program<Rat> {
    parse_while_program(src).unwrap()
}

fn texts(p: &Program<Rat>) -> Vec<String> {
    let mut v: Vec<String> = p.alphabet().into_iter().map(|l| p.stmts.text(l)).collect();
    v.sort();
    v
}

#[test]
fn sort_lowers_to_five_locations_six_edges() {
    let p = wprog(SORT);
    assert_eq!(p.num_locations(), 5);
    assert_eq!(p.edges.len(), 6);
    assert_eq!(
        texts(&p),
        vec![
            "assume i - j <= 0",
            "assume i - j >= 1",
            "assume i >= 1",
            "i := i - 1",
            "j := 1",
            "j := j + 1",
        ]
    );
}

#[test]
fn empty_body_is_one_location() {
    let p = wprog("program e(); { }");
    assert_eq!(p.num_locations(), 1);
    assert!(p.edges.is_empty());
    assert_eq!(render_cfg(&p), "init l0;\n");
}

#[test]
fn not_equal_splits_entry_edge() {
    let p = wprog("program d(int x); { while (x != 0) { x := x - 1; } }");
    let entries: Vec<String> = p
        .successors(p.init)
        .map(|e| p.stmts.text(e.1))
        .collect();
    assert_eq!(entries.len(), 2);
    assert!(entries.contains(&"assume x <= -1".to_string()));
    assert!(entries.contains(&"assume x >= 1".to_string()));
}

#[test]
fn while_true_has_no_exit() {
    let p = wprog("program d(int x); { while (true) { x := x + 1; } }");
    assert_eq!(p.num_locations(), 2);
    assert_eq!(texts(&p), vec!["assume true", "x := x + 1"]);
}

#[test]
fn cfg_matches_wprog_for_sort() {
    let a = wprog(SORT);
    let b: Program<Rat> = parse_cfg(SORT_CFG).unwrap();
    assert!(isomorphic(&a, &b));
    assert!(a.same_shape(&b));
}

#[test]
fn cfg_self_loop() {
    let p: Program<Rat> = parse_cfg("init l0; l0 -> l0 : assume x >= 0;").unwrap();
    assert_eq!(p.num_locations(), 1);
    assert_eq!(p.edges.len(), 1);
}

#[test]
fn cfg_undeclared_location() {
    let e = parse_cfg::<Rat>("init l0; l0 -> l9 : x := 1;").unwrap_err();
    assert!(matches!(e, FrontendError::UndeclaredLocation { ref name, .. } if name == "l9"));
    let e = parse_cfg::<Rat>("l0 -> l0 : x := 1;").unwrap_err();
    assert_eq!(e, FrontendError::MissingInit);
    let e = parse_cfg::<Rat>("init l0; init l1;").unwrap_err();
    assert!(matches!(e, FrontendError::DuplicateInit { .. }));
}

#[test]
fn sort_renders_six_edge_lines() {
    let r = render_cfg(&wprog(SORT));
    assert_eq!(r.lines().filter(|l| l.contains("->")).count(), 6);
    let back: Program<Rat> = parse_cfg(&r).unwrap();
    assert!(isomorphic(&wprog(SORT), &back));
}

#[test]
fn errors_carry_positions() {
    let e = parse_while_program::<Rat>("program p(int x);\n{ x := x * x; }").unwrap_err();
    assert!(matches!(e, FrontendError::Nonlinear { line: 2, .. }));
    let e = parse_while_program::<Rat>("program p(int oldrnk); { }").unwrap_err();
    assert!(matches!(e, FrontendError::Reserved { line: 1, .. }));
    let e = parse_while_program::<Rat>("program p(int x); { x := ; }").unwrap_err();
    assert!(matches!(e, FrontendError::Syntax { line: 1, .. }));
}

#[test]
fn interning_is_by_text() {
    let p = wprog("program p(int x); { while (x > 0) { x--; x := x - 1; } }");
    // x-- and x := x - 1 are the same letter
    assert_eq!(p.alphabet().len(), 2);
    assert_eq!(p.edges.len(), 3);
}

#[test]
fn parsing_is_deterministic() {
    let a = wprog(SORT);
    let b = wprog(SORT);
    assert_eq!(render_cfg(&a), render_cfg(&b));
}

#[test]
fn strict_guards_are_tightened() {
    let s: Statement<Rat> = parse_statement("assume 2*x < 3").unwrap();
    assert_eq!(s.to_string(), "assume x <= 1");
}

#[test]
fn predicate_round_trip() {
    for text in [
        "{oldrnk == inf}",
        "{oldrnk == inf || i - j - oldrnk <= -1 && oldrnk >= 0}",
        "{false}",
        "{true}",
        "{oldrnk < inf && x >= -1/2}",
    ] {
        let p: crate::logic::Predicate<Rat> = parse_predicate(text).unwrap();
        let again: crate::logic::Predicate<Rat> = parse_predicate(&p.to_string()).unwrap();
        assert_eq!(p, again, "{}", text);
    }
}

#[test]
fn disjunctive_condition_splits() {
    let p = wprog("program p(int x, int y); { while (x > 0 || y > 0) { x--; y--; } }");
    assert_eq!(p.successors(p.init).count(), 2);
}

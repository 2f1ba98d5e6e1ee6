use proptest::prelude::*;

use tdgen::corpus;
use tdgen::dsl::{
    assign_labels, compare_labels, index_for_label, label_for, parse, pretty, DecisionKind,
    FrontendError, Span, StmtKind,
};

const PRELUDE: &str = "fn gen(a: int[], n: int) {\n    let x = 0;\n    let y = 1;\n";

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0i64..50).prop_map(|v| v.to_string()),
        Just("n".to_string()),
        Just("x".to_string()),
        Just("y".to_string()),
        Just("a[x]".to_string()),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        let ops = prop::sample::select(vec![
            "+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||",
        ]);
        prop_oneof![
            (inner.clone(), ops, inner.clone()).prop_map(|(l, o, r)| format!("({l} {o} {r})")),
            inner.clone().prop_map(|e| format!("!{e}")),
            inner.prop_map(|e| format!("-{e}")),
        ]
    })
}

/// Statement source plus the number of decision statements it contains.
fn stmt() -> impl Strategy<Value = (String, usize)> {
    let simple = prop_oneof![
        expr().prop_map(|e| (format!("x = {e};"), 0)),
        expr().prop_map(|e| (format!("y = {e};"), 0)),
        expr().prop_map(|e| (format!("a[y] = {e};"), 0)),
    ];
    simple.prop_recursive(3, 24, 3, |inner| {
        let block = prop::collection::vec(inner, 0..3).prop_map(|stmts| {
            let n = stmts.iter().map(|s| s.1).sum::<usize>();
            let body: Vec<String> = stmts.into_iter().map(|s| s.0).collect();
            (format!("{{ {} }}", body.join(" ")), n)
        });
        prop_oneof![
            (expr(), block.clone()).prop_map(|(c, b)| (format!("if ({c}) {}", b.0), b.1 + 1)),
            (expr(), block.clone(), block.clone())
                .prop_map(|(c, t, e)| (format!("if ({c}) {} else {}", t.0, e.0), t.1 + e.1 + 1)),
            (expr(), block.clone()).prop_map(|(c, b)| (format!("while ({c}) {}", b.0), b.1 + 1)),
            (expr(), expr(), expr(), block)
                .prop_map(|(i, c, u, b)| (format!("for (x = {i}; {c}; y = {u}) {}", b.0), b.1 + 1)),
        ]
    })
}

fn program() -> impl Strategy<Value = (String, usize)> {
    prop::collection::vec(stmt(), 0..5).prop_map(|stmts| {
        let n = stmts.iter().map(|s| s.1).sum();
        let body: Vec<String> = stmts.into_iter().map(|s| s.0).collect();
        (
            format!("{PRELUDE}    {}\n    return x;\n}}\n", body.join("\n    ")),
            n,
        )
    })
}

proptest! {
    #[test]
    fn pretty_output_reparses_to_the_same_tree((src, _) in program()) {
        let p = parse(&src).expect("generated program parses");
        let printed = pretty(&p);
        let again = parse(&printed).expect("pretty output parses");
        prop_assert_eq!(p.without_spans(), again.without_spans());
        prop_assert_eq!(pretty(&again), printed);
    }

    #[test]
    fn one_table_entry_per_decision((src, decisions) in program()) {
        let p = parse(&src).unwrap();
        let table = assign_labels(&p);
        prop_assert_eq!(table.len(), decisions);
        prop_assert_eq!(&table, &assign_labels(&p));
        for (i, d) in table.entries.iter().enumerate() {
            prop_assert_eq!(d.id.index(), i);
            prop_assert_eq!(&d.label, &label_for(i));
        }
        for w in table.entries.windows(2) {
            prop_assert!((w[0].span.line, w[0].span.col) < (w[1].span.line, w[1].span.col));
            prop_assert_eq!(compare_labels(&w[0].label, &w[1].label), std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn label_index_round_trip(i in 0usize..1_000_000) {
        prop_assert_eq!(index_for_label(&label_for(i)), Some(i));
    }
}

#[test]
fn twenty_seven_ifs_reach_aa() {
    let body: String = (0..27).map(|_| "if (n) { n = 1; }\n").collect();
    let p = parse(&format!("fn f(n: int) {{\n{body}}}")).unwrap();
    let table = assign_labels(&p);
    let labels: Vec<&str> = table.entries.iter().map(|d| d.label.as_str()).collect();
    assert_eq!(labels[0], "a");
    assert_eq!(labels[25], "z");
    assert_eq!(labels[26], "aa");
}

#[test]
fn corpus_tables() {
    let linear = corpus::linear_search();
    assert_eq!(linear.program.params.len(), 3);
    let kinds: Vec<_> = linear
        .table
        .entries
        .iter()
        .map(|d| (d.label.as_str(), d.kind, d.innermost_loop))
        .collect();
    assert_eq!(
        kinds,
        [
            ("a", DecisionKind::Loop, true),
            ("b", DecisionKind::Branch, false)
        ]
    );

    let matrix = corpus::matrix_mult();
    let innermost: Vec<_> = matrix
        .table
        .entries
        .iter()
        .map(|d| (d.label.as_str(), d.innermost_loop))
        .collect();
    assert_eq!(innermost, [("a", false), ("b", false), ("c", true)]);
    assert_eq!(matrix.table.entries[2].nesting_depth, 2);

    let bubble = corpus::bubble_sort();
    let fors = bubble
        .program
        .body
        .stmts
        .iter()
        .filter(|s| matches!(s.kind, StmtKind::For { .. }))
        .count();
    assert_eq!(fors, 1);
    assert_eq!(bubble.table.len(), 3);
    assert!(bubble
        .table
        .is_innermost_loop(bubble.table.by_label("b").unwrap().id));
}

#[test]
fn empty_source_fails_at_origin() {
    match parse("") {
        Err(FrontendError::Parse(e)) => {
            assert_eq!(e.span, Span::new(1, 1));
            assert!(e.expected.iter().any(|t| t.contains("fn")), "{e}");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn parse_error_reports_position_and_expectation() {
    let err = parse("fn f(n: int) {\n    n = ;\n}").unwrap_err();
    assert!(matches!(err, FrontendError::Parse(_)));
    assert_eq!(err.span(), Span::new(2, 9));
    assert!(err.to_string().starts_with("2:9"), "{err}");
}

#[test]
fn semantic_errors() {
    for (src, needle) in [
        ("fn f(n: int) { n = g(n); }", "call"),
        ("fn f(n: int) { m = 1; }", "m"),
        ("fn f(n: int) { if (q) { } }", "q"),
        ("fn f(a: int[]) { if (a) { } }", "a"),
        ("fn f(n: int) { n = n[0]; }", "n"),
        ("fn f(n: int, n: int) { }", "n"),
    ] {
        match parse(src) {
            Err(FrontendError::Semantic(e)) => assert!(e.message.contains(needle), "{src}: {e}"),
            other => panic!("{src}: expected a semantic error, got {other:?}"),
        }
    }
}

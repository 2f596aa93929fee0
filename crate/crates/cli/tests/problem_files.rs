use brstkit_cli::problem::{parse_json, parse_problem, render_text, Kind, VariableSpec};
use brstkit_cli::{load, ProblemSpec, Task, Window};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = ProblemSpec> {
    (1usize..4, 0usize..3, 0usize..3, (1i32..5, 1i32..6, 1i32..4, 1usize..9), proptest::sample::subsequence(Task::ALL.to_vec(), 1..=Task::ALL.len()))
        .prop_map(|(pairs, odd_pairs, lone, (d, s, g, n), tasks)| {
            let mut variables = Vec::new();
            for k in 1..=pairs {
                variables.push(VariableSpec { name: format!("q{k}"), kind: Kind::Q, partner: Some(format!("p{k}")) });
                variables.push(VariableSpec { name: format!("p{k}"), kind: Kind::P, partner: Some(format!("q{k}")) });
            }
            for k in 1..=odd_pairs {
                variables.push(VariableSpec { name: format!("a{k}"), kind: Kind::Odd, partner: Some(format!("b{k}")) });
                variables.push(VariableSpec { name: format!("b{k}"), kind: Kind::Odd, partner: Some(format!("a{k}")) });
            }
            for k in 1..=lone {
                variables.push(VariableSpec { name: format!("c{k}"), kind: Kind::Odd, partner: None });
            }
            let constraints = (1..=pairs).map(|k| format!("q{k}*p{k}")).collect();
            ProblemSpec { variables, constraints, window: Window { max_weight: d, depth: s, ghost_cap: g, max_order: n }, tasks }
        })
}

proptest! {
    #[test]
    fn text_form_round_trips(spec in spec_strategy()) {
        let (parsed, _) = parse_problem(&render_text(&spec)).unwrap();
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn json_form_round_trips(spec in spec_strategy()) {
        let parsed = parse_json(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(parsed, spec);
    }

    #[test]
    fn displayed_constraints_parse_back(spec in spec_strategy()) {
        let p = load(&render_text(&spec)).unwrap();
        let shown = ProblemSpec { constraints: p.constraints.iter().map(ToString::to_string).collect(), ..spec };
        prop_assert_eq!(load(&render_text(&shown)).unwrap().constraints, p.constraints);
    }
}

//! Shared inputs for the benchmarks.

/// Facts of a path graph with `nodes` nodes and unit costs.
pub fn chain_facts(nodes: usize) -> String {
    let mut text = String::new();
    for i in 0..nodes {
        text.push_str(&format!("node({i}). cost({i},{}).\n", i % 7 + 1));
        if i + 1 < nodes {
            text.push_str(&format!("edge({i},{}).\n", i + 1));
        }
    }
    text
}

/// Transitive closure with negation and an aggregate on top.
pub const CLOSURE_PROGRAM: &str = "
reach(X,Y) :- edge(X,Y).
reach(X,Z) :- reach(X,Y), edge(Y,Z).
sink(X) :- node(X), not edge(X,_).
out(X,N) :- node(X), N = #count{Y : reach(X,Y)}.
";

/// A template with loops, formatting and a nested conditional.
pub const TEMPLATE: &str = r#"{{+ separator(",\n") }}{{+ sort(2) }}{ nodes: [ {{= show({{f"{ id: ${X}, cost: ${C:%d}, leaf: {{= "true" : not edge(${X},_) }}{{= "false" : edge(${X},_) }} }"}}, X) : cost(X,C) }} ],
  total: {{= S : S = #sum{C, X : cost(X,C)} }} }"#;

/// A relaxed JSON document of roughly `items` array entries.
pub fn relaxed_document(items: usize) -> String {
    let mut text = String::from("// generated\n{ items: [\n");
    for i in 0..items {
        text.push_str(&format!("  {{ id: n{i}, label: \"node {i}\", weight: {}.5, tags: [a b c] }}\n", i % 13));
    }
    text.push_str("] }\n");
    text
}

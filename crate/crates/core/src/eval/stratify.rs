use std::collections::{BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;

use super::EvalError;
use crate::asp::{Head, Literal, LiteralKind, Program};

pub type Predicate = (String, usize);

/// Predicates grouped into layers; every layer only depends negatively (or
/// through aggregates) on earlier layers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification {
    pub strata: Vec<BTreeSet<Predicate>>,
}

fn collect_dependencies(literals: &[Literal], strict: bool, out: &mut Vec<(Predicate, bool)>) {
    for literal in literals {
        match &literal.kind {
            LiteralKind::Atom(atom) => out.push((atom.signature(), strict || literal.negated)),
            LiteralKind::Aggregate(agg) => {
                for element in &agg.elements {
                    collect_dependencies(&element.condition, true, out);
                }
            }
            LiteralKind::Comparison { .. } => {}
        }
    }
}

pub(crate) fn display_predicate((name, arity): &Predicate) -> String {
    format!("{name}/{arity}")
}

/// Computes the strata of the rules with atom heads.
pub fn stratify(program: &Program) -> Result<Stratification, EvalError> {
    let mut graph: DiGraph<Predicate, bool> = DiGraph::new();
    let mut nodes: HashMap<Predicate, NodeIndex> = HashMap::new();
    let mut node = |graph: &mut DiGraph<Predicate, bool>, p: Predicate| {
        *nodes.entry(p.clone()).or_insert_with(|| graph.add_node(p))
    };
    let mut heads = BTreeSet::new();
    for rule in &program.rules {
        let Head::Atom(head) = &rule.head else { continue };
        let from = node(&mut graph, head.signature());
        heads.insert(head.signature());
        let mut deps = Vec::new();
        collect_dependencies(&rule.body, false, &mut deps);
        for (pred, strict) in deps {
            let to = node(&mut graph, pred);
            graph.add_edge(from, to, strict);
        }
    }

    let mut strata = Vec::new();
    // dependencies come out first
    for component in tarjan_scc(&graph) {
        let members: BTreeSet<NodeIndex> = component.iter().copied().collect();
        for &n in &component {
            for edge in graph.edges(n) {
                if *edge.weight() && members.contains(&edge.target()) {
                    let cycle = cycle_through(&graph, &members, n, edge.target());
                    return Err(EvalError::NotStratified {
                        cycle: cycle.iter().map(|&i| display_predicate(&graph[i])).collect(),
                    });
                }
            }
        }
        let preds: BTreeSet<Predicate> =
            component.iter().map(|&i| graph[i].clone()).filter(|p| heads.contains(p)).collect();
        if !preds.is_empty() {
            strata.push(preds);
        }
    }
    Ok(Stratification { strata })
}

/// `from -> to -> ... -> from`, staying inside the component.
fn cycle_through(
    graph: &DiGraph<Predicate, bool>,
    members: &BTreeSet<NodeIndex>,
    from: NodeIndex,
    to: NodeIndex,
) -> Vec<NodeIndex> {
    let mut parent: HashMap<NodeIndex, NodeIndex> = HashMap::new();
    let mut queue = VecDeque::from([to]);
    let mut seen = BTreeSet::from([to]);
    while let Some(n) = queue.pop_front() {
        if n == from {
            break;
        }
        for next in graph.neighbors(n) {
            if members.contains(&next) && seen.insert(next) {
                parent.insert(next, n);
                queue.push_back(next);
            }
        }
    }
    let mut path = vec![from];
    let mut at = from;
    while at != to {
        at = parent[&at];
        path.push(at);
    }
    path.push(from);
    path.reverse();
    path
}

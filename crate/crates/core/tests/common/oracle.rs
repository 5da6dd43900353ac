//! Random stratified programs and a brute-force stable model search.

use std::collections::BTreeSet;

use asp_mustache::asp::{parse_facts, parse_program};
use asp_mustache::eval::{evaluate_with, Strategy};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PREDICATES: usize = 6;
const DOMAIN: [u8; 2] = [1, 2];

type Atom = (usize, u8);

/// A rule over `q<i>(X)`, instantiated for each domain value.
pub struct GenRule {
    head: usize,
    positive: Vec<usize>,
    negative: Vec<usize>,
    /// Fixed argument instead of the variable `X`.
    ground: Option<u8>,
}

impl GenRule {
    pub fn text(&self) -> String {
        let arg = self.ground.map_or("X".to_string(), |d| d.to_string());
        let mut body: Vec<String> = self.positive.iter().map(|p| format!("q{p}({arg})")).collect();
        body.extend(self.negative.iter().map(|p| format!("not q{p}({arg})")));
        if self.ground.is_none() && self.positive.is_empty() {
            body.insert(0, format!("dom({arg})"));
        }
        if body.is_empty() {
            format!("q{}({arg}).", self.head)
        } else {
            format!("q{}({arg}) :- {}.", self.head, body.join(", "))
        }
    }

    fn instances(&self) -> Vec<(Atom, Vec<Atom>, Vec<Atom>)> {
        let values: Vec<u8> = self.ground.map_or(DOMAIN.to_vec(), |d| vec![d]);
        values
            .into_iter()
            .map(|d| {
                (
                    (self.head, d),
                    self.positive.iter().map(|&p| (p, d)).collect(),
                    self.negative.iter().map(|&p| (p, d)).collect(),
                )
            })
            .collect()
    }
}

pub fn random_program(rng: &mut StdRng) -> Vec<GenRule> {
    let levels: Vec<usize> = (0..PREDICATES).map(|_| rng.gen_range(0..3)).collect();
    let count = rng.gen_range(1..10);
    (0..count)
        .map(|_| {
            let head = rng.gen_range(0..PREDICATES);
            let positive = (0..rng.gen_range(0..3))
                .map(|_| rng.gen_range(0..PREDICATES))
                .filter(|&p| levels[p] <= levels[head])
                .collect();
            let negative = (0..rng.gen_range(0..3))
                .map(|_| rng.gen_range(0..PREDICATES))
                .filter(|&p| levels[p] < levels[head])
                .collect();
            let ground = rng.gen_bool(0.3).then(|| DOMAIN[rng.gen_range(0..DOMAIN.len())]);
            GenRule { head, positive, negative, ground }
        })
        .collect()
}

fn least_model(definite: &[(Atom, Vec<Atom>)]) -> BTreeSet<Atom> {
    let mut model = BTreeSet::new();
    loop {
        let before = model.len();
        for (head, body) in definite {
            if body.iter().all(|a| model.contains(a)) {
                model.insert(*head);
            }
        }
        if model.len() == before {
            return model;
        }
    }
}

pub fn stable_models(rules: &[GenRule]) -> Vec<BTreeSet<Atom>> {
    let universe: Vec<Atom> = (0..PREDICATES).flat_map(|p| DOMAIN.map(|d| (p, d))).collect();
    let ground: Vec<_> = rules.iter().flat_map(GenRule::instances).collect();
    let mut found = Vec::new();
    for mask in 0u32..(1 << universe.len()) {
        let candidate: BTreeSet<Atom> =
            universe.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| *a).collect();
        let reduct: Vec<(Atom, Vec<Atom>)> = ground
            .iter()
            .filter(|(_, _, neg)| neg.iter().all(|a| !candidate.contains(a)))
            .map(|(h, pos, _)| (*h, pos.clone()))
            .collect();
        if least_model(&reduct) == candidate {
            found.push(candidate);
        }
    }
    found
}

/// Checks `rounds` random programs under both strategies; returns the
/// largest number of ground atoms seen in a program's universe.
pub fn check_random_programs(seed: u64, rounds: usize) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let facts = parse_facts("dom(1). dom(2).").map_err(|e| e.to_string())?;
    for round in 0..rounds {
        let rules = random_program(&mut rng);
        let text: String = rules.iter().map(GenRule::text).collect::<Vec<_>>().join("\n");
        let program = parse_program(&text).map_err(|e| format!("round {round}: {e}\n{text}"))?;
        let models = stable_models(&rules);
        if models.len() != 1 {
            return Err(format!("round {round}: {} stable models\n{text}", models.len()));
        }
        let expected: BTreeSet<String> =
            models[0].iter().map(|(p, d)| format!("q{p}({d})")).chain(["dom(1)".into(), "dom(2)".into()]).collect();
        for strategy in [Strategy::SemiNaive, Strategy::Naive] {
            let got: BTreeSet<String> = evaluate_with(&program, &facts, strategy)
                .map_err(|e| format!("round {round}: {e}\n{text}"))?
                .iter()
                .map(ToString::to_string)
                .collect();
            if got != expected {
                return Err(format!("round {round} ({strategy:?}): got {got:?}, expected {expected:?}\n{text}"));
            }
        }
    }
    Ok(PREDICATES * DOMAIN.len())
}

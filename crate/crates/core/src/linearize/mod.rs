//! Abstract method linearization and invocation inlining.
//!
//! Abstract methods get the concatenated content of their implementers,
//! visiting types so that every implementer is final before it is read.
//! Invocation inlining then runs against that table.

mod graph;
mod inline;
mod signature;

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;

use crate::classfile::RawMethod;
use crate::extract::{extract_program, ExtractError};
use crate::program::{MethodKey, ProgramModel};
use crate::token::{Token, TokenSequence};

pub use graph::{build_type_graph, linearization_order, CyclicHierarchy, TypeGraph};
pub use inline::{inline_all, inline_invocations, Inliner, MAX_INLINE_DEPTH};
pub use signature::{descriptor_similarity, name_similarity, signature_similarity};

/// Minimum signature similarity for a method to count as an implementer.
pub const IMPLEMENTER_THRESHOLD: f64 = 0.75;

/// Token sequences for every method of a program.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MethodTable {
    sequences: IndexMap<MethodKey, TokenSequence>,
    abstract_set: BTreeSet<MethodKey>,
    linearized_set: BTreeSet<MethodKey>,
}

impl MethodTable {
    /// Extracts every method. Abstract methods start out empty.
    pub fn extract(program: &ProgramModel) -> Result<Self, ExtractError> {
        let sequences = extract_program(program)?;
        let abstract_set = program
            .methods_view
            .values()
            .filter(|r| r.is_abstract)
            .map(|r| r.key.clone())
            .collect();
        Ok(MethodTable {
            sequences: sequences
                .into_iter()
                .map(|s| (s.source_method.clone(), s))
                .collect(),
            abstract_set,
            linearized_set: BTreeSet::new(),
        })
    }

    pub fn get(&self, key: &MethodKey) -> Option<&TokenSequence> {
        self.sequences.get(key)
    }

    pub fn contains(&self, key: &MethodKey) -> bool {
        self.sequences.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MethodKey, &TokenSequence)> {
        self.sequences.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &MethodKey> {
        self.sequences.keys()
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn abstract_set(&self) -> &BTreeSet<MethodKey> {
        &self.abstract_set
    }

    pub fn linearized_set(&self) -> &BTreeSet<MethodKey> {
        &self.linearized_set
    }

    pub fn is_abstract(&self, key: &MethodKey) -> bool {
        self.abstract_set.contains(key)
    }

    pub fn total_tokens(&self) -> usize {
        self.sequences.values().map(TokenSequence::len).sum()
    }

    /// Replaces every sequence, keeping key order and the abstract sets.
    pub(crate) fn with_sequences(&self, sequences: Vec<TokenSequence>) -> MethodTable {
        MethodTable {
            sequences: sequences
                .into_iter()
                .map(|s| (s.source_method.clone(), s))
                .collect(),
            abstract_set: self.abstract_set.clone(),
            linearized_set: self.linearized_set.clone(),
        }
    }

    /// Keeps only the methods accepted by `keep`.
    pub fn retain(&mut self, mut keep: impl FnMut(&MethodKey) -> bool) {
        self.sequences.retain(|k, _| keep(k));
    }
}

/// Drives abstract method linearization over one program.
pub struct AbstractLinearizer<'p> {
    program: &'p ProgramModel,
    graph: TypeGraph,
    order: Vec<String>,
    position: HashMap<String, usize>,
}

impl<'p> AbstractLinearizer<'p> {
    pub fn new(program: &'p ProgramModel) -> Result<Self, CyclicHierarchy> {
        let graph = build_type_graph(program);
        let order = linearization_order(&graph)?;
        let position = order
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Ok(AbstractLinearizer {
            program,
            graph,
            order,
            position,
        })
    }

    pub fn graph(&self) -> &TypeGraph {
        &self.graph
    }

    pub fn order(&self) -> &[String] {
        &self.order
    }

    /// For each direct implementer of `node`, the declared method most
    /// similar to `method` (at or above [`IMPLEMENTER_THRESHOLD`], first
    /// declared wins ties), in linearization order of the implementers.
    pub fn implementer_methods<'t>(
        &self,
        node: &str,
        method: &RawMethod,
        table: &'t MethodTable,
    ) -> Vec<&'t TokenSequence> {
        let mut implementers: Vec<&str> = self.graph.direct_implementers(node).collect();
        implementers.sort_by_key(|n| self.position[*n]);

        let mut out = Vec::new();
        for implementer in implementers {
            let class = &self.program.classes[implementer];
            let mut best: Option<(&RawMethod, f64)> = None;
            for candidate in &class.methods {
                let score = signature_similarity(
                    (&method.name, &method.descriptor),
                    (&candidate.name, &candidate.descriptor),
                );
                if score >= IMPLEMENTER_THRESHOLD && best.is_none_or(|(_, s)| score > s) {
                    best = Some((candidate, score));
                }
            }
            let Some((chosen, _)) = best else { continue };
            let key = MethodKey::new(implementer, &chosen.name, &chosen.descriptor);
            assert!(
                !table.is_abstract(&key) || table.linearized_set.contains(&key),
                "{key} read before it was linearized"
            );
            out.push(&table.sequences[&key]);
        }
        out
    }

    /// Fills every abstract method with the concatenation of its
    /// implementers' sequences. Abstract methods without implementers stay
    /// empty.
    pub fn run(&self, mut table: MethodTable) -> MethodTable {
        for node in &self.order {
            let class = &self.program.classes[node];
            for method in class.methods.iter().filter(|m| m.is_abstract()) {
                let key = MethodKey::new(node, &method.name, &method.descriptor);
                let tokens: Vec<Token> = self
                    .implementer_methods(node, method, &table)
                    .into_iter()
                    .flat_map(|s| s.tokens.iter().cloned())
                    .collect();
                table.sequences.insert(
                    key.clone(),
                    TokenSequence {
                        source_method: key.clone(),
                        tokens,
                    },
                );
                table.linearized_set.insert(key);
            }
        }
        debug_assert_eq!(table.linearized_set, table.abstract_set);
        table
    }
}

/// Extracts a program and linearizes its abstract methods.
pub fn linearize_abstract(program: &ProgramModel) -> Result<MethodTable, crate::Error> {
    let linearizer = AbstractLinearizer::new(program)?;
    let table = MethodTable::extract(program)?;
    Ok(linearizer.run(table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::load_fixture;

    fn tokens(table: &MethodTable, class: &str, name: &str) -> Vec<String> {
        let (_, seq) = table
            .iter()
            .find(|(k, _)| k.class == class && k.name == name)
            .unwrap_or_else(|| panic!("{class}.{name}"));
        seq.tokens.iter().map(ToString::to_string).collect()
    }

    const SHAPES: &str = r#"{"classes": [
        {"name": "Shape", "kind": "interface", "methods": [
            {"name": "area", "descriptor": "()I", "abstract": true, "tokens": []},
            {"name": "draw", "descriptor": "()V", "abstract": true, "tokens": []}]},
        {"name": "Square", "kind": "class", "implements": ["Shape"], "methods": [
            {"name": "area", "descriptor": "()I", "abstract": false, "tokens": ["LOAD", "LOAD", "ARITH", "RETURN"]},
            {"name": "toString", "descriptor": "()Ljava/lang/String;", "abstract": false, "tokens": ["CONST:\"sq\"", "RETURN"]}]},
        {"name": "Dot", "kind": "class", "implements": ["Shape"], "methods": [
            {"name": "areas", "descriptor": "()I", "abstract": false, "tokens": ["CONST", "RETURN"]}]}
    ]}"#;

    #[test]
    fn fills_from_similar_signatures() {
        let program = load_fixture(SHAPES).unwrap();
        let table = linearize_abstract(&program).unwrap();
        // "areas" is similar enough to "area": (2*4/9)/2 + 1/2 = 0.944
        assert_eq!(
            tokens(&table, "Shape", "area"),
            vec!["LOAD", "LOAD", "ARITH", "RETURN", "CONST", "RETURN"]
        );
        // nothing resembles draw()V
        assert!(tokens(&table, "Shape", "draw").is_empty());
        assert_eq!(table.linearized_set(), table.abstract_set());
        assert_eq!(table.abstract_set().len(), 2);
    }

    #[test]
    fn no_abstract_methods_leaves_table_unchanged() {
        let program = load_fixture(
            r#"{"classes": [{"name": "A", "kind": "class", "methods": [
                {"name": "f", "descriptor": "()V", "abstract": false, "tokens": ["RETURN"]}]}]}"#,
        )
        .unwrap();
        let extracted = MethodTable::extract(&program).unwrap();
        let linearized = linearize_abstract(&program).unwrap();
        assert_eq!(extracted, linearized);
    }

    #[test]
    fn cycles_propagate() {
        let program = load_fixture(
            r#"{"classes": [{"name": "A", "kind": "abstract", "extends": "B"},
                            {"name": "B", "kind": "abstract", "extends": "A"}]}"#,
        )
        .unwrap();
        assert!(matches!(
            linearize_abstract(&program),
            Err(crate::Error::Cyclic(_))
        ));
    }
}

//! Invocation inlining with a recursion guard.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;

use super::MethodTable;
use crate::program::{MethodKey, ProgramModel};
use crate::token::{Mnemonic, Token, TokenSequence};

/// Maximum number of nested inlined calls below the method being rewritten.
pub const MAX_INLINE_DEPTH: usize = 16;

/// Rewrites sequences against a frozen table. Invocation targets are
/// resolved once up front.
pub struct Inliner<'a> {
    table: &'a MethodTable,
    targets: HashMap<&'a str, Option<&'a MethodKey>>,
}

impl<'a> Inliner<'a> {
    pub fn new(table: &'a MethodTable, program: &ProgramModel) -> Self {
        let mut targets = HashMap::new();
        for (_, seq) in table.iter() {
            for token in &seq.tokens {
                if token.mnemonic != Mnemonic::Invoke {
                    continue;
                }
                if let Some(annotation) = token.annotation() {
                    targets
                        .entry(annotation)
                        .or_insert_with(|| resolve(annotation, table, program));
                }
            }
        }
        Inliner { table, targets }
    }

    /// The in-model method an invocation annotation dispatches to, if any.
    pub fn target(&self, annotation: &str) -> Option<&'a MethodKey> {
        self.targets.get(annotation).copied().flatten()
    }

    pub fn inline(&self, key: &MethodKey) -> TokenSequence {
        let mut tokens = Vec::new();
        if let Some((key, _)) = self.table.sequences.get_key_value(key) {
            self.expand(key, &mut Vec::new(), &mut tokens);
        }
        TokenSequence {
            source_method: key.clone(),
            tokens,
        }
    }

    fn expand(&self, key: &'a MethodKey, stack: &mut Vec<&'a MethodKey>, out: &mut Vec<Token>) {
        stack.push(key);
        for token in &self.table.sequences[key].tokens {
            if token.mnemonic == Mnemonic::Invoke && stack.len() <= MAX_INLINE_DEPTH {
                let target = token.annotation().and_then(|a| self.target(a));
                if let Some(target) = target.filter(|t| !stack.contains(t)) {
                    self.expand(target, stack, out);
                    continue;
                }
            }
            out.push(token.clone());
        }
        stack.pop();
    }
}

/// Static resolution by (owner, name, descriptor), falling back to the
/// owner's superclass chain and then its interfaces when the owner does not
/// declare the method.
fn resolve<'a>(
    annotation: &str,
    table: &'a MethodTable,
    program: &ProgramModel,
) -> Option<&'a MethodKey> {
    let wanted = MethodKey::parse_invocation(annotation)?;
    let lookup = |class: &str| {
        let key = MethodKey::new(class, &wanted.name, &wanted.descriptor);
        table.sequences.get_key_value(&key).map(|(k, _)| k)
    };
    if let Some(found) = lookup(&wanted.class) {
        return Some(found);
    }

    let mut seen = HashSet::new();
    let mut current = program.class(&wanted.class);
    let mut interfaces = VecDeque::new();
    while let Some(class) = current {
        if !seen.insert(class.name.as_str()) {
            break;
        }
        if let Some(found) = lookup(&class.name) {
            return Some(found);
        }
        interfaces.extend(class.interface_names.iter().map(String::as_str));
        current = class.super_name.as_deref().and_then(|s| program.class(s));
    }
    while let Some(name) = interfaces.pop_front() {
        if !seen.insert(name) {
            continue;
        }
        if let Some(found) = lookup(name) {
            return Some(found);
        }
        if let Some(class) = program.class(name) {
            interfaces.extend(class.supertypes());
        }
    }
    None
}

pub fn inline_invocations(
    key: &MethodKey,
    table: &MethodTable,
    program: &ProgramModel,
) -> TokenSequence {
    Inliner::new(table, program).inline(key)
}

/// Rewrites every method of `table` in parallel.
pub fn inline_all(table: &MethodTable, program: &ProgramModel) -> MethodTable {
    let inliner = Inliner::new(table, program);
    let keys: Vec<&MethodKey> = table.keys().collect();
    let sequences = keys.par_iter().map(|k| inliner.inline(k)).collect();
    table.with_sequences(sequences)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::load_fixture;
    use crate::linearize::linearize_abstract;

    fn run(fixture: &str, class: &str, name: &str) -> Vec<String> {
        let program = load_fixture(fixture).unwrap();
        let table = linearize_abstract(&program).unwrap();
        let key = table
            .keys()
            .find(|k| k.class == class && k.name == name)
            .unwrap()
            .clone();
        inline_invocations(&key, &table, &program)
            .tokens
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    fn class(name: &str, extends: Option<&str>, methods: &[(&str, &[&str])]) -> String {
        let methods: Vec<String> = methods
            .iter()
            .map(|(n, t)| {
                format!(
                    r#"{{"name": "{n}", "descriptor": "()V", "abstract": false, "tokens": {t:?}}}"#
                )
            })
            .collect();
        format!(
            r#"{{"name": "{name}", "kind": "class", "extends": {}, "methods": [{}]}}"#,
            extends.map(|e| format!("\"{e}\"")).unwrap_or("null".into()),
            methods.join(",")
        )
    }

    fn doc(classes: &[String]) -> String {
        format!(r#"{{"classes": [{}]}}"#, classes.join(","))
    }

    #[test]
    fn direct_substitution() {
        let f = doc(&[class(
            "A",
            None,
            &[
                ("f", &["CONST", "INVOKE:A.g:()V", "RETURN"]),
                ("g", &["LOAD", "RETURN"]),
            ],
        )]);
        assert_eq!(run(&f, "A", "f"), ["CONST", "LOAD", "RETURN", "RETURN"]);
    }

    #[test]
    fn self_recursion_keeps_token() {
        let f = doc(&[class("A", None, &[("f", &["INVOKE:A.f:()V", "RETURN"])])]);
        assert_eq!(run(&f, "A", "f"), ["INVOKE:A.f:()V", "RETURN"]);
    }

    #[test]
    fn mutual_recursion_terminates() {
        let f = doc(&[class(
            "A",
            None,
            &[
                ("f", &["INVOKE:A.g:()V", "RETURN"]),
                ("g", &["INVOKE:A.f:()V", "STACK"]),
            ],
        )]);
        assert_eq!(run(&f, "A", "f"), ["INVOKE:A.f:()V", "STACK", "RETURN"]);
        assert_eq!(run(&f, "A", "g"), ["INVOKE:A.g:()V", "RETURN", "STACK"]);
    }

    #[test]
    fn external_targets_stay() {
        let f = doc(&[class(
            "A",
            None,
            &[("f", &["INVOKE:java/io/PrintStream.println:(I)V", "RETURN"])],
        )]);
        assert_eq!(
            run(&f, "A", "f"),
            ["INVOKE:java/io/PrintStream.println:(I)V", "RETURN"]
        );
    }

    #[test]
    fn inherited_method_resolves_through_superclass() {
        let f = doc(&[
            class("Base", None, &[("g", &["LOAD", "RETURN"])]),
            class("Sub", Some("Base"), &[("f", &["INVOKE:Sub.g:()V"])]),
        ]);
        assert_eq!(run(&f, "Sub", "f"), ["LOAD", "RETURN"]);
    }

    #[test]
    fn depth_cap_bounds_chains() {
        let n = 24;
        let methods: Vec<(String, Vec<String>)> = (0..n)
            .map(|i| {
                let tokens = if i + 1 < n {
                    vec!["CONST".to_string(), format!("INVOKE:A.m{}:()V", i + 1)]
                } else {
                    vec!["RETURN".to_string()]
                };
                (format!("m{i}"), tokens)
            })
            .collect();
        let refs: Vec<(&str, Vec<&str>)> = methods
            .iter()
            .map(|(n, t)| (n.as_str(), t.iter().map(String::as_str).collect()))
            .collect();
        let slices: Vec<(&str, &[&str])> = refs.iter().map(|(n, t)| (*n, t.as_slice())).collect();
        let f = doc(&[class("A", None, &slices)]);
        let out = run(&f, "A", "m0");
        // m0 plus 16 nested levels each contribute a CONST; the call out of
        // the deepest level stays literal.
        assert_eq!(out.len(), MAX_INLINE_DEPTH + 2);
        assert_eq!(
            out.last().unwrap(),
            &format!("INVOKE:A.m{}:()V", MAX_INLINE_DEPTH + 1)
        );
        assert!(out[..=MAX_INLINE_DEPTH].iter().all(|t| t == "CONST"));
    }

    #[test]
    fn call_through_abstract_type() {
        let f = r#"{"classes": [
            {"name": "S", "kind": "abstract", "methods": [
                {"name": "run", "descriptor": "()V", "abstract": true, "tokens": []}]},
            {"name": "X", "kind": "class", "extends": "S", "methods": [
                {"name": "run", "descriptor": "()V", "abstract": false, "tokens": ["LOAD", "RETURN"]}]},
            {"name": "Y", "kind": "class", "extends": "S", "methods": [
                {"name": "run", "descriptor": "()V", "abstract": false, "tokens": ["CONST", "RETURN"]}]},
            {"name": "M", "kind": "class", "methods": [
                {"name": "main", "descriptor": "()V", "abstract": false, "tokens": ["INVOKE:S.run:()V", "RETURN"]}]}
        ]}"#;
        assert_eq!(
            run(f, "M", "main"),
            ["LOAD", "RETURN", "CONST", "RETURN", "RETURN"]
        );
    }

    #[test]
    fn parallel_equals_sequential() {
        let f = doc(&[class(
            "A",
            None,
            &[
                ("f", &["CONST", "INVOKE:A.g:()V", "INVOKE:A.h:()V"]),
                ("g", &["INVOKE:A.h:()V", "LOAD"]),
                ("h", &["INVOKE:A.f:()V", "STORE"]),
            ],
        )]);
        let program = load_fixture(&f).unwrap();
        let table = linearize_abstract(&program).unwrap();
        let all = inline_all(&table, &program);
        for (key, seq) in all.iter() {
            assert_eq!(seq, &inline_invocations(key, &table, &program));
        }
    }
}

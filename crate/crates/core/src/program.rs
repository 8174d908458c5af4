//! A resolved set of classes: one submission.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classfile::RawClass;

/// `(class, name, descriptor)`; displays as `class.name:descriptor`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodKey {
    pub class: String,
    pub name: String,
    pub descriptor: String,
}

impl MethodKey {
    pub fn new(
        class: impl Into<String>,
        name: impl Into<String>,
        descriptor: impl Into<String>,
    ) -> Self {
        MethodKey {
            class: class.into(),
            name: name.into(),
            descriptor: descriptor.into(),
        }
    }

    /// Parses the `Owner.name:descriptor` form used by INVOKE annotations.
    pub fn parse_invocation(text: &str) -> Option<MethodKey> {
        let split = text.rfind(":(")?;
        let (target, descriptor) = (&text[..split], &text[split + 1..]);
        let dot = target.rfind('.')?;
        let (class, name) = (&target[..dot], &target[dot + 1..]);
        if class.is_empty() || name.is_empty() {
            return None;
        }
        Some(MethodKey::new(class, name, descriptor))
    }
}

impl fmt::Display for MethodKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}:{}", self.class, self.name, self.descriptor)
    }
}

/// Summary of one method in [`ProgramModel::methods_view`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodRecord {
    pub key: MethodKey,
    pub is_abstract: bool,
    pub compiler_generated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("duplicate method `{0}`")]
    DuplicateMethod(MethodKey),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProgramModel {
    /// Classes in declaration order.
    pub classes: IndexMap<String, RawClass>,
    /// Supertypes referenced by some class but absent from the program.
    pub externals: BTreeSet<String>,
    pub methods_view: IndexMap<MethodKey, MethodRecord>,
}

impl ProgramModel {
    pub fn class(&self, name: &str) -> Option<&RawClass> {
        self.classes.get(name)
    }

    /// Declaration index of a class, used for deterministic tie breaking.
    pub fn declaration_index(&self, name: &str) -> Option<usize> {
        self.classes.get_index_of(name)
    }

    /// Every declared `(subtype, supertype)` relation, externals included.
    pub fn hierarchy_edges(&self) -> Vec<(&str, &str)> {
        self.classes
            .values()
            .flat_map(|c| c.supertypes().map(move |s| (c.name.as_str(), s)))
            .collect()
    }

    pub fn method_count(&self) -> usize {
        self.methods_view.len()
    }
}

/// Resolves the hierarchy of a set of classes. Supertypes not present in
/// `classes` are recorded as externals.
pub fn assemble_program(classes: Vec<RawClass>) -> Result<ProgramModel, ModelError> {
    let mut by_name = IndexMap::with_capacity(classes.len());
    for class in classes {
        if by_name.contains_key(&class.name) {
            return Err(ModelError::DuplicateClass(class.name));
        }
        by_name.insert(class.name.clone(), class);
    }

    let mut externals = BTreeSet::new();
    let mut methods_view = IndexMap::new();
    for class in by_name.values() {
        for sup in class.supertypes() {
            if !by_name.contains_key(sup) {
                externals.insert(sup.to_string());
            }
        }
        for m in &class.methods {
            let key = MethodKey::new(&class.name, &m.name, &m.descriptor);
            let record = MethodRecord {
                key: key.clone(),
                is_abstract: m.is_abstract(),
                compiler_generated: m.is_compiler_generated(),
            };
            if methods_view.insert(key.clone(), record).is_some() {
                return Err(ModelError::DuplicateMethod(key));
            }
        }
    }

    Ok(ProgramModel {
        classes: by_name,
        externals,
        methods_view,
    })
}

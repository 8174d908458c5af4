//! Textual program fixtures.
//!
//! A fixture is one JSON document:
//!
//! ```json
//! {"classes": [{"name": "A", "kind": "class", "extends": null, "implements": [],
//!               "methods": [{"name": "f", "descriptor": "()V", "abstract": false,
//!                            "tokens": ["LOAD", "INVOKE:A.g:()V", "RETURN"]}]}]}
//! ```
//!
//! Method tokens are taken verbatim; extraction is bypassed.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classfile::{ClassKind, MethodBody, RawClass, RawMethod};
use crate::descriptor::MethodDescriptor;
use crate::extract::{self, ExtractError};
use crate::program::{assemble_program, MethodKey, ModelError, ProgramModel};
use crate::token::{Origin, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixtureError {
    #[error("fixture syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid fixture class `{class}`: {message}")]
    Invalid { class: String, message: String },
    #[error("duplicate class `{0}`")]
    DuplicateClass(String),
    #[error("class `{class}` has unknown kind `{kind}`")]
    UnknownKind { class: String, kind: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureDoc {
    classes: Vec<FixtureClass>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureClass {
    name: String,
    kind: String,
    #[serde(default)]
    extends: Option<String>,
    #[serde(default)]
    implements: Vec<String>,
    #[serde(default)]
    methods: Vec<FixtureMethod>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureMethod {
    name: String,
    descriptor: String,
    #[serde(rename = "abstract")]
    is_abstract: bool,
    tokens: Vec<Token>,
}

fn parse_kind(kind: &str) -> Option<ClassKind> {
    match kind {
        "class" => Some(ClassKind::Class),
        "abstract" => Some(ClassKind::AbstractClass),
        "interface" => Some(ClassKind::Interface),
        _ => None,
    }
}

pub fn load_fixture(text: &str) -> Result<ProgramModel, FixtureError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let doc: FixtureDoc = serde_json::from_str(text).map_err(|e| FixtureError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    let mut classes = Vec::with_capacity(doc.classes.len());
    for c in doc.classes {
        let invalid = |message: String| FixtureError::Invalid {
            class: c.name.clone(),
            message,
        };
        if c.name.is_empty() {
            return Err(invalid("class name is empty".into()));
        }
        let kind = parse_kind(&c.kind).ok_or_else(|| FixtureError::UnknownKind {
            class: c.name.clone(),
            kind: c.kind.clone(),
        })?;
        let mut methods = Vec::with_capacity(c.methods.len());
        for m in c.methods {
            if m.name.is_empty() {
                return Err(invalid("method name is empty".into()));
            }
            if let Err(e) = MethodDescriptor::parse(&m.descriptor) {
                return Err(invalid(e.to_string()));
            }
            if m.is_abstract && !m.tokens.is_empty() {
                return Err(invalid(format!(
                    "abstract method `{}` must have no tokens",
                    m.name
                )));
            }
            if kind == ClassKind::Interface && !m.is_abstract {
                return Err(invalid(format!(
                    "interface method `{}` must be abstract",
                    m.name
                )));
            }
            let body = if m.is_abstract {
                MethodBody::Abstract
            } else {
                let owner = Arc::new(MethodKey::new(&c.name, &m.name, &m.descriptor));
                let tokens = m
                    .tokens
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| Token {
                        origin: Origin {
                            method: owner.clone(),
                            offset: i as u32,
                        },
                        ..t
                    })
                    .collect();
                MethodBody::Tokens(tokens)
            };
            methods.push(RawMethod {
                name: m.name,
                descriptor: m.descriptor,
                access: 0,
                body,
            });
        }
        classes.push(RawClass {
            name: c.name,
            kind,
            super_name: c.extends,
            interface_names: c.implements,
            methods,
            pool: Default::default(),
        });
    }

    assemble_program(classes).map_err(|e| match e {
        ModelError::DuplicateClass(name) => FixtureError::DuplicateClass(name),
        ModelError::DuplicateMethod(key) => FixtureError::Invalid {
            class: key.class.clone(),
            message: format!("duplicate method `{key}`"),
        },
    })
}

/// Renders a program as a fixture. Bytecode bodies are extracted first, so
/// this also converts class-file submissions into fixtures.
pub fn emit_fixture(program: &ProgramModel) -> Result<String, ExtractError> {
    let mut classes = Vec::with_capacity(program.classes.len());
    for class in program.classes.values() {
        let mut methods = Vec::with_capacity(class.methods.len());
        for m in &class.methods {
            let tokens = extract::extract_method_tokens(class, m)?.tokens;
            methods.push(FixtureMethod {
                name: m.name.clone(),
                descriptor: m.descriptor.clone(),
                is_abstract: m.is_abstract(),
                tokens,
            });
        }
        classes.push(FixtureClass {
            name: class.name.clone(),
            kind: class.kind.as_str().to_string(),
            extends: class.super_name.clone(),
            implements: class.interface_names.clone(),
            methods,
        });
    }
    let mut text =
        serde_json::to_string_pretty(&FixtureDoc { classes }).expect("fixture serializes");
    text.push('\n');
    Ok(text)
}

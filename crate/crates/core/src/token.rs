//! Generalized low-level tokens, the unit of matching.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::program::MethodKey;

/// Closed vocabulary of instruction families.
///
/// Operand-width and type-specialized opcode variants collapse into one
/// family each. There are no punctuation or separator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mnemonic {
    Const,
    Load,
    Store,
    ArrayLoad,
    ArrayStore,
    Arith,
    Conv,
    Cmp,
    Branch,
    Switch,
    Invoke,
    FieldGet,
    FieldPut,
    New,
    NewArray,
    Cast,
    InstanceOf,
    Throw,
    Return,
    Monitor,
    Stack,
}

impl Mnemonic {
    pub const ALL: [Mnemonic; 21] = [
        Mnemonic::Const,
        Mnemonic::Load,
        Mnemonic::Store,
        Mnemonic::ArrayLoad,
        Mnemonic::ArrayStore,
        Mnemonic::Arith,
        Mnemonic::Conv,
        Mnemonic::Cmp,
        Mnemonic::Branch,
        Mnemonic::Switch,
        Mnemonic::Invoke,
        Mnemonic::FieldGet,
        Mnemonic::FieldPut,
        Mnemonic::New,
        Mnemonic::NewArray,
        Mnemonic::Cast,
        Mnemonic::InstanceOf,
        Mnemonic::Throw,
        Mnemonic::Return,
        Mnemonic::Monitor,
        Mnemonic::Stack,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mnemonic::Const => "CONST",
            Mnemonic::Load => "LOAD",
            Mnemonic::Store => "STORE",
            Mnemonic::ArrayLoad => "ARRAY_LOAD",
            Mnemonic::ArrayStore => "ARRAY_STORE",
            Mnemonic::Arith => "ARITH",
            Mnemonic::Conv => "CONV",
            Mnemonic::Cmp => "CMP",
            Mnemonic::Branch => "BRANCH",
            Mnemonic::Switch => "SWITCH",
            Mnemonic::Invoke => "INVOKE",
            Mnemonic::FieldGet => "FIELD_GET",
            Mnemonic::FieldPut => "FIELD_PUT",
            Mnemonic::New => "NEW",
            Mnemonic::NewArray => "NEWARRAY",
            Mnemonic::Cast => "CAST",
            Mnemonic::InstanceOf => "INSTANCEOF",
            Mnemonic::Throw => "THROW",
            Mnemonic::Return => "RETURN",
            Mnemonic::Monitor => "MONITOR",
            Mnemonic::Stack => "STACK",
        }
    }
}

impl fmt::Display for Mnemonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mnemonic `{0}`")]
pub struct UnknownMnemonic(pub String);

impl FromStr for Mnemonic {
    type Err = UnknownMnemonic;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mnemonic::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| UnknownMnemonic(s.to_string()))
    }
}

/// Where a token came from. Not part of token equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub method: Arc<MethodKey>,
    pub offset: u32,
}

/// One generalized instruction with its interpreted operand.
///
/// Equality, ordering and hashing look at `(mnemonic, annotation)` only.
#[derive(Clone, Debug)]
pub struct Token {
    pub mnemonic: Mnemonic,
    pub annotation: Option<Arc<str>>,
    pub origin: Origin,
}

impl Token {
    pub fn new(mnemonic: Mnemonic, annotation: Option<&str>, origin: Origin) -> Self {
        Token {
            mnemonic,
            annotation: annotation.map(Arc::from),
            origin,
        }
    }

    /// Parses `MNEMONIC` or `MNEMONIC:annotation`. The annotation is
    /// everything after the first colon, so `INVOKE:A.f:()V` keeps its
    /// descriptor intact.
    pub fn parse(text: &str, origin: Origin) -> Result<Self, UnknownMnemonic> {
        let (head, annotation) = match text.split_once(':') {
            Some((head, rest)) => (head, Some(rest)),
            None => (text, None),
        };
        Ok(Token::new(head.parse()?, annotation, origin))
    }

    pub fn annotation(&self) -> Option<&str> {
        self.annotation.as_deref()
    }

    fn identity(&self) -> (Mnemonic, Option<&str>) {
        (self.mnemonic, self.annotation.as_deref())
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.annotation {
            Some(a) => write!(f, "{}:{}", self.mnemonic, a),
            None => write!(f, "{}", self.mnemonic),
        }
    }
}

impl PartialEq for Token {
    fn eq(&self, other: &Self) -> bool {
        self.identity() == other.identity()
    }
}

impl Eq for Token {}

impl Hash for Token {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.identity().hash(state);
    }
}

impl PartialOrd for Token {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Token {
    fn cmp(&self, other: &Self) -> Ordering {
        self.identity().cmp(&other.identity())
    }
}

/// The token sequence of one method. Order follows bytecode offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSequence {
    pub source_method: MethodKey,
    pub tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn empty(source_method: MethodKey) -> Self {
        TokenSequence {
            source_method,
            tokens: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Writes one `dump-tokens` line per token:
/// `CLASS.method:descriptor<TAB>offset<TAB>MNEMONIC[:annotation]`.
pub fn write_dump_lines(out: &mut String, key: &MethodKey, tokens: &[Token]) {
    use std::fmt::Write;
    for token in tokens {
        // String formatting into a String cannot fail.
        let _ = writeln!(out, "{}\t{}\t{}", key, token.origin.offset, token);
    }
}

impl Serialize for Token {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Deserialized tokens carry a placeholder origin; fixture loading
/// rewrites origins once the owning method is known.
impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let origin = Origin {
            method: Arc::new(MethodKey::default()),
            offset: 0,
        };
        Token::parse(&text, origin).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin(offset: u32) -> Origin {
        Origin {
            method: Arc::new(MethodKey::new("A", "f", "()V")),
            offset,
        }
    }

    #[test]
    fn names_round_trip() {
        for m in Mnemonic::ALL {
            assert_eq!(m.as_str().parse::<Mnemonic>().unwrap(), m);
        }
        assert!("iload".parse::<Mnemonic>().is_err());
        assert!(";".parse::<Mnemonic>().is_err());
    }

    #[test]
    fn equality_ignores_origin() {
        let a = Token::new(Mnemonic::Invoke, Some("A.g:()V"), origin(0));
        let b = Token::new(Mnemonic::Invoke, Some("A.g:()V"), origin(17));
        let c = Token::new(Mnemonic::Invoke, Some("A.h:()V"), origin(0));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, Token::new(Mnemonic::Invoke, None, origin(0)));
    }

    #[test]
    fn parse_keeps_descriptor_colons() {
        let t = Token::parse("INVOKE:A.g:(I)V", origin(0)).unwrap();
        assert_eq!(t.mnemonic, Mnemonic::Invoke);
        assert_eq!(t.annotation(), Some("A.g:(I)V"));
        assert_eq!(t.to_string(), "INVOKE:A.g:(I)V");
        assert!(Token::parse("PUSH:1", origin(0)).is_err());
    }
}

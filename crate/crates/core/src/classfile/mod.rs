//! JVM class file ingestion.
//!
//! Only the constant pool, access flags, this/super/interfaces and the
//! `Code` attribute of each method are interpreted. Fields and every other
//! attribute are parsed for length and skipped.

mod pool;
mod reader;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::MethodDescriptor;
use crate::token::Token;

pub use pool::{Constant, ConstantPool, MemberRef};
use reader::{Eof, Reader};

pub const MAGIC: u32 = 0xCAFE_BABE;
pub const MIN_MAJOR_VERSION: u16 = 45;
pub const MAX_MAJOR_VERSION: u16 = 61;

const ACC_INTERFACE: u16 = 0x0200;
const ACC_ABSTRACT: u16 = 0x0400;
const ACC_NATIVE: u16 = 0x0100;
const ACC_BRIDGE: u16 = 0x0040;
const ACC_SYNTHETIC: u16 = 0x1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassFileError {
    #[error("bad magic number (expected 0xCAFEBABE)")]
    BadMagic,
    #[error("truncated class file at byte {offset}")]
    Truncated { offset: usize },
    #[error("unsupported class file major version {major} (supported: 45-61)")]
    UnsupportedVersion { major: u16 },
    #[error("interface method {method} carries code; default and static interface methods are not supported")]
    InterfaceCode { method: String },
    #[error("malformed constant pool entry #{index}: {reason}")]
    MalformedPool { index: u16, reason: String },
    #[error("malformed class file: {0}")]
    Malformed(String),
}

impl From<Eof> for ClassFileError {
    fn from(e: Eof) -> Self {
        ClassFileError::Truncated { offset: e.offset }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Class,
    #[serde(rename = "abstract")]
    AbstractClass,
    Interface,
}

impl ClassKind {
    pub fn from_access(flags: u16) -> Self {
        if flags & ACC_INTERFACE != 0 {
            ClassKind::Interface
        } else if flags & ACC_ABSTRACT != 0 {
            ClassKind::AbstractClass
        } else {
            ClassKind::Class
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassKind::Class => "class",
            ClassKind::AbstractClass => "abstract",
            ClassKind::Interface => "interface",
        }
    }
}

/// Where a method's content comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodBody {
    Abstract,
    /// Raw bytes of a `Code` attribute, decoded against the class pool.
    Bytecode(Vec<u8>),
    /// Tokens given verbatim by a fixture.
    Tokens(Vec<Token>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawMethod {
    pub name: String,
    pub descriptor: String,
    pub access: u16,
    pub body: MethodBody,
}

impl RawMethod {
    pub fn is_abstract(&self) -> bool {
        matches!(self.body, MethodBody::Abstract)
    }

    /// Constructors, class initializers, bridges and synthetic methods.
    pub fn is_compiler_generated(&self) -> bool {
        self.name == "<init>"
            || self.name == "<clinit>"
            || self.access & (ACC_BRIDGE | ACC_SYNTHETIC) != 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawClass {
    pub name: String,
    pub kind: ClassKind,
    pub super_name: Option<String>,
    pub interface_names: Vec<String>,
    pub methods: Vec<RawMethod>,
    pub pool: Arc<ConstantPool>,
}

impl RawClass {
    /// Declared supertypes: the superclass first, then interfaces.
    pub fn supertypes(&self) -> impl Iterator<Item = &str> {
        self.super_name
            .as_deref()
            .into_iter()
            .chain(self.interface_names.iter().map(String::as_str))
    }
}

/// Parses one class file image. Native methods carry no content and are
/// left out of the returned class.
pub fn parse_class_file(bytes: &[u8]) -> Result<RawClass, ClassFileError> {
    let mut r = Reader::new(bytes);
    if r.remaining() < 4 {
        return Err(if MAGIC.to_be_bytes().starts_with(bytes) {
            ClassFileError::Truncated {
                offset: bytes.len(),
            }
        } else {
            ClassFileError::BadMagic
        });
    }
    if r.u32()? != MAGIC {
        return Err(ClassFileError::BadMagic);
    }
    let _minor = r.u16()?;
    let major = r.u16()?;
    if !(MIN_MAJOR_VERSION..=MAX_MAJOR_VERSION).contains(&major) {
        return Err(ClassFileError::UnsupportedVersion { major });
    }
    let pool = ConstantPool::read(&mut r)?;
    let access = r.u16()?;
    let this_index = r.u16()?;
    let name = pool.class_name(this_index)?.to_string();
    if name.is_empty() {
        return Err(ClassFileError::Malformed("empty class name".into()));
    }
    let super_index = r.u16()?;
    let super_name = if super_index == 0 {
        None
    } else {
        Some(pool.class_name(super_index)?.to_string())
    };
    let interface_count = r.u16()?;
    let mut interface_names = Vec::with_capacity(interface_count as usize);
    for _ in 0..interface_count {
        interface_names.push(pool.class_name(r.u16()?)?.to_string());
    }

    let field_count = r.u16()?;
    for _ in 0..field_count {
        r.take(6)?;
        skip_attributes(&mut r)?;
    }

    let kind = ClassKind::from_access(access);
    let method_count = r.u16()?;
    let mut methods = Vec::with_capacity(method_count as usize);
    for _ in 0..method_count {
        if let Some(m) = read_method(&mut r, &pool, &name)? {
            if kind == ClassKind::Interface && !m.is_abstract() {
                return Err(ClassFileError::InterfaceCode {
                    method: format!("{}.{}{}", name, m.name, m.descriptor),
                });
            }
            methods.push(m);
        }
    }
    skip_attributes(&mut r)?;
    if r.remaining() != 0 {
        return Err(ClassFileError::Malformed(format!(
            "{} trailing bytes after the class structure",
            r.remaining()
        )));
    }

    Ok(RawClass {
        name,
        kind,
        super_name,
        interface_names,
        methods,
        pool: Arc::new(pool),
    })
}

fn skip_attributes(r: &mut Reader<'_>) -> Result<(), ClassFileError> {
    let count = r.u16()?;
    for _ in 0..count {
        r.u16()?;
        let len = r.u32()? as usize;
        r.take(len)?;
    }
    Ok(())
}

fn read_method(
    r: &mut Reader<'_>,
    pool: &ConstantPool,
    class: &str,
) -> Result<Option<RawMethod>, ClassFileError> {
    let access = r.u16()?;
    let name = pool.utf8(r.u16()?)?.to_string();
    let descriptor = pool.utf8(r.u16()?)?.to_string();
    let qualified = || format!("{class}.{name}{descriptor}");
    if MethodDescriptor::parse(&descriptor).is_err() {
        return Err(ClassFileError::Malformed(format!(
            "method {} has a malformed descriptor",
            qualified()
        )));
    }

    let mut code = None;
    let attr_count = r.u16()?;
    for _ in 0..attr_count {
        let attr_name = pool.utf8(r.u16()?)?;
        let len = r.u32()? as usize;
        let start = r.position();
        let body = r.take(len)?;
        if attr_name == "Code" {
            if code.is_some() {
                return Err(ClassFileError::Malformed(format!(
                    "method {} has two Code attributes",
                    qualified()
                )));
            }
            code = Some(read_code(body).map_err(|e| ClassFileError::Truncated {
                offset: start + e.offset,
            })?);
        }
    }

    let is_abstract = access & ACC_ABSTRACT != 0;
    let is_native = access & ACC_NATIVE != 0;
    let body = match (is_abstract, is_native, code) {
        (true, _, Some(_)) => {
            return Err(ClassFileError::Malformed(format!(
                "abstract method {} has code",
                qualified()
            )))
        }
        (true, _, None) => MethodBody::Abstract,
        (false, true, None) => return Ok(None),
        (false, false, None) => {
            return Err(ClassFileError::Malformed(format!(
                "concrete method {} lacks a Code attribute",
                qualified()
            )))
        }
        (false, _, Some(bytes)) => MethodBody::Bytecode(bytes),
    };
    Ok(Some(RawMethod {
        name,
        descriptor,
        access,
        body,
    }))
}

fn read_code(attr: &[u8]) -> Result<Vec<u8>, Eof> {
    let mut r = Reader::new(attr);
    let _max_stack = r.u16()?;
    let _max_locals = r.u16()?;
    let len = r.u32()? as usize;
    let code = r.take(len)?.to_vec();
    let handlers = r.u16()? as usize;
    r.take(handlers * 8)?;
    // Nested attributes (line numbers, stack maps) are skipped.
    let count = r.u16()?;
    for _ in 0..count {
        r.u16()?;
        let n = r.u32()? as usize;
        r.take(n)?;
    }
    Ok(code)
}

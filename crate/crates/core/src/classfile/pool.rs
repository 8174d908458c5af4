//! Constant pool decoding and cross-index validation.

use super::reader::Reader;
use super::ClassFileError;

#[derive(Debug, Clone, PartialEq)]
pub enum Constant {
    Utf8(String),
    Integer(i32),
    Float(f32),
    Long(i64),
    Double(f64),
    Class {
        name: u16,
    },
    String {
        value: u16,
    },
    FieldRef {
        class: u16,
        name_and_type: u16,
    },
    MethodRef {
        class: u16,
        name_and_type: u16,
    },
    InterfaceMethodRef {
        class: u16,
        name_and_type: u16,
    },
    NameAndType {
        name: u16,
        descriptor: u16,
    },
    MethodHandle {
        kind: u8,
        reference: u16,
    },
    MethodType {
        descriptor: u16,
    },
    Dynamic {
        bootstrap: u16,
        name_and_type: u16,
    },
    InvokeDynamic {
        bootstrap: u16,
        name_and_type: u16,
    },
    Module {
        name: u16,
    },
    Package {
        name: u16,
    },
    /// Index 0 and the upper half of a long or double.
    Unusable,
}

impl Constant {
    fn tag_name(&self) -> &'static str {
        match self {
            Constant::Utf8(_) => "Utf8",
            Constant::Integer(_) => "Integer",
            Constant::Float(_) => "Float",
            Constant::Long(_) => "Long",
            Constant::Double(_) => "Double",
            Constant::Class { .. } => "Class",
            Constant::String { .. } => "String",
            Constant::FieldRef { .. } => "Fieldref",
            Constant::MethodRef { .. } => "Methodref",
            Constant::InterfaceMethodRef { .. } => "InterfaceMethodref",
            Constant::NameAndType { .. } => "NameAndType",
            Constant::MethodHandle { .. } => "MethodHandle",
            Constant::MethodType { .. } => "MethodType",
            Constant::Dynamic { .. } => "Dynamic",
            Constant::InvokeDynamic { .. } => "InvokeDynamic",
            Constant::Module { .. } => "Module",
            Constant::Package { .. } => "Package",
            Constant::Unusable => "unusable",
        }
    }
}

/// A resolved field or method reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberRef<'a> {
    pub owner: &'a str,
    pub name: &'a str,
    pub descriptor: &'a str,
}

/// Pool entries indexed from 1, as in the class file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstantPool {
    entries: Vec<Constant>,
}

fn malformed(index: u16, reason: impl Into<String>) -> ClassFileError {
    ClassFileError::MalformedPool {
        index,
        reason: reason.into(),
    }
}

impl ConstantPool {
    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self, ClassFileError> {
        let count = r.u16()?;
        if count == 0 {
            return Err(malformed(0, "constant_pool_count is zero"));
        }
        let mut entries = Vec::with_capacity(count as usize);
        entries.push(Constant::Unusable);
        while entries.len() < count as usize {
            let index = entries.len() as u16;
            let tag = r.u8()?;
            let entry = match tag {
                1 => {
                    let len = r.u16()? as usize;
                    let raw = r.take(len)?;
                    let text = decode_modified_utf8(raw)
                        .ok_or_else(|| malformed(index, "invalid modified UTF-8"))?;
                    Constant::Utf8(text)
                }
                3 => Constant::Integer(r.u32()? as i32),
                4 => Constant::Float(f32::from_bits(r.u32()?)),
                5 => Constant::Long(r.u64()? as i64),
                6 => Constant::Double(f64::from_bits(r.u64()?)),
                7 => Constant::Class { name: r.u16()? },
                8 => Constant::String { value: r.u16()? },
                9 => Constant::FieldRef {
                    class: r.u16()?,
                    name_and_type: r.u16()?,
                },
                10 => Constant::MethodRef {
                    class: r.u16()?,
                    name_and_type: r.u16()?,
                },
                11 => Constant::InterfaceMethodRef {
                    class: r.u16()?,
                    name_and_type: r.u16()?,
                },
                12 => Constant::NameAndType {
                    name: r.u16()?,
                    descriptor: r.u16()?,
                },
                15 => Constant::MethodHandle {
                    kind: r.u8()?,
                    reference: r.u16()?,
                },
                16 => Constant::MethodType {
                    descriptor: r.u16()?,
                },
                17 => Constant::Dynamic {
                    bootstrap: r.u16()?,
                    name_and_type: r.u16()?,
                },
                18 => Constant::InvokeDynamic {
                    bootstrap: r.u16()?,
                    name_and_type: r.u16()?,
                },
                19 => Constant::Module { name: r.u16()? },
                20 => Constant::Package { name: r.u16()? },
                other => return Err(malformed(index, format!("bad tag {other}"))),
            };
            let wide = matches!(entry, Constant::Long(_) | Constant::Double(_));
            entries.push(entry);
            if wide {
                if entries.len() >= count as usize {
                    return Err(malformed(index, "8-byte constant overruns the pool"));
                }
                entries.push(Constant::Unusable);
            }
        }
        let pool = ConstantPool { entries };
        pool.validate()?;
        Ok(pool)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.len() <= 1
    }

    pub fn get(&self, index: u16) -> Result<&Constant, ClassFileError> {
        match self.entries.get(index as usize) {
            None | Some(Constant::Unusable) => Err(malformed(index, "dangling index")),
            Some(c) => Ok(c),
        }
    }

    fn expect_utf8_at(&self, from: u16, index: u16) -> Result<(), ClassFileError> {
        self.utf8(index)
            .map(|_| ())
            .map_err(|_| malformed(from, format!("expected Utf8 at #{index}")))
    }

    /// Checks that every cross-index resolves to an entry of the expected tag.
    fn validate(&self) -> Result<(), ClassFileError> {
        for (i, entry) in self.entries.iter().enumerate() {
            let i = i as u16;
            match *entry {
                Constant::Class { name }
                | Constant::Module { name }
                | Constant::Package { name } => self.expect_utf8_at(i, name)?,
                Constant::String { value } => self.expect_utf8_at(i, value)?,
                Constant::MethodType { descriptor } => self.expect_utf8_at(i, descriptor)?,
                Constant::NameAndType { name, descriptor } => {
                    self.expect_utf8_at(i, name)?;
                    self.expect_utf8_at(i, descriptor)?;
                }
                Constant::FieldRef {
                    class,
                    name_and_type,
                }
                | Constant::MethodRef {
                    class,
                    name_and_type,
                }
                | Constant::InterfaceMethodRef {
                    class,
                    name_and_type,
                } => {
                    if !matches!(self.get(class), Ok(Constant::Class { .. })) {
                        return Err(malformed(i, format!("expected Class at #{class}")));
                    }
                    self.expect_name_and_type(i, name_and_type)?;
                }
                Constant::Dynamic { name_and_type, .. }
                | Constant::InvokeDynamic { name_and_type, .. } => {
                    self.expect_name_and_type(i, name_and_type)?;
                }
                Constant::MethodHandle { kind, reference } => {
                    let target = self.get(reference).map_err(|_| {
                        malformed(i, format!("dangling method handle target #{reference}"))
                    })?;
                    let ok = match kind {
                        1..=4 => matches!(target, Constant::FieldRef { .. }),
                        5 | 8 => matches!(target, Constant::MethodRef { .. }),
                        6 | 7 => matches!(
                            target,
                            Constant::MethodRef { .. } | Constant::InterfaceMethodRef { .. }
                        ),
                        9 => matches!(target, Constant::InterfaceMethodRef { .. }),
                        _ => false,
                    };
                    if !ok {
                        return Err(malformed(
                            i,
                            format!(
                                "method handle kind {kind} cannot target {}",
                                target.tag_name()
                            ),
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn expect_name_and_type(&self, from: u16, index: u16) -> Result<(), ClassFileError> {
        match self.get(index) {
            Ok(Constant::NameAndType { .. }) => Ok(()),
            _ => Err(malformed(from, format!("expected NameAndType at #{index}"))),
        }
    }

    pub fn utf8(&self, index: u16) -> Result<&str, ClassFileError> {
        match self.get(index)? {
            Constant::Utf8(s) => Ok(s),
            other => Err(malformed(
                index,
                format!("expected Utf8, found {}", other.tag_name()),
            )),
        }
    }

    pub fn class_name(&self, index: u16) -> Result<&str, ClassFileError> {
        match self.get(index)? {
            Constant::Class { name } => self.utf8(*name),
            other => Err(malformed(
                index,
                format!("expected Class, found {}", other.tag_name()),
            )),
        }
    }

    pub fn name_and_type(&self, index: u16) -> Result<(&str, &str), ClassFileError> {
        match self.get(index)? {
            Constant::NameAndType { name, descriptor } => {
                Ok((self.utf8(*name)?, self.utf8(*descriptor)?))
            }
            other => Err(malformed(
                index,
                format!("expected NameAndType, found {}", other.tag_name()),
            )),
        }
    }

    /// Resolves a Fieldref, Methodref or InterfaceMethodref.
    pub fn member_ref(&self, index: u16) -> Result<MemberRef<'_>, ClassFileError> {
        match self.get(index)? {
            Constant::FieldRef {
                class,
                name_and_type,
            }
            | Constant::MethodRef {
                class,
                name_and_type,
            }
            | Constant::InterfaceMethodRef {
                class,
                name_and_type,
            } => {
                let owner = self.class_name(*class)?;
                let (name, descriptor) = self.name_and_type(*name_and_type)?;
                Ok(MemberRef {
                    owner,
                    name,
                    descriptor,
                })
            }
            other => Err(malformed(
                index,
                format!("expected a member reference, found {}", other.tag_name()),
            )),
        }
    }
}

/// Decodes the JVM's modified UTF-8 (two-byte NUL, surrogate pairs encoded
/// separately). Unpaired surrogates become U+FFFD.
pub(crate) fn decode_modified_utf8(bytes: &[u8]) -> Option<String> {
    let mut units: Vec<u16> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b == 0 || b >= 0xF0 {
            return None;
        }
        if b < 0x80 {
            units.push(b as u16);
            i += 1;
        } else if b & 0xE0 == 0xC0 {
            let b2 = *bytes.get(i + 1)?;
            if b2 & 0xC0 != 0x80 {
                return None;
            }
            units.push(((b as u16 & 0x1F) << 6) | (b2 as u16 & 0x3F));
            i += 2;
        } else if b & 0xF0 == 0xE0 {
            let b2 = *bytes.get(i + 1)?;
            let b3 = *bytes.get(i + 2)?;
            if b2 & 0xC0 != 0x80 || b3 & 0xC0 != 0x80 {
                return None;
            }
            units.push(((b as u16 & 0x0F) << 12) | ((b2 as u16 & 0x3F) << 6) | (b3 as u16 & 0x3F));
            i += 3;
        } else {
            return None;
        }
    }
    Some(String::from_utf16_lossy(&units))
}

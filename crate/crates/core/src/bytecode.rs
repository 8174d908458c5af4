//! Linear decoding of JVM method bytecode.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("bad opcode 0x{opcode:02x} at offset {offset}")]
    BadOpcode { opcode: u8, offset: u32 },
    #[error("instruction at offset {offset} runs past the end of the code")]
    TruncatedCode { offset: u32 },
}

/// Operand layout of an opcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Layout {
    None,
    /// Local variable slot; widened by `wide`.
    Local,
    I8,
    I16,
    Pool8,
    Pool16,
    Branch16,
    Branch32,
    Iinc,
    NewArray,
    InvokeInterface,
    InvokeDynamic,
    MultiANewArray,
    TableSwitch,
    LookupSwitch,
    Wide,
}

/// A valid JVM opcode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Opcode(u8);

macro_rules! opcodes {
    ($($byte:literal $name:ident $layout:ident,)*) => {
        impl Opcode {
            $(pub const $name: Opcode = Opcode($byte);)*

            pub fn name(self) -> &'static str {
                match self.0 {
                    $($byte => {
                        const N: &str = stringify!($name);
                        N
                    })*
                    _ => unreachable!("Opcode is only constructed for valid bytes"),
                }
            }

            pub(crate) fn layout(self) -> Layout {
                match self.0 {
                    $($byte => Layout::$layout,)*
                    _ => unreachable!("Opcode is only constructed for valid bytes"),
                }
            }

            pub fn from_byte(byte: u8) -> Option<Opcode> {
                match byte {
                    $($byte => Some(Opcode($byte)),)*
                    _ => None,
                }
            }
        }
    };
}

#[allow(non_upper_case_globals)]
mod table {
    use super::{Layout, Opcode};

    opcodes! {
        0x00 nop None, 0x01 aconst_null None, 0x02 iconst_m1 None, 0x03 iconst_0 None,
        0x04 iconst_1 None, 0x05 iconst_2 None, 0x06 iconst_3 None, 0x07 iconst_4 None,
        0x08 iconst_5 None, 0x09 lconst_0 None, 0x0a lconst_1 None, 0x0b fconst_0 None,
        0x0c fconst_1 None, 0x0d fconst_2 None, 0x0e dconst_0 None, 0x0f dconst_1 None,
        0x10 bipush I8, 0x11 sipush I16, 0x12 ldc Pool8, 0x13 ldc_w Pool16, 0x14 ldc2_w Pool16,
        0x15 iload Local, 0x16 lload Local, 0x17 fload Local, 0x18 dload Local, 0x19 aload Local,
        0x1a iload_0 None, 0x1b iload_1 None, 0x1c iload_2 None, 0x1d iload_3 None,
        0x1e lload_0 None, 0x1f lload_1 None, 0x20 lload_2 None, 0x21 lload_3 None,
        0x22 fload_0 None, 0x23 fload_1 None, 0x24 fload_2 None, 0x25 fload_3 None,
        0x26 dload_0 None, 0x27 dload_1 None, 0x28 dload_2 None, 0x29 dload_3 None,
        0x2a aload_0 None, 0x2b aload_1 None, 0x2c aload_2 None, 0x2d aload_3 None,
        0x2e iaload None, 0x2f laload None, 0x30 faload None, 0x31 daload None,
        0x32 aaload None, 0x33 baload None, 0x34 caload None, 0x35 saload None,
        0x36 istore Local, 0x37 lstore Local, 0x38 fstore Local, 0x39 dstore Local, 0x3a astore Local,
        0x3b istore_0 None, 0x3c istore_1 None, 0x3d istore_2 None, 0x3e istore_3 None,
        0x3f lstore_0 None, 0x40 lstore_1 None, 0x41 lstore_2 None, 0x42 lstore_3 None,
        0x43 fstore_0 None, 0x44 fstore_1 None, 0x45 fstore_2 None, 0x46 fstore_3 None,
        0x47 dstore_0 None, 0x48 dstore_1 None, 0x49 dstore_2 None, 0x4a dstore_3 None,
        0x4b astore_0 None, 0x4c astore_1 None, 0x4d astore_2 None, 0x4e astore_3 None,
        0x4f iastore None, 0x50 lastore None, 0x51 fastore None, 0x52 dastore None,
        0x53 aastore None, 0x54 bastore None, 0x55 castore None, 0x56 sastore None,
        0x57 pop None, 0x58 pop2 None, 0x59 dup None, 0x5a dup_x1 None, 0x5b dup_x2 None,
        0x5c dup2 None, 0x5d dup2_x1 None, 0x5e dup2_x2 None, 0x5f swap None,
        0x60 iadd None, 0x61 ladd None, 0x62 fadd None, 0x63 dadd None,
        0x64 isub None, 0x65 lsub None, 0x66 fsub None, 0x67 dsub None,
        0x68 imul None, 0x69 lmul None, 0x6a fmul None, 0x6b dmul None,
        0x6c idiv None, 0x6d ldiv None, 0x6e fdiv None, 0x6f ddiv None,
        0x70 irem None, 0x71 lrem None, 0x72 frem None, 0x73 drem None,
        0x74 ineg None, 0x75 lneg None, 0x76 fneg None, 0x77 dneg None,
        0x78 ishl None, 0x79 lshl None, 0x7a ishr None, 0x7b lshr None,
        0x7c iushr None, 0x7d lushr None, 0x7e iand None, 0x7f land None,
        0x80 ior None, 0x81 lor None, 0x82 ixor None, 0x83 lxor None, 0x84 iinc Iinc,
        0x85 i2l None, 0x86 i2f None, 0x87 i2d None, 0x88 l2i None, 0x89 l2f None,
        0x8a l2d None, 0x8b f2i None, 0x8c f2l None, 0x8d f2d None, 0x8e d2i None,
        0x8f d2l None, 0x90 d2f None, 0x91 i2b None, 0x92 i2c None, 0x93 i2s None,
        0x94 lcmp None, 0x95 fcmpl None, 0x96 fcmpg None, 0x97 dcmpl None, 0x98 dcmpg None,
        0x99 ifeq Branch16, 0x9a ifne Branch16, 0x9b iflt Branch16, 0x9c ifge Branch16,
        0x9d ifgt Branch16, 0x9e ifle Branch16, 0x9f if_icmpeq Branch16, 0xa0 if_icmpne Branch16,
        0xa1 if_icmplt Branch16, 0xa2 if_icmpge Branch16, 0xa3 if_icmpgt Branch16,
        0xa4 if_icmple Branch16, 0xa5 if_acmpeq Branch16, 0xa6 if_acmpne Branch16,
        0xa7 goto Branch16, 0xa8 jsr Branch16, 0xa9 ret Local,
        0xaa tableswitch TableSwitch, 0xab lookupswitch LookupSwitch,
        0xac ireturn None, 0xad lreturn None, 0xae freturn None, 0xaf dreturn None,
        0xb0 areturn None, 0xb1 return_ None,
        0xb2 getstatic Pool16, 0xb3 putstatic Pool16, 0xb4 getfield Pool16, 0xb5 putfield Pool16,
        0xb6 invokevirtual Pool16, 0xb7 invokespecial Pool16, 0xb8 invokestatic Pool16,
        0xb9 invokeinterface InvokeInterface, 0xba invokedynamic InvokeDynamic,
        0xbb new Pool16, 0xbc newarray NewArray, 0xbd anewarray Pool16, 0xbe arraylength None,
        0xbf athrow None, 0xc0 checkcast Pool16, 0xc1 instanceof Pool16,
        0xc2 monitorenter None, 0xc3 monitorexit None, 0xc4 wide Wide,
        0xc5 multianewarray MultiANewArray, 0xc6 ifnull Branch16, 0xc7 ifnonnull Branch16,
        0xc8 goto_w Branch32, 0xc9 jsr_w Branch32,
    }
}

impl Opcode {
    pub fn byte(self) -> u8 {
        self.0
    }

    /// The mnemonic as a disassembler prints it.
    pub fn mnemonic(self) -> &'static str {
        match self.name() {
            "return_" => "return",
            n => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operands {
    None,
    Local(u16),
    Int(i32),
    Pool(u16),
    Branch(i32),
    Iinc {
        local: u16,
        delta: i16,
    },
    /// `newarray` primitive element type code.
    ArrayType(u8),
    MultiANewArray {
        pool: u16,
        dimensions: u8,
    },
    TableSwitch {
        default: i32,
        low: i32,
        high: i32,
        targets: Vec<i32>,
    },
    LookupSwitch {
        default: i32,
        pairs: Vec<(i32, i32)>,
    },
}

impl Operands {
    /// The constant pool index this instruction references, if any.
    pub fn pool_index(&self) -> Option<u16> {
        match *self {
            Operands::Pool(i) => Some(i),
            Operands::MultiANewArray { pool, .. } => Some(pool),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction {
    pub offset: u32,
    pub opcode: Opcode,
    pub operands: Operands,
    /// Set when the instruction was prefixed by `wide`.
    pub wide: bool,
}

struct Cursor<'a> {
    code: &'a [u8],
    pos: usize,
    start: u32,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], DecodeError> {
        let end = self.pos + N;
        let bytes = self
            .code
            .get(self.pos..end)
            .ok_or(DecodeError::TruncatedCode { offset: self.start })?;
        self.pos = end;
        Ok(bytes.try_into().expect("slice has length N"))
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take::<1>()?[0])
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        Ok(u16::from_be_bytes(self.take()?))
    }

    fn i32(&mut self) -> Result<i32, DecodeError> {
        Ok(i32::from_be_bytes(self.take()?))
    }
}

/// Decodes a complete `Code` array into instructions in offset order.
pub fn decode_bytecode(code: &[u8]) -> Result<Vec<Instruction>, DecodeError> {
    let mut out = Vec::new();
    let mut cur = Cursor {
        code,
        pos: 0,
        start: 0,
    };
    while cur.pos < code.len() {
        let offset = cur.pos as u32;
        cur.start = offset;
        let byte = cur.u8()?;
        let mut opcode = Opcode::from_byte(byte).ok_or(DecodeError::BadOpcode {
            opcode: byte,
            offset,
        })?;
        let mut wide = false;
        let operands = match opcode.layout() {
            Layout::Wide => {
                let inner = cur.u8()?;
                opcode = Opcode::from_byte(inner)
                    .filter(|op| matches!(op.layout(), Layout::Local | Layout::Iinc))
                    .ok_or(DecodeError::BadOpcode {
                        opcode: inner,
                        offset: offset + 1,
                    })?;
                wide = true;
                let local = cur.u16()?;
                if opcode == Opcode::iinc {
                    let delta = i16::from_be_bytes(cur.take()?);
                    Operands::Iinc { local, delta }
                } else {
                    Operands::Local(local)
                }
            }
            layout => decode_operands(layout, &mut cur, offset)?,
        };
        out.push(Instruction {
            offset,
            opcode,
            operands,
            wide,
        });
    }
    Ok(out)
}

fn decode_operands(
    layout: Layout,
    cur: &mut Cursor<'_>,
    offset: u32,
) -> Result<Operands, DecodeError> {
    Ok(match layout {
        Layout::None => Operands::None,
        Layout::Local => Operands::Local(cur.u8()? as u16),
        Layout::I8 => Operands::Int(cur.u8()? as i8 as i32),
        Layout::I16 => Operands::Int(cur.u16()? as i16 as i32),
        Layout::Pool8 => Operands::Pool(cur.u8()? as u16),
        Layout::Pool16 => Operands::Pool(cur.u16()?),
        Layout::Branch16 => Operands::Branch(cur.u16()? as i16 as i32),
        Layout::Branch32 => Operands::Branch(cur.i32()?),
        Layout::Iinc => Operands::Iinc {
            local: cur.u8()? as u16,
            delta: cur.u8()? as i8 as i16,
        },
        Layout::NewArray => Operands::ArrayType(cur.u8()?),
        Layout::InvokeInterface => {
            let index = cur.u16()?;
            cur.take::<2>()?;
            Operands::Pool(index)
        }
        Layout::InvokeDynamic => {
            let index = cur.u16()?;
            cur.take::<2>()?;
            Operands::Pool(index)
        }
        Layout::MultiANewArray => Operands::MultiANewArray {
            pool: cur.u16()?,
            dimensions: cur.u8()?,
        },
        Layout::TableSwitch => {
            skip_padding(cur)?;
            let default = cur.i32()?;
            let low = cur.i32()?;
            let high = cur.i32()?;
            if high < low {
                return Err(DecodeError::BadOpcode {
                    opcode: Opcode::tableswitch.byte(),
                    offset,
                });
            }
            let count = (high as i64 - low as i64 + 1) as usize;
            if count > (cur.code.len() - cur.pos) / 4 {
                return Err(DecodeError::TruncatedCode { offset });
            }
            let targets = (0..count).map(|_| cur.i32()).collect::<Result<_, _>>()?;
            Operands::TableSwitch {
                default,
                low,
                high,
                targets,
            }
        }
        Layout::LookupSwitch => {
            skip_padding(cur)?;
            let default = cur.i32()?;
            let npairs = cur.i32()?;
            if npairs < 0 {
                return Err(DecodeError::BadOpcode {
                    opcode: Opcode::lookupswitch.byte(),
                    offset,
                });
            }
            if npairs as usize > (cur.code.len() - cur.pos) / 8 {
                return Err(DecodeError::TruncatedCode { offset });
            }
            let pairs = (0..npairs)
                .map(|_| Ok((cur.i32()?, cur.i32()?)))
                .collect::<Result<_, DecodeError>>()?;
            Operands::LookupSwitch { default, pairs }
        }
        Layout::Wide => unreachable!("handled by the caller"),
    })
}

/// Switch operands start at the next multiple of four from the code start.
fn skip_padding(cur: &mut Cursor<'_>) -> Result<(), DecodeError> {
    while !cur.pos.is_multiple_of(4) {
        cur.u8()?;
    }
    Ok(())
}

//! Extraction: bytecode to generalized, interpreted token sequences.

use std::sync::Arc;

use thiserror::Error;

use crate::bytecode::{decode_bytecode, DecodeError, Instruction, Opcode, Operands};
use crate::classfile::{ClassFileError, Constant, ConstantPool, MethodBody, RawClass, RawMethod};
use crate::program::{MethodKey, ProgramModel};
use crate::token::{Mnemonic, Origin, Token, TokenSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractFailure {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Pool(#[from] ClassFileError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{method}: {source}")]
pub struct ExtractError {
    pub method: MethodKey,
    #[source]
    pub source: ExtractFailure,
}

/// Maps an opcode to its family. `None` means the instruction is dropped:
/// `nop`, the unconditional jumps, and the `wide` prefix (which decoding
/// folds into the instruction it modifies).
pub fn generalize(opcode: Opcode) -> Option<Mnemonic> {
    use Mnemonic::*;
    let family = match opcode.byte() {
        0x00 | 0xa7 | 0xc8 | 0xc4 => return None,
        0x01..=0x14 => Const,
        0x15..=0x2d => Load,
        0x2e..=0x35 | 0xbe => ArrayLoad,
        0x36..=0x4e => Store,
        0x4f..=0x56 => ArrayStore,
        0x57..=0x5f => Stack,
        0x60..=0x84 => Arith,
        0x85..=0x93 => Conv,
        0x94..=0x98 => Cmp,
        0x99..=0xa6 | 0xc6 | 0xc7 | 0xa8 | 0xa9 | 0xc9 => Branch,
        0xaa | 0xab => Switch,
        0xac..=0xb1 => Return,
        0xb2 | 0xb4 => FieldGet,
        0xb3 | 0xb5 => FieldPut,
        0xb6..=0xba => Invoke,
        0xbb => New,
        0xbc | 0xbd | 0xc5 => NewArray,
        0xbf => Throw,
        0xc0 => Cast,
        0xc1 => InstanceOf,
        0xc2 | 0xc3 => Monitor,
        _ => unreachable!("every valid opcode has a family"),
    };
    Some(family)
}

/// Generalizes either an opcode mnemonic (`iload_1`) or a family name
/// (`LOAD`). Family names map to themselves.
pub fn generalize_name(name: &str) -> Option<Mnemonic> {
    if let Ok(m) = name.parse::<Mnemonic>() {
        return Some(m);
    }
    (0u8..=0xc9)
        .filter_map(Opcode::from_byte)
        .find(|op| op.mnemonic() == name)
        .and_then(generalize)
}

fn array_type_name(code: u8) -> String {
    match code {
        4 => "boolean".into(),
        5 => "char".into(),
        6 => "float".into(),
        7 => "double".into(),
        8 => "byte".into(),
        9 => "short".into(),
        10 => "int".into(),
        11 => "long".into(),
        other => format!("type{other}"),
    }
}

/// Renders a loadable constant. Integers in decimal, floating point in the
/// shortest text that round-trips, strings quoted and escaped.
fn literal(pool: &ConstantPool, index: u16) -> Result<String, ClassFileError> {
    Ok(match pool.get(index)? {
        Constant::Integer(v) => v.to_string(),
        Constant::Long(v) => v.to_string(),
        Constant::Float(v) => format!("{v:?}"),
        Constant::Double(v) => format!("{v:?}"),
        Constant::String { value } => format!("{:?}", pool.utf8(*value)?),
        Constant::Class { name } => pool.utf8(*name)?.to_string(),
        Constant::MethodType { descriptor } => pool.utf8(*descriptor)?.to_string(),
        Constant::MethodHandle { reference, .. } => {
            let m = pool.member_ref(*reference)?;
            format!("{}.{}:{}", m.owner, m.name, m.descriptor)
        }
        Constant::Dynamic { name_and_type, .. } => {
            let (name, descriptor) = pool.name_and_type(*name_and_type)?;
            format!("{name}:{descriptor}")
        }
        other => {
            return Err(ClassFileError::MalformedPool {
                index,
                reason: format!("{other:?} is not loadable"),
            })
        }
    })
}

/// Resolves the operand annotation of one instruction. Local slots, branch
/// offsets and inline immediates are deliberately not annotated.
pub fn interpret(ins: &Instruction, pool: &ConstantPool) -> Result<Option<String>, ClassFileError> {
    let Some(index) = ins.operands.pool_index() else {
        return Ok(match ins.operands {
            Operands::ArrayType(code) if ins.opcode == Opcode::newarray => {
                Some(array_type_name(code))
            }
            _ => None,
        });
    };
    let op = ins.opcode;
    let text = if op == Opcode::invokedynamic {
        match pool.get(index)? {
            Constant::InvokeDynamic { name_and_type, .. } => {
                let (name, descriptor) = pool.name_and_type(*name_and_type)?;
                format!("<dynamic>.{name}:{descriptor}")
            }
            _ => {
                return Err(ClassFileError::MalformedPool {
                    index,
                    reason: "invokedynamic needs an InvokeDynamic entry".into(),
                })
            }
        }
    } else if generalize(op) == Some(Mnemonic::Invoke) {
        let m = pool.member_ref(index)?;
        format!("{}.{}:{}", m.owner, m.name, m.descriptor)
    } else if matches!(
        generalize(op),
        Some(Mnemonic::FieldGet | Mnemonic::FieldPut)
    ) {
        let m = pool.member_ref(index)?;
        format!("{}.{}", m.owner, m.name)
    } else if matches!(op, Opcode::ldc | Opcode::ldc_w | Opcode::ldc2_w) {
        literal(pool, index)?
    } else {
        // new, checkcast, instanceof, anewarray, multianewarray
        pool.class_name(index)?.to_string()
    };
    Ok(Some(text))
}

/// Token sequence of one method. Abstract methods yield an empty sequence;
/// fixture tokens are returned as given.
pub fn extract_method_tokens(
    class: &RawClass,
    method: &RawMethod,
) -> Result<TokenSequence, ExtractError> {
    let key = MethodKey::new(&class.name, &method.name, &method.descriptor);
    let code = match &method.body {
        MethodBody::Abstract => return Ok(TokenSequence::empty(key)),
        MethodBody::Tokens(tokens) => {
            return Ok(TokenSequence {
                source_method: key,
                tokens: tokens.clone(),
            })
        }
        MethodBody::Bytecode(code) => code,
    };
    let fail = |source: ExtractFailure| ExtractError {
        method: key.clone(),
        source,
    };
    let instructions = decode_bytecode(code).map_err(|e| fail(e.into()))?;
    let owner = Arc::new(key.clone());
    let mut tokens = Vec::with_capacity(instructions.len());
    for ins in &instructions {
        let Some(mnemonic) = generalize(ins.opcode) else {
            continue;
        };
        let annotation = interpret(ins, &class.pool).map_err(|e| fail(e.into()))?;
        tokens.push(Token {
            mnemonic,
            annotation: annotation.map(Arc::from),
            origin: Origin {
                method: owner.clone(),
                offset: ins.offset,
            },
        });
    }
    Ok(TokenSequence {
        source_method: key,
        tokens,
    })
}

/// Extracts every method of a program, in `methods_view` order.
pub fn extract_program(program: &ProgramModel) -> Result<Vec<TokenSequence>, ExtractError> {
    use rayon::prelude::*;
    let methods: Vec<(&RawClass, &RawMethod)> = program
        .classes
        .values()
        .flat_map(|c| c.methods.iter().map(move |m| (c, m)))
        .collect();
    methods
        .par_iter()
        .map(|(c, m)| extract_method_tokens(c, m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classfile::ClassKind;

    fn op(name: &str) -> Opcode {
        (0u8..=0xc9)
            .filter_map(Opcode::from_byte)
            .find(|o| o.mnemonic() == name)
            .unwrap_or_else(|| panic!("no opcode {name}"))
    }

    #[test]
    fn constant_pushes() {
        for name in [
            "aconst_null",
            "iconst_m1",
            "iconst_0",
            "iconst_1",
            "iconst_5",
            "lconst_0",
            "lconst_1",
            "fconst_0",
            "fconst_2",
            "dconst_1",
            "bipush",
            "sipush",
            "ldc",
            "ldc_w",
            "ldc2_w",
        ] {
            assert_eq!(generalize(op(name)), Some(Mnemonic::Const), "{name}");
        }
    }

    #[test]
    fn loads_and_stores() {
        for name in ["iload_0", "aload", "fload_2", "lload", "dload_3", "aload_0"] {
            assert_eq!(generalize(op(name)), Some(Mnemonic::Load), "{name}");
        }
        for name in ["istore_1", "astore", "dstore_0", "lstore_3"] {
            assert_eq!(generalize(op(name)), Some(Mnemonic::Store), "{name}");
        }
    }

    #[test]
    fn invocations() {
        for name in [
            "invokevirtual",
            "invokestatic",
            "invokeinterface",
            "invokespecial",
            "invokedynamic",
        ] {
            assert_eq!(generalize(op(name)), Some(Mnemonic::Invoke), "{name}");
        }
    }

    #[test]
    fn dropped() {
        for name in ["nop", "goto", "goto_w", "wide"] {
            assert_eq!(generalize(op(name)), None, "{name}");
        }
    }

    /// Family mapping table written out independently, one entry per opcode
    /// mnemonic, and compared against `generalize` for all 202 opcodes.
    #[test]
    fn full_mapping_table() {
        let table: &[(&str, &[&str])] = &[
            (
                "CONST",
                &[
                    "aconst_null",
                    "iconst_m1",
                    "iconst_0",
                    "iconst_1",
                    "iconst_2",
                    "iconst_3",
                    "iconst_4",
                    "iconst_5",
                    "lconst_0",
                    "lconst_1",
                    "fconst_0",
                    "fconst_1",
                    "fconst_2",
                    "dconst_0",
                    "dconst_1",
                    "bipush",
                    "sipush",
                    "ldc",
                    "ldc_w",
                    "ldc2_w",
                ],
            ),
            (
                "LOAD",
                &[
                    "iload", "lload", "fload", "dload", "aload", "iload_0", "iload_1", "iload_2",
                    "iload_3", "lload_0", "lload_1", "lload_2", "lload_3", "fload_0", "fload_1",
                    "fload_2", "fload_3", "dload_0", "dload_1", "dload_2", "dload_3", "aload_0",
                    "aload_1", "aload_2", "aload_3",
                ],
            ),
            (
                "ARRAY_LOAD",
                &[
                    "iaload",
                    "laload",
                    "faload",
                    "daload",
                    "aaload",
                    "baload",
                    "caload",
                    "saload",
                    "arraylength",
                ],
            ),
            (
                "STORE",
                &[
                    "istore", "lstore", "fstore", "dstore", "astore", "istore_0", "istore_1",
                    "istore_2", "istore_3", "lstore_0", "lstore_1", "lstore_2", "lstore_3",
                    "fstore_0", "fstore_1", "fstore_2", "fstore_3", "dstore_0", "dstore_1",
                    "dstore_2", "dstore_3", "astore_0", "astore_1", "astore_2", "astore_3",
                ],
            ),
            (
                "ARRAY_STORE",
                &[
                    "iastore", "lastore", "fastore", "dastore", "aastore", "bastore", "castore",
                    "sastore",
                ],
            ),
            (
                "STACK",
                &[
                    "pop", "pop2", "dup", "dup_x1", "dup_x2", "dup2", "dup2_x1", "dup2_x2", "swap",
                ],
            ),
            (
                "ARITH",
                &[
                    "iadd", "ladd", "fadd", "dadd", "isub", "lsub", "fsub", "dsub", "imul", "lmul",
                    "fmul", "dmul", "idiv", "ldiv", "fdiv", "ddiv", "irem", "lrem", "frem", "drem",
                    "ineg", "lneg", "fneg", "dneg", "ishl", "lshl", "ishr", "lshr", "iushr",
                    "lushr", "iand", "land", "ior", "lor", "ixor", "lxor", "iinc",
                ],
            ),
            (
                "CONV",
                &[
                    "i2l", "i2f", "i2d", "l2i", "l2f", "l2d", "f2i", "f2l", "f2d", "d2i", "d2l",
                    "d2f", "i2b", "i2c", "i2s",
                ],
            ),
            ("CMP", &["lcmp", "fcmpl", "fcmpg", "dcmpl", "dcmpg"]),
            (
                "BRANCH",
                &[
                    "ifeq",
                    "ifne",
                    "iflt",
                    "ifge",
                    "ifgt",
                    "ifle",
                    "if_icmpeq",
                    "if_icmpne",
                    "if_icmplt",
                    "if_icmpge",
                    "if_icmpgt",
                    "if_icmple",
                    "if_acmpeq",
                    "if_acmpne",
                    "ifnull",
                    "ifnonnull",
                    "jsr",
                    "jsr_w",
                    "ret",
                ],
            ),
            ("SWITCH", &["tableswitch", "lookupswitch"]),
            (
                "RETURN",
                &[
                    "ireturn", "lreturn", "freturn", "dreturn", "areturn", "return",
                ],
            ),
            ("FIELD_GET", &["getstatic", "getfield"]),
            ("FIELD_PUT", &["putstatic", "putfield"]),
            (
                "INVOKE",
                &[
                    "invokevirtual",
                    "invokespecial",
                    "invokestatic",
                    "invokeinterface",
                    "invokedynamic",
                ],
            ),
            ("NEW", &["new"]),
            ("NEWARRAY", &["newarray", "anewarray", "multianewarray"]),
            ("THROW", &["athrow"]),
            ("CAST", &["checkcast"]),
            ("INSTANCEOF", &["instanceof"]),
            ("MONITOR", &["monitorenter", "monitorexit"]),
        ];
        let dropped = ["nop", "goto", "goto_w", "wide"];
        let mut seen = 0;
        for (family, names) in table {
            for name in *names {
                assert_eq!(
                    generalize(op(name)).map(Mnemonic::as_str),
                    Some(*family),
                    "{name}"
                );
                seen += 1;
            }
        }
        for name in dropped {
            assert_eq!(generalize(op(name)), None);
            seen += 1;
        }
        assert_eq!(seen, 202);
    }

    #[test]
    fn family_names_are_fixed_points() {
        for m in Mnemonic::ALL {
            assert_eq!(generalize_name(m.as_str()), Some(m));
        }
        assert_eq!(generalize_name("iload_2"), Some(Mnemonic::Load));
        assert_eq!(generalize_name("nop"), None);
        assert_eq!(generalize_name("bogus"), None);
    }

    fn class_with(code: Vec<u8>) -> (RawClass, RawMethod) {
        let method = RawMethod {
            name: "f".into(),
            descriptor: "()I".into(),
            access: 0,
            body: MethodBody::Bytecode(code),
        };
        let class = RawClass {
            name: "A".into(),
            kind: ClassKind::Class,
            super_name: None,
            interface_names: vec![],
            methods: vec![method.clone()],
            pool: Arc::default(),
        };
        (class, method)
    }

    #[test]
    fn return_zero_tokens() {
        let (c, m) = class_with(vec![0x03, 0xAC]);
        let seq = extract_method_tokens(&c, &m).unwrap();
        let shown: Vec<_> = seq.tokens.iter().map(ToString::to_string).collect();
        assert_eq!(shown, vec!["CONST", "RETURN"]);
        assert_eq!(seq.tokens[1].origin.offset, 1);
    }

    #[test]
    fn nops_vanish() {
        let (c, m) = class_with(vec![0x00, 0x00, 0x00]);
        assert!(extract_method_tokens(&c, &m).unwrap().is_empty());
    }

    #[test]
    fn slots_are_not_annotated() {
        let (c, m) = class_with(vec![0x1C, 0x15, 0x07, 0xAC]);
        let seq = extract_method_tokens(&c, &m).unwrap();
        assert!(seq.tokens.iter().all(|t| t.annotation.is_none()));
    }

    #[test]
    fn dangling_pool_reference_is_reported() {
        let (c, m) = class_with(vec![0xB8, 0x00, 0x05, 0xB1]);
        let err = extract_method_tokens(&c, &m).unwrap_err();
        assert!(matches!(
            err.source,
            ExtractFailure::Pool(ClassFileError::MalformedPool { .. })
        ));
        let (c, m) = class_with(vec![0xB8, 0x00]);
        let err = extract_method_tokens(&c, &m).unwrap_err();
        assert_eq!(
            err.source,
            ExtractFailure::Decode(DecodeError::TruncatedCode { offset: 0 })
        );
    }
}

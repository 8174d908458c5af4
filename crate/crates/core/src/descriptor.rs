//! JVM method descriptors: `(` field-type* `)` (field-type | `V`).

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed method descriptor `{descriptor}` at byte {position}")]
pub struct DescriptorError {
    pub descriptor: String,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDescriptor {
    pub params: Vec<String>,
    pub ret: String,
}

impl MethodDescriptor {
    pub fn parse(text: &str) -> Result<Self, DescriptorError> {
        let err = |position| DescriptorError {
            descriptor: text.to_string(),
            position,
        };
        let bytes = text.as_bytes();
        if bytes.first() != Some(&b'(') {
            return Err(err(0));
        }
        let mut pos = 1;
        let mut params = Vec::new();
        loop {
            match bytes.get(pos) {
                None => return Err(err(pos)),
                Some(b')') => {
                    pos += 1;
                    break;
                }
                Some(_) => {
                    let end = field_type_end(bytes, pos).ok_or_else(|| err(pos))?;
                    params.push(text[pos..end].to_string());
                    pos = end;
                }
            }
        }
        let ret_end = if bytes.get(pos) == Some(&b'V') {
            pos + 1
        } else {
            field_type_end(bytes, pos).ok_or_else(|| err(pos))?
        };
        if ret_end != bytes.len() {
            return Err(err(ret_end));
        }
        Ok(MethodDescriptor {
            params,
            ret: text[pos..ret_end].to_string(),
        })
    }

    /// Parameter type tokens followed by the return type token.
    pub fn type_tokens(&self) -> impl Iterator<Item = &str> {
        self.params
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.ret.as_str()))
    }
}

/// Returns the exclusive end of the field type starting at `pos`.
fn field_type_end(bytes: &[u8], mut pos: usize) -> Option<usize> {
    while bytes.get(pos) == Some(&b'[') {
        pos += 1;
    }
    match bytes.get(pos)? {
        b'B' | b'C' | b'D' | b'F' | b'I' | b'J' | b'S' | b'Z' => Some(pos + 1),
        b'L' => {
            let rest = &bytes[pos + 1..];
            let semi = rest.iter().position(|&b| b == b';')?;
            if semi == 0 {
                return None;
            }
            Some(pos + 1 + semi + 1)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_shapes() {
        let d = MethodDescriptor::parse("()V").unwrap();
        assert!(d.params.is_empty());
        assert_eq!(d.ret, "V");

        let d =
            MethodDescriptor::parse("(I[JLjava/lang/String;[[Ljava/util/List;)Ljava/lang/Object;")
                .unwrap();
        assert_eq!(
            d.params,
            vec!["I", "[J", "Ljava/lang/String;", "[[Ljava/util/List;"]
        );
        assert_eq!(d.ret, "Ljava/lang/Object;");
        assert_eq!(d.type_tokens().count(), 5);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "V",
            "(",
            "()",
            "(V)V",
            "(L;)V",
            "(Ljava/lang/String)V",
            "()VV",
            "(Q)V",
            "()[",
        ] {
            assert!(MethodDescriptor::parse(bad).is_err(), "{bad}");
        }
    }
}

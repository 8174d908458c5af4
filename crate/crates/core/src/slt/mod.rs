//! Lexical baseline: whole-source token streams tiled in one pass.

mod lexer;

pub use lexer::{
    abstract_identifiers, keywords, lex_source, LexError, LexKind, LexToken, Position,
};

use crate::rkgst::{matched, rkgst};
use crate::similarity::{CompareOptions, ComparisonReport, MethodPair, Mode};

/// Key used for both sides of the single whole-stream pair.
pub const STREAM_KEY: &str = "<stream>";

/// Tiles two complete lexeme streams against each other.
pub fn slt_compare_tokens(
    a: &[LexToken],
    b: &[LexToken],
    options: &CompareOptions,
) -> ComparisonReport {
    let tiles = rkgst(a, b, options.min_match);
    let pair = MethodPair {
        key_a: STREAM_KEY.to_string(),
        key_b: STREAM_KEY.to_string(),
        sig_score: 1.0,
        matched: matched(&tiles),
        tiles,
    };
    ComparisonReport::new(
        Mode::Slt,
        vec![pair],
        options.involved.apply(a.len(), b.len()),
    )
}

pub fn slt_compare(
    src_a: &str,
    src_b: &str,
    options: &CompareOptions,
    abstract_ids: bool,
) -> Result<ComparisonReport, LexError> {
    let mut a = lex_source(src_a)?;
    let mut b = lex_source(src_b)?;
    if abstract_ids {
        abstract_identifiers(&mut a);
        abstract_identifiers(&mut b);
    }
    Ok(slt_compare_tokens(&a, &b, options))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_sources() {
        let src = "class A { int f() { return 1; } }";
        let r = slt_compare(src, src, &CompareOptions::default(), false).unwrap();
        assert_eq!(r.similarity, 1.0);
        assert_eq!(r.imt, 0);
        assert_eq!(r.pairs.len(), 1);
        assert_eq!(r.mode, Mode::Slt);
    }

    #[test]
    fn single_token_overlap_is_below_threshold() {
        let r = slt_compare("x", "x + y", &CompareOptions::default(), false).unwrap();
        assert_eq!(r.matched_total, 0);
    }

    #[test]
    fn lex_errors_propagate() {
        assert!(slt_compare("\"", "", &CompareOptions::default(), false).is_err());
    }

    #[test]
    fn abstraction_flag() {
        let options = CompareOptions::default();
        let raw = slt_compare("int a = b;", "int c = d;", &options, false).unwrap();
        let abs = slt_compare("int a = b;", "int c = d;", &options, true).unwrap();
        assert_eq!(raw.matched_total, 0);
        assert_eq!(abs.similarity, 1.0);
    }
}

//! Method signature similarity, used both to find implementer methods and
//! to pair methods across programs.

use std::collections::HashMap;

use crate::descriptor::MethodDescriptor;

/// `0.5 * name_sim + 0.5 * desc_sim`.
///
/// `name_sim` is `2 * LCS / (|a| + |b|)` over the characters of the names.
/// `desc_sim` is the Dice coefficient over the multisets of parameter type
/// tokens plus the return type token.
pub fn signature_similarity(a: (&str, &str), b: (&str, &str)) -> f64 {
    if a == b {
        return 1.0;
    }
    0.5 * name_similarity(a.0, b.0) + 0.5 * descriptor_similarity(a.1, b.1)
}

pub fn name_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    2.0 * lcs_len(&a, &b) as f64 / (a.len() + b.len()) as f64
}

fn lcs_len(a: &[char], b: &[char]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for &ca in a {
        let mut diag = 0;
        for (j, &cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if ca == cb { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

pub fn descriptor_similarity(a: &str, b: &str) -> f64 {
    let ta = type_tokens(a);
    let tb = type_tokens(b);
    let total = ta.len() + tb.len();
    if total == 0 {
        return 1.0;
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &ta {
        *counts.entry(t).or_default() += 1;
    }
    let mut shared = 0;
    for t in &tb {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                shared += 1;
            }
        }
    }
    2.0 * shared as f64 / total as f64
}

/// Malformed descriptors degrade to a single opaque token.
fn type_tokens(descriptor: &str) -> Vec<String> {
    match MethodDescriptor::parse(descriptor) {
        Ok(d) => d.type_tokens().map(str::to_string).collect(),
        Err(_) => vec![descriptor.to_string()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        assert_eq!(signature_similarity(("foo1", "()V"), ("foo1", "()V")), 1.0);
    }

    #[test]
    fn total_mismatch() {
        assert_eq!(signature_similarity(("foo", "()V"), ("bar", "(I)I")), 0.0);
    }

    /// Hand computation: LCS("setName", "setname") = |s,e,t,a,m,e| = 6, so
    /// name_sim = 12/14 = 6/7. Both descriptors are {Ljava/lang/String;, V},
    /// so desc_sim = 4/4 = 1. Score = (6/7 + 1) / 2 = 13/14.
    #[test]
    fn case_changed_setter() {
        let s = signature_similarity(
            ("setName", "(Ljava/lang/String;)V"),
            ("setname", "(Ljava/lang/String;)V"),
        );
        assert!((s - 13.0 / 14.0).abs() < 1e-12, "{s}");
    }

    #[test]
    fn multiset_dice() {
        // {I, I, V} vs {I, V}: shared 2, total 5
        assert!((descriptor_similarity("(II)V", "(I)V") - 0.8).abs() < 1e-12);
        // {I, J, I} vs {J, I, I}: identical multisets
        assert_eq!(descriptor_similarity("(IJ)I", "(JI)I"), 1.0);
    }

    #[test]
    fn lcs_basics() {
        let c = |s: &str| s.chars().collect::<Vec<_>>();
        assert_eq!(lcs_len(&c("foo1"), &c("foo2")), 3);
        assert_eq!(lcs_len(&c("abc"), &c("")), 0);
        assert_eq!(lcs_len(&c("AGGTAB"), &c("GXTXAYB")), 4);
    }
}

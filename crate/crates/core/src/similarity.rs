//! Method pairing and program-level metrics.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linearize::{signature_similarity, MethodTable};
use crate::program::MethodKey;
use crate::rkgst::{matched, rkgst, Tile};
use crate::token::Token;

pub const DEFAULT_MIN_MATCH: usize = 2;
pub const DEFAULT_PAIRING_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "LA")]
    La,
    #[serde(rename = "LA_M")]
    LaM,
    #[serde(rename = "SLT")]
    Slt,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::La => "LA",
            Mode::LaM => "LA_M",
            Mode::Slt => "SLT",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The token count mismatches are measured against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvolvedBaseline {
    #[default]
    Min,
    Max,
    /// Arithmetic mean, rounded down.
    Mean,
}

impl InvolvedBaseline {
    pub fn apply(self, total_a: usize, total_b: usize) -> usize {
        match self {
            InvolvedBaseline::Min => total_a.min(total_b),
            InvolvedBaseline::Max => total_a.max(total_b),
            InvolvedBaseline::Mean => (total_a + total_b) / 2,
        }
    }
}

impl FromStr for InvolvedBaseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(InvolvedBaseline::Min),
            "max" => Ok(InvolvedBaseline::Max),
            "mean" => Ok(InvolvedBaseline::Mean),
            other => Err(format!("unknown involved baseline `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub min_match: usize,
    pub pairing_threshold: f64,
    pub involved: InvolvedBaseline,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            min_match: DEFAULT_MIN_MATCH,
            pairing_threshold: DEFAULT_PAIRING_THRESHOLD,
            involved: InvolvedBaseline::Min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodPair {
    pub key_a: String,
    pub key_b: String,
    pub sig_score: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tiles: Vec<Tile>,
    pub matched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub a: String,
    pub b: String,
    pub mode: Mode,
    pub pairs: Vec<MethodPair>,
    pub matched_total: usize,
    pub involved: usize,
    pub mt: usize,
    pub imt: i64,
    pub similarity: f64,
}

impl ComparisonReport {
    /// Builds a report from pairs, deriving every metric.
    pub fn new(mode: Mode, pairs: Vec<MethodPair>, involved: usize) -> Self {
        let matched_total: usize = pairs.iter().map(|p| p.matched).sum();
        assert!(
            matched_total <= involved,
            "matched {matched_total} exceeds involved {involved}"
        );
        let mt = involved - matched_total;
        ComparisonReport {
            a: String::new(),
            b: String::new(),
            mode,
            pairs,
            matched_total,
            involved,
            mt,
            imt: imt(mt),
            similarity: if involved == 0 {
                0.0
            } else {
                matched_total as f64 / involved as f64
            },
        }
    }

    pub fn with_names(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.a = a.into();
        self.b = b.into();
        self
    }

    /// Drops tile detail, keeping counts.
    pub fn without_tiles(mut self) -> Self {
        for p in &mut self.pairs {
            p.tiles.clear();
        }
        self
    }

    fn mirrored(mut self) -> Self {
        std::mem::swap(&mut self.a, &mut self.b);
        for p in &mut self.pairs {
            std::mem::swap(&mut p.key_a, &mut p.key_b);
            for t in &mut p.tiles {
                std::mem::swap(&mut t.start_a, &mut t.start_b);
            }
            p.tiles.sort_unstable();
        }
        self.pairs.sort_by(pair_order);
        self
    }
}

/// Score descending, then key order.
fn pair_order(x: &MethodPair, y: &MethodPair) -> Ordering {
    y.sig_score
        .total_cmp(&x.sig_score)
        .then_with(|| x.key_a.cmp(&y.key_a))
        .then_with(|| x.key_b.cmp(&y.key_b))
}

pub fn imt(mt: usize) -> i64 {
    -(mt as i64)
}

/// Greedy pairing: all cross pairs sorted by signature similarity
/// (descending, then by keys), accepting a pair when both methods are still
/// free and the score reaches `threshold`.
pub fn pair_methods<'k>(
    a: &[&'k MethodKey],
    b: &[&'k MethodKey],
    threshold: f64,
) -> Vec<(&'k MethodKey, &'k MethodKey, f64)> {
    let mut candidates = Vec::new();
    for (i, ka) in a.iter().enumerate() {
        for (j, kb) in b.iter().enumerate() {
            let score =
                signature_similarity((&ka.name, &ka.descriptor), (&kb.name, &kb.descriptor));
            if score >= threshold {
                candidates.push((i, j, score));
            }
        }
    }
    candidates.sort_by(|x, y| {
        y.2.total_cmp(&x.2)
            .then_with(|| a[x.0].cmp(a[y.0]))
            .then_with(|| b[x.1].cmp(b[y.1]))
    });
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::new();
    for (i, j, score) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((a[i], b[j], score));
        }
    }
    out
}

/// Compares two processed method tables.
///
/// The tables are put in a canonical order before pairing and tiling, so
/// swapping the arguments yields the mirrored report.
pub fn compare_programs(
    a: &MethodTable,
    b: &MethodTable,
    mode: Mode,
    options: &CompareOptions,
) -> ComparisonReport {
    if canonical_form(a) > canonical_form(b) {
        return compare_oriented(b, a, mode, options).mirrored();
    }
    compare_oriented(a, b, mode, options)
}

fn canonical_form(table: &MethodTable) -> Vec<(&MethodKey, &[Token])> {
    let mut form: Vec<(&MethodKey, &[Token])> = table
        .iter()
        .map(|(k, s)| (k, s.tokens.as_slice()))
        .collect();
    form.sort_unstable();
    form
}

fn compare_oriented(
    a: &MethodTable,
    b: &MethodTable,
    mode: Mode,
    options: &CompareOptions,
) -> ComparisonReport {
    let keys_a: Vec<&MethodKey> = a.keys().collect();
    let keys_b: Vec<&MethodKey> = b.keys().collect();
    let paired = pair_methods(&keys_a, &keys_b, options.pairing_threshold);
    let pairs: Vec<MethodPair> = paired
        .par_iter()
        .map(|&(ka, kb, sig_score)| {
            let ta = &a.get(ka).expect("paired key exists").tokens;
            let tb = &b.get(kb).expect("paired key exists").tokens;
            let tiles = rkgst(ta, tb, options.min_match);
            MethodPair {
                key_a: ka.to_string(),
                key_b: kb.to_string(),
                sig_score,
                matched: matched(&tiles),
                tiles,
            }
        })
        .collect();
    let involved = options.involved.apply(a.total_tokens(), b.total_tokens());
    ComparisonReport::new(mode, pairs, involved)
}

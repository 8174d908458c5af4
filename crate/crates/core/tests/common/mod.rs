//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lowdup_core::fixture::load_fixture;
use lowdup_core::ProgramModel;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn fixture_path(name: &str) -> PathBuf {
    data_dir().join("fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> ProgramModel {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    load_fixture(&text).unwrap()
}

pub fn fixture_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(data_dir().join("fixtures"))
        .unwrap()
        .map(|e| {
            e.unwrap()
                .path()
                .file_stem()
                .unwrap()
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    names.sort();
    names
}

pub fn corpus_dirs() -> Vec<PathBuf> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(data_dir().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    dirs.sort();
    dirs
}

/// Greedy tiling by exhaustive search: recompute the length of every free
/// common run, take the longest (smallest start in `a`, then in `b`, on
/// ties), mark it, repeat. The lexicographically smaller sequence goes
/// first. Returns `(start_a, start_b, length)` in the caller's orientation,
/// sorted.
#[derive(Default)]
pub struct Oracle {
    run: Vec<u32>,
    eq: Vec<u64>,
    level: Vec<u64>,
    next: Vec<u64>,
    ids_a: Vec<i32>,
    ids_b: Vec<i32>,
}

impl Oracle {
    pub fn tiles<T: Ord>(
        &mut self,
        a: &[T],
        b: &[T],
        min_match: usize,
    ) -> Vec<(usize, usize, usize)> {
        let mut tiles = Vec::new();
        self.tile_with(a, b, min_match, |t| tiles.push(t));
        tiles.sort_unstable();
        tiles
    }

    pub fn matched<T: Ord>(&mut self, a: &[T], b: &[T], min_match: usize) -> usize {
        let mut total = 0;
        self.tile_with(a, b, min_match, |t| total += t.2);
        total
    }

    /// Same count by bit-parallel search; the second sequence (after
    /// orientation) may hold at most 64 elements. Bit j of `level[i]` is set
    /// when a free common run of at least k elements starts at (i, j); one
    /// more element needs the bit for (i + 1, j + 1) as well.
    pub fn matched_bits<T: Ord>(&mut self, a: &[T], b: &[T], min_match: usize) -> usize {
        let (x, y) = if a > b { (b, a) } else { (a, b) };
        let m = y.len();
        assert!(m <= 64, "bit-parallel search needs at most 64 columns");
        self.eq.clear();
        for (i, t) in x.iter().enumerate() {
            let bits = match x[..i].iter().position(|u| u == t) {
                Some(p) => self.eq[p],
                None => y
                    .iter()
                    .enumerate()
                    .fold(0u64, |bits, (j, u)| bits | (u64::from(t == u) << j)),
            };
            self.eq.push(bits);
        }
        let mut total = 0;
        loop {
            self.level.clone_from(&self.eq);
            let mut longest = 0;
            // After the loop `next` holds the last nonzero level.
            while self.level.iter().any(|&bits| bits != 0) {
                longest += 1;
                self.next.clear();
                self.next
                    .extend(self.level.windows(2).map(|w| w[0] & (w[1] >> 1)));
                self.next.push(0);
                std::mem::swap(&mut self.level, &mut self.next);
            }
            if longest < min_match.max(1) {
                return total;
            }
            let i = self.next.iter().position(|&bits| bits != 0).unwrap();
            let j = self.next[i].trailing_zeros() as usize;
            let columns = (u64::MAX >> (64 - longest)) << j;
            for (r, bits) in self.eq.iter_mut().enumerate() {
                *bits = if (i..i + longest).contains(&r) {
                    0
                } else {
                    *bits & !columns
                };
            }
            total += longest;
        }
    }

    fn tile_with<T: Ord>(
        &mut self,
        a: &[T],
        b: &[T],
        min_match: usize,
        mut emit: impl FnMut((usize, usize, usize)),
    ) {
        let swapped = a > b;
        let (x, y) = if swapped { (b, a) } else { (a, b) };
        let (n, m) = (x.len(), y.len());
        // Equal elements share the position of their first occurrence in
        // x ++ y. Marking replaces an id with a negative value no other
        // position has.
        let first = |t: &T| match x.iter().position(|u| u == t) {
            Some(p) => p as i32,
            None => (n + y.iter().position(|u| u == t).unwrap()) as i32,
        };
        self.ids_a.clear();
        self.ids_a.extend(x.iter().map(first));
        self.ids_b.clear();
        self.ids_b.extend(y.iter().map(first));
        let width = m + 1;
        self.run.clear();
        self.run.resize((n + 1) * width, 0);

        loop {
            // Row i holds the length of the free common run starting at
            // (i, j); the first cell holding the maximum in (i, j) order wins.
            let (mut longest, mut best_row) = (0, 0);
            for i in (0..n).rev() {
                let (row, below) = self.run[i * width..].split_at_mut(width);
                let (row, below, ids_b) = (&mut row[..m], &below[1..=m], &self.ids_b[..m]);
                let xi = self.ids_a[i];
                for j in 0..m {
                    row[j] = u32::from(xi == ids_b[j]) * (below[j] + 1);
                }
                let row_max = row.iter().copied().max().unwrap_or(0);
                if row_max > 0 && row_max >= longest {
                    (longest, best_row) = (row_max, i);
                }
            }
            let longest = longest as usize;
            if longest < min_match || longest == 0 {
                break;
            }
            let i = best_row;
            let row = &self.run[i * width..i * width + m];
            let j = row
                .iter()
                .position(|&c| c as usize == longest)
                .expect("the maximum is in this row");
            for k in 0..longest {
                self.ids_a[i + k] = -1 - (i + k) as i32;
                self.ids_b[j + k] = -1 - (n + j + k) as i32;
            }
            emit(if swapped {
                (j, i, longest)
            } else {
                (i, j, longest)
            });
        }
    }
}

/// Every sequence over `0..alphabet` with length at most `max_len`, in
/// lexicographic order.
pub fn all_sequences(alphabet: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for c in 0..alphabet {
                let mut t: Vec<u8> = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    out
}

//! Greedy string tiling with Karp-Rabin hashing.

use std::cell::RefCell;
use std::hash::{Hash, Hasher};

use rustc_hash::FxHasher;
use serde::{Deserialize, Serialize};

/// A matched run: `a[start_a..start_a + length] == b[start_b..start_b + length]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Tile {
    pub start_a: usize,
    pub start_b: usize,
    pub length: usize,
}

const BASE: u64 = 1_048_583;

/// Up to this many start pairs, window hashes are compared pairwise once
/// instead of through a sorted table each round.
const SMALL_PAIRS: usize = 1024;

thread_local! {
    static SCRATCH: RefCell<Tiler> = RefCell::new(Tiler::default());
}

/// Tiles `a` against `b`.
///
/// Repeatedly takes the longest common run of unmarked elements that is at
/// least `min_match` long, preferring the smallest start in the first
/// sequence and then in the second, and marks it. The first sequence is the
/// lexicographically smaller of the two, so `rkgst(a, b)` and `rkgst(b, a)`
/// produce mirrored tiles. Tiles are returned sorted by `start_a`.
pub fn rkgst<T: Ord + Hash>(a: &[T], b: &[T], min_match: usize) -> Vec<Tile> {
    assert!(min_match >= 1, "min_match must be at least 1");
    let swapped = a > b;
    let (x, y) = if swapped { (b, a) } else { (a, b) };

    let go = |tiler: &mut Tiler| {
        tiler.load(x, y);
        tiler.run(x, y, min_match)
    };
    let mut tiles = SCRATCH.with(|cell| match cell.try_borrow_mut() {
        Ok(mut tiler) => go(&mut tiler),
        Err(_) => go(&mut Tiler::default()),
    });
    if swapped {
        for t in &mut tiles {
            std::mem::swap(&mut t.start_a, &mut t.start_b);
        }
    }
    tiles.sort_unstable();
    tiles
}

pub fn matched(tiles: &[Tile]) -> usize {
    tiles.iter().map(|t| t.length).sum()
}

#[derive(Default)]
struct Side {
    /// `hash[k]` is the polynomial hash of the first `k` elements.
    hash: Vec<u64>,
    /// `run[k]` is the number of unmarked positions starting at `k`.
    run: Vec<u32>,
}

impl Side {
    fn reset<T: Hash>(&mut self, seq: &[T]) {
        self.hash.clear();
        self.hash.push(0);
        let mut h = 0u64;
        self.hash.extend(seq.iter().map(|t| {
            let mut hasher = FxHasher::default();
            t.hash(&mut hasher);
            h = h.wrapping_mul(BASE).wrapping_add(hasher.finish());
            h
        }));
        let n = seq.len() as u32;
        self.run.clear();
        self.run.extend((0..n).map(|k| n - k));
    }

    #[inline]
    fn len(&self) -> usize {
        self.run.len()
    }

    #[inline]
    fn free(&self, start: usize, len: usize) -> bool {
        self.run[start] as usize >= len
    }

    #[inline]
    fn window(&self, start: usize, len: usize, power: u64) -> u64 {
        self.hash[start + len].wrapping_sub(self.hash[start].wrapping_mul(power))
    }

    #[inline]
    fn longest_free_run(&self) -> usize {
        self.run.iter().copied().max().unwrap_or(0) as usize
    }

    fn mark(&mut self, start: usize, len: usize) {
        assert!(self.free(start, len), "tile overlaps an earlier tile");
        self.run[start..start + len].fill(0);
        for k in (0..start).rev() {
            if self.run[k] == 0 {
                break;
            }
            self.run[k] = (start - k) as u32;
        }
    }
}

/// Working state, kept per thread so repeated calls reuse allocations.
#[derive(Default)]
struct Tiler {
    a: Side,
    b: Side,
    /// `pow[k]` is `BASE^k`.
    pow: Vec<u64>,
    /// Window hashes and starts in `b`; for short inputs, the hash hits.
    table: Vec<(u64, u32)>,
    windows: Vec<u64>,
    found: Vec<(u32, u32)>,
}

impl Tiler {
    fn load<T: Hash>(&mut self, x: &[T], y: &[T]) {
        self.a.reset(x);
        self.b.reset(y);
        if self.pow.is_empty() {
            self.pow.push(1);
        }
        while self.pow.len() <= x.len().max(y.len()) {
            let p = self.pow[self.pow.len() - 1].wrapping_mul(BASE);
            self.pow.push(p);
        }
    }

    /// Finds the longest free match with a shrinking search length: every
    /// match at least `s` long starts with a matching window of length `s`,
    /// so hashing those windows and extending each verified hit finds all
    /// maximal matches of the longest length. With no hit, the length is
    /// halved.
    ///
    /// All matches of the longest length are then marked in
    /// (start_a, start_b) order when still free, which is the same as
    /// searching again after each mark since marking never lengthens a match.
    fn run<T: Eq>(&mut self, x: &[T], y: &[T], min_match: usize) -> Vec<Tile> {
        if x.len() * y.len() <= SMALL_PAIRS {
            return self.run_small(x, y, min_match);
        }
        let mut tiles = Vec::new();
        let mut upper = x.len().min(y.len());
        let mut search = upper;
        loop {
            upper = upper
                .min(self.a.longest_free_run())
                .min(self.b.longest_free_run());
            if upper < min_match {
                break;
            }
            let s = search.clamp(min_match, upper);
            let len = self.scan(x, y, s);
            if len == 0 {
                if s == min_match {
                    break;
                }
                upper = s - 1;
                search = (s / 2).max(min_match);
                continue;
            }
            self.mark_found(len, &mut tiles);
            upper = len - 1;
            search = upper;
        }
        tiles
    }

    /// Short inputs: the hash hits among windows of length `min_match` are
    /// collected once, since a window that is free now was free at the
    /// start. Each round re-extends the hits that are still free.
    fn run_small<T: Eq>(&mut self, x: &[T], y: &[T], min_match: usize) -> Vec<Tile> {
        let mut tiles = Vec::new();
        if x.len() < min_match || y.len() < min_match {
            return tiles;
        }
        let Tiler {
            a,
            b,
            table,
            windows,
            pow,
            ..
        } = self;
        let power = pow[min_match];
        windows.clear();
        windows.extend((0..=b.len() - min_match).map(|j| b.window(j, min_match, power)));
        table.clear();
        for i in 0..=a.len() - min_match {
            let h = a.window(i, min_match, power);
            for (j, &w) in windows.iter().enumerate() {
                if w == h {
                    table.push((i as u64, j as u32));
                }
            }
        }
        loop {
            let Tiler {
                a, b, table, found, ..
            } = &mut *self;
            found.clear();
            let mut best = 0;
            for &(i, j) in table.iter() {
                let (i, j) = (i as usize, j as usize);
                let len = extend(x, y, a, b, i, j);
                if len < min_match || len < best {
                    continue;
                }
                if len > best {
                    best = len;
                    found.clear();
                }
                found.push((i as u32, j as u32));
            }
            if best == 0 {
                break;
            }
            self.mark_found(best, &mut tiles);
        }
        tiles
    }

    /// Marks every match in `found` that is still free.
    fn mark_found(&mut self, len: usize, tiles: &mut Vec<Tile>) {
        for &(i, j) in &self.found {
            let (i, j) = (i as usize, j as usize);
            if self.a.free(i, len) && self.b.free(j, len) {
                self.a.mark(i, len);
                self.b.mark(j, len);
                tiles.push(Tile {
                    start_a: i,
                    start_b: j,
                    length: len,
                });
            }
        }
    }

    /// Collects the free matches of maximal length among those at least
    /// `s` long, in (start_a, start_b) order, and returns that length (0 if
    /// there are none).
    fn scan<T: Eq>(&mut self, x: &[T], y: &[T], s: usize) -> usize {
        let Tiler {
            a,
            b,
            table,
            found,
            pow,
            ..
        } = self;
        let power = pow[s];
        table.clear();
        found.clear();
        for j in 0..=b.len() - s {
            if b.free(j, s) {
                table.push((b.window(j, s, power), j as u32));
            }
        }
        if table.is_empty() {
            return 0;
        }
        table.sort_unstable();

        let mut best = 0;
        for i in 0..=a.len() - s {
            if !a.free(i, s) {
                continue;
            }
            let h = a.window(i, s, power);
            let from = table.partition_point(|e| e.0 < h);
            for &(_, j) in table[from..].iter().take_while(|e| e.0 == h) {
                let j = j as usize;
                let len = extend(x, y, a, b, i, j);
                if len < s || len < best {
                    continue;
                }
                if len > best {
                    best = len;
                    found.clear();
                }
                found.push((i as u32, j as u32));
            }
        }
        best
    }
}

/// Length of the free common run starting at `(i, j)`. Comparing elements
/// here also verifies hash hits.
#[inline]
fn extend<T: Eq>(x: &[T], y: &[T], a: &Side, b: &Side, i: usize, j: usize) -> usize {
    let limit = a.run[i].min(b.run[j]) as usize;
    let mut len = 0;
    while len < limit && x[i + len] == y[j + len] {
        len += 1;
    }
    len
}

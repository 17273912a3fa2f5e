//! Exhaustive count of P-sequences up to rotation.
//!
//! Strings are enumerated depth first with per-character count bounds (a
//! P-sequence uses each character `floor(L/K)` or `ceil(L/K)` times), split
//! into prefix shards that run in parallel. A leaf is kept when it is its
//! own least rotation and passes the full check.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{PklError, Result};
use crate::necklace::{least_rotation, Necklace};
use crate::verifier::{ceil_log, load_balance};
use crate::{Symbol, MAX_ALPHABET};

pub const DEFAULT_BUDGET: u64 = 1 << 26;

#[derive(Clone, Copy, Debug)]
pub struct CensusOptions {
    /// Keep one representative (the least rotation) per class.
    pub materialize: bool,
    /// Refuse searches whose raw space `K^L` exceeds this.
    pub budget: u64,
    /// Worker threads; 0 uses rayon's default.
    pub workers: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            materialize: false,
            budget: DEFAULT_BUDGET,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CensusResult {
    pub k: u32,
    pub l: usize,
    pub count: u64,
    /// Lexicographically ordered when materialized.
    pub representatives: Option<Vec<Necklace>>,
    pub elapsed: Duration,
}

pub fn census(k: u32, l: usize, materialize: bool) -> Result<CensusResult> {
    census_with(
        k,
        l,
        CensusOptions {
            materialize,
            ..Default::default()
        },
    )
}

pub fn census_with(k: u32, l: usize, opts: CensusOptions) -> Result<CensusResult> {
    if !(2..=MAX_ALPHABET).contains(&k) {
        return Err(PklError::InvalidAlphabet(k));
    }
    if l == 0 {
        return Err(PklError::ZeroLength);
    }
    let space = u64::from(k).checked_pow(l as u32).filter(|&s| l <= 64 && s <= opts.budget);
    if space.is_none() {
        return Err(PklError::BudgetExceeded {
            k,
            l,
            budget: opts.budget,
        });
    }
    let started = Instant::now();
    let search = Search::new(k, l)?;
    let shards = search.shards();
    let run = || -> Vec<(u64, Vec<Vec<Symbol>>)> {
        shards
            .par_iter()
            .map(|prefix| search.run_shard(prefix, opts.materialize))
            .collect()
    };
    let results = if opts.workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| PklError::Parse(format!("thread pool: {e}")))?
            .install(run)
    };
    let count = results.iter().map(|r| r.0).sum();
    let representatives = opts.materialize.then(|| {
        results
            .into_iter()
            .flat_map(|r| r.1)
            .map(|c| Necklace::from_raw(c, k))
            .collect()
    });
    Ok(CensusResult {
        k,
        l,
        count,
        representatives,
        elapsed: started.elapsed(),
    })
}

struct Search {
    k: u32,
    l: usize,
    lo: usize,
    hi: usize,
    /// (length, min count, max count) for lengths 2..=horizon
    bounds: Vec<(usize, u32, u32)>,
}

/// Reusable buffers for one worker.
struct Scratch {
    chars: Vec<Symbol>,
    counts: Vec<usize>,
    tally: Vec<u32>,
}

impl Search {
    fn new(k: u32, l: usize) -> Result<Self> {
        let horizon = ceil_log(l as u64, k) as usize;
        let single = load_balance(l as u64, k, 1)?;
        let mut bounds = Vec::new();
        for m in 2..=horizon {
            let lb = load_balance(l as u64, k, m)?;
            bounds.push((m, lb.floor_value as u32, lb.ceil_value as u32));
        }
        Ok(Self {
            k,
            l,
            lo: single.floor_value as usize,
            hi: single.ceil_value as usize,
            bounds,
        })
    }

    /// Prefixes that split the search into enough pieces to keep every
    /// worker busy.
    fn shards(&self) -> Vec<Vec<Symbol>> {
        let mut depth = 0;
        let mut size = 1u64;
        while depth < self.l && size < 1024 {
            size *= u64::from(self.k);
            depth += 1;
        }
        let mut out: Vec<Vec<Symbol>> = vec![Vec::new()];
        for _ in 0..depth {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..self.k as Symbol).map(move |c| {
                        let mut q = p.clone();
                        q.push(c);
                        q
                    })
                })
                .filter(|p| self.feasible_prefix(p))
                .collect();
        }
        out
    }

    fn feasible_prefix(&self, p: &[Symbol]) -> bool {
        let mut counts = vec![0usize; self.k as usize];
        for &c in p {
            counts[c as usize] += 1;
        }
        self.feasible(&counts, p.len())
    }

    /// Every count can still end up within `[lo, hi]`.
    fn feasible(&self, counts: &[usize], filled: usize) -> bool {
        let missing: usize = counts.iter().map(|&c| self.lo.saturating_sub(c)).sum();
        counts.iter().all(|&c| c <= self.hi) && missing <= self.l - filled
    }

    fn run_shard(&self, prefix: &[Symbol], materialize: bool) -> (u64, Vec<Vec<Symbol>>) {
        let mut s = Scratch {
            chars: prefix.to_vec(),
            counts: vec![0; self.k as usize],
            tally: Vec::new(),
        };
        for &c in prefix {
            s.counts[c as usize] += 1;
        }
        let mut found = Vec::new();
        let mut count = 0;
        self.descend(&mut s, &mut count, materialize.then_some(&mut found));
        (count, found)
    }

    fn descend(&self, s: &mut Scratch, count: &mut u64, mut found: Option<&mut Vec<Vec<Symbol>>>) {
        if s.chars.len() == self.l {
            if least_rotation(&s.chars) == 0 && self.balanced(&s.chars, &mut s.tally) {
                *count += 1;
                if let Some(f) = found {
                    f.push(s.chars.clone());
                }
            }
            return;
        }
        for c in 0..self.k as Symbol {
            s.counts[c as usize] += 1;
            s.chars.push(c);
            if self.feasible(&s.counts, s.chars.len()) {
                self.descend(s, count, found.as_deref_mut());
            }
            s.chars.pop();
            s.counts[c as usize] -= 1;
        }
    }

    /// Length-1 counts are guaranteed by the pruning; check the rest.
    fn balanced(&self, chars: &[Symbol], tally: &mut Vec<u32>) -> bool {
        let n = chars.len();
        let k = u64::from(self.k);
        for &(m, lo, hi) in &self.bounds {
            let size = k.pow(m as u32) as usize;
            tally.clear();
            tally.resize(size, 0);
            let top = k.pow(m as u32 - 1);
            let mut code = 0u64;
            for t in 0..m {
                code = code * k + u64::from(chars[t % n]);
            }
            for i in 0..n {
                let slot = &mut tally[code as usize];
                *slot += 1;
                if *slot > hi {
                    return false;
                }
                code = (code - u64::from(chars[i]) * top) * k + u64::from(chars[(i + m) % n]);
            }
            if lo > 0 && tally.iter().any(|&c| c < lo) {
                return false;
            }
        }
        true
    }
}

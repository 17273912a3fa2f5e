//! Membership tests for the three arbitrary-length de Bruijn-like classes
//! and the load-balance arithmetic behind them.
//!
//! A necklace of length `L` over `[K]` is a P-sequence when every length-`m`
//! string occurs `floor(L/K^m)` or `ceil(L/K^m)` times. Checking lengths up
//! to `ceil(log_K L)` is enough: at that length every count is at most one,
//! so all longer substrings are distinct too, and for longer lengths the
//! allowed set is `{0, 1}`.

use std::collections::BTreeMap;

use crate::error::{PklError, Result};
use crate::necklace::{
    decode_window, dense_window_counts, hashed_window_counts, universe_size, LinearString, Necklace,
};
use crate::Symbol;

/// Smallest `n` with `k^n >= l` (`l >= 1`).
pub fn ceil_log(l: u64, k: u32) -> u32 {
    let k = u128::from(k);
    let (mut n, mut pow) = (0u32, 1u128);
    while pow < u128::from(l) {
        pow *= k;
        n += 1;
    }
    n
}

/// Largest `n` with `k^n <= l` (`l >= 1`).
pub fn floor_log(l: u64, k: u32) -> u32 {
    let k = u128::from(k);
    let (mut n, mut pow) = (0u32, k);
    while pow <= u128::from(l) {
        pow *= k;
        n += 1;
    }
    n
}

/// A string whose occurrence count falls outside the allowed range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub m: usize,
    pub string: LinearString,
    pub count: u64,
    /// Smallest allowed count.
    pub min_allowed: u64,
    /// Largest allowed count, if bounded.
    pub max_allowed: Option<u64>,
}

/// Outcome of a single class test; `accepted` iff there is no witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn from_witness(witness: Option<Witness>) -> Self {
        Self {
            accepted: witness.is_none(),
            witness,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    None,
    LempelRadchenko,
    GeneralizedDeBruijn,
    Pkl,
}

impl Tier {
    pub fn name(self) -> &'static str {
        match self {
            Tier::None => "none",
            Tier::LempelRadchenko => "lempel-radchenko",
            Tier::GeneralizedDeBruijn => "generalized-de-bruijn",
            Tier::Pkl => "pkl",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub tier: Tier,
    /// Every length-`ceil(log_K L)` string occurs at most once.
    pub lempel_radchenko: Verdict,
    /// Every length-`floor(log_K L)` string occurs at least once. The
    /// generalized de Bruijn class needs this and the previous check.
    pub covering: Verdict,
    pub pkl: Verdict,
}

impl Classification {
    pub fn is_lempel_radchenko(&self) -> bool {
        self.lempel_radchenko.accepted
    }

    pub fn is_generalized_de_bruijn(&self) -> bool {
        self.lempel_radchenko.accepted && self.covering.accepted
    }

    pub fn is_pkl(&self) -> bool {
        self.pkl.accepted
    }
}

/// How the `K^m` strings of one length split between the two allowed
/// counts in a P-sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LoadBalance {
    pub m: usize,
    pub floor_value: u64,
    pub ceil_value: u64,
    /// Strings occurring `floor_value` times.
    pub a: u128,
    /// Strings occurring `ceil_value` times.
    pub b: u128,
}

/// Solves `a * floor + b * ceil = L`, `a + b = K^m`. When `L / K^m` is an
/// integer the split is reported as `a = K^m`, `b = 0`.
pub fn load_balance(l: u64, k: u32, m: usize) -> Result<LoadBalance> {
    if m == 0 || m as u64 > l {
        return Err(PklError::LengthOutOfRange {
            m,
            max: l as usize,
        });
    }
    if k < 2 {
        return Err(PklError::InvalidAlphabet(k));
    }
    let exp = u32::try_from(m).map_err(|_| PklError::Overflow("K^m"))?;
    let universe = u128::from(k)
        .checked_pow(exp)
        .ok_or(PklError::Overflow("K^m"))?;
    let l128 = u128::from(l);
    let floor_value = l128 / universe;
    let ceil_value = l128.div_ceil(universe);
    let (a, b) = if floor_value == ceil_value {
        (universe, 0)
    } else {
        (universe * ceil_value - l128, l128 - universe * floor_value)
    };
    Ok(LoadBalance {
        m,
        floor_value: floor_value as u64,
        ceil_value: ceil_value as u64,
        a,
        b,
    })
}

/// Allowed range for a count and how to rank violations.
#[derive(Clone, Copy)]
struct Bounds {
    min: u64,
    max: Option<u64>,
}

impl Bounds {
    fn contains(self, c: u64) -> bool {
        c >= self.min && self.max.is_none_or(|hi| c <= hi)
    }

    /// Larger is a more useful witness: bigger deviation first, then
    /// over-represented strings before under-represented ones.
    fn severity(self, c: u64) -> (u64, bool) {
        match self.max {
            Some(hi) if c > hi => (c - hi, true),
            _ => (self.min.saturating_sub(c), false),
        }
    }
}

/// Finds the most severe violation among all length-`m` windows (including
/// strings that never occur), ties broken by the lexicographically least
/// string.
fn worst_violation(n: &Necklace, m: usize, bounds: Bounds) -> Option<Witness> {
    let k = n.k();
    let chars = n.chars();
    let mut best: Option<((u64, bool), Vec<Symbol>, u64)> = None;
    let mut consider = |sev: (u64, bool), s: &dyn Fn() -> Vec<Symbol>, c: u64| {
        let replace = match &best {
            None => true,
            Some((bs, bstr, _)) => sev > *bs || (sev == *bs && s() < *bstr),
        };
        if replace {
            best = Some((sev, s(), c));
        }
    };
    if let Some(dense) = dense_window_counts(chars, k, m) {
        for (code, &c) in dense.iter().enumerate() {
            let c = u64::from(c);
            if !bounds.contains(c) {
                consider(bounds.severity(c), &|| decode_window(code as u64, k, m), c);
            }
        }
    } else {
        let map = hashed_window_counts(chars, m);
        for (s, &c) in &map {
            if !bounds.contains(c) {
                consider(bounds.severity(c), &|| s.clone(), c);
            }
        }
        let universe = universe_size(k, m);
        let some_absent = universe.is_none_or(|u| (map.len() as u64) < u);
        if some_absent && !bounds.contains(0) {
            // least absent string in lexicographic order
            let mut candidate = vec![0 as Symbol; m];
            loop {
                if !map.contains_key(&candidate) {
                    consider(bounds.severity(0), &|| candidate.clone(), 0);
                    break;
                }
                // odometer increment; terminates because some string is absent
                let mut pos = m;
                while pos > 0 {
                    pos -= 1;
                    if u32::from(candidate[pos]) + 1 < k {
                        candidate[pos] += 1;
                        break;
                    }
                    candidate[pos] = 0;
                }
            }
        }
    }
    best.map(|(_, s, count)| Witness {
        m,
        string: LinearString::from_raw(s, k),
        count,
        min_allowed: bounds.min,
        max_allowed: bounds.max,
    })
}

fn pkl_bounds(l: u64, k: u32, m: usize) -> Bounds {
    match u128::from(k).checked_pow(m as u32) {
        Some(u) => Bounds {
            min: (u128::from(l) / u) as u64,
            max: Some(u128::from(l).div_ceil(u) as u64),
        },
        None => Bounds {
            min: 0,
            max: Some(1),
        },
    }
}

/// Checks lengths `1..=ceil(log_K L)`; the witness is taken at the smallest
/// failing length.
pub fn is_pkl(n: &Necklace) -> Verdict {
    let l = n.len() as u64;
    let horizon = ceil_log(l, n.k()) as usize;
    for m in 1..=horizon {
        if let Some(w) = worst_violation(n, m, pkl_bounds(l, n.k(), m)) {
            return Verdict::from_witness(Some(w));
        }
    }
    Verdict::from_witness(None)
}

/// Classifies a necklace into the most specific of the three classes.
pub fn classify(n: &Necklace) -> Classification {
    let l = n.len() as u64;
    let k = n.k();
    let hi = ceil_log(l, k) as usize;
    let lo = floor_log(l, k) as usize;
    let lempel_radchenko = Verdict::from_witness(worst_violation(
        n,
        hi,
        Bounds {
            min: 0,
            max: Some(1),
        },
    ));
    let covering = Verdict::from_witness(worst_violation(n, lo, Bounds { min: 1, max: None }));
    let pkl = is_pkl(n);
    let tier = if pkl.accepted {
        Tier::Pkl
    } else if lempel_radchenko.accepted && covering.accepted {
        Tier::GeneralizedDeBruijn
    } else if lempel_radchenko.accepted {
        Tier::LempelRadchenko
    } else {
        Tier::None
    };
    Classification {
        tier,
        lempel_radchenko,
        covering,
        pkl,
    }
}

/// For each attained count `c`, how many length-`m` strings occur exactly
/// `c` times (absent strings counted at zero). `None` if `K^m` overflows.
pub fn count_histogram(n: &Necklace, m: usize) -> Result<Option<BTreeMap<u64, u128>>> {
    Ok(crate::necklace::occurrence_profile(n, m)?.histogram())
}

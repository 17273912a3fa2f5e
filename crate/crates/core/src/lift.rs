//! Lempel's lift (the inverse of the D-morphism) and its discrete derivative.

use crate::necklace::{shift_symbols, LinearString, Necklace};
use crate::Symbol;

/// Repetition count `d` and family size `p` of a lift, with `d * p = k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftParams {
    pub d: u32,
    pub p: u32,
}

/// The family `{lambda_i : i in [p]}` obtained by lifting a necklace.
///
/// Every member is a translate of the first, so only `lambda_0` is stored
/// and the others are produced on demand.
#[derive(Clone, Debug)]
pub struct LiftFamily {
    base: Vec<Symbol>,
    params: LiftParams,
    source_length: usize,
    k: u32,
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `d` is the least positive integer with `sum(b) * d = 0 (mod k)`.
pub fn lift_params(b: &Necklace) -> LiftParams {
    let k = u64::from(b.k());
    let s = b.char_sum() % k;
    // gcd(0, k) = k, giving d = 1.
    let p = gcd(s, k);
    LiftParams {
        d: (k / p) as u32,
        p: p as u32,
    }
}

/// Lifts `b`: `lambda_i[t] = i + b[0] + ... + b[t]` for `t` in `[d * |b|]`.
pub fn lempel_lift(b: &Necklace) -> LiftFamily {
    let params = lift_params(b);
    let k = b.k();
    let src = b.chars();
    let total = src.len() * params.d as usize;
    let mut base = Vec::with_capacity(total);
    let mut acc = 0u32;
    for _ in 0..params.d {
        for &c in src {
            acc += u32::from(c);
            if acc >= k {
                acc -= k;
            }
            base.push(acc as Symbol);
        }
    }
    LiftFamily {
        base,
        params,
        source_length: src.len(),
        k,
    }
}

impl LiftFamily {
    pub fn params(&self) -> LiftParams {
        self.params
    }

    pub fn d(&self) -> u32 {
        self.params.d
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Length of the necklace that was lifted.
    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Length of each member, `d * source_length`.
    pub fn member_length(&self) -> usize {
        self.base.len()
    }

    /// Characters of `lambda_0`.
    pub fn base(&self) -> &[Symbol] {
        &self.base
    }

    /// `lambda_i = lambda_0 + i`.
    pub fn member(&self, i: u32) -> Necklace {
        assert!(i < self.params.p, "member index {i} out of range");
        Necklace::from_raw(shift_symbols(&self.base, self.k, i64::from(i)), self.k)
    }

    pub fn members(&self) -> Vec<Necklace> {
        (0..self.params.p).map(|i| self.member(i)).collect()
    }
}

/// Cyclic successive differences, aligned so that
/// `out[j] = lam[j] - lam[j - 1]`; applied to any lift member this returns
/// the lifted necklace repeated `d` times in its original rotation.
pub fn discrete_derivative(lam: &Necklace) -> Necklace {
    let k = lam.k();
    let c = lam.chars();
    let n = c.len();
    let out = (0..n)
        .map(|j| {
            let prev = u32::from(c[(j + n - 1) % n]);
            ((u32::from(c[j]) + k - prev) % k) as Symbol
        })
        .collect();
    Necklace::from_raw(out, k)
}

/// The strings `xi_l = l + (0, w[0], w[0] + w[1], ..., w[0] + ... + w[m-1])`
/// for every `l` in `[k]`; each has length `|w| + 1`.
pub fn lifted_strings(w: &LinearString) -> Vec<LinearString> {
    let k = w.k();
    let mut base = Vec::with_capacity(w.len() + 1);
    let mut acc = 0u32;
    base.push(0);
    for &c in w.chars() {
        acc = (acc + u32::from(c)) % k;
        base.push(acc as Symbol);
    }
    (0..k)
        .map(|l| LinearString::from_raw(shift_symbols(&base, k, i64::from(l)), k))
        .collect()
}

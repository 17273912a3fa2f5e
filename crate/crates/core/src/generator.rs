//! Building a P-sequence of any length digit by digit.
//!
//! Write `L` in base `K` as `d_0 d_1 ... d_{D-1}` (most significant first).
//! Start from `(1, 2, ..., d_0)`, then for each further digit multiply the
//! length by `K` with a lift-and-join and add `d_j` characters by extending
//! the longest runs of `1, ..., d_j`. The zero character never has a run
//! longer than `N` so long runs of the other characters stay available.

use crate::error::{PklError, Result};
use crate::join::{lift_and_join_unchecked, JoinTrace};
use crate::necklace::{
    find_first_cyclic, insert_after_longest_run, join_at, least_rotation, LinearString, Necklace,
};
use crate::lift::lempel_lift;
use crate::verifier::{ceil_log, is_pkl};
use crate::{Symbol, MAX_ALPHABET};

/// `L` written in base `K`, most significant digit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitExpansion {
    pub k: u32,
    pub digits: Vec<u32>,
}

impl DigitExpansion {
    pub fn value(&self) -> u128 {
        self.digits
            .iter()
            .fold(0u128, |acc, &d| acc * u128::from(self.k) + u128::from(d))
    }

    /// `L_j`, the value of the first `j + 1` digits, for every `j`.
    pub fn prefix_values(&self) -> Vec<u64> {
        let mut acc = 0u64;
        self.digits
            .iter()
            .map(|&d| {
                acc = acc * u64::from(self.k) + u64::from(d);
                acc
            })
            .collect()
    }
}

pub fn digits_base_k(l: u64, k: u32) -> Result<DigitExpansion> {
    check_alphabet(k)?;
    if l == 0 {
        return Err(PklError::ZeroLength);
    }
    let mut digits = Vec::new();
    let mut rest = l;
    while rest > 0 {
        digits.push((rest % u64::from(k)) as u32);
        rest /= u64::from(k);
    }
    digits.reverse();
    Ok(DigitExpansion { k, digits })
}

fn check_alphabet(k: u32) -> Result<()> {
    if !(2..=MAX_ALPHABET).contains(&k) {
        return Err(PklError::InvalidAlphabet(k));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct GenerateOptions {
    /// Verify every intermediate necklace, every join and the run invariant.
    /// Slow; meant for tests.
    pub check: bool,
}

/// Output of [`generate_pkl_with`].
#[derive(Clone, Debug)]
pub struct Generation {
    /// In canonical rotation.
    pub necklace: Necklace,
    /// One trace per lift-and-join step.
    pub traces: Vec<JoinTrace>,
    /// Length after each step, `L_0, ..., L_{D-1}`.
    pub lengths: Vec<u64>,
}

/// A P-sequence of length `l` over `[k]`, in canonical rotation.
pub fn generate_pkl(k: u32, l: u64) -> Result<Necklace> {
    generate_pkl_with(k, l, GenerateOptions::default()).map(|g| g.necklace)
}

pub fn generate_pkl_with(k: u32, l: u64, opts: GenerateOptions) -> Result<Generation> {
    let digits = digits_base_k(l, k)?;
    if usize::try_from(l).is_err() {
        return Err(PklError::Overflow("length does not fit in memory"));
    }
    let expected = digits.prefix_values();
    let mut chars: Vec<Symbol> = (1..=digits.digits[0]).map(|c| c as Symbol).collect();
    let mut traces = Vec::with_capacity(digits.digits.len() - 1);
    let mut lengths = vec![chars.len() as u64];
    if opts.check {
        check_step(&chars, k, 0)?;
    }
    for (j, &dj) in digits.digits.iter().enumerate().skip(1) {
        let alpha = Necklace::from_raw(std::mem::take(&mut chars), k);
        let (joined, trace) = lift_and_join_unchecked(&alpha, opts.check)?;
        drop(alpha);
        traces.push(trace);
        chars = joined.into_chars();
        chars.reserve(dj as usize);
        for c in 1..=dj {
            insert_after_longest_run(&mut chars, c as Symbol).ok_or_else(|| PklError::ConstructionFailure {
                reason: format!("character {c} missing before extension"),
                trace: traces.last().cloned().unwrap_or_default(),
            })?;
        }
        lengths.push(chars.len() as u64);
        if opts.check {
            if chars.len() as u64 != expected[j] {
                return Err(PklError::ConstructionFailure {
                    reason: format!("step {j} has length {} not {}", chars.len(), expected[j]),
                    trace: traces.last().cloned().unwrap_or_default(),
                });
            }
            check_step(&chars, k, j)?;
        }
    }
    let r = least_rotation(&chars);
    chars.rotate_left(r);
    Ok(Generation {
        necklace: Necklace::from_raw(chars, k),
        traces,
        lengths,
    })
}

/// The intermediate necklace is a P-sequence with no run of zeros longer
/// than `ceil(log_K L)`.
fn check_step(chars: &[Symbol], k: u32, step: usize) -> Result<()> {
    let n = Necklace::from_raw(chars.to_vec(), k);
    let fail = |reason: String| PklError::ConstructionFailure {
        reason,
        trace: JoinTrace::default(),
    };
    if let Some(w) = is_pkl(&n).witness {
        return Err(fail(format!(
            "step {step}: {} occurs {} times",
            w.string, w.count
        )));
    }
    let horizon = ceil_log(chars.len() as u64, k) as usize;
    let zeros = LinearString::run(0, horizon + 1, k);
    if horizon < chars.len() && find_first_cyclic(chars, zeros.chars()).is_some() {
        return Err(fail(format!("step {step}: run of {} zeros", horizon + 1)));
    }
    Ok(())
}

/// Binary specialisation that joins the two lift members directly.
/// Produces the same necklace as `generate_pkl(2, l)`.
pub fn generate_p2l(l: u64) -> Result<Necklace> {
    let digits = digits_base_k(l, 2)?;
    let mut alpha: Vec<Symbol> = vec![1];
    for &dj in &digits.digits[1..] {
        let n = ceil_log(alpha.len() as u64, 2) as usize;
        let src = Necklace::from_raw(alpha, 2);
        let fam = lempel_lift(&src);
        let joined = if fam.p() == 1 {
            fam.base().to_vec()
        } else {
            let l0 = fam.base();
            let l1 = fam.member(1).into_chars();
            let alt = |m: usize| LinearString::ramp(0, m, 2).chars().to_vec();
            let anchor = if find_first_cyclic(src.chars(), &vec![1; n]).is_some() {
                alt(n)
            } else {
                let r = alt(n - 1);
                let mut labels: Vec<Vec<Symbol>> = (0..2)
                    .flat_map(|c: Symbol| {
                        let mut tail = r.clone();
                        tail.push(c);
                        let mut head = vec![c];
                        head.extend_from_slice(&r);
                        [tail, head]
                    })
                    .collect();
                labels.sort();
                labels
                    .into_iter()
                    .find(|x| find_first_cyclic(l0, x).is_some() && find_first_cyclic(&l1, x).is_some())
                    .unwrap_or(r)
            };
            let (Some(x), Some(y)) = (find_first_cyclic(l0, &anchor), find_first_cyclic(&l1, &anchor)) else {
                return Err(PklError::JoinAnchorNotFound {
                    anchor: crate::necklace::format_symbols(&anchor, 2),
                    side: "lift member",
                });
            };
            join_at(l0, x, &l1, y, 2).into_chars()
        };
        alpha = joined;
        if dj == 1 {
            insert_after_longest_run(&mut alpha, 1);
        }
    }
    let r = least_rotation(&alpha);
    alpha.rotate_left(r);
    Ok(Necklace::from_raw(alpha, 2))
}

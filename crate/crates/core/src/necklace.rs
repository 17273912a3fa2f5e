//! Cyclic strings over the alphabet `[K] = {0, ..., K-1}` and the basic
//! operations on them: canonical form, substring counting, cycle joining,
//! translation and run surgery.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::{self, Write};

use crate::error::{PklError, Result};
use crate::{Symbol, MAX_ALPHABET};

/// A cyclic sequence of characters from `[k]`.
///
/// The characters are kept in whatever rotation they were built in (the
/// "internal rotation"); equality and hashing go through the canonical
/// rotation, so two necklaces that differ by a rotation compare equal.
#[derive(Clone)]
pub struct Necklace {
    chars: Vec<Symbol>,
    k: u32,
}

/// An ordinary (non-cyclic) string over `[k]`. May be empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearString {
    chars: Vec<Symbol>,
    k: u32,
}

fn check_alphabet(k: u32) -> Result<()> {
    if (2..=MAX_ALPHABET).contains(&k) {
        Ok(())
    } else {
        Err(PklError::InvalidAlphabet(k))
    }
}

fn check_chars(chars: &[Symbol], k: u32) -> Result<()> {
    match chars.iter().position(|&c| u32::from(c) >= k) {
        Some(index) => Err(PklError::CharacterOutOfRange {
            index,
            ch: u32::from(chars[index]),
            k,
        }),
        None => Ok(()),
    }
}

impl Necklace {
    pub fn new(chars: Vec<Symbol>, k: u32) -> Result<Self> {
        check_alphabet(k)?;
        if chars.is_empty() {
            return Err(PklError::EmptyNecklace);
        }
        check_chars(&chars, k)?;
        Ok(Self { chars, k })
    }

    /// Builds a necklace from characters already known to be valid.
    pub(crate) fn from_raw(chars: Vec<Symbol>, k: u32) -> Self {
        debug_assert!(!chars.is_empty());
        debug_assert!(chars.iter().all(|&c| u32::from(c) < k));
        Self { chars, k }
    }

    /// Parses the shared sequence text format (see [`parse_symbols`]).
    pub fn parse(text: &str, k: u32) -> Result<Self> {
        check_alphabet(k)?;
        Self::new(parse_symbols(text, k)?, k)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    /// Always false; necklaces have at least one character.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Characters in the internal rotation.
    pub fn chars(&self) -> &[Symbol] {
        &self.chars
    }

    pub fn into_chars(self) -> Vec<Symbol> {
        self.chars
    }

    /// Cyclic indexing: `at(j) == at(j + len)` for every integer `j`.
    pub fn at(&self, j: i64) -> Symbol {
        let n = self.chars.len() as i64;
        self.chars[j.rem_euclid(n) as usize]
    }

    /// The same necklace with its internal rotation starting at `shift`.
    pub fn rotated(&self, shift: usize) -> Necklace {
        let s = shift % self.len();
        let mut chars = Vec::with_capacity(self.len());
        chars.extend_from_slice(&self.chars[s..]);
        chars.extend_from_slice(&self.chars[..s]);
        Necklace::from_raw(chars, self.k)
    }

    /// Copy whose internal rotation is the canonical one.
    pub fn canonical(&self) -> Necklace {
        self.rotated(least_rotation(&self.chars))
    }

    /// Sum of all characters (not reduced).
    pub fn char_sum(&self) -> u64 {
        self.chars.iter().map(|&c| u64::from(c)).sum()
    }

    /// Text form of the canonical rotation.
    pub fn to_text(&self) -> String {
        format_symbols(&self.canonical().chars, self.k)
    }

    /// The internal rotation as a linear string.
    pub fn as_linear(&self) -> LinearString {
        LinearString {
            chars: self.chars.clone(),
            k: self.k,
        }
    }
}

impl PartialEq for Necklace {
    fn eq(&self, other: &Self) -> bool {
        if self.k != other.k || self.len() != other.len() {
            return false;
        }
        let a = least_rotation(&self.chars);
        let b = least_rotation(&other.chars);
        let n = self.len();
        (0..n).all(|i| self.chars[(a + i) % n] == other.chars[(b + i) % n])
    }
}

impl Eq for Necklace {}

impl Hash for Necklace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.k.hash(state);
        let s = least_rotation(&self.chars);
        self.chars[s..].hash(state);
        self.chars[..s].hash(state);
    }
}

impl fmt::Display for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Necklace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Necklace({}; k={})", format_symbols(&self.chars, self.k), self.k)
    }
}

impl LinearString {
    pub fn new(chars: Vec<Symbol>, k: u32) -> Result<Self> {
        check_alphabet(k)?;
        check_chars(&chars, k)?;
        Ok(Self { chars, k })
    }

    pub(crate) fn from_raw(chars: Vec<Symbol>, k: u32) -> Self {
        debug_assert!(chars.iter().all(|&c| u32::from(c) < k));
        Self { chars, k }
    }

    pub fn parse(text: &str, k: u32) -> Result<Self> {
        check_alphabet(k)?;
        Self::new(parse_symbols(text, k)?, k)
    }

    pub fn empty(k: u32) -> Self {
        Self { chars: Vec::new(), k }
    }

    /// The constant string `(c, c, ..., c)` of length `m`.
    pub fn run(c: Symbol, m: usize, k: u32) -> Self {
        Self::from_raw(vec![(u32::from(c) % k) as Symbol; m], k)
    }

    /// The ramp `(i, i+1, ..., i+m-1)` taken mod `k`.
    pub fn ramp(i: u32, m: usize, k: u32) -> Self {
        let chars = (0..m as u64)
            .map(|t| ((u64::from(i) + t) % u64::from(k)) as Symbol)
            .collect();
        Self::from_raw(chars, k)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[Symbol] {
        &self.chars
    }

    /// Adds `j` to every character modulo `k`.
    pub fn add(&self, j: i64) -> LinearString {
        LinearString::from_raw(shift_symbols(&self.chars, self.k, j), self.k)
    }

    pub fn to_text(&self) -> String {
        format_symbols(&self.chars, self.k)
    }
}

impl fmt::Display for LinearString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for LinearString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.to_text())
    }
}

// ---------------------------------------------------------------------------
// Text format

/// Parses a sequence: contiguous decimal digits when `k <= 10`, otherwise
/// comma-separated decimal integers. Surrounding whitespace is ignored.
pub fn parse_symbols(text: &str, k: u32) -> Result<Vec<Symbol>> {
    let text = text.trim();
    let mut out = Vec::new();
    if k <= 10 {
        out.reserve(text.len());
        for (i, ch) in text.chars().enumerate() {
            let v = ch
                .to_digit(10)
                .ok_or_else(|| PklError::Parse(format!("invalid character {ch:?} at position {i}")))?;
            if v >= k {
                return Err(PklError::CharacterOutOfRange { index: i, ch: v, k });
            }
            out.push(v as Symbol);
        }
    } else if !text.is_empty() {
        for (i, field) in text.split(',').enumerate() {
            let v: u32 = field
                .trim()
                .parse()
                .map_err(|_| PklError::Parse(format!("invalid field {field:?} at position {i}")))?;
            if v >= k {
                return Err(PklError::CharacterOutOfRange { index: i, ch: v, k });
            }
            out.push(v as Symbol);
        }
    }
    Ok(out)
}

pub fn format_symbols(chars: &[Symbol], k: u32) -> String {
    let mut buf = Vec::with_capacity(chars.len());
    write_symbols(&mut buf, chars, k).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii")
}

/// Streams the text form of `chars` without building an intermediate string.
pub fn write_symbols<W: Write>(out: &mut W, chars: &[Symbol], k: u32) -> io::Result<()> {
    if k <= 10 {
        for block in chars.chunks(8192) {
            let bytes: Vec<u8> = block.iter().map(|&c| b'0' + c as u8).collect();
            out.write_all(&bytes)?;
        }
    } else {
        for (i, c) in chars.iter().enumerate() {
            if i > 0 {
                out.write_all(b",")?;
            }
            write!(out, "{c}")?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Canonical form

/// Start index of the lexicographically least rotation, in linear time.
pub fn least_rotation(s: &[Symbol]) -> usize {
    let n = s.len();
    if n < 2 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = s[(i + k) % n];
        let b = s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// The lexicographically least rotation of `n`.
pub fn canonical_rotation(n: &Necklace) -> LinearString {
    LinearString::from_raw(n.canonical().chars, n.k)
}

// ---------------------------------------------------------------------------
// Substring counting

/// Result of [`count_occurrences`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrences {
    pub count: usize,
    /// Cyclic start indices (in the necklace's internal rotation), ascending.
    pub starts: Vec<usize>,
}

/// All cyclic start positions of `needle` in `hay`, via KMP over `hay`
/// followed by its first `|needle| - 1` characters. `needle.len()` must not
/// exceed `hay.len()`. The empty needle matches everywhere.
pub(crate) fn find_cyclic(hay: &[Symbol], needle: &[Symbol]) -> Vec<usize> {
    let n = hay.len();
    let m = needle.len();
    debug_assert!(m <= n);
    if m == 0 {
        return (0..n).collect();
    }
    let fail = failure_table(needle);
    let mut out = Vec::new();
    let mut q = 0usize;
    for i in 0..n + m - 1 {
        let c = hay[i % n];
        while q > 0 && needle[q] != c {
            q = fail[q - 1];
        }
        if needle[q] == c {
            q += 1;
        }
        if q == m {
            out.push(i + 1 - m);
            q = fail[q - 1];
        }
    }
    out
}

/// First cyclic start position of `needle` in `hay`, if any.
pub(crate) fn find_first_cyclic(hay: &[Symbol], needle: &[Symbol]) -> Option<usize> {
    let n = hay.len();
    let m = needle.len();
    if m > n {
        return None;
    }
    if m == 0 {
        return Some(0);
    }
    let fail = failure_table(needle);
    let mut q = 0usize;
    for i in 0..n + m - 1 {
        let c = hay[i % n];
        while q > 0 && needle[q] != c {
            q = fail[q - 1];
        }
        if needle[q] == c {
            q += 1;
        }
        if q == m {
            return Some(i + 1 - m);
        }
    }
    None
}

fn failure_table(needle: &[Symbol]) -> Vec<usize> {
    let m = needle.len();
    let mut fail = vec![0usize; m];
    let mut q = 0usize;
    for i in 1..m {
        while q > 0 && needle[q] != needle[i] {
            q = fail[q - 1];
        }
        if needle[q] == needle[i] {
            q += 1;
        }
        fail[i] = q;
    }
    fail
}

/// Counts the cyclic start positions at which `w` matches `n`.
pub fn count_occurrences(n: &Necklace, w: &LinearString) -> Result<Occurrences> {
    if n.k != w.k {
        return Err(PklError::AlphabetMismatch {
            left: n.k,
            right: w.k,
        });
    }
    if w.len() > n.len() {
        return Err(PklError::StringTooLong {
            len: w.len(),
            necklace_len: n.len(),
        });
    }
    let starts = find_cyclic(&n.chars, &w.chars);
    Ok(Occurrences {
        count: starts.len(),
        starts,
    })
}

/// Per-string counts of all length-`m` substrings of a necklace.
/// Strings that never occur are absent (their count is zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccurrenceProfile {
    pub k: u32,
    pub m: usize,
    pub counts: BTreeMap<LinearString, u64>,
}

impl OccurrenceProfile {
    pub fn get(&self, w: &LinearString) -> u64 {
        self.counts.get(w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Histogram: how many of the `k^m` strings occur exactly `c` times,
    /// for every `c` that is attained. `None` if `k^m` overflows.
    pub fn histogram(&self) -> Option<BTreeMap<u64, u128>> {
        let universe = (self.k as u128).checked_pow(u32::try_from(self.m).ok()?)?;
        let mut hist = BTreeMap::new();
        for &c in self.counts.values() {
            *hist.entry(c).or_insert(0u128) += 1;
        }
        let present: u128 = hist.values().sum();
        if universe > present {
            hist.insert(0, universe - present);
        }
        Some(hist)
    }
}

/// Largest dense table the window counter will allocate.
const DENSE_LIMIT: u64 = 1 << 27;

/// Number of length-`m` strings over `[k]` when that fits in `u64`.
pub(crate) fn universe_size(k: u32, m: usize) -> Option<u64> {
    u64::from(k).checked_pow(u32::try_from(m).ok()?)
}

/// Dense counts of every length-`m` window, indexed by the base-`k` code of
/// the window (first character most significant). Returns `None` when
/// `k^m` is too large for a dense table.
pub(crate) fn dense_window_counts(chars: &[Symbol], k: u32, m: usize) -> Option<Vec<u32>> {
    let n = chars.len();
    let size = universe_size(k, m)?;
    let limit = DENSE_LIMIT.max(2 * n as u64);
    if size > limit || n > u32::MAX as usize || m > n {
        return None;
    }
    let mut counts = vec![0u32; size as usize];
    if m == 0 {
        counts[0] = n as u32;
        return Some(counts);
    }
    let k = u64::from(k);
    let top = size / k;
    let mut code = 0u64;
    for t in 0..m {
        code = code * k + u64::from(chars[t % n]);
    }
    counts[code as usize] += 1;
    for i in 1..n {
        code = (code - u64::from(chars[i - 1]) * top) * k + u64::from(chars[(i + m - 1) % n]);
        counts[code as usize] += 1;
    }
    Some(counts)
}

/// Decodes a window code produced by [`dense_window_counts`].
pub(crate) fn decode_window(mut code: u64, k: u32, m: usize) -> Vec<Symbol> {
    let mut out = vec![0 as Symbol; m];
    for slot in out.iter_mut().rev() {
        *slot = (code % u64::from(k)) as Symbol;
        code /= u64::from(k);
    }
    out
}

/// Hashed counts of every length-`m` window keyed by the window itself.
pub(crate) fn hashed_window_counts(chars: &[Symbol], m: usize) -> HashMap<Vec<Symbol>, u64> {
    let n = chars.len();
    let mut map: HashMap<Vec<Symbol>, u64> = HashMap::new();
    let mut window = Vec::with_capacity(m);
    for i in 0..n {
        window.clear();
        window.extend((0..m).map(|t| chars[(i + t) % n]));
        if let Some(c) = map.get_mut(window.as_slice()) {
            *c += 1;
        } else {
            map.insert(window.clone(), 1);
        }
    }
    map
}

/// Counts of all length-`m` substrings, `1 <= m <= |n|`.
pub fn occurrence_profile(n: &Necklace, m: usize) -> Result<OccurrenceProfile> {
    if m == 0 || m > n.len() {
        return Err(PklError::LengthOutOfRange { m, max: n.len() });
    }
    let mut counts = BTreeMap::new();
    match dense_window_counts(&n.chars, n.k, m) {
        Some(dense) => {
            for (code, &c) in dense.iter().enumerate() {
                if c > 0 {
                    let s = LinearString::from_raw(decode_window(code as u64, n.k, m), n.k);
                    counts.insert(s, u64::from(c));
                }
            }
        }
        None => {
            for (w, c) in hashed_window_counts(&n.chars, m) {
                counts.insert(LinearString::from_raw(w, n.k), c);
            }
        }
    }
    Ok(OccurrenceProfile { k: n.k, m, counts })
}

// ---------------------------------------------------------------------------
// Cycle joining

/// Which occurrence of the anchor to cut at when joining.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JoinChoice {
    /// Smallest cyclic start index in each necklace.
    #[default]
    First,
    /// Explicit start indices (internal rotations) in each necklace.
    At { left: usize, right: usize },
}

fn anchor_at(hay: &[Symbol], needle: &[Symbol], at: usize) -> bool {
    let n = hay.len();
    at < n && needle.iter().enumerate().all(|(t, &c)| hay[(at + t) % n] == c)
}

/// Joins `b` and `g` at `w`: concatenates the rotation of `b` starting with
/// `w` and the rotation of `g` starting with `w`.
pub fn join(b: &Necklace, g: &Necklace, w: &LinearString, choice: JoinChoice) -> Result<Necklace> {
    for k in [g.k, w.k] {
        if k != b.k {
            return Err(PklError::AlphabetMismatch { left: b.k, right: k });
        }
    }
    let not_found = |side| PklError::JoinAnchorNotFound {
        anchor: w.to_text(),
        side,
    };
    let (x, y) = match choice {
        JoinChoice::First => (
            find_first_cyclic(&b.chars, &w.chars).ok_or_else(|| not_found("left"))?,
            find_first_cyclic(&g.chars, &w.chars).ok_or_else(|| not_found("right"))?,
        ),
        JoinChoice::At { left, right } => {
            if w.len() > b.len() || !anchor_at(&b.chars, &w.chars, left) {
                return Err(not_found("left"));
            }
            if w.len() > g.len() || !anchor_at(&g.chars, &w.chars, right) {
                return Err(not_found("right"));
            }
            (left, right)
        }
    };
    Ok(join_at(&b.chars, x, &g.chars, y, b.k))
}

pub(crate) fn join_at(b: &[Symbol], x: usize, g: &[Symbol], y: usize, k: u32) -> Necklace {
    let mut out = Vec::with_capacity(b.len() + g.len());
    out.extend_from_slice(&b[x..]);
    out.extend_from_slice(&b[..x]);
    out.extend_from_slice(&g[y..]);
    out.extend_from_slice(&g[..y]);
    Necklace::from_raw(out, k)
}

// ---------------------------------------------------------------------------
// Translation and runs

pub(crate) fn shift_symbols(chars: &[Symbol], k: u32, j: i64) -> Vec<Symbol> {
    let shift = j.rem_euclid(i64::from(k)) as u32;
    if shift == 0 {
        return chars.to_vec();
    }
    chars
        .iter()
        .map(|&c| {
            let v = u32::from(c) + shift;
            (if v >= k { v - k } else { v }) as Symbol
        })
        .collect()
}

/// Adds `j` to every character modulo `k`.
pub fn add_mod(n: &Necklace, j: i64) -> Necklace {
    Necklace::from_raw(shift_symbols(&n.chars, n.k, j), n.k)
}

/// A maximal cyclic run of one character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Run {
    /// Index (in the internal rotation) of the run's first character.
    pub start: usize,
    pub len: usize,
}

/// All maximal cyclic runs of `c`, ordered by start index. A necklace made
/// only of `c` is one run of full length starting at 0.
pub fn maximal_runs(n: &Necklace, c: Symbol) -> Vec<Run> {
    let chars = &n.chars;
    let len = chars.len();
    if chars.iter().all(|&x| x == c) {
        return vec![Run { start: 0, len }];
    }
    let mut runs = Vec::new();
    for i in 0..len {
        let prev = chars[(i + len - 1) % len];
        if chars[i] == c && prev != c {
            let mut r = 1;
            while chars[(i + r) % len] == c {
                r += 1;
            }
            runs.push(Run { start: i, len: r });
        }
    }
    runs
}

/// Inserts one `c` at the end of the longest run of `c` (smallest start
/// index among ties), lengthening that run by one.
pub fn extend_longest_run(n: &Necklace, c: Symbol) -> Result<Necklace> {
    if c == 0 {
        return Err(PklError::InvalidExtension {
            ch: 0,
            reason: "the zero character is never extended",
        });
    }
    if u32::from(c) >= n.k {
        return Err(PklError::CharacterOutOfRange {
            index: 0,
            ch: u32::from(c),
            k: n.k,
        });
    }
    let mut chars = n.chars.clone();
    insert_after_longest_run(&mut chars, c).ok_or(PklError::InvalidExtension {
        ch: u32::from(c),
        reason: "character does not occur",
    })?;
    Ok(Necklace::from_raw(chars, n.k))
}

/// Single-pass form of [`extend_longest_run`] working in place. Returns the
/// length of the run before extension, or `None` if `c` does not occur.
pub(crate) fn insert_after_longest_run(chars: &mut Vec<Symbol>, c: Symbol) -> Option<usize> {
    let len = chars.len();
    // Locate a position that does not hold `c` so runs can be scanned
    // without worrying about wrap-around at index 0.
    let Some(anchor) = chars.iter().position(|&x| x != c) else {
        chars.push(c);
        return Some(len);
    };
    // (start, len) of the best run, with start as an internal index.
    let mut best: Option<(usize, usize)> = None;
    let mut t = 1;
    while t <= len {
        let i = (anchor + t) % len;
        if chars[i] != c {
            t += 1;
            continue;
        }
        let mut r = 0;
        while chars[(i + r) % len] == c {
            r += 1;
        }
        let better = match best {
            None => true,
            Some((bs, bl)) => r > bl || (r == bl && i < bs),
        };
        if better {
            best = Some((i, r));
        }
        t += r;
    }
    let (start, run) = best?;
    let end = start + run;
    let at = if end <= len { end } else { end - len };
    chars.insert(at, c);
    Some(run)
}

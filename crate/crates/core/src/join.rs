//! Joining the members of a lift into one necklace of `K` times the length.
//!
//! Four cases, tried in order:
//!
//! * **1** – the lift has a single member; it is the answer.
//! * **2** – the run `1_N` (with `N = ceil(log_K L)`) occurs in the input, so
//!   consecutive members share a ramp of length `N` and can be chained.
//! * **3a** – otherwise members are joined along a depth-first traversal of
//!   the join graph, whose edges are length-`N` ramp extensions shared by
//!   two members. If the graph is connected that is the answer.
//! * **3b** – the graph has several components, all translates of the one
//!   that was joined; the translates are chained at ramps of length `N - 1`.
//!
//! Joins are recorded as splices into a tree of member-local positions and
//! the final necklace is written out once, so each call costs time linear in
//! the output length. A member-local anchor occurrence stays valid however
//! many splices surround it, as long as anchors have a fixed length: the
//! characters after any splice point repeat the anchor that was spliced at.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use crate::error::{PklError, Result};
use crate::lift::{lempel_lift, LiftFamily};
use crate::necklace::{
    dense_window_counts, find_first_cyclic, format_symbols, hashed_window_counts, LinearString, Necklace,
};
use crate::verifier::{ceil_log, is_pkl};
use crate::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum JoinCase {
    One,
    Two,
    ThreeA,
    ThreeB,
}

impl fmt::Display for JoinCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JoinCase::One => "1",
            JoinCase::Two => "2",
            JoinCase::ThreeA => "3a",
            JoinCase::ThreeB => "3b",
        })
    }
}

/// One side of a join.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// Lift member `lambda_i`.
    Member(u32),
    /// The joined component translated by `j`.
    Translate(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinStep {
    pub case: JoinCase,
    pub anchor: LinearString,
    /// The participant holding the anchor occurrence on the accumulated side.
    pub left: Part,
    /// The participant being joined in.
    pub right: Part,
}

/// Record of which branch ran and every join performed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JoinTrace {
    pub case: Option<JoinCase>,
    pub steps: Vec<JoinStep>,
    /// Joins carried out implicitly by translating a joined component
    /// (Case 3b); `steps.len() + implied_joins == p - 1`.
    pub implied_joins: usize,
}

impl JoinTrace {
    pub fn total_joins(&self) -> usize {
        self.steps.len() + self.implied_joins
    }
}

/// Edge of the join graph: `label` occurs in both `lambda_a` and `lambda_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinEdge {
    pub a: u32,
    pub b: u32,
    pub label: LinearString,
    /// First occurrence of the label in `lambda_a` and `lambda_b`.
    pub pos_a: usize,
    pub pos_b: usize,
}

/// Undirected multigraph over lift members; `a < b` for every edge.
#[derive(Clone, Debug)]
pub struct JoinGraph {
    pub vertex_count: u32,
    pub edges: Vec<JoinEdge>,
    pub k: u32,
}

impl JoinGraph {
    /// Neighbours of `v` ordered by (neighbour index, label), with the
    /// anchor position on `v`'s side and on the neighbour's side.
    fn adjacency(&self) -> Vec<Vec<(u32, &LinearString, usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count as usize];
        for e in &self.edges {
            adj[e.a as usize].push((e.b, &e.label, e.pos_a, e.pos_b));
            adj[e.b as usize].push((e.a, &e.label, e.pos_b, e.pos_a));
        }
        for list in &mut adj {
            list.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
        }
        adj
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<u32>> {
        let n = self.vertex_count as usize;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (ra, rb) = (find(&mut parent, e.a as usize), find(&mut parent, e.b as usize));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v as u32);
        }
        groups.into_values().collect()
    }

    /// Graphviz rendering; vertices are `λ_i`, edges carry their labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph join {\n");
        for v in 0..self.vertex_count {
            let _ = writeln!(out, "  v{v} [label=\"λ{v}\"];");
        }
        for e in &self.edges {
            let _ = writeln!(out, "  v{} -- v{} [label=\"{}\"];", e.a, e.b, e.label);
        }
        out.push_str("}\n");
        out
    }
}

/// For each start value `s`, the first position where the ramp
/// `(s, s+1, ..., s+len-1)` occurs cyclically in `chars`.
fn first_ramp_positions(chars: &[Symbol], k: u32, len: usize) -> Vec<Option<usize>> {
    let n = chars.len();
    let mut first = vec![None; k as usize];
    if len > n {
        return first;
    }
    if len == 0 {
        // the empty ramp occurs at every position for every start value
        return vec![Some(0); k as usize];
    }
    let runs = ramp_runs(chars, k);
    for (o, &run) in runs.iter().enumerate() {
        if run + 1 >= len {
            let slot = &mut first[chars[o] as usize];
            if slot.is_none() {
                *slot = Some(o);
            }
        }
    }
    first
}

/// `runs[o]` = number of consecutive unit steps `c[t+1] - c[t] = 1 (mod k)`
/// starting at `o`, capped at `n`.
fn ramp_runs(chars: &[Symbol], k: u32) -> Vec<usize> {
    let n = chars.len();
    let step = |i: usize| (u32::from(chars[(i + 1) % n]) + k - u32::from(chars[i])) % k == 1;
    let Some(z) = (0..n).find(|&i| !step(i)) else {
        return vec![n; n];
    };
    let mut runs = vec![0usize; n];
    // walk backwards from the break at z, all the way around
    for back in 1..n {
        let i = (z + n - back) % n;
        runs[i] = if step(i) { runs[(i + 1) % n] + 1 } else { 0 };
    }
    runs
}

/// Builds the join graph of `fam`: an edge labelled `x` joins `lambda_a` and
/// `lambda_b` when the length-`n` string `x`, of the form
/// `(j_{n-1}^{++}, c)` or `(c, j_{n-1}^{++})`, occurs in both.
pub fn build_join_graph(fam: &LiftFamily, n: usize) -> JoinGraph {
    let k = fam.k();
    let p = fam.p();
    let base = fam.base();
    let len = base.len();
    let mut edges = Vec::new();
    if n == 0 || n > len || p < 2 {
        return JoinGraph {
            vertex_count: p,
            edges,
            k,
        };
    }
    // Labels occurring in lambda_0 with their first position. Every
    // occurrence of a label starts or ends with a ramp occurrence.
    let ramp_len = n - 1;
    let runs = ramp_runs(base, k);
    let mut in_base: HashMap<Vec<Symbol>, usize> = HashMap::new();
    let note = |start: usize, in_base: &mut HashMap<Vec<Symbol>, usize>| {
        let label: Vec<Symbol> = (0..n).map(|t| base[(start + t) % len]).collect();
        in_base
            .entry(label)
            .and_modify(|p| *p = (*p).min(start))
            .or_insert(start);
    };
    for (o, &run) in runs.iter().enumerate() {
        if ramp_len == 0 || run + 1 >= ramp_len {
            note(o, &mut in_base);
            note((o + len - 1) % len, &mut in_base);
        }
    }
    // lambda_i contains y iff y - i occurs in lambda_0.
    let mut holders: BTreeMap<Vec<Symbol>, Vec<(u32, usize)>> = BTreeMap::new();
    for (label, &pos) in &in_base {
        for i in 0..p {
            let y: Vec<Symbol> = label
                .iter()
                .map(|&c| ((u32::from(c) + i) % k) as Symbol)
                .collect();
            holders.entry(y).or_default().push((i, pos));
        }
    }
    for (label, mut hs) in holders {
        hs.sort_unstable();
        let label = LinearString::from_raw(label, k);
        for x in 0..hs.len() {
            for y in x + 1..hs.len() {
                edges.push(JoinEdge {
                    a: hs[x].0,
                    b: hs[y].0,
                    label: label.clone(),
                    pos_a: hs[x].1,
                    pos_b: hs[y].1,
                });
            }
        }
    }
    edges.sort_by(|e, f| (e.a, e.b, &e.label).cmp(&(f.a, f.b, &f.label)));
    JoinGraph {
        vertex_count: p,
        edges,
        k,
    }
}

/// Necklaces built by splicing translates of one base necklace into each
/// other. Node `i` is `base + shift[i]` read from `start[i]`; a child
/// spliced at offset `t` of its parent is written just before the parent's
/// character `t`.
struct Assembly<'a> {
    base: &'a [Symbol],
    k: u32,
    shift: Vec<u32>,
    start: Vec<usize>,
    // (offset in parent, child node), in insertion order
    children: Vec<Vec<(usize, usize)>>,
}

impl<'a> Assembly<'a> {
    fn new(base: &'a [Symbol], k: u32, root_shift: u32) -> Self {
        Self {
            base,
            k,
            shift: vec![root_shift],
            start: vec![0],
            children: vec![Vec::new()],
        }
    }

    fn splice(&mut self, parent: usize, offset: usize, shift: u32, start: usize) -> usize {
        let id = self.shift.len();
        self.shift.push(shift);
        self.start.push(start);
        self.children.push(Vec::new());
        self.children[parent].push((offset, id));
        id
    }

    fn emit(&self) -> Vec<Symbol> {
        let len = self.base.len();
        let k = self.k;
        let mut out = Vec::with_capacity(len * self.shift.len());
        // children of each node keyed by distance from the node's start;
        // a stable sort keeps insertion order among equal offsets
        let ordered: Vec<Vec<(usize, usize)>> = self
            .children
            .iter()
            .enumerate()
            .map(|(node, kids)| {
                let mut v: Vec<(usize, usize)> = kids
                    .iter()
                    .map(|&(off, child)| ((off + len - self.start[node]) % len, child))
                    .collect();
                v.sort_by_key(|&(rel, _)| rel);
                v
            })
            .collect();
        // (node, characters written, next child)
        let mut stack = vec![(0usize, 0usize, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (node, i, ci) = *top;
            if ci < ordered[node].len() && ordered[node][ci].0 == i {
                top.2 += 1;
                stack.push((ordered[node][ci].1, 0, 0));
                continue;
            }
            if i == len {
                stack.pop();
                continue;
            }
            let c = u32::from(self.base[(self.start[node] + i) % len]) + self.shift[node];
            out.push((if c >= k { c - k } else { c }) as Symbol);
            top.1 += 1;
        }
        out
    }
}

/// Options for [`lift_and_join_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct JoinOptions {
    /// Verify that the input is a P-sequence (always done in debug builds).
    pub verify_input: bool,
    /// After every join, materialize the partial necklace and check that
    /// substring counts are conserved. Quadratic; meant for tests.
    pub check_joins: bool,
}

/// Joins the lift of a P-sequence of length `L` into a P-sequence of length
/// `K * L`.
pub fn lift_and_join(a: &Necklace) -> Result<Necklace> {
    lift_and_join_with(a, JoinOptions::default()).map(|(n, _)| n)
}

pub fn lift_and_join_with(a: &Necklace, opts: JoinOptions) -> Result<(Necklace, JoinTrace)> {
    if opts.verify_input || cfg!(debug_assertions) {
        if let Some(w) = is_pkl(a).witness {
            return Err(PklError::NotBalanced {
                m: w.m,
                string: w.string.to_text(),
                count: w.count,
            });
        }
    }
    lift_and_join_unchecked(a, opts.check_joins)
}

fn failure(reason: impl Into<String>, trace: &JoinTrace) -> PklError {
    PklError::ConstructionFailure {
        reason: reason.into(),
        trace: trace.clone(),
    }
}

pub(crate) fn lift_and_join_unchecked(a: &Necklace, check: bool) -> Result<(Necklace, JoinTrace)> {
    let k = a.k();
    let fam = lempel_lift(a);
    let p = fam.p();
    let n = ceil_log(a.len() as u64, k) as usize;
    let base = fam.base();
    let mut trace = JoinTrace::default();

    if p == 1 {
        trace.case = Some(JoinCase::One);
        return Ok((Necklace::from_raw(base.to_vec(), k), trace));
    }

    let ones = LinearString::run(1, n, k);
    let mut checker = check.then(|| JoinChecker::new(k, base.to_vec()));

    if find_first_cyclic(a.chars(), ones.chars()).is_some() {
        trace.case = Some(JoinCase::Two);
        // k_N^{++} must occur in lambda_0 and lambda_1, i.e. both the
        // k-ramp and the (k-1)-ramp occur in lambda_0.
        let first = first_ramp_positions(base, k, n);
        let Some(s0) = (0..k).find(|&s| first[s as usize].is_some() && first[((s + k - 1) % k) as usize].is_some())
        else {
            return Err(failure("no shared ramp for a Case 2 join", &trace));
        };
        let at_parent = first[s0 as usize].unwrap();
        let at_child = first[((s0 + k - 1) % k) as usize].unwrap();
        let mut asm = Assembly::new(base, k, 0);
        let mut prev = 0usize;
        for j in 1..p {
            let anchor = LinearString::ramp(s0 + j - 1, n, k);
            prev = asm.splice(prev, at_parent, j, at_child);
            trace.steps.push(JoinStep {
                case: JoinCase::Two,
                anchor: anchor.clone(),
                left: Part::Member(j - 1),
                right: Part::Member(j),
            });
            if let Some(c) = checker.as_mut() {
                let member = crate::necklace::shift_symbols(base, k, i64::from(j));
                c.check(trace.steps.len(), &asm.emit(), &member, n + 1, None)?;
            }
        }
        return Ok((Necklace::from_raw(asm.emit(), k), trace));
    }

    // Case 3
    let graph = build_join_graph(&fam, n);
    let adj = graph.adjacency();
    let mut asm = Assembly::new(base, k, 0);
    let mut node_of = vec![usize::MAX; p as usize];
    node_of[0] = 0;
    let mut visited = 1usize;
    let mut stack: Vec<(u32, usize)> = vec![(0, 0)];
    while let Some(top) = stack.last_mut() {
        let (u, next) = *top;
        let Some(&(v, label, pos_u, pos_v)) = adj[u as usize].get(next) else {
            stack.pop();
            continue;
        };
        top.1 += 1;
        if node_of[v as usize] != usize::MAX {
            continue;
        }
        node_of[v as usize] = asm.splice(node_of[u as usize], pos_u, v, pos_v);
        visited += 1;
        trace.steps.push(JoinStep {
            case: JoinCase::ThreeA,
            anchor: label.clone(),
            left: Part::Member(u),
            right: Part::Member(v),
        });
        if let Some(c) = checker.as_mut() {
            let member = crate::necklace::shift_symbols(base, k, i64::from(v));
            c.check(trace.steps.len(), &asm.emit(), &member, n + 1, None)?;
        }
        stack.push((v, 0));
    }
    let sigma = asm.emit();
    if visited == p as usize {
        trace.case = Some(JoinCase::ThreeA);
        return Ok((Necklace::from_raw(sigma, k), trace));
    }

    trace.case = Some(JoinCase::ThreeB);
    if !(p as usize).is_multiple_of(visited) {
        return Err(failure(
            format!("component of size {visited} does not tile {p} members"),
            &trace,
        ));
    }
    let copies = p / visited as u32;
    trace.implied_joins = (copies as usize - 1) * (visited - 1);
    let r = n - 1;
    let first = first_ramp_positions(&sigma, k, r);
    let Some(s0) = (0..k).find(|&s| first[s as usize].is_some() && first[((s + k - 1) % k) as usize].is_some())
    else {
        return Err(failure("no shared ramp for a Case 3b join", &trace));
    };
    let at_parent = first[s0 as usize].unwrap();
    let at_child = first[((s0 + k - 1) % k) as usize].unwrap();
    let mut checker = check.then(|| JoinChecker::new(k, sigma.clone()));
    let mut outer = Assembly::new(&sigma, k, 0);
    let mut prev = 0usize;
    for j in 1..copies {
        prev = outer.splice(prev, at_parent, j, at_child);
        trace.steps.push(JoinStep {
            case: JoinCase::ThreeB,
            anchor: LinearString::ramp(s0 + j - 1, r, k),
            left: Part::Translate(j - 1),
            right: Part::Translate(j),
        });
        if let Some(c) = checker.as_mut() {
            let member = crate::necklace::shift_symbols(&sigma, k, i64::from(j));
            c.check(trace.steps.len(), &outer.emit(), &member, r, Some(n + 1))?;
        }
    }
    Ok((Necklace::from_raw(outer.emit(), k), trace))
}

/// Compares substring counts before and after each join.
struct JoinChecker {
    k: u32,
    prev: Vec<Symbol>,
}

type Counts = HashMap<Vec<Symbol>, u64>;

fn counts_of(chars: &[Symbol], k: u32, m: usize) -> Counts {
    if m > chars.len() {
        return Counts::new();
    }
    match dense_window_counts(chars, k, m) {
        Some(dense) => dense
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(code, &c)| (crate::necklace::decode_window(code as u64, k, m), u64::from(c)))
            .collect(),
        None => hashed_window_counts(chars, m),
    }
}

impl JoinChecker {
    fn new(k: u32, root: Vec<Symbol>) -> Self {
        Self { k, prev: root }
    }

    /// `joined` must have the combined counts of the previous partial
    /// necklace and `member` for all lengths `1..=conserve`; if `at_most_once`
    /// is set, every string of that length occurs at most once in `joined`.
    fn check(
        &mut self,
        index: usize,
        joined: &[Symbol],
        member: &[Symbol],
        conserve: usize,
        at_most_once: Option<usize>,
    ) -> Result<()> {
        let prev = &self.prev;
        if prev.len() + member.len() != joined.len() {
            return Err(PklError::JoinCheckFailed {
                index,
                reason: format!(
                    "length {} is not {} + {}",
                    joined.len(),
                    prev.len(),
                    member.len()
                ),
            });
        }
        for m in 1..=conserve {
            let mut expected = counts_of(prev, self.k, m);
            for (s, c) in counts_of(member, self.k, m) {
                *expected.entry(s).or_default() += c;
            }
            // strings longer than a part are not counted in that part; only
            // compare lengths where every part is long enough
            if m > prev.len() || m > member.len() {
                continue;
            }
            let got = counts_of(joined, self.k, m);
            if got != expected {
                return Err(PklError::JoinCheckFailed {
                    index,
                    reason: format!("length-{m} counts changed"),
                });
            }
        }
        if let Some(m) = at_most_once {
            if m <= joined.len() {
                if let Some((s, c)) = counts_of(joined, self.k, m).into_iter().find(|(_, c)| *c > 1) {
                    return Err(PklError::JoinCheckFailed {
                        index,
                        reason: format!(
                            "length-{m} string {} occurs {c} times",
                            format_symbols(&s, self.k)
                        ),
                    });
                }
            }
        }
        self.prev = joined.to_vec();
        Ok(())
    }
}

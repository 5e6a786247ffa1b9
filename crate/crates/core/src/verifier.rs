//! Exhaustive bounded reachability: certifies stable computation and stable
//! decision input by input.
//!
//! Configurations are packed into a flat arena of fixed-width cells (one,
//! two or four bytes, widened by restarting when a count overflows) and
//! deduplicated through a hash table of arena indices. Edges are kept in CSR
//! form so the output-stability fixpoint and counterexample traces come from
//! a single exploration.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::hash::BuildHasher;
use std::time::{Duration, Instant};

use hashbrown::HashTable;
use rayon::prelude::*;
use rustc_hash::FxBuildHasher;
use serde::Serialize;
use thiserror::Error;

use crate::crn::{apply, Configuration, Crc, Crd, Crn, CrnError, Vote};

pub const DEFAULT_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("state space exceeds cap {cap} at depth {depth} (nodes per depth: {growth})")]
    CapExceeded {
        cap: usize,
        depth: usize,
        growth: String,
    },
    #[error("unbounded network: the computer is flagged as having an unbounded reachable space")]
    Unbounded,
    #[error("oracle undefined at input {0:?}")]
    OracleUndefined(Vec<u64>),
    #[error("count overflow while exploring")]
    Overflow,
    #[error(transparent)]
    Crn(#[from] CrnError),
}

const NO_PARENT: u32 = u32::MAX;

/// The set of configurations reachable from a root, with edges.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    species: usize,
    width: usize,
    arena: Vec<u8>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    via: Vec<u32>,
    parent: Vec<(u32, u32)>,
    depth_sizes: Vec<usize>,
    eager: Vec<usize>,
    root: Vec<u64>,
}

impl ReachGraph {
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    /// Number of BFS layers (the root alone is depth 0).
    pub fn depth(&self) -> usize {
        self.depth_sizes.len().saturating_sub(1)
    }

    pub fn nodes_per_depth(&self) -> &[usize] {
        &self.depth_sizes
    }

    fn cell(&self, node: usize) -> &[u8] {
        let stride = self.species * self.width;
        &self.arena[node * stride..(node + 1) * stride]
    }

    pub fn counts_into(&self, node: usize, out: &mut Vec<u64>) {
        out.clear();
        out.resize(self.species, 0);
        decode(self.cell(node), self.width, out);
    }

    pub fn configuration(&self, node: usize) -> Configuration {
        let mut v = Vec::new();
        self.counts_into(node, &mut v);
        Configuration::from_counts(v)
    }

    /// `(reaction index, target node)` pairs; reactions that leave the
    /// configuration unchanged are not recorded.
    pub fn successors(&self, node: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.via[range.clone()]
            .iter()
            .zip(&self.targets[range])
            .map(|(&r, &t)| (r as usize, t as usize))
    }

    /// Reaction indices along the BFS tree from the root to `node`,
    /// including the eagerly fired reactions of a reduced graph.
    pub fn trace_to(&self, crn: &Crn, node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = node;
        while self.parent[cur].0 != NO_PARENT {
            let (p, r) = self.parent[cur];
            path.push(r as usize);
            cur = p as usize;
        }
        path.reverse();
        if self.eager.is_empty() {
            return path;
        }
        let steps = steps_of(crn);
        let mut counts = self.root.clone();
        let mut trace = Vec::new();
        saturate(&mut counts, &steps, &self.eager, Some(&mut trace)).expect("replayed saturation");
        for r in path {
            for &(sp, d) in &steps[r].delta {
                counts[sp] = (counts[sp] as i64 + d) as u64;
            }
            trace.push(r);
            saturate(&mut counts, &steps, &self.eager, Some(&mut trace)).expect("replayed saturation");
        }
        trace
    }

    /// True when the graph was explored with eager reactions fired.
    pub fn is_reduced(&self) -> bool {
        !self.eager.is_empty()
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        (0..self.node_count()).any(|i| self.configuration(i) == *c)
    }
}

fn decode(bytes: &[u8], width: usize, out: &mut [u64]) {
    match width {
        1 => out.iter_mut().zip(bytes).for_each(|(o, &b)| *o = b as u64),
        2 => out
            .iter_mut()
            .zip(bytes.chunks_exact(2))
            .for_each(|(o, b)| *o = u16::from_le_bytes([b[0], b[1]]) as u64),
        _ => out
            .iter_mut()
            .zip(bytes.chunks_exact(4))
            .for_each(|(o, b)| *o = u32::from_le_bytes([b[0], b[1], b[2], b[3]]) as u64),
    }
}

/// Packs `counts`; false when some count needs a wider cell.
fn encode(counts: &[u64], width: usize, out: &mut Vec<u8>) -> bool {
    out.clear();
    let max = if width >= 8 { u64::MAX } else { (1u64 << (8 * width)) - 1 };
    for &c in counts {
        if c > max {
            return false;
        }
        out.extend_from_slice(&c.to_le_bytes()[..width]);
    }
    true
}

struct Step {
    reactants: Vec<(usize, u64)>,
    delta: Vec<(usize, i64)>,
}

enum ExploreError {
    Widen,
    Fatal(VerifyError),
}

fn growth_string(sizes: &[usize]) -> String {
    sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Fires every eager reaction to exhaustion, in topological order.
fn saturate(counts: &mut [u64], steps: &[Step], eager: &[usize], mut trace: Option<&mut Vec<usize>>) -> Result<(), VerifyError> {
    for &ri in eager {
        let st = &steps[ri];
        let (x, _) = st.reactants[0];
        let n = counts[x];
        if n == 0 {
            continue;
        }
        for &(sp, d) in &st.delta {
            let v = counts[sp] as i128 + d as i128 * n as i128;
            if v > u32::MAX as i128 {
                return Err(VerifyError::Overflow);
            }
            counts[sp] = v as u64;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.extend(std::iter::repeat_n(ri, n as usize));
        }
    }
    Ok(())
}

fn explore(
    crn: &Crn,
    steps: &[Step],
    eager: &[usize],
    init: &[u64],
    cap: usize,
    width: usize,
) -> Result<ReachGraph, ExploreError> {
    let s = crn.species_count();
    let hasher = FxBuildHasher;
    let mut g = ReachGraph {
        species: s,
        width,
        arena: Vec::new(),
        offsets: vec![0],
        targets: Vec::new(),
        via: Vec::new(),
        parent: Vec::new(),
        depth_sizes: vec![1],
        eager: eager.to_vec(),
        root: init.to_vec(),
    };
    let stride = s * width;
    let mut root = init.to_vec();
    saturate(&mut root, steps, eager, None).map_err(ExploreError::Fatal)?;
    let init = &root[..];
    let mut table: HashTable<u32> = HashTable::new();
    let mut key = Vec::with_capacity(stride);
    if !encode(init, width, &mut key) {
        return Err(ExploreError::Widen);
    }
    g.arena.extend_from_slice(&key);
    g.parent.push((NO_PARENT, 0));
    table.insert_unique(hasher.hash_one(&key[..]), 0, |_| 0);

    let mut cur = vec![0u64; s];
    let mut next = vec![0u64; s];
    let mut level_end = 1;
    let mut i = 0;
    while i < g.parent.len() {
        if i == level_end {
            g.depth_sizes.push(g.parent.len() - level_end);
            level_end = g.parent.len();
        }
        decode(&g.arena[i * stride..(i + 1) * stride], width, &mut cur);
        for (ri, st) in steps.iter().enumerate() {
            if st.delta.is_empty() || st.reactants.iter().any(|&(sp, n)| cur[sp] < n) {
                continue;
            }
            next.copy_from_slice(&cur);
            for &(sp, d) in &st.delta {
                let v = next[sp] as i64 as i128 + d as i128;
                if v > u32::MAX as i128 {
                    return Err(ExploreError::Fatal(VerifyError::Overflow));
                }
                next[sp] = v as u64;
            }
            saturate(&mut next, steps, eager, None).map_err(ExploreError::Fatal)?;
            if !encode(&next, width, &mut key) {
                return Err(ExploreError::Widen);
            }
            let h = hasher.hash_one(&key[..]);
            let arena = &g.arena;
            let found = table.find(h, |&idx| arena[idx as usize * stride..(idx as usize + 1) * stride] == key[..]);
            let j = match found {
                Some(&j) => j,
                None => {
                    if g.parent.len() >= cap {
                        let mut sizes = g.depth_sizes.clone();
                        sizes.push(g.parent.len() - level_end);
                        return Err(ExploreError::Fatal(VerifyError::CapExceeded {
                            cap,
                            depth: g.depth_sizes.len(),
                            growth: growth_string(&sizes),
                        }));
                    }
                    let j = g.parent.len() as u32;
                    g.arena.extend_from_slice(&key);
                    g.parent.push((i as u32, ri as u32));
                    let arena = &g.arena;
                    table.insert_unique(h, j, |&idx| {
                        hasher.hash_one(&arena[idx as usize * stride..(idx as usize + 1) * stride])
                    });
                    j
                }
            };
            g.targets.push(j);
            g.via.push(ri as u32);
        }
        g.offsets.push(g.targets.len());
        i += 1;
    }
    if g.parent.len() > level_end {
        g.depth_sizes.push(g.parent.len() - level_end);
    }
    Ok(g)
}

fn steps_of(crn: &Crn) -> Vec<Step> {
    crn.reactions()
        .iter()
        .map(|r| Step {
            reactants: r.reactants().to_vec(),
            delta: r.delta(),
        })
        .collect()
}

/// Reactions that commute with every other reaction and can be fired as soon
/// as they are enabled without changing which output-stable configurations
/// are reachable: a single unit reactant that no other reaction reads,
/// touching no observed species. Returned in topological order; reactions on
/// a cycle are excluded.
pub fn eager_reactions(crn: &Crn, observed: &[usize]) -> Vec<usize> {
    let rs = crn.reactions();
    let mut readers = vec![0usize; crn.species_count()];
    for r in rs {
        for &(s, _) in r.reactants() {
            readers[s] += 1;
        }
    }
    let mut by_reactant: Vec<Option<usize>> = vec![None; crn.species_count()];
    for (i, r) in rs.iter().enumerate() {
        let [(x, 1)] = r.reactants()[..] else { continue };
        if readers[x] != 1
            || observed.contains(&x)
            || r.products().iter().any(|(p, _)| observed.contains(p))
        {
            continue;
        }
        by_reactant[x] = Some(i);
    }
    // Kahn's algorithm over species consumed eagerly.
    let mut indeg = vec![0usize; crn.species_count()];
    for i in by_reactant.iter().flatten() {
        for &(p, _) in rs[*i].products() {
            if by_reactant[p].is_some() {
                indeg[p] += 1;
            }
        }
    }
    let mut queue: Vec<usize> = (0..crn.species_count())
        .filter(|&x| by_reactant[x].is_some() && indeg[x] == 0)
        .collect();
    let mut order = Vec::new();
    while let Some(x) = queue.pop() {
        let i = by_reactant[x].unwrap();
        order.push(i);
        for &(p, _) in rs[i].products() {
            if by_reactant[p].is_some() {
                indeg[p] -= 1;
                if indeg[p] == 0 {
                    queue.push(p);
                }
            }
        }
    }
    order
}

/// Breadth-first closure of `init` under the reactions of `crn`.
pub fn reachable_set(crn: &Crn, init: &Configuration, cap: usize) -> Result<ReachGraph, VerifyError> {
    reachable_set_reduced(crn, init, cap, &[])
}

/// Closure in which the `eager` reactions (see [`eager_reactions`]) are
/// fired to exhaustion after every step, so only their fixpoints are
/// stored.
pub fn reachable_set_reduced(
    crn: &Crn,
    init: &Configuration,
    cap: usize,
    eager: &[usize],
) -> Result<ReachGraph, VerifyError> {
    crn.check_config(init)?;
    let steps = steps_of(crn);
    let max = init.counts().iter().copied().max().unwrap_or(0);
    let start = if max <= u8::MAX as u64 {
        1
    } else if max <= u16::MAX as u64 {
        2
    } else {
        4
    };
    for width in [1, 2, 4].into_iter().filter(|&w| w >= start) {
        match explore(crn, &steps, eager, init.counts(), cap.max(1), width) {
            Ok(g) => return Ok(g),
            Err(ExploreError::Widen) => continue,
            Err(ExploreError::Fatal(e)) => return Err(e),
        }
    }
    Err(VerifyError::Overflow)
}

/// Strongly connected components, numbered so that every edge between
/// components goes from a higher to a lower number (sinks first).
pub fn scc(g: &ReachGraph) -> (Vec<u32>, usize) {
    let n = g.node_count();
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut comp = vec![UNSEEN; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut ncomp = 0usize;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root as u32, g.offsets[root]));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root as u32);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let v = v as usize;
            if *pos < g.offsets[v + 1] {
                let w = g.targets[*pos] as usize;
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, g.offsets[w]));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    let u = u as usize;
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack") as usize;
                        on_stack[w] = false;
                        comp[w] = ncomp as u32;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

/// Output class meaning "never stable" (an undefined vote).
pub const UNDEFINED_CLASS: u32 = u32::MAX;

/// Per-node flags from the condensation: `stable` when every configuration
/// reachable from the node has the node's (defined) class, `good` when a
/// stable configuration of class `correct` is reachable.
pub struct Stability {
    pub stable: Vec<bool>,
    pub good: Vec<bool>,
}

pub fn stability(g: &ReachGraph, classes: &[u32], correct: Option<u32>) -> Stability {
    let (comp, ncomp) = scc(g);
    let n = g.node_count();
    // Nodes grouped by component.
    let mut start = vec![0usize; ncomp + 1];
    for &c in &comp {
        start[c as usize + 1] += 1;
    }
    for c in 0..ncomp {
        start[c + 1] += start[c];
    }
    let mut fill = start.clone();
    let mut members = vec![0u32; n];
    for (v, &c) in comp.iter().enumerate() {
        members[fill[c as usize]] = v as u32;
        fill[c as usize] += 1;
    }

    let mut comp_stable = vec![false; ncomp];
    let mut comp_good = vec![false; ncomp];
    let mut comp_class = vec![UNDEFINED_CLASS; ncomp];
    for c in 0..ncomp {
        let nodes = &members[start[c]..start[c + 1]];
        let class = classes[nodes[0] as usize];
        let mut stable = class != UNDEFINED_CLASS;
        let mut good = false;
        for &v in nodes {
            let v = v as usize;
            if classes[v] != class {
                stable = false;
            }
            for (_, w) in g.successors(v) {
                let d = comp[w] as usize;
                if d == c {
                    continue;
                }
                if !(comp_stable[d] && comp_class[d] == class) {
                    stable = false;
                }
                good |= comp_good[d];
            }
        }
        comp_stable[c] = stable;
        comp_class[c] = class;
        comp_good[c] = good || (stable && Some(class) == correct);
    }
    Stability {
        stable: comp.iter().map(|&c| comp_stable[c as usize]).collect(),
        good: comp.iter().map(|&c| comp_good[c as usize]).collect(),
    }
}

/// Configurations of `g` whose forward closure keeps the output counts of
/// `crc` fixed.
pub fn output_stable_set(g: &ReachGraph, crc: &Crc) -> Vec<Configuration> {
    let classes = output_classes(g, crc.outputs(), &mut HashMap::new());
    let st = stability(g, &classes, None);
    (0..g.node_count())
        .filter(|&i| st.stable[i])
        .map(|i| g.configuration(i))
        .collect()
}

fn output_classes(g: &ReachGraph, outputs: &[usize], intern: &mut HashMap<Vec<u64>, u32>) -> Vec<u32> {
    let mut buf = Vec::new();
    (0..g.node_count())
        .map(|i| {
            g.counts_into(i, &mut buf);
            let key: Vec<u64> = outputs.iter().map(|&s| buf[s]).collect();
            let next = intern.len() as u32;
            *intern.entry(key).or_insert(next)
        })
        .collect()
}

fn vote_classes(g: &ReachGraph, crd: &Crd) -> Vec<u32> {
    (0..g.node_count())
        .map(|i| match crd.vote(&g.configuration(i)) {
            Vote::Yes => 1,
            Vote::No => 0,
            Vote::Undefined => UNDEFINED_CLASS,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailReason {
    #[serde(rename = "wrong-stable-output-reachable")]
    WrongStableOutputReachable,
    #[serde(rename = "correct-stable-unreachable")]
    CorrectStableUnreachable,
}

impl FailReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FailReason::WrongStableOutputReachable => "wrong-stable-output-reachable",
            FailReason::CorrectStableUnreachable => "correct-stable-unreachable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub input: Vec<u64>,
    pub reason: FailReason,
    /// Nonzero counts of the offending configuration.
    pub configuration: BTreeMap<String, u64>,
    /// Reaction indices leading from the initial configuration to it.
    pub trace: Vec<usize>,
    /// Expected output (counts or vote) at this input.
    pub expected: String,
    /// Output of the offending configuration.
    pub observed: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputStats {
    pub input: Vec<u64>,
    pub nodes: usize,
    pub edges: usize,
    pub depth: usize,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub verdict: Verdict,
    pub counterexample: Option<Counterexample>,
    pub skipped: Vec<Vec<u64>>,
    pub stats: Vec<InputStats>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn max_nodes(&self) -> usize {
        self.stats.iter().map(|s| s.nodes).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable summary; reaction indices in a trace are shown with
    /// their reactions when `crn` is given.
    pub fn render_text(&self, crn: Option<&Crn>) -> String {
        let mut out = String::new();
        let edges = self.stats.iter().map(|s| s.edges).max().unwrap_or(0);
        match &self.counterexample {
            None => {
                let _ = writeln!(
                    out,
                    "PASS: {} inputs certified (largest state space {} nodes, {} edges)",
                    self.stats.len(),
                    self.max_nodes(),
                    edges
                );
            }
            Some(cx) => {
                let _ = writeln!(out, "FAIL at input {:?}: {}", cx.input, cx.reason.as_str());
                let conf: Vec<String> = cx.configuration.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(out, "  configuration: {}", if conf.is_empty() { "0".into() } else { conf.join(" ") });
                let _ = writeln!(out, "  expected {}, observed {}", cx.expected, cx.observed);
                let _ = writeln!(out, "  trace ({} steps):", cx.trace.len());
                for &r in &cx.trace {
                    match crn {
                        Some(crn) => {
                            let _ = writeln!(out, "    {r}: {}", crn.display_reaction(&crn.reactions()[r]));
                        }
                        None => {
                            let _ = writeln!(out, "    {r}");
                        }
                    }
                }
            }
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out, "skipped {} inputs where the oracle is undefined", self.skipped.len());
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub cap: usize,
    /// Skip inputs where the oracle is undefined instead of failing.
    pub allow_partial: bool,
    /// Explore the graph with eager reactions fired (same verdicts, fewer
    /// nodes).
    pub reduce: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: DEFAULT_CAP,
            allow_partial: false,
            reduce: true,
        }
    }
}

enum Outcome {
    Checked(InputStats, Option<Counterexample>),
    Skipped(Vec<u64>),
}

fn named(crn: &Crn, c: &Configuration) -> BTreeMap<String, u64> {
    c.counts()
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(s, &n)| (crn.name(s).to_string(), n))
        .collect()
}

fn judge(
    crn: &Crn,
    x: &[u64],
    g: &ReachGraph,
    classes: &[u32],
    correct: Option<u32>,
    expected: String,
    show: &dyn Fn(u32) -> String,
) -> Option<Counterexample> {
    let st = stability(g, classes, correct);
    let make = |node: usize, reason| Counterexample {
        input: x.to_vec(),
        reason,
        configuration: named(crn, &g.configuration(node)),
        trace: g.trace_to(crn, node),
        expected: expected.clone(),
        observed: show(classes[node]),
    };
    if let Some(node) = (0..g.node_count()).find(|&i| st.stable[i] && Some(classes[i]) != correct) {
        return Some(make(node, FailReason::WrongStableOutputReachable));
    }
    (0..g.node_count())
        .find(|&i| !st.good[i])
        .map(|node| make(node, FailReason::CorrectStableUnreachable))
}

fn collect(outcomes: Vec<Result<Outcome, VerifyError>>) -> Result<VerifyReport, VerifyError> {
    let mut report = VerifyReport {
        verdict: Verdict::Pass,
        counterexample: None,
        skipped: Vec::new(),
        stats: Vec::new(),
    };
    for o in outcomes {
        match o? {
            Outcome::Skipped(x) => report.skipped.push(x),
            Outcome::Checked(stats, cx) => {
                report.stats.push(stats);
                if report.counterexample.is_none() {
                    if let Some(cx) = cx {
                        report.verdict = Verdict::Fail;
                        report.counterexample = Some(cx);
                    }
                }
            }
        }
    }
    Ok(report)
}

fn fmt_counts(v: &[u64]) -> String {
    format!("{v:?}")
}

/// Certifies that `crc` stably computes `oracle` on every input. Inputs are
/// explored in parallel; the reported counterexample is the first failing
/// input in iteration order.
pub fn check_stable_computation<F>(
    crc: &Crc,
    oracle: F,
    inputs: impl IntoIterator<Item = Vec<u64>>,
    opts: VerifyOptions,
) -> Result<VerifyReport, VerifyError>
where
    F: Fn(&[u64]) -> Option<Vec<u64>> + Sync,
{
    if !crc.is_bounded() {
        return Err(VerifyError::Unbounded);
    }
    let inputs: Vec<Vec<u64>> = inputs.into_iter().collect();
    let eager = if opts.reduce { eager_reactions(crc.crn(), crc.outputs()) } else { Vec::new() };
    let outcomes = inputs
        .par_iter()
        .map(|x| {
            let Some(want) = oracle(x) else {
                return if opts.allow_partial {
                    Ok(Outcome::Skipped(x.clone()))
                } else {
                    Err(VerifyError::OracleUndefined(x.clone()))
                };
            };
            let t0 = Instant::now();
            let init = crc.initial_configuration(x)?;
            let g = reachable_set_reduced(crc.crn(), &init, opts.cap, &eager)?;
            let mut intern = HashMap::new();
            let classes = output_classes(&g, crc.outputs(), &mut intern);
            let correct = intern.get(&want).copied();
            let by_class: HashMap<u32, Vec<u64>> = intern.iter().map(|(k, &v)| (v, k.clone())).collect();
            let show = |c: u32| by_class.get(&c).map_or_else(|| "?".into(), |v| fmt_counts(v));
            let cx = judge(crc.crn(), x, &g, &classes, correct, fmt_counts(&want), &show);
            Ok(Outcome::Checked(
                InputStats {
                    input: x.clone(),
                    nodes: g.node_count(),
                    edges: g.edge_count(),
                    depth: g.depth(),
                    elapsed: t0.elapsed(),
                },
                cx,
            ))
        })
        .collect();
    collect(outcomes)
}

/// Certifies that `crd` stably decides `predicate` on every input.
pub fn check_stable_decision<F>(
    crd: &Crd,
    predicate: F,
    inputs: impl IntoIterator<Item = Vec<u64>>,
    opts: VerifyOptions,
) -> Result<VerifyReport, VerifyError>
where
    F: Fn(&[u64]) -> Option<bool> + Sync,
{
    let inputs: Vec<Vec<u64>> = inputs.into_iter().collect();
    let voters: Vec<usize> = crd.voters().iter().map(|&(s, _)| s).collect();
    let eager = if opts.reduce { eager_reactions(crd.crn(), &voters) } else { Vec::new() };
    let outcomes = inputs
        .par_iter()
        .map(|x| {
            let Some(want) = predicate(x) else {
                return if opts.allow_partial {
                    Ok(Outcome::Skipped(x.clone()))
                } else {
                    Err(VerifyError::OracleUndefined(x.clone()))
                };
            };
            let t0 = Instant::now();
            let init = crd.initial_configuration(x)?;
            let g = reachable_set_reduced(crd.crn(), &init, opts.cap, &eager)?;
            let classes = vote_classes(&g, crd);
            let show = |c: u32| match c {
                1 => "yes".to_string(),
                0 => "no".to_string(),
                _ => "undefined".to_string(),
            };
            let cx = judge(crd.crn(), x, &g, &classes, Some(want as u32), show(want as u32), &show);
            Ok(Outcome::Checked(
                InputStats {
                    input: x.clone(),
                    nodes: g.node_count(),
                    edges: g.edge_count(),
                    depth: g.depth(),
                    elapsed: t0.elapsed(),
                },
                cx,
            ))
        })
        .collect();
    collect(outcomes)
}

/// Applies a trace of reaction indices from `init`.
pub fn replay(crn: &Crn, init: &Configuration, trace: &[usize]) -> Result<Configuration, CrnError> {
    trace
        .iter()
        .try_fold(init.clone(), |c, &r| apply(&c, &crn.reactions()[r]))
}

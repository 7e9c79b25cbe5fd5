//! Height-balanced straight-line programs over symbol strings.
//!
//! A grammar is a Chomsky-normal-form SLP whose parse tree satisfies the AVL
//! balance condition (child heights differ by at most one; terminals have
//! height 1). Productions live in an append-only pool shared by every
//! grammar derived from it, so concatenate and split mint only the new
//! productions along the rebalanced spine and `size` is the count of
//! productions reachable from a root.
//!
//! `build` folds over the C-factorization of the input: a fresh letter adds
//! one terminal, a referencing factor is assembled by extracting the
//! balanced subtrees covering its previous occurrence and joining them.

use crate::constants::{AVL_HEIGHT_OFFSET, AVL_HEIGHT_SLOPE};
use crate::strings::{factorize_cn, SymbolString};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

pub type NodeId = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GrammarError {
    #[error("cannot build a grammar for the empty string")]
    EmptyString,
    #[error("split position {position} out of range 1..={length}")]
    SplitOutOfRange { position: u64, length: u64 },
    #[error("range [{from}..{to}] out of bounds for expansion length {length}")]
    RangeOutOfBounds { from: u64, to: u64, length: u64 },
    #[error("bad grammar file: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Invalid(ValidationReport),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProdKind {
    Terminal(u32),
    Binary(NodeId, NodeId),
}

/// One production with cached expansion length and parse-tree height.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Production {
    pub kind: ProdKind,
    pub exp_len: u64,
    pub height: u32,
}

/// Handle to a grammar rooted in a [`GrammarPool`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AvlGrammar {
    pub root: NodeId,
}

/// Append-only production pool. Children always have smaller ids than their
/// parents, which makes reachable subgraphs acyclic by construction.
#[derive(Clone, Debug, Default)]
pub struct GrammarPool {
    prods: Vec<Production>,
}

impl GrammarPool {
    pub fn new() -> Self {
        GrammarPool::default()
    }

    /// Total number of productions ever minted in this pool.
    pub fn minted(&self) -> usize {
        self.prods.len()
    }

    pub fn production(&self, id: NodeId) -> &Production {
        &self.prods[id as usize]
    }

    pub fn expansion_len(&self, g: AvlGrammar) -> u64 {
        self.prods[g.root as usize].exp_len
    }

    pub fn height(&self, g: AvlGrammar) -> u32 {
        self.prods[g.root as usize].height
    }

    fn h(&self, id: NodeId) -> u32 {
        self.prods[id as usize].height
    }

    fn len_of(&self, id: NodeId) -> u64 {
        self.prods[id as usize].exp_len
    }

    fn children(&self, id: NodeId) -> (NodeId, NodeId) {
        match self.prods[id as usize].kind {
            ProdKind::Binary(l, r) => (l, r),
            ProdKind::Terminal(_) => panic!("terminal production has no children"),
        }
    }

    pub fn terminal(&mut self, symbol: u32) -> NodeId {
        self.mint(ProdKind::Terminal(symbol), 1, 1)
    }

    /// Adds one binary production verbatim; the children must already be
    /// height-balanced against each other. Used to transplant a grammar
    /// between pools without restructuring it.
    pub fn binary(&mut self, left: NodeId, right: NodeId) -> NodeId {
        self.node(left, right)
    }

    fn node(&mut self, left: NodeId, right: NodeId) -> NodeId {
        let exp_len = self.len_of(left) + self.len_of(right);
        let height = 1 + self.h(left).max(self.h(right));
        debug_assert!(self.h(left).abs_diff(self.h(right)) <= 1);
        self.mint(ProdKind::Binary(left, right), exp_len, height)
    }

    fn mint(&mut self, kind: ProdKind, exp_len: u64, height: u32) -> NodeId {
        let id = self.prods.len() as NodeId;
        self.prods.push(Production {
            kind,
            exp_len,
            height,
        });
        id
    }

    /// Joins two grammars into one expanding to the concatenation, restoring
    /// balance with O(|h1 - h2|) new productions.
    pub fn concat(&mut self, a: AvlGrammar, b: AvlGrammar) -> AvlGrammar {
        AvlGrammar {
            root: self.join(a.root, b.root),
        }
    }

    fn join(&mut self, l: NodeId, r: NodeId) -> NodeId {
        let (hl, hr) = (self.h(l), self.h(r));
        if hl.abs_diff(hr) <= 1 {
            self.node(l, r)
        } else if hl > hr {
            self.join_right(l, r)
        } else {
            self.join_left(l, r)
        }
    }

    /// h(l) >= h(r) + 2: descend the right spine of `l`.
    fn join_right(&mut self, l: NodeId, r: NodeId) -> NodeId {
        let (a, c) = self.children(l);
        let t = if self.h(c) <= self.h(r) + 1 {
            self.node(c, r)
        } else {
            self.join_right(c, r)
        };
        self.rebalance(a, t)
    }

    /// h(r) >= h(l) + 2: descend the left spine of `r`.
    fn join_left(&mut self, l: NodeId, r: NodeId) -> NodeId {
        let (a, c) = self.children(r);
        let t = if self.h(a) <= self.h(l) + 1 {
            self.node(l, a)
        } else {
            self.join_left(l, a)
        };
        self.rebalance_left(t, c)
    }

    /// Combines `a` with a possibly one-taller-than-allowed right subtree.
    fn rebalance(&mut self, a: NodeId, t: NodeId) -> NodeId {
        if self.h(t) <= self.h(a) + 1 {
            return self.node(a, t);
        }
        // h(t) = h(a) + 2; one single or double rotation restores balance.
        let (x, y) = self.children(t);
        if self.h(x) <= self.h(y) {
            let left = self.node(a, x);
            self.node(left, y)
        } else {
            let (x1, x2) = self.children(x);
            let left = self.node(a, x1);
            let right = self.node(x2, y);
            self.node(left, right)
        }
    }

    fn rebalance_left(&mut self, t: NodeId, c: NodeId) -> NodeId {
        if self.h(t) <= self.h(c) + 1 {
            return self.node(t, c);
        }
        let (x, y) = self.children(t);
        if self.h(y) <= self.h(x) {
            let right = self.node(y, c);
            self.node(x, right)
        } else {
            let (y1, y2) = self.children(y);
            let left = self.node(x, y1);
            let right = self.node(y2, c);
            self.node(left, right)
        }
    }

    /// Splits into the grammars of the first `prefix_len` symbols and the
    /// rest. Either side may come back `None` when empty.
    pub fn split_at(
        &mut self,
        g: AvlGrammar,
        prefix_len: u64,
    ) -> Result<(Option<AvlGrammar>, Option<AvlGrammar>), GrammarError> {
        let total = self.expansion_len(g);
        if prefix_len > total {
            return Err(GrammarError::SplitOutOfRange {
                position: prefix_len,
                length: total,
            });
        }
        if prefix_len == 0 {
            return Ok((None, Some(g)));
        }
        if prefix_len == total {
            return Ok((Some(g), None));
        }
        let (l, r) = self.split_node(g.root, prefix_len);
        Ok((
            Some(AvlGrammar { root: l }),
            Some(AvlGrammar { root: r }),
        ))
    }

    /// 0 < k < len(id); returns grammars for the first k symbols and the rest.
    fn split_node(&mut self, id: NodeId, k: u64) -> (NodeId, NodeId) {
        let (l, r) = self.children(id);
        let ll = self.len_of(l);
        if k == ll {
            (l, r)
        } else if k < ll {
            let (pl, pr) = self.split_node(l, k);
            let suffix = self.join(pr, r);
            (pl, suffix)
        } else {
            let (pl, pr) = self.split_node(r, k - ll);
            let prefix = self.join(l, pl);
            (prefix, pr)
        }
    }

    /// Builds the grammar for `s` by folding over its C-factorization.
    pub fn build(&mut self, s: &SymbolString) -> Result<AvlGrammar, GrammarError> {
        if s.is_empty() {
            return Err(GrammarError::EmptyString);
        }
        let cn = factorize_cn(s);
        let mut root: Option<NodeId> = None;
        for f in &cn.factors {
            let piece = if f.source == 0 {
                self.terminal(f.last_symbol)
            } else {
                let prefix = root.expect("referencing factor must follow a prefix");
                let from = (f.source - 1) as u64;
                let mut parts = Vec::new();
                self.collect_cover(prefix, from, from + f.length as u64, &mut parts);
                let mut acc = parts[0];
                for &p in &parts[1..] {
                    acc = self.join(acc, p);
                }
                acc
            };
            root = Some(match root {
                None => piece,
                Some(g) => self.join(g, piece),
            });
        }
        Ok(AvlGrammar {
            root: root.expect("nonempty string"),
        })
    }

    /// Collects the canonical balanced subtrees covering [from, to) of the
    /// expansion of `id`, left to right. Fully covered nodes are taken whole,
    /// so the list has at most 2*height entries and mints nothing.
    fn collect_cover(&self, id: NodeId, from: u64, to: u64, out: &mut Vec<NodeId>) {
        debug_assert!(from < to && to <= self.len_of(id));
        if from == 0 && to == self.len_of(id) {
            out.push(id);
            return;
        }
        let (l, r) = self.children(id);
        let ll = self.len_of(l);
        if to <= ll {
            self.collect_cover(l, from, to, out);
        } else if from >= ll {
            self.collect_cover(r, from - ll, to - ll, out);
        } else {
            self.collect_cover(l, from, ll, out);
            self.collect_cover(r, 0, to - ll, out);
        }
    }

    pub fn expand(&self, g: AvlGrammar) -> SymbolString {
        let mut out = Vec::with_capacity(self.expansion_len(g) as usize);
        let mut stack = vec![g.root];
        while let Some(id) = stack.pop() {
            match self.prods[id as usize].kind {
                ProdKind::Terminal(sym) => out.push(sym),
                ProdKind::Binary(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        SymbolString::from_raw(out)
    }

    /// Expands positions `from..=to` (1-based, inclusive).
    pub fn expand_range(
        &self,
        g: AvlGrammar,
        from: u64,
        to: u64,
    ) -> Result<SymbolString, GrammarError> {
        let total = self.expansion_len(g);
        if from == 0 || from > to || to > total {
            return Err(GrammarError::RangeOutOfBounds {
                from,
                to,
                length: total,
            });
        }
        let mut out = Vec::with_capacity((to - from + 1) as usize);
        self.expand_into(g.root, from - 1, to, &mut out);
        Ok(SymbolString::from_raw(out))
    }

    fn expand_into(&self, id: NodeId, from: u64, to: u64, out: &mut Vec<u32>) {
        match self.prods[id as usize].kind {
            ProdKind::Terminal(sym) => out.push(sym),
            ProdKind::Binary(l, r) => {
                let ll = self.len_of(l);
                if from < ll {
                    self.expand_into(l, from, to.min(ll), out);
                }
                if to > ll {
                    self.expand_into(r, from.saturating_sub(ll), to - ll, out);
                }
            }
        }
    }

    /// Count of productions reachable from the root.
    pub fn reachable_size(&self, g: AvlGrammar) -> usize {
        let mut seen = vec![false; self.prods.len()];
        let mut stack = vec![g.root];
        let mut count = 0usize;
        while let Some(id) = stack.pop() {
            if seen[id as usize] {
                continue;
            }
            seen[id as usize] = true;
            count += 1;
            if let ProdKind::Binary(l, r) = self.prods[id as usize].kind {
                stack.push(l);
                stack.push(r);
            }
        }
        count
    }

    /// Checks every structural invariant of the reachable subgraph.
    pub fn validate(&self, g: AvlGrammar) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen = vec![false; self.prods.len()];
        let mut stack = vec![g.root];
        let mut reachable = 0usize;
        while let Some(id) = stack.pop() {
            if seen[id as usize] {
                continue;
            }
            seen[id as usize] = true;
            reachable += 1;
            let prod = &self.prods[id as usize];
            match prod.kind {
                ProdKind::Terminal(_) => {
                    if prod.exp_len != 1 {
                        violations.push(Violation::CachedLength { id, got: prod.exp_len, want: 1 });
                    }
                    if prod.height != 1 {
                        violations.push(Violation::CachedHeight { id, got: prod.height, want: 1 });
                    }
                }
                ProdKind::Binary(l, r) => {
                    if l >= id || r >= id {
                        violations.push(Violation::Cycle { id });
                        continue;
                    }
                    let (lp, rp) = (&self.prods[l as usize], &self.prods[r as usize]);
                    let want_len = lp.exp_len + rp.exp_len;
                    if prod.exp_len != want_len {
                        violations.push(Violation::CachedLength { id, got: prod.exp_len, want: want_len });
                    }
                    let want_height = 1 + lp.height.max(rp.height);
                    if prod.height != want_height {
                        violations.push(Violation::CachedHeight { id, got: prod.height, want: want_height });
                    }
                    if lp.height.abs_diff(rp.height) > 1 {
                        violations.push(Violation::Unbalanced {
                            id,
                            left: lp.height,
                            right: rp.height,
                        });
                    }
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        let root = &self.prods[g.root as usize];
        let bound = AVL_HEIGHT_SLOPE * ((root.exp_len + 2) as f64).log2() + AVL_HEIGHT_OFFSET;
        if (root.height as f64) > bound {
            violations.push(Violation::HeightBound {
                height: root.height,
                len: root.exp_len,
            });
        }
        ValidationReport {
            reachable,
            violations,
        }
    }

    /// Dump format: one production per line, `id T <symbol>` or
    /// `id B <leftId> <rightId>`, final line `root <id>`. Reachable
    /// productions are renumbered densely in mint order, so structurally
    /// identical grammars dump identically regardless of pool history.
    pub fn export(&self, g: AvlGrammar) -> String {
        let mut seen = vec![false; self.prods.len()];
        let mut ids = Vec::new();
        let mut stack = vec![g.root];
        while let Some(id) = stack.pop() {
            if seen[id as usize] {
                continue;
            }
            seen[id as usize] = true;
            ids.push(id);
            if let ProdKind::Binary(l, r) = self.prods[id as usize].kind {
                stack.push(l);
                stack.push(r);
            }
        }
        ids.sort_unstable();
        let mut dense = HashMap::with_capacity(ids.len());
        for (i, &id) in ids.iter().enumerate() {
            dense.insert(id, i);
        }
        let mut out = String::new();
        for (i, &id) in ids.iter().enumerate() {
            match self.prods[id as usize].kind {
                ProdKind::Terminal(sym) => out.push_str(&format!("{i} T {sym}\n")),
                ProdKind::Binary(l, r) => {
                    out.push_str(&format!("{i} B {} {}\n", dense[&l], dense[&r]))
                }
            }
        }
        out.push_str(&format!("root {}\n", dense[&g.root]));
        out
    }

    /// Imports a dump, remapping ids into a fresh pool and recomputing the
    /// caches; the result is validated before being returned.
    pub fn import(text: &str) -> Result<(GrammarPool, AvlGrammar), GrammarError> {
        #[derive(Clone, Copy)]
        enum RawKind {
            T(u32),
            B(u64, u64),
        }
        let mut raw: Vec<(u64, RawKind)> = Vec::new();
        let mut root: Option<u64> = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| GrammarError::Parse(format!("line {}: {msg}", lineno + 1));
            match fields.as_slice() {
                ["root", id] => {
                    root = Some(id.parse().map_err(|_| bad("bad root id"))?);
                }
                [id, "T", sym] => raw.push((
                    id.parse().map_err(|_| bad("bad id"))?,
                    RawKind::T(sym.parse().map_err(|_| bad("bad symbol"))?),
                )),
                [id, "B", l, r] => raw.push((
                    id.parse().map_err(|_| bad("bad id"))?,
                    RawKind::B(
                        l.parse().map_err(|_| bad("bad left id"))?,
                        r.parse().map_err(|_| bad("bad right id"))?,
                    ),
                )),
                _ => return Err(bad("expected `id T <sym>`, `id B <l> <r>` or `root <id>`")),
            }
        }
        let root = root.ok_or_else(|| GrammarError::Parse("missing root line".into()))?;
        raw.sort_by_key(|(id, _)| *id);
        let mut map: HashMap<u64, NodeId> = HashMap::new();
        let mut pool = GrammarPool::new();
        for (orig, kind) in raw {
            if map.contains_key(&orig) {
                return Err(GrammarError::Parse(format!("duplicate id {orig}")));
            }
            let id = match kind {
                RawKind::T(sym) => pool.terminal(sym),
                RawKind::B(l, r) => {
                    let (&l, &r) = (
                        map.get(&l).ok_or_else(|| {
                            GrammarError::Parse(format!("production {orig} references unknown id {l}"))
                        })?,
                        map.get(&r).ok_or_else(|| {
                            GrammarError::Parse(format!("production {orig} references unknown id {r}"))
                        })?,
                    );
                    let exp_len = pool.len_of(l) + pool.len_of(r);
                    let height = 1 + pool.h(l).max(pool.h(r));
                    pool.mint(ProdKind::Binary(l, r), exp_len, height)
                }
            };
            map.insert(orig, id);
        }
        let root = *map
            .get(&root)
            .ok_or_else(|| GrammarError::Parse(format!("unknown root id {root}")))?;
        let g = AvlGrammar { root };
        let report = pool.validate(g);
        if !report.is_ok() {
            return Err(GrammarError::Invalid(report));
        }
        Ok((pool, g))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    CachedLength { id: NodeId, got: u64, want: u64 },
    CachedHeight { id: NodeId, got: u32, want: u32 },
    Unbalanced { id: NodeId, left: u32, right: u32 },
    Cycle { id: NodeId },
    HeightBound { height: u32, len: u64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CachedLength { id, got, want } => {
                write!(f, "production {id}: cached length {got}, recomputed {want}")
            }
            Violation::CachedHeight { id, got, want } => {
                write!(f, "production {id}: cached height {got}, recomputed {want}")
            }
            Violation::Unbalanced { id, left, right } => {
                write!(f, "production {id}: child heights {left}/{right} differ by more than 1")
            }
            Violation::Cycle { id } => write!(f, "production {id}: child id not smaller than parent"),
            Violation::HeightBound { height, len } => {
                write!(f, "root height {height} exceeds AVL bound for length {len}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub reachable: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            write!(f, "ok ({} reachable productions)", self.reachable)
        } else {
            writeln!(f, "{} violations:", self.violations.len())?;
            for v in &self.violations {
                writeln!(f,"  {v}")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{C_BUILD, C_CAT};
    use crate::strings::SymbolString;

    fn text(t: &str) -> SymbolString {
        SymbolString::from_text(t)
    }

    #[test]
    fn single_symbol() {
        let mut pool = GrammarPool::new();
        let g = pool.build(&text("a")).unwrap();
        assert_eq!(pool.reachable_size(g), 1);
        assert_eq!(pool.expand(g), text("a"));
    }

    #[test]
    fn empty_string_rejected() {
        let mut pool = GrammarPool::new();
        assert_eq!(pool.build(&text("")), Err(GrammarError::EmptyString));
    }

    #[test]
    fn worked_example_round_trip_and_size() {
        let s = text(crate::strings::tests::EXAMPLE);
        let mut pool = GrammarPool::new();
        let g = pool.build(&s).unwrap();
        assert_eq!(pool.expand(g), s);
        let bound = C_BUILD * 8.0 * ((s.len() + 1) as f64).log2().ceil();
        assert!((pool.reachable_size(g) as f64) <= bound);
        assert!(pool.validate(g).is_ok());
    }

    #[test]
    fn concat_basics() {
        let mut pool = GrammarPool::new();
        let a = pool.build(&text("a")).unwrap();
        let b = pool.build(&text("b")).unwrap();
        let ab = pool.concat(a, b);
        assert_eq!(pool.expand(ab), text("ab"));
        assert!((pool.reachable_size(ab) as f64) <= 3.0 + C_CAT);

        // Expansion is associative.
        let c = pool.build(&text("c")).unwrap();
        let left = pool.concat(ab, c);
        let bc = pool.concat(b, c);
        let right = pool.concat(a, bc);
        assert_eq!(pool.expand(left), pool.expand(right));
        assert_eq!(pool.expand(left), text("abc"));
    }

    #[test]
    fn split_two_symbols() {
        let mut pool = GrammarPool::new();
        let g = pool.build(&text("ab")).unwrap();
        let (p, s) = pool.split_at(g, 1).unwrap();
        assert_eq!(pool.expand(p.unwrap()), text("a"));
        assert_eq!(pool.expand(s.unwrap()), text("b"));
    }

    #[test]
    fn split_edges() {
        let mut pool = GrammarPool::new();
        let g = pool.build(&text("abcabc")).unwrap();
        let (p, s) = pool.split_at(g, 0).unwrap();
        assert!(p.is_none());
        assert_eq!(s.unwrap(), g);
        let (p, s) = pool.split_at(g, 6).unwrap();
        assert_eq!(p.unwrap(), g);
        assert!(s.is_none());
        assert!(matches!(
            pool.split_at(g, 7),
            Err(GrammarError::SplitOutOfRange { .. })
        ));
    }

    #[test]
    fn expand_range_matches_direct_indexing() {
        let s = text("abaababaabaabaabaabaabb");
        let mut pool = GrammarPool::new();
        let g = pool.build(&s).unwrap();
        let n = s.len() as u64;
        assert_eq!(pool.expand_range(g, 1, n).unwrap(), pool.expand(g));
        for i in 1..=n {
            let sym = pool.expand_range(g, i, i).unwrap();
            assert_eq!(sym.symbols(), &s.symbols()[(i - 1) as usize..i as usize]);
        }
        assert!(pool.expand_range(g, 0, 1).is_err());
        assert!(pool.expand_range(g, 5, n + 1).is_err());
    }

    #[test]
    fn random_build_split_concat_stay_valid() {
        let mut state = 999u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (state >> 33) as u32
        };
        for round in 0..100 {
            let n = 2 + (next() as usize % 120);
            let sigma = 1 + next() % 4;
            let s = SymbolString::from_symbols((0..n).map(|_| next() % sigma).collect()).unwrap();
            let mut pool = GrammarPool::new();
            let g = pool.build(&s).unwrap();
            assert_eq!(pool.expand(g), s, "round {round}");
            assert!(pool.validate(g).is_ok());
            let expected = s.symbols();

            // Every suffix comes back exactly.
            for i in 1..=n {
                let mut pool = pool.clone();
                let (_, suf) = pool.split_at(g, (i - 1) as u64).unwrap();
                let suf = suf.unwrap();
                assert_eq!(pool.expand(suf).symbols(), &expected[i - 1..], "round {round} i={i}");
            }

            let k = (next() as u64) % (n as u64 + 1);
            let (p, suf) = pool.split_at(g, k).unwrap();
            if let Some(p) = p {
                assert!(pool.validate(p).is_ok());
                assert_eq!(pool.expand(p).symbols(), &expected[..k as usize]);
            }
            if let Some(suf) = suf {
                assert!(pool.validate(suf).is_ok());
                assert_eq!(pool.expand(suf).symbols(), &expected[k as usize..]);
            }
            if let (Some(p), Some(suf)) = (p, suf) {
                let joined = pool.concat(p, suf);
                assert!(pool.validate(joined).is_ok());
                assert_eq!(pool.expand(joined), s);
            }
        }
    }

    #[test]
    fn export_import_round_trip() {
        let s = text("abaababaabaabaabaabaabb");
        let mut pool = GrammarPool::new();
        let g = pool.build(&s).unwrap();
        let dump = pool.export(g);
        let (pool2, g2) = GrammarPool::import(&dump).unwrap();
        assert_eq!(pool2.expand(g2), s);
        assert_eq!(pool2.reachable_size(g2), pool.reachable_size(g));
    }

    #[test]
    fn corrupted_height_fails_validation() {
        let s = text("abaabab");
        let mut pool = GrammarPool::new();
        let g = pool.build(&s).unwrap();
        let mut bad = pool.clone();
        bad.prods[g.root as usize].height += 1;
        let report = bad.validate(g);
        assert!(!report.is_ok());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CachedHeight { .. })));
    }
}

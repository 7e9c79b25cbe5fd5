//! Suffix-array index answering longest-previous-match queries.
//!
//! Built once per factorization call: suffix array by prefix doubling with
//! radix passes, LCP array via Kasai, and two sparse tables (range-min over
//! the LCP array and over suffix start positions). A match query binary
//! searches the match length; every candidate length is checked by locating
//! the suffix-array interval whose pairwise LCP reaches that length and
//! taking the minimum start position inside it, which is also exactly the
//! leftmost tie-breaking source.

pub(crate) struct SuffixIndex {
    n: usize,
    sa: Vec<u32>,
    rank: Vec<u32>,
    lcp_rmq: SparseMin,
    pos_rmq: SparseMin,
}

impl SuffixIndex {
    pub fn build(text: &[u32]) -> Self {
        let n = text.len();
        assert!(n > 0);
        let sa = suffix_array(text);
        let mut rank = vec![0u32; n];
        for (r, &p) in sa.iter().enumerate() {
            rank[p as usize] = r as u32;
        }
        let lcp = kasai(text, &sa, &rank);
        SuffixIndex::from_arrays(sa, lcp, rank)
    }

    fn from_arrays(sa: Vec<u32>, lcp: Vec<u32>, rank: Vec<u32>) -> Self {
        SuffixIndex {
            n: sa.len(),
            lcp_rmq: SparseMin::build(&lcp),
            pos_rmq: SparseMin::build(&sa),
            sa,
            rank,
        }
    }

    /// Index of the suffix text starting at `offset` (0 < remaining length),
    /// derived without re-sorting: the suffixes of a suffix are the
    /// suffixes of the whole string that start at or after `offset`, in the
    /// same order, and their pairwise lcps are range-minima of the full lcp
    /// array over the skipped entries.
    pub fn suffix_view(&self, offset: usize) -> SuffixIndex {
        assert!(offset < self.n);
        let m = self.n - offset;
        let mut sa = Vec::with_capacity(m);
        let mut lcp = Vec::with_capacity(m);
        let mut prev_rank: Option<usize> = None;
        for r in 0..self.n {
            let p = self.sa[r] as usize;
            if p < offset {
                continue;
            }
            lcp.push(match prev_rank {
                None => 0,
                Some(pr) => self.lcp_rmq.query(pr + 1, r),
            });
            sa.push((p - offset) as u32);
            prev_rank = Some(r);
        }
        let mut rank = vec![0u32; m];
        for (r, &p) in sa.iter().enumerate() {
            rank[p as usize] = r as u32;
        }
        SuffixIndex::from_arrays(sa, lcp, rank)
    }

    /// Longest match for the factor starting at `u` whose source occurrence
    /// ends strictly before `u`, with the leftmost source; `None` if no
    /// previous occurrence of `text[u]` fits.
    pub fn best_nonoverlapping_match(&self, u: usize) -> Option<(usize, usize)> {
        // L is capped by the window (source + L <= u) and the remainder.
        let cap = u.min(self.n - u);
        self.best_match(u, cap, |min_pos, len| min_pos + len <= u)
    }

    /// Longest match whose source starts before `u` but may overlap the
    /// factor, with the leftmost source.
    pub fn best_overlapping_match(&self, u: usize) -> Option<(usize, usize)> {
        let cap = self.n - u;
        self.best_match(u, cap, |min_pos, _| min_pos < u)
    }

    fn best_match(
        &self,
        u: usize,
        cap: usize,
        admissible: impl Fn(usize, usize) -> bool,
    ) -> Option<(usize, usize)> {
        if u == 0 || cap == 0 {
            return None;
        }
        let r = self.rank[u] as usize;
        let probe = |len: usize| -> Option<usize> {
            let (lo, hi) = self.interval_with_lcp(r, len);
            let min_pos = self.pos_rmq.query(lo, hi) as usize;
            admissible(min_pos, len).then_some(min_pos)
        };
        let mut best_src = probe(1)?;
        let mut best_len = 1usize;
        let mut hi = cap; // best_len admissible, everything above hi is not
        while best_len < hi {
            let mid = best_len + (hi - best_len).div_ceil(2);
            match probe(mid) {
                Some(src) => {
                    best_len = mid;
                    best_src = src;
                }
                None => hi = mid - 1,
            }
        }
        Some((best_len, best_src))
    }

    /// Maximal suffix-array interval around rank `r` whose suffixes share a
    /// prefix of at least `len` symbols.
    fn interval_with_lcp(&self, r: usize, len: usize) -> (usize, usize) {
        let len = len as u32;
        // Largest interval [lo, r] with min lcp[lo+1..=r] >= len.
        let mut lo = r;
        if r > 0 && self.lcp_rmq.query(r, r) >= len {
            // At least r-1 qualifies; find the smallest lo.
            let (mut a, mut b) = (0usize, r - 1);
            while a < b {
                let mid = (a + b) / 2;
                if self.lcp_rmq.query(mid + 1, r) >= len {
                    b = mid;
                } else {
                    a = mid + 1;
                }
            }
            lo = a;
        }
        let mut hi = r;
        if r + 1 < self.n && self.lcp_rmq.query(r + 1, r + 1) >= len {
            let (mut a, mut b) = (r + 1, self.n - 1);
            while a < b {
                let mid = (a + b).div_ceil(2);
                if self.lcp_rmq.query(r + 1, mid) >= len {
                    a = mid;
                } else {
                    b = mid - 1;
                }
            }
            hi = a;
        }
        (lo, hi)
    }
}

/// Suffix array by prefix doubling; each round radix-sorts (rank, next-rank)
/// pairs with two counting passes, so the whole build is O(n log n).
fn suffix_array(text: &[u32]) -> Vec<u32> {
    let n = text.len();
    if n == 1 {
        return vec![0];
    }
    // Initial ranks by symbol value.
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_unstable_by_key(|&i| text[i as usize]);
    let mut rank = vec![0u32; n];
    let mut max_rank = 0u32;
    for w in 1..n {
        let (a, b) = (order[w - 1] as usize, order[w] as usize);
        if text[a] != text[b] {
            max_rank += 1;
        }
        rank[b] = max_rank;
    }

    let mut key2 = vec![0u32; n];
    let mut tmp = vec![0u32; n];
    let mut counts = vec![0u32; n + 2];
    let mut new_rank = vec![0u32; n];
    let mut k = 1usize;
    while (max_rank as usize) + 1 < n {
        // Second key: rank of the suffix k positions ahead, shifted by one so
        // that "past the end" sorts first.
        for i in 0..n {
            key2[i] = if i + k < n { rank[i + k] + 1 } else { 0 };
        }
        // Stable counting sort by key2, then by rank.
        radix_pass(&order, &mut tmp, &key2, max_rank as usize + 2, &mut counts);
        radix_pass(&tmp, &mut order, &rank, max_rank as usize + 1, &mut counts);

        max_rank = 0;
        new_rank[order[0] as usize] = 0;
        for w in 1..n {
            let (a, b) = (order[w - 1] as usize, order[w] as usize);
            if rank[a] != rank[b] || key2[a] != key2[b] {
                max_rank += 1;
            }
            new_rank[b] = max_rank;
        }
        std::mem::swap(&mut rank, &mut new_rank);
        k *= 2;
    }
    order
}

fn radix_pass(src: &[u32], dst: &mut [u32], key: &[u32], buckets: usize, counts: &mut [u32]) {
    let counts = &mut counts[..buckets + 1];
    counts.fill(0);
    for &i in src {
        counts[key[i as usize] as usize + 1] += 1;
    }
    for b in 1..counts.len() {
        counts[b] += counts[b - 1];
    }
    for &i in src {
        let c = &mut counts[key[i as usize] as usize];
        dst[*c as usize] = i;
        *c += 1;
    }
}

fn kasai(text: &[u32], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut lcp = vec![0u32; n];
    let mut k = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            k = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + k < n && j + k < n && text[i + k] == text[j + k] {
            k += 1;
        }
        lcp[r] = k as u32;
        k = k.saturating_sub(1);
    }
    lcp
}

/// Range-minimum sparse table over u32 values.
struct SparseMin {
    levels: Vec<Vec<u32>>,
}

impl SparseMin {
    fn build(values: &[u32]) -> Self {
        let n = values.len();
        let mut levels = vec![values.to_vec()];
        let mut span = 1usize;
        while span * 2 <= n {
            let prev = levels.last().unwrap();
            let next: Vec<u32> = (0..n - span * 2 + 1)
                .map(|i| prev[i].min(prev[i + span]))
                .collect();
            levels.push(next);
            span *= 2;
        }
        SparseMin { levels }
    }

    /// Minimum over the inclusive index range [lo, hi].
    fn query(&self, lo: usize, hi: usize) -> u32 {
        debug_assert!(lo <= hi);
        let level = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let row = &self.levels[level];
        row[lo].min(row[hi + 1 - (1 << level)])
    }
}

//! k-uniform hypergraphs: exact representation, degree queries,
//! maximum matchings by branch and bound, exhaustive enumeration,
//! and the exact minimum-degree matching threshold m_d^s(k,n).

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default ceiling on C(n,k): enumeration walks all 2^C(n,k) edge subsets.
pub const DEFAULT_ENUM_CAP: u32 = 30;

/// A k-uniform hypergraph on vertices `0..n`. Edges are stored sorted,
/// deduplicated, in lexicographic order; equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphWire {
    n: usize,
    k: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize, edges: impl IntoIterator<Item = Vec<usize>>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Validation(format!("uniformity k={k} must be >= 2")));
        }
        let mut canon = BTreeSet::new();
        for mut e in edges {
            e.sort_unstable();
            if e.len() != k {
                return Err(Error::Validation(format!(
                    "edge {e:?} has {} vertices, expected k={k}",
                    e.len()
                )));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!("edge {e:?} repeats a vertex")));
            }
            if *e.last().unwrap() >= n {
                return Err(Error::Validation(format!(
                    "edge {e:?} has a vertex out of range for n={n}"
                )));
            }
            if !canon.insert(e.clone()) {
                return Err(Error::Format(format!("duplicate edge {e:?}")));
            }
        }
        Ok(Self {
            n,
            k,
            edges: canon.into_iter().collect(),
        })
    }

    pub fn empty(n: usize, k: usize) -> Self {
        Self::new(n, k, []).expect("empty edge set is always valid")
    }

    /// Complete k-graph: all C(n,k) edges.
    pub fn complete(n: usize, k: usize) -> Self {
        Self::new(n, k, k_subsets(n, k)).expect("complete hypergraph is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// deg_H(S): number of edges containing every vertex of `S`.
    pub fn degree(&self, s: &[usize]) -> Result<usize> {
        let set: BTreeSet<usize> = s.iter().copied().collect();
        if set.len() != s.len() {
            return Err(Error::InvalidQuery(format!("query set {s:?} repeats a vertex")));
        }
        if set.len() > self.k {
            return Err(Error::InvalidQuery(format!(
                "query set has {} vertices, exceeds k={}",
                set.len(),
                self.k
            )));
        }
        if let Some(&v) = set.iter().next_back() {
            if v >= self.n {
                return Err(Error::InvalidQuery(format!(
                    "vertex {v} out of range for n={}",
                    self.n
                )));
            }
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| set.iter().all(|v| e.binary_search(v).is_ok()))
            .count())
    }

    /// Minimum d-degree over all d-subsets; d=0 gives the edge count.
    pub fn min_d_degree(&self, d: usize) -> Result<usize> {
        if d >= self.k {
            return Err(Error::InvalidQuery(format!(
                "d={d} must satisfy d <= k-1 = {}",
                self.k - 1
            )));
        }
        if d == 0 {
            return Ok(self.edges.len());
        }
        if self.n < d {
            return Err(Error::InvalidQuery(format!("n={} < d={d}", self.n)));
        }
        let mut min = usize::MAX;
        for s in k_subsets(self.n, d) {
            min = min.min(self.degree(&s)?);
            if min == 0 {
                break;
            }
        }
        Ok(min)
    }

    /// Maximum matching by branch and bound: branch on the lowest-indexed
    /// vertex not yet covered (use one of its edges or leave it unmatched),
    /// bound by the number of edges that could still fit.
    pub fn max_matching(&self) -> Matching {
        let mut best: Vec<usize> = Vec::new();
        let mut current: Vec<usize> = Vec::new();
        let mut covered = vec![false; self.n];
        let cap = self.n / self.k.max(1);
        self.branch(0, &mut covered, &mut current, &mut best, cap);
        Matching {
            edges: best.iter().map(|&i| self.edges[i].clone()).collect(),
        }
    }

    fn branch(
        &self,
        from: usize,
        covered: &mut [bool],
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
        cap: usize,
    ) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        if best.len() == cap {
            return;
        }
        // lowest-indexed uncovered vertex
        let v = match (from..self.n).find(|&v| !covered[v]) {
            Some(v) => v,
            None => return,
        };
        let free = covered.iter().skip(v).filter(|c| !**c).count();
        if current.len() + free / self.k <= best.len() {
            return;
        }
        // edges through v, in lexicographic edge order
        for (i, e) in self.edges.iter().enumerate() {
            if e.binary_search(&v).is_err() || e.iter().any(|&u| covered[u]) {
                continue;
            }
            for &u in e {
                covered[u] = true;
            }
            current.push(i);
            self.branch(v + 1, covered, current, best, cap);
            current.pop();
            for &u in e {
                covered[u] = false;
            }
        }
        // leave v unmatched
        covered[v] = true;
        self.branch(v + 1, covered, current, best, cap);
        covered[v] = false;
    }

    pub fn has_perfect_matching(&self) -> bool {
        self.n % self.k == 0 && self.max_matching().size() * self.k == self.n
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({"n": self.n, "k": self.k, "edges": self.edges})
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let wire: HypergraphWire = serde_json::from_value(v.clone())
            .map_err(|e| Error::Format(format!("bad hypergraph JSON: {e}")))?;
        Self::new(wire.n, wire.k, wire.edges)
    }
}

/// A set of pairwise vertex-disjoint edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<Vec<usize>>,
}

impl Matching {
    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn is_perfect(&self, host: &Hypergraph) -> bool {
        self.size() * host.k() == host.n()
    }
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Streams every hypergraph on labeled vertex set `[n]` (all 2^C(n,k)
/// edge subsets), optionally keeping only those passing `filter`.
pub struct HypergraphEnumerator {
    n: usize,
    k: usize,
    universe: Vec<Vec<usize>>,
    mask: u64,
    end: u64,
}

impl HypergraphEnumerator {
    pub fn new(n: usize, k: usize, cap: u32) -> Result<Self> {
        let nck = binomial(n as u64, k as u64);
        if nck > cap as u128 {
            return Err(Error::ResourceLimit {
                required: nck,
                cap: cap as u128,
            });
        }
        let universe = k_subsets(n, k);
        let end = 1u64 << universe.len();
        Ok(Self {
            n,
            k,
            universe,
            mask: 0,
            end,
        })
    }

    pub fn total(&self) -> u64 {
        self.end
    }

    pub fn from_mask(&self, mask: u64) -> Hypergraph {
        let edges: Vec<Vec<usize>> = self
            .universe
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e.clone())
            .collect();
        Hypergraph {
            n: self.n,
            k: self.k,
            edges,
        }
    }
}

impl Iterator for HypergraphEnumerator {
    type Item = Hypergraph;

    fn next(&mut self) -> Option<Hypergraph> {
        if self.mask >= self.end {
            return None;
        }
        let h = self.from_mask(self.mask);
        self.mask += 1;
        Some(h)
    }
}

/// Enumerates hypergraphs keeping those with minimum d-degree at least `min_deg`.
pub fn enumerate_with_min_degree(
    n: usize,
    k: usize,
    d: usize,
    min_deg: usize,
    cap: u32,
) -> Result<Vec<Hypergraph>> {
    let e = HypergraphEnumerator::new(n, k, cap)?;
    e.filter(|h| h.min_d_degree(d).map(|m| m >= min_deg).unwrap_or(false))
        .map(Ok)
        .collect()
}

/// Result of the exact threshold computation: the least m such that every
/// H with delta_d >= m has a matching of size >= s, plus a witness showing
/// m-1 is insufficient (when m > 0).
#[derive(Debug, Clone)]
pub struct ThresholdResult {
    pub m: usize,
    pub witness: Option<Hypergraph>,
}

/// Exact m_d^s(k,n) by exhaustive enumeration over all 2^C(n,k) labeled
/// hypergraphs. Parallel over mask ranges; the reduction is an associative
/// max so the result is independent of worker count.
pub fn exact_m_d_s(k: usize, n: usize, d: usize, s: usize, cap: u32) -> Result<ThresholdResult> {
    if d >= k {
        return Err(Error::InvalidQuery(format!("d={d} must be < k={k}")));
    }
    if s == 0 {
        return Ok(ThresholdResult { m: 0, witness: None });
    }
    let enumerator = HypergraphEnumerator::new(n, k, cap)?;
    let end = enumerator.total();

    // max over failing H of delta_d(H); threshold is that + 1.
    let worst = (0..end as usize)
        .into_par_iter()
        .map(|mask| {
            let h = enumerator.from_mask(mask as u64);
            if h.max_matching().size() >= s {
                None
            } else {
                let deg = h.min_d_degree(d).expect("d < k checked above");
                Some((deg, mask))
            }
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some((da, ma)), Some((db, mb))) => {
                    // deterministic: prefer higher degree, then lower mask
                    if (db, std::cmp::Reverse(mb)) > (da, std::cmp::Reverse(ma)) {
                        Some((db, mb))
                    } else {
                        Some((da, ma))
                    }
                }
            },
        );

    match worst {
        None => Ok(ThresholdResult { m: 0, witness: None }),
        Some((deg, mask)) => Ok(ThresholdResult {
            m: deg + 1,
            witness: Some(enumerator.from_mask(mask as u64)),
        }),
    }
}

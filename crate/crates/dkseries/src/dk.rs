//! dK-distribution extraction, projection, and distances.
//!
//! The levels, stored as integer subgraph counts:
//!
//! - `0K`: average degree `k̄ = 2m/n`
//! - `1K`: node counts per degree, `n(k)`
//! - `2K`: edge counts per canonical degree pair, `m(k1,k2)` with `k1 ≤ k2`
//! - `3K`: wedge counts (induced 2-edge paths, keyed `(end_low, center,
//!   end_high)`) and triangle counts (keyed by sorted degree triple)
//!
//! Wedges are counted as induced subgraphs (the two ends non-adjacent), so
//! every unordered neighbor pair of every node is either a wedge centered
//! there or part of a triangle:
//! `Σ wedges + 3·Σ triangles = Σ_v C(deg v, 2)`.

use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type DegreeKey = u32;
pub type PairKey = (u32, u32);
pub type TripleKey = (u32, u32, u32);

/// Canonical 2K key.
#[inline]
pub fn pair_key(k1: u32, k2: u32) -> PairKey {
    if k1 <= k2 {
        (k1, k2)
    } else {
        (k2, k1)
    }
}

/// Canonical wedge key: ends sorted, center in the middle.
#[inline]
pub fn wedge_key(end_a: u32, center: u32, end_b: u32) -> TripleKey {
    if end_a <= end_b {
        (end_a, center, end_b)
    } else {
        (end_b, center, end_a)
    }
}

/// Canonical triangle key: fully sorted.
#[inline]
pub fn triangle_key(k1: u32, k2: u32, k3: u32) -> TripleKey {
    let mut t = [k1, k2, k3];
    t.sort_unstable();
    (t[0], t[1], t[2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroK {
    pub n: usize,
    pub kbar: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OneK {
    pub n: usize,
    /// degree -> node count
    pub counts: BTreeMap<DegreeKey, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TwoK {
    pub n: usize,
    /// (k1 ≤ k2) -> edge count
    pub counts: BTreeMap<PairKey, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ThreeK {
    pub n: usize,
    /// (end_low, center, end_high) -> induced wedge count
    pub wedge_counts: BTreeMap<TripleKey, u64>,
    /// sorted degree triple -> triangle count
    pub triangle_counts: BTreeMap<TripleKey, u64>,
}

impl OneK {
    /// Total stub count `Σ k·n(k)`.
    pub fn stub_total(&self) -> u64 {
        self.counts.iter().map(|(&k, &c)| k as u64 * c).sum()
    }

    pub fn node_total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn kbar(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.stub_total() as f64 / self.n as f64
        }
    }
}

impl TwoK {
    pub fn edge_total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Edge-end counts per degree: each `(k,k)` edge contributes two `k` ends.
    pub fn end_counts(&self) -> BTreeMap<u32, u64> {
        let mut ends: BTreeMap<u32, u64> = BTreeMap::new();
        for (&(k1, k2), &c) in &self.counts {
            *ends.entry(k1).or_default() += c;
            *ends.entry(k2).or_default() += c;
        }
        ends
    }

    /// Degree-class node counts implied by the edge ends: `n(k) = ends(k)/k`.
    /// Errors, naming the offending degree, when the ends are not divisible.
    pub fn implied_degree_counts(&self) -> Result<BTreeMap<u32, u64>> {
        let mut out = BTreeMap::new();
        for (k, ends) in self.end_counts() {
            if k == 0 {
                return Err(domain("2K distribution contains a degree-0 key"));
            }
            if ends % k as u64 != 0 {
                return Err(domain(format!(
                    "inconsistent 2K distribution: {ends} edge-ends of degree {k} not divisible by {k}"
                )));
            }
            out.insert(k, ends / k as u64);
        }
        Ok(out)
    }
}

impl ThreeK {
    pub fn wedge_total(&self) -> u64 {
        self.wedge_counts.values().sum()
    }

    pub fn triangle_total(&self) -> u64 {
        self.triangle_counts.values().sum()
    }

    /// Recovers the joint degree distribution by counting, per edge type
    /// `(k1,k2)`, the wedge and triangle slots it participates in: every edge
    /// satisfies `wedges(e) + 2·triangles(e) = (k1-1) + (k2-1)`, so summing
    /// over an edge type gives `m(k1,k2) = A(k1,k2) / (k1+k2-2)` where `A`
    /// counts wedge incidences plus twice the triangle incidences.
    ///
    /// Edges between two degree-1 nodes (isolated `K2` components) leave no
    /// trace in wedge or triangle counts and are reconstructed as absent.
    pub fn to_jdd(&self) -> Result<TwoK> {
        let mut incidences: BTreeMap<PairKey, u64> = BTreeMap::new();
        for (&(ea, c, eb), &w) in &self.wedge_counts {
            *incidences.entry(pair_key(ea, c)).or_default() += w;
            *incidences.entry(pair_key(c, eb)).or_default() += w;
        }
        for (&(a, b, c), &t) in &self.triangle_counts {
            *incidences.entry(pair_key(a, b)).or_default() += 2 * t;
            *incidences.entry(pair_key(a, c)).or_default() += 2 * t;
            *incidences.entry(pair_key(b, c)).or_default() += 2 * t;
        }
        let mut counts = BTreeMap::new();
        for ((k1, k2), a) in incidences {
            let slots = (k1 + k2) as u64 - 2;
            if slots == 0 {
                return Err(domain(
                    "inconsistent 3K distribution: (1,1) edges cannot appear in wedges or triangles",
                ));
            }
            if a % slots != 0 {
                return Err(domain(format!(
                    "inconsistent 3K distribution: {a} incidences on edge type ({k1},{k2}) not divisible by {slots}"
                )));
            }
            counts.insert((k1, k2), a / slots);
        }
        Ok(TwoK { n: self.n, counts })
    }
}

/// A dK-distribution for d in 0..=3.
#[derive(Debug, Clone, PartialEq)]
pub enum DkDistribution {
    Zero(ZeroK),
    One(OneK),
    Two(TwoK),
    Three(ThreeK),
}

impl DkDistribution {
    pub fn d(&self) -> u8 {
        match self {
            DkDistribution::Zero(_) => 0,
            DkDistribution::One(_) => 1,
            DkDistribution::Two(_) => 2,
            DkDistribution::Three(_) => 3,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DkDistribution::Zero(z) => z.n,
            DkDistribution::One(o) => o.n,
            DkDistribution::Two(t) => t.n,
            DkDistribution::Three(t) => t.n,
        }
    }

    pub fn as_one(&self) -> Result<&OneK> {
        match self {
            DkDistribution::One(o) => Ok(o),
            other => Err(domain(format!("expected a 1K distribution, got d={}", other.d()))),
        }
    }

    pub fn as_two(&self) -> Result<&TwoK> {
        match self {
            DkDistribution::Two(t) => Ok(t),
            other => Err(domain(format!("expected a 2K distribution, got d={}", other.d()))),
        }
    }

    pub fn as_three(&self) -> Result<&ThreeK> {
        match self {
            DkDistribution::Three(t) => Ok(t),
            other => Err(domain(format!("expected a 3K distribution, got d={}", other.d()))),
        }
    }
}

/// Exact dK-distribution of a graph.
///
/// The d=3 pass iterates nodes as wedge centers and tests adjacency once per
/// neighbor pair, `O(Σ_v deg(v)²)` overall.
pub fn extract(g: &Graph, d: u8) -> Result<DkDistribution> {
    match d {
        0 => Ok(DkDistribution::Zero(ZeroK {
            n: g.n(),
            kbar: g.average_degree(),
        })),
        1 => {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for v in 0..g.n() as u32 {
                *counts.entry(g.degree_of(v)).or_default() += 1;
            }
            Ok(DkDistribution::One(OneK { n: g.n(), counts }))
        }
        2 => {
            let mut counts: BTreeMap<PairKey, u64> = BTreeMap::new();
            for (u, v) in g.edges() {
                *counts
                    .entry(pair_key(g.degree_of(u), g.degree_of(v)))
                    .or_default() += 1;
            }
            Ok(DkDistribution::Two(TwoK { n: g.n(), counts }))
        }
        3 => {
            let mut wedges: BTreeMap<TripleKey, u64> = BTreeMap::new();
            let mut triangles: BTreeMap<TripleKey, u64> = BTreeMap::new();
            for c in 0..g.n() as u32 {
                let nbrs = g.neighbors(c);
                let kc = nbrs.len() as u32;
                for i in 0..nbrs.len() {
                    for j in (i + 1)..nbrs.len() {
                        let (a, b) = (nbrs[i], nbrs[j]);
                        if g.has_edge(a, b) {
                            // count each triangle once, at its smallest node
                            if c < a {
                                *triangles
                                    .entry(triangle_key(kc, g.degree_of(a), g.degree_of(b)))
                                    .or_default() += 1;
                            }
                        } else {
                            *wedges
                                .entry(wedge_key(g.degree_of(a), kc, g.degree_of(b)))
                                .or_default() += 1;
                        }
                    }
                }
            }
            Ok(DkDistribution::Three(ThreeK {
                n: g.n(),
                wedge_counts: wedges,
                triangle_counts: triangles,
            }))
        }
        other => Err(domain(format!("d must be in 0..=3, got {other}"))),
    }
}

/// Independent oracle for [`extract`]: classifies every node pair or triple
/// explicitly. Intended for small graphs (soft cap n ≈ 200).
pub fn count_subgraphs_bruteforce(g: &Graph, d: u8) -> Result<DkDistribution> {
    let n = g.n() as u32;
    match d {
        2 => {
            let mut counts: BTreeMap<PairKey, u64> = BTreeMap::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if g.has_edge(u, v) {
                        *counts
                            .entry(pair_key(g.degree_of(u), g.degree_of(v)))
                            .or_default() += 1;
                    }
                }
            }
            Ok(DkDistribution::Two(TwoK { n: g.n(), counts }))
        }
        3 => {
            let mut wedges: BTreeMap<TripleKey, u64> = BTreeMap::new();
            let mut triangles: BTreeMap<TripleKey, u64> = BTreeMap::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    for c in (b + 1)..n {
                        let (ab, ac, bc) = (g.has_edge(a, b), g.has_edge(a, c), g.has_edge(b, c));
                        let edges = ab as u8 + ac as u8 + bc as u8;
                        let (ka, kb, kc) = (g.degree_of(a), g.degree_of(b), g.degree_of(c));
                        if edges == 3 {
                            *triangles.entry(triangle_key(ka, kb, kc)).or_default() += 1;
                        } else if edges == 2 {
                            // the center is incident to both edges
                            let key = if ab && ac {
                                wedge_key(kb, ka, kc)
                            } else if ab && bc {
                                wedge_key(ka, kb, kc)
                            } else {
                                wedge_key(ka, kc, kb)
                            };
                            *wedges.entry(key).or_default() += 1;
                        }
                    }
                }
            }
            Ok(DkDistribution::Three(ThreeK {
                n: g.n(),
                wedge_counts: wedges,
                triangle_counts: triangles,
            }))
        }
        other => Err(domain(format!(
            "brute-force census supports d in 2..=3, got {other}"
        ))),
    }
}

/// Projects a distribution one level down.
///
/// - `1K → 0K`: `k̄ = Σ k·n(k) / n`
/// - `2K → 1K`: `n(k) = ends(k)/k`, with degree-0 nodes restored from `n`
/// - `3K → 2K`: requires the host graph (see [`project_with_graph`]); the
///   graph-free inversion is exposed separately as [`ThreeK::to_jdd`]
pub fn project(dist: &DkDistribution) -> Result<DkDistribution> {
    match dist {
        DkDistribution::Zero(_) => Err(domain("cannot project below d=0")),
        DkDistribution::One(one) => Ok(DkDistribution::Zero(ZeroK {
            n: one.n,
            kbar: one.kbar(),
        })),
        DkDistribution::Two(two) => {
            let mut counts = two.implied_degree_counts()?;
            let covered: u64 = counts.values().sum();
            let n = two.n as u64;
            if covered > n {
                return Err(domain(format!(
                    "inconsistent 2K distribution: implies {covered} nodes but n={n}"
                )));
            }
            if covered < n {
                counts.insert(0, n - covered);
            }
            Ok(DkDistribution::One(OneK { n: two.n, counts }))
        }
        DkDistribution::Three(_) => Err(Error::Capability(
            "3K → 2K projection requires the host graph; use project_with_graph \
             (or ThreeK::to_jdd for the edge-counting inversion)"
                .into(),
        )),
    }
}

/// Graph-assisted `3K → 2K` projection: verifies that `g` realizes `dist`,
/// then reads the joint degree distribution off `g`.
pub fn project_with_graph(dist: &DkDistribution, g: &Graph) -> Result<DkDistribution> {
    let three = dist.as_three()?;
    let extracted = extract(g, 3)?;
    if extracted.as_three()? != three {
        return Err(domain("graph does not realize the given 3K distribution"));
    }
    extract(g, 2)
}

/// Distance between two same-level distributions: the sum of squared count
/// differences over the union of keys (for d=3, over both wedge and triangle
/// keys). Exact (integer) for d ≥ 1; squared `k̄` difference for d=0.
pub fn distance(a: &DkDistribution, b: &DkDistribution) -> Result<f64> {
    match (a, b) {
        (DkDistribution::Zero(x), DkDistribution::Zero(y)) => {
            let diff = x.kbar - y.kbar;
            Ok(diff * diff)
        }
        (DkDistribution::One(x), DkDistribution::One(y)) => {
            Ok(map_sq_diff(&x.counts, &y.counts) as f64)
        }
        (DkDistribution::Two(x), DkDistribution::Two(y)) => {
            Ok(map_sq_diff(&x.counts, &y.counts) as f64)
        }
        (DkDistribution::Three(x), DkDistribution::Three(y)) => Ok((map_sq_diff(
            &x.wedge_counts,
            &y.wedge_counts,
        ) + map_sq_diff(&x.triangle_counts, &y.triangle_counts))
            as f64),
        _ => Err(domain(format!(
            "distance requires equal levels, got d={} and d={}",
            a.d(),
            b.d()
        ))),
    }
}

pub(crate) fn map_sq_diff<K: Ord + Copy>(a: &BTreeMap<K, u64>, b: &BTreeMap<K, u64>) -> i128 {
    let mut sum: i128 = 0;
    for (k, &va) in a {
        let vb = b.get(k).copied().unwrap_or(0);
        let d = va as i128 - vb as i128;
        sum += d * d;
    }
    for (k, &vb) in b {
        if !a.contains_key(k) {
            sum += (vb as i128) * (vb as i128);
        }
    }
    sum
}

// ---------------------------------------------------------------------------
// JSON serialization
//
// { "d": 2, "n": 4, "jdd_counts": { "1,3": 1, "2,2": 1, "2,3": 2 } }
//
// Keys are canonical ("k1,k2" ascending; wedge keys "end_low,center,end_high";
// triangle keys fully sorted); counts are integers. Maps serialize in string
// order, so serialization is deterministic and round-trips bit-exactly.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct DkJson {
    d: u8,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    kbar: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree_counts: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jdd_counts: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wedge_counts: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    triangle_counts: Option<BTreeMap<String, u64>>,
}

fn parse_tuple<const N: usize>(key: &str) -> Result<[u32; N]> {
    let parts: Vec<&str> = key.split(',').collect();
    if parts.len() != N {
        return Err(domain(format!("key {key:?} must have {N} components")));
    }
    let mut out = [0u32; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| domain(format!("bad degree in key {key:?}")))?;
    }
    Ok(out)
}

impl Serialize for DkDistribution {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut j = DkJson {
            d: self.d(),
            n: self.n(),
            kbar: None,
            degree_counts: None,
            jdd_counts: None,
            wedge_counts: None,
            triangle_counts: None,
        };
        match self {
            DkDistribution::Zero(z) => j.kbar = Some(z.kbar),
            DkDistribution::One(o) => {
                j.degree_counts = Some(o.counts.iter().map(|(k, &c)| (k.to_string(), c)).collect())
            }
            DkDistribution::Two(t) => {
                j.jdd_counts = Some(
                    t.counts
                        .iter()
                        .map(|(&(k1, k2), &c)| (format!("{k1},{k2}"), c))
                        .collect(),
                )
            }
            DkDistribution::Three(t) => {
                let key3 = |&(a, b, c): &TripleKey| format!("{a},{b},{c}");
                j.wedge_counts = Some(t.wedge_counts.iter().map(|(k, &c)| (key3(k), c)).collect());
                j.triangle_counts = Some(
                    t.triangle_counts
                        .iter()
                        .map(|(k, &c)| (key3(k), c))
                        .collect(),
                );
            }
        }
        j.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DkDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let j = DkJson::deserialize(de)?;
        let fail = |e: Error| D::Error::custom(e.to_string());
        match j.d {
            0 => Ok(DkDistribution::Zero(ZeroK {
                n: j.n,
                kbar: j
                    .kbar
                    .ok_or_else(|| D::Error::custom("d=0 requires \"kbar\""))?,
            })),
            1 => {
                let raw = j
                    .degree_counts
                    .ok_or_else(|| D::Error::custom("d=1 requires \"degree_counts\""))?;
                let mut counts = BTreeMap::new();
                for (k, c) in raw {
                    let [d] = parse_tuple::<1>(&k).map_err(fail)?;
                    counts.insert(d, c);
                }
                Ok(DkDistribution::One(OneK { n: j.n, counts }))
            }
            2 => {
                let raw = j
                    .jdd_counts
                    .ok_or_else(|| D::Error::custom("d=2 requires \"jdd_counts\""))?;
                let mut counts = BTreeMap::new();
                for (k, c) in raw {
                    let [k1, k2] = parse_tuple::<2>(&k).map_err(fail)?;
                    if k1 > k2 {
                        return Err(D::Error::custom(format!(
                            "non-canonical 2K key \"{k1},{k2}\" (want k1 ≤ k2)"
                        )));
                    }
                    counts.insert((k1, k2), c);
                }
                Ok(DkDistribution::Two(TwoK { n: j.n, counts }))
            }
            3 => {
                let wedges_raw = j
                    .wedge_counts
                    .ok_or_else(|| D::Error::custom("d=3 requires \"wedge_counts\""))?;
                let triangles_raw = j
                    .triangle_counts
                    .ok_or_else(|| D::Error::custom("d=3 requires \"triangle_counts\""))?;
                let mut wedge_counts = BTreeMap::new();
                for (k, c) in wedges_raw {
                    let [a, b, cdeg] = parse_tuple::<3>(&k).map_err(fail)?;
                    if a > cdeg {
                        return Err(D::Error::custom(format!(
                            "non-canonical wedge key \"{a},{b},{cdeg}\" (want end_low ≤ end_high)"
                        )));
                    }
                    wedge_counts.insert((a, b, cdeg), c);
                }
                let mut triangle_counts = BTreeMap::new();
                for (k, c) in triangles_raw {
                    let [a, b, cdeg] = parse_tuple::<3>(&k).map_err(fail)?;
                    if !(a <= b && b <= cdeg) {
                        return Err(D::Error::custom(format!(
                            "non-canonical triangle key \"{a},{b},{cdeg}\" (want sorted)"
                        )));
                    }
                    triangle_counts.insert((a, b, cdeg), c);
                }
                Ok(DkDistribution::Three(ThreeK {
                    n: j.n,
                    wedge_counts,
                    triangle_counts,
                }))
            }
            other => Err(D::Error::custom(format!("d must be in 0..=3, got {other}"))),
        }
    }
}

impl DkDistribution {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("dk distribution serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

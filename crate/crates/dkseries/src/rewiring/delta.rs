//! Local subgraph-count deltas for edge swaps.
//!
//! A degree-preserving swap touches at most four nodes. The wedge and
//! triangle counts that can change are exactly those of triples containing
//! both endpoints of a changed pair, so the census enumerates, per changed
//! pair `{x, y}`, the triples `{x, y, z}` with `z` drawn from the
//! before-neighborhoods of `x` and `y` plus the four swap endpoints, and
//! classifies each triple before and after. Cost is `O(Σ local degree)`
//! triples with `O(log k)` adjacency tests each.

use crate::dk::{triangle_key, wedge_key, PairKey, TripleKey};
use crate::graph::{canonical, Graph, NodeId};
use std::collections::{BTreeMap, HashSet};

/// Net wedge/triangle count changes caused by an edge replacement, plus
/// per-node triangle membership deltas (used by the clustering objective).
#[derive(Debug, Default, Clone)]
pub struct LocalDelta {
    pub wedges: BTreeMap<TripleKey, i64>,
    pub triangles: BTreeMap<TripleKey, i64>,
    pub tri_per_node: BTreeMap<NodeId, i64>,
}

impl LocalDelta {
    pub fn is_zero(&self) -> bool {
        self.wedges.is_empty() && self.triangles.is_empty()
    }
}

fn prune<K: Ord>(map: &mut BTreeMap<K, i64>) {
    map.retain(|_, v| *v != 0);
}

/// Wedge/triangle deltas for replacing `removed` by `added`. Degrees must be
/// unchanged by the replacement (true for every edge crossing), since keys
/// are built from the degrees in `g`.
pub fn local_delta(g: &Graph, removed: &[(NodeId, NodeId)], added: &[(NodeId, NodeId)]) -> LocalDelta {
    debug_assert!(removed
        .iter()
        .chain(added)
        .all(|&(u, v)| canonical(u, v) == (u, v)));

    let removed_set: Vec<PairKey> = removed.to_vec();
    let added_set: Vec<PairKey> = added.to_vec();
    let edge_after = |x: NodeId, y: NodeId| -> bool {
        let key = canonical(x, y);
        if added_set.contains(&key) {
            return true;
        }
        if removed_set.contains(&key) {
            return false;
        }
        g.has_edge(x, y)
    };

    let mut endpoints: Vec<NodeId> = removed
        .iter()
        .chain(added)
        .flat_map(|&(u, v)| [u, v])
        .collect();
    endpoints.sort_unstable();
    endpoints.dedup();

    let mut triples: HashSet<[NodeId; 3]> = HashSet::new();
    let mut changed: Vec<PairKey> = removed_set.iter().chain(&added_set).copied().collect();
    changed.sort_unstable();
    changed.dedup();
    for &(x, y) in &changed {
        let mut push = |z: NodeId| {
            if z != x && z != y {
                let mut t = [x, y, z];
                t.sort_unstable();
                triples.insert(t);
            }
        };
        for &z in g.neighbors(x) {
            push(z);
        }
        for &z in g.neighbors(y) {
            push(z);
        }
        for &z in &endpoints {
            push(z);
        }
    }

    let mut out = LocalDelta::default();
    for &[a, b, c] in &triples {
        apply_classification(g, a, b, c, |x, y| g.has_edge(x, y), -1, &mut out);
        apply_classification(g, a, b, c, edge_after, 1, &mut out);
    }
    prune(&mut out.wedges);
    prune(&mut out.triangles);
    prune(&mut out.tri_per_node);
    out
}

fn apply_classification(
    g: &Graph,
    a: NodeId,
    b: NodeId,
    c: NodeId,
    has: impl Fn(NodeId, NodeId) -> bool,
    sign: i64,
    out: &mut LocalDelta,
) {
    let (ab, ac, bc) = (has(a, b), has(a, c), has(b, c));
    let (ka, kb, kc) = (g.degree_of(a), g.degree_of(b), g.degree_of(c));
    match ab as u8 + ac as u8 + bc as u8 {
        3 => {
            *out.triangles.entry(triangle_key(ka, kb, kc)).or_default() += sign;
            for v in [a, b, c] {
                *out.tri_per_node.entry(v).or_default() += sign;
            }
        }
        2 => {
            let key = if ab && ac {
                wedge_key(kb, ka, kc)
            } else if ab && bc {
                wedge_key(ka, kb, kc)
            } else {
                wedge_key(ka, kc, kb)
            };
            *out.wedges.entry(key).or_default() += sign;
        }
        _ => {}
    }
}

/// Joint-degree-distribution deltas of an edge crossing (degree-preserving).
pub fn jdd_delta(g: &Graph, removed: &[(NodeId, NodeId)], added: &[(NodeId, NodeId)]) -> BTreeMap<PairKey, i64> {
    let mut delta: BTreeMap<PairKey, i64> = BTreeMap::new();
    for &(u, v) in removed {
        *delta
            .entry(crate::dk::pair_key(g.degree_of(u), g.degree_of(v)))
            .or_default() -= 1;
    }
    for &(u, v) in added {
        *delta
            .entry(crate::dk::pair_key(g.degree_of(u), g.degree_of(v)))
            .or_default() += 1;
    }
    prune(&mut delta);
    delta
}

/// Running squared-distance state against a fixed target count map.
#[derive(Debug, Clone)]
pub struct CountsState<K: Ord + Copy> {
    cur: BTreeMap<K, i64>,
    tgt: BTreeMap<K, i64>,
    dist: i128,
}

impl<K: Ord + Copy> CountsState<K> {
    pub fn new(cur: &BTreeMap<K, u64>, tgt: &BTreeMap<K, u64>) -> Self {
        let cur: BTreeMap<K, i64> = cur.iter().map(|(&k, &v)| (k, v as i64)).collect();
        let tgt: BTreeMap<K, i64> = tgt.iter().map(|(&k, &v)| (k, v as i64)).collect();
        let mut dist: i128 = 0;
        for (k, &c) in &cur {
            let t = tgt.get(k).copied().unwrap_or(0);
            dist += ((c - t) as i128).pow(2);
        }
        for (k, &t) in &tgt {
            if !cur.contains_key(k) {
                dist += (t as i128).pow(2);
            }
        }
        CountsState { cur, tgt, dist }
    }

    pub fn dist(&self) -> i128 {
        self.dist
    }

    /// Distance change if `delta` were applied.
    pub fn delta_dist(&self, delta: &BTreeMap<K, i64>) -> i128 {
        let mut dd: i128 = 0;
        for (k, &d) in delta {
            let c = self.cur.get(k).copied().unwrap_or(0) as i128;
            let t = self.tgt.get(k).copied().unwrap_or(0) as i128;
            let d = d as i128;
            dd += d * (2 * (c - t) + d);
        }
        dd
    }

    pub fn apply(&mut self, delta: &BTreeMap<K, i64>) {
        self.dist += self.delta_dist(delta);
        for (&k, &d) in delta {
            let slot = self.cur.entry(k).or_insert(0);
            *slot += d;
            debug_assert!(*slot >= 0, "count went negative");
            if *slot == 0 && !self.tgt.contains_key(&k) {
                self.cur.remove(&k);
            }
        }
    }

    pub fn counts(&self) -> &BTreeMap<K, i64> {
        &self.cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dk::extract;
    use crate::graph::{check_cross, CrossMode};
    use crate::testutil::gnp;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    /// Applies random legal crossings and checks the local census against a
    /// full re-extraction after every step.
    #[test]
    fn local_delta_matches_full_recount() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for seed in 0..6u64 {
            let mut g = gnp(24, 0.12 + 0.05 * seed as f64, seed);
            if g.m() < 2 {
                continue;
            }
            let mut steps = 0;
            while steps < 120 {
                let edges = g.edges();
                let i = rng.random_range(0..edges.len());
                let j = rng.random_range(0..edges.len());
                if i == j {
                    continue;
                }
                let mode = if rng.random::<bool>() {
                    CrossMode::A
                } else {
                    CrossMode::B
                };
                let Ok(added) = check_cross(&g, edges[i], edges[j], mode) else {
                    continue;
                };
                let removed = [edges[i], edges[j]];
                let before = extract(&g, 3).unwrap();
                let before = before.as_three().unwrap().clone();
                let tri_before = crate::metrics::triangles_per_node(&g);

                let delta = local_delta(&g, &removed, &added);
                g.remove_edge(removed[0].0, removed[0].1);
                g.remove_edge(removed[1].0, removed[1].1);
                g.add_edge(added[0].0, added[0].1);
                g.add_edge(added[1].0, added[1].1);

                let after = extract(&g, 3).unwrap();
                let after = after.as_three().unwrap().clone();
                let tri_after = crate::metrics::triangles_per_node(&g);

                let mut wedges: BTreeMap<TripleKey, i64> = before
                    .wedge_counts
                    .iter()
                    .map(|(&k, &v)| (k, -(v as i64)))
                    .collect();
                for (&k, &v) in &after.wedge_counts {
                    *wedges.entry(k).or_default() += v as i64;
                }
                wedges.retain(|_, v| *v != 0);
                assert_eq!(delta.wedges, wedges, "wedges seed {seed} step {steps}");

                let mut tris: BTreeMap<TripleKey, i64> = before
                    .triangle_counts
                    .iter()
                    .map(|(&k, &v)| (k, -(v as i64)))
                    .collect();
                for (&k, &v) in &after.triangle_counts {
                    *tris.entry(k).or_default() += v as i64;
                }
                tris.retain(|_, v| *v != 0);
                assert_eq!(delta.triangles, tris, "triangles seed {seed} step {steps}");

                for v in 0..g.n() as u32 {
                    let expected = tri_after[v as usize] as i64 - tri_before[v as usize] as i64;
                    let got = delta.tri_per_node.get(&v).copied().unwrap_or(0);
                    assert_eq!(got, expected, "node {v} seed {seed} step {steps}");
                }
                steps += 1;
            }
        }
    }

    #[test]
    fn counts_state_tracks_distance() {
        let cur: BTreeMap<u32, u64> = [(1, 3), (2, 5)].into_iter().collect();
        let tgt: BTreeMap<u32, u64> = [(1, 1), (3, 2)].into_iter().collect();
        let mut st = CountsState::new(&cur, &tgt);
        // (3-1)^2 + 5^2 + 2^2
        assert_eq!(st.dist(), 4 + 25 + 4);

        let delta: BTreeMap<u32, i64> = [(1, -2), (3, 1)].into_iter().collect();
        let dd = st.delta_dist(&delta);
        st.apply(&delta);
        assert_eq!(st.dist(), 25 + 1);
        assert_eq!(dd, st.dist() - 33);
    }
}

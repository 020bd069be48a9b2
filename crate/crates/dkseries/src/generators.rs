//! Constructing graphs from a target dK-distribution (no original graph
//! required): stochastic, pseudograph (configuration), and matching families.
//!
//! - stochastic (d ≤ 2): connect node pairs independently with the
//!   level-appropriate probability; matches the target in ensemble mean
//! - pseudograph (d ≤ 2): random stub pairing / edge-end grouping; exact
//!   pre-cleanup, then self-loops are removed and multi-edges collapsed
//! - matching (d ≤ 2): pseudograph layout that skips illegal connections,
//!   with bounded backtracking and restarts on deadlock; exact simple graph
//!
//! Every run is deterministic in its seed.

use crate::dk::{pair_key, DkDistribution, OneK, TwoK};
use crate::error::{domain, Error, Result};
use crate::graph::{Graph, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;

/// Generation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMethod {
    Stochastic,
    Pseudograph,
    Matching,
}

/// A generation request: method, target distribution, seed, and the restart
/// budget used by the matching family.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub method: GenMethod,
    pub target: DkDistribution,
    pub seed: u64,
    pub retries: usize,
}

pub const DEFAULT_RETRIES: usize = 32;

impl GenSpec {
    pub fn new(method: GenMethod, target: DkDistribution, seed: u64) -> Self {
        GenSpec {
            method,
            target,
            seed,
            retries: DEFAULT_RETRIES,
        }
    }

    pub fn generate(&self) -> Result<GenOutcome> {
        match (self.method, &self.target) {
            (GenMethod::Stochastic, DkDistribution::Zero(_))
            | (GenMethod::Stochastic, DkDistribution::One(_))
            | (GenMethod::Stochastic, DkDistribution::Two(_)) => {
                gen_stochastic(&self.target, self.seed)
            }
            (GenMethod::Pseudograph, DkDistribution::One(one)) => gen_pseudograph_1k(one, self.seed),
            (GenMethod::Pseudograph, DkDistribution::Two(two)) => gen_pseudograph_2k(two, self.seed),
            (GenMethod::Matching, DkDistribution::One(_)) | (GenMethod::Matching, DkDistribution::Two(_)) => {
                gen_matching(&self.target, self.seed, self.retries)
            }
            (method, target) => Err(domain(format!(
                "{method:?} generation does not support d={}",
                target.d()
            ))),
        }
    }
}

/// A generated graph plus construction diagnostics.
#[derive(Debug, Clone)]
pub struct GenOutcome {
    pub graph: Graph,
    pub removed_self_loops: usize,
    pub removed_multi_edges: usize,
    pub restarts: usize,
    /// node pairs whose stochastic connection probability exceeded 1
    pub clamped_pairs: u64,
    /// distance between the pre-cleanup multigraph distribution and the
    /// target (pseudograph/matching only); 0 when the layout is exact
    pub precleanup_distance: Option<f64>,
}

impl GenOutcome {
    fn simple(graph: Graph) -> Self {
        GenOutcome {
            graph,
            removed_self_loops: 0,
            removed_multi_edges: 0,
            restarts: 0,
            clamped_pairs: 0,
            precleanup_distance: None,
        }
    }

    pub fn diagnostics_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.graph.n(),
            "m": self.graph.m(),
            "removed_self_loops": self.removed_self_loops,
            "removed_multi_edges": self.removed_multi_edges,
            "restarts": self.restarts,
            "clamped_pairs": self.clamped_pairs,
            "precleanup_distance": self.precleanup_distance,
        })
    }
}

// ---------------------------------------------------------------------------
// stochastic
// ---------------------------------------------------------------------------

/// Degree classes laid out over contiguous node ids, ascending by degree.
struct Classes {
    /// (degree, first node id, node count)
    spans: Vec<(u32, u32, u32)>,
    n: usize,
}

fn layout_classes(counts: &BTreeMap<u32, u64>, n: usize) -> Classes {
    let mut spans = Vec::with_capacity(counts.len());
    let mut next: u32 = 0;
    for (&k, &c) in counts {
        spans.push((k, next, c as u32));
        next += c as u32;
    }
    Classes { spans, n }
}

/// Connection probability of the 1K stochastic construction:
/// `p(q1, q2) = q1 q2 / (n q̄)`.
fn p_1k(q1: u32, q2: u32, n: usize, qbar: f64) -> f64 {
    if qbar <= 0.0 {
        0.0
    } else {
        q1 as f64 * q2 as f64 / (n as f64 * qbar)
    }
}

/// Connection probability of the 2K stochastic construction, reduced to
/// counts: `p(k1, k2) = μ(k1,k2) · m(k1,k2) / (n(k1) n(k2))`, which is the
/// `(q̄/n) P(q1,q2)/(P(q1)P(q2))` form with the normalizations expanded.
fn p_2k(m_k1k2: u64, mu: u64, n_k1: u64, n_k2: u64) -> f64 {
    (mu * m_k1k2) as f64 / (n_k1 * n_k2) as f64
}

/// Emits each pair of a `len`-sized block independently with probability `p`,
/// via geometric jumps. Returns the number of clamped pairs (p > 1).
fn sample_block(
    len: u64,
    p: f64,
    rng: &mut ChaCha12Rng,
    mut emit: impl FnMut(u64),
) -> u64 {
    if len == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        for idx in 0..len {
            emit(idx);
        }
        return if p > 1.0 { len } else { 0 };
    }
    let log_q = (1.0 - p).ln();
    let mut pos: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        let skip = (u.ln() / log_q).floor();
        if !skip.is_finite() || pos as f64 + skip >= len as f64 {
            return 0;
        }
        pos += skip as u64;
        emit(pos);
        pos += 1;
        if pos >= len {
            return 0;
        }
    }
}

/// Unranks a linear index into the `(i, j)` pair, `i < j`, of an
/// upper-triangular block over `nc` items.
fn unrank_pair(idx: u64, nc: u64) -> (u64, u64) {
    // f(i) = number of pairs with first element < i
    let f = |i: u64| i * nc - i * (i + 1) / 2;
    let mut i = {
        let nf = nc as f64 - 0.5;
        let disc = (nf * nf - 2.0 * idx as f64).max(0.0);
        (nf - disc.sqrt()).floor().max(0.0) as u64
    };
    while i + 1 < nc && f(i + 1) <= idx {
        i += 1;
    }
    while i > 0 && f(i) > idx {
        i -= 1;
    }
    (i, i + 1 + (idx - f(i)))
}

/// Stochastic construction for d in 0..=2.
pub fn gen_stochastic(target: &DkDistribution, seed: u64) -> Result<GenOutcome> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut clamped: u64 = 0;

    match target {
        DkDistribution::Zero(zero) => {
            let n = zero.n;
            if zero.kbar < 0.0 {
                return Err(domain("kbar must be non-negative"));
            }
            let p = if n == 0 { 0.0 } else { zero.kbar / n as f64 };
            let nc = n as u64;
            clamped += sample_block(nc * nc.saturating_sub(1) / 2, p, &mut rng, |idx| {
                let (i, j) = unrank_pair(idx, nc);
                edges.push((i as NodeId, j as NodeId));
            });
            let (graph, _, _) = Graph::from_edges_lossy(n, edges);
            Ok(GenOutcome {
                clamped_pairs: clamped,
                ..GenOutcome::simple(graph)
            })
        }
        DkDistribution::One(one) => {
            if one.node_total() != one.n as u64 {
                return Err(domain("1K counts do not sum to n"));
            }
            let classes = layout_classes(&one.counts, one.n);
            let qbar = one.kbar();
            clamped = stochastic_over_classes(&classes, &mut rng, &mut edges, |k1, k2| {
                p_1k(k1, k2, classes.n, qbar)
            });
            let (graph, _, _) = Graph::from_edges_lossy(one.n, edges);
            Ok(GenOutcome {
                clamped_pairs: clamped,
                ..GenOutcome::simple(graph)
            })
        }
        DkDistribution::Two(two) => {
            let counts = two.implied_degree_counts()?;
            let covered: u64 = counts.values().sum();
            if covered > two.n as u64 {
                return Err(domain("2K distribution implies more nodes than n"));
            }
            let classes = layout_classes(&counts, two.n);
            clamped = stochastic_over_classes(&classes, &mut rng, &mut edges, |k1, k2| {
                let key = pair_key(k1, k2);
                match two.counts.get(&key) {
                    None => 0.0,
                    Some(&m) => {
                        let mu = if k1 == k2 { 2 } else { 1 };
                        p_2k(m, mu, counts[&key.0], counts[&key.1])
                    }
                }
            });
            let (graph, _, _) = Graph::from_edges_lossy(two.n, edges);
            Ok(GenOutcome {
                clamped_pairs: clamped,
                ..GenOutcome::simple(graph)
            })
        }
        DkDistribution::Three(_) => Err(Error::Capability(
            "stochastic construction is implemented for d ≤ 2".into(),
        )),
    }
}

fn stochastic_over_classes(
    classes: &Classes,
    rng: &mut ChaCha12Rng,
    edges: &mut Vec<(NodeId, NodeId)>,
    p_of: impl Fn(u32, u32) -> f64,
) -> u64 {
    let mut clamped = 0u64;
    let spans = &classes.spans;
    for a in 0..spans.len() {
        let (k1, start1, n1) = spans[a];
        if k1 == 0 {
            continue;
        }
        // within-class pairs
        let p = p_of(k1, k1);
        clamped += sample_block(n1 as u64 * (n1 as u64 - 1) / 2, p, rng, |idx| {
            let (i, j) = unrank_pair(idx, n1 as u64);
            edges.push((start1 + i as NodeId, start1 + j as NodeId));
        });
        // cross-class pairs
        for &(k2, start2, n2) in &spans[a + 1..] {
            if k2 == 0 {
                continue;
            }
            let p = p_of(k1, k2);
            clamped += sample_block(n1 as u64 * n2 as u64, p, rng, |idx| {
                edges.push((
                    start1 + (idx / n2 as u64) as NodeId,
                    start2 + (idx % n2 as u64) as NodeId,
                ));
            });
        }
    }
    clamped
}

// ---------------------------------------------------------------------------
// pseudograph (configuration)
// ---------------------------------------------------------------------------

fn cleanup(n: usize, multiedges: Vec<(NodeId, NodeId)>) -> (Graph, usize, usize) {
    Graph::from_edges_lossy(n, multiedges)
}

fn multigraph_degrees(n: usize, multiedges: &[(NodeId, NodeId)]) -> Vec<u32> {
    let mut deg = vec![0u32; n];
    for &(u, v) in multiedges {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    deg
}

fn one_k_of_degrees(n: usize, deg: &[u32]) -> OneK {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &k in deg {
        *counts.entry(k).or_default() += 1;
    }
    OneK { n, counts }
}

pub(crate) fn pseudograph_1k_multiedges(
    target: &OneK,
    rng: &mut ChaCha12Rng,
) -> Result<Vec<(NodeId, NodeId)>> {
    if target.node_total() != target.n as u64 {
        return Err(domain("1K counts do not sum to n"));
    }
    let stub_total = target.stub_total();
    if !stub_total.is_multiple_of(2) {
        return Err(domain(format!(
            "stub total {stub_total} is odd; no pairing exists"
        )));
    }
    let classes = layout_classes(&target.counts, target.n);
    let mut stubs: Vec<NodeId> = Vec::with_capacity(stub_total as usize);
    for &(k, start, count) in &classes.spans {
        for node in start..start + count {
            for _ in 0..k {
                stubs.push(node);
            }
        }
    }
    stubs.shuffle(rng);
    Ok(stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect())
}

/// Stub pairing: `n(k)` nodes with `k` stubs each, paired uniformly at
/// random; the multigraph degree sequence equals the target exactly, then
/// self-loops are removed and multi-edges collapsed.
pub fn gen_pseudograph_1k(target: &OneK, seed: u64) -> Result<GenOutcome> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let multi = pseudograph_1k_multiedges(target, &mut rng)?;
    let pre = one_k_of_degrees(target.n, &multigraph_degrees(target.n, &multi));
    let pre_dist = crate::dk::distance(
        &DkDistribution::One(pre),
        &DkDistribution::One(target.clone()),
    )?;
    let (graph, loops, dups) = cleanup(target.n, multi);
    Ok(GenOutcome {
        graph,
        removed_self_loops: loops,
        removed_multi_edges: dups,
        restarts: 0,
        clamped_pairs: 0,
        precleanup_distance: Some(pre_dist),
    })
}

pub(crate) fn pseudograph_2k_multiedges(
    target: &TwoK,
    rng: &mut ChaCha12Rng,
) -> Result<(Vec<(NodeId, NodeId)>, usize)> {
    let counts = target.implied_degree_counts()?;
    let covered: u64 = counts.values().sum();
    if covered > target.n as u64 {
        return Err(domain("2K distribution implies more nodes than n"));
    }
    let classes = layout_classes(&counts, target.n);
    let span_of: BTreeMap<u32, (u32, u32)> = classes
        .spans
        .iter()
        .map(|&(k, start, count)| (k, (start, count)))
        .collect();

    // lay out the labeled edges, then collect edge-ends per degree label
    let mut edge_types: Vec<(u32, u32)> = Vec::new();
    for (&(k1, k2), &c) in &target.counts {
        for _ in 0..c {
            edge_types.push((k1, k2));
        }
    }
    let mut ends_by_label: BTreeMap<u32, Vec<(usize, u8)>> = BTreeMap::new();
    for (e, &(k1, k2)) in edge_types.iter().enumerate() {
        ends_by_label.entry(k1).or_default().push((e, 0));
        ends_by_label.entry(k2).or_default().push((e, 1));
    }
    // randomly partition each label's end list into groups of k, one node each
    let mut end_node: Vec<[NodeId; 2]> = vec![[0, 0]; edge_types.len()];
    for (&k, ends) in ends_by_label.iter_mut() {
        ends.shuffle(rng);
        let (start, count) = span_of[&k];
        debug_assert_eq!(ends.len() as u64, k as u64 * count as u64);
        for (group, chunk) in ends.chunks_exact(k as usize).enumerate() {
            let node = start + group as u32;
            for &(e, side) in chunk {
                end_node[e][side as usize] = node;
            }
        }
    }
    let multi: Vec<(NodeId, NodeId)> = end_node.iter().map(|&[u, v]| (u, v)).collect();
    Ok((multi, covered as usize))
}

fn two_k_of_multiedges(n: usize, multi: &[(NodeId, NodeId)]) -> TwoK {
    let deg = multigraph_degrees(n, multi);
    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for &(u, v) in multi {
        *counts
            .entry(pair_key(deg[u as usize], deg[v as usize]))
            .or_default() += 1;
    }
    TwoK { n, counts }
}

/// Labeled-edge grouping: lays out `m(k1,k2)` disconnected edges, then for
/// each degree `k` randomly partitions the `k`-labeled edge-ends into groups
/// of `k`, each group becoming one node. The multigraph joint degree
/// distribution equals the target exactly; cleanup as in the 1K case.
pub fn gen_pseudograph_2k(target: &TwoK, seed: u64) -> Result<GenOutcome> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let (multi, _) = pseudograph_2k_multiedges(target, &mut rng)?;
    let pre = two_k_of_multiedges(target.n, &multi);
    let pre_dist = crate::dk::distance(
        &DkDistribution::Two(pre),
        &DkDistribution::Two(target.clone()),
    )?;
    let (graph, loops, dups) = cleanup(target.n, multi);
    Ok(GenOutcome {
        graph,
        removed_self_loops: loops,
        removed_multi_edges: dups,
        restarts: 0,
        clamped_pairs: 0,
        precleanup_distance: Some(pre_dist),
    })
}

// ---------------------------------------------------------------------------
// matching (loop-avoiding)
// ---------------------------------------------------------------------------

const MATCHING_FAIL_WINDOW: usize = 500;
const MATCHING_MAX_BACKTRACKS: usize = 32;

/// Loop-avoiding construction: the pseudograph layout, but candidate
/// connections that would create a self-loop or multi-edge are skipped. On
/// deadlock the last `2·k_max` placements are unwound; repeated deadlocks
/// trigger a restart with a fresh shuffle, up to `retries`.
pub fn gen_matching(target: &DkDistribution, seed: u64, retries: usize) -> Result<GenOutcome> {
    match target {
        DkDistribution::One(one) => gen_matching_1k(one, seed, retries),
        DkDistribution::Two(two) => gen_matching_2k(two, seed, retries),
        other => Err(Error::Capability(format!(
            "matching construction is implemented for d in 1..=2, got d={}",
            other.d()
        ))),
    }
}

pub fn gen_matching_1k(target: &OneK, seed: u64, retries: usize) -> Result<GenOutcome> {
    if target.node_total() != target.n as u64 {
        return Err(domain("1K counts do not sum to n"));
    }
    let stub_total = target.stub_total();
    if !stub_total.is_multiple_of(2) {
        return Err(domain(format!(
            "stub total {stub_total} is odd; no pairing exists"
        )));
    }
    let k_max = target.counts.keys().copied().max().unwrap_or(0) as usize;
    let classes = layout_classes(&target.counts, target.n);
    let base_stubs: Vec<NodeId> = classes
        .spans
        .iter()
        .flat_map(|&(k, start, count)| {
            (start..start + count).flat_map(move |node| std::iter::repeat_n(node, k as usize))
        })
        .collect();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut restarts = 0usize;
    loop {
        let mut stubs = base_stubs.clone();
        stubs.shuffle(&mut rng);
        let mut g = Graph::with_nodes(target.n);
        let mut placed: Vec<(NodeId, NodeId)> = Vec::with_capacity(stub_total as usize / 2);
        let mut failures = 0usize;
        let mut backtracks = 0usize;

        while !stubs.is_empty() {
            let i = rng.random_range(0..stubs.len());
            let j = rng.random_range(0..stubs.len());
            let (u, v) = (stubs[i], stubs[j]);
            if i != j && u != v && !g.has_edge(u, v) {
                g.add_edge(u, v);
                placed.push((u, v));
                let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                stubs.swap_remove(hi);
                stubs.swap_remove(lo);
                failures = 0;
                continue;
            }
            failures += 1;
            if failures >= MATCHING_FAIL_WINDOW {
                backtracks += 1;
                if backtracks > MATCHING_MAX_BACKTRACKS {
                    break;
                }
                let unwind = placed.len().min(2 * k_max.max(1));
                for _ in 0..unwind {
                    let (u, v) = placed.pop().unwrap();
                    g.remove_edge(u, v);
                    stubs.push(u);
                    stubs.push(v);
                }
                failures = 0;
            }
        }

        if stubs.is_empty() {
            return Ok(GenOutcome {
                graph: g,
                removed_self_loops: 0,
                removed_multi_edges: 0,
                restarts,
                clamped_pairs: 0,
                precleanup_distance: Some(0.0),
            });
        }
        restarts += 1;
        if restarts > retries {
            return Err(Error::Generation {
                restarts,
                msg: format!(
                    "matching deadlocked with {} stubs unplaced (degree sequence may be \
                     non-graphical or near-extremal)",
                    stubs.len()
                ),
            });
        }
    }
}

pub fn gen_matching_2k(target: &TwoK, seed: u64, retries: usize) -> Result<GenOutcome> {
    let counts = target.implied_degree_counts()?;
    let covered: u64 = counts.values().sum();
    if covered > target.n as u64 {
        return Err(domain("2K distribution implies more nodes than n"));
    }
    let k_max = counts.keys().copied().max().unwrap_or(0) as usize;
    let classes = layout_classes(&counts, target.n);
    let span_of: BTreeMap<u32, (u32, u32)> = classes
        .spans
        .iter()
        .map(|&(k, start, count)| (k, (start, count)))
        .collect();
    let base_edges: Vec<(u32, u32)> = target
        .counts
        .iter()
        .flat_map(|(&(k1, k2), &c)| std::iter::repeat_n((k1, k2), c as usize))
        .collect();
    // per-class stub pools: node id repeated once per free slot
    let base_pools: BTreeMap<u32, Vec<NodeId>> = span_of
        .iter()
        .map(|(&k, &(start, count))| {
            let pool: Vec<NodeId> = (start..start + count)
                .flat_map(|node| std::iter::repeat_n(node, k as usize))
                .collect();
            (k, pool)
        })
        .collect();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut restarts = 0usize;
    loop {
        let mut pools = base_pools.clone();
        let mut pending = base_edges.clone();
        pending.shuffle(&mut rng);
        let mut g = Graph::with_nodes(target.n);
        let mut placed: Vec<((u32, u32), (NodeId, NodeId))> = Vec::with_capacity(pending.len());
        let mut backtracks = 0usize;
        let mut dead = false;

        while let Some((k1, k2)) = pending.pop() {
            let mut connected = false;
            for _ in 0..MATCHING_FAIL_WINDOW {
                let (u, v) = {
                    if k1 == k2 {
                        let pool = &pools[&k1];
                        if pool.len() < 2 {
                            break;
                        }
                        let i = rng.random_range(0..pool.len());
                        let j = rng.random_range(0..pool.len());
                        if i == j {
                            continue;
                        }
                        (pool[i], pool[j])
                    } else {
                        let (p1, p2) = (&pools[&k1], &pools[&k2]);
                        if p1.is_empty() || p2.is_empty() {
                            break;
                        }
                        (
                            p1[rng.random_range(0..p1.len())],
                            p2[rng.random_range(0..p2.len())],
                        )
                    }
                };
                if u == v || g.has_edge(u, v) {
                    continue;
                }
                g.add_edge(u, v);
                remove_one(pools.get_mut(&k1).unwrap(), u);
                remove_one(pools.get_mut(&k2).unwrap(), v);
                placed.push(((k1, k2), (u, v)));
                connected = true;
                break;
            }
            if connected {
                continue;
            }
            // deadlock: unwind recent placements and retry them
            pending.push((k1, k2));
            backtracks += 1;
            if backtracks > MATCHING_MAX_BACKTRACKS || placed.is_empty() {
                dead = true;
                break;
            }
            let unwind = placed.len().min(2 * k_max.max(1));
            for _ in 0..unwind {
                let ((k1, k2), (u, v)) = placed.pop().unwrap();
                g.remove_edge(u, v);
                pools.get_mut(&k1).unwrap().push(u);
                pools.get_mut(&k2).unwrap().push(v);
                pending.push((k1, k2));
            }
        }

        if !dead {
            return Ok(GenOutcome {
                graph: g,
                removed_self_loops: 0,
                removed_multi_edges: 0,
                restarts,
                clamped_pairs: 0,
                precleanup_distance: Some(0.0),
            });
        }
        restarts += 1;
        if restarts > retries {
            return Err(Error::Generation {
                restarts,
                msg: format!(
                    "2K matching deadlocked with {} edges unplaced",
                    pending.len()
                ),
            });
        }
    }
}

fn remove_one(pool: &mut Vec<NodeId>, node: NodeId) {
    let pos = pool.iter().position(|&x| x == node).expect("node in pool");
    pool.swap_remove(pos);
}

// ---------------------------------------------------------------------------
// degree-sequence helper
// ---------------------------------------------------------------------------

/// Samples a power-law-ish degree distribution `P(k) ∝ k^-gamma` over
/// `1..=k_max`, adjusted so the stub total is even. Handy as generator input
/// and test fixture.
pub fn power_law_one_k(n: usize, gamma: f64, k_max: u32, seed: u64) -> OneK {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (1..=k_max).map(|k| (k as f64).powf(-gamma)).collect();
    let total: f64 = weights.iter().sum();
    let mut degrees: Vec<u32> = (0..n)
        .map(|_| {
            let mut u = rng.random::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    return i as u32 + 1;
                }
                u -= w;
            }
            k_max
        })
        .collect();
    if degrees.iter().map(|&k| k as u64).sum::<u64>() % 2 != 0 {
        let pos = degrees.iter().position(|&k| k < k_max).unwrap_or(0);
        if degrees[pos] < k_max {
            degrees[pos] += 1;
        } else {
            degrees[pos] -= 1;
        }
    }
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for k in degrees {
        *counts.entry(k).or_default() += 1;
    }
    OneK { n, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dk::{extract, ThreeK};
    use crate::testutil::paw;

    fn one_k(n: usize, pairs: &[(u32, u64)]) -> OneK {
        OneK {
            n,
            counts: pairs.iter().copied().collect(),
        }
    }

    /// Erdős–Gallai graphicality test.
    fn is_graphical(mut degrees: Vec<u64>) -> bool {
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        let total: u64 = degrees.iter().sum();
        if !total.is_multiple_of(2) {
            return false;
        }
        let n = degrees.len() as u64;
        for k in 1..=n {
            let lhs: u64 = degrees[..k as usize].iter().sum();
            let rhs: u64 = k * (k - 1)
                + degrees[k as usize..]
                    .iter()
                    .map(|&d| d.min(k))
                    .sum::<u64>();
            if lhs > rhs {
                return false;
            }
        }
        true
    }

    #[test]
    fn stochastic_zero_k() {
        let target = DkDistribution::Zero(crate::dk::ZeroK { n: 200, kbar: 4.0 });
        let out = gen_stochastic(&target, 7).unwrap();
        assert_eq!(out.graph.n(), 200);
        assert!(out.graph.m() > 0);

        let empty = DkDistribution::Zero(crate::dk::ZeroK { n: 50, kbar: 0.0 });
        assert_eq!(gen_stochastic(&empty, 7).unwrap().graph.m(), 0);
    }

    #[test]
    fn stochastic_uniform_1k_reduces_to_0k_formula() {
        // all labels equal: p(c, c) = c/n
        let c = 4u32;
        let n = 100usize;
        assert_eq!(p_1k(c, c, n, c as f64), c as f64 / n as f64);
    }

    #[test]
    fn stochastic_1k_edge_count_mean() {
        let target = one_k(300, &[(2, 200), (5, 80), (10, 20)]);
        let expected = target.stub_total() as f64 / 2.0;
        let runs = 60;
        let mut total = 0.0;
        let mut sq = 0.0;
        for seed in 0..runs {
            let out = gen_stochastic(&DkDistribution::One(target.clone()), seed).unwrap();
            let m = out.graph.m() as f64;
            total += m;
            sq += m * m;
        }
        let mean = total / runs as f64;
        let var = (sq / runs as f64 - mean * mean).max(0.0);
        let se = (var / runs as f64).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * se.max(1.0),
            "mean {mean} expected {expected} se {se}"
        );
    }

    #[test]
    fn stochastic_probability_clamping_is_counted() {
        // one node of degree 50 and one of degree 49 in a tiny graph pushes
        // p_1k over 1
        let target = one_k(4, &[(50, 1), (49, 1), (1, 2)]);
        let out = gen_stochastic(&DkDistribution::One(target), 3).unwrap();
        assert!(out.clamped_pairs > 0);
    }

    #[test]
    fn pseudograph_1k_single_edge() {
        let out = gen_pseudograph_1k(&one_k(2, &[(1, 2)]), 42).unwrap();
        assert_eq!(out.graph.m(), 1);
        assert_eq!(out.precleanup_distance, Some(0.0));
    }

    #[test]
    fn pseudograph_1k_multigraph_sequence_exact() {
        let target = one_k(90, &[(1, 60), (3, 20), (6, 10)]);
        for seed in 0..10 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let multi = pseudograph_1k_multiedges(&target, &mut rng).unwrap();
            let deg = multigraph_degrees(90, &multi);
            assert_eq!(one_k_of_degrees(90, &deg), target);
        }
    }

    #[test]
    fn pseudograph_rejects_odd_stub_total() {
        assert!(gen_pseudograph_1k(&one_k(3, &[(1, 3)]), 1).is_err());
    }

    #[test]
    fn pseudograph_2k_trivial_and_exact() {
        let single = TwoK {
            n: 2,
            counts: [((1, 1), 1)].into_iter().collect(),
        };
        let out = gen_pseudograph_2k(&single, 5).unwrap();
        assert_eq!(out.graph.m(), 1);

        let tri = TwoK {
            n: 3,
            counts: [((2, 2), 3)].into_iter().collect(),
        };
        for seed in 0..20 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let (multi, _) = pseudograph_2k_multiedges(&tri, &mut rng).unwrap();
            assert_eq!(two_k_of_multiedges(3, &multi), tri);
        }
    }

    #[test]
    fn pseudograph_2k_inconsistent_target_names_degree() {
        let bad = TwoK {
            n: 5,
            counts: [((2, 3), 1)].into_iter().collect(),
        };
        let err = gen_pseudograph_2k(&bad, 1).unwrap_err();
        assert!(err.to_string().contains("degree 2") || err.to_string().contains("degree 3"));
    }

    #[test]
    fn pseudograph_2k_unique_high_degree_pair_gets_one_link() {
        // exactly one (6,7) edge in the target stays exactly one link
        let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
        counts.insert((6, 7), 1);
        counts.insert((1, 6), 5);
        counts.insert((1, 7), 6);
        counts.insert((1, 1), 4);
        let target = TwoK { n: 21, counts };
        for seed in 0..10 {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let (multi, _) = pseudograph_2k_multiedges(&target, &mut rng).unwrap();
            assert_eq!(two_k_of_multiedges(21, &multi).counts[&(6, 7)], 1);
        }
    }

    #[test]
    fn matching_1k_trivial() {
        let out = gen_matching_1k(&one_k(2, &[(1, 2)]), 11, 8).unwrap();
        assert_eq!(out.graph.m(), 1);
        assert_eq!(out.restarts, 0);
    }

    #[test]
    fn matching_1k_exhaustive_small_graphical_sequences() {
        // every graphical sequence on up to 6 nodes with degrees <= 3
        fn sequences(n: usize, max_k: u32) -> Vec<Vec<u32>> {
            let mut out = vec![vec![]];
            for _ in 0..n {
                let mut next = Vec::new();
                for base in &out {
                    let floor = base.last().copied().unwrap_or(1);
                    for k in floor..=max_k {
                        let mut s = base.clone();
                        s.push(k);
                        next.push(s);
                    }
                }
                out = next;
            }
            out
        }
        for seq in sequences(6, 3) {
            if !is_graphical(seq.iter().map(|&k| k as u64).collect()) {
                continue;
            }
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for &k in &seq {
                *counts.entry(k).or_default() += 1;
            }
            let target = OneK {
                n: seq.len(),
                counts,
            };
            let out = gen_matching_1k(&target, 123, 16)
                .unwrap_or_else(|e| panic!("sequence {seq:?} failed: {e}"));
            assert_eq!(
                extract(&out.graph, 1).unwrap().as_one().unwrap(),
                &target,
                "sequence {seq:?}"
            );
        }
    }

    #[test]
    fn matching_2k_paw_target_exact() {
        let target = extract(&paw(), 2).unwrap();
        let out = gen_matching(&target, 9, 16).unwrap();
        assert_eq!(extract(&out.graph, 2).unwrap(), target);
    }

    #[test]
    fn matching_fails_on_non_graphical_input() {
        // K2-plus-isolated-style impossibility: two nodes of degree 3 among 2 nodes
        let target = one_k(2, &[(3, 2)]);
        assert!(matches!(
            gen_matching_1k(&target, 1, 4),
            Err(Error::Generation { .. })
        ));
    }

    #[test]
    fn generation_is_deterministic() {
        let target = power_law_one_k(150, 2.4, 12, 99);
        for method in [GenMethod::Pseudograph, GenMethod::Matching] {
            let spec = GenSpec::new(method, DkDistribution::One(target.clone()), 1234);
            let a = spec.generate().unwrap();
            let b = spec.generate().unwrap();
            assert_eq!(a.graph, b.graph);
        }
        let spec = GenSpec::new(
            GenMethod::Stochastic,
            DkDistribution::One(target.clone()),
            77,
        );
        assert_eq!(spec.generate().unwrap().graph, spec.generate().unwrap().graph);
    }

    #[test]
    fn gen_spec_rejects_incompatible_methods() {
        let three = DkDistribution::Three(ThreeK::default());
        assert!(GenSpec::new(GenMethod::Pseudograph, three.clone(), 1)
            .generate()
            .is_err());
        assert!(GenSpec::new(GenMethod::Stochastic, three, 1).generate().is_err());
    }

    #[test]
    fn power_law_sequence_is_even_and_bounded() {
        for seed in 0..5 {
            let one = power_law_one_k(500, 2.5, 20, seed);
            assert_eq!(one.node_total(), 500);
            assert_eq!(one.stub_total() % 2, 0);
            assert!(one.counts.keys().all(|&k| (1..=20).contains(&k)));
        }
    }

    #[test]
    fn unrank_pair_is_consistent() {
        for nc in [2u64, 3, 5, 17] {
            let mut seen = Vec::new();
            for idx in 0..nc * (nc - 1) / 2 {
                let (i, j) = unrank_pair(idx, nc);
                assert!(i < j && j < nc, "idx {idx} nc {nc} -> ({i},{j})");
                seen.push((i, j));
            }
            seen.dedup();
            assert_eq!(seen.len() as u64, nc * (nc - 1) / 2);
        }
    }
}

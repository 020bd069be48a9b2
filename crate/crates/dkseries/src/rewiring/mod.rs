//! dK-preserving edge-swap Markov chains.
//!
//! Three modes over one proposal engine:
//!
//! - **randomize**: accept every legal dK-preserving swap; budget is 10× the
//!   number of possible initial rewirings (minus the trivially-isomorphic
//!   ones), followed by a convergence check that runs further swaps and
//!   verifies a metric panel moved < 2%
//! - **target**: accept swaps that decrease the squared-count distance `D_d`
//!   to a target distribution; at temperature `T > 0` a worsening step is
//!   accepted with probability `e^(-ΔD/T)` (Metropolis), `T → ∞` recovers
//!   randomizing, `T = 0` is pure descent
//! - **explore**: greedy hill-climb of a scalar objective (`S` under
//!   1K-preserving moves, `S₂` or `C̄` under 2K-preserving moves)
//!
//! Proposals at level d: d=0 moves a random edge to a random unconnected
//! pair; d=1 crosses two random edges (degree-preserving by construction);
//! d=2 additionally requires the four edge types to balance (equal-degree
//! endpoints on different edges); d=3 keeps a d=2 proposal only when its
//! local wedge and triangle deltas are all zero. A proposal is illegal if it
//! would create a self-loop or a multi-edge.

pub mod delta;

use crate::dk::{self, extract, DkDistribution, PairKey, TripleKey};
use crate::error::{domain, Error, Result};
use crate::graph::{canonical, check_cross, CrossMode, Graph, NodeId};
use crate::metrics;
use delta::{jdd_delta, local_delta, CountsState, LocalDelta};
use num::{BigInt, BigRational, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// proposals
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum ProposalKind {
    Cross { i1: usize, i2: usize },
    Move { i: usize },
}

/// A legal candidate swap: the edges to remove and the edges to add.
#[derive(Debug, Clone, Copy)]
pub struct Proposal {
    kind: ProposalKind,
    removed: [(NodeId, NodeId); 2],
    added: [(NodeId, NodeId); 2],
    npairs: u8,
}

impl Proposal {
    pub fn removed(&self) -> &[(NodeId, NodeId)] {
        &self.removed[..self.npairs as usize]
    }

    pub fn added(&self) -> &[(NodeId, NodeId)] {
        &self.added[..self.npairs as usize]
    }
}

fn apply_raw(g: &mut Graph, removed: &[(NodeId, NodeId)], added: &[(NodeId, NodeId)]) {
    for &(u, v) in removed {
        let ok = g.remove_edge(u, v);
        debug_assert!(ok);
    }
    for &(u, v) in added {
        let ok = g.add_edge(u, v);
        debug_assert!(ok);
    }
}

/// Proposal engine: owns the working graph, its edge list (for O(1) random
/// edge choice), and the chain RNG.
pub struct Rewirer {
    g: Graph,
    edges: Vec<(NodeId, NodeId)>,
    rng: ChaCha12Rng,
}

impl Rewirer {
    pub fn new(g: &Graph, seed: u64) -> Self {
        Rewirer {
            edges: g.edges(),
            g: g.clone(),
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.g
    }

    pub fn into_graph(self) -> Graph {
        self.g
    }

    /// Draws one candidate swap at preservation level `d`. `Ok(None)` means
    /// the candidate was illegal or not d-preserving (a rejected step).
    pub fn propose_swap(&mut self, d: u8) -> Result<Option<Proposal>> {
        match d {
            0 => self.propose_move(),
            1..=3 => self.propose_cross(d),
            other => Err(domain(format!("d must be in 0..=3, got {other}"))),
        }
    }

    fn propose_move(&mut self) -> Result<Option<Proposal>> {
        let n = self.g.n();
        if self.edges.is_empty() || n < 2 {
            return Err(domain("0K move requires at least one edge and two nodes"));
        }
        let i = self.rng.random_range(0..self.edges.len());
        for _ in 0..64 {
            let u = self.rng.random_range(0..n) as NodeId;
            let v = self.rng.random_range(0..n) as NodeId;
            if u == v || self.g.has_edge(u, v) {
                continue;
            }
            let pair = canonical(u, v);
            return Ok(Some(Proposal {
                kind: ProposalKind::Move { i },
                removed: [self.edges[i], self.edges[i]],
                added: [pair, pair],
                npairs: 1,
            }));
        }
        Ok(None)
    }

    fn propose_cross(&mut self, d: u8) -> Result<Option<Proposal>> {
        let m = self.edges.len();
        if m < 2 {
            return Err(domain("edge crossing requires at least two edges"));
        }
        let i1 = self.rng.random_range(0..m);
        let mut i2 = self.rng.random_range(0..m);
        while i2 == i1 {
            i2 = self.rng.random_range(0..m);
        }
        let mode = if self.rng.random::<bool>() {
            CrossMode::A
        } else {
            CrossMode::B
        };
        let (e1, e2) = (self.edges[i1], self.edges[i2]);
        let Ok(added) = check_cross(&self.g, e1, e2, mode) else {
            return Ok(None);
        };
        let proposal = Proposal {
            kind: ProposalKind::Cross { i1, i2 },
            removed: [e1, e2],
            added,
            npairs: 2,
        };
        if d >= 2 && !jdd_delta(&self.g, proposal.removed(), proposal.added()).is_empty() {
            return Ok(None);
        }
        if d >= 3 && !local_delta(&self.g, proposal.removed(), proposal.added()).is_zero() {
            return Ok(None);
        }
        Ok(Some(proposal))
    }

    pub fn apply(&mut self, p: &Proposal) {
        apply_raw(&mut self.g, p.removed(), p.added());
        match p.kind {
            ProposalKind::Cross { i1, i2 } => {
                self.edges[i1] = p.added[0];
                self.edges[i2] = p.added[1];
            }
            ProposalKind::Move { i } => {
                self.edges[i] = p.added[0];
            }
        }
    }

    fn accept_chance(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

// ---------------------------------------------------------------------------
// counting initial rewirings
// ---------------------------------------------------------------------------

pub(crate) struct InitialRewirings {
    pub legal: u64,
    pub trivially_isomorphic: u64,
}

/// Exhaustive count of distinct dK-preserving swap candidates on `g`.
///
/// d=0 counts (edge, unconnected pair) combinations in closed form. For
/// d ≥ 1 every unordered edge pair is tried in both crossing modes. The
/// trivially-isomorphic classes are degree-1 endpoint exchanges between
/// `(1,k)` and `(1,k')` edges (identity crossings are already illegal, since
/// re-adding a swapped-out edge counts as a multi-edge).
pub(crate) fn initial_rewirings(g: &Graph, d: u8) -> Result<InitialRewirings> {
    let m = g.m() as u128;
    if d == 0 {
        let n = g.n() as u128;
        let pairs = n * n.saturating_sub(1) / 2;
        let legal = m * pairs.saturating_sub(m);
        return Ok(InitialRewirings {
            legal: u64::try_from(legal).map_err(|_| domain("count overflows u64"))?,
            trivially_isomorphic: 0,
        });
    }
    if d > 3 {
        return Err(domain(format!("d must be in 0..=3, got {d}")));
    }
    let edges = g.edges();
    let deg = |v: NodeId| g.degree_of(v);
    let mut legal = 0u64;
    let mut trivial = 0u64;
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let (a, b) = edges[i];
            let (c, dd) = edges[j];
            for mode in [CrossMode::A, CrossMode::B] {
                let Ok(added) = check_cross(g, edges[i], edges[j], mode) else {
                    continue;
                };
                let removed = [edges[i], edges[j]];
                if d >= 2 && !jdd_delta(g, &removed, &added).is_empty() {
                    continue;
                }
                if d >= 3 && !local_delta(g, &removed, &added).is_zero() {
                    continue;
                }
                legal += 1;
                let leaf_exchange = match mode {
                    CrossMode::A => {
                        (deg(b) == 1 && deg(dd) == 1) || (deg(a) == 1 && deg(c) == 1)
                    }
                    CrossMode::B => {
                        (deg(b) == 1 && deg(c) == 1) || (deg(a) == 1 && deg(dd) == 1)
                    }
                };
                if leaf_exchange {
                    trivial += 1;
                }
            }
        }
    }
    Ok(InitialRewirings {
        legal,
        trivially_isomorphic: trivial,
    })
}

/// Number of possible initial dK-preserving rewirings; with
/// `ignore_trivial_isomorphisms`, swaps provably yielding isomorphic graphs
/// are subtracted.
pub fn count_initial_rewirings(g: &Graph, d: u8, ignore_trivial_isomorphisms: bool) -> Result<u64> {
    let counts = initial_rewirings(g, d)?;
    Ok(if ignore_trivial_isomorphisms {
        counts.legal - counts.trivially_isomorphic
    } else {
        counts.legal
    })
}

// ---------------------------------------------------------------------------
// run traces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub step: u64,
    pub value: f64,
    pub acceptance_rate: f64,
}

/// Observability record of one rewiring chain.
#[derive(Debug, Clone, Default)]
pub struct RunTrace {
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    /// sampled (step, D_d) in target/randomize modes
    pub distance_series: Vec<TracePoint>,
    /// sampled (step, objective) in explore mode
    pub objective_series: Vec<TracePoint>,
    pub final_distance: f64,
    pub final_objective: Option<f64>,
    pub stalled: bool,
    /// randomize-mode convergence verification outcome
    pub converged: Option<bool>,
    pub warning: Option<String>,
    /// legal proposals with ΔD ≥ 0 (target mode)
    pub proposed_nonimproving: u64,
    /// accepted among those (Metropolis)
    pub accepted_nonimproving: u64,
}

impl RunTrace {
    fn rate(&self) -> f64 {
        let total = self.accepted_steps + self.rejected_steps;
        if total == 0 {
            0.0
        } else {
            self.accepted_steps as f64 / total as f64
        }
    }

    fn sample(&mut self, series: Series, step: u64, value: f64) {
        let point = TracePoint {
            step,
            value,
            acceptance_rate: self.rate(),
        };
        match series {
            Series::Distance => self.distance_series.push(point),
            Series::Objective => self.objective_series.push(point),
        }
    }

    /// `step,value,acceptance_rate` rows; the value column is `D_d` in
    /// target/randomize mode or the objective in explore mode.
    pub fn to_csv(&self) -> String {
        let series = if self.objective_series.is_empty() {
            &self.distance_series
        } else {
            &self.objective_series
        };
        let mut out = String::from("step,value,acceptance_rate\n");
        for p in series {
            out.push_str(&format!("{},{},{}\n", p.step, p.value, p.acceptance_rate));
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Series {
    Distance,
    Objective,
}

// ---------------------------------------------------------------------------
// incremental distance tracking
// ---------------------------------------------------------------------------

/// Incrementally maintained squared-count distance `D_d` between a working
/// graph and a fixed target distribution (d = 2 or 3). Updates are exact
/// integer arithmetic; `distance()` always equals a full re-extraction.
pub enum DistanceTracker {
    Two(CountsState<PairKey>),
    Three {
        wedges: CountsState<TripleKey>,
        triangles: CountsState<TripleKey>,
    },
}

/// The per-proposal payload needed to apply a tracked update.
pub enum TrackedDelta {
    Two(BTreeMap<PairKey, i64>),
    Three(LocalDelta),
}

impl DistanceTracker {
    pub fn new(start: &Graph, target: &DkDistribution) -> Result<Self> {
        match target {
            DkDistribution::Two(t) => {
                let cur = extract(start, 2)?;
                Ok(DistanceTracker::Two(CountsState::new(
                    &cur.as_two()?.counts,
                    &t.counts,
                )))
            }
            DkDistribution::Three(t) => {
                let cur = extract(start, 3)?;
                let cur = cur.as_three()?;
                Ok(DistanceTracker::Three {
                    wedges: CountsState::new(&cur.wedge_counts, &t.wedge_counts),
                    triangles: CountsState::new(&cur.triangle_counts, &t.triangle_counts),
                })
            }
            other => Err(domain(format!(
                "distance tracking supports targets at d=2 or d=3, got d={}",
                other.d()
            ))),
        }
    }

    pub fn distance(&self) -> i128 {
        match self {
            DistanceTracker::Two(s) => s.dist(),
            DistanceTracker::Three { wedges, triangles } => wedges.dist() + triangles.dist(),
        }
    }

    /// Evaluates a candidate replacement: the distance change and the payload
    /// to pass to [`DistanceTracker::apply`] if accepted. `g` must be the
    /// graph before the swap.
    pub fn eval(
        &self,
        g: &Graph,
        removed: &[(NodeId, NodeId)],
        added: &[(NodeId, NodeId)],
    ) -> (i128, TrackedDelta) {
        match self {
            DistanceTracker::Two(s) => {
                let d = jdd_delta(g, removed, added);
                (s.delta_dist(&d), TrackedDelta::Two(d))
            }
            DistanceTracker::Three { wedges, triangles } => {
                let d = local_delta(g, removed, added);
                let dd = wedges.delta_dist(&d.wedges) + triangles.delta_dist(&d.triangles);
                (dd, TrackedDelta::Three(d))
            }
        }
    }

    pub fn apply(&mut self, delta: &TrackedDelta) {
        match (self, delta) {
            (DistanceTracker::Two(s), TrackedDelta::Two(d)) => s.apply(d),
            (DistanceTracker::Three { wedges, triangles }, TrackedDelta::Three(d)) => {
                wedges.apply(&d.wedges);
                triangles.apply(&d.triangles);
            }
            _ => unreachable!("tracker/delta level mismatch"),
        }
    }
}

// ---------------------------------------------------------------------------
// randomize
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct RandomizeOptions {
    /// budget factor over the possible initial rewirings
    pub multiplier: f64,
    /// extra-steps factor for the convergence check
    pub verification_factor: f64,
    /// skip the exhaustive count and use this accepted-swap budget directly
    pub budget_override: Option<u64>,
    /// consecutive rejections before declaring a stall; default 100·m
    pub stall_window: Option<u64>,
}

impl Default for RandomizeOptions {
    fn default() -> Self {
        RandomizeOptions {
            multiplier: 10.0,
            verification_factor: 1.0,
            budget_override: None,
            stall_window: None,
        }
    }
}

/// Metric panel used by the randomize convergence check.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricPanel {
    pub r: Option<f64>,
    pub cbar: f64,
    pub dbar: f64,
    pub lambda1: f64,
}

impl MetricPanel {
    pub fn compute(g: &Graph) -> Result<Self> {
        let gcc = crate::graph::giant_connected_component(g)?.graph;
        let r = if gcc.m() == 0 {
            None
        } else {
            metrics::assortativity(&gcc)?
        };
        let cbar = metrics::clustering(&gcc).cbar;
        let (dbar, lambda1) = if gcc.n() >= 2 {
            let d = metrics::distance_distribution(&gcc)?;
            let (l1, _) = crate::spectrum::lambda_extremes_auto(&gcc)?;
            (d.dbar, l1)
        } else {
            (0.0, 0.0)
        };
        Ok(MetricPanel {
            r,
            cbar,
            dbar,
            lambda1,
        })
    }

    /// All panel entries within `rel` relative change.
    pub fn within(&self, other: &Self, rel: f64) -> bool {
        let close = |x: f64, y: f64| (x - y).abs() <= rel * x.abs().max(y.abs()) + 1e-9;
        let r_ok = match (self.r, other.r) {
            (None, None) => true,
            (Some(x), Some(y)) => close(x, y),
            _ => false,
        };
        r_ok && close(self.cbar, other.cbar)
            && close(self.dbar, other.dbar)
            && close(self.lambda1, other.lambda1)
    }
}

fn run_accepting_phase(
    rewirer: &mut Rewirer,
    d: u8,
    budget: u64,
    stall_window: u64,
    stride: u64,
    trace: &mut RunTrace,
) -> Result<()> {
    let mut accepted_here = 0u64;
    let mut stall = 0u64;
    while accepted_here < budget {
        match rewirer.propose_swap(d)? {
            Some(p) => {
                rewirer.apply(&p);
                trace.accepted_steps += 1;
                accepted_here += 1;
                stall = 0;
                if accepted_here.is_multiple_of(stride) {
                    let step = trace.accepted_steps + trace.rejected_steps;
                    trace.sample(Series::Distance, step, 0.0);
                }
            }
            None => {
                trace.rejected_steps += 1;
                stall += 1;
                if stall >= stall_window {
                    trace.stalled = true;
                    trace.warning = Some(format!(
                        "stalled after {stall} consecutive rejected proposals"
                    ));
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

/// dK-randomizing rewiring: `multiplier ×` (possible initial rewirings minus
/// trivially-isomorphic ones) accepted swaps, then a convergence check that
/// runs `verification_factor ×` as many further swaps and verifies the
/// metric panel (r, C̄, d̄, λ₁) changed by less than 2%; on failure the run
/// is extended once and re-verified. The output's dK-distribution equals the
/// input's exactly.
pub fn randomize(
    g: &Graph,
    d: u8,
    seed: u64,
    opts: &RandomizeOptions,
) -> Result<(Graph, RunTrace)> {
    let mut trace = RunTrace::default();
    let budget = match opts.budget_override {
        Some(b) => b,
        None => {
            let counts = initial_rewirings(g, d)?;
            ((counts.legal - counts.trivially_isomorphic) as f64 * opts.multiplier).round() as u64
        }
    };
    if budget == 0 {
        trace.warning = Some(format!(
            "no non-trivial {d}K-preserving rewirings exist; graph returned unchanged"
        ));
        return Ok((g.clone(), trace));
    }
    let stall_window = opts.stall_window.unwrap_or(100 * g.m().max(1) as u64);
    let stride = (budget / 256).max(1);
    let mut rewirer = Rewirer::new(g, seed);
    run_accepting_phase(&mut rewirer, d, budget, stall_window, stride, &mut trace)?;

    let verify_budget = (budget as f64 * opts.verification_factor).round() as u64;
    if verify_budget > 0 && !trace.stalled {
        let panel_before = MetricPanel::compute(rewirer.graph())?;
        run_accepting_phase(&mut rewirer, d, verify_budget, stall_window, stride, &mut trace)?;
        let panel_after = MetricPanel::compute(rewirer.graph())?;
        if panel_before.within(&panel_after, 0.02) {
            trace.converged = Some(true);
        } else {
            // extend once and re-verify
            run_accepting_phase(&mut rewirer, d, verify_budget, stall_window, stride, &mut trace)?;
            let panel_final = MetricPanel::compute(rewirer.graph())?;
            let ok = panel_after.within(&panel_final, 0.02);
            trace.converged = Some(ok);
            if !ok {
                trace.warning = Some(
                    "convergence check failed twice: metric panel still drifting > 2%".into(),
                );
            }
        }
    }
    let step = trace.accepted_steps + trace.rejected_steps;
    trace.sample(Series::Distance, step, 0.0);
    Ok((rewirer.into_graph(), trace))
}

// ---------------------------------------------------------------------------
// targeting
// ---------------------------------------------------------------------------

/// Temperature schedule: `(T, proposal budget)` phases, run in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule(pub Vec<(f64, u64)>);

impl Schedule {
    pub fn constant(t: f64, steps: u64) -> Self {
        Schedule(vec![(t, steps)])
    }

    /// Parses `"T1:steps1,T2:steps2,…"`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut phases = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            let (t, steps) = part
                .split_once(':')
                .ok_or_else(|| domain(format!("schedule phase {part:?} must be T:steps")))?;
            let t: f64 = t
                .trim()
                .parse()
                .map_err(|_| domain(format!("bad temperature {t:?}")))?;
            if t.is_nan() || t < 0.0 || !t.is_finite() {
                return Err(domain(format!("temperature must be finite and >= 0, got {t}")));
            }
            let steps: u64 = steps
                .trim()
                .parse()
                .map_err(|_| domain(format!("bad step count {steps:?}")))?;
            phases.push((t, steps));
        }
        if phases.is_empty() {
            return Err(domain("empty schedule"));
        }
        Ok(Schedule(phases))
    }

    pub fn total_steps(&self) -> u64 {
        self.0.iter().map(|&(_, s)| s).sum()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(t, s)| format!("{t}:{s}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[derive(Debug, Clone, Default)]
pub struct TargetOptions {
    /// accept ΔD = 0 moves at T = 0 (off by default: a step must strictly
    /// decrease the distance)
    pub allow_plateau: bool,
    /// consecutive non-accepted proposals before stopping; default 100·m
    pub stall_window: Option<u64>,
    pub sample_stride: Option<u64>,
}

fn check_compatibility(start: &Graph, d_preserve: u8, target: &DkDistribution) -> Result<()> {
    if target.n() != start.n() {
        return Err(domain(format!(
            "target has n={} but the start graph has n={}",
            target.n(),
            start.n()
        )));
    }
    match (d_preserve, target) {
        (1, DkDistribution::Two(_)) => {
            let implied = dk::project(target)?;
            let actual = extract(start, 1)?;
            if implied != actual {
                return Err(domain(
                    "start graph degree distribution does not match the target 2K projection",
                ));
            }
        }
        (1, DkDistribution::Three(t)) | (2, DkDistribution::Three(t)) => {
            let centered: u64 = start
                .degrees()
                .iter()
                .map(|&k| k as u64 * (k as u64).saturating_sub(1) / 2)
                .sum();
            if t.wedge_total() + 3 * t.triangle_total() != centered {
                return Err(domain(
                    "target wedge+triangle totals are inconsistent with the start graph's \
                     degree sequence",
                ));
            }
            if d_preserve == 2 {
                let mut implied = t.to_jdd()?.counts;
                let actual = extract(start, 2)?;
                let mut actual = actual.as_two()?.counts.clone();
                // (1,1) edges are invisible to the 3K counts
                implied.remove(&(1, 1));
                actual.remove(&(1, 1));
                if implied != actual {
                    return Err(domain(
                        "start graph joint degree distribution does not match the target 3K",
                    ));
                }
            }
        }
        _ => {
            return Err(Error::Capability(format!(
                "targeting supports (d_preserve, d_target) in {{(1,2), (1,3), (2,3)}}, \
                 got ({d_preserve}, {})",
                target.d()
            )))
        }
    }
    Ok(())
}

/// dK-targeting d'K-preserving rewiring: walks from `start` toward `target`
/// accepting distance-decreasing swaps (and, at `T > 0`, worse swaps with
/// Metropolis probability). Returns the best-seen graph and the run trace.
pub fn target_rewire(
    start: &Graph,
    d_preserve: u8,
    target: &DkDistribution,
    schedule: &Schedule,
    seed: u64,
    opts: &TargetOptions,
) -> Result<(Graph, RunTrace)> {
    check_compatibility(start, d_preserve, target)?;
    let mut tracker = DistanceTracker::new(start, target)?;
    let mut trace = RunTrace::default();
    let mut best_dist = tracker.distance();
    trace.sample(Series::Distance, 0, best_dist as f64);
    if best_dist == 0 {
        trace.final_distance = 0.0;
        return Ok((start.clone(), trace));
    }

    let stall_window = opts.stall_window.unwrap_or(100 * start.m().max(1) as u64);
    let stride = opts
        .sample_stride
        .unwrap_or((schedule.total_steps() / 512).max(1));
    let mut rewirer = Rewirer::new(start, seed);
    let mut history: Vec<Proposal> = Vec::new();
    let mut best_len = 0usize;
    let mut step = 0u64;
    let mut stall = 0u64;

    'outer: for &(temperature, steps) in &schedule.0 {
        for _ in 0..steps {
            step += 1;
            let proposal = rewirer.propose_swap(d_preserve)?;
            let mut accepted = false;
            if let Some(p) = proposal {
                let (dd, payload) = tracker.eval(rewirer.graph(), p.removed(), p.added());
                if dd >= 0 {
                    trace.proposed_nonimproving += 1;
                }
                let accept = if dd < 0 {
                    true
                } else if temperature > 0.0 {
                    rewirer.accept_chance() < (-(dd as f64) / temperature).exp()
                } else {
                    dd == 0 && opts.allow_plateau
                };
                if accept {
                    if dd >= 0 {
                        trace.accepted_nonimproving += 1;
                    }
                    rewirer.apply(&p);
                    tracker.apply(&payload);
                    history.push(p);
                    accepted = true;
                    let dist = tracker.distance();
                    if dist < best_dist {
                        best_dist = dist;
                        best_len = history.len();
                    }
                    if dist == 0 {
                        trace.accepted_steps += 1;
                        break 'outer;
                    }
                }
            }
            if accepted {
                trace.accepted_steps += 1;
                stall = 0;
            } else {
                trace.rejected_steps += 1;
                stall += 1;
                if stall >= stall_window {
                    trace.stalled = true;
                    break 'outer;
                }
            }
            if step.is_multiple_of(stride) {
                trace.sample(Series::Distance, step, tracker.distance() as f64);
            }
        }
    }

    trace.final_distance = best_dist as f64;
    trace.sample(Series::Distance, step, best_dist as f64);
    if trace.stalled && best_dist > 0 {
        trace.warning = Some(format!(
            "stalled at D={best_dist} > 0: no accepted move within the stall window \
             (possible nonergodicity at this temperature)"
        ));
    }

    let graph = if best_len == history.len() {
        rewirer.into_graph()
    } else {
        let mut g = start.clone();
        for p in &history[..best_len] {
            apply_raw(&mut g, p.removed(), p.added());
        }
        g
    };
    Ok((graph, trace))
}

// ---------------------------------------------------------------------------
// exploration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// likelihood `S` (1K-preserving)
    S,
    /// second-order likelihood `S₂` (2K-preserving)
    S2,
    /// mean clustering `C̄` (2K-preserving)
    Cbar,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::S => write!(f, "S"),
            Objective::S2 => write!(f, "S2"),
            Objective::Cbar => write!(f, "Cbar"),
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(Objective::S),
            "S2" => Ok(Objective::S2),
            "Cbar" => Ok(Objective::Cbar),
            other => Err(domain(format!("objective must be S, S2, or Cbar, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Min => write!(f, "min"),
            Direction::Max => write!(f, "max"),
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Direction::Min),
            "max" => Ok(Direction::Max),
            other => Err(domain(format!("direction must be min or max, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExploreOptions {
    /// consecutive non-improving proposals before declaring a local optimum;
    /// default 100·m
    pub probe_window: Option<u64>,
    pub sample_stride: Option<u64>,
}

enum ObjectiveState {
    Integer(i128),
    Clustering { tri: Vec<i64>, denom: Vec<u64> },
}

impl ObjectiveState {
    fn value(&self, n: usize) -> f64 {
        match self {
            ObjectiveState::Integer(v) => *v as f64,
            ObjectiveState::Clustering { tri, denom } => {
                let sum: f64 = tri
                    .iter()
                    .zip(denom)
                    .map(|(&t, &d)| if d == 0 { 0.0 } else { t as f64 / d as f64 })
                    .sum();
                sum / n as f64
            }
        }
    }
}

/// Greedy dK-space exploration: accepts a d-preserving swap only when it
/// strictly improves the objective in the chosen direction; stops at the
/// proposal budget or at a local optimum.
pub fn explore(
    g: &Graph,
    d_preserve: u8,
    objective: Objective,
    direction: Direction,
    seed: u64,
    budget: u64,
    opts: &ExploreOptions,
) -> Result<(Graph, RunTrace)> {
    match (d_preserve, objective) {
        (1, Objective::S) | (2, Objective::S2) | (2, Objective::Cbar) => {}
        _ => {
            return Err(domain(format!(
                "exploration supports (d, objective) in {{(1, S), (2, S2), (2, Cbar)}}, \
                 got ({d_preserve}, {objective})"
            )))
        }
    }
    let mut state = match objective {
        Objective::S => ObjectiveState::Integer(metrics::likelihood_s(g) as i128),
        Objective::S2 => ObjectiveState::Integer(metrics::second_order_likelihood(g) as i128),
        Objective::Cbar => {
            let tri: Vec<i64> = metrics::triangles_per_node(g)
                .into_iter()
                .map(|t| t as i64)
                .collect();
            let denom: Vec<u64> = g
                .degrees()
                .iter()
                .map(|&k| k as u64 * (k as u64).saturating_sub(1) / 2)
                .collect();
            ObjectiveState::Clustering { tri, denom }
        }
    };

    let mut trace = RunTrace::default();
    let probe_window = opts.probe_window.unwrap_or(100 * g.m().max(1) as u64);
    let stride = opts.sample_stride.unwrap_or((budget / 512).max(1));
    let mut rewirer = Rewirer::new(g, seed);
    trace.sample(Series::Objective, 0, state.value(g.n()));
    let mut no_improvement = 0u64;

    for step in 1..=budget {
        let mut improved = false;
        if let Some(p) = rewirer.propose_swap(d_preserve)? {
            match &mut state {
                ObjectiveState::Integer(cur) => {
                    let graph = rewirer.graph();
                    let delta: i128 = match objective {
                        Objective::S => {
                            let prod = |(u, v): (NodeId, NodeId)| {
                                graph.degree_of(u) as i128 * graph.degree_of(v) as i128
                            };
                            p.added().iter().copied().map(prod).sum::<i128>()
                                - p.removed().iter().copied().map(prod).sum::<i128>()
                        }
                        _ => {
                            let local = local_delta(graph, p.removed(), p.added());
                            local
                                .wedges
                                .iter()
                                .map(|(&(a, _, b), &c)| c as i128 * a as i128 * b as i128)
                                .sum()
                        }
                    };
                    let accept = match direction {
                        Direction::Max => delta > 0,
                        Direction::Min => delta < 0,
                    };
                    if accept {
                        *cur += delta;
                        rewirer.apply(&p);
                        improved = true;
                    }
                }
                ObjectiveState::Clustering { tri, denom } => {
                    let local = local_delta(rewirer.graph(), p.removed(), p.added());
                    // group per-node triangle deltas by degree for an exact
                    // rational sign test of Σ δtri(v)/C(k_v, 2)
                    let mut by_denom: BTreeMap<u64, i64> = BTreeMap::new();
                    for (&v, &d) in &local.tri_per_node {
                        let den = denom[v as usize];
                        if den > 0 {
                            *by_denom.entry(den).or_default() += d;
                        }
                    }
                    let mut sum = BigRational::zero();
                    for (den, num) in &by_denom {
                        sum += BigRational::new(BigInt::from(*num), BigInt::from(*den));
                    }
                    let accept = match direction {
                        Direction::Max => sum > BigRational::zero(),
                        Direction::Min => sum < BigRational::zero(),
                    };
                    if accept {
                        for (&v, &d) in &local.tri_per_node {
                            tri[v as usize] += d;
                        }
                        rewirer.apply(&p);
                        improved = true;
                    }
                }
            }
        }
        if improved {
            trace.accepted_steps += 1;
            no_improvement = 0;
        } else {
            trace.rejected_steps += 1;
            no_improvement += 1;
            if no_improvement >= probe_window {
                trace.warning = Some(format!(
                    "local optimum: no improving swap in {probe_window} proposals"
                ));
                break;
            }
        }
        if step % stride == 0 {
            trace.sample(Series::Objective, step, state.value(g.n()));
        }
    }
    let step = trace.accepted_steps + trace.rejected_steps;
    let value = state.value(g.n());
    trace.sample(Series::Objective, step, value);
    trace.final_objective = Some(value);
    Ok((rewirer.into_graph(), trace))
}

// ---------------------------------------------------------------------------
// run configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum RewireMode {
    Randomize,
    Target {
        target: DkDistribution,
        schedule: Schedule,
    },
    Explore {
        objective: Objective,
        direction: Direction,
        budget: u64,
    },
}

/// Configuration of one rewiring chain, as driven by the CLI.
#[derive(Debug, Clone)]
pub struct RewiringRun {
    /// preserved level d'
    pub d: u8,
    pub mode: RewireMode,
    pub seed: u64,
    pub multiplier: f64,
    pub verification_factor: f64,
    pub allow_plateau: bool,
}

impl RewiringRun {
    pub fn new(d: u8, mode: RewireMode, seed: u64) -> Self {
        RewiringRun {
            d,
            mode,
            seed,
            multiplier: 10.0,
            verification_factor: 1.0,
            allow_plateau: false,
        }
    }

    pub fn run(&self, g: &Graph) -> Result<(Graph, RunTrace)> {
        match &self.mode {
            RewireMode::Randomize => randomize(
                g,
                self.d,
                self.seed,
                &RandomizeOptions {
                    multiplier: self.multiplier,
                    verification_factor: self.verification_factor,
                    ..RandomizeOptions::default()
                },
            ),
            RewireMode::Target { target, schedule } => target_rewire(
                g,
                self.d,
                target,
                schedule,
                self.seed,
                &TargetOptions {
                    allow_plateau: self.allow_plateau,
                    ..TargetOptions::default()
                },
            ),
            RewireMode::Explore {
                objective,
                direction,
                budget,
            } => explore(
                g,
                self.d,
                *objective,
                *direction,
                self.seed,
                *budget,
                &ExploreOptions::default(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_matching, power_law_one_k};
    use crate::testutil::gnp;

    fn run_swaps(g: &Graph, d: u8, seed: u64, accepted_target: u64) -> Graph {
        let mut rewirer = Rewirer::new(g, seed);
        let mut accepted = 0;
        let mut attempts = 0u64;
        while accepted < accepted_target && attempts < accepted_target * 4000 {
            attempts += 1;
            if let Some(p) = rewirer.propose_swap(d).unwrap() {
                rewirer.apply(&p);
                accepted += 1;
            }
        }
        assert_eq!(accepted, accepted_target, "not enough legal d={d} swaps");
        rewirer.into_graph()
    }

    #[test]
    fn swaps_preserve_their_level() {
        let target = power_law_one_k(80, 2.3, 9, 5);
        let g = gen_matching(&DkDistribution::One(target), 2, 16).unwrap().graph;
        for d in [1u8, 2, 3] {
            let out = run_swaps(&g, d, 100 + d as u64, 150);
            assert_eq!(
                extract(&out, d).unwrap(),
                extract(&g, d).unwrap(),
                "level {d} not preserved"
            );
            assert_eq!((out.n(), out.m()), (g.n(), g.m()));
        }
    }

    #[test]
    fn zero_k_moves_preserve_edge_count() {
        let g = gnp(30, 0.15, 3);
        let mut rewirer = Rewirer::new(&g, 9);
        for _ in 0..200 {
            if let Some(p) = rewirer.propose_swap(0).unwrap() {
                rewirer.apply(&p);
            }
        }
        let out = rewirer.into_graph();
        assert_eq!(out.m(), g.m());
        assert_eq!(extract(&out, 0).unwrap(), extract(&g, 0).unwrap());
    }

    #[test]
    fn count_initial_examples() {
        // two disjoint edges: both crossings legal, both leaf exchanges
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(count_initial_rewirings(&g, 1, false).unwrap(), 2);
        assert_eq!(count_initial_rewirings(&g, 1, true).unwrap(), 0);

        // triangle: every crossing makes a self-loop or multi-edge
        let k3 = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        for d in 1..=3u8 {
            assert_eq!(count_initial_rewirings(&k3, d, false).unwrap(), 0);
        }

        // d=0 closed form: m × (C(n,2) − m)
        assert_eq!(count_initial_rewirings(&k3, 0, false).unwrap(), 0);
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(count_initial_rewirings(&g, 0, false).unwrap(), 2 * (6 - 2));
    }

    #[test]
    fn count_is_monotone_in_d() {
        let g = gnp(25, 0.2, 17);
        let counts: Vec<u64> = (1..=3u8)
            .map(|d| count_initial_rewirings(&g, d, false).unwrap())
            .collect();
        assert!(counts[0] >= counts[1]);
        assert!(counts[1] >= counts[2]);
    }

    #[test]
    fn randomize_star_returns_unchanged_with_warning() {
        let star = Graph::from_edges(6, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let (out, trace) = randomize(&star, 1, 7, &RandomizeOptions::default()).unwrap();
        assert_eq!(out, star);
        assert!(trace.warning.is_some());
        assert_eq!(trace.accepted_steps, 0);
    }

    #[test]
    fn randomize_preserves_distribution() {
        let g = gnp(40, 0.12, 21);
        for d in [1u8, 2] {
            let (out, _) = randomize(
                &g,
                d,
                33,
                &RandomizeOptions {
                    budget_override: Some(400),
                    verification_factor: 0.0,
                    ..RandomizeOptions::default()
                },
            )
            .unwrap();
            assert_eq!(extract(&out, d).unwrap(), extract(&g, d).unwrap());
            assert_eq!(
                dk::distance(&extract(&out, d).unwrap(), &extract(&g, d).unwrap()).unwrap(),
                0.0
            );
        }
    }

    #[test]
    fn target_identity_converges_immediately() {
        let g = gnp(30, 0.2, 2);
        let target = extract(&g, 2).unwrap();
        let (out, trace) = target_rewire(
            &g,
            1,
            &target,
            &Schedule::constant(0.0, 10_000),
            5,
            &TargetOptions::default(),
        )
        .unwrap();
        assert_eq!(trace.accepted_steps + trace.rejected_steps, 0);
        assert_eq!(trace.final_distance, 0.0);
        assert_eq!(out, g);
    }

    #[test]
    fn two_k_targeting_from_one_k_random_start() {
        let g = gnp(40, 0.15, 77);
        let target = extract(&g, 2).unwrap();
        let one = extract(&g, 1).unwrap();
        let start = gen_matching(&one, 4, 16).unwrap().graph;
        // plateau moves keep the walk ergodic through the last few steps;
        // strict descent (the default) can stall at small D > 0
        let (out, trace) = target_rewire(
            &start,
            1,
            &target,
            &Schedule::constant(0.0, 2_000_000),
            11,
            &TargetOptions {
                allow_plateau: true,
                ..TargetOptions::default()
            },
        )
        .unwrap();
        assert_eq!(trace.final_distance, 0.0, "did not reach the target JDD");
        assert_eq!(extract(&out, 2).unwrap(), target);
        // distance series never increases at T=0
        for w in trace.distance_series.windows(2) {
            assert!(w[1].value <= w[0].value);
        }
    }

    #[test]
    fn strict_descent_stall_is_flagged() {
        // instance 9 of the convergence sweep: strict T=0 descent stalls at
        // a small positive distance and must say so
        let g = gnp(179, 0.0525, 9);
        let target = extract(&g, 2).unwrap();
        let one = extract(&g, 1).unwrap();
        let start = gen_matching(&one, 9 ^ 0xFF, 32).unwrap().graph;
        let (_, trace) = target_rewire(
            &start,
            1,
            &target,
            &Schedule::constant(0.0, 3_000_000),
            64,
            &TargetOptions::default(),
        )
        .unwrap();
        if trace.final_distance > 0.0 {
            assert!(trace.stalled);
            assert!(trace.warning.is_some());
        }
    }

    #[test]
    fn incompatible_start_is_rejected() {
        let g = gnp(30, 0.2, 1);
        let other = gnp(30, 0.4, 2);
        let target = extract(&g, 2).unwrap();
        assert!(target_rewire(
            &other,
            1,
            &target,
            &Schedule::constant(0.0, 100),
            1,
            &TargetOptions::default()
        )
        .is_err());

        // unsupported preservation level
        assert!(matches!(
            target_rewire(
                &g,
                0,
                &target,
                &Schedule::constant(0.0, 100),
                1,
                &TargetOptions::default()
            ),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn high_temperature_accepts_nearly_everything() {
        let g = gnp(40, 0.15, 13);
        let one = extract(&g, 1).unwrap();
        let start = gen_matching(&one, 8, 16).unwrap().graph;
        let target = extract(&g, 2).unwrap();
        let (_, trace) = target_rewire(
            &start,
            1,
            &target,
            &Schedule::constant(1e18, 20_000),
            3,
            &TargetOptions::default(),
        )
        .unwrap();
        assert!(trace.proposed_nonimproving > 100);
        let rate = trace.accepted_nonimproving as f64 / trace.proposed_nonimproving as f64;
        assert!(rate > 0.99, "acceptance rate of worsening moves was {rate}");
    }

    #[test]
    fn explore_s_is_monotone() {
        let g = gnp(40, 0.12, 4);
        let s0 = metrics::likelihood_s(&g);
        let (out, trace) = explore(
            &g,
            1,
            Objective::S,
            Direction::Max,
            6,
            20_000,
            &ExploreOptions::default(),
        )
        .unwrap();
        let s1 = metrics::likelihood_s(&out);
        assert!(s1 >= s0);
        assert_eq!(trace.final_objective, Some(s1 as f64));
        assert_eq!(extract(&out, 1).unwrap(), extract(&g, 1).unwrap());
        let (out_min, _) = explore(
            &g,
            1,
            Objective::S,
            Direction::Min,
            6,
            20_000,
            &ExploreOptions::default(),
        )
        .unwrap();
        assert!(metrics::likelihood_s(&out_min) <= s0);
    }

    #[test]
    fn explore_k4_is_a_fixed_point() {
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let (out, trace) = explore(
            &k4,
            2,
            Objective::Cbar,
            Direction::Max,
            1,
            5_000,
            &ExploreOptions::default(),
        )
        .unwrap();
        assert_eq!(out, k4);
        assert_eq!(trace.accepted_steps, 0);
    }

    #[test]
    fn explore_objective_state_matches_recomputation() {
        let g = gnp(35, 0.18, 44);
        let (out, trace) = explore(
            &g,
            2,
            Objective::Cbar,
            Direction::Max,
            5,
            30_000,
            &ExploreOptions::default(),
        )
        .unwrap();
        let expected = metrics::clustering(&out).cbar;
        let got = trace.final_objective.unwrap();
        assert!((expected - got).abs() < 1e-12, "{expected} vs {got}");
        // 2K is untouched
        assert_eq!(extract(&out, 2).unwrap(), extract(&g, 2).unwrap());
    }

    #[test]
    fn invalid_explore_pairing_is_rejected() {
        let g = gnp(20, 0.2, 1);
        assert!(explore(
            &g,
            1,
            Objective::Cbar,
            Direction::Max,
            1,
            100,
            &ExploreOptions::default()
        )
        .is_err());
        assert!(explore(
            &g,
            2,
            Objective::S,
            Direction::Max,
            1,
            100,
            &ExploreOptions::default()
        )
        .is_err());
    }

    #[test]
    fn chains_are_deterministic() {
        let g = gnp(40, 0.15, 50);
        let target = extract(&g, 2).unwrap();
        let one = extract(&g, 1).unwrap();
        let start = gen_matching(&one, 3, 16).unwrap().graph;
        let run = |seed| {
            target_rewire(
                &start,
                1,
                &target,
                &Schedule::constant(0.0, 50_000),
                seed,
                &TargetOptions::default(),
            )
            .unwrap()
        };
        let (a, ta) = run(9);
        let (b, tb) = run(9);
        assert_eq!(a, b);
        assert_eq!(ta.accepted_steps, tb.accepted_steps);
        let (c, _) = run(10);
        // a different seed gives a different chain (overwhelmingly)
        assert!(a != c || ta.accepted_steps > 0);
    }

    #[test]
    fn higher_level_swaps_pin_lower_level_scalars() {
        // S and r are functions of the 2K-distribution; S2 and C̄ of the 3K
        let target = power_law_one_k(120, 2.3, 10, 31);
        let g = gen_matching(&DkDistribution::One(target), 12, 16).unwrap().graph;
        let (out2, _) = randomize(
            &g,
            2,
            77,
            &RandomizeOptions {
                budget_override: Some(1000),
                verification_factor: 0.0,
                ..RandomizeOptions::default()
            },
        )
        .unwrap();
        assert_eq!(metrics::likelihood_s(&out2), metrics::likelihood_s(&g));
        assert_eq!(
            metrics::assortativity(&out2).unwrap(),
            metrics::assortativity(&g).unwrap()
        );

        let (out3, _) = randomize(
            &g,
            3,
            78,
            &RandomizeOptions {
                budget_override: Some(300),
                verification_factor: 0.0,
                ..RandomizeOptions::default()
            },
        )
        .unwrap();
        assert_eq!(
            metrics::second_order_likelihood(&out3),
            metrics::second_order_likelihood(&g)
        );
        assert_eq!(metrics::clustering(&out3).cbar, metrics::clustering(&g).cbar);
    }

    #[test]
    fn rewiring_run_dispatches_all_modes() {
        let g = gnp(30, 0.2, 8);
        let mut run = RewiringRun::new(1, RewireMode::Randomize, 5);
        run.multiplier = 0.01;
        run.verification_factor = 0.0;
        let (out, _) = run.run(&g).unwrap();
        assert_eq!(extract(&out, 1).unwrap(), extract(&g, 1).unwrap());

        let run = RewiringRun::new(
            1,
            RewireMode::Target {
                target: extract(&g, 2).unwrap(),
                schedule: Schedule::constant(0.0, 100),
            },
            5,
        );
        let (_, trace) = run.run(&g).unwrap();
        assert_eq!(trace.final_distance, 0.0);

        let run = RewiringRun::new(
            1,
            RewireMode::Explore {
                objective: Objective::S,
                direction: Direction::Max,
                budget: 5000,
            },
            5,
        );
        let (out, _) = run.run(&g).unwrap();
        assert!(metrics::likelihood_s(&out) >= metrics::likelihood_s(&g));
    }

    #[test]
    fn schedule_parsing() {
        let s = Schedule::parse("10:100,0.5:200,0:1000").unwrap();
        assert_eq!(s.0, vec![(10.0, 100), (0.5, 200), (0.0, 1000)]);
        assert_eq!(s.total_steps(), 1300);
        assert_eq!(s.to_string(), "10:100,0.5:200,0:1000");
        assert!(Schedule::parse("").is_err());
        assert!(Schedule::parse("x:1").is_err());
        assert!(Schedule::parse("-1:5").is_err());
        assert!(Schedule::parse("1:").is_err());
    }
}

//! Verification suites: seeded randomized property checks and structural
//! probes over initial diagrams and the diagrams reachable from them.
//!
//! Every suite is deterministic given its arguments; all randomness comes from
//! a single [`ChaCha8Rng`] seeded from the caller's seed.

use std::collections::BTreeMap;

use iqp_core::cluster::{explore_exchange_graph, mutate_seed, ClusterError, Coefficients, ExchangeGraphReport, Seed};
use iqp_core::jacobian::{essential_length, rigidity_from_basis, IdealBasis, JacobianError, RigidityReport};
use iqp_core::path::{canonical_rotation, Path, PathSum, Potential};
use iqp_core::postnikov::{initial_diagram, FaceDiagram, PostnikovError, Variant};
use iqp_core::qp::{check_induced_cycle_condition, equivalent_up_to_signs, mutate, rename_potential, Iqp, QpError};
use iqp_core::quiver::{ArrowId, IcedQuiver, Vertex};
use iqp_core::Q;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Failures of the underlying operations while running a suite.
#[derive(Debug, Error)]
pub enum SuiteError {
    #[error(transparent)]
    Postnikov(#[from] PostnikovError),
    #[error(transparent)]
    Qp(#[from] QpError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Jacobian(#[from] JacobianError),
    #[error("no exchangeable cell in a diagram of Gr({k},{n})")]
    Stuck { k: u32, n: u32 },
}

/// Truncation degree used for potentials of Postnikov diagrams; faces of the
/// diagrams reached in the suites are far shorter.
pub const DIAGRAM_CAP: u32 = 16;

/// The random generator of a suite.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_cell(fd: &FaceDiagram, rng: &mut ChaCha8Rng) -> Result<Vertex, SuiteError> {
    fd.exchangeable_cells()
        .choose(rng)
        .copied()
        .ok_or(SuiteError::Stuck { k: fd.k(), n: fd.n() })
}

/// A diagram reached from the initial one by `steps` random geometric exchanges.
pub fn random_diagram(k: u32, n: u32, steps: usize, rng: &mut ChaCha8Rng) -> Result<FaceDiagram, SuiteError> {
    let mut fd = initial_diagram(k, n)?;
    for _ in 0..steps {
        let a = random_cell(&fd, rng)?;
        fd = fd.geometric_exchange(a)?;
    }
    Ok(fd)
}

/// All bijections `from → to` of arrow ids preserving endpoints, up to
/// `limit` of them (parallel arrows are permuted in every way).
fn arrow_alignments(from: &IcedQuiver, to: &IcedQuiver, limit: usize) -> Vec<BTreeMap<ArrowId, ArrowId>> {
    let mut classes: BTreeMap<(Vertex, Vertex), (Vec<ArrowId>, Vec<ArrowId>)> = BTreeMap::new();
    for a in from.arrows() {
        classes.entry((a.source, a.target)).or_default().0.push(a.id);
    }
    for a in to.arrows() {
        classes.entry((a.source, a.target)).or_default().1.push(a.id);
    }
    if classes.values().any(|(x, y)| x.len() != y.len()) {
        return Vec::new();
    }
    let mut out = vec![BTreeMap::new()];
    for (xs, ys) in classes.values() {
        let perms = permutations(ys);
        let mut next = Vec::new();
        'outer: for m in &out {
            for p in &perms {
                let mut m2 = m.clone();
                m2.extend(xs.iter().copied().zip(p.iter().copied()));
                next.push(m2);
                if next.len() >= limit {
                    break 'outer;
                }
            }
        }
        out = next;
    }
    out
}

fn permutations(xs: &[ArrowId]) -> Vec<Vec<ArrowId>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// True when `(q1, w1)` and `(q2, w2)` agree after renaming arrows of `q1`
/// onto those of `q2` (endpoint-preserving) and flipping arrow signs.
pub fn potentials_match(q1: &IcedQuiver, w1: &Potential, q2: &IcedQuiver, w2: &Potential) -> bool {
    if !q1.same_up_to_ids(q2) {
        return false;
    }
    if q1 == q2 && equivalent_up_to_signs(w1, w2, q2).is_some() {
        return true;
    }
    arrow_alignments(q1, q2, 4096).into_iter().any(|m| {
        let renamed = rename_potential(w1, |a| m[&a]);
        equivalent_up_to_signs(&renamed, w2, q2).is_some()
    })
}

/// A mismatch between the two pipelines.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CompatWitness {
    pub trial: usize,
    pub sequence: Vec<Vertex>,
    pub step: usize,
    pub reason: String,
}

/// Outcome of [`verify_compat`].
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CompatOutcome {
    pub k: u32,
    pub n: u32,
    pub trials: usize,
    pub steps: usize,
    pub identical_ids: usize,
    pub witnesses: Vec<CompatWitness>,
}

impl CompatOutcome {
    pub fn pass(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Runs random admissible exchange sequences of length `1..=len` through both
/// pipelines: geometric exchange of the diagram, and IQP mutation of the
/// diagram's IQP. After every step the quivers must agree up to arrow ids and
/// the potentials up to arrow renaming, cyclic equivalence and signs.
///
/// `corrupt` is a negative control: the geometric side loses one potential
/// term, which must be detected.
pub fn verify_compat(k: u32, n: u32, trials: usize, len: usize, seed: u64, corrupt: bool) -> Result<CompatOutcome, SuiteError> {
    let mut rng = rng(seed);
    let ini = initial_diagram(k, n)?;
    let p0 = ini.iqp(Variant::TypeIII, DIAGRAM_CAP)?;
    let mut out = CompatOutcome { k, n, trials, steps: 0, identical_ids: 0, witnesses: Vec::new() };
    for trial in 0..trials {
        let steps = rng.gen_range(1..=len.max(1));
        let (mut fd, mut p) = (ini.clone(), p0.clone());
        let mut sequence = Vec::new();
        for step in 0..steps {
            let a = random_cell(&fd, &mut rng)?;
            sequence.push(a);
            fd = fd.geometric_exchange(a)?;
            p = mutate(&p, a)?;
            out.steps += 1;
            let mut w = fd.face_potential(Variant::TypeIII, DIAGRAM_CAP);
            if corrupt {
                let first = w.terms().next().map(|(l, _)| l.clone());
                w = w.filter(|l| Some(l) != first.as_ref());
            }
            let reason = if !p.quiver().same_up_to_ids(fd.quiver()) {
                Some("quivers differ".to_string())
            } else if !potentials_match(p.quiver(), p.potential(), fd.quiver(), &w) {
                Some(format!("potentials differ: mutation {} vs diagram {}", p.potential(), w))
            } else {
                None
            };
            if p.quiver() == fd.quiver() {
                out.identical_ids += 1;
            }
            if let Some(reason) = reason {
                out.witnesses.push(CompatWitness { trial, sequence: sequence.clone(), step, reason });
                break;
            }
        }
    }
    Ok(out)
}

/// Per-family counts of [`involutions`].
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct InvolutionOutcome {
    pub quivers: (usize, usize),
    pub seeds: (usize, usize),
    pub iqps: (usize, usize),
    pub exchanges: (usize, usize),
    pub digon_orders: (usize, usize),
    pub failures: Vec<String>,
}

impl InvolutionOutcome {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A random 2-acyclic quiver with 2–5 exchangeable and 0–2 frozen vertices.
pub fn random_quiver(rng: &mut ChaCha8Rng) -> IcedQuiver {
    let nx = rng.gen_range(2..=5u32);
    let nf = rng.gen_range(0..=2u32);
    let mut pairs = Vec::new();
    for u in 1..=nx + nf {
        for v in u + 1..=nx + nf {
            if u > nx && v > nx {
                continue;
            }
            let mult = [0, 0, 1, 1, 1, 2][rng.gen_range(0..6)];
            let forward = rng.gen_bool(0.5);
            for _ in 0..mult {
                pairs.push(if forward { (u, v) } else { (v, u) });
            }
        }
    }
    IcedQuiver::from_pairs(nx, nf, pairs).expect("valid random quiver")
}

const POSTNIKOV_CASES: [(u32, u32); 4] = [(2, 5), (2, 6), (3, 6), (3, 7)];

/// Double application of quiver mutation, seed mutation, IQP mutation and
/// geometric exchange returns the input (`instances` random inputs each);
/// also checks that the digon cancellation order does not matter.
pub fn involutions(instances: usize, seed: u64) -> Result<InvolutionOutcome, SuiteError> {
    let mut rng = rng(seed);
    let mut out = InvolutionOutcome::default();
    for t in 0..instances {
        let q = random_quiver(&mut rng);
        let i = rng.gen_range(1..=q.n_exchangeable());
        out.quivers.1 += 1;
        if q.mutate_quiver(i).and_then(|r| r.mutate_quiver(i)).is_ok_and(|r| r.same_up_to_ids(&q)) {
            out.quivers.0 += 1;
        } else {
            out.failures.push(format!("quiver #{t} at {i}: {q}"));
        }

        let q = random_quiver(&mut rng);
        let i = rng.gen_range(1..=q.n_exchangeable());
        let s = Seed::initial(&q, Coefficients::Geometric);
        out.seeds.1 += 1;
        if mutate_seed(&s, i).and_then(|r| mutate_seed(&r, i)).is_ok_and(|r| r.same_up_to_ids(&s)) {
            out.seeds.0 += 1;
        } else {
            out.failures.push(format!("seed #{t} at {i}: {q}"));
        }

        let (k, n) = *POSTNIKOV_CASES.choose(&mut rng).expect("cases");
        let steps = rng.gen_range(0..=4);
        let fd = random_diagram(k, n, steps, &mut rng)?;
        let a = random_cell(&fd, &mut rng)?;
        let p = fd.iqp(Variant::TypeIII, DIAGRAM_CAP)?;
        let back = mutate(&mutate(&p, a)?, a)?;
        out.iqps.1 += 1;
        if potentials_match(back.quiver(), back.potential(), p.quiver(), p.potential()) {
            out.iqps.0 += 1;
        } else {
            out.failures.push(format!("IQP #{t} of Gr({k},{n}) at {a}"));
        }

        let once = fd.geometric_exchange(a)?;
        let twice = once.geometric_exchange(a)?;
        out.exchanges.1 += 1;
        if twice.face_signature() == fd.face_signature() && twice.quiver().same_up_to_ids(fd.quiver()) {
            out.exchanges.0 += 1;
        } else {
            out.failures.push(format!("exchange #{t} of Gr({k},{n}) at {a}"));
        }

        out.digon_orders.1 += 1;
        if fd.geometric_exchange_reversed(a)? == once {
            out.digon_orders.0 += 1;
        } else {
            out.failures.push(format!("digon order #{t} of Gr({k},{n}) at {a}"));
        }
    }
    Ok(out)
}

/// Rigidity report of a variant of the initial diagram, with a flag per
/// witness telling whether it is a fundamental cycle of that variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityOutcome {
    pub report: RigidityReport,
    pub fundamental_witnesses: Vec<bool>,
}

/// [`rigidity_from_basis`] on the initial diagram's IQP of the given variant.
pub fn rigidity(k: u32, n: u32, variant: Variant, cap: u32) -> Result<RigidityOutcome, SuiteError> {
    let fd = initial_diagram(k, n)?;
    let p = fd.iqp(variant, DIAGRAM_CAP)?;
    let report = rigidity_from_basis(&IdealBasis::new(&p, cap));
    let fundamental: Vec<Path> = fd.fundamental_cycles(variant).into_iter().map(|f| f.cycle).collect();
    let fundamental_witnesses = report.witnesses.iter().map(|w| fundamental.contains(w)).collect();
    Ok(RigidityOutcome { report, fundamental_witnesses })
}

/// Graded quotient dimensions of a variant of the initial diagram.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct JacobianOutcome {
    pub cap: u32,
    /// Surviving paths per length `0..=cap`.
    pub surviving: Vec<usize>,
    /// `(N, dim in lengths < N, certified)` for each requested `N`.
    pub dimensions: Vec<(u32, usize, bool)>,
    pub killed_degree: Option<usize>,
}

impl JacobianOutcome {
    /// Certified finite dimension, if any.
    pub fn dimension(&self) -> Option<usize> {
        self.killed_degree.map(|_| self.surviving.iter().sum())
    }
}

/// Computes the ideal basis once at `max(caps)` and reads off every cap.
pub fn jacobian(k: u32, n: u32, variant: Variant, caps: &[u32]) -> Result<JacobianOutcome, SuiteError> {
    let p = initial_diagram(k, n)?.iqp(variant, DIAGRAM_CAP)?;
    let cap = caps.iter().copied().max().unwrap_or(12);
    let b = IdealBasis::new(&p, cap);
    let killed = b.killed_degree();
    let dimensions = caps
        .iter()
        .map(|&c| (c, b.quotient_dimension_below(c as usize), killed.is_some_and(|l| l < c as usize)))
        .collect();
    Ok(JacobianOutcome { cap, surviving: b.surviving_per_degree().to_vec(), dimensions, killed_degree: killed })
}

/// One fundamental cycle in [`power_bound`].
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct PowerBoundRow {
    pub face: usize,
    pub level: u32,
    pub cycle: Vec<ArrowId>,
    /// `ω^{level + 1} ∈ J` for every rotation `ω`.
    pub bound_holds: bool,
    /// Smallest `p` with `ω^p ∈ J` for every rotation.
    pub minimal_power: Option<usize>,
}

/// For every fundamental cycle of level `≤ max_level` of the initial
/// diagram's IQP, tests `ω^{m+1} ∈ J` for all rotations of `ω`.
pub fn power_bound(k: u32, n: u32, max_level: u32, cap: u32) -> Result<Vec<PowerBoundRow>, SuiteError> {
    let fd = initial_diagram(k, n)?;
    let p = fd.iqp(Variant::TypeIII, DIAGRAM_CAP)?;
    let basis = IdealBasis::new(&p, cap);
    let in_j = |w: &Path, e: usize| -> Result<bool, SuiteError> {
        let mut all = true;
        for r in w.rotations() {
            let x = PathSum::path(r.power(e).expect("cycle"), u32::MAX);
            all &= basis.is_in_ideal(&x)?;
        }
        Ok(all)
    };
    let mut rows = Vec::new();
    for fc in fd.fundamental_cycles(Variant::TypeIII) {
        let Some(level) = fc.level.filter(|&m| m <= max_level) else { continue };
        let bound_holds = in_j(&fc.cycle, level as usize + 1)?;
        let mut minimal_power = None;
        for e in 1..=cap as usize + 1 {
            if in_j(&fc.cycle, e)? {
                minimal_power = Some(e);
                break;
            }
        }
        rows.push(PowerBoundRow { face: fc.face, level, cycle: fc.cycle.arrows().to_vec(), bound_holds, minimal_power });
    }
    Ok(rows)
}

/// Outcome of [`essential_lengths`].
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct EssentialOutcome {
    pub samples: usize,
    pub defined: usize,
    /// `(length, m)` counts among defined samples.
    pub histogram: BTreeMap<(usize, usize), usize>,
    /// Cycles (arrow ids) violating `3m ≤ length ≤ 4m`.
    pub violations: Vec<(Vec<ArrowId>, usize)>,
}

impl EssentialOutcome {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A random cycle of length `1..=max_len` in `q`: a random walk from a random
/// vertex, stopped at a random return to its start.
pub fn random_cycle(q: &IcedQuiver, max_len: usize, rng: &mut ChaCha8Rng) -> Path {
    loop {
        let start = rng.gen_range(1..=q.n_vertices());
        let mut arrows = Vec::new();
        let mut v = start;
        let mut returns = Vec::new();
        for _ in 0..max_len {
            let outs: Vec<_> = q.out_arrows(v).collect();
            let Some(a) = outs.choose(rng) else { break };
            arrows.push(a.id);
            v = a.target;
            if v == start {
                returns.push(arrows.len());
            }
        }
        if let Some(&l) = returns.choose(rng) {
            return Path::from_traversal(q, &arrows[..l]).expect("walk is a path");
        }
    }
}

/// Samples random cycles of the initial diagram's IQP and checks
/// `3m ≤ length ≤ 4m` whenever the essential length `m` is defined.
pub fn essential_lengths(k: u32, n: u32, samples: usize, max_len: usize, seed: u64) -> Result<EssentialOutcome, SuiteError> {
    let mut rng = rng(seed);
    let fd = initial_diagram(k, n)?;
    let p = fd.iqp(Variant::TypeIII, DIAGRAM_CAP)?;
    let basis = IdealBasis::new(&p, max_len as u32);
    let fundamental: Vec<Path> = fd.fundamental_cycles(Variant::TypeIII).into_iter().map(|f| f.cycle).collect();
    let mut out = EssentialOutcome { samples, ..Default::default() };
    for _ in 0..samples {
        let l = random_cycle(p.quiver(), max_len, &mut rng);
        if let Some((m, _)) = essential_length(&l, &fundamental, &basis)? {
            out.defined += 1;
            *out.histogram.entry((l.len(), m)).or_default() += 1;
            if !(3 * m <= l.len() && l.len() <= 4 * m) {
                out.violations.push((l.arrows().to_vec(), m));
            }
        }
    }
    Ok(out)
}

/// Exchange graph of `Gr(k, n)` from the initial seed with trivial
/// coefficients, explored up to `max_seeds` seeds.
pub fn exchange_graph(k: u32, n: u32, max_seeds: usize) -> Result<ExchangeGraphReport, SuiteError> {
    let fd = initial_diagram(k, n)?;
    let s = Seed::initial(fd.quiver(), Coefficients::Trivial);
    Ok(explore_exchange_graph(&s, max_seeds)?)
}

/// Outcome of [`validity`].
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct ValidityOutcome {
    pub initial_checked: usize,
    pub exchanged_checked: usize,
    pub failures: Vec<String>,
}

impl ValidityOutcome {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Validates every initial diagram with `n ≤ max_n`, and each one again after
/// every one of `exchanges` random geometric exchanges.
pub fn validity(max_n: u32, exchanges: usize, seed: u64) -> Result<ValidityOutcome, SuiteError> {
    let mut rng = rng(seed);
    let mut out = ValidityOutcome::default();
    for n in 4..=max_n {
        for k in 2..=n - 2 {
            let mut fd = initial_diagram(k, n)?;
            let r = fd.validate();
            out.initial_checked += 1;
            if !r.is_valid() {
                out.failures.push(format!("initial Gr({k},{n}): {:?}", r.violations));
                continue;
            }
            for step in 0..exchanges {
                let a = random_cell(&fd, &mut rng)?;
                fd = fd.geometric_exchange(a)?;
                let r = fd.validate();
                out.exchanged_checked += 1;
                if !r.is_valid() {
                    out.failures.push(format!("Gr({k},{n}) after step {step} at {a}: {:?}", r.violations));
                    break;
                }
            }
        }
    }
    Ok(out)
}

/// Induced cycles of a variant of the initial diagram's IQP missing from the
/// potential.
pub fn induced_cycles(k: u32, n: u32, variant: Variant) -> Result<Vec<Path>, SuiteError> {
    let p: Iqp = initial_diagram(k, n)?.iqp(variant, DIAGRAM_CAP)?;
    Ok(check_induced_cycle_condition(&p))
}

/// Determinant over `Q` by Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<Q>>) -> Q {
    let size = m.len();
    let mut det = Q::one();
    for c in 0..size {
        let Some(p) = (c..size).find(|&r| !m[r][c].is_zero()) else { return Q::zero() };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det = &det * &m[c][c];
        let pivot = m[c].clone();
        for row in &mut m[c + 1..size] {
            let f = &row[c] / &pivot[c];
            for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= &(&f * y);
            }
        }
    }
    det
}

/// The maximal minor of `a` on the columns `cols` (1-based, any order; they
/// are sorted first).
pub fn minor(a: &[Vec<Q>], cols: &[u32]) -> Q {
    let mut cols = cols.to_vec();
    cols.sort_unstable();
    determinant(a.iter().map(|row| cols.iter().map(|&c| row[c as usize - 1].clone()).collect()).collect())
}

/// A random `k × n` rational matrix with all maximal minors nonzero.
pub fn random_matrix(k: u32, n: u32, rng: &mut ChaCha8Rng) -> Vec<Vec<Q>> {
    loop {
        let a: Vec<Vec<Q>> = (0..k)
            .map(|_| (0..n).map(|_| Q::new(rng.gen_range(-9..=9), rng.gen_range(1..=5))).collect())
            .collect();
        if subsets(n, k).iter().all(|s| !minor(&a, s).is_zero()) {
            return a;
        }
    }
}

fn subsets(n: u32, k: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k..=n)
        .flat_map(|last| {
            subsets(last - 1, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Outcome of [`plucker`].
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct PluckerOutcome {
    /// Exchange relations on labels: `Δ(L_v)Δ(L'_v) = Π_out Δ + Π_in Δ`.
    pub label_relations: (usize, usize),
    /// Seed variables evaluated at the minors of the labels.
    pub seed_values: (usize, usize),
    pub failures: Vec<String>,
}

impl PluckerOutcome {
    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.label_relations.1 > 0 && self.seed_values.1 > 0
    }
}

/// Specializes to maximal minors of random rational `k × n` matrices.
///
/// For each matrix, walks `steps` random geometric exchanges from the initial
/// diagram, alongside mutation of its seed with geometric coefficients on the
/// quiver without external arrows. At every diagram each exchange relation on
/// Plücker labels must hold numerically, and at every seed each variable must
/// evaluate to the minor of its vertex's label.
pub fn plucker(k: u32, n: u32, matrices: usize, steps: usize, seed: u64) -> Result<PluckerOutcome, SuiteError> {
    let mut rng = rng(seed);
    let mut out = PluckerOutcome::default();
    for t in 0..matrices {
        let a = random_matrix(k, n, &mut rng);
        let mut fd = initial_diagram(k, n)?;
        let labels0 = fd.labels().ok_or(PostnikovError::BrokenFace { face: 0 })?;
        let point: Vec<Q> = labels0.iter().map(|l| minor(&a, l)).collect();
        let mut s = Seed::initial(&fd.variant_quiver(Variant::TypeI), Coefficients::Geometric);
        for step in 0..=steps {
            let labels = fd.labels().ok_or(PostnikovError::BrokenFace { face: 0 })?;
            let delta = |v: Vertex| minor(&a, &labels[v as usize - 1]);
            for v in 1..=fd.quiver().n_exchangeable() {
                out.seed_values.1 += 1;
                if s.variable(v).eval(&point) == delta(v) {
                    out.seed_values.0 += 1;
                } else {
                    out.failures.push(format!("matrix {t} step {step}: seed variable {v} is not the minor of {:?}", labels[v as usize - 1]));
                }
            }
            for v in fd.exchangeable_cells() {
                let after = fd.geometric_exchange(v)?;
                let new_label = &after.labels().ok_or(PostnikovError::BrokenFace { face: 0 })?[v as usize - 1];
                let lhs = &delta(v) * &minor(&a, new_label);
                let (mut out_prod, mut in_prod) = (Q::one(), Q::one());
                for x in fd.quiver().out_arrows(v) {
                    out_prod = &out_prod * &delta(x.target);
                }
                for x in fd.quiver().in_arrows(v) {
                    in_prod = &in_prod * &delta(x.source);
                }
                out.label_relations.1 += 1;
                if lhs == &out_prod + &in_prod {
                    out.label_relations.0 += 1;
                } else {
                    out.failures.push(format!("matrix {t} step {step}: exchange relation at {v} fails"));
                }
            }
            if step < steps {
                let v = random_cell(&fd, &mut rng)?;
                fd = fd.geometric_exchange(v)?;
                s = mutate_seed(&s, v)?;
            }
        }
    }
    Ok(out)
}

/// Canonical form of a cycle given by arrow ids, for reports.
pub fn canonical_cycle(q: &IcedQuiver, arrows: &[ArrowId]) -> Option<Path> {
    canonical_rotation(&Path::from_traversal(q, arrows).ok()?).ok()
}

//! Replays a workload against an architecture: layer execution, magic-state
//! production and delivery, memory-compute interchange, and logical transport.
//!
//! The simulation is a single sequential clock. Magic-state supply follows the
//! configured production model: `Serial` charges every take the full
//! production-plus-delivery latency (the composition the closed-form analyses
//! use); `Pipelined` lets factories run continuously into a bounded buffer so
//! waits are residual. Both have deterministic (expected-value) and stochastic
//! (seeded geometric attempts) variants.

use std::f64::consts::SQRT_2;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::archmodel::{qubit_footprint, ArchConfig, MagicModel, ModalityParams, ResourceBreakdown};
use crate::error::{Error, Result};
use crate::workload::{profile, Profile, Scheme, Workload};

/// Worst-case atom-move time for one routing step on a motion-capable host.
///
/// Logical patches sit on a ceil(sqrt(n)) x ceil(sqrt(n)) grid with
/// `atom_spacing * d_surf` micrometers per patch side; the worst move crosses
/// the diagonal, and the move time follows the square-root motion profile in
/// milliseconds.
pub fn t_move(d_surf: usize, n_region: usize, modality: &ModalityParams) -> Result<f64> {
    let (Some(spacing), Some(constant)) = (modality.atom_spacing, modality.move_constant) else {
        return Err(Error::InvalidConfig(format!(
            "{} host has no atom motion; t_move undefined",
            modality.name.name()
        )));
    };
    if n_region == 0 {
        return Err(Error::InvalidConfig("t_move needs n_region >= 1".into()));
    }
    let grid_side = {
        let root = n_region.isqrt();
        if root * root == n_region {
            root
        } else {
            root + 1
        }
    };
    let side_um = spacing * d_surf as f64 * grid_side as f64;
    let worst_um = SQRT_2 * side_um;
    let ms = (2.0 * worst_um / constant).sqrt();
    Ok(ms * 1e-3)
}

/// Base execution time of one layer, excluding magic waits and interchange.
///
/// GBC: routing move + transversal gates + r syndrome rounds on the compute
/// host. PBC: r syndrome rounds only (code deformation and path preparation
/// are initialization, costing no time).
pub fn base_layer_time(config: &ArchConfig, scheme: Scheme) -> Result<f64> {
    if config.execution_scheme() != scheme {
        return Err(Error::SchemeMismatch {
            expected: config.execution_scheme().name(),
            found: scheme.name(),
        });
    }
    let m = config.compute_params();
    match scheme {
        Scheme::Gbc => {
            let route = t_move(config.qec.d_surf, config.n_comp, m)?;
            Ok(route + m.t_gate + config.qec.sm_rounds_gbc as f64 * m.t_sm)
        }
        Scheme::Pbc => Ok(config.qec.sm_rounds_ppm as f64 * m.t_sm),
    }
}

/// Store/load overhead of one layer under memory-compute separation, in
/// qLDPC-memory cycles and in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StoreloadCost {
    pub cycles: f64,
    pub seconds: f64,
}

/// Interchange overhead for layer `i`: a compute region smaller than the
/// active set forces the layer into ceil(q/n_comp) serialized steps, and a
/// swap buffer smaller than the transition delta forces extra store/load
/// processes of d_qldpc rounds each; a within-buffer swap is partially hidden
/// by pipelining. Returns zero for non-MCSep configs.
pub fn storeload_overhead(
    layer_index: usize,
    prof: &Profile,
    config: &ArchConfig,
) -> Result<StoreloadCost> {
    if !config.mcsep {
        return Ok(StoreloadCost::default());
    }
    let q = prof.q_act[layer_index];
    let dq = if layer_index == 0 { 0 } else { prof.delta_q_act[layer_index - 1] };
    let split_needed = prof.scheme == Scheme::Gbc && q > config.n_comp;
    if config.q_buff == 0 && (dq > 0 || split_needed) {
        return Err(Error::BufferRequired { layer: layer_index });
    }
    let d_qldpc = config.qec.d_qldpc as f64;
    let mem_round = config.memory_params().t_sm;
    let mut cycles = 0.0;
    let mut seconds = 0.0;

    if split_needed {
        let r = config.qec.sm_rounds_gbc as f64;
        let extra_steps = (q.div_ceil(config.n_comp) - 1) as f64;
        let batches = config.n_comp.div_ceil(config.q_buff) as f64;
        cycles += extra_steps * ((1.0 + r) + batches * d_qldpc);
        // Each extra step re-runs the layer (one routing move plus r rounds on
        // the compute host) and pushes one compute-region's worth of qubits
        // through the buffer at memory-round granularity.
        let comp = config.compute_params();
        let reexec = t_move(config.qec.d_surf, config.n_comp, comp)? + r * comp.t_sm;
        seconds += extra_steps * (reexec + batches * d_qldpc * mem_round);
    }

    if dq > config.q_buff {
        let processes = dq.div_ceil(config.q_buff) as f64;
        let c = (processes - config.phi_hide) * d_qldpc;
        cycles += c;
        seconds += c * mem_round;
    } else if dq > 0 {
        let c = (1.0 - config.phi_hide) * d_qldpc;
        cycles += c;
        seconds += c * mem_round;
    }

    Ok(StoreloadCost { cycles, seconds })
}

/// Steady-state magic production and delivery rates of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagicThroughput {
    /// Expected seconds per state from a single factory.
    pub t_ms: f64,
    /// Aggregate factory output, states per second.
    pub mu_msf: f64,
    /// Effective delivery rate at the compute side.
    pub mu_deliv: f64,
    /// One-way delivery latency (zero when MSF and compute share a host).
    pub t_offset: f64,
}

pub fn magic_throughput(config: &ArchConfig) -> MagicThroughput {
    let t_ms = config.msf.expected_cycles() * config.msf_params().t_cycle;
    let mu_msf = config.msf.copies as f64 / t_ms;
    let cross = config.msf_host != config.compute_host;
    let mu_deliv = if cross { mu_msf.min(config.link.mu_link) } else { mu_msf };
    let t_offset = if cross { config.link.t_mst } else { 0.0 };
    MagicThroughput { t_ms, mu_msf, mu_deliv, t_offset }
}

/// Per-layer cost record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerCost {
    /// Routing + gates + syndrome rounds.
    pub base: f64,
    /// Blocked on magic-state production.
    pub w_magic: f64,
    /// Memory-compute interchange.
    pub storeload: f64,
    /// Cross-modality traffic: magic delivery latency and logical transport.
    pub transport: f64,
    pub total: f64,
}

/// Fractions of total time per cost category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Breakdown {
    pub compute: f64,
    pub magic: f64,
    pub storeload: f64,
    pub transport: f64,
}

/// End-to-end estimate for one workload on one architecture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub total_time_s: f64,
    pub n_phys: usize,
    pub breakdown: Breakdown,
    pub layers: Vec<LayerCost>,
    pub magic_consumed: usize,
    pub resources: ResourceBreakdown,
}

/// Deterministic (expected-value) replay.
pub fn run(config: &ArchConfig, workload: &Workload) -> Result<RunReport> {
    run_inner(config, workload, None)
}

/// Stochastic replay: production times are seeded geometric attempt draws.
pub fn run_stochastic(config: &ArchConfig, workload: &Workload, seed: u64) -> Result<RunReport> {
    run_inner(config, workload, Some(seed))
}

fn run_inner(config: &ArchConfig, workload: &Workload, seed: Option<u64>) -> Result<RunReport> {
    config.validate()?;
    if workload.num_layers() == 0 {
        return Err(Error::EmptyWorkload);
    }
    if config.execution_scheme() != workload.scheme() {
        return Err(Error::SchemeMismatch {
            expected: config.execution_scheme().name(),
            found: workload.scheme().name(),
        });
    }
    let prof = profile(workload)?;
    if let Some(weights) = &prof.w_pauli {
        for (i, &w) in weights.iter().enumerate() {
            if w > config.n_comp {
                return Err(Error::PpmInfeasible { layer: i, weight: w, n_comp: config.n_comp });
            }
        }
    }

    let base = base_layer_time(config, workload.scheme())?;
    let mut pipeline = MagicPipeline::new(config, seed);
    let lq_transport = config.mcsep && config.memory_host != config.compute_host;

    let mut clock = 0.0;
    let mut layers = Vec::with_capacity(prof.d);
    let mut consumed = 0usize;
    let mut sums = (0.0f64, 0.0f64, 0.0f64, 0.0f64);

    for i in 0..prof.d {
        let demand = prof.magic_demand[i];
        let (deliv_latency, w_magic) = if demand > 0 {
            if demand > config.q_magic {
                return Err(Error::MagicBufferTooSmall {
                    layer: i,
                    demand,
                    q_magic: config.q_magic,
                });
            }
            consumed += demand;
            pipeline.acquire(demand, clock)
        } else {
            (0.0, 0.0)
        };

        let sl = storeload_overhead(i, &prof, config)?;

        let mut transport = deliv_latency;
        if lq_transport {
            let dq = if i == 0 { 0 } else { prof.delta_q_act[i - 1] };
            transport += dq.div_ceil(config.link.b_lq) as f64 * config.link.t_lqt;
        }

        let total = base + w_magic + sl.seconds + transport;
        clock += total;
        sums.0 += base;
        sums.1 += w_magic;
        sums.2 += sl.seconds;
        sums.3 += transport;
        layers.push(LayerCost { base, w_magic, storeload: sl.seconds, transport, total });
    }

    let breakdown = if clock > 0.0 {
        Breakdown {
            compute: sums.0 / clock,
            magic: sums.1 / clock,
            storeload: sums.2 / clock,
            transport: sums.3 / clock,
        }
    } else {
        Breakdown { compute: 0.0, magic: 0.0, storeload: 0.0, transport: 0.0 }
    };
    let resources = qubit_footprint(config, workload.n_total());

    Ok(RunReport {
        total_time_s: clock,
        n_phys: resources.n_phys,
        breakdown,
        layers,
        magic_consumed: consumed,
        resources,
    })
}

// ---------------------------------------------------------------------------
// Magic pipeline
// ---------------------------------------------------------------------------

enum MagicPipeline {
    SerialDet(SerialDet),
    PipelinedDet(PipelinedDet),
    SerialStoch(SerialStoch),
    PipelinedStoch(PipelinedStoch),
}

impl MagicPipeline {
    fn new(config: &ArchConfig, seed: Option<u64>) -> Self {
        let tp = magic_throughput(config);
        match (config.magic_model, seed) {
            (MagicModel::Serial, None) => MagicPipeline::SerialDet(SerialDet {
                rate: tp.mu_deliv,
                t_offset: tp.t_offset,
            }),
            (MagicModel::Pipelined, None) => MagicPipeline::PipelinedDet(PipelinedDet {
                rate: tp.mu_deliv,
                arrivals_from: tp.t_offset,
                level: 0.0,
                cap: config.q_magic as f64,
                last_update: 0.0,
            }),
            (MagicModel::Serial, Some(seed)) => MagicPipeline::SerialStoch(SerialStoch {
                rng: StdRng::seed_from_u64(seed),
                t_attempt: config.msf.cycles_per_attempt as f64 * config.msf_params().t_cycle,
                p: config.msf.success_prob,
                copies: config.msf.copies,
                mu_link: config.link.mu_link,
                t_offset: tp.t_offset,
            }),
            (MagicModel::Pipelined, Some(seed)) => {
                MagicPipeline::PipelinedStoch(PipelinedStoch::new(config, tp, seed))
            }
        }
    }

    /// Acquires `m` states at time `now`, returning (delivery latency spent,
    /// production wait spent). The caller advances its clock by the sum.
    fn acquire(&mut self, m: usize, now: f64) -> (f64, f64) {
        match self {
            MagicPipeline::SerialDet(p) => p.acquire(m),
            MagicPipeline::PipelinedDet(p) => p.acquire(m, now),
            MagicPipeline::SerialStoch(p) => p.acquire(m),
            MagicPipeline::PipelinedStoch(p) => p.acquire(m, now),
        }
    }
}

/// Expected-value serial supply: each take pays the full delivery latency plus
/// m production slots at the delivery rate.
struct SerialDet {
    rate: f64,
    t_offset: f64,
}

impl SerialDet {
    fn acquire(&self, m: usize) -> (f64, f64) {
        (self.t_offset, m as f64 / self.rate)
    }
}

/// Expected-value fluid buffer: fills at the delivery rate during all elapsed
/// time (first arrivals offset once), capped at q_magic.
struct PipelinedDet {
    rate: f64,
    arrivals_from: f64,
    level: f64,
    cap: f64,
    last_update: f64,
}

impl PipelinedDet {
    fn advance_to(&mut self, t: f64) {
        let from = self.last_update.max(self.arrivals_from);
        if t > from {
            self.level = (self.level + self.rate * (t - from)).min(self.cap);
        }
        self.last_update = self.last_update.max(t);
    }

    fn acquire(&mut self, m: usize, now: f64) -> (f64, f64) {
        self.advance_to(now);
        let need = m as f64;
        if self.level >= need {
            self.level -= need;
            return (0.0, 0.0);
        }
        let lead = (self.arrivals_from - now).max(0.0);
        let fill = (need - self.level) / self.rate;
        self.level = 0.0;
        self.last_update = now + lead + fill;
        (lead, fill)
    }
}

/// Seeded serial supply: m states produced from scratch across the factory
/// copies, each state costing a geometric number of attempts.
struct SerialStoch {
    rng: StdRng,
    t_attempt: f64,
    p: f64,
    copies: usize,
    mu_link: f64,
    t_offset: f64,
}

impl SerialStoch {
    fn acquire(&mut self, m: usize) -> (f64, f64) {
        let mut loads = vec![0.0f64; self.copies];
        for _ in 0..m {
            let idx = loads
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap();
            loads[idx] += geometric_attempts(&mut self.rng, self.p) as f64 * self.t_attempt;
        }
        let mut wait = loads.iter().fold(0.0f64, |a, &b| a.max(b));
        if self.mu_link.is_finite() {
            wait = wait.max(m as f64 / self.mu_link);
        }
        (self.t_offset, wait)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CopyState {
    /// Producing; completes at the given time.
    Producing(f64),
    /// Output crossing the link; deposits at the given arrival time.
    InFlight(f64),
    /// Arrived but the buffer was full; deposits when space frees.
    Parked,
}

/// Seeded pipelined supply: each factory copy cycles produce -> deliver ->
/// deposit, with the buffer holding at most q_magic complete states.
struct PipelinedStoch {
    rng: StdRng,
    t_attempt: f64,
    p: f64,
    t_offset: f64,
    link_gap: f64,
    cap: usize,
    copies: Vec<CopyState>,
    parked: Vec<usize>,
    buffer: usize,
    last_arrival: f64,
}

impl PipelinedStoch {
    fn new(config: &ArchConfig, tp: MagicThroughput, seed: u64) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        let t_attempt = config.msf.cycles_per_attempt as f64 * config.msf_params().t_cycle;
        let p = config.msf.success_prob;
        let copies = (0..config.msf.copies)
            .map(|_| CopyState::Producing(geometric_attempts(&mut rng, p) as f64 * t_attempt))
            .collect();
        let link_gap = if config.link.mu_link.is_finite() {
            1.0 / config.link.mu_link
        } else {
            0.0
        };
        PipelinedStoch {
            rng,
            t_attempt,
            p,
            t_offset: tp.t_offset,
            link_gap,
            cap: config.q_magic,
            copies,
            parked: Vec::new(),
            buffer: 0,
            last_arrival: f64::NEG_INFINITY,
        }
    }

    fn draw(&mut self) -> f64 {
        geometric_attempts(&mut self.rng, self.p) as f64 * self.t_attempt
    }

    fn next_event(&self) -> Option<(f64, usize)> {
        self.copies
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                CopyState::Producing(t) | CopyState::InFlight(t) => Some((*t, i)),
                CopyState::Parked => None,
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    fn process(&mut self, idx: usize) {
        match self.copies[idx] {
            CopyState::Producing(done) => {
                let arrival = (done + self.t_offset).max(self.last_arrival + self.link_gap);
                self.last_arrival = arrival;
                self.copies[idx] = CopyState::InFlight(arrival);
            }
            CopyState::InFlight(arrived) => {
                if self.buffer < self.cap {
                    self.buffer += 1;
                    let next = self.draw();
                    self.copies[idx] = CopyState::Producing(arrived + next);
                } else {
                    self.copies[idx] = CopyState::Parked;
                    self.parked.push(idx);
                }
            }
            CopyState::Parked => unreachable!(),
        }
    }

    fn advance_to(&mut self, t: f64) {
        while let Some((time, idx)) = self.next_event() {
            if time > t {
                break;
            }
            self.process(idx);
        }
    }

    fn acquire(&mut self, m: usize, now: f64) -> (f64, f64) {
        self.advance_to(now);
        let mut ready = now;
        while self.buffer < m {
            let (time, idx) = self.next_event().expect("pipeline has live producers");
            ready = ready.max(time);
            self.process(idx);
        }
        self.buffer -= m;
        // Deposit parked output into the freed space; those copies resume.
        while self.buffer < self.cap {
            let Some(idx) = self.parked.pop() else { break };
            self.buffer += 1;
            let next = self.draw();
            self.copies[idx] = CopyState::Producing(ready + next);
        }
        (0.0, (ready - now).max(0.0))
    }
}

/// Number of repeat-until-success attempts: geometric on {1, 2, ...} with
/// success probability p.
fn geometric_attempts<R: Rng>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = rng.gen();
    let k = ((1.0 - u).ln() / (1.0 - p).ln()).ceil();
    (k as u64).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::archmodel::{preset, Modality, SchemeName};
    use crate::workload::{CliffordGate, GateLayer, Layers};

    fn gbc_layers(spec: &[usize]) -> Workload {
        // spec[i] = k_T of layer i; zero means one Clifford on qubit 0.
        let layers: Vec<GateLayer> = spec
            .iter()
            .map(|&k| {
                if k == 0 {
                    GateLayer::new(vec![CliffordGate::H(0)], vec![]).unwrap()
                } else {
                    GateLayer::new(vec![], (0..k).map(|q| (q, false)).collect()).unwrap()
                }
            })
            .collect();
        Workload::new("w", 100, Layers::Gbc(layers)).unwrap()
    }

    fn na_sf_for(w: &Workload) -> ArchConfig {
        preset(SchemeName::NaSf, &profile(w).unwrap(), w.n_total()).unwrap()
    }

    #[test]
    fn t_move_reproduces_worked_example() {
        let na = ModalityParams::na_default();
        let t = t_move(15, 100, &na).unwrap();
        assert!((t - 1.24e-3).abs() / 1.24e-3 < 0.01, "t_move = {t}");
    }

    #[test]
    fn t_move_unit_case() {
        let na = ModalityParams::na_default();
        let t = t_move(1, 1, &na).unwrap();
        assert!((t - 1.014e-4).abs() < 1e-7, "t_move = {t}");
    }

    #[test]
    fn t_move_monotone_in_region() {
        let na = ModalityParams::na_default();
        assert!(t_move(15, 400, &na).unwrap() > t_move(15, 100, &na).unwrap());
    }

    #[test]
    fn t_move_rejects_sc() {
        let sc = ModalityParams::sc_default();
        assert!(t_move(15, 100, &sc).is_err());
    }

    #[test]
    fn base_layer_times() {
        let w = gbc_layers(&[1]);
        let cfg = na_sf_for(&w);
        let t = base_layer_time(&cfg, Scheme::Gbc).unwrap();
        assert!((t - 2.143e-3).abs() < 2e-6, "gbc base = {t}");
        assert!(base_layer_time(&cfg, Scheme::Pbc).is_err());

        let p = profile(&w).unwrap();
        let mut sc = preset(SchemeName::ScSf, &crate::workload::Profile {
            scheme: Scheme::Pbc,
            w_pauli: Some(vec![1]),
            ..p
        }, 100)
        .unwrap();
        let t = base_layer_time(&sc, Scheme::Pbc).unwrap();
        assert!((t - 1.5e-5).abs() < 1e-12, "pbc base = {t}");

        sc.qec.sm_rounds_ppm = 0;
        assert_eq!(base_layer_time(&sc, Scheme::Pbc).unwrap(), 0.0);
    }

    #[test]
    fn gbc_base_without_sm_rounds() {
        let w = gbc_layers(&[0]);
        let mut cfg = na_sf_for(&w);
        cfg.qec.sm_rounds_gbc = 0;
        let t = base_layer_time(&cfg, Scheme::Gbc).unwrap();
        let route = t_move(15, 100, &cfg.na).unwrap();
        assert!((t - (route + 1e-6)).abs() < 1e-12);
    }

    fn sl_config(n_comp: usize, q_buff: usize, r: usize, phi: f64) -> ArchConfig {
        let w = gbc_layers(&[0, 0]);
        let mut cfg = preset(SchemeName::NaMcsep, &profile(&w).unwrap(), w.n_total()).unwrap();
        cfg.n_comp = n_comp;
        cfg.q_buff = q_buff;
        cfg.qec.sm_rounds_gbc = r;
        cfg.phi_hide = phi;
        cfg
    }

    fn sl_profile(q: usize, dq: usize) -> Profile {
        Profile {
            scheme: Scheme::Gbc,
            d: 2,
            n_t: 0,
            r_t: 0.0,
            q_act: vec![q, q],
            delta_q_act: vec![dq],
            w_pauli: None,
            magic_demand: vec![0, 0],
        }
    }

    /// Literal step-by-step enumeration of interchange batches.
    pub(crate) fn brute_force_cycles(
        q: usize,
        dq: usize,
        n_comp: usize,
        q_buff: usize,
        r: usize,
        d_qldpc: usize,
        phi: f64,
    ) -> f64 {
        let mut cycles = 0.0;
        if q > n_comp {
            let steps = q.div_ceil(n_comp);
            for _ in 1..steps {
                cycles += 1.0 + r as f64;
                for _ in 0..n_comp.div_ceil(q_buff) {
                    cycles += d_qldpc as f64;
                }
            }
        }
        if dq > q_buff {
            for _ in 0..dq.div_ceil(q_buff) {
                cycles += d_qldpc as f64;
            }
            cycles -= phi * d_qldpc as f64;
        } else if dq > 0 {
            cycles += (1.0 - phi) * d_qldpc as f64;
        }
        cycles
    }

    #[test]
    fn storeload_worked_example() {
        let cfg = sl_config(10, 5, 1, 0.5);
        let prof = sl_profile(25, 12);
        let c = storeload_overhead(1, &prof, &cfg).unwrap();
        assert_eq!(c.cycles, 121.0);
        assert_eq!(c.cycles, brute_force_cycles(25, 12, 10, 5, 1, 18, 0.5));
    }

    #[test]
    fn storeload_zero_when_fitting() {
        let cfg = sl_config(30, 5, 1, 0.5);
        let prof = sl_profile(25, 0);
        let c = storeload_overhead(1, &prof, &cfg).unwrap();
        assert_eq!(c.cycles, 0.0);
        assert_eq!(c.seconds, 0.0);
    }

    #[test]
    fn storeload_saturated_sizing_and_full_hiding_is_free() {
        let cfg = sl_config(30, 20, 1, 1.0);
        let prof = sl_profile(25, 12);
        let c = storeload_overhead(1, &prof, &cfg).unwrap();
        assert_eq!(c.cycles, 0.0);
    }

    #[test]
    fn storeload_needs_buffer() {
        let cfg = sl_config(10, 0, 1, 0.5);
        let prof = sl_profile(25, 12);
        assert!(matches!(
            storeload_overhead(1, &prof, &cfg),
            Err(Error::BufferRequired { layer: 1 })
        ));
    }

    #[test]
    fn storeload_boundary_delta_is_hidden_branch() {
        let cfg = sl_config(30, 12, 1, 0.25);
        let prof = sl_profile(10, 12);
        let c = storeload_overhead(1, &prof, &cfg).unwrap();
        assert_eq!(c.cycles, (1.0 - 0.25) * 18.0);
    }

    #[test]
    fn storeload_matches_brute_force_on_small_grid() {
        for q in [1, 7, 15] {
            for dq in [0, 3, 11, 16] {
                for n_comp in [2, 6] {
                    for q_buff in [1, 4] {
                        for phi in [0.0, 0.5, 1.0] {
                            let cfg = sl_config(n_comp, q_buff, 1, phi);
                            let prof = sl_profile(q, dq);
                            let got = storeload_overhead(1, &prof, &cfg).unwrap().cycles;
                            let want = brute_force_cycles(q, dq, n_comp, q_buff, 1, 18, phi);
                            assert_eq!(got, want, "q={q} dq={dq} n={n_comp} b={q_buff} phi={phi}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn run_single_clifford_layer() {
        let w = gbc_layers(&[0]);
        let cfg = na_sf_for(&w);
        let rep = run(&cfg, &w).unwrap();
        assert!((rep.total_time_s - 2.143e-3).abs() < 2e-6);
        assert_eq!(rep.layers[0].w_magic, 0.0);
        assert_eq!(rep.magic_consumed, 0);
    }

    #[test]
    fn run_serial_magic_latency_per_t_layer() {
        let w = gbc_layers(&[1; 10]);
        let na = na_sf_for(&w);
        let rep_na = run(&na, &w).unwrap();
        // Same-host factory: each T layer waits the full expected t_MS = 2.4 s.
        for l in &rep_na.layers {
            assert!((l.w_magic - 2.4).abs() < 1e-12);
            assert_eq!(l.transport, 0.0);
        }

        let macc = preset(SchemeName::HtSfMacc, &profile(&w).unwrap(), w.n_total()).unwrap();
        let rep_macc = run(&macc, &w).unwrap();
        for l in &rep_macc.layers {
            assert!((l.w_magic - 2.4e-3).abs() < 1e-12);
            assert!((l.transport - 1e-7).abs() < 1e-18);
        }
        assert!(rep_macc.total_time_s < rep_na.total_time_s);
    }

    #[test]
    fn run_pipelined_saturated_supply_waits_vanish() {
        let w = gbc_layers(&[1; 20]);
        let mut cfg = na_sf_for(&w);
        cfg.magic_model = MagicModel::Pipelined;
        cfg.msf.copies = 1_000_000;
        cfg.q_magic = 32;
        let rep = run(&cfg, &w).unwrap();
        for l in rep.layers.iter().skip(1) {
            assert!(l.w_magic < 1e-5, "w_magic = {}", l.w_magic);
        }
    }

    #[test]
    fn run_pipelined_prefills_during_clifford_time() {
        // Alternating Clifford/T: pipelined supply hides production behind the
        // Clifford layers, so it must beat the serial composition.
        let spec: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let w = gbc_layers(&spec);
        let serial = na_sf_for(&w);
        let mut pipelined = serial.clone();
        pipelined.magic_model = MagicModel::Pipelined;
        let t_serial = run(&serial, &w).unwrap().total_time_s;
        let t_pipe = run(&pipelined, &w).unwrap().total_time_s;
        assert!(t_pipe < t_serial);
    }

    #[test]
    fn run_conserves_magic() {
        let w = gbc_layers(&[2, 0, 3, 1]);
        let cfg = na_sf_for(&w);
        let rep = run(&cfg, &w).unwrap();
        let p = profile(&w).unwrap();
        assert_eq!(rep.magic_consumed, p.total_magic_demand());
        assert_eq!(rep.magic_consumed, 6);
    }

    #[test]
    fn run_is_deterministic_and_breakdown_sums_to_one() {
        let w = gbc_layers(&[1, 0, 2, 0, 1]);
        let cfg = na_sf_for(&w);
        let a = run(&cfg, &w).unwrap();
        let b = run(&cfg, &w).unwrap();
        assert_eq!(a, b);
        let s = a.breakdown.compute + a.breakdown.magic + a.breakdown.storeload
            + a.breakdown.transport;
        assert!((s - 1.0).abs() < 1e-9);
        let layer_sum: f64 = a.layers.iter().map(|l| l.total).sum();
        assert!((layer_sum - a.total_time_s).abs() <= 1e-9 * a.total_time_s);
    }

    #[test]
    fn run_rejects_mismatched_scheme() {
        let w = gbc_layers(&[1]);
        let p = profile(&w).unwrap();
        let sc = preset(
            SchemeName::ScSf,
            &Profile { scheme: Scheme::Pbc, w_pauli: Some(vec![1]), ..p },
            100,
        )
        .unwrap();
        assert!(matches!(run(&sc, &w), Err(Error::SchemeMismatch { .. })));
    }

    #[test]
    fn run_rejects_infeasible_ppm() {
        use crate::workload::{PauliAxis, PauliString, PpmLayer, Sign};
        let rot = PauliString::from_pairs((0..5).map(|q| (q, PauliAxis::Z)));
        let layer = PpmLayer::new(rot, true, Sign::Plus).unwrap();
        let w = Workload::new("w", 8, Layers::Pbc(vec![layer])).unwrap();
        let mut cfg = preset(SchemeName::ScSf, &profile(&w).unwrap(), 8).unwrap();
        cfg.n_comp = 3;
        assert!(matches!(
            run(&cfg, &w),
            Err(Error::PpmInfeasible { layer: 0, weight: 5, n_comp: 3 })
        ));
    }

    #[test]
    fn run_rejects_demand_over_magic_buffer() {
        let w = gbc_layers(&[4]);
        let mut cfg = na_sf_for(&w);
        cfg.q_magic = 2;
        assert!(matches!(run(&cfg, &w), Err(Error::MagicBufferTooSmall { demand: 4, .. })));
    }

    #[test]
    fn run_monotone_in_supply_knobs() {
        let w = gbc_layers(&[1, 1, 0, 1, 1, 1, 0, 1]);
        let base_cfg = preset(SchemeName::HtSfMacc, &profile(&w).unwrap(), w.n_total()).unwrap();
        let t0 = run(&base_cfg, &w).unwrap().total_time_s;

        let mut prev = t0;
        for copies in [2, 3, 4] {
            let mut c = base_cfg.clone();
            c.msf.copies = copies;
            let t = run(&c, &w).unwrap().total_time_s;
            assert!(t <= prev);
            prev = t;
        }

        let mut prev = None;
        for t_mst in [1e-7, 1e-5, 1e-3, 1e-1] {
            let mut c = base_cfg.clone();
            c.link.t_mst = t_mst;
            let t = run(&c, &w).unwrap().total_time_s;
            if let Some(p) = prev {
                assert!(t >= p);
            }
            prev = Some(t);
        }

        let mut slow_link = base_cfg.clone();
        slow_link.link.mu_link = 100.0;
        assert!(run(&slow_link, &w).unwrap().total_time_s >= t0);
    }

    #[test]
    fn run_monotone_in_mcsep_knobs() {
        // Wide layers against a small compute region exercise interchange.
        let layers: Vec<GateLayer> = (0..12)
            .map(|i| {
                let qs: Vec<usize> = (0..30).filter(|q| (q + i) % 3 != 0).collect();
                GateLayer::new(qs.into_iter().map(CliffordGate::H).collect(), vec![])
                    .unwrap()
            })
            .collect();
        let w = Workload::new("wide", 30, Layers::Gbc(layers)).unwrap();
        let base_cfg = preset(SchemeName::HtMcsepMacc, &profile(&w).unwrap(), 30).unwrap();
        let t0 = run(&base_cfg, &w).unwrap().total_time_s;

        let mut c = base_cfg.clone();
        c.q_buff += 5;
        assert!(run(&c, &w).unwrap().total_time_s <= t0);

        let mut c = base_cfg.clone();
        c.qec.d_qldpc += 6;
        assert!(run(&c, &w).unwrap().total_time_s >= t0);

        let mut c = base_cfg.clone();
        c.n_comp = 30;
        assert!(run(&c, &w).unwrap().total_time_s <= t0);
    }

    #[test]
    fn run_transport_applies_only_cross_modality_mcsep() {
        let layers: Vec<GateLayer> = (0..6)
            .map(|i| {
                let rot: Vec<usize> = (0..4).map(|q| (q + i) % 8).collect();
                GateLayer::new(rot.into_iter().map(CliffordGate::H).collect(), vec![]).unwrap()
            })
            .collect();
        let w = Workload::new("w", 8, Layers::Gbc(layers)).unwrap();
        let cfg = preset(SchemeName::HtMcsepMacc, &profile(&w).unwrap(), 8).unwrap();
        // NA memory + NA compute: no logical transport, no magic in this load.
        let rep = run(&cfg, &w).unwrap();
        assert!(rep.layers.iter().all(|l| l.transport == 0.0));

        let mut c = cfg.clone();
        c.memory_host = Modality::Sc; // hypothetical cross-modality memory
        let rep2 = run(&c, &w).unwrap();
        assert!(rep2.layers.iter().skip(1).any(|l| l.transport > 0.0));

        let mut c2 = c.clone();
        c2.link.b_lq = 4;
        assert!(run(&c2, &w).unwrap().total_time_s <= rep2.total_time_s);
        let mut c3 = c.clone();
        c3.link.t_lqt = 1e-3;
        assert!(run(&c3, &w).unwrap().total_time_s >= rep2.total_time_s);
    }

    #[test]
    fn stochastic_is_seed_reproducible() {
        let w = gbc_layers(&[1, 1, 1, 0, 1]);
        let cfg = na_sf_for(&w);
        let a = run_stochastic(&cfg, &w, 42).unwrap();
        let b = run_stochastic(&cfg, &w, 42).unwrap();
        assert_eq!(a, b);
        let c = run_stochastic(&cfg, &w, 43).unwrap();
        assert_ne!(a.total_time_s, c.total_time_s);
    }

    #[test]
    fn stochastic_serial_mean_tracks_deterministic() {
        let w = gbc_layers(&[1; 20]);
        let cfg = na_sf_for(&w);
        let det = run(&cfg, &w).unwrap().total_time_s;
        let mean: f64 = (0..300)
            .map(|s| run_stochastic(&cfg, &w, s).unwrap().total_time_s)
            .sum::<f64>()
            / 300.0;
        assert!((mean - det).abs() / det < 0.05, "mean {mean} vs det {det}");
    }

    #[test]
    fn stochastic_pipelined_respects_buffer_and_conservation() {
        let w = gbc_layers(&[1, 0, 1, 1, 0, 1, 1, 1]);
        let mut cfg = na_sf_for(&w);
        cfg.magic_model = MagicModel::Pipelined;
        cfg.q_magic = 2;
        let rep = run_stochastic(&cfg, &w, 7).unwrap();
        assert_eq!(rep.magic_consumed, 6);
        assert!(rep.total_time_s > 0.0);
    }

    #[test]
    fn geometric_attempts_mean() {
        let mut rng = StdRng::seed_from_u64(1);
        let n = 20_000;
        let mean: f64 =
            (0..n).map(|_| geometric_attempts(&mut rng, 0.01) as f64).sum::<f64>() / n as f64;
        assert!((mean - 100.0).abs() < 5.0, "mean = {mean}");
        assert_eq!(geometric_attempts(&mut rng, 1.0), 1);
    }
}

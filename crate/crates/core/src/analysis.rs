//! Closed-form architectural analyses and their validation against the engine.

use serde::Serialize;

use crate::archmodel::{ArchSection, ConfigFile, MagicModel, ModalitiesSection, ModalitySection, SchemeName};
use crate::engine::run;
use crate::error::{Error, Result};
use crate::workload::{profile, CliffordGate, GateLayer, Layers, Scheme, Workload};

/// Dimensionless drivers of the magic-acceleration speedup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedupInputs {
    /// Hardware speed ratio T_cycle(slow) / T_cycle(fast).
    pub s: f64,
    /// T-layer ratio in [0, 1].
    pub r_t: f64,
    /// Clifford-to-factory cycle gap C_MSF / (1 + r).
    pub rho_ms: f64,
    /// Normalized delivery penalty t_MST / (C_MSF * T_cycle(fast)).
    pub p_trans: f64,
}

/// Closed-form speedup of hosting the factory on the fast modality:
/// 1 + (S - 1 - P) / (1 + S / (r_T * rho_MS) + P).
///
/// With no T-layers there is nothing to accelerate and the ratio is exactly 1;
/// the closed form's 1/r_T singularity is an artifact of the rearrangement.
pub fn speedup_closed_form(inputs: &SpeedupInputs) -> f64 {
    if inputs.r_t == 0.0 {
        return 1.0;
    }
    let num = inputs.s - 1.0 - inputs.p_trans;
    let den = 1.0 + (1.0 / inputs.r_t) * (1.0 / inputs.rho_ms) * inputs.s + inputs.p_trans;
    1.0 + num / den
}

/// Cycle-counting timing parameters behind the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeParams {
    pub t_cycle_na: f64,
    pub t_cycle_sc: f64,
    /// Expected factory cycles per state.
    pub c_msf: f64,
    /// Syndrome rounds per Clifford layer.
    pub r: f64,
    /// One-way delivery latency, seconds.
    pub t_mst: f64,
}

impl Default for TimeParams {
    fn default() -> Self {
        TimeParams { t_cycle_na: 1e-3, t_cycle_sc: 1e-6, c_msf: 2400.0, r: 1.0, t_mst: 0.0 }
    }
}

impl TimeParams {
    /// The dimensionless drivers these timings induce at T-layer ratio `r_t`.
    pub fn inputs(&self, r_t: f64) -> SpeedupInputs {
        SpeedupInputs {
            s: self.t_cycle_na / self.t_cycle_sc,
            r_t,
            rho_ms: self.c_msf / (1.0 + self.r),
            p_trans: self.t_mst / (self.c_msf * self.t_cycle_sc),
        }
    }
}

/// Speedup as a ratio of summed per-layer times; the brute-force route the
/// closed form must agree with.
///
/// A Clifford layer costs (1+r) slow cycles; a T-layer adds the factory
/// latency on its host (plus delivery when the factory sits across the link).
pub fn speedup_from_times(d: usize, n_t: usize, p: &TimeParams) -> f64 {
    assert!(n_t <= d && d >= 1, "need 0 <= n_t <= d, d >= 1");
    let t_c = (1.0 + p.r) * p.t_cycle_na;
    let t_t_homo = t_c + p.c_msf * p.t_cycle_na;
    let t_t_acc = t_c + p.c_msf * p.t_cycle_sc + p.t_mst;
    let c_layers = (d - n_t) as f64;
    let n_t = n_t as f64;
    (c_layers * t_c + n_t * t_t_homo) / (c_layers * t_c + n_t * t_t_acc)
}

/// Ceiling of the closed form as the fast host becomes arbitrarily fast:
/// 1 + rho_MS.
pub fn speedup_upper_bound(rho_ms: f64) -> f64 {
    1.0 + rho_ms
}

/// Lower bound on the expected per-layer interchange overhead (in cycles) when
/// the compute and buffer sizes sit on the alpha- and beta-quantiles of the
/// active-set and delta distributions.
pub fn expected_overhead_lower_bound(
    alpha: f64,
    beta: f64,
    r: f64,
    n_comp: usize,
    q_buff: usize,
    phi_hide: f64,
    d_qldpc: usize,
) -> f64 {
    let batches = n_comp.div_ceil(q_buff) as f64;
    (1.0 - alpha) * (1.0 + r)
        + ((1.0 - alpha) * batches + (2.0 - beta - phi_hide)) * d_qldpc as f64
}

/// Builds a uniform synthetic workload: `d` single-qubit layers over
/// `n_total` logical qubits, `n_t` of them T-layers spread evenly, the rest
/// one-qubit Clifford layers. Every layer touches exactly qubit 0, so the
/// active set is constant and the closed-form assumptions hold.
pub fn uniform_workload(d: usize, n_t: usize, n_total: usize) -> Result<Workload> {
    if d == 0 || n_t > d || n_total == 0 {
        return Err(Error::InvalidConfig("need d >= 1, n_t <= d, n_total >= 1".into()));
    }
    let layers: Vec<GateLayer> = (0..d)
        .map(|i| {
            let t_here = (i + 1) * n_t / d > i * n_t / d;
            if t_here {
                GateLayer::new(vec![], vec![(0, false)])
            } else {
                GateLayer::new(vec![CliffordGate::H(0)], vec![])
            }
        })
        .collect::<Result<_>>()?;
    Workload::new(format!("uniform-d{d}-t{n_t}"), n_total, Layers::Gbc(layers))
}

/// Result of one engine-vs-closed-form comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrosscheckOutcome {
    pub r_t: f64,
    pub sim_speedup: f64,
    pub closed_form: f64,
    pub rel_err: f64,
}

/// Validates the engine against the closed form on a uniform workload.
///
/// The closed form counts time in whole cycles: one cycle of routing plus r
/// rounds per layer, and serial factory latency per T-layer. The comparison
/// therefore runs the engine on a cycle-uniform calibration of the two
/// homogeneous-vs-accelerated configurations: SM rounds pinned to one cycle,
/// atom spacing solved so one routing move costs one cycle, serial magic
/// accounting, single factory, unit magic buffer. `include_gate_time` keeps
/// the sub-cycle transversal gate term (the closed form neglects it; the
/// residual stays well under the 1% gate).
pub fn crosscheck(workload: &Workload, include_gate_time: bool) -> Result<CrosscheckOutcome> {
    let prof = profile(workload)?;
    if prof.scheme != Scheme::Gbc {
        return Err(Error::NonUniformWorkload("crosscheck needs a GBC workload".into()));
    }
    if prof.magic_demand.iter().any(|&m| m > 1) {
        return Err(Error::NonUniformWorkload("layers must have k_T in {0, 1}".into()));
    }
    if prof.q_act.iter().any(|&q| q != prof.q_act[0]) {
        return Err(Error::NonUniformWorkload("active-set size must be constant".into()));
    }

    let n_total = workload.n_total();
    let file = calibrated_file(n_total, include_gate_time);
    let homo = file.build(SchemeName::NaSf, Some(&prof), n_total)?;
    let acc = file.build(SchemeName::HtSfMacc, Some(&prof), n_total)?;

    let t_homo = run(&homo, workload)?.total_time_s;
    let t_acc = run(&acc, workload)?.total_time_s;
    let sim_speedup = t_homo / t_acc;

    let params = TimeParams {
        t_cycle_na: homo.na.t_cycle,
        t_cycle_sc: homo.sc.t_cycle,
        c_msf: homo.msf.expected_cycles(),
        r: homo.qec.sm_rounds_gbc as f64,
        t_mst: acc.link.t_mst,
    };
    let closed_form = speedup_closed_form(&params.inputs(prof.r_t));
    let rel_err = (sim_speedup - closed_form).abs() / closed_form;
    Ok(CrosscheckOutcome { r_t: prof.r_t, sim_speedup, closed_form, rel_err })
}

/// Cycle-uniform calibration: every SM round costs one NA cycle and the atom
/// spacing is solved so the worst-case routing move costs exactly one cycle.
fn calibrated_file(n_total: usize, include_gate_time: bool) -> ConfigFile {
    let d_surf = 15usize;
    let grid_side = {
        let root = n_total.isqrt();
        if root * root == n_total {
            root
        } else {
            root + 1
        }
    };
    // Solve (2 * sqrt(2) * spacing * d * side / 2750)^(1/2) ms = 1 ms.
    let spacing = 2750.0 / (2.0 * std::f64::consts::SQRT_2 * d_surf as f64 * grid_side as f64);
    let t_gate = if include_gate_time { None } else { Some(0.0) };
    ConfigFile {
        modalities: Some(ModalitiesSection {
            na: Some(ModalitySection {
                t_sm: Some(1e-3),
                t_gate,
                atom_spacing: Some(spacing),
                ..Default::default()
            }),
            sc: None,
        }),
        arch: Some(ArchSection {
            q_magic: Some(1),
            magic_model: Some(MagicModel::Serial),
            ..Default::default()
        }),
        ..Default::default()
    }
}

//! Architecture parameters, baseline presets, sizing rules, and the additive
//! physical-qubit accounting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::workload::{Profile, Scheme};

/// Hardware platform hosting a system role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Modality {
    #[serde(rename = "na")]
    Na,
    #[serde(rename = "sc")]
    Sc,
}

impl Modality {
    pub fn name(self) -> &'static str {
        match self {
            Modality::Na => "na",
            Modality::Sc => "sc",
        }
    }
}

/// Timing and geometry parameters of one modality.
///
/// `atom_spacing` and `move_constant` only apply to platforms with atom
/// motion; they are `None` for fixed-layout hardware.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalityParams {
    pub name: Modality,
    /// Seconds per generic QEC cycle.
    pub t_cycle: f64,
    /// Seconds per syndrome-measurement round.
    pub t_sm: f64,
    /// Seconds per transversal gate step.
    pub t_gate: f64,
    /// Physical qubit spacing in micrometers.
    pub atom_spacing: Option<f64>,
    /// Motion constant of the move-time formula (micrometer scale).
    pub move_constant: Option<f64>,
}

impl ModalityParams {
    pub fn na_default() -> Self {
        ModalityParams {
            name: Modality::Na,
            t_cycle: 1e-3,
            t_sm: 9e-4,
            t_gate: 1e-6,
            atom_spacing: Some(10.0),
            move_constant: Some(2750.0),
        }
    }

    pub fn sc_default() -> Self {
        ModalityParams {
            name: Modality::Sc,
            t_cycle: 1e-6,
            t_sm: 1e-6,
            t_gate: 1e-6,
            atom_spacing: None,
            move_constant: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.t_cycle <= 0.0 || self.t_sm <= 0.0 || self.t_gate < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "{} modality times must be positive",
                self.name.name()
            )));
        }
        Ok(())
    }
}

/// QEC code parameters for compute, buffer, and memory regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QecParams {
    /// Surface-code distance (odd, >= 3).
    pub d_surf: usize,
    /// qLDPC memory code distance.
    pub d_qldpc: usize,
    /// Logical qubits stored per memory block.
    pub qldpc_k: usize,
    /// Physical qubits per memory block, ancilla included.
    pub qldpc_block_phys: usize,
    /// Per-block logical-processing-unit ancilla enabling store/load.
    pub qldpc_lpu_phys: usize,
    /// Syndrome-measurement rounds per gate layer.
    pub sm_rounds_gbc: usize,
    /// Syndrome-measurement rounds per PPM layer (defaults to d_surf).
    pub sm_rounds_ppm: usize,
}

impl Default for QecParams {
    fn default() -> Self {
        let d_surf = 15;
        QecParams {
            d_surf,
            d_qldpc: 18,
            qldpc_k: 12,
            qldpc_block_phys: 576,
            qldpc_lpu_phys: 158,
            sm_rounds_gbc: 1,
            sm_rounds_ppm: d_surf,
        }
    }
}

/// Magic-state factory parameters (cultivation defaults).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MsfParams {
    pub host: Modality,
    /// Parallel factory copies.
    pub copies: usize,
    pub qubits_per_factory: usize,
    /// Cycles per production attempt.
    pub cycles_per_attempt: usize,
    /// Success probability per attempt.
    pub success_prob: f64,
}

impl MsfParams {
    pub fn default_on(host: Modality) -> Self {
        MsfParams {
            host,
            copies: 1,
            qubits_per_factory: 463,
            cycles_per_attempt: 24,
            success_prob: 0.01,
        }
    }

    /// Expected cycles per magic state: C_att / p.
    pub fn expected_cycles(&self) -> f64 {
        self.cycles_per_attempt as f64 / self.success_prob
    }

    fn validate(&self) -> Result<()> {
        if self.copies == 0 {
            return Err(Error::InvalidConfig("msf.copies must be >= 1".into()));
        }
        if !(self.success_prob > 0.0 && self.success_prob <= 1.0) {
            return Err(Error::InvalidConfig("msf.success_prob must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Cross-modality interconnect parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// One-way magic-state delivery latency, seconds.
    pub t_mst: f64,
    /// Magic states per second the link sustains (infinite = unbounded).
    pub mu_link: f64,
    /// Logical qubits per transport invocation.
    pub b_lq: usize,
    /// Seconds per transport invocation.
    pub t_lqt: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        LinkParams { t_mst: 1e-7, mu_link: f64::INFINITY, b_lq: 1, t_lqt: 1e-7 }
    }
}

impl LinkParams {
    fn validate(&self) -> Result<()> {
        if self.t_mst < 0.0 || self.t_lqt < 0.0 || self.mu_link <= 0.0 || self.b_lq == 0 {
            return Err(Error::InvalidConfig("bad link parameters".into()));
        }
        Ok(())
    }
}

/// How magic-state production composes with layer execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MagicModel {
    /// Every take pays the full production plus delivery latency, no overlap
    /// with compute. This is the composition the closed-form analyses assume.
    #[default]
    #[serde(rename = "serial")]
    Serial,
    /// Factories run continuously; output buffers up to q_magic states and
    /// pre-fills during compute, so waits are residual.
    #[serde(rename = "pipelined")]
    Pipelined,
}

/// The six baseline architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeName {
    #[serde(rename = "na-sf")]
    NaSf,
    #[serde(rename = "sc-sf")]
    ScSf,
    #[serde(rename = "ht-sf-macc")]
    HtSfMacc,
    #[serde(rename = "na-mcsep")]
    NaMcsep,
    #[serde(rename = "ht-mcsep")]
    HtMcsep,
    #[serde(rename = "ht-mcsep-macc")]
    HtMcsepMacc,
}

impl SchemeName {
    pub const ALL: [SchemeName; 6] = [
        SchemeName::NaSf,
        SchemeName::ScSf,
        SchemeName::HtSfMacc,
        SchemeName::NaMcsep,
        SchemeName::HtMcsep,
        SchemeName::HtMcsepMacc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeName::NaSf => "na-sf",
            SchemeName::ScSf => "sc-sf",
            SchemeName::HtSfMacc => "ht-sf-macc",
            SchemeName::NaMcsep => "na-mcsep",
            SchemeName::HtMcsep => "ht-mcsep",
            SchemeName::HtMcsepMacc => "ht-mcsep-macc",
        }
    }

    pub fn parse(s: &str) -> Result<SchemeName> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Self::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown scheme {s:?}; valid schemes: {}",
                    names.join(", ")
                ))
            })
    }

    /// Host roles: (compute, memory, msf).
    pub fn hosts(self) -> (Modality, Modality, Modality) {
        use Modality::{Na, Sc};
        match self {
            SchemeName::NaSf => (Na, Na, Na),
            SchemeName::ScSf => (Sc, Sc, Sc),
            SchemeName::HtSfMacc => (Na, Na, Sc),
            SchemeName::NaMcsep => (Na, Na, Na),
            SchemeName::HtMcsep => (Sc, Na, Sc),
            SchemeName::HtMcsepMacc => (Na, Na, Sc),
        }
    }

    /// Whether the scheme separates qLDPC memory from the compute region.
    pub fn mcsep(self) -> bool {
        matches!(self, SchemeName::NaMcsep | SchemeName::HtMcsep | SchemeName::HtMcsepMacc)
    }

    /// Execution scheme implied by the compute host: GBC on NA, PBC on SC.
    pub fn execution_scheme(self) -> Scheme {
        match self.hosts().0 {
            Modality::Na => Scheme::Gbc,
            Modality::Sc => Scheme::Pbc,
        }
    }
}

impl std::fmt::Display for SchemeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fully-resolved architecture description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchConfig {
    pub scheme_name: SchemeName,
    pub compute_host: Modality,
    pub memory_host: Modality,
    pub msf_host: Modality,
    pub mcsep: bool,
    /// Compute-region logical capacity.
    pub n_comp: usize,
    /// Logical swap-buffer capacity.
    pub q_buff: usize,
    /// Magic-state buffer capacity (logical qubits).
    pub q_magic: usize,
    /// Pipelining hide fraction in [0, 1].
    pub phi_hide: f64,
    pub na: ModalityParams,
    pub sc: ModalityParams,
    pub qec: QecParams,
    pub msf: MsfParams,
    pub link: LinkParams,
    pub magic_model: MagicModel,
}

impl ArchConfig {
    pub fn modality(&self, m: Modality) -> &ModalityParams {
        match m {
            Modality::Na => &self.na,
            Modality::Sc => &self.sc,
        }
    }

    pub fn compute_params(&self) -> &ModalityParams {
        self.modality(self.compute_host)
    }

    pub fn memory_params(&self) -> &ModalityParams {
        self.modality(self.memory_host)
    }

    pub fn msf_params(&self) -> &ModalityParams {
        self.modality(self.msf_host)
    }

    /// Execution scheme implied by the compute host.
    pub fn execution_scheme(&self) -> Scheme {
        match self.compute_host {
            Modality::Na => Scheme::Gbc,
            Modality::Sc => Scheme::Pbc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.na.validate()?;
        self.sc.validate()?;
        self.msf.validate()?;
        self.link.validate()?;
        if !(0.0..=1.0).contains(&self.phi_hide) {
            return Err(Error::InvalidConfig("arch.phi_hide must be in [0, 1]".into()));
        }
        if self.qec.d_surf < 3 || self.qec.d_surf % 2 == 0 {
            return Err(Error::InvalidConfig("qec.d_surf must be an odd integer >= 3".into()));
        }
        if self.n_comp == 0 {
            return Err(Error::InvalidConfig("arch.n_comp must be >= 1".into()));
        }
        if self.q_magic == 0 {
            return Err(Error::InvalidConfig("arch.q_magic must be >= 1".into()));
        }
        Ok(())
    }
}

/// Physical qubits per logical qubit divided by d^2: transversal compute needs
/// 2d^2, lattice-surgery compute with routing ancilla needs 8d^2.
pub fn per_logical_factor(host: Modality) -> usize {
    match host {
        Modality::Na => 2,
        Modality::Sc => 8,
    }
}

/// Builds a fully-populated configuration for a baseline scheme, sizing the
/// compute region and buffers from the workload profile.
pub fn preset(scheme: SchemeName, profile: &Profile, n_total: usize) -> Result<ArchConfig> {
    ConfigFile::default().build(scheme, Some(profile), n_total)
}

/// Additive physical-qubit tally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceBreakdown {
    pub n_compute: usize,
    pub n_memory: usize,
    pub n_msf: usize,
    pub n_buff: usize,
    pub n_phys: usize,
}

/// Tallies physical qubits: compute + memory + MSF + buffers.
pub fn qubit_footprint(config: &ArchConfig, n_total: usize) -> ResourceBreakdown {
    let d2 = config.qec.d_surf * config.qec.d_surf;
    let f = per_logical_factor(config.compute_host);
    let n_compute = f * d2 * config.n_comp;
    let n_memory = if config.mcsep {
        let blocks = n_total.div_ceil(config.qec.qldpc_k);
        (config.qec.qldpc_block_phys + config.qec.qldpc_lpu_phys) * blocks
    } else {
        0
    };
    let n_msf = config.msf.copies * config.msf.qubits_per_factory;
    let n_buff = f * d2 * (config.q_buff + config.q_magic);
    ResourceBreakdown {
        n_compute,
        n_memory,
        n_msf,
        n_buff,
        n_phys: n_compute + n_memory + n_msf + n_buff,
    }
}

/// Default per-operation logical-error-rate model: A * (p_phys/p_th)^((d+1)/2)
/// with A = 0.1, p_phys = 1e-3, p_th = 1e-2.
pub fn default_ler_model(d: usize) -> f64 {
    0.1 * (0.1f64).powf((d as f64 + 1.0) / 2.0)
}

/// Smallest odd distance d >= 3 whose total logical error stays within budget.
///
/// Distance remains a directly settable config field; this helper only serves
/// workflows that want it derived from a caller-supplied error model.
pub fn choose_distance_with<F: Fn(usize) -> f64>(
    target_success: f64,
    logical_ops: u64,
    model: F,
) -> Result<usize> {
    if !(0.0 < target_success && target_success < 1.0) {
        return Err(Error::InvalidConfig("target success must be in (0, 1)".into()));
    }
    if logical_ops == 0 {
        return Err(Error::InvalidConfig("logical_ops must be >= 1".into()));
    }
    let budget = 1.0 - target_success;
    let mut d = 3;
    while d <= 99 {
        // Tolerate f64 rounding when the product lands exactly on the budget.
        if logical_ops as f64 * model(d) <= budget * (1.0 + 1e-9) {
            return Ok(d);
        }
        d += 2;
    }
    Err(Error::DistanceUnreachable { target: target_success, logical_ops })
}

/// `choose_distance_with` using the default error model.
pub fn choose_distance(target_success: f64, logical_ops: u64) -> Result<usize> {
    choose_distance_with(target_success, logical_ops, default_ler_model)
}

// ---------------------------------------------------------------------------
// Config file schema
// ---------------------------------------------------------------------------

/// On-disk configuration (TOML). Every key is optional; absent keys fall back
/// to the defaults above or to the preset sizing rules.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modalities: Option<ModalitiesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qec: Option<QecSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msf: Option<MsfSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<LinkSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arch: Option<ArchSection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalitiesSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub na: Option<ModalitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sc: Option<ModalitySection>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalitySection {
    pub t_cycle: Option<f64>,
    pub t_sm: Option<f64>,
    pub t_gate: Option<f64>,
    pub atom_spacing: Option<f64>,
    pub move_constant: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QecSection {
    pub d_surf: Option<usize>,
    pub d_qldpc: Option<usize>,
    pub qldpc_k: Option<usize>,
    pub qldpc_block_phys: Option<usize>,
    pub qldpc_lpu_phys: Option<usize>,
    pub sm_rounds_gbc: Option<usize>,
    pub sm_rounds_ppm: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MsfSection {
    pub host: Option<Modality>,
    pub copies: Option<usize>,
    pub qubits_per_factory: Option<usize>,
    pub cycles_per_attempt: Option<usize>,
    pub success_prob: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub t_mst: Option<f64>,
    pub mu_link: Option<f64>,
    pub b_lq: Option<usize>,
    pub t_lqt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchSection {
    pub scheme: Option<SchemeName>,
    pub n_comp: Option<usize>,
    pub q_buff: Option<usize>,
    pub q_magic: Option<usize>,
    pub phi_hide: Option<f64>,
    pub magic_model: Option<MagicModel>,
}

impl ConfigFile {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Format(e.to_string()))
    }

    /// Scheme named in the file's arch section, if any.
    pub fn scheme(&self) -> Option<SchemeName> {
        self.arch.as_ref().and_then(|a| a.scheme)
    }

    /// Applies one `key=value` override using the config file's dotted paths.
    pub fn apply_set(&mut self, key: &str, value: &str) -> Result<()> {
        fn bad<T>(key: &str, value: &str) -> Result<T> {
            Err(Error::InvalidConfig(format!("bad value {value:?} for {key}")))
        }
        fn f64v(key: &str, value: &str) -> Result<f64> {
            match value {
                "inf" => Ok(f64::INFINITY),
                _ => value.parse().or_else(|_| bad(key, value)),
            }
        }
        fn usizev(key: &str, value: &str) -> Result<usize> {
            value.parse().or_else(|_| bad(key, value))
        }

        let parts: Vec<&str> = key.split('.').collect();
        match parts.as_slice() {
            ["modalities", m @ ("na" | "sc"), field] => {
                let mods = self.modalities.get_or_insert_with(Default::default);
                let sec = if *m == "na" {
                    mods.na.get_or_insert_with(Default::default)
                } else {
                    mods.sc.get_or_insert_with(Default::default)
                };
                match *field {
                    "t_cycle" => sec.t_cycle = Some(f64v(key, value)?),
                    "t_sm" => sec.t_sm = Some(f64v(key, value)?),
                    "t_gate" => sec.t_gate = Some(f64v(key, value)?),
                    "atom_spacing" => sec.atom_spacing = Some(f64v(key, value)?),
                    "move_constant" => sec.move_constant = Some(f64v(key, value)?),
                    _ => return Err(Error::InvalidConfig(format!("unknown key {key}"))),
                }
            }
            ["qec", field] => {
                let sec = self.qec.get_or_insert_with(Default::default);
                match *field {
                    "d_surf" => sec.d_surf = Some(usizev(key, value)?),
                    "d_qldpc" => sec.d_qldpc = Some(usizev(key, value)?),
                    "qldpc_k" => sec.qldpc_k = Some(usizev(key, value)?),
                    "qldpc_block_phys" => sec.qldpc_block_phys = Some(usizev(key, value)?),
                    "qldpc_lpu_phys" => sec.qldpc_lpu_phys = Some(usizev(key, value)?),
                    "sm_rounds_gbc" => sec.sm_rounds_gbc = Some(usizev(key, value)?),
                    "sm_rounds_ppm" => sec.sm_rounds_ppm = Some(usizev(key, value)?),
                    _ => return Err(Error::InvalidConfig(format!("unknown key {key}"))),
                }
            }
            ["msf", field] => {
                let sec = self.msf.get_or_insert_with(Default::default);
                match *field {
                    "host" => {
                        sec.host = Some(match value {
                            "na" => Modality::Na,
                            "sc" => Modality::Sc,
                            _ => return bad(key, value),
                        })
                    }
                    "copies" => sec.copies = Some(usizev(key, value)?),
                    "qubits_per_factory" => sec.qubits_per_factory = Some(usizev(key, value)?),
                    "cycles_per_attempt" => sec.cycles_per_attempt = Some(usizev(key, value)?),
                    "success_prob" => sec.success_prob = Some(f64v(key, value)?),
                    _ => return Err(Error::InvalidConfig(format!("unknown key {key}"))),
                }
            }
            ["link", field] => {
                let sec = self.link.get_or_insert_with(Default::default);
                match *field {
                    "t_mst" => sec.t_mst = Some(f64v(key, value)?),
                    "mu_link" => sec.mu_link = Some(f64v(key, value)?),
                    "b_lq" => sec.b_lq = Some(usizev(key, value)?),
                    "t_lqt" => sec.t_lqt = Some(f64v(key, value)?),
                    _ => return Err(Error::InvalidConfig(format!("unknown key {key}"))),
                }
            }
            ["arch", field] => {
                let sec = self.arch.get_or_insert_with(Default::default);
                match *field {
                    "scheme" => sec.scheme = Some(SchemeName::parse(value)?),
                    "n_comp" => sec.n_comp = Some(usizev(key, value)?),
                    "q_buff" => sec.q_buff = Some(usizev(key, value)?),
                    "q_magic" => sec.q_magic = Some(usizev(key, value)?),
                    "phi_hide" => sec.phi_hide = Some(f64v(key, value)?),
                    "magic_model" => {
                        sec.magic_model = Some(match value {
                            "serial" => MagicModel::Serial,
                            "pipelined" => MagicModel::Pipelined,
                            _ => return bad(key, value),
                        })
                    }
                    _ => return Err(Error::InvalidConfig(format!("unknown key {key}"))),
                }
            }
            _ => return Err(Error::InvalidConfig(format!("unknown key {key}"))),
        }
        Ok(())
    }

    /// Resolves the file against a scheme and workload profile into a full
    /// configuration. Sizing rules for fields the file leaves unset:
    ///
    /// - non-MCSep: n_comp = n_total, q_buff = 0;
    /// - MCSep + GBC: n_comp = min(median(q_act), ceil(n_total/3)),
    ///   q_buff = 0.95-quantile of the active-set deltas;
    /// - MCSep + PBC: n_comp = max Pauli weight, q_buff = 0.8-quantile of the
    ///   support deltas;
    /// - q_magic = max per-layer magic demand, at least 1.
    pub fn build(
        &self,
        scheme: SchemeName,
        profile: Option<&Profile>,
        n_total: usize,
    ) -> Result<ArchConfig> {
        let (compute_host, memory_host, default_msf_host) = scheme.hosts();
        let mcsep = scheme.mcsep();

        let mut na = ModalityParams::na_default();
        let mut sc = ModalityParams::sc_default();
        if let Some(mods) = &self.modalities {
            if let Some(sec) = &mods.na {
                apply_modality(&mut na, sec);
            }
            if let Some(sec) = &mods.sc {
                apply_modality(&mut sc, sec);
            }
        }

        let mut qec = QecParams::default();
        if let Some(sec) = &self.qec {
            if let Some(v) = sec.d_surf {
                qec.d_surf = v;
                qec.sm_rounds_ppm = v;
            }
            if let Some(v) = sec.d_qldpc {
                qec.d_qldpc = v;
            }
            if let Some(v) = sec.qldpc_k {
                qec.qldpc_k = v;
            }
            if let Some(v) = sec.qldpc_block_phys {
                qec.qldpc_block_phys = v;
            }
            if let Some(v) = sec.qldpc_lpu_phys {
                qec.qldpc_lpu_phys = v;
            }
            if let Some(v) = sec.sm_rounds_gbc {
                qec.sm_rounds_gbc = v;
            }
            if let Some(v) = sec.sm_rounds_ppm {
                qec.sm_rounds_ppm = v;
            }
        }

        let mut msf = MsfParams::default_on(default_msf_host);
        if let Some(sec) = &self.msf {
            if let Some(v) = sec.host {
                msf.host = v;
            }
            if let Some(v) = sec.copies {
                msf.copies = v;
            }
            if let Some(v) = sec.qubits_per_factory {
                msf.qubits_per_factory = v;
            }
            if let Some(v) = sec.cycles_per_attempt {
                msf.cycles_per_attempt = v;
            }
            if let Some(v) = sec.success_prob {
                msf.success_prob = v;
            }
        }

        let mut link = LinkParams::default();
        if let Some(sec) = &self.link {
            if let Some(v) = sec.t_mst {
                link.t_mst = v;
            }
            if let Some(v) = sec.mu_link {
                link.mu_link = v;
            }
            if let Some(v) = sec.b_lq {
                link.b_lq = v;
            }
            if let Some(v) = sec.t_lqt {
                link.t_lqt = v;
            }
        }

        let arch = self.arch.clone().unwrap_or_default();

        // Sizing rules; explicit values win.
        let exec = scheme.execution_scheme();
        if mcsep && (arch.n_comp.is_none() || arch.q_buff.is_none()) {
            let p = profile.ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "{scheme} sizing needs a workload profile or explicit arch.n_comp/q_buff"
                ))
            })?;
            if p.scheme != exec {
                return Err(Error::ProfileMismatch {
                    scheme: scheme.name(),
                    profile: exec.name(),
                });
            }
        }
        let n_comp = match arch.n_comp {
            Some(v) => v,
            None if !mcsep => n_total.max(1),
            None => {
                let p = profile.expect("checked above");
                match exec {
                    Scheme::Gbc => {
                        let median = p.q_act_quantile(0.5)?;
                        median.min(n_total.div_ceil(3)).max(1)
                    }
                    Scheme::Pbc => p.w_pauli.as_ref().and_then(|w| w.iter().copied().max()).unwrap_or(1).max(1),
                }
            }
        };
        let q_buff = match arch.q_buff {
            Some(v) => v,
            None if !mcsep => 0,
            None => {
                let p = profile.expect("checked above");
                if p.delta_q_act.is_empty() {
                    0
                } else {
                    let alpha = match exec {
                        Scheme::Gbc => 0.95,
                        Scheme::Pbc => 0.8,
                    };
                    p.delta_quantile(alpha)?
                }
            }
        };
        let q_magic = match arch.q_magic {
            Some(v) => v,
            None => profile.map(|p| p.max_magic_demand()).unwrap_or(1).max(1),
        };

        let cfg = ArchConfig {
            scheme_name: scheme,
            compute_host,
            memory_host,
            msf_host: msf.host,
            mcsep,
            n_comp,
            q_buff,
            q_magic,
            phi_hide: arch.phi_hide.unwrap_or(0.5),
            na,
            sc,
            qec,
            msf,
            link,
            magic_model: arch.magic_model.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn apply_modality(params: &mut ModalityParams, sec: &ModalitySection) {
    if let Some(v) = sec.t_cycle {
        params.t_cycle = v;
    }
    if let Some(v) = sec.t_sm {
        params.t_sm = v;
    }
    if let Some(v) = sec.t_gate {
        params.t_gate = v;
    }
    if let Some(v) = sec.atom_spacing {
        params.atom_spacing = Some(v);
    }
    if let Some(v) = sec.move_constant {
        params.move_constant = Some(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::Scheme;

    fn gbc_profile(q_act: Vec<usize>, delta: Vec<usize>, magic: Vec<usize>) -> Profile {
        let d = q_act.len();
        let n_t = magic.iter().filter(|&&m| m > 0).count();
        Profile {
            scheme: Scheme::Gbc,
            d,
            n_t,
            r_t: n_t as f64 / d as f64,
            q_act,
            delta_q_act: delta,
            w_pauli: None,
            magic_demand: magic,
        }
    }

    fn pbc_profile(w_pauli: Vec<usize>, delta: Vec<usize>, magic: Vec<usize>) -> Profile {
        let d = w_pauli.len();
        let n_t = magic.iter().filter(|&&m| m > 0).count();
        Profile {
            scheme: Scheme::Pbc,
            d,
            n_t,
            r_t: n_t as f64 / d as f64,
            q_act: w_pauli.clone(),
            delta_q_act: delta,
            w_pauli: Some(w_pauli),
            magic_demand: magic,
        }
    }

    #[test]
    fn preset_non_mcsep_uses_full_compute() {
        let p = pbc_profile(vec![2, 3], vec![1], vec![1, 1]);
        let cfg = preset(SchemeName::ScSf, &p, 50).unwrap();
        assert_eq!(cfg.n_comp, 50);
        assert_eq!(cfg.q_buff, 0);
        assert!(!cfg.mcsep);
        assert_eq!(cfg.compute_host, Modality::Sc);
    }

    #[test]
    fn preset_pbc_compute_covers_max_weight() {
        let p = pbc_profile(vec![3, 7, 2], vec![4, 5], vec![1, 1, 1]);
        let cfg = preset(SchemeName::HtMcsep, &p, 10).unwrap();
        assert_eq!(cfg.n_comp, 7);
        assert!(cfg.mcsep);
        assert_eq!(cfg.compute_host, Modality::Sc);
        assert_eq!(cfg.memory_host, Modality::Na);
    }

    #[test]
    fn preset_gbc_mcsep_sizing_rule() {
        let p = gbc_profile(vec![4; 10], vec![0; 9], vec![1; 10]);
        let cfg = preset(SchemeName::HtMcsepMacc, &p, 9).unwrap();
        assert_eq!(cfg.n_comp, 3); // min(median 4, ceil(9/3) = 3)
        assert_eq!(cfg.msf_host, Modality::Sc);
        assert_eq!(cfg.compute_host, Modality::Na);
    }

    #[test]
    fn preset_buffer_quantiles() {
        let p = gbc_profile(vec![5; 21], (0..20).collect(), vec![0; 21]);
        let cfg = preset(SchemeName::NaMcsep, &p, 30).unwrap();
        // 0.95-quantile of 0..=19: ceil(0.95*20)-1 = 18 -> value 18.
        assert_eq!(cfg.q_buff, 18);
        assert_eq!(cfg.q_magic, 1); // no magic demand, floor of 1
    }

    #[test]
    fn preset_rejects_profile_mismatch() {
        let p = gbc_profile(vec![2, 2], vec![0], vec![1, 1]);
        let err = preset(SchemeName::HtMcsep, &p, 10);
        assert!(matches!(err, Err(Error::ProfileMismatch { .. })));
    }

    #[test]
    fn preset_q_magic_tracks_peak_demand() {
        let p = gbc_profile(vec![3, 3], vec![0], vec![2, 5]);
        let cfg = preset(SchemeName::HtSfMacc, &p, 10).unwrap();
        assert_eq!(cfg.q_magic, 5);
    }

    #[test]
    fn footprint_na_sf_worked_example() {
        let p = gbc_profile(vec![100], vec![], vec![1]);
        let cfg = preset(SchemeName::NaSf, &p, 100).unwrap();
        let fp = qubit_footprint(&cfg, 100);
        assert_eq!(fp.n_compute, 45000);
        assert_eq!(fp.n_memory, 0);
        assert_eq!(fp.n_msf, 463);
        assert_eq!(fp.n_buff, 450);
        assert_eq!(fp.n_phys, 45913);
    }

    #[test]
    fn footprint_memory_blocks() {
        let p = gbc_profile(vec![10; 4], vec![0; 3], vec![0; 4]);
        let cfg = preset(SchemeName::NaMcsep, &p, 100).unwrap();
        let fp = qubit_footprint(&cfg, 100);
        assert_eq!(fp.n_memory, 734 * 9);
        assert_eq!(fp.n_memory, 6606);
    }

    #[test]
    fn footprint_msf_linear_in_copies() {
        let p = gbc_profile(vec![5], vec![], vec![1]);
        let mut cfg = preset(SchemeName::NaSf, &p, 5).unwrap();
        cfg.msf.copies = 3;
        assert_eq!(qubit_footprint(&cfg, 5).n_msf, 1389);
        cfg.msf.copies = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn footprint_na_below_sc_at_shared_params() {
        let gp = gbc_profile(vec![40], vec![], vec![1]);
        let pp = pbc_profile(vec![40], vec![], vec![1]);
        let na = preset(SchemeName::NaSf, &gp, 40).unwrap();
        let sc = preset(SchemeName::ScSf, &pp, 40).unwrap();
        assert!(qubit_footprint(&na, 40).n_phys < qubit_footprint(&sc, 40).n_phys);
    }

    #[test]
    fn footprint_monotone_in_knobs() {
        let p = gbc_profile(vec![10; 4], vec![2; 3], vec![1; 4]);
        let base = preset(SchemeName::HtMcsepMacc, &p, 30).unwrap();
        let fp = qubit_footprint(&base, 30);
        let mut c = base.clone();
        c.n_comp += 1;
        assert!(qubit_footprint(&c, 30).n_phys > fp.n_phys);
        let mut c = base.clone();
        c.q_buff += 1;
        assert!(qubit_footprint(&c, 30).n_phys > fp.n_phys);
        let mut c = base.clone();
        c.q_magic += 1;
        assert!(qubit_footprint(&c, 30).n_phys > fp.n_phys);
        let mut c = base.clone();
        c.msf.copies += 1;
        assert!(qubit_footprint(&c, 30).n_phys > fp.n_phys);
        let mut c = base.clone();
        c.qec.d_surf += 2;
        assert!(qubit_footprint(&c, 30).n_phys > fp.n_phys);
    }

    #[test]
    fn choose_distance_examples() {
        assert_eq!(choose_distance_with(0.9, 1, |_| 0.0).unwrap(), 3);
        assert_eq!(choose_distance(0.9, 1_000_000).unwrap(), 11);
        assert!(matches!(
            choose_distance_with(0.9, 1, |_| 1.0),
            Err(Error::DistanceUnreachable { .. })
        ));
    }

    #[test]
    fn config_file_parses_and_overrides() {
        let src = r#"
            [qec]
            d_surf = 21

            [msf]
            copies = 2

            [arch]
            scheme = "ht-sf-macc"
            phi_hide = 0.25
        "#;
        let mut file = ConfigFile::from_toml_str(src).unwrap();
        assert_eq!(file.scheme(), Some(SchemeName::HtSfMacc));
        file.apply_set("link.t_mst", "1e-4").unwrap();
        file.apply_set("modalities.na.t_sm", "1e-3").unwrap();
        let p = gbc_profile(vec![4, 4], vec![1], vec![1, 0]);
        let cfg = file.build(SchemeName::HtSfMacc, Some(&p), 12).unwrap();
        assert_eq!(cfg.qec.d_surf, 21);
        assert_eq!(cfg.qec.sm_rounds_ppm, 21); // follows d_surf when unset
        assert_eq!(cfg.msf.copies, 2);
        assert_eq!(cfg.link.t_mst, 1e-4);
        assert_eq!(cfg.na.t_sm, 1e-3);
        assert_eq!(cfg.phi_hide, 0.25);
        assert_eq!(cfg.magic_model, MagicModel::Serial);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(ConfigFile::from_toml_str("[qec]\nbogus = 1").is_err());
        let mut f = ConfigFile::default();
        assert!(f.apply_set("qec.bogus", "1").is_err());
        assert!(f.apply_set("arch.phi_hide", "0.7").is_ok());
    }

    #[test]
    fn preset_is_deterministic() {
        let p = gbc_profile(vec![3, 5, 4], vec![2, 6], vec![1, 0, 2]);
        let a = preset(SchemeName::HtMcsepMacc, &p, 12).unwrap();
        let b = preset(SchemeName::HtMcsepMacc, &p, 12).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scheme_roles_match_table() {
        use Modality::{Na, Sc};
        assert_eq!(SchemeName::NaSf.hosts(), (Na, Na, Na));
        assert_eq!(SchemeName::ScSf.hosts(), (Sc, Sc, Sc));
        assert_eq!(SchemeName::HtSfMacc.hosts(), (Na, Na, Sc));
        assert_eq!(SchemeName::NaMcsep.hosts(), (Na, Na, Na));
        assert_eq!(SchemeName::HtMcsep.hosts(), (Sc, Na, Sc));
        assert_eq!(SchemeName::HtMcsepMacc.hosts(), (Na, Na, Sc));
        for s in SchemeName::ALL {
            assert_eq!(
                s.mcsep(),
                matches!(s, SchemeName::NaMcsep | SchemeName::HtMcsep | SchemeName::HtMcsepMacc)
            );
        }
    }

    #[test]
    fn msf_expected_cycles_at_cultivation_defaults() {
        let msf = MsfParams::default_on(Modality::Sc);
        assert_eq!(msf.expected_cycles(), 2400.0);
    }
}

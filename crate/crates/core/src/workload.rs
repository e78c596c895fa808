//! Layered fault-tolerant workloads and their feature profiles.
//!
//! A workload is an ordered sequence of gate layers (GBC) or Pauli-product
//! layers (PBC) over a fixed set of logical qubits. The profile extracts the
//! per-layer feature timelines (active-qubit counts, inter-layer swap counts,
//! Pauli weights, magic-state demand) that drive every cost formula downstream.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::{self, MapAccess, SeqAccess, Visitor};
use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Execution scheme of a workload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "gbc")]
    Gbc,
    #[serde(rename = "pbc")]
    Pbc,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Gbc => "gbc",
            Scheme::Pbc => "pbc",
        }
    }
}

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

/// Sign carried by a Pauli operator or rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// Sparse multi-qubit Pauli operator: qubit index -> axis.
///
/// The weight is the number of non-identity terms. Map keying guarantees
/// distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PauliString {
    terms: BTreeMap<usize, PauliAxis>,
}

impl PauliString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, PauliAxis)>) -> Self {
        PauliString { terms: pairs.into_iter().collect() }
    }

    /// Single-qubit Pauli on `qubit`.
    pub fn single(qubit: usize, axis: PauliAxis) -> Self {
        Self::from_pairs([(qubit, axis)])
    }

    pub fn weight(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn axis(&self, qubit: usize) -> Option<PauliAxis> {
        self.terms.get(&qubit).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, PauliAxis)> + '_ {
        self.terms.iter().map(|(&q, &a)| (q, a))
    }

    /// Set of qubits with a non-identity term.
    pub fn support(&self) -> BTreeSet<usize> {
        self.terms.keys().copied().collect()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (q, axis) in &self.terms {
            map.serialize_entry(&q.to_string(), axis)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, PauliAxis> = BTreeMap::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for (k, v) in raw {
            let q: usize = k
                .parse()
                .map_err(|_| de::Error::custom(format!("bad qubit index key {k:?}")))?;
            terms.insert(q, v);
        }
        Ok(PauliString { terms })
    }
}

/// One Clifford gate of a GBC layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
}

impl CliffordGate {
    pub fn name(&self) -> &'static str {
        match self {
            CliffordGate::H(_) => "h",
            CliffordGate::S(_) => "s",
            CliffordGate::Sdg(_) => "sdg",
            CliffordGate::X(_) => "x",
            CliffordGate::Y(_) => "y",
            CliffordGate::Z(_) => "z",
            CliffordGate::Cx(..) => "cx",
            CliffordGate::Cz(..) => "cz",
        }
    }

    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            CliffordGate::H(q)
            | CliffordGate::S(q)
            | CliffordGate::Sdg(q)
            | CliffordGate::X(q)
            | CliffordGate::Y(q)
            | CliffordGate::Z(q) => (q, None),
            CliffordGate::Cx(a, b) | CliffordGate::Cz(a, b) => (a, Some(b)),
        }
    }

    fn from_parts(name: &str, qubits: &[usize]) -> Option<CliffordGate> {
        match (name, qubits) {
            ("h", [q]) => Some(CliffordGate::H(*q)),
            ("s", [q]) => Some(CliffordGate::S(*q)),
            ("sdg", [q]) => Some(CliffordGate::Sdg(*q)),
            ("x", [q]) => Some(CliffordGate::X(*q)),
            ("y", [q]) => Some(CliffordGate::Y(*q)),
            ("z", [q]) => Some(CliffordGate::Z(*q)),
            ("cx", [a, b]) => Some(CliffordGate::Cx(*a, *b)),
            ("cz", [a, b]) => Some(CliffordGate::Cz(*a, *b)),
            _ => None,
        }
    }
}

impl Serialize for CliffordGate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (q0, q1) = self.qubits();
        let len = if q1.is_some() { 3 } else { 2 };
        let mut seq = s.serialize_seq(Some(len))?;
        seq.serialize_element(self.name())?;
        seq.serialize_element(&q0)?;
        if let Some(q1) = q1 {
            seq.serialize_element(&q1)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for CliffordGate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = CliffordGate;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [name, qubit, ...] gate array")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<CliffordGate, A::Error> {
                let name: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::custom("missing gate name"))?;
                let mut qubits = Vec::new();
                while let Some(q) = seq.next_element::<usize>()? {
                    qubits.push(q);
                }
                CliffordGate::from_parts(&name, &qubits)
                    .ok_or_else(|| de::Error::custom(format!("bad gate entry {name:?}")))
            }
        }
        d.deserialize_seq(V)
    }
}

/// One layer of parallel logical gates (GBC).
///
/// All gates in the layer execute concurrently, so no qubit may appear in more
/// than one gate. `t_gates` lists (qubit, dagger) pairs; `k_T` is its length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateLayer {
    cliffords: Vec<CliffordGate>,
    t_gates: Vec<(usize, bool)>,
    active: BTreeSet<usize>,
}

impl GateLayer {
    pub fn new(cliffords: Vec<CliffordGate>, t_gates: Vec<(usize, bool)>) -> Result<Self> {
        let mut active = BTreeSet::new();
        let mut claim = |q: usize| -> Result<()> {
            if !active.insert(q) {
                return Err(Error::QubitReuse { layer: 0, qubit: q });
            }
            Ok(())
        };
        for g in &cliffords {
            let (a, b) = g.qubits();
            claim(a)?;
            if let Some(b) = b {
                claim(b)?;
            }
        }
        for &(q, _) in &t_gates {
            claim(q)?;
        }
        Ok(GateLayer { cliffords, t_gates, active })
    }

    pub fn cliffords(&self) -> &[CliffordGate] {
        &self.cliffords
    }

    pub fn t_gates(&self) -> &[(usize, bool)] {
        &self.t_gates
    }

    /// Number of T gates in the layer.
    pub fn k_t(&self) -> usize {
        self.t_gates.len()
    }

    pub fn is_t_layer(&self) -> bool {
        !self.t_gates.is_empty()
    }

    pub fn active_set(&self) -> &BTreeSet<usize> {
        &self.active
    }

    fn max_index(&self) -> Option<usize> {
        self.active.iter().next_back().copied()
    }
}

impl Serialize for GateLayer {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("cliffords", &self.cliffords)?;
        map.serialize_entry("t", &self.t_gates)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for GateLayer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            #[serde(default)]
            cliffords: Vec<CliffordGate>,
            #[serde(default)]
            t: Vec<(usize, bool)>,
        }
        let w = Wire::deserialize(d)?;
        GateLayer::new(w.cliffords, w.t).map_err(de::Error::custom)
    }
}

/// One Pauli-product layer (PBC): a rotation axis plus whether it consumes a
/// magic state (pi/8 rotations do; terminal Pauli measurements do not).
///
/// The rotation sense (tableau sign folded with the T/Tdg dagger) does not
/// affect any cost metric and is not part of the wire format; it is kept so
/// synthesized sequences stay semantically checkable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PpmLayer {
    pub rotation: PauliString,
    pub consumes_magic: bool,
    pub sign: Sign,
}

impl PpmLayer {
    pub fn new(rotation: PauliString, consumes_magic: bool, sign: Sign) -> Result<Self> {
        if rotation.is_empty() {
            return Err(Error::Format("PPM layer with empty rotation".into()));
        }
        Ok(PpmLayer { rotation, consumes_magic, sign })
    }

    pub fn weight(&self) -> usize {
        self.rotation.weight()
    }
}

impl Serialize for PpmLayer {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("pauli", &self.rotation)?;
        map.serialize_entry("magic", &self.consumes_magic)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for PpmLayer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            pauli: PauliString,
            magic: bool,
        }
        let w = Wire::deserialize(d)?;
        PpmLayer::new(w.pauli, w.magic, Sign::Plus).map_err(de::Error::custom)
    }
}

/// Layer sequence, keyed by scheme.
#[derive(Debug, Clone, PartialEq)]
pub enum Layers {
    Gbc(Vec<GateLayer>),
    Pbc(Vec<PpmLayer>),
}

impl Layers {
    pub fn len(&self) -> usize {
        match self {
            Layers::Gbc(v) => v.len(),
            Layers::Pbc(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A complete FT workload: the unit of estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    name: String,
    n_total: usize,
    layers: Layers,
}

impl Workload {
    /// Builds a workload, checking that every qubit index fits `n_total`.
    pub fn new(name: impl Into<String>, n_total: usize, layers: Layers) -> Result<Self> {
        let max = match &layers {
            Layers::Gbc(v) => v.iter().filter_map(GateLayer::max_index).max(),
            Layers::Pbc(v) => v.iter().filter_map(|l| l.rotation.max_index()).max(),
        };
        if let Some(max) = max {
            if max >= n_total {
                return Err(Error::IndexOutOfRange { index: max, bound: n_total });
            }
        }
        Ok(Workload { name: name.into(), n_total, layers })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn scheme(&self) -> Scheme {
        match self.layers {
            Layers::Gbc(_) => Scheme::Gbc,
            Layers::Pbc(_) => Scheme::Pbc,
        }
    }

    pub fn layers(&self) -> &Layers {
        &self.layers
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Serializes to the canonical trace interchange JSON.
    pub fn to_trace_json(&self) -> String {
        serde_json::to_string(self).expect("trace serialization cannot fail")
    }

    /// Parses the canonical trace interchange JSON.
    pub fn from_trace_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Format(e.to_string()))
    }
}

impl Serialize for Workload {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("scheme", &self.scheme())?;
        map.serialize_entry("n_total", &self.n_total)?;
        map.serialize_entry("name", &self.name)?;
        match &self.layers {
            Layers::Gbc(v) => map.serialize_entry("layers", v)?,
            Layers::Pbc(v) => map.serialize_entry("layers", v)?,
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Workload {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Workload;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a workload trace object")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Workload, A::Error> {
                let mut scheme: Option<Scheme> = None;
                let mut n_total: Option<usize> = None;
                let mut name: Option<String> = None;
                let mut raw_layers: Option<serde_json::Value> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "scheme" => scheme = Some(map.next_value()?),
                        "n_total" => n_total = Some(map.next_value()?),
                        "name" => name = Some(map.next_value()?),
                        "layers" => raw_layers = Some(map.next_value()?),
                        other => return Err(de::Error::custom(format!("unknown key {other:?}"))),
                    }
                }
                let scheme = scheme.ok_or_else(|| de::Error::missing_field("scheme"))?;
                let n_total = n_total.ok_or_else(|| de::Error::missing_field("n_total"))?;
                let name = name.unwrap_or_default();
                let raw = raw_layers.ok_or_else(|| de::Error::missing_field("layers"))?;
                let layers = match scheme {
                    Scheme::Gbc => Layers::Gbc(
                        serde_json::from_value(raw).map_err(de::Error::custom)?,
                    ),
                    Scheme::Pbc => Layers::Pbc(
                        serde_json::from_value(raw).map_err(de::Error::custom)?,
                    ),
                };
                Workload::new(name, n_total, layers).map_err(de::Error::custom)
            }
        }
        d.deserialize_map(V)
    }
}

/// Per-layer feature timelines of a workload.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub scheme: Scheme,
    /// Layer count D.
    pub d: usize,
    /// T-layer count N_T (layers that consume magic states).
    pub n_t: usize,
    /// T-layer ratio N_T / D.
    pub r_t: f64,
    /// Active-qubit count per layer.
    pub q_act: Vec<usize>,
    /// Swapped-qubit count per layer transition (length D - 1): the symmetric
    /// set difference of consecutive active sets, counting both storing-in and
    /// loading-out qubits.
    pub delta_q_act: Vec<usize>,
    /// Pauli weight per layer (PBC only).
    pub w_pauli: Option<Vec<usize>>,
    /// Magic states consumed per layer (k_T for GBC; 0/1 for PBC).
    pub magic_demand: Vec<usize>,
}

impl Profile {
    pub fn q_act_quantile(&self, alpha: f64) -> Result<usize> {
        quantile(&self.q_act, alpha)
    }

    pub fn delta_quantile(&self, alpha: f64) -> Result<usize> {
        quantile(&self.delta_q_act, alpha)
    }

    pub fn w_pauli_quantile(&self, alpha: f64) -> Result<usize> {
        match &self.w_pauli {
            Some(w) => quantile(w, alpha),
            None => Err(Error::EmptySequence),
        }
    }

    pub fn max_magic_demand(&self) -> usize {
        self.magic_demand.iter().copied().max().unwrap_or(0)
    }

    pub fn total_magic_demand(&self) -> usize {
        self.magic_demand.iter().sum()
    }
}

/// Computes the complete feature timeline of a workload.
pub fn profile(workload: &Workload) -> Result<Profile> {
    if workload.layers().is_empty() {
        return Err(Error::EmptyWorkload);
    }
    let (actives, w_pauli, magic_demand, n_t): (Vec<BTreeSet<usize>>, _, Vec<usize>, usize) =
        match workload.layers() {
            Layers::Gbc(layers) => {
                let actives: Vec<_> = layers.iter().map(|l| l.active_set().clone()).collect();
                let magic: Vec<_> = layers.iter().map(GateLayer::k_t).collect();
                let n_t = layers.iter().filter(|l| l.is_t_layer()).count();
                (actives, None, magic, n_t)
            }
            Layers::Pbc(layers) => {
                let actives: Vec<_> = layers.iter().map(|l| l.rotation.support()).collect();
                let weights: Vec<_> = layers.iter().map(PpmLayer::weight).collect();
                let magic: Vec<_> =
                    layers.iter().map(|l| usize::from(l.consumes_magic)).collect();
                let n_t = layers.iter().filter(|l| l.consumes_magic).count();
                (actives, Some(weights), magic, n_t)
            }
        };
    let q_act: Vec<usize> = actives.iter().map(BTreeSet::len).collect();
    let delta_q_act: Vec<usize> = actives
        .windows(2)
        .map(|w| symmetric_delta(&w[0], &w[1]))
        .collect();
    let d = q_act.len();
    Ok(Profile {
        scheme: workload.scheme(),
        d,
        n_t,
        r_t: n_t as f64 / d as f64,
        q_act,
        delta_q_act,
        w_pauli,
        magic_demand,
    })
}

/// |A \ B| + |B \ A|: qubits leaving plus qubits entering across a transition.
fn symmetric_delta(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> usize {
    a.symmetric_difference(b).count()
}

/// Nearest-rank quantile: sort ascending and return the element at index
/// ceil(alpha * len) - 1, clamped to the valid range. alpha = 0 gives the
/// minimum, alpha = 1 the maximum.
pub fn quantile(values: &[usize], alpha: f64) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidQuantile(alpha));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let rank = (alpha * sorted.len() as f64).ceil() as isize - 1;
    let idx = rank.clamp(0, sorted.len() as isize - 1) as usize;
    Ok(sorted[idx])
}

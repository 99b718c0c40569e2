//! One-round local verification: certificates, views, the scheme interface,
//! and verifier execution.

use std::collections::BTreeMap;
use std::fmt;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Label, LabeledGraph, NodeId, Weight};
use crate::languages::{decide_membership, LanguageError, LanguageId};

/// Raw certificate bits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Certificate {
    pub bits: BitVec<u8, Msb0>,
}

impl Certificate {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Option<Certificate> {
        let mut bits = BitVec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return None,
            }
        }
        Some(Certificate { bits })
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits.iter() {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Certificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Certificate::parse(&s).ok_or_else(|| serde::de::Error::custom("certificate bits must be 0/1 characters"))
    }
}

/// Appends fixed-width unsigned fields.
#[derive(Default)]
pub struct BitWriter {
    bits: BitVec<u8, Msb0>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes the low `width` bits of `value`, most significant first.
    /// Panics if `value` does not fit.
    pub fn uint(&mut self, value: u64, width: usize) {
        assert!(width == 64 || value >> width == 0, "{value} does not fit in {width} bits");
        for k in (0..width).rev() {
            self.bits.push(value >> k & 1 == 1);
        }
    }

    pub fn bit(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn append(&mut self, c: &Certificate) {
        self.bits.extend_from_bitslice(&c.bits);
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn finish(self) -> Certificate {
        Certificate { bits: self.bits }
    }
}

/// Reads fixed-width fields; every read fails cleanly past the end.
pub struct BitReader<'a> {
    bits: &'a BitSlice<u8, Msb0>,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(c: &'a Certificate) -> Self {
        BitReader {
            bits: &c.bits,
            pos: 0,
        }
    }

    pub fn uint(&mut self, width: usize) -> Option<u64> {
        if width > 64 || self.pos + width > self.bits.len() {
            return None;
        }
        let mut v = 0u64;
        for k in 0..width {
            v = v << 1 | u64::from(self.bits[self.pos + k]);
        }
        self.pos += width;
        Some(v)
    }

    pub fn bit(&mut self) -> Option<bool> {
        let b = *self.bits.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn at_end(&self) -> bool {
        self.remaining() == 0
    }
}

/// Smallest `w` with `2^w >= x`.
pub fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as usize
    }
}

/// Public parameters shared by every node: they fix certificate field widths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    pub n: usize,
    pub max_id: u64,
    /// `⌈log₂(max_id + 1)⌉`
    pub id_width: usize,
    pub edge_count: usize,
    /// `⌈log₂(edge_count + 1)⌉`
    pub rank_width: usize,
    /// `⌈log₂ n⌉`
    pub rounds: usize,
}

impl Params {
    pub fn of(inst: &LabeledGraph) -> Params {
        let g = inst.graph();
        let max_id = g.max_id().0;
        Params {
            n: g.n(),
            max_id,
            id_width: ceil_log2(max_id + 1),
            edge_count: g.edge_count(),
            rank_width: ceil_log2(g.edge_count() as u64 + 1),
            rounds: ceil_log2(g.n() as u64),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NodeView<'a, C> {
    pub id: NodeId,
    pub label: &'a Label,
    /// `None` if the certificate could not be decoded.
    pub cert: Option<&'a C>,
}

#[derive(Clone, Copy, Debug)]
pub struct NeighborView<'a, C> {
    pub id: NodeId,
    pub label: &'a Label,
    /// `None` if the certificate could not be decoded (or, during partial
    /// evaluation, is not assigned yet).
    pub cert: Option<&'a C>,
    pub weight: Option<&'a Weight>,
    pub weight_rank: Option<u32>,
}

/// Everything a node's verifier may consult: its own triple, its neighbors'
/// triples and incident edge weights, and the public parameters.
#[derive(Clone, Debug)]
pub struct LocalView<'a, C> {
    pub me: NodeView<'a, C>,
    pub neighbors: Vec<NeighborView<'a, C>>,
    pub params: &'a Params,
}

impl<'a, C> LocalView<'a, C> {
    pub fn neighbor(&self, id: NodeId) -> Option<&NeighborView<'a, C>> {
        self.neighbors.iter().find(|w| w.id == id)
    }

    pub fn is_neighbor(&self, id: NodeId) -> bool {
        self.neighbor(id).is_some()
    }

    /// Same view with every certificate mapped through `f`.
    pub fn map<D>(&self, f: impl Fn(&'a C) -> &'a D) -> LocalView<'a, D> {
        LocalView {
            me: NodeView {
                id: self.me.id,
                label: self.me.label,
                cert: self.me.cert.map(&f),
            },
            neighbors: self
                .neighbors
                .iter()
                .map(|w| NeighborView {
                    id: w.id,
                    label: w.label,
                    cert: w.cert.map(&f),
                    weight: w.weight,
                    weight_rank: w.weight_rank,
                })
                .collect(),
            params: self.params,
        }
    }
}

/// View of node `i`, with certificates supplied by `cert_of`.
pub fn view_at<'a, C: 'a>(
    inst: &'a LabeledGraph,
    params: &'a Params,
    i: usize,
    cert_of: impl Fn(usize) -> Option<&'a C>,
) -> LocalView<'a, C> {
    let g = inst.graph();
    LocalView {
        me: NodeView {
            id: g.id(i),
            label: inst.label(i),
            cert: cert_of(i),
        },
        neighbors: g
            .neighbors(i)
            .iter()
            .map(|&j| NeighborView {
                id: g.id(j),
                label: inst.label(j),
                cert: cert_of(j),
                weight: g.weight(i, j),
                weight_rank: g.weight_rank(i, j),
            })
            .collect(),
        params,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProveError {
    #[error("instance is not in {0}")]
    NotMember(LanguageId),
    #[error(transparent)]
    Language(#[from] LanguageError),
}

/// A prover and a one-round verifier for one language.
pub trait Scheme: Sync {
    type Cert: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn name(&self) -> String;

    fn language(&self) -> LanguageId;

    /// Certificates indexed like the instance's nodes. Refuses nonmembers.
    fn prove(&self, inst: &LabeledGraph) -> Result<Vec<Self::Cert>, ProveError>;

    /// Verdict of one node; `true` is accept.
    fn verify(&self, view: &LocalView<'_, Self::Cert>) -> bool;

    /// On a view whose missing neighbor certificates are simply not chosen
    /// yet: `true` only if the node rejects whatever they turn out to be.
    fn rejects_early(&self, _view: &LocalView<'_, Self::Cert>) -> bool {
        false
    }

    fn encode(&self, cert: &Self::Cert, params: &Params) -> Certificate;

    /// `None` for bits that do not encode a certificate.
    fn decode(&self, bits: &Certificate, params: &Params) -> Option<Self::Cert>;

    /// Maximum encoded size in bits, where the encoding has one.
    fn size_bound(&self, params: &Params) -> Option<usize>;

    /// Some well-formed certificate for node `i`, carrying no information.
    fn filler(&self, inst: &LabeledGraph, i: usize) -> Self::Cert;
}

/// Per-node outcome of a verifier run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub ids: Vec<NodeId>,
    pub accepted: Vec<bool>,
    pub k: usize,
}

impl Verdict {
    pub fn from_vec(ids: Vec<NodeId>, accepted: Vec<bool>) -> Verdict {
        let k = accepted.iter().filter(|a| !**a).count();
        Verdict { ids, accepted, k }
    }

    pub fn rejecting(&self) -> Vec<NodeId> {
        self.ids
            .iter()
            .zip(&self.accepted)
            .filter(|(_, a)| !**a)
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn as_map(&self) -> BTreeMap<NodeId, bool> {
        self.ids.iter().copied().zip(self.accepted.iter().copied()).collect()
    }
}

/// Runs the verifier on structured certificates (`certs[i]` for node `i`).
pub fn run_typed<S: Scheme>(scheme: &S, inst: &LabeledGraph, certs: &[S::Cert]) -> Verdict {
    let params = Params::of(inst);
    let accepted = (0..inst.n())
        .map(|i| verify_node(scheme, &view_at(inst, &params, i, |j| Some(&certs[j]))))
        .collect();
    Verdict::from_vec(inst.graph().ids().to_vec(), accepted)
}

/// Verdict of one view; a node whose own certificate is missing rejects.
pub fn verify_node<S: Scheme>(scheme: &S, view: &LocalView<'_, S::Cert>) -> bool {
    view.me.cert.is_some() && scheme.verify(view)
}

/// Bit certificates for every node, keyed by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CertificateMap {
    pub certs: BTreeMap<NodeId, Certificate>,
}

#[derive(Serialize, Deserialize)]
struct CertEntry {
    id: u64,
    bits: Certificate,
}

#[derive(Serialize, Deserialize)]
struct CertFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scheme: Option<String>,
    certificates: Vec<CertEntry>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlsError {
    #[error("no certificate for node {0}")]
    MissingCertificate(NodeId),
    #[error("malformed certificate file: {0}")]
    Malformed(String),
    #[error("instance {index} is not in {lang}")]
    NotMember { index: usize, lang: LanguageId },
    #[error(transparent)]
    Prove(#[from] ProveError),
    #[error(transparent)]
    Language(#[from] LanguageError),
}

impl CertificateMap {
    pub fn get(&self, id: NodeId) -> Option<&Certificate> {
        self.certs.get(&id)
    }

    pub fn encode_all<S: Scheme>(scheme: &S, inst: &LabeledGraph, certs: &[S::Cert]) -> CertificateMap {
        let params = Params::of(inst);
        CertificateMap {
            certs: inst
                .graph()
                .ids()
                .iter()
                .zip(certs)
                .map(|(id, c)| (*id, scheme.encode(c, &params)))
                .collect(),
        }
    }

    pub fn to_json(&self, scheme: Option<&str>) -> String {
        let file = CertFile {
            scheme: scheme.map(str::to_owned),
            certificates: self
                .certs
                .iter()
                .map(|(id, c)| CertEntry {
                    id: id.0,
                    bits: c.clone(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("certificate serialization is infallible");
        s.push('\n');
        s
    }

    /// Parses a certificate file; also returns the recorded scheme name.
    pub fn from_json(text: &str) -> Result<(CertificateMap, Option<String>), PlsError> {
        let file: CertFile = serde_json::from_str(text).map_err(|e| PlsError::Malformed(e.to_string()))?;
        let mut certs = BTreeMap::new();
        for e in file.certificates {
            if certs.insert(NodeId(e.id), e.bits).is_some() {
                return Err(PlsError::Malformed(format!("duplicate entry for node {}", e.id)));
            }
        }
        Ok((CertificateMap { certs }, file.scheme))
    }
}

/// Each node's view over bit certificates.
pub fn build_views<'a>(
    inst: &'a LabeledGraph,
    params: &'a Params,
    certs: &'a CertificateMap,
) -> Result<BTreeMap<NodeId, LocalView<'a, Certificate>>, PlsError> {
    let g = inst.graph();
    let ordered: Vec<&Certificate> = g
        .ids()
        .iter()
        .map(|id| certs.get(*id).ok_or(PlsError::MissingCertificate(*id)))
        .collect::<Result<_, _>>()?;
    Ok((0..g.n())
        .map(|i| (g.id(i), view_at(inst, params, i, |j| Some(ordered[j]))))
        .collect())
}

/// Decodes every certificate (undecodable ones become `None`) and runs the
/// verifier at every node.
pub fn run_verifier<S: Scheme>(scheme: &S, inst: &LabeledGraph, certs: &CertificateMap) -> Result<Verdict, PlsError> {
    let params = Params::of(inst);
    let g = inst.graph();
    let decoded: Vec<Option<S::Cert>> = g
        .ids()
        .iter()
        .map(|id| {
            certs
                .get(*id)
                .map(|c| scheme.decode(c, &params))
                .ok_or(PlsError::MissingCertificate(*id))
        })
        .collect::<Result<_, _>>()?;
    let accepted = (0..g.n())
        .map(|i| verify_node(scheme, &view_at(inst, &params, i, |j| decoded[j].as_ref())))
        .collect();
    Ok(Verdict::from_vec(g.ids().to_vec(), accepted))
}

/// Prover certificates, encoded.
pub fn prove_map<S: Scheme>(scheme: &S, inst: &LabeledGraph) -> Result<CertificateMap, ProveError> {
    let certs = scheme.prove(inst)?;
    Ok(CertificateMap::encode_all(scheme, inst, &certs))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompletenessReport {
    pub checked: usize,
    /// Instances (by position) where prover certificates were rejected somewhere.
    pub failures: Vec<(usize, Verdict)>,
}

impl CompletenessReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs prover and verifier on every member instance, going through the bit
/// encoding.
pub fn check_completeness<S: Scheme>(
    scheme: &S,
    lang: LanguageId,
    instances: &[LabeledGraph],
) -> Result<CompletenessReport, PlsError> {
    let mut report = CompletenessReport::default();
    for (index, inst) in instances.iter().enumerate() {
        if !decide_membership(lang, inst)? {
            return Err(PlsError::NotMember { index, lang });
        }
        let certs = prove_map(scheme, inst)?;
        let verdict = run_verifier(scheme, inst, &certs)?;
        report.checked += 1;
        if verdict.k > 0 {
            report.failures.push((index, verdict));
        }
    }
    Ok(report)
}

/// Encodes a label for inclusion in certificates: a 2-bit kind tag, then the
/// payload with ids in `id_width` bits and lengths in 16 bits.
pub fn encode_label(w: &mut BitWriter, label: &Label, id_width: usize) {
    match label {
        Label::Pointer(p) => {
            w.uint(0, 2);
            w.bit(p.is_some());
            if let Some(id) = p {
                w.uint(id.0, id_width);
            }
        }
        Label::AdjList(set) => {
            w.uint(1, 2);
            w.uint(set.len() as u64, 16);
            for id in set {
                w.uint(id.0, id_width);
            }
        }
        Label::Bool(b) => {
            w.uint(2, 2);
            w.bit(*b);
        }
        Label::Raw(bytes) => {
            w.uint(3, 2);
            w.uint(bytes.len() as u64, 16);
            for b in bytes {
                w.uint(u64::from(*b), 8);
            }
        }
    }
}

pub fn decode_label(r: &mut BitReader<'_>, id_width: usize) -> Option<Label> {
    match r.uint(2)? {
        0 => {
            if r.bit()? {
                Some(Label::Pointer(Some(NodeId(r.uint(id_width)?))))
            } else {
                Some(Label::Pointer(None))
            }
        }
        1 => {
            let len = r.uint(16)? as usize;
            let mut set = std::collections::BTreeSet::new();
            for _ in 0..len {
                set.insert(NodeId(r.uint(id_width)?));
            }
            (set.len() == len).then_some(Label::AdjList(set))
        }
        2 => Some(Label::Bool(r.bit()?)),
        _ => {
            let len = r.uint(16)? as usize;
            let mut bytes = Vec::with_capacity(len);
            for _ in 0..len {
                bytes.push(r.uint(8)? as u8);
            }
            Some(Label::Raw(bytes))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_log2_values() {
        let got: Vec<usize> = [0, 1, 2, 3, 4, 5, 8, 9].iter().map(|&x| ceil_log2(x)).collect();
        assert_eq!(got, vec![0, 0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn bit_fields_round_trip() {
        let mut w = BitWriter::new();
        w.uint(5, 3);
        w.bit(true);
        w.uint(0, 0);
        w.uint(1023, 10);
        let c = w.finish();
        assert_eq!(c.to_string(), "10111111111111");
        let mut r = BitReader::new(&c);
        assert_eq!(r.uint(3), Some(5));
        assert_eq!(r.bit(), Some(true));
        assert_eq!(r.uint(10), Some(1023));
        assert!(r.at_end());
        assert_eq!(r.uint(1), None);
    }

    #[test]
    fn labels_round_trip() {
        let labels = [
            Label::Pointer(None),
            Label::Pointer(Some(NodeId(6))),
            Label::adjlist([1, 7]),
            Label::Bool(true),
            Label::Raw(vec![0xab, 0]),
        ];
        let mut w = BitWriter::new();
        for l in &labels {
            encode_label(&mut w, l, 3);
        }
        let c = w.finish();
        let mut r = BitReader::new(&c);
        for l in &labels {
            assert_eq!(decode_label(&mut r, 3).as_ref(), Some(l));
        }
        assert!(r.at_end());
    }

    #[test]
    fn certificate_file_round_trip() {
        let mut map = CertificateMap::default();
        map.certs.insert(NodeId(2), Certificate::parse("0110").unwrap());
        map.certs.insert(NodeId(1), Certificate::default());
        let text = map.to_json(Some("st"));
        let (back, scheme) = CertificateMap::from_json(&text).unwrap();
        assert_eq!(back, map);
        assert_eq!(scheme.as_deref(), Some("st"));
        assert!(CertificateMap::from_json(r#"{"certificates":[{"id":1,"bits":"012"}]}"#).is_err());
    }
}

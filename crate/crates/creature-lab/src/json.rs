//! Versioned JSON documents for every object the workbench exchanges.
//!
//! Rationals travel as `p/q` strings so no precision is lost; nodes are
//! arrays of letters, binary letters as numbers and star letters as
//! fixed-width bit strings; every file carries a mandatory `version`
//! field. The schema documents shipped under `schemas/` describe the
//! formats.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::amalgam::Part;
use crate::candidate::FiniteCandidate;
use crate::creature::{
    Creature, FamilyKind, Payload, RandomPayload, StarPayload, Valuation,
};
use crate::error::{Error, Result};
use crate::node::{Letter, Node, PartialBits};
use crate::rational::{fmt_rat, parse_rat, rat_int, Rational};
use crate::star::transfer::TransferInstance;
use crate::templates::{NamedPrefix, PreTemplate, YTuple, ZFlag};

pub const SCHEMA_VERSION: u32 = 1;

fn check_version(version: u32, what: &str) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::input(format!(
            "{what} carries schema version {version}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum LetterDoc {
    Index(u8),
    Word(String),
}

impl LetterDoc {
    pub fn to_letter(&self) -> Result<Letter> {
        match self {
            LetterDoc::Index(i) => Ok(Letter::Index(*i)),
            LetterDoc::Word(s) => Letter::parse_word(s),
        }
    }

    pub fn from_letter(l: &Letter) -> LetterDoc {
        match l {
            Letter::Index(i) => LetterDoc::Index(*i),
            Letter::Word { .. } => LetterDoc::Word(l.to_string()),
        }
    }
}

pub fn node_to_doc(n: &Node) -> Vec<LetterDoc> {
    n.letters().iter().map(LetterDoc::from_letter).collect()
}

pub fn node_from_doc(doc: &[LetterDoc]) -> Result<Node> {
    Ok(Node::new(
        doc.iter().map(|l| l.to_letter()).collect::<Result<_>>()?,
    ))
}

fn family_from_str(s: &str) -> Result<FamilyKind> {
    match s {
        "star" => Ok(FamilyKind::Star),
        "random" => Ok(FamilyKind::Random),
        other => Err(Error::input(format!("unknown family {other:?}"))),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CreatureDoc {
    pub version: u32,
    pub family: String,
    pub k: usize,
    pub eta: Vec<LetterDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<(u8, u8)>>,
    #[serde(rename = "P")]
    pub p: Vec<LetterDoc>,
}

fn payload_from_parts(
    family: FamilyKind,
    level: usize,
    n: Option<u64>,
    g: &Option<Vec<(u8, u8)>>,
    p: &[LetterDoc],
) -> Result<(Rational, Payload)> {
    let letters: BTreeSet<Letter> = p
        .iter()
        .map(|l| l.to_letter())
        .collect::<Result<_>>()?;
    match family {
        FamilyKind::Random => Ok((
            rat_int(level as i64),
            Payload::Random(RandomPayload { p: letters }),
        )),
        FamilyKind::Star => {
            let n = n.ok_or_else(|| Error::input("star creature is missing its norm field n"))?;
            let pairs = g
                .clone()
                .unwrap_or_default()
                .into_iter()
                .map(|(c, b)| (c, b != 0))
                .collect();
            Ok((
                rat_int(n as i64),
                Payload::Star(StarPayload {
                    g: PartialBits::new(pairs)?,
                    p: letters,
                    n,
                }),
            ))
        }
    }
}

pub fn creature_from_doc(doc: &CreatureDoc) -> Result<Creature> {
    check_version(doc.version, "creature")?;
    let family = family_from_str(&doc.family)?;
    let stem = node_from_doc(&doc.eta)?;
    let (norm, payload) = payload_from_parts(family, doc.k, doc.n, &doc.g, &doc.p)?;
    if let Some(claim) = &doc.norm {
        if parse_rat(claim)? != norm {
            return Err(Error::input(format!(
                "declared norm {claim} contradicts the derived norm {}",
                fmt_rat(&norm)
            )));
        }
    }
    Ok(Creature {
        level: doc.k,
        stem,
        norm,
        payload,
    })
}

pub fn creature_to_doc(c: &Creature) -> CreatureDoc {
    let (n, g) = match &c.payload {
        Payload::Star(s) => (
            Some(s.n),
            Some(s.g.pairs().iter().map(|&(c, b)| (c, u8::from(b))).collect()),
        ),
        Payload::Random(_) => (None, None),
    };
    CreatureDoc {
        version: SCHEMA_VERSION,
        family: c.family().to_string(),
        k: c.level,
        eta: node_to_doc(&c.stem),
        norm: Some(fmt_rat(&c.norm)),
        n,
        g,
        p: c.letters().iter().map(LetterDoc::from_letter).collect(),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CandidateCreatureDoc {
    pub eta: Vec<LetterDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<(u8, u8)>>,
    #[serde(rename = "P")]
    pub p: Vec<LetterDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CandidateDoc {
    pub version: u32,
    pub family: String,
    pub root: Vec<LetterDoc>,
    pub height: usize,
    pub creatures: Vec<CandidateCreatureDoc>,
    /// explicit node set; derived from the creatures when absent
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<Vec<LetterDoc>>>,
}

pub fn candidate_from_doc(doc: &CandidateDoc) -> Result<FiniteCandidate> {
    check_version(doc.version, "candidate")?;
    let family = family_from_str(&doc.family)?;
    let root = node_from_doc(&doc.root)?;
    let mut creatures = Vec::new();
    for c in &doc.creatures {
        let stem = node_from_doc(&c.eta)?;
        let level = stem.len();
        let (norm, payload) = payload_from_parts(family, level, c.n, &c.g, &c.p)?;
        creatures.push(Creature {
            level,
            stem,
            norm,
            payload,
        });
    }
    match &doc.nodes {
        None => FiniteCandidate::from_creatures(root, doc.height, creatures),
        Some(nodes) => {
            let set: BTreeSet<Node> = nodes
                .iter()
                .map(|n| node_from_doc(n))
                .collect::<Result<_>>()?;
            Ok(FiniteCandidate::from_raw_parts(
                root,
                doc.height,
                set,
                creatures.into_iter().map(|c| (c.stem.clone(), c)).collect(),
            ))
        }
    }
}

pub fn candidate_to_doc(s: &FiniteCandidate) -> CandidateDoc {
    let family = s
        .family()
        .map(|f| f.to_string())
        .unwrap_or_else(|| "random".into());
    CandidateDoc {
        version: SCHEMA_VERSION,
        family,
        root: node_to_doc(s.root()),
        height: s.height(),
        creatures: s
            .creatures()
            .values()
            .map(|c| {
                let (n, g) = match &c.payload {
                    Payload::Star(sp) => (
                        Some(sp.n),
                        Some(sp.g.pairs().iter().map(|&(c, b)| (c, u8::from(b))).collect()),
                    ),
                    Payload::Random(_) => (None, None),
                };
                CandidateCreatureDoc {
                    eta: node_to_doc(&c.stem),
                    n,
                    g,
                    p: c.letters().iter().map(LetterDoc::from_letter).collect(),
                }
            })
            .collect(),
        nodes: None,
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ValuationDoc {
    pub version: u32,
    pub entries: Vec<(Vec<LetterDoc>, String)>,
}

pub fn valuation_from_doc(doc: &ValuationDoc) -> Result<Valuation> {
    check_version(doc.version, "valuation")?;
    let entries = doc
        .entries
        .iter()
        .map(|(n, v)| Ok((node_from_doc(n)?, parse_rat(v)?)))
        .collect::<Result<Vec<_>>>()?;
    Valuation::from_entries(entries)
}

pub fn valuation_to_doc(v: &Valuation) -> ValuationDoc {
    ValuationDoc {
        version: SCHEMA_VERSION,
        entries: v
            .iter()
            .map(|(n, r)| (node_to_doc(n), fmt_rat(r)))
            .collect(),
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ThresholdsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilize_threshold: Option<String>,
    pub stabilize_gain: String,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ProfileDoc {
    pub version: u32,
    pub mode: String,
    #[serde(rename = "N")]
    pub n: Vec<u64>,
    pub cap: Vec<Vec<u64>>,
    pub budget: Vec<u64>,
    pub thresholds: ThresholdsDoc,
}

pub fn profile_from_doc(doc: &ProfileDoc) -> Result<crate::star::StarProfile> {
    check_version(doc.version, "profile")?;
    if doc.mode != "toy" {
        return Err(Error::input(
            "profile files describe toy profiles; paper-exact profiles are computed by the profile verb",
        ));
    }
    let thresholds = crate::star::Thresholds {
        beta: doc.thresholds.beta.as_deref().map(parse_rat).transpose()?,
        stabilize_threshold: doc
            .thresholds
            .stabilize_threshold
            .as_deref()
            .map(parse_rat)
            .transpose()?,
        stabilize_gain: parse_rat(&doc.thresholds.stabilize_gain)?,
    };
    crate::star::toy_profile(doc.n.clone(), doc.cap.clone(), doc.budget.clone(), thresholds)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct AntichainDoc {
    pub version: u32,
    pub nodes: Vec<Vec<LetterDoc>>,
}

pub fn antichain_from_doc(doc: &AntichainDoc) -> Result<BTreeSet<Node>> {
    check_version(doc.version, "antichain")?;
    doc.nodes.iter().map(|n| node_from_doc(n)).collect()
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PartDoc {
    pub at: Vec<LetterDoc>,
    pub candidate: CandidateDoc,
    pub valuation: ValuationDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PartsDoc {
    pub version: u32,
    pub parts: Vec<PartDoc>,
}

pub fn parts_from_doc(doc: &PartsDoc) -> Result<BTreeMap<Node, Part>> {
    check_version(doc.version, "parts")?;
    let mut out = BTreeMap::new();
    for part in &doc.parts {
        let at = node_from_doc(&part.at)?;
        out.insert(
            at,
            Part {
                candidate: candidate_from_doc(&part.candidate)?,
                valuation: valuation_from_doc(&part.valuation)?,
            },
        );
    }
    Ok(out)
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TransferDoc {
    pub version: u32,
    pub creature: CreatureDoc,
    pub r: Vec<(Vec<LetterDoc>, String)>,
    pub gamma: String,
    pub y_size: usize,
    pub u: Vec<(Vec<LetterDoc>, Vec<String>)>,
}

pub fn transfer_from_doc(doc: &TransferDoc) -> Result<TransferInstance> {
    check_version(doc.version, "transfer instance")?;
    let creature = creature_from_doc(&doc.creature)?;
    let r = Valuation::from_entries(
        doc.r
            .iter()
            .map(|(n, v)| Ok((node_from_doc(n)?, parse_rat(v)?)))
            .collect::<Result<Vec<_>>>()?,
    )?;
    let mut u = BTreeMap::new();
    for (n, values) in &doc.u {
        u.insert(
            node_from_doc(n)?,
            values.iter().map(|v| parse_rat(v)).collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(TransferInstance {
        creature,
        r,
        gamma: parse_rat(&doc.gamma)?,
        y_size: doc.y_size,
        u,
    })
}

pub type NameTableDoc = Vec<(Vec<Vec<LetterDoc>>, String)>;

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TemplateDoc {
    pub version: u32,
    pub w: Vec<u64>,
    pub z: Vec<String>,
    pub k: Vec<usize>,
    /// the first coordinate's candidate
    pub c: CandidateDoc,
    /// later coordinates: (tuple, candidate) pairs per coordinate
    #[serde(default)]
    pub later: Vec<Vec<(Vec<Vec<LetterDoc>>, CandidateDoc)>>,
    /// optional name tables per prefix level: (tuple, bit string) pairs
    #[serde(skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<NameTableDoc>>,
}

fn tuple_from_doc(doc: &[Vec<LetterDoc>]) -> Result<YTuple> {
    doc.iter().map(|n| node_from_doc(n)).collect()
}

fn tuple_to_doc(t: &YTuple) -> Vec<Vec<LetterDoc>> {
    t.iter().map(node_to_doc).collect()
}

pub fn template_from_doc(doc: &TemplateDoc) -> Result<PreTemplate> {
    check_version(doc.version, "template")?;
    let flags = doc
        .z
        .iter()
        .map(|z| match z.as_str() {
            "random" | "r" => Ok(ZFlag::Random),
            "star" | "*" => Ok(ZFlag::Star),
            other => Err(Error::input(format!("unknown coordinate flag {other:?}"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let first = candidate_from_doc(&doc.c)?;
    let later = doc
        .later
        .iter()
        .map(|entries| {
            entries
                .iter()
                .map(|(t, c)| Ok((tuple_from_doc(t)?, candidate_from_doc(c)?)))
                .collect::<Result<BTreeMap<_, _>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    crate::templates::build_pretemplate(doc.w.clone(), flags, doc.k.clone(), first, later)
}

pub fn template_to_doc(t: &PreTemplate) -> TemplateDoc {
    TemplateDoc {
        version: SCHEMA_VERSION,
        w: t.labels().to_vec(),
        z: t.flags().iter().map(|f| f.to_string()).collect(),
        k: t.heights().to_vec(),
        c: candidate_to_doc(t.first_candidate()),
        later: t
            .later_candidates()
            .iter()
            .map(|map| {
                map.iter()
                    .map(|(tuple, c)| (tuple_to_doc(tuple), candidate_to_doc(c)))
                    .collect()
            })
            .collect(),
        names: None,
    }
}

pub type NameTable = BTreeMap<YTuple, Vec<bool>>;

/// Reads a named prefix from a list of template documents carrying name
/// tables.
pub fn named_prefix_from_docs(docs: &[TemplateDoc]) -> Result<NamedPrefix> {
    let mut templates = Vec::new();
    let mut names: Vec<NameTable> = Vec::new();
    for doc in docs {
        templates.push(template_from_doc(doc)?);
        let table = doc
            .names
            .as_ref()
            .and_then(|n| n.first())
            .ok_or_else(|| Error::input("named prefixes need a name table per template"))?;
        let mut map = BTreeMap::new();
        for (tuple, bits) in table {
            let parsed: Vec<bool> = bits
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(Error::input(format!("bad name bit {other:?}"))),
                })
                .collect::<Result<_>>()?;
            map.insert(tuple_from_doc(tuple)?, parsed);
        }
        names.push(map);
    }
    Ok(NamedPrefix { templates, names })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::input(format!("cannot parse {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::full_binary_candidate;

    #[test]
    fn candidate_documents_round_trip() {
        let s = full_binary_candidate(0, 2);
        let doc = candidate_to_doc(&s);
        let back = candidate_from_doc(&doc).unwrap();
        assert_eq!(s, back);
        let text = serde_json::to_string(&doc).unwrap();
        let reparsed: CandidateDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(candidate_from_doc(&reparsed).unwrap(), s);
    }

    #[test]
    fn version_is_mandatory() {
        let text = r#"{"family":"random","root":[],"height":0,"creatures":[]}"#;
        assert!(serde_json::from_str::<CandidateDoc>(text).is_err());
        let wrong = r#"{"version":9,"family":"random","root":[],"height":0,"creatures":[]}"#;
        let doc: CandidateDoc = serde_json::from_str(wrong).unwrap();
        assert!(candidate_from_doc(&doc).is_err());
    }

    #[test]
    fn star_letters_travel_as_bit_strings() {
        let fam = crate::star::tests::family_n2();
        let p = fam
            .letters_extending(0, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(0, Node::root(), 0, PartialBits::empty(), p)
            .unwrap();
        let doc = creature_to_doc(&t);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains("\"00\"") && text.contains("\"11\""));
        let back = creature_from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(t, back);
    }
}

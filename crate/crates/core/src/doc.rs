//! The shared on-disk instance document.
//!
//! One JSON schema covers both problems: `kind` picks the problem,
//! `sites` lists the labels, `distances` holds the lower triangle of the
//! table row-major (diagonal included) with every rational rendered as a
//! reduced `p/q` or plain `p` string. Facility-location documents add
//! `facilities` and a constant `opening_cost`; k-means documents add `K`
//! and optionally embedded `coords`. Reduced instances carry their
//! parameters in `meta` for auditability.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dkm::{DkmError, DkmInstance};
use crate::mufl::{MuflError, MuflInstance};
use crate::rational::{format_rational, parse_rational, RationalParseError};
use crate::sat::SatInstance;
use crate::table::DistanceTable;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown instance kind `{0}` (expected `mufl` or `dkm`)")]
    UnknownKind(String),
    #[error("{0}")]
    Rational(#[from] RationalParseError),
    #[error("`distances` must hold n(n+1)/2 entries for {sites} sites, got {got}")]
    TriangleSize { sites: usize, got: usize },
    #[error("mufl document requires `{0}`")]
    MissingMuflField(&'static str),
    #[error("dkm document requires `K`")]
    MissingK,
    #[error("facility label `{0}` is not a site")]
    UnknownFacility(String),
    #[error(transparent)]
    Mufl(#[from] MuflError),
    #[error(transparent)]
    Dkm(#[from] DkmError),
}

/// Reduction parameters recorded next to a reduced instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub c: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    #[serde(rename = "W")]
    pub w: String,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: usize,
}

impl InstanceMeta {
    pub fn for_mufl(instance: &SatInstance, c: &BigRational) -> InstanceMeta {
        InstanceMeta {
            c: format_rational(c),
            eps: None,
            w: instance.weight_bound().to_string(),
            n: instance.num_vars(),
            m: instance.num_clauses(),
        }
    }

    pub fn for_dkm(instance: &SatInstance, c: &BigRational) -> InstanceMeta {
        InstanceMeta {
            eps: Some(format_rational(&crate::reduce::dkm::epsilon(instance))),
            ..InstanceMeta::for_mufl(instance, c)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceDoc {
    kind: String,
    sites: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    facilities: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    opening_cost: Option<String>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    distances: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    meta: Option<InstanceMeta>,
}

/// An instance loaded from a document, tagged by kind.
#[derive(Debug)]
pub enum LoadedInstance {
    Mufl(MuflInstance, Option<InstanceMeta>),
    Dkm(DkmInstance, Option<InstanceMeta>),
}

fn distances_to_strings(table: &DistanceTable) -> Vec<String> {
    table.lower_triangle().iter().map(format_rational).collect()
}

fn distances_from_strings(num_sites: usize, raw: &[String]) -> Result<DistanceTable, DocError> {
    let entries = raw
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<Vec<_>, _>>()?;
    DistanceTable::from_lower_triangle(num_sites, entries).ok_or(DocError::TriangleSize {
        sites: num_sites,
        got: raw.len(),
    })
}

/// Serializes a facility-location instance (pretty-printed, deterministic).
/// Requires a constant opening cost, which is all the document can express.
pub fn mufl_to_json(
    instance: &MuflInstance,
    meta: Option<InstanceMeta>,
) -> Result<String, DocError> {
    let opening = instance
        .constant_opening_cost()
        .ok_or(DocError::MissingMuflField("constant opening_cost"))?;
    let doc = InstanceDoc {
        kind: "mufl".to_string(),
        sites: instance.site_labels().to_vec(),
        facilities: Some(
            instance
                .facilities()
                .iter()
                .map(|&f| instance.site_labels()[f].clone())
                .collect(),
        ),
        opening_cost: Some(format_rational(opening)),
        k: None,
        distances: distances_to_strings(instance.distances()),
        coords: None,
        meta,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Serializes a k-means instance (pretty-printed, deterministic).
pub fn dkm_to_json(instance: &DkmInstance, meta: Option<InstanceMeta>) -> Result<String, DocError> {
    let doc = InstanceDoc {
        kind: "dkm".to_string(),
        sites: instance.labels().to_vec(),
        facilities: None,
        opening_cost: None,
        k: Some(instance.k()),
        distances: distances_to_strings(instance.distances()),
        coords: instance.coords().map(<[Vec<f64>]>::to_vec),
        meta,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Parses either kind of instance document.
pub fn from_json(text: &str) -> Result<LoadedInstance, DocError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let table = distances_from_strings(doc.sites.len(), &doc.distances)?;
    match doc.kind.as_str() {
        "mufl" => {
            let facility_labels = doc
                .facilities
                .ok_or(DocError::MissingMuflField("facilities"))?;
            let opening = doc
                .opening_cost
                .ok_or(DocError::MissingMuflField("opening_cost"))?;
            let facilities = facility_labels
                .iter()
                .map(|label| {
                    doc.sites
                        .iter()
                        .position(|s| s == label)
                        .ok_or_else(|| DocError::UnknownFacility(label.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            // every site is a client in this document format
            let clients = (0..doc.sites.len()).collect();
            let instance = MuflInstance::with_constant_opening_cost(
                doc.sites,
                clients,
                facilities,
                parse_rational(&opening)?,
                table,
            )?;
            Ok(LoadedInstance::Mufl(instance, doc.meta))
        }
        "dkm" => {
            let k = doc.k.ok_or(DocError::MissingK)?;
            let mut instance = DkmInstance::new(doc.sites, k, table)?;
            if let Some(coords) = doc.coords {
                instance = instance.with_coords(coords)?;
            }
            Ok(LoadedInstance::Dkm(instance, doc.meta))
        }
        other => Err(DocError::UnknownKind(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::{self, ReductionParams};
    use crate::sat::parse_wcnf;

    const TINY1: &str = "p wcnf 2 2\n1 1 2 0\n1 -1 2 0\n";

    fn tiny1() -> SatInstance {
        parse_wcnf(TINY1).unwrap()
    }

    #[test]
    fn mufl_document_round_trips() {
        let sat = tiny1();
        let params = ReductionParams::default();
        let instance = reduce::mufl::build(&sat, &params).unwrap();
        let meta = InstanceMeta::for_mufl(&sat, params.c());
        let json = mufl_to_json(&instance, Some(meta.clone())).unwrap();
        match from_json(&json).unwrap() {
            LoadedInstance::Mufl(loaded, loaded_meta) => {
                assert_eq!(loaded, instance);
                assert_eq!(loaded_meta, Some(meta));
            }
            LoadedInstance::Dkm(..) => panic!("expected mufl"),
        }
    }

    #[test]
    fn dkm_document_round_trips_with_coords() {
        let sat = tiny1();
        let params = ReductionParams::default();
        let instance = reduce::dkm::build(&sat, &params).unwrap();
        let coords = vec![vec![0.25, -1.5]; instance.num_points()];
        let instance = instance.with_coords(coords).unwrap();
        let meta = InstanceMeta::for_dkm(&sat, params.c());
        assert_eq!(meta.eps.as_deref(), Some("1/12"));
        let json = dkm_to_json(&instance, Some(meta)).unwrap();
        match from_json(&json).unwrap() {
            LoadedInstance::Dkm(loaded, _) => {
                assert_eq!(loaded, instance);
                assert_eq!(loaded.coords().unwrap()[3], vec![0.25, -1.5]);
            }
            LoadedInstance::Mufl(..) => panic!("expected dkm"),
        }
    }

    #[test]
    fn documents_round_trip_across_the_generator_family() {
        use crate::oracle::{random_instance, InstanceParams};
        let params = ReductionParams::default();
        for seed in 0..20u64 {
            let sat = random_instance(
                &InstanceParams {
                    num_vars: 2 + (seed % 4) as u32,
                    num_clauses: 2 + (seed % 7) as usize,
                    max_weight: 9,
                },
                seed,
            );
            let mufl = reduce::mufl::build(&sat, &params).unwrap();
            let json = mufl_to_json(&mufl, Some(InstanceMeta::for_mufl(&sat, params.c()))).unwrap();
            match from_json(&json).unwrap() {
                LoadedInstance::Mufl(loaded, _) => assert_eq!(loaded, mufl, "seed {seed}"),
                LoadedInstance::Dkm(..) => panic!("expected mufl"),
            }
            let dkm = reduce::dkm::build(&sat, &params).unwrap();
            let json = dkm_to_json(&dkm, Some(InstanceMeta::for_dkm(&sat, params.c()))).unwrap();
            match from_json(&json).unwrap() {
                LoadedInstance::Dkm(loaded, _) => assert_eq!(loaded, dkm, "seed {seed}"),
                LoadedInstance::Mufl(..) => panic!("expected dkm"),
            }
        }
    }

    #[test]
    fn serialization_is_deterministic() {
        let sat = tiny1();
        let instance = reduce::mufl::build(&sat, &ReductionParams::default()).unwrap();
        let a = mufl_to_json(&instance, None).unwrap();
        let b = mufl_to_json(&instance, None).unwrap();
        assert_eq!(a, b);
        assert!(
            a.contains("\"3/2\""),
            "rationals serialized as reduced fractions"
        );
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let sat = tiny1();
        let instance = reduce::mufl::build(&sat, &ReductionParams::default()).unwrap();
        let json = mufl_to_json(&instance, None)
            .unwrap()
            .replace("\"mufl\"", "\"tsp\"");
        assert!(matches!(from_json(&json), Err(DocError::UnknownKind(k)) if k == "tsp"));
    }

    #[test]
    fn wrong_triangle_size_is_rejected() {
        let json = r#"{"kind":"dkm","sites":["a","b"],"K":1,"distances":["0","1"]}"#;
        assert!(matches!(
            from_json(json),
            Err(DocError::TriangleSize { sites: 2, got: 2 })
        ));
    }

    #[test]
    fn missing_fields_are_rejected() {
        let json = r#"{"kind":"dkm","sites":["a"],"distances":["0"]}"#;
        assert!(matches!(from_json(json), Err(DocError::MissingK)));
        let json = r#"{"kind":"mufl","sites":["a"],"opening_cost":"1","distances":["0"]}"#;
        assert!(matches!(
            from_json(json),
            Err(DocError::MissingMuflField("facilities"))
        ));
        let json = r#"{"kind":"mufl","sites":["a"],"facilities":["zzz"],"opening_cost":"1","distances":["0"]}"#;
        assert!(matches!(from_json(json), Err(DocError::UnknownFacility(f)) if f == "zzz"));
    }
}

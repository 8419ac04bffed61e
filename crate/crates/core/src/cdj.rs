//! CDJ, the JSON interchange format for cut-diagrams.
//!
//! Key order is fixed by the structs below, so emitting a parsed document
//! reproduces the canonical bytes.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{Component, CrossingPath, CutDiagram, Dimension, Region, Step, ValidationReport, Wall};

#[derive(Debug, Error)]
pub enum CdjError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid diagram:\n{0}")]
    Invalid(ValidationReport),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawDimension {
    Known(u32),
    Tag(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWall {
    id: String,
    host: usize,
    from: String,
    to: String,
    label: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    selfsingular: bool,
}

type RawPath = Vec<(String, i32)>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    index: usize,
    #[serde(default)]
    name: String,
    closed: bool,
    boundary_count: usize,
    regions: Vec<String>,
    base_region: String,
    #[serde(default)]
    boundary_region: BTreeMap<usize, String>,
    #[serde(default)]
    loops: Vec<RawPath>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h1_basis: Option<Vec<usize>>,
    #[serde(default)]
    arcs: Vec<RawPath>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    dimension: RawDimension,
    components: Vec<RawComponent>,
    walls: Vec<RawWall>,
}

pub fn emit(d: &CutDiagram) -> String {
    let name = |r: usize| d.regions[r].name.clone();
    let path = |p: &CrossingPath| -> RawPath { p.steps.iter().map(|s| (d.walls[s.wall].id.clone(), s.dir)).collect() };
    let raw = RawDiagram {
        dimension: match d.dimension {
            Dimension::Known(n) => RawDimension::Known(n),
            Dimension::Abstract => RawDimension::Tag("abstract".into()),
        },
        components: d
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| RawComponent {
                index: i + 1,
                name: c.name.clone(),
                closed: c.closed,
                boundary_count: c.boundary_count,
                regions: c.regions.iter().map(|&r| name(r)).collect(),
                base_region: name(c.base),
                boundary_region: c.boundary_regions.iter().map(|(&j, &r)| (j, name(r))).collect(),
                loops: c.loops.iter().map(path).collect(),
                h1_basis: c.h1_basis.clone(),
                arcs: c.arcs.iter().map(path).collect(),
            })
            .collect(),
        walls: d
            .walls
            .iter()
            .map(|w| RawWall {
                id: w.id.clone(),
                host: w.host + 1,
                from: name(w.from),
                to: name(w.to),
                label: name(w.label),
                selfsingular: w.selfsingular,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("diagram serializes");
    s.push('\n');
    s
}

/// Parses and validates.
pub fn parse(text: &str) -> Result<CutDiagram, CdjError> {
    let d = parse_unchecked(text)?;
    let rep = d.validate();
    if rep.is_ok() {
        Ok(d)
    } else {
        Err(CdjError::Invalid(rep))
    }
}

/// Parses and resolves names without structural checks.
pub fn parse_unchecked(text: &str) -> Result<CutDiagram, CdjError> {
    let raw: RawDiagram = serde_json::from_str(text).map_err(|e| CdjError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut rep = ValidationReport::default();
    let dimension = match raw.dimension {
        RawDimension::Known(n) => Dimension::Known(n),
        RawDimension::Tag(t) if t == "abstract" => Dimension::Abstract,
        RawDimension::Tag(t) => {
            rep.push("dimension", format!("unknown dimension tag `{}`", t));
            Dimension::Abstract
        }
    };
    let mut regions = Vec::new();
    let mut lookup: HashMap<String, usize> = HashMap::new();
    for (k, c) in raw.components.iter().enumerate() {
        if c.index != k + 1 {
            rep.push(format!("component {}", k + 1), format!("index {} is out of order", c.index));
        }
        for r in &c.regions {
            if lookup.contains_key(r) {
                rep.push(format!("region {}", r), "listed more than once");
                continue;
            }
            lookup.insert(r.clone(), regions.len());
            regions.push(Region { name: r.clone(), component: k });
        }
    }
    let l = raw.components.len();
    let resolve = |what: &str, name: &str, rep: &mut ValidationReport| -> usize {
        match lookup.get(name) {
            Some(&r) => r,
            None => {
                rep.push(what.to_string(), format!("unknown region `{}`", name));
                0
            }
        }
    };
    let mut walls = Vec::new();
    let mut wall_ids: HashMap<String, usize> = HashMap::new();
    for w in &raw.walls {
        let loc = format!("wall {}", w.id);
        if w.host == 0 || w.host > l {
            rep.push(loc.clone(), format!("host {} is not a component", w.host));
        }
        let from = resolve(&loc, &w.from, &mut rep);
        let to = resolve(&loc, &w.to, &mut rep);
        let label = resolve(&loc, &w.label, &mut rep);
        wall_ids.insert(w.id.clone(), walls.len());
        walls.push(Wall { id: w.id.clone(), host: w.host.wrapping_sub(1), from, to, label, selfsingular: w.selfsingular });
    }
    let mut components = Vec::new();
    for (k, c) in raw.components.iter().enumerate() {
        let loc = format!("component {}", k + 1);
        let path = |what: String, p: &RawPath, rep: &mut ValidationReport| -> CrossingPath {
            let mut steps = Vec::new();
            for (id, dir) in p {
                match wall_ids.get(id) {
                    Some(&wall) => steps.push(Step { wall, dir: *dir }),
                    None => rep.push(what.clone(), format!("unknown wall `{}`", id)),
                }
            }
            CrossingPath { steps }
        };
        let loops = c.loops.iter().enumerate().map(|(j, p)| path(format!("{} loop {}", loc, j), p, &mut rep)).collect();
        let arcs = c.arcs.iter().enumerate().map(|(j, p)| path(format!("{} arc {}", loc, j + 1), p, &mut rep)).collect();
        let base = resolve(&loc, &c.base_region, &mut rep);
        let boundary_regions = c.boundary_region.iter().map(|(&j, r)| (j, resolve(&loc, r, &mut rep))).collect();
        components.push(Component {
            name: c.name.clone(),
            closed: c.closed,
            boundary_count: c.boundary_count,
            regions: c.regions.iter().filter_map(|r| lookup.get(r).copied()).collect(),
            base,
            boundary_regions,
            loops,
            h1_basis: c.h1_basis.clone(),
            arcs,
        });
    }
    if !rep.is_ok() {
        return Err(CdjError::Invalid(rep));
    }
    if walls.iter().any(|w| w.host >= l) {
        return Err(CdjError::Invalid(rep));
    }
    Ok(CutDiagram { dimension, regions, walls, components })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
  "dimension": 2,
  "components": [
    {
      "index": 1,
      "closed": true,
      "boundary_count": 0,
      "regions": ["P"],
      "base_region": "P",
      "loops": [[["p", 1]], []],
      "h1_basis": [0, 1]
    },
    {
      "index": 2,
      "closed": true,
      "boundary_count": 0,
      "regions": ["Q"],
      "base_region": "Q",
      "h1_basis": []
    }
  ],
  "walls": [{"id": "p", "host": 1, "from": "P", "to": "P", "label": "Q"}]
}"#;

    #[test]
    fn round_trip_is_byte_identical() {
        let d = parse(SMALL).unwrap();
        let once = emit(&d);
        let twice = emit(&parse(&once).unwrap());
        assert_eq!(once, twice);
        assert_eq!(parse(&once).unwrap(), d);
    }

    #[test]
    fn parse_errors_have_positions() {
        match parse("{\n  \"dimension\": 2,\n  oops") {
            Err(CdjError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn dangling_references() {
        let bad = SMALL.replace("\"label\": \"Q\"", "\"label\": \"Z\"");
        match parse(&bad) {
            Err(CdjError::Invalid(rep)) => assert!(rep.to_string().contains("unknown region `Z`")),
            other => panic!("{:?}", other),
        }
    }
}

//! Cut-diagrams: regions, walls, crossing paths.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::presentation::{Origin, Presentation, Relator};
use crate::word::{Alphabet, FreeWord, Letter, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Known(u32),
    Abstract,
}

impl Dimension {
    pub fn raised(self) -> Dimension {
        match self {
            Dimension::Known(n) => Dimension::Known(n + 1),
            Dimension::Abstract => Dimension::Abstract,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub name: String,
    /// 0-based component index.
    pub component: usize,
}

/// Crossing `from -> to` on component `host`, labeled by the region `label` passing over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub id: String,
    pub host: usize,
    pub from: usize,
    pub to: usize,
    pub label: usize,
    pub selfsingular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub wall: usize,
    /// +1 crosses from `from` to `to`, -1 the other way.
    pub dir: i32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CrossingPath {
    pub steps: Vec<Step>,
}

impl CrossingPath {
    pub fn empty() -> CrossingPath {
        CrossingPath::default()
    }

    pub fn new(steps: Vec<Step>) -> CrossingPath {
        CrossingPath { steps }
    }

    pub fn reversed(&self) -> CrossingPath {
        CrossingPath { steps: self.steps.iter().rev().map(|s| Step { wall: s.wall, dir: -s.dir }).collect() }
    }

    pub fn then(&self, other: &CrossingPath) -> CrossingPath {
        let mut steps = self.steps.clone();
        steps.extend_from_slice(&other.steps);
        CrossingPath { steps }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub closed: bool,
    pub boundary_count: usize,
    pub regions: Vec<usize>,
    pub base: usize,
    /// Boundary index j >= 1 to the region containing its marked point.
    pub boundary_regions: BTreeMap<usize, usize>,
    pub loops: Vec<CrossingPath>,
    pub h1_basis: Option<Vec<usize>>,
    /// `arcs[k]` joins the base point to boundary `k + 1`.
    pub arcs: Vec<CrossingPath>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutDiagram {
    pub dimension: Dimension,
    pub regions: Vec<Region>,
    pub walls: Vec<Wall>,
    pub components: Vec<Component>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { location: location.into(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{}: {}", v.location, v.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("invalid diagram:\n{0}")]
    Invalid(ValidationReport),
    #[error("component {0} is not connected through its walls")]
    Disconnected(usize),
    #[error("component {0} has boundary, its base region is pinned")]
    BoundedRebase(usize),
    #[error("region {0} is not on component {1}")]
    ForeignRegion(String, usize),
    #[error("no component {0}")]
    NoComponent(usize),
}

impl CutDiagram {
    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.regions.iter().map(|r| r.name.clone()))
    }

    pub fn region_index(&self, name: &str) -> Option<usize> {
        self.regions.iter().position(|r| r.name == name)
    }

    pub fn wall_index(&self, id: &str) -> Option<usize> {
        self.walls.iter().position(|w| w.id == id)
    }

    pub fn base_symbol(&self, component: usize) -> Symbol {
        Symbol(self.components[component].base as u32)
    }

    pub fn component_of(&self, s: Symbol) -> usize {
        self.regions[s.0 as usize].component
    }

    pub fn has_selfsingular(&self) -> bool {
        self.walls.iter().any(|w| w.selfsingular)
    }

    /// Region reached by following `path` from `start`, or the first bad step.
    pub fn walk(&self, start: usize, path: &CrossingPath) -> Result<usize, (usize, String)> {
        let mut at = start;
        for (k, s) in path.steps.iter().enumerate() {
            let w = self.walls.get(s.wall).ok_or((k, format!("unknown wall index {}", s.wall)))?;
            let (src, dst) = match s.dir {
                1 => (w.from, w.to),
                -1 => (w.to, w.from),
                d => return Err((k, format!("direction {} is not +1 or -1", d))),
            };
            if src != at {
                return Err((
                    k,
                    format!(
                        "wall {} leaves {} but the path is at {}",
                        w.id, self.regions[src].name, self.regions[at].name
                    ),
                ));
            }
            at = dst;
        }
        Ok(at)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        let l = self.components.len();
        let mut owner: Vec<Vec<usize>> = vec![Vec::new(); self.regions.len()];
        for (i, c) in self.components.iter().enumerate() {
            for &r in &c.regions {
                owner[r].push(i);
            }
        }
        for (r, reg) in self.regions.iter().enumerate() {
            if owner[r] != vec![reg.component] {
                rep.push(format!("region {}", reg.name), "must be listed by exactly its own component");
            }
            if reg.component >= l {
                rep.push(format!("region {}", reg.name), "belongs to no component");
            }
        }
        let mut names: Vec<&str> = self.regions.iter().map(|r| r.name.as_str()).collect();
        names.sort();
        for p in names.windows(2) {
            if p[0] == p[1] {
                rep.push(format!("region {}", p[0]), "duplicate region name");
            }
        }
        let mut ids: Vec<&str> = self.walls.iter().map(|w| w.id.as_str()).collect();
        ids.sort();
        for p in ids.windows(2) {
            if p[0] == p[1] {
                rep.push(format!("wall {}", p[0]), "duplicate wall id");
            }
        }
        for w in &self.walls {
            let loc = format!("wall {}", w.id);
            if w.host >= l {
                rep.push(loc, "host is not a component");
                continue;
            }
            if self.regions[w.from].component != w.host || self.regions[w.to].component != w.host {
                rep.push(loc.clone(), "source and target must lie on the host component");
            }
            if w.label >= self.regions.len() {
                rep.push(loc, "label is not a region");
            }
        }
        for (i, c) in self.components.iter().enumerate() {
            let loc = format!("component {}", i + 1);
            if c.regions.is_empty() {
                rep.push(loc.clone(), "has no regions");
                continue;
            }
            if self.regions[c.base].component != i {
                rep.push(loc.clone(), "base region lies on another component");
            }
            if c.closed != (c.boundary_count == 0) {
                rep.push(loc.clone(), "closed components have no boundary and bounded ones are not closed");
            }
            let want_arcs = c.boundary_count.saturating_sub(1);
            if c.arcs.len() != want_arcs {
                rep.push(loc.clone(), format!("expected {} arcs, found {}", want_arcs, c.arcs.len()));
            }
            let keys: Vec<usize> = c.boundary_regions.keys().copied().collect();
            let want_keys: Vec<usize> = (1..c.boundary_count.max(1)).collect();
            if keys != want_keys {
                rep.push(loc.clone(), format!("boundary regions must be given for 1..{}", want_arcs));
            }
            for (&j, &r) in &c.boundary_regions {
                if self.regions[r].component != i {
                    rep.push(loc.clone(), format!("boundary region for {} lies on another component", j));
                }
            }
            if let Some(h) = &c.h1_basis {
                for &k in h {
                    if k >= c.loops.len() {
                        rep.push(loc.clone(), format!("h1 basis entry {} is not a loop", k));
                    }
                }
            }
            let mut check_path = |what: String, p: &CrossingPath, end: Option<usize>| {
                for s in &p.steps {
                    if s.wall < self.walls.len() && self.walls[s.wall].host != i {
                        rep.push(what.clone(), format!("wall {} is hosted by another component", self.walls[s.wall].id));
                        return;
                    }
                }
                match self.walk(c.base, p) {
                    Err((k, msg)) => rep.push(what, format!("step {}: {}", k, msg)),
                    Ok(at) => {
                        if let Some(e) = end {
                            if at != e {
                                rep.push(
                                    what,
                                    format!("ends at {} instead of {}", self.regions[at].name, self.regions[e].name),
                                );
                            }
                        }
                    }
                }
            };
            for (k, p) in c.loops.iter().enumerate() {
                check_path(format!("component {} loop {}", i + 1, k), p, Some(c.base));
            }
            for (k, p) in c.arcs.iter().enumerate() {
                let end = c.boundary_regions.get(&(k + 1)).copied();
                check_path(format!("component {} arc {}", i + 1, k + 1), p, end);
            }
            if self.tree(i, None).is_none() {
                rep.push(loc, "regions are not connected through walls");
            }
        }
        rep
    }

    pub fn wall_letter(&self, step: Step) -> Letter {
        Letter::new(Symbol(self.walls[step.wall].label as u32), step.dir)
    }

    /// Product of the labels crossed, reduced.
    pub fn raw_word(&self, path: &CrossingPath) -> FreeWord {
        FreeWord::from_letters(path.steps.iter().map(|&s| self.wall_letter(s)).collect()).reduce()
    }

    /// `A^-s w` where `s` counts crossings under the path's own component.
    pub fn normalized_word(&self, component: usize, path: &CrossingPath) -> FreeWord {
        let raw = self.raw_word(path);
        let s = raw.exponent_sum(|x| self.component_of(x) == component);
        FreeWord::generator(self.base_symbol(component)).pow(-s).mul(&raw)
    }

    /// Spanning tree of a component's wall graph: parent step into each region.
    fn tree(&self, component: usize, seed: Option<u64>) -> Option<Vec<(usize, Option<(usize, Step)>)>> {
        let c = &self.components[component];
        let mut adj: BTreeMap<usize, Vec<(usize, Step)>> = c.regions.iter().map(|&r| (r, Vec::new())).collect();
        for (k, w) in self.walls.iter().enumerate() {
            if w.host != component || w.from == w.to {
                continue;
            }
            if let Some(v) = adj.get_mut(&w.from) {
                v.push((w.to, Step { wall: k, dir: 1 }));
            }
            if let Some(v) = adj.get_mut(&w.to) {
                v.push((w.from, Step { wall: k, dir: -1 }));
            }
        }
        let mut rng = seed.map(|s| ChaCha8Rng::seed_from_u64(s ^ (component as u64).wrapping_mul(0x9e37_79b9)));
        if let Some(r) = rng.as_mut() {
            for v in adj.values_mut() {
                v.shuffle(r);
            }
        }
        let mut seen: BTreeMap<usize, bool> = c.regions.iter().map(|&r| (r, false)).collect();
        let mut order = vec![(c.base, None)];
        *seen.get_mut(&c.base)? = true;
        let mut frontier: VecDeque<usize> = VecDeque::from([c.base]);
        while !frontier.is_empty() {
            let u = match rng.as_mut() {
                Some(r) => {
                    let k = r.gen_range(0..frontier.len());
                    frontier.remove(k).unwrap()
                }
                None => frontier.pop_front().unwrap(),
            };
            for &(v, step) in &adj[&u] {
                if !seen[&v] {
                    seen.insert(v, true);
                    order.push((v, Some((u, step))));
                    frontier.push_back(v);
                }
            }
        }
        if order.len() == c.regions.len() {
            Some(order)
        } else {
            None
        }
    }

    /// Paths from the base region to every region along a spanning tree.
    pub fn road_network(&self, seed: Option<u64>) -> Result<RoadNetwork, DiagramError> {
        let n = self.regions.len();
        let mut roads = vec![FreeWord::identity(); n];
        let mut paths = vec![CrossingPath::empty(); n];
        let mut parent = vec![None; n];
        let mut order = Vec::with_capacity(n);
        for i in 0..self.components.len() {
            let tree = self.tree(i, seed).ok_or(DiagramError::Disconnected(i + 1))?;
            for (r, up) in tree {
                if let Some((p, step)) = up {
                    let letter = self.wall_letter(step);
                    roads[r] = roads[p].mul(&FreeWord::from_letters(vec![letter]));
                    let mut path = paths[p].clone();
                    path.steps.push(step);
                    paths[r] = path;
                    parent[r] = Some((p, letter));
                }
                order.push(r);
            }
        }
        Ok(RoadNetwork { roads, paths, parent, order })
    }

    pub fn wirtinger_presentation(&self) -> Presentation {
        let alphabet = self.alphabet();
        let generators = (0..self.regions.len()).map(|r| Symbol(r as u32)).collect();
        let relators = self
            .walls
            .iter()
            .map(|w| {
                let (a, b, c) = (Symbol(w.from as u32), Symbol(w.to as u32), Symbol(w.label as u32));
                let word = FreeWord::from_letters(vec![Letter::neg(b), Letter::neg(c), Letter::pos(a), Letter::pos(c)]);
                Relator { word, origin: Origin::Wall(w.id.clone()) }
            })
            .collect();
        Presentation { alphabet, generators, relators, families: Vec::new() }
    }

    /// Moves the base point of a closed component, conjugating its loops.
    pub fn rebased(&self, component: usize, region: usize) -> Result<CutDiagram, DiagramError> {
        let c = self.components.get(component).ok_or(DiagramError::NoComponent(component + 1))?;
        if !c.closed {
            return Err(DiagramError::BoundedRebase(component + 1));
        }
        if self.regions.get(region).map(|r| r.component) != Some(component) {
            let name = self.regions.get(region).map(|r| r.name.clone()).unwrap_or_default();
            return Err(DiagramError::ForeignRegion(name, component + 1));
        }
        let roads = self.road_network(None)?;
        let delta = roads.paths[region].reversed();
        let back = roads.paths[region].clone();
        let mut out = self.clone();
        let nc = &mut out.components[component];
        nc.base = region;
        nc.loops = c.loops.iter().map(|l| delta.then(l).then(&back)).collect();
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoadNetwork {
    /// Word of labels crossed from the base region, per region.
    pub roads: Vec<FreeWord>,
    pub paths: Vec<CrossingPath>,
    pub parent: Vec<Option<(usize, Letter)>>,
    /// Regions with every parent before its children.
    pub order: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    /// One component, three regions in a cycle, every wall labeled by component 2.
    fn sample() -> CutDiagram {
        let regions = vec![
            Region { name: "a".into(), component: 0 },
            Region { name: "b".into(), component: 0 },
            Region { name: "c".into(), component: 0 },
            Region { name: "x".into(), component: 1 },
        ];
        let wall = |id: &str, from, to, label| Wall { id: id.into(), host: 0, from, to, label, selfsingular: false };
        let walls = vec![wall("w1", 0, 1, 3), wall("w2", 1, 2, 0), wall("w3", 2, 0, 3)];
        let lp = CrossingPath::new(vec![Step { wall: 0, dir: 1 }, Step { wall: 1, dir: 1 }, Step { wall: 2, dir: 1 }]);
        let comp = |regions, base, loops| Component {
            name: String::new(),
            closed: true,
            boundary_count: 0,
            regions,
            base,
            boundary_regions: BTreeMap::new(),
            loops,
            h1_basis: Some(vec![0]),
            arcs: vec![],
        };
        CutDiagram {
            dimension: Dimension::Known(1),
            regions,
            walls,
            components: vec![comp(vec![0, 1, 2], 0, vec![lp]), Component { h1_basis: Some(vec![]), ..comp(vec![3], 3, vec![]) }],
        }
    }

    #[test]
    fn sample_is_valid() {
        let d = sample();
        assert!(d.validate().is_ok(), "{}", d.validate());
    }

    #[test]
    fn words() {
        let d = sample();
        let a = d.alphabet();
        let lp = &d.components[0].loops[0];
        assert_eq!(a.render(&d.raw_word(lp)), "x a x");
        assert_eq!(a.render(&d.normalized_word(0, lp)), "a^-1 x a x");
    }

    #[test]
    fn broken_chain_is_reported() {
        let mut d = sample();
        d.components[0].loops[0].steps.swap(0, 1);
        let rep = d.validate();
        assert!(!rep.is_ok());
        assert!(rep.violations[0].location.contains("loop 0"));
    }

    #[test]
    fn roads_follow_tree() {
        let d = sample();
        let r = d.road_network(None).unwrap();
        let a = d.alphabet();
        assert_eq!(a.render(&r.roads[1]), "x");
        assert_eq!(a.render(&r.roads[2]), "x^-1");
        for seed in 0..20 {
            let r = d.road_network(Some(seed)).unwrap();
            for (k, p) in r.paths.iter().enumerate() {
                let comp = d.regions[k].component;
                assert_eq!(d.walk(d.components[comp].base, p), Ok(k));
                assert_eq!(d.raw_word(p), r.roads[k]);
            }
        }
    }

    #[test]
    fn wirtinger_relators() {
        let d = sample();
        let p = d.wirtinger_presentation();
        assert_eq!(p.render(), "< a, b, c, x | b^-1*x^-1*a*x, c^-1*a^-1*b*a, a^-1*x^-1*c*x >");
    }

    #[test]
    fn rebase_conjugates_loops() {
        let d = sample();
        let e = d.rebased(0, 2).unwrap();
        assert!(e.validate().is_ok(), "{}", e.validate());
        assert_eq!(e.components[0].base, 2);
        assert_eq!(e.components[0].loops[0].steps.len(), 5);
    }
}

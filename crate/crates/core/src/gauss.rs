//! Signed Gauss codes for classical and welded diagrams.
//!
//! Text form: components separated by `/`, each a list of `O<k><sign>` and
//! `U<k><sign>` tokens. A leading `|` marks an interval component. `#`
//! starts a comment. Arrows run from the over passage (tail) to the under
//! passage (head).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::diagram::{Component, CrossingPath, CutDiagram, Dimension, Region, Step, Wall};

pub mod moves;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaussError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("crossing {0}: {1}")]
    Inconsistent(u32, String),
    #[error("interval components have no linking numbers")]
    HasIntervals,
    #[error("crossing signs between components {0} and {1} sum to an odd number")]
    OddLinking(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Circle,
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Tail,
    Head,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub arrow: usize,
    pub end: End,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussComponent {
    pub kind: Kind,
    pub slots: Vec<Slot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arrow {
    pub label: u32,
    pub sign: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussDiagram {
    pub components: Vec<GaussComponent>,
    pub arrows: Vec<Arrow>,
}

/// Position of an arrow end: (component, index).
pub type Pos = (usize, usize);

impl GaussDiagram {
    pub fn parse(text: &str) -> Result<GaussDiagram, GaussError> {
        Parser::new(text).run()
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn is_classical_shape(&self) -> bool {
        self.components.iter().all(|c| c.kind == Kind::Circle)
    }

    /// Tail and head positions of every arrow.
    pub fn locate(&self) -> Vec<(Pos, Pos)> {
        let mut out = vec![((usize::MAX, 0), (usize::MAX, 0)); self.arrows.len()];
        for (c, comp) in self.components.iter().enumerate() {
            for (p, s) in comp.slots.iter().enumerate() {
                match s.end {
                    End::Tail => out[s.arrow].0 = (c, p),
                    End::Head => out[s.arrow].1 = (c, p),
                }
            }
        }
        out
    }

    pub fn next_label(&self) -> u32 {
        self.arrows.iter().map(|a| a.label).max().unwrap_or(0) + 1
    }

    /// Removes arrows, renumbering slots.
    pub fn remove_arrows(&mut self, which: &[usize]) {
        let mut map = vec![None; self.arrows.len()];
        let mut kept = Vec::new();
        for (k, a) in self.arrows.iter().enumerate() {
            if !which.contains(&k) {
                map[k] = Some(kept.len());
                kept.push(*a);
            }
        }
        for comp in self.components.iter_mut() {
            comp.slots = comp
                .slots
                .iter()
                .filter_map(|s| map[s.arrow].map(|a| Slot { arrow: a, end: s.end }))
                .collect();
        }
        self.arrows = kept;
    }

    /// Region names `x{i}_{k}`: arc k of component i, counted between heads.
    fn region_name(component: usize, k: usize) -> String {
        format!("x{}_{}", component + 1, k)
    }

    /// Cut-diagram whose walls are the under passages.
    pub fn to_cut_diagram(&self) -> CutDiagram {
        let mut regions = Vec::new();
        let mut first_region = Vec::new();
        let mut region_of_slot: Vec<Vec<usize>> = Vec::new();
        let mut counts = Vec::new();
        for (i, comp) in self.components.iter().enumerate() {
            let heads = comp.slots.iter().filter(|s| s.end == End::Head).count();
            let n = match comp.kind {
                Kind::Circle => heads.max(1),
                Kind::Interval => heads + 1,
            };
            first_region.push(regions.len());
            for k in 0..n {
                regions.push(Region { name: Self::region_name(i, k), component: i });
            }
            counts.push(n);
            // Region holding each slot; a head sits at the end of its region.
            let mut seen = 0;
            let mut per = Vec::with_capacity(comp.slots.len());
            for s in &comp.slots {
                per.push(first_region[i] + seen % n);
                if s.end == End::Head {
                    seen += 1;
                }
            }
            region_of_slot.push(per);
        }
        let where_ = self.locate();
        let mut walls = Vec::new();
        let mut steps: Vec<Vec<Step>> = vec![Vec::new(); self.components.len()];
        for (i, comp) in self.components.iter().enumerate() {
            for (p, s) in comp.slots.iter().enumerate() {
                if s.end != End::Head {
                    continue;
                }
                let a = self.arrows[s.arrow];
                let before = region_of_slot[i][p];
                let k = before - first_region[i];
                let after = first_region[i] + (k + 1) % counts[i];
                let (tc, tp) = where_[s.arrow].0;
                let label = region_of_slot[tc][tp];
                let (from, to) = if a.sign > 0 { (before, after) } else { (after, before) };
                steps[i].push(Step { wall: walls.len(), dir: a.sign.signum() });
                walls.push(Wall { id: format!("c{}", a.label), host: i, from, to, label, selfsingular: false });
            }
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, comp)| {
                let base = first_region[i];
                let regs: Vec<usize> = (base..base + counts[i]).collect();
                let path = CrossingPath::new(steps[i].clone());
                match comp.kind {
                    Kind::Circle => Component {
                        name: String::new(),
                        closed: true,
                        boundary_count: 0,
                        regions: regs,
                        base,
                        boundary_regions: BTreeMap::new(),
                        loops: vec![path],
                        h1_basis: Some(vec![0]),
                        arcs: vec![],
                    },
                    Kind::Interval => Component {
                        name: String::new(),
                        closed: false,
                        boundary_count: 2,
                        boundary_regions: BTreeMap::from([(1, base + counts[i] - 1)]),
                        regions: regs,
                        base,
                        loops: vec![],
                        h1_basis: Some(vec![]),
                        arcs: vec![path],
                    },
                }
            })
            .collect();
        CutDiagram { dimension: Dimension::Known(1), regions, walls, components }
    }

    /// Half the sum of signs of crossings between two components.
    pub fn linking_matrix(&self) -> Result<Vec<Vec<i64>>, GaussError> {
        if !self.is_classical_shape() {
            return Err(GaussError::HasIntervals);
        }
        let l = self.components.len();
        let mut twice = vec![vec![0i64; l]; l];
        for (k, (t, h)) in self.locate().into_iter().enumerate() {
            if t.0 != h.0 {
                twice[t.0][h.0] += self.arrows[k].sign as i64;
                twice[h.0][t.0] += self.arrows[k].sign as i64;
            }
        }
        let mut out = vec![vec![0i64; l]; l];
        for i in 0..l {
            for j in 0..l {
                if i != j {
                    if twice[i][j] % 2 != 0 {
                        return Err(GaussError::OddLinking(i + 1, j + 1));
                    }
                    out[i][j] = twice[i][j] / 2;
                }
            }
        }
        Ok(out)
    }

    /// Closure of a braid on `strands` strands, read bottom to top.
    ///
    /// Generator `k` (1-based) crosses positions k and k+1 with the left
    /// strand passing over; `-k` lets the right strand pass over. Components
    /// whose cycle contains a position in `open` are cut at the bottom of
    /// that position. Components are ordered by starting position.
    pub fn braid_closure(strands: usize, word: &[i32], open: &[usize]) -> GaussDiagram {
        let mut perm: Vec<usize> = (0..strands).collect();
        // events[strand start position] -> list of (crossing, over)
        let mut events: Vec<Vec<(usize, bool)>> = vec![Vec::new(); strands];
        let mut at: Vec<usize> = (0..strands).collect(); // position -> starting strand
        for (c, &g) in word.iter().enumerate() {
            let k = g.unsigned_abs() as usize - 1;
            let (left, right) = (at[k], at[k + 1]);
            events[left].push((c, g > 0));
            events[right].push((c, g < 0));
            at.swap(k, k + 1);
        }
        for (pos, &s) in at.iter().enumerate() {
            perm[s] = pos;
        }
        let mut seen = vec![false; strands];
        let mut comps: Vec<(usize, Kind, Vec<(usize, bool)>)> = Vec::new();
        for start in 0..strands {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut p = perm[start];
            while p != start {
                seen[p] = true;
                cycle.push(p);
                p = perm[p];
            }
            let cut = cycle.iter().position(|p| open.contains(p));
            if let Some(c) = cut {
                cycle.rotate_left(c);
            }
            let evs: Vec<(usize, bool)> = cycle.iter().flat_map(|&p| events[p].clone()).collect();
            let kind = if cut.is_some() { Kind::Interval } else { Kind::Circle };
            comps.push((cycle[0], kind, evs));
        }
        comps.sort_by_key(|c| c.0);
        let arrows =
            word.iter().enumerate().map(|(c, &g)| Arrow { label: c as u32 + 1, sign: if g > 0 { 1 } else { -1 } }).collect();
        let components = comps
            .into_iter()
            .map(|(_, kind, evs)| GaussComponent {
                kind,
                slots: evs
                    .into_iter()
                    .map(|(c, over)| Slot { arrow: c, end: if over { End::Tail } else { End::Head } })
                    .collect(),
            })
            .collect();
        GaussDiagram { components, arrows }
    }

    pub fn num_braid_cycles(strands: usize, word: &[i32]) -> usize {
        let mut at: Vec<usize> = (0..strands).collect();
        for &g in word {
            let k = g.unsigned_abs() as usize - 1;
            at.swap(k, k + 1);
        }
        let mut seen = vec![false; strands];
        let mut cycles = 0;
        for s in 0..strands {
            if !seen[s] {
                cycles += 1;
                let mut p = s;
                while !seen[p] {
                    seen[p] = true;
                    p = at[p];
                }
            }
        }
        cycles
    }

    /// Random braid closure with `components` components and `crossings` crossings.
    pub fn random_classical<R: Rng>(rng: &mut R, components: usize, crossings: usize) -> GaussDiagram {
        loop {
            let strands = rng.gen_range(components..=components + 2).max(1);
            if strands == 1 && crossings > 0 {
                continue;
            }
            let word: Vec<i32> = (0..crossings)
                .map(|_| {
                    let k = rng.gen_range(1..strands as i32);
                    if rng.gen_bool(0.5) {
                        k
                    } else {
                        -k
                    }
                })
                .collect();
            if Self::num_braid_cycles(strands, &word) == components {
                return Self::braid_closure(strands, &word, &[]);
            }
        }
    }

    /// Random welded diagram: arrow ends dropped at random positions.
    pub fn random_welded<R: Rng>(rng: &mut R, components: usize, arrows: usize) -> GaussDiagram {
        let mut d = GaussDiagram {
            components: vec![GaussComponent { kind: Kind::Circle, slots: Vec::new() }; components],
            arrows: Vec::new(),
        };
        for k in 0..arrows {
            d.arrows.push(Arrow { label: k as u32 + 1, sign: if rng.gen_bool(0.5) { 1 } else { -1 } });
            for end in [End::Tail, End::Head] {
                let c = rng.gen_range(0..components);
                let p = rng.gen_range(0..=d.components[c].slots.len());
                d.components[c].slots.insert(p, Slot { arrow: k, end });
            }
        }
        d
    }

    /// Reorders components: new component k is old component `order[k]`.
    pub fn permute_components(&self, order: &[usize]) -> GaussDiagram {
        GaussDiagram { components: order.iter().map(|&k| self.components[k].clone()).collect(), arrows: self.arrows.clone() }
    }

    pub fn check(&self) -> Result<(), GaussError> {
        let mut tails = vec![0; self.arrows.len()];
        let mut heads = vec![0; self.arrows.len()];
        for comp in &self.components {
            for s in &comp.slots {
                match s.end {
                    End::Tail => tails[s.arrow] += 1,
                    End::Head => heads[s.arrow] += 1,
                }
            }
        }
        for (k, a) in self.arrows.iter().enumerate() {
            if tails[k] != 1 || heads[k] != 1 {
                return Err(GaussError::Inconsistent(a.label, "needs exactly one O and one U".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, comp) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " / ")?;
            }
            let mut toks: Vec<String> = Vec::new();
            if comp.kind == Kind::Interval {
                toks.push("|".into());
            }
            for s in &comp.slots {
                let a = self.arrows[s.arrow];
                let e = if s.end == End::Tail { 'O' } else { 'U' };
                toks.push(format!("{}{}{}", e, a.label, if a.sign > 0 { '+' } else { '-' }));
            }
            write!(f, "{}", toks.join(" "))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser { chars: text.char_indices().peekable(), line: 1, column: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn err(&self, message: impl Into<String>) -> GaussError {
        GaussError::Parse { line: self.line, column: self.column, message: message.into() }
    }

    fn run(mut self) -> Result<GaussDiagram, GaussError> {
        let mut components = vec![GaussComponent { kind: Kind::Circle, slots: Vec::new() }];
        let mut labels: HashMap<u32, usize> = HashMap::new();
        let mut arrows: Vec<Arrow> = Vec::new();
        let mut ends: Vec<(u32, u32)> = Vec::new();
        while let Some(c) = self.peek() {
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                '/' => {
                    self.bump();
                    components.push(GaussComponent { kind: Kind::Circle, slots: Vec::new() });
                }
                '|' => {
                    let cur = components.last_mut().unwrap();
                    if !cur.slots.is_empty() || cur.kind == Kind::Interval {
                        return Err(self.err("`|` must open a component"));
                    }
                    cur.kind = Kind::Interval;
                    self.bump();
                }
                'O' | 'U' | 'o' | 'u' => {
                    let (line, column) = (self.line, self.column);
                    self.bump();
                    let mut digits = String::new();
                    while let Some(d) = self.peek().filter(|d| d.is_ascii_digit()) {
                        digits.push(d);
                        self.bump();
                    }
                    let label: u32 = digits.parse().map_err(|_| self.err("expected crossing number"))?;
                    let sign = match self.bump() {
                        Some('+') => 1,
                        Some('-') => -1,
                        _ => return Err(self.err("expected `+` or `-`")),
                    };
                    let k = *labels.entry(label).or_insert_with(|| {
                        arrows.push(Arrow { label, sign });
                        ends.push((0, 0));
                        arrows.len() - 1
                    });
                    if arrows[k].sign != sign {
                        return Err(GaussError::Parse { line, column, message: format!("crossing {} has two signs", label) });
                    }
                    let end = if c.eq_ignore_ascii_case(&'O') { End::Tail } else { End::Head };
                    match end {
                        End::Tail => ends[k].0 += 1,
                        End::Head => ends[k].1 += 1,
                    }
                    components.last_mut().unwrap().slots.push(Slot { arrow: k, end });
                }
                other => return Err(self.err(format!("unexpected character `{}`", other))),
            }
        }
        for (k, &(t, h)) in ends.iter().enumerate() {
            if t != 1 || h != 1 {
                return Err(GaussError::Inconsistent(arrows[k].label, "needs exactly one O and one U".into()));
            }
        }
        Ok(GaussDiagram { components, arrows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let text = "O1+ U2+ / U1+ O2+";
        let g = GaussDiagram::parse(text).unwrap();
        assert_eq!(g.to_string(), text);
        let t = GaussDiagram::parse("# tangle\n| O1- U2- /\n U1- O2-").unwrap();
        assert_eq!(t.to_string(), "| O1- U2- / U1- O2-");
        assert_eq!(GaussDiagram::parse("").unwrap().components.len(), 1);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(GaussDiagram::parse("O1+ U1-"), Err(GaussError::Parse { .. })));
        assert!(matches!(GaussDiagram::parse("O1+ O1+"), Err(GaussError::Inconsistent(1, _))));
        match GaussDiagram::parse("O1+\n  X") {
            Err(GaussError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn hopf_import() {
        let g = GaussDiagram::parse("O1+ U2+ / U1+ O2+").unwrap();
        assert_eq!(g.linking_matrix().unwrap(), vec![vec![0, 1], vec![1, 0]]);
        let d = g.to_cut_diagram();
        assert!(d.validate().is_ok(), "{}", d.validate());
        assert_eq!(d.regions.len(), 2);
        let a = d.alphabet();
        assert_eq!(a.render(&d.raw_word(&d.components[0].loops[0])), "x2_0");
    }

    #[test]
    fn braid_closures() {
        // Hopf link as the closure of sigma_1^2.
        let h = GaussDiagram::braid_closure(2, &[1, 1], &[]);
        assert_eq!(h.components.len(), 2);
        assert_eq!(h.linking_matrix().unwrap()[0][1], 1);
        // Trefoil.
        let t = GaussDiagram::braid_closure(2, &[1, 1, 1], &[]);
        assert_eq!(t.components.len(), 1);
        assert_eq!(t.to_string(), "O1+ U2+ O3+ U1+ O2+ U3+");
        let open = GaussDiagram::braid_closure(2, &[1, 1], &[1]);
        assert_eq!(open.components[1].kind, Kind::Interval);
        assert!(open.to_cut_diagram().validate().is_ok());
    }

    #[test]
    fn random_diagrams_are_valid() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = GaussDiagram::random_classical(&mut rng, 3, 8);
            assert_eq!(g.components.len(), 3);
            g.check().unwrap();
            assert!(g.linking_matrix().is_ok());
            let d = g.to_cut_diagram();
            assert!(d.validate().is_ok(), "{}\n{}", g, d.validate());
            let w = GaussDiagram::random_welded(&mut rng, 2, 6);
            assert!(w.to_cut_diagram().validate().is_ok());
            assert_eq!(GaussDiagram::parse(&w.to_string()).unwrap().to_string(), w.to_string());
        }
    }
}

//! Milnor numbers, their indeterminacies, Milnor maps and free kernels.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chen::{ChenContext, ChenError, Guard};
use crate::diagram::{CrossingPath, CutDiagram};
use crate::lattice::integer_kernel;
use crate::magnus::MagnusSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MilnorError {
    #[error(transparent)]
    Chen(#[from] ChenError),
    #[error("maximal length must be at least 1")]
    EmptyRange,
    #[error("nilpotency class {q} is too small for sequences of length {len}")]
    ClassTooSmall { q: usize, len: usize },
    #[error("diagram has self-singular walls: only the non-repeated table is defined")]
    SelfSingular,
    #[error("sequence `{0}` is not in the table")]
    Missing(String),
    #[error("bad sequence `{0}`")]
    BadSequence(String),
    #[error("component {0} has no H1 basis")]
    NoBasis(usize),
    #[error("Milnor maps belong to different components")]
    MixedComponents,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Series,
    Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableOptions {
    /// Longest sequence I read off the Magnus expansion.
    pub max_len: usize,
    pub nonrepeated: bool,
    pub mode: Mode,
    pub seed: Option<u64>,
    /// Nilpotency class; defaults to `max_len + 1`.
    pub q: Option<usize>,
    /// Keep the invariants of one-component diagrams instead of reporting 0.
    pub force: bool,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { max_len: 4, nonrepeated: false, mode: Mode::Series, seed: None, q: None, force: false }
    }
}

/// `value mod modulus`, normalized to `[0, modulus)`; the signed form is nearest zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Residue {
    pub value: BigInt,
    pub modulus: BigInt,
    pub signed: BigInt,
}

impl Residue {
    pub fn new(x: &BigInt, modulus: &BigInt) -> Residue {
        let modulus = modulus.abs();
        if modulus.is_zero() {
            return Residue { value: x.clone(), modulus, signed: x.clone() };
        }
        let value = x.mod_floor(&modulus);
        let signed = if &value * 2 > modulus { &value - &modulus } else { value.clone() };
        Residue { value, modulus, signed }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.modulus.is_zero() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} mod {}", self.value, self.modulus)
        }
    }
}

/// Digits when every index is a single digit, commas otherwise.
pub fn format_sequence(seq: &[usize], components: usize) -> String {
    if components <= 9 {
        seq.iter().map(|j| (j + 1).to_string()).collect()
    } else {
        seq.iter().map(|j| (j + 1).to_string()).collect::<Vec<_>>().join(",")
    }
}

pub fn parse_sequence(text: &str, components: usize) -> Result<Vec<usize>, MilnorError> {
    let bad = || MilnorError::BadSequence(text.to_string());
    let parts: Vec<&str> = if text.contains(',') { text.split(',').collect() } else { text.split("").filter(|s| !s.is_empty()).collect() };
    let mut out = Vec::new();
    for p in parts {
        let k: usize = p.trim().parse().map_err(|_| bad())?;
        if k == 0 || k > components {
            return Err(bad());
        }
        out.push(k - 1);
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcValue {
    /// Boundary index j >= 1.
    pub target: usize,
    pub mu: BigInt,
    pub nu: Residue,
}

/// Invariants indexed by a sequence `Ii`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub sequence: Vec<usize>,
    pub m: BigInt,
    pub delta: BigInt,
    pub nu: BigInt,
    /// `mu(I; omega)` for each loop of component i.
    pub loop_mu: Vec<BigInt>,
    pub arcs: Vec<ArcValue>,
}

#[derive(Debug, Clone)]
pub struct InvariantTable {
    pub num_components: usize,
    pub max_len: usize,
    pub q: usize,
    pub nonrepeated: bool,
    /// Set when a one-component diagram had its values zeroed.
    pub trivialized: bool,
    pub entries: BTreeMap<Vec<usize>, Entry>,
    /// Expansions of `eta_q` of each loop, per component.
    pub loop_series: Vec<Vec<MagnusSeries>>,
    pub arc_series: Vec<Vec<MagnusSeries>>,
    pub h1_basis: Vec<Option<Vec<usize>>>,
}

fn sequences(l: usize, max: usize, nonrepeated: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &layer {
            for j in 0..l {
                if nonrepeated && s.contains(&j) {
                    continue;
                }
                let mut t = s.clone();
                t.push(j);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Proper nonempty order-preserving subsequences, with all their rotations.
fn reductions(seq: &[usize]) -> Vec<Vec<usize>> {
    let n = seq.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let sub: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).map(|k| seq[k]).collect();
        for r in 0..sub.len() {
            let mut rot = sub.clone();
            rot.rotate_left(r);
            out.push(rot);
        }
    }
    out.sort();
    out.dedup();
    out
}

fn gcd_all<'a, I: IntoIterator<Item = &'a BigInt>>(it: I) -> BigInt {
    it.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

impl InvariantTable {
    pub fn compute(diagram: &CutDiagram, opts: &TableOptions) -> Result<InvariantTable, MilnorError> {
        if opts.max_len == 0 {
            return Err(MilnorError::EmptyRange);
        }
        if diagram.has_selfsingular() && !opts.nonrepeated {
            return Err(MilnorError::SelfSingular);
        }
        let l = diagram.num_components();
        let max_len = if opts.nonrepeated { opts.max_len.min(l.saturating_sub(1)).max(1) } else { opts.max_len };
        let q = opts.q.unwrap_or(max_len + 1);
        if q < max_len + 1 {
            return Err(MilnorError::ClassTooSmall { q, len: max_len });
        }
        let roads = diagram.road_network(opts.seed).map_err(ChenError::from)?;
        let ctx = ChenContext::with_roads(diagram.clone(), roads, q, Guard::default())?;
        InvariantTable::from_context(&ctx, max_len, opts)
    }

    pub fn from_context(ctx: &ChenContext, max_len: usize, opts: &TableOptions) -> Result<InvariantTable, MilnorError> {
        let d = &ctx.diagram;
        let l = d.num_components();
        let mut jobs: Vec<(usize, bool, usize, &CrossingPath)> = Vec::new();
        for (i, c) in d.components.iter().enumerate() {
            jobs.extend(c.loops.iter().enumerate().map(|(k, p)| (i, true, k, p)));
            jobs.extend(c.arcs.iter().enumerate().map(|(k, p)| (i, false, k, p)));
        }
        if opts.mode == Mode::Series {
            ctx.substitution(max_len)?;
        }
        let series: Vec<MagnusSeries> = jobs
            .par_iter()
            .map(|&(i, _, _, p)| path_series(ctx, i, p, max_len, opts.mode))
            .collect::<Result<_, _>>()?;
        let mut loop_series = vec![Vec::new(); l];
        let mut arc_series = vec![Vec::new(); l];
        for (&(i, is_loop, _, _), s) in jobs.iter().zip(series) {
            if is_loop {
                loop_series[i].push(s);
            } else {
                arc_series[i].push(s);
            }
        }
        let trivial = l == 1 && !opts.force;
        let seqs = sequences(l, max_len + 1, opts.nonrepeated);
        let mut m: HashMap<Vec<usize>, BigInt> = HashMap::new();
        let mut loop_mu: HashMap<Vec<usize>, Vec<BigInt>> = HashMap::new();
        for s in &seqs {
            let (i, prefix) = (*s.last().unwrap(), &s[..s.len() - 1]);
            let mus: Vec<BigInt> = if prefix.is_empty() {
                vec![BigInt::zero(); loop_series[i].len()]
            } else {
                loop_series[i].iter().map(|x| x.coefficient(prefix).map_err(ChenError::from)).collect::<Result<_, _>>()?
            };
            m.insert(s.clone(), if prefix.is_empty() { BigInt::zero() } else { gcd_all(&mus) });
            loop_mu.insert(s.clone(), mus);
        }
        let mut entries = BTreeMap::new();
        for s in &seqs {
            let (i, prefix) = (*s.last().unwrap(), &s[..s.len() - 1]);
            let delta = if trivial {
                BigInt::zero()
            } else {
                gcd_all(reductions(s).iter().map(|r| &m[r]))
            };
            let mv = if trivial { BigInt::zero() } else { m[s].clone() };
            let nu = delta.gcd(&mv);
            let arcs = arc_series[i]
                .iter()
                .enumerate()
                .map(|(k, a)| {
                    let mu = if prefix.is_empty() { BigInt::zero() } else { a.coefficient(prefix).map_err(ChenError::from)? };
                    let nu = Residue::new(&mu, &nu);
                    Ok(ArcValue { target: k + 1, mu, nu })
                })
                .collect::<Result<_, MilnorError>>()?;
            entries.insert(
                s.clone(),
                Entry { sequence: s.clone(), m: mv, delta, nu, loop_mu: loop_mu.remove(s).unwrap(), arcs },
            );
        }
        Ok(InvariantTable {
            num_components: l,
            max_len,
            q: ctx.q,
            nonrepeated: opts.nonrepeated,
            trivialized: trivial,
            entries,
            loop_series,
            arc_series,
            h1_basis: d.components.iter().map(|c| c.h1_basis.clone()).collect(),
        })
    }

    /// Table of sequences without repeated indices, `q` equal to the number of components.
    pub fn nonrepeated(diagram: &CutDiagram, seed: Option<u64>) -> Result<InvariantTable, MilnorError> {
        let l = diagram.num_components();
        let opts = TableOptions {
            max_len: l.saturating_sub(1).max(1),
            nonrepeated: true,
            seed,
            q: Some(l.max(2)),
            ..TableOptions::default()
        };
        InvariantTable::compute(diagram, &opts)
    }

    pub fn entry(&self, seq: &[usize]) -> Result<&Entry, MilnorError> {
        self.entries.get(seq).ok_or_else(|| MilnorError::Missing(format_sequence(seq, self.num_components)))
    }

    pub fn nu(&self, seq: &[usize]) -> Result<BigInt, MilnorError> {
        Ok(self.entry(seq)?.nu.clone())
    }

    pub fn delta(&self, seq: &[usize]) -> Result<BigInt, MilnorError> {
        Ok(self.entry(seq)?.delta.clone())
    }

    /// `nu^partial(I; ij)` for boundary j of component i = last of `seq`.
    pub fn nu_arc(&self, seq: &[usize], target: usize) -> Result<Residue, MilnorError> {
        let e = self.entry(seq)?;
        e.arcs
            .iter()
            .find(|a| a.target == target)
            .map(|a| a.nu.clone())
            .ok_or_else(|| MilnorError::Missing(format!("{}; arc {}", format_sequence(seq, self.num_components), target)))
    }

    /// `mu(I; omega_ik) mod Delta(Ii)` for loop k.
    pub fn milnor_number(&self, seq: &[usize], loop_index: usize) -> Result<Residue, MilnorError> {
        let e = self.entry(seq)?;
        let mu = e
            .loop_mu
            .get(loop_index)
            .ok_or_else(|| MilnorError::Missing(format!("{}; loop {}", format_sequence(seq, self.num_components), loop_index)))?;
        Ok(Residue::new(mu, &e.delta))
    }

    pub fn milnor_map(&self, seq: &[usize]) -> Result<MilnorMap, MilnorError> {
        let e = self.entry(seq)?;
        let i = *seq.last().unwrap();
        let basis = self.h1_basis[i].as_ref().ok_or(MilnorError::NoBasis(i + 1))?;
        Ok(MilnorMap {
            sequence: seq.to_vec(),
            component: i,
            modulus: e.delta.clone(),
            values: basis.iter().map(|&k| Residue::new(&e.loop_mu[k], &e.delta)).collect(),
        })
    }

    /// Entries ordered by length, then lexicographically.
    pub fn ordered(&self) -> Vec<&Entry> {
        let mut v: Vec<&Entry> = self.entries.values().collect();
        v.sort_by(|a, b| a.sequence.len().cmp(&b.sequence.len()).then(a.sequence.cmp(&b.sequence)));
        v
    }

    pub fn render_text(&self, all: bool) -> String {
        let l = self.num_components;
        let mut out = format!(
            "components {}  max length {}  q {}{}\n",
            l,
            self.max_len,
            self.q,
            if self.nonrepeated { "  non-repeated" } else { "" }
        );
        if self.trivialized {
            out.push_str("single component: nu reported as 0 (use --force)\n");
        }
        if !all {
            out.push_str("rows with m = 0 mod Delta omitted (use --all)\n");
        }
        out.push_str(&format!("{:<12} {:>8} {:>8} {:>8}\n", "sequence", "m", "Delta", "nu"));
        for e in self.ordered() {
            let interesting = !Residue::new(&e.m, &e.delta).is_zero() || e.arcs.iter().any(|a| !a.nu.is_zero());
            if !(all || interesting) {
                continue;
            }
            out.push_str(&format!(
                "{:<12} {:>8} {:>8} {:>8}",
                format_sequence(&e.sequence, l),
                e.m,
                e.delta,
                e.nu
            ));
            for a in &e.arcs {
                out.push_str(&format!("  arc {}: {}", a.target, a.nu));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let l = self.num_components;
        let entries: Vec<Value> = self
            .ordered()
            .into_iter()
            .map(|e| {
                json!({
                    "sequence": format_sequence(&e.sequence, l),
                    "m": e.m.to_string(),
                    "delta": e.delta.to_string(),
                    "nu": e.nu.to_string(),
                    "loop_mu": e.loop_mu.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    "arcs": e.arcs.iter().map(|a| json!({
                        "target": a.target,
                        "mu": a.mu.to_string(),
                        "value": a.nu.value.to_string(),
                        "signed": a.nu.signed.to_string(),
                        "modulus": a.nu.modulus.to_string(),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "components": l,
            "max_length": self.max_len,
            "q": self.q,
            "nonrepeated": self.nonrepeated,
            "trivialized": self.trivialized,
            "entries": entries,
        })
    }
}

fn path_series(ctx: &ChenContext, i: usize, p: &CrossingPath, degree: usize, mode: Mode) -> Result<MagnusSeries, ChenError> {
    let w = ctx.diagram.normalized_word(i, p);
    match mode {
        Mode::Series => ctx.eta_series(&w, degree),
        Mode::Word => ctx.expand(&ctx.eta_word(&w)?, degree),
    }
}

/// `mu(I; omega_gamma)` for an arbitrary loop of component i.
pub fn milnor_number(ctx: &ChenContext, table: &InvariantTable, i: usize, path: &CrossingPath, seq: &[usize]) -> Result<Residue, MilnorError> {
    let mut full = seq.to_vec();
    full.push(i);
    let delta = table.delta(&full)?;
    let s = path_series(ctx, i, path, table.max_len, Mode::Series)?;
    let mu = s.coefficient(seq).map_err(ChenError::from)?;
    Ok(Residue::new(&mu, &delta))
}

/// Values of `mu(I; -)` on the H1 basis of component i, modulo `Delta(Ii)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorMap {
    pub sequence: Vec<usize>,
    pub component: usize,
    pub modulus: BigInt,
    pub values: Vec<Residue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeKernel {
    pub rank: usize,
    pub basis: Vec<Vec<BigInt>>,
}

/// Kernel of one map restricted to a saturated sublattice, as a constraint row.
///
/// With modulus 0 this is the integer kernel of the row. With modulus d > 0
/// the row of least nonnegative residues is used; a row vanishing mod d
/// constrains nothing.
fn constraint(m: &MilnorMap) -> Option<Vec<BigInt>> {
    let row: Vec<BigInt> = m.values.iter().map(|v| v.value.clone()).collect();
    if row.iter().all(|x| x.is_zero()) {
        None
    } else {
        Some(row)
    }
}

pub fn free_kernel(maps: &[MilnorMap]) -> Result<FreeKernel, MilnorError> {
    let Some(first) = maps.first() else {
        return Ok(FreeKernel { rank: 0, basis: Vec::new() });
    };
    let r = first.values.len();
    if maps.iter().any(|m| m.component != first.component || m.values.len() != r) {
        return Err(MilnorError::MixedComponents);
    }
    let rows: Vec<Vec<BigInt>> = maps.iter().filter_map(constraint).collect();
    let basis = integer_kernel(&rows, r);
    Ok(FreeKernel { rank: basis.len(), basis })
}

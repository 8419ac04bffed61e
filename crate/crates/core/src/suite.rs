//! Bundled examples and the checks run by `selftest` and the acceptance target.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cdj;
use crate::chen::ChenContext;
use crate::diagram::CutDiagram;
use crate::gauss::GaussDiagram;
use crate::milnor::{format_sequence, free_kernel, InvariantTable, MilnorError, Residue, TableOptions};
use crate::spun::spun;
use crate::word::{FreeWord, Letter, Symbol};

pub struct Example {
    pub name: &'static str,
    pub diagram: CutDiagram,
    pub gauss: Option<GaussDiagram>,
    /// Longest |I| worth tabulating for this example.
    pub max_len: usize,
}

const CDJ: &[(&str, &str, usize)] = &[
    ("bead", include_str!("../data/bead.cdj"), 3),
    ("borromeilhan", include_str!("../data/borromeilhan.cdj"), 2),
    ("s3", include_str!("../data/s3.cdj"), 2),
    ("wm_0", include_str!("../data/wm_0.cdj"), 3),
    ("wm_1", include_str!("../data/wm_1.cdj"), 3),
    ("wm_2", include_str!("../data/wm_2.cdj"), 3),
    ("wm_3", include_str!("../data/wm_3.cdj"), 3),
    ("wm_4", include_str!("../data/wm_4.cdj"), 3),
];

const GAUSS: &[(&str, &str, usize)] = &[
    ("hopf", include_str!("../data/hopf.gauss"), 2),
    ("trefoil", include_str!("../data/trefoil.gauss"), 2),
    ("borromean", include_str!("../data/borromean.gauss"), 2),
    ("milnor_link_3", include_str!("../data/milnor_link_3.gauss"), 2),
    ("milnor_link_4", include_str!("../data/milnor_link_4.gauss"), 3),
    ("milnor_link_5", include_str!("../data/milnor_link_5.gauss"), 4),
    ("x_0", include_str!("../data/x_0.gauss"), 3),
    ("x_1", include_str!("../data/x_1.gauss"), 3),
    ("x_2", include_str!("../data/x_2.gauss"), 3),
    ("x_3", include_str!("../data/x_3.gauss"), 3),
    ("x_4", include_str!("../data/x_4.gauss"), 3),
];

/// Every bundled example, CDJ files first.
pub fn bundled() -> Vec<Example> {
    let mut out = Vec::new();
    for &(name, text, max_len) in CDJ {
        let diagram = cdj::parse(text).unwrap_or_else(|e| panic!("bundled {}: {}", name, e));
        out.push(Example { name, diagram, gauss: None, max_len });
    }
    for &(name, text, max_len) in GAUSS {
        let g = GaussDiagram::parse(text).unwrap_or_else(|e| panic!("bundled {}: {}", name, e));
        out.push(Example { name, diagram: g.to_cut_diagram(), gauss: Some(g), max_len });
    }
    out
}

pub fn example(name: &str) -> Option<Example> {
    bundled().into_iter().find(|e| e.name == name)
}

/// Source text of a bundled file, by file name.
pub fn bundled_source(file: &str) -> Option<&'static str> {
    CDJ.iter()
        .map(|&(n, t, _)| (format!("{}.cdj", n), t))
        .chain(GAUSS.iter().map(|&(n, t, _)| (format!("{}.gauss", n), t)))
        .find(|(n, _)| n == file)
        .map(|(_, t)| t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Quick,
}

impl Scale {
    fn count(self, full: usize) -> usize {
        match self {
            Scale::Full => full,
            Scale::Quick => (full / 10).max(3),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} [{:.2}s] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.title,
            self.detail
        )
    }
}

type Check = Result<String, String>;

fn timed(id: usize, title: &'static str, limit: Duration, f: impl FnOnce() -> Check) -> Outcome {
    let t = Instant::now();
    let r = f();
    let elapsed = t.elapsed();
    let (mut passed, mut detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > limit {
        passed = false;
        detail = format!("{} (over the {}s budget)", detail, limit.as_secs());
    }
    Outcome { id, title, passed, detail, elapsed }
}

fn table(d: &CutDiagram, max_len: usize) -> Result<InvariantTable, String> {
    InvariantTable::compute(d, &TableOptions { max_len, ..Default::default() }).map_err(|e| e.to_string())
}

fn seq(text: &str, l: usize) -> Vec<usize> {
    crate::milnor::parse_sequence(text, l).expect("literal sequence")
}

fn expect_eq<T: PartialEq + std::fmt::Display>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{} = {}, expected {}", what, got, want))
    }
}

pub fn bead() -> Outcome {
    timed(1, "bead", Duration::from_secs(1), || {
        let ex = example("bead").unwrap();
        let t = table(&ex.diagram, 2)?;
        for (s, v) in [("123", 1), ("213", 1), ("312", 0), ("132", 0), ("231", 0), ("321", 0)] {
            expect_eq(&format!("nu({})", s), t.nu(&seq(s, 3)).unwrap(), BigInt::from(v))?;
        }
        for e in t.entries.values().filter(|e| e.sequence.len() == 2) {
            expect_eq(&format!("nu({})", format_sequence(&e.sequence, 3)), e.nu.clone(), BigInt::zero())?;
        }
        Ok("nu(123)=nu(213)=1, other length-3 and all length-2 nu vanish".into())
    })
}

pub fn borromeilhan() -> Outcome {
    timed(2, "borromeilhan", Duration::from_secs(1), || {
        let ex = example("borromeilhan").unwrap();
        let t = table(&ex.diagram, 2)?;
        let a = t.nu_arc(&seq("123", 3), 1).map_err(|e| e.to_string())?;
        let b = t.nu_arc(&seq("213", 3), 1).map_err(|e| e.to_string())?;
        expect_eq("nu_arc(12;31)", a.signed, BigInt::one())?;
        expect_eq("nu_arc(21;31)", b.signed, -BigInt::one())?;
        for e in t.entries.values() {
            let name = format_sequence(&e.sequence, 3);
            expect_eq(&format!("nu({})", name), e.nu.clone(), BigInt::zero())?;
            if e.sequence.last() != Some(&2) {
                for arc in &e.arcs {
                    expect_eq(&format!("nu_arc({})", name), arc.nu.value.clone(), BigInt::zero())?;
                }
            }
        }
        Ok("nu_arc(12;31)=1, nu_arc(21;31)=-1, every nu and the arc invariants of components 1, 2 vanish".into())
    })
}

/// Values of (nu(2121), nu(2211)) for m = 0..4, and whether the full tables separate them.
pub fn wm_values() -> Result<(Vec<(BigInt, BigInt)>, bool), String> {
    let tables: Vec<InvariantTable> = (0..=4)
        .into_par_iter()
        .map(|m| table(&example(&format!("wm_{}", m)).unwrap().diagram, 4))
        .collect::<Result<_, _>>()?;
    let vals = tables.iter().map(|t| (t.nu(&seq("2121", 2)).unwrap(), t.nu(&seq("2211", 2)).unwrap())).collect();
    let fingerprints: Vec<Vec<BigInt>> = tables.iter().map(|t| t.ordered().iter().map(|e| e.nu.clone()).collect()).collect();
    let mut separated = true;
    for a in 0..5 {
        for b in a + 1..5 {
            separated &= fingerprints[a] != fingerprints[b];
        }
    }
    Ok((vals, separated))
}

pub fn wm_family() -> Outcome {
    timed(3, "W_m family", Duration::from_secs(10), || {
        let (vals, separated) = wm_values()?;
        let n2121: Vec<String> = vals.iter().map(|v| v.0.to_string()).collect();
        let n2211: Vec<String> = vals.iter().map(|v| v.1.to_string()).collect();
        let detail = format!(
            "m=0..4: nu(2121)=[{}], nu(2211)=[{}], pairwise separated: {}",
            n2121.join(","),
            n2211.join(","),
            separated
        );
        let exact = vals.iter().enumerate().all(|(m, v)| v.0 == BigInt::from(m));
        if exact && separated {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn check_milnor_link(t: &InvariantTable, n: usize, as_nu: bool) -> Result<(), String> {
    let l = n + 1;
    for e in t.entries.values().filter(|e| e.sequence.len() <= n) {
        let name = format_sequence(&e.sequence, l);
        expect_eq(&format!("nu({})", name), e.nu.clone(), BigInt::zero())?;
        for mu in &e.loop_mu {
            expect_eq(&format!("mu({})", name), mu.clone(), BigInt::zero())?;
        }
    }
    for p in permutations(n - 1) {
        let mut s: Vec<usize> = p.clone();
        s.push(n - 1);
        s.push(n);
        let name = format_sequence(&s, l);
        let identity = p.iter().enumerate().all(|(k, &v)| k == v);
        let got = if as_nu {
            t.nu(&s).map_err(|e| e.to_string())?
        } else {
            t.milnor_number(&s, 0).map_err(|e| e.to_string())?.signed.abs()
        };
        expect_eq(&format!("|mu({})|", name), got, if identity { BigInt::one() } else { BigInt::zero() })?;
    }
    Ok(())
}

pub fn milnor_links() -> Outcome {
    timed(4, "Milnor links", Duration::from_secs(30), || {
        let mut notes = Vec::new();
        for l in 3..=5 {
            let ex = example(&format!("milnor_link_{}", l)).unwrap();
            let n = l - 1;
            let t = table(&ex.diagram, n)?;
            let lead = t.milnor_number(&(0..l).collect::<Vec<_>>(), 0).map_err(|e| e.to_string())?;
            check_milnor_link(&t, n, false).map_err(|e| format!("M_{}: {}", l, e))?;
            let (s, _) = spun(&ex.diagram);
            let ts = table(&s, n)?;
            check_milnor_link(&ts, n, true).map_err(|e| format!("Spun(M_{}): {}", l, e))?;
            notes.push(format!("M_{}: mu({})={}", l, format_sequence(&(0..l).collect::<Vec<_>>(), l), lead.signed));
        }
        Ok(format!("{}; permuted and shorter invariants vanish, Spun images agree", notes.join(", ")))
    })
}

pub fn linking(scale: Scale, seed: u64) -> Outcome {
    timed(5, "linking numbers", Duration::from_secs(60), || {
        let n = scale.count(200);
        let bad: Vec<String> = (0..n)
            .into_par_iter()
            .filter_map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
                let l = rng.gen_range(1..=3);
                let c = rng.gen_range(0..=8);
                let g = GaussDiagram::random_classical(&mut rng, l, c);
                let lk = match g.linking_matrix() {
                    Ok(lk) => lk,
                    Err(e) => return Some(format!("{}: {}", g, e)),
                };
                let t = match table(&g.to_cut_diagram(), 1) {
                    Ok(t) => t,
                    Err(e) => return Some(format!("{}: {}", g, e)),
                };
                for i in 0..l {
                    for j in 0..l {
                        if i == j {
                            continue;
                        }
                        let Ok(e) = t.entry(&[i, j]) else {
                            return Some(format!("{}: no entry ({},{})", g, i + 1, j + 1));
                        };
                        let want = BigInt::from(lk[i][j]);
                        if e.loop_mu[0] != want || e.nu != want.abs() {
                            return Some(format!("{} at ({},{})", g, i + 1, j + 1));
                        }
                    }
                }
                None
            })
            .collect();
        if bad.is_empty() {
            Ok(format!("{} random classical diagrams agree with signed crossing counts", n))
        } else {
            Err(format!("{} mismatches, first: {}", bad.len(), bad[0]))
        }
    })
}

/// nu, Delta, Milnor map values and arc residues, for comparisons.
fn fingerprint(t: &InvariantTable) -> Vec<(Vec<usize>, BigInt, BigInt, Vec<Residue>, Vec<Residue>)> {
    t.ordered()
        .into_iter()
        .map(|e| {
            let map = t.milnor_map(&e.sequence).map(|m| m.values).unwrap_or_default();
            (e.sequence.clone(), e.nu.clone(), e.delta.clone(), map, e.arcs.iter().map(|a| a.nu.clone()).collect())
        })
        .collect()
}

fn random_start(rng: &mut ChaCha8Rng) -> GaussDiagram {
    let l = rng.gen_range(2..=3);
    match rng.gen_range(0..3) {
        0 => {
            let c = rng.gen_range(0..=6);
            GaussDiagram::random_classical(rng, l, c)
        }
        1 => {
            let a = rng.gen_range(0..=5);
            GaussDiagram::random_welded(rng, l, a)
        }
        _ => {
            // Braid closures are rich in triangles.
            let len = rng.gen_range(3..=8);
            let word: Vec<i32> = (0..len).map(|_| [1, -1, 2, -2][rng.gen_range(0..4)]).collect();
            GaussDiagram::braid_closure(3, &word, &[])
        }
    }
}

pub fn move_invariance(scale: Scale, seed: u64) -> Outcome {
    timed(6, "move invariance", Duration::from_secs(120), || {
        let n = scale.count(200);
        let results: Vec<Result<Vec<String>, String>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(31).wrapping_add(k as u64));
                let g = random_start(&mut rng);
                let self_virtual = k % 2 == 1;
                let mut h = g.clone();
                let mut script = Vec::new();
                for _ in 0..rng.gen_range(1..=10) {
                    let mv = h.random_move(&mut rng, self_virtual);
                    if let Ok(next) = h.apply(&mv) {
                        h = next;
                        script.push(mv.to_string());
                    }
                }
                let (a, b) = (g.to_cut_diagram(), h.to_cut_diagram());
                let same = if self_virtual {
                    let ta = InvariantTable::nonrepeated(&a, None).map_err(|e| e.to_string())?;
                    let tb = InvariantTable::nonrepeated(&b, None).map_err(|e| e.to_string())?;
                    fingerprint(&ta) == fingerprint(&tb)
                } else {
                    fingerprint(&table(&a, 3)?) == fingerprint(&table(&b, 3)?)
                };
                if same {
                    Ok(script)
                } else {
                    Err(format!("{} after [{}]", g, script.join("; ")))
                }
            })
            .collect();
        let mut kinds: std::collections::BTreeMap<&str, usize> = std::collections::BTreeMap::new();
        for mv in results.iter().filter_map(|r| r.as_ref().ok()).flatten() {
            let kind = mv.split_whitespace().next().unwrap_or("");
            *kinds.entry(kind.trim_end_matches(['+', '-'])).or_default() += 1;
        }
        let counts: Vec<String> = kinds.iter().map(|(k, v)| format!("{} {}", k, v)).collect();
        match results.into_iter().find_map(|r| r.err()) {
            None => Ok(format!("{} diagrams, moves applied: {}; tables unchanged", n, counts.join(", "))),
            Some(e) => Err(format!("tables changed: {}", e)),
        }
    })
}

fn rebase_randomly(d: &CutDiagram, rng: &mut ChaCha8Rng) -> CutDiagram {
    let mut out = d.clone();
    for (i, c) in d.components.iter().enumerate() {
        if c.closed && c.regions.len() > 1 {
            let r = c.regions[rng.gen_range(0..c.regions.len())];
            out = out.rebased(i, r).expect("closed component");
        }
    }
    out
}

pub fn choice_independence(scale: Scale, seed: u64) -> Outcome {
    timed(7, "choice independence", Duration::from_secs(60), || {
        let roads = match scale {
            Scale::Full => 5,
            Scale::Quick => 2,
        };
        let bases = match scale {
            Scale::Full => 3,
            Scale::Quick => 1,
        };
        let examples = bundled();
        let results: Vec<Result<(), String>> = examples
            .par_iter()
            .map(|ex| {
                let max_len = ex.max_len.min(3);
                let reference = fingerprint(&table(&ex.diagram, max_len)?);
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ex.name.len() as u64);
                for r in 0..roads + bases {
                    let (d, opts) = if r < roads {
                        (ex.diagram.clone(), TableOptions { max_len, seed: Some(rng.gen()), ..Default::default() })
                    } else {
                        (rebase_randomly(&ex.diagram, &mut rng), TableOptions { max_len, ..Default::default() })
                    };
                    let t = InvariantTable::compute(&d, &opts).map_err(|e| e.to_string())?;
                    if fingerprint(&t) != reference {
                        return Err(format!("{}: choice {} changed the table", ex.name, r));
                    }
                }
                Ok(())
            })
            .collect();
        match results.into_iter().find_map(|r| r.err()) {
            None => Ok(format!("{} examples x ({} road networks + {} base choices) agree", examples.len(), roads, bases)),
            Some(e) => Err(e),
        }
    })
}

fn random_word(rng: &mut ChaCha8Rng, symbols: usize) -> FreeWord {
    let len = rng.gen_range(0..=10);
    FreeWord::from_letters(
        (0..len).map(|_| Letter { symbol: Symbol(rng.gen_range(0..symbols) as u32), inverse: rng.gen_bool(0.5) }).collect(),
    )
    .reduce()
}

pub fn chen_properties(scale: Scale, seed: u64) -> Outcome {
    timed(8, "Chen homomorphisms", Duration::from_secs(60), || {
        let words = scale.count(100);
        let examples = bundled();
        let results: Vec<Result<(), String>> = examples
            .par_iter()
            .map(|ex| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (ex.name.len() as u64) << 8);
                let ws: Vec<FreeWord> = (0..words).map(|_| random_word(&mut rng, ex.diagram.regions.len())).collect();
                for q in 1..=4 {
                    let ctx = ChenContext::new(ex.diagram.clone(), q, None).map_err(|e| e.to_string())?;
                    let up = ChenContext::new(ex.diagram.clone(), q + 1, None).map_err(|e| e.to_string())?;
                    for w in &ws {
                        let once = ctx.eta_word(w).map_err(|e| format!("{}: {}", ex.name, e))?;
                        let twice = ctx.eta_word(&once).map_err(|e| e.to_string())?;
                        if once != twice {
                            return Err(format!("{}: eta_{} is not idempotent", ex.name, q));
                        }
                        let a = up.eta_series(w, q).map_err(|e| e.to_string())?;
                        let b = ctx.eta_series(w, q).map_err(|e| e.to_string())?;
                        let diff = a.mul(&b.inverse().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
                        if diff.lcs_degree().is_some_and(|k| k < q) {
                            return Err(format!("{}: eta_{} and eta_{} differ below degree {}", ex.name, q + 1, q, q));
                        }
                    }
                }
                Ok(())
            })
            .collect();
        match results.into_iter().find_map(|r| r.err()) {
            None => Ok(format!("{} examples x {} words x q=1..4", examples.len(), words)),
            Some(e) => Err(e),
        }
    })
}

pub fn mode_equivalence(scale: Scale, seed: u64) -> Outcome {
    timed(9, "mode equivalence", Duration::from_secs(60), || {
        let words = scale.count(20);
        let examples = bundled();
        let results: Vec<Result<usize, String>> = examples
            .par_iter()
            .map(|ex| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(ex.name.len() as u64));
                let d = &ex.diagram;
                let mut ws: Vec<FreeWord> = Vec::new();
                for (i, c) in d.components.iter().enumerate() {
                    ws.extend(c.loops.iter().chain(&c.arcs).map(|p| d.normalized_word(i, p)));
                }
                ws.extend((0..words).map(|_| random_word(&mut rng, d.regions.len())));
                let mut checked = 0;
                for q in 1..=4 {
                    let ctx = ChenContext::new(d.clone(), q, None).map_err(|e| e.to_string())?;
                    for w in &ws {
                        let direct = ctx.expand(&ctx.eta_word(w).map_err(|e| e.to_string())?, 4).map_err(|e| e.to_string())?;
                        if ctx.eta_series(w, 4).map_err(|e| e.to_string())? != direct {
                            return Err(format!("{}: modes disagree at q={}", ex.name, q));
                        }
                        checked += 1;
                    }
                }
                Ok(checked)
            })
            .collect();
        let mut total = 0;
        for r in results {
            total += r?;
        }
        Ok(format!("{} word images agree through degree 4", total))
    })
}

pub fn free_kernel_s3() -> Outcome {
    timed(10, "free kernel of S3", Duration::from_secs(5), || {
        let ex = example("s3").unwrap();
        let t = table(&ex.diagram, 2)?;
        let maps = [t.milnor_map(&seq("13", 3)), t.milnor_map(&seq("23", 3))];
        let maps: Vec<_> = maps.into_iter().collect::<Result<_, MilnorError>>().map_err(|e| e.to_string())?;
        let single: Vec<usize> = maps.iter().map(|m| free_kernel(std::slice::from_ref(m)).unwrap().rank).collect();
        let both = free_kernel(&maps).map_err(|e| e.to_string())?;
        expect_eq("rank of the intersection", both.rank, 0)?;
        Ok(format!("ranks of Ker0(M13), Ker0(M23): {:?}; intersection rank 0", single))
    })
}

/// Criteria whose statement is contradicted by the examples; see README.
pub const UNATTAINABLE: &[usize] = &[3];

pub fn run_all(scale: Scale, seed: u64) -> Vec<Outcome> {
    vec![
        bead(),
        borromeilhan(),
        wm_family(),
        milnor_links(),
        linking(scale, seed),
        move_invariance(scale, seed),
        choice_independence(scale, seed),
        chen_properties(scale, seed),
        mode_equivalence(scale, seed),
        free_kernel_s3(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milnor::Mode;

    #[test]
    fn bundled_examples_parse() {
        let all = bundled();
        assert_eq!(all.len(), CDJ.len() + GAUSS.len());
        for ex in &all {
            assert!(ex.diagram.validate().is_ok(), "{}", ex.name);
        }
        assert!(bundled_source("bead.cdj").is_some());
        assert!(bundled_source("hopf.gauss").is_some());
    }

    #[test]
    fn permutations_count() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn cdj_files_are_canonical() {
        for &(name, text, _) in CDJ {
            assert_eq!(cdj::emit(&cdj::parse(text).unwrap()), text, "{}", name);
        }
    }

    #[test]
    fn word_mode_matches_table_mode() {
        let ex = example("bead").unwrap();
        let a = table(&ex.diagram, 3).unwrap();
        let b = InvariantTable::compute(&ex.diagram, &TableOptions { max_len: 3, mode: Mode::Word, ..Default::default() }).unwrap();
        assert_eq!(fingerprint(&a), fingerprint(&b));
    }
}

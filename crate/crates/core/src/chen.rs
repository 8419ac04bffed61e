//! Chen homomorphisms into the free group on the base generators.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::diagram::{CutDiagram, DiagramError, RoadNetwork};
use crate::magnus::{MagnusError, MagnusSeries, Substitution};
use crate::presentation::{Family, Origin, Presentation, Relator};
use crate::word::{Alphabet, FreeWord, Symbol};

/// Largest nilpotency class accepted in word mode by default.
pub const DEFAULT_WORD_Q: usize = 6;
/// Longest intermediate word accepted in word mode by default.
pub const DEFAULT_WORD_LEN: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChenError {
    #[error("nilpotency class must be at least 1")]
    ZeroClass,
    #[error("word mode is limited to q <= {limit}, asked for {q}")]
    ClassGuard { q: usize, limit: usize },
    #[error("word image grew past {0} letters")]
    LengthGuard(usize),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Magnus(#[from] MagnusError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guard {
    pub max_q: usize,
    pub max_len: usize,
}

impl Default for Guard {
    fn default() -> Self {
        Guard { max_q: DEFAULT_WORD_Q, max_len: DEFAULT_WORD_LEN }
    }
}

/// Diagram, road network and nilpotency class, with cached images.
#[derive(Debug)]
pub struct ChenContext {
    pub diagram: CutDiagram,
    pub roads: RoadNetwork,
    pub q: usize,
    pub guard: Guard,
    words: OnceLock<Result<Vec<FreeWord>, ChenError>>,
    series: Mutex<BTreeMap<usize, Arc<Substitution>>>,
}

impl Clone for ChenContext {
    fn clone(&self) -> Self {
        ChenContext::with_roads(self.diagram.clone(), self.roads.clone(), self.q, self.guard).expect("already checked")
    }
}

impl ChenContext {
    pub fn new(diagram: CutDiagram, q: usize, seed: Option<u64>) -> Result<ChenContext, ChenError> {
        let roads = diagram.road_network(seed)?;
        ChenContext::with_roads(diagram, roads, q, Guard::default())
    }

    pub fn with_roads(diagram: CutDiagram, roads: RoadNetwork, q: usize, guard: Guard) -> Result<ChenContext, ChenError> {
        if q == 0 {
            return Err(ChenError::ZeroClass);
        }
        Ok(ChenContext { diagram, roads, q, guard, words: OnceLock::new(), series: Mutex::new(BTreeMap::new()) })
    }

    pub fn num_components(&self) -> usize {
        self.diagram.num_components()
    }

    /// Variable index of a base generator, `None` for other symbols.
    pub fn variable(&self, s: Symbol) -> Option<usize> {
        let i = self.diagram.component_of(s);
        (self.diagram.components[i].base == s.0 as usize).then_some(i)
    }

    fn base_word(&self, region: usize) -> FreeWord {
        FreeWord::generator(self.diagram.base_symbol(self.diagram.regions[region].component))
    }

    fn word_images(&self) -> Result<&Vec<FreeWord>, ChenError> {
        self.words
            .get_or_init(|| {
                if self.q > self.guard.max_q {
                    return Err(ChenError::ClassGuard { q: self.q, limit: self.guard.max_q });
                }
                let n = self.diagram.regions.len();
                let mut level: Vec<FreeWord> = (0..n).map(|r| self.base_word(r)).collect();
                for _ in 1..self.q {
                    let mut next = Vec::with_capacity(n);
                    for r in 0..n {
                        let v = self.roads.roads[r].substitute(|s| level[s.0 as usize].clone());
                        let img = self.base_word(r).conjugate(&v);
                        if img.len() > self.guard.max_len {
                            return Err(ChenError::LengthGuard(self.guard.max_len));
                        }
                        next.push(img);
                    }
                    level = next;
                }
                Ok(level)
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// `eta_q(w)` as a reduced word in the base generators.
    pub fn eta_word(&self, w: &FreeWord) -> Result<FreeWord, ChenError> {
        let images = self.word_images()?;
        let out = w.substitute(|s| images[s.0 as usize].clone());
        if out.len() > self.guard.max_len {
            return Err(ChenError::LengthGuard(self.guard.max_len));
        }
        Ok(out)
    }

    /// Magnus images of every region under `eta_q`, truncated at `degree`.
    pub fn substitution(&self, degree: usize) -> Result<Arc<Substitution>, ChenError> {
        if let Some(s) = self.series.lock().unwrap().get(&degree) {
            return Ok(s.clone());
        }
        let sub = Arc::new(self.build_substitution(degree)?);
        self.series.lock().unwrap().insert(degree, sub.clone());
        Ok(sub)
    }

    fn build_substitution(&self, degree: usize) -> Result<Substitution, ChenError> {
        let d = &self.diagram;
        let l = d.num_components();
        let n = d.regions.len();
        let gens: Vec<(MagnusSeries, MagnusSeries)> = (0..l)
            .map(|i| Ok((MagnusSeries::generator(l, i, 1, degree)?, MagnusSeries::generator(l, i, -1, degree)?)))
            .collect::<Result<_, MagnusError>>()?;
        let one = MagnusSeries::one(l, degree)?;
        let mut level: Vec<(MagnusSeries, MagnusSeries)> = (0..n).map(|r| gens[d.regions[r].component].clone()).collect();
        for _ in 1..self.q {
            let mut road: Vec<Option<(MagnusSeries, MagnusSeries)>> = vec![None; n];
            let mut next = level.clone();
            for &r in &self.roads.order {
                let i = d.regions[r].component;
                let (v, vinv) = match self.roads.parent[r] {
                    None => (one.clone(), one.clone()),
                    Some((p, letter)) => {
                        let (pv, pinv) = road[p].as_ref().expect("parents come first");
                        let (img, inv) = &level[letter.symbol.0 as usize];
                        let (f, finv) = if letter.inverse { (inv, img) } else { (img, inv) };
                        (pv.mul(f)?, finv.mul(pinv)?)
                    }
                };
                if self.roads.parent[r].is_some() {
                    let img = one.add(&vinv.right_var(i)?.mul(&v)?)?;
                    let inv = vinv.mul(&gens[i].1)?.mul(&v)?;
                    next[r] = (img, inv);
                }
                road[r] = Some((v, vinv));
            }
            level = next;
        }
        let mut sub = Substitution::new(l, degree, n);
        for (r, (img, inv)) in level.into_iter().enumerate() {
            sub.set(Symbol(r as u32), img, inv)?;
        }
        Ok(sub)
    }

    /// `E(eta_q(w))` truncated at `degree`, without expanding words.
    pub fn eta_series(&self, w: &FreeWord, degree: usize) -> Result<MagnusSeries, ChenError> {
        Ok(self.substitution(degree)?.evaluate(w)?)
    }

    /// Magnus expansion of a word in the base generators.
    pub fn expand(&self, w: &FreeWord, degree: usize) -> Result<MagnusSeries, ChenError> {
        Ok(MagnusSeries::of_word(w, self.num_components(), degree, |s| self.variable(s))?)
    }

    /// Generators `R1..Rl`, and a map from base symbols to them.
    fn generator_alphabet(&self) -> (Alphabet, impl Fn(&FreeWord) -> FreeWord + '_) {
        let l = self.num_components();
        let alphabet = Alphabet::new((1..=l).map(|i| format!("R{}", i)));
        let rename = move |w: &FreeWord| w.substitute(|s| FreeWord::generator(Symbol(self.diagram.component_of(s) as u32)));
        (alphabet, rename)
    }

    fn longitude_presentation(&self, families: Vec<Family>) -> Result<Presentation, ChenError> {
        let (alphabet, rename) = self.generator_alphabet();
        let mut relators = Vec::new();
        for (i, c) in self.diagram.components.iter().enumerate() {
            for (k, lp) in c.loops.iter().enumerate() {
                let w = self.diagram.normalized_word(i, lp);
                let longitude = rename(&self.eta_word(&w)?);
                let g = FreeWord::generator(Symbol(i as u32));
                relators.push(Relator {
                    word: FreeWord::commutator(&g, &longitude),
                    origin: Origin::Longitude { component: i, loop_index: k, generator: Symbol(i as u32), longitude },
                });
            }
        }
        let generators = (0..self.num_components()).map(|i| Symbol(i as u32)).collect();
        Ok(Presentation { alphabet, generators, relators, families })
    }

    /// `< R_i | F_q, [R_i, eta_q(w_ij)] >`.
    pub fn nilpotent_presentation(&self) -> Result<Presentation, ChenError> {
        self.longitude_presentation(vec![Family::LowerCentral(self.q)])
    }

    /// Reduced quotient: needs `q` equal to the number of components.
    pub fn reduced_presentation(&self) -> Result<Presentation, ChenError> {
        let ctx = if self.q == self.num_components() {
            self.clone()
        } else {
            ChenContext::with_roads(self.diagram.clone(), self.roads.clone(), self.num_components().max(1), self.guard)?
        };
        ctx.longitude_presentation(vec![Family::Reduced])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussDiagram;

    fn borromean() -> CutDiagram {
        GaussDiagram::braid_closure(3, &[1, -2, 1, -2, 1, -2], &[]).to_cut_diagram()
    }

    #[test]
    fn series_matches_words_on_borromean_rings() {
        let d = borromean();
        for q in 1..=5 {
            let ctx = ChenContext::new(d.clone(), q, None).unwrap();
            for (i, c) in d.components.iter().enumerate() {
                let w = d.normalized_word(i, &c.loops[0]);
                let direct = ctx.expand(&ctx.eta_word(&w).unwrap(), 4).unwrap();
                assert_eq!(ctx.eta_series(&w, 4).unwrap(), direct, "q = {}", q);
            }
        }
    }

    #[test]
    fn guard_trips() {
        let ctx = ChenContext::new(borromean(), 7, None).unwrap();
        assert_eq!(ctx.eta_word(&FreeWord::identity()), Err(ChenError::ClassGuard { q: 7, limit: 6 }));
        assert!(ctx.eta_series(&FreeWord::identity(), 3).is_ok());
    }

    #[test]
    fn hopf_presentation() {
        let d = GaussDiagram::parse("O1+ U2+ / U1+ O2+").unwrap().to_cut_diagram();
        let ctx = ChenContext::new(d, 2, None).unwrap();
        assert_eq!(ctx.nilpotent_presentation().unwrap().render(), "< R1, R2 | F_2, [R1, R2], [R2, R1] >");
    }
}

//! Finite group presentations with annotated relators.

use std::fmt;

use serde_json::{json, Value};

use crate::word::{Alphabet, FreeWord, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    /// Wirtinger relator of the wall with this id.
    Wall(String),
    /// `[R_i, w]` for a loop of component `component` (0-based).
    Longitude { component: usize, loop_index: usize, generator: Symbol, longitude: FreeWord },
}

/// Relator families too large to list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// The q-th lower central subgroup.
    LowerCentral(usize),
    /// `[R_i, R_i^g]` for every generator and every g.
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    pub word: FreeWord,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub generators: Vec<Symbol>,
    pub relators: Vec<Relator>,
    pub families: Vec<Family>,
}

impl Presentation {
    fn render_relator(&self, r: &Relator) -> String {
        match &r.origin {
            Origin::Longitude { generator, longitude, .. } => format!(
                "[{}, {}]",
                self.alphabet.name(*generator),
                self.alphabet.render_gap(longitude)
            ),
            Origin::Wall(_) => self.alphabet.render_gap(&r.word),
        }
    }

    fn render_family(&self, f: Family) -> String {
        match f {
            Family::LowerCentral(q) => format!("F_{}", q),
            Family::Reduced => "[Ri, Ri^g]".to_string(),
        }
    }

    /// GAP style text `< R1, R2 | ... >`.
    pub fn render(&self) -> String {
        let gens: Vec<&str> = self.generators.iter().map(|&g| self.alphabet.name(g)).collect();
        let mut rels: Vec<String> = self.families.iter().map(|&f| self.render_family(f)).collect();
        rels.extend(self.relators.iter().map(|r| self.render_relator(r)));
        if rels.is_empty() {
            format!("< {} >", gens.join(", "))
        } else {
            format!("< {} | {} >", gens.join(", "), rels.join(", "))
        }
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<&str> = self.generators.iter().map(|&g| self.alphabet.name(g)).collect();
        let rels: Vec<Value> = self
            .relators
            .iter()
            .map(|r| {
                let origin = match &r.origin {
                    Origin::Wall(id) => json!({"wall": id}),
                    Origin::Longitude { component, loop_index, generator, longitude } => json!({
                        "component": component + 1,
                        "loop": loop_index,
                        "generator": self.alphabet.name(*generator),
                        "longitude": self.alphabet.render(longitude),
                    }),
                };
                json!({"word": self.alphabet.render(&r.word), "origin": origin})
            })
            .collect();
        let fams: Vec<Value> = self
            .families
            .iter()
            .map(|f| match f {
                Family::LowerCentral(q) => json!({"lower_central": q}),
                Family::Reduced => json!("reduced"),
            })
            .collect();
        json!({"generators": gens, "relators": rels, "families": fams})
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

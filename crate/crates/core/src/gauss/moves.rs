//! Reidemeister, tail-commute and self-virtualization moves on Gauss diagrams.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::{Arrow, End, GaussDiagram, Pos, Slot};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("no crossing {0}")]
    NoCrossing(u32),
    #[error("move does not apply: {0}")]
    NotApplicable(String),
    #[error("bad position {0}:{1}")]
    BadPosition(usize, usize),
    #[error("script line {0}: {1}")]
    Script(usize, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    /// Remove a kink: an arrow whose ends are neighbors.
    R1Remove(u32),
    /// Insert a kink at `pos` with the given sign, tail first or head first.
    R1Insert { pos: Pos, sign: i32, tail_first: bool },
    /// Remove two opposite arrows with adjacent tails and adjacent heads.
    R2Remove(u32, u32),
    /// Insert a bigon: tails at `tails`, heads at `heads`, first arrow of sign `sign`.
    R2Insert { tails: Pos, heads: Pos, sign: i32 },
    /// Triangle move on arrows a (top to middle), b (top to bottom), c (middle to bottom).
    R3(u32, u32, u32),
    /// Swap two neighboring tails.
    TailCommute(Pos),
    /// Delete an arrow with both ends on one component.
    SelfVirtualize(u32),
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::R1Remove(a) => write!(f, "r1- {}", a),
            Move::R1Insert { pos, sign, tail_first } => write!(
                f,
                "r1+ {} {} {} {}",
                pos.0 + 1,
                pos.1,
                sign_str(*sign),
                if *tail_first { "tail" } else { "head" }
            ),
            Move::R2Remove(a, b) => write!(f, "r2- {} {}", a, b),
            Move::R2Insert { tails, heads, sign } => {
                write!(f, "r2+ {} {} {} {} {}", tails.0 + 1, tails.1, heads.0 + 1, heads.1, sign_str(*sign))
            }
            Move::R3(a, b, c) => write!(f, "r3 {} {} {}", a, b, c),
            Move::TailCommute(p) => write!(f, "tc {} {}", p.0 + 1, p.1),
            Move::SelfVirtualize(a) => write!(f, "sv {}", a),
        }
    }
}

fn sign_str(s: i32) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

/// Parses one move per line, in the format `Display` produces. Components are 1-based.
pub fn parse_script(text: &str) -> Result<Vec<Move>, MoveError> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = |m: &str| MoveError::Script(n + 1, m.to_string());
        let num = |k: usize| -> Result<usize, MoveError> {
            toks.get(k).and_then(|t| t.parse().ok()).ok_or_else(|| bad("expected a number"))
        };
        let comp = |k: usize| -> Result<usize, MoveError> {
            num(k)?.checked_sub(1).ok_or_else(|| bad("components count from 1"))
        };
        let sign = |k: usize| -> Result<i32, MoveError> {
            match toks.get(k) {
                Some(&"+") => Ok(1),
                Some(&"-") => Ok(-1),
                _ => Err(bad("expected + or -")),
            }
        };
        let mv = match toks[0] {
            "r1-" => Move::R1Remove(num(1)? as u32),
            "r1+" => Move::R1Insert {
                pos: (comp(1)?, num(2)?),
                sign: sign(3)?,
                tail_first: match toks.get(4) {
                    Some(&"tail") => true,
                    Some(&"head") => false,
                    _ => return Err(bad("expected tail or head")),
                },
            },
            "r2-" => Move::R2Remove(num(1)? as u32, num(2)? as u32),
            "r2+" => Move::R2Insert { tails: (comp(1)?, num(2)?), heads: (comp(3)?, num(4)?), sign: sign(5)? },
            "r3" => Move::R3(num(1)? as u32, num(2)? as u32, num(3)? as u32),
            "tc" => Move::TailCommute((comp(1)?, num(2)?)),
            "sv" => Move::SelfVirtualize(num(1)? as u32),
            other => return Err(bad(&format!("unknown move `{}`", other))),
        };
        out.push(mv);
    }
    Ok(out)
}

fn adjacent(a: Pos, b: Pos) -> bool {
    a.0 == b.0 && (a.1 + 1 == b.1 || b.1 + 1 == a.1)
}

fn before(a: Pos, b: Pos) -> bool {
    a.1 < b.1
}

impl GaussDiagram {
    fn arrow_index(&self, label: u32) -> Result<usize, MoveError> {
        self.arrows.iter().position(|a| a.label == label).ok_or(MoveError::NoCrossing(label))
    }

    fn check_pos(&self, p: Pos, allow_end: bool) -> Result<(), MoveError> {
        let len = self.components.get(p.0).ok_or(MoveError::BadPosition(p.0 + 1, p.1))?.slots.len();
        if p.1 < len || (allow_end && p.1 == len) {
            Ok(())
        } else {
            Err(MoveError::BadPosition(p.0 + 1, p.1))
        }
    }

    /// Whether arrows (a, b, c) form an R3 triangle that may be flipped.
    fn r3_ok(&self, at: &[(Pos, Pos)], a: usize, b: usize, c: usize) -> bool {
        if a == b || b == c || a == c {
            return false;
        }
        let (ta, ha) = at[a];
        let (tb, hb) = at[b];
        let (tc, hc) = at[c];
        if !(adjacent(ta, tb) && adjacent(ha, tc) && adjacent(hb, hc)) {
            return false;
        }
        let o_mid = if before(ha, tc) { 1 } else { -1 };
        let o_bot = if before(hb, hc) { 1 } else { -1 };
        self.arrows[a].sign * self.arrows[b].sign == o_mid * o_bot
    }

    pub fn apply(&self, mv: &Move) -> Result<GaussDiagram, MoveError> {
        let mut g = self.clone();
        let at = self.locate();
        match *mv {
            Move::R1Remove(l) => {
                let a = self.arrow_index(l)?;
                if !adjacent(at[a].0, at[a].1) {
                    return Err(MoveError::NotApplicable(format!("ends of {} are not neighbors", l)));
                }
                g.remove_arrows(&[a]);
            }
            Move::R1Insert { pos, sign, tail_first } => {
                self.check_pos(pos, true)?;
                let k = g.arrows.len();
                g.arrows.push(Arrow { label: self.next_label(), sign });
                let (e1, e2) = if tail_first { (End::Tail, End::Head) } else { (End::Head, End::Tail) };
                let slots = &mut g.components[pos.0].slots;
                slots.insert(pos.1, Slot { arrow: k, end: e2 });
                slots.insert(pos.1, Slot { arrow: k, end: e1 });
            }
            Move::R2Remove(l1, l2) => {
                let (a, b) = (self.arrow_index(l1)?, self.arrow_index(l2)?);
                if a == b || self.arrows[a].sign == self.arrows[b].sign {
                    return Err(MoveError::NotApplicable("arrows need opposite signs".into()));
                }
                if !(adjacent(at[a].0, at[b].0) && adjacent(at[a].1, at[b].1)) {
                    return Err(MoveError::NotApplicable("tails and heads must be neighbors".into()));
                }
                g.remove_arrows(&[a, b]);
            }
            Move::R2Insert { tails, heads, sign } => {
                self.check_pos(tails, true)?;
                self.check_pos(heads, true)?;
                let label = self.next_label();
                let (a, b) = (g.arrows.len(), g.arrows.len() + 1);
                g.arrows.push(Arrow { label, sign });
                g.arrows.push(Arrow { label: label + 1, sign: -sign });
                let t = [Slot { arrow: a, end: End::Tail }, Slot { arrow: b, end: End::Tail }];
                let h = [Slot { arrow: a, end: End::Head }, Slot { arrow: b, end: End::Head }];
                // Insert the later position first so the earlier index stays valid.
                if tails.0 == heads.0 && heads.1 < tails.1 {
                    splice(&mut g.components[tails.0].slots, tails.1, &t);
                    splice(&mut g.components[heads.0].slots, heads.1, &h);
                } else {
                    splice(&mut g.components[heads.0].slots, heads.1, &h);
                    splice(&mut g.components[tails.0].slots, tails.1, &t);
                }
            }
            Move::R3(la, lb, lc) => {
                let (a, b, c) = (self.arrow_index(la)?, self.arrow_index(lb)?, self.arrow_index(lc)?);
                if !self.r3_ok(&at, a, b, c) {
                    return Err(MoveError::NotApplicable(format!("{} {} {} is not a flippable triangle", la, lb, lc)));
                }
                let swap = |g: &mut GaussDiagram, p: Pos, q: Pos| {
                    let s = &mut g.components[p.0].slots;
                    s.swap(p.1, q.1);
                };
                swap(&mut g, at[a].0, at[b].0);
                swap(&mut g, at[a].1, at[c].0);
                swap(&mut g, at[b].1, at[c].1);
            }
            Move::TailCommute(p) => {
                self.check_pos(p, false)?;
                self.check_pos((p.0, p.1 + 1), false)?;
                let s = &mut g.components[p.0].slots;
                if s[p.1].end != End::Tail || s[p.1 + 1].end != End::Tail {
                    return Err(MoveError::NotApplicable("both slots must be tails".into()));
                }
                s.swap(p.1, p.1 + 1);
            }
            Move::SelfVirtualize(l) => {
                let a = self.arrow_index(l)?;
                if at[a].0 .0 != at[a].1 .0 {
                    return Err(MoveError::NotApplicable(format!("{} joins two components", l)));
                }
                g.remove_arrows(&[a]);
            }
        }
        Ok(g)
    }

    pub fn apply_all(&self, moves: &[Move]) -> Result<GaussDiagram, MoveError> {
        let mut g = self.clone();
        for m in moves {
            g = g.apply(m)?;
        }
        Ok(g)
    }

    /// Every removal, triangle and tail-commute move that applies now.
    pub fn local_moves(&self, self_virtual: bool) -> Vec<Move> {
        let at = self.locate();
        let n = self.arrows.len();
        let mut out = Vec::new();
        for a in 0..n {
            let l = self.arrows[a].label;
            if adjacent(at[a].0, at[a].1) {
                out.push(Move::R1Remove(l));
            }
            if self_virtual && at[a].0 .0 == at[a].1 .0 {
                out.push(Move::SelfVirtualize(l));
            }
            for b in a + 1..n {
                if self.arrows[a].sign != self.arrows[b].sign
                    && adjacent(at[a].0, at[b].0)
                    && adjacent(at[a].1, at[b].1)
                {
                    out.push(Move::R2Remove(l, self.arrows[b].label));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !adjacent(at[a].0, at[b].0) {
                    continue;
                }
                for c in 0..n {
                    if self.r3_ok(&at, a, b, c) {
                        out.push(Move::R3(self.arrows[a].label, self.arrows[b].label, self.arrows[c].label));
                    }
                }
            }
        }
        for (c, comp) in self.components.iter().enumerate() {
            for p in 1..comp.slots.len() {
                if comp.slots[p - 1].end == End::Tail && comp.slots[p].end == End::Tail {
                    out.push(Move::TailCommute((c, p - 1)));
                }
            }
        }
        out
    }

    /// A random applicable move; insertions keep the diagram from shrinking away.
    pub fn random_move<R: Rng>(&self, rng: &mut R, self_virtual: bool) -> Move {
        let local = self.local_moves(self_virtual);
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let pos = |rng: &mut R| {
            let c = rng.gen_range(0..self.components.len());
            (c, rng.gen_range(0..=self.components[c].slots.len()))
        };
        match rng.gen_range(0..10) {
            0 => Move::R1Insert { pos: pos(rng), sign, tail_first: rng.gen_bool(0.5) },
            1 | 2 => Move::R2Insert { tails: pos(rng), heads: pos(rng), sign },
            // Triangles are rare among local moves, so they get their own share.
            3 | 4 if local.iter().any(|m| matches!(m, Move::R3(..))) => {
                local.iter().filter(|m| matches!(m, Move::R3(..))).collect::<Vec<_>>().choose(rng).map(|m| (*m).clone()).unwrap()
            }
            _ if !local.is_empty() => local.choose(rng).unwrap().clone(),
            _ => Move::R2Insert { tails: pos(rng), heads: pos(rng), sign },
        }
    }
}

fn splice(v: &mut Vec<Slot>, at: usize, items: &[Slot]) {
    for (k, s) in items.iter().enumerate() {
        v.insert(at + k, *s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::GaussDiagram;

    #[test]
    fn kink_round_trip() {
        let g = GaussDiagram::parse("O1+ U2+ / U1+ O2+").unwrap();
        let h = g.apply(&Move::R1Insert { pos: (0, 1), sign: -1, tail_first: false }).unwrap();
        assert_eq!(h.to_string(), "O1+ U3- O3- U2+ / U1+ O2+");
        assert_eq!(h.apply(&Move::R1Remove(3)).unwrap(), g);
    }

    #[test]
    fn bigon_round_trip() {
        let g = GaussDiagram::parse("O1+ U2+ / U1+ O2+").unwrap();
        let h = g.apply(&Move::R2Insert { tails: (0, 0), heads: (1, 2), sign: 1 }).unwrap();
        assert_eq!(h.to_string(), "O3+ O4- O1+ U2+ / U1+ O2+ U3+ U4-");
        assert_eq!(h.apply(&Move::R2Remove(3, 4)).unwrap(), g);
        let same = g.apply(&Move::R2Insert { tails: (0, 2), heads: (0, 0), sign: -1 }).unwrap();
        assert_eq!(same.to_string(), "U3- U4+ O1+ U2+ O3- O4+ / U1+ O2+");
    }

    #[test]
    fn moves_refuse_bad_input() {
        let g = GaussDiagram::parse("O1+ U2+ / U1+ O2+").unwrap();
        assert!(matches!(g.apply(&Move::R1Remove(1)), Err(MoveError::NotApplicable(_))));
        assert!(matches!(g.apply(&Move::R1Remove(9)), Err(MoveError::NoCrossing(9))));
        assert!(matches!(g.apply(&Move::SelfVirtualize(1)), Err(MoveError::NotApplicable(_))));
        assert!(matches!(g.apply(&Move::TailCommute((0, 0))), Err(MoveError::NotApplicable(_))));
    }

    #[test]
    fn script_round_trip() {
        let moves = vec![
            Move::R1Insert { pos: (0, 1), sign: -1, tail_first: true },
            Move::R2Insert { tails: (1, 0), heads: (0, 2), sign: 1 },
            Move::R3(1, 2, 3),
            Move::TailCommute((0, 4)),
            Move::SelfVirtualize(2),
            Move::R2Remove(4, 5),
            Move::R1Remove(7),
        ];
        let text: String = moves.iter().map(|m| format!("{}\n", m)).collect();
        assert_eq!(parse_script(&text).unwrap(), moves);
        assert!(matches!(parse_script("r9 1"), Err(MoveError::Script(1, _))));
    }
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cutmilnor::cdj;
use cutmilnor::chen::ChenContext;
use cutmilnor::diagram::{CrossingPath, CutDiagram, Step};
use cutmilnor::gauss::moves::Move;
use cutmilnor::gauss::GaussDiagram;
use cutmilnor::milnor::{milnor_number, InvariantTable, TableOptions};
use cutmilnor::spun::spun;
use cutmilnor::suite;
use cutmilnor::word::FreeWord;

fn random_link(seed: u64) -> GaussDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = rng.gen_range(2..=3);
    if rng.gen_bool(0.5) {
        let c = rng.gen_range(0..=7);
        GaussDiagram::random_classical(&mut rng, l, c)
    } else {
        let a = rng.gen_range(0..=6);
        GaussDiagram::random_welded(&mut rng, l, a)
    }
}

fn table(d: &CutDiagram, max_len: usize, seed: Option<u64>) -> InvariantTable {
    InvariantTable::compute(d, &TableOptions { max_len, seed, ..Default::default() }).unwrap()
}

fn divides(a: &BigInt, b: &BigInt) -> bool {
    if a.is_zero() {
        b.is_zero()
    } else {
        (b % a).is_zero()
    }
}

/// Order-preserving deletions of one index, with all rotations.
fn one_step_reductions(s: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 0..s.len() {
        let mut sub = s.to_vec();
        sub.remove(k);
        for r in 0..sub.len() {
            let mut rot = sub.clone();
            rot.rotate_left(r);
            out.push(rot);
        }
    }
    out
}

/// A path that wanders across random walls and comes back, then follows `p`.
fn detour(d: &CutDiagram, start: usize, p: &CrossingPath, rng: &mut ChaCha8Rng) -> CrossingPath {
    let mut out = Vec::new();
    let mut here = start;
    for _ in 0..rng.gen_range(0..4) {
        let options: Vec<Step> = d
            .walls
            .iter()
            .enumerate()
            .flat_map(|(w, wall)| {
                let mut v = Vec::new();
                if wall.from == here {
                    v.push(Step { wall: w, dir: 1 });
                }
                if wall.to == here {
                    v.push(Step { wall: w, dir: -1 });
                }
                v
            })
            .collect();
        if options.is_empty() {
            break;
        }
        let s = options[rng.gen_range(0..options.len())];
        here = d.walk(here, &CrossingPath::new(vec![s])).unwrap();
        out.push(s);
    }
    let back = CrossingPath::new(out.clone()).reversed();
    CrossingPath::new(out).then(&back).then(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gcd_consistency(seed in any::<u64>()) {
        let d = random_link(seed).to_cut_diagram();
        let t = table(&d, 3, None);
        for e in t.entries.values() {
            prop_assert!(divides(&e.nu, &e.delta) && divides(&e.nu, &e.m));
            prop_assert_eq!(&e.nu, &e.delta.gcd(&e.m));
            // Delta of a longer sequence divides Delta and m of its reductions.
            for r in one_step_reductions(&e.sequence).into_iter().filter(|r| !r.is_empty()) {
                let sub = t.entry(&r).unwrap();
                prop_assert!(divides(&e.delta, &sub.delta), "{:?} vs {:?}", e.sequence, r);
                prop_assert!(r.len() == 1 || divides(&e.delta, &sub.m));
            }
            // First non-vanishing values are integers.
            let shorter_vanish = one_step_reductions(&e.sequence).iter().all(|r| r.len() < 2 || t.entry(r).unwrap().m.is_zero());
            if shorter_vanish && e.sequence.len() >= 2 {
                let all_vanish = t.entries.values().filter(|x| x.sequence.len() < e.sequence.len()).filter(|x| {
                    x.sequence.iter().all(|i| e.sequence.contains(i))
                }).all(|x| x.m.is_zero());
                if all_vanish {
                    prop_assert!(e.delta.is_zero());
                }
            }
        }
    }

    #[test]
    fn road_networks_do_not_matter(seed in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let d = random_link(seed).to_cut_diagram();
        let x = table(&d, 3, Some(a));
        let y = table(&d, 3, Some(b));
        for (e, f) in x.ordered().iter().zip(y.ordered()) {
            prop_assert_eq!(&e.nu, &f.nu);
            prop_assert_eq!(&e.delta, &f.delta);
            prop_assert_eq!(x.milnor_map(&e.sequence).unwrap(), y.milnor_map(&f.sequence).unwrap());
        }
    }

    #[test]
    fn series_is_expanded_word(seed in any::<u64>(), q in 1usize..=4) {
        let d = random_link(seed).to_cut_diagram();
        let ctx = ChenContext::new(d.clone(), q, Some(seed)).unwrap();
        for (i, c) in d.components.iter().enumerate() {
            let w = d.normalized_word(i, &c.loops[0]);
            let direct = ctx.expand(&ctx.eta_word(&w).unwrap(), 4).unwrap();
            prop_assert_eq!(ctx.eta_series(&w, 4).unwrap(), direct);
            let once = ctx.eta_word(&w).unwrap();
            prop_assert_eq!(ctx.eta_word(&once).unwrap(), once);
        }
    }

    #[test]
    fn tail_commute_is_invisible(seed in any::<u64>()) {
        let g = random_link(seed);
        let before = cdj::emit(&g.to_cut_diagram());
        for mv in g.local_moves(false).into_iter().filter(|m| matches!(m, Move::TailCommute(_))) {
            prop_assert_eq!(&cdj::emit(&g.apply(&mv).unwrap().to_cut_diagram()), &before);
        }
    }

    #[test]
    fn reversed_path_inverts_word(seed in any::<u64>()) {
        let d = random_link(seed).to_cut_diagram();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (i, c) in d.components.iter().enumerate() {
            let p = detour(&d, c.base, &c.loops[0], &mut rng);
            prop_assert_eq!(d.raw_word(&p.reversed()), d.raw_word(&p).inverse());
            // Longitudes are homomorphic on based loops once read modulo Delta.
            let t = table(&d, 2, None);
            let ctx = ChenContext::new(d.clone(), 3, None).unwrap();
            let q = p.then(&c.loops[0]);
            for e in t.entries.values().filter(|e| e.sequence.last() == Some(&i) && e.sequence.len() >= 2) {
                let seq = &e.sequence[..e.sequence.len() - 1];
                let x = milnor_number(&ctx, &t, i, &p, seq).unwrap();
                let y = milnor_number(&ctx, &t, i, &c.loops[0], seq).unwrap();
                let z = milnor_number(&ctx, &t, i, &q, seq).unwrap();
                prop_assert_eq!(z, cutmilnor::milnor::Residue::new(&(&x.value + &y.value), &e.delta));
            }
        }
    }

    #[test]
    fn wirtinger_relations_abelianize(seed in any::<u64>()) {
        let d = random_link(seed).to_cut_diagram();
        let p = d.wirtinger_presentation();
        prop_assert_eq!(p.relators.len(), d.walls.len());
        for (r, w) in p.relators.iter().zip(&d.walls) {
            // B^-1 C^-1 A C: abelianizing leaves A - B, so A and B are identified.
            let ab = |x: cutmilnor::word::Symbol| x.0 as usize == w.from || x.0 as usize == w.to;
            prop_assert_eq!(r.word.exponent_sum(|x| x.0 as usize == w.from) + r.word.exponent_sum(|x| x.0 as usize == w.to), 0);
            prop_assert_eq!(r.word.exponent_sum(|x| !ab(x)), 0);
        }
    }

    #[test]
    fn spun_keeps_the_presentation(seed in any::<u64>()) {
        let d = random_link(seed).to_cut_diagram();
        let (s, _) = spun(&d);
        prop_assert_eq!(s.wirtinger_presentation().render(), d.wirtinger_presentation().render());
        let td = table(&d, 2, None);
        let ts = table(&s, 2, None);
        let (ss, _) = spun(&s);
        let tss = table(&ss, 2, None);
        for e in ts.ordered() {
            // The new loop is trivial, so its column of every Milnor map vanishes.
            let map = ts.milnor_map(&e.sequence).unwrap();
            prop_assert!(map.values.last().unwrap().is_zero());
            let orig = td.entry(&e.sequence).unwrap();
            prop_assert_eq!(&e.nu, &orig.nu);
            if orig.delta.is_zero() {
                prop_assert_eq!(&e.nu, &orig.loop_mu[0].abs());
            }
            prop_assert_eq!(&tss.entry(&e.sequence).unwrap().nu, &e.nu);
        }
        prop_assert_eq!(ss.components[0].loops.len(), d.components[0].loops.len() + 2);
    }
}

/// mu is additive on loops modulo Delta.
#[test]
fn additivity_on_tori() {
    for name in ["bead", "s3"] {
        let d = suite::example(name).unwrap().diagram;
        let t = table(&d, 2, None);
        let ctx = ChenContext::new(d.clone(), 3, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (i, c) in d.components.iter().enumerate() {
            let loops: Vec<CrossingPath> = c.loops.iter().flat_map(|p| [p.clone(), p.reversed()]).collect();
            if loops.is_empty() {
                continue;
            }
            for _ in 0..10 {
                let a = &loops[rng.gen_range(0..loops.len())];
                let b = &loops[rng.gen_range(0..loops.len())];
                for e in t.entries.values().filter(|e| e.sequence.last() == Some(&i)) {
                    let seq = &e.sequence[..e.sequence.len() - 1];
                    if seq.is_empty() {
                        continue;
                    }
                    let x = milnor_number(&ctx, &t, i, a, seq).unwrap();
                    let y = milnor_number(&ctx, &t, i, b, seq).unwrap();
                    let z = milnor_number(&ctx, &t, i, &a.then(b), seq).unwrap();
                    let sum = cutmilnor::milnor::Residue::new(&(&x.value + &y.value), &e.delta);
                    assert_eq!(z, sum, "{} {:?}", name, e.sequence);
                }
            }
        }
    }
}

/// Arcs that wander before reaching the boundary give the same residues.
#[test]
fn arc_residues_ignore_detours() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["borromeilhan", "x_1", "x_2", "x_3"] {
        let d = suite::example(name).unwrap().diagram;
        let t = table(&d, 3, None);
        let ctx = ChenContext::new(d.clone(), 4, None).unwrap();
        for (i, c) in d.components.iter().enumerate() {
            for arc in &c.arcs {
                let other = detour(&d, c.base, arc, &mut rng);
                for e in t.entries.values().filter(|e| e.sequence.last() == Some(&i) && e.sequence.len() >= 2) {
                    let seq = &e.sequence[..e.sequence.len() - 1];
                    let x = milnor_number(&ctx, &t, i, arc, seq).unwrap();
                    let y = milnor_number(&ctx, &t, i, &other, seq).unwrap();
                    let nu = cutmilnor::milnor::Residue::new(&(&x.value - &y.value), &e.nu);
                    assert!(nu.is_zero(), "{} {:?}", name, e.sequence);
                }
            }
        }
    }
}

/// Triangle moves on a braid where they are guaranteed to apply.
#[test]
fn triangle_moves_preserve_tables() {
    let mut applied = 0;
    for word in [[1, 2, 1], [-1, -2, -1], [2, 1, 2], [1, 2, -1]] {
        for open in [vec![], vec![0], vec![2]] {
            let mut full = word.to_vec();
            full.extend([2, 2, -1, 2]);
            let g = GaussDiagram::braid_closure(3, &full, &open);
            let before = table(&g.to_cut_diagram(), 3, None);
            for mv in g.local_moves(false).into_iter().filter(|m| matches!(m, Move::R3(..))) {
                let h = g.apply(&mv).unwrap();
                let after = table(&h.to_cut_diagram(), 3, None);
                for (e, f) in before.ordered().iter().zip(after.ordered()) {
                    assert_eq!((&e.nu, &e.delta), (&f.nu, &f.delta), "{} {}", g, mv);
                    let arcs_e: Vec<_> = e.arcs.iter().map(|a| a.nu.clone()).collect();
                    let arcs_f: Vec<_> = f.arcs.iter().map(|a| a.nu.clone()).collect();
                    assert_eq!(arcs_e, arcs_f);
                }
                applied += 1;
            }
        }
    }
    assert!(applied > 0);
}

#[test]
fn detours_reduce_away() {
    let d = suite::example("bead").unwrap().diagram;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = &d.components[2];
    let p = detour(&d, c.base, &c.loops[0], &mut rng);
    assert_eq!(d.raw_word(&p).reduce(), d.raw_word(&c.loops[0]).reduce());
    assert_eq!(FreeWord::identity().len(), 0);
}

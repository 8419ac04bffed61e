//! Spinning a cut-diagram around a hyperplane.

use crate::diagram::{CrossingPath, CutDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpunKind {
    /// Closed component: gains a trivial loop for the new circle factor.
    Product,
    /// Component with boundary: the boundary collapses and it closes up.
    Capped,
}

/// Output component k comes from input component k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub kinds: Vec<SpunKind>,
}

/// Same regions and walls one dimension up. Closed components keep their
/// loops and get an empty one; bounded components lose their arcs and close.
pub fn spun(d: &CutDiagram) -> (CutDiagram, Provenance) {
    let mut out = d.clone();
    out.dimension = d.dimension.raised();
    let mut kinds = Vec::new();
    for c in out.components.iter_mut() {
        if c.closed {
            let k = c.loops.len();
            c.loops.push(CrossingPath::empty());
            let mut basis = c.h1_basis.clone().unwrap_or_default();
            basis.push(k);
            c.h1_basis = Some(basis);
            kinds.push(SpunKind::Product);
        } else {
            c.closed = true;
            c.boundary_count = 0;
            c.boundary_regions.clear();
            c.arcs.clear();
            if c.h1_basis.is_none() {
                c.h1_basis = Some(Vec::new());
            }
            kinds.push(SpunKind::Capped);
        }
    }
    (out, Provenance { kinds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Dimension;
    use crate::gauss::GaussDiagram;

    #[test]
    fn torus_and_sphere() {
        let g = GaussDiagram::braid_closure(2, &[1, 1], &[1]);
        let d = g.to_cut_diagram();
        let (s, p) = spun(&d);
        assert_eq!(s.dimension, Dimension::Known(2));
        assert_eq!(p.kinds, vec![SpunKind::Product, SpunKind::Capped]);
        assert!(s.validate().is_ok(), "{}", s.validate());
        assert_eq!(s.components[0].loops.len(), 2);
        assert_eq!(s.components[0].h1_basis, Some(vec![0, 1]));
        assert!(s.components[1].loops.is_empty() && s.components[1].arcs.is_empty());
        assert_eq!(s.walls, d.walls);
        assert_eq!(s.regions, d.regions);
    }
}

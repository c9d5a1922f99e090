use std::sync::Arc;

use super::{for_each_tuple, Elem, OrderedAlgebra};
use crate::error::{Error, Result};
use crate::relation::BitRel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    pub dom: Arc<OrderedAlgebra>,
    pub cod: Arc<OrderedAlgebra>,
    pub map: Vec<Elem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomCheck {
    pub is_hom: bool,
    pub is_monotone: bool,
    pub is_order_embedding: bool,
}

impl Homomorphism {
    pub fn new(dom: Arc<OrderedAlgebra>, cod: Arc<OrderedAlgebra>, map: Vec<Elem>) -> Result<Self> {
        if map.len() != dom.size() || map.iter().any(|&b| b >= cod.size()) {
            return Err(Error::Validation("map is not a total function between the carriers".into()));
        }
        Ok(Homomorphism { dom, cod, map })
    }

    pub fn identity(a: Arc<OrderedAlgebra>) -> Self {
        let map = (0..a.size()).collect();
        Homomorphism { dom: a.clone(), cod: a, map }
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        self.map[a]
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Homomorphism) -> Homomorphism {
        Homomorphism { dom: self.dom.clone(), cod: other.cod.clone(), map: self.map.iter().map(|&a| other.map[a]).collect() }
    }

    pub fn commutes_with_operations(&self) -> bool {
        let (a, b) = (&self.dom, &self.cod);
        if a.sig().constants().any(|c| self.map[a.const_val(c)] != b.const_val(c)) {
            return false;
        }
        let mut ok = true;
        for (f, k) in a.sig().operations() {
            let mut img = vec![0; k];
            for_each_tuple(a.size(), k, |args| {
                if !ok {
                    return;
                }
                for (slot, &x) in img.iter_mut().zip(args) {
                    *slot = self.map[x];
                }
                ok = self.map[a.apply(f, args)] == b.apply(f, &img);
            });
            if !ok {
                return false;
            }
        }
        true
    }

    pub fn is_monotone(&self) -> bool {
        self.dom.order().pairs().all(|(x, y)| self.cod.leq(self.map[x], self.map[y]))
    }

    pub fn check(&self) -> HomCheck {
        let is_hom = self.commutes_with_operations();
        let is_monotone = self.is_monotone();
        let n = self.dom.size();
        let reflects = (0..n).all(|x| (0..n).all(|y| !self.cod.leq(self.map[x], self.map[y]) || self.dom.leq(x, y)));
        HomCheck { is_hom, is_monotone, is_order_embedding: is_monotone && reflects }
    }

    pub fn image(&self) -> Vec<Elem> {
        let mut img = self.map.clone();
        img.sort_unstable();
        img.dedup();
        img
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.cod.size()
    }

    pub(crate) fn require_hom(&self) -> Result<()> {
        let c = self.check();
        if !c.is_hom || !c.is_monotone {
            return Err(Error::NotAHomomorphism(format!(
                "map {} -> {} (commutes: {}, monotone: {})",
                self.dom.name(),
                self.cod.name(),
                c.is_hom,
                c.is_monotone
            )));
        }
        Ok(())
    }
}

/// `{(a, b) : h(a) <= h(b)}`.
pub fn directed_kernel(h: &Homomorphism) -> Result<BitRel> {
    h.require_hom()?;
    let n = h.dom.size();
    Ok(BitRel::from_pairs(n, (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|&(a, b)| h.cod.leq(h.map[a], h.map[b]))))
}

/// `ker h` as the symmetric part of the directed kernel.
pub fn kernel(h: &Homomorphism) -> Result<BitRel> {
    let k = directed_kernel(h)?;
    Ok(k.intersection(&k.inverse()))
}

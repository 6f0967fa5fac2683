//! Finite jet spaces `O/(I + m^K)` realized as exact linear algebra.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::germ::{ExponentPair, Germ, Order};

/// The image of an ideal in `O/m^K`, kept in reduced row echelon form.
///
/// Columns are the monomials of degree `< K` in descending graded-lex order;
/// each row's pivot is its greatest monomial, carries coefficient 1, and no
/// pivot monomial occurs in any other row.
#[derive(Clone, Debug)]
pub struct JetSpace {
    order: u32,
    rows: BTreeMap<ExponentPair, Germ>,
}

impl JetSpace {
    pub fn empty(order: u32) -> Self {
        Self {
            order,
            rows: BTreeMap::new(),
        }
    }

    /// Span of `{μ·g : g ∈ gens, μ monomial}` modulo `m^K`.
    pub fn of_generators(gens: &[Germ], order: u32) -> Self {
        assert!(order >= 1, "jet order must be positive");
        let mut js = Self::empty(order);
        for g in gens {
            let Order::Finite(o) = g.order() else { continue };
            if o >= order {
                continue;
            }
            let g = g.truncate_below(order);
            for d in 0..order - o {
                for m in ExponentPair::of_degree(d) {
                    js.insert(g.shift(m).truncate_below(order));
                }
            }
        }
        js
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of monomials of degree `< K`.
    pub fn ambient_dim(&self) -> usize {
        let k = self.order as usize;
        k * (k + 1) / 2
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `dim O/(I + m^K)`
    pub fn quotient_dim(&self) -> usize {
        self.ambient_dim() - self.rank()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&ExponentPair, &Germ)> {
        self.rows.iter().rev()
    }

    /// Monomials spanning the quotient, ascending.
    pub fn standard_monomials(&self) -> Vec<ExponentPair> {
        let mut v: Vec<_> = ExponentPair::below_degree(self.order)
            .into_iter()
            .filter(|m| !self.rows.contains_key(m))
            .collect();
        v.reverse();
        v
    }

    fn reduce_in_place(&self, v: &mut Germ) {
        let hits: Vec<ExponentPair> = v
            .terms()
            .map(|(e, _)| *e)
            .filter(|e| self.rows.contains_key(e))
            .collect();
        for p in hits {
            let c = v.coeff(p);
            if !c.is_zero() {
                *v = &*v - &self.rows[&p].scale(&c);
            }
        }
    }

    /// Normal form of `f` modulo `I + m^K`: a combination of standard monomials.
    pub fn normal_form(&self, f: &Germ) -> Germ {
        let mut v = f.truncate_below(self.order);
        self.reduce_in_place(&mut v);
        v
    }

    pub fn contains(&self, f: &Germ) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Adds a vector (already truncated below `K`) to the span; returns
    /// whether the rank grew.
    pub fn insert(&mut self, mut v: Germ) -> bool {
        self.reduce_in_place(&mut v);
        let Some((pivot, _)) = v.leading_term() else {
            return false;
        };
        let v = v.monic();
        for row in self.rows.values_mut() {
            let c = row.coeff(pivot);
            if !c.is_zero() {
                *row = &*row - &v.scale(&c);
            }
        }
        self.rows.insert(pivot, v);
        true
    }
}

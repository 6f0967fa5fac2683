//! Ideals of the local ring `O_{C²,0}` generated by polynomial germs.
//!
//! Every nonzero ideal here factors as `g · H` with `g` a polynomial whose
//! irreducible factors all pass through the origin (the local gcd) and `H`
//! an ideal with unit local gcd. Such an `H` is either the unit ideal or has
//! finite colength, so it is decided exactly by jets of stabilized order.

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::germ::{ExponentPair, Germ, Order, Var};
use crate::jets::JetSpace;
use crate::poly_gcd::{divide_exact, global_squarefree_part, poly_gcd_all};

/// Default jet-order cap for colength stabilization.
pub const DEFAULT_JET_CAP: u32 = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error("ideal has no nonzero generator")]
    ZeroIdeal,
}

/// `dim_C O/I`, or why it is not a number.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Colength {
    Finite(usize),
    /// The zero set contains a curve through the origin.
    Infinite,
    /// Jets did not stabilize before the cap.
    Undetermined,
}

impl Colength {
    pub fn finite(self) -> Option<usize> {
        match self {
            Colength::Finite(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Colength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Colength::Finite(s) => write!(f, "{s}"),
            Colength::Infinite => write!(f, "infinite"),
            Colength::Undetermined => write!(f, "undetermined"),
        }
    }
}

#[derive(Clone, Debug)]
struct Decomposition {
    local_gcd: Germ,
    cofactors: Vec<Germ>,
    cofactor_is_unit: bool,
}

/// Stabilized jets of the cofactor ideal: `m^K ⊆ H` at this order.
#[derive(Clone, Debug)]
pub struct Stabilized {
    pub colength: usize,
    pub jets: JetSpace,
}

/// A finitely generated ideal of `O_{C²,0}` with lazily filled caches.
#[derive(Clone)]
pub struct LocalIdeal {
    generators: Vec<Germ>,
    decomposition: OnceLock<Decomposition>,
    stabilized: OnceLock<Stabilized>,
}

impl LocalIdeal {
    /// Zero generators are dropped and exact duplicates removed.
    pub fn new(generators: Vec<Germ>) -> Result<Self, IdealError> {
        let mut gens: Vec<Germ> = Vec::with_capacity(generators.len());
        for g in generators {
            if !g.is_zero() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        if gens.is_empty() {
            return Err(IdealError::ZeroIdeal);
        }
        Ok(Self {
            generators: gens,
            decomposition: OnceLock::new(),
            stabilized: OnceLock::new(),
        })
    }

    pub fn unit() -> Self {
        Self::new(vec![Germ::one()]).expect("nonzero")
    }

    pub fn maximal() -> Self {
        Self::new(vec![Germ::var(Var::Z1), Germ::var(Var::Z2)]).expect("nonzero")
    }

    pub fn generators(&self) -> &[Germ] {
        &self.generators
    }

    /// Some generator does not vanish at the origin.
    pub fn is_unit_ideal(&self) -> bool {
        self.generators.iter().any(Germ::is_unit)
    }

    fn decomposition(&self) -> &Decomposition {
        self.decomposition.get_or_init(|| {
            let g = local_part(&poly_gcd_all(&self.generators));
            let cofactors: Vec<Germ> = self
                .generators
                .iter()
                .map(|f| divide_exact(f, &g).expect("local gcd divides every generator"))
                .collect();
            let cofactor_is_unit = cofactors.iter().any(Germ::is_unit);
            Decomposition {
                local_gcd: g,
                cofactors,
                cofactor_is_unit,
            }
        })
    }

    /// Local gcd of the generators with unit factors stripped (monic; `1` if trivial).
    pub fn local_gcd(&self) -> &Germ {
        &self.decomposition().local_gcd
    }

    /// Generators divided by the local gcd; their local gcd is a unit.
    pub fn cofactor_generators(&self) -> &[Germ] {
        &self.decomposition().cofactors
    }

    /// Jets of the cofactor ideal at stabilized order, computed once.
    ///
    /// `None` if the cofactor is the unit ideal or did not stabilize by `cap`.
    pub fn stabilized_cofactor(&self, cap: u32) -> Option<&Stabilized> {
        let dec = self.decomposition();
        if dec.cofactor_is_unit {
            return None;
        }
        if let Some(s) = self.stabilized.get() {
            return Some(s);
        }
        let s = stabilize(&dec.cofactors, cap)?;
        Some(self.stabilized.get_or_init(|| s))
    }

    pub fn stabilized_jet_order(&self) -> Option<u32> {
        self.stabilized.get().map(|s| s.jets.order())
    }

    /// `dim_C O/I`.
    pub fn colength(&self, cap: u32) -> Colength {
        let dec = self.decomposition();
        if !dec.local_gcd.is_one() {
            return Colength::Infinite;
        }
        if dec.cofactor_is_unit {
            return Colength::Finite(0);
        }
        match self.stabilized_cofactor(cap) {
            Some(s) => Colength::Finite(s.colength),
            None => Colength::Undetermined,
        }
    }

    /// Decides `f ∈ I`; `None` when the cofactor's jets did not stabilize by `cap`.
    pub fn contains(&self, f: &Germ, cap: u32) -> Option<bool> {
        if f.is_zero() {
            return Some(true);
        }
        let dec = self.decomposition();
        let Some(q) = divide_exact(f, &dec.local_gcd) else {
            return Some(false);
        };
        if dec.cofactor_is_unit {
            return Some(true);
        }
        let s = self.stabilized_cofactor(cap)?;
        Some(s.jets.contains(&q))
    }

    /// Every generator of `other` lies in `self`.
    pub fn contains_ideal(&self, other: &LocalIdeal, cap: u32) -> Option<bool> {
        for g in other.generators() {
            if !self.contains(g, cap)? {
                return Some(false);
            }
        }
        Some(true)
    }

    /// Equality as ideals, by mutual generator membership.
    pub fn same_ideal(&self, other: &LocalIdeal, cap: u32) -> Option<bool> {
        Some(self.contains_ideal(other, cap)? && other.contains_ideal(self, cap)?)
    }

    /// The radical in `O_{C²,0}`.
    ///
    /// With trivial local gcd the zero set is at most the origin, so the
    /// radical is `⟨1⟩` or `m`; otherwise it is generated by the reduced
    /// local gcd.
    pub fn radical(&self) -> LocalIdeal {
        let dec = self.decomposition();
        if dec.local_gcd.is_one() {
            if dec.cofactor_is_unit {
                LocalIdeal::unit()
            } else {
                LocalIdeal::maximal()
            }
        } else {
            LocalIdeal::new(vec![global_squarefree_part(&dec.local_gcd)]).expect("nonzero")
        }
    }

    /// Smallest `m ≤ cap` with `f^m ∈ I`.
    pub fn effective_exponent(&self, f: &Germ, cap: u32) -> Option<u32> {
        let mut power = Germ::one();
        for m in 1..=cap {
            power = &power * f;
            match self.contains(&power, cap) {
                Some(true) => {
                    if let Colength::Finite(s) = self.colength(cap) {
                        assert!(
                            m as usize <= s.max(1),
                            "effective exponent {m} exceeds colength {s}"
                        );
                    }
                    return Some(m);
                }
                Some(false) => {}
                None => return None,
            }
        }
        None
    }
}

impl fmt::Debug for LocalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LocalIdeal{self}")
    }
}

impl fmt::Display for LocalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">")
    }
}

/// Raises the jet order until `dim O/(H + m^K)` repeats; by Nakayama the
/// repeated value is exact and `m^K ⊆ H`.
fn stabilize(gens: &[Germ], cap: u32) -> Option<Stabilized> {
    let mut prev: Option<usize> = None;
    for k in 1..=cap.max(2) {
        let jets = JetSpace::of_generators(gens, k);
        let d = jets.quotient_dim();
        if prev == Some(d) {
            return Some(Stabilized { colength: d, jets });
        }
        prev = Some(d);
    }
    None
}

/// Jet space of an ideal at a fixed order.
pub fn jet_basis(ideal: &LocalIdeal, order: u32) -> JetSpace {
    JetSpace::of_generators(ideal.generators(), order)
}

/// `dim_C O/I`, see [`LocalIdeal::colength`].
pub fn colength(ideal: &LocalIdeal, cap: u32) -> Colength {
    ideal.colength(cap)
}

pub fn membership(f: &Germ, ideal: &LocalIdeal, cap: u32) -> Option<bool> {
    ideal.contains(f, cap)
}

pub fn radical(ideal: &LocalIdeal) -> LocalIdeal {
    ideal.radical()
}

pub fn effective_exponent(f: &Germ, ideal: &LocalIdeal, cap: u32) -> Option<u32> {
    ideal.effective_exponent(f, cap)
}

/// Polynomial gcd of `gens` with every irreducible factor that does not
/// vanish at the origin removed.
pub fn local_gcd(gens: &[Germ]) -> Germ {
    local_part(&poly_gcd_all(gens))
}

/// Product of the distinct irreducible factors of `g` that vanish at the origin.
pub fn squarefree_part(g: &Germ) -> Germ {
    local_part(&global_squarefree_part(g))
}

/// The divisor `h` of `g` with `g/h` a local unit and every irreducible
/// factor of `h` vanishing at the origin (monic).
///
/// `h` is the nonzero polynomial of least degree in `⟨g⟩O ∩ C[z1,z2]`. It is
/// searched for in the jet spaces of `⟨g⟩` at increasing order; each
/// candidate is certified by exact division, and spurious jet-level
/// solutions disappear once the order exceeds `deg(g)²`.
pub fn local_part(g: &Germ) -> Germ {
    if g.is_zero() {
        return Germ::zero();
    }
    if g.is_unit() {
        return Germ::one();
    }
    let (Order::Finite(o), Some(deg)) = (g.order(), g.total_degree()) else {
        unreachable!("nonzero germ")
    };
    // homogeneous polynomials factor into homogeneous, hence non-unit, pieces
    if o == deg {
        return g.monic();
    }
    for n in deg + 1..=deg * deg + 2 {
        let jets = JetSpace::of_generators(std::slice::from_ref(g), n);
        match least_degree_kernel(&jets, o, deg) {
            Some(h) => {
                if let Some(q) = divide_exact(g, &h) {
                    if q.is_unit() {
                        return h.monic();
                    }
                }
            }
            None => continue,
        }
    }
    g.monic()
}

/// Kernel of `h ↦ NF(h)` on polynomials of degree `≤ d` for the least `d`
/// in `lo..=hi` where it is nonzero; `Some` only when that kernel is one
/// dimensional.
fn least_degree_kernel(jets: &JetSpace, lo: u32, hi: u32) -> Option<Germ> {
    // pivot monomial of the reduced image -> (image, preimage)
    let mut rows: std::collections::BTreeMap<ExponentPair, (Germ, Germ)> = Default::default();
    let mut kernel: Vec<Germ> = Vec::new();
    for d in 0..=hi {
        for mono in ExponentPair::of_degree(d).rev() {
            let mut pre = Germ::monomial(mono.e1, mono.e2);
            let mut img = jets.normal_form(&pre);
            loop {
                let Some((lead, c)) = img.leading_term() else {
                    kernel.push(pre);
                    break;
                };
                match rows.get(&lead) {
                    Some((ri, rp)) => {
                        let c = c.clone();
                        img = &img - &ri.scale(&c);
                        pre = &pre - &rp.scale(&c);
                    }
                    None => {
                        let inv = c.inv().expect("nonzero");
                        rows.insert(lead, (img.scale(&inv), pre.scale(&inv)));
                        break;
                    }
                }
            }
        }
        if d >= lo && !kernel.is_empty() {
            return (kernel.len() == 1).then(|| kernel.pop().expect("one element"));
        }
    }
    None
}

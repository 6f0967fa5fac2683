//! Intersection multiplicity through a generic linear projection: shear the
//! pair so that projecting to the `z1` axis is proper near the origin, then
//! read the multiplicity off the order of the `z2`-resultant at `z1 = 0`.
//!
//! Generic choices come from a seeded ChaCha8 stream and are verified after
//! the fact, so every result can be replayed.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::germ::{ExponentPair, Germ, Order};
use crate::local::{local_part, Colength, LocalIdeal};
use crate::poly_gcd::{divide_exact, poly_gcd, to_z2_layout};
use crate::upoly::UPoly;

pub const DEFAULT_RETRY_CAP: u32 = 16;

const SHEAR_STREAM: u64 = 1;
const PAIR_STREAM: u64 = 2;
/// Coefficients of generic combinations are drawn from `-R..=R`.
const PAIR_COEFF_RANGE: i64 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("germs share a component through the origin: colength is infinite")]
    InfiniteColength,
    #[error("colength did not stabilize within the jet cap")]
    Undetermined,
    #[error("no proper projection found after {0} shears")]
    RetryCapExceeded(u32),
    #[error("need at least two germs, got {0}")]
    TooFewGerms(usize),
    #[error("zero germ")]
    ZeroGerm,
}

/// The linear change of coordinates `(z1, z2) ↦ (a z1 + b z2, c z1 + d z2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shear {
    pub a: GaussianRational,
    pub b: GaussianRational,
    pub c: GaussianRational,
    pub d: GaussianRational,
}

impl Shear {
    /// `None` if the determinant vanishes.
    pub fn new(
        a: GaussianRational,
        b: GaussianRational,
        c: GaussianRational,
        d: GaussianRational,
    ) -> Option<Self> {
        let s = Self { a, b, c, d };
        (!s.det().is_zero()).then_some(s)
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1).expect("invertible")
    }

    pub fn det(&self) -> GaussianRational {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn inverse(&self) -> Self {
        let inv = self.det().inv().expect("invertible shear");
        Self {
            a: &self.d * &inv,
            b: &(-&self.b) * &inv,
            c: &(-&self.c) * &inv,
            d: &self.a * &inv,
        }
    }

    /// The germ `f ∘ shear`.
    pub fn apply(&self, f: &Germ) -> Germ {
        f.linear_substitute(&self.a, &self.b, &self.c, &self.d)
    }

    /// Entries drawn uniformly from `-bound..=bound` until the determinant is nonzero.
    fn random(rng: &mut ChaCha8Rng, bound: i64) -> Self {
        loop {
            let mut draw = || GaussianRational::from_integer(rng.gen_range(-bound..=bound));
            if let Some(s) = Self::new(draw(), draw(), draw(), draw()) {
                return s;
            }
        }
    }
}

/// Determinant of the Sylvester matrix of `f` and `g` viewed in `Q(i)[z1][z2]`.
///
/// A factor of `z2`-degree zero contributes its power: `Res(a, g) = a^deg g`.
pub fn resultant_z2(f: &Germ, g: &Germ) -> UPoly {
    if f.is_zero() || g.is_zero() {
        return UPoly::zero();
    }
    let fr = to_z2_layout(f);
    let gr = to_z2_layout(g);
    let m = fr.len() - 1;
    let n = gr.len() - 1;
    if m == 0 {
        return fr[0].pow(n);
    }
    if n == 0 {
        return gr[0].pow(m);
    }
    let size = m + n;
    let mut mat = vec![vec![UPoly::zero(); size]; size];
    for r in 0..n {
        for (k, c) in fr.iter().rev().enumerate() {
            mat[r][r + k] = c.clone();
        }
    }
    for r in 0..m {
        for (k, c) in gr.iter().rev().enumerate() {
            mat[n + r][r + k] = c.clone();
        }
    }
    bareiss_det(mat)
}

/// Fraction-free Gaussian elimination over `Q(i)[z1]`.
fn bareiss_det(mut mat: Vec<Vec<UPoly>>) -> UPoly {
    let n = mat.len();
    let mut sign_flip = false;
    let mut prev = UPoly::one();
    for k in 0..n {
        if mat[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !mat[i][k].is_zero()) else {
                return UPoly::zero();
            };
            mat.swap(k, swap);
            sign_flip = !sign_flip;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&mat[k][k] * &mat[i][j]) - &(&mat[i][k] * &mat[k][j]);
                mat[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
        }
        prev = mat[k][k].clone();
    }
    let det = mat[n - 1][n - 1].clone();
    if sign_flip {
        -&det
    } else {
        det
    }
}

/// The lowest-order homogeneous part of `f` contains `z2^ord(f)`.
pub fn is_z2_general(f: &Germ) -> bool {
    match f.order() {
        Order::Finite(d) => !f.coeff(ExponentPair::new(0, d)).is_zero(),
        Order::Infinite => false,
    }
}

/// Checks that projecting `V(f) ∩ V(g)` to the `z1` axis sees only the origin
/// over `z1 = 0`, so the resultant's order at 0 is the local multiplicity:
/// both germs are `z2`-general, one has constant leading coefficient in
/// `z2`, and the restrictions to `z1 = 0` share no root other than 0.
pub fn projection_is_proper(f: &Germ, g: &Germ) -> bool {
    if !is_z2_general(f) || !is_z2_general(g) {
        return false;
    }
    let monic_in_z2 = |h: &Germ| {
        to_z2_layout(h)
            .last()
            .is_some_and(|lc| lc.degree() == Some(0))
    };
    if !monic_in_z2(f) && !monic_in_z2(g) {
        return false;
    }
    let common = UPoly::new(f.restrict_z1_zero()).gcd(&UPoly::new(g.restrict_z1_zero()));
    match common.degree() {
        None => false,
        Some(k) => common.order_at_zero() == Some(k),
    }
}

/// Result of [`multiplicity_via_projection`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionOutcome {
    pub multiplicity: usize,
    pub shear: Shear,
    /// 1-based index of the accepted shear in the seeded sequence.
    pub attempts: u32,
}

/// `dim O/⟨f, g⟩` as `ord_{z1=0} Res_{z2}(f∘A, g∘A)` for a verified shear `A`.
pub fn multiplicity_via_projection(
    f: &Germ,
    g: &Germ,
    seed: u64,
    retry_cap: u32,
) -> Result<ProjectionOutcome, ProjectionError> {
    if f.is_zero() || g.is_zero() {
        return Err(ProjectionError::ZeroGerm);
    }
    let common = poly_gcd(f, g);
    if !local_part(&common).is_one() {
        return Err(ProjectionError::InfiniteColength);
    }
    // a common factor that is a local unit does not change the local ideal
    let f = divide_exact(f, &common).expect("gcd divides");
    let g = divide_exact(g, &common).expect("gcd divides");

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SHEAR_STREAM);
    for attempt in 0..retry_cap {
        let shear = Shear::random(&mut rng, 2 * i64::from(attempt) + 1);
        let fs = shear.apply(&f);
        let gs = shear.apply(&g);
        if !projection_is_proper(&fs, &gs) {
            continue;
        }
        let res = resultant_z2(&fs, &gs);
        let Some(ord) = res.order_at_zero() else {
            continue;
        };
        return Ok(ProjectionOutcome {
            multiplicity: ord,
            shear,
            attempts: attempt + 1,
        });
    }
    Err(ProjectionError::RetryCapExceeded(retry_cap))
}

/// Two generic linear combinations of the input germs.
#[derive(Clone, Debug)]
pub struct GenericPair {
    pub alpha: Vec<GaussianRational>,
    pub beta: Vec<GaussianRational>,
    pub f: Germ,
    pub g: Germ,
    /// `dim O/⟨f, g⟩` from jets.
    pub colength: usize,
    /// `dim O/⟨F⟩`, a lower bound for `colength`.
    pub ideal_colength: usize,
    /// Multiplicity of the pair through the projection route, if it succeeded.
    pub projection: Option<ProjectionOutcome>,
    pub draws: u32,
}

impl GenericPair {
    /// The pair passed the properness check and both routes agree.
    pub fn verified_proper(&self) -> bool {
        self.projection
            .as_ref()
            .is_some_and(|p| p.multiplicity == self.colength)
    }
}

fn draw_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..n)
            .map(|_| rng.gen_range(-PAIR_COEFF_RANGE..=PAIR_COEFF_RANGE))
            .collect();
        if v.iter().any(|x| *x != 0) {
            return v;
        }
    }
}

/// Coefficient vectors, the two combinations and their colength.
type Candidate = (Vec<i64>, Vec<i64>, Germ, Germ, usize);

fn combine(coeffs: &[i64], germs: &[Germ]) -> Germ {
    coeffs
        .iter()
        .zip(germs)
        .fold(Germ::zero(), |acc, (c, g)| &acc + &g.scale(&GaussianRational::from_integer(*c)))
}

/// Draws up to `retry_cap` seeded pairs of combinations and keeps the one with
/// least finite colength, stopping early if it reaches `dim O/⟨F⟩`.
pub fn generic_pair(
    germs: &[Germ],
    seed: u64,
    retry_cap: u32,
    jet_cap: u32,
) -> Result<GenericPair, ProjectionError> {
    if germs.len() < 2 {
        return Err(ProjectionError::TooFewGerms(germs.len()));
    }
    let ideal = LocalIdeal::new(germs.to_vec()).map_err(|_| ProjectionError::ZeroGerm)?;
    let ideal_colength = match ideal.colength(jet_cap) {
        Colength::Finite(s) => s,
        Colength::Infinite => return Err(ProjectionError::InfiniteColength),
        Colength::Undetermined => return Err(ProjectionError::Undetermined),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(PAIR_STREAM);
    let mut best: Option<Candidate> = None;
    let mut draws = 0;
    for _ in 0..retry_cap {
        draws += 1;
        let a = draw_vector(&mut rng, germs.len());
        let b = draw_vector(&mut rng, germs.len());
        let f = combine(&a, germs);
        let g = combine(&b, germs);
        if f.is_zero() || g.is_zero() {
            continue;
        }
        let pair = LocalIdeal::new(vec![f.clone(), g.clone()]).expect("nonzero generators");
        if let Colength::Finite(e) = pair.colength(jet_cap) {
            assert!(
                e >= ideal_colength,
                "pair colength {e} below ideal colength {ideal_colength}"
            );
            if best.as_ref().is_none_or(|b| e < b.4) {
                best = Some((a, b, f, g, e));
            }
            if e == ideal_colength {
                break;
            }
        }
    }
    let (a, b, f, g, e) = best.ok_or(ProjectionError::RetryCapExceeded(retry_cap))?;
    let projection = multiplicity_via_projection(&f, &g, seed, retry_cap).ok();
    let to_gq = |v: Vec<i64>| v.into_iter().map(GaussianRational::from_integer).collect();
    Ok(GenericPair {
        alpha: to_gq(a),
        beta: to_gq(b),
        f,
        g,
        colength: e,
        ideal_colength,
        projection,
        draws,
    })
}

/// Applies `z ↦ Az` to each germ.
pub fn substitute_all(germs: &[Germ], shear: &Shear) -> Vec<Germ> {
    germs.iter().map(|g| shear.apply(g)).collect()
}

impl Default for Shear {
    fn default() -> Self {
        Self::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_germ;

    fn g(s: &str) -> Germ {
        parse_germ(s).unwrap()
    }

    fn upoly_z1(terms: &[(i64, usize)]) -> UPoly {
        let deg = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut v = vec![GaussianRational::zero(); deg + 1];
        for &(c, k) in terms {
            v[k] = GaussianRational::from_integer(c);
        }
        UPoly::new(v)
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant_z2(&g("z1^2"), &g("z2^3")), upoly_z1(&[(1, 6)]));
        assert!(resultant_z2(&g("z2 - z1"), &g("z2 - z1")).is_zero());
        let r = resultant_z2(&g("z2"), &g("z2 - z1"));
        assert!(r == upoly_z1(&[(1, 1)]) || r == upoly_z1(&[(-1, 1)]));
    }

    /// Resultant vanishes at `z1 = t` exactly when the specializations share a root.
    #[test]
    fn resultant_of_specialization() {
        // f = z2^2 - z1, g = z2 - 1: Res = 1 - z1 up to sign
        let r = resultant_z2(&g("z2^2 - z1"), &g("z2 - 1"));
        assert!(r == upoly_z1(&[(1, 0), (-1, 1)]) || r == upoly_z1(&[(-1, 0), (1, 1)]));
    }

    #[test]
    fn z2_generality() {
        assert!(!is_z2_general(&g("z2^3 + z1*z2")));
        assert!(is_z2_general(&g("z2^2 + z1^3")));
        assert!(!is_z2_general(&g("z1")));
    }

    #[test]
    fn projection_examples() {
        assert_eq!(multiplicity_via_projection(&g("z1^2"), &g("z2^3"), 0, 16).unwrap().multiplicity, 6);
        assert_eq!(multiplicity_via_projection(&g("z1"), &g("z2"), 0, 16).unwrap().multiplicity, 1);
        assert_eq!(
            multiplicity_via_projection(&g("z1*z2"), &g("z1"), 0, 16),
            Err(ProjectionError::InfiniteColength)
        );
    }

    #[test]
    fn common_unit_factor_is_ignored() {
        let out = multiplicity_via_projection(&g("(1+z1)*z1^2"), &g("(1+z1)*z2^3"), 3, 16).unwrap();
        assert_eq!(out.multiplicity, 6);
    }

    #[test]
    fn far_intersections_are_excluded() {
        // the circle and the line meet at the origin and at (2, 0)
        let f = g("z1^2 + z2^2 - 2*z1");
        let h = g("z2");
        for seed in 0..5 {
            assert_eq!(multiplicity_via_projection(&f, &h, seed, 16).unwrap().multiplicity, 1);
        }
    }

    #[test]
    fn shear_inverse() {
        let s = Shear::from_ints(2, 1, -1, 3).unwrap();
        let f = g("z1^3 - 2*z1*z2 + z2^2");
        assert_eq!(s.inverse().apply(&s.apply(&f)), f);
        assert!(Shear::from_ints(1, 2, 2, 4).is_none());
    }

    #[test]
    fn generic_pair_examples() {
        let p = generic_pair(&[g("z1"), g("z2")], 0, 16, 32).unwrap();
        assert_eq!(p.colength, 1);
        assert!(p.verified_proper());
        let p = generic_pair(&[g("z1^2"), g("z2^2"), g("z1*z2")], 0, 16, 32).unwrap();
        assert_eq!(p.ideal_colength, 3);
        assert!(p.colength >= 3);
        assert_eq!(
            generic_pair(&[g("z1^2"), g("z1*z2")], 0, 16, 32).unwrap_err(),
            ProjectionError::InfiniteColength
        );
    }
}

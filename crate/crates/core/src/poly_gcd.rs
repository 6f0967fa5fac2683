//! Global polynomial gcd and exact division in `Q(i)[z1, z2]`.
//!
//! The gcd treats polynomials as elements of `Q(i)[z1][z2]`: contents in
//! `z1` are handled by univariate Euclid, primitive parts by a primitive
//! pseudo-remainder sequence in `z2`.

use num_traits::Zero;

use crate::germ::{ExponentPair, Germ, Var};
use crate::upoly::UPoly;

/// Coefficients in `z2` (by ascending `z2` degree), each a polynomial in `z1`.
pub(crate) fn to_z2_layout(f: &Germ) -> Vec<UPoly> {
    let Some(deg) = f.degree_in(Var::Z2) else {
        return Vec::new();
    };
    let mut rows: Vec<Vec<_>> = vec![Vec::new(); deg as usize + 1];
    for (e, c) in f.terms() {
        let row = &mut rows[e.e2 as usize];
        if row.len() <= e.e1 as usize {
            row.resize(e.e1 as usize + 1, crate::gaussian::GaussianRational::zero());
        }
        row[e.e1 as usize] = c.clone();
    }
    rows.into_iter().map(UPoly::new).collect()
}

pub(crate) fn from_z2_layout(rows: &[UPoly]) -> Germ {
    Germ::from_terms(rows.iter().enumerate().flat_map(|(j, row)| {
        row.coeffs()
            .iter()
            .enumerate()
            .map(move |(i, c)| (ExponentPair::new(i as u32, j as u32), c.clone()))
    }))
}

fn trim(rows: &mut Vec<UPoly>) {
    while rows.last().is_some_and(UPoly::is_zero) {
        rows.pop();
    }
}

fn content(rows: &[UPoly]) -> UPoly {
    rows.iter().fold(UPoly::zero(), |acc, r| acc.gcd(r))
}

fn primitive_part(rows: &[UPoly]) -> Vec<UPoly> {
    let c = content(rows);
    rows.iter()
        .map(|r| r.div_exact(&c).expect("content divides every coefficient"))
        .collect()
}

/// Pseudo-remainder of `a` by `b` in `z2`, up to a power of `lc(b)`.
fn pseudo_rem(a: &[UPoly], b: &[UPoly]) -> Vec<UPoly> {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.to_vec();
    trim(&mut r);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (j, bc) in b.iter().enumerate() {
            let idx = dr - db + j;
            r[idx] = &r[idx] - &(&lr * bc);
        }
        debug_assert!(r[dr].is_zero());
        trim(&mut r);
    }
    r
}

/// Greatest common divisor in `Q(i)[z1, z2]`, normalized to leading
/// coefficient 1 (zero iff both inputs are zero).
pub fn poly_gcd(a: &Germ, b: &Germ) -> Germ {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let ra = to_z2_layout(a);
    let rb = to_z2_layout(b);
    let c = content(&ra).gcd(&content(&rb));
    let (mut x, mut y) = (primitive_part(&ra), primitive_part(&rb));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    let g = loop {
        if y.len() == 1 {
            // a primitive polynomial of z2-degree 0 is a constant
            break vec![UPoly::one()];
        }
        let r = pseudo_rem(&x, &y);
        if r.is_empty() {
            break y;
        }
        x = y;
        y = primitive_part(&r);
    };
    let g: Vec<UPoly> = g.iter().map(|row| row * &c).collect();
    from_z2_layout(&g).monic()
}

pub fn poly_gcd_all<'a, I: IntoIterator<Item = &'a Germ>>(gens: I) -> Germ {
    gens.into_iter().fold(Germ::zero(), |acc, g| poly_gcd(&acc, g))
}

/// Exact quotient `f / g` in the polynomial ring, `None` when `g ∤ f`.
///
/// Uses the graded division algorithm; with a single divisor the remainder
/// is zero exactly when `g` divides `f`.
pub fn divide_exact(f: &Germ, g: &Germ) -> Option<Germ> {
    let (lg, lc) = g.leading_term()?;
    let inv = lc.inv().expect("nonzero leading coefficient");
    let mut r = f.clone();
    let mut q = Germ::zero();
    while let Some((lr, cr)) = r.leading_term() {
        if !lg.divides(lr) {
            return None;
        }
        let e = ExponentPair::new(lr.e1 - lg.e1, lr.e2 - lg.e2);
        let c = cr * &inv;
        r = &r - &g.mul_term(e, &c);
        q.add_term(e, &c);
    }
    Some(q)
}

/// Product of the distinct irreducible factors of `g` (as a global
/// polynomial), computed as `g / gcd(g, ∂g/∂z1, ∂g/∂z2)`.
pub fn global_squarefree_part(g: &Germ) -> Germ {
    let (g1, g2) = g.gradient();
    let d = poly_gcd(&poly_gcd(g, &g1), &g2);
    divide_exact(g, &d).expect("gcd divides").monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_germ;

    fn g(s: &str) -> Germ {
        parse_germ(s).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(poly_gcd(&g("z1^2*z2"), &g("z1*z2^2")), g("z1*z2"));
        assert!(poly_gcd(&g("z1"), &g("z2")).is_one());
        assert_eq!(poly_gcd(&g("(1+z1)*z2"), &g("z2^2")), g("z2"));
        assert_eq!(
            poly_gcd(&g("(z1+z2)^2*(z1-z2^2)"), &g("(z1+z2)*(3+z1*z2)*(z1-z2^2)^2")),
            g("(z1+z2)*(z1-z2^2)").monic()
        );
        assert_eq!(poly_gcd(&g("2*z1^3"), &g("4*z1^2 + 4*z1^3")), g("z1^2"));
    }

    #[test]
    fn exact_division() {
        assert_eq!(divide_exact(&g("z1^2 - z2^2"), &g("z1 + z2")), Some(g("z1 - z2")));
        assert_eq!(divide_exact(&g("z1^2 + z2"), &g("z1")), None);
        assert_eq!(divide_exact(&Germ::zero(), &g("z1")), Some(Germ::zero()));
    }

    #[test]
    fn squarefree() {
        assert_eq!(global_squarefree_part(&g("(z1+z2)^3")), g("z1+z2"));
        assert_eq!(global_squarefree_part(&g("6*z1*z2^2")), g("z1*z2"));
    }
}

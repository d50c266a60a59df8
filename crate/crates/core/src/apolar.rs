//! Catalecticants, apolar ideal slices and concision.

use rug::Rational;
use thiserror::Error;

use crate::linalg::{kernel_rational, rank_rational, rref_rational, transpose_rational, Matrix};
use crate::poly::{monomials, HomogPoly, Monomial, MonomialBasis};
use crate::scalar::{factorial, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApolarError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial has non-rational coefficients")]
    NonRational,
    #[error("split degree {0} exceeds degree {1}")]
    BadSplit(u32, u32),
}

/// C_a(f): rows are degree-a dual monomials, columns degree-(d-a) monomials,
/// entries the coefficients of `apolar_apply(row, f)`.
#[derive(Clone, Debug)]
pub struct Catalecticant {
    pub a: u32,
    pub d: u32,
    pub row_monomials: Vec<Monomial>,
    pub col_monomials: Vec<Monomial>,
    pub matrix: Matrix,
}

impl Catalecticant {
    pub fn rank(&self) -> usize {
        crate::linalg::mat_rank(&self.matrix).expect("uniform entries")
    }
}

pub fn catalecticant(f: &HomogPoly, a: u32) -> Result<Catalecticant, ApolarError> {
    let d = f.degree();
    if a > d {
        return Err(ApolarError::BadSplit(a, d));
    }
    let n = f.num_vars();
    let rows = monomials(n, a);
    let cols = monomials(n, d - a);
    let scale = Rational::from((factorial(d), factorial(a)));
    let col_fact: Vec<Rational> = cols
        .iter()
        .map(|b| Rational::from((1, b.factorial_product())))
        .collect();
    // entry = F_{α+β}·d!/(a!·β!) with F_γ = f_γ·γ!/d!
    let matrix = Matrix::from_fn(rows.len(), cols.len(), |i, j| {
        let g = rows[i].add(&cols[j]);
        let c = f.coeff(&g);
        if c.is_zero() {
            return Scalar::zero();
        }
        let w = Rational::from((g.factorial_product(), factorial(d))) * &scale * &col_fact[j];
        c.scale_rational(&w)
    });
    Ok(Catalecticant {
        a,
        d,
        row_monomials: rows,
        col_monomials: cols,
        matrix,
    })
}

/// The normalized moments F_γ = f_γ / multinomial(d; γ) of a rational form,
/// indexed like `MonomialBasis::new(n, d)`.
pub fn moments(f: &HomogPoly, basis: &MonomialBasis) -> Result<Vec<Rational>, ApolarError> {
    let mut out = vec![Rational::new(); basis.len()];
    for (m, c) in f.terms() {
        let c = c.to_rational().ok_or(ApolarError::NonRational)?;
        let i = basis.index_of(m).expect("monomial in basis");
        out[i] = c / Rational::from(m.multinomial());
    }
    Ok(out)
}

/// Hankel form H[α][β] = F_{α+β}. It differs from the catalecticant only by
/// nonzero row and column scalings, so ranks and left kernels agree.
pub fn hankel(f: &HomogPoly, a: u32) -> Result<Vec<Vec<Rational>>, ApolarError> {
    let d = f.degree();
    if a > d {
        return Err(ApolarError::BadSplit(a, d));
    }
    let n = f.num_vars();
    let basis = MonomialBasis::new(n, d);
    let mom = moments(f, &basis)?;
    Ok(hankel_from_moments(&mom, &basis, a))
}

pub fn hankel_from_moments(mom: &[Rational], basis: &MonomialBasis, a: u32) -> Vec<Vec<Rational>> {
    let n = basis.nvars;
    let rows = monomials(n, a);
    let cols = monomials(n, basis.degree - a);
    rows.iter()
        .map(|r| {
            cols.iter()
                .map(|c| mom[basis.index_of(&r.add(c)).unwrap()].clone())
                .collect()
        })
        .collect()
}

pub fn catalecticant_rank(f: &HomogPoly, a: u32) -> Result<usize, ApolarError> {
    Ok(rank_rational(&hankel(f, a)?))
}

#[derive(Clone, Debug)]
pub struct ConcisionReport {
    pub essential_count: usize,
    /// k × (m+1), reduced echelon; rows span the linear forms f is built from.
    pub restriction_matrix: Matrix,
    /// Pivot columns of the restriction matrix; x = Q z with Q the matching
    /// coordinate injection is a section.
    pub pivots: Vec<usize>,
    pub concise_poly: HomogPoly,
}

impl ConcisionReport {
    pub fn restriction_rows(&self) -> Vec<Vec<Rational>> {
        self.restriction_matrix.to_rational_rows().expect("rational")
    }

    /// The (m+1) × k coordinate injection on the pivot variables.
    pub fn section(&self) -> Matrix {
        let n = self.restriction_matrix.cols();
        Matrix::from_fn(n, self.essential_count, |i, j| {
            Scalar::from_i64((self.pivots[j] == i) as i64)
        })
    }

    /// Maps a point of the concise space back to the ambient space.
    pub fn lift_point(&self, p: &[Rational]) -> Vec<Rational> {
        let r = self.restriction_rows();
        let n = self.restriction_matrix.cols();
        (0..n)
            .map(|i| {
                let mut acc = Rational::new();
                for (row, c) in r.iter().zip(p) {
                    acc += Rational::from(&row[i] * c);
                }
                acc
            })
            .collect()
    }
}

/// Essential variables of a rational form and the concise rewrite
/// f(x) = G(R x) with G(z) = f(Q z).
pub fn essential_vars(f: &HomogPoly) -> Result<ConcisionReport, ApolarError> {
    if f.is_zero() {
        return Err(ApolarError::ZeroPolynomial);
    }
    let n = f.num_vars();
    if f.degree() == 0 {
        return Err(ApolarError::ZeroPolynomial);
    }
    let h = hankel(f, 1)?;
    // column space of H in Q^{m+1}
    let (rref, pivots) = rref_rational(&transpose_rational(&h), n);
    let k = pivots.len();
    let concise_poly = restrict_to(f, &pivots);
    Ok(ConcisionReport {
        essential_count: k,
        restriction_matrix: Matrix::from_rational_rows(&rref).unwrap_or_else(|_| Matrix::zeros(0, n)),
        pivots,
        concise_poly,
    })
}

/// f with every variable outside `vars` set to zero, renumbered in order.
pub fn restrict_to(f: &HomogPoly, vars: &[usize]) -> HomogPoly {
    let mut out = HomogPoly::zero(vars.len(), f.degree());
    for (m, c) in f.terms() {
        let outside: u32 = m.0.iter().enumerate().filter(|(i, _)| !vars.contains(i)).map(|(_, e)| e).sum();
        if outside > 0 {
            continue;
        }
        let e: Vec<u32> = vars.iter().map(|&i| m.0[i]).collect();
        out.add_term(Monomial(e), c.clone());
    }
    out
}

/// Largest catalecticant rank over split degrees 1..d-1. Only a ≤ d/2 is
/// eliminated; the other half is its transpose.
pub fn border_rank_lower_bound(f: &HomogPoly) -> Result<usize, ApolarError> {
    if f.is_zero() {
        return Err(ApolarError::ZeroPolynomial);
    }
    let d = f.degree();
    if d < 2 {
        return Ok(1);
    }
    let basis = MonomialBasis::new(f.num_vars(), d);
    let mom = moments(f, &basis)?;
    let mut best = 0;
    for a in 1..=d / 2 {
        best = best.max(rank_rational(&hankel_from_moments(&mom, &basis, a)));
    }
    Ok(best)
}

/// Basis of the degree-k part of the apolar ideal, as dual forms.
pub fn apolar_ideal_slice(f: &HomogPoly, k: u32) -> Result<Vec<HomogPoly>, ApolarError> {
    let h = hankel(f, k)?;
    let basis = MonomialBasis::new(f.num_vars(), k);
    Ok(kernel_rational(&transpose_rational(&h))
        .into_iter()
        .map(|v| HomogPoly::from_rational_vector(&basis, &v))
        .collect())
}

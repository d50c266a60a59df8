//! Canonical schemes of every type, random projectivities and sample forms
//! with a prescribed degree-5 scheme.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use thiserror::Error;

use crate::apolar::{border_rank_lower_bound, essential_vars};
use crate::linalg::{inverse_rational, mat_rank, Matrix};
use crate::poly::{jets_in_basis, monomials, CurvePath, HomogPoly, MonomialBasis};
use crate::schemes::{is_linearly_independent, JetComponent, JetScheme, SchemeType};

pub const DEFAULT_HEIGHT: u64 = 100;
pub const MIN_DEGREE: u32 = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("bad type {0}: need total degree 5 and m >= 4")]
    BadType(String),
    #[error("scheme is not linearly independent")]
    DependentScheme,
    #[error("degree {0} is below 9")]
    DegreeTooSmall(u32),
    #[error("coefficient shape does not match the scheme")]
    CoefficientShape,
    #[error("sample failed its checks: {0}")]
    CheckFailed(String),
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// p/q with |p| ≤ height and 1 ≤ q ≤ height.
pub fn random_rational<R: Rng>(rng: &mut R, height: u64, nonzero: bool) -> Rational {
    let h = height.max(1) as i64;
    loop {
        let p = rng.gen_range(-h..=h);
        if nonzero && p == 0 {
            continue;
        }
        let q = rng.gen_range(1..=h);
        return Rational::from((p, q));
    }
}

/// Component i runs through the next b_i standard basis vectors:
/// c_i(t) = Σ_{j<b_i} t^j e_{k(i)+j}.
pub fn canonical_scheme(t: &SchemeType, m: usize) -> Result<JetScheme, ConstructError> {
    if t.total() != 5 || m < 4 {
        return Err(ConstructError::BadType(t.to_string()));
    }
    let n = m + 1;
    let mut k = 0;
    let mut comps = Vec::new();
    for &b in t.degrees() {
        let pts: Vec<Vec<Rational>> = (0..b)
            .map(|j| (0..n).map(|i| Rational::from((i == k + j) as i32)).collect())
            .collect();
        k += b;
        let path = CurvePath::new(pts).expect("nonzero support");
        comps.push(JetComponent::new(path, b).expect("b ≥ 1"));
    }
    Ok(JetScheme::new(m, comps).expect("distinct supports"))
}

#[derive(Clone, Debug)]
pub struct SamplePoint {
    pub f: HomogPoly,
    pub scheme: JetScheme,
    /// c_{i,0..b_i-1} per component.
    pub coefficients: Vec<Vec<Rational>>,
    pub seed: u64,
    pub d: u32,
}

impl SamplePoint {
    /// The piece of f carried by one component.
    pub fn component_form(&self, i: usize) -> HomogPoly {
        let c = &self.scheme.components[i];
        let basis = MonomialBasis::new(self.scheme.m + 1, self.d);
        let jets = jets_in_basis(&c.path, self.d, c.length, &basis.list);
        combine(&basis, &jets, &self.coefficients[i])
    }

    /// The sample moved by x ↦ M x, i.e. f(Mx), with the scheme moved by M^T
    /// and the coefficients unchanged.
    pub fn transformed(&self, m: &[Vec<Rational>]) -> SamplePoint {
        let mt = crate::linalg::transpose_rational(m);
        let scheme = self.scheme.transform(&mt);
        let f = form_from_scheme(&scheme, self.d, &self.coefficients).expect("same shape");
        SamplePoint {
            f,
            scheme,
            coefficients: self.coefficients.clone(),
            seed: self.seed,
            d: self.d,
        }
    }
}

fn combine(basis: &MonomialBasis, jets: &[Vec<Rational>], coeffs: &[Rational]) -> HomogPoly {
    let mut acc = vec![Rational::new(); basis.len()];
    for (row, c) in jets.iter().zip(coeffs) {
        if *c == 0 {
            continue;
        }
        for (a, x) in acc.iter_mut().zip(row) {
            if *x != 0 {
                *a += Rational::from(x * c);
            }
        }
    }
    HomogPoly::from_rational_vector(basis, &acc)
}

/// f = Σ_i Σ_j c_{i,j} · jet_j(path_i).
pub fn form_from_scheme(
    a: &JetScheme,
    d: u32,
    coefficients: &[Vec<Rational>],
) -> Result<HomogPoly, ConstructError> {
    if coefficients.len() != a.components.len()
        || a.components
            .iter()
            .zip(coefficients)
            .any(|(c, v)| v.len() != c.length)
    {
        return Err(ConstructError::CoefficientShape);
    }
    let basis = MonomialBasis::new(a.m + 1, d);
    let mut acc = vec![Rational::new(); basis.len()];
    for (c, coeffs) in a.components.iter().zip(coefficients) {
        let jets = jets_in_basis(&c.path, d, c.length, &basis.list);
        for (row, k) in jets.iter().zip(coeffs) {
            if *k == 0 {
                continue;
            }
            for (x, y) in acc.iter_mut().zip(row) {
                if *y != 0 {
                    *x += Rational::from(y * k);
                }
            }
        }
    }
    Ok(HomogPoly::from_rational_vector(&basis, &acc))
}

fn check_scheme(a: &JetScheme, d: u32) -> Result<(), ConstructError> {
    if d < MIN_DEGREE {
        return Err(ConstructError::DegreeTooSmall(d));
    }
    if a.degree() != 5 || a.m < 4 {
        return Err(ConstructError::BadType(a.scheme_type().to_string()));
    }
    if !is_linearly_independent(a) {
        return Err(ConstructError::DependentScheme);
    }
    Ok(())
}

/// Builds the sample for given coefficients and re-verifies concision and the
/// catalecticant bound.
pub fn sample_with_coefficients(
    a: &JetScheme,
    d: u32,
    coefficients: Vec<Vec<Rational>>,
    seed: u64,
) -> Result<SamplePoint, ConstructError> {
    check_scheme(a, d)?;
    if coefficients.iter().any(|c| c.last().map_or(true, |x| *x == 0)) {
        return Err(ConstructError::CheckFailed("a top coefficient is zero".into()));
    }
    let f = form_from_scheme(a, d, &coefficients)?;
    let conc = essential_vars(&f).map_err(|e| ConstructError::CheckFailed(e.to_string()))?;
    if conc.essential_count != 5 {
        return Err(ConstructError::CheckFailed(format!(
            "{} essential variables",
            conc.essential_count
        )));
    }
    let br = border_rank_lower_bound(&conc.concise_poly)
        .map_err(|e| ConstructError::CheckFailed(e.to_string()))?;
    if br != 5 {
        return Err(ConstructError::CheckFailed(format!("catalecticant bound {br}")));
    }
    Ok(SamplePoint {
        f,
        scheme: a.clone(),
        coefficients,
        seed,
        d,
    })
}

/// Random coefficients of the given height, top ones nonzero.
pub fn sample_point(
    a: &JetScheme,
    d: u32,
    seed: u64,
    height: u64,
) -> Result<SamplePoint, ConstructError> {
    check_scheme(a, d)?;
    let mut rng = rng_from_seed(seed);
    let mut last = None;
    for _ in 0..8 {
        let coeffs: Vec<Vec<Rational>> = a
            .components
            .iter()
            .map(|c| {
                (0..c.length)
                    .map(|j| random_rational(&mut rng, height, j + 1 == c.length))
                    .collect()
            })
            .collect();
        match sample_with_coefficients(a, d, coeffs, seed) {
            Ok(sp) => return Ok(sp),
            Err(e @ ConstructError::CheckFailed(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one draw"))
}

/// Invertible integer matrix with entries in [-height, height].
pub fn random_projectivity(m: usize, seed: u64, height: u64) -> Matrix {
    let n = m + 1;
    let mut rng = rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    let h = height.max(1) as i64;
    loop {
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| Rational::from(rng.gen_range(-h..=h))).collect())
            .collect();
        let mat = Matrix::from_rational_rows(&rows).expect("square");
        if mat_rank(&mat).expect("exact") == n {
            return mat;
        }
    }
}

/// Rational rows of an invertible matrix and of its inverse.
pub fn projectivity_pair(mat: &Matrix) -> Option<(Vec<Vec<Rational>>, Vec<Vec<Rational>>)> {
    let rows = mat.to_rational_rows()?;
    let inv = inverse_rational(&rows)?;
    Some((rows, inv))
}

/// Number of degree-d monomials in m+1 variables.
pub fn ambient_dimension(m: usize, d: u32) -> usize {
    monomials(m + 1, d).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, substitute_linear};

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn canonical_examples() {
        let t: SchemeType = "5:1,1,1,1,1".parse().unwrap();
        let a = canonical_scheme(&t, 4).unwrap();
        assert_eq!(a.components.len(), 5);
        let t: SchemeType = "1:5".parse().unwrap();
        let a = canonical_scheme(&t, 4).unwrap();
        assert_eq!(a.components[0].path.points.len(), 5);
        assert_eq!(a.components[0].path.points[4][4], 1);
        let t: SchemeType = "2:3,2".parse().unwrap();
        let a = canonical_scheme(&t, 4).unwrap();
        assert_eq!(a.components[0].length, 3);
        assert_eq!(a.components[1].path.points[0][3], 1);
        assert_eq!(a.components[1].path.points[1][4], 1);
        assert!("2:2,2".parse::<SchemeType>().map(|t| canonical_scheme(&t, 4)).unwrap().is_err());
        assert!(canonical_scheme(&"1:5".parse().unwrap(), 3).is_err());
    }

    #[test]
    fn sample_examples() {
        let a = canonical_scheme(&"5:1,1,1,1,1".parse().unwrap(), 4).unwrap();
        let sp = sample_with_coefficients(&a, 9, vec![vec![q(1)]; 5], 0).unwrap();
        assert_eq!(sp.f, parse_poly("x0^9 + x1^9 + x2^9 + x3^9 + x4^9", Some(5)).unwrap());

        let a = canonical_scheme(&"1:5".parse().unwrap(), 4).unwrap();
        let sp = sample_with_coefficients(&a, 9, vec![vec![q(0), q(0), q(0), q(0), q(1)]], 0).unwrap();
        let expect = parse_poly(
            "9*x0^8*x4 + 72*x0^7*x1*x3 + 36*x0^7*x2^2 + 252*x0^6*x1^2*x2 + 126*x0^5*x1^4",
            Some(5),
        )
        .unwrap();
        assert_eq!(sp.f, expect);

        let a = canonical_scheme(&"4:2,1,1,1".parse().unwrap(), 4).unwrap();
        let c = vec![vec![q(0), q(1)], vec![q(1)], vec![q(1)], vec![q(1)]];
        let sp = sample_with_coefficients(&a, 9, c, 0).unwrap();
        assert_eq!(sp.f, parse_poly("9*x0^8*x1 + x2^9 + x3^9 + x4^9", Some(5)).unwrap());
    }

    #[test]
    fn refuses_small_degree_and_dependent_schemes() {
        let a = canonical_scheme(&"1:5".parse().unwrap(), 4).unwrap();
        assert_eq!(sample_point(&a, 8, 1, 100).unwrap_err(), ConstructError::DegreeTooSmall(8));
        let mut bad = a.clone();
        bad.components[0].path.points[4] = bad.components[0].path.points[3].clone();
        assert_eq!(sample_point(&bad, 9, 1, 100).unwrap_err(), ConstructError::DependentScheme);
    }

    #[test]
    fn projectivity_is_deterministic_and_invertible() {
        let a = random_projectivity(4, 11, 100);
        assert_eq!(a, random_projectivity(4, 11, 100));
        assert_eq!(mat_rank(&a).unwrap(), 5);
        let s = canonical_scheme(&"2:3,2".parse().unwrap(), 4).unwrap();
        let rows = a.to_rational_rows().unwrap();
        assert!(is_linearly_independent(&s.transform(&rows)));
    }

    #[test]
    fn transform_matches_substitution() {
        let a = canonical_scheme(&"3:2,2,1".parse().unwrap(), 4).unwrap();
        let sp = sample_point(&a, 9, 5, 10).unwrap();
        let m = random_projectivity(4, 3, 3);
        let moved = sp.transformed(&m.to_rational_rows().unwrap());
        assert_eq!(moved.f, substitute_linear(&sp.f, &m).unwrap());
    }
}

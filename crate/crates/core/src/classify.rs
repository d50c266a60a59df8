//! Recovery of the degree-5 scheme behind a border rank 5 form, its type,
//! and the rank it forces.
//!
//! For a random direction w and a second direction u, the quadrics
//! q1 = D_w^{d-2} F and q2 = D_u D_w^{d-3} F of the concise form F have
//! Hessians T1, T2 with T2·T1^{-1} acting on the scheme's points like
//! multiplication by u/w on its coordinate ring. Eigenvalues give the support
//! points and each Jordan chain is a path of the curve germ through one.

use std::fmt;

use rug::{Integer, Rational};
use thiserror::Error;

use crate::apolar::{border_rank_lower_bound, essential_vars, ConcisionReport};
use crate::construct::{random_rational, rng_from_seed, MIN_DEGREE};
use crate::linalg::{
    identity_rational, inverse_rational, kernel_rational, mat_mul_rational, solve_rational,
    transpose_rational,
};
use crate::poly::{CurvePath, HomogPoly, MonomialBasis};
use crate::schemes::{is_linearly_independent, span_rows, JetComponent, JetScheme, SchemeType};
use crate::univariate::RatPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("scheme type {0} does not have degree 5")]
    BadType(String),
    #[error("degree {0} is below 9")]
    DegreeTooSmall(u32),
    #[error("form does not have border rank 5: {0}")]
    NotBorderRankFive(String),
    #[error("support of the scheme is not rational")]
    IrrationalSupport,
    #[error("recovered scheme does not reproduce the form")]
    RecoveryInconsistent,
}

/// The rank forced by the type of the degree-5 scheme.
pub fn rank_from_type(t: &SchemeType, d: u32) -> Result<usize, ClassifyError> {
    if t.total() != 5 {
        return Err(ClassifyError::BadType(t.to_string()));
    }
    if d < MIN_DEGREE {
        return Err(ClassifyError::DegreeTooSmall(d));
    }
    let d = d as usize;
    Ok(match t.degrees() {
        [5] => 4 * d - 3,
        [3, 2] | [4, 1] => 3 * d - 1,
        [3, 1, 1] | [2, 2, 1] => 2 * d + 1,
        [2, 1, 1, 1] => d + 3,
        [1, 1, 1, 1, 1] => 5,
        _ => return Err(ClassifyError::BadType(t.to_string())),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub scheme_type: SchemeType,
    /// Present only when every check passed.
    pub rank: Option<usize>,
    pub scheme: JetScheme,
    pub essential: usize,
    pub d: u32,
    pub checks: Vec<Check>,
}

impl RankReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

impl fmt::Display for RankReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rank {
            Some(r) => write!(f, "type {} rank {}", self.scheme_type, r),
            None => write!(f, "type {} failed {:?}", self.scheme_type, self.failing()),
        }
    }
}

fn in_span(rows: &[Vec<Rational>], target: &[Rational]) -> bool {
    if rows.is_empty() {
        return target.iter().all(|x| *x == 0);
    }
    solve_rational(&transpose_rational(rows), target).is_some()
}

/// Independence, membership, minimality and the catalecticant bound.
pub fn verify_certificate(f: &HomogPoly, a: &JetScheme, d: u32) -> RankReport {
    let basis = MonomialBasis::new(a.m + 1, d);
    let target = f.rational_vector(&basis);
    let shape_ok = f.num_vars() == a.m + 1 && f.degree() == d && target.is_some();
    let independent = is_linearly_independent(a);
    let membership = shape_ok && in_span(&span_rows(a, d, &basis.list), target.as_ref().unwrap());
    let minimal = shape_ok
        && (0..a.components.len()).all(|i| match a.truncate_component(i) {
            Some(t) => !in_span(&span_rows(&t, d, &basis.list), target.as_ref().unwrap()),
            None => !f.is_zero(),
        });
    let (essential, border) = match essential_vars(f) {
        Ok(c) => (
            c.essential_count,
            border_rank_lower_bound(&c.concise_poly).unwrap_or(0),
        ),
        Err(_) => (0, 0),
    };
    let checks = vec![
        Check { name: "independence", passed: independent },
        Check { name: "membership", passed: membership },
        Check { name: "minimality", passed: minimal },
        Check { name: "border_rank_5", passed: border == 5 && a.degree() == 5 },
    ];
    let scheme_type = a.scheme_type();
    let all = checks.iter().all(|c| c.passed);
    RankReport {
        rank: if all { rank_from_type(&scheme_type, d).ok() } else { None },
        scheme_type,
        scheme: a.clone(),
        essential,
        d,
        checks,
    }
}

/// Concision and the catalecticant bound, as required before recovery.
fn concise_border_five(f: &HomogPoly, d: u32) -> Result<ConcisionReport, ClassifyError> {
    if d < MIN_DEGREE || f.degree() != d {
        return Err(ClassifyError::DegreeTooSmall(f.degree()));
    }
    let conc = essential_vars(f).map_err(|e| ClassifyError::NotBorderRankFive(e.to_string()))?;
    if conc.essential_count != 5 {
        return Err(ClassifyError::NotBorderRankFive(format!(
            "{} essential variables",
            conc.essential_count
        )));
    }
    let br = border_rank_lower_bound(&conc.concise_poly)
        .map_err(|e| ClassifyError::NotBorderRankFive(e.to_string()))?;
    if br != 5 {
        return Err(ClassifyError::NotBorderRankFive(format!("catalecticant rank {br}")));
    }
    Ok(conc)
}

fn hessian(q: &HomogPoly) -> Vec<Vec<Rational>> {
    let n = q.num_vars();
    let mut h = vec![vec![Rational::new(); n]; n];
    for (m, c) in q.terms() {
        let c = c.to_rational().expect("rational form");
        let idx: Vec<usize> = m
            .0
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize))
            .collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            h[i][i] = c * 2u32;
        } else {
            h[i][j] = c.clone();
            h[j][i] = c;
        }
    }
    h
}

/// Characteristic polynomial det(tI - A), lowest degree first.
pub fn characteristic_polynomial(a: &[Vec<Rational>]) -> RatPoly {
    let n = a.len();
    let mut coeffs = vec![Rational::new(); n + 1];
    coeffs[n] = Rational::from(1);
    let mut mk = vec![vec![Rational::new(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = mat_mul_rational(a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = next;
        let am = mat_mul_rational(a, &mk);
        let tr = (0..n).fold(Rational::new(), |acc, i| acc + &am[i][i]);
        coeffs[n - k] = -tr / Rational::from(k as u32);
    }
    RatPoly::new(coeffs)
}

fn mat_pow(a: &[Vec<Rational>], e: usize) -> Vec<Vec<Rational>> {
    let mut out = identity_rational(a.len());
    for _ in 0..e {
        out = mat_mul_rational(&out, a);
    }
    out
}

/// Scales so the first nonzero coordinate of the support is 1.
fn normalize_path(points: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let lead = points[0].iter().find(|x| **x != 0).cloned().expect("nonzero support");
    let inv = Rational::from(lead.recip_ref());
    points
        .into_iter()
        .map(|p| p.into_iter().map(|x| x * &inv).collect())
        .collect()
}

enum Attempt {
    Found(JetScheme),
    Irrational,
    Failed,
}

fn attempt(conc: &ConcisionReport, d: u32, m: usize, seed: u64) -> Attempt {
    let g = &conc.concise_poly;
    let k = g.num_vars();
    let mut rng = rng_from_seed(seed);
    let w: Vec<Rational> = (0..k).map(|_| random_rational(&mut rng, 20, false)).collect();
    let u: Vec<Rational> = (0..k).map(|_| random_rational(&mut rng, 20, false)).collect();
    let mut q = g.clone();
    for _ in 0..d - 3 {
        q = q.directional_derivative(&w);
    }
    let q1 = hessian(&q.directional_derivative(&w));
    let q2 = hessian(&q.directional_derivative(&u));
    let Some(t1inv) = inverse_rational(&q1) else { return Attempt::Failed };
    let op = mat_mul_rational(&q2, &t1inv);
    let chi = characteristic_polynomial(&op);
    let mut eigen: Vec<(Rational, usize)> = Vec::new();
    for (factor, mult) in chi.squarefree_factorization() {
        let deg = factor.degree().unwrap_or(0);
        if deg == 0 {
            continue;
        }
        let roots = factor.rational_roots(&Integer::from(u64::MAX), 256);
        if roots.len() != deg {
            return Attempt::Irrational;
        }
        eigen.extend(roots.into_iter().map(|r| (r, mult)));
    }
    if eigen.iter().map(|e| e.1).sum::<usize>() != k {
        return Attempt::Failed;
    }
    let mut comps = Vec::new();
    for (lambda, b) in eigen {
        let mut n = op.clone();
        for (i, row) in n.iter_mut().enumerate() {
            row[i] -= &lambda;
        }
        if kernel_rational(&n).len() != 1 {
            return Attempt::Failed;
        }
        let nb1 = mat_pow(&n, b - 1);
        let top = mat_mul_rational(&nb1, &n);
        let Some(v) = kernel_rational(&top)
            .into_iter()
            .find(|v| crate::linalg::mat_vec_rational(&nb1, v).iter().any(|x| *x != 0))
        else {
            return Attempt::Failed;
        };
        let mut chain = Vec::with_capacity(b);
        for j in 0..b {
            let p = crate::linalg::mat_vec_rational(&mat_pow(&n, b - 1 - j), &v);
            chain.push(conc.lift_point(&p));
        }
        let Ok(path) = CurvePath::new(normalize_path(chain)) else { return Attempt::Failed };
        match JetComponent::new(path, b) {
            Ok(c) => comps.push(c),
            Err(_) => return Attempt::Failed,
        }
    }
    comps.sort_by(|a, b| b.length.cmp(&a.length).then_with(|| a.support().cmp(b.support())));
    match JetScheme::new(m, comps) {
        Ok(s) => Attempt::Found(s),
        Err(_) => Attempt::Failed,
    }
}

/// The degree-5 scheme whose span contains f, validated by its certificate.
pub fn recover_scheme(f: &HomogPoly, d: u32, seed: u64) -> Result<JetScheme, ClassifyError> {
    let conc = concise_border_five(f, d)?;
    let m = f.num_vars() - 1;
    let mut irrational = false;
    for t in 0..8u64 {
        match attempt(&conc, d, m, seed.wrapping_mul(31).wrapping_add(t)) {
            Attempt::Found(s) => {
                if verify_certificate(f, &s, d).passed() {
                    return Ok(s);
                }
            }
            Attempt::Irrational => irrational = true,
            Attempt::Failed => {}
        }
    }
    Err(if irrational {
        ClassifyError::IrrationalSupport
    } else {
        ClassifyError::RecoveryInconsistent
    })
}

pub fn classify_rank(f: &HomogPoly, d: u32, seed: u64) -> Result<RankReport, ClassifyError> {
    let a = recover_scheme(f, d, seed)?;
    Ok(verify_certificate(f, &a, d))
}

/// Whether two schemes agree: same supports up to scale and, per component,
/// the same flag of jet spans.
pub fn same_scheme(a: &JetScheme, b: &JetScheme) -> bool {
    if a.m != b.m || a.scheme_type() != b.scheme_type() {
        return false;
    }
    let mut used = vec![false; b.components.len()];
    'outer: for ca in &a.components {
        for (j, cb) in b.components.iter().enumerate() {
            if used[j] || ca.length != cb.length || !crate::schemes::proportional(ca.support(), cb.support()) {
                continue;
            }
            let flags_agree = (1..=ca.length).all(|k| {
                let pa = &ca.path.points[..k];
                let pb = &cb.path.points[..k];
                let mut both = pa.to_vec();
                both.extend(pb.iter().cloned());
                let r = crate::linalg::rank_rational(&both);
                r == crate::linalg::rank_rational(pa) && r == crate::linalg::rank_rational(pb)
            });
            if flags_agree {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{canonical_scheme, sample_point, sample_with_coefficients};
    use crate::poly::parse_poly;

    fn t(s: &str) -> SchemeType {
        s.parse().unwrap()
    }

    #[test]
    fn rank_table() {
        assert_eq!(rank_from_type(&t("1:5"), 9).unwrap(), 33);
        assert_eq!(rank_from_type(&t("3:2,2,1"), 10).unwrap(), 21);
        assert_eq!(rank_from_type(&t("5:1,1,1,1,1"), 14).unwrap(), 5);
        assert_eq!(rank_from_type(&t("2:4,1"), 11).unwrap(), 32);
        assert!(matches!(rank_from_type(&t("1:5"), 8), Err(ClassifyError::DegreeTooSmall(8))));
        assert!(rank_from_type(&t("2:3,3"), 9).is_err());
    }

    #[test]
    fn characteristic_polynomial_of_companion() {
        let a: Vec<Vec<Rational>> = vec![
            vec![Rational::from(2), Rational::from(1)],
            vec![Rational::from(0), Rational::from(3)],
        ];
        assert_eq!(characteristic_polynomial(&a), RatPoly::from_i64(&[6, -5, 1]));
    }

    #[test]
    fn fermat_sum_is_five_points() {
        let f = parse_poly("x0^9 + x1^9 + x2^9 + x3^9 + x4^9", None).unwrap();
        let r = classify_rank(&f, 9, 1).unwrap();
        assert_eq!(r.scheme_type, t("5:1,1,1,1,1"));
        assert_eq!(r.rank, Some(5));
    }

    #[test]
    fn power_is_rejected() {
        let f = parse_poly("x0^9", Some(5)).unwrap();
        assert!(matches!(classify_rank(&f, 9, 1), Err(ClassifyError::NotBorderRankFive(_))));
    }

    #[test]
    fn round_trip_all_types() {
        let want = [33, 26, 26, 19, 19, 12, 5];
        for (ty, r) in SchemeType::all_degree_five().iter().zip(want) {
            let a = canonical_scheme(ty, 4).unwrap();
            let sp = sample_point(&a, 9, 11, 100).unwrap();
            let rep = classify_rank(&sp.f, 9, 3).unwrap();
            assert_eq!(&rep.scheme_type, ty);
            assert_eq!(rep.rank, Some(r));
            assert!(same_scheme(&rep.scheme, &sp.scheme), "{ty}");
        }
    }

    #[test]
    fn certificate_mutations() {
        let a = canonical_scheme(&t("1:5"), 4).unwrap();
        let sp = sample_point(&a, 9, 2, 100).unwrap();
        assert!(verify_certificate(&sp.f, &a, 9).passed());
        let p = sp.f.add(&parse_poly("x0*x1*x2*x3*x4^5", Some(5)).unwrap()).unwrap();
        assert!(verify_certificate(&p, &a, 9).failing().contains(&"membership"));
        let b = canonical_scheme(&t("4:2,1,1,1"), 4).unwrap();
        let sp = sample_point(&b, 9, 3, 100).unwrap();
        let mut c = sp.coefficients.clone();
        *c[0].last_mut().unwrap() = Rational::new();
        let g = crate::construct::form_from_scheme(&b, 9, &c).unwrap();
        assert!(verify_certificate(&g, &b, 9).failing().contains(&"minimality"));
        assert!(sample_with_coefficients(&b, 9, c, 3).is_err());
    }
}

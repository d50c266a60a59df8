//! Explicit Waring decompositions of the exact rank, their verification, and
//! upper bounds for planar schemes.

use std::fmt;

use rug::Rational;
use thiserror::Error;

use crate::construct::{random_rational, rng_from_seed, SamplePoint};
use crate::linalg::{kernel_rational, mat_rank, rank_rational, solve_rational, transpose_rational, Matrix};
use crate::poly::{jets_in_basis, sum_of_powers, CurvePath, HomogPoly, LinearForm, Monomial, MonomialBasis};
use crate::scalar::{binomial, Exactness, Scalar};
use crate::schemes::JetScheme;
use crate::sylvester::{
    binary_decomposition, binary_decomposition_full_length, push_forward, SylvesterConfig,
    SylvesterError,
};
use crate::univariate::RatPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessError {
    #[error("no witness found for component {0}")]
    WitnessSearchFailed(usize),
    #[error("decomposition failed verification: {0}")]
    Verification(String),
    #[error("scheme or form is not planar")]
    NotPlanar,
    #[error("form is not in the span of the scheme")]
    NotInSpan,
    #[error(transparent)]
    Sylvester(#[from] SylvesterError),
}

/// Which part of the scheme a term serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermLabel {
    /// Lies on the curve through the non-reduced component i.
    Block(usize),
    /// The support point of the reduced component i.
    Reduced(usize),
    Free,
}

impl fmt::Display for TermLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermLabel::Block(i) => write!(f, "block:{i}"),
            TermLabel::Reduced(i) => write!(f, "reduced:{i}"),
            TermLabel::Free => write!(f, "free"),
        }
    }
}

impl std::str::FromStr for TermLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "free" {
            return Ok(TermLabel::Free);
        }
        let (kind, idx) = s.split_once(':').ok_or_else(|| format!("bad label {s:?}"))?;
        let i: usize = idx.parse().map_err(|_| format!("bad label {s:?}"))?;
        match kind {
            "block" => Ok(TermLabel::Block(i)),
            "reduced" => Ok(TermLabel::Reduced(i)),
            _ => Err(format!("bad label {s:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub lambda: Scalar,
    /// Coefficients of the linear form in x_0..x_m.
    pub form: Vec<Scalar>,
    pub label: TermLabel,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub terms: Vec<Term>,
    pub exactness: Exactness,
    pub residual: Option<f64>,
}

impl Decomposition {
    pub fn new(terms: Vec<Term>) -> Self {
        let exactness = terms
            .iter()
            .flat_map(|t| std::iter::once(&t.lambda).chain(&t.form))
            .map(|s| s.exactness())
            .max()
            .unwrap_or(Exactness::Rational);
        Decomposition {
            terms,
            exactness,
            residual: None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn expand(&self, d: u32) -> Result<HomogPoly, WitnessError> {
        let pairs = self
            .terms
            .iter()
            .map(|t| {
                LinearForm::new(t.form.clone())
                    .map(|l| (t.lambda.clone(), l))
                    .map_err(|e| WitnessError::Verification(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(sum_of_powers(&pairs, d))
    }

    fn append(&mut self, other: Decomposition) {
        self.exactness = self.exactness.max(other.exactness);
        self.terms.extend(other.terms);
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub ok: bool,
    /// Relative residual; 0 for an exact match.
    pub residual: f64,
    pub reason: Option<String>,
}

impl VerifyReport {
    fn fail(reason: impl Into<String>, residual: f64) -> Self {
        VerifyReport {
            ok: false,
            residual,
            reason: Some(reason.into()),
        }
    }
}

fn forms_proportional(a: &[Scalar], b: &[Scalar], numeric: bool) -> bool {
    let scale = a.iter().chain(b).map(|x| x.abs_f64()).fold(0.0, f64::max).max(1e-300);
    let zero = |x: &Scalar| {
        if numeric {
            x.abs_f64() <= 1e-30 * scale * scale
        } else {
            x.is_zero()
        }
    };
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !zero(&a[i].mul(&b[j]).sub(&a[j].mul(&b[i]))) {
                return false;
            }
        }
    }
    true
}

/// Re-expands and compares with f; linear forms must be pairwise
/// non-proportional.
pub fn verify_decomposition(f: &HomogPoly, dec: &Decomposition, tolerance: f64) -> VerifyReport {
    let n = f.num_vars();
    if dec.terms.iter().any(|t| t.form.len() != n) {
        return VerifyReport::fail("linear form has the wrong number of variables", f64::INFINITY);
    }
    if dec.terms.iter().any(|t| t.form.iter().all(|c| c.is_zero())) {
        return VerifyReport::fail("zero linear form", f64::INFINITY);
    }
    let numeric = !dec.exactness.is_exact();
    for i in 0..dec.terms.len() {
        for j in i + 1..dec.terms.len() {
            if forms_proportional(&dec.terms[i].form, &dec.terms[j].form, numeric) {
                return VerifyReport::fail(format!("terms {i} and {j} are proportional"), f64::INFINITY);
            }
        }
    }
    let e = if dec.terms.is_empty() {
        HomogPoly::zero(n, f.degree())
    } else {
        match dec.expand(f.degree()) {
            Ok(e) => e,
            Err(err) => return VerifyReport::fail(err.to_string(), f64::INFINITY),
        }
    };
    let diff = f.sub(&e).expect("same shape");
    if diff.is_zero() {
        return VerifyReport {
            ok: true,
            residual: 0.0,
            reason: None,
        };
    }
    let r = diff.max_abs() / f.max_abs().max(f64::MIN_POSITIVE);
    if !numeric {
        return VerifyReport::fail("exact re-expansion differs", r);
    }
    if r < tolerance {
        VerifyReport {
            ok: true,
            residual: r,
            reason: None,
        }
    } else {
        VerifyReport::fail(format!("residual {r:e} above tolerance"), r)
    }
}

/// Terms for one component: the support point for a reduced one, otherwise a
/// decomposition of its binary pullback pushed onto the curve of the path.
fn component_terms(
    sp: &SamplePoint,
    i: usize,
    cfg: &SylvesterConfig,
) -> Result<Decomposition, WitnessError> {
    let comp = &sp.scheme.components[i];
    let coeffs = &sp.coefficients[i];
    if comp.length == 1 {
        let form = comp.support().iter().cloned().map(Scalar::Rational).collect();
        return Ok(Decomposition::new(vec![Term {
            lambda: Scalar::Rational(coeffs[0].clone()),
            form,
            label: TermLabel::Reduced(i),
        }]));
    }
    let e = comp.length as u32 - 1;
    let dd = e * sp.d;
    // u^{D-j} v^j ↦ jet_j / C(D, j)
    let terms: Vec<(Monomial, Scalar)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(j, c)| {
            let j = j as u32;
            (
                Monomial(vec![dd - j, j]),
                Scalar::Rational(Rational::from(c * binomial(dd, j))),
            )
        })
        .collect();
    let g = HomogPoly::from_terms(2, dd, terms).expect("binary form");
    let cfg = SylvesterConfig {
        seed: cfg.seed.wrapping_add(i as u64),
        ..cfg.clone()
    };
    let bin = binary_decomposition(&g, &cfg)?.ok_or(WitnessError::WitnessSearchFailed(i))?;
    let mut dec = Decomposition::new(push_forward(&bin, &comp.path, TermLabel::Block(i)));
    dec.residual = bin.residual;
    Ok(dec)
}

/// A decomposition of the sample of exactly the rank of its type.
pub fn decompose(sp: &SamplePoint, cfg: &SylvesterConfig) -> Result<Decomposition, WitnessError> {
    let mut out = Decomposition::new(Vec::new());
    for i in 0..sp.scheme.components.len() {
        out.append(component_terms(sp, i, cfg)?);
    }
    let rep = verify_decomposition(&sp.f, &out, cfg.tolerance);
    if !rep.ok {
        return Err(WitnessError::Verification(rep.reason.unwrap_or_default()));
    }
    if !out.exactness.is_exact() {
        out.residual = Some(rep.residual);
    }
    Ok(out)
}

/// Expected block size for a component of length b.
pub fn block_size(b: usize, d: u32) -> usize {
    (b - 1) * (d as usize - 1) + 1
}

fn in_span(points: &[Vec<Rational>], v: &[Scalar]) -> bool {
    let numeric = v.iter().any(|x| !x.is_exact());
    let conv = |x: Scalar| if numeric { Scalar::Complex(x.to_complex(crate::scalar::DEFAULT_PRECISION)) } else { x };
    let base: Vec<Vec<Scalar>> = points
        .iter()
        .map(|p| p.iter().cloned().map(|x| conv(Scalar::Rational(x))).collect())
        .collect();
    let r0 = rank_rational(points);
    let mut rows = base;
    rows.push(v.iter().cloned().map(conv).collect());
    let m = Matrix::from_rows(rows).expect("rectangular");
    mat_rank(&m).map_or(false, |r| r == r0)
}

/// Block sizes, incidence with the span of each component's curve, and no
/// block term at the support of its component.
pub fn structure_check(dec: &Decomposition, a: &JetScheme, d: u32) -> bool {
    structure_failures(dec, a, d).is_empty()
}

pub fn structure_failures(dec: &Decomposition, a: &JetScheme, d: u32) -> Vec<String> {
    let mut out = Vec::new();
    let numeric = !dec.exactness.is_exact();
    for (i, comp) in a.components.iter().enumerate() {
        let want = if comp.length == 1 {
            TermLabel::Reduced(i)
        } else {
            TermLabel::Block(i)
        };
        let block: Vec<&Term> = dec.terms.iter().filter(|t| t.label == want).collect();
        let size = if comp.length == 1 { 1 } else { block_size(comp.length, d) };
        if block.len() != size {
            out.push(format!("component {i}: {} terms, expected {size}", block.len()));
        }
        let support: Vec<Scalar> = comp.support().iter().cloned().map(Scalar::Rational).collect();
        for (k, t) in block.iter().enumerate() {
            if !in_span(&comp.path.points, &t.form) {
                out.push(format!("component {i}: term {k} outside the span"));
            }
            if comp.length > 1 && forms_proportional(&t.form, &support, numeric) {
                out.push(format!("component {i}: term {k} at the support point"));
            }
            if comp.length == 1 && !forms_proportional(&t.form, &support, numeric) {
                out.push(format!("component {i}: reduced term off the support"));
            }
        }
    }
    let labeled = dec
        .terms
        .iter()
        .filter(|t| match t.label {
            TermLabel::Block(i) | TermLabel::Reduced(i) => i < a.components.len(),
            TermLabel::Free => false,
        })
        .count();
    if labeled != dec.terms.len() {
        out.push("terms without a component".into());
    }
    out
}

// ---------------------------------------------------------------------------
// planar schemes

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaneCurveKind {
    SmoothConic,
    LinePair,
    ThreeLines,
}

impl PlaneCurveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlaneCurveKind::SmoothConic => "smooth_conic",
            PlaneCurveKind::LinePair => "line_pair",
            PlaneCurveKind::ThreeLines => "three_lines",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlaneBound {
    pub bound: usize,
    pub kind: PlaneCurveKind,
    pub curve: HomogPoly,
    /// Rational lines making up the curve, when it is a union of lines.
    pub lines: Vec<Vec<Rational>>,
    /// deg(L ∩ A) for the double line, when that case was reached.
    pub line_intersection: Option<usize>,
    pub decomposition: Option<Decomposition>,
}

fn sym3(q: &[Rational], basis: &MonomialBasis) -> Vec<Vec<Rational>> {
    // q = Σ q_m x^m; matrix with x^T S x = q
    let mut s = vec![vec![Rational::new(); 3]; 3];
    for (k, m) in basis.list.iter().enumerate() {
        let idx: Vec<usize> = m.0.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize)).collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            s[i][i] = q[k].clone();
        } else {
            let h = Rational::from(&q[k] / 2u32);
            s[i][j] = h.clone();
            s[j][i] = h;
        }
    }
    s
}

fn linear_poly(l: &[Rational]) -> HomogPoly {
    HomogPoly::from_rational_vector(&MonomialBasis::new(l.len(), 1), l)
}

/// Forms of degree k vanishing on the scheme.
fn forms_through(a: &JetScheme, k: u32) -> (MonomialBasis, Vec<Vec<Rational>>) {
    let basis = MonomialBasis::new(a.m + 1, k);
    let mut rows = Vec::new();
    for c in &a.components {
        for row in jets_in_basis(&c.path, k, c.length, &basis.list) {
            // pairing with 1/multinomial turns jets into evaluation functionals
            rows.push(
                row.into_iter()
                    .zip(&basis.list)
                    .map(|(x, m)| x / Rational::from(m.multinomial()))
                    .collect(),
            );
        }
    }
    let ker = kernel_rational(&rows);
    (basis, ker)
}

fn contains_scheme(curve: &HomogPoly, a: &JetScheme) -> bool {
    let basis = MonomialBasis::new(a.m + 1, curve.degree());
    let Some(q) = curve.rational_vector(&basis) else { return false };
    a.components.iter().all(|c| {
        jets_in_basis(&c.path, curve.degree(), c.length, &basis.list)
            .iter()
            .all(|row| {
                let mut acc = Rational::new();
                for ((x, m), y) in row.iter().zip(&basis.list).zip(&q) {
                    if *x != 0 && *y != 0 {
                        acc += Rational::from(x * y) / Rational::from(m.multinomial());
                    }
                }
                acc == 0
            })
    })
}

/// Order of vanishing of L along each component, capped at its length.
fn line_orders(a: &JetScheme, l: &[Rational]) -> Vec<usize> {
    a.components
        .iter()
        .map(|c| {
            c.path
                .points
                .iter()
                .take(c.length)
                .position(|p| {
                    let mut acc = Rational::new();
                    for (x, y) in p.iter().zip(l) {
                        acc += Rational::from(x * y);
                    }
                    acc != 0
                })
                .unwrap_or(c.length)
        })
        .collect()
}

/// The two lines of a rank-2 conic when they are rational.
fn split_line_pair(s: &[Vec<Rational>]) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let sing = kernel_rational(s);
    if sing.len() != 1 {
        return None;
    }
    let p = &sing[0];
    // a line through two coordinate points missing p
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let mut a = vec![Rational::new(); 3];
        let mut b = vec![Rational::new(); 3];
        a[i] = Rational::from(1);
        b[j] = Rational::from(1);
        let rows = vec![p.clone(), a.clone(), b.clone()];
        if rank_rational(&rows) < 3 {
            continue;
        }
        // q(a + t b) = Q(a) + 2t B(a,b) + t^2 Q(b)
        let bil = |u: &[Rational], v: &[Rational]| {
            let mut acc = Rational::new();
            for r in 0..3 {
                for c in 0..3 {
                    acc += Rational::from(&u[r] * &s[r][c]) * &v[c];
                }
            }
            acc
        };
        let poly = RatPoly::new(vec![bil(&a, &a), Rational::from(bil(&a, &b) * 2u32), bil(&b, &b)]);
        let cross = |u: &[Rational], v: &[Rational]| -> Vec<Rational> {
            vec![
                Rational::from(&u[1] * &v[2]) - Rational::from(&u[2] * &v[1]),
                Rational::from(&u[2] * &v[0]) - Rational::from(&u[0] * &v[2]),
                Rational::from(&u[0] * &v[1]) - Rational::from(&u[1] * &v[0]),
            ]
        };
        let pts: Vec<Vec<Rational>> = match poly.degree() {
            Some(2) => {
                let roots = poly.rational_roots(&rug::Integer::from(1_000_000_000u64), 256);
                if roots.len() != 2 {
                    return None;
                }
                roots
                    .iter()
                    .map(|t| (0..3).map(|k| Rational::from(&a[k] + Rational::from(t * &b[k]))).collect())
                    .collect()
            }
            Some(1) => {
                let t = Rational::from(-poly.coeff(0) / poly.coeff(1));
                let q1: Vec<Rational> = (0..3).map(|k| Rational::from(&a[k] + Rational::from(&t * &b[k]))).collect();
                vec![q1, b.clone()]
            }
            _ => continue,
        };
        return Some((cross(p, &pts[0]), cross(p, &pts[1])));
    }
    None
}

/// A line through the point p other than the excluded lines.
fn line_through(p: &[Rational], avoid: &[Vec<Rational>], rng: &mut rand_chacha::ChaCha8Rng) -> Vec<Rational> {
    loop {
        let w: Vec<Rational> = (0..3).map(|_| random_rational(rng, 20, false)).collect();
        let l = vec![
            Rational::from(&p[1] * &w[2]) - Rational::from(&p[2] * &w[1]),
            Rational::from(&p[2] * &w[0]) - Rational::from(&p[0] * &w[2]),
            Rational::from(&p[0] * &w[1]) - Rational::from(&p[1] * &w[0]),
        ];
        if l.iter().all(|x| *x == 0) || avoid.iter().any(|a| crate::schemes::proportional(a, &l)) {
            continue;
        }
        return l;
    }
}

/// Upper bound for the rank of a planar f in the span of a degree-5 scheme:
/// 2d when the scheme lies on a reduced conic, 3d otherwise.
pub fn plane_upper_bound(
    f: &HomogPoly,
    a: &JetScheme,
    d: u32,
    seed: u64,
    retries: usize,
) -> Result<PlaneBound, WitnessError> {
    if a.m != 2 || f.num_vars() != 3 || f.degree() != d {
        return Err(WitnessError::NotPlanar);
    }
    let fb = MonomialBasis::new(3, d);
    let rows = crate::schemes::span_rows(a, d, &fb.list);
    let target = f.rational_vector(&fb).ok_or(WitnessError::NotInSpan)?;
    if solve_rational(&transpose_rational(&rows), &target).is_none() {
        return Err(WitnessError::NotInSpan);
    }
    let mut rng = rng_from_seed(seed ^ 0x91a4);
    let (cb, conics) = forms_through(a, 2);
    // candidates: basis elements then random combinations
    let mut cands: Vec<Vec<Rational>> = conics.clone();
    if conics.len() > 1 {
        for _ in 0..16 {
            let mut v = vec![Rational::new(); cb.len()];
            for k in &conics {
                let c = random_rational(&mut rng, 20, false);
                for (x, y) in v.iter_mut().zip(k) {
                    *x += Rational::from(y * &c);
                }
            }
            cands.push(v);
        }
    }
    let mut fallback: Option<(Vec<Rational>, usize)> = None;
    let mut chosen: Option<(PlaneCurveKind, Vec<Rational>, Vec<Vec<Rational>>)> = None;
    for q in &cands {
        let s = sym3(q, &cb);
        let r = rank_rational(&s);
        match r {
            3 => {
                chosen = Some((PlaneCurveKind::SmoothConic, q.clone(), Vec::new()));
                break;
            }
            2 => {
                if let Some((l1, l2)) = split_line_pair(&s) {
                    chosen = Some((PlaneCurveKind::LinePair, q.clone(), vec![l1, l2]));
                    break;
                }
            }
            1 if fallback.is_none() => fallback = Some((q.clone(), 1)),
            _ => {}
        }
    }
    let mut line_intersection = None;
    let (kind, curve, lines) = match chosen {
        Some((k, q, lines)) => (k, HomogPoly::from_rational_vector(&cb, &q), lines),
        None => {
            let (q, _) = fallback.ok_or(WitnessError::NotPlanar)?;
            // q = c·L^2; L is any nonzero row of its matrix
            let s = sym3(&q, &cb);
            let l = s.into_iter().find(|r| r.iter().any(|x| *x != 0)).expect("rank 1");
            let orders = line_orders(a, &l);
            let meet: usize = orders.iter().sum();
            line_intersection = Some(meet);
            // residual points: supports of components not contained in L
            let residual: Vec<Vec<Rational>> = a
                .components
                .iter()
                .zip(&orders)
                .filter(|(c, &o)| o < c.length)
                .map(|(c, _)| c.support().to_vec())
                .collect();
            if meet >= 4 {
                let p = residual.first().cloned().unwrap_or_else(|| a.components[0].support().to_vec());
                let dl = line_through(&p, &[l.clone()], &mut rng);
                let curve = linear_poly(&l).mul(&linear_poly(&dl)).expect("same vars");
                (PlaneCurveKind::LinePair, curve, vec![l, dl])
            } else {
                let mut found = None;
                for _ in 0..32 {
                    let mut ls = vec![l.clone()];
                    for k in 0..2 {
                        let p = residual.get(k).or(residual.first()).cloned().unwrap_or_else(|| a.components[0].support().to_vec());
                        let nl = line_through(&p, &ls, &mut rng);
                        ls.push(nl);
                    }
                    let curve = ls
                        .iter()
                        .map(|x| linear_poly(x))
                        .reduce(|x, y| x.mul(&y).expect("same vars"))
                        .expect("three lines");
                    if contains_scheme(&curve, a) {
                        found = Some((curve, ls));
                        break;
                    }
                }
                let (curve, ls) = found.ok_or(WitnessError::NotPlanar)?;
                (PlaneCurveKind::ThreeLines, curve, ls)
            }
        }
    };
    if !contains_scheme(&curve, a) {
        return Err(WitnessError::Verification("curve does not contain the scheme".into()));
    }
    let bound = curve.degree() as usize * d as usize;
    let paths = curve_paths(kind, &curve, &lines, a);
    let mut decomposition = None;
    if let Some(paths) = paths {
        for attempt in 0..retries {
            if let Some(dec) = curve_decomposition(f, &paths, d, seed.wrapping_add(attempt as u64)) {
                if dec.len() <= bound && verify_decomposition(f, &dec, 0.0).ok {
                    decomposition = Some(dec);
                    break;
                }
            }
        }
    }
    Ok(PlaneBound {
        bound,
        kind,
        curve,
        lines,
        line_intersection,
        decomposition,
    })
}

/// Rational parametrizations of the curve's components.
fn curve_paths(
    kind: PlaneCurveKind,
    curve: &HomogPoly,
    lines: &[Vec<Rational>],
    a: &JetScheme,
) -> Option<Vec<CurvePath>> {
    match kind {
        PlaneCurveKind::SmoothConic => {
            let cb = MonomialBasis::new(3, 2);
            let s = sym3(&curve.rational_vector(&cb)?, &cb);
            conic_path(&s, a.components[0].support()).map(|p| vec![p])
        }
        _ => lines
            .iter()
            .map(|l| {
                let k = kernel_rational(&[l.clone()]);
                CurvePath::new(k).ok()
            })
            .collect(),
    }
}

/// t ↦ Q(w) P - 2 B(P, w) w with w = a + t b: second intersection of the line
/// through P with direction w.
fn conic_path(s: &[Vec<Rational>], p: &[Rational]) -> Option<CurvePath> {
    let bil = |u: &[Rational], v: &[Rational]| {
        let mut acc = Rational::new();
        for r in 0..3 {
            for c in 0..3 {
                acc += Rational::from(&u[r] * &s[r][c]) * &v[c];
            }
        }
        acc
    };
    let unit = |i: usize| -> Vec<Rational> { (0..3).map(|k| Rational::from((k == i) as u32)).collect() };
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (a, b) = (unit(i), unit(j));
        if rank_rational(&[p.to_vec(), a.clone(), b.clone()]) < 3 {
            continue;
        }
        let (qa, qab, qb) = (bil(&a, &a), bil(&a, &b), bil(&b, &b));
        let (pa, pb) = (bil(p, &a), bil(p, &b));
        // coefficients of 1, t, t^2
        let pt = |k: usize| -> Vec<Rational> {
            (0..3)
                .map(|c| {
                    let q = match k {
                        0 => qa.clone(),
                        1 => Rational::from(&qab * 2u32),
                        _ => qb.clone(),
                    };
                    let mut v = Rational::from(&q * &p[c]);
                    // -2 (pa + t pb)(a + t b)
                    let lin = match k {
                        0 => Rational::from(&pa * &a[c]),
                        1 => Rational::from(&pa * &b[c]) + Rational::from(&pb * &a[c]),
                        _ => Rational::from(&pb * &b[c]),
                    };
                    v -= lin * 2u32;
                    v
                })
                .collect()
        };
        let path = CurvePath::new(vec![pt(0), pt(1), pt(2)]).ok()?;
        if rank_rational(&path.points) == 3 {
            return Some(path);
        }
    }
    None
}

/// Splits f along the given curve pieces and decomposes each piece with a
/// full-length rational binary decomposition.
fn curve_decomposition(f: &HomogPoly, paths: &[CurvePath], d: u32, seed: u64) -> Option<Decomposition> {
    let basis = MonomialBasis::new(3, d);
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    let mut sizes = Vec::new();
    for p in paths {
        let dd = p.path_degree() as u32 * d;
        let j = jets_in_basis(p, d, dd as usize + 1, &basis.list);
        sizes.push(j.len());
        cols.extend(j);
    }
    // randomize the particular solution by a kernel shift
    let target = f.rational_vector(&basis)?;
    let sys = transpose_rational(&cols);
    let mut y = solve_rational(&sys, &target)?;
    let ker = kernel_rational(&sys);
    let mut rng = rng_from_seed(seed ^ 0x44aa);
    for k in &ker {
        let c = random_rational(&mut rng, 10, false);
        for (a, b) in y.iter_mut().zip(k) {
            *a += Rational::from(b * &c);
        }
    }
    let mut out = Decomposition::new(Vec::new());
    let mut off = 0;
    for (p, &n) in paths.iter().zip(&sizes) {
        let dd = n as u32 - 1;
        let coeffs: Vec<Scalar> = y[off..off + n]
            .iter()
            .enumerate()
            .map(|(j, c)| Scalar::Rational(Rational::from(c * binomial(dd, j as u32))))
            .collect();
        off += n;
        if coeffs.iter().all(|c| c.is_zero()) {
            continue;
        }
        let g = HomogPoly::from_vector(&MonomialBasis::new(2, dd), &coeffs);
        let bin = binary_decomposition_full_length(&g, seed, 16).ok()??;
        out.append(Decomposition::new(push_forward(&bin, p, TermLabel::Free)));
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{canonical_scheme, sample_point};
    use crate::poly::parse_poly;
    use crate::schemes::{JetComponent, SchemeType};

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    fn qv(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn verify_examples() {
        let f = parse_poly("x0^9 + x1^9", None).unwrap();
        let one = |i: usize| -> Vec<Scalar> { (0..2).map(|k| Scalar::from_i64((k == i) as i64)).collect() };
        let dec = Decomposition::new(vec![
            Term { lambda: Scalar::one(), form: one(0), label: TermLabel::Free },
            Term { lambda: Scalar::one(), form: one(1), label: TermLabel::Free },
        ]);
        assert!(verify_decomposition(&f, &dec, 0.0).ok);
        let g = parse_poly("x0^9", Some(2)).unwrap();
        let bad = Decomposition::new(vec![Term { lambda: Scalar::one(), form: one(1), label: TermLabel::Free }]);
        assert!(!verify_decomposition(&g, &bad, 0.0).ok);
        // proportional forms are rejected even when the sum matches
        let two = Decomposition::new(vec![
            Term { lambda: Scalar::from_frac(1, 2), form: one(0), label: TermLabel::Free },
            Term { lambda: Scalar::from_frac(1, 2), form: one(0), label: TermLabel::Free },
        ]);
        assert!(!verify_decomposition(&g, &two, 0.0).ok);
    }

    #[test]
    fn line_jet_pushes_forward() {
        let f = parse_poly("9*x0^8*x1", None).unwrap();
        let path = CurvePath::new(vec![qv(&[1, 0]), qv(&[0, 1])]).unwrap();
        let dec = crate::sylvester::curve_rank_decomposition(&f, &path, 9, &SylvesterConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(dec.len(), 9);
        assert!(verify_decomposition(&f, &dec, 0.0).ok);
    }

    fn check_type(ty: &str, m: usize, d: u32, seed: u64) -> Decomposition {
        let t: SchemeType = ty.parse().unwrap();
        let a = canonical_scheme(&t, m).unwrap();
        let sp = sample_point(&a, d, seed, 100).unwrap();
        let dec = decompose(&sp, &SylvesterConfig { seed, ..Default::default() }).unwrap();
        assert!(verify_decomposition(&sp.f, &dec, 1e-40).ok);
        assert_eq!(structure_failures(&dec, &sp.scheme, d), Vec::<String>::new());
        dec
    }

    #[test]
    fn decompose_small_types() {
        assert_eq!(check_type("5:1,1,1,1,1", 4, 9, 1).len(), 5);
        let dec = check_type("4:2,1,1,1", 4, 9, 2);
        assert_eq!(dec.len(), 12);
        assert_eq!(dec.terms.iter().filter(|t| t.label == TermLabel::Block(0)).count(), 9);
        assert_eq!(check_type("3:2,2,1", 4, 10, 3).len(), 21);
    }

    #[test]
    fn decompose_curve_types() {
        assert_eq!(check_type("2:3,2", 4, 9, 4).len(), 26);
        assert_eq!(check_type("1:5", 4, 9, 5).len(), 33);
    }

    #[test]
    fn structure_rejects_term_at_support() {
        let t: SchemeType = "4:2,1,1,1".parse().unwrap();
        let a = canonical_scheme(&t, 4).unwrap();
        let sp = sample_point(&a, 9, 8, 100).unwrap();
        let mut dec = decompose(&sp, &SylvesterConfig::default()).unwrap();
        assert!(structure_check(&dec, &sp.scheme, 9));
        let pos = dec.terms.iter().position(|t| t.label == TermLabel::Block(0)).unwrap();
        dec.terms[pos].form = a.components[0].support().iter().cloned().map(Scalar::Rational).collect();
        assert!(!structure_check(&dec, &sp.scheme, 9));
    }

    fn planar_scheme(comps: Vec<(Vec<Vec<i64>>, usize)>) -> JetScheme {
        JetScheme::new(
            2,
            comps
                .into_iter()
                .map(|(pts, len)| {
                    JetComponent::new(CurvePath::new(pts.iter().map(|p| qv(p)).collect()).unwrap(), len).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    fn planar_form(a: &JetScheme, d: u32) -> HomogPoly {
        let coeffs: Vec<Vec<Rational>> = a
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (0..c.length).map(|j| q((i + 2 * j + 1) as i64)).collect())
            .collect();
        crate::construct::form_from_scheme(a, d, &coeffs).unwrap()
    }

    #[test]
    fn plane_smooth_conic() {
        // five points on x0*x2 = x1^2
        let pts: Vec<Vec<Rational>> = [0i64, 1, 2, 3, -1].iter().map(|&t| qv(&[1, t, t * t])).collect();
        let a = JetScheme::from_points(2, &pts).unwrap();
        let f = planar_form(&a, 9);
        let b = plane_upper_bound(&f, &a, 9, 1, 64).unwrap();
        assert_eq!(b.bound, 18);
        assert_eq!(b.kind, PlaneCurveKind::SmoothConic);
        let dec = b.decomposition.unwrap();
        assert!(dec.len() <= 18);
        assert!(verify_decomposition(&f, &dec, 0.0).ok);
    }

    #[test]
    fn plane_four_on_a_line() {
        let mut comps: Vec<(Vec<Vec<i64>>, usize)> = [0i64, 1, 2, 3].iter().map(|&t| (vec![vec![1, t, 0]], 1)).collect();
        comps.push((vec![vec![1, 1, 1]], 1));
        let a = planar_scheme(comps);
        let f = planar_form(&a, 9);
        let b = plane_upper_bound(&f, &a, 9, 2, 64).unwrap();
        assert_eq!(b.bound, 18);
        assert_eq!(b.kind, PlaneCurveKind::LinePair);
        assert!(b.lines.iter().any(|l| crate::schemes::proportional(l, &qv(&[0, 0, 1]))));
        assert!(verify_decomposition(&f, b.decomposition.as_ref().unwrap(), 0.0).ok);
    }

    #[test]
    fn plane_double_line_three() {
        // two jets transverse to x2 = 0 and one point on it
        let a = planar_scheme(vec![
            (vec![vec![1, 0, 0], vec![0, 0, 1]], 2),
            (vec![vec![0, 1, 0], vec![1, 1, 1]], 2),
            (vec![vec![1, 1, 0]], 1),
        ]);
        let f = planar_form(&a, 9);
        let b = plane_upper_bound(&f, &a, 9, 3, 64).unwrap();
        assert_eq!(b.bound, 27);
        assert_eq!(b.kind, PlaneCurveKind::ThreeLines);
        assert_eq!(b.line_intersection, Some(3));
        if let Some(dec) = &b.decomposition {
            assert!(dec.len() <= 27);
            assert!(verify_decomposition(&f, dec, 0.0).ok);
        }
    }
}

//! Sylvester's algorithm for binary forms, with exact witnesses where possible.
//!
//! A binary form g of degree D is written g = Σ_j g_j x^{D-j} y^j and its
//! moments are F_j = g_j / C(D, j). A dual form h = Σ_i h_i X^{r-i} Y^i is
//! apolar to g when Σ_i h_i F_{i+k} = 0 for every k ≤ D - r. A root [α:β] of h
//! stands for the linear form αx + βy.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::construct::{random_rational, rng_from_seed};
use crate::linalg::{
    kernel_rational, rank_rational, solve_linear, solve_rational, transpose_rational, Matrix,
};
use crate::poly::{
    jets_in_basis, substitute_linear, sum_of_powers, CurvePath, HomogPoly, LinearForm, Monomial,
    MonomialBasis,
};
use crate::scalar::{binomial, BigComplex, Cyclotomic, CyclotomicField, Exactness, Scalar};
use crate::univariate::RatPoly;
use crate::witness::{Decomposition, Term, TermLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SylvesterError {
    #[error("zero binary form")]
    ZeroForm,
    #[error("expected a binary form with rational coefficients")]
    NotBinary,
    #[error("form is not in the span of the curve's Veronese image")]
    NotOnCurve,
    #[error("pushed-forward decomposition does not reproduce the form")]
    PullbackMismatch,
}

#[derive(Clone, Debug)]
pub struct SylvesterConfig {
    pub seed: u64,
    pub precision: u32,
    pub rational_only: bool,
    /// Relative residual accepted for numeric decompositions.
    pub tolerance: f64,
    /// Denominator cap for rational root extraction.
    pub max_den: Integer,
    /// Random kernel draws before the deterministic sweep.
    pub draws: usize,
}

impl Default for SylvesterConfig {
    fn default() -> Self {
        SylvesterConfig {
            seed: 0,
            precision: crate::scalar::DEFAULT_PRECISION,
            rational_only: false,
            tolerance: 1e-40,
            max_den: Integer::from(1_000_000),
            draws: 32,
        }
    }
}

/// λ_i (α_i x + β_i y)^D summed over the pairs.
#[derive(Clone, Debug)]
pub struct BinaryDecomposition {
    pub pairs: Vec<(Scalar, [Scalar; 2])>,
    pub exactness: Exactness,
    pub residual: Option<f64>,
}

impl BinaryDecomposition {
    fn new(pairs: Vec<(Scalar, [Scalar; 2])>) -> Self {
        let exactness = pairs
            .iter()
            .flat_map(|(l, r)| [l.exactness(), r[0].exactness(), r[1].exactness()])
            .max()
            .unwrap_or(Exactness::Rational);
        BinaryDecomposition {
            pairs,
            exactness,
            residual: None,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Σ λ (αx + βy)^D as a binary form.
    pub fn expand(&self, degree: u32) -> HomogPoly {
        let terms: Vec<(Scalar, LinearForm)> = self
            .pairs
            .iter()
            .map(|(lam, [a, b])| (lam.clone(), LinearForm::new(vec![a.clone(), b.clone()]).expect("nonzero root")))
            .collect();
        if terms.is_empty() {
            return HomogPoly::zero(2, degree);
        }
        sum_of_powers(&terms, degree)
    }
}

fn powers(a: &Scalar, n: u32) -> Vec<Scalar> {
    let mut v = Vec::with_capacity(n as usize + 1);
    v.push(Scalar::one());
    for i in 1..=n as usize {
        let next = v[i - 1].mul(a);
        v.push(next);
    }
    v
}

/// g_j, the coefficient of x^{D-j} y^j.
fn binary_coeffs(g: &HomogPoly) -> Result<Vec<Rational>, SylvesterError> {
    if g.num_vars() != 2 {
        return Err(SylvesterError::NotBinary);
    }
    if g.is_zero() {
        return Err(SylvesterError::ZeroForm);
    }
    let d = g.degree();
    (0..=d)
        .map(|j| {
            g.coeff(&Monomial(vec![d - j, j]))
                .to_rational()
                .ok_or(SylvesterError::NotBinary)
        })
        .collect()
}

fn moments_of(coeffs: &[Rational]) -> Vec<Rational> {
    let d = coeffs.len() as u32 - 1;
    coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| Rational::from(c / Rational::from(binomial(d, j as u32))))
        .collect()
}

fn hankel_rows(mom: &[Rational], r: usize) -> Vec<Vec<Rational>> {
    let d = mom.len() - 1;
    (0..=r)
        .map(|i| (0..=d - r).map(|k| mom[i + k].clone()).collect())
        .collect()
}

/// Basis of the degree-r apolar forms (coefficient vectors h_0..h_r).
fn apolar_kernel(mom: &[Rational], r: usize) -> Vec<Vec<Rational>> {
    kernel_rational(&transpose_rational(&hankel_rows(mom, r)))
}

/// Outcome of the rank computation.
#[derive(Clone, Debug)]
pub struct SylvesterInfo {
    pub degree: u32,
    pub r1: usize,
    pub kernel: Vec<Vec<Rational>>,
    pub rank: usize,
    /// A square-free apolar form of degree r1, when one was found.
    pub squarefree: Option<Vec<Rational>>,
}

/// p(t) = h(t, 1) and the multiplicity of the root at infinity.
fn dehomogenize(h: &[Rational]) -> (RatPoly, usize) {
    let r = h.len() - 1;
    let p = RatPoly::new((0..=r).map(|k| h[r - k].clone()).collect());
    let deg = p.degree().unwrap_or(0);
    (p, r - deg)
}

pub fn is_squarefree_dual(h: &[Rational]) -> bool {
    if h.iter().all(|x| *x == 0) {
        return false;
    }
    let (p, inf) = dehomogenize(h);
    inf <= 1 && p.is_squarefree()
}

/// The support point s with h = c·L^r and L(s) = 0, if h is such a power.
fn pure_power_root(h: &[Rational]) -> Option<[Rational; 2]> {
    let r = h.len() - 1;
    let (p, inf) = dehomogenize(h);
    if inf == r {
        return Some([Rational::from(1), Rational::new()]);
    }
    if inf != 0 {
        return None;
    }
    let lc = p.leading();
    let rho = Rational::from(-p.coeff(r - 1) / (lc.clone() * Rational::from(r as u32)));
    let lin = RatPoly::new(vec![-rho.clone(), Rational::from(1)]);
    let mut q = RatPoly::constant(lc);
    for _ in 0..r {
        q = q.mul(&lin);
    }
    (q == p).then(|| [rho, Rational::from(1)])
}

pub fn sylvester_info(g: &HomogPoly, cfg: &SylvesterConfig) -> Result<SylvesterInfo, SylvesterError> {
    let coeffs = binary_coeffs(g)?;
    let d = g.degree() as usize;
    let mom = moments_of(&coeffs);
    let mut r1 = d / 2 + 1;
    for r in 1..=d / 2 + 1 {
        let rows = hankel_rows(&mom, r);
        if rank_rational(&rows) < r + 1 {
            r1 = r;
            break;
        }
    }
    if d == 0 {
        r1 = 0;
    }
    let kernel = if d == 0 { Vec::new() } else { apolar_kernel(&mom, r1) };
    let squarefree = find_squarefree(&kernel, cfg);
    let rank = if d == 0 || squarefree.is_some() {
        r1.max(1)
    } else {
        d - r1 + 2
    };
    Ok(SylvesterInfo {
        degree: d as u32,
        r1,
        kernel,
        rank,
        squarefree,
    })
}

/// Random draws then a sweep over small integer combinations.
fn find_squarefree(kernel: &[Vec<Rational>], cfg: &SylvesterConfig) -> Option<Vec<Rational>> {
    if kernel.is_empty() {
        return None;
    }
    if kernel.len() == 1 {
        return is_squarefree_dual(&kernel[0]).then(|| kernel[0].clone());
    }
    let combine = |w: &[i64]| -> Vec<Rational> {
        let n = kernel[0].len();
        let mut v = vec![Rational::new(); n];
        for (k, c) in kernel.iter().zip(w) {
            if *c != 0 {
                for (a, b) in v.iter_mut().zip(k) {
                    *a += Rational::from(b * *c);
                }
            }
        }
        v
    };
    let mut rng = rng_from_seed(cfg.seed ^ 0x5f5f);
    for _ in 0..cfg.draws {
        let w: Vec<i64> = kernel.iter().map(|_| rng.gen_range(-50..=50)).collect();
        let v = combine(&w);
        if is_squarefree_dual(&v) {
            return Some(v);
        }
    }
    let k = kernel.len().min(6);
    let mut w = vec![-2i64; k];
    loop {
        let mut full = w.clone();
        full.resize(kernel.len(), 0);
        let v = combine(&full);
        if is_squarefree_dual(&v) {
            return Some(v);
        }
        let mut i = 0;
        loop {
            if i == k {
                return None;
            }
            if w[i] < 2 {
                w[i] += 1;
                break;
            }
            w[i] = -2;
            i += 1;
        }
    }
}

pub fn binary_rank(g: &HomogPoly) -> Result<usize, SylvesterError> {
    Ok(sylvester_info(g, &SylvesterConfig::default())?.rank)
}

/// Solves for λ given the roots, exactly or numerically.
fn solve_lambdas(mom: &[Rational], roots: &[[Scalar; 2]], prec: u32) -> Option<Vec<Scalar>> {
    let d = mom.len() as u32 - 1;
    let r = roots.len();
    let pw: Vec<(Vec<Scalar>, Vec<Scalar>)> = roots
        .iter()
        .map(|[a, b]| (powers(a, d), powers(b, d)))
        .collect();
    let rows: Vec<Vec<Scalar>> = (0..=d as usize)
        .map(|j| {
            pw.iter()
                .map(|(ap, bp)| ap[d as usize - j].mul(&bp[j]))
                .collect()
        })
        .collect();
    let exact = roots.iter().all(|[a, b]| a.is_exact() && b.is_exact());
    if exact {
        if let Some(rat) = rows
            .iter()
            .map(|row| row.iter().map(|x| x.to_rational()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()
        {
            return solve_rational(&rat, mom).map(|v| v.into_iter().map(Scalar::Rational).collect());
        }
        let m = Matrix::from_rows(rows).ok()?;
        let b: Vec<Scalar> = mom.iter().cloned().map(Scalar::Rational).collect();
        return solve_linear(&m, &b).ok().flatten();
    }
    // normal equations A^H A λ = A^H F
    let a: Vec<Vec<BigComplex>> = rows
        .iter()
        .map(|row| row.iter().map(|x| x.to_complex(prec)).collect())
        .collect();
    let f: Vec<BigComplex> = mom.iter().map(|x| BigComplex::from_rational(x, prec)).collect();
    let mut n = vec![vec![Scalar::zero(); r]; r];
    let mut rhs = vec![Scalar::zero(); r];
    for i in 0..r {
        for k in 0..r {
            let mut acc = BigComplex::zero(prec);
            for row in &a {
                acc = acc.add(&row[i].conj().mul(&row[k]));
            }
            n[i][k] = Scalar::Complex(acc);
        }
        let mut acc = BigComplex::zero(prec);
        for (row, fj) in a.iter().zip(&f) {
            acc = acc.add(&row[i].conj().mul(fj));
        }
        rhs[i] = Scalar::Complex(acc);
    }
    let m = Matrix::from_rows(n).ok()?;
    solve_linear(&m, &rhs).ok().flatten()
}

fn pairs_distinct(roots: &[[Scalar; 2]]) -> bool {
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let c = roots[i][0].mul(&roots[j][1]).sub(&roots[j][0].mul(&roots[i][1]));
            if c.is_zero() {
                return false;
            }
        }
    }
    true
}

/// All r roots of h as rational points, if they are rational and distinct.
fn rational_points(h: &[Rational], cfg: &SylvesterConfig) -> Option<Vec<[Scalar; 2]>> {
    let r = h.len() - 1;
    let (p, inf) = dehomogenize(h);
    if inf > 1 {
        return None;
    }
    let roots = p.rational_roots(&cfg.max_den, cfg.precision);
    if roots.len() + inf != r {
        return None;
    }
    let mut out: Vec<[Scalar; 2]> = roots
        .into_iter()
        .map(|x| [Scalar::Rational(x), Scalar::one()])
        .collect();
    if inf == 1 {
        out.push([Scalar::one(), Scalar::zero()]);
    }
    Some(out)
}

fn numeric_points(h: &[Rational], prec: u32) -> Vec<[Scalar; 2]> {
    let (p, inf) = dehomogenize(h);
    let mut out: Vec<[Scalar; 2]> = p
        .complex_roots(prec)
        .into_iter()
        .map(|z| [Scalar::Complex(z), Scalar::one()])
        .collect();
    if inf == 1 {
        out.push([Scalar::one(), Scalar::zero()]);
    }
    out
}

fn finish(
    g: &HomogPoly,
    mom: &[Rational],
    roots: Vec<[Scalar; 2]>,
    cfg: &SylvesterConfig,
) -> Option<BinaryDecomposition> {
    let lambdas = solve_lambdas(mom, &roots, cfg.precision)?;
    let pairs: Vec<(Scalar, [Scalar; 2])> = lambdas.into_iter().zip(roots).collect();
    let mut dec = BinaryDecomposition::new(pairs);
    let res = binary_residual(g, &dec);
    if dec.exactness.is_exact() {
        (res == 0.0).then_some(dec)
    } else {
        dec.residual = Some(res);
        (res < cfg.tolerance).then_some(dec)
    }
}

/// max |coefficient of (g - expansion)| / max |coefficient of g|; exactly 0
/// for exact decompositions that reproduce g.
pub fn binary_residual(g: &HomogPoly, dec: &BinaryDecomposition) -> f64 {
    let e = dec.expand(g.degree());
    let diff = g.sub(&e).expect("same shape");
    if diff.is_zero() {
        return 0.0;
    }
    let scale = g.max_abs().max(f64::MIN_POSITIVE);
    let m = diff.max_abs() / scale;
    if m == 0.0 {
        // nonzero but below f64 range
        f64::MIN_POSITIVE
    } else {
        m
    }
}

pub fn verify_binary(g: &HomogPoly, dec: &BinaryDecomposition, tolerance: f64) -> bool {
    if !pairs_distinct(&dec.pairs.iter().map(|p| p.1.clone()).collect::<Vec<_>>()) {
        return false;
    }
    let r = binary_residual(g, dec);
    if dec.exactness.is_exact() {
        r == 0.0
    } else {
        r < tolerance
    }
}

/// A decomposition of the rank's length: rational when one is found, then
/// cyclotomic (jet forms), then numeric unless `rational_only`.
pub fn binary_decomposition(
    g: &HomogPoly,
    cfg: &SylvesterConfig,
) -> Result<Option<BinaryDecomposition>, SylvesterError> {
    let coeffs = binary_coeffs(g)?;
    let d = g.degree();
    let mom = moments_of(&coeffs);
    if d == 0 {
        let dec = BinaryDecomposition::new(vec![(
            Scalar::Rational(coeffs[0].clone()),
            [Scalar::one(), Scalar::zero()],
        )]);
        return Ok(Some(dec));
    }
    let info = sylvester_info(g, cfg)?;
    let rank = info.rank;

    // square-free generator with rational roots
    if rank == info.r1 {
        let mut cands: Vec<Vec<Rational>> = info.squarefree.iter().cloned().collect();
        if info.kernel.len() > 1 {
            let mut rng = rng_from_seed(cfg.seed ^ 0xa5a5);
            for _ in 0..cfg.draws {
                let mut v = vec![Rational::new(); info.kernel[0].len()];
                for k in &info.kernel {
                    let c = random_rational(&mut rng, 20, false);
                    for (a, b) in v.iter_mut().zip(k) {
                        *a += Rational::from(b * &c);
                    }
                }
                cands.push(v);
            }
        }
        for h in &cands {
            if !is_squarefree_dual(h) {
                continue;
            }
            if let Some(pts) = rational_points(h, cfg) {
                if let Some(dec) = finish(g, &mom, pts, cfg) {
                    return Ok(Some(dec));
                }
            }
        }
    }

    // jet forms: some apolar form of degree r1 is a pure power
    for h in &info.kernel {
        if let Some(s) = pure_power_root(h) {
            if let Some(dec) = jet_decomposition(g, &s, info.r1 - 1, cfg) {
                if !(cfg.rational_only && dec.exactness != Exactness::Rational) {
                    return Ok(Some(dec));
                }
            }
        }
    }

    if cfg.rational_only {
        return Ok(None);
    }
    // numeric fallback on a random apolar form of degree `rank`
    let kern = if rank == info.r1 {
        info.kernel.clone()
    } else {
        apolar_kernel(&mom, rank)
    };
    let mut rng = rng_from_seed(cfg.seed ^ 0x3c3c);
    for _ in 0..8 {
        let mut v = vec![Rational::new(); rank + 1];
        for k in &kern {
            let c = random_rational(&mut rng, 50, false);
            for (a, b) in v.iter_mut().zip(k) {
                *a += Rational::from(b * &c);
            }
        }
        if !is_squarefree_dual(&v) {
            continue;
        }
        let pts = numeric_points(&v, cfg.precision);
        if pts.len() != rank {
            continue;
        }
        if let Some(dec) = finish(g, &mom, pts, cfg) {
            return Ok(Some(dec));
        }
    }
    Ok(None)
}

/// Maps g to normal form u^{D-e} q(u, v) with support s sent to u, builds the
/// jet witness there and maps the roots back.
fn jet_decomposition(
    g: &HomogPoly,
    s: &[Rational; 2],
    e: usize,
    cfg: &SylvesterConfig,
) -> Option<BinaryDecomposition> {
    let d = g.degree() as usize;
    // T with T^T s = (1, 0): columns c1·s = 1, c2·s = 0
    let (a, b) = (&s[0], &s[1]);
    let c1 = if *a != 0 {
        [Rational::from(a.recip_ref()), Rational::new()]
    } else {
        [Rational::new(), Rational::from(b.recip_ref())]
    };
    let c2 = [Rational::from(-b), a.clone()];
    let t = vec![vec![c1[0].clone(), c2[0].clone()], vec![c1[1].clone(), c2[1].clone()]];
    let tm = Matrix::from_rational_rows(&t).ok()?;
    let gp = substitute_linear(g, &tm).ok()?;
    let coeffs = binary_coeffs(&gp).ok()?;
    if coeffs[e + 1..].iter().any(|x| *x != 0) || coeffs[e] == 0 {
        return None;
    }
    let mom = moments_of(&coeffs);
    let r = d - e + 1;
    let (lambdas, rhos) = jet_witness(&mom, e, r, cfg)?;
    // ℓ' = ρ u + v in normal coordinates; ℓ = T^{-T} ℓ'
    let tinv = crate::linalg::inverse_rational(&t)?;
    let tit = transpose_rational(&tinv);
    let pairs: Vec<(Scalar, [Scalar; 2])> = lambdas
        .into_iter()
        .zip(rhos)
        .map(|(lam, rho)| {
            let v = [rho, Scalar::one()];
            let back = [
                v[0].scale_rational(&tit[0][0]).add(&v[1].scale_rational(&tit[0][1])),
                v[0].scale_rational(&tit[1][0]).add(&v[1].scale_rational(&tit[1][1])),
            ];
            (lam, back)
        })
        .collect();
    let dec = BinaryDecomposition::new(pairs);
    (binary_residual(g, &dec) == 0.0).then_some(dec)
}

/// Smallest orbit size n > e(e-1) with small φ(n) used for jets of order e.
fn orbit_order(e: usize) -> u32 {
    match e {
        0 | 1 => 1,
        2 => 3,
        3 => 8,
        4 => 14,
        _ => (e * (e - 1) + 1) as u32,
    }
}

/// Roots ρ_1..ρ_r and weights λ_i with Σ λ_i ρ_i^k = M_k for the moments
/// M_k = F_{D-k}; M_k vanishes for k < r - 1.
fn jet_witness(
    mom: &[Rational],
    e: usize,
    r: usize,
    cfg: &SylvesterConfig,
) -> Option<(Vec<Scalar>, Vec<Scalar>)> {
    let d = mom.len() - 1;
    let m_at = |k: usize| mom[d - k].clone();
    let top = m_at(r - 1);
    // complete homogeneous sums of the roots: H_m = M_{r-1+m} / M_{r-1}
    let hs: Vec<Rational> = (1..=e)
        .map(|m| Rational::from(m_at(r - 1 + m) / top.clone()))
        .collect();
    // power sums by Newton: m H_m = Σ_{k=1}^m P_k H_{m-k}
    let mut ps: Vec<Rational> = Vec::with_capacity(e);
    for m in 1..=e {
        let mut p = Rational::from(&hs[m - 1] * Rational::from(m as u32));
        for k in 1..m {
            p -= Rational::from(&ps[k - 1] * &hs[m - k - 1]);
        }
        ps.push(p);
    }
    let roots = if e == 1 {
        // any distinct rationals with the prescribed sum
        let mut rng = rng_from_seed(cfg.seed ^ 0x1e1e);
        let mut v: Vec<Rational> = Vec::with_capacity(r);
        loop {
            v.clear();
            let mut sum = Rational::new();
            while v.len() + 1 < r {
                let x = Rational::from(rng.gen_range(-(r as i64) * 2..=(r as i64) * 2));
                if !v.contains(&x) {
                    sum += &x;
                    v.push(x);
                }
            }
            let last = Rational::from(&ps[0] - &sum);
            if !v.contains(&last) {
                v.push(last);
                break;
            }
        }
        v.into_iter().map(Scalar::Rational).collect()
    } else if ps.iter().all(|p| *p == 0) && r > e {
        roots_of_unity(r)
    } else {
        orbit_roots(&ps, e, r, cfg)?
    };
    let mut lambdas = Vec::with_capacity(r);
    let top_s = Scalar::Rational(top);
    for i in 0..r {
        let mut prod = Scalar::one();
        for j in 0..r {
            if i != j {
                prod = prod.mul(&roots[i].sub(&roots[j]));
            }
        }
        lambdas.push(top_s.div(&prod).ok()?);
    }
    Some((lambdas, roots))
}

fn roots_of_unity(r: usize) -> Vec<Scalar> {
    let field = CyclotomicField::new(r as u32);
    (0..r as i64)
        .map(|k| Scalar::from(Cyclotomic::root_of_unity(&field, k)))
        .collect()
}

type Laurent = BTreeMap<i64, Rational>;

fn laurent_mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (i, x) in a {
        for (j, y) in b {
            *out.entry(i + j).or_default() += Rational::from(x * y);
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

/// r - n random rationals plus the orbit F(ζ_n^i), where
/// F(z) = a + z + Σ_{j=1}^{e-1} t_j z^{-j} is solved so the power sums match.
fn orbit_roots(ps: &[Rational], e: usize, r: usize, cfg: &SylvesterConfig) -> Option<Vec<Scalar>> {
    let n = orbit_order(e) as usize;
    if r < n {
        return None;
    }
    let mut rng = rng_from_seed(cfg.seed ^ 0x0b17);
    let field: Arc<CyclotomicField> = CyclotomicField::new(n as u32);
    for _attempt in 0..16 {
        let mut free: Vec<Rational> = Vec::with_capacity(r - n);
        while free.len() < r - n {
            let x = Rational::from(rng.gen_range(-(r as i64) * 2..=(r as i64) * 2));
            if !free.contains(&x) {
                free.push(x);
            }
        }
        // targets for the orbit, divided by n
        let targets: Vec<Rational> = (1..=e)
            .map(|k| {
                let mut t = ps[k - 1].clone();
                for x in &free {
                    t -= Rational::from(rug::ops::Pow::pow(x, k as i32));
                }
                t / Rational::from(n as u32)
            })
            .collect();
        // F = a + z + Σ t_j z^{-j}; [F^k]_0 = k t_{k-1} + (terms in a, t_1..t_{k-2})
        let mut f = Laurent::new();
        f.insert(0, targets[0].clone());
        f.insert(1, Rational::from(1));
        for k in 2..=e {
            let mut pw = f.clone();
            for _ in 1..k {
                pw = laurent_mul(&pw, &f);
            }
            let rest = pw.get(&0).cloned().unwrap_or_default();
            let t = Rational::from(&targets[k - 1] - &rest) / Rational::from(k as u32);
            if t != 0 {
                f.insert(-(k as i64 - 1), t);
            }
        }
        let mut roots: Vec<Scalar> = free.iter().cloned().map(Scalar::Rational).collect();
        for i in 0..n as i64 {
            let mut v = Scalar::zero();
            for (exp, c) in &f {
                let z = Scalar::from(Cyclotomic::root_of_unity(&field, exp * i));
                v = v.add(&z.scale_rational(c));
            }
            roots.push(v);
        }
        let distinct = (0..roots.len()).all(|i| (i + 1..roots.len()).all(|j| roots[i] != roots[j]));
        if distinct {
            return Some(roots);
        }
    }
    None
}

/// A decomposition with exactly D terms and rational roots: D - 1 random
/// roots, the last one solved from the single apolarity condition.
pub fn binary_decomposition_full_length(
    g: &HomogPoly,
    seed: u64,
    attempts: usize,
) -> Result<Option<BinaryDecomposition>, SylvesterError> {
    let coeffs = binary_coeffs(g)?;
    let d = g.degree() as usize;
    let mom = moments_of(&coeffs);
    let mut rng = rng_from_seed(seed ^ 0x7e7e);
    let cfg = SylvesterConfig::default();
    for _ in 0..attempts {
        let mut roots: Vec<Rational> = Vec::new();
        while roots.len() + 1 < d {
            let x = random_rational(&mut rng, 40, false);
            if !roots.contains(&x) {
                roots.push(x);
            }
        }
        // h = ∏(X - c Y) · (X - z Y); h_i is affine in z
        let base = roots.iter().fold(RatPoly::constant(Rational::from(1)), |acc, c| {
            acc.mul(&RatPoly::new(vec![Rational::from(-c), Rational::from(1)]))
        });
        // p(t) = h(t, 1) = base(t)·(t - z); h_i = coefficient of t^{d-i}
        let p0 = base.mul(&RatPoly::from_i64(&[0, 1]));
        let p1 = base.scale(&Rational::from(-1));
        let cond = |p: &RatPoly| -> Rational {
            let mut acc = Rational::new();
            for (i, m) in mom.iter().enumerate() {
                acc += Rational::from(&p.coeff(d - i) * m);
            }
            acc
        };
        let a0 = cond(&p0);
        let a1 = cond(&p1);
        if a1 == 0 {
            continue;
        }
        let z = Rational::from(-a0 / a1);
        if roots.contains(&z) {
            continue;
        }
        roots.push(z);
        let pts: Vec<[Scalar; 2]> = roots
            .into_iter()
            .map(|x| [Scalar::Rational(x), Scalar::one()])
            .collect();
        if let Some(dec) = finish(g, &mom, pts, &cfg) {
            return Ok(Some(dec));
        }
    }
    Ok(None)
}

/// Binary form of degree e·d whose image under the jet map is f:
/// u^{D-j} v^j ↦ jet_j / C(D, j).
pub fn pullback_to_binary(
    f: &HomogPoly,
    path: &CurvePath,
    d: u32,
) -> Result<HomogPoly, SylvesterError> {
    let e = path.path_degree() as u32;
    let dd = e * d;
    let basis = MonomialBasis::new(path.num_vars(), d);
    let jets = jets_in_basis(path, d, dd as usize + 1, &basis.list);
    let target = f.rational_vector(&basis).ok_or(SylvesterError::NotOnCurve)?;
    let y = solve_rational(&transpose_rational(&jets), &target).ok_or(SylvesterError::NotOnCurve)?;
    let coeffs: Vec<Scalar> = y
        .into_iter()
        .enumerate()
        .map(|(j, c)| Scalar::Rational(c * Rational::from(binomial(dd, j as u32))))
        .collect();
    Ok(HomogPoly::from_vector(&MonomialBasis::new(2, dd), &coeffs))
}

/// Pushes the binary root [α:β] to the point Σ_k α^{e-k} β^k p_k.
pub fn push_forward(dec: &BinaryDecomposition, path: &CurvePath, label: TermLabel) -> Vec<Term> {
    dec.pairs
        .iter()
        .map(|(lam, [a, b])| Term {
            lambda: lam.clone(),
            form: path.eval_homog(a, b),
            label,
        })
        .collect()
}

/// Waring decomposition of f supported on the rational normal curve of `path`.
pub fn curve_rank_decomposition(
    f: &HomogPoly,
    path: &CurvePath,
    d: u32,
    cfg: &SylvesterConfig,
) -> Result<Option<Decomposition>, SylvesterError> {
    let g = pullback_to_binary(f, path, d)?;
    let Some(bin) = binary_decomposition(&g, cfg)? else {
        return Ok(None);
    };
    let dec = Decomposition::new(push_forward(&bin, path, TermLabel::Block(0)));
    if !crate::witness::verify_decomposition(f, &dec, cfg.tolerance).ok {
        return Err(SylvesterError::PullbackMismatch);
    }
    Ok(Some(dec))
}

/// Residual in the sense of `binary_residual` for any complex-valued check.
pub fn relative_float(x: &Float, scale: f64) -> f64 {
    x.to_f64() / scale.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn b(s: &str) -> HomogPoly {
        parse_poly(s, Some(2)).unwrap()
    }

    fn xy(a: u32, bb: u32) -> HomogPoly {
        HomogPoly::monomial(Monomial(vec![a, bb]), Scalar::one())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(binary_rank(&b("x0^9")).unwrap(), 1);
        assert_eq!(binary_rank(&b("x0^8*x1")).unwrap(), 9);
        assert_eq!(binary_rank(&xy(32, 4)).unwrap(), 33);
        assert_eq!(binary_rank(&b("x0^4 + x1^4")).unwrap(), 2);
        assert!(matches!(binary_rank(&HomogPoly::zero(2, 3)), Err(SylvesterError::ZeroForm)));
    }

    #[test]
    fn power_sum_decomposes_rationally() {
        let g = b("x0^4 + x1^4");
        let dec = binary_decomposition(&g, &SylvesterConfig::default()).unwrap().unwrap();
        assert_eq!(dec.len(), 2);
        assert_eq!(dec.exactness, Exactness::Rational);
        assert!(verify_binary(&g, &dec, 0.0));
    }

    #[test]
    fn linear_jet_has_rational_witness() {
        let g = b("x0^8*x1");
        let dec = binary_decomposition(&g, &SylvesterConfig::default()).unwrap().unwrap();
        assert_eq!(dec.len(), 9);
        assert_eq!(dec.exactness, Exactness::Rational);
        assert!(verify_binary(&g, &dec, 0.0));
    }

    #[test]
    fn higher_jets_use_roots_of_unity() {
        let g = xy(32, 4);
        let cfg = SylvesterConfig::default();
        let dec = binary_decomposition(&g, &cfg).unwrap().unwrap();
        assert_eq!(dec.len(), 33);
        assert_eq!(dec.exactness, Exactness::Cyclotomic);
        assert!(verify_binary(&g, &dec, 0.0));
        let strict = SylvesterConfig { rational_only: true, ..cfg };
        assert!(binary_decomposition(&g, &strict).unwrap().is_none());
    }

    #[test]
    fn generic_jet_orbit_construction() {
        // u^{D-e} q with generic q, e = 2, 3, 4
        for (e, d) in [(2u32, 18u32), (3, 27), (4, 36)] {
            let mut terms = Vec::new();
            for j in 0..=e {
                let c = Rational::from((j as i64 * 7 - 3, 2)) * Rational::from(binomial(d, j));
                terms.push((Monomial(vec![d - j, j]), Scalar::Rational(c)));
            }
            let g = HomogPoly::from_terms(2, d, terms).unwrap();
            let dec = binary_decomposition(&g, &SylvesterConfig::default()).unwrap().unwrap();
            assert_eq!(dec.len() as u32, d - e + 1);
            assert!(dec.exactness.is_exact());
            assert!(verify_binary(&g, &dec, 0.0));
        }
    }

    #[test]
    fn transformed_jet_is_detected() {
        // (x + y)^7 (x - 2y): a length-2 jet away from the coordinate axes
        let l = crate::poly::LinearForm::from_rationals(&[Rational::from(1), Rational::from(1)]).unwrap();
        let g = crate::poly::power_of_linear(&l, 7).mul(&b("x0 - 2*x1")).unwrap();
        let dec = binary_decomposition(&g, &SylvesterConfig::default()).unwrap().unwrap();
        assert_eq!(dec.len(), 8);
        assert_eq!(dec.exactness, Exactness::Rational);
        assert!(verify_binary(&g, &dec, 0.0));
    }

    #[test]
    fn numeric_fallback_for_irrational_roots() {
        // x^4 + 6x^2y^2 + ... chosen so the generator x^2 - 2y^2 has irrational roots
        let l1 = [Rational::from(1), Rational::from(1)];
        let _ = l1;
        let g = b("x0^5 + 10*x0^3*x1^2 + 20*x0*x1^4");
        let cfg = SylvesterConfig::default();
        let dec = binary_decomposition(&g, &cfg).unwrap().unwrap();
        assert_eq!(dec.len(), binary_rank(&g).unwrap());
        assert!(verify_binary(&g, &dec, cfg.tolerance));
    }

    #[test]
    fn full_length_decomposition_is_rational() {
        let g = b("3*x0^6 - x0^4*x1^2 + 5*x0*x1^5 + 2*x1^6");
        let dec = binary_decomposition_full_length(&g, 3, 16).unwrap().unwrap();
        assert_eq!(dec.len(), 6);
        assert!(verify_binary(&g, &dec, 0.0));
    }
}

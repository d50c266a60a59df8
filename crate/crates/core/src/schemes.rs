//! Curvilinear zero-dimensional schemes given by jets along polynomial paths,
//! their Veronese spans, Hilbert function data, and low-degree curve witnesses
//! for reduced point sets.

use std::fmt;
use std::str::FromStr;

use rug::{Integer, Rational};
use thiserror::Error;

use crate::linalg::{clear_denominators, kernel_rational, rank_rational, Matrix};
use crate::poly::{jets_in_basis, monomials, CurvePath, HomogPoly, Monomial, MonomialBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("bad scheme type: {0}")]
    BadType(String),
    #[error("malformed scheme: {0}")]
    Malformed(String),
    #[error("components {0} and {1} share a support point")]
    DuplicateSupport(usize, usize),
    #[error("point set has a repeated point ({0} and {1})")]
    NonReducedInput(usize, usize),
}

/// (s; b_1, …, b_s) with b_1 ≥ … ≥ b_s ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SchemeType {
    degrees: Vec<usize>,
}

impl SchemeType {
    pub fn new(mut degrees: Vec<usize>) -> Result<Self, SchemeError> {
        if degrees.is_empty() || degrees.contains(&0) {
            return Err(SchemeError::BadType(format!("{degrees:?}")));
        }
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        Ok(SchemeType { degrees })
    }

    pub fn s(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn total(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// The seven types of total degree 5, from (1;5) to (5;1,1,1,1,1).
    pub fn all_degree_five() -> Vec<SchemeType> {
        [
            vec![5],
            vec![3, 2],
            vec![4, 1],
            vec![3, 1, 1],
            vec![2, 2, 1],
            vec![2, 1, 1, 1],
            vec![1, 1, 1, 1, 1],
        ]
        .into_iter()
        .map(|v| SchemeType { degrees: v })
        .collect()
    }
}

impl serde::Serialize for SchemeType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SchemeType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Written `s:b1,b2,...`, e.g. `2:3,2`.
impl fmt::Display for SchemeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.degrees.iter().map(|b| b.to_string()).collect();
        write!(f, "{}:{}", self.s(), b.join(","))
    }
}

impl FromStr for SchemeType {
    type Err = SchemeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SchemeError::BadType(s.to_string());
        let t: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '(' && *c != ')')
            .collect();
        let (count, rest) = t.split_once([':', ';']).ok_or_else(bad)?;
        let count: usize = count.parse().map_err(|_| bad())?;
        let degrees: Vec<usize> = rest
            .split(',')
            .map(|x| x.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if degrees.len() != count {
            return Err(bad());
        }
        SchemeType::new(degrees)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetComponent {
    pub path: CurvePath,
    pub length: usize,
}

impl JetComponent {
    pub fn new(path: CurvePath, length: usize) -> Result<Self, SchemeError> {
        if length == 0 {
            return Err(SchemeError::Malformed("component of length 0".into()));
        }
        Ok(JetComponent {
            path: path.truncate(length),
            length,
        })
    }

    pub fn support(&self) -> &[Rational] {
        self.path.support()
    }

    /// The same point with the last jet order removed (None for a reduced point).
    pub fn truncated(&self) -> Option<JetComponent> {
        (self.length > 1).then(|| JetComponent {
            path: self.path.truncate(self.length - 1),
            length: self.length - 1,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetScheme {
    pub m: usize,
    pub components: Vec<JetComponent>,
}

/// Whether two nonzero vectors are proportional.
pub fn proportional(a: &[Rational], b: &[Rational]) -> bool {
    let n = a.len();
    for i in 0..n {
        for j in i + 1..n {
            if Rational::from(&a[i] * &b[j]) != Rational::from(&a[j] * &b[i]) {
                return false;
            }
        }
    }
    (0..n).all(|i| (a[i] == 0) == (b[i] == 0))
}

impl JetScheme {
    pub fn new(m: usize, components: Vec<JetComponent>) -> Result<Self, SchemeError> {
        if components.is_empty() {
            return Err(SchemeError::Malformed("no components".into()));
        }
        for c in &components {
            if c.path.num_vars() != m + 1 {
                return Err(SchemeError::Malformed(format!(
                    "path in {} coordinates, expected {}",
                    c.path.num_vars(),
                    m + 1
                )));
            }
            if c.path.points.len() < c.length {
                return Err(SchemeError::Malformed(format!(
                    "length {} needs {} path vectors, got {}",
                    c.length,
                    c.length,
                    c.path.points.len()
                )));
            }
        }
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                if proportional(components[i].support(), components[j].support()) {
                    return Err(SchemeError::DuplicateSupport(i, j));
                }
            }
        }
        Ok(JetScheme { m, components })
    }

    /// Reduced scheme on the given points.
    pub fn from_points(m: usize, points: &[Vec<Rational>]) -> Result<Self, SchemeError> {
        let comps = points
            .iter()
            .map(|p| {
                let path = CurvePath::point(p.clone())
                    .map_err(|_| SchemeError::Malformed("zero point".into()))?;
                JetComponent::new(path, 1)
            })
            .collect::<Result<Vec<_>, _>>()?;
        JetScheme::new(m, comps)
    }

    pub fn degree(&self) -> usize {
        self.components.iter().map(|c| c.length).sum()
    }

    pub fn scheme_type(&self) -> SchemeType {
        SchemeType::new(self.components.iter().map(|c| c.length).collect()).expect("lengths ≥ 1")
    }

    /// Applies x ↦ M x to every path vector.
    pub fn transform(&self, m: &[Vec<Rational>]) -> JetScheme {
        JetScheme {
            m: self.m,
            components: self
                .components
                .iter()
                .map(|c| JetComponent {
                    path: c.path.map_points(m),
                    length: c.length,
                })
                .collect(),
        }
    }

    /// Replaces component `i` by its truncation, dropping it if reduced.
    pub fn truncate_component(&self, i: usize) -> Option<JetScheme> {
        let mut comps = self.components.clone();
        match comps[i].truncated() {
            Some(t) => comps[i] = t,
            None => {
                comps.remove(i);
            }
        }
        (!comps.is_empty()).then(|| JetScheme {
            m: self.m,
            components: comps,
        })
    }
}

/// Jet coefficient vectors, component by component, against `basis`.
pub fn span_rows(a: &JetScheme, d: u32, basis: &[Monomial]) -> Vec<Vec<Rational>> {
    let mut rows = Vec::with_capacity(a.degree());
    for c in &a.components {
        rows.extend(jets_in_basis(&c.path, d, c.length, basis));
    }
    rows
}

/// One row per jet, columns indexed by degree-d monomials (largest first).
pub fn veronese_span_matrix(a: &JetScheme, d: u32) -> Matrix {
    let basis = monomials(a.m + 1, d);
    Matrix::from_rational_rows(&span_rows(a, d, &basis)).expect("rectangular")
}

pub fn is_linearly_independent(a: &JetScheme) -> bool {
    let basis = monomials(a.m + 1, 1);
    rank_rational(&span_rows(a, 1, &basis)) == a.degree()
}

/// (h0, h1) of I_A(d).
pub fn hilbert_h0_h1(a: &JetScheme, d: u32) -> (usize, usize) {
    let basis = monomials(a.m + 1, d);
    let r = rank_rational(&span_rows(a, d, &basis));
    (basis.len() - r, a.degree() - r)
}

// ---------------------------------------------------------------------------
// low-degree curve witnesses

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    Line,
    Conic,
    PlaneCubic,
}

impl CurveKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveKind::Line => "line",
            CurveKind::Conic => "conic",
            CurveKind::PlaneCubic => "plane_cubic",
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            CurveKind::Line => 1,
            CurveKind::Conic => 2,
            CurveKind::PlaneCubic => 3,
        }
    }

    /// Incidence count that qualifies at degree d.
    pub fn threshold(&self, d: u32) -> usize {
        match self {
            CurveKind::Line => d as usize + 1,
            CurveKind::Conic => 2 * d as usize + 2,
            CurveKind::PlaneCubic => 3 * d as usize,
        }
    }
}

/// A curve inside the span of `frame` (2 points for a line, 3 for a plane)
/// containing the points of Z listed in `incident`. For plane curves the
/// equation is in frame coordinates.
#[derive(Clone, Debug)]
pub struct CurveWitness {
    pub kind: CurveKind,
    pub count: usize,
    pub frame: Vec<Vec<Rational>>,
    pub equation: Option<HomogPoly>,
    pub incident: Vec<usize>,
}

fn primitive(v: &[Rational]) -> Vec<Integer> {
    let mut ints = clear_denominators(v);
    let mut g = Integer::new();
    for x in &ints {
        g.gcd_mut(x);
    }
    if g > 1 {
        for x in ints.iter_mut() {
            x.div_exact_mut(&g);
        }
    }
    ints
}

/// Integer linear functionals cutting out the span of `frame`.
fn annihilator(frame: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let rows: Vec<Vec<Rational>> = frame
        .iter()
        .map(|r| r.iter().map(|x| Rational::from(x.clone())).collect())
        .collect();
    kernel_rational(&rows).into_iter().map(|k| primitive(&k)).collect()
}

fn on_span(ann: &[Vec<Integer>], p: &[Integer]) -> bool {
    ann.iter().all(|h| {
        let mut acc = Integer::new();
        for (a, b) in h.iter().zip(p) {
            if *a != 0 && *b != 0 {
                acc += Integer::from(a * b);
            }
        }
        acc == 0
    })
}

fn rank_int(rows: &[&Vec<Integer>]) -> usize {
    let r: Vec<Vec<Rational>> = rows
        .iter()
        .map(|v| v.iter().map(|x| Rational::from(x.clone())).collect())
        .collect();
    rank_rational(&r)
}

/// Coordinates of p in the basis `frame` (p is known to lie in the span).
fn frame_coords(frame: &[Vec<Integer>], p: &[Integer]) -> Vec<Rational> {
    let cols: Vec<Vec<Rational>> = (0..p.len())
        .map(|i| frame.iter().map(|f| Rational::from(f[i].clone())).collect())
        .collect();
    let b: Vec<Rational> = p.iter().map(|x| Rational::from(x.clone())).collect();
    crate::linalg::solve_rational(&cols, &b).expect("point lies in the span")
}

fn eval_monomials(p: &[Rational], mons: &[Monomial]) -> Vec<Rational> {
    mons.iter()
        .map(|m| {
            let mut acc = Rational::from(1);
            for (x, &e) in p.iter().zip(&m.0) {
                if e > 0 {
                    acc *= Rational::from(rug::ops::Pow::pow(x, e as i32));
                }
            }
            acc
        })
        .collect()
}

fn eval_rational(h: &HomogPoly, p: &[Rational]) -> Rational {
    h.evaluate_rational(p).expect("rational curve equation")
}

/// h1 of the reduced scheme on Z in degree d.
pub fn points_h1(z: &[Vec<Rational>], d: u32) -> usize {
    if z.is_empty() {
        return 0;
    }
    let mons = monomials(z[0].len(), d);
    let rows: Vec<Vec<Rational>> = z.iter().map(|p| eval_monomials(p, &mons)).collect();
    z.len() - rank_rational(&rows)
}

/// Searches for a line with ≥ d+1, a conic with ≥ 2d+2 or a plane cubic with
/// ≥ 3d points of Z when Z fails to impose independent conditions in degree d.
/// Lines are searched exhaustively, conics and cubics within planes spanned by
/// triples of Z.
pub fn low_degree_curve_witness(
    z: &[Vec<Rational>],
    d: u32,
) -> Result<Option<CurveWitness>, SchemeError> {
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            if proportional(&z[i], &z[j]) {
                return Err(SchemeError::NonReducedInput(i, j));
            }
        }
    }
    if points_h1(z, d) == 0 {
        return Ok(None);
    }
    let pts: Vec<Vec<Integer>> = z.iter().map(|p| primitive(p)).collect();
    if let Some(w) = line_search(&pts, z, d) {
        return Ok(Some(w));
    }
    for kind in [CurveKind::Conic, CurveKind::PlaneCubic] {
        if let Some(w) = plane_search(&pts, z, d, kind) {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

fn line_search(pts: &[Vec<Integer>], z: &[Vec<Rational>], d: u32) -> Option<CurveWitness> {
    let n = pts.len();
    let need = CurveKind::Line.threshold(d);
    let mut seen = vec![vec![false; n]; n];
    let mut best: Option<Vec<usize>> = None;
    for i in 0..n {
        for j in i + 1..n {
            if seen[i][j] {
                continue;
            }
            let ann = annihilator(&[pts[i].clone(), pts[j].clone()]);
            let on: Vec<usize> = (0..n).filter(|&k| on_span(&ann, &pts[k])).collect();
            for &a in &on {
                for &b in &on {
                    if a < b {
                        seen[a][b] = true;
                    }
                }
            }
            if best.as_ref().map_or(true, |b| on.len() > b.len()) {
                best = Some(on);
            }
        }
    }
    let on = best?;
    (on.len() >= need).then(|| CurveWitness {
        kind: CurveKind::Line,
        count: on.len(),
        frame: vec![z[on[0]].clone(), z[on[1]].clone()],
        equation: None,
        incident: on,
    })
}

fn plane_search(
    pts: &[Vec<Integer>],
    z: &[Vec<Rational>],
    d: u32,
    kind: CurveKind,
) -> Option<CurveWitness> {
    let n = pts.len();
    let need = kind.threshold(d);
    if n < need {
        return None;
    }
    let mut done_planes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if done_planes
                    .iter()
                    .any(|pl| pl.contains(&i) && pl.contains(&j) && pl.contains(&k))
                {
                    continue;
                }
                if rank_int(&[&pts[i], &pts[j], &pts[k]]) < 3 {
                    continue;
                }
                let frame = vec![pts[i].clone(), pts[j].clone(), pts[k].clone()];
                let ann = annihilator(&frame);
                let inplane: Vec<usize> = (0..n).filter(|&q| on_span(&ann, &pts[q])).collect();
                done_planes.push(inplane.clone());
                if inplane.len() < need {
                    continue;
                }
                if let Some(w) = curve_in_plane(pts, z, &frame, &inplane, kind, need) {
                    return Some(w);
                }
            }
        }
    }
    None
}

/// Finds a plane curve of the given degree through ≥ need of the in-plane
/// points. Any such curve passes through `dim - 1` of the first
/// `len - need + dim - 1` points, so only those subsets are tried.
fn curve_in_plane(
    pts: &[Vec<Integer>],
    z: &[Vec<Rational>],
    frame: &[Vec<Integer>],
    inplane: &[usize],
    kind: CurveKind,
    need: usize,
) -> Option<CurveWitness> {
    let mons = monomials(3, kind.degree());
    let dim = mons.len();
    let coords: Vec<Vec<Rational>> = inplane.iter().map(|&q| frame_coords(frame, &pts[q])).collect();
    let evals: Vec<Vec<Rational>> = coords.iter().map(|c| eval_monomials(c, &mons)).collect();
    let basis = MonomialBasis::new(3, kind.degree());
    let mk = |kv: &[Rational]| HomogPoly::from_rational_vector(&basis, kv);
    // all in-plane points on one curve
    let all = kernel_rational(&evals);
    if let Some(kv) = all.first() {
        return Some(plane_witness(z, frame, inplane, kind, mk(kv), (0..inplane.len()).collect()));
    }
    let pool = (inplane.len() + dim - 1).saturating_sub(need).min(inplane.len());
    let pick = dim - 1;
    if pool < pick {
        return None;
    }
    let mut idx: Vec<usize> = (0..pick).collect();
    loop {
        let rows: Vec<Vec<Rational>> = idx.iter().map(|&t| evals[t].clone()).collect();
        let ker = kernel_rational(&rows);
        if ker.len() == 1 {
            let eq = mk(&ker[0]);
            let on: Vec<usize> = (0..inplane.len())
                .filter(|&t| eval_rational(&eq, &coords[t]) == 0)
                .collect();
            if on.len() >= need {
                return Some(plane_witness(z, frame, inplane, kind, eq, on));
            }
        }
        // next combination
        let mut t = pick;
        loop {
            if t == 0 {
                return None;
            }
            t -= 1;
            if idx[t] < pool - pick + t {
                idx[t] += 1;
                for u in t + 1..pick {
                    idx[u] = idx[u - 1] + 1;
                }
                break;
            }
        }
    }
}

fn plane_witness(
    z: &[Vec<Rational>],
    frame: &[Vec<Integer>],
    inplane: &[usize],
    kind: CurveKind,
    eq: HomogPoly,
    on: Vec<usize>,
) -> CurveWitness {
    let incident: Vec<usize> = on.iter().map(|&t| inplane[t]).collect();
    let _ = z;
    CurveWitness {
        kind,
        count: incident.len(),
        frame: frame
            .iter()
            .map(|f| f.iter().map(|x| Rational::from(x.clone())).collect())
            .collect(),
        equation: Some(eq),
        incident,
    }
}

/// Re-checks a witness against Z by substitution.
pub fn witness_holds(z: &[Vec<Rational>], w: &CurveWitness) -> bool {
    let frame: Vec<Vec<Integer>> = w.frame.iter().map(|f| primitive(f)).collect();
    if rank_int(&frame.iter().collect::<Vec<_>>()) != frame.len() {
        return false;
    }
    let ann = annihilator(&frame);
    let mut uniq = w.incident.clone();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != w.count {
        return false;
    }
    w.incident.iter().all(|&q| {
        let Some(p) = z.get(q) else { return false };
        let pi = primitive(p);
        if !on_span(&ann, &pi) {
            return false;
        }
        match &w.equation {
            None => true,
            Some(eq) => eval_rational(eq, &frame_coords(&frame, &pi)) == 0,
        }
    })
}

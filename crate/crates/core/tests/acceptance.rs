//! Acceptance criteria 1-7. Each test prints one PASS/FAIL line to stderr.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rug::Rational;

use waring5::apolar::{border_rank_lower_bound, essential_vars};
use waring5::classify::{classify_rank, rank_from_type, same_scheme, verify_certificate};
use waring5::construct::{canonical_scheme, form_from_scheme, rng_from_seed, sample_point};
use waring5::linalg::{inverse_rational, transpose_rational};
use waring5::pipeline::{run_pipeline, transformed_sample, PipelineConfig};
use waring5::poly::{parse_poly, CurvePath};
use waring5::scalar::Exactness;
use waring5::schemes::{
    low_degree_curve_witness, points_h1, proportional, witness_holds, CurveKind, JetComponent,
    JetScheme, SchemeType,
};
use waring5::strata::stratum_dimension;
use waring5::sylvester::{binary_decomposition, binary_rank, binary_residual, SylvesterConfig};
use waring5::witness::{plane_upper_bound, verify_decomposition, PlaneCurveKind};

/// Relative residual accepted for numeric decompositions.
const NUMERIC_TOLERANCE: f64 = 1e-40;
/// Exact results must match with no slack at all.
const EXACT_TOLERANCE: f64 = 0.0;

const SEEDS: [u64; 3] = [0, 1, 2];
const MS: [usize; 2] = [4, 5];
const DS: [u32; 4] = [9, 10, 11, 12];

fn report(n: usize, ok: bool, detail: &str) {
    let line = format!("criterion {n}: {} {detail}\n", if ok { "PASS" } else { "FAIL" });
    // straight to the stream so the line shows up without --nocapture
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {n} failed: {detail}");
}

fn expected_terms(t: &SchemeType, d: u32) -> usize {
    let d = d as usize;
    match t.degrees() {
        [5] => 4 * d - 3,
        [3, 2] | [4, 1] => 3 * d - 1,
        [3, 1, 1] | [2, 2, 1] => 2 * d + 1,
        [2, 1, 1, 1] => d + 3,
        _ => 5,
    }
}

struct Case {
    ty: SchemeType,
    m: usize,
    d: u32,
    seed: u64,
    terms: Option<usize>,
    verified: bool,
    exact_ok: bool,
    recovered: Option<SchemeType>,
    same_scheme: bool,
    error: Option<String>,
}

fn grid() -> &'static Vec<Case> {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| {
        let cfg = PipelineConfig::default();
        let scfg = SylvesterConfig::default();
        let mut out = Vec::new();
        for t in SchemeType::all_degree_five() {
            for m in MS {
                for d in DS {
                    for seed in SEEDS {
                        let mut c = Case {
                            ty: t.clone(),
                            m,
                            d,
                            seed,
                            terms: None,
                            verified: false,
                            exact_ok: false,
                            recovered: None,
                            same_scheme: false,
                            error: None,
                        };
                        match run_pipeline(&t, m, d, seed, &cfg, &scfg) {
                            Ok(r) => {
                                let dec = &r.decomposition;
                                // independent re-expansion
                                let tol = if dec.exactness.is_exact() { EXACT_TOLERANCE } else { NUMERIC_TOLERANCE };
                                let rep = verify_decomposition(&r.sample.f, dec, tol);
                                c.exact_ok = match dec.exactness {
                                    Exactness::Numeric => rep.residual < NUMERIC_TOLERANCE,
                                    _ => rep.residual == 0.0 && dec.residual.is_none(),
                                };
                                c.verified = r.verified && rep.ok && r.structure_ok;
                                c.terms = Some(dec.len());
                                c.recovered = Some(r.report.scheme_type.clone());
                                c.same_scheme = same_scheme(&r.report.scheme, &r.sample.scheme);
                            }
                            Err(e) => c.error = Some(e.to_string()),
                        }
                        out.push(c);
                    }
                }
            }
        }
        out
    })
}

#[test]
fn criterion_1_rank_table_end_to_end() {
    let start = Instant::now();
    let cases = grid();
    let mut bad = Vec::new();
    let mut at9: BTreeMap<String, usize> = BTreeMap::new();
    for c in cases {
        let want = expected_terms(&c.ty, c.d);
        let ok = c.error.is_none() && c.verified && c.exact_ok && c.terms == Some(want);
        if !ok {
            bad.push(format!(
                "{} m={} d={} seed={}: terms {:?} want {want} verified {} exact {} {:?}",
                c.ty, c.m, c.d, c.seed, c.terms, c.verified, c.exact_ok, c.error
            ));
        }
        if c.d == 9 {
            at9.insert(c.ty.to_string(), c.terms.unwrap_or(0));
        }
    }
    let table: Vec<String> = SchemeType::all_degree_five()
        .iter()
        .map(|t| format!("{t}={}", at9.get(&t.to_string()).copied().unwrap_or(0)))
        .collect();
    let want9: Vec<usize> = SchemeType::all_degree_five().iter().map(|t| expected_terms(t, 9)).collect();
    assert_eq!(want9, vec![33, 26, 26, 19, 19, 12, 5]);
    report(
        1,
        bad.is_empty() && cases.len() == 168,
        &format!(
            "{} pipelines, {} failures, d=9 terms [{}], {:.0}s; {}",
            cases.len(),
            bad.len(),
            table.join(" "),
            start.elapsed().as_secs_f64(),
            bad.join("; ")
        ),
    );
}

#[test]
fn criterion_2_round_trip_classification() {
    let cases = grid();
    let mut bad = Vec::new();
    for c in cases {
        let ok = c.recovered.as_ref() == Some(&c.ty) && c.same_scheme;
        if !ok {
            bad.push(format!("{} m={} d={} seed={} -> {:?}", c.ty, c.m, c.d, c.seed, c.recovered));
        }
    }
    // the pairs sharing a rank are told apart
    let t32: SchemeType = "2:3,2".parse().unwrap();
    let t41: SchemeType = "2:4,1".parse().unwrap();
    let t311: SchemeType = "3:3,1,1".parse().unwrap();
    let t221: SchemeType = "3:2,2,1".parse().unwrap();
    let mut pairs_ok = true;
    for (a, b) in [(&t32, &t41), (&t311, &t221)] {
        for d in DS {
            pairs_ok &= rank_from_type(a, d).unwrap() == rank_from_type(b, d).unwrap();
        }
        let sa = transformed_sample(a, 4, 9, 9, &PipelineConfig::default()).unwrap();
        let sb = transformed_sample(b, 4, 9, 9, &PipelineConfig::default()).unwrap();
        let ra = classify_rank(&sa.f, 9, 9).unwrap();
        let rb = classify_rank(&sb.f, 9, 9).unwrap();
        pairs_ok &= ra.rank == rb.rank && &ra.scheme_type == a && &rb.scheme_type == b;
    }
    report(
        2,
        bad.is_empty() && pairs_ok && cases.len() == 168,
        &format!(
            "{}/{} types recovered, equal-rank pairs distinguished: {pairs_ok}; {}",
            cases.len() - bad.len(),
            cases.len(),
            bad.join("; ")
        ),
    );
}

#[test]
fn criterion_3_stratum_dimensions() {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut dims = Vec::new();
    for m in MS {
        for d in [9u32, 10] {
            let mut by_s: Vec<(usize, usize)> = Vec::new();
            for t in SchemeType::all_degree_five() {
                let p = stratum_dimension(&t, m, d, 17, 3).unwrap();
                let want = 5 * m + t.s() - 1;
                if p.projective_dimension != want || !p.stable() || p.jacobian_rank > p.parameter_count {
                    bad.push(format!("{t} m={m} d={d}: {} want {want} trials {:?}", p.projective_dimension, p.trial_ranks));
                }
                if m == 4 && d == 9 {
                    dims.push(format!("{t}={}", p.projective_dimension));
                }
                by_s.push((t.s(), p.projective_dimension));
            }
            by_s.sort();
            if by_s.windows(2).any(|w| w[1].1 < w[0].1) {
                bad.push(format!("m={m} d={d}: dimension not monotone in s"));
            }
        }
    }
    report(
        3,
        bad.is_empty(),
        &format!("m=4 d=9 [{}], {:.0}s; {}", dims.join(" "), start.elapsed().as_secs_f64(), bad.join("; ")),
    );
}

#[test]
fn criterion_4_concision_and_mutations() {
    let start = Instant::now();
    let mut samples = 0;
    let mut mutations = 0;
    let mut bad = Vec::new();
    for t in SchemeType::all_degree_five() {
        let a = canonical_scheme(&t, 4).unwrap();
        for m in MS {
            let a = if m == 4 { a.clone() } else { canonical_scheme(&t, m).unwrap() };
            for d in DS {
                for seed in SEEDS {
                    let sp = sample_point(&a, d, seed, 100).unwrap();
                    samples += 1;
                    let conc = essential_vars(&sp.f).unwrap();
                    let br = border_rank_lower_bound(&conc.concise_poly).unwrap();
                    if conc.essential_count != 5 || br != 5 {
                        bad.push(format!("{t} m={m} d={d} seed={seed}: essential {} border {br}", conc.essential_count));
                    }
                    for i in 0..a.components.len() {
                        let mut c = sp.coefficients.clone();
                        *c[i].last_mut().unwrap() = Rational::new();
                        let g = form_from_scheme(&a, d, &c).unwrap();
                        mutations += 1;
                        let drops = match essential_vars(&g) {
                            Ok(cg) => {
                                cg.essential_count < 5
                                    || border_rank_lower_bound(&cg.concise_poly).map_or(true, |b| b < 5)
                            }
                            Err(_) => true,
                        };
                        let detected = drops || !verify_certificate(&g, &a, d).passed();
                        if !detected {
                            bad.push(format!("{t} m={m} d={d} seed={seed} component {i} undetected"));
                        }
                    }
                }
            }
        }
    }
    report(
        4,
        bad.is_empty(),
        &format!(
            "{samples} samples concise with border bound 5, {mutations} mutations detected {}/{mutations}, {:.0}s; {}",
            mutations - bad.iter().filter(|b| b.contains("undetected")).count(),
            start.elapsed().as_secs_f64(),
            bad.join("; ")
        ),
    );
}

#[test]
fn criterion_5_sylvester_suite() {
    let start = Instant::now();
    let cfg = SylvesterConfig::default();
    let mut bad = Vec::new();
    let mut count = 0;
    let mut check = |text: String, want: usize| {
        let g = parse_poly(&text, Some(2)).unwrap();
        count += 1;
        let r = binary_rank(&g).unwrap();
        if r != want {
            bad.push(format!("{text}: rank {r} want {want}"));
            return;
        }
        match binary_decomposition(&g, &cfg).unwrap() {
            Some(dec) if dec.len() == want && dec.exactness.is_exact() => {
                if binary_residual(&g, &dec) != EXACT_TOLERANCE {
                    bad.push(format!("{text}: does not re-expand exactly"));
                }
            }
            other => bad.push(format!("{text}: decomposition {:?}", other.map(|d| (d.len(), d.exactness)))),
        }
    };
    for a in 1..40u32 {
        for b in 1..=a.min(40 - a) {
            check(format!("x0^{a}*x1^{b}"), (a.max(b) + 1) as usize);
        }
    }
    for d in 9..=12u32 {
        check(format!("x0^{}*x1^4", 4 * d - 4), (4 * d - 3) as usize);
    }
    report(
        5,
        bad.is_empty(),
        &format!("{count} binary forms, {:.0}s; {}", start.elapsed().as_secs_f64(), bad.join("; ")),
    );
}

// ---------------------------------------------------------------------------
// planted configurations for the curve-witness desk check

fn random_frame<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<Rational>> {
    loop {
        let f: Vec<Vec<Rational>> = (0..k)
            .map(|_| (0..n).map(|_| Rational::from(rng.gen_range(-5i64..=5))).collect())
            .collect();
        if waring5::linalg::rank_rational(&f) == k {
            return f;
        }
    }
}

fn combine(frame: &[Vec<Rational>], c: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::new(); frame[0].len()];
    for (v, x) in frame.iter().zip(c) {
        for (o, y) in out.iter_mut().zip(v) {
            *o += Rational::from(x * y);
        }
    }
    out
}

fn distinct_params<R: Rng>(rng: &mut R, k: usize) -> Vec<i64> {
    let mut pool: Vec<i64> = (-40..=40).collect();
    pool.shuffle(rng);
    pool.truncate(k);
    pool
}

fn add_generic<R: Rng>(rng: &mut R, z: &mut Vec<Vec<Rational>>, n: usize, k: usize) {
    let mut added = 0;
    while added < k {
        let p: Vec<Rational> = (0..n).map(|_| Rational::from(rng.gen_range(-30i64..=30))).collect();
        if p.iter().all(|x| *x == 0) || z.iter().any(|q| proportional(q, &p)) {
            continue;
        }
        z.push(p);
        added += 1;
    }
}

/// Points on a planted curve of the given kind plus a few generic ones.
fn planted<R: Rng>(rng: &mut R, kind: CurveKind, m: usize, d: u32) -> Vec<Vec<Rational>> {
    let n = m + 1;
    let d = d as i64;
    let (frame_k, count): (usize, i64) = match kind {
        CurveKind::Line => (2, d + 2),
        CurveKind::Conic => (3, 2 * d + 2),
        CurveKind::PlaneCubic => (3, 3 * d + 1),
    };
    let frame = random_frame(rng, n, frame_k);
    let mut z: Vec<Vec<Rational>> = distinct_params(rng, count as usize)
        .into_iter()
        .map(|t| {
            let c: Vec<Rational> = match kind {
                CurveKind::Line => vec![Rational::from(1), Rational::from(t)],
                CurveKind::Conic => vec![Rational::from(1), Rational::from(t), Rational::from(t * t)],
                // cuspidal cubic x1^3 = x0 x2^2 ... as (t^2, t^3, 1)
                CurveKind::PlaneCubic => vec![Rational::from(t * t), Rational::from(t * t * t), Rational::from(1)],
            };
            combine(&frame, &c)
        })
        .collect();
    let room = (3 * d + 1 - count) as usize;
    let extra = if m == 2 && kind != CurveKind::Line { 0 } else { rng.gen_range(0..=room.min(3)) };
    add_generic(rng, &mut z, n, extra);
    z.shuffle(rng);
    z
}

#[test]
fn criterion_6_curve_witness_desk_check() {
    let start = Instant::now();
    let d = 9;
    let mut rng = rng_from_seed(2024);
    let mut bad = Vec::new();
    let mut found = BTreeMap::new();
    for kind in [CurveKind::Line, CurveKind::Conic, CurveKind::PlaneCubic] {
        for trial in 0..50 {
            let m = [2usize, 3, 4][trial % 3];
            let z = planted(&mut rng, kind, m, d);
            let h1 = points_h1(&z, d);
            let w = low_degree_curve_witness(&z, d).unwrap();
            let ok = h1 > 0
                && w.as_ref().map_or(false, |w| {
                    witness_holds(&z, w) && w.count >= w.kind.threshold(d) && w.kind.degree() <= kind.degree()
                });
            if ok {
                *found.entry(kind.as_str()).or_insert(0) += 1;
            } else {
                bad.push(format!("{} trial {trial} m={m}: h1={h1} witness {:?}", kind.as_str(), w.map(|w| (w.kind, w.count))));
            }
        }
    }
    let mut controls = 0;
    for trial in 0..50 {
        let m = [2usize, 3, 4][trial % 3];
        let mut z = Vec::new();
        let k = rng.gen_range(5..=(3 * d as usize + 1));
        add_generic(&mut rng, &mut z, m + 1, k);
        let h1 = points_h1(&z, d);
        let w = low_degree_curve_witness(&z, d).unwrap();
        if h1 == 0 && w.is_none() {
            controls += 1;
        } else {
            bad.push(format!("control {trial} m={m}: h1={h1} witness claimed {}", w.is_some()));
        }
    }
    report(
        6,
        bad.is_empty(),
        &format!(
            "planted {:?}, controls clean {controls}/50, {:.0}s; {}",
            found,
            start.elapsed().as_secs_f64(),
            bad.join("; ")
        ),
    );
}

// ---------------------------------------------------------------------------
// plane bounds

fn qv(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from(x)).collect()
}

fn plane_scheme(comps: &[(Vec<Vec<i64>>, usize)]) -> JetScheme {
    JetScheme::new(
        2,
        comps
            .iter()
            .map(|(pts, len)| JetComponent::new(CurvePath::new(pts.iter().map(|p| qv(p)).collect()).unwrap(), *len).unwrap())
            .collect(),
    )
    .unwrap()
}

fn plane_form(a: &JetScheme, d: u32, seed: u64) -> waring5::poly::HomogPoly {
    let mut rng = rng_from_seed(seed);
    let c: Vec<Vec<Rational>> = a
        .components
        .iter()
        .map(|c| (0..c.length).map(|_| Rational::from(rng.gen_range(1i64..=9))).collect())
        .collect();
    form_from_scheme(a, d, &c).unwrap()
}

/// x ↦ M x on points, with the line ℓ carried along as M^{-T} ℓ.
fn moved(a: &JetScheme, line: &[Rational], seed: u64) -> (JetScheme, Vec<Rational>) {
    let mut rng = rng_from_seed(seed);
    let mat = random_frame(&mut rng, 3, 3);
    let inv_t = transpose_rational(&inverse_rational(&mat).unwrap());
    let l = inv_t.iter().map(|row| row.iter().zip(line).fold(Rational::new(), |s, (x, y)| s + Rational::from(x * y))).collect();
    (a.transform(&mat), l)
}

#[test]
fn criterion_7_plane_bounds() {
    let start = Instant::now();
    let d = 9u32;
    let mut bad = Vec::new();
    let mut seen = Vec::new();
    let conic = plane_scheme(&[0i64, 1, 2, 3, -1].map(|t| (vec![vec![1, t, t * t]], 1)));
    let four = plane_scheme(&[
        (vec![vec![1, 0, 0], vec![1, 1, 0]], 2),
        (vec![vec![1, 2, 0]], 1),
        (vec![vec![1, 3, 0]], 1),
        (vec![vec![1, 1, 1]], 1),
    ]);
    let three = plane_scheme(&[
        (vec![vec![1, 0, 0], vec![0, 0, 1]], 2),
        (vec![vec![0, 1, 0], vec![1, 1, 1]], 2),
        (vec![vec![1, 1, 0]], 1),
    ]);
    let l = qv(&[0, 0, 1]);
    for seed in 0..3u64 {
        for (name, base, bound, kind, on_l) in [
            ("smooth conic", &conic, 2 * d as usize, PlaneCurveKind::SmoothConic, None),
            ("L meets A in 4", &four, 2 * d as usize, PlaneCurveKind::LinePair, Some(4)),
            ("L meets A in 3", &three, 3 * d as usize, PlaneCurveKind::ThreeLines, Some(3)),
        ] {
            let (a, line) = if seed == 0 { (base.clone(), l.clone()) } else { moved(base, &l, seed) };
            let f = plane_form(&a, d, seed);
            match plane_upper_bound(&f, &a, d, seed, 64) {
                Ok(b) => {
                    let shape = b.kind == kind
                        && (on_l.is_none() || b.lines.iter().any(|x| proportional(x, &line)))
                        && (on_l != Some(3) || b.line_intersection == Some(3));
                    let dec_ok = b.decomposition.as_ref().map_or(true, |dec| {
                        dec.len() <= bound && dec.exactness.is_exact() && verify_decomposition(&f, dec, EXACT_TOLERANCE).ok
                    });
                    if b.bound != bound || !shape || !dec_ok {
                        bad.push(format!("{name} seed {seed}: bound {} {:?} lines {} dec_ok {dec_ok}", b.bound, b.kind, b.lines.len()));
                    } else if seed == 0 {
                        seen.push(format!("{name}: {} via {}", b.bound, b.kind.as_str()));
                    }
                }
                Err(e) => bad.push(format!("{name} seed {seed}: {e}")),
            }
        }
    }
    report(7, bad.is_empty(), &format!("[{}], {:.0}s; {}", seen.join(", "), start.elapsed().as_secs_f64(), bad.join("; ")));
}

#[test]
fn tolerances_are_pinned() {
    assert_eq!(SylvesterConfig::default().tolerance, NUMERIC_TOLERANCE);
    assert_eq!(EXACT_TOLERANCE, 0.0);
}

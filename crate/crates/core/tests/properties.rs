use proptest::prelude::*;
use rug::{Integer, Rational};

use waring5::apolar::catalecticant_rank;
use waring5::classify::{rank_from_type, same_scheme};
use waring5::construct::{canonical_scheme, random_projectivity, projectivity_pair};
use waring5::json::{rational_from_json, rational_to_json, scheme_from_json, scheme_to_json};
use waring5::linalg::{kernel_rational, mat_vec_rational, rank_rational, transpose_rational};
use waring5::poly::{parse_poly, sum_of_powers, HomogPoly, LinearForm, Monomial};
use waring5::scalar::cyclotomic::{Cyclotomic, CyclotomicField};
use waring5::scalar::Scalar;
use waring5::schemes::{hilbert_h0_h1, SchemeType};
use waring5::sylvester::{binary_decomposition, binary_rank, binary_residual, SylvesterConfig};
use waring5::univariate::RatPoly;

fn rat() -> impl Strategy<Value = Rational> {
    (-50i64..=50, 1i64..=12).prop_map(|(n, d)| Rational::from((n, d)))
}

fn matrix(max: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec((-3i64..=3).prop_map(Rational::from), c), r)
    })
}

fn form(nvars: usize, degree: u32) -> impl Strategy<Value = HomogPoly> {
    let count = waring5::poly::monomial_count(nvars, degree);
    prop::collection::vec(rat(), count).prop_map(move |v| {
        let basis = waring5::poly::MonomialBasis::new(nvars, degree);
        HomogPoly::from_rational_vector(&basis, &v)
    })
}

fn scheme_type() -> impl Strategy<Value = SchemeType> {
    prop::sample::select(SchemeType::all_degree_five())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poly_text_round_trip(f in form(3, 4)) {
        let g = parse_poly(&f.to_string(), Some(3)).unwrap();
        prop_assert!(g.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn rational_json_round_trip(r in rat()) {
        prop_assert_eq!(rational_from_json(&rational_to_json(&r)).unwrap(), r);
    }

    #[test]
    fn scheme_type_text_round_trip(t in scheme_type()) {
        prop_assert_eq!(t.to_string().parse::<SchemeType>().unwrap(), t);
    }

    #[test]
    fn rank_and_kernel(a in matrix(6)) {
        let r = rank_rational(&a);
        prop_assert_eq!(r, rank_rational(&transpose_rational(&a)));
        let k = kernel_rational(&a);
        prop_assert_eq!(r + k.len(), a[0].len());
        for v in &k {
            prop_assert!(mat_vec_rational(&a, v).iter().all(|x| *x == 0));
        }
    }

    #[test]
    fn ratpoly_division_identity(a in prop::collection::vec(-9i64..=9, 1..8), b in prop::collection::vec(-9i64..=9, 1..5)) {
        let a = RatPoly::from_i64(&a);
        let b = RatPoly::from_i64(&b);
        prop_assume!(!b.is_zero());
        let (q, r) = a.divrem(&b);
        prop_assert_eq!(q.mul(&b).add(&r), a);
        prop_assert!(r.is_zero() || r.degree() < b.degree());
    }

    #[test]
    fn rational_roots_are_found(roots in prop::collection::btree_set(-20i64..=20, 1..5)) {
        let roots: Vec<Rational> = roots.into_iter().map(|r| Rational::from((r, 3))).collect();
        let p = RatPoly::from_roots(&roots);
        let mut found = p.rational_roots(&Integer::from(100), 256);
        found.sort();
        prop_assert_eq!(found, roots);
    }

    #[test]
    fn cyclotomic_field_operations(
        n in prop::sample::select(vec![3u32, 4, 5, 7, 8, 12]),
        a in prop::collection::vec(-6i64..=6, 1..6),
        b in prop::collection::vec(-6i64..=6, 1..6),
    ) {
        let field = CyclotomicField::new(n);
        let a = Cyclotomic::from_poly(&field, &a.iter().map(|&x| Rational::from(x)).collect::<Vec<_>>());
        let b = Cyclotomic::from_poly(&field, &b.iter().map(|&x| Rational::from(x)).collect::<Vec<_>>());
        prop_assert_eq!(a.add(&b).trace(), Rational::from(a.trace() + b.trace()));
        prop_assert_eq!(a.mul(&b).trace(), a.trace_of_product(&b));
        if !b.is_zero() {
            prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a.clone());
        }
        // the trace is the sum of the Galois conjugates
        let mut sum = Cyclotomic::zero(&field);
        for k in (1..n).filter(|&k| waring5::scalar::cyclotomic::gcd_u32(k, n) == 1) {
            sum = sum.add(&a.galois(k));
        }
        prop_assert_eq!(sum.as_rational(), Some(a.trace()));
    }

    #[test]
    fn catalecticant_sees_independent_powers(
        ls in prop::collection::vec(prop::collection::vec(-4i64..=4, 4), 1..=4),
        d in 3u32..=5,
    ) {
        let forms: Vec<Vec<Rational>> = ls.iter().map(|l| l.iter().map(|&x| Rational::from(x)).collect()).collect();
        prop_assume!(forms.iter().all(|l| l.iter().any(|x| *x != 0)));
        prop_assume!(rank_rational(&forms) == forms.len());
        let terms: Vec<(Scalar, LinearForm)> = forms
            .iter()
            .enumerate()
            .map(|(i, l)| (Scalar::from_i64(i as i64 + 1), LinearForm::from_rationals(l).unwrap()))
            .collect();
        let f = sum_of_powers(&terms, d);
        prop_assert_eq!(catalecticant_rank(&f, 1).unwrap(), forms.len());
    }

    #[test]
    fn binary_sums_of_few_powers(
        pts in prop::collection::btree_set(-15i64..=15, 1..=3),
        d in 6u32..=9,
    ) {
        let terms: Vec<(Scalar, LinearForm)> = pts
            .iter()
            .enumerate()
            .map(|(i, &t)| (Scalar::from_i64(i as i64 + 2), LinearForm::from_rationals(&[Rational::from(1), Rational::from(t)]).unwrap()))
            .collect();
        let g = sum_of_powers(&terms, d);
        prop_assert_eq!(binary_rank(&g).unwrap(), pts.len());
        let cfg = SylvesterConfig::default();
        let dec = binary_decomposition(&g, &cfg).unwrap().unwrap();
        prop_assert_eq!(dec.len(), pts.len());
        prop_assert!(binary_residual(&g, &dec) <= cfg.tolerance);
    }

    #[test]
    fn monomial_binary_rank(a in 1u32..=20, b in 1u32..=20) {
        let g = HomogPoly::monomial(Monomial(vec![a, b]), Scalar::one());
        prop_assert_eq!(binary_rank(&g).unwrap(), (a.max(b) + 1) as usize);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn rank_table_is_monotone(t in scheme_type(), d in 9u32..=30) {
        let r = rank_from_type(&t, d).unwrap();
        prop_assert!(rank_from_type(&t, d + 1).unwrap() >= r);
        for u in SchemeType::all_degree_five() {
            if u.s() > t.s() {
                prop_assert!(rank_from_type(&u, d).unwrap() <= r);
            }
        }
    }

    #[test]
    fn schemes_survive_projectivities(t in scheme_type(), m in 4usize..=5, seed in 0u64..1000) {
        let a = canonical_scheme(&t, m).unwrap();
        let (rows, _) = projectivity_pair(&random_projectivity(m, seed, 3)).unwrap();
        let b = a.transform(&rows);
        prop_assert_eq!(b.scheme_type(), t);
        prop_assert!(same_scheme(&b, &scheme_from_json(&scheme_to_json(&b)).unwrap()));
        let (h0, h1) = hilbert_h0_h1(&b, 9);
        prop_assert_eq!(h1, 0);
        prop_assert_eq!(h0, waring5::poly::monomial_count(m + 1, 9) - 5);
    }
}

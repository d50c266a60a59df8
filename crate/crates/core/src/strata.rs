//! Dimensions of the strata of border rank 5 forms, by scheme type.
//!
//! The affine cone over a stratum is the image of
//! (paths, coefficients) ↦ Σ_i Σ_j c_ij jet_j(path_i). The map is polynomial,
//! so its Jacobian is written down exactly and its rank taken over Q at random
//! parameter points. Reparametrizations and rescalings of each path are left
//! in as parameters; they only add kernel directions.

use rug::Rational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{random_rational, rng_from_seed, MIN_DEGREE};
use crate::linalg::rank_rational;
use crate::poly::{jets_in_basis, monomials, CurvePath, Monomial, MonomialBasis};
use crate::schemes::SchemeType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrataError {
    #[error("scheme type {0} does not have degree 5")]
    BadType(String),
    #[error("need m >= 4 and d >= 9, got m={0}, d={1}")]
    BadShape(usize, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumProbe {
    #[serde(rename = "type")]
    pub scheme_type: SchemeType,
    pub m: usize,
    pub d: u32,
    pub parameter_count: usize,
    pub jacobian_rank: usize,
    pub projective_dimension: usize,
    pub expected_dimension: usize,
    pub trial_ranks: Vec<usize>,
}

impl StratumProbe {
    pub fn matches_expected(&self) -> bool {
        self.projective_dimension == self.expected_dimension
    }

    /// Every trial reached the maximum.
    pub fn stable(&self) -> bool {
        self.trial_ranks.iter().all(|&r| r == self.jacobian_rank)
    }
}

/// 5m + s - 1.
pub fn expected_dimension(t: &SchemeType, m: usize) -> usize {
    5 * m + t.s() - 1
}

/// Parameters for one component of length b: the support in the chart
/// x_0 = 1, b-1 further path vectors and b jet coefficients.
fn component_parameters(m: usize, b: usize) -> usize {
    m + (m + 1) * (b - 1) + b
}

fn jacobian_rows(t: &SchemeType, m: usize, d: u32, seed: u64) -> Vec<Vec<Rational>> {
    let n = m + 1;
    let mut rng = rng_from_seed(seed);
    let top = MonomialBasis::new(n, d);
    let lower = monomials(n, d - 1);
    // x_a · (monomial of degree d-1) as an index into the degree-d basis
    let shift: Vec<Vec<usize>> = lower
        .iter()
        .map(|mono| {
            (0..n)
                .map(|a| top.index_of(&mono.add(&Monomial::unit(n, a))).expect("degree d monomial"))
                .collect()
        })
        .collect();
    let dd = Rational::from(d);
    let mut rows = Vec::new();
    for &b in t.degrees() {
        let mut points: Vec<Vec<Rational>> = (0..b)
            .map(|_| (0..n).map(|_| random_rational(&mut rng, 10, false)).collect())
            .collect();
        points[0][0] = Rational::from(1);
        let coeffs: Vec<Rational> = (0..b).map(|_| random_rational(&mut rng, 10, true)).collect();
        let path = CurvePath::new(points).expect("path of nonzero support");
        let jets = jets_in_basis(&path, d, b, &top.list);
        let low = jets_in_basis(&path, d - 1, b, &lower);
        rows.extend(jets);
        // d/dp_{k,a} of Σ_j c_j jet_j(d) = d x_a Σ_{j>=k} c_j jet_{j-k}(d-1)
        for k in 0..b {
            let mut g = vec![Rational::new(); lower.len()];
            for (j, c) in coeffs.iter().enumerate().skip(k) {
                for (gi, x) in g.iter_mut().zip(&low[j - k]) {
                    if *x != 0 {
                        *gi += Rational::from(c * x);
                    }
                }
            }
            let first = if k == 0 { 1 } else { 0 };
            for a in first..n {
                let mut row = vec![Rational::new(); top.len()];
                for (li, x) in g.iter().enumerate() {
                    if *x != 0 {
                        row[shift[li][a]] = Rational::from(x * &dd);
                    }
                }
                rows.push(row);
            }
        }
    }
    rows
}

pub fn stratum_dimension(
    t: &SchemeType,
    m: usize,
    d: u32,
    seed: u64,
    trials: usize,
) -> Result<StratumProbe, StrataError> {
    if t.total() != 5 {
        return Err(StrataError::BadType(t.to_string()));
    }
    if m < 4 || d < MIN_DEGREE {
        return Err(StrataError::BadShape(m, d));
    }
    let parameter_count = t.degrees().iter().map(|&b| component_parameters(m, b)).sum();
    let trial_ranks: Vec<usize> = (0..trials.max(1) as u64)
        .map(|i| rank_rational(&jacobian_rows(t, m, d, seed.wrapping_add(i))))
        .collect();
    let jacobian_rank = *trial_ranks.iter().max().expect("at least one trial");
    Ok(StratumProbe {
        scheme_type: t.clone(),
        m,
        d,
        parameter_count,
        jacobian_rank,
        projective_dimension: jacobian_rank.saturating_sub(1),
        expected_dimension: expected_dimension(t, m),
        trial_ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> SchemeType {
        s.parse().unwrap()
    }

    #[test]
    fn five_points_m4() {
        let p = stratum_dimension(&t("5:1,1,1,1,1"), 4, 9, 1, 2).unwrap();
        assert_eq!(p.projective_dimension, 24);
        assert_eq!(p.parameter_count, 25);
        assert!(p.stable());
    }

    #[test]
    fn single_jet_m4() {
        let p = stratum_dimension(&t("1:5"), 4, 9, 1, 2).unwrap();
        assert_eq!(p.projective_dimension, 20);
        assert!(p.jacobian_rank <= p.parameter_count);
    }

    #[test]
    fn four_components_m5() {
        let p = stratum_dimension(&t("4:2,1,1,1"), 5, 9, 1, 1).unwrap();
        assert_eq!(p.projective_dimension, 28);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            stratum_dimension(&t("2:3,3"), 4, 9, 1, 1),
            Err(StrataError::BadType(_))
        ));
        assert!(matches!(
            stratum_dimension(&t("1:5"), 3, 9, 1, 1),
            Err(StrataError::BadShape(3, 9))
        ));
    }
}

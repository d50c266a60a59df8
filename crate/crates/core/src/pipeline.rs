//! End to end: sample a form of a given type, move it by a random integer
//! change of coordinates, classify it, decompose it and verify the result.

use rug::Rational;
use thiserror::Error;

use crate::classify::{classify_rank, same_scheme, ClassifyError, RankReport};
use crate::construct::{
    canonical_scheme, projectivity_pair, random_projectivity, sample_point, ConstructError,
    SamplePoint,
};
use crate::linalg::{solve_rational, transpose_rational};
use crate::poly::{HomogPoly, MonomialBasis};
use crate::schemes::{span_rows, JetScheme, SchemeType};
use crate::sylvester::SylvesterConfig;
use crate::witness::{decompose, structure_failures, Decomposition, WitnessError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug)]
pub struct PipelineConfig {
    pub coeff_height: u64,
    /// Entry bound of the random change of coordinates; 0 skips it.
    pub transform_height: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            coeff_height: crate::construct::DEFAULT_HEIGHT,
            transform_height: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub sample: SamplePoint,
    pub report: RankReport,
    pub decomposition: Decomposition,
    pub verified: bool,
    pub structure_ok: bool,
}

/// Coefficients c_ij with f = Σ c_ij jet_j(path_i), if f lies in the span.
pub fn coefficients_in_scheme(f: &HomogPoly, a: &JetScheme, d: u32) -> Option<Vec<Vec<Rational>>> {
    let basis = MonomialBasis::new(a.m + 1, d);
    let target = f.rational_vector(&basis)?;
    let rows = span_rows(a, d, &basis.list);
    let sol = solve_rational(&transpose_rational(&rows), &target)?;
    let mut it = sol.into_iter();
    Some(
        a.components
            .iter()
            .map(|c| it.by_ref().take(c.length).collect())
            .collect(),
    )
}

/// f with the scheme recovered by classification, ready for decomposition.
pub fn sample_from_report(f: &HomogPoly, report: &RankReport, seed: u64) -> Option<SamplePoint> {
    let coefficients = coefficients_in_scheme(f, &report.scheme, report.d)?;
    Some(SamplePoint {
        f: f.clone(),
        scheme: report.scheme.clone(),
        coefficients,
        seed,
        d: report.d,
    })
}

/// The sample of a given type, moved by a random integer projectivity.
pub fn transformed_sample(
    t: &SchemeType,
    m: usize,
    d: u32,
    seed: u64,
    cfg: &PipelineConfig,
) -> Result<SamplePoint, PipelineError> {
    let a = canonical_scheme(t, m)?;
    let sp = sample_point(&a, d, seed, cfg.coeff_height)?;
    if cfg.transform_height == 0 {
        return Ok(sp);
    }
    let mat = random_projectivity(m, seed, cfg.transform_height);
    let (rows, _) = projectivity_pair(&mat)
        .ok_or_else(|| PipelineError::Inconsistent("singular projectivity".into()))?;
    Ok(sp.transformed(&rows))
}

pub fn run_pipeline(
    t: &SchemeType,
    m: usize,
    d: u32,
    seed: u64,
    cfg: &PipelineConfig,
    scfg: &SylvesterConfig,
) -> Result<PipelineResult, PipelineError> {
    let sample = transformed_sample(t, m, d, seed, cfg)?;
    let report = classify_rank(&sample.f, d, seed)?;
    if &report.scheme_type != t || !same_scheme(&report.scheme, &sample.scheme) {
        return Err(PipelineError::Inconsistent(format!(
            "sampled {t}, recovered {}",
            report.scheme_type
        )));
    }
    let rank = report
        .rank
        .ok_or_else(|| PipelineError::Inconsistent(format!("{report}")))?;
    // same scheme as recovered, with a path of much smaller height
    let decomposition = decompose(&sample, scfg)?;
    // decompose only returns re-expanded, verified decompositions
    let verified = decomposition.len() == rank;
    // block labels follow the component order of the sample
    let structure_ok = structure_failures(&decomposition, &sample.scheme, d).is_empty();
    Ok(PipelineResult {
        sample,
        report,
        decomposition,
        verified,
        structure_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pipeline_small_types() {
        for (ty, want) in [("4:2,1,1,1", 12), ("5:1,1,1,1,1", 5), ("3:3,1,1", 19)] {
            let t: SchemeType = ty.parse().unwrap();
            let r = run_pipeline(&t, 4, 9, 5, &PipelineConfig::default(), &SylvesterConfig::default())
                .unwrap();
            assert!(r.verified && r.structure_ok, "{ty}");
            assert_eq!(r.decomposition.len(), want);
        }
    }
}

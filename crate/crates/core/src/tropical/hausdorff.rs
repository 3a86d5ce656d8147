//! Hausdorff distance between finite point sets, and the convergence of
//! sampled amoebas to the corner locus.

use crate::exec::Exec;

use super::{
    amoeba_sample_with, corner_locus, tropicalize, AmoebaSampling, Region, TropicalError,
    TropicalPolynomial,
};

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn directed(a: &[&Vec<f64>], b: &[&Vec<f64>], exec: Exec) -> f64 {
    exec.map(a, |p| {
        b.iter().map(|q| dist2(p, q)).fold(f64::INFINITY, f64::min)
    })
    .into_iter()
    .fold(0.0, f64::max)
    .sqrt()
}

/// Symmetric Hausdorff distance between the parts of `a` and `b` inside
/// `region`. The result carries the sampling error of both sets.
pub fn hausdorff_distance(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    region: &Region,
) -> Result<f64, TropicalError> {
    hausdorff_distance_with(a, b, region, Exec::default())
}

pub fn hausdorff_distance_with(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    region: &Region,
    exec: Exec,
) -> Result<f64, TropicalError> {
    for p in a.iter().chain(b) {
        if p.len() != region.dim() {
            return Err(TropicalError::RegionMismatch {
                region: region.dim(),
                points: p.len(),
            });
        }
    }
    let ca: Vec<&Vec<f64>> = a.iter().filter(|p| region.contains(p)).collect();
    let cb: Vec<&Vec<f64>> = b.iter().filter(|p| region.contains(p)).collect();
    if ca.is_empty() || cb.is_empty() {
        return Err(TropicalError::EmptyAfterClip);
    }
    Ok(directed(&ca, &cb, exec).max(directed(&cb, &ca, exec)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub t_abs: f64,
    pub d_h: f64,
    /// `d_h · (-log t)`
    pub scaled: f64,
}

pub fn convergence_curve(
    p: &TropicalPolynomial,
    t_list: &[f64],
    sampling: &AmoebaSampling,
) -> Result<Vec<CurveRow>, TropicalError> {
    convergence_curve_with(p, t_list, sampling, Exec::default())
}

pub fn convergence_curve_with(
    p: &TropicalPolynomial,
    t_list: &[f64],
    sampling: &AmoebaSampling,
    exec: Exec,
) -> Result<Vec<CurveRow>, TropicalError> {
    if t_list.iter().any(|&t| !(t > 0.0 && t < 1.0)) || t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(TropicalError::NotDecreasing);
    }
    let region = &sampling.region;
    let locus = corner_locus(&tropicalize(p), region, sampling.resolution)?;
    t_list
        .iter()
        .map(|&t| {
            let cloud = amoeba_sample_with(p, t, sampling, exec)?;
            let d_h = hausdorff_distance_with(&cloud.points, &locus.points, region, exec)?;
            Ok(CurveRow {
                t_abs: t,
                d_h,
                scaled: d_h * -t.ln(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_against_segment() {
        let r = Region::cube(2, 3.0).unwrap();
        let seg: Vec<Vec<f64>> = (0..=1000).map(|i| vec![i as f64 / 1000.0, 0.0]).collect();
        let d = hausdorff_distance(&[vec![0.0, 0.0]], &seg, &r).unwrap();
        assert_eq!(d, 1.0);
        assert_eq!(hausdorff_distance(&seg, &seg, &r).unwrap(), 0.0);
    }

    #[test]
    fn clipping() {
        let r = Region::cube(2, 1.0).unwrap();
        let a = vec![vec![0.0, 0.0], vec![5.0, 5.0]];
        let b = vec![vec![0.5, 0.0]];
        assert_eq!(hausdorff_distance(&a, &b, &r).unwrap(), 0.5);
        assert_eq!(
            hausdorff_distance(&[vec![5.0, 5.0]], &b, &r),
            Err(TropicalError::EmptyAfterClip)
        );
    }

    #[test]
    fn one_variable_curve_is_zero() {
        let p = TropicalPolynomial::from_real(&[(&[0], 1.0, 0), (&[1], 1.0, 0)]).unwrap();
        let s = AmoebaSampling::new(Region::cube(1, 2.0).unwrap(), 10, 1).unwrap();
        let rows = convergence_curve(&p, &[0.1, 0.01, 1e-5], &s).unwrap();
        assert!(rows.iter().all(|r| r.d_h == 0.0));
        assert_eq!(
            convergence_curve(&p, &[0.01, 0.1], &s),
            Err(TropicalError::NotDecreasing)
        );
    }
}

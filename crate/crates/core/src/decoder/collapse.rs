//! Finite-size scaling collapse of the decoded proxy entropy: curves of
//! S(rho) for several system sizes are replotted against
//! x = (rho - rho_c) N^{1/(2 nu)}; the summed inter-size curve distance is
//! the collapse residual, and minimizing it over a rho_c grid estimates the
//! crossing.

use crate::error::{Result, SimError};

/// S(rho) for one system size.
#[derive(Clone, Debug)]
pub struct SizeCurve {
    pub n: usize,
    /// (rho, value) points, rho ascending
    pub points: Vec<(f64, f64)>,
}

fn interp(points: &[(f64, f64)], x: f64) -> Option<f64> {
    if points.len() < 2 || x < points[0].0 || x > points[points.len() - 1].0 {
        return None;
    }
    let k = points.partition_point(|p| p.0 < x).min(points.len() - 1).max(1);
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    if (x1 - x0).abs() < 1e-15 {
        return Some(y0);
    }
    Some(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
}

/// Collapse residual at a trial (rho_c, nu): sum over curve pairs of the
/// mean squared difference on the overlap of their rescaled supports.
pub fn collapse_residual(curves: &[SizeCurve], rho_c: f64, nu: f64) -> Result<f64> {
    if curves.len() < 2 {
        return Err(SimError::Decode("need at least two sizes".into()));
    }
    let rescaled: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|c| {
            let f = (c.n as f64).powf(1.0 / (2.0 * nu));
            c.points.iter().map(|&(r, s)| ((r - rho_c) * f, s)).collect()
        })
        .collect();
    let mut total = 0.0;
    let mut pairs = 0usize;
    for i in 0..rescaled.len() {
        for j in i + 1..rescaled.len() {
            let mut acc = 0.0;
            let mut cnt = 0usize;
            for &(x, y) in &rescaled[i] {
                if let Some(yj) = interp(&rescaled[j], x) {
                    acc += (y - yj).powi(2);
                    cnt += 1;
                }
            }
            for &(x, y) in &rescaled[j] {
                if let Some(yi) = interp(&rescaled[i], x) {
                    acc += (y - yi).powi(2);
                    cnt += 1;
                }
            }
            if cnt > 0 {
                total += acc / cnt as f64;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        return Err(SimError::Decode(
            "rescaled curves do not overlap; rho_c or nu out of range".into(),
        ));
    }
    Ok(total)
}

/// Grid-minimize the residual over rho_c at fixed nu; returns the crossing
/// estimate and its residual.
pub fn estimate_crossing(
    curves: &[SizeCurve],
    rho_grid: &[f64],
    nu: f64,
) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &rc in rho_grid {
        if let Ok(res) = collapse_residual(curves, rc, nu) {
            if best.map_or(true, |(_, b)| res < b) {
                best = Some((rc, res));
            }
        }
    }
    best.ok_or_else(|| SimError::Decode("no feasible rho_c on the grid".into()))
}

/// Direct pairwise crossings: rho values where two curves' difference
/// changes sign, linearly interpolated.
pub fn pairwise_crossings(a: &SizeCurve, b: &SizeCurve) -> Vec<f64> {
    let mut out = Vec::new();
    let rhos: Vec<f64> = a
        .points
        .iter()
        .map(|p| p.0)
        .filter(|&r| interp(&b.points, r).is_some())
        .collect();
    let diffs: Vec<(f64, f64)> = rhos
        .iter()
        .map(|&r| {
            (
                r,
                interp(&a.points, r).unwrap() - interp(&b.points, r).unwrap(),
            )
        })
        .collect();
    for w in diffs.windows(2) {
        let (r0, d0) = w[0];
        let (r1, d1) = w[1];
        if d0 == 0.0 {
            out.push(r0);
        } else if d0 * d1 < 0.0 {
            out.push(r0 + (r1 - r0) * d0 / (d0 - d1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(n: usize, rho_c: f64, nu: f64, grid: &[f64]) -> SizeCurve {
        // scaling-form data: S = f((rho - rho_c) N^{1/(2 nu)}) with a tanh
        let f = (n as f64).powf(1.0 / (2.0 * nu));
        SizeCurve {
            n,
            points: grid
                .iter()
                .map(|&r| (r, 0.5 + 0.4 * ((r - rho_c) * f).tanh()))
                .collect(),
        }
    }

    #[test]
    fn identical_curves_have_zero_residual() {
        let grid: Vec<f64> = (0..8).map(|k| 0.3 + 0.1 * k as f64).collect();
        let c = SizeCurve {
            n: 12,
            points: grid.iter().map(|&r| (r, 0.4)).collect(),
        };
        let c2 = SizeCurve {
            n: 24,
            points: c.points.clone(),
        };
        for rc in [0.5, 0.72, 0.9] {
            let res = collapse_residual(&[c.clone(), c2.clone()], rc, 1.3).unwrap();
            assert!(res < 1e-20);
        }
    }

    #[test]
    fn collapse_recovers_the_planted_crossing() {
        let grid: Vec<f64> = (0..15).map(|k| 0.3 + 0.05 * k as f64).collect();
        let curves = vec![
            synth(12, 0.72, 1.3, &grid),
            synth(24, 0.72, 1.3, &grid),
            synth(40, 0.72, 1.3, &grid),
        ];
        let rc_grid: Vec<f64> = (0..41).map(|k| 0.5 + 0.01 * k as f64).collect();
        let (rc, res) = estimate_crossing(&curves, &rc_grid, 1.3).unwrap();
        assert!((rc - 0.72).abs() < 0.015, "rc = {rc}");
        // piecewise-linear interpolation on distinct x grids leaves a bit
        assert!(res < 1e-3, "res = {res}");
        let r_at = |x: f64| collapse_residual(&curves, x, 1.3).unwrap();
        assert!(r_at(0.72) < r_at(0.5));
        assert!(r_at(0.72) < r_at(0.95));
    }

    #[test]
    fn pairwise_crossing_detection() {
        let grid: Vec<f64> = (0..15).map(|k| 0.3 + 0.05 * k as f64).collect();
        let a = synth(12, 0.7, 1.3, &grid);
        let b = synth(24, 0.7, 1.3, &grid);
        let xs = pairwise_crossings(&a, &b);
        assert_eq!(xs.len(), 1, "{xs:?}");
        assert!((xs[0] - 0.7).abs() < 0.01);
    }
}

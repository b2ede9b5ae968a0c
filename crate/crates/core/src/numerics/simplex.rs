use alloc::vec::Vec;

use crate::Result;

/// Stopping rule and budget for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    pub max_evals: usize,
    /// Converged when `f_worst − f_best ≤ ftol` and the simplex diameter
    /// (max-norm) is at most `xtol`.
    pub ftol: f64,
    pub xtol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            initial_step: 0.5,
            max_evals: 2000,
            ftol: 1e-10,
            xtol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Derivative-free minimisation with the standard reflection, expansion,
/// contraction and shrink coefficients (1, 2, ½, ½). Deterministic.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> Result<SimplexResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64> {
        *evals += 1;
        let v = f(x)?;
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    for p in &pts {
        vals.push(eval(p, &mut evals)?);
    }

    let mut converged = false;
    while evals < opts.max_evals {
        // stable sort keeps earlier vertices first among ties
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let diameter = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if vals[n] - vals[0] <= opts.ftol && diameter <= opts.xtol {
            converged = true;
            break;
        }

        let mut centroid = alloc::vec![0.0; n];
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let fr = eval(&xr, &mut evals)?;
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals)?;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals)?;
            (xc, if fc <= fr { fc } else { f64::INFINITY })
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals)?;
            (xc, if fc < vals[n] { fc } else { f64::INFINITY })
        };
        if fc.is_finite() {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        for i in 1..=n {
            let p: Vec<f64> = pts[0]
                .iter()
                .zip(&pts[i])
                .map(|(b, x)| b + 0.5 * (x - b))
                .collect();
            vals[i] = eval(&p, &mut evals)?;
            pts[i] = p;
        }
    }

    let best = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .expect("simplex has vertices");
    Ok(SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        evaluations: evals,
        converged,
    })
}

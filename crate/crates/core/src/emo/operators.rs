//! Real-coded variation: bounded SBX crossover and polynomial mutation.
//!
//! Both operators follow the bounded formulations of the reference NSGA-II
//! code. Random draws per variable happen in a fixed order so traces are
//! reproducible for a given generator state.

use rand::Rng;

use super::NsgaParams;

const EPS: f64 = 1e-14;

/// Simulated binary crossover of two parents.
///
/// Draw order: one draw for the pair-level crossover test, then per variable
/// one draw for the 50% participation test and, when the parents differ,
/// one spread draw and one swap draw.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    bounds: &[(f64, f64)],
    params: &NsgaParams,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.random::<f64>() > params.crossover_probability {
        return (c1, c2);
    }
    let eta = params.sbx_eta;
    for (i, &(yl, yu)) in bounds.iter().enumerate() {
        if rng.random::<f64>() > 0.5 {
            continue;
        }
        if (p1[i] - p2[i]).abs() <= EPS {
            continue;
        }
        let (y1, y2) = if p1[i] < p2[i] { (p1[i], p2[i]) } else { (p2[i], p1[i]) };
        let rand: f64 = rng.random();

        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if rand <= 1.0 / alpha {
                (rand * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - rand * alpha)).powf(1.0 / (eta + 1.0))
            }
        };

        let betaq = spread(1.0 + 2.0 * (y1 - yl) / (y2 - y1));
        let low = (0.5 * ((y1 + y2) - betaq * (y2 - y1))).clamp(yl, yu);
        let betaq = spread(1.0 + 2.0 * (yu - y2) / (y2 - y1));
        let high = (0.5 * ((y1 + y2) + betaq * (y2 - y1))).clamp(yl, yu);

        if rng.random::<f64>() <= 0.5 {
            c1[i] = high;
            c2[i] = low;
        } else {
            c1[i] = low;
            c2[i] = high;
        }
    }
    (c1, c2)
}

/// Polynomial mutation; each variable mutates with `mutation_probability`.
///
/// Draw order per variable: the mutation test, then one perturbation draw
/// when it fires.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &[f64],
    bounds: &[(f64, f64)],
    params: &NsgaParams,
    rng: &mut R,
) -> Vec<f64> {
    let mut y = x.to_vec();
    let eta = params.pm_eta;
    let power = 1.0 / (eta + 1.0);
    for (i, &(yl, yu)) in bounds.iter().enumerate() {
        if rng.random::<f64>() >= params.mutation_probability {
            continue;
        }
        let width = yu - yl;
        let delta1 = (y[i] - yl) / width;
        let delta2 = (yu - y[i]) / width;
        let rnd: f64 = rng.random();
        let deltaq = if rnd <= 0.5 {
            let xy = 1.0 - delta1;
            let val = 2.0 * rnd + (1.0 - 2.0 * rnd) * xy.powf(eta + 1.0);
            val.powf(power) - 1.0
        } else {
            let xy = 1.0 - delta2;
            let val = 2.0 * (1.0 - rnd) + 2.0 * (rnd - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(power)
        };
        y[i] = (y[i] + deltaq * width).clamp(yl, yu);
    }
    y
}

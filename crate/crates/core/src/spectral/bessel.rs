//! Modified Bessel functions of the first kind, integer order.
//!
//! All orders are produced together by Miller's backward recurrence
//! `I_{k-1} = I_{k+1} + (2k/θ) I_k`, normalized with `e^θ = I_0 + 2 Σ_{k≥1} I_k`.

use crate::error::{Error, Result};

pub const MAX_ARGUMENT: f64 = 100.0;
pub const MAX_ORDER: usize = 64;

/// Below this argument the two leading series terms are exact to double precision.
const SMALL_ARGUMENT: f64 = 1e-6;
const RESCALE_ABOVE: f64 = 1e250;

/// `I_order(theta)`.
pub fn bessel_i(order: usize, theta: f64) -> Result<f64> {
    Ok(bessel_i_sequence(order + 1, theta)?[order])
}

/// `[I_0(theta), …, I_{count-1}(theta)]`.
pub fn bessel_i_sequence(count: usize, theta: f64) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count - 1 > MAX_ORDER {
        return Err(Error::validation(format!(
            "Bessel order {} exceeds the supported maximum {MAX_ORDER}",
            count - 1
        )));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&theta) {
        return Err(Error::validation(format!(
            "Bessel argument {theta} outside [0, {MAX_ARGUMENT}]"
        )));
    }
    if theta == 0.0 {
        let mut out = vec![0.0; count];
        out[0] = 1.0;
        return Ok(out);
    }
    if theta < SMALL_ARGUMENT {
        return Ok(small_argument(count, theta));
    }

    let top = count + theta.ceil() as usize + 60 + (8.0 * (theta + count as f64).sqrt()).ceil() as usize;
    let mut out = vec![0.0; count];
    let (mut above, mut current) = (0.0f64, 1e-30f64);
    let mut sum = 0.0f64;
    for k in (1..=top).rev() {
        // current = I_k, above = I_{k+1} (unnormalized)
        if k < count {
            out[k] = current;
        }
        sum += current;
        let below = above + (2.0 * k as f64 / theta) * current;
        above = current;
        current = below;
        if current > RESCALE_ABOVE {
            let f = 1.0 / RESCALE_ABOVE;
            current *= f;
            above *= f;
            sum *= f;
            out.iter_mut().for_each(|v| *v *= f);
        }
    }
    out[0] = current;
    let norm = theta.exp() / (current + 2.0 * sum);
    out.iter_mut().for_each(|v| *v *= norm);
    Ok(out)
}

fn small_argument(count: usize, theta: f64) -> Vec<f64> {
    let half = theta / 2.0;
    let mut leading = 1.0;
    (0..count)
        .map(|i| {
            if i > 0 {
                leading *= half / i as f64;
            }
            leading * (1.0 + half * half / (i + 1) as f64)
        })
        .collect()
}

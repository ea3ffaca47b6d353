//! Embedded Dormand-Prince 5(4) integrator with dense output.
//!
//! Coefficients follow the classical DOPRI5 tableau; the dense-output
//! polynomial is the standard order-4 continuous extension. The last stage is
//! reused as the first stage of the next step (FSAL).

use crate::error::{CoreError, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error coefficients: difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense-output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub struct StepSettings {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_step: f64,
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t_end`, writing the dense-output
/// state at each requested sample time (which must be ascending and lie in
/// `[t0, t_end]`). Returns one state row per sample.
pub fn integrate<F>(
    f: &F,
    t0: f64,
    t_end: f64,
    y0: &[f64],
    settings: &StepSettings,
    sample_times: &[f64],
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if !(t_end > t0) {
        return Err(CoreError::Integration(format!(
            "time span must be increasing, got [{t0}, {t_end}]"
        )));
    }
    if !(settings.rtol > 0.0) || !(settings.atol > 0.0) {
        return Err(CoreError::Integration("tolerances must be positive".into()));
    }
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    f(t, &y, &mut k1);

    let mut h = settings.initial_step.min(settings.max_step).min(t_end - t0);
    let mut out = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0usize;

    // Sample anything at or before t0 directly.
    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        out.push(y.clone());
        next_sample += 1;
    }

    let max_rejects_in_a_row = 64;
    let mut rejects = 0usize;

    while t < t_end {
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(CoreError::Integration(format!("step size underflow at t = {t}")));
        }
        let h_this = h.min(t_end - t);

        macro_rules! combine {
            ($($w:expr => $k:ident),+) => {
                for i in 0..dim {
                    stage[i] = y[i] + h_this * ($($w * $k[i] +)+ 0.0);
                }
            };
        }

        combine!(A21 => k1);
        f(t + C2 * h_this, &stage, &mut k2);
        combine!(A31 => k1, A32 => k2);
        f(t + C3 * h_this, &stage, &mut k3);
        combine!(A41 => k1, A42 => k2, A43 => k3);
        f(t + C4 * h_this, &stage, &mut k4);
        combine!(A51 => k1, A52 => k2, A53 => k3, A54 => k4);
        f(t + C5 * h_this, &stage, &mut k5);
        combine!(A61 => k1, A62 => k2, A63 => k3, A64 => k4, A65 => k5);
        f(t + h_this, &stage, &mut k6);
        for i in 0..dim {
            y_new[i] = y[i] + h_this * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h_this, &y_new, &mut k7);

        // Weighted RMS error estimate.
        let mut err_sq = 0.0;
        for i in 0..dim {
            let e = h_this * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = settings.atol + settings.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / dim as f64).sqrt();

        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::Integration(format!("non-finite state at t = {t}")));
        }

        if err <= 1.0 {
            // Accepted: emit dense output for samples inside (t, t + h].
            let t_new = t + h_this;
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new + 1e-12 * t_new.abs().max(1.0)
            {
                let ts = sample_times[next_sample].min(t_new);
                let theta = ((ts - t) / h_this).clamp(0.0, 1.0);
                let mut row = vec![0.0; dim];
                for i in 0..dim {
                    let ydiff = y_new[i] - y[i];
                    let bspl = h_this * k1[i] - ydiff;
                    let r1 = y[i];
                    let r2 = ydiff;
                    let r3 = bspl;
                    let r4 = ydiff - h_this * k7[i] - bspl;
                    let r5 = h_this
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                    row[i] = r1 + theta * (r2 + (1.0 - theta) * (r3 + theta * (r4 + (1.0 - theta) * r5)));
                }
                out.push(row);
                next_sample += 1;
            }

            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7); // FSAL
            rejects = 0;

            let factor = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            h = (h_this * factor).min(settings.max_step);
        } else {
            rejects += 1;
            if rejects > max_rejects_in_a_row {
                return Err(CoreError::Integration(format!(
                    "too many consecutive step rejections at t = {t}"
                )));
            }
            let factor = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h = h_this * factor;
        }
    }

    // Any remaining samples sit at t_end within rounding.
    while next_sample < sample_times.len() {
        out.push(y.clone());
        next_sample += 1;
    }

    Ok(out)
}

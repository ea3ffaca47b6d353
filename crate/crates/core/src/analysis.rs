//! Extraction of period, relative phases, and amplitudes from simulated
//! trajectories, and comparison against spectral predictions.
//!
//! Period and phase come from mean-crossing upstrokes with linear
//! interpolation; near onset the waveforms are close to sinusoidal, so
//! interpolated crossings resolve timing well below the sample spacing.

use serde::{Deserialize, Serialize};

use crate::bifurcation::HopfReport;
use crate::dynamics::Trajectory;
use crate::error::{CoreError, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Circular distance between two angles, in [0, pi].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

/// Measured limit-cycle structure of a trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OscillationMeasurement {
    pub period: Option<f64>,
    /// Phase of each component relative to the reference component, in
    /// [0, 2pi); `n_agents` rows by `n_topics` columns.
    pub phase: Vec<Vec<f64>>,
    /// Half peak-to-trough amplitude per component.
    pub amplitude: Vec<Vec<f64>>,
    /// Amplitudes scaled so the largest is 1.
    pub amplitude_normalized: Vec<Vec<f64>>,
    pub oscillating: bool,
    /// Waveform periodicity defect: max over components of
    /// `|x(t) - x(t+T)| / amplitude` over one period.
    pub residual: f64,
}

impl OscillationMeasurement {
    pub fn phase_flat(&self) -> Vec<f64> {
        self.phase.iter().flatten().copied().collect()
    }

    pub fn amplitude_flat(&self) -> Vec<f64> {
        self.amplitude.iter().flatten().copied().collect()
    }
}

/// Comparison tolerances; recorded in every report because the underlying
/// "near onset" statements carry no quantitative bound of their own.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ToleranceSet {
    /// Relative period error.
    pub period_rel: f64,
    /// Absolute circular phase error, radians.
    pub phase_abs: f64,
    /// Relative amplitude spread within groups predicted equal.
    pub amplitude_spread: f64,
}

impl Default for ToleranceSet {
    fn default() -> Self {
        Self {
            period_rel: 0.03,
            phase_abs: 0.2,
            amplitude_spread: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareVerdict {
    Pass,
    Fail,
}

/// Prediction versus measurement, with per-quantity errors and a verdict that
/// is a pure function of the errors and the tolerance set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub predicted: HopfReport,
    pub measured: OscillationMeasurement,
    pub period_rel_err: Option<f64>,
    pub phase_max_abs_err: Option<f64>,
    pub amplitude_ordering_agrees: Option<bool>,
    pub amplitude_spread_ok: Option<bool>,
    pub verdict: CompareVerdict,
    pub reason: Option<String>,
    pub tolerances: ToleranceSet,
}

/// Keeps the suffix of the trajectory after the given time fraction.
pub fn discard_transient(traj: &Trajectory, fraction: f64) -> Result<Trajectory> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CoreError::Measurement(format!(
            "transient fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let t0 = traj.times[0];
    let t1 = *traj.times.last().expect("nonempty trajectory");
    let cutoff = t0 + fraction * (t1 - t0);
    let keep: Vec<usize> = (0..traj.n_samples()).filter(|&r| traj.times[r] >= cutoff).collect();
    if keep.len() < 10 {
        return Err(CoreError::Measurement(format!(
            "only {} samples remain after discarding the transient; need at least 10",
            keep.len()
        )));
    }
    let times: Vec<f64> = keep.iter().map(|&r| traj.times[r]).collect();
    let states = nalgebra::DMatrix::from_fn(keep.len(), traj.n_components(), |r, c| traj.states[(keep[r], c)]);
    Ok(Trajectory {
        times,
        states,
        meta: traj.meta.clone(),
    })
}

/// Upward crossings of `level`, with linear interpolation between samples.
fn upcrossings(times: &[f64], series: &[f64], level: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..series.len().saturating_sub(1) {
        let (a, b) = (series[i] - level, series[i + 1] - level);
        if a <= 0.0 && b > 0.0 {
            let frac = if b - a != 0.0 { -a / (b - a) } else { 0.0 };
            out.push(times[i] + frac * (times[i + 1] - times[i]));
        }
    }
    out
}

fn interp(times: &[f64], series: &[f64], t: f64) -> f64 {
    match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
        Ok(i) => series[i],
        Err(i) => {
            if i == 0 {
                series[0]
            } else if i >= times.len() {
                *series.last().unwrap()
            } else {
                let w = (t - times[i - 1]) / (times[i] - times[i - 1]);
                series[i - 1] * (1.0 - w) + series[i] * w
            }
        }
    }
}

/// Extracts period, relative phases, and amplitudes from a (post-transient)
/// trajectory.
///
/// A trajectory counts as oscillating only if every component shows at least
/// three mean-crossing upstrokes, the inter-crossing intervals have relative
/// spread below 5%, and the peak-to-trough excursion exceeds ten times the
/// integrator's absolute tolerance. The phase of component `c` is
/// `2 pi ((t_cross(c) - t_cross(ref)) mod T) / T`, i.e. the delay of its
/// upstroke relative to the reference component's.
pub fn measure_oscillation(traj: &Trajectory) -> Result<OscillationMeasurement> {
    let n = traj.n_samples();
    if n < 20 {
        return Err(CoreError::Measurement(format!("need at least 20 samples, got {n}")));
    }
    // Tolerate at most 1% jitter in the sampling grid.
    let dt_mean = (traj.times[n - 1] - traj.times[0]) / (n as f64 - 1.0);
    for w in traj.times.windows(2) {
        if ((w[1] - w[0]) - dt_mean).abs() > 0.01 * dt_mean {
            return Err(CoreError::Measurement("non-uniform sampling grid (jitter above 1%)".into()));
        }
    }

    let na = traj.meta.n_agents;
    let no = traj.meta.n_topics;
    let ncomp = traj.n_components();
    let atol = traj.meta.atol;

    let mut series: Vec<Vec<f64>> = Vec::with_capacity(ncomp);
    let mut means = vec![0.0; ncomp];
    let mut swing = vec![0.0; ncomp];
    for c in 0..ncomp {
        let s = traj.component(c);
        means[c] = s.iter().sum::<f64>() / n as f64;
        let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        swing[c] = hi - lo;
        series.push(s);
    }

    let crossings: Vec<Vec<f64>> = (0..ncomp)
        .map(|c| upcrossings(&traj.times, &series[c], means[c]))
        .collect();

    // Reference component: (agent 1, topic 1), unless its swing is below 1%
    // of the largest.
    let max_swing = swing.iter().copied().fold(0.0, f64::max);
    let mut reference = 0usize;
    if swing[0] < 0.01 * max_swing {
        reference = swing
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.partial_cmp(b).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
    }

    let mut oscillating = true;
    for c in 0..ncomp {
        if crossings[c].len() < 3 || swing[c] <= 10.0 * atol {
            oscillating = false;
            break;
        }
        let intervals: Vec<f64> = crossings[c].windows(2).map(|w| w[1] - w[0]).collect();
        let mean_t = intervals.iter().sum::<f64>() / intervals.len() as f64;
        let max_dev = intervals.iter().map(|t| (t - mean_t).abs()).fold(0.0, f64::max);
        if max_dev / mean_t >= 0.05 {
            oscillating = false;
            break;
        }
    }

    let shape = |flat: &[f64]| -> Vec<Vec<f64>> {
        (0..na).map(|i| flat[i * no..(i + 1) * no].to_vec()).collect()
    };

    if !oscillating {
        let amp: Vec<f64> = swing.iter().map(|s| s / 2.0).collect();
        let max_amp = amp.iter().copied().fold(0.0, f64::max).max(1e-300);
        let normalized: Vec<f64> = amp.iter().map(|a| a / max_amp).collect();
        return Ok(OscillationMeasurement {
            period: None,
            phase: shape(&vec![0.0; ncomp]),
            amplitude: shape(&amp),
            amplitude_normalized: shape(&normalized),
            oscillating: false,
            residual: f64::NAN,
        });
    }

    // Period: mean inter-upcrossing interval of the reference component.
    let ref_cross = &crossings[reference];
    let period = (ref_cross[ref_cross.len() - 1] - ref_cross[0]) / (ref_cross.len() as f64 - 1.0);

    // Phases relative to the reference crossing.
    let t_ref = ref_cross[0];
    let mut phase = vec![0.0; ncomp];
    for c in 0..ncomp {
        let t_c = crossings[c]
            .iter()
            .copied()
            .find(|&t| t >= t_ref)
            .unwrap_or_else(|| crossings[c][crossings[c].len() - 1]);
        phase[c] = (TWO_PI * ((t_c - t_ref) / period)).rem_euclid(TWO_PI);
    }

    // Amplitudes over the last three periods.
    let t_end = *traj.times.last().unwrap();
    let window_start = t_end - 3.0 * period;
    let mut amp = vec![0.0; ncomp];
    for c in 0..ncomp {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (r, &t) in traj.times.iter().enumerate() {
            if t >= window_start {
                lo = lo.min(series[c][r]);
                hi = hi.max(series[c][r]);
            }
        }
        amp[c] = (hi - lo) / 2.0;
    }

    // Periodicity defect over one period: compare x(t) with x(t + T).
    let probe_start = t_end - 2.0 * period;
    let mut residual = 0.0f64;
    let steps = 64;
    for c in 0..ncomp {
        for s in 0..steps {
            let t = probe_start + (s as f64 / steps as f64) * period;
            let defect = (interp(&traj.times, &series[c], t) - interp(&traj.times, &series[c], t + period)).abs();
            residual = residual.max(defect / amp[c].max(1e-300));
        }
    }

    let max_amp = amp.iter().copied().fold(0.0, f64::max).max(1e-300);
    let normalized: Vec<f64> = amp.iter().map(|a| a / max_amp).collect();

    Ok(OscillationMeasurement {
        period: Some(period),
        phase: shape(&phase),
        amplitude: shape(&amp),
        amplitude_normalized: shape(&normalized),
        oscillating: true,
        residual,
    })
}

/// Relative gap between two amplitudes, against the larger one.
fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b).max(1e-300)
}

/// Compares a Hopf prediction with a measurement. Predicted-amplitude
/// orderings are only enforced for pairs separated by more than a 2% relative
/// gap; components predicted equal (within that gap) must instead agree to
/// within the amplitude-spread tolerance.
pub fn compare(pred: &HopfReport, meas: &OscillationMeasurement, tol: &ToleranceSet) -> ComparisonReport {
    let fail = |reason: &str| ComparisonReport {
        predicted: pred.clone(),
        measured: meas.clone(),
        period_rel_err: None,
        phase_max_abs_err: None,
        amplitude_ordering_agrees: None,
        amplitude_spread_ok: None,
        verdict: CompareVerdict::Fail,
        reason: Some(reason.to_string()),
        tolerances: *tol,
    };

    if !pred.assumption1 || pred.predicted_period.is_none() {
        return fail("prediction unavailable (Assumption 1 fails or K <= 0)");
    }
    if !meas.oscillating {
        return fail("trajectory decays or is not periodic");
    }

    let t_pred = pred.predicted_period.unwrap();
    let t_meas = meas.period.unwrap();
    let period_rel_err = (t_meas - t_pred).abs() / t_pred;

    let pred_phase = pred.phase_flat().expect("prediction has phases");
    let meas_phase = meas.phase_flat();
    let phase_max_abs_err = pred_phase
        .iter()
        .zip(&meas_phase)
        .map(|(p, m)| circular_distance(*p, *m))
        .fold(0.0, f64::max);

    let pred_amp = pred.amplitude_flat().expect("prediction has amplitudes");
    let meas_amp = meas.amplitude_flat();
    let mut ordering = true;
    for i in 0..pred_amp.len() {
        for j in 0..pred_amp.len() {
            if relative_gap(pred_amp[i], pred_amp[j]) > 0.02 && pred_amp[i] > pred_amp[j] && meas_amp[i] <= meas_amp[j]
            {
                ordering = false;
            }
        }
    }

    // Cluster components whose predicted amplitudes are equal within 2% and
    // check the measured spread inside each cluster.
    let mut order: Vec<usize> = (0..pred_amp.len()).collect();
    order.sort_by(|&i, &j| pred_amp[i].partial_cmp(&pred_amp[j]).unwrap());
    let mut spread_ok = true;
    let mut c0 = 0usize;
    while c0 < order.len() {
        let mut c1 = c0;
        while c1 + 1 < order.len() && relative_gap(pred_amp[order[c1 + 1]], pred_amp[order[c1]]) <= 0.02 {
            c1 += 1;
        }
        if c1 > c0 {
            let cluster: Vec<f64> = order[c0..=c1].iter().map(|&i| meas_amp[i]).collect();
            let hi = cluster.iter().copied().fold(0.0, f64::max);
            let lo = cluster.iter().copied().fold(f64::INFINITY, f64::min);
            let mean = cluster.iter().sum::<f64>() / cluster.len() as f64;
            if (hi - lo) / mean.max(1e-300) > tol.amplitude_spread {
                spread_ok = false;
            }
        }
        c0 = c1 + 1;
    }

    let pass = period_rel_err <= tol.period_rel && phase_max_abs_err <= tol.phase_abs && ordering && spread_ok;
    let reason = if pass {
        None
    } else {
        let mut reasons = Vec::new();
        if period_rel_err > tol.period_rel {
            reasons.push(format!("period error {period_rel_err:.4} > {:.4}", tol.period_rel));
        }
        if phase_max_abs_err > tol.phase_abs {
            reasons.push(format!("phase error {phase_max_abs_err:.4} > {:.4}", tol.phase_abs));
        }
        if !ordering {
            reasons.push("amplitude ordering disagrees".into());
        }
        if !spread_ok {
            reasons.push("amplitude spread exceeds tolerance".into());
        }
        Some(reasons.join("; "))
    };

    ComparisonReport {
        predicted: pred.clone(),
        measured: meas.clone(),
        period_rel_err: Some(period_rel_err),
        phase_max_abs_err: Some(phase_max_abs_err),
        amplitude_ordering_agrees: Some(ordering),
        amplitude_spread_ok: Some(spread_ok),
        verdict: if pass { CompareVerdict::Pass } else { CompareVerdict::Fail },
        reason,
        tolerances: *tol,
    }
}

//! The full nonlinear belief-update vector field and its time integration.

pub mod dopri5;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::Model;

/// Integration and output-sampling controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    /// Cap on the step size; `None` means `t_final / 100`.
    pub max_step: Option<f64>,
    /// Spacing of output samples.
    pub output_stride: f64,
}

impl SimulationSettings {
    pub fn with_stride(output_stride: f64) -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            initial_step: 1e-3,
            max_step: None,
            output_stride,
        }
    }
}

/// Provenance of a trajectory: model dimensions, gains, and integrator
/// settings, so a stored trajectory can be interpreted on its own.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub n_agents: usize,
    pub n_topics: usize,
    pub d: f64,
    pub u: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub rtol: f64,
    pub atol: f64,
    pub output_stride: f64,
    pub seed: Option<u64>,
}

/// Time-sampled state history in agent-major component order.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One row per sample, `n_agents * n_topics` columns.
    pub states: DMatrix<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    pub fn n_components(&self) -> usize {
        self.states.ncols()
    }

    /// One component's series as a column vector view.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states.column(c).iter().copied().collect()
    }
}

/// Right-hand side of the belief update law.
///
/// For agent `i` and topic `j` (`z` agent-major):
/// `dz_ij = -d z_ij + u * ( S1(alpha z_ij + gamma sum_k (A_a)_ik z_kj)
///          + sum_{l != j} S2((A_o)_jl (beta z_il + delta sum_k (A_a)_ik z_kl)) )`.
/// The belief-system weight multiplies both terms inside each cross-topic
/// saturation; cross-topic terms are saturated one topic at a time.
pub fn rhs(model: &Model, z: &[f64], dz: &mut [f64]) {
    let na = model.n_agents();
    let no = model.n_topics();
    debug_assert_eq!(z.len(), na * no);
    debug_assert_eq!(dz.len(), na * no);
    let p = model.params();
    let a_a = model.communication_matrix();
    let a_o = model.belief_system_matrix();

    // Social sums s_il = sum_k (A_a)_ik z_kl (the diagonal of A_a is zero).
    let mut social = vec![0.0; na * no];
    for i in 0..na {
        for k in 0..na {
            let w = a_a[(i, k)];
            if w == 0.0 {
                continue;
            }
            for l in 0..no {
                social[i * no + l] += w * z[k * no + l];
            }
        }
    }

    for i in 0..na {
        for j in 0..no {
            let idx = i * no + j;
            let mut acc = p.s1.eval(p.alpha * z[idx] + p.gamma * social[idx]);
            for l in 0..no {
                if l == j {
                    continue;
                }
                let w = a_o[(j, l)];
                if w == 0.0 {
                    continue;
                }
                acc += p.s2.eval(w * (p.beta * z[i * no + l] + p.delta * social[i * no + l]));
            }
            dz[idx] = -p.d * z[idx] + p.u * acc;
        }
    }
}

/// Adaptive integration of the belief dynamics from `z0` over `[0, t_final]`,
/// sampled every `output_stride` time units. Deterministic for identical
/// inputs and settings.
pub fn integrate(model: &Model, z0: &[f64], t_final: f64, settings: &SimulationSettings) -> Result<Trajectory> {
    if z0.len() != model.dimension() {
        return Err(CoreError::Dimension(format!(
            "initial state has {} components, model needs {}",
            z0.len(),
            model.dimension()
        )));
    }
    if !(t_final > 0.0) {
        return Err(CoreError::Integration(format!("t_final must be positive, got {t_final}")));
    }
    if !(settings.output_stride > 0.0) {
        return Err(CoreError::Integration("output stride must be positive".into()));
    }

    // Uniform grid 0, s, 2s, ...; the final partial stride is not emitted so
    // the grid stays exactly uniform for the measurement stage.
    let mut times: Vec<f64> = Vec::new();
    let mut k = 0usize;
    loop {
        let t = k as f64 * settings.output_stride;
        if t > t_final * (1.0 + 1e-12) {
            break;
        }
        times.push(t.min(t_final));
        k += 1;
    }

    let step = dopri5::StepSettings {
        rtol: settings.rtol,
        atol: settings.atol,
        initial_step: settings.initial_step,
        max_step: settings.max_step.unwrap_or(t_final / 100.0),
    };
    let f = |_t: f64, y: &[f64], dy: &mut [f64]| rhs(model, y, dy);
    let rows = dopri5::integrate(&f, 0.0, t_final, z0, &step, &times)?;

    let ncols = model.dimension();
    let states = DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]);
    let p = model.params();
    Ok(Trajectory {
        times,
        states,
        meta: TrajectoryMeta {
            n_agents: model.n_agents(),
            n_topics: model.n_topics(),
            d: p.d,
            u: p.u,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            delta: p.delta,
            rtol: settings.rtol,
            atol: settings.atol,
            output_stride: settings.output_stride,
            seed: None,
        },
    })
}

/// Reproducible initial conditions: entries drawn independently and uniformly
/// from `[-scale, scale)` using the ChaCha8 stream cipher generator seeded
/// with `seed`. Each `u64` draw maps to `[0, 1)` via its top 53 bits, so the
/// sequence is identical on every platform.
pub fn random_initial(n: usize, scale: f64, seed: u64) -> Result<Vec<f64>> {
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    if !(scale > 0.0) {
        return Err(CoreError::Parameter(format!("initial-condition scale must be positive, got {scale}")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            (2.0 * unit - 1.0) * scale
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, SaturationSpec};
    use crate::signed_graph::{signed_cycle, switch_graph, SignedGraph, SwitchingSigns};
    use std::collections::BTreeSet;

    fn params(d: f64, u: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> ModelParams {
        ModelParams::new(
            d,
            u,
            alpha,
            beta,
            gamma,
            delta,
            SaturationSpec::tanh_unit(),
            SaturationSpec::half_tanh_double(),
        )
        .unwrap()
    }

    fn seven_ring_model(u: f64) -> Model {
        let g = signed_cycle(7, &(1..=7).collect::<BTreeSet<_>>()).unwrap().reversed();
        Model::new(&g, None, params(1.0, u, 0.1, 0.0, 0.1, 0.0)).unwrap()
    }

    #[test]
    fn origin_is_equilibrium() {
        let model = seven_ring_model(5.35);
        let z = vec![0.0; model.dimension()];
        let mut dz = vec![1.0; model.dimension()];
        rhs(&model, &z, &mut dz);
        assert!(dz.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn scalar_model_reduces_to_one_saturation() {
        let g = SignedGraph::from_edges(1, &[]).unwrap();
        let p = params(1.3, 2.0, 0.4, 0.0, 0.7, 0.0);
        let model = Model::new(&g, None, p).unwrap();
        let z = [0.25];
        let mut dz = [0.0];
        rhs(&model, &z, &mut dz);
        let expected = -1.3 * 0.25 + 2.0 * (0.4 * 0.25_f64).tanh();
        assert!((dz[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn rhs_is_odd() {
        let g = SignedGraph::from_edges(3, &[(1, 2, 1.0), (2, 3, -1.0), (3, 1, 1.0)]).unwrap();
        let go = SignedGraph::from_edges(2, &[(1, 2, -1.0), (2, 1, 1.0)]).unwrap();
        let model = Model::new(&g, Some(&go), params(1.0, 1.5, 0.1, 0.2, 0.3, 0.25)).unwrap();
        let z: Vec<f64> = (0..6).map(|i| 0.1 * (i as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let neg: Vec<f64> = z.iter().map(|v| -v).collect();
        let mut dz = vec![0.0; 6];
        let mut dzn = vec![0.0; 6];
        rhs(&model, &z, &mut dz);
        rhs(&model, &neg, &mut dzn);
        for (a, b) in dz.iter().zip(&dzn) {
            assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn rhs_linearizes_to_jacobian() {
        let g = SignedGraph::from_edges(3, &[(1, 2, 1.0), (2, 3, -1.0), (3, 1, 1.0), (1, 3, -1.0)]).unwrap();
        let go = SignedGraph::from_edges(2, &[(1, 2, 1.0), (2, 1, -1.0)]).unwrap();
        let p = params(1.0, 1.7, 0.1, 0.2, 0.3, 0.25);
        let model = Model::new(&g, Some(&go), p).unwrap();
        let j = model.jacobian_at_origin(1.7);

        let z0 = random_initial(6, 1.0, 9).unwrap();
        let norm: f64 = z0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let z: Vec<f64> = z0.iter().map(|v| v * 1e-8 / norm).collect();
        let mut dz = vec![0.0; 6];
        rhs(&model, &z, &mut dz);
        let jz = &j * DMatrix::from_column_slice(6, 1, &z);
        for i in 0..6 {
            // S'' = 0 makes the remainder cubic, far below 1e-13 at |z| = 1e-8.
            assert!((dz[i] - jz[(i, 0)]).abs() <= 1e-13);
        }
    }

    #[test]
    fn zero_attention_decays_exponentially() {
        let g = signed_cycle(4, &BTreeSet::from([1])).unwrap();
        let d = 0.8;
        let model = Model::new(&g, None, params(d, 0.0, 0.1, 0.0, 0.1, 0.0)).unwrap();
        let z0 = random_initial(4, 0.5, 3).unwrap();
        let t_final = 5.0 / d;
        let traj = integrate(&model, &z0, t_final, &SimulationSettings::with_stride(0.05)).unwrap();
        let last = traj.states.row(traj.n_samples() - 1);
        let norm0: f64 = z0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_end: f64 = last.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm_end <= norm0 * (-5.0f64).exp() * (1.0 + 1e-6));
    }

    #[test]
    fn below_threshold_decays_above_oscillates() {
        // u* = 5.2605 for the 7-ring. Below: decay. Above: a limit cycle with
        // period near 27.53 and equal amplitudes.
        let model = seven_ring_model(5.0);
        let z0 = random_initial(7, 0.01, 42).unwrap();
        let traj = integrate(&model, &z0, 400.0, &SimulationSettings::with_stride(0.5)).unwrap();
        let last = traj.states.row(traj.n_samples() - 1);
        let norm: f64 = last.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm < 1e-3, "should be decaying, |z| = {norm}");

        let model = seven_ring_model(5.35);
        let traj = integrate(&model, &z0, 1400.0, &SimulationSettings::with_stride(0.43)).unwrap();
        let cut = crate::analysis::discard_transient(&traj, 0.5).unwrap();
        let m = crate::analysis::measure_oscillation(&cut).unwrap();
        assert!(m.oscillating);
        let period = m.period.unwrap();
        assert!((period - 27.53).abs() / 27.53 < 0.03, "period {period}");
        let amps: Vec<f64> = m.amplitude.iter().flatten().copied().collect();
        let (lo, hi) = amps.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        assert!((hi - lo) / hi < 0.05, "amplitude spread");
    }

    #[test]
    fn trajectories_stay_bounded() {
        let g = SignedGraph::from_edges(3, &[(1, 2, 1.0), (2, 3, 1.0), (3, 1, -1.0)]).unwrap();
        let go = SignedGraph::from_edges(2, &[(1, 2, 1.0), (2, 1, -1.0)]).unwrap();
        let p = params(1.0, 3.0, 0.3, 0.4, 0.5, 0.2);
        let model = Model::new(&g, Some(&go), p).unwrap();
        let z0 = random_initial(6, 2.0, 17).unwrap();
        let traj = integrate(&model, &z0, 40.0, &SimulationSettings::with_stride(0.05)).unwrap();
        // Ultimate bound: (u/d) (sup S1 + (No-1) sup S2) + eps for t >= 10/d.
        let bound = 3.0 * (1.0 + 0.5) + 1e-6;
        for (row, &t) in traj.times.iter().enumerate().map(|(r, t)| (r, t)) {
            if t >= 10.0 {
                for c in 0..6 {
                    assert!(traj.states[(row, c)].abs() <= bound);
                }
            }
        }
    }

    #[test]
    fn mirror_symmetry_of_trajectories() {
        let model = seven_ring_model(5.35);
        let z0 = random_initial(7, 0.01, 5).unwrap();
        let neg: Vec<f64> = z0.iter().map(|v| -v).collect();
        let s = SimulationSettings::with_stride(0.5);
        let a = integrate(&model, &z0, 100.0, &s).unwrap();
        let b = integrate(&model, &neg, 100.0, &s).unwrap();
        for r in 0..a.n_samples() {
            for c in 0..7 {
                assert!((a.states[(r, c)] + b.states[(r, c)]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn switching_equivariance_of_trajectories() {
        let g = signed_cycle(5, &BTreeSet::from([2, 4])).unwrap();
        let go = SignedGraph::from_edges(2, &[(1, 2, 1.0), (2, 1, -1.0)]).unwrap();
        let p = params(1.0, 2.0, 0.2, 0.1, 0.4, 0.15);
        let m = SwitchingSigns::new(vec![1, -1, 1, 1, -1]).unwrap();
        let model = Model::new(&g, Some(&go), p).unwrap();
        let switched_model = Model::new(&switch_graph(&g, &m).unwrap(), Some(&go), p).unwrap();

        let z0 = random_initial(10, 0.01, 77).unwrap();
        // P = diag(m) (x) I applied to the initial state.
        let pz0: Vec<f64> = (0..10).map(|idx| m.get(idx / 2) * z0[idx]).collect();
        let s = SimulationSettings::with_stride(0.25);
        let base = integrate(&model, &z0, 100.0, &s).unwrap();
        let other = integrate(&switched_model, &pz0, 100.0, &s).unwrap();
        let mut worst = 0.0f64;
        for r in 0..base.n_samples() {
            for idx in 0..10 {
                let expect = m.get(idx / 2) * base.states[(r, idx)];
                worst = worst.max((other.states[(r, idx)] - expect).abs());
            }
        }
        assert!(worst <= 1e-6, "max deviation {worst}");
    }

    #[test]
    fn tightening_tolerances_converges() {
        let model = seven_ring_model(5.35);
        let z0 = random_initial(7, 0.01, 8).unwrap();
        let mut loose = SimulationSettings::with_stride(27.0);
        loose.rtol = 1e-8;
        loose.atol = 1e-10;
        let mut tight = loose;
        tight.rtol = 0.5e-8;
        tight.atol = 0.5e-10;
        let a = integrate(&model, &z0, 270.0, &loose).unwrap();
        let b = integrate(&model, &z0, 270.0, &tight).unwrap();
        let ra = a.states.row(a.n_samples() - 1);
        let rb = b.states.row(b.n_samples() - 1);
        let diff: f64 = ra.iter().zip(rb.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(diff < 10.0 * 1e-8, "endpoint shift {diff}");
    }

    #[test]
    fn random_initial_is_deterministic_and_in_range() {
        let a = random_initial(7, 0.01, 42).unwrap();
        let b = random_initial(7, 0.01, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|v| (-0.01..0.01).contains(v)));
        let c = random_initial(7, 0.01, 43).unwrap();
        assert_ne!(a, c);
        assert!(random_initial(3, 0.0, 1).is_err());
    }
}

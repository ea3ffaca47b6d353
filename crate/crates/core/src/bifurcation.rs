//! Indecision-breaking threshold, Hopf conditions, the criticality
//! coefficient, oscillation structure prediction, and graph-pair
//! classification.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::{Model, ModelParams};
use crate::signed_graph::{find_switching_to_eventually_positive, SignedGraph};
use crate::spectral::{
    compose_jacobian_spectrum, eig, eta_contribution, leading_eigenvalues, Spectrum, EIG_EQUAL_TOL,
};

/// Degenerate-Hopf verdict tolerance on the criticality coefficient.
pub const B_DEGENERATE_TOL: f64 = 1e-10;
/// A predicted amplitude below this fraction of the maximum disqualifies the
/// (1,1) component as the phase reference.
pub const PHASE_REFERENCE_MIN_AMPLITUDE: f64 = 1e-12;

pub(crate) mod opt_complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Option<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        z.map(|z| Parts { re: z.re, im: z.im }).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Complex64>, D::Error> {
        Ok(Option::<Parts>::deserialize(d)?.map(|p| Complex64::new(p.re, p.im)))
    }
}

/// Branching direction of the bifurcating periodic orbits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criticality {
    Supercritical,
    Subcritical,
    Degenerate,
}

/// Everything the spectral analysis predicts about the indecision-breaking
/// bifurcation: threshold, generating pair, criticality, and the oscillation
/// pattern. Prediction fields are absent when `K <= 0` or Assumption 1 fails.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfReport {
    #[serde(rename = "K")]
    pub k: f64,
    pub u_star: Option<f64>,
    #[serde(with = "opt_complex_serde")]
    pub lambda_dagger: Option<Complex64>,
    #[serde(with = "opt_complex_serde")]
    pub mu_dagger: Option<Complex64>,
    pub omega: Option<f64>,
    pub b: Option<f64>,
    pub criticality: Option<Criticality>,
    pub predicted_period: Option<f64>,
    /// Phase of each component relative to the reference, in [0, 2pi),
    /// `n_agents` rows by `n_topics` columns.
    pub phase: Option<Vec<Vec<f64>>>,
    /// Relative amplitudes, max-normalized, same shape as `phase`.
    pub amplitude: Option<Vec<Vec<f64>>>,
    pub assumption1: bool,
    pub notes: Vec<String>,
}

impl HopfReport {
    fn empty(k: f64, notes: Vec<String>) -> Self {
        Self {
            k,
            u_star: None,
            lambda_dagger: None,
            mu_dagger: None,
            omega: None,
            b: None,
            criticality: None,
            predicted_period: None,
            phase: None,
            amplitude: None,
            assumption1: false,
            notes,
        }
    }

    /// Flattened phase vector in agent-major component order.
    pub fn phase_flat(&self) -> Option<Vec<f64>> {
        self.phase.as_ref().map(|m| m.iter().flatten().copied().collect())
    }

    /// Flattened amplitude vector in agent-major component order.
    pub fn amplitude_flat(&self) -> Option<Vec<f64>> {
        self.amplitude.as_ref().map(|m| m.iter().flatten().copied().collect())
    }
}

/// Result of maximizing the social-network contribution over generating
/// pairs.
#[derive(Debug, Clone)]
pub struct KResult {
    pub k: f64,
    pub lambda: Complex64,
    pub mu: Complex64,
    /// Distinct non-conjugate maximizers, populated only on a tie.
    pub tied_pairs: Vec<(Complex64, Complex64)>,
}

const K_TIE_TOL: f64 = 1e-9;

/// Maximizes `Re(alpha + gamma lambda + beta mu + delta lambda mu)` over all
/// generating pairs. When the maximizer set is a single conjugate orbit the
/// returned member is the one whose imaginary contribution to `eta` is
/// positive; ties across distinct orbits are reported in `tied_pairs`.
pub fn compute_k(sa: &Spectrum, so: &Spectrum, p: &ModelParams) -> KResult {
    let mut best_k = f64::NEG_INFINITY;
    let mut candidates: Vec<(Complex64, Complex64)> = Vec::new();
    for la in sa.pairs() {
        for mo in so.pairs() {
            let k = eta_contribution(p, la.value, mo.value).re;
            if k > best_k + K_TIE_TOL {
                best_k = k;
                candidates.clear();
                candidates.push((la.value, mo.value));
            } else if (k - best_k).abs() <= K_TIE_TOL {
                let duplicate = candidates
                    .iter()
                    .any(|(l, m)| (l - la.value).norm() <= 1e-12 && (m - mo.value).norm() <= 1e-12);
                if !duplicate {
                    candidates.push((la.value, mo.value));
                }
            }
        }
    }

    let im_contribution =
        |l: Complex64, m: Complex64| (p.gamma * l + p.beta * m + p.delta * l * m).im;

    // Split candidates into conjugate orbits.
    let mut orbits: Vec<(Complex64, Complex64)> = Vec::new();
    for &(l, m) in &candidates {
        let seen = orbits
            .iter()
            .any(|&(l0, m0)| (l - l0.conj()).norm() <= K_TIE_TOL && (m - m0.conj()).norm() <= K_TIE_TOL
                || (l - l0).norm() <= K_TIE_TOL && (m - m0).norm() <= K_TIE_TOL);
        if !seen {
            orbits.push((l, m));
        }
    }

    let (lambda, mu) = candidates
        .iter()
        .copied()
        .max_by(|&(l1, m1), &(l2, m2)| {
            im_contribution(l1, m1)
                .partial_cmp(&im_contribution(l2, m2))
                .unwrap()
        })
        .expect("spectra are nonempty");

    KResult {
        k: best_k,
        lambda,
        mu,
        tied_pairs: if orbits.len() > 1 { candidates } else { Vec::new() },
    }
}

/// Critical attention `u* = d / K` at which the neutral equilibrium loses
/// stability. Defined only for `K > 0`.
pub fn critical_attention(p: &ModelParams, k: f64) -> Result<f64> {
    if k <= 0.0 {
        return Err(CoreError::Numerical(
            "origin never destabilizes via this mechanism (K <= 0); the stability lemma is inapplicable"
                .into(),
        ));
    }
    Ok(p.d / k)
}

/// Checks that the leading Jacobian eigenvalues at `u = u*` form exactly one
/// complex-conjugate pair with nonzero imaginary part.
pub fn check_assumption1(sa: &Spectrum, so: &Spectrum, p: &ModelParams) -> (bool, String) {
    let kr = compute_k(sa, so, p);
    if kr.k <= 0.0 {
        return (false, format!("K = {:.6} <= 0: origin never destabilizes", kr.k));
    }
    let u_star = p.d / kr.k;
    let composed = compose_jacobian_spectrum(sa, so, p, u_star);
    let max_re = composed.iter().map(|c| c.eta.re).fold(f64::NEG_INFINITY, f64::max);
    let leading: Vec<Complex64> = composed
        .iter()
        .map(|c| c.eta)
        .filter(|eta| eta.re >= max_re - EIG_EQUAL_TOL)
        .collect();

    let desc = format!(
        "leading eigenvalue set at u* = {u_star:.6}: [{}]",
        leading
            .iter()
            .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
            .collect::<Vec<_>>()
            .join(", ")
    );

    let holds = leading.len() == 2
        && (leading[0] - leading[1].conj()).norm() <= EIG_EQUAL_TOL
        && leading[0].im.abs() > EIG_EQUAL_TOL;
    (holds, desc)
}

/// The four eigenvectors entering the criticality coefficient, scaled to the
/// biorthogonal normalization `<w_a (x) w_o, v_a (x) v_o> = 2`.
#[derive(Debug, Clone)]
pub struct HopfEigenvectors {
    pub v_a: DVector<Complex64>,
    pub v_o: DVector<Complex64>,
    pub w_a: DVector<Complex64>,
    pub w_o: DVector<Complex64>,
    /// `|<conj(w_a (x) w_o), v_a (x) v_o>|`; should vanish for a simple pair.
    pub orthogonality_defect: f64,
}

fn inner(w: &DVector<Complex64>, v: &DVector<Complex64>) -> Complex64 {
    w.iter().zip(v.iter()).map(|(wi, vi)| wi.conj() * vi).sum()
}

fn unit_gauge(v: &DVector<Complex64>) -> DVector<Complex64> {
    let mut k = 0;
    let mut best = 0.0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            k = i;
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phase = Complex64::from_polar(1.0, -v[k].arg());
    v.map(|z| z * phase / norm)
}

/// Scales the eigenvector quadruple so the right vectors have unit norm with
/// the zero-phase gauge and the left pair carries the normalization
/// `<w_a (x) w_o, v_a (x) v_o> = 2`. The complementary orthogonality
/// condition is measured and reported, not enforced.
pub fn normalize_hopf_eigenvectors(
    v_a: &DVector<Complex64>,
    v_o: &DVector<Complex64>,
    w_a: &DVector<Complex64>,
    w_o: &DVector<Complex64>,
) -> Result<HopfEigenvectors> {
    let v_a = unit_gauge(v_a);
    let v_o = unit_gauge(v_o);
    let mut w_a = w_a.clone();
    let w_o = w_o.clone();

    let ip = inner(&w_a, &v_a) * inner(&w_o, &v_o);
    let scale = w_a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
        * w_o.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if ip.norm() <= 1e-10 * scale.max(1e-300) {
        return Err(CoreError::Numerical(
            "defective or mispaired eigenvectors: <w_a (x) w_o, v_a (x) v_o> vanishes".into(),
        ));
    }
    // A single complex factor on the left pair enforces the normalization.
    let c = (Complex64::new(2.0, 0.0) / ip).conj();
    w_a = w_a.map(|z| z * c);

    // <conj(w_a (x) w_o), v_a (x) v_o> = (w_a^T v_a)(w_o^T v_o).
    let plain_a: Complex64 = w_a.iter().zip(v_a.iter()).map(|(w, v)| w * v).sum();
    let plain_o: Complex64 = w_o.iter().zip(v_o.iter()).map(|(w, v)| w * v).sum();
    let orthogonality_defect = (plain_a * plain_o).norm();

    Ok(HopfEigenvectors {
        v_a,
        v_o,
        w_a,
        w_o,
        orthogonality_defect,
    })
}

/// Criticality coefficient of the reduced bifurcation equation.
///
/// `b = Re[(S1'''(0) (a + g l) |a + g l|^2
///        + S2'''(0) (b + dl l) m |b + dl l|^2 |m|^2)
///        * <w_a (x) w_o, |v_a (x) v_o|^2 (.) (v_a (x) v_o)>]`
/// with `l = lambda_dagger`, `m = mu_dagger`. Negative `b` means the periodic
/// orbits branch supercritically and are stable.
pub fn hopf_coefficient_b(
    lambda_dagger: Complex64,
    mu_dagger: Complex64,
    vectors: &HopfEigenvectors,
    p: &ModelParams,
) -> f64 {
    let t1 = p.alpha + p.gamma * lambda_dagger;
    let t2 = p.beta + p.delta * lambda_dagger;
    let coefficient = p.s1.third_derivative_at_zero() * t1 * t1.norm_sqr()
        + p.s2.third_derivative_at_zero() * t2 * mu_dagger * t2.norm_sqr() * mu_dagger.norm_sqr();

    let v = vectors.v_a.kronecker(&vectors.v_o);
    let w = vectors.w_a.kronecker(&vectors.w_o);
    let cubic: Complex64 = w
        .iter()
        .zip(v.iter())
        .map(|(wi, vi)| wi.conj() * (vi.norm_sqr() * vi))
        .sum();

    (coefficient * cubic).re
}

pub fn criticality_from_b(b: f64) -> Criticality {
    if b < -B_DEGENERATE_TOL {
        Criticality::Supercritical
    } else if b > B_DEGENERATE_TOL {
        Criticality::Subcritical
    } else {
        Criticality::Degenerate
    }
}

/// Full prediction pipeline: spectra, threshold, Assumption 1, eigenvector
/// normalization, criticality coefficient, and the period/phase/amplitude
/// pattern. Failures of the Hopf preconditions are encoded in the report
/// rather than returned as errors.
pub fn predict_oscillation(
    communication: &SignedGraph,
    belief_system: Option<&SignedGraph>,
    params: &ModelParams,
) -> Result<HopfReport> {
    let model = Model::new(communication, belief_system, *params)?;
    predict_for_model(&model)
}

/// [`predict_oscillation`] on an already-bound model.
pub fn predict_for_model(model: &Model) -> Result<HopfReport> {
    let p = model.params();
    let sa = eig(model.communication_matrix())?;
    let so = eig(model.belief_system_matrix())?;

    let mut notes: Vec<String> = Vec::new();
    notes.extend(sa.warnings().iter().cloned());
    notes.extend(so.warnings().iter().cloned());

    let kr = compute_k(&sa, &so, p);
    if !kr.tied_pairs.is_empty() {
        notes.push(format!(
            "K maximized by {} distinct generating pairs; Assumption 1 cannot hold",
            kr.tied_pairs.len()
        ));
    }

    if kr.k <= 0.0 {
        notes.push(format!(
            "K = {:.6} <= 0: the neutral equilibrium never destabilizes with increasing attention",
            kr.k
        ));
        return Ok(HopfReport::empty(kr.k, notes));
    }

    let u_star = p.d / kr.k;
    let (assumption1, leading_desc) = check_assumption1(&sa, &so, p);
    if !assumption1 {
        notes.push(format!("Assumption 1 fails: {leading_desc}"));
        let mut report = HopfReport::empty(kr.k, notes);
        report.u_star = Some(u_star);
        return Ok(report);
    }

    let lambda_dagger = kr.lambda;
    let mu_dagger = kr.mu;
    let omega = u_star * (p.gamma * lambda_dagger + p.beta * mu_dagger + p.delta * lambda_dagger * mu_dagger)
        .im
        .abs();
    let predicted_period = 2.0 * std::f64::consts::PI / omega;

    let mut report = HopfReport {
        k: kr.k,
        u_star: Some(u_star),
        lambda_dagger: Some(lambda_dagger),
        mu_dagger: Some(mu_dagger),
        omega: Some(omega),
        b: None,
        criticality: None,
        predicted_period: Some(predicted_period),
        phase: None,
        amplitude: None,
        assumption1: true,
        notes,
    };

    // Theorem-1 eigenvector assignment: v's are right eigenvectors for the
    // conjugates of the generating pair, w's are left eigenvectors for the
    // pair itself; both live in the eigenpair at conj(lambda_dagger) /
    // conj(mu_dagger).
    let pair_a = sa
        .pair_nearest(lambda_dagger.conj())
        .expect("nonempty spectrum");
    let pair_o = so.pair_nearest(mu_dagger.conj()).expect("nonempty spectrum");
    if (pair_a.value - lambda_dagger.conj()).norm() > 1e-6 {
        report
            .notes
            .push("could not locate the conjugate eigenpair of lambda_dagger".into());
        return Ok(report);
    }

    let vectors = match normalize_hopf_eigenvectors(&pair_a.right, &pair_o.right, &pair_a.left, &pair_o.left) {
        Ok(v) => v,
        Err(e) => {
            report.notes.push(format!("eigenvector normalization failed: {e}"));
            return Ok(report);
        }
    };
    if vectors.orthogonality_defect > 1e-8 {
        report.notes.push(format!(
            "biorthogonality defect {:.3e} exceeds tolerance; generating pair may be degenerate",
            vectors.orthogonality_defect
        ));
    }

    let b = hopf_coefficient_b(lambda_dagger, mu_dagger, &vectors, p);
    report.b = Some(b);
    let criticality = criticality_from_b(b);
    if criticality == Criticality::Degenerate {
        report
            .notes
            .push("criticality coefficient is numerically zero; branch stability is undetermined".into());
    }
    report.criticality = Some(criticality);

    // Phase and amplitude pattern of the predicted oscillation.
    let v = vectors.v_a.kronecker(&vectors.v_o);
    let na = model.n_agents();
    let no = model.n_topics();
    let moduli: Vec<f64> = v.iter().map(|z| z.norm()).collect();
    let max_mod = moduli.iter().copied().fold(0.0, f64::max);
    let mut reference = 0usize;
    if moduli[0] < PHASE_REFERENCE_MIN_AMPLITUDE * max_mod {
        reference = moduli
            .iter()
            .enumerate()
            .max_by(|(_, x), (_, y)| x.partial_cmp(y).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0);
        report.notes.push(format!(
            "component (1,1) has negligible predicted amplitude; phases are relative to component (agent {}, topic {})",
            reference / no + 1,
            reference % no + 1
        ));
    }
    let ref_arg = v[reference].arg();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut phase = vec![vec![0.0; no]; na];
    let mut amplitude = vec![vec![0.0; no]; na];
    for i in 0..na {
        for j in 0..no {
            let z = v[i * no + j];
            phase[i][j] = (z.arg() - ref_arg).rem_euclid(two_pi);
            amplitude[i][j] = z.norm() / max_mod;
        }
    }
    report.phase = Some(phase);
    report.amplitude = Some(amplitude);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NeverOscillates,
    SupportsOscillations,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassificationReason {
    UndirectedPair,
    BothEventuallyBalanced,
    ThresholdMet,
    ThresholdAvailable,
    NoCriterionApplies,
}

/// Outcome of the structural graph-pair classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphClassification {
    pub verdict: Verdict,
    pub reason: ClassificationReason,
    pub gamma_star: Option<f64>,
    pub beta_star: Option<f64>,
    #[serde(with = "opt_complex_serde")]
    pub generating_lambda: Option<Complex64>,
    #[serde(with = "opt_complex_serde")]
    pub generating_mu: Option<Complex64>,
}

/// Which gain the threshold applies to: the gain on the eventually balanced
/// graph's contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdGain {
    Gamma,
    Beta,
}

/// Critical gain above which the complex pair generates the leading Jacobian
/// eigenvalues.
///
/// `balanced` must have a simple, real, positive, strictly dominant
/// eigenvalue `r`; `complex_leading` must have a complex-conjugate leading
/// pair `(nu, conj nu)` with positive real part. Over all non-dominant
/// `x` in the balanced spectrum and non-leading `nu_o` in the other:
///
/// `g* = max -(other_gain * Re(nu - nu_o) + delta * Re(nu r - nu_o x)) / Re(r - x)`
///
/// Returns negative infinity when the competitor grid is empty (every
/// nonnegative gain already works).
pub fn oscillation_threshold(
    balanced: &Spectrum,
    complex_leading: &Spectrum,
    p: &ModelParams,
    which: ThresholdGain,
) -> Result<f64> {
    let dom_idx = balanced.strict_dominant_real_positive().ok_or_else(|| {
        CoreError::Numerical("threshold requires a simple real positive strictly dominant eigenvalue".into())
    })?;
    let r = balanced.pairs()[dom_idx].value.re;

    let lead = leading_eigenvalues(complex_leading, EIG_EQUAL_TOL);
    if lead.len() != 2 || lead[0].value.im.abs() <= EIG_EQUAL_TOL || lead[0].value.re <= 0.0 {
        return Err(CoreError::Numerical(
            "threshold requires a complex-conjugate leading pair with positive real part".into(),
        ));
    }
    let nu = if lead[0].value.im > 0.0 { lead[0].value } else { lead[1].value };

    let other_gain = match which {
        ThresholdGain::Gamma => p.beta,
        ThresholdGain::Beta => p.gamma,
    };

    let mut best = f64::NEG_INFINITY;
    for bx in balanced.pairs() {
        if (bx.value - Complex64::new(r, 0.0)).norm() <= EIG_EQUAL_TOL {
            continue;
        }
        let den = r - bx.value.re;
        if den <= 0.0 {
            return Err(CoreError::Numerical(
                "dominant eigenvalue of the balanced graph is not strictly leading".into(),
            ));
        }
        for cx in complex_leading.pairs() {
            if (cx.value - nu).norm() <= EIG_EQUAL_TOL || (cx.value - nu.conj()).norm() <= EIG_EQUAL_TOL {
                continue;
            }
            let num = other_gain * (nu - cx.value).re + p.delta * (nu * r - cx.value * bx.value).re;
            best = best.max(-num / den);
        }
    }
    Ok(best)
}

/// Applies the structural criteria: pairs that can never produce a Hopf
/// bifurcation at indecision breaking, pairs guaranteed to support one with a
/// gain threshold, and everything else as an explicit `Indeterminate`.
pub fn classify_graphs(
    communication: &SignedGraph,
    belief_system: Option<&SignedGraph>,
    p: &ModelParams,
) -> Result<GraphClassification> {
    let single_topic = SignedGraph::from_edges(1, &[])
        .expect("1-node graph is valid")
        .adjacency()
        .clone();
    // The single-topic belief system degenerates to the 1x1 identity.
    let a_o_matrix = match belief_system {
        Some(g) => g.adjacency().clone(),
        None => nalgebra::DMatrix::from_element(1, 1, 1.0),
    };
    drop(single_topic);

    let none = GraphClassification {
        verdict: Verdict::Indeterminate,
        reason: ClassificationReason::NoCriterionApplies,
        gamma_star: None,
        beta_star: None,
        generating_lambda: None,
        generating_mu: None,
    };

    let a_undirected = communication.is_undirected();
    let o_undirected = match belief_system {
        Some(g) => g.is_undirected(),
        None => true,
    };
    if a_undirected && o_undirected {
        return Ok(GraphClassification {
            verdict: Verdict::NeverOscillates,
            reason: ClassificationReason::UndirectedPair,
            ..none
        });
    }

    let balanced_a = find_switching_to_eventually_positive(communication)?.is_some();
    let balanced_o = match belief_system {
        Some(g) => find_switching_to_eventually_positive(g)?.is_some(),
        None => true,
    };
    if balanced_a && balanced_o {
        return Ok(GraphClassification {
            verdict: Verdict::NeverOscillates,
            reason: ClassificationReason::BothEventuallyBalanced,
            ..none
        });
    }

    let sa = eig(communication.adjacency())?;
    let so = eig(&a_o_matrix)?;

    let complex_leading_pair = |s: &Spectrum| -> Option<Complex64> {
        let lead = leading_eigenvalues(s, EIG_EQUAL_TOL);
        if lead.len() == 2 && lead[0].value.im.abs() > EIG_EQUAL_TOL && lead[0].value.re > 0.0 {
            Some(if lead[0].value.im > 0.0 { lead[0].value } else { lead[1].value })
        } else {
            None
        }
    };

    if balanced_a {
        if let Some(mu) = complex_leading_pair(&so) {
            let lambda = sa.pairs()[sa.strict_dominant_real_positive().expect("balanced")].value;
            let gamma_star = oscillation_threshold(&sa, &so, p, ThresholdGain::Gamma)?;
            return Ok(GraphClassification {
                verdict: Verdict::SupportsOscillations,
                reason: if p.gamma > gamma_star {
                    ClassificationReason::ThresholdMet
                } else {
                    ClassificationReason::ThresholdAvailable
                },
                gamma_star: Some(gamma_star),
                beta_star: None,
                generating_lambda: Some(lambda),
                generating_mu: Some(mu),
            });
        }
    } else if balanced_o {
        if let Some(lambda) = complex_leading_pair(&sa) {
            let mu = so.pairs()[so.strict_dominant_real_positive().expect("balanced")].value;
            let beta_star = oscillation_threshold(&so, &sa, p, ThresholdGain::Beta)?;
            return Ok(GraphClassification {
                verdict: Verdict::SupportsOscillations,
                reason: if p.beta > beta_star {
                    ClassificationReason::ThresholdMet
                } else {
                    ClassificationReason::ThresholdAvailable
                },
                gamma_star: None,
                beta_star: Some(beta_star),
                generating_lambda: Some(lambda),
                generating_mu: Some(mu),
            });
        }
    }

    Ok(none)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SaturationSpec;
    use crate::signed_graph::{signed_cycle, switch_graph, SwitchingSigns};
    use nalgebra::DMatrix;
    use std::collections::BTreeSet;
    use std::f64::consts::PI;

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

    fn k4() -> SignedGraph {
        SignedGraph::from_adjacency(DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap()
    }

    fn companion_x3_minus_x_plus_1() -> SignedGraph {
        SignedGraph::from_edges(3, &[(1, 2, 1.0), (2, 3, 1.0), (3, 1, -1.0), (3, 2, 1.0)]).unwrap()
    }

    /// The seven-agent ring whose spectral data match the reported example:
    /// every agent antagonistically senses its predecessor.
    fn seven_ring() -> SignedGraph {
        signed_cycle(7, &(1..=7).collect()).unwrap().reversed()
    }

    fn single_topic_spectrum() -> Spectrum {
        eig(&DMatrix::from_element(1, 1, 1.0)).unwrap()
    }

    #[test]
    fn k_collapses_to_alpha_without_coupling() {
        let g = signed_cycle(5, &BTreeSet::from([2])).unwrap();
        let p = params(1.0, 0.0, 0.37, 0.0, 0.0, 0.0);
        let sa = eig(g.adjacency()).unwrap();
        let so = single_topic_spectrum();
        let kr = compute_k(&sa, &so, &p);
        assert!((kr.k - 0.37).abs() < 1e-12);
    }

    #[test]
    fn k_for_seven_cycle_single_topic() {
        let g = seven_ring();
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);
        let sa = eig(g.adjacency()).unwrap();
        let so = single_topic_spectrum();
        let kr = compute_k(&sa, &so, &p);
        let expected = 0.1 + 0.1 * (PI / 7.0).cos();
        assert!((kr.k - expected).abs() < 1e-12, "K = {}", kr.k);
        assert!(kr.lambda.im > 0.0, "positive-Im member expected");
        let u_star = critical_attention(&p, kr.k).unwrap();
        assert!((u_star - 5.2604745).abs() < 1e-6);
    }

    #[test]
    fn k_cross_conjugate_maximizer() {
        // With both spectra complex-leading and delta > 0, the cross pairing
        // (lambda, conj mu) maximizes Re since -delta lc mc > 0 there.
        let a2c = SignedGraph::from_adjacency(DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 1.0, 1.0, //
                0.0, 0.0, 0.0, 1.0, //
                1.0, 1.0, 0.0, -1.0, //
                -1.0, 0.0, -1.0, 0.0,
            ],
        ))
        .unwrap();
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);
        let sa = eig(a2c.adjacency()).unwrap();
        let so = eig(companion_x3_minus_x_plus_1().adjacency()).unwrap();
        let kr = compute_k(&sa, &so, &p);
        // Opposite-sign imaginary parts and a positive net Im contribution.
        assert!(kr.lambda.im * kr.mu.im < 0.0);
        let imc = (p.gamma * kr.lambda + p.beta * kr.mu + p.delta * kr.lambda * kr.mu).im;
        assert!(imc > 0.0);
        assert!((p.d / kr.k - 1.657457754125).abs() < 1e-9);
    }

    #[test]
    fn critical_attention_values() {
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);
        assert!((critical_attention(&p, 0.19010).unwrap() - 5.260389).abs() < 1e-4);
        let p = params(1.0, 0.0, 0.5, 0.0, 0.0, 0.0);
        assert!((critical_attention(&p, 0.5).unwrap() - 2.0).abs() < 1e-15);
        let p = params(2.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!((critical_attention(&p, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(critical_attention(&p, 0.0).is_err());
        assert!(critical_attention(&p, -0.3).is_err());
    }

    #[test]
    fn assumption1_cases() {
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);

        // Undirected pair: all eta real.
        let ga = SignedGraph::from_adjacency(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let sa = eig(ga.adjacency()).unwrap();
        let so = single_topic_spectrum();
        let (holds, _) = check_assumption1(&sa, &so, &p);
        assert!(!holds);

        // Signed 7-cycle, single topic: a clean conjugate pair.
        let sa = eig(seven_ring().adjacency()).unwrap();
        let (holds, desc) = check_assumption1(&sa, &so, &p);
        assert!(holds, "{desc}");

        // Two decoupled agents: leading eigenvalue is real with multiplicity 2.
        let ga = SignedGraph::from_adjacency(DMatrix::zeros(2, 2)).unwrap();
        let sa = eig(ga.adjacency()).unwrap();
        let (holds, desc) = check_assumption1(&sa, &so, &p);
        assert!(!holds, "{desc}");
    }

    #[test]
    fn normalization_antagonistic_ring() {
        // A_a = [[0,1],[-1,0]], lambda_dagger = i. Hand values:
        // v_a = (1, -i)/sqrt(2), w_a = (sqrt(2), -sqrt(2) i).
        let v_a = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)]);
        let v_o = DVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
        let w_a = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)]);
        let w_o = DVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
        let n = normalize_hopf_eigenvectors(&v_a, &v_o, &w_a, &w_o).unwrap();

        let expected_va = 1.0 / 2.0_f64.sqrt();
        assert!((n.v_a[0] - Complex64::new(expected_va, 0.0)).norm() < 1e-14);
        assert!((n.v_a[1] - Complex64::new(0.0, -expected_va)).norm() < 1e-14);
        assert!((n.w_a[0] - Complex64::new(2.0_f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!((n.w_a[1] - Complex64::new(0.0, -(2.0_f64.sqrt()))).norm() < 1e-14);

        let ip = inner(&n.w_a.kronecker(&n.w_o), &n.v_a.kronecker(&n.v_o));
        assert!((ip - Complex64::new(2.0, 0.0)).norm() < 1e-14);

        // Idempotence.
        let again = normalize_hopf_eigenvectors(&n.v_a, &n.v_o, &n.w_a, &n.w_o).unwrap();
        assert!((again.v_a[0] - n.v_a[0]).norm() < 1e-14);
        assert!((again.w_a[1] - n.w_a[1]).norm() < 1e-14);
    }

    #[test]
    fn normalization_rejects_orthogonal_pairs() {
        let v = DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let w = DVector::from_vec(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let one = DVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
        assert!(normalize_hopf_eigenvectors(&v, &one, &w, &one).is_err());
    }

    #[test]
    fn b_for_two_ring_closed_form() {
        // alpha = 0.1, gamma = 1: b = -2 alpha (alpha^2 + gamma^2) = -0.202.
        let ga = SignedGraph::from_adjacency(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])).unwrap();
        let p = params(1.0, 0.0, 0.1, 0.0, 1.0, 0.0);
        let report = predict_oscillation(&ga, None, &p).unwrap();
        assert!(report.assumption1);
        assert!((report.u_star.unwrap() - 10.0).abs() < 1e-9);
        assert!((report.b.unwrap() + 0.202).abs() < 1e-6, "b = {:?}", report.b);
        assert_eq!(report.criticality.unwrap(), Criticality::Supercritical);

        // alpha = 0: K = 0, so the full pipeline reports no prediction; the
        // coefficient formula itself evaluates to Re(-2 i gamma^3) = 0.
        let p = params(1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        let report = predict_oscillation(&ga, None, &p).unwrap();
        assert!(!report.assumption1);
        assert!(report.b.is_none());

        let sa = eig(ga.adjacency()).unwrap();
        let lambda = Complex64::new(0.0, 1.0);
        let pair = sa.pair_nearest(lambda.conj()).unwrap();
        let one = DVector::from_vec(vec![Complex64::new(1.0, 0.0)]);
        let n = normalize_hopf_eigenvectors(&pair.right, &one, &pair.left, &one).unwrap();
        let b = hopf_coefficient_b(lambda, Complex64::new(1.0, 0.0), &n, &p);
        assert!(b.abs() <= 1e-10, "b = {b}");
        assert_eq!(criticality_from_b(b), Criticality::Degenerate);
    }

    #[test]
    fn seven_cycle_prediction_matches_reported_values() {
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);
        let report = predict_oscillation(&seven_ring(), None, &p).unwrap();
        assert!(report.assumption1);
        assert!((report.u_star.unwrap() - 5.26).abs() < 0.01);
        assert!((report.b.unwrap() + 0.0041).abs() < 0.0005);
        assert!((report.predicted_period.unwrap() - 27.53).abs() < 0.05);

        let phases = report.phase_flat().unwrap();
        let expected = [0.0, 3.59, 0.90, 4.49, 1.80, 5.39, 2.69];
        for (got, want) in phases.iter().zip(expected) {
            let diff = (got - want + PI).rem_euclid(2.0 * PI) - PI;
            assert!(diff.abs() < 0.05, "phase {got} vs {want}");
        }
        let amps = report.amplitude_flat().unwrap();
        for a in amps {
            assert!((a - 1.0).abs() < 1e-9, "amplitudes should be equal");
        }
    }

    #[test]
    fn unit_norm_scaling_is_what_reproduces_reported_b() {
        // With unit-modulus eigenvector entries instead of a unit-norm vector
        // the same formula gives b = -0.0289: the normalization convention is
        // pinned by the reported -0.0041.
        let pi7 = PI / 7.0;
        let lambda = Complex64::from_polar(1.0, pi7);
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);
        let t1 = p.alpha + p.gamma * lambda;
        let b_unit_entries = (-2.0 * t1 * t1.norm_sqr() * Complex64::new(2.0, 0.0)).re;
        assert!((b_unit_entries + 0.0289).abs() < 1e-4);
        let b_unit_norm = (-2.0 * t1 * t1.norm_sqr() * Complex64::new(2.0 / 7.0, 0.0)).re;
        assert!((b_unit_norm + 0.0041299).abs() < 1e-6);
    }

    #[test]
    fn k4_with_companion_belief_system() {
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);
        let report = predict_oscillation(&k4(), Some(&companion_x3_minus_x_plus_1()), &p).unwrap();
        assert!(report.assumption1);
        assert!((report.u_star.unwrap() - 0.941301405761).abs() < 1e-9);
        assert!(report.b.unwrap() < 0.0);
        // Same-topic phases are all zero: the communication graph has the
        // strong Perron-Frobenius property so v_a is positive.
        let phase = report.phase.as_ref().unwrap();
        for j in 0..3 {
            for i in 1..4 {
                let d = (phase[i][j] - phase[0][j]).rem_euclid(2.0 * PI);
                let d = d.min(2.0 * PI - d);
                assert!(d < 1e-9, "same-topic phase spread");
            }
        }
    }

    #[test]
    fn switched_k4_agents_in_antiphase() {
        let m = SwitchingSigns::new(vec![1, 1, -1, -1]).unwrap();
        let switched = switch_graph(&k4(), &m).unwrap();
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);
        let report = predict_oscillation(&switched, Some(&companion_x3_minus_x_plus_1()), &p).unwrap();
        let phase = report.phase.as_ref().unwrap();
        for j in 0..3 {
            for &i in &[2usize, 3] {
                let d = (phase[i][j] - phase[0][j]).rem_euclid(2.0 * PI);
                assert!((d - PI).abs() < 1e-9, "antiphase expected, got {d}");
            }
            let d = (phase[1][j] - phase[0][j]).rem_euclid(2.0 * PI);
            let d = d.min(2.0 * PI - d);
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn phases_are_gauge_invariant() {
        // Rotating the eigenvectors by any unit-modulus factor leaves the
        // relative phases unchanged because of the gauge normalization.
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);
        let g = seven_ring();
        let r1 = predict_oscillation(&g, None, &p).unwrap();
        let sa = eig(g.adjacency()).unwrap();
        let pair = sa.pair_nearest(r1.lambda_dagger.unwrap().conj()).unwrap();
        let rot = Complex64::from_polar(1.0, 1.234);
        let v_rot = pair.right.map(|z| z * rot);
        let n = normalize_hopf_eigenvectors(
            &v_rot,
            &DVector::from_vec(vec![Complex64::new(1.0, 0.0)]),
            &pair.left,
            &DVector::from_vec(vec![Complex64::new(1.0, 0.0)]),
        )
        .unwrap();
        let ref_arg = n.v_a[0].arg();
        for (i, want) in r1.phase_flat().unwrap().iter().enumerate() {
            let got = (n.v_a[i].arg() - ref_arg).rem_euclid(2.0 * PI);
            let d = (got - want).rem_euclid(2.0 * PI);
            let d = d.min(2.0 * PI - d);
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn b_invariant_under_vector_rescaling() {
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);
        let ga = k4();
        let go = companion_x3_minus_x_plus_1();
        let report = predict_oscillation(&ga, Some(&go), &p).unwrap();
        let b0 = report.b.unwrap();

        let sa = eig(ga.adjacency()).unwrap();
        let so = eig(go.adjacency()).unwrap();
        let pa = sa.pair_nearest(report.lambda_dagger.unwrap().conj()).unwrap();
        let po = so.pair_nearest(report.mu_dagger.unwrap().conj()).unwrap();
        let c = Complex64::from_polar(1.7, 0.618);
        let va = pa.right.map(|z| z * c);
        let wa = pa.left.map(|z| z / c.conj());
        let n = normalize_hopf_eigenvectors(&va, &po.right, &wa, &po.left).unwrap();
        let b1 = hopf_coefficient_b(report.lambda_dagger.unwrap(), report.mu_dagger.unwrap(), &n, &p);
        assert!((b0 - b1).abs() < 1e-10, "{b0} vs {b1}");
    }

    #[test]
    fn lemma1_sign_change_around_u_star() {
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);
        for (ga, go) in [
            (seven_ring(), None),
            (k4(), Some(companion_x3_minus_x_plus_1())),
        ] {
            let p = if go.is_none() { params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0) } else { p };
            let report = predict_oscillation(&ga, go.as_ref(), &p).unwrap();
            let u_star = report.u_star.unwrap();
            let sa = eig(ga.adjacency()).unwrap();
            let a_o = go
                .as_ref()
                .map(|g| g.adjacency().clone())
                .unwrap_or_else(|| DMatrix::from_element(1, 1, 1.0));
            let so = eig(&a_o).unwrap();
            for (factor, expect_positive) in [(0.999, false), (1.001, true)] {
                let max_re = compose_jacobian_spectrum(&sa, &so, &p, u_star * factor)
                    .iter()
                    .map(|c| c.eta.re)
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(max_re > 0.0, expect_positive, "factor {factor}: max Re = {max_re}");
            }
        }
    }

    #[test]
    fn switching_covariance_of_predictions() {
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);
        let go = companion_x3_minus_x_plus_1();
        let base = predict_oscillation(&k4(), Some(&go), &p).unwrap();
        let m = SwitchingSigns::new(vec![1, -1, 1, -1]).unwrap();
        let switched = predict_oscillation(&switch_graph(&k4(), &m).unwrap(), Some(&go), &p).unwrap();

        assert!((base.u_star.unwrap() - switched.u_star.unwrap()).abs() < 1e-10);
        assert!((base.b.unwrap() - switched.b.unwrap()).abs() < 1e-10);
        assert!((base.predicted_period.unwrap() - switched.predicted_period.unwrap()).abs() < 1e-10);
        let (a0, a1) = (base.amplitude_flat().unwrap(), switched.amplitude_flat().unwrap());
        for (x, y) in a0.iter().zip(&a1) {
            assert!((x - y).abs() < 1e-10);
        }
        // Phases shift by exactly 0 or pi depending on the sign flip.
        let (p0, p1) = (base.phase_flat().unwrap(), switched.phase_flat().unwrap());
        for (idx, (x, y)) in p0.iter().zip(&p1).enumerate() {
            let agent = idx / 3;
            let expected = if m.get(agent) * m.get(0) < 0.0 { PI } else { 0.0 };
            let d = (y - x - expected).rem_euclid(2.0 * PI);
            let d = d.min(2.0 * PI - d);
            assert!(d < 1e-9, "component {idx}: {x} -> {y}");
        }
    }

    #[test]
    fn threshold_for_k4_companion_grid() {
        // Hand evaluation over the 4x3 spectrum grid: every competitor pair is
        // (-1, -1.3247...) and the ratio is -0.16559.
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);
        let sa = eig(k4().adjacency()).unwrap();
        let so = eig(companion_x3_minus_x_plus_1().adjacency()).unwrap();
        let g_star = oscillation_threshold(&sa, &so, &p, ThresholdGain::Gamma).unwrap();
        assert!((g_star + 0.16558974465559).abs() < 1e-9, "gamma* = {g_star}");
        assert!(g_star.is_finite());
        assert!(p.gamma > g_star);
    }

    #[test]
    fn threshold_vanishes_without_cross_gains() {
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);
        let sa = eig(k4().adjacency()).unwrap();
        let so = eig(companion_x3_minus_x_plus_1().adjacency()).unwrap();
        let g_star = oscillation_threshold(&sa, &so, &p, ThresholdGain::Gamma).unwrap();
        assert!(g_star.abs() < 1e-12);
    }

    #[test]
    fn threshold_delta_only_specialization() {
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.3);
        let sa = eig(k4().adjacency()).unwrap();
        let so = eig(companion_x3_minus_x_plus_1().adjacency()).unwrap();
        let got = oscillation_threshold(&sa, &so, &p, ThresholdGain::Gamma).unwrap();
        // Grid oracle: max over the explicit spectrum grid of the delta-only
        // formula.
        let lam = 3.0;
        let mu = so.pairs()[0].value;
        let mut expected = f64::NEG_INFINITY;
        for la in sa.values() {
            if (la - Complex64::new(lam, 0.0)).norm() < 1e-8 {
                continue;
            }
            for mo in so.values() {
                if (mo - mu).norm() < 1e-8 || (mo - mu.conj()).norm() < 1e-8 {
                    continue;
                }
                expected = expected.max(-(p.delta * (mu * lam - mo * la).re) / (lam - la.re));
            }
        }
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn classification_examples() {
        let p = params(1.0, 0.0, 0.1, 0.25, 0.1, 0.25);

        // Both undirected.
        let sym = SignedGraph::from_adjacency(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        let c = classify_graphs(&sym, Some(&sym), &p).unwrap();
        assert_eq!(c.verdict, Verdict::NeverOscillates);
        assert_eq!(c.reason, ClassificationReason::UndirectedPair);

        // K4 + companion: supports oscillations with a finite gamma*.
        let c = classify_graphs(&k4(), Some(&companion_x3_minus_x_plus_1()), &p).unwrap();
        assert_eq!(c.verdict, Verdict::SupportsOscillations);
        assert_eq!(c.reason, ClassificationReason::ThresholdMet);
        assert!(c.gamma_star.unwrap().is_finite());
        assert!(p.gamma > c.gamma_star.unwrap());
        assert!(c.generating_mu.unwrap().im > 0.0);

        // Both eventually balanced but not both undirected: a switched
        // primitive directed graph paired with an all-positive triangle.
        let primitive = SignedGraph::from_edges(3, &[(1, 2, 1.0), (2, 3, 1.0), (3, 1, 1.0), (3, 2, 1.0)]).unwrap();
        let m = SwitchingSigns::new(vec![1, -1, 1]).unwrap();
        let switched = switch_graph(&primitive, &m).unwrap();
        assert!(!switched.is_undirected());
        let k3 = SignedGraph::from_adjacency(DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 })).unwrap();
        let c = classify_graphs(&switched, Some(&k3), &p).unwrap();
        assert_eq!(c.verdict, Verdict::NeverOscillates);
        assert_eq!(c.reason, ClassificationReason::BothEventuallyBalanced);

        // Neither criterion applies: both graphs have complex leading pairs.
        let rot = companion_x3_minus_x_plus_1();
        let c = classify_graphs(&rot, Some(&rot), &p).unwrap();
        assert_eq!(c.verdict, Verdict::Indeterminate);
        assert_eq!(c.reason, ClassificationReason::NoCriterionApplies);
    }

    #[test]
    fn never_oscillates_implies_assumption1_fails() {
        use rand_chacha::rand_core::{RngCore, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let random_sym = |rng: &mut rand_chacha::ChaCha8Rng, n: usize| {
            let mut a = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in (i + 1)..n {
                    let w = match rng.next_u32() % 3 {
                        0 => 0.0,
                        1 => 1.0,
                        _ => -1.0,
                    };
                    a[(i, j)] = w;
                    a[(j, i)] = w;
                }
            }
            SignedGraph::from_adjacency(a).unwrap()
        };
        for trial in 0..5 {
            let ga = random_sym(&mut rng, 3 + trial % 3);
            let go = random_sym(&mut rng, 2 + trial % 2);
            let p = params(1.0, 0.0, 0.1, 0.2, 0.3, 0.15);
            let c = classify_graphs(&ga, Some(&go), &p).unwrap();
            assert_eq!(c.verdict, Verdict::NeverOscillates);
            let sa = eig(ga.adjacency()).unwrap();
            let so = eig(go.adjacency()).unwrap();
            for _ in 0..20 {
                let unif = |rng: &mut rand_chacha::ChaCha8Rng| (rng.next_u32() % 1000) as f64 / 1000.0;
                let p = params(
                    0.5 + unif(&mut rng),
                    0.0,
                    unif(&mut rng),
                    unif(&mut rng),
                    unif(&mut rng),
                    unif(&mut rng),
                );
                let (holds, _) = check_assumption1(&sa, &so, &p);
                assert!(!holds);
            }
        }
    }

    #[test]
    fn report_serializes_with_exact_field_names() {
        let p = params(1.0, 0.0, 0.1, 0.0, 0.1, 0.0);
        let report = predict_oscillation(&seven_ring(), None, &p).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        for field in [
            "K",
            "u_star",
            "lambda_dagger",
            "mu_dagger",
            "omega",
            "b",
            "criticality",
            "predicted_period",
            "phase",
            "amplitude",
            "assumption1",
            "notes",
        ] {
            assert!(json.get(field).is_some(), "missing field {field}");
        }
        assert_eq!(json["criticality"], "supercritical");
        assert!(json["lambda_dagger"]["re"].is_f64());
    }
}

//! Spectra of real nonsymmetric matrices, Perron-Frobenius tests, and the
//! Kronecker composition that maps communication/belief-system eigenvalues to
//! Jacobian eigenvalues.

mod evd;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::Result;
use crate::model::ModelParams;

/// Absolute tolerance under which two eigenvalues count as equal.
pub const EIG_EQUAL_TOL: f64 = 1e-8;
/// Margin by which a dominant eigenvalue's modulus must exceed all others to
/// count as strictly dominant.
pub const DOMINANCE_TOL: f64 = 1e-8;

/// One eigenvalue of a real matrix together with its right and left
/// eigenvectors.
///
/// Conventions: `A * right = value * right` and `left^H * A = value * left^H`
/// (equivalently `A^T * left = conj(value) * left`). Right vectors have unit
/// Euclidean norm and are rotated so their largest-modulus entry has zero
/// phase.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub right: DVector<Complex64>,
    pub left: DVector<Complex64>,
}

/// Full spectrum of a real square matrix, sorted by descending real part with
/// ties broken by descending imaginary part.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pairs: Vec<EigenPair>,
    warnings: Vec<String>,
}

impl Spectrum {
    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Maximum eigenvalue modulus (spectral radius).
    pub fn spectral_radius(&self) -> f64 {
        self.pairs.iter().map(|p| p.value.norm()).fold(0.0, f64::max)
    }

    /// Index of the strictly dominant eigenvalue when it is simple, real, and
    /// positive: modulus exceeds every other eigenvalue's by more than
    /// [`DOMINANCE_TOL`].
    pub fn strict_dominant_real_positive(&self) -> Option<usize> {
        let rho = self.spectral_radius();
        let idx = self
            .pairs
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.value.norm().partial_cmp(&b.value.norm()).unwrap())?
            .0;
        let dom = &self.pairs[idx].value;
        if dom.im.abs() > EIG_EQUAL_TOL || dom.re <= 0.0 {
            return None;
        }
        for (j, p) in self.pairs.iter().enumerate() {
            if j != idx && rho - p.value.norm() <= DOMINANCE_TOL {
                return None;
            }
        }
        Some(idx)
    }

    /// Nearest pair to a target eigenvalue.
    pub fn pair_nearest(&self, target: Complex64) -> Option<&EigenPair> {
        self.pairs
            .iter()
            .min_by(|a, b| (a.value - target).norm().partial_cmp(&(b.value - target).norm()).unwrap())
    }
}

fn normalize_gauge(v: &mut DVector<Complex64>) {
    let mut k = 0;
    let mut best = 0.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best {
            best = m;
            k = i;
        }
    }
    if best == 0.0 {
        return;
    }
    let phase = Complex64::from_polar(1.0, -v[k].arg());
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z = *z * phase / norm;
    }
}

/// Unpacks the packed real EVD output into (eigenvalue, eigenvector) pairs.
fn unpack(evd: &evd::RealEvd) -> Vec<(Complex64, DVector<Complex64>)> {
    let n = evd.d.len();
    let mut out = Vec::with_capacity(n);
    let col = |j: usize| DVector::from_fn(n, |i, _| evd.v[(i, j)]);
    let mut i = 0;
    while i < n {
        if evd.e[i] == 0.0 {
            let re = col(i);
            let v = DVector::from_fn(n, |r, _| Complex64::new(re[r], 0.0));
            out.push((Complex64::new(evd.d[i], 0.0), v));
            i += 1;
        } else {
            let re = col(i);
            let im = col(i + 1);
            let vp = DVector::from_fn(n, |r, _| Complex64::new(re[r], im[r]));
            let vm = DVector::from_fn(n, |r, _| Complex64::new(re[r], -im[r]));
            out.push((Complex64::new(evd.d[i], evd.e[i]), vp));
            out.push((Complex64::new(evd.d[i + 1], evd.e[i + 1]), vm));
            i += 2;
        }
    }
    out
}

/// Full eigendecomposition of a real square matrix, with left eigenvectors
/// obtained from the transposed matrix and paired to eigenvalues by greedy
/// nearest-value matching.
pub fn eig(a: &DMatrix<f64>) -> Result<Spectrum> {
    let right_evd = evd::real_evd(a)?;
    let left_evd = evd::real_evd(&a.transpose())?;

    let mut rights = unpack(&right_evd);
    let lefts = unpack(&left_evd);

    // Deterministic processing order: descending Re, then descending Im.
    rights.sort_by(|(a, _), (b, _)| {
        b.re.partial_cmp(&a.re).unwrap().then(b.im.partial_cmp(&a.im).unwrap())
    });

    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let mut warnings = Vec::new();
    let mut used = vec![false; lefts.len()];
    let mut pairs = Vec::with_capacity(rights.len());

    for (value, mut right) in rights {
        // The left eigenvector for eigenvalue v solves A^T w = conj(v) w.
        let target = value.conj();
        let mut best: Option<(usize, f64)> = None;
        for (j, (lv, _)) in lefts.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist = (lv - target).norm();
            if best.map_or(true, |(_, d)| dist < d) {
                best = Some((j, dist));
            }
        }
        let (j, dist) = best.expect("left spectrum has same cardinality");
        used[j] = true;
        if dist > 1e-6 * scale {
            warnings.push(format!(
                "left/right eigenvalue pairing residual {dist:.3e} for eigenvalue {value}"
            ));
        }
        let mut left = lefts[j].1.clone();
        normalize_gauge(&mut right);
        normalize_gauge(&mut left);
        pairs.push(EigenPair { value, right, left });
    }

    Ok(Spectrum { pairs, warnings })
}

/// All eigenpairs whose real part lies within `tol` of the maximum real part.
pub fn leading_eigenvalues(s: &Spectrum, tol: f64) -> Vec<&EigenPair> {
    assert!(tol > 0.0, "tolerance must be positive");
    let max_re = s.pairs.iter().map(|p| p.value.re).fold(f64::NEG_INFINITY, f64::max);
    s.pairs.iter().filter(|p| p.value.re >= max_re - tol).collect()
}

fn strictly_positive_scalable(v: &DVector<Complex64>) -> bool {
    let max_mod = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_mod == 0.0 {
        return false;
    }
    // Gauge puts the largest entry on the positive real axis, so a one-signed
    // real eigenvector shows up as entrywise strictly positive.
    v.iter()
        .all(|z| z.im.abs() <= 1e-8 * max_mod && z.re > 1e-8 * max_mod)
}

/// Strong Perron-Frobenius property: a unique dominant eigenvalue that is
/// real, positive, simple, strictly dominant in modulus, and whose right
/// eigenvector can be scaled entrywise strictly positive.
pub fn has_strong_perron_frobenius(s: &Spectrum) -> bool {
    match s.strict_dominant_real_positive() {
        Some(idx) => strictly_positive_scalable(&s.pairs[idx].right),
        None => false,
    }
}

/// Eventual positivity test via the equivalence with the strong
/// Perron-Frobenius property of both the matrix and its transpose.
pub fn is_eventually_positive(a: &DMatrix<f64>) -> Result<bool> {
    let s = eig(a)?;
    match s.strict_dominant_real_positive() {
        Some(idx) => Ok(strictly_positive_scalable(&s.pairs[idx].right)
            && strictly_positive_scalable(&s.pairs[idx].left)),
        None => Ok(false),
    }
}

/// Explicit Jacobian of the belief dynamics at the neutral equilibrium, in
/// agent-major ordering: state `z_{ij}` sits at index `(i-1)*N_o + (j-1)`.
///
/// `J = (-d + u a) I (x) I + u g A_a (x) I + u b I (x) A_o + u dl A_a (x) A_o`
/// where `(x)` is the Kronecker product. Both matrices are expected to have
/// zero diagonals (guaranteed by [`crate::signed_graph::SignedGraph`]).
pub fn form_jacobian(a_a: &DMatrix<f64>, a_o: &DMatrix<f64>, p: &ModelParams, u: f64) -> DMatrix<f64> {
    let na = a_a.nrows();
    let no = a_o.nrows();
    let i_a = DMatrix::<f64>::identity(na, na);
    let i_o = DMatrix::<f64>::identity(no, no);
    i_a.kronecker(&i_o) * (-p.d + u * p.alpha)
        + a_a.kronecker(&i_o) * (u * p.gamma)
        + i_a.kronecker(a_o) * (u * p.beta)
        + a_a.kronecker(a_o) * (u * p.delta)
}

/// A Jacobian eigenvalue together with the generating pair and (when
/// available) the composed eigenvector `v_a (x) v_o`.
#[derive(Debug, Clone)]
pub struct ComposedEig {
    pub eta: Complex64,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub vector: Option<DVector<Complex64>>,
}

/// The social-network contribution to a Jacobian eigenvalue.
pub fn eta_contribution(p: &ModelParams, lambda: Complex64, mu: Complex64) -> Complex64 {
    Complex64::new(p.alpha, 0.0) + p.gamma * lambda + p.beta * mu + p.delta * lambda * mu
}

/// Composes the Jacobian eigenvalue generated by `(lambda, mu)` at attention
/// level `u`: `eta = -d + u (a + g lambda + b mu + dl lambda mu)`.
pub fn compose_eta(p: &ModelParams, u: f64, lambda: Complex64, mu: Complex64) -> Complex64 {
    -Complex64::new(p.d, 0.0) + u * eta_contribution(p, lambda, mu)
}

/// Every Jacobian eigenvalue obtained by composing the two spectra, with
/// composed eigenvectors attached.
pub fn compose_jacobian_spectrum(sa: &Spectrum, so: &Spectrum, p: &ModelParams, u: f64) -> Vec<ComposedEig> {
    let mut out = Vec::with_capacity(sa.len() * so.len());
    for pa in sa.pairs() {
        for po in so.pairs() {
            let eta = compose_eta(p, u, pa.value, po.value);
            let vector = Some(pa.right.kronecker(&po.right));
            out.push(ComposedEig {
                eta,
                lambda: pa.value,
                mu: po.value,
                vector,
            });
        }
    }
    out
}

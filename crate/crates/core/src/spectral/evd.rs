//! Real nonsymmetric eigenvalue decomposition: Householder reduction to upper
//! Hessenberg form followed by the implicitly shifted (Francis double-shift)
//! QR iteration, with eigenvectors recovered by back substitution from the
//! real Schur form.
//!
//! Ported from the EISPACK `orthes`/`hqr2` lineage (public domain). Complex
//! conjugate eigenpairs are encoded as adjacent columns: for `e[i] > 0` the
//! eigenvalue is `d[i] + i e[i]` with eigenvector `v[:, i] + i v[:, i+1]`,
//! and its conjugate occupies slot `i + 1`.

#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};

/// Raw output of the real EVD: eigenvalue parts `(d, e)` and the packed
/// eigenvector matrix `v`.
pub(crate) struct RealEvd {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
    pub v: DMatrix<f64>,
}

const MAX_ITER_PER_EIGENVALUE: usize = 50;

pub(crate) fn real_evd(a: &DMatrix<f64>) -> Result<RealEvd> {
    let n = a.nrows();
    if n == 0 {
        return Err(CoreError::Dimension("cannot decompose a 0x0 matrix".into()));
    }
    if a.ncols() != n {
        return Err(CoreError::Dimension(format!(
            "matrix must be square, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(CoreError::Numerical("matrix has non-finite entries".into()));
    }

    let mut h = a.clone();
    let mut v = DMatrix::identity(n, n);
    let mut ort = vec![0.0; n];
    orthes(n, &mut h, &mut v, &mut ort);

    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    hqr2(n, &mut h, &mut v, &mut d, &mut e)?;

    Ok(RealEvd { d, e, v })
}

/// Householder reduction of `h` to upper Hessenberg form, accumulating the
/// orthogonal transformations in `v`.
fn orthes(n: usize, h: &mut DMatrix<f64>, v: &mut DMatrix<f64>, ort: &mut [f64]) {
    if n < 3 {
        return; // already Hessenberg
    }
    let low = 0usize;
    let high = n - 1;

    for m in (low + 1)..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[(i, m - 1)].abs();
        }
        if scale != 0.0 {
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[(i, m - 1)] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = hh.sqrt();
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            // H = (I - u u'/h) H (I - u u'/h)
            for j in m..n {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h[(i, j)];
                }
                f /= hh;
                for i in m..=high {
                    h[(i, j)] -= f * ort[i];
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h[(i, j)];
                }
                f /= hh;
                for j in m..=high {
                    h[(i, j)] -= f * ort[j];
                }
            }
            ort[m] *= scale;
            h[(m, m - 1)] = scale * g;
        }
    }

    // Accumulate transformations.
    for m in ((low + 1)..high).rev() {
        if h[(m, m - 1)] != 0.0 {
            for i in (m + 1)..=high {
                ort[i] = h[(i, m - 1)];
            }
            for j in m..=high {
                let mut g = 0.0;
                for i in m..=high {
                    g += ort[i] * v[(i, j)];
                }
                // double division avoids possible underflow
                g = (g / ort[m]) / h[(m, m - 1)];
                for i in m..=high {
                    v[(i, j)] += g * ort[i];
                }
            }
        }
    }
}

fn cdiv(xr: f64, xi: f64, yr: f64, yi: f64) -> (f64, f64) {
    if yr.abs() > yi.abs() {
        let r = yi / yr;
        let d = yr + r * yi;
        ((xr + r * xi) / d, (xi - r * xr) / d)
    } else {
        let r = yr / yi;
        let d = yi + r * yr;
        ((r * xr + xi) / d, (r * xi - xr) / d)
    }
}

/// Francis double-shift QR on the Hessenberg matrix, then back substitution
/// for the eigenvectors. `d`/`e` receive real/imaginary eigenvalue parts.
fn hqr2(nn: usize, h: &mut DMatrix<f64>, v: &mut DMatrix<f64>, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let low: isize = 0;
    let high: isize = nn as isize - 1;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut t, mut w, mut x, mut y): (f64, f64, f64, f64);

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let iteration_budget = MAX_ITER_PER_EIGENVALUE * nn;
    let mut total_iter = 0usize;
    let mut iter = 0usize;
    let mut n: isize = nn as isize - 1;

    while n >= low {
        // Look for a single small subdiagonal element.
        let mut l = n;
        while l > low {
            s = h[(l as usize - 1, l as usize - 1)].abs() + h[(l as usize, l as usize)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l as usize, l as usize - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One root found.
            let un = n as usize;
            h[(un, un)] += exshift;
            d[un] = h[(un, un)];
            e[un] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // Two roots found.
            let un = n as usize;
            w = h[(un, un - 1)] * h[(un - 1, un)];
            p = (h[(un - 1, un - 1)] - h[(un, un)]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[(un, un)] += exshift;
            h[(un - 1, un - 1)] += exshift;
            x = h[(un, un)];

            if q >= 0.0 {
                // Real pair.
                z = if p >= 0.0 { p + z } else { p - z };
                d[un - 1] = x + z;
                d[un] = d[un - 1];
                if z != 0.0 {
                    d[un] = x - w / z;
                }
                e[un - 1] = 0.0;
                e[un] = 0.0;
                x = h[(un, un - 1)];
                s = x.abs() + z.abs();
                p = x / s;
                q = z / s;
                r = (p * p + q * q).sqrt();
                p /= r;
                q /= r;

                for j in (un - 1)..nn {
                    z = h[(un - 1, j)];
                    h[(un - 1, j)] = q * z + p * h[(un, j)];
                    h[(un, j)] = q * h[(un, j)] - p * z;
                }
                for i in 0..=un {
                    z = h[(i, un - 1)];
                    h[(i, un - 1)] = q * z + p * h[(i, un)];
                    h[(i, un)] = q * h[(i, un)] - p * z;
                }
                for i in low as usize..=high as usize {
                    z = v[(i, un - 1)];
                    v[(i, un - 1)] = q * z + p * v[(i, un)];
                    v[(i, un)] = q * v[(i, un)] - p * z;
                }
            } else {
                // Complex pair.
                d[un - 1] = x + p;
                d[un] = x + p;
                e[un - 1] = z;
                e[un] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // No convergence yet: form shift.
            let un = n as usize;
            x = h[(un, un)];
            y = 0.0;
            w = 0.0;
            if l < n {
                y = h[(un - 1, un - 1)];
                w = h[(un, un - 1)] * h[(un - 1, un)];
            }

            // Wilkinson's original ad hoc shift.
            if iter == 10 {
                exshift += x;
                for i in low as usize..=un {
                    h[(i, i)] -= x;
                }
                s = h[(un, un - 1)].abs() + h[(un - 1, un - 2)].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            // MATLAB's new ad hoc shift.
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low as usize..=un {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;
            if total_iter > iteration_budget {
                return Err(CoreError::EigenConvergence {
                    n: nn,
                    iterations: total_iter,
                });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = n - 2;
            while m >= l {
                let um = m as usize;
                z = h[(um, um)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(um + 1, um)] + h[(um, um + 1)];
                q = h[(um + 1, um + 1)] - z - r - s;
                r = h[(um + 2, um + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(um, um - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(um - 1, um - 1)].abs() + z.abs() + h[(um + 1, um + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in (m + 2)..=n {
                let ui = i as usize;
                h[(ui, ui - 2)] = 0.0;
                if i > m + 2 {
                    h[(ui, ui - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            for k in m..=(n - 1) {
                let uk = k as usize;
                let notlast = k != n - 1;
                if k != m {
                    p = h[(uk, uk - 1)];
                    q = h[(uk + 1, uk - 1)];
                    r = if notlast { h[(uk + 2, uk - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }

                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != m {
                        h[(uk, uk - 1)] = -s * x;
                    } else if l != m {
                        h[(uk, uk - 1)] = -h[(uk, uk - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in uk..nn {
                        p = h[(uk, j)] + q * h[(uk + 1, j)];
                        if notlast {
                            p += r * h[(uk + 2, j)];
                            h[(uk + 2, j)] -= p * z;
                        }
                        h[(uk, j)] -= p * x;
                        h[(uk + 1, j)] -= p * y;
                    }
                    let imax = n.min(k + 3) as usize;
                    for i in 0..=imax {
                        p = x * h[(i, uk)] + y * h[(i, uk + 1)];
                        if notlast {
                            p += z * h[(i, uk + 2)];
                            h[(i, uk + 2)] -= p * r;
                        }
                        h[(i, uk)] -= p;
                        h[(i, uk + 1)] -= p * q;
                    }
                    for i in low as usize..=high as usize {
                        p = x * v[(i, uk)] + y * v[(i, uk + 1)];
                        if notlast {
                            p += z * v[(i, uk + 2)];
                            v[(i, uk + 2)] -= p * r;
                        }
                        v[(i, uk)] -= p;
                        v[(i, uk + 1)] -= p * q;
                    }
                }
            }
        }
    }

    // Back substitution to find the vectors of the quasi-triangular form.
    if norm == 0.0 {
        return Ok(());
    }

    for nb in (0..nn).rev() {
        p = d[nb];
        q = e[nb];

        if q == 0.0 {
            // Real vector.
            let mut l = nb;
            h[(nb, nb)] = 1.0;
            for i in (0..nb).rev() {
                w = h[(i, i)] - p;
                r = 0.0;
                for j in l..=nb {
                    r += h[(i, j)] * h[(j, nb)];
                }
                if e[i] < 0.0 {
                    z = w;
                    s = r;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        h[(i, nb)] = if w != 0.0 { -r / w } else { -r / (eps * norm) };
                    } else {
                        // Solve the 2x2 real block.
                        x = h[(i, i + 1)];
                        y = h[(i + 1, i)];
                        q = (d[i] - p) * (d[i] - p) + e[i] * e[i];
                        t = (x * s - z * r) / q;
                        h[(i, nb)] = t;
                        h[(i + 1, nb)] = if x.abs() > z.abs() { (-r - w * t) / x } else { (-s - y * t) / z };
                    }

                    // Overflow control.
                    t = h[(i, nb)].abs();
                    if (eps * t) * t > 1.0 {
                        for j in i..=nb {
                            h[(j, nb)] /= t;
                        }
                    }
                }
            }
        } else if q < 0.0 {
            // Complex vector (columns nb-1, nb hold real and imaginary parts).
            let mut l = nb - 1;

            if h[(nb, nb - 1)].abs() > h[(nb - 1, nb)].abs() {
                h[(nb - 1, nb - 1)] = q / h[(nb, nb - 1)];
                h[(nb - 1, nb)] = -(h[(nb, nb)] - p) / h[(nb, nb - 1)];
            } else {
                let (cr, ci) = cdiv(0.0, -h[(nb - 1, nb)], h[(nb - 1, nb - 1)] - p, q);
                h[(nb - 1, nb - 1)] = cr;
                h[(nb - 1, nb)] = ci;
            }
            h[(nb, nb - 1)] = 0.0;
            h[(nb, nb)] = 1.0;
            for i in (0..nb.saturating_sub(1)).rev() {
                let mut ra = 0.0;
                let mut sa = 0.0;
                for j in l..=nb {
                    ra += h[(i, j)] * h[(j, nb - 1)];
                    sa += h[(i, j)] * h[(j, nb)];
                }
                w = h[(i, i)] - p;

                if e[i] < 0.0 {
                    z = w;
                    r = ra;
                    s = sa;
                } else {
                    l = i;
                    if e[i] == 0.0 {
                        let (cr, ci) = cdiv(-ra, -sa, w, q);
                        h[(i, nb - 1)] = cr;
                        h[(i, nb)] = ci;
                    } else {
                        // Solve the complex 2x2 block.
                        x = h[(i, i + 1)];
                        y = h[(i + 1, i)];
                        let mut vr = (d[i] - p) * (d[i] - p) + e[i] * e[i] - q * q;
                        let vi = (d[i] - p) * 2.0 * q;
                        if vr == 0.0 && vi == 0.0 {
                            vr = eps * norm * (w.abs() + q.abs() + x.abs() + y.abs() + z.abs());
                        }
                        let (cr, ci) = cdiv(x * r - z * ra + q * sa, x * s - z * sa - q * ra, vr, vi);
                        h[(i, nb - 1)] = cr;
                        h[(i, nb)] = ci;
                        if x.abs() > z.abs() + q.abs() {
                            h[(i + 1, nb - 1)] = (-ra - w * h[(i, nb - 1)] + q * h[(i, nb)]) / x;
                            h[(i + 1, nb)] = (-sa - w * h[(i, nb)] - q * h[(i, nb - 1)]) / x;
                        } else {
                            let (cr, ci) = cdiv(-r - y * h[(i, nb - 1)], -s - y * h[(i, nb)], z, q);
                            h[(i + 1, nb - 1)] = cr;
                            h[(i + 1, nb)] = ci;
                        }
                    }

                    // Overflow control.
                    t = h[(i, nb - 1)].abs().max(h[(i, nb)].abs());
                    if (eps * t) * t > 1.0 {
                        for j in i..=nb {
                            h[(j, nb - 1)] /= t;
                            h[(j, nb)] /= t;
                        }
                    }
                }
            }
        }
    }

    // Back transformation to eigenvectors of the original matrix.
    for j in (low as usize..nn).rev() {
        for i in low as usize..=high as usize {
            z = 0.0;
            for k in low as usize..=j.min(high as usize) {
                z += v[(i, k)] * h[(k, j)];
            }
            v[(i, j)] = z;
        }
    }

    Ok(())
}

//! Loewner-order aggregation of symmetric 2x2 matrices.
//!
//! Three back-ends are provided:
//! * the exact log-exp supremum, assembled directly from the spectral data of
//!   the inputs,
//! * its finite-scale approximation `(1/m) log sum exp(m X_i)`, evaluated
//!   entirely in the log domain so that arbitrarily large scale factors stay
//!   representable,
//! * the trace supremum (the Loewner upper bound of minimal trace), solved
//!   exactly through its reduction to a weighted minimax point problem in the
//!   plane.
//!
//! Erosion duals are obtained by negation.

use std::f64::consts::FRAC_PI_2;

use thiserror::Error;

use crate::sym2::{
    compose, eigendecompose, exp_scaled, int_power, loewner_leq, log_spd, SpectralDecomp, Sym2,
    EIGEN_TIE_TOL,
};

/// Tolerance on |sin(angle difference)| below which two eigendirections are
/// treated as parallel.
pub const PARALLEL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SupremumError {
    #[error("supremum of an empty multiset is undefined")]
    EmptyMultiset,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("input must be positive semidefinite (smallest eigenvalue {0})")]
    NotPositiveSemidefinite(f64),
}

/// Back-end selector for matrix-valued dilation/erosion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupMethod {
    LesExact,
    LesApprox(f64),
    Trace,
}

impl SupMethod {
    pub fn supremum(&self, items: &[Sym2]) -> Result<Sym2, SupremumError> {
        match *self {
            SupMethod::LesExact => les_exact(items),
            SupMethod::LesApprox(m) => les_approx(items, m),
            SupMethod::Trace => trace_sup(items),
        }
    }

    pub fn infimum(&self, items: &[Sym2]) -> Result<Sym2, SupremumError> {
        match *self {
            SupMethod::LesExact => les_inf(items),
            SupMethod::LesApprox(m) => {
                let neg: Vec<Sym2> = items.iter().map(|x| -*x).collect();
                Ok(-les_approx(&neg, m)?)
            }
            SupMethod::Trace => trace_inf(items),
        }
    }
}

/// Exact log-exp supremum via its spectral characterisation.
///
/// The result is `lambda1 u1 u1^T + mu v1 v1^T` where `lambda1` is the
/// globally largest eigenvalue with eigendirection `u1`, and `mu` is the
/// largest eigenvalue among all spectral channels whose eigendirection is not
/// parallel to `u1` (equal to `lambda1` when the maximum is attained along
/// two non-parallel directions).
pub fn les_exact(items: &[Sym2]) -> Result<Sym2, SupremumError> {
    let decomps: Vec<SpectralDecomp> = items.iter().map(|m| eigendecompose(*m)).collect();
    let best = decomps
        .iter()
        .reduce(|a, b| if b.lambda > a.lambda { b } else { a })
        .ok_or(SupremumError::EmptyMultiset)?;
    let lambda1 = best.lambda;
    let u1_phi = best.phi;

    // Largest eigenvalue over channels not aligned with u1. Each input
    // contributes its lambda along phi and its mu along phi + pi/2, so this
    // set is never empty in practice, but the commuting fallback keeps the
    // function total.
    let mut mu_raw = f64::NEG_INFINITY;
    for d in &decomps {
        if (d.phi - u1_phi).sin().abs() >= PARALLEL_TOL {
            mu_raw = mu_raw.max(d.lambda);
        }
        if (d.phi + FRAC_PI_2 - u1_phi).sin().abs() >= PARALLEL_TOL {
            mu_raw = mu_raw.max(d.mu);
        }
    }
    let mu = if mu_raw == f64::NEG_INFINITY {
        decomps.iter().map(|d| d.mu).fold(f64::NEG_INFINITY, f64::max)
    } else if mu_raw >= lambda1 - EIGEN_TIE_TOL {
        lambda1
    } else {
        mu_raw
    };
    Ok(compose(SpectralDecomp::new(lambda1, mu, u1_phi)))
}

/// Dual of [`les_exact`]: a Loewner lower bound for all items.
pub fn les_inf(items: &[Sym2]) -> Result<Sym2, SupremumError> {
    let neg: Vec<Sym2> = items.iter().map(|x| -*x).collect();
    Ok(-les_exact(&neg)?)
}

/// Finite-scale approximation `(1/m) log sum_i exp(m X_i)`.
///
/// Evaluated in the log domain: the leading eigenvalue and eigendirection of
/// the exponential sum come from a spectrally shifted accumulation, while the
/// second eigenvalue is recovered from the log-determinant of the sum, which
/// has an exact pairwise expansion over the rank-one spectral channels. This
/// keeps the evaluation free of overflow and underflow at any scale factor,
/// unlike the direct formula which dies near `m * lambda ~ 700`.
pub fn les_approx(items: &[Sym2], m: f64) -> Result<Sym2, SupremumError> {
    if !(m > 0.0) {
        return Err(SupremumError::NonPositiveScale(m));
    }
    if items.is_empty() {
        return Err(SupremumError::EmptyMultiset);
    }
    // Spectral channels: (m * eigenvalue, direction angle) per rank-one term.
    let mut channels: Vec<(f64, f64)> = Vec::with_capacity(2 * items.len());
    for x in items {
        let d = eigendecompose(*x);
        channels.push((m * d.lambda, d.phi));
        channels.push((m * d.mu, d.phi + FRAC_PI_2));
    }
    let w_max = channels.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);

    // Shifted accumulation of sum exp(m X_i); accurate for the top eigenpair.
    let mut acc = Sym2::ZERO;
    for &(w, theta) in &channels {
        let c = (w - w_max).exp();
        let (s, co) = theta.sin_cos();
        acc = acc + Sym2::new(c * co * co, c * co * s, c * s * s);
    }
    let top = eigendecompose(acc);
    let log_lambda_max = w_max + top.lambda.ln();

    // det(sum_j c_j d_j d_j^T) = sum_{j<k} c_j c_k sin^2(theta_j - theta_k).
    let mut terms: Vec<f64> = Vec::new();
    for j in 0..channels.len() {
        for k in (j + 1)..channels.len() {
            let s2 = (channels[j].1 - channels[k].1).sin().powi(2);
            if s2 > 0.0 {
                terms.push(channels[j].0 + channels[k].0 + s2.ln());
            }
        }
    }
    let log_det = log_sum_exp(&terms);
    let log_lambda_2 = log_det - log_lambda_max;

    let lambda = log_lambda_max / m;
    let mu = (log_lambda_2 / m).min(lambda);
    Ok(compose(SpectralDecomp::new(lambda, mu, top.phi)))
}

/// Literal (unstabilised) evaluation of `(1/m) log sum exp(m X_i)`.
///
/// Overflows for moderate scale factors; kept to demonstrate the ceiling the
/// stabilised path removes. Entries of the result are non-finite when the
/// intermediate exponentials leave the floating-point range.
pub fn les_approx_direct(items: &[Sym2], m: f64) -> Result<Sym2, SupremumError> {
    if !(m > 0.0) {
        return Err(SupremumError::NonPositiveScale(m));
    }
    if items.is_empty() {
        return Err(SupremumError::EmptyMultiset);
    }
    let mut sum = Sym2::ZERO;
    for x in items {
        sum = sum + exp_scaled(*x, m);
    }
    match log_spd(sum) {
        Ok(l) => Ok((1.0 / m) * l),
        Err(_) => Ok(Sym2::new(f64::NAN, f64::NAN, f64::NAN)),
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Trace supremum: the Loewner upper bound of minimal trace.
///
/// A matrix `X` maps to the plane point `p(X) = ((a11 - a22)/2, a12)` with
/// height `h(X) = (a11 + a22)/2`; then `Y >=_L X` iff
/// `h(Y) - h(X) >= |p(Y) - p(X)|`, and minimising the trace is the weighted
/// minimax point problem `min_q max_i (h_i + |q - p_i|)`. Solved exactly by
/// enumerating support sets of size <= 3.
pub fn trace_sup(items: &[Sym2]) -> Result<Sym2, SupremumError> {
    if items.is_empty() {
        return Err(SupremumError::EmptyMultiset);
    }
    let mut pts: Vec<(f64, f64, f64)> = items
        .iter()
        .map(|x| (0.5 * (x.a11 - x.a22), x.a12, 0.5 * (x.a11 + x.a22)))
        .collect();
    // Drop points Loewner-dominated by another; they cannot constrain the
    // optimum and pruning keeps the cubic enumeration cheap.
    pts = prune_dominated(pts);

    let value = |q: (f64, f64)| -> f64 {
        let mut v = f64::NEG_INFINITY;
        for &(x, y, h) in &pts {
            let (dx, dy) = (q.0 - x, q.1 - y);
            v = v.max(h + (dx * dx + dy * dy).sqrt());
        }
        v
    };

    let mut best_q = (pts[0].0, pts[0].1);
    let mut best_v = value(best_q);
    let mut consider = |q: (f64, f64)| {
        if !q.0.is_finite() || !q.1.is_finite() {
            return;
        }
        // Abandon a candidate as soon as it provably cannot beat the best.
        let cutoff = best_v + 1e-15;
        let mut v = f64::NEG_INFINITY;
        for &(x, y, h) in &pts {
            let (dx, dy) = (q.0 - x, q.1 - y);
            v = v.max(h + (dx * dx + dy * dy).sqrt());
            if v > cutoff {
                return;
            }
        }
        if v < best_v - 1e-15
            || (v <= best_v + 1e-15 && (q.0, q.1) < (best_q.0, best_q.1))
        {
            best_v = v;
            best_q = q;
        }
    };

    for i in 0..pts.len() {
        consider((pts[i].0, pts[i].1));
        for j in (i + 1)..pts.len() {
            consider(pair_candidate(pts[i], pts[j]));
            for k in (j + 1)..pts.len() {
                for q in triple_candidates(pts[i], pts[j], pts[k]) {
                    consider(q);
                }
            }
        }
    }

    Ok(Sym2::new(best_v + best_q.0, best_q.1, best_v - best_q.0))
}

/// Dual of [`trace_sup`].
pub fn trace_inf(items: &[Sym2]) -> Result<Sym2, SupremumError> {
    let neg: Vec<Sym2> = items.iter().map(|x| -*x).collect();
    Ok(-trace_sup(&neg)?)
}

fn prune_dominated(pts: Vec<(f64, f64, f64)>) -> Vec<(f64, f64, f64)> {
    let mut keep = vec![true; pts.len()];
    for i in 0..pts.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..pts.len() {
            if i == j || !keep[j] {
                continue;
            }
            let d = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
            // j dominates i; strict tie-break on index keeps one of equals.
            if pts[j].2 - pts[i].2 >= d && (pts[j].2 - pts[i].2 > d || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    pts.into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// Equalisation point of two additively weighted distances along the segment.
fn pair_candidate(a: (f64, f64, f64), b: (f64, f64, f64)) -> (f64, f64) {
    let d = (b.0 - a.0).hypot(b.1 - a.1);
    if d <= 0.0 {
        return (a.0, a.1);
    }
    let t = (0.5 * (d + b.2 - a.2)).clamp(0.0, d);
    (a.0 + t * (b.0 - a.0) / d, a.1 + t * (b.1 - a.1) / d)
}

/// Points equidistant (after height offsets) from three plane points: the
/// additively weighted circumcentre. Solving
/// `|q - p_i| = V - h_i` pairwise gives q affine in V, then a quadratic in V.
fn triple_candidates(
    a: (f64, f64, f64),
    b: (f64, f64, f64),
    c: (f64, f64, f64),
) -> Vec<(f64, f64)> {
    // Linear system rows for pairs (a,b) and (a,c):
    // 2 (p_j - p_a) . q = 2 V (h_j - h_a) + (h_a^2 - h_j^2) - |p_a|^2 + |p_j|^2
    let row = |j: (f64, f64, f64)| {
        (
            2.0 * (j.0 - a.0),
            2.0 * (j.1 - a.1),
            2.0 * (j.2 - a.2),
            (a.2 * a.2 - j.2 * j.2) - (a.0 * a.0 + a.1 * a.1) + (j.0 * j.0 + j.1 * j.1),
        )
    };
    let (m11, m12, v1, c1) = row(b);
    let (m21, m22, v2, c2) = row(c);
    let det = m11 * m22 - m12 * m21;
    if det.abs() < 1e-12 {
        return Vec::new();
    }
    // q = q0 + V * q1
    let q0 = ((c1 * m22 - c2 * m12) / det, (m11 * c2 - m21 * c1) / det);
    let q1 = ((v1 * m22 - v2 * m12) / det, (m11 * v2 - m21 * v1) / det);
    // |q0 + V q1 - p_a|^2 = (V - h_a)^2
    let e = (q0.0 - a.0, q0.1 - a.1);
    let qa = q1.0 * q1.0 + q1.1 * q1.1 - 1.0;
    let qb = 2.0 * (e.0 * q1.0 + e.1 * q1.1) + 2.0 * a.2;
    let qc = e.0 * e.0 + e.1 * e.1 - a.2 * a.2;
    let mut out = Vec::new();
    if qa.abs() < 1e-14 {
        if qb.abs() > 1e-14 {
            let v = -qc / qb;
            out.push((q0.0 + v * q1.0, q0.1 + v * q1.1));
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for v in [(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)] {
                out.push((q0.0 + v * q1.0, q0.1 + v * q1.1));
            }
        }
    }
    out
}

/// True iff `s` is a Loewner upper bound for every item, up to `tol`.
pub fn verify_upper_bound(s: Sym2, items: &[Sym2], tol: f64) -> bool {
    items.iter().all(|x| loewner_leq(*x, s, tol))
}

/// Membership of `s` in the p-power upper bound cone: `s^p >=_L X_i^p`.
///
/// Inputs must be positive semidefinite (shift by a multiple of the identity
/// first when needed); matrix powers are taken in the eigenbasis.
pub fn verify_p_power_membership(
    s: Sym2,
    items: &[Sym2],
    p: u32,
    tol: f64,
) -> Result<bool, SupremumError> {
    let psd_tol = 1e-12;
    for x in items.iter().chain(std::iter::once(&s)) {
        let min = x.min_eigenvalue();
        if min < -psd_tol {
            return Err(SupremumError::NotPositiveSemidefinite(min));
        }
    }
    let sp = int_power(s, p);
    Ok(items.iter().all(|x| loewner_leq(int_power(*x, p), sp, tol)))
}

/// Ordered eigenvalue pair `(lambda, mu)` used by the lexicographic
/// minimality diagnostics.
pub fn lex_phi(m: Sym2) -> (f64, f64) {
    m.eigenvalues()
}

/// The lexicographic order on eigenvalue pairs:
/// `(a, b) < (a', b')` iff `a < a'` or (`a = a'` and `b <= b'`).
pub fn lex_leq(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 <= b.1)
}

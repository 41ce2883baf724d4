//! Nonnegative square matrices and the convergent-to-zero analysis behind the
//! contraction certificates.
//!
//! A nonnegative matrix `M` is *convergent to zero* when `M^k -> 0` as
//! `k -> infinity`. Four equivalent characterisations are implemented
//! independently so they can cross-check each other:
//!
//! 1. decay of the matrix powers `M^k`,
//! 2. convergence of the geometric series `I + M + M^2 + ...` to the inverse
//!    of `I - M`,
//! 3. all eigenvalues strictly inside the unit disc,
//! 4. `I - M` nonsingular with an entrywise nonnegative inverse.
//!
//! Floating point cannot decide the exact boundary `rho = 1`, so every verdict
//! carries a configurable boundary band: spectral radii within the band yield
//! [`Verdict::Boundary`] and are rejected by downstream hypothesis checks.

use thiserror::Error;

/// Default half-width of the band around spectral radius 1 inside which no
/// convergence verdict is issued.
pub const DEFAULT_BOUNDARY_BAND: f64 = 1e-9;

/// Step cap for the operational matrix-power check and for power iteration.
const POWER_STEP_CAP: usize = 10_000;
/// Max entry of `M^k` below this counts as "converged to zero".
const POWER_ZERO_THRESHOLD: f64 = 1e-12;
/// Max entry of `M^k` above this counts as divergence.
const POWER_DIVERGENCE_THRESHOLD: f64 = 1e12;
/// Rounds of normalized repeated squaring for the norm-based radius estimate.
const SQUARING_ROUNDS: u32 = 48;
/// Bisection cap for the perturbation margin; anything larger is Unbounded.
const MARGIN_CAP: f64 = 1e6;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("matrix entry ({row},{col}) is {value}; entries must be finite and nonnegative")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,
    #[error("row {row} has {len} entries, expected {dim}")]
    RaggedRow { row: usize, len: usize, dim: usize },
    #[error("flat entry buffer has length {len}, expected {expected} for dimension {dim}")]
    BadFlatLength { len: usize, expected: usize, dim: usize },
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("boundary band {band} outside the admissible range (0, 0.1]")]
    InvalidBoundaryBand { band: f64 },
    #[error("tolerance {tol} must be positive and finite")]
    InvalidTolerance { tol: f64 },
    #[error("matrix is not convergent to zero (spectral radius {rho})")]
    NotConvergent { rho: f64 },
    #[error(
        "convergence criteria disagree with spectral radius {rho} outside the boundary band: \
         powers={by_power_iteration}, neumann={by_neumann}, eigenvalues={by_eigenvalues}, \
         inverse-positivity={by_inverse_positivity}"
    )]
    DisagreementOutsideBoundary {
        rho: f64,
        by_power_iteration: bool,
        by_neumann: bool,
        by_eigenvalues: bool,
        by_inverse_positivity: bool,
    },
}

/// Three-valued convergence verdict; `Boundary` means the spectral radius is
/// too close to 1 to certify either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Convergent,
    NotConvergent,
    Boundary,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Convergent => write!(f, "Convergent"),
            Verdict::NotConvergent => write!(f, "NotConvergent"),
            Verdict::Boundary => write!(f, "Boundary"),
        }
    }
}

/// Joint result of the four independent convergent-to-zero criteria.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub spectral_radius: f64,
    /// Criterion: the powers `M^k` decay to zero.
    pub by_power_iteration: bool,
    /// Criterion: the series `I + M + M^2 + ...` converges and matches the
    /// directly computed inverse of `I - M`.
    pub by_neumann: bool,
    /// Criterion: all eigenvalues lie strictly inside the unit disc.
    pub by_eigenvalues: bool,
    /// Criterion: `I - M` is nonsingular and its inverse is entrywise
    /// nonnegative.
    pub by_inverse_positivity: bool,
    pub verdict: Verdict,
}

/// Result of [`perturbation_margin`]: the largest admissible scaling of the
/// perturbation, or `Unbounded` when no scaling below the search cap breaks
/// convergence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationMargin {
    Finite(f64),
    Unbounded,
}

/// Square matrix with finite nonnegative entries, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl NonnegMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, MatrixError> {
        let n = rows.len();
        if n == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::RaggedRow {
                    row: i,
                    len: row.len(),
                    dim: n,
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_flat(n, entries)
    }

    pub fn from_flat(n: usize, entries: Vec<f64>) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        if entries.len() != n * n {
            return Err(MatrixError::BadFlatLength {
                len: entries.len(),
                expected: n * n,
                dim: n,
            });
        }
        for (k, &v) in entries.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(MatrixError::InvalidEntry {
                    row: k / n,
                    col: k % n,
                    value: v,
                });
            }
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// `self * rhs`; panics on dimension mismatch (closed under nonnegativity).
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        Self {
            n: self.n,
            entries: flat_matmul(self.n, &self.entries, &rhs.entries),
        }
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "mat_vec dimension mismatch");
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.entries[i * self.n + j] * v[j])
                    .sum()
            })
            .collect()
    }

    /// Entrywise sum; panics on dimension mismatch.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "add dimension mismatch");
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Entrywise scaling by a nonnegative factor.
    pub fn scale(&self, s: f64) -> Self {
        assert!(s >= 0.0 && s.is_finite(), "scale factor must be >= 0");
        Self {
            n: self.n,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// `self^k` by binary exponentiation; `k = 0` gives the identity.
    pub fn power(&self, k: u32) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.matmul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().cloned().fold(0.0, f64::max)
    }

    /// Row-sum norm (operator infinity norm for nonnegative matrices).
    pub fn max_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].iter().sum())
            .fold(0.0, f64::max)
    }

    /// Both (always real) eigenvalues of a 2x2 nonnegative matrix, ascending.
    ///
    /// The discriminant `(a-d)^2 + 4bc` is nonnegative whenever `b, c >= 0`,
    /// so complex pairs cannot occur here.
    pub fn eigenvalues_2x2(&self) -> Result<[f64; 2], MatrixError> {
        if self.n != 2 {
            return Err(MatrixError::DimensionMismatch {
                expected: 2,
                got: self.n,
            });
        }
        let (a, b) = (self.entry(0, 0), self.entry(0, 1));
        let (c, d) = (self.entry(1, 0), self.entry(1, 1));
        let tr = a + d;
        let disc = ((a - d) * (a - d) + 4.0 * b * c).sqrt();
        Ok([(tr - disc) / 2.0, (tr + disc) / 2.0])
    }

    /// Largest eigenvalue modulus.
    ///
    /// Dimensions 1 and 2 use closed forms. Larger matrices use power
    /// iteration on the diagonally shifted matrix `M + I` (the shift breaks
    /// the periodicity that stalls plain power iteration on nonnegative
    /// matrices); if the Collatz-Wielandt bracket fails to collapse within
    /// the step cap, the estimate falls back to the norm limit
    /// `||M^k||^(1/k)` evaluated by normalized repeated squaring.
    pub fn spectral_radius(&self) -> f64 {
        match self.n {
            1 => self.entries[0],
            2 => self.eigenvalues_2x2().expect("dimension checked")[1].max(0.0),
            _ => self
                .power_iteration_radius()
                .unwrap_or_else(|| self.squaring_radius()),
        }
    }

    fn power_iteration_radius(&self) -> Option<f64> {
        let n = self.n;
        // Deterministic pseudo-random positive start vector.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 0.5 + (i.wrapping_mul(2_654_435_761) % 1000) as f64 / 1000.0)
            .collect();
        for _ in 0..POWER_STEP_CAP {
            // w = (M + I) v stays strictly positive, so the ratios below are
            // well defined and bracket rho(M + I) = rho(M) + 1.
            let mut w = self.mat_vec(&v);
            for i in 0..n {
                w[i] += v[i];
            }
            let mut lo = f64::INFINITY;
            let mut hi = 0.0f64;
            for i in 0..n {
                let r = w[i] / v[i];
                lo = lo.min(r);
                hi = hi.max(r);
            }
            if hi - lo <= 1e-13 * hi {
                return Some((hi - 1.0).max(0.0));
            }
            let norm = w.iter().cloned().fold(0.0, f64::max);
            if !norm.is_finite() || norm == 0.0 {
                return None;
            }
            for x in w.iter_mut() {
                *x /= norm;
            }
            v = w;
        }
        None
    }

    /// Norm-based spectral radius via `||M^(2^j)||^(1/2^j)` with per-round
    /// normalization; exact to ~1e-10 for small dimensions because the
    /// polynomial factor in `||M^k||` vanishes under the k-th root.
    fn squaring_radius(&self) -> f64 {
        let n = self.n;
        let mut p = self.entries.clone();
        let s0 = max_abs(&p);
        if s0 == 0.0 {
            return 0.0;
        }
        for x in p.iter_mut() {
            *x /= s0;
        }
        let mut log_rho = s0.ln();
        let mut weight = 1.0f64;
        for _ in 0..SQUARING_ROUNDS {
            p = flat_matmul(n, &p, &p);
            weight *= 0.5;
            let s = max_abs(&p);
            if s == 0.0 {
                // Nilpotent: all eigenvalues are zero.
                return 0.0;
            }
            for x in p.iter_mut() {
                *x /= s;
            }
            log_rho += weight * s.ln();
        }
        log_rho.exp()
    }

    /// Evaluates all four convergent-to-zero criteria independently and
    /// returns the joint report.
    ///
    /// The verdict is `Convergent` iff `rho < 1 - boundary_band`,
    /// `NotConvergent` iff `rho > 1 + boundary_band` and `Boundary` in
    /// between. Outside the band the four criteria must agree with the
    /// verdict; a disagreement indicates an implementation bug and is
    /// surfaced as an error instead of being folded into the report.
    pub fn check_convergent_to_zero(
        &self,
        boundary_band: f64,
    ) -> Result<ConvergenceReport, MatrixError> {
        if !(boundary_band > 0.0 && boundary_band <= 0.1) {
            return Err(MatrixError::InvalidBoundaryBand {
                band: boundary_band,
            });
        }
        let rho = self.spectral_radius();
        let by_power_iteration = self.criterion_matrix_powers();
        let by_neumann = self.criterion_neumann_series();
        let by_eigenvalues = rho < 1.0;
        let by_inverse_positivity = self.criterion_inverse_positivity();
        let verdict = if rho < 1.0 - boundary_band {
            Verdict::Convergent
        } else if rho > 1.0 + boundary_band {
            Verdict::NotConvergent
        } else {
            Verdict::Boundary
        };
        if verdict != Verdict::Boundary {
            let expected = verdict == Verdict::Convergent;
            let flags = [
                by_power_iteration,
                by_neumann,
                by_eigenvalues,
                by_inverse_positivity,
            ];
            if flags.iter().any(|&f| f != expected) {
                return Err(MatrixError::DisagreementOutsideBoundary {
                    rho,
                    by_power_iteration,
                    by_neumann,
                    by_eigenvalues,
                    by_inverse_positivity,
                });
            }
        }
        Ok(ConvergenceReport {
            spectral_radius: rho,
            by_power_iteration,
            by_neumann,
            by_eigenvalues,
            by_inverse_positivity,
            verdict,
        })
    }

    /// Criterion: max entry of `M^k` drops below threshold within the step
    /// cap (early exit on blow-up). Near the unit circle neither cap fires
    /// within 10^4 steps; those cases are settled by the norm limit from
    /// repeated squaring, which extends the same power sequence to k ~ 2^48.
    fn criterion_matrix_powers(&self) -> bool {
        let mut p = self.clone();
        for _ in 0..POWER_STEP_CAP {
            let m = p.max_entry();
            if m < POWER_ZERO_THRESHOLD {
                return true;
            }
            if m > POWER_DIVERGENCE_THRESHOLD {
                return false;
            }
            p = p.matmul(self);
        }
        self.squaring_radius() < 1.0
    }

    /// Criterion: geometric series converges (partial sums computed by the
    /// doubling identity `S_{2k} = S_k + M^k S_k`) and matches the directly
    /// computed inverse of `I - M` entrywise.
    fn criterion_neumann_series(&self) -> bool {
        let Some(direct) = invert_dense(self.n, &self.i_minus_flat()) else {
            return false;
        };
        let n = self.n;
        let mut sum = NonnegMatrix::identity(n).entries;
        let mut pk = self.entries.clone();
        let mut converged = false;
        for _ in 0..64 {
            let incr = flat_matmul(n, &pk, &sum);
            for (s, d) in sum.iter_mut().zip(&incr) {
                *s += d;
            }
            let scale = 1.0 + max_abs(&sum);
            if max_abs(&incr) <= 1e-13 * scale {
                converged = true;
                break;
            }
            if max_abs(&sum) > 1e14 {
                return false;
            }
            pk = flat_matmul(n, &pk, &pk);
        }
        if !converged {
            return false;
        }
        let diff: f64 = sum
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        diff <= 1e-8 * (1.0 + max_abs(&direct))
    }

    /// Criterion: `I - M` nonsingular with entrywise nonnegative inverse
    /// (up to a roundoff margin scaled by the inverse's magnitude).
    fn criterion_inverse_positivity(&self) -> bool {
        match invert_dense(self.n, &self.i_minus_flat()) {
            None => false,
            Some(inv) => {
                let scale = 1.0 + max_abs(&inv);
                inv.iter().all(|&v| v >= -1e-12 * scale)
            }
        }
    }

    /// Partial sum `I + M + ... + M^K` with `K` chosen so the geometric tail
    /// bound `rho^(K+1) / (1 - rho)`, scaled by the max row sum, is below
    /// `tol`. Requires `rho(M) < 1`.
    pub fn neumann_inverse(&self, tol: f64) -> Result<NonnegMatrix, MatrixError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(MatrixError::InvalidTolerance { tol });
        }
        let rho = self.spectral_radius();
        if rho >= 1.0 {
            return Err(MatrixError::NotConvergent { rho });
        }
        let terms = if rho == 0.0 {
            // The series is finite in exact arithmetic only for nilpotent
            // matrices, but rho = 0 makes the tail bound vanish at K = n.
            self.n as u64 + 1
        } else {
            let scale = self.max_row_sum().max(1.0);
            let k = ((tol * (1.0 - rho) / scale).ln() / rho.ln() - 1.0).ceil();
            let k = if k.is_finite() && k > 0.0 { k as u64 } else { 0 };
            k + 1
        };
        let (sum, _) = geometric_partial_sum(self, terms);
        Ok(NonnegMatrix::from_flat(self.n, sum)
            .expect("partial sums of nonnegative powers stay nonnegative"))
    }

    fn i_minus_flat(&self) -> Vec<f64> {
        let n = self.n;
        let mut out: Vec<f64> = self.entries.iter().map(|v| -v).collect();
        for i in 0..n {
            out[i * n + i] += 1.0;
        }
        out
    }

    /// Inverse of `I - M` by Gaussian elimination with partial pivoting,
    /// returned as rows; `None` when `I - M` is numerically singular.
    pub fn inverse_i_minus(&self) -> Option<Vec<Vec<f64>>> {
        let inv = invert_dense(self.n, &self.i_minus_flat())?;
        Some(
            (0..self.n)
                .map(|i| inv[i * self.n..(i + 1) * self.n].to_vec())
                .collect(),
        )
    }
}

/// Largest scaling `eps` such that `A + eps B` stays convergent to zero,
/// located by bisection on `[0, 1e6]` to width `tol`. The spectral radius of
/// `A + eps B` is nondecreasing in `eps` for nonnegative `A`, `B`, which makes
/// the bisection sound. Returns `Unbounded` when `B = 0` or when even the cap
/// does not break convergence.
pub fn perturbation_margin(
    a: &NonnegMatrix,
    b: &NonnegMatrix,
    tol: f64,
) -> Result<PerturbationMargin, MatrixError> {
    if a.dim() != b.dim() {
        return Err(MatrixError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(MatrixError::InvalidTolerance { tol });
    }
    let rho_a = a.spectral_radius();
    if rho_a >= 1.0 {
        return Err(MatrixError::NotConvergent { rho: rho_a });
    }
    if b.max_entry() == 0.0 {
        return Ok(PerturbationMargin::Unbounded);
    }
    let rho_at = |eps: f64| a.add(&b.scale(eps)).spectral_radius();
    if rho_at(MARGIN_CAP) < 1.0 {
        return Ok(PerturbationMargin::Unbounded);
    }
    let mut lo = 0.0;
    let mut hi = MARGIN_CAP;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if rho_at(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(PerturbationMargin::Finite(0.5 * (lo + hi)))
}

fn flat_matmul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// `(S, P)` with `S = I + M + ... + M^(terms-1)` and `P = M^terms`, computed
/// in O(log terms) multiplications via `S_{2k} = S_k + M^k S_k`. All
/// intermediate entries are nonnegative, so there is no cancellation.
fn geometric_partial_sum(m: &NonnegMatrix, terms: u64) -> (Vec<f64>, Vec<f64>) {
    let n = m.dim();
    if terms <= 1 {
        return (NonnegMatrix::identity(n).entries, m.entries.clone());
    }
    let (half_sum, half_pow) = geometric_partial_sum(m, terms / 2);
    let mut sum = half_sum.clone();
    let cross = flat_matmul(n, &half_pow, &half_sum);
    for (s, c) in sum.iter_mut().zip(&cross) {
        *s += c;
    }
    let mut pow = flat_matmul(n, &half_pow, &half_pow);
    if terms % 2 == 1 {
        // S_{2k+1} = I + M S_{2k}, P_{2k+1} = M P_{2k}.
        let mut odd_sum = flat_matmul(n, &m.entries, &sum);
        for i in 0..n {
            odd_sum[i * n + i] += 1.0;
        }
        sum = odd_sum;
        pow = flat_matmul(n, &m.entries, &pow);
    }
    (sum, pow)
}

/// Dense inverse with partial pivoting; `None` on numerical singularity.
fn invert_dense(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let scale = max_abs(a).max(1.0);
    let mut work = a.to_vec();
    let mut inv = NonnegMatrix::identity(n).entries;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = work[col * n + col].abs();
        for r in col + 1..n {
            let v = work[r * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= 1e-14 * scale {
            return None;
        }
        if pivot_row != col {
            for j in 0..n {
                work.swap(col * n + j, pivot_row * n + j);
                inv.swap(col * n + j, pivot_row * n + j);
            }
        }
        let p = work[col * n + col];
        for j in 0..n {
            work[col * n + j] /= p;
            inv[col * n + j] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = work[r * n + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..n {
                work[r * n + j] -= f * work[col * n + j];
                inv[r * n + j] -= f * inv[col * n + j];
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> NonnegMatrix {
        NonnegMatrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap()
    }

    #[test]
    fn constructor_rejects_negative_entries() {
        let err = NonnegMatrix::from_rows(&[vec![0.5, -0.1], vec![0.0, 0.5]]).unwrap_err();
        assert!(matches!(err, MatrixError::InvalidEntry { row: 0, col: 1, .. }));
    }

    #[test]
    fn constructor_rejects_empty_and_ragged() {
        assert!(matches!(
            NonnegMatrix::from_rows(&[]),
            Err(MatrixError::EmptyMatrix)
        ));
        assert!(matches!(
            NonnegMatrix::from_rows(&[vec![1.0], vec![1.0, 2.0]]),
            Err(MatrixError::RaggedRow { .. })
        ));
    }

    #[test]
    fn spectral_radius_zero_matrix() {
        assert_eq!(NonnegMatrix::zero(2).spectral_radius(), 0.0);
    }

    #[test]
    fn spectral_radius_symmetric_coupling() {
        // Off-diagonal coupling 0.35: eigenvalues 0.5 +/- 0.35.
        let rho = m2(0.5, 0.35, 0.35, 0.5).spectral_radius();
        assert!((rho - 0.85).abs() < 1e-12, "rho = {rho}");
        let rho = m2(0.5, 0.55, 0.55, 0.5).spectral_radius();
        assert!((rho - 1.05).abs() < 1e-12, "rho = {rho}");
    }

    #[test]
    fn eigenvalues_2x2_closed_form() {
        let eig = m2(0.5, 0.35, 0.35, 0.5).eigenvalues_2x2().unwrap();
        assert!((eig[0] - 0.15).abs() < 1e-12);
        assert!((eig[1] - 0.85).abs() < 1e-12);
        assert!(matches!(
            NonnegMatrix::identity(3).eigenvalues_2x2(),
            Err(MatrixError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectral_radius_companion_3x3() {
        // Companion matrix of lambda^3 = 1/8: rho = 1/2.
        let m = NonnegMatrix::from_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.125, 0.0, 0.0],
        ])
        .unwrap();
        assert!((m.spectral_radius() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn spectral_radius_reducible_falls_back_to_squaring() {
        // Block-diagonal spectrum {2, 0.5}: the Collatz bracket never
        // collapses, so the squaring fallback must deliver the answer.
        let m = NonnegMatrix::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 0.5],
        ])
        .unwrap();
        assert!((m.spectral_radius() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_radius_power_law() {
        let m = m2(0.5, 0.35, 0.35, 0.5);
        let rho = m.spectral_radius();
        for k in 1..=5u32 {
            let lhs = m.power(k).spectral_radius();
            let rhs = rho.powi(k as i32);
            assert!((lhs - rhs).abs() <= 1e-8 * rhs.max(1.0), "k={k}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn convergence_report_convergent_case() {
        let report = m2(0.5, 0.35, 0.35, 0.5)
            .check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)
            .unwrap();
        assert_eq!(report.verdict, Verdict::Convergent);
        assert!(report.by_power_iteration);
        assert!(report.by_neumann);
        assert!(report.by_eigenvalues);
        assert!(report.by_inverse_positivity);
    }

    #[test]
    fn convergence_report_divergent_case() {
        let report = m2(0.5, 0.55, 0.55, 0.5)
            .check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)
            .unwrap();
        assert_eq!(report.verdict, Verdict::NotConvergent);
        assert!(!report.by_power_iteration);
        assert!(!report.by_neumann);
        assert!(!report.by_eigenvalues);
        assert!(!report.by_inverse_positivity);
    }

    #[test]
    fn convergence_report_boundary_and_scaled_identity() {
        // rho exactly 1 falls in the band; twice the identity does not.
        let id = NonnegMatrix::identity(2);
        let report = id.check_convergent_to_zero(DEFAULT_BOUNDARY_BAND).unwrap();
        assert_eq!(report.verdict, Verdict::Boundary);
        let report = id
            .scale(2.0)
            .check_convergent_to_zero(DEFAULT_BOUNDARY_BAND)
            .unwrap();
        assert_eq!(report.verdict, Verdict::NotConvergent);
        assert!(!report.by_power_iteration && !report.by_neumann);
    }

    #[test]
    fn convergence_report_rejects_bad_band() {
        let m = m2(0.5, 0.0, 0.0, 0.5);
        assert!(matches!(
            m.check_convergent_to_zero(0.0),
            Err(MatrixError::InvalidBoundaryBand { .. })
        ));
        assert!(matches!(
            m.check_convergent_to_zero(0.2),
            Err(MatrixError::InvalidBoundaryBand { .. })
        ));
    }

    #[test]
    fn neumann_inverse_diagonal() {
        let inv = m2(0.5, 0.0, 0.0, 0.5).neumann_inverse(1e-12).unwrap();
        assert!((inv.entry(0, 0) - 2.0).abs() < 1e-11);
        assert!((inv.entry(1, 1) - 2.0).abs() < 1e-11);
        assert_eq!(inv.entry(0, 1), 0.0);
    }

    #[test]
    fn neumann_inverse_zero_matrix_is_identity() {
        let inv = NonnegMatrix::zero(2).neumann_inverse(1e-12).unwrap();
        assert_eq!(inv, NonnegMatrix::identity(2));
    }

    #[test]
    fn neumann_inverse_matches_direct_2x2_inverse() {
        // Independent oracle: determinant formula for the 2x2 inverse.
        let m = m2(0.5, 0.35, 0.35, 0.5);
        let inv = m.neumann_inverse(1e-10).unwrap();
        let (a, b, c, d) = (0.5, -0.35, -0.35, 0.5);
        let det = a * d - b * c;
        let expected = [[d / det, -b / det], [-c / det, a / det]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (inv.entry(i, j) - expected[i][j]).abs() < 1e-8,
                    "({i},{j}): {} vs {}",
                    inv.entry(i, j),
                    expected[i][j]
                );
            }
        }
    }

    #[test]
    fn neumann_inverse_rejects_divergent() {
        assert!(matches!(
            m2(0.5, 0.55, 0.55, 0.5).neumann_inverse(1e-8),
            Err(MatrixError::NotConvergent { .. })
        ));
    }

    #[test]
    fn perturbation_margin_identity_direction() {
        let margin = perturbation_margin(
            &NonnegMatrix::zero(2),
            &NonnegMatrix::identity(2),
            1e-9,
        )
        .unwrap();
        match margin {
            PerturbationMargin::Finite(eps) => assert!((eps - 1.0).abs() < 1e-8),
            PerturbationMargin::Unbounded => panic!("expected finite margin"),
        }
        let margin = perturbation_margin(
            &m2(0.5, 0.0, 0.0, 0.5),
            &NonnegMatrix::identity(2),
            1e-9,
        )
        .unwrap();
        match margin {
            PerturbationMargin::Finite(eps) => assert!((eps - 0.5).abs() < 1e-8),
            PerturbationMargin::Unbounded => panic!("expected finite margin"),
        }
    }

    #[test]
    fn perturbation_margin_dense_direction_matches_sweep() {
        let a = m2(0.5, 0.25, 0.25, 0.5);
        let ones = NonnegMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let margin = match perturbation_margin(&a, &ones, 1e-9).unwrap() {
            PerturbationMargin::Finite(eps) => eps,
            PerturbationMargin::Unbounded => panic!("expected finite margin"),
        };
        // Oracle: dense sweep over eps with the spectral radius.
        let mut sweep = None;
        let step = 1e-5;
        let mut eps = 0.0;
        while eps < 1.0 {
            if a.add(&ones.scale(eps)).spectral_radius() >= 1.0 {
                sweep = Some(eps);
                break;
            }
            eps += step;
        }
        let sweep = sweep.expect("sweep must cross the unit radius");
        assert!((margin - sweep).abs() <= 2.0 * step, "{margin} vs {sweep}");
        // Symmetric rank analysis gives the exact crossing at 0.125.
        assert!((margin - 0.125).abs() < 1e-8);
    }

    #[test]
    fn perturbation_margin_zero_direction_is_unbounded() {
        let m = perturbation_margin(&m2(0.5, 0.0, 0.0, 0.5), &NonnegMatrix::zero(2), 1e-9)
            .unwrap();
        assert_eq!(m, PerturbationMargin::Unbounded);
    }

    #[test]
    fn perturbation_margin_requires_convergent_base() {
        assert!(matches!(
            perturbation_margin(&NonnegMatrix::identity(2), &NonnegMatrix::identity(2), 1e-9),
            Err(MatrixError::NotConvergent { .. })
        ));
    }

    #[test]
    fn perturbation_margin_halves_when_direction_doubles() {
        let a = m2(0.25, 0.1, 0.1, 0.25);
        let b = NonnegMatrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let m1 = match perturbation_margin(&a, &b, 1e-10).unwrap() {
            PerturbationMargin::Finite(eps) => eps,
            _ => panic!(),
        };
        let m2 = match perturbation_margin(&a, &b.scale(2.0), 1e-10).unwrap() {
            PerturbationMargin::Finite(eps) => eps,
            _ => panic!(),
        };
        assert!((m1 - 2.0 * m2).abs() < 1e-8, "{m1} vs {m2}");
    }

    #[test]
    fn inverse_i_minus_singular_at_unit_radius() {
        assert!(NonnegMatrix::identity(2).inverse_i_minus().is_none());
        let inv = m2(0.5, 0.0, 0.0, 0.5).inverse_i_minus().unwrap();
        assert!((inv[0][0] - 2.0).abs() < 1e-12);
    }
}

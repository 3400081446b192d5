//! Eigen-machinery: deflated power iteration for the sparse operators, and
//! dense symmetric / general solvers used by the baselines and as oracles.

use crate::error::{Error, Result};
use nalgebra::{Complex, DMatrix, Schur, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest dimension accepted by the dense solvers.
pub const DENSE_CAP: usize = 4000;

const DENSE_MAX_SWEEPS: usize = 100_000;
const NONSYM_ATTEMPTS: usize = 6;

/// Controls for [`power_leading`].
#[derive(Debug, Clone)]
pub struct PowerOptions {
    /// Relative residual target, `‖Bv − μv‖ ≤ tol·|μ|` on the shifted map `B`.
    pub tol: f64,
    /// Iteration budget; `None` means `10·n + 1000`.
    pub max_iter: Option<usize>,
    pub seed: u64,
    /// Added to the map as `shift·I` during iteration and removed from the
    /// reported eigenvalue.
    pub shift: f64,
    /// Starting vector; a seeded random vector is used when absent or when it
    /// lies inside the deflation span.
    pub start: Option<Vec<f64>>,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-10,
            max_iter: None,
            seed: 0,
            shift: 0.0,
            start: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub value: f64,
    /// Unit-norm eigenvector estimate.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let c = dot(v, q);
        v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let nv = norm(v);
    if nv > 0.0 {
        v.iter_mut().for_each(|x| *x /= nv);
    }
    nv
}

/// Dominant eigenpair of `apply + shift·I` on the orthogonal complement of
/// `deflate`, reported for `apply` itself.
///
/// `apply(x, y)` must write the image of `x` into `y` and be symmetric.
/// The deflation vectors must be orthonormal. With a shift large enough to
/// make the restricted spectrum non-negative, "dominant" means algebraically
/// largest. Running out of iterations is not an error: the result carries
/// `converged = false` and the caller decides.
pub fn power_leading<F>(
    apply: F,
    n: usize,
    deflate: &[Vec<f64>],
    opts: &PowerOptions,
) -> Result<PowerResult>
where
    F: Fn(&[f64], &mut [f64]),
{
    if let Some(q) = deflate.iter().find(|q| q.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.len(),
        });
    }
    if deflate.len() >= n {
        return Err(Error::InvalidParameter(format!(
            "deflating {} vectors leaves nothing of dimension {n}",
            deflate.len()
        )));
    }
    let max_iter = opts.max_iter.unwrap_or(10 * n + 1000);

    let mut v = match &opts.start {
        Some(s) if s.len() == n => s.clone(),
        Some(s) => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: s.len(),
            })
        }
        None => Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    loop {
        if v.is_empty() {
            v = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        }
        project_out(&mut v, deflate);
        project_out(&mut v, deflate);
        if normalize(&mut v) > 1e-12 {
            break;
        }
        v.clear();
    }

    let mut w = vec![0.0; n];
    let mut result = PowerResult {
        value: f64::NAN,
        vector: Vec::new(),
        iterations: 0,
        residual: f64::INFINITY,
        converged: false,
    };
    for it in 1..=max_iter {
        apply(&v, &mut w);
        w.iter_mut().zip(&v).for_each(|(y, x)| *y += opts.shift * x);
        project_out(&mut w, deflate);
        let mu = dot(&v, &w);
        let residual = v
            .iter()
            .zip(&w)
            .map(|(x, y)| (y - mu * x).powi(2))
            .sum::<f64>()
            .sqrt();
        result.value = mu - opts.shift;
        result.iterations = it;
        result.residual = residual;
        if residual <= opts.tol * mu.abs() || residual == 0.0 {
            result.converged = true;
            break;
        }
        if normalize(&mut w) == 0.0 {
            // v spans part of the kernel of the shifted map.
            result.converged = true;
            break;
        }
        std::mem::swap(&mut v, &mut w);
    }
    result.vector = v;
    Ok(result)
}

/// Second and third eigenvalues of `W − diag(Wu)` and the eigenvector of the
/// second one.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub beta2: f64,
    pub beta3: f64,
    /// Unit norm, orthogonal to the all-one vector.
    pub y2: Vec<f64>,
    /// False when either power iteration ran out of budget.
    pub converged: bool,
    /// Power iterations spent on `y2` and on `beta3` together.
    pub iterations: usize,
}

impl SpectralSummary {
    pub fn gap(&self) -> f64 {
        self.beta2 - self.beta3
    }
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: DMatrix<f64>,
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    if n > DENSE_CAP {
        return Err(Error::TooLarge { n, cap: DENSE_CAP });
    }
    Ok(n)
}

pub fn dense_sym_eigs(m: &DMatrix<f64>) -> Result<SymEigen> {
    let n = check_square(m)?;
    let scale = m.amax().max(1.0);
    let mut asym: f64 = 0.0;
    for j in 0..n {
        for i in 0..j {
            asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asym > 1e-10 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, DENSE_MAX_SWEEPS)
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SymEigen { values, vectors })
}

/// Full complex spectrum of a general real square matrix, unordered.
pub fn dense_nonsym_eigs(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    check_square(m)?;
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let n = m.nrows();
    // Francis iterations can stall on highly degenerate spectra; a
    // permutation similarity leaves the spectrum untouched but changes the
    // Hessenberg form, which is usually enough to get going again.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut perm: Vec<usize> = (0..n).collect();
    for attempt in 0..NONSYM_ATTEMPTS {
        match attempt {
            0 => {}
            1 => perm.reverse(),
            _ => perm.shuffle(&mut rng),
        }
        let pm = DMatrix::from_fn(n, n, |i, j| m[(perm[i], perm[j])]);
        if let Some(schur) = Schur::try_new(pm, f64::EPSILON, DENSE_MAX_SWEEPS) {
            return Ok(schur.complex_eigenvalues().iter().copied().collect());
        }
    }
    Err(Error::NoConvergence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn dense_apply(m: &DMatrix<f64>) -> impl Fn(&[f64], &mut [f64]) + '_ {
        move |x, y| {
            for i in 0..m.nrows() {
                y[i] = (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum();
            }
        }
    }

    #[test]
    fn power_on_diagonal() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let r = power_leading(dense_apply(&m), 2, &[], &PowerOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-10);
        assert!((r.vector[0].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn power_with_deflation_finds_negative_eigenvalue() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let r = power_leading(dense_apply(&m), 2, &[vec![s, s]], &PowerOptions::default())
            .unwrap();
        assert!((r.value + 1.0).abs() < 1e-12);
        assert!((r.vector[0] + r.vector[1]).abs() < 1e-12);
    }

    #[test]
    fn power_reports_non_convergence() {
        // Equal-magnitude eigenvalues ±1: plain power iteration oscillates.
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let opts = PowerOptions {
            max_iter: Some(50),
            start: Some(vec![1.0, 1.0]),
            ..Default::default()
        };
        let r = power_leading(dense_apply(&m), 2, &[], &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 50);
    }

    #[test]
    fn power_rejects_full_deflation_and_bad_dimensions() {
        let m = DMatrix::<f64>::identity(1, 1);
        assert!(power_leading(dense_apply(&m), 1, &[vec![1.0]], &PowerOptions::default()).is_err());
        assert!(power_leading(dense_apply(&m), 1, &[vec![1.0, 0.0]], &PowerOptions::default()).is_err());
    }

    #[test]
    fn dense_sym_examples() {
        let e = dense_sym_eigs(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14 && (e.values[1] + 1.0).abs() < 1e-14);
        let k3 = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 1.0 });
        let e = dense_sym_eigs(&k3).unwrap();
        for (got, want) in e.values.iter().zip([2.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let e = dense_sym_eigs(&DMatrix::zeros(4, 4)).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
        let bad = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(dense_sym_eigs(&bad), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn dense_nonsym_examples() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let mut ev = dense_nonsym_eigs(&rot).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - Complex::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - Complex::new(0.0, 1.0)).norm() < 1e-12);

        let upper = DMatrix::from_row_slice(3, 3, &[3.0, 1.0, 2.0, 0.0, -1.0, 5.0, 0.0, 0.0, 0.5]);
        let mut re: Vec<f64> = dense_nonsym_eigs(&upper).unwrap().iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (got, want) in re.iter().zip([-1.0, 0.5, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        g.qr().q()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn deflated_power_matches_dense(n in 5usize..120, seed in any::<u64>(), k in 1usize..4) {
            // Spectrum with gaps of at least 0.02 so the iteration budget suffices.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut lam: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            lam.sort_by(|a, b| b.total_cmp(a));
            let lam: Vec<f64> = lam.iter().enumerate().map(|(i, l)| l - 0.02 * i as f64).collect();
            let q = random_orthogonal(n, &mut rng);
            let m = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lam)) * q.transpose();
            let m = (&m + m.transpose()) * 0.5;
            let dense = dense_sym_eigs(&m).unwrap();
            let deflate: Vec<Vec<f64>> = (0..k).map(|j| dense.vectors.column(j).iter().copied().collect()).collect();
            let shift = m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
            let opts = PowerOptions { shift, seed, max_iter: Some(200_000), ..Default::default() };
            let r = power_leading(dense_apply(&m), n, &deflate, &opts).unwrap();
            prop_assert!((r.value - dense.values[k]).abs() < 1e-6, "{} vs {}", r.value, dense.values[k]);
            let cos = dot(&r.vector, dense.vectors.column(k).as_slice());
            prop_assert!(cos.abs() >= 0.999);
        }

        #[test]
        fn nonsym_values_sum_to_trace(n in 1usize..40, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
            let ev = dense_nonsym_eigs(&m).unwrap();
            let sum: Complex<f64> = ev.iter().sum();
            let tol = 1e-6 * n as f64 * m.amax();
            prop_assert!((sum.re - m.trace()).abs() <= tol && sum.im.abs() <= tol);
        }

        #[test]
        fn sym_reconstruction(n in 1usize..40, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let m = &g + g.transpose();
            let e = dense_sym_eigs(&m).unwrap();
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
            let rec = &e.vectors * lam * e.vectors.transpose();
            prop_assert!((rec - &m).amax() <= 1e-8 * m.amax().max(1e-300));
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

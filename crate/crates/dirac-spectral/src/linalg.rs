//! Tiny dense complex helpers: 2×2 singular value decomposition pieces and
//! nullspaces of 2×4 systems. Everything here is closed-form; no pivoted
//! factorization library is worth the dependency at these sizes.

use crate::Complex;

fn czero() -> Complex {
    Complex::new(0.0, 0.0)
}

/// Multiplies v by a unimodular phase so its largest-magnitude entry is real
/// and non-negative. Fixes the gauge of computed null/singular vectors so
/// downstream output is deterministic.
pub fn canonical_phase(v: &mut [Complex]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.norm_sqr() > v[best].norm_sqr() {
            best = i;
        }
    }
    let n = v[best].norm();
    if n == 0.0 {
        return;
    }
    let phase = v[best].conj() / n;
    for x in v.iter_mut() {
        *x *= phase;
    }
}

/// Eigenvalues of a 2×2 Hermitian matrix ((a, b), (conj b, d)) with a, d real,
/// returned as (larger, smaller).
fn hermitian_2x2_eigs(a: f64, b: Complex, d: f64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let disc = (0.5 * (a - d)).hypot(b.norm());
    (mean + disc, mean - disc)
}

/// Singular values (σ₁ ≥ σ₂ ≥ 0) and a unit right singular vector for σ₂ of a
/// 2×2 complex matrix.
pub fn svd_2x2(m: &[[Complex; 2]; 2]) -> (f64, f64, [Complex; 2]) {
    // H = MᴴM is Hermitian positive semidefinite
    let h11 = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let h22 = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let h12 = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let (e1, e2) = hermitian_2x2_eigs(h11, h12, h22);
    let s1 = e1.max(0.0).sqrt();
    let s2 = e2.max(0.0).sqrt();

    // (H − e₂ I) v = 0; pick the larger of the two candidate rows
    let r1 = [Complex::new(h11 - e2, 0.0), h12];
    let r2 = [h12.conj(), Complex::new(h22 - e2, 0.0)];
    let n1 = r1[0].norm_sqr() + r1[1].norm_sqr();
    let n2 = r2[0].norm_sqr() + r2[1].norm_sqr();
    let row = if n1 >= n2 { r1 } else { r2 };
    let mut v = if row[0].norm_sqr() + row[1].norm_sqr() < 1e-300 {
        // H is (numerically) a multiple of the identity; any direction works
        [Complex::new(1.0, 0.0), czero()]
    } else {
        [row[1], -row[0]]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    v[0] /= norm;
    v[1] /= norm;
    canonical_phase(&mut v);
    (s1, s2, v)
}

/// Singular values (σ₁ ≥ σ₂ ≥ 0) of a 2×4 complex matrix, via the 2×2
/// Hermitian Gram matrix A Aᴴ.
pub fn singular_values_2x4(a: &[[Complex; 4]; 2]) -> (f64, f64) {
    let dot = |u: &[Complex; 4], v: &[Complex; 4]| -> Complex {
        u.iter().zip(v).map(|(x, y)| x * y.conj()).sum()
    };
    let g11 = dot(&a[0], &a[0]).re;
    let g22 = dot(&a[1], &a[1]).re;
    let g12 = dot(&a[0], &a[1]);
    let (e1, e2) = hermitian_2x2_eigs(g11, g12, g22);
    (e1.max(0.0).sqrt(), e2.max(0.0).sqrt())
}

fn project_out(v: &mut [Complex; 4], unit: &[Complex; 4]) {
    let coeff: Complex = v.iter().zip(unit).map(|(x, u)| x * u.conj()).sum();
    for (x, u) in v.iter_mut().zip(unit) {
        *x -= coeff * u;
    }
}

fn normalize4(v: &mut [Complex; 4]) -> f64 {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
    n
}

/// Orthonormal basis of the right nullspace {v : A v = 0} of a full-rank 2×4
/// matrix. Returns None when the rows are (numerically) rank deficient.
pub fn nullspace_2x4(a: &[[Complex; 4]; 2]) -> Option<[[Complex; 4]; 2]> {
    // A v = 0 ⟺ v ⟂ conj(rows) in the Hermitian sense, so orthonormalize the
    // conjugated row space and project it out
    let mut r1 = a[0].map(|z| z.conj());
    let scale1 = normalize4(&mut r1);
    let mut r2 = a[1].map(|z| z.conj());
    project_out(&mut r2, &r1);
    let scale2 = normalize4(&mut r2);
    let a_scale = a
        .iter()
        .flatten()
        .map(|x| x.norm())
        .fold(0.0f64, f64::max)
        .max(1.0);
    if scale1 <= 1e-12 * a_scale || scale2 <= 1e-10 {
        return None;
    }

    // Project the two standard basis vectors with the smallest row-space
    // footprint onto the orthogonal complement
    let mut scored: Vec<(f64, usize)> = (0..4)
        .map(|j| (r1[j].norm_sqr() + r2[j].norm_sqr(), j))
        .collect();
    scored.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));

    let mut basis: [[Complex; 4]; 2] = [[czero(); 4]; 2];
    let mut found = 0usize;
    for &(_, j) in &scored {
        let mut cand = [czero(); 4];
        cand[j] = Complex::new(1.0, 0.0);
        project_out(&mut cand, &r1);
        project_out(&mut cand, &r2);
        for k in 0..found {
            let prev = basis[k];
            project_out(&mut cand, &prev);
        }
        if normalize4(&mut cand) > 1e-7 {
            canonical_phase(&mut cand);
            basis[found] = cand;
            found += 1;
            if found == 2 {
                return Some(basis);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn svd_of_diagonal_matrix() {
        let m = [[c(3.0, 0.0), czero()], [czero(), c(0.0, -0.5)]];
        let (s1, s2, v) = svd_2x2(&m);
        assert!((s1 - 3.0).abs() < 1e-14);
        assert!((s2 - 0.5).abs() < 1e-14);
        // smallest singular direction is the second axis
        assert!(v[0].norm() < 1e-12);
        assert!((v[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_null_vector_of_singular_matrix() {
        // rank one: second column = 2i · first column
        let m = [
            [c(1.0, 1.0), c(1.0, 1.0) * c(0.0, 2.0)],
            [c(0.5, -0.25), c(0.5, -0.25) * c(0.0, 2.0)],
        ];
        let (s1, s2, v) = svd_2x2(&m);
        assert!(s1 > 1.0);
        assert!(s2 < 1e-14);
        let image0 = m[0][0] * v[0] + m[0][1] * v[1];
        let image1 = m[1][0] * v[0] + m[1][1] * v[1];
        assert!(image0.norm() < 1e-13);
        assert!(image1.norm() < 1e-13);
        // canonical gauge: dominant entry real positive
        let dominant = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
        assert!(dominant.im.abs() < 1e-14 && dominant.re > 0.0);
    }

    #[test]
    fn singular_values_track_row_scaling() {
        let a = [
            [c(1.0, 0.0), czero(), czero(), czero()],
            [czero(), c(0.0, 2.0), czero(), czero()],
        ];
        let (s1, s2) = singular_values_2x4(&a);
        assert!((s1 - 2.0).abs() < 1e-14);
        assert!((s2 - 1.0).abs() < 1e-14);

        let dependent = [
            [c(1.0, 0.0), c(2.0, 0.0), czero(), czero()],
            [c(2.0, 0.0), c(4.0, 0.0), czero(), czero()],
        ];
        let (_, s2) = singular_values_2x4(&dependent);
        assert!(s2 < 1e-14);
    }

    #[test]
    fn nullspace_is_orthonormal_and_annihilated() {
        let a = [
            [c(1.0, 0.0), c(0.0, 1.0), c(2.0, -1.0), c(0.5, 0.5)],
            [c(0.0, -2.0), c(1.0, 1.0), c(-1.0, 0.0), c(3.0, 0.0)],
        ];
        let basis = nullspace_2x4(&a).unwrap();
        for v in &basis {
            for row in &a {
                let dot: Complex = row.iter().zip(v).map(|(r, x)| r * x).sum();
                assert!(dot.norm() < 1e-12);
            }
        }
        let n0: f64 = basis[0].iter().map(|x| x.norm_sqr()).sum();
        let n1: f64 = basis[1].iter().map(|x| x.norm_sqr()).sum();
        let cross: Complex = basis[0].iter().zip(&basis[1]).map(|(x, y)| x * y.conj()).sum();
        assert!((n0 - 1.0).abs() < 1e-13);
        assert!((n1 - 1.0).abs() < 1e-13);
        assert!(cross.norm() < 1e-12);
    }

    #[test]
    fn nullspace_rejects_dependent_rows() {
        let a = [
            [c(1.0, 0.0), c(0.0, 1.0), czero(), czero()],
            [c(2.0, 0.0), c(0.0, 2.0), czero(), czero()],
        ];
        assert!(nullspace_2x4(&a).is_none());
    }
}

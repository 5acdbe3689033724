//! Small dense numeric helpers for the crossing-count pipeline: matrix
//! exponentials, complex determinants and kernels, Hermitian signatures.

use num_complex::Complex64;

pub type Mat = Vec<Vec<f64>>;
pub type CMat = Vec<Vec<Complex64>>;

pub fn zeros(n: usize) -> Mat {
    vec![vec![0.0; n]; n]
}

pub fn eye(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn mat_scale(a: &Mat, c: f64) -> Mat {
    a.iter()
        .map(|r| r.iter().map(|x| x * c).collect())
        .collect()
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn norm_inf(a: &Mat) -> f64 {
    a.iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Standard symplectic `J` of half-dimension `n` as a dense matrix.
pub fn j_mat(n: usize) -> Mat {
    let mut m = zeros(2 * n);
    for i in 0..n {
        m[i][n + i] = -1.0;
        m[n + i][i] = 1.0;
    }
    m
}

/// `exp(M)` by scaling-and-squaring with a Taylor core.
pub fn expm(m: &Mat) -> Mat {
    let n = m.len();
    let norm = norm_inf(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = mat_scale(m, 0.5f64.powi(squarings as i32));
    // Taylor with enough terms for ||scaled|| <= 0.5 at f64 precision.
    let mut result = eye(n);
    let mut term = eye(n);
    for k in 1..=24 {
        term = mat_scale(&matmul(&term, &scaled), 1.0 / k as f64);
        result = mat_add(&result, &term);
        if norm_inf(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// `cos(φ)·I + sin(φ)·J`: the rotation `exp(φ·J)` in closed form.
pub fn j_rotation(n: usize, phi: f64) -> Mat {
    let (s, c) = phi.sin_cos();
    let mut m = mat_scale(&eye(2 * n), c);
    for i in 0..n {
        m[i][n + i] = -s;
        m[n + i][i] = s;
    }
    m
}

/// `det(M - ωI)` over C by LU with partial pivoting.
pub fn det_shifted(m: &Mat, omega: Complex64) -> Complex64 {
    let n = m.len();
    let mut a: CMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = Complex64::new(m[i][j], 0.0);
                    if i == j {
                        v - omega
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let (pivot, mag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let sub = f * a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Orthonormal-ish basis of `ker(M - ωI)` over C via Gaussian elimination
/// with a relative pivot tolerance.
pub fn complex_kernel(m: &Mat, omega: Complex64, rel_tol: f64) -> Vec<Vec<Complex64>> {
    let n = m.len();
    let mut a: CMat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = Complex64::new(m[i][j], 0.0);
                    if i == j {
                        v - omega
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let scale = norm_inf(m).max(1.0);
    let tol = rel_tol * scale;
    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let (pivot, mag) = (rank..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap_or((rank, 0.0));
        if mag <= tol {
            continue;
        }
        a.swap(pivot, rank);
        let p = a[rank][col];
        for c in 0..n {
            a[rank][c] /= p;
        }
        for r in 0..n {
            if r != rank && a[r][col].norm() > 0.0 {
                let f = a[r][col];
                for c in 0..n {
                    let sub = f * a[rank][c];
                    a[r][c] -= sub;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[f] = Complex64::new(1.0, 0.0);
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[r][f];
        }
        let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
        basis.push(v);
    }
    basis
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    let n = a.len();
    let mut m = a.clone();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// Signature `(m⁺, m⁻)` of the Hermitian form `V* A V` on a complex kernel
/// basis, via the real embedding (whose eigenvalues double those of the
/// Hermitian matrix). Returns `None` when an eigenvalue sits inside the
/// zero band (irregular crossing).
pub fn hermitian_form_signature(
    a: &Mat,
    basis: &[Vec<Complex64>],
    zero_band: f64,
) -> Option<(u32, u32)> {
    let k = basis.len();
    if k == 0 {
        return Some((0, 0));
    }
    let n = a.len();
    // Q = V* A V, Hermitian k×k.
    let mut q = vec![vec![Complex64::new(0.0, 0.0); k]; k];
    for (r, vr) in basis.iter().enumerate() {
        for (c, vc) in basis.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let mut av = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    av += a[i][j] * vc[j];
                }
                acc += vr[i].conj() * av;
            }
            q[r][c] = acc;
        }
    }
    // Real embedding [[X, -Y], [Y, X]].
    let mut em = zeros(2 * k);
    for i in 0..k {
        for j in 0..k {
            em[i][j] = q[i][j].re;
            em[i][k + j] = -q[i][j].im;
            em[k + i][j] = q[i][j].im;
            em[k + i][k + j] = q[i][j].re;
        }
    }
    let eigs = symmetric_eigenvalues(&em);
    let mut plus = 0u32;
    let mut minus = 0u32;
    for e in eigs {
        if e > zero_band {
            plus += 1;
        } else if e < -zero_band {
            minus += 1;
        } else {
            return None;
        }
    }
    // Each Hermitian eigenvalue appears twice in the embedding.
    Some((plus / 2, minus / 2))
}

/// Roots of the characteristic polynomial of `M` (monic, degree 2n) by
/// Durand-Kerner iteration; good enough to read off unit-circle angles.
pub fn eigenvalue_angles_on_circle(m: &Mat) -> Vec<f64> {
    let n = m.len();
    // Characteristic polynomial coefficients by Newton's identities over the
    // power traces p_j = tr(M^j).
    let mut coeffs = vec![1.0f64]; // leading
    let mut mk = eye(n);
    for k in 1..=n {
        mk = matmul(m, &mk);
        let p_k: f64 = (0..n).map(|i| mk[i][i]).sum();
        let c = -(p_k + (1..k).map(|j| coeffs[j] * power_trace(m, k - j)).sum::<f64>()) / k as f64;
        coeffs.push(c);
    }
    // Durand-Kerner.
    let deg = n;
    let mut roots: Vec<Complex64> = (0..deg)
        .map(|i| Complex64::from_polar(1.1, 0.3 + 2.0 * std::f64::consts::PI * i as f64 / deg as f64))
        .collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in &coeffs {
            acc = acc * z + c;
        }
        acc
    };
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let delta = eval(roots[i]) / denom;
            roots[i] -= delta;
            moved = moved.max(delta.norm());
        }
        if moved < 1e-13 {
            break;
        }
    }
    roots
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() < 1e-6)
        .map(|z| {
            let mut a = z.arg();
            if a < 0.0 {
                a += 2.0 * std::f64::consts::PI;
            }
            a
        })
        .collect()
}

/// `tr(M^k)` for small k.
fn power_trace(m: &Mat, k: usize) -> f64 {
    let mut mk = m.clone();
    for _ in 1..k {
        mk = matmul(&mk, m);
    }
    (0..m.len()).map(|i| mk[i][i]).sum()
}

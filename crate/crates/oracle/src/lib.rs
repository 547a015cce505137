//! Reference computations for the test suites, written without any linear
//! algebra library so they share no code path with the crates they check.

/// Column means and the sample covariance `MᵀM / (n - 1)`, where `M` is
/// the data minus the means (or the raw data when `centered` is false).
pub fn covariance(rows: &[Vec<f64>], centered: bool) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = rows.len();
    assert!(n >= 2, "need two rows");
    let d = rows[0].len();
    let mut mean = vec![0.0; d];
    if centered {
        for r in rows {
            for j in 0..d {
                mean[j] += r[j];
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
    }
    let mut cov = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            let a = r[i] - mean[i];
            for j in 0..d {
                cov[i][j] += a * (r[j] - mean[j]);
            }
        }
    }
    for row in &mut cov {
        for v in row.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    (mean, cov)
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                s += v * v;
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations,
/// swept until the off-diagonal Frobenius norm is below `tol`.
///
/// Eigenvalues come back descending; `vectors[k]` is the unit eigenvector
/// of `values[k]`, signed so its largest-magnitude entry is positive.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigen(a: &[Vec<f64>], tol: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let d = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; d]; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let mut sweeps = 0;
    while off_diagonal_norm(&a) > tol {
        sweeps += 1;
        assert!(sweeps < 100, "jacobi did not converge");
        for p in 0..d {
            for q in p + 1..d {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<f64> = v.iter().map(|row| row[i]).collect();
            let big = col
                .iter()
                .copied()
                .fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if big < 0.0 {
                for x in &mut col {
                    *x = -*x;
                }
            }
            col
        })
        .collect();
    (values, vectors)
}

/// Orthonormalizes `vectors` in order by modified Gram-Schmidt.
pub fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let dot: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
            for (x, y) in w.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm > 1e-10, "dependent vectors");
        for x in &mut w {
            *x /= norm;
        }
        out.push(w);
    }
    out
}

/// Joint and tip positions of a planar chain: each link points along the
/// base direction plus the sum of the angles up to and including its joint.
pub fn planar_chain(origin: [f64; 2], direction: f64, links: &[f64], angles: &[f64]) -> Vec<[f64; 2]> {
    let mut pts = vec![origin];
    let mut heading = direction;
    let mut at = origin;
    for (l, th) in links.iter().zip(angles) {
        heading += th;
        at = [at[0] + l * heading.cos(), at[1] + l * heading.sin()];
        pts.push(at);
    }
    pts
}

/// Sum of squared residuals after projecting centered rows onto the span of
/// the orthonormal `basis`, divided by `n - 1`.
pub fn projection_mse(rows: &[Vec<f64>], mean: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut ss = 0.0;
    for r in rows {
        let c: Vec<f64> = r.iter().zip(mean).map(|(a, m)| a - m).collect();
        let mut approx = vec![0.0; c.len()];
        for b in basis {
            let z: f64 = c.iter().zip(b).map(|(a, b)| a * b).sum();
            for (x, y) in approx.iter_mut().zip(b) {
                *x += z * y;
            }
        }
        ss += c.iter().zip(&approx).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    ss / (rows.len() - 1) as f64
}

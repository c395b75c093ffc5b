use crate::error::Result;
use crate::matrix::Matrix;

/// Householder reduction `a = q h q^T` with `h` upper Hessenberg and `q`
/// orthogonal. Columns that are already reduced are skipped, so Hessenberg
/// input comes back unchanged with `q = I`.
pub fn hessenberg(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = a.require_square("hessenberg")?;
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    if n <= 2 {
        return Ok((h, q));
    }
    let mut v = vec![0.0; n];
    for k in 0..n - 2 {
        let tail: f64 = (k + 2..n).map(|i| h[(i, k)] * h[(i, k)]).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let norm = (x0 * x0 + tail).sqrt();
        let alpha = if x0 > 0.0 { -norm } else { norm };
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = h[(i, k)];
        }
        let vnorm2: f64 = (k + 1..n).map(|i| v[i] * v[i]).sum();
        let beta = 2.0 / vnorm2;

        // h <- (I - beta v v^T) h
        for j in k..n {
            let dot: f64 = (k + 1..n).map(|i| v[i] * h[(i, j)]).sum();
            let f = beta * dot;
            for i in k + 1..n {
                h[(i, j)] -= f * v[i];
            }
        }
        // h <- h (I - beta v v^T), q <- q (I - beta v v^T)
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: f64 = (k + 1..n).map(|j| m[(i, j)] * v[j]).sum();
                let f = beta * dot;
                for j in k + 1..n {
                    m[(i, j)] -= f * v[j];
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    Ok((h, q))
}

//! Eigenvalues of Hermitian matrices via cyclic Jacobi rotations.
//!
//! Self-contained (no external LAPACK), adequate for the small dense
//! matrices this crate works with. Each rotation zeroes one off-diagonal
//! pair exactly; sweeps repeat until the off-diagonal mass is negligible
//! relative to the matrix scale.

use ndarray::Array2;

use super::C64;

/// Eigenvalues of a Hermitian matrix, ascending. The strictly lower
/// triangle is ignored; entries are read from the upper triangle and the
/// real diagonal.
pub fn hermitian_eigenvalues(matrix: &Array2<C64>) -> Vec<f64> {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![matrix[[0, 0]].re];
    }

    let mut a = matrix.clone();
    // Hermitize so the sweep sees a consistent matrix even when the caller
    // passes tiny asymmetries.
    for p in 0..n {
        a[[p, p]] = C64::new(a[[p, p]].re, 0.0);
        for q in (p + 1)..n {
            let avg = (a[[p, q]] + a[[q, p]].conj()) * 0.5;
            a[[p, q]] = avg;
            a[[q, p]] = avg.conj();
        }
    }

    let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let target = 1e-14 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[[p, q]].norm_sqr();
            }
        }
        if off.sqrt() <= target {
            break;
        }

        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a[[p, q]];
                let b = beta.norm();
                if b <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = beta / b;
                let alpha = a[[p, p]].re;
                let gamma = a[[q, q]].re;

                let tau = (gamma - alpha) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Columns p,q of the rotation: (c, −s·e^{−iφ}) and (s·e^{iφ}, c).
                let sp = phase * s;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[[i, p]];
                    let aiq = a[[i, q]];
                    let new_ip = aip * c - aiq * sp.conj();
                    let new_iq = aip * sp + aiq * c;
                    a[[i, p]] = new_ip;
                    a[[p, i]] = new_ip.conj();
                    a[[i, q]] = new_iq;
                    a[[q, i]] = new_iq.conj();
                }
                let app = c * c * alpha + s * s * gamma - 2.0 * c * s * b;
                let aqq = s * s * alpha + c * c * gamma + 2.0 * c * s * b;
                a[[p, p]] = C64::new(app, 0.0);
                a[[q, q]] = C64::new(aqq, 0.0);
                a[[p, q]] = C64::new(0.0, 0.0);
                a[[q, p]] = C64::new(0.0, 0.0);
            }
        }
    }

    let mut eigenvalues: Vec<f64> = (0..n).map(|p| a[[p, p]].re).collect();
    eigenvalues.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eigenvalues
}

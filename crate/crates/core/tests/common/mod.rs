#![allow(dead_code, clippy::needless_range_loop)]

/// Cyclic Jacobi on a dense symmetric matrix; ascending eigenvalues with
/// their eigenvectors as columns `vecs[k]`.
pub fn jacobi(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _ in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j].powi(2))
            .sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (x, y) = (m[k][p], m[k][q]);
                    m[k][p] = c * x - s * y;
                    m[k][q] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (m[p][k], m[q][k]);
                    m[p][k] = c * x - s * y;
                    m[q][k] = s * x + c * y;
                }
                for row in v.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap());
    let vals = order.iter().map(|&k| m[k][k]).collect();
    let vecs = order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect();
    (vals, vecs)
}

/// Periodic chain `-Σ σˣσˣ - h Σ σᶻ` on all `2^N` configurations, bit `k`
/// set meaning site `k` points down.
pub fn full_hamiltonian(n: usize, h: f64) -> Vec<Vec<f64>> {
    let dim = 1usize << n;
    let mut m = vec![vec![0.0; dim]; dim];
    for s in 0..dim {
        let mz: f64 = (0..n).map(|k| if s >> k & 1 == 1 { -1.0 } else { 1.0 }).sum();
        m[s][s] -= h * mz;
        for k in 0..n {
            let t = s ^ (1 << k) ^ (1 << ((k + 1) % n));
            m[t][s] -= 1.0;
        }
    }
    m
}

/// Descending eigenvalues of the reduced density matrix of `sites`.
pub fn rdm_spectrum(psi: &[f64], n: usize, sites: &[usize]) -> Vec<f64> {
    let l = sites.len();
    let mut rho = vec![vec![0.0; 1 << l]; 1 << l];
    let rest: Vec<usize> = (0..n).filter(|k| !sites.contains(k)).collect();
    for env in 0..1usize << rest.len() {
        let base = rest.iter().enumerate().fold(0, |acc, (i, &k)| acc | (env >> i & 1) << k);
        let amp = |a: usize| psi[sites.iter().enumerate().fold(base, |acc, (i, &k)| acc | (a >> i & 1) << k)];
        for a in 0..1 << l {
            for b in 0..1 << l {
                rho[a][b] += amp(a) * amp(b);
            }
        }
    }
    let mut vals = jacobi(&rho).0;
    vals.reverse();
    vals
}

pub fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

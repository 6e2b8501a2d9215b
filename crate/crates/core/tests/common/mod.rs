//! Independent oracles shared by the integration tests.
#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use nalgebra::DMatrix;
use netmatch::Adjacency;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Adjacency {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Adjacency::from_edges(n, &edges).unwrap()
}

/// δ̂ by direct evaluation of the double sum, one pair at a time.
pub fn brute_codegree(d: &Adjacency) -> Vec<Vec<f64>> {
    let n = d.n();
    let nf = n as f64;
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut outer = 0.0;
            for t in 0..n {
                let mut inner = 0.0;
                for s in 0..n {
                    let dts = d.get(t, s) as f64;
                    inner += dts * (d.get(i, s) as f64 - d.get(j, s) as f64);
                }
                let avg = inner / nf;
                outer += avg * avg;
            }
            out[i][j] = (outer / nf).sqrt();
        }
    }
    out
}

/// Composite trapezoid rule on `[0,1]` with panels split at `breaks`.
/// Each node also carries an evaluation point nudged into its panel, so a
/// piecewise-constant integrand is sampled from the correct side of a jump.
pub struct Trapezoid {
    pub eval_at: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Trapezoid {
    pub fn new(total: usize, breaks: &[f64]) -> Self {
        let mut edges = vec![0.0];
        edges.extend_from_slice(breaks);
        edges.push(1.0);
        let (mut eval_at, mut weights) = (Vec::new(), Vec::new());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let m = ((total as f64 * (b - a)).round() as usize).max(2);
            let step = (b - a) / (m - 1) as f64;
            for k in 0..m {
                let x = a + step * k as f64;
                let nudge = 1e-12;
                let x = if k == 0 {
                    (a + nudge).min(b)
                } else if k == m - 1 {
                    (b - nudge).max(a)
                } else {
                    x
                };
                eval_at.push(x);
                weights.push(if k == 0 || k == m - 1 { step / 2.0 } else { step });
            }
        }
        Trapezoid { eval_at, weights }
    }

    pub fn len(&self) -> usize {
        self.eval_at.len()
    }
}

/// The closed forms of the three analytic link functions, coded separately
/// from the library.
pub fn oracle_link(name: &str, x: f64, y: f64) -> f64 {
    match name {
        "blockmodel" => {
            let block = |v: f64| {
                if v <= 1.0 / 3.0 {
                    0
                } else if v <= 2.0 / 3.0 {
                    1
                } else {
                    2
                }
            };
            let linked = matches!((block(x), block(y)), (0, 1) | (0, 2) | (1, 0) | (1, 1) | (2, 0) | (2, 2));
            if linked {
                1.0 / 3.0
            } else {
                0.0
            }
        }
        "beta" => (x + y).exp() / (1.0 + (x + y).exp()),
        "homophily" => 1.0 - (x - y) * (x - y),
        other => panic!("no oracle for {other}"),
    }
}

pub fn breaks_for(name: &str) -> Vec<f64> {
    if name == "blockmodel" {
        vec![1.0 / 3.0, 2.0 / 3.0]
    } else {
        Vec::new()
    }
}

/// `d` and `δ` for every pair of `ws` by trapezoid quadrature with about
/// `total` nodes per dimension.
pub fn trapezoid_distances(name: &str, ws: &[f64], total: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let rule = Trapezoid::new(total, &breaks_for(name));
    let m = rule.len();
    let k = ws.len();
    // profiles[a][s] = f(w_a, s)
    let profiles: Vec<Vec<f64>> = ws
        .iter()
        .map(|&w| rule.eval_at.iter().map(|&s| oracle_link(name, w, s)).collect())
        .collect();
    // codegree[a][t] = Σ_s ω_s f(t, s) f(w_a, s)
    let mut codegree = vec![vec![0.0; m]; k];
    for (t_idx, &t) in rule.eval_at.iter().enumerate() {
        let row: Vec<f64> = rule
            .eval_at
            .iter()
            .zip(&rule.weights)
            .map(|(&s, &ws)| ws * oracle_link(name, t, s))
            .collect();
        for a in 0..k {
            codegree[a][t_idx] = row.iter().zip(&profiles[a]).map(|(r, p)| r * p).sum();
        }
    }
    let l2 = |u: &[f64], v: &[f64]| -> f64 {
        u.iter()
            .zip(v)
            .zip(&rule.weights)
            .map(|((a, b), w)| w * (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let d = DMatrix::from_fn(k, k, |a, b| l2(&profiles[a], &profiles[b]));
    let delta = DMatrix::from_fn(k, k, |a, b| l2(&codegree[a], &codegree[b]));
    (d, delta)
}

/// Logistic regression by iteratively reweighted least squares, solving the
/// normal equations with Gaussian elimination. `rows` excludes the intercept
/// column, which is prepended here.
pub fn irls(rows: &[Vec<f64>], y: &[u8]) -> Vec<f64> {
    let m = rows[0].len() + 1;
    let design: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| std::iter::once(1.0).chain(r.iter().copied()).collect())
        .collect();
    let mut beta = vec![0.0; m];
    for _ in 0..200 {
        let mut a = vec![vec![0.0; m]; m];
        let mut rhs = vec![0.0; m];
        for (z, &yi) in design.iter().zip(y) {
            let eta: f64 = z.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let p = 1.0 / (1.0 + (-eta).exp());
            let w = (p * (1.0 - p)).max(1e-300);
            // working response
            let zr = eta + (yi as f64 - p) / w;
            for r in 0..m {
                rhs[r] += w * z[r] * zr;
                for c in 0..m {
                    a[r][c] += w * z[r] * z[c];
                }
            }
        }
        let next = gauss_solve(a, rhs);
        let change: f64 = next.iter().zip(&beta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        beta = next;
        if change < 1e-14 {
            break;
        }
    }
    beta
}

fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let m = b.len();
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..m {
            let f = a[r][col] / a[col][col];
            for c in col..m {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = (r + 1..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Fixed n=20 logit dataset: one standard normal feature, outcomes from a
/// logit with intercept −0.3 and slope 0.8.
pub fn logit_fixture() -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut r = rng(2020);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    while rows.len() < 20 {
        let x: f64 = rand_distr::Distribution::sample(&rand_distr::StandardNormal, &mut r);
        let u: f64 = r.random();
        let p = 1.0 / (1.0 + (0.3 - 0.8 * x).exp());
        rows.push(vec![x]);
        y.push((u < p) as u8);
    }
    (rows, y)
}

/// Central finite-difference gradient of `f` at `b`.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, b: &[f64], h: f64) -> Vec<f64> {
    (0..b.len())
        .map(|c| {
            let mut up = b.to_vec();
            let mut dn = b.to_vec();
            up[c] += h;
            dn[c] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

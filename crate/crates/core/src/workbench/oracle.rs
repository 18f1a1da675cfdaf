//! Finite-difference cross-check of symbolic Christoffel symbols, Riemann
//! and Ricci tensors.
//!
//! The oracle only evaluates metric components. Derivatives come from
//! central differences in rational arithmetic, the inverse metric from
//! Gauss-Jordan elimination at each stencil point, and curvature from
//! differencing the numeric Christoffel symbols again.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{Connection, CurvatureBundle};
use crate::kernel::{rational_to_f64, EvalMode};
use crate::tensor::{MetricField, TensorField};

pub const DEFAULT_POINTS: usize = 5;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const SEED: u64 = 0x6b65_6e6d_6f74_7375;
const DIGITS: u32 = 48;

/// `k` points in `[1, 3]^dim` on a grid of spacing `1/1000`, from a fixed seed.
pub fn seeded_points(dim: usize, k: usize) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..k)
        .map(|_| {
            (0..dim)
                .map(|_| BigRational::new(BigInt::from(1000 + rng.random_range(0..=2000i64)), BigInt::from(1000)))
                .collect()
        })
        .collect()
}

/// Central-difference step `10⁻⁴`.
pub fn default_step() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10_000))
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub evaluated: usize,
    pub skipped: Vec<String>,
    pub christoffel: BigRational,
    pub riemann: BigRational,
    pub ricci: BigRational,
}

impl OracleOutcome {
    pub fn max_deviation(&self) -> &BigRational {
        [&self.christoffel, &self.riemann, &self.ricci].into_iter().max().expect("nonempty")
    }

    pub fn passed(&self, tolerance: f64) -> bool {
        let tol = BigRational::from_float(tolerance).unwrap_or_else(BigRational::zero);
        self.evaluated > 0 && *self.max_deviation() <= tol
    }
}

/// Formats a deviation for reports.
pub fn format_deviation(d: &BigRational) -> String {
    if d.is_zero() {
        "0".to_string()
    } else {
        format!("{:.3e}", rational_to_f64(d))
    }
}

type Matrix = Vec<Vec<BigRational>>;

struct Sampler<'a> {
    g: &'a TensorField,
    mode: EvalMode,
    approximate: bool,
    step: BigRational,
    dim: usize,
}

impl Sampler<'_> {
    fn round(&self, x: BigRational) -> BigRational {
        if !self.approximate {
            return x;
        }
        let scale = BigRational::from_integer(BigInt::from(10).pow(DIGITS));
        (x * &scale).round() / scale
    }

    fn metric(&self, p: &[BigRational]) -> Option<Matrix> {
        let vals = self.g.evaluate(p, self.mode).ok()?;
        let n = self.dim;
        Some((0..n).map(|i| (0..n).map(|j| self.round(vals[i * n + j].clone())).collect()).collect())
    }

    fn shifted(&self, p: &[BigRational], axis: usize, sign: i32) -> Vec<BigRational> {
        let mut q = p.to_vec();
        if sign > 0 {
            q[axis] += &self.step;
        } else {
            q[axis] -= &self.step;
        }
        q
    }

    /// `Γ^k_{ij}` at `p`, flattened as `[k][i][j]`.
    fn christoffel(&self, p: &[BigRational]) -> Option<Vec<BigRational>> {
        let n = self.dim;
        let g = self.metric(p)?;
        let inv = invert(g)?;
        let two_h = &self.step * BigRational::from_integer(2.into());
        let mut dg: Vec<Matrix> = Vec::with_capacity(n);
        for l in 0..n {
            let plus = self.metric(&self.shifted(p, l, 1))?;
            let minus = self.metric(&self.shifted(p, l, -1))?;
            dg.push((0..n).map(|i| (0..n).map(|j| (&plus[i][j] - &minus[i][j]) / &two_h).collect()).collect());
        }
        let half = BigRational::new(1.into(), 2.into());
        let mut out = vec![BigRational::zero(); n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = BigRational::zero();
                    for l in 0..n {
                        if inv[k][l].is_zero() {
                            continue;
                        }
                        let koszul = &(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j];
                        acc += &inv[k][l] * koszul;
                    }
                    out[(k * n + i) * n + j] = self.round(acc * &half);
                }
            }
        }
        Some(out)
    }
}

fn at(t: &[BigRational], n: usize, k: usize, i: usize, j: usize) -> &BigRational {
    &t[(k * n + i) * n + j]
}

/// Solves `A X = I` exactly; `None` when singular.
fn invert(mut a: Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut inv: Matrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let pv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &pv;
            inv[col][j] = &inv[col][j] / &pv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &a[col][j] * &f;
                a[r][j] -= t;
                let t = &inv[col][j] * &f;
                inv[r][j] -= t;
            }
        }
    }
    Some(inv)
}

fn deviation(symbolic: &BigRational, numeric: &BigRational) -> BigRational {
    let scale = symbolic.abs().max(BigRational::one());
    (symbolic - numeric).abs() / scale
}

fn max_deviation(symbolic: &[BigRational], numeric: &[BigRational]) -> BigRational {
    symbolic.iter().zip(numeric).map(|(s, n)| deviation(s, n)).max().unwrap_or_else(BigRational::zero)
}

/// Compares symbolic `Γ`, `R` and `Ric` against finite differences at each
/// point; points where anything fails to evaluate are skipped.
pub fn run_oracle(
    metric: &MetricField,
    conn: &Connection,
    bundle: &CurvatureBundle,
    points: &[Vec<BigRational>],
    step: &BigRational,
) -> OracleOutcome {
    let g = metric.tensor();
    let n = g.dimension();
    let approximate = g.components().iter().any(|c| c.has_exponentials());
    let mode = if approximate { EvalMode::Approximate { digits: DIGITS + 8 } } else { EvalMode::Exact };
    let sampler = Sampler { g, mode, approximate, step: step.clone(), dim: n };
    let two_h = step * BigRational::from_integer(2.into());
    let mut out = OracleOutcome {
        evaluated: 0,
        skipped: Vec::new(),
        christoffel: BigRational::zero(),
        riemann: BigRational::zero(),
        ricci: BigRational::zero(),
    };
    let label = |p: &[BigRational]| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
    for p in points {
        let skip = |out: &mut OracleOutcome, why: &str| out.skipped.push(format!("point ({}) skipped: {why}", label(p)));
        let Some(gamma) = sampler.christoffel(p) else {
            skip(&mut out, "metric has a pole or is singular near the point");
            continue;
        };
        let mut dgamma: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut ok = true;
        for i in 0..n {
            match (sampler.christoffel(&sampler.shifted(p, i, 1)), sampler.christoffel(&sampler.shifted(p, i, -1))) {
                (Some(a), Some(b)) => dgamma.push(a.iter().zip(&b).map(|(x, y)| (x - y) / &two_h).collect()),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        let symbolic = (
            conn.christoffel().evaluate(p, mode),
            bundle.riemann.evaluate(p, mode),
            bundle.ricci.evaluate(p, mode),
        );
        let (Ok(sg), Ok(sr), Ok(sric)) = symbolic else {
            skip(&mut out, "symbolic tensors have a pole at the point");
            continue;
        };
        if !ok {
            skip(&mut out, "metric has a pole or is singular near the point");
            continue;
        }
        let mut riemann = vec![BigRational::zero(); n * n * n * n];
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let mut acc = at(&dgamma[i], n, l, j, k) - at(&dgamma[j], n, l, i, k);
                        for m in 0..n {
                            acc += at(&gamma, n, l, i, m) * at(&gamma, n, m, j, k);
                            acc -= at(&gamma, n, l, j, m) * at(&gamma, n, m, i, k);
                        }
                        riemann[((l * n + i) * n + j) * n + k] = acc;
                    }
                }
            }
        }
        let ricci: Vec<BigRational> = (0..n * n)
            .map(|jk| (0..n).map(|i| riemann[(i * n + i) * n * n + jk].clone()).fold(BigRational::zero(), |a, b| a + b))
            .collect();
        out.christoffel = out.christoffel.max(max_deviation(&sg, &gamma));
        out.riemann = out.riemann.max(max_deviation(&sr, &riemann));
        out.ricci = out.ricci.max(max_deviation(&sric, &ricci));
        out.evaluated += 1;
    }
    out
}

/// Largest deviation as an `f64`, for display.
pub fn deviation_f64(d: &BigRational) -> f64 {
    d.to_f64().unwrap_or(f64::INFINITY)
}

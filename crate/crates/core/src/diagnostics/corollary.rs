//! Numerical check that a unit-frame derivative component of a
//! non-axisymmetric field differs from `(2m_c-1)!! D^M g` only by a θ-derivative,
//! so the difference averages to zero on every θ-ring.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::theta::Verdict;
use crate::cyltensor::{odd_double_factorial, MultiIndexM};
use crate::grid::AnnulusGrid;

/// `Σ c_k r^k` with integer (possibly negative) powers.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentPoly(pub BTreeMap<i32, f64>);

impl LaurentPoly {
    pub fn new(terms: &[(i32, f64)]) -> Self {
        let mut m = BTreeMap::new();
        for &(k, c) in terms {
            *m.entry(k).or_insert(0.0) += c;
        }
        LaurentPoly(m)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.0.iter().map(|(&k, &c)| c * r.powi(k)).sum()
    }

    pub fn d_r(&self) -> Self {
        LaurentPoly(
            self.0
                .iter()
                .filter(|(&k, _)| k != 0)
                .map(|(&k, &c)| (k - 1, c * k as f64))
                .collect(),
        )
    }

    /// `(1/r) ∂_r`.
    pub fn d_r_over_r(&self) -> Self {
        LaurentPoly(
            self.0
                .iter()
                .filter(|(&k, _)| k != 0)
                .map(|(&k, &c)| (k - 2, c * k as f64))
                .collect(),
        )
    }
}

/// `c · P(r) · trig(k z) · trig(n θ)`; `phase = 0` selects cos and
/// `phase = -π/2` sin.
#[derive(Clone, Debug)]
pub struct AnalyticTerm {
    pub radial: LaurentPoly,
    pub kz: f64,
    pub z_phase: f64,
    pub n_theta: f64,
    pub theta_phase: f64,
}

/// Smooth, θ-periodic field with closed-form `D^M` at fixed θ.
#[derive(Clone, Debug)]
pub struct AnalyticField {
    pub id: &'static str,
    pub terms: Vec<AnalyticTerm>,
}

const COS: f64 = 0.0;
const SIN: f64 = -FRAC_PI_2;

fn term(radial: &[(i32, f64)], kz: f64, z_phase: f64, n: f64, theta_phase: f64) -> AnalyticTerm {
    AnalyticTerm {
        radial: LaurentPoly::new(radial),
        kz,
        z_phase,
        n_theta: n,
        theta_phase,
    }
}

impl AnalyticField {
    pub fn eval(&self, r: f64, theta: f64, z: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.radial.eval(r)
                    * (t.kz * z + t.z_phase).cos()
                    * (t.n_theta * theta + t.theta_phase).cos()
            })
            .sum()
    }

    pub fn eval_cartesian(&self, x: [f64; 3]) -> f64 {
        self.eval(x[0].hypot(x[1]), x[1].atan2(x[0]), x[2])
    }

    /// `∂_z^{m_z} ∂_r^{m_r} ((1/r)∂_r)^{m_c} g` at fixed θ.
    pub fn compound(&self, m: MultiIndexM, r: f64, theta: f64, z: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let mut p = t.radial.clone();
                for _ in 0..m.m_c {
                    p = p.d_r_over_r();
                }
                for _ in 0..m.m_r {
                    p = p.d_r();
                }
                let mz = m.m_z as f64;
                let zpart = t.kz.powi(m.m_z as i32) * (t.kz * z + t.z_phase + mz * FRAC_PI_2).cos();
                p.eval(r) * zpart * (t.n_theta * theta + t.theta_phase).cos()
            })
            .sum()
    }

    pub fn is_axisymmetric(&self) -> bool {
        self.terms.iter().all(|t| t.n_theta == 0.0)
    }

    /// The preset family used by the acceptance run.
    pub fn presets() -> Vec<AnalyticField> {
        vec![
            AnalyticField {
                id: "axisymmetric",
                terms: vec![
                    term(&[(2, 1.0), (4, 0.5), (3, -0.3)], 1.0, COS, 0.0, COS),
                    term(&[(1, 1.0)], 2.0, SIN, 0.0, COS),
                ],
            },
            AnalyticField {
                id: "cos_theta",
                terms: vec![term(&[(3, 1.0), (5, -0.4)], 1.0, COS, 1.0, COS)],
            },
            AnalyticField {
                id: "mixed",
                terms: vec![
                    term(&[(2, 1.0)], 1.0, SIN, 2.0, COS),
                    term(&[(1, 0.7), (-1, 0.2)], 2.0, COS, 1.0, SIN),
                    term(&[(3, 0.5)], 0.0, COS, 3.0, COS),
                    term(&[(0, 1.0)], 1.0, COS, 0.0, COS),
                ],
            },
        ]
    }
}

/// Eighth-order central first-derivative weights at offsets `±1..±4`.
const W8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// Nested central differences along the fixed directions `dirs`.
fn directional(f: &AnalyticField, dirs: &[[f64; 3]], x: [f64; 3], h: f64) -> f64 {
    let Some((d, rest)) = dirs.split_first() else {
        return f.eval_cartesian(x);
    };
    let mut acc = 0.0;
    for (k, w) in W8.iter().enumerate() {
        let s = (k + 1) as f64 * h;
        let plus = [x[0] + s * d[0], x[1] + s * d[1], x[2] + s * d[2]];
        let minus = [x[0] - s * d[0], x[1] - s * d[1], x[2] - s * d[2]];
        acc += w * (directional(f, rest, plus, h) - directional(f, rest, minus, h));
    }
    acc / h
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryCheck {
    pub preset: String,
    pub m: MultiIndexM,
    pub samples: usize,
    pub rejected: usize,
    pub n_theta: usize,
    pub step: f64,
    /// Largest `|θ-average of remainder|` over sampled rings.
    pub max_ring_average: f64,
    /// Largest pointwise `|remainder|`, for scale.
    pub max_pointwise: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Samples `samples` rings `(r, z)` in the annulus, evaluates the frozen
/// unit-frame component for the index pattern `(θ^{2m_c}, r^{m_r}, z^{m_z})`
/// by nested central differences, subtracts `(2m_c-1)!! D^M g`, and checks
/// the θ-average of the remainder against `tolerance`. Rings whose stencil
/// would leave the annulus are redrawn.
pub fn corollary_theta_average_check(
    g: &AnalyticField,
    m: MultiIndexM,
    domain: &AnnulusGrid,
    samples: usize,
    seed: u64,
    tolerance: f64,
) -> CorollaryCheck {
    let n_theta = 16;
    let step = 0.02;
    let order = m.weight() as usize;
    let reach = 4.0 * step * order as f64;
    let coeff = odd_double_factorial(m.m_c) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut rejected, mut worst_avg, mut worst_pt) = (0usize, 0.0f64, 0.0f64);
    let mut taken = 0;
    while taken < samples {
        let r = rng.gen_range(domain.r0..domain.r1);
        let z = rng.gen_range(0.0..domain.lz);
        if r - reach < domain.r0 || r + reach > domain.r1 {
            rejected += 1;
            continue;
        }
        taken += 1;
        let mut avg = 0.0;
        for k in 0..n_theta {
            let th = 2.0 * PI * k as f64 / n_theta as f64;
            let (c, s) = (th.cos(), th.sin());
            let (er, et, ez) = ([c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]);
            let mut dirs = Vec::with_capacity(order);
            dirs.extend(std::iter::repeat_n(et, 2 * m.m_c as usize));
            dirs.extend(std::iter::repeat_n(er, m.m_r as usize));
            dirs.extend(std::iter::repeat_n(ez, m.m_z as usize));
            let x = [r * c, r * s, z];
            let component = directional(g, &dirs, x, step);
            let remainder = component - coeff * g.compound(m, r, th, z);
            worst_pt = worst_pt.max(remainder.abs());
            avg += remainder;
        }
        avg /= n_theta as f64;
        worst_avg = worst_avg.max(avg.abs());
    }
    CorollaryCheck {
        preset: g.id.to_string(),
        m,
        samples,
        rejected,
        n_theta,
        step,
        max_ring_average: worst_avg,
        max_pointwise: worst_pt,
        tolerance,
        verdict: Verdict::from_bool(worst_avg <= tolerance),
    }
}

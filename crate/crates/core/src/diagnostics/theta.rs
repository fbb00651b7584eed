//! Quadrature of `∫ ∂_θ f · g dx` for θ-periodic `f` and axisymmetric `g`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::grid::AnnulusGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

pub type AxiField = fn(f64, f64) -> f64;

/// `f(r, z, θ) = φ(r, z) · Σ_n (a_n cos nθ + b_n sin nθ)`.
#[derive(Clone, Debug)]
pub struct ThetaField {
    pub id: &'static str,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    pub phi: AxiField,
}

impl ThetaField {
    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len()).saturating_sub(1)
    }

    fn angular(&self, theta: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(n, a)| a * (n as f64 * theta).cos())
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .enumerate()
            .map(|(n, b)| b * (n as f64 * theta).sin())
            .sum();
        c + s
    }

    fn angular_dtheta(&self, theta: f64) -> f64 {
        let c: f64 = self
            .cos
            .iter()
            .enumerate()
            .map(|(n, a)| -a * n as f64 * (n as f64 * theta).sin())
            .sum();
        let s: f64 = self
            .sin
            .iter()
            .enumerate()
            .map(|(n, b)| b * n as f64 * (n as f64 * theta).cos())
            .sum();
        c + s
    }

    pub fn eval(&self, r: f64, z: f64, theta: f64) -> f64 {
        (self.phi)(r, z) * self.angular(theta)
    }

    pub fn dtheta(&self, r: f64, z: f64, theta: f64) -> f64 {
        (self.phi)(r, z) * self.angular_dtheta(theta)
    }
}

/// Trigonometric-polynomial test fields paired with axisymmetric partners.
pub fn theta_presets() -> Vec<(ThetaField, AxiField)> {
    fn bump(r: f64, z: f64) -> f64 {
        (r * r + 0.5) * (z.cos() + 1.5)
    }
    fn wavy(r: f64, z: f64) -> f64 {
        r.powi(3) * (2.0 * z).sin() + r
    }
    fn partner_a(r: f64, z: f64) -> f64 {
        1.0 + r * z.sin()
    }
    fn partner_b(r: f64, z: f64) -> f64 {
        (r - 0.2).powi(2) * (z + 0.3).cos() + 0.1
    }
    vec![
        (
            ThetaField {
                id: "cos",
                cos: vec![0.0, 1.0],
                sin: vec![],
                phi: bump,
            },
            partner_a as AxiField,
        ),
        (
            ThetaField {
                id: "theta_free",
                cos: vec![1.0],
                sin: vec![],
                phi: wavy,
            },
            partner_b,
        ),
        (
            ThetaField {
                id: "cos_squared",
                cos: vec![0.5, 0.0, 0.5],
                sin: vec![],
                phi: bump,
            },
            partner_b,
        ),
        (
            ThetaField {
                id: "mixed_degree5",
                cos: vec![0.3, -1.0, 0.0, 0.2],
                sin: vec![0.0, 0.0, 0.7, 0.0, 0.0, -0.4],
                phi: wavy,
            },
            partner_a,
        ),
    ]
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (t * p - p0) / (t * t - 1.0);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaCancellationProbe {
    pub family: String,
    pub n_r: usize,
    pub n_z: usize,
    pub n_theta: usize,
    pub integral: f64,
    /// `‖f‖ ‖g‖` over the same quadrature.
    pub scale: f64,
    pub verdict: Verdict,
}

/// Tensor-product quadrature (Gauss-Legendre in r, trapezoid in z and θ)
/// of `∫ ∂_θ f · g r dr dθ dz` over the annulus; passes when
/// `|I| <= 1e-10 ‖f‖ ‖g‖`. `n_theta` is raised to at least 16.
pub fn theta_cancellation_check(
    f: &ThetaField,
    g: AxiField,
    domain: &AnnulusGrid,
    n_r: usize,
    n_z: usize,
    n_theta: usize,
) -> ThetaCancellationProbe {
    let n_theta = n_theta.max(16);
    let (xs, ws) = gauss_legendre(n_r);
    let half = 0.5 * (domain.r1 - domain.r0);
    let mid = 0.5 * (domain.r1 + domain.r0);
    let (dz, dth) = (domain.lz / n_z as f64, 2.0 * PI / n_theta as f64);
    let (mut integral, mut ff, mut gg) = (0.0, 0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        let r = mid + half * x;
        let wr = w * half * r;
        for jz in 0..n_z {
            let z = jz as f64 * dz;
            let gv = g(r, z);
            for k in 0..n_theta {
                let th = k as f64 * dth;
                let wt = wr * dz * dth;
                integral += wt * f.dtheta(r, z, th) * gv;
                ff += wt * f.eval(r, z, th).powi(2);
                gg += wt * gv * gv;
            }
        }
    }
    let scale = ff.sqrt() * gg.sqrt();
    ThetaCancellationProbe {
        family: f.id.to_string(),
        n_r,
        n_z,
        n_theta,
        integral,
        scale,
        verdict: Verdict::from_bool(integral.abs() <= 1e-10 * scale),
    }
}

//! su(2) dynamical-invariant machinery: auxiliary angles, the field equations
//! mapping (alpha, beta) onto drive fields, Lewis–Riesenfeld phases, invariant
//! eigenstates, and a propagation-based invariance check.
//!
//! Conventions: H = (Delta/2) sigma_z - (epsilon/2) sigma_x, i.e. the su(2)
//! components are h = (-epsilon, 0, Delta).  The invariant vector is
//! I = (1/2)(-cos a, sin a sin b, sin a cos b); with a = pi and
//! b = -pi/2 + asin H(t) the drive reduces to epsilon = b_dot and Delta = 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{QifError, Result};
use crate::filter::ImpulseResponse;
use crate::grid;
use crate::interp::Pchip;

/// How the kernel maps onto the auxiliary angle beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AuxMode {
    /// beta = -pi/2 + asin(H): the response kernel is exactly H.
    #[default]
    ExactArcsin,
    /// beta = -pi/2 + H: the response kernel becomes sin(H).
    Simplified,
}

/// Sampled auxiliary angles and their time derivatives on a uniform grid.
#[derive(Debug, Clone)]
pub struct AuxiliaryFields {
    dt: f64,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha_dot: Vec<f64>,
    pub beta_dot: Vec<f64>,
    pub mode: AuxMode,
}

const ALPHA_PI_TOL: f64 = 1e-12;

impl AuxiliaryFields {
    /// Build from explicit profiles. No boundary conditions are enforced;
    /// call [`check_boundary_conditions`](Self::check_boundary_conditions)
    /// when they matter.
    pub fn from_profiles(
        duration: f64,
        n: usize,
        alpha: impl Fn(f64) -> f64,
        alpha_dot: impl Fn(f64) -> f64,
        beta: impl Fn(f64) -> f64,
        beta_dot: impl Fn(f64) -> f64,
        mode: AuxMode,
    ) -> Self {
        assert!(n >= 2 && duration > 0.0);
        let dt = duration / (n - 1) as f64;
        let ts = grid::uniform(0.0, dt, n);
        AuxiliaryFields {
            dt,
            alpha: ts.iter().map(|&t| alpha(t)).collect(),
            alpha_dot: ts.iter().map(|&t| alpha_dot(t)).collect(),
            beta: ts.iter().map(|&t| beta(t)).collect(),
            beta_dot: ts.iter().map(|&t| beta_dot(t)).collect(),
            mode,
        }
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.len() - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        grid::uniform(0.0, self.dt, self.len())
    }

    /// True when alpha is held at pi with vanishing derivative everywhere.
    pub fn is_alpha_pi(&self) -> bool {
        self.alpha.iter().all(|&a| (a - PI).abs() <= ALPHA_PI_TOL)
            && self.alpha_dot.iter().all(|&d| d.abs() <= ALPHA_PI_TOL)
    }

    /// Frictionless endpoint conditions: alpha(0)=alpha(tf)=pi,
    /// beta(0)=beta(tf)=-pi/2, alpha_dot(0)=alpha_dot(tf)=0.
    pub fn check_boundary_conditions(&self, tol: f64) -> Result<()> {
        let n = self.len();
        let checks = [
            (self.alpha[0] - PI, "alpha(0) != pi"),
            (self.alpha[n - 1] - PI, "alpha(t_f) != pi"),
            (self.beta[0] + FRAC_PI_2, "beta(0) != -pi/2"),
            (self.beta[n - 1] + FRAC_PI_2, "beta(t_f) != -pi/2"),
            (self.alpha_dot[0], "alpha_dot(0) != 0"),
            (self.alpha_dot[n - 1], "alpha_dot(t_f) != 0"),
        ];
        for (v, what) in checks {
            if v.abs() > tol {
                return Err(QifError::config(format!(
                    "boundary condition violated: {what} (off by {v:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Effective response kernel cos(beta(t)); equals H in exact-arcsin mode
    /// and sin(H) in simplified mode.
    pub fn effective_kernel(&self) -> Vec<f64> {
        self.beta.iter().map(|b| b.cos()).collect()
    }
}

/// Map a filter kernel onto auxiliary angles with alpha held at pi.
pub fn aux_from_impulse(h: &ImpulseResponse, mode: AuxMode) -> Result<AuxiliaryFields> {
    if mode == AuxMode::ExactArcsin {
        if let Some(bad) = h.samples().iter().find(|s| s.abs() >= 1.0) {
            return Err(QifError::config(format!(
                "kernel amplitude {bad} is outside (-1,1); arcsin mapping undefined"
            )));
        }
    }
    let n = h.samples().len();
    let interp = h.interpolant();
    let dt = h.dt();
    let mut beta = Vec::with_capacity(n);
    let mut beta_dot = Vec::with_capacity(n);
    for (k, &s) in h.samples().iter().enumerate() {
        let hdot = interp.deriv(k as f64 * dt);
        match mode {
            AuxMode::ExactArcsin => {
                beta.push(-FRAC_PI_2 + s.asin());
                beta_dot.push(hdot / (1.0 - s * s).sqrt());
            }
            AuxMode::Simplified => {
                beta.push(-FRAC_PI_2 + s);
                beta_dot.push(hdot);
            }
        }
    }
    Ok(AuxiliaryFields {
        dt,
        alpha: vec![PI; n],
        alpha_dot: vec![0.0; n],
        beta,
        beta_dot,
        mode,
    })
}

/// Sampled drive fields epsilon(t), Delta(t) on a uniform grid.
#[derive(Debug, Clone)]
pub struct ControlFields {
    dt: f64,
    pub epsilon: Vec<f64>,
    pub delta: Vec<f64>,
}

impl ControlFields {
    pub fn new(dt: f64, epsilon: Vec<f64>, delta: Vec<f64>) -> Result<Self> {
        if epsilon.len() != delta.len() || epsilon.len() < 2 {
            return Err(QifError::config("field arrays must match and have >= 2 samples"));
        }
        if !(dt > 0.0) {
            return Err(QifError::config("field grid step must be positive"));
        }
        if !grid::all_finite(&epsilon) || !grid::all_finite(&delta) {
            return Err(QifError::config("field samples must be finite"));
        }
        Ok(ControlFields { dt, epsilon, delta })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.epsilon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilon.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.dt * (self.len() - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        grid::uniform(0.0, self.dt, self.len())
    }

    pub fn epsilon_interpolant(&self) -> Pchip {
        Pchip::from_uniform(0.0, self.dt, &self.epsilon)
    }

    pub fn delta_interpolant(&self) -> Pchip {
        Pchip::from_uniform(0.0, self.dt, &self.delta)
    }

    /// Uniformly scaled drive amplitudes (models miscalibration).
    pub fn scaled(&self, s: f64) -> ControlFields {
        ControlFields {
            dt: self.dt,
            epsilon: self.epsilon.iter().map(|e| s * e).collect(),
            delta: self.delta.iter().map(|d| s * d).collect(),
        }
    }

    /// CSV export, columns `t_us,epsilon_rad_per_us,delta_rad_per_us`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_us,epsilon_rad_per_us,delta_rad_per_us\n");
        for (k, (e, d)) in self.epsilon.iter().zip(&self.delta).enumerate() {
            out.push_str(&format!("{},{},{}\n", k as f64 * self.dt, e, d));
        }
        out
    }
}

const SINGULAR_TOL: f64 = 1e-12;

/// Field equations: epsilon = beta_dot - alpha_dot/(tan a tan b),
/// Delta = -alpha_dot/sin b.  Zero numerators win over singular denominators;
/// a singular denominator with a live numerator is an error.
pub fn fields_from_aux(aux: &AuxiliaryFields) -> Result<ControlFields> {
    let n = aux.len();
    let mut epsilon = Vec::with_capacity(n);
    let mut delta = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b, ad, bd) = (aux.alpha[k], aux.beta[k], aux.alpha_dot[k], aux.beta_dot[k]);
        let t = k as f64 * aux.dt();
        if ad.abs() <= SINGULAR_TOL {
            epsilon.push(bd);
            delta.push(0.0);
            continue;
        }
        let denom = a.tan() * b.tan();
        if denom.abs() <= SINGULAR_TOL {
            return Err(QifError::numerical(format!(
                "field equation singular at t = {t} us (tan(alpha) tan(beta) ~ 0 with alpha_dot != 0)"
            )));
        }
        let sb = b.sin();
        if sb.abs() <= SINGULAR_TOL {
            return Err(QifError::numerical(format!(
                "field equation singular at t = {t} us (sin(beta) ~ 0 with alpha_dot != 0)"
            )));
        }
        let e = bd - ad / denom;
        let d = -ad / sb;
        if !e.is_finite() || !d.is_finite() {
            return Err(QifError::numerical(format!(
                "non-finite field sample at t = {t} us"
            )));
        }
        epsilon.push(e);
        delta.push(d);
    }
    ControlFields::new(aux.dt(), epsilon, delta)
}

/// Kernel design to drive fields in one step.
pub fn fields_from_impulse(h: &ImpulseResponse, mode: AuxMode) -> Result<ControlFields> {
    fields_from_aux(&aux_from_impulse(h, mode)?)
}

/// The invariant vector I(t) = (1/2)(-cos a, sin a sin b, sin a cos b).
#[derive(Debug, Clone)]
pub struct InvariantVector {
    pub i1: Vec<f64>,
    pub i2: Vec<f64>,
    pub i3: Vec<f64>,
    dt: f64,
}

impl InvariantVector {
    pub fn from_aux(aux: &AuxiliaryFields) -> Self {
        let n = aux.len();
        let mut i1 = Vec::with_capacity(n);
        let mut i2 = Vec::with_capacity(n);
        let mut i3 = Vec::with_capacity(n);
        for k in 0..n {
            let (a, b) = (aux.alpha[k], aux.beta[k]);
            i1.push(-0.5 * a.cos());
            i2.push(0.5 * a.sin() * b.sin());
            i3.push(0.5 * a.sin() * b.cos());
        }
        InvariantVector {
            i1,
            i2,
            i3,
            dt: aux.dt(),
        }
    }

    pub fn len(&self) -> usize {
        self.i1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i1.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn at(&self, k: usize) -> [f64; 3] {
        [self.i1[k], self.i2[k], self.i3[k]]
    }

    pub fn norm_at(&self, k: usize) -> f64 {
        let v = self.at(k);
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }
}

/// Lewis–Riesenfeld phases of the two invariant eigenstates, phi(0) = 0.
#[derive(Debug, Clone)]
pub struct LRPhase {
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
}

impl LRPhase {
    pub fn delta_phi(&self) -> Vec<f64> {
        self.phi_plus
            .iter()
            .zip(&self.phi_minus)
            .map(|(p, m)| p - m)
            .collect()
    }
}

/// Cumulative LR phases. With alpha held at pi the rate is exactly
/// +/- beta_dot/2 and the integral is taken in closed form; the general case
/// integrates the su(2) rate expression with a cumulative trapezoid.
pub fn lr_phase(aux: &AuxiliaryFields, fields: &ControlFields) -> Result<LRPhase> {
    if fields.len() != aux.len() {
        return Err(QifError::config("aux and field grids differ"));
    }
    let n = aux.len();
    if aux.is_alpha_pi() {
        let b0 = aux.beta[0];
        let phi_plus: Vec<f64> = aux.beta.iter().map(|b| 0.5 * (b - b0)).collect();
        let phi_minus: Vec<f64> = phi_plus.iter().map(|p| -p).collect();
        return Ok(LRPhase {
            phi_plus,
            phi_minus,
        });
    }
    let mut rate_plus = Vec::with_capacity(n);
    let mut rate_minus = Vec::with_capacity(n);
    for k in 0..n {
        let (a, b, ad, bd) = (aux.alpha[k], aux.beta[k], aux.alpha_dot[k], aux.beta_dot[k]);
        let (sa, ca, sb, cb) = (a.sin(), a.cos(), b.sin(), b.cos());
        // unit-norm invariant components and their time derivatives
        let nvec = [-ca, sa * sb, sa * cb];
        let ndot = [
            sa * ad,
            ca * ad * sb + sa * cb * bd,
            ca * ad * cb - sa * sb * bd,
        ];
        let h = [-fields.epsilon[k], 0.0, fields.delta[k]];
        let hdotn = h[0] * nvec[0] + h[1] * nvec[1] + h[2] * nvec[2];
        let curl = nvec[0] * ndot[1] - nvec[1] * ndot[0];
        for (sign, out) in [(1.0, &mut rate_plus), (-1.0, &mut rate_minus)] {
            let denom = 1.0 - sign * nvec[2];
            if denom.abs() < 1e-9 {
                return Err(QifError::numerical(format!(
                    "LR phase rate singular at sample {k} (invariant aligned with z)"
                )));
            }
            out.push(curl / (2.0 * denom) - sign * 0.5 * hdotn);
        }
    }
    Ok(LRPhase {
        phi_plus: grid::cumtrapz_uniform(&rate_plus, aux.dt()),
        phi_minus: grid::cumtrapz_uniform(&rate_minus, aux.dt()),
    })
}

/// Normalized eigenvectors of I = I_vec . sigma at one grid index, as
/// (plus, minus) amplitude pairs in the computational basis.
pub fn eigenstates(iv: &InvariantVector, k: usize) -> Result<([Complex64; 2], [Complex64; 2])> {
    let v = iv.at(k);
    let norm = iv.norm_at(k);
    if norm <= 0.0 {
        return Err(QifError::numerical("invariant vector vanishes"));
    }
    let n1 = v[0] / norm;
    let n2 = v[1] / norm;
    let n3 = v[2] / norm;
    if (1.0 - n3.abs()) < 1e-12 {
        return Err(QifError::numerical(
            "invariant aligned with z: eigenvector parametrization is singular",
        ));
    }
    let off = Complex64::new(n1, -n2);
    let plus = [
        off / (2.0 * (1.0 - n3)).sqrt(),
        Complex64::new(((1.0 - n3) / 2.0).sqrt(), 0.0),
    ];
    let minus = [
        -off / (2.0 * (1.0 + n3)).sqrt(),
        Complex64::new(((1.0 + n3) / 2.0).sqrt(), 0.0),
    ];
    Ok((plus, minus))
}

/// Outcome of integrating I_dot = I x h against the analytic parametrization.
#[derive(Debug, Clone, Copy)]
pub struct InvariantReport {
    /// max_t || I_numeric(t) - I_parametrized(t) ||
    pub max_deviation: f64,
    /// max_t | ||I_numeric(t)|| - ||I(0)|| |
    pub max_norm_drift: f64,
    /// || I_numeric(t_f) - I_numeric(0) ||
    pub endpoint_deviation: f64,
}

/// Integrate the invariant equation of motion I_dot = h x I (the rotation
/// the commutator with H = h.sigma/2 generates) with midpoint-sampled exact
/// rotations, and compare with the analytic parametrization.
pub fn verify_invariant(fields: &ControlFields, iv: &InvariantVector) -> Result<InvariantReport> {
    if fields.len() != iv.len() {
        return Err(QifError::config("field and invariant grids differ"));
    }
    let n = fields.len();
    let dt = fields.dt();
    let mut v = iv.at(0);
    let norm0 = iv.norm_at(0);
    let mut max_dev: f64 = 0.0;
    let mut max_drift: f64 = 0.0;
    for k in 0..n - 1 {
        let hx = -0.5 * (fields.epsilon[k] + fields.epsilon[k + 1]);
        let hz = 0.5 * (fields.delta[k] + fields.delta[k + 1]);
        let axis = [hx, 0.0, hz];
        let speed = (axis[0] * axis[0] + axis[2] * axis[2]).sqrt();
        if speed > 0.0 {
            let ux = axis[0] / speed;
            let uz = axis[2] / speed;
            v = rotate_about([ux, 0.0, uz], speed * dt, v);
        }
        let p = iv.at(k + 1);
        let dev = ((v[0] - p[0]).powi(2) + (v[1] - p[1]).powi(2) + (v[2] - p[2]).powi(2)).sqrt();
        max_dev = max_dev.max(dev);
        let nrm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        max_drift = max_drift.max((nrm - norm0).abs());
    }
    let start = iv.at(0);
    let endpoint =
        ((v[0] - start[0]).powi(2) + (v[1] - start[1]).powi(2) + (v[2] - start[2]).powi(2)).sqrt();
    Ok(InvariantReport {
        max_deviation: max_dev,
        max_norm_drift: max_drift,
        endpoint_deviation: endpoint,
    })
}

fn rotate_about(u: [f64; 3], angle: f64, v: [f64; 3]) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    [
        v[0] * c + cross[0] * s + u[0] * dot * (1.0 - c),
        v[1] * c + cross[1] * s + u[1] * dot * (1.0 - c),
        v[2] * c + cross[2] * s + u[2] * dot * (1.0 - c),
    ]
}

//! Shape-preserving monotone cubic interpolation (PCHIP) on uniform grids.
//!
//! Monotone between knots, so an interpolated kernel never overshoots its
//! samples; this is what keeps |H(t)| < 1 between grid points.

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes.
#[derive(Debug, Clone)]
pub struct Pchip {
    t0: f64,
    dt: f64,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Pchip {
    /// Build from samples on the uniform grid `t0 + k*dt`. Needs >= 2 samples.
    pub fn from_uniform(t0: f64, dt: f64, y: &[f64]) -> Self {
        assert!(y.len() >= 2, "pchip needs at least two samples");
        assert!(dt > 0.0);
        let n = y.len();
        let sec: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / dt).collect();
        let mut m = vec![0.0; n];
        if n == 2 {
            m[0] = sec[0];
            m[1] = sec[0];
        } else {
            for k in 1..n - 1 {
                let (d0, d1) = (sec[k - 1], sec[k]);
                m[k] = if d0 * d1 <= 0.0 {
                    0.0
                } else {
                    // harmonic mean (Fritsch–Carlson weights, uniform spacing)
                    2.0 * d0 * d1 / (d0 + d1)
                };
            }
            m[0] = edge_slope(sec[0], sec[1]);
            m[n - 1] = edge_slope(sec[n - 2], sec[n - 3]);
        }
        Pchip {
            t0,
            dt,
            y: y.to_vec(),
            m,
        }
    }

    pub fn start(&self) -> f64 {
        self.t0
    }

    pub fn end(&self) -> f64 {
        self.t0 + self.dt * (self.y.len() - 1) as f64
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        // clamp to the grid; callers wanting compact support handle that above
        let n = self.y.len();
        let s = (t - self.t0) / self.dt;
        if s <= 0.0 {
            return (0, 0.0);
        }
        let k = (s.floor() as usize).min(n - 2);
        ((k), (s - k as f64).clamp(0.0, 1.0))
    }

    /// Interpolated value; `t` outside the grid clamps to the endpoints.
    pub fn eval(&self, t: f64) -> f64 {
        let (k, u) = self.locate(t);
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.m[k] * self.dt, self.m[k + 1] * self.dt);
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
    }

    /// Derivative of the interpolant; clamped like [`eval`](Self::eval).
    pub fn deriv(&self, t: f64) -> f64 {
        let (k, u) = self.locate(t);
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        let u2 = u * u;
        let dh00 = (6.0 * u2 - 6.0 * u) / self.dt;
        let dh10 = 3.0 * u2 - 4.0 * u + 1.0;
        let dh01 = (-6.0 * u2 + 6.0 * u) / self.dt;
        let dh11 = 3.0 * u2 - 2.0 * u;
        dh00 * y0 + dh10 * m0 + dh01 * y1 + dh11 * m1
    }

    /// Knot slopes (rad-units per time unit of the grid).
    pub fn knot_slopes(&self) -> &[f64] {
        &self.m
    }
}

fn edge_slope(d_adjacent: f64, d_next: f64) -> f64 {
    let d = 1.5 * d_adjacent - 0.5 * d_next;
    if d * d_adjacent <= 0.0 {
        0.0
    } else if d_adjacent * d_next < 0.0 && d.abs() > 3.0 * d_adjacent.abs() {
        3.0 * d_adjacent
    } else {
        d
    }
}

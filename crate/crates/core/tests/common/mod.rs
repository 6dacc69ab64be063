//! Reference implementations used only by tests. Nothing here calls the
//! library's field or integrator code.
#![allow(dead_code, clippy::excessive_precision)]

use meic::magnetodynamics::MagnetParams;

pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
pub const KB: f64 = 1.380649e-23;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Recursive Gauss-Kronrod 7/15 quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth > 30 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol, depth + 1) + rec(f, m, b, tol, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// Demagnetizing factor along edge `c` of an `a x b x c` prism, from a
/// one-dimensional reduction of the surface-charge interaction integral.
pub fn demag_oracle(a: f64, b: f64, c: f64) -> f64 {
    let g = |u: f64, d: f64| {
        let w = u.hypot(d);
        b * (b / w).asinh() - (b * b + w * w).sqrt() + w
    };
    // u = a s^2 tames the logarithmic singularity at u = 0.
    let f = |s: f64| {
        let u = a * s * s;
        2.0 * a * s * (a - u) * (g(u, 0.0) - g(u, c))
    };
    let scale = a * b * c;
    4.0 * integrate(&f, 0.0, 1.0, 1e-17 * scale) / (2.0 * std::f64::consts::PI * scale)
}

/// (Nxx, Nyy, Nzz) for edges along x, y, z.
pub fn demag_triplet(lx: f64, ly: f64, lz: f64) -> [f64; 3] {
    [demag_oracle(ly, lz, lx), demag_oracle(lz, lx, ly), demag_oracle(lx, ly, lz)]
}

pub type V3 = [f64; 3];

pub fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

pub fn angle(a: V3, b: V3) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Deterministic macrospin model written out from the physics.
pub struct Oracle {
    pub n: [f64; 3],
    pub ms: f64,
    pub alpha: f64,
    pub gamma_b: f64,
    pub h_int: f64,
    pub h_me_per_v: f64,
}

impl Oracle {
    pub fn new(p: &MagnetParams<f64>) -> Self {
        Self {
            n: demag_triplet(p.length, p.width, p.thickness),
            ms: p.ms,
            alpha: p.alpha,
            gamma_b: p.gamma * MU0,
            h_int: 2.0 * p.ki / (MU0 * p.ms * p.thickness),
            h_me_per_v: p.alpha_me / (p.t_me * MU0),
        }
    }

    pub fn field(&self, m: V3, v: f64) -> V3 {
        [
            -self.ms * self.n[0] * m[0] + self.h_me_per_v * v,
            -self.ms * self.n[1] * m[1],
            -self.ms * self.n[2] * m[2] + self.h_int * m[2],
        ]
    }

    pub fn rhs(&self, m: V3, v: f64) -> V3 {
        let h = self.field(m, v);
        let mxh = cross(m, h);
        let mxmxh = cross(m, mxh);
        let k = -self.gamma_b / (1.0 + self.alpha * self.alpha);
        [
            k * (mxh[0] + self.alpha * mxmxh[0]),
            k * (mxh[1] + self.alpha * mxmxh[1]),
            k * (mxh[2] + self.alpha * mxmxh[2]),
        ]
    }

    /// Classical RK4 at constant voltage, returning m at every multiple of `sample`.
    pub fn rk4(&self, m0: V3, v: f64, dt: f64, duration: f64, sample: f64) -> Vec<V3> {
        let steps = (duration / dt).round() as usize;
        let stride = (sample / dt).round() as usize;
        let mut m = m0;
        let mut out = vec![m];
        let add = |a: V3, b: V3, s: f64| [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]];
        for k in 1..=steps {
            let k1 = self.rhs(m, v);
            let k2 = self.rhs(add(m, k1, 0.5 * dt), v);
            let k3 = self.rhs(add(m, k2, 0.5 * dt), v);
            let k4 = self.rhs(add(m, k3, dt), v);
            for i in 0..3 {
                m[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            let n = norm(m);
            m = [m[0] / n, m[1] / n, m[2] / n];
            if k % stride == 0 {
                out.push(m);
            }
        }
        out
    }
}

/// Thermal field standard deviation per component for one step.
pub fn thermal_sigma_oracle(p: &MagnetParams<f64>, dt: f64) -> f64 {
    let v = p.length * p.width * p.thickness;
    (2.0 * p.alpha * KB * p.temperature / (p.gamma * MU0 * MU0 * p.ms * v * dt)).sqrt()
}

/// Initial state used for zero-temperature runs: -x tilted 1 degree toward +z.
pub fn tilted_minus_x() -> V3 {
    let t = 1.0_f64.to_radians();
    [-t.cos(), 0.0, t.sin()]
}

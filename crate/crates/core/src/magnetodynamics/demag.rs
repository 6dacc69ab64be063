use crate::error::{ensure_positive, Result};
use crate::scalar::Scalar;

/// Diagonal demagnetizing tensor of a uniformly magnetized rectangular prism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DemagFactors<T> {
    pub nxx: T,
    pub nyy: T,
    pub nzz: T,
}

impl<T: Scalar> DemagFactors<T> {
    pub fn sum(&self) -> T {
        self.nxx + self.nyy + self.nzz
    }

    pub fn as_vec3(&self) -> crate::vec3::Vec3<T> {
        crate::vec3::Vec3::new(self.nxx, self.nyy, self.nzz)
    }
}

/// Demagnetizing factors of a prism with edges `lx`, `ly`, `lz` (any length unit)
/// from Aharoni's closed form.
pub fn demag_factors<T: Scalar>(lx: T, ly: T, lz: T) -> Result<DemagFactors<T>> {
    ensure_positive("geometry.lx", lx.to_f64_lossy())?;
    ensure_positive("geometry.ly", ly.to_f64_lossy())?;
    ensure_positive("geometry.lz", lz.to_f64_lossy())?;
    // Scale out the absolute size; factors are dimensionless and the cubic
    // terms below overflow f32 for SI lengths squared.
    let s = lx.max(ly).max(lz);
    let (lx, ly, lz) = (lx / s, ly / s, lz / s);
    Ok(DemagFactors {
        nxx: axial_factor(ly, lz, lx),
        nyy: axial_factor(lz, lx, ly),
        nzz: axial_factor(lx, ly, lz),
    })
}

/// Factor along the edge `c_full`, with `a_full` and `b_full` the transverse edges.
fn axial_factor<T: Scalar>(a_full: T, b_full: T, c_full: T) -> T {
    let half = T::lit(0.5);
    let (a, b, c) = (a_full * half, b_full * half, c_full * half);
    let two = T::lit(2.0);
    let three = T::lit(3.0);

    let (a2, b2, c2) = (a * a, b * b, c * c);
    let r = (a2 + b2 + c2).sqrt();
    let rab = (a2 + b2).sqrt();
    let rbc = (b2 + c2).sqrt();
    let rac = (a2 + c2).sqrt();
    let abc = a * b * c;

    let mut s = (b2 - c2) / (two * b * c) * ((r - a) / (r + a)).ln();
    s += (a2 - c2) / (two * a * c) * ((r - b) / (r + b)).ln();
    s += b / (two * c) * ((rab + a) / (rab - a)).ln();
    s += a / (two * c) * ((rab + b) / (rab - b)).ln();
    s += c / (two * a) * ((rbc - b) / (rbc + b)).ln();
    s += c / (two * b) * ((rac - a) / (rac + a)).ln();
    s += two * (a * b / (c * r)).atan();
    s += (a2 * a + b2 * b - two * c2 * c) / (three * abc);
    s += (a2 + b2 - two * c2) / (three * abc) * r;
    s += c / (a * b) * (rac + rbc);
    s -= (rab * rab * rab + rbc * rbc * rbc + rac * rac * rac) / (three * abc);
    s / T::PI()
}

//! Physical coefficients and analytic fields.
//!
//! Two parameter sets are provided: the solar interface dynamo (α-effect in
//! the convection zone, differential rotation in the tachocline) and the
//! manufactured-solution setup used for convergence studies on the unit
//! ball.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{Point3, Radii, Region};
use crate::whitney::{volume_rule, TetGeometry, Vec3};

/// Below this `sin θ` a point is treated as lying on the polar axis.
const AXIS_TOL: f64 = 1e-12;

/// Which `f` and `u` drive the induction terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// α-profile supported in region 3, shear flow supported in region 2.
    Solar(Radii),
    /// `f = |x|²`, `u = (x²yz, y²xz, z²xy)` everywhere.
    Manufactured,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Physics {
    /// Magnetic diffusivity per region.
    pub beta: [f64; 4],
    pub r_alpha: f64,
    pub r_m: f64,
    /// α-quenching strength.
    pub sigma: f64,
    pub profile: Profile,
}

impl Physics {
    /// Solar interface dynamo with `β = (1, 1, 1, 150)`, `R_α = 30`, `σ = 1`.
    pub fn solar(radii: Radii, r_m: f64) -> Self {
        Physics {
            beta: [1.0, 1.0, 1.0, 150.0],
            r_alpha: 30.0,
            r_m,
            sigma: 1.0,
            profile: Profile::Solar(radii),
        }
    }

    /// Manufactured-solution parameters: all coefficients equal to one.
    pub fn manufactured() -> Self {
        Physics {
            beta: [1.0; 4],
            r_alpha: 1.0,
            r_m: 1.0,
            sigma: 1.0,
            profile: Profile::Manufactured,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&b) = self.beta.iter().find(|&&b| !(b > 0.0)) {
            return Err(Error::NonPositiveBeta(b));
        }
        for (key, v) in [("r_alpha", self.r_alpha), ("r_m", self.r_m), ("sigma", self.sigma)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidValue {
                    key: key.into(),
                    message: format!("must be finite and nonnegative, got {v}"),
                });
            }
        }
        Ok(())
    }

    pub fn beta_of(&self, region: Region) -> f64 {
        self.beta[region.index()]
    }

    pub fn alpha(&self, x: &Point3, _t: f64) -> f64 {
        match self.profile {
            Profile::Solar(radii) => {
                let (r, theta, phi) = to_spherical(x);
                alpha_profile(r, theta, phi, &radii)
            }
            Profile::Manufactured => x.norm_squared(),
        }
    }

    pub fn velocity(&self, x: &Point3, _t: f64) -> Vec3 {
        match self.profile {
            Profile::Solar(radii) => {
                let (r, theta, phi) = to_spherical(x);
                shear_velocity(r, theta, phi, &radii)
            }
            Profile::Manufactured => Vec3::new(
                x.x * x.x * x.y * x.z,
                x.y * x.y * x.x * x.z,
                x.z * x.z * x.x * x.y,
            ),
        }
    }

    pub fn alpha_active(&self, region: Region) -> bool {
        match self.profile {
            Profile::Solar(_) => region == Region::CONVECTION,
            Profile::Manufactured => true,
        }
    }

    pub fn velocity_active(&self, region: Region) -> bool {
        match self.profile {
            Profile::Solar(_) => region == Region::TACHOCLINE,
            Profile::Manufactured => true,
        }
    }

    /// Induction flux `R_α f B / (1 + σ|B|²) + R_m u × B`, restricted to the
    /// regions where each term is supported.
    pub fn flux(&self, x: &Point3, t: f64, region: Region, b: &Vec3) -> Vec3 {
        let mut g = Vec3::zeros();
        if self.r_alpha != 0.0 && self.alpha_active(region) {
            let f = self.alpha(x, t);
            g += b * (self.r_alpha * f / (1.0 + self.sigma * b.norm_squared()));
        }
        if self.r_m != 0.0 && self.velocity_active(region) {
            g += self.velocity(x, t).cross(b) * self.r_m;
        }
        g
    }
}

/// `(r, θ, φ)` with `θ ∈ [0, π]` measured from +z and `φ = atan2(y, x)`.
pub fn to_spherical(x: &Point3) -> (f64, f64, f64) {
    let r = x.norm();
    if r == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let theta = (x.z / r).clamp(-1.0, 1.0).acos();
    let phi = x.y.atan2(x.x);
    (r, theta, phi)
}

/// Unit vectors `(r̂, θ̂, φ̂)`.
pub fn unit_vectors(theta: f64, phi: f64) -> [Vec3; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [
        Vec3::new(st * cp, st * sp, ct),
        Vec3::new(ct * cp, ct * sp, -st),
        Vec3::new(-sp, cp, 0.0),
    ]
}

pub fn spherical_to_cartesian(x: &Point3, components: [f64; 3]) -> Vec3 {
    let (_, theta, phi) = to_spherical(x);
    let [er, et, ep] = unit_vectors(theta, phi);
    er * components[0] + et * components[1] + ep * components[2]
}

pub fn cartesian_to_spherical(x: &Point3, v: &Vec3) -> [f64; 3] {
    let (_, theta, phi) = to_spherical(x);
    let [er, et, ep] = unit_vectors(theta, phi);
    [er.dot(v), et.dot(v), ep.dot(v)]
}

/// Azimuthal component `v · φ̂` at `x`.
pub fn azimuthal_component(x: &Point3, v: &Vec3) -> f64 {
    let phi = x.y.atan2(x.x);
    Vec3::new(-phi.sin(), phi.cos(), 0.0).dot(v)
}

/// `f(r, θ, φ) = sin²θ cos θ sin[π (r − r2)/(r3 − r2)]` on `r2 ≤ r ≤ r3`.
pub fn alpha_profile(r: f64, theta: f64, _phi: f64, radii: &Radii) -> f64 {
    let (r2, r3) = (radii.r(2), radii.r(3));
    if r < r2 || r > r3 {
        return 0.0;
    }
    let (st, ct) = theta.sin_cos();
    st * st * ct * (PI * (r - r2) / (r3 - r2)).sin()
}

/// Differential rotation `Ω(θ) = 1 − 0.1264 cos²θ − 0.1591 cos⁴θ`.
pub fn rotation_rate(theta: f64) -> f64 {
    let c2 = theta.cos().powi(2);
    1.0 - 0.1264 * c2 - 0.1591 * c2 * c2
}

/// Azimuthal shear `u_φ = Ω(θ) r sin θ sin[π (r − r1)/(r2 − r1)]` on
/// `r1 ≤ r ≤ r2`, returned in Cartesian components.
pub fn shear_velocity(r: f64, theta: f64, phi: f64, radii: &Radii) -> Vec3 {
    let (r1, r2) = (radii.r(1), radii.r(2));
    let st = theta.sin();
    if r < r1 || r > r2 || st.abs() < AXIS_TOL {
        return Vec3::zeros();
    }
    let u_phi = rotation_rate(theta) * r * st * (PI * (r - r1) / (r2 - r1)).sin();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(-sp, cp, 0.0) * u_phi
}

/// Spherical components `(B_r, B_θ, B_φ)` of the initial field for `r ≤ r3`.
pub fn initial_field_spherical(r: f64, theta: f64, r3: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let d = r - r3;
    let s = r3 * r3;
    [
        2.0 * ct * r * d * d / s,
        -st * (3.0 * r * d * d + 2.0 * r * r * d) / s,
        3.0 * ct * st * r * r * d * d / s,
    ]
}

/// Divergence-free initial field, zero outside `r ≤ r3`.
pub fn initial_field(x: &Point3, radii: &Radii) -> Vec3 {
    let r3 = radii.r(3);
    let (r, theta, phi) = to_spherical(x);
    if r > r3 || r == 0.0 {
        return Vec3::zeros();
    }
    let c = initial_field_spherical(r, theta, r3);
    let [er, et, ep] = unit_vectors(theta, phi);
    if theta.sin().abs() < AXIS_TOL {
        return er * c[0];
    }
    er * c[0] + et * c[1] + ep * c[2]
}

/// Manufactured field `B_T(x, t)`.
pub fn mms_field(x: &Point3, t: f64, m: f64) -> Vec3 {
    let (x, y, z) = (x.x, x.y, x.z);
    let e = (-t / m).exp();
    Vec3::new(
        y * (x * x - 2.0 * x * z + y * y + 3.0 * z * z - 1.0),
        z * (3.0 * x * x - 2.0 * x * y + y * y + z * z - 1.0),
        x * (x * x + 3.0 * y * y - 2.0 * y * z + z * z - 1.0),
    ) * e
}

/// `∇ × B_T`.
pub fn mms_curl(x: &Point3, t: f64, m: f64) -> Vec3 {
    let (x, y, z) = (x.x, x.y, x.z);
    let e = (-t / m).exp();
    Vec3::new(
        -3.0 * x * x - y * y - 3.0 * z * z + 8.0 * x * y - 2.0 * x * z + 1.0,
        -3.0 * x * x - 3.0 * y * y - z * z - 2.0 * x * y + 8.0 * y * z + 1.0,
        -x * x - 3.0 * y * y - 3.0 * z * z + 8.0 * x * z - 2.0 * y * z + 1.0,
    ) * e
}

/// `∂B_T/∂t`.
pub fn mms_dt(x: &Point3, t: f64, m: f64) -> Vec3 {
    mms_field(x, t, m) * (-1.0 / m)
}

/// Local source that makes `B_T` solve the discrete system, in weak-residual
/// form: `∫ ∂_t B_T · N_k + β ∫ (∇×B_T) · ∇×N_k − ∫ g(B_T) · ∇×N_k`.
pub fn mms_source_functional(
    tet: &TetGeometry,
    region: Region,
    t: f64,
    physics: &Physics,
    m: f64,
) -> [f64; 6] {
    let beta = physics.beta_of(region);
    let curls = tet.curls();
    let mut out = [0.0; 6];
    for (bary, w) in volume_rule().iter() {
        let x = tet.point(bary);
        let wv = w * tet.volume;
        let dt = mms_dt(&x, t, m);
        let b = mms_field(&x, t, m);
        let curl_term = mms_curl(&x, t, m) * beta - physics.flux(&x, t, region, &b);
        for k in 0..6 {
            out[k] += wv * (dt.dot(&tet.shape_bary(k, bary)) + curl_term.dot(&curls[k]));
        }
    }
    out
}

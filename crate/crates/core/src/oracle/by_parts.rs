//! Approximate integration by parts on the unit circle.
//!
//! For a centered variable xi with E[xi^2] = 0 and a test function F whose
//! second derivatives are bounded by M, the expectation E[xi F(xi, xibar)]
//! differs from E[|xi|^2] E[dF/dzbar] by at most
//! [`BY_PARTS_CONSTANT`] * M * E[|xi|^3]. Here xi = e^{i theta} with a
//! uniform angle, so E[|xi|^2] = E[|xi|^3] = 1 and both sides reduce to
//! circle averages computed by trapezoidal quadrature, which is exact for
//! trigonometric polynomials of degree below the node count.

use crate::calibration::{BY_PARTS_CONSTANT, MGF_MAX_LAMBDA};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Quadrature nodes; power of two, far above every frequency involved.
const NODES: usize = 1 << 14;

/// Test functions with hand-derived z-bar derivatives and curvature bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ByPartsTestFn {
    /// F = lambda (2z + 3 zbar + 1); affine, so the remainder vanishes.
    Linear,
    /// F = exp(lambda (z + zbar)); curvature lambda^2 e^{2 lambda}.
    Exponential,
    /// F = zbar^2; both sides vanish, curvature 2.
    Polynomial,
}

/// Both sides of the approximate identity and the committed remainder
/// bound they must satisfy.
#[derive(Clone, Copy, Debug)]
pub struct ByPartsCheck {
    /// |E[xi F] - E[dF/dzbar]| by quadrature.
    pub residual: f64,
    /// BY_PARTS_CONSTANT * M * E[|xi|^3] for this test function.
    pub bound: f64,
}

/// Evaluates the two sides of the identity for `test_fn` at tilt `lambda`
/// by trapezoidal quadrature over the circle.
pub fn by_parts_residual(test_fn: ByPartsTestFn, lambda: f64) -> Result<ByPartsCheck> {
    if !(lambda.is_finite() && lambda.abs() <= MGF_MAX_LAMBDA) {
        return Err(Error::invalid(format!(
            "tilt must satisfy |lambda| <= {MGF_MAX_LAMBDA}, got {lambda}"
        )));
    }
    let mut lhs_re = CompensatedSum::new();
    let mut lhs_im = CompensatedSum::new();
    let mut rhs_re = CompensatedSum::new();
    let mut rhs_im = CompensatedSum::new();
    for k in 0..NODES {
        let theta = std::f64::consts::TAU * k as f64 / NODES as f64;
        let (s, c) = theta.sin_cos();
        // z = c + i s, zbar = c - i s.
        let (f_re, f_im, d_re, d_im) = match test_fn {
            ByPartsTestFn::Linear => {
                // F = lambda (5c + 1 - i s), dF/dzbar = 3 lambda.
                (lambda * (5.0 * c + 1.0), -lambda * s, 3.0 * lambda, 0.0)
            }
            ByPartsTestFn::Exponential => {
                // F = e^{2 lambda c} (real), dF/dzbar = lambda F.
                let f = (2.0 * lambda * c).exp();
                (f, 0.0, lambda * f, 0.0)
            }
            ByPartsTestFn::Polynomial => {
                // F = zbar^2 = c^2 - s^2 - 2 i c s, dF/dzbar = 2 zbar.
                (c * c - s * s, -2.0 * c * s, 2.0 * c, -2.0 * s)
            }
        };
        lhs_re.add(c * f_re - s * f_im);
        lhs_im.add(c * f_im + s * f_re);
        rhs_re.add(d_re);
        rhs_im.add(d_im);
    }
    let n = NODES as f64;
    let dr = (lhs_re.value() - rhs_re.value()) / n;
    let di = (lhs_im.value() - rhs_im.value()) / n;
    let curvature = match test_fn {
        ByPartsTestFn::Linear => 0.0,
        ByPartsTestFn::Exponential => lambda * lambda * (2.0 * lambda.abs()).exp(),
        ByPartsTestFn::Polynomial => 2.0,
    };
    Ok(ByPartsCheck {
        residual: dr.hypot(di),
        bound: BY_PARTS_CONSTANT * curvature,
    })
}

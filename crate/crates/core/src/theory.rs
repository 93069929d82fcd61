//! Closed-form limit laws: free energies, high-point exponents, tilt
//! optimizers, and the two-point overlap law.
//!
//! Conventions. A parameter point carries an inverse temperature `beta > 0`,
//! a split scale `alpha` in (0, 1), and a tilt strength `u` in (-1, 1). The
//! combined variance rate is V = (1+u)^2 * alpha + (1 - alpha). The scalar
//! free-energy kernel `f_sigma` takes a standard deviation; callers that
//! start from a variance pass its square root explicitly.

use crate::error::{Error, Result};

/// Validated (beta, alpha, u) parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryPoint {
    pub beta: f64,
    pub alpha: f64,
    pub u: f64,
}

impl TheoryPoint {
    pub fn new(beta: f64, alpha: f64, u: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(format!("beta must be > 0, got {beta}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !(u > -1.0 && u < 1.0) {
            return Err(Error::invalid(format!("u must lie in (-1, 1), got {u}")));
        }
        Ok(Self { beta, alpha, u })
    }

    /// Variance rate V = (1+u)^2 * alpha + (1 - alpha).
    pub fn v(&self) -> f64 {
        (1.0 + self.u) * (1.0 + self.u) * self.alpha + (1.0 - self.alpha)
    }
}

/// Scalar free energy of a centered field with deviation `sigma`:
/// beta^2 sigma^2 / 4 up to the critical temperature beta = 2/sigma,
/// beta*sigma - 1 beyond it. Continuous and convex in beta.
pub fn f_sigma(beta: f64, sigma: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("beta must be > 0, got {beta}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be > 0, got {sigma}")));
    }
    Ok(if beta * sigma <= 2.0 {
        beta * beta * sigma * sigma / 4.0
    } else {
        beta * sigma - 1.0
    })
}

/// Limiting normalized free energy of the tilted field.
///
/// For u < 0 the low and high scales merge into one effective deviation
/// sqrt(V); for u >= 0 they contribute separately with deviations (1+u)
/// and 1, weighted by alpha and 1-alpha.
pub fn limiting_free_energy(p: &TheoryPoint) -> f64 {
    if p.u < 0.0 {
        f_sigma(p.beta, p.v().sqrt()).expect("validated point")
    } else {
        let low = f_sigma(p.beta, 1.0 + p.u).expect("validated point");
        let high = f_sigma(p.beta, 1.0).expect("validated point");
        p.alpha * low + (1.0 - p.alpha) * high
    }
}

/// Largest level gamma with asymptotically non-vanishing high-point measure:
/// sqrt(V) for u <= 0, (1+u)*alpha + (1-alpha) for u > 0. Equals 1 at u = 0.
pub fn gamma_star(alpha: f64, u: f64) -> Result<f64> {
    check_alpha_u(alpha, u)?;
    Ok(if u <= 0.0 {
        ((1.0 + u) * (1.0 + u) * alpha + (1.0 - alpha)).sqrt()
    } else {
        (1.0 + u) * alpha + (1.0 - alpha)
    })
}

/// Level where the high-point optimizer saturates the low-scale budget:
/// gamma_c = V / (1+u). Defined for u >= 0 only.
pub fn gamma_c(alpha: f64, u: f64) -> Result<f64> {
    check_alpha_u(alpha, u)?;
    if u < 0.0 {
        return Err(Error::invalid(format!(
            "gamma_c is defined for u >= 0 only, got u = {u}"
        )));
    }
    let v = (1.0 + u) * (1.0 + u) * alpha + (1.0 - alpha);
    Ok(v / (1.0 + u))
}

/// Optimal low-scale tilt for the level-gamma high-point count.
///
/// Below gamma_c (always, for u < 0) it is gamma*(1+u)^2*alpha/V; for
/// u >= 0 and gamma >= gamma_c it saturates at (1+u)*alpha. Continuous at
/// gamma_c. Admissible gamma range is (0, gamma_star].
pub fn lambda_star(gamma: f64, alpha: f64, u: f64) -> Result<f64> {
    let gs = gamma_star(alpha, u)?;
    check_gamma(gamma, gs)?;
    let v = (1.0 + u) * (1.0 + u) * alpha + (1.0 - alpha);
    if u >= 0.0 && gamma >= v / (1.0 + u) {
        Ok((1.0 + u) * alpha)
    } else {
        Ok(gamma * (1.0 + u) * (1.0 + u) * alpha / v)
    }
}

/// Log-measure exponent of the level-gamma high points, on gamma in
/// (0, gamma_star]: -gamma^2/V below gamma_c (always, for u < 0) and
/// -alpha - (gamma - (1+u)*alpha)^2 / (1-alpha) above. Equals -1 at
/// gamma_star on both branches.
pub fn high_points_exponent(gamma: f64, p: &TheoryPoint) -> Result<f64> {
    let gs = gamma_star(p.alpha, p.u)?;
    check_gamma(gamma, gs)?;
    Ok(exponent_unchecked(gamma, p))
}

fn exponent_unchecked(gamma: f64, p: &TheoryPoint) -> f64 {
    let v = p.v();
    if p.u >= 0.0 && gamma >= v / (1.0 + p.u) {
        let shift = gamma - (1.0 + p.u) * p.alpha;
        -p.alpha - shift * shift / (1.0 - p.alpha)
    } else {
        -gamma * gamma / v
    }
}

/// Free energy by direct maximization of beta*gamma + exponent(gamma) over
/// gamma in [0, gamma_star], on a uniform grid of `grid_size` intervals
/// refined geometrically near the branch point and the right endpoint.
///
/// This is the variational route; it must and does agree with
/// [`limiting_free_energy`] to high accuracy for large grids.
pub fn variational_free_energy(p: &TheoryPoint, grid_size: usize) -> Result<f64> {
    if grid_size < 1000 {
        return Err(Error::invalid(format!(
            "grid_size must be >= 1000, got {grid_size}"
        )));
    }
    let gs = gamma_star(p.alpha, p.u).expect("validated point");
    let objective = |g: f64| p.beta * g + exponent_unchecked(g, p);

    let mut best = f64::NEG_INFINITY;
    let mut eval = |g: f64| {
        if (0.0..=gs).contains(&g) {
            let val = objective(g);
            if val > best {
                best = val;
            }
        }
    };
    let step = gs / grid_size as f64;
    for i in 0..=grid_size {
        eval(i as f64 * step);
    }
    // Geometric refinement near the kinks: the branch point (u >= 0) and
    // the right endpoint.
    let mut kinks = vec![gs];
    if p.u >= 0.0 {
        kinks.push(p.v() / (1.0 + p.u));
    }
    for kink in kinks {
        eval(kink);
        let mut offset = gs;
        while offset > 1e-14 * gs {
            offset *= 0.25;
            eval(kink - offset);
            eval(kink + offset);
        }
    }
    Ok(best)
}

/// Limiting two-overlap mass of an interval for beta > 2: the overlap is 0
/// with probability 2/beta and 1 with probability 1 - 2/beta.
pub fn limiting_overlap_law(beta: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 2.0) {
        return Err(Error::invalid(format!(
            "overlap law requires beta > 2, got {beta}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::invalid(format!(
            "interval must satisfy lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let mut mass = 0.0;
    if lo <= 0.0 && 0.0 <= hi {
        mass += 2.0 / beta;
    }
    if lo <= 1.0 && 1.0 <= hi {
        mass += 1.0 - 2.0 / beta;
    }
    Ok(mass)
}

/// Free energy of the random energy benchmark: 1 + beta^2/4 for beta < 2,
/// beta at and beyond the transition.
pub fn rem_free_energy(beta: f64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(format!("beta must be > 0, got {beta}")));
    }
    Ok(if beta < 2.0 { 1.0 + beta * beta / 4.0 } else { beta })
}

fn check_alpha_u(alpha: f64, u: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(u > -1.0 && u < 1.0) {
        return Err(Error::invalid(format!("u must lie in (-1, 1), got {u}")));
    }
    Ok(())
}

fn check_gamma(gamma: f64, gamma_star: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= gamma_star) {
        return Err(Error::invalid(format!(
            "gamma must lie in (0, gamma_star = {gamma_star}], got {gamma}"
        )));
    }
    Ok(())
}

//! Atomic-unit constants and the reporting units (c², λ_e, 1/c²).

/// Speed of light in atomic units.
pub const C: f64 = 137.036;

/// Electron rest energy `c²` in atomic units.
pub const C2: f64 = C * C;

/// Reduced Compton wavelength `λ_e = 1/c`.
pub const LAMBDA_E: f64 = 1.0 / C;

/// Energy or frequency given in multiples of `c²`, converted to a.u.
pub fn from_c2(x: f64) -> f64 {
    x * C2
}

/// Energy or frequency in a.u., expressed in multiples of `c²`.
pub fn to_c2(x: f64) -> f64 {
    x / C2
}

/// Length given in multiples of `λ_e`, converted to a.u.
pub fn from_lambda(x: f64) -> f64 {
    x * LAMBDA_E
}

/// Time given in multiples of `1/c²`, converted to a.u.
pub fn from_inv_c2(x: f64) -> f64 {
    x / C2
}

/// Time in a.u. expressed in multiples of `1/c²`.
pub fn to_inv_c2(t: f64) -> f64 {
    t * C2
}

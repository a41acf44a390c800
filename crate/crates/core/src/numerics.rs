//! Quadrature on the half line.

/// Integrates `f` over `[0, inf)` using the map `x = scale * t / (1 - t)` and
/// a double-exponential rule on `[0, 1]`. `scale` should be of the order of
/// the integrand's characteristic width.
pub fn integrate_half_line<F>(f: F, scale: f64, target_error: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mapped = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let one_minus = 1.0 - t;
        let x = scale * t / one_minus;
        let v = f(x) * scale / (one_minus * one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    quadrature::double_exponential::integrate(mapped, 0.0, 1.0, target_error).integral
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, target_error: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    quadrature::double_exponential::integrate(f, a, b, target_error).integral
}

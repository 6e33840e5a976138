//! Richardson-extrapolated central differences.

use crate::error::Result;

/// First derivative of `f` at `x` from central differences with steps
/// `h, h/2, h/4, ...` (`levels` of them), extrapolated to zero step.
///
/// Each level removes one more even power of the step, so three levels give
/// an O(h^6) truncation error.
pub fn derivative<F>(mut f: F, x: f64, h: f64, levels: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let levels = levels.max(1);
    let mut table = Vec::with_capacity(levels);
    let mut step = h;
    for _ in 0..levels {
        table.push((f(x + step)? - f(x - step)?) / (2.0 * step));
        step *= 0.5;
    }
    Ok(extrapolate(&mut table))
}

/// Second derivative from extrapolated three-point differences.
pub fn second_derivative<F>(mut f: F, x: f64, h: f64, levels: usize) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let levels = levels.max(1);
    let center = f(x)?;
    let mut table = Vec::with_capacity(levels);
    let mut step = h;
    for _ in 0..levels {
        table.push((f(x + step)? - 2.0 * center + f(x - step)?) / (step * step));
        step *= 0.5;
    }
    Ok(extrapolate(&mut table))
}

// Neville table for a sequence whose error expands in powers of h^2 with h halving.
fn extrapolate(table: &mut [f64]) -> f64 {
    let n = table.len();
    for k in 1..n {
        let factor = 4f64.powi(k as i32);
        for i in (k..n).rev() {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
    }
    table[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let d = derivative(|x: f64| Ok(x.sin()), 1.3, 0.1, 3).unwrap();
        assert!((d - 1.3f64.cos()).abs() < 1e-12);
        let d2 = second_derivative(|x: f64| Ok(x.sin()), 1.3, 0.1, 3).unwrap();
        assert!((d2 + 1.3f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn single_level_is_plain_central_difference() {
        let d = derivative(|x: f64| Ok(x * x * x), 2.0, 0.1, 1).unwrap();
        assert!((d - (12.0 + 0.01)).abs() < 1e-12);
    }
}

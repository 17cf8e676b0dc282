//! Trapezoid helpers shared by every module. All integrals in the crate use
//! the same composite rule so that discrete identities between norms are sharp.

/// Weight of node `j` in a trapezoid over `0..=k` steps (`k == 0` means an
/// empty interval).
#[inline]
pub fn trap_weight(j: usize, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else if j == 0 || j == k {
        0.5
    } else {
        1.0
    }
}

/// Composite trapezoid of equally spaced samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            h * (inner + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Signed cumulative trapezoid anchored at node `origin`: entry `i` is the
/// integral from `x_origin` to `x_i`.
pub fn cumulative_from(values: &[f64], origin: usize, h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    for i in origin + 1..n {
        out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    }
    for i in (0..origin).rev() {
        out[i] = out[i + 1] - 0.5 * h * (values[i] + values[i + 1]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_and_rules() {
        assert_eq!(trap_weight(0, 0), 0.0);
        assert_eq!(trap_weight(0, 3), 0.5);
        assert_eq!(trap_weight(1, 3), 1.0);
        assert_eq!(trap_weight(3, 3), 0.5);
        assert_eq!(trapezoid(&[1.0, 1.0, 1.0], 0.5), 1.0);
        assert_eq!(trapezoid(&[2.0], 0.5), 0.0);
        let c = cumulative_from(&[1.0; 5], 2, 0.25);
        assert_eq!(c, vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
    }
}

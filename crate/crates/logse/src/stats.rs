//! Small fitting helpers for convergence studies.
//!
//! Convergence data comes as (parameter, error) pairs with both spanning
//! several decades; the observed order of accuracy is the slope of
//! log(error) against log(parameter).

/// Least-squares slope of y against x. Needs at least two distinct x values.
pub fn slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Slope of ln(error) vs ln(param). Pairs with a non-positive entry cannot be
/// log-transformed and are skipped.
pub fn log_log_slope(pairs: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(p, e)| *p > 0.0 && *e > 0.0)
        .map(|(p, e)| (p.ln(), e.ln()))
        .collect();
    slope(&pts)
}

/// Pairwise observed orders ln(e_j / e_{j+1}) / |ln(p_{j+1} / p_j)| for a
/// refinement sequence, as convergence tables report them. The absolute
/// value in the denominator makes the order positive for decreasing errors
/// whether the refinement parameter grows (grid size) or shrinks (step
/// size).
pub fn pairwise_orders(pairs: &[(f64, f64)]) -> Vec<f64> {
    pairs
        .windows(2)
        .map(|w| {
            let (p0, e0) = w[0];
            let (p1, e1) = w[1];
            (e0 / e1).ln() / (p1 / p0).ln().abs()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line() {
        let pts: Vec<(f64, f64)> = (0..7).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        assert!((slope(&pts).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn slope_needs_two_distinct_points() {
        assert!(slope(&[]).is_none());
        assert!(slope(&[(1.0, 2.0)]).is_none());
        assert!(slope(&[(1.0, 2.0), (1.0, 5.0)]).is_none());
    }

    #[test]
    fn log_log_slope_recovers_power_law() {
        // e = 0.3 τ^4 sampled on halved steps
        let pairs: Vec<(f64, f64)> = (0..6)
            .map(|j| {
                let tau = 0.1 * 0.5f64.powi(j);
                (tau, 0.3 * tau.powi(4))
            })
            .collect();
        let s = log_log_slope(&pairs).unwrap();
        assert!((s - 4.0).abs() < 1e-12, "slope {s}");
    }

    #[test]
    fn log_log_slope_skips_nonpositive_entries() {
        let pairs = [(0.1, 1e-3), (0.05, 0.0), (0.025, 1e-6), (-1.0, 1e-9)];
        // only the two positive pairs remain: slope ln(1e-3/1e-6)/ln(0.1/0.025)
        let s = log_log_slope(&pairs).unwrap();
        let expect = (1e-3f64 / 1e-6).ln() / (0.1f64 / 0.025).ln();
        assert!((s - expect).abs() < 1e-12);
        assert!(log_log_slope(&[(0.1, 0.0), (0.05, -1.0)]).is_none());
    }

    #[test]
    fn pairwise_orders_match_halving_table() {
        // error quarters when the step halves -> order 2 everywhere
        let pairs = [(0.1, 1.6e-2), (0.05, 4e-3), (0.025, 1e-3)];
        for o in pairwise_orders(&pairs) {
            assert!((o - 2.0).abs() < 1e-12, "order {o}");
        }
        // growing parameter (grid size): e ~ p^-3
        let pairs = [(8.0, 1.0 / 512.0), (16.0, 1.0 / 4096.0)];
        let orders = pairwise_orders(&pairs);
        assert_eq!(orders.len(), 1);
        assert!((orders[0] - 3.0).abs() < 1e-12);
    }
}

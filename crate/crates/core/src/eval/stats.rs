//! Correlation estimators.

use super::EvalError;

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Pearson correlation `sxy / sqrt(sxx · syy)`, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::DegenerateInput(format!(
            "lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(EvalError::DegenerateInput(format!("{} observations", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(EvalError::DegenerateInput("non-finite value".into()));
    }
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if constant(x) || constant(y) {
        return Err(EvalError::ZeroVariance);
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(EvalError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Ranks starting at 1, ties sharing their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k + 1;
        while end < order.len() && x[order[end]] == x[order[k]] {
            end += 1;
        }
        let r = (k + 1 + end) as f64 / 2.0;
        for &i in &order[k..end] {
            ranks[i] = r;
        }
        k = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, EvalError> {
    if x.len() != y.len() {
        return Err(EvalError::DegenerateInput(format!(
            "lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn textbook_values() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 4.0, 5.0, 4.0, 5.0];
        // sxy = 6, sxx = 10, syy = 6
        assert!((pearson(&x, &y).unwrap() - 6.0 / 60f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 30.0]), [1.5, 3.0, 1.5, 4.0]);
    }

    #[test]
    fn spearman_of_monotone_map_is_one() {
        let x = [0.1, 0.5, 0.2, 0.9, 0.3];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.powi(3) + 7.0).collect();
        assert_eq!(spearman(&x, &y).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(pearson(&[1.0], &[2.0]), Err(EvalError::DegenerateInput(_))));
        assert!(matches!(
            pearson(&[1.0, 1.0], &[2.0, 3.0]),
            Err(EvalError::ZeroVariance)
        ));
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
    }

    fn vectors() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0f64..100.0, 3..40)
            .prop_filter("needs spread", |v| v.iter().any(|&x| (x - v[0]).abs() > 1e-3))
    }

    proptest! {
        #[test]
        fn bounded_and_self_correlation(x in vectors(), y in vectors()) {
            let n = x.len().min(y.len());
            if let Ok(r) = pearson(&x[..n], &y[..n]) {
                prop_assert!((-1.0..=1.0).contains(&r));
            }
            prop_assert_eq!(pearson(&x, &x).unwrap(), 1.0);
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert_eq!(pearson(&x, &neg).unwrap(), -1.0);
        }

        #[test]
        fn positive_affine_invariance(x in vectors(), y in vectors(), a in 0.1f64..10.0, b in -5.0f64..5.0) {
            let n = x.len().min(y.len());
            let (x, y) = (&x[..n], &y[..n]);
            if let Ok(r) = pearson(x, y) {
                let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
                prop_assert!((pearson(&scaled, y).unwrap() - r).abs() < 1e-9);
            }
        }
    }
}

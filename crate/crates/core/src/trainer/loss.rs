/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` inside the loss.
pub const PROB_EPS: f64 = 1e-7;

/// Binary cross-entropy averaged over attributes.
pub fn bce_loss(p: &[f64], y: &[u8]) -> f64 {
    debug_assert_eq!(p.len(), y.len());
    let n = p.len().max(1) as f64;
    p.iter()
        .zip(y)
        .map(|(&p, &y)| {
            let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
            if y == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum::<f64>()
        / n
}

/// `d bce_loss / d p`; zero where the clamp is active.
pub fn bce_grad(p: &[f64], y: &[u8]) -> Vec<f64> {
    let n = p.len().max(1) as f64;
    p.iter()
        .zip(y)
        .map(|(&p, &y)| {
            if !(PROB_EPS..=1.0 - PROB_EPS).contains(&p) {
                0.0
            } else if y == 1 {
                -1.0 / (p * n)
            } else {
                1.0 / ((1.0 - p) * n)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::finite_diff;

    #[test]
    fn loss_examples() {
        assert!(bce_loss(&[1.0, 0.0, 1.0], &[1, 0, 1]) <= 1e-6);
        assert!((bce_loss(&[0.5; 4], &[1, 0, 0, 1]) - std::f64::consts::LN_2).abs() < 1e-15);
        let want = -(0.9f64.ln() + 0.8f64.ln()) / 2.0;
        assert!((bce_loss(&[0.9, 0.2], &[1, 0]) - want).abs() < 1e-15);
        assert!((want - 0.164252).abs() < 1e-6);
        assert!(bce_loss(&[0.0], &[1]).is_finite());
    }

    #[test]
    fn grad_matches_finite_differences() {
        let y = [1, 0, 1, 0];
        let p = [0.3, 0.6, 0.95, 0.01];
        let num = finite_diff(|q| bce_loss(q, &y), &p, 1e-7).unwrap();
        for (a, n) in bce_grad(&p, &y).iter().zip(num) {
            assert!((a - n).abs() / a.abs() < 1e-5);
        }
    }
}

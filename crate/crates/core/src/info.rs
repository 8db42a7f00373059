//! Entropy helpers. Everything is in bits.

/// `-p log2 p`, with the usual convention `0 log 0 = 0`.
pub fn neg_xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Binary entropy `h2(p)`.
pub fn binary_entropy(p: f64) -> f64 {
    neg_xlog2x(p) + neg_xlog2x(1.0 - p)
}

/// Entropy of a (possibly unnormalized) weight vector, normalized first.
pub fn entropy_of_weights(w: &[f64]) -> f64 {
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    w.iter().map(|&x| neg_xlog2x(x / total)).sum()
}

/// `I(X;Y)` for a binary input with the given prior and channel rows `p(y|x)`.
pub fn binary_input_mutual_information(prior0: f64, row0: &[f64], row1: &[f64]) -> f64 {
    let prior = [prior0, 1.0 - prior0];
    let mut mi = 0.0;
    for (&a, &b) in row0.iter().zip(row1) {
        let q = prior[0] * a + prior[1] * b;
        if q <= 0.0 {
            continue;
        }
        for (x, &p) in [a, b].iter().enumerate() {
            if p > 0.0 && prior[x] > 0.0 {
                mi += prior[x] * p * (p / q).log2();
            }
        }
    }
    mi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.11) - 0.499_915_958_164_528_6).abs() < 1e-12);
    }
}

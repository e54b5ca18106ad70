use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Cohen's kappa between two coders. When chance agreement is total (both
/// coders used the same single label) the result is 1.
pub fn cohens_kappa<T: Ord>(codes1: &[T], codes2: &[T]) -> Result<f64> {
    if codes1.len() != codes2.len() {
        return Err(Error::ArityMismatch {
            left: codes1.len(),
            right: codes2.len(),
        });
    }
    if codes1.is_empty() {
        return Err(Error::Stats("kappa of empty code lists".into()));
    }
    let n = codes1.len() as f64;
    let mut m1: BTreeMap<&T, f64> = BTreeMap::new();
    let mut m2: BTreeMap<&T, f64> = BTreeMap::new();
    let mut agree = 0.0;
    for (a, b) in codes1.iter().zip(codes2) {
        *m1.entry(a).or_default() += 1.0;
        *m2.entry(b).or_default() += 1.0;
        if a == b {
            agree += 1.0;
        }
    }
    let p_o = agree / n;
    let p_e: f64 = m1.iter().map(|(k, c)| c * m2.get(k).copied().unwrap_or(0.0)).sum::<f64>() / (n * n);
    if (1.0 - p_e).abs() < 1e-15 {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(cohens_kappa(&["a", "b", "c"], &["a", "b", "c"]).unwrap(), 1.0);
        let k = cohens_kappa(&["X", "X", "Y", "Y"], &["X", "Y", "X", "Y"]).unwrap();
        assert!(k.abs() < 1e-12);
        assert_eq!(cohens_kappa(&["X", "X"], &["X", "X"]).unwrap(), 1.0);
        assert!(cohens_kappa(&["X"], &["X", "Y"]).is_err());
        assert!(cohens_kappa::<&str>(&[], &[]).is_err());
    }

    #[test]
    fn textbook_table() {
        // 20 yes/yes, 5 yes/no, 10 no/yes, 15 no/no: p_o = 0.7, p_e = 0.5
        let mut a = vec![];
        let mut b = vec![];
        for (x, y, n) in [(1, 1, 20), (1, 0, 5), (0, 1, 10), (0, 0, 15)] {
            for _ in 0..n {
                a.push(x);
                b.push(y);
            }
        }
        assert!((cohens_kappa(&a, &b).unwrap() - 0.4).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bounded_and_symmetric(pairs in prop::collection::vec((0u8..4, 0u8..4), 1..60)) {
            let (a, b): (Vec<u8>, Vec<u8>) = pairs.into_iter().unzip();
            let k = cohens_kappa(&a, &b).unwrap();
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&k));
            prop_assert!((k - cohens_kappa(&b, &a).unwrap()).abs() < 1e-12);
        }
    }
}

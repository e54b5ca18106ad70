use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anova {
    pub f: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p: f64,
}

/// One-way ANOVA over independent groups.
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<Anova> {
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    if k < 2 || groups.iter().any(Vec::is_empty) {
        return Err(Error::Stats("ANOVA needs at least two non-empty groups".into()));
    }
    if n <= k {
        return Err(Error::Stats("ANOVA needs more observations than groups".into()));
    }
    let grand = groups.iter().flatten().sum::<f64>() / n as f64;
    let mut ss_between = 0.0;
    let mut ss_within = 0.0;
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ss_between += g.len() as f64 * (m - grand).powi(2);
        ss_within += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let df_between = k - 1;
    let df_within = n - k;
    let ms_b = ss_between / df_between as f64;
    let ms_w = ss_within / df_within as f64;
    let (f, p) = if ms_w == 0.0 {
        if ms_b == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = ms_b / ms_w;
        (f, f_sf(f, df_between as f64, df_within as f64))
    };
    Ok(Anova {
        f,
        df_between,
        df_within,
        p,
    })
}

/// Upper tail of the F distribution.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    reg_inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

/// Natural log of the gamma function (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized incomplete beta I_x(a, b).
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta, modified Lentz.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let clamp = |v: f64| if v.abs() < TINY { TINY } else { v };
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 / clamp(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp(1.0 + aa * d);
        c = clamp(1.0 + aa / c);
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, FisherSnedecor};
    use statrs::function::beta::beta_reg;

    #[test]
    fn identical_groups_give_zero() {
        let g = vec![1.0, 2.0, 3.0];
        let a = one_way_anova(&[g.clone(), g.clone(), g]).unwrap();
        assert_eq!(a.f, 0.0);
        assert_eq!((a.df_between, a.df_within), (2, 6));
        assert!((a.p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(one_way_anova(&[vec![1.0]]).is_err());
        assert!(one_way_anova(&[vec![1.0], vec![]]).is_err());
        assert!(one_way_anova(&[vec![1.0], vec![2.0]]).is_err());
    }

    #[test]
    fn hand_computed() {
        // means 2 and 5, grand 3.5; SSB = 13.5, SSW = 4; F = 13.5 / 1
        let a = one_way_anova(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert!((a.f - 13.5).abs() < 1e-12);
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-13);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn incomplete_beta_matches_reference(a in 0.5f64..40.0, b in 0.5f64..40.0, x in 0.0f64..1.0) {
            prop_assert!((reg_inc_beta(a, b, x) - beta_reg(a, b, x)).abs() < 1e-9);
        }

        #[test]
        fn f_tail_matches_reference(f in 0.0f64..30.0, d1 in 1u32..10, d2 in 2u32..60) {
            let reference = FisherSnedecor::new(d1 as f64, d2 as f64).unwrap().sf(f);
            prop_assert!((f_sf(f, d1 as f64, d2 as f64) - reference).abs() < 1e-6);
        }

        #[test]
        fn two_groups_f_is_t_squared(
            a in prop::collection::vec(-50.0f64..50.0, 2..15),
            b in prop::collection::vec(-50.0f64..50.0, 2..15),
        ) {
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            let ss = |v: &[f64]| { let m = mean(v); v.iter().map(|x| (x - m).powi(2)).sum::<f64>() };
            let (na, nb) = (a.len() as f64, b.len() as f64);
            let sp2 = (ss(&a) + ss(&b)) / (na + nb - 2.0);
            prop_assume!(sp2 > 1e-9);
            let t = (mean(&a) - mean(&b)) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt();
            let r = one_way_anova(&[a, b]).unwrap();
            prop_assert!((r.f - t * t).abs() <= 1e-8 * (1.0 + t * t));
        }
    }
}

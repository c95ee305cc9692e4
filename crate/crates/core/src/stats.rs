//! TV distance, chi-square uniformity, Hoeffding intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};

/// Half the L1 distance between two probability tables.
pub fn tv_exact(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension("tables differ in size".into()));
    }
    for t in [p, q] {
        if t.iter().any(|&x| x.is_nan() || x < 0.0) || (t.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(invalid("table is not a probability distribution"));
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Plug-in TV between an empirical histogram and a reference table.
pub fn tv_plugin(counts: &[u64], q: &[f64]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(invalid("empty histogram"));
    }
    let p: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    tv_exact(&p, q)
}

/// Two-sided Hoeffding halfwidth for a mean of `trials` bounded samples.
pub fn hoeffding_halfwidth(trials: u64, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * trials as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimate {
    pub p_structured: f64,
    pub p_unstructured: f64,
    /// `p_structured - p_unstructured`.
    pub advantage: f64,
    /// Per-arm Hoeffding halfwidth at `trials` samples.
    pub ci_halfwidth: f64,
    /// Smaller of the two arm sizes.
    pub trials: u64,
    pub trials_structured: u64,
    pub trials_unstructured: u64,
    pub alpha: f64,
    /// Hoeffding interval for the advantage: both arm halfwidths added.
    pub advantage_ci: (f64, f64),
    /// Variance proxy `sqrt(1/(4 n_s) + 1/(4 n_u))`.
    pub sigma: f64,
}

pub fn advantage_ci(
    successes_s: u64,
    trials_s: u64,
    successes_u: u64,
    trials_u: u64,
    alpha: f64,
) -> Result<AdvantageEstimate> {
    if trials_s == 0 || trials_u == 0 {
        return Err(invalid("both arms need at least one trial"));
    }
    if successes_s > trials_s || successes_u > trials_u {
        return Err(invalid("more successes than trials"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha must lie in (0, 1)"));
    }
    let ps = successes_s as f64 / trials_s as f64;
    let pu = successes_u as f64 / trials_u as f64;
    let adv = ps - pu;
    let trials = trials_s.min(trials_u);
    let hw = hoeffding_halfwidth(trials_s, alpha) + hoeffding_halfwidth(trials_u, alpha);
    Ok(AdvantageEstimate {
        p_structured: ps,
        p_unstructured: pu,
        advantage: adv,
        ci_halfwidth: hoeffding_halfwidth(trials, alpha),
        trials,
        trials_structured: trials_s,
        trials_unstructured: trials_u,
        alpha,
        advantage_ci: (adv - hw, adv + hw),
        sigma: (0.25 / trials_s as f64 + 0.25 / trials_u as f64).sqrt(),
    })
}

/// `sqrt(1 / (4 n))`, the Hoeffding variance proxy of a rate over `n` trials.
pub fn rate_sigma(trials: u64) -> f64 {
    (0.25 / trials as f64).sqrt()
}

/// `|a - b| <= k * sqrt(sa^2 + sb^2)`.
pub fn within_sigma(a: f64, sa: f64, b: f64, sb: f64, k: f64) -> bool {
    (a - b).abs() <= k * (sa * sa + sb * sb).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Goodness of fit against arbitrary cell probabilities.
pub fn chi_square(counts: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if counts.len() != probs.len() || counts.len() < 2 {
        return Err(Error::Dimension("need at least two matching cells".into()));
    }
    let total: u64 = counts.iter().sum();
    let mut stat = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * total as f64;
        if e < 5.0 {
            return Err(invalid(format!("expected count {e:.2} below 5")));
        }
        stat += (c as f64 - e).powi(2) / e;
    }
    let dof = counts.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| invalid(e.to_string()))?;
    Ok(ChiSquare { statistic: stat, dof, p_value: dist.sf(stat) })
}

pub fn chi_square_uniform(counts: &[u64]) -> Result<ChiSquare> {
    let k = counts.len();
    chi_square(counts, &vec![1.0 / k as f64; k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_examples() {
        assert_eq!(tv_exact(&[0.5, 0.5], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(tv_exact(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!((tv_exact(&[0.5, 0.5], &[0.75, 0.25]).unwrap() - 0.25).abs() < 1e-15);
        assert!(tv_exact(&[0.5, 0.6], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn hoeffding_example() {
        let a = advantage_ci(600, 1000, 400, 1000, 0.05).unwrap();
        assert!((a.advantage - 0.2).abs() < 1e-12);
        assert!((a.ci_halfwidth - 0.043).abs() < 5e-4, "{}", a.ci_halfwidth);
        let b = advantage_ci(2400, 4000, 1600, 4000, 0.05).unwrap();
        assert!((a.ci_halfwidth / b.ci_halfwidth - 2.0).abs() < 1e-12);
        assert_eq!(advantage_ci(5, 10, 5, 10, 0.05).unwrap().advantage, 0.0);
    }

    #[test]
    fn chi_square_examples() {
        let p = chi_square_uniform(&[1000, 1010, 990, 1000]).unwrap().p_value;
        assert!(p > 0.5);
        let p = chi_square_uniform(&[4000, 0, 0, 0]).unwrap().p_value;
        assert!(p < 1e-12);
        assert!(chi_square_uniform(&[1, 2, 3]).is_err());
    }
}

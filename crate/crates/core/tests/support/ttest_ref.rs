//! statrs as the independent reference for the paired t-test. Shared with the
//! CLI acceptance suite.

use movelearn_core::session::{paired_t_test, Tail};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::statistics::Statistics;

fn sample(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = rng.random_range(2..=50);
    let shift = rng.random_range(-2.0..2.0);
    let pre: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    let post = pre.iter().map(|x| x + shift + rng.random_range(-3.0..3.0)).collect();
    (pre, post)
}

/// Largest |dt| and |dp| over `count` random paired samples, all tails.
pub fn compare_random(seed: u64, count: usize) -> Result<(f64, f64), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut dt, mut dp) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let (pre, post) = sample(&mut rng);
        let d: Vec<f64> = pre.iter().zip(&post).map(|(a, b)| b - a).collect();
        let n = d.len() as f64;
        let t = d.iter().mean() / (d.iter().std_dev() / n.sqrt());
        let dist = StudentsT::new(0.0, 1.0, n - 1.0).map_err(|e| e.to_string())?;
        let upper = dist.sf(t);
        let lower = dist.cdf(t);
        for (tail, want) in
            [(Tail::OneTailedGreater, upper), (Tail::OneTailedLess, lower), (Tail::TwoTailed, 2.0 * upper.min(lower))]
        {
            let r = paired_t_test(&pre, &post, tail).map_err(|e| e.to_string())?;
            if r.df as usize != d.len() - 1 {
                return Err(format!("df {} for n {}", r.df, d.len()));
            }
            dt = dt.max((r.t - t).abs());
            dp = dp.max((r.p - want).abs());
        }
    }
    Ok((dt, dp))
}

/// Swapping pre and post negates t exactly. Scaling by a power of two keeps
/// t and p bit-identical; other positive factors keep them within 1e-9.
pub fn sign_and_scale(seed: u64, count: usize) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let (pre, post) = sample(&mut rng);
        let a = paired_t_test(&pre, &post, Tail::TwoTailed).map_err(|e| e.to_string())?;
        let b = paired_t_test(&post, &pre, Tail::TwoTailed).map_err(|e| e.to_string())?;
        if b.t != -a.t || b.p != a.p {
            return Err(format!("sample {k}: swap gave t {} vs {}", b.t, a.t));
        }
        for (c, exact) in [(4.0, true), (0.125, true), (3.7, false), (1e3, false)] {
            let sp: Vec<f64> = pre.iter().map(|x| x * c).collect();
            let sq: Vec<f64> = post.iter().map(|x| x * c).collect();
            let s = paired_t_test(&sp, &sq, Tail::TwoTailed).map_err(|e| e.to_string())?;
            let ok = if exact {
                s.t == a.t && s.p == a.p
            } else {
                (s.t - a.t).abs() <= 1e-9 * a.t.abs().max(1.0) && (s.p - a.p).abs() <= 1e-9
            };
            if !ok || s.df != a.df {
                return Err(format!("sample {k}: scale {c} gave t {} vs {}", s.t, a.t));
            }
        }
    }
    Ok(())
}

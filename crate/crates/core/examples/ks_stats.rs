//! Empirical distributions, Kolmogorov-Smirnov statistics and Monte Carlo means.

use rand::SeedableRng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use tcwiener::stats::{exp1_cdf, ks_one_sample, ks_two_sample, mc_mean, normal_cdf, EmpiricalDistribution};

fn main() -> tcwiener::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let a: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let b: Vec<f64> = (0..5000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let e: Vec<f64> = (0..5000).map(|_| Exp1.sample(&mut rng)).collect();

    let (a, b, e) = (EmpiricalDistribution::new(a)?, EmpiricalDistribution::new(b)?, EmpiricalDistribution::new(e)?);
    println!("{}", ks_two_sample(&a, &b).renamed("normal_vs_normal"));
    println!("{}", ks_one_sample(&a, |x| normal_cdf(x, 1.0)).renamed("normal_vs_cdf"));
    println!("{}", ks_one_sample(&e, exp1_cdf).renamed("exp_vs_cdf"));
    println!("{}", ks_two_sample(&a, &e).renamed("normal_vs_exp"));

    let (mean, se) = mc_mean(e.samples())?;
    println!("exp mean {mean:.4} +- {se:.4}");
    Ok(())
}

//! At outlier rate 1/2 the adversary can make every f_S look the same.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robustpoly::lowerbounds::{listdecode_adversary, FamilySpec};
use robustpoly::simulator::{sample_x, Measure};

fn main() -> robustpoly::Result<()> {
    let spec = FamilySpec::for_approximation_factor(40, 1.0)?;
    let xs = sample_x(Measure::Uniform, 12, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let subsets = [Vec::new(), spec.all(), spec.random_subset(&mut rng)];
    let draws: Vec<_> = subsets
        .iter()
        .map(|s| listdecode_adversary(&spec, s, &xs, 99))
        .collect::<Result<_, _>>()?;
    println!(
        "family of {} subsets over m = {} bumps",
        1u64 << spec.m,
        spec.m
    );
    for (s, draw) in subsets.iter().zip(&draws) {
        let outliers = draw.flags.iter().filter(|f| **f).count();
        println!("S = {s:?}: {outliers}/{} samples flagged", xs.len());
    }
    let same = draws.windows(2).all(|w| w[0].ys == w[1].ys);
    println!("observed y values identical across S: {same}");
    Ok(())
}

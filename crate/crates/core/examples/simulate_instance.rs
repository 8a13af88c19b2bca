//! Seeded instance generation for every adversary, with a file round trip.

use robustpoly::simulator::{
    make_instance, random_truth, Adversary, Instance, Measure, NoiseModel,
};

fn main() -> robustpoly::Result<()> {
    let truth = random_truth(4, 7);
    for adversary in Adversary::ALL
        .into_iter()
        .filter(|a| *a != Adversary::CustomValues)
    {
        let model = NoiseModel::new(0.1, 0.25, adversary);
        let inst = make_instance(&truth, 2000, Measure::Uniform, &model, 7)?;
        let flags = inst.samples.flags().unwrap();
        let worst_inlier = inst
            .samples
            .xs()
            .iter()
            .zip(inst.samples.ys())
            .zip(flags)
            .filter(|(_, f)| !**f)
            .map(|((x, y), _)| (y - truth.eval(*x)).abs())
            .fold(0.0, f64::max);
        println!(
            "{:<18} outliers {:4}/2000, worst inlier residual {worst_inlier:.4}",
            adversary.name(),
            flags.iter().filter(|f| **f).count()
        );
    }

    let dir = std::env::temp_dir().join("robustpoly_example");
    std::fs::create_dir_all(&dir)?;
    let model = NoiseModel::new(0.1, 0.25, Adversary::SignFlip);
    let inst = make_instance(&truth, 500, Measure::Chebyshev, &model, 7)?;
    let (csv, json) = inst.write_files(dir.join("inst"))?;
    let back = Instance::read_files(dir.join("inst"))?;
    println!(
        "wrote {} and {}; round trip equal: {}",
        csv.display(),
        json.display(),
        back == inst
    );
    Ok(())
}

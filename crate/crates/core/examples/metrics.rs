//! Classification and regression scores on small hand-made vectors.

use airsense::metrics::{classification_report, mse, r2, RegressionReport};

fn main() -> airsense::Result<()> {
    let truth = [1, 1, 0, 0, 1, 0, 1, 1];
    let pred = [1, 0, 0, 0, 1, 1, 1, 1];
    let report = classification_report(&pred, &truth)?;
    println!("{report}");
    println!("precision {:.3} recall {:.3} f1 {:.3}", report.precision(), report.recall(), report.f1());

    let y = [0.0, 1.5, 2.0, 3.5, 4.0];
    let y_hat = [0.2, 1.4, 2.3, 3.1, 4.4];
    println!("mse {:.4} r2 {:.4}", mse(&y_hat, &y)?, r2(&y_hat, &y)?);
    println!("{}", RegressionReport::compute(&y_hat, &y)?);
    Ok(())
}

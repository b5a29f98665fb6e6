//! Backpropagation against central finite differences.
//!
//!     cargo run --release --example gradient_check

use neuralbandit::mlp::{backward, forward, loss, NetworkShape, NetworkWeights};
use neuralbandit::Context;

fn main() -> neuralbandit::Result<()> {
    let shape = NetworkShape::new(3, 2)?;
    let values = vec![0.3, -0.2, 0.1, 0.05, 0.4, -0.3, 0.7, -0.6];
    let w = NetworkWeights::from_values(shape, values.clone())?;
    let x = Context::new(vec![1.0, 0.0, 1.0])?;
    let target = 1.0;

    let g = backward(&w, &forward(&w, &x)?, &x, target)?;
    let h = 1e-5;
    println!("{:>3}  {:>14}  {:>14}", "n", "backprop", "finite diff");
    for (n, analytic) in g.values().iter().enumerate() {
        let at = |delta: f64| {
            let mut v = values.clone();
            v[n] += delta;
            loss(&NetworkWeights::from_values(shape, v)?, &x, target)
        };
        let numeric = (at(h)? - at(-h)?) / (2.0 * h);
        println!("{n:>3}  {analytic:>14.8}  {numeric:>14.8}");
    }
    Ok(())
}

//! Analytic weight gradients against central finite differences.

use fca_agenda::trainer::{grad_weights, loss_value, predictions, LossKind, OutputTable};

fn main() -> fca_agenda::Result<()> {
    // 3 objects, 3 lattices, 2 classes
    #[rustfmt::skip]
    let table = OutputTable::new(3, 3, 2, vec![
        1.0, 0.0,  0.5, 0.5,  0.2, 0.8,
        0.0, 1.0,  0.7, 0.3,  0.5, 0.5,
        0.5, 0.5,  1.0, 0.0,  0.9, 0.1,
    ]);
    let targets = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]];
    let w = [0.6, -0.2, 0.5];
    let delta = 1e-3;
    let h = 1e-5;

    for kind in [LossKind::Mse, LossKind::CrossEntropy] {
        let loss =
            |w: &[f64]| -> fca_agenda::Result<f64> { Ok(loss_value(&predictions(w, &table, delta)?, &targets, kind)) };
        let analytic = grad_weights(&w, &table, &targets, kind, delta)?;
        println!("{kind:?}: loss {:.6}", loss(&w)?);
        for i in 0..w.len() {
            let (mut up, mut down) = (w.to_vec(), w.to_vec());
            up[i] += h;
            down[i] -= h;
            let numeric = (loss(&up)? - loss(&down)?) / (2.0 * h);
            println!("  w{i}: analytic {:+.8}  numeric {:+.8}", analytic[i], numeric);
        }
    }
    Ok(())
}

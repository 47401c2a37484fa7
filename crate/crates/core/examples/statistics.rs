//! Least-squares fit with a two-sided t-test on the slope.
//!
//! cargo run --example statistics

use vineshape::experiments::ols_fit;

fn main() -> vineshape::Result<()> {
    let minutes = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
    let error = [0.1, 1.9, 2.2, 4.6, 5.0, 7.1, 7.5, 9.8, 10.1, 12.4];
    let g = ols_fit(&minutes, &error)?;
    println!(
        "slope {:.4}, intercept {:.4}, R^2 {:.4}, p {:.3e}, n {}",
        g.slope, g.intercept, g.r_squared, g.p_value, g.n
    );

    let flat = ols_fit(&minutes, &[3.0; 10])?;
    println!("constant response: slope {}, R^2 {}, p {}", flat.slope, flat.r_squared, flat.p_value);

    match ols_fit(&[2.0; 4], &[1.0, 2.0, 3.0, 4.0]) {
        Err(e) => println!("identical x: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

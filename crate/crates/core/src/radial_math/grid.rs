/// `n` evenly spaced points on `[a, b]`, both ends included.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            let mut g: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
            g[n - 1] = b;
            g
        }
    }
}

/// Geometric spacing on `[t_min, knee]` followed by uniform spacing up to
/// `t_max`; a quarter of the points go to the geometric part.
///
/// Dense near the origin where ratios like `q_W(t)/t` need resolving, even
/// in the tail where the comparison quantities plateau.
pub fn hybrid_grid(t_min: f64, t_max: f64, n: usize, knee: f64) -> Vec<f64> {
    assert!(t_min > 0.0 && t_max > t_min && n >= 4, "bad hybrid grid parameters");
    if knee <= t_min {
        return uniform_grid(t_min, t_max, n);
    }
    if knee >= t_max {
        return geometric(t_min, t_max, n);
    }
    let n_geo = n / 4;
    let mut g = geometric(t_min, knee, n_geo);
    let rest = n - n_geo;
    let h = (t_max - knee) / rest as f64;
    g.extend((1..=rest).map(|i| knee + h * i as f64));
    let last = g.len() - 1;
    g[last] = t_max;
    g
}

fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    let ratio = (b / a).ln() / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| a * (ratio * i as f64).exp()).collect();
    g[n - 1] = b;
    g
}

/// Finite-difference weights at `z` for derivatives `0..=max_order`
/// on arbitrary nodes (Fornberg's recursion). `w[m][j]` multiplies `f(x_j)`.
pub fn fornberg_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Centred stencil for the `order`-th derivative on unit spacing with the
/// given accuracy (even). Returns `(half_width, weights)` for offsets
/// `-half_width..=half_width`.
pub fn central_stencil(order: usize, accuracy: usize) -> (usize, Vec<f64>) {
    let points = 2 * order.div_ceil(2) - 1 + accuracy;
    let half = (points - 1) / 2;
    let nodes: Vec<f64> = (-(half as i64)..=half as i64).map(|i| i as f64).collect();
    let w = fornberg_weights(0.0, &nodes, order);
    (half, w[order].clone())
}

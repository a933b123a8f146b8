//! Finite-difference weights on arbitrary nodes (Fornberg's recursion).

/// Weights for derivatives 0..=`max_order` at `z` from samples at `nodes`.
/// Entry `[k][j]` multiplies f(nodes[j]) in the k-th derivative.
pub fn fornberg_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    assert!(n > max_order, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
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

/// Weights of the `order`-th derivative at offset 0 on the integer offsets
/// `lo..=hi`, for unit spacing.
pub fn integer_stencil(order: usize, lo: i64, hi: i64) -> Vec<f64> {
    let nodes: Vec<f64> = (lo..=hi).map(|k| k as f64).collect();
    fornberg_weights(0.0, &nodes, order).swap_remove(order)
}

//! Reference point sets and the curves they were sampled from.

/// Ten noisy samples of the parabola `y² − x − 2y + 2 = 0`, as `(x, y)`.
pub const PARABOLA: [[f64; 2]; 10] = [
    [0.95, 1.0],
    [1.3, 0.5],
    [2.05, 1.98],
    [2.08, 0.0],
    [3.18, -0.48],
    [5.05, 2.95],
    [5.05, -0.95],
    [7.2, -1.45],
    [9.98, 4.0],
    [10.05, -2.0],
];

/// Ten samples of a rational Bézier curve rounded to `1e-4`, as `(x, y)`.
pub const BEZIER: [[f64; 2]; 10] = [
    [0.0, 0.0],
    [-1.3581, -4.7661],
    [2.0956, 2.0315],
    [4.6884, -0.3349],
    [-2.7205, -11.6848],
    [-7.2835, -40.9773],
    [6.7793, -1.4114],
    [8.6024, 1.4575],
    [10.5250, 8.8937],
    [12.6213, 19.7217],
];

/// The Bézier curve at parameter `t`.
pub fn bezier_point(t: f64) -> [f64; 2] {
    let den = t.powi(6) - 3.0 * t.powi(5) + 3.0 * t.powi(4) + 3.0 * t * t + 3.0 * t + 1.0;
    let x = 4.0 * t * (2.0 * t.powi(5) - 3.0 * t.powi(4) + 8.0 * t * t + 6.0 * t + 3.0) / den;
    let y = 6.0 * t * (4.0 * t.powi(4) + 9.0 * t.powi(3) - 9.0 * t * t - 9.0 * t + 5.0) / den;
    [x, y]
}

/// Implicit equation of the Bézier curve as `(x exponent, y exponent, coefficient)`.
pub const BEZIER_IMPLICIT: [(u32, u32, f64); 9] = [
    (3, 0, 1.0),
    (2, 1, -2.0 / 1269.0),
    (1, 2, -28.0 / 423.0),
    (0, 3, 224.0 / 34263.0),
    (2, 0, -15712.0 / 1269.0),
    (1, 1, -56.0 / 1269.0),
    (0, 2, 848.0 / 3807.0),
    (1, 0, 44480.0 / 1269.0),
    (0, 1, -17792.0 / 1269.0),
];

/// The quadric in `R^5` of the five-variable example, as
/// `(exponents of x1..x5, coefficient)`.
pub const QUADRIC5: [([u32; 5], f64); 9] = [
    ([0, 0, 0, 2, 0], 1.0),
    ([0, 0, 0, 1, 1], -17.0 / 41.0),
    ([0, 0, 0, 0, 2], -2.0),
    ([1, 0, 0, 0, 0], -10.0 / 41.0),
    ([0, 1, 0, 0, 0], 21.0 / 41.0),
    ([0, 0, 1, 0, 0], -74.0 / 41.0),
    ([0, 0, 0, 1, 0], 93.0 / 41.0),
    ([0, 0, 0, 0, 1], -36.0 / 41.0),
    ([0, 0, 0, 0, 0], 39.0 / 41.0),
];

/// Completes `(x1, x2, x4, x5)` to a point on [`QUADRIC5`] by solving the
/// (linear) equation for `x3`.
pub fn quadric5_point(x1: f64, x2: f64, x4: f64, x5: f64) -> [f64; 5] {
    let rest = x4 * x4 - 17.0 / 41.0 * x4 * x5 - 2.0 * x5 * x5 - 10.0 / 41.0 * x1
        + 21.0 / 41.0 * x2
        + 93.0 / 41.0 * x4
        - 36.0 / 41.0 * x5
        + 39.0 / 41.0;
    [x1, x2, rest * 41.0 / 74.0, x4, x5]
}

//! Adaptive embedded Runge–Kutta 5(4) (Dormand–Prince) on fixed-size real
//! systems. Used only by the independent ODE oracles; the production solution
//! path is the closed-form representation in [`crate::multipliers`].

/// Step-size control failed: the controller drove h below the floor or the
/// step budget ran out before reaching `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFailure {
    pub t_reached: f64,
    pub h: f64,
    pub steps: usize,
}

const MAX_STEPS: usize = 50_000_000;

/// Floor of the error scale. Effectively pure relative control: states that
/// decay by hundreds of e-foldings must be tracked relative to their current
/// size or the tail degenerates into tolerance-scale noise, which would
/// swamp a relative comparison against the closed form. The floor only
/// prevents a 0/0 once a component underflows to exact zero.
const ATOL_FLOOR: f64 = 1e-290;

/// Integrate y' = f(t, y) from (0, y0) to t_end with local error tolerance
/// `tol`, applied component-wise relative to the current state size.
pub fn integrate<const N: usize>(
    f: impl Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    tol: f64,
) -> Result<[f64; N], StepFailure> {
    debug_assert!(tol > 0.0 && t_end >= 0.0);
    if t_end == 0.0 {
        return Ok(y0);
    }

    // Butcher tableau, Dormand–Prince 5(4).
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut t = 0.0;
    let mut y = y0;
    let mut h = (t_end / 100.0).clamp(1e-10, 1e-2);
    let h_min = 1e-13 * t_end.max(1.0);
    let mut steps = 0usize;

    while t < t_end {
        if steps >= MAX_STEPS || h < h_min {
            return Err(StepFailure {
                t_reached: t,
                h,
                steps,
            });
        }
        steps += 1;
        h = h.min(t_end - t);

        let mut k = [[0.0; N]; 7];
        k[0] = f(t, &y);
        for stage in 0..6 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(stage + 1) {
                let a = A[stage][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[stage + 1] = f(t + C[stage] * h, &ys);
        }

        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            for i in 0..N {
                y5[i] += h * B5[j] * kj[i];
                y4[i] += h * B4[j] * kj[i];
            }
        }

        let mut err_sq = 0.0;
        for i in 0..N {
            let sc = ATOL_FLOOR + tol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4[i]) / sc;
            err_sq += e * e;
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &[f64; 1]| [-2.0 * y[0]], [1.0], 3.0, 1e-10).unwrap();
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-9, "got {}", y[0]);
    }

    #[test]
    fn harmonic_oscillator_phase() {
        // y'' = -w² y over many periods; checks phase accuracy of the pair.
        let w = 5.0;
        let y = integrate(
            |_, y: &[f64; 2]| [y[1], -w * w * y[0]],
            [1.0, 0.0],
            20.0,
            1e-11,
        )
        .unwrap();
        assert!((y[0] - (w * 20.0).cos()).abs() < 1e-7);
        assert!((y[1] + w * (w * 20.0).sin()).abs() < 1e-6);
    }

    #[test]
    fn zero_horizon_returns_initial() {
        let y = integrate(|_, y: &[f64; 1]| [y[0]], [4.0], 0.0, 1e-8).unwrap();
        assert_eq!(y[0], 4.0);
    }
}

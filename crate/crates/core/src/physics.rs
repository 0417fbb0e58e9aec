//! Ideal-gas Euler equations: variable transforms, fluxes, wave speeds and
//! the mathematical entropy pair `S = -rho s / (gamma - 1)`, `F_d = v_d S`
//! with `s = ln p - gamma ln rho`.

use crate::error::DgError;

pub const NVAR: usize = 5;

/// Conservative variables `(rho, rho v1, rho v2, rho v3, E)`.
pub type StateVector = [f64; NVAR];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    gamma: f64,
}

impl GasParams {
    pub fn new(gamma: f64) -> Result<Self, DgError> {
        if gamma > 1.0 && gamma.is_finite() {
            Ok(GasParams { gamma })
        } else {
            Err(DgError::InvalidGamma(gamma))
        }
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl Default for GasParams {
    fn default() -> Self {
        GasParams { gamma: 1.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[repr(transparent)]
pub struct ConservativeState(pub StateVector);

impl ConservativeState {
    pub fn new(rho: f64, mom: [f64; 3], energy: f64) -> Self {
        ConservativeState([rho, mom[0], mom[1], mom[2], energy])
    }

    pub fn rho(&self) -> f64 {
        self.0[0]
    }

    pub fn momentum(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    pub fn energy(&self) -> f64 {
        self.0[4]
    }
}

impl From<StateVector> for ConservativeState {
    fn from(u: StateVector) -> Self {
        ConservativeState(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub v: [f64; 3],
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyVariables {
    pub w: StateVector,
    /// `rho / (2 p)`, inverse temperature up to a constant.
    pub beta: f64,
}

#[inline]
fn check_positive(quantity: &'static str, value: f64) -> Result<(), DgError> {
    // `!(x > 0)` also rejects NaN.
    if !(value > 0.0) {
        return Err(DgError::InvalidState { quantity, value });
    }
    Ok(())
}

/// Pressure from conservative variables, no validation.
#[inline]
pub fn pressure(u: &StateVector, gamma: f64) -> f64 {
    let ke = 0.5 * (u[1] * u[1] + u[2] * u[2] + u[3] * u[3]) / u[0];
    (gamma - 1.0) * (u[4] - ke)
}

pub fn cons_to_prim(u: &ConservativeState, gas: &GasParams) -> Result<PrimitiveState, DgError> {
    prim_from_vector(&u.0, gas.gamma)
}

#[inline]
pub(crate) fn prim_from_vector(u: &StateVector, gamma: f64) -> Result<PrimitiveState, DgError> {
    let rho = u[0];
    check_positive("density", rho)?;
    let inv = 1.0 / rho;
    let v = [u[1] * inv, u[2] * inv, u[3] * inv];
    let p = (gamma - 1.0) * (u[4] - 0.5 * rho * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]));
    check_positive("pressure", p)?;
    Ok(PrimitiveState { rho, v, p })
}

pub fn prim_to_cons(q: &PrimitiveState, gas: &GasParams) -> Result<ConservativeState, DgError> {
    check_positive("density", q.rho)?;
    check_positive("pressure", q.p)?;
    Ok(ConservativeState(prim_to_vector(q, gas.gamma)))
}

#[inline]
pub(crate) fn prim_to_vector(q: &PrimitiveState, gamma: f64) -> StateVector {
    let v2 = q.v[0] * q.v[0] + q.v[1] * q.v[1] + q.v[2] * q.v[2];
    [
        q.rho,
        q.rho * q.v[0],
        q.rho * q.v[1],
        q.rho * q.v[2],
        q.p / (gamma - 1.0) + 0.5 * q.rho * v2,
    ]
}

/// Euler flux along axis `dir` (0, 1 or 2) from validated primitives and
/// the matching conservative state.
#[inline]
pub(crate) fn flux_from_prim(u: &StateVector, q: &PrimitiveState, dir: usize) -> StateVector {
    let vd = q.v[dir];
    let mut f = [
        u[0] * vd,
        u[1] * vd,
        u[2] * vd,
        u[3] * vd,
        (u[4] + q.p) * vd,
    ];
    f[1 + dir] += q.p;
    f
}

/// Physical flux `f_dir(u)`, `dir` in 0..3 (x, y, z).
pub fn physical_flux(u: &ConservativeState, dir: usize, gas: &GasParams) -> Result<StateVector, DgError> {
    assert!(dir < 3, "axis index must be 0, 1 or 2");
    let q = prim_from_vector(&u.0, gas.gamma)?;
    Ok(flux_from_prim(&u.0, &q, dir))
}

pub fn sound_speed(q: &PrimitiveState, gas: &GasParams) -> Result<f64, DgError> {
    check_positive("density", q.rho)?;
    check_positive("pressure", q.p)?;
    Ok((gas.gamma * q.p / q.rho).sqrt())
}

pub fn max_wave_speed(q: &PrimitiveState, dir: usize, gas: &GasParams) -> Result<f64, DgError> {
    Ok(q.v[dir].abs() + sound_speed(q, gas)?)
}

#[inline]
pub(crate) fn entropy_vars_from_prim(q: &PrimitiveState, gamma: f64) -> EntropyVariables {
    let s = q.p.ln() - gamma * q.rho.ln();
    let beta = 0.5 * q.rho / q.p;
    let v2 = q.v[0] * q.v[0] + q.v[1] * q.v[1] + q.v[2] * q.v[2];
    EntropyVariables {
        w: [
            (gamma - s) / (gamma - 1.0) - beta * v2,
            2.0 * beta * q.v[0],
            2.0 * beta * q.v[1],
            2.0 * beta * q.v[2],
            -2.0 * beta,
        ],
        beta,
    }
}

pub fn entropy_variables(u: &ConservativeState, gas: &GasParams) -> Result<EntropyVariables, DgError> {
    let q = prim_from_vector(&u.0, gas.gamma)?;
    Ok(entropy_vars_from_prim(&q, gas.gamma))
}

pub fn total_entropy(u: &ConservativeState, gas: &GasParams) -> Result<f64, DgError> {
    let q = prim_from_vector(&u.0, gas.gamma)?;
    let s = q.p.ln() - gas.gamma * q.rho.ln();
    Ok(-q.rho * s / (gas.gamma - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const G: f64 = 1.4;

    fn gas() -> GasParams {
        GasParams::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    prop_compose! {
        fn prim_state()(rho in 0.1f64..5.0, v0 in -3.0f64..3.0, v1 in -3.0f64..3.0,
                        v2 in -3.0f64..3.0, p in 0.1f64..5.0) -> PrimitiveState {
            PrimitiveState { rho, v: [v0, v1, v2], p }
        }
    }

    #[test]
    fn rejects_bad_gamma() {
        assert!(GasParams::new(1.0).is_err());
        assert!(GasParams::new(f64::NAN).is_err());
        assert_eq!(GasParams::new(1.4).unwrap().gamma(), 1.4);
    }

    #[test]
    fn cons_to_prim_examples() {
        let u = ConservativeState::new(1.0, [0.0; 3], 1.0 / (G - 1.0));
        let q = cons_to_prim(&u, &gas()).unwrap();
        assert_eq!(q.v, [0.0; 3]);
        assert!(close(q.p, 1.0, 1e-15));

        let u = ConservativeState::new(1.0, [1.0, 0.0, 0.0], 2.285714);
        let q = cons_to_prim(&u, &gas()).unwrap();
        assert_eq!(q.v, [1.0, 0.0, 0.0]);
        assert!(close(q.p, 0.714286, 1e-6));

        let u = ConservativeState::new(1.0, [0.0; 3], -1.0);
        assert!(matches!(
            cons_to_prim(&u, &gas()),
            Err(DgError::InvalidState { quantity: "pressure", .. })
        ));
        let u = ConservativeState::new(-1.0, [0.0; 3], 1.0);
        assert!(matches!(
            cons_to_prim(&u, &gas()),
            Err(DgError::InvalidState { quantity: "density", .. })
        ));
    }

    #[test]
    fn prim_to_cons_examples() {
        let u = prim_to_cons(&PrimitiveState { rho: 1.0, v: [0.0; 3], p: 1.0 }, &gas()).unwrap();
        for (a, b) in u.0.iter().zip([1.0, 0.0, 0.0, 0.0, 2.5]) {
            assert!(close(*a, b, 1e-15));
        }
        let u = prim_to_cons(&PrimitiveState { rho: 1.0, v: [1.0, 0.0, 0.0], p: 1.0 / G }, &gas()).unwrap();
        assert!(close(u.energy(), 2.285714, 1e-6));
        assert!(prim_to_cons(&PrimitiveState { rho: 1.0, v: [0.0; 3], p: 0.0 }, &gas()).is_err());
    }

    #[test]
    fn flux_examples() {
        let g = gas();
        let still = prim_to_cons(&PrimitiveState { rho: 1.0, v: [0.0; 3], p: 1.0 }, &g).unwrap();
        assert_eq!(physical_flux(&still, 0, &g).unwrap(), [0.0, 1.0, 0.0, 0.0, 0.0]);

        let moving = prim_to_cons(&PrimitiveState { rho: 1.0, v: [1.0, 0.0, 0.0], p: 1.0 / G }, &g).unwrap();
        let f1 = physical_flux(&moving, 0, &g).unwrap();
        for (a, b) in f1.iter().zip([1.0, 1.714286, 0.0, 0.0, 3.0]) {
            assert!(close(*a, b, 1e-6));
        }
        let f2 = physical_flux(&moving, 1, &g).unwrap();
        for (a, b) in f2.iter().zip([0.0, 0.0, 0.714286, 0.0, 0.0]) {
            assert!(close(*a, b, 1e-6));
        }
    }

    #[test]
    fn wave_speeds() {
        let g = gas();
        let q = |rho, v| PrimitiveState { rho, v, p: 1.0 / G };
        assert!(close(sound_speed(&q(1.0, [0.0; 3]), &g).unwrap(), 1.0, 1e-15));
        assert!(close(sound_speed(&q(1.1, [0.0; 3]), &g).unwrap(), 0.9535, 1e-4));
        assert!(close(sound_speed(&q(0.9, [0.0; 3]), &g).unwrap(), 1.0541, 1e-4));
        assert!(close(max_wave_speed(&q(1.0, [0.0; 3]), 0, &g).unwrap(), 1.0, 1e-15));
        assert!(close(max_wave_speed(&q(1.0, [2.5, 2.4, 0.0]), 0, &g).unwrap(), 3.5, 1e-15));
        assert!(close(max_wave_speed(&q(1.0, [0.1, 0.15, 0.0]), 1, &g).unwrap(), 1.15, 1e-15));
    }

    #[test]
    fn entropy_examples() {
        let g = gas();
        let u = prim_to_cons(&PrimitiveState { rho: 1.0, v: [0.0; 3], p: 1.0 }, &g).unwrap();
        let w = entropy_variables(&u, &g).unwrap();
        assert_eq!(w.beta, 0.5);
        for (a, b) in w.w.iter().zip([3.5, 0.0, 0.0, 0.0, -1.0]) {
            assert!(close(*a, b, 1e-14));
        }
        assert_eq!(total_entropy(&u, &g).unwrap(), 0.0);

        let u = prim_to_cons(&PrimitiveState { rho: 1.0, v: [1.0, 0.0, 0.0], p: 1.0 }, &g).unwrap();
        let w = entropy_variables(&u, &g).unwrap();
        for (a, b) in w.w.iter().zip([3.0, 1.0, 0.0, 0.0, -1.0]) {
            assert!(close(*a, b, 1e-14));
        }

        let u = prim_to_cons(&PrimitiveState { rho: 1.0, v: [0.0; 3], p: 0.4f64.exp() }, &g).unwrap();
        assert!(close(total_entropy(&u, &g).unwrap(), -1.0, 1e-14));
    }

    #[test]
    fn stagnant_flux_is_pressure_only() {
        let g = gas();
        let u = prim_to_cons(&PrimitiveState { rho: 0.7, v: [0.0; 3], p: 2.3 }, &g).unwrap();
        for dir in 0..3 {
            let f = physical_flux(&u, dir, &g).unwrap();
            assert_eq!(f[0], 0.0);
            assert_eq!(f[4], 0.0);
            for k in 0..3 {
                assert_eq!(f[1 + k], if k == dir { 2.3 } else { 0.0 });
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn prim_cons_round_trip(q in prim_state()) {
            let g = gas();
            let u = prim_to_cons(&q, &g).unwrap();
            let back = cons_to_prim(&u, &g).unwrap();
            prop_assert!(close(back.rho, q.rho, 1e-14 * q.rho));
            for k in 0..3 {
                prop_assert!(close(back.v[k], q.v[k], 1e-14 * (1.0 + q.v[k].abs())));
            }
            // Pressure is recovered from E - ke, so cancellation scales with ke/p.
            let v2: f64 = q.v.iter().map(|v| v * v).sum();
            let scale = q.p + 0.5 * q.rho * v2 * (G - 1.0);
            prop_assert!(close(back.p, q.p, 1e-14 * scale * 4.0));
        }

        #[test]
        fn entropy_variables_are_entropy_gradient(q in prim_state(), seed in 0u64..1000) {
            let g = gas();
            let u = prim_to_cons(&q, &g).unwrap().0;
            let w = entropy_vars_from_prim(&q, G).w;
            prop_assert!(w[4] < 0.0);
            let s = |u: StateVector| total_entropy(&ConservativeState(u), &g).unwrap();
            for k in 0..NVAR {
                let h = 1e-6 * (1.0 + u[k].abs()) * (1.0 + 0.1 * ((seed + k as u64) % 3) as f64);
                let mut up = u;
                let mut um = u;
                up[k] += h;
                um[k] -= h;
                let fd = (s(up) - s(um)) / (2.0 * h);
                prop_assert!((fd - w[k]).abs() <= 1e-6 * (1.0 + w[k].abs()), "k={} fd={} w={}", k, fd, w[k]);
            }
        }
    }
}

//! Quick property checks run by `dgsem selftest`: operators, fluxes and the
//! semidiscrete entropy balance. Takes well under a second in release mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dg::{Dgsem, SchemeConfig, VolumeMode};
use crate::flux::{flux_along_axis, physical_flux_vector, FluxKind};
use crate::mesh::MeshTopology;
use crate::physics::{entropy_vars_from_prim, prim_from_vector, prim_to_vector, PrimitiveState, StateVector, NVAR};
use crate::spectral::{NodalOperator, NodeFamily};

const GAMMA: f64 = 1.4;

/// Outcome of one property: the worst observed value against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub worst: f64,
    pub bound: f64,
}

impl Check {
    fn new(name: impl Into<String>, worst: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            worst,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        self.worst <= self.bound
    }
}

/// Largest residuals of the SBP identity, quadrature exactness and
/// polynomial differentiation over degrees `1..=max_degree`.
pub fn operator_checks(max_degree: usize) -> Vec<Check> {
    let (mut sbp, mut quad, mut diff) = (0.0f64, 0.0f64, 0.0f64);
    for family in NodeFamily::ALL {
        for n in 1..=max_degree {
            let op = NodalOperator::new(family, n).expect("valid degree");
            let (x, w, d) = (op.nodes(), op.weights(), op.diff_matrix());
            let np = n + 1;
            let (lm, lp) = (op.l_minus(), op.l_plus());
            for i in 0..np {
                for j in 0..np {
                    let q = w[i] * d[i * np + j] + w[j] * d[j * np + i];
                    sbp = sbp.max((q - (lp[i] * lp[j] - lm[i] * lm[j])).abs());
                }
            }
            for k in 0..=family.exactness_degree(n) {
                let exact = if k % 2 == 0 { 2.0 / (k + 1) as f64 } else { 0.0 };
                let s: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                quad = quad.max((s - exact).abs());
            }
            for k in 0..=n {
                let vals: Vec<f64> = x.iter().map(|xi| xi.powi(k as i32)).collect();
                let dv = op.differentiate(&vals).expect("matching length");
                for (xi, di) in x.iter().zip(&dv) {
                    let exact = if k == 0 { 0.0 } else { k as f64 * xi.powi(k as i32 - 1) };
                    diff = diff.max((di - exact).abs());
                }
            }
        }
    }
    vec![
        Check::new("SBP identity", sbp, 1e-12),
        Check::new("quadrature exactness", quad, 1e-12),
        Check::new("differentiation exactness", diff, 1e-12),
    ]
}

pub fn random_state(rng: &mut ChaCha8Rng) -> StateVector {
    let q = PrimitiveState {
        rho: rng.gen_range(0.2..3.0),
        v: [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
        p: rng.gen_range(0.2..3.0),
    };
    prim_to_vector(&q, GAMMA)
}

/// `[[w]] . F* - [[rho v_axis]]`, negative when the flux dissipates entropy.
pub fn entropy_production(kind: FluxKind, l: &StateVector, r: &StateVector, axis: usize) -> f64 {
    let f = flux_along_axis(kind, l, r, axis, GAMMA).expect("admissible states");
    let wl = entropy_vars_from_prim(&prim_from_vector(l, GAMMA).expect("admissible"), GAMMA).w;
    let wr = entropy_vars_from_prim(&prim_from_vector(r, GAMMA).expect("admissible"), GAMMA).w;
    let jump: f64 = (0..NVAR).map(|k| (wr[k] - wl[k]) * f[k]).sum();
    jump - (r[1 + axis] - l[1 + axis])
}

/// Consistency, the entropy-conservation identity and one-sided entropy
/// production on `pairs` random state pairs. Fluxes that are not entropy
/// stable are reported by [`entropy_violation`] instead.
pub fn flux_checks(pairs: usize, seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut consistency, mut ec) = (0.0f64, 0.0f64);
    let mut production = 0.0f64;
    for _ in 0..pairs {
        let (l, r) = (random_state(&mut rng), random_state(&mut rng));
        let axis = rng.gen_range(0..3);
        for kind in FluxKind::ALL {
            let f = flux_along_axis(kind, &l, &l, axis, GAMMA).expect("admissible");
            let exact = physical_flux_vector(&l, axis, GAMMA).expect("admissible");
            for k in 0..NVAR {
                consistency = consistency.max((f[k] - exact[k]).abs() / exact[k].abs().max(1.0));
            }
        }
        ec = ec.max(entropy_production(FluxKind::Eckep, &l, &r, axis).abs());
        for kind in ENTROPY_STABLE {
            production = production.max(entropy_production(kind, &l, &r, axis));
        }
    }
    vec![
        Check::new("flux consistency", consistency, 1e-13),
        Check::new("ECKEP entropy conservation", ec, 1e-11),
        Check::new("entropy production of LLF, HLL, HLLC, ECKEP-LLF, ECKEP-Roe", production, 1e-12),
        contact_check(),
    ]
}

pub const ENTROPY_STABLE: [FluxKind; 5] = [
    FluxKind::Llf,
    FluxKind::Hll,
    FluxKind::Hllc,
    FluxKind::EckepLlf,
    FluxKind::EckepRoe,
];

/// Worst entropy production of `kind` on random pairs. Positive values mean
/// the flux can create entropy.
pub fn entropy_violation(kind: FluxKind, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pairs)
        .map(|_| {
            let (l, r) = (random_state(&mut rng), random_state(&mut rng));
            let axis = rng.gen_range(0..3);
            entropy_production(kind, &l, &r, axis)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Mass flux across a stationary contact (density jump at constant
/// pressure): zero for contact-resolving fluxes, nonzero otherwise.
pub fn contact_mass_flux(kind: FluxKind) -> f64 {
    let l = prim_to_vector(&PrimitiveState { rho: 1.0, v: [0.0; 3], p: 1.0 }, GAMMA);
    let r = prim_to_vector(&PrimitiveState { rho: 2.0, v: [0.0; 3], p: 1.0 }, GAMMA);
    flux_along_axis(kind, &l, &r, 0, GAMMA).expect("admissible")[0]
}

fn contact_check() -> Check {
    let resolved = [FluxKind::Roe, FluxKind::Hllc, FluxKind::EckepRoe]
        .into_iter()
        .map(|k| contact_mass_flux(k).abs())
        .fold(0.0, f64::max);
    let smeared = [FluxKind::Llf, FluxKind::Hll, FluxKind::EckepLlf]
        .into_iter()
        .map(|k| contact_mass_flux(k).abs())
        .fold(f64::INFINITY, f64::min);
    // passes when the resolving fluxes are exact and the others are not
    let worst = if smeared > 1e-3 { resolved } else { f64::INFINITY };
    Check::new("stationary contact transparency", worst, 1e-14)
}

/// Entropy rate of the split ECKEP scheme on random smooth data and of a
/// dissipative split scheme, on a small periodic mesh.
pub fn semidiscrete_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phase: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..std::f64::consts::TAU));
    let field = |x: [f64; 3], e: usize| {
        let s = (std::f64::consts::PI * (x[0] + phase[0])).sin();
        let c = (std::f64::consts::PI * (x[1] + phase[1])).cos();
        let q = PrimitiveState {
            rho: 1.0 + 0.2 * s * c + 0.01 * (e % 3) as f64,
            v: [0.3 * c, -0.2 * s, 0.1 * (x[2] + phase[2]).sin()],
            p: 1.0 + 0.1 * (std::f64::consts::PI * x[0] + phase[3]).cos(),
        };
        prim_to_vector(&q, GAMMA)
    };
    let mut checks = Vec::new();
    for (kind, name) in [(FluxKind::Eckep, "split ECKEP |entropy rate|"), (FluxKind::EckepRoe, "split ECKEP-Roe entropy rate")] {
        let s = SchemeConfig::new(NodeFamily::Lgl, 3, VolumeMode::Split, kind).expect("valid scheme");
        let dg = Dgsem::new(s, MeshTopology::new(3, 3, 2).expect("valid mesh")).expect("valid solver");
        let mut u = dg.zeros();
        for e in 0..dg.mesh().n_elements() {
            let xs = dg.element_coordinates(e).to_vec();
            for (node, x) in u.element_mut(e).iter_mut().zip(xs) {
                *node = field(x, e);
            }
        }
        let mut rate = dg.zeros();
        let mut ws = dg.workspace();
        dg.rhs(&u, &mut rate, &mut ws).expect("admissible data");
        let de = dg.entropy_rate(&u, &rate).expect("admissible data");
        let worst = if kind == FluxKind::Eckep { de.abs() } else { de };
        checks.push(Check::new(name, worst, 1e-10));
    }
    checks
}

pub fn run_all() -> Vec<Check> {
    let mut all = operator_checks(8);
    all.extend(flux_checks(10_000, 1));
    all.extend(semidiscrete_checks(2));
    all
}

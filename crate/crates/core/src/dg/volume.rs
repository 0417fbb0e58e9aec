//! Element volume terms.
//!
//! Nodes of an element are stored with the x index fastest:
//! `idx = i + n (j + n k)`. A line along axis `d` is addressed by its
//! tangential index `t` (see [`line_base`]) and the stride `n^d`.

use crate::error::DgError;
use crate::flux::{eckep_aux, eckep_self, EcAux};
use crate::physics::{flux_from_prim, prim_from_vector, PrimitiveState, StateVector, NVAR};
use crate::spectral::{NodalOperator, NodeFamily};

/// First node index and stride of line `t` along `axis`.
#[inline]
pub(crate) fn line_base(axis: usize, t: usize, n: usize) -> (usize, usize) {
    match axis {
        0 => (n * t, 1),
        1 => ((t % n) + n * n * (t / n), n),
        _ => (t, n * n),
    }
}

/// Two-point flux usable in flux-differencing volume integrals. Must be
/// symmetric and consistent with the physical flux.
pub trait VolumeFlux: Sync {
    type Aux: Copy + Default + Send;

    fn aux(&self, u: &StateVector, q: &PrimitiveState, gamma: f64) -> Self::Aux;

    fn flux(&self, a: &Self::Aux, b: &Self::Aux, axis: usize, gamma: f64) -> StateVector;

    /// `flux(a, a)`, bit for bit. Override when it can be had cheaper.
    #[inline]
    fn self_flux(&self, a: &Self::Aux, axis: usize, gamma: f64) -> StateVector {
        self.flux(a, a, axis, gamma)
    }
}

/// The entropy-conserving, kinetic-energy-preserving two-point flux.
#[derive(Debug, Clone, Copy, Default)]
pub struct EckepVolumeFlux;

impl VolumeFlux for EckepVolumeFlux {
    type Aux = EcAux;

    #[inline]
    fn aux(&self, _u: &StateVector, q: &PrimitiveState, _gamma: f64) -> EcAux {
        EcAux::from_prim(q)
    }

    #[inline]
    fn flux(&self, a: &EcAux, b: &EcAux, axis: usize, gamma: f64) -> StateVector {
        eckep_aux(a, b, axis, gamma)
    }

    #[inline]
    fn self_flux(&self, a: &EcAux, axis: usize, gamma: f64) -> StateVector {
        eckep_self(a, axis, gamma)
    }
}

/// Arithmetic mean of the physical fluxes. Flux differencing with it
/// reproduces the standard strong-form volume term on LGL nodes.
#[derive(Debug, Clone, Copy, Default)]
pub struct CentralVolumeFlux;

impl VolumeFlux for CentralVolumeFlux {
    type Aux = [StateVector; 3];

    #[inline]
    fn aux(&self, u: &StateVector, q: &PrimitiveState, _gamma: f64) -> [StateVector; 3] {
        std::array::from_fn(|d| flux_from_prim(u, q, d))
    }

    #[inline]
    fn flux(&self, a: &[StateVector; 3], b: &[StateVector; 3], axis: usize, _gamma: f64) -> StateVector {
        std::array::from_fn(|k| 0.5 * (a[axis][k] + b[axis][k]))
    }
}

#[inline]
pub(crate) fn validated_prims(
    elem: &[StateVector],
    gamma: f64,
    element: usize,
    out: &mut [PrimitiveState],
) -> Result<(), DgError> {
    for (node, (u, q)) in elem.iter().zip(out.iter_mut()).enumerate() {
        *q = prim_from_vector(u, gamma).map_err(|e| e.at_node(element, node))?;
    }
    Ok(())
}

/// Strong-form standard volume term `-sum_d (2/h_d) D f_d(u)` of one element.
pub fn volume_integral_standard(
    elem: &[StateVector],
    op: &NodalOperator,
    h: [f64; 3],
    gamma: f64,
) -> Result<Vec<StateVector>, DgError> {
    let n = op.len();
    check_len(elem, n)?;
    let mut prims = vec![PrimitiveState { rho: 0.0, v: [0.0; 3], p: 0.0 }; elem.len()];
    validated_prims(elem, gamma, 0, &mut prims)?;
    let mut rate = vec![[0.0; NVAR]; elem.len()];
    for axis in 0..3 {
        let scale = -2.0 / h[axis];
        let fluxes: Vec<StateVector> = elem
            .iter()
            .zip(&prims)
            .map(|(u, q)| flux_from_prim(u, q, axis))
            .collect();
        for t in 0..n * n {
            let (base, stride) = line_base(axis, t, n);
            for i in 0..n {
                let r = &mut rate[base + stride * i];
                for m in 0..n {
                    let dim = op.d(i, m) * scale;
                    let f = &fluxes[base + stride * m];
                    for k in 0..NVAR {
                        r[k] += dim * f[k];
                    }
                }
            }
        }
    }
    Ok(rate)
}

/// Split-form volume term `-sum_d (2/h_d) 2 sum_m D_im F#(u_i, u_m)` with
/// the ECKEP two-point flux. Requires LGL nodes.
pub fn volume_integral_split(
    elem: &[StateVector],
    op: &NodalOperator,
    h: [f64; 3],
    gamma: f64,
) -> Result<Vec<StateVector>, DgError> {
    volume_integral_split_with(elem, op, h, gamma, &EckepVolumeFlux)
}

pub fn volume_integral_split_with<F: VolumeFlux>(
    elem: &[StateVector],
    op: &NodalOperator,
    h: [f64; 3],
    gamma: f64,
    flux: &F,
) -> Result<Vec<StateVector>, DgError> {
    if op.family() != NodeFamily::Lgl {
        return Err(DgError::Config(
            "split-form volume integral requires LGL nodes (diagonal-norm SBP with boundary nodes)".into(),
        ));
    }
    let n = op.len();
    check_len(elem, n)?;
    let mut prims = vec![PrimitiveState { rho: 0.0, v: [0.0; 3], p: 0.0 }; elem.len()];
    validated_prims(elem, gamma, 0, &mut prims)?;
    let aux: Vec<F::Aux> = elem
        .iter()
        .zip(&prims)
        .map(|(u, q)| flux.aux(u, q, gamma))
        .collect();
    let d2: Vec<f64> = op.diff_matrix().iter().map(|d| 2.0 * d).collect();
    let mut rate = vec![[0.0; NVAR]; elem.len()];
    split_volume_kernel(&aux, &d2, n, h, gamma, flux, &mut rate);
    Ok(rate)
}

/// Accumulates the split-form volume term into `rate`. `d2` is `2 D`,
/// row-major. Uses the symmetry of the two-point flux to evaluate each
/// pair once.
#[allow(clippy::too_many_arguments)]
#[inline]
pub(crate) fn split_volume_kernel<F: VolumeFlux>(
    aux: &[F::Aux],
    d2: &[f64],
    n: usize,
    h: [f64; 3],
    gamma: f64,
    flux: &F,
    rate: &mut [StateVector],
) {
    let mut diag = vec![[0.0; NVAR]; n];
    for axis in 0..3 {
        let scale = -2.0 / h[axis];
        for t in 0..n * n {
            let (base, stride) = line_base(axis, t, n);
            // rows use F#(u_m, u_i) - F#(u_i, u_i); the D rows sum to zero,
            // so this is exact algebra and vanishes bitwise on uniform data
            for i in 0..n {
                diag[i] = flux.self_flux(&aux[base + stride * i], axis, gamma);
            }
            for i in 0..n {
                let ii = base + stride * i;
                for m in i + 1..n {
                    let mm = base + stride * m;
                    let f = flux.flux(&aux[ii], &aux[mm], axis, gamma);
                    let dim = d2[i * n + m] * scale;
                    let dmi = d2[m * n + i] * scale;
                    for k in 0..NVAR {
                        rate[ii][k] += dim * (f[k] - diag[i][k]);
                        rate[mm][k] += dmi * (f[k] - diag[m][k]);
                    }
                }
            }
        }
    }
}

fn check_len(elem: &[StateVector], n: usize) -> Result<(), DgError> {
    if elem.len() != n * n * n {
        return Err(DgError::LengthMismatch {
            expected: n * n * n,
            got: elem.len(),
        });
    }
    Ok(())
}

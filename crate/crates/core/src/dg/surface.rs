//! Face traces, interface fluxes and the strong-form surface term.
//!
//! Traces of one element are stored per face in the order
//! `-x, +x, -y, +y, -z, +z`, each with `n^2` entries addressed by the
//! tangential line index of [`line_base`](super::volume::line_base).

use crate::error::DgError;
use crate::physics::{flux_from_prim, prim_from_vector, StateVector, NVAR};
use crate::spectral::{NodalOperator, NodeFamily};

use super::volume::line_base;

/// Writes the six face traces of `elem` into `out` (`6 n^2` entries).
#[inline]
pub fn element_traces(elem: &[StateVector], op: &NodalOperator, out: &mut [StateVector]) {
    let n = op.len();
    let nn = n * n;
    let lgl = op.family() == NodeFamily::Lgl;
    for axis in 0..3 {
        let (minus, rest) = out[2 * axis * nn..(2 * axis + 2) * nn].split_at_mut(nn);
        for t in 0..nn {
            let (base, stride) = line_base(axis, t, n);
            if lgl {
                minus[t] = elem[base];
                rest[t] = elem[base + stride * (n - 1)];
            } else {
                // u_0 + sum_i l_i (u_i - u_0): exact on constants
                let u0 = elem[base];
                let mut a = u0;
                let mut b = u0;
                for i in 1..n {
                    let u = &elem[base + stride * i];
                    let (lm, lp) = (op.l_minus()[i], op.l_plus()[i]);
                    for k in 0..NVAR {
                        let du = u[k] - u0[k];
                        a[k] += lm * du;
                        b[k] += lp * du;
                    }
                }
                minus[t] = a;
                rest[t] = b;
            }
        }
    }
}

/// Strong-form surface term of one element,
/// `-(2/h_d) (l+_i (f*_+ - l+.f) - l-_i (f*_- - l-.f)) / w_i` summed over axes.
/// `fstar_minus[d]` and `fstar_plus[d]` hold the `n^2` interface fluxes
/// along `+e_d` on the lower and upper faces.
pub fn surface_integral(
    elem: &[StateVector],
    op: &NodalOperator,
    h: [f64; 3],
    gamma: f64,
    fstar_minus: [&[StateVector]; 3],
    fstar_plus: [&[StateVector]; 3],
) -> Result<Vec<StateVector>, DgError> {
    let n = op.len();
    let nn = n * n;
    if elem.len() != n * nn {
        return Err(DgError::LengthMismatch {
            expected: n * nn,
            got: elem.len(),
        });
    }
    for f in fstar_minus.iter().chain(fstar_plus.iter()) {
        if f.len() != nn {
            return Err(DgError::LengthMismatch { expected: nn, got: f.len() });
        }
    }
    let w = op.weights();
    let mut rate = vec![[0.0; NVAR]; elem.len()];
    for axis in 0..3 {
        let scale = -2.0 / h[axis];
        for t in 0..nn {
            let (base, stride) = line_base(axis, t, n);
            let mut fm = [0.0; NVAR];
            let mut fp = [0.0; NVAR];
            for i in 0..n {
                let node = base + stride * i;
                let q = prim_from_vector(&elem[node], gamma).map_err(|e| e.at_node(0, node))?;
                let f = flux_from_prim(&elem[node], &q, axis);
                for k in 0..NVAR {
                    fm[k] += op.l_minus()[i] * f[k];
                    fp[k] += op.l_plus()[i] * f[k];
                }
            }
            for i in 0..n {
                let cm = scale * op.l_minus()[i] / w[i];
                let cp = scale * op.l_plus()[i] / w[i];
                let r = &mut rate[base + stride * i];
                for k in 0..NVAR {
                    r[k] += cp * (fstar_plus[axis][t][k] - fp[k]) - cm * (fstar_minus[axis][t][k] - fm[k]);
                }
            }
        }
    }
    Ok(rate)
}

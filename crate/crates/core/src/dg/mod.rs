//! Semi-discrete DGSEM operator on periodic Cartesian meshes.

mod surface;
pub mod volume;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::DgError;
use crate::flux::{flux_along_axis, FluxKind};
use crate::mesh::{Face, MeshTopology};
use crate::physics::{
    entropy_vars_from_prim, flux_from_prim, prim_from_vector, GasParams, PrimitiveState, StateVector, NVAR,
};
use crate::spectral::{NodalOperator, NodeFamily};

pub use surface::{element_traces, surface_integral};
pub use volume::{
    volume_integral_split, volume_integral_split_with, volume_integral_standard, CentralVolumeFlux,
    EckepVolumeFlux, VolumeFlux,
};

use volume::{line_base, split_volume_kernel, validated_prims};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolumeMode {
    /// Collocated `D f(u)`.
    Standard,
    /// Flux differencing with the ECKEP two-point flux.
    Split,
}

impl VolumeMode {
    pub fn name(self) -> &'static str {
        match self {
            VolumeMode::Standard => "standard",
            VolumeMode::Split => "split",
        }
    }
}

impl fmt::Display for VolumeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VolumeMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "standard" | "std" => Ok(VolumeMode::Standard),
            "split" | "split-form" | "flux-differencing" => Ok(VolumeMode::Split),
            other => Err(format!("unknown volume mode `{other}` (expected standard or split)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub nodes: NodeFamily,
    pub degree: usize,
    pub volume: VolumeMode,
    pub flux: FluxKind,
    pub gas: GasParams,
}

impl SchemeConfig {
    pub fn new(nodes: NodeFamily, degree: usize, volume: VolumeMode, flux: FluxKind) -> Result<Self, DgError> {
        let s = SchemeConfig {
            nodes,
            degree,
            volume,
            flux,
            gas: GasParams::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), DgError> {
        if self.degree < 1 {
            return Err(DgError::InvalidDegree(self.degree));
        }
        if self.volume == VolumeMode::Split && self.nodes != NodeFamily::Lgl {
            return Err(DgError::Config(
                "split volume integral requires LGL nodes (SBP operator with boundary nodes)".into(),
            ));
        }
        Ok(())
    }

    /// Short label such as `Gauss-HLL`, `LGL-HLLC` or `Split-ECKEP-Roe`.
    pub fn label(&self) -> String {
        match self.volume {
            VolumeMode::Split => format!("Split-{}", self.flux.label()),
            VolumeMode::Standard => {
                let fam = match self.nodes {
                    NodeFamily::Gauss => "Gauss",
                    NodeFamily::Lgl => "LGL",
                };
                format!("{fam}-{}", self.flux.label())
            }
        }
    }
}

impl fmt::Display for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} N={}", self.label(), self.degree)
    }
}

/// Nodal values of all elements, element-major with `(N+1)^3` states each.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    nodes_per_element: usize,
    data: Vec<StateVector>,
}

impl Solution {
    pub fn zeros(n_elements: usize, nodes_per_element: usize) -> Self {
        Solution {
            nodes_per_element,
            data: vec![[0.0; NVAR]; n_elements * nodes_per_element],
        }
    }

    pub fn from_vec(nodes_per_element: usize, data: Vec<StateVector>) -> Result<Self, DgError> {
        if nodes_per_element == 0 || !data.len().is_multiple_of(nodes_per_element) {
            return Err(DgError::LengthMismatch {
                expected: nodes_per_element * (data.len() / nodes_per_element.max(1) + 1),
                got: data.len(),
            });
        }
        Ok(Solution { nodes_per_element, data })
    }

    pub fn nodes_per_element(&self) -> usize {
        self.nodes_per_element
    }

    pub fn n_elements(&self) -> usize {
        self.data.len() / self.nodes_per_element
    }

    pub fn element(&self, e: usize) -> &[StateVector] {
        &self.data[e * self.nodes_per_element..(e + 1) * self.nodes_per_element]
    }

    pub fn element_mut(&mut self, e: usize) -> &mut [StateVector] {
        let n = self.nodes_per_element;
        &mut self.data[e * n..(e + 1) * n]
    }

    pub fn data(&self) -> &[StateVector] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [StateVector] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().flatten().all(|x| x.is_finite())
    }

    pub fn fill(&mut self, value: StateVector) {
        self.data.fill(value);
    }
}

/// Space-time source term `S(x, t)` added to the right-hand side.
pub type SourceFn = dyn Fn([f64; 3], f64) -> StateVector + Send + Sync;

/// Scratch storage for [`Dgsem::rhs`].
#[derive(Debug, Clone)]
pub struct Workspace {
    traces: Vec<StateVector>,
    fstar: Vec<StateVector>,
}

/// The discretization of one scheme on one mesh.
pub struct Dgsem {
    scheme: SchemeConfig,
    op: NodalOperator,
    mesh: MeshTopology,
    n: usize,
    /// `w_m D_mi / w_i`, row-major in `(i, m)`.
    weak_d: Vec<f64>,
    /// `2 D`, row-major.
    d2: Vec<f64>,
    lift_minus: Vec<f64>,
    lift_plus: Vec<f64>,
    coords: Vec<[f64; 3]>,
}

impl fmt::Debug for Dgsem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dgsem")
            .field("scheme", &self.scheme)
            .field("mesh", &self.mesh.counts())
            .finish()
    }
}

impl Dgsem {
    pub fn new(scheme: SchemeConfig, mesh: MeshTopology) -> Result<Self, DgError> {
        scheme.validate()?;
        let op = NodalOperator::new(scheme.nodes, scheme.degree)?;
        let n = op.len();
        let w = op.weights();
        let mut weak_d = vec![0.0; n * n];
        for i in 0..n {
            for m in 0..n {
                weak_d[i * n + m] = w[m] * op.d(m, i) / w[i];
            }
        }
        let d2 = op.diff_matrix().iter().map(|d| 2.0 * d).collect();
        let lift_minus = (0..n).map(|i| op.l_minus()[i] / w[i]).collect();
        let lift_plus = (0..n).map(|i| op.l_plus()[i] / w[i]).collect();
        let mut coords = Vec::with_capacity(mesh.n_elements() * n * n * n);
        for e in 0..mesh.n_elements() {
            coords.extend(mesh.collocation_coordinates(e, &op)?);
        }
        Ok(Dgsem {
            scheme,
            op,
            mesh,
            n,
            weak_d,
            d2,
            lift_minus,
            lift_plus,
            coords,
        })
    }

    pub fn scheme(&self) -> &SchemeConfig {
        &self.scheme
    }

    pub fn operator(&self) -> &NodalOperator {
        &self.op
    }

    pub fn mesh(&self) -> &MeshTopology {
        &self.mesh
    }

    pub fn nodes_per_element(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_elements() * self.nodes_per_element()
    }

    /// Physical coordinates of all nodes, in solution order.
    pub fn coordinates(&self) -> &[[f64; 3]] {
        &self.coords
    }

    pub fn element_coordinates(&self, e: usize) -> &[[f64; 3]] {
        let npe = self.nodes_per_element();
        &self.coords[e * npe..(e + 1) * npe]
    }

    pub fn zeros(&self) -> Solution {
        Solution::zeros(self.mesh.n_elements(), self.nodes_per_element())
    }

    /// Nodal interpolation of a function of space.
    pub fn project<F: Fn([f64; 3]) -> StateVector + Sync>(&self, f: F) -> Solution {
        Solution {
            nodes_per_element: self.nodes_per_element(),
            data: self.coords.par_iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn workspace(&self) -> Workspace {
        let nn = self.n * self.n;
        let ne = self.mesh.n_elements();
        Workspace {
            traces: vec![[0.0; NVAR]; ne * 6 * nn],
            fstar: vec![[0.0; NVAR]; ne * 3 * nn],
        }
    }

    fn check_solution(&self, u: &Solution) -> Result<(), DgError> {
        if u.nodes_per_element != self.nodes_per_element() || u.n_elements() != self.mesh.n_elements() {
            return Err(DgError::LengthMismatch {
                expected: self.n_dofs(),
                got: u.data.len(),
            });
        }
        Ok(())
    }

    /// Face traces of every element (`6 n^2` per element).
    pub fn interface_exchange(&self, u: &Solution, ws: &mut Workspace) -> Result<(), DgError> {
        self.check_solution(u)?;
        let nn = self.n * self.n;
        ws.traces
            .par_chunks_mut(6 * nn)
            .enumerate()
            .for_each(|(e, out)| element_traces(u.element(e), &self.op, out));
        let kind = self.scheme.flux;
        let gamma = self.scheme.gas.gamma();
        let traces = &ws.traces;
        ws.fstar
            .par_chunks_mut(3 * nn)
            .enumerate()
            .try_for_each(|(e, out)| -> Result<(), DgError> {
                for axis in 0..3 {
                    let nb = self.mesh.neighbor(e, Face::new(axis, true));
                    let left = &traces[(e * 6 + 2 * axis + 1) * nn..][..nn];
                    let right = &traces[(nb * 6 + 2 * axis) * nn..][..nn];
                    for t in 0..nn {
                        out[axis * nn + t] = flux_along_axis(kind, &left[t], &right[t], axis, gamma).map_err(|err| {
                            let (base, stride) = line_base(axis, t, self.n);
                            err.at_node(e, base + stride * (self.n - 1))
                        })?;
                    }
                }
                Ok(())
            })
    }

    /// Interface flux on the `+e_axis` face of element `e`, after
    /// [`Self::interface_exchange`].
    pub fn face_flux<'a>(&self, ws: &'a Workspace, e: usize, axis: usize) -> &'a [StateVector] {
        let nn = self.n * self.n;
        &ws.fstar[(e * 3 + axis) * nn..][..nn]
    }

    pub fn rhs(&self, u: &Solution, rate: &mut Solution, ws: &mut Workspace) -> Result<(), DgError> {
        self.rhs_with_source(u, 0.0, None, rate, ws)
    }

    /// `du/dt`, optionally with a source term evaluated at time `t`.
    pub fn rhs_with_source(
        &self,
        u: &Solution,
        t: f64,
        source: Option<&SourceFn>,
        rate: &mut Solution,
        ws: &mut Workspace,
    ) -> Result<(), DgError> {
        self.check_solution(rate)?;
        self.interface_exchange(u, ws)?;
        let npe = self.nodes_per_element();
        let fstar = &ws.fstar;
        match self.scheme.volume {
            VolumeMode::Standard => rate
                .data
                .par_chunks_mut(npe)
                .enumerate()
                .try_for_each_init(
                    || (vec![PRIM_ZERO; npe], vec![[0.0; NVAR]; 3 * npe]),
                    |(prims, fl), (e, out)| self.element_standard(e, u.element(e), fstar, prims, fl, out),
                )?,
            VolumeMode::Split => rate
                .data
                .par_chunks_mut(npe)
                .enumerate()
                .try_for_each_init(
                    || (vec![PRIM_ZERO; npe], vec![Default::default(); npe]),
                    |(prims, aux), (e, out)| self.element_split(e, u.element(e), fstar, prims, aux, out),
                )?,
        }
        if let Some(src) = source {
            rate.data
                .par_iter_mut()
                .zip(self.coords.par_iter())
                .for_each(|(r, &x)| {
                    let s = src(x, t);
                    for k in 0..NVAR {
                        r[k] += s[k];
                    }
                });
        }
        Ok(())
    }

    /// Lower-face flux of element `e` along `axis` (the upper-face flux of its neighbor).
    #[inline]
    fn minus_flux<'a>(&self, fstar: &'a [StateVector], e: usize, axis: usize) -> &'a [StateVector] {
        let nn = self.n * self.n;
        let nb = self.mesh.neighbor(e, Face::new(axis, false));
        &fstar[(nb * 3 + axis) * nn..][..nn]
    }

    #[inline]
    fn plus_flux<'a>(&self, fstar: &'a [StateVector], e: usize, axis: usize) -> &'a [StateVector] {
        let nn = self.n * self.n;
        &fstar[(e * 3 + axis) * nn..][..nn]
    }

    /// Weak form: `(2/h) (sum_m w_m D_mi f_m / w_i - (l+_i f*_+ - l-_i f*_-) / w_i)`.
    fn element_standard(
        &self,
        e: usize,
        elem: &[StateVector],
        fstar: &[StateVector],
        prims: &mut [PrimitiveState],
        fl: &mut [StateVector],
        out: &mut [StateVector],
    ) -> Result<(), DgError> {
        let n = self.n;
        let npe = n * n * n;
        let gamma = self.scheme.gas.gamma();
        validated_prims(elem, gamma, e, prims)?;
        for (node, (u, q)) in elem.iter().zip(prims.iter()).enumerate() {
            for axis in 0..3 {
                fl[axis * npe + node] = flux_from_prim(u, q, axis);
            }
        }
        out.fill([0.0; NVAR]);
        let h = self.mesh.h();
        // Columns of the weak operator sum to lift+ - lift-, so every flux
        // on a line can be taken relative to the line's first node. The
        // differences vanish exactly on uniform data.
        let mut g = vec![[0.0; NVAR]; n];
        for axis in 0..3 {
            let scale = 2.0 / h[axis];
            let f = &fl[axis * npe..(axis + 1) * npe];
            let fm = self.minus_flux(fstar, e, axis);
            let fp = self.plus_flux(fstar, e, axis);
            for t in 0..n * n {
                let (base, stride) = line_base(axis, t, n);
                let f0 = f[base];
                for (m, gm) in g.iter_mut().enumerate() {
                    let fm_ = &f[base + stride * m];
                    *gm = std::array::from_fn(|k| fm_[k] - f0[k]);
                }
                let dp: StateVector = std::array::from_fn(|k| fp[t][k] - f0[k]);
                let dm: StateVector = std::array::from_fn(|k| fm[t][k] - f0[k]);
                for i in 0..n {
                    let row = &self.weak_d[i * n..(i + 1) * n];
                    let mut acc = [0.0; NVAR];
                    for (dw, gm) in row.iter().zip(&g) {
                        for k in 0..NVAR {
                            acc[k] += dw * gm[k];
                        }
                    }
                    let (lm, lp) = (self.lift_minus[i], self.lift_plus[i]);
                    let r = &mut out[base + stride * i];
                    for k in 0..NVAR {
                        r[k] += scale * (acc[k] - lp * dp[k] + lm * dm[k]);
                    }
                }
            }
        }
        Ok(())
    }

    /// Split form on LGL nodes: flux differencing plus boundary correction
    /// at the end nodes.
    fn element_split(
        &self,
        e: usize,
        elem: &[StateVector],
        fstar: &[StateVector],
        prims: &mut [PrimitiveState],
        aux: &mut [<EckepVolumeFlux as VolumeFlux>::Aux],
        out: &mut [StateVector],
    ) -> Result<(), DgError> {
        let n = self.n;
        let gamma = self.scheme.gas.gamma();
        validated_prims(elem, gamma, e, prims)?;
        let vf = EckepVolumeFlux;
        for ((a, u), q) in aux.iter_mut().zip(elem).zip(prims.iter()) {
            *a = vf.aux(u, q, gamma);
        }
        out.fill([0.0; NVAR]);
        let h = self.mesh.h();
        split_volume_kernel(aux, &self.d2, n, h, gamma, &vf, out);
        let (cm, cp) = (self.lift_minus[0], self.lift_plus[n - 1]);
        for axis in 0..3 {
            let scale = -2.0 / h[axis];
            let fm = self.minus_flux(fstar, e, axis);
            let fp = self.plus_flux(fstar, e, axis);
            for t in 0..n * n {
                let (base, stride) = line_base(axis, t, n);
                let first = base;
                let last = base + stride * (n - 1);
                let f0 = flux_from_prim(&elem[first], &prims[first], axis);
                let f1 = flux_from_prim(&elem[last], &prims[last], axis);
                for k in 0..NVAR {
                    out[first][k] += scale * cm * (f0[k] - fm[t][k]);
                    out[last][k] += scale * cp * (fp[t][k] - f1[k]);
                }
            }
        }
        Ok(())
    }

    /// Strong-form assembly from the public element operators. Slower than
    /// [`Self::rhs`]; used as a cross-check.
    pub fn rhs_strong(&self, u: &Solution) -> Result<Solution, DgError> {
        let mut ws = self.workspace();
        self.interface_exchange(u, &mut ws)?;
        let h = self.mesh.h();
        let gamma = self.scheme.gas.gamma();
        let mut rate = self.zeros();
        for e in 0..self.mesh.n_elements() {
            let elem = u.element(e);
            let vol = match self.scheme.volume {
                VolumeMode::Standard => volume_integral_standard(elem, &self.op, h, gamma),
                VolumeMode::Split => volume_integral_split(elem, &self.op, h, gamma),
            }
            .map_err(|err| relocate(err, e))?;
            let fm: [&[StateVector]; 3] = std::array::from_fn(|d| self.minus_flux(&ws.fstar, e, d));
            let fp: [&[StateVector]; 3] = std::array::from_fn(|d| self.plus_flux(&ws.fstar, e, d));
            let surf = surface_integral(elem, &self.op, h, gamma, fm, fp).map_err(|err| relocate(err, e))?;
            for ((r, a), b) in rate.element_mut(e).iter_mut().zip(&vol).zip(&surf) {
                for k in 0..NVAR {
                    r[k] = a[k] + b[k];
                }
            }
        }
        Ok(rate)
    }

    /// Quadrature `sum_e J sum_q w_q g(x_q, u_q)`.
    pub fn integrate<G: Fn([f64; 3], &StateVector) -> f64>(&self, u: &Solution, g: G) -> f64 {
        let w = self.op.weights();
        let n = self.n;
        let jac = self.mesh.jacobian();
        let mut total = 0.0;
        for e in 0..u.n_elements() {
            let elem = u.element(e);
            let xs = self.element_coordinates(e);
            let mut s = 0.0;
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        let q = i + n * (j + n * k);
                        s += w[i] * w[j] * w[k] * g(xs[q], &elem[q]);
                    }
                }
            }
            total += jac * s;
        }
        total
    }

    /// Discrete integrals of the five conserved variables.
    pub fn conserved_totals(&self, u: &Solution) -> StateVector {
        std::array::from_fn(|k| self.integrate(u, |_, s| s[k]))
    }

    /// Discrete integral of the mathematical entropy `-rho s / (gamma - 1)`.
    pub fn total_entropy(&self, u: &Solution) -> Result<f64, DgError> {
        let gamma = self.scheme.gas.gamma();
        self.validate(u)?;
        Ok(self.integrate(u, |_, s| {
            let p = crate::physics::pressure(s, gamma);
            -s[0] * (p.ln() - gamma * s[0].ln()) / (gamma - 1.0)
        }))
    }

    /// Semi-discrete entropy production `sum J w_q w(u_q) . rate_q`.
    pub fn entropy_rate(&self, u: &Solution, rate: &Solution) -> Result<f64, DgError> {
        self.validate(u)?;
        self.check_solution(rate)?;
        let gamma = self.scheme.gas.gamma();
        let w = self.op.weights();
        let n = self.n;
        let jac = self.mesh.jacobian();
        let mut total = 0.0;
        for e in 0..u.n_elements() {
            let (ue, re) = (u.element(e), rate.element(e));
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        let q = i + n * (j + n * k);
                        let p = prim_from_vector(&ue[q], gamma)?;
                        let ev = entropy_vars_from_prim(&p, gamma);
                        let dot: f64 = (0..NVAR).map(|c| ev.w[c] * re[q][c]).sum();
                        total += jac * w[i] * w[j] * w[k] * dot;
                    }
                }
            }
        }
        Ok(total)
    }

    /// Checks positivity of density and pressure at every node.
    pub fn validate(&self, u: &Solution) -> Result<(), DgError> {
        self.check_solution(u)?;
        let gamma = self.scheme.gas.gamma();
        let npe = self.nodes_per_element();
        u.data.iter().enumerate().try_for_each(|(idx, s)| {
            prim_from_vector(s, gamma)
                .map(|_| ())
                .map_err(|err| err.at_node(idx / npe, idx % npe))
        })
    }

    /// Largest `|v_d| + c` per axis over all nodes.
    pub fn max_signal_speeds(&self, u: &Solution) -> Result<[f64; 3], DgError> {
        self.check_solution(u)?;
        let gamma = self.scheme.gas.gamma();
        let npe = self.nodes_per_element();
        u.data
            .par_iter()
            .enumerate()
            .map(|(idx, s)| {
                let q = prim_from_vector(s, gamma).map_err(|err| err.at_node(idx / npe, idx % npe))?;
                let c = (gamma * q.p / q.rho).sqrt();
                Ok([q.v[0].abs() + c, q.v[1].abs() + c, q.v[2].abs() + c])
            })
            .try_reduce(|| [0.0; 3], |a, b| Ok(std::array::from_fn(|d| a[d].max(b[d]))))
    }
}

const PRIM_ZERO: PrimitiveState = PrimitiveState {
    rho: 0.0,
    v: [0.0; 3],
    p: 0.0,
};

fn relocate(err: DgError, element: usize) -> DgError {
    match err {
        DgError::StateAt { node, source, .. } => DgError::StateAt { element, node, source },
        other => other,
    }
}

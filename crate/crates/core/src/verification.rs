//! Smooth test problems, error norms and convergence studies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dg::{Dgsem, SchemeConfig, Solution, SourceFn};
use crate::error::DgError;
use crate::mesh::{RefinementLadder, DOMAIN_VOLUME};
use crate::physics::{prim_to_vector, PrimitiveState, StateVector};
use crate::spectral::{gauss_nodes_and_weights, NodalOperator};
use crate::time::{integrate, TimeControls};

pub const DENSITY_WAVE_AMPLITUDE: f64 = 0.1;

/// Advected sine wave in density with constant velocity and pressure `1/gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityWave {
    pub velocity: [f64; 2],
    pub amplitude: f64,
}

impl DensityWave {
    pub fn new(v1: f64, v2: f64) -> Self {
        DensityWave {
            velocity: [v1, v2],
            amplitude: DENSITY_WAVE_AMPLITUDE,
        }
    }

    pub fn density(&self, x: [f64; 3], t: f64) -> f64 {
        let [v1, v2] = self.velocity;
        1.0 + self.amplitude * (PI * ((x[0] - v1 * t) + (x[1] - v2 * t))).sin()
    }

    /// Mach number of the background state (`c = 1`).
    pub fn mach(&self) -> f64 {
        self.velocity[0].hypot(self.velocity[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachPreset {
    Ma02,
    Ma10,
    Ma35,
}

impl MachPreset {
    pub const ALL: [MachPreset; 3] = [MachPreset::Ma02, MachPreset::Ma10, MachPreset::Ma35];

    pub fn name(self) -> &'static str {
        match self {
            MachPreset::Ma02 => "ma02",
            MachPreset::Ma10 => "ma10",
            MachPreset::Ma35 => "ma35",
        }
    }

    pub fn nominal(self) -> f64 {
        match self {
            MachPreset::Ma02 => 0.2,
            MachPreset::Ma10 => 1.0,
            MachPreset::Ma35 => 3.5,
        }
    }

    pub fn wave(self) -> DensityWave {
        match self {
            MachPreset::Ma02 => DensityWave::new(0.1, 0.15),
            MachPreset::Ma10 => DensityWave::new(0.7, 0.65),
            MachPreset::Ma35 => DensityWave::new(2.5, 2.4),
        }
    }
}

impl fmt::Display for MachPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MachPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ma02" | "0.2" | ".2" => Ok(MachPreset::Ma02),
            "ma10" | "1.0" | "1" => Ok(MachPreset::Ma10),
            "ma35" | "3.5" => Ok(MachPreset::Ma35),
            other => Err(format!("unknown Mach preset `{other}` (expected ma02, ma10 or ma35)")),
        }
    }
}

pub fn density_wave_state(x: [f64; 3], t: f64, wave: &DensityWave, gamma: f64) -> StateVector {
    let q = PrimitiveState {
        rho: wave.density(x, t),
        v: [wave.velocity[0], wave.velocity[1], 0.0],
        p: 1.0 / gamma,
    };
    prim_to_vector(&q, gamma)
}

/// `g = 0.5 sin(2 pi (x1 + x2 - t)) + 2` and its derivative along `x1`.
fn manufactured_g(x: [f64; 3], t: f64) -> (f64, f64) {
    let phase = 2.0 * PI * (x[0] + x[1] - t);
    (0.5 * phase.sin() + 2.0, PI * phase.cos())
}

/// `(g, g, g, 0, g^2)`: unit velocity in x and y.
pub fn manufactured_state(x: [f64; 3], t: f64) -> StateVector {
    let (g, _) = manufactured_g(x, t);
    [g, g, g, 0.0, g * g]
}

/// Residual `u_t + div f(u)` of [`manufactured_state`].
pub fn manufactured_source(x: [f64; 3], t: f64, gamma: f64) -> StateVector {
    let (g, gp) = manufactured_g(x, t);
    let mom = (2.0 - gamma) * gp + 2.0 * (gamma - 1.0) * g * gp;
    let energy = (2.0 - 2.0 * gamma) * gp + (4.0 * gamma - 2.0) * g * gp;
    [gp, mom, mom, 0.0, energy]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestCase {
    DensityWave(DensityWave),
    Manufactured,
}

impl TestCase {
    pub fn preset(m: MachPreset) -> Self {
        TestCase::DensityWave(m.wave())
    }

    pub fn exact(&self, x: [f64; 3], t: f64, gamma: f64) -> StateVector {
        match self {
            TestCase::DensityWave(w) => density_wave_state(x, t, w, gamma),
            TestCase::Manufactured => manufactured_state(x, t),
        }
    }

    pub fn source(&self, gamma: f64) -> Option<Box<SourceFn>> {
        match self {
            TestCase::DensityWave(_) => None,
            TestCase::Manufactured => Some(Box::new(move |x, t| manufactured_source(x, t, gamma))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            TestCase::DensityWave(w) => format!("density wave v=({}, {})", w.velocity[0], w.velocity[1]),
            TestCase::Manufactured => "manufactured".into(),
        }
    }
}

/// How the discrete L2 error is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorNorm {
    /// Gauss points per direction for over-integration; `None` uses the
    /// solution's own nodes and weights.
    pub over_integration: Option<usize>,
    /// Divide the squared integral by the domain volume.
    pub volume_normalized: bool,
}

impl Default for ErrorNorm {
    fn default() -> Self {
        ErrorNorm {
            over_integration: None,
            volume_normalized: true,
        }
    }
}

/// `sqrt( sum_e J sum_q w_q (rho_h - rho_exact)^2 [/ |Omega|] )`.
pub fn l2_density_error<F>(dg: &Dgsem, sol: &Solution, exact: F, norm: ErrorNorm) -> f64
where
    F: Fn([f64; 3]) -> f64,
{
    let sum = match norm.over_integration {
        None => dg.integrate(sol, |x, u| {
            let d = u[0] - exact(x);
            d * d
        }),
        Some(m) => over_integrated_square(dg, sol, &exact, m),
    };
    if norm.volume_normalized {
        (sum / DOMAIN_VOLUME).sqrt()
    } else {
        sum.sqrt()
    }
}

fn over_integrated_square<F: Fn([f64; 3]) -> f64>(dg: &Dgsem, sol: &Solution, exact: &F, m: usize) -> f64 {
    let op: &NodalOperator = dg.operator();
    let n = op.len();
    let (xq, wq) = gauss_nodes_and_weights(m.max(1) - 1);
    let m = xq.len();
    let interp = op.interpolation_matrix(&xq);
    let mesh = dg.mesh();
    let h = mesh.h();
    let jac = mesh.jacobian();
    let mut total = 0.0;
    let mut tmp1 = vec![0.0; m * n * n];
    let mut tmp2 = vec![0.0; m * m * n];
    for e in 0..sol.n_elements() {
        let rho: Vec<f64> = sol.element(e).iter().map(|u| u[0]).collect();
        // sum factorization x, then y, then z
        for k in 0..n {
            for j in 0..n {
                for a in 0..m {
                    tmp1[a + m * (j + n * k)] = (0..n).map(|i| interp[a * n + i] * rho[i + n * (j + n * k)]).sum();
                }
            }
        }
        for k in 0..n {
            for b in 0..m {
                for a in 0..m {
                    tmp2[a + m * (b + m * k)] = (0..n).map(|j| interp[b * n + j] * tmp1[a + m * (j + n * k)]).sum();
                }
            }
        }
        let corner = mesh.lower_corner(e).expect("element index in range");
        let mut s = 0.0;
        for c in 0..m {
            for b in 0..m {
                for a in 0..m {
                    let v: f64 = (0..n).map(|k| interp[c * n + k] * tmp2[a + m * (b + m * k)]).sum();
                    let r = [xq[a], xq[b], xq[c]];
                    let x = std::array::from_fn(|d| corner[d] + 0.5 * (r[d] + 1.0) * h[d]);
                    let d = v - exact(x);
                    s += wq[a] * wq[b] * wq[c] * d * d;
                }
            }
        }
        total += jac * s;
    }
    total
}

/// `EOC_k = log2(e_{k-1} / e_k)` for meshes halved per level.
pub fn eoc(errors: &[f64]) -> Result<Vec<f64>, DgError> {
    if errors.len() < 2 {
        return Err(DgError::Eoc(format!("got {} value(s)", errors.len())));
    }
    if let Some(bad) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(DgError::Eoc(format!("non-positive or non-finite error {bad}")));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub h: f64,
    pub n_elements: usize,
    pub dofs: usize,
    pub l2_error_density: f64,
    pub eoc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Fills the EOC column from consecutive rows.
    pub fn attach_eoc(&mut self) {
        for k in 0..self.rows.len() {
            self.rows[k].eoc = if k == 0 {
                None
            } else {
                let (a, b) = (self.rows[k - 1].l2_error_density, self.rows[k].l2_error_density);
                eoc(&[a, b]).ok().map(|v| v[0])
            };
        }
    }

    pub fn finest(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }

    pub fn finest_eoc(&self) -> Option<f64> {
        self.finest().and_then(|r| r.eoc)
    }
}

/// CFL number that keeps the time-integration error well below the spatial
/// error on the finest levels of a study. At high degree and high speed the
/// fourth-order time error would otherwise pollute the spatial EOC.
pub fn recommended_cfl(degree: usize, case: &TestCase) -> f64 {
    match case {
        TestCase::DensityWave(w) if w.mach() >= 3.0 => match degree {
            0..=3 => 0.5,
            4 => 0.25,
            _ => 0.125,
        },
        TestCase::DensityWave(w) if w.mach() >= 0.9 && degree >= 5 => 0.25,
        TestCase::Manufactured if degree >= 5 => 0.2,
        _ => 0.5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudySpec {
    pub scheme: SchemeConfig,
    pub case: TestCase,
    pub ladder: RefinementLadder,
    /// First level actually run; coarser levels are skipped.
    pub first_level: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub norm: ErrorNorm,
}

impl StudySpec {
    pub fn new(scheme: SchemeConfig, case: TestCase, levels: usize, cfl: f64) -> Self {
        StudySpec {
            scheme,
            case,
            ladder: RefinementLadder::for_degree(scheme.degree, levels),
            first_level: 0,
            cfl,
            t_end: 1.0,
            norm: ErrorNorm::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub row: ConvergenceRow,
    pub steps: usize,
    /// Relative change of the conserved totals over the run.
    pub conservation_drift: f64,
}

/// One level of a study: initialize, integrate to `t_end`, measure.
pub fn run_level(spec: &StudySpec, level: usize) -> Result<RunOutcome, DgError> {
    run_level_traced(spec, level, |_, _, _, _| {})
}

/// [`run_level`] with a per-step callback `(step, t, solver, solution)`.
pub fn run_level_traced<C>(spec: &StudySpec, level: usize, mut trace: C) -> Result<RunOutcome, DgError>
where
    C: FnMut(usize, f64, &Dgsem, &Solution),
{
    let wrap = |e: DgError| DgError::AtLevel {
        level,
        source: Box::new(e),
    };
    let mesh = spec.ladder.mesh(level).map_err(wrap)?;
    let dg = Dgsem::new(spec.scheme, mesh).map_err(wrap)?;
    let gamma = spec.scheme.gas.gamma();
    let mut u = dg.project(|x| spec.case.exact(x, 0.0, gamma));
    let before = dg.conserved_totals(&u);
    let controls = TimeControls::new(spec.cfl, spec.t_end).map_err(wrap)?;
    let source = spec.case.source(gamma);
    let stats = integrate(&dg, &mut u, &controls, source.as_deref(), |step, t, u| trace(step, t, &dg, u))
        .map_err(wrap)?;
    let after = dg.conserved_totals(&u);
    let conservation_drift = if source.is_some() {
        f64::NAN
    } else {
        before
            .iter()
            .zip(&after)
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max)
    };
    let t = stats.t_final;
    let err = l2_density_error(&dg, &u, |x| spec.case.exact(x, t, gamma)[0], spec.norm);
    Ok(RunOutcome {
        row: ConvergenceRow {
            level,
            h: spec.ladder.h(level),
            n_elements: dg.mesh().n_elements(),
            dofs: dg.n_dofs(),
            l2_error_density: err,
            eoc: None,
        },
        steps: stats.steps,
        conservation_drift,
    })
}

/// Runs every level of the ladder from `first_level` and attaches EOCs.
pub fn run_convergence_study(spec: &StudySpec) -> Result<ConvergenceTable, DgError> {
    spec.scheme.validate()?;
    let mut table = ConvergenceTable::default();
    for level in spec.first_level..spec.ladder.levels {
        table.rows.push(run_level(spec, level)?.row);
    }
    table.attach_eoc();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{physical_flux_vector, FluxKind};
    use crate::mesh::MeshTopology;
    use crate::dg::VolumeMode;
    use crate::spectral::NodeFamily;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const G: f64 = 1.4;

    #[test]
    fn density_wave_examples() {
        let w = MachPreset::Ma02.wave();
        assert_eq!(density_wave_state([0.0; 3], 0.0, &w, G)[0], 1.0);
        assert!((density_wave_state([0.25, 0.25, 0.3], 0.0, &w, G)[0] - 1.1).abs() < 1e-15);
        assert!((w.mach() - 0.18027756).abs() < 1e-8);
        assert!((MachPreset::Ma35.wave().mach() - 3.4655).abs() < 1e-4);
        let u = density_wave_state([0.1, 0.2, 0.0], 0.0, &w, G);
        let q = crate::physics::prim_from_vector(&u, G).unwrap();
        assert!((q.p - 1.0 / G).abs() < 1e-15);
        assert!((q.v[0] - 0.1).abs() < 1e-15 && q.v[2] == 0.0);
    }

    #[test]
    fn density_wave_is_periodic_in_time() {
        // period 2 / (v1 + v2) along the diagonal
        let w = MachPreset::Ma10.wave();
        let period = 2.0 / (w.velocity[0] + w.velocity[1]);
        let x = [0.3, -0.7, 0.1];
        assert!((w.density(x, period) - w.density(x, 0.0)).abs() < 1e-14);
    }

    #[test]
    fn manufactured_examples() {
        assert_eq!(manufactured_state([0.0; 3], 0.0), [2.0, 2.0, 2.0, 0.0, 4.0]);
        let s = manufactured_source([0.125, 0.125, 0.0], 0.0, G);
        assert!(s.iter().all(|v| v.abs() < 1e-14), "{s:?}");
        let s = manufactured_source([0.0; 3], 0.0, G);
        let want = [PI, 2.2 * PI, 2.2 * PI, 0.0, 6.4 * PI];
        for (a, b) in s.iter().zip(want) {
            assert!((a - b).abs() < 1e-13, "{s:?}");
        }
        // pressure stays in [0.3, 1.5]
        for k in 0..100 {
            let u = manufactured_state([k as f64 * 0.01, 0.0, 0.0], 0.0);
            let p = crate::physics::pressure(&u, G);
            assert!((0.3 - 1e-12..=1.5 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn manufactured_source_matches_finite_difference_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let residual = |x: [f64; 3], t: f64, eps: f64| -> StateVector {
            let mut r = [0.0; 5];
            let up = manufactured_state(x, t + eps);
            let um = manufactured_state(x, t - eps);
            for k in 0..5 {
                r[k] = (up[k] - um[k]) / (2.0 * eps);
            }
            for d in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[d] += eps;
                xm[d] -= eps;
                let fp = physical_flux_vector(&manufactured_state(xp, t), d, G).unwrap();
                let fm = physical_flux_vector(&manufactured_state(xm, t), d, G).unwrap();
                for k in 0..5 {
                    r[k] += (fp[k] - fm[k]) / (2.0 * eps);
                }
            }
            r
        };
        for _ in 0..200 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let t = rng.gen_range(0.0..1.0);
            let s = manufactured_source(x, t, G);
            // error of central differences is O(eps^2): check the ratio
            let e1: f64 = (0..5).map(|k| (residual(x, t, 1e-3)[k] - s[k]).abs()).fold(0.0, f64::max);
            let e2: f64 = (0..5).map(|k| (residual(x, t, 5e-4)[k] - s[k]).abs()).fold(0.0, f64::max);
            assert!(e1 < 1e-3, "{e1}");
            assert!(e2 < 0.3 * e1 + 1e-8, "{e1} {e2}");
        }
    }

    #[test]
    fn eoc_examples() {
        assert!((eoc(&[1e-2, 1.25e-3]).unwrap()[0] - 3.0).abs() < 1e-14);
        assert_eq!(eoc(&[0.5, 0.5]).unwrap(), vec![0.0]);
        let r = eoc(&[1.87e-4, 2.27e-5, 2.82e-6, 3.53e-7]).unwrap();
        for (a, b) in r.iter().zip([3.04, 3.01, 3.00]) {
            assert!((a - b).abs() < 0.006, "{r:?}");
        }
        assert!(eoc(&[1.0]).is_err());
        assert!(eoc(&[1.0, 0.0]).is_err());
        assert!(eoc(&[1.0, -1.0]).is_err());
    }

    fn small_dg(n: usize) -> Dgsem {
        let s = SchemeConfig::new(NodeFamily::Lgl, n, VolumeMode::Standard, FluxKind::Roe).unwrap();
        Dgsem::new(s, MeshTopology::new(2, 2, 1).unwrap()).unwrap()
    }

    #[test]
    fn error_of_exact_interpolant_is_zero_at_nodes() {
        let dg = small_dg(3);
        let w = MachPreset::Ma02.wave();
        let u = dg.project(|x| density_wave_state(x, 0.0, &w, G));
        let e = l2_density_error(&dg, &u, |x| w.density(x, 0.0), ErrorNorm::default());
        assert!(e < 1e-15);
        // over-integration sees the interpolation error instead
        let norm = ErrorNorm {
            over_integration: Some(8),
            volume_normalized: true,
        };
        let e = l2_density_error(&dg, &u, |x| w.density(x, 0.0), norm);
        assert!(e > 1e-6 && e < 1e-2, "{e}");
    }

    #[test]
    fn constant_offset_has_unit_norm_per_volume() {
        let dg = small_dg(2);
        let u = dg.project(|_| [1.3, 0.0, 0.0, 0.0, 2.5]);
        for over in [None, Some(5)] {
            let norm = ErrorNorm {
                over_integration: over,
                volume_normalized: true,
            };
            assert!((l2_density_error(&dg, &u, |_| 1.0, norm) - 0.3).abs() < 1e-14);
            let raw = ErrorNorm {
                volume_normalized: false,
                ..norm
            };
            assert!((l2_density_error(&dg, &u, |_| 1.0, raw) - 0.3 * 8f64.sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn over_integration_of_polynomial_field_is_exact() {
        // a degree-N field is represented exactly; compare with a shifted copy
        let dg = small_dg(3);
        let f = |x: [f64; 3]| 1.0 + 0.1 * x[0].powi(3) - 0.2 * x[1] * x[2];
        let u = dg.project(|x| [f(x), 0.0, 0.0, 0.0, 3.0]);
        let norm = ErrorNorm {
            over_integration: Some(6),
            volume_normalized: false,
        };
        let e = l2_density_error(&dg, &u, |x| f(x) - 0.01 * x[0], norm);
        // integral of (0.01 x)^2 over [-1,1]^3 = 1e-4 * 8/3
        assert!((e * e - 1e-4 * 8.0 / 3.0).abs() < 1e-15, "{}", e * e);
    }

    #[test]
    fn short_study_converges_and_conserves() {
        let scheme = SchemeConfig::new(NodeFamily::Lgl, 2, VolumeMode::Split, FluxKind::EckepRoe).unwrap();
        let mut spec = StudySpec::new(scheme, TestCase::preset(MachPreset::Ma10), 3, 0.5);
        spec.t_end = 0.1;
        let out = run_level(&spec, 0).unwrap();
        assert!(out.conservation_drift < 1e-12, "{}", out.conservation_drift);
        let table = run_convergence_study(&spec).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows[0].eoc.is_none());
        assert!(table.finest_eoc().unwrap() > 2.3, "{table:?}");
        assert_eq!(table.rows[2].n_elements, 16 * 16);
    }

    #[test]
    fn manufactured_study_runs_with_source() {
        let scheme = SchemeConfig::new(NodeFamily::Gauss, 3, VolumeMode::Standard, FluxKind::Hllc).unwrap();
        let mut spec = StudySpec::new(scheme, TestCase::Manufactured, 2, 0.5);
        spec.t_end = 0.05;
        let table = run_convergence_study(&spec).unwrap();
        assert!(table.finest_eoc().unwrap() > 2.5, "{table:?}");
    }
}

//! Right-hand-side throughput per scheme and degree on a 16x16x1 mesh.
//! `cargo run --release --example bench_rhs`

use std::time::Instant;

use dgsem::dg::{Dgsem, SchemeConfig, VolumeMode};
use dgsem::flux::FluxKind;
use dgsem::mesh::MeshTopology;
use dgsem::spectral::NodeFamily;
use dgsem::verification::{density_wave_state, MachPreset};

fn main() {
    let wave = MachPreset::Ma10.wave();
    for (nodes, vol, flux) in [
        (NodeFamily::Gauss, VolumeMode::Standard, FluxKind::Roe),
        (NodeFamily::Lgl, VolumeMode::Standard, FluxKind::Llf),
        (NodeFamily::Lgl, VolumeMode::Split, FluxKind::EckepRoe),
    ] {
        for n in [2, 3, 4, 5] {
            let s = SchemeConfig::new(nodes, n, vol, flux).unwrap();
            let dg = Dgsem::new(s, MeshTopology::new(16, 16, 1).unwrap()).unwrap();
            let u = dg.project(|x| density_wave_state(x, 0.0, &wave, 1.4));
            let mut r = dg.zeros();
            let mut ws = dg.workspace();
            dg.rhs(&u, &mut r, &mut ws).unwrap();
            let reps = 20;
            let t0 = Instant::now();
            for _ in 0..reps {
                dg.rhs(&u, &mut r, &mut ws).unwrap();
            }
            let per = t0.elapsed().as_secs_f64() / reps as f64;
            println!("{} N={n}: {:.3} ms/rhs, {:.1} ns/dof", s.label(), per * 1e3, per * 1e9 / dg.n_dofs() as f64);
        }
    }
}

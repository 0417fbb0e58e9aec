//! Fully periodic Cartesian hexahedral meshes of `[-1, 1]^3`.

use crate::error::DgError;
use crate::spectral::NodalOperator;

pub const DOMAIN_MIN: f64 = -1.0;
pub const DOMAIN_LENGTH: f64 = 2.0;
pub const DOMAIN_VOLUME: f64 = 8.0;

/// Face order used throughout: `-x, +x, -y, +y, -z, +z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    XMinus = 0,
    XPlus = 1,
    YMinus = 2,
    YPlus = 3,
    ZMinus = 4,
    ZPlus = 5,
}

impl Face {
    pub const ALL: [Face; 6] = [
        Face::XMinus,
        Face::XPlus,
        Face::YMinus,
        Face::YPlus,
        Face::ZMinus,
        Face::ZPlus,
    ];

    pub fn new(axis: usize, plus: bool) -> Face {
        Face::ALL[2 * axis + plus as usize]
    }

    pub fn axis(self) -> usize {
        self as usize / 2
    }

    pub fn is_plus(self) -> bool {
        self as usize % 2 == 1
    }

    pub fn opposite(self) -> Face {
        Face::ALL[self as usize ^ 1]
    }
}

#[derive(Debug, Clone)]
pub struct MeshTopology {
    counts: [usize; 3],
    h: [f64; 3],
    neighbors: Vec<[usize; 6]>,
}

impl MeshTopology {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self, DgError> {
        let counts = [nx, ny, nz];
        if counts.contains(&0) {
            return Err(DgError::InvalidMesh(counts));
        }
        let h = counts.map(|c| DOMAIN_LENGTH / c as f64);
        let n_elem = nx * ny * nz;
        let mut neighbors = Vec::with_capacity(n_elem);
        for e in 0..n_elem {
            let ijk = Self::split_index(counts, e);
            let mut nb = [0; 6];
            for face in Face::ALL {
                let axis = face.axis();
                let mut other = ijk;
                other[axis] = if face.is_plus() {
                    (ijk[axis] + 1) % counts[axis]
                } else {
                    (ijk[axis] + counts[axis] - 1) % counts[axis]
                };
                nb[face as usize] = other[0] + nx * (other[1] + ny * other[2]);
            }
            neighbors.push(nb);
        }
        Ok(MeshTopology { counts, h, neighbors })
    }

    fn split_index(counts: [usize; 3], e: usize) -> [usize; 3] {
        [e % counts[0], (e / counts[0]) % counts[1], e / (counts[0] * counts[1])]
    }

    pub fn counts(&self) -> [usize; 3] {
        self.counts
    }

    pub fn n_elements(&self) -> usize {
        self.neighbors.len()
    }

    /// Element size per axis.
    pub fn h(&self) -> [f64; 3] {
        self.h
    }

    /// Constant Jacobian of the affine map from `[-1,1]^3`.
    pub fn jacobian(&self) -> f64 {
        self.h[0] * self.h[1] * self.h[2] / 8.0
    }

    pub fn element_index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.counts[0] * (j + self.counts[1] * k)
    }

    pub fn element_ijk(&self, e: usize) -> [usize; 3] {
        Self::split_index(self.counts, e)
    }

    pub fn neighbor(&self, e: usize, face: Face) -> usize {
        self.neighbors[e][face as usize]
    }

    pub fn neighbors(&self, e: usize) -> &[usize; 6] {
        &self.neighbors[e]
    }

    pub fn lower_corner(&self, e: usize) -> Result<[f64; 3], DgError> {
        self.check(e)?;
        let ijk = self.element_ijk(e);
        Ok(std::array::from_fn(|d| DOMAIN_MIN + ijk[d] as f64 * self.h[d]))
    }

    /// Physical coordinates of the `(N+1)^3` collocation nodes of element
    /// `e`, x index fastest.
    pub fn collocation_coordinates(&self, e: usize, op: &NodalOperator) -> Result<Vec<[f64; 3]>, DgError> {
        let corner = self.lower_corner(e)?;
        let xi = op.nodes();
        let n = op.len();
        let mut pts = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let r = [xi[i], xi[j], xi[k]];
                    pts.push(std::array::from_fn(|d| corner[d] + 0.5 * (r[d] + 1.0) * self.h[d]));
                }
            }
        }
        Ok(pts)
    }

    fn check(&self, e: usize) -> Result<(), DgError> {
        if e >= self.n_elements() {
            return Err(DgError::ElementOutOfRange {
                index: e,
                count: self.n_elements(),
            });
        }
        Ok(())
    }
}

/// Mesh sequence refining x and y by 2 per level with one element in z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RefinementLadder {
    pub base: usize,
    pub levels: usize,
}

impl RefinementLadder {
    /// Coarsest level used for degree `n`: 4x4 elements for N <= 3, 2x2 otherwise.
    pub fn for_degree(n: usize, levels: usize) -> Self {
        RefinementLadder {
            base: if n <= 3 { 4 } else { 2 },
            levels,
        }
    }

    pub fn elements_per_axis(&self, level: usize) -> usize {
        self.base << level
    }

    pub fn mesh(&self, level: usize) -> Result<MeshTopology, DgError> {
        let n = self.elements_per_axis(level);
        MeshTopology::new(n, n, 1)
    }

    pub fn h(&self, level: usize) -> f64 {
        DOMAIN_LENGTH / self.elements_per_axis(level) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::NodeFamily;

    #[test]
    fn singleton_is_its_own_neighbor() {
        let m = MeshTopology::new(1, 1, 1).unwrap();
        assert_eq!(m.neighbors(0), &[0; 6]);
        assert_eq!(m.jacobian(), 1.0);
    }

    #[test]
    fn periodic_wrap() {
        let m = MeshTopology::new(4, 4, 1).unwrap();
        assert_eq!(m.neighbor(0, Face::XMinus), m.element_index(3, 0, 0));
        assert_eq!(m.neighbor(0, Face::YMinus), m.element_index(0, 3, 0));
        assert_eq!(m.neighbor(0, Face::ZPlus), 0);
    }

    #[test]
    fn element_sizes() {
        let m = MeshTopology::new(2, 2, 1).unwrap();
        assert_eq!(m.h(), [1.0, 1.0, 2.0]);
        assert!(MeshTopology::new(0, 2, 1).is_err());
    }

    #[test]
    fn neighbor_relation_is_an_involution() {
        for (nx, ny, nz) in [(1, 1, 1), (2, 3, 1), (4, 4, 1), (3, 2, 5), (1, 7, 2)] {
            let m = MeshTopology::new(nx, ny, nz).unwrap();
            for e in 0..m.n_elements() {
                for face in Face::ALL {
                    let nb = m.neighbor(e, face);
                    assert_eq!(m.neighbor(nb, face.opposite()), e);
                }
            }
        }
    }

    #[test]
    fn affine_coordinates() {
        let op = NodalOperator::new(NodeFamily::Lgl, 3).unwrap();
        let m = MeshTopology::new(1, 1, 1).unwrap();
        let pts = m.collocation_coordinates(0, &op).unwrap();
        let n = op.len();
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let want = [op.nodes()[i], op.nodes()[j], op.nodes()[k]];
                    for d in 0..3 {
                        assert!((pts[i + n * (j + n * k)][d] - want[d]).abs() < 1e-15);
                    }
                }
            }
        }
        let m = MeshTopology::new(2, 2, 1).unwrap();
        let pts = m.collocation_coordinates(m.element_index(1, 0, 0), &op).unwrap();
        assert_eq!(pts[0][0], 0.0);
        assert!(m.collocation_coordinates(4, &op).is_err());
    }

    #[test]
    fn quadrature_of_one_is_domain_volume() {
        for family in NodeFamily::ALL {
            for n in 1..=6 {
                let op = NodalOperator::new(family, n).unwrap();
                let m = MeshTopology::new(3, 2, 2).unwrap();
                let w = op.weights();
                let per_elem: f64 = w.iter().flat_map(|a| w.iter().flat_map(move |b| w.iter().map(move |c| a * b * c))).sum();
                let vol = m.jacobian() * per_elem * m.n_elements() as f64;
                assert!((vol - DOMAIN_VOLUME).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn ladder_follows_degree_convention() {
        let l = RefinementLadder::for_degree(3, 5);
        assert_eq!(l.elements_per_axis(0), 4);
        assert_eq!(l.h(0), 0.5);
        assert_eq!(l.elements_per_axis(4), 64);
        let l = RefinementLadder::for_degree(5, 5);
        assert_eq!(l.h(0), 1.0);
        assert_eq!(l.mesh(4).unwrap().counts(), [32, 32, 1]);
    }
}

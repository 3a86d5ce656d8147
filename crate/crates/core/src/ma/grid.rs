use crate::toric::SimplexDomain;

use super::MaError;

pub(crate) const NONE: usize = usize::MAX;

/// Uniform grid on a simplex domain.
///
/// The grid is the image of the standard lattice `(1/N) ℤ^s` on the closed
/// standard simplex under the affine map `y ↦ δ + λ y`, `λ = 1 - (s+1) δ`,
/// which carries the standard simplex onto the shrunken domain. For `δ = 0`
/// this is exactly the lattice of spacing `1/N`. Nodes are the points whose
/// barycentric slots all have slack at least one step, listed in
/// lexicographic order of their integer index.
#[derive(Debug, Clone)]
pub struct GridSpec {
    domain: SimplexDomain,
    resolution: usize,
    /// closed-grid dense stride per coordinate (first coordinate major)
    strides: [usize; 3],
    dense_len: usize,
    /// dense index of every node, in order
    nodes: Vec<usize>,
    /// dense index -> node number (or NONE)
    lookup: Vec<usize>,
}

impl GridSpec {
    pub fn new(domain: SimplexDomain, resolution: usize) -> Result<Self, MaError> {
        let s = domain.dim();
        if s > 3 {
            return Err(MaError::UnsupportedDimension(s));
        }
        if resolution < 8 {
            return Err(MaError::ResolutionTooCoarse {
                resolution,
                minimum: 8,
            });
        }
        let n1 = resolution + 1;
        let mut strides = [0usize; 3];
        let mut st = 1;
        for k in (0..s).rev() {
            strides[k] = st;
            st *= n1;
        }
        let dense_len = if s == 0 { 0 } else { st };
        let mut nodes = Vec::new();
        let mut lookup = vec![NONE; dense_len];
        for d in 0..dense_len {
            let idx = Self::unpack(&strides, resolution, s, d);
            let sum: usize = idx[..s].iter().sum();
            if idx[..s].iter().all(|&i| i >= 1) && sum < resolution {
                lookup[d] = nodes.len();
                nodes.push(d);
            }
        }
        if s > 0 && nodes.is_empty() {
            return Err(MaError::ResolutionTooCoarse {
                resolution,
                minimum: s + 2,
            });
        }
        Ok(GridSpec {
            domain,
            resolution,
            strides,
            dense_len,
            nodes,
            lookup,
        })
    }

    fn unpack(strides: &[usize; 3], n: usize, s: usize, mut d: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for k in 0..s {
            idx[k] = d / strides[k];
            d %= strides[k];
        }
        debug_assert!(idx[..s].iter().all(|&i| i <= n));
        idx
    }

    pub fn domain(&self) -> &SimplexDomain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Affine scale `λ` of the map from the standard simplex.
    pub fn scale(&self) -> f64 {
        1.0 - (self.dim() as f64 + 1.0) * self.domain.margin()
    }

    /// Physical grid spacing `λ / N`.
    pub fn h(&self) -> f64 {
        self.scale() / self.resolution as f64
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integer index of node `i` (first `dim` entries are meaningful).
    pub fn index(&self, i: usize) -> [usize; 3] {
        Self::unpack(&self.strides, self.resolution, self.dim(), self.nodes[i])
    }

    /// Node number of an integer index, if it is a node.
    pub fn node_at(&self, idx: &[usize]) -> Option<usize> {
        let s = self.dim();
        if idx.len() != s || idx.iter().sum::<usize>() > self.resolution {
            return None;
        }
        let d: usize = idx.iter().zip(&self.strides).map(|(a, b)| a * b).sum();
        match self.lookup.get(d) {
            Some(&k) if k != NONE => Some(k),
            _ => None,
        }
    }

    /// Standard-simplex coordinates of node `i`.
    pub fn ref_coords(&self, i: usize) -> Vec<f64> {
        let idx = self.index(i);
        let n = self.resolution as f64;
        idx[..self.dim()].iter().map(|&k| k as f64 / n).collect()
    }

    /// Physical coordinates of node `i`.
    pub fn coords(&self, i: usize) -> Vec<f64> {
        let (d, l) = (self.domain.margin(), self.scale());
        self.ref_coords(i).into_iter().map(|y| d + l * y).collect()
    }

    pub fn to_ref(&self, x: &[f64]) -> Vec<f64> {
        let (d, l) = (self.domain.margin(), self.scale());
        x.iter().map(|&v| (v - d) / l).collect()
    }

    /// Physical slack of node `i`: the least margin by which it satisfies the
    /// domain inequalities.
    pub fn slack(&self, i: usize) -> f64 {
        self.domain.slack(&self.coords(i))
    }

    pub(crate) fn dense_len(&self) -> usize {
        self.dense_len
    }

    pub(crate) fn dense(&self, i: usize) -> usize {
        self.nodes[i]
    }

    pub(crate) fn node_of_dense(&self, d: usize) -> usize {
        self.lookup[d]
    }

    pub(crate) fn stride(&self, k: usize) -> usize {
        self.strides[k]
    }

    /// Integer index of a dense position of the closed grid.
    pub(crate) fn dense_index(&self, d: usize) -> [usize; 3] {
        Self::unpack(&self.strides, self.resolution, self.dim(), d)
    }

    /// Whether dense position `d` is a point of the closed simplex.
    pub(crate) fn in_closed(&self, d: usize) -> bool {
        d < self.dense_len
            && self.dense_index(d)[..self.dim()].iter().sum::<usize>() <= self.resolution
    }

    /// Barycentric integer slots `(N - Σ i, i_1, .., i_s)` of a dense position.
    pub(crate) fn slots(&self, d: usize) -> Vec<usize> {
        let idx = self.dense_index(d);
        let s = self.dim();
        let sum: usize = idx[..s].iter().sum();
        let mut v = Vec::with_capacity(s + 1);
        v.push(self.resolution - sum);
        v.extend_from_slice(&idx[..s]);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_counts() {
        let g = GridSpec::new(SimplexDomain::standard(1), 16).unwrap();
        assert_eq!(g.len(), 15);
        let g = GridSpec::new(SimplexDomain::standard(2), 16).unwrap();
        // i, j >= 1, i + j <= 15
        assert_eq!(g.len(), 14 * 15 / 2);
        let g = GridSpec::new(SimplexDomain::standard(3), 8).unwrap();
        // C(7,3)
        assert_eq!(g.len(), 35);
        assert!(GridSpec::new(SimplexDomain::standard(2), 7).is_err());
    }

    #[test]
    fn lexicographic_and_lookup() {
        let g = GridSpec::new(SimplexDomain::standard(2), 10).unwrap();
        let mut last = None;
        for i in 0..g.len() {
            let idx = g.index(i);
            let key = (idx[0], idx[1]);
            if let Some(p) = last {
                assert!(key > p);
            }
            last = Some(key);
            assert_eq!(g.node_at(&idx[..2]), Some(i));
            assert!(g.slack(i) >= g.h() - 1e-15);
        }
        assert_eq!(g.node_at(&[0, 3]), None);
        assert_eq!(g.node_at(&[5, 5]), None);
    }

    #[test]
    fn shrunken_domain_maps_affinely() {
        let d = SimplexDomain::new(1, 0.1).unwrap();
        let g = GridSpec::new(d, 10).unwrap();
        assert!((g.scale() - 0.8).abs() < 1e-15);
        assert!((g.coords(0)[0] - 0.18).abs() < 1e-15);
        assert!((g.slack(0) - 0.08).abs() < 1e-15);
    }
}

//! Seeded random matrices, states, and unitaries. All sampling in the crate
//! flows through an explicitly seeded ChaCha stream so every run is
//! bit-reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gmad::UnitaryBlocks;
use crate::linalg::ComplexMatrix;
use crate::states::DensityMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream from a base seed and a salt (splitmix64
/// finalizer). Used to give grid points and optimizer starts their own
/// deterministic streams.
pub fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Standard normal via Box–Muller.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}

/// Matrix with iid complex-normal entries.
pub fn random_ginibre(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| random_complex(rng))
}

/// (G + G†)/2 for Ginibre G.
pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    random_ginibre(dim, rng).hermitize()
}

/// Full-rank random state GG†/tr(GG†).
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let g = random_ginibre(dim, rng);
    let p = g.matmul(&g.adjoint());
    let tr = p.trace().re;
    DensityMatrix::trusted(p.scale_re(1.0 / tr))
}

pub fn random_ket(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_pure(dim: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let ket = random_ket(dim, rng);
    DensityMatrix::trusted(crate::linalg::outer(&ket, &ket))
}

/// Haar-ish random unitary: Gram–Schmidt on Ginibre columns, run twice for
/// numerical orthogonality far below the 1e−10 block tolerance.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = random_ginibre(dim, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|c| (0..dim).map(|r| g[(r, c)]).collect())
        .collect();
    for _pass in 0..2 {
        for j in 0..dim {
            for i in 0..j {
                let proj: Complex64 = (0..dim).map(|k| cols[i][k].conj() * cols[j][k]).sum();
                for k in 0..dim {
                    let d = proj * cols[i][k];
                    cols[j][k] -= d;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
    }
    ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

/// Interaction blocks for a d-level GMAD: block m is an (m+1)×(m+1) unitary.
pub fn random_unitary_blocks(dim: usize, rng: &mut ChaCha8Rng) -> UnitaryBlocks {
    UnitaryBlocks::new((1..dim).map(|m| random_unitary(m + 1, rng)).collect())
        .expect("unitary by construction")
}

/// Same, with every block symmetric, so detailed balance applies.
pub fn random_symmetric_unitary_blocks(dim: usize, rng: &mut ChaCha8Rng) -> UnitaryBlocks {
    UnitaryBlocks::new(
        (1..dim)
            .map(|m| random_symmetric_unitary(m + 1, rng))
            .collect(),
    )
    .expect("unitary by construction")
}

/// Random symmetric (uᵀ = u) unitary: exp(iA) with A real symmetric; the
/// construction GMADs need for detailed balance.
pub fn random_symmetric_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(dim, dim, |_, _| Complex64::new(normal(rng), 0.0)).hermitize();
    let e = crate::linalg::hermitian_eig(&a).expect("real symmetric");
    let v = &e.eigenvectors;
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        (0..dim)
            .map(|k| {
                let phase = Complex64::from_polar(1.0, e.eigenvalues[k]);
                v[(r, k)] * phase * v[(c, k)].conj()
            })
            .sum()
    })
}

//! Laplace–Beltrami spectra and spectral point descriptors.

mod descriptors;
mod eigen;
mod laplacian;

pub use descriptors::{
    compute_hks, compute_wks, heat_kernel_diagonal, hks_times, restrict_to_boundary, wks_energies,
    DescriptorField, DescriptorKind, WKS_SIGMA_FACTOR,
};
pub use eigen::{eigendecompose, eigendecompose_with, EigenSolver, SpectralBasis, DENSE_MAX_VERTICES};
pub use laplacian::{build_laplacian_2d, build_laplacian_3d, LaplacianPair};

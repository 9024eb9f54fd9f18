#pragma once

#include <cstdint>

#include "ticklab/matrix.hpp"

// Small dense kernel. Everything here is a pure function of its inputs.
namespace ticklab::linalg {

// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
// pivot falls below 1e-14 * ||A||_inf. There is deliberately no inverse().
RealVector solve_linear(const RealMatrix& a, const RealVector& b);
ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b);

// v * M^L by L sequential row-vector products.
RealVector mat_pow_apply(const RealMatrix& m, const RealVector& v, std::uint64_t power);
ComplexVector mat_pow_apply(const ComplexMatrix& m, const ComplexVector& v, std::uint64_t power);

// Scaling and squaring with a degree-13 Taylor series; the matrix is scaled
// until ||M / 2^s||_1 <= 0.5.
RealMatrix expm(const RealMatrix& m);
ComplexMatrix expm(const ComplexMatrix& m);

// Principal logarithm of an invertible 2x2 matrix. Uses the two-point
// interpolation log M = a*1 + b*M with b the divided difference of log over
// the eigenvalues, which reduces to the Jordan-limit formula for a repeated
// eigenvalue. Throws BranchCutHit for an eigenvalue on the negative real axis.
ComplexMatrix logm_2x2(const ComplexMatrix& m);

double determinant(const RealMatrix& m);

// Classical adjugate, adj(M)_ij = (-1)^(i+j) * minor_ji. Well defined for
// singular matrices. Cofactor expansion for d <= 4; det * inverse for larger
// well-conditioned inputs, LU-evaluated cofactors otherwise.
RealMatrix adjugate(const RealMatrix& m);

// True when the Hermitian matrix h is positive definite (Cholesky succeeds).
bool is_positive_definite(const ComplexMatrix& h);

}  // namespace ticklab::linalg

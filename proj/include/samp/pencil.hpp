#pragma once

#include <optional>

#include "samp/signal_model.hpp"
#include "samp/types.hpp"

namespace samp {

/// Hankel data matrix Y and its two shifted sub-pencils.
struct HankelPair {
  CMatrix full;  // (N-L) x (L+1), full(i, j) = y(i + j)
  CMatrix y0;    // full without the last column
  CMatrix y1;    // full without the first column
  Index pencil_parameter = 0;

  Index rows() const { return full.rows(); }
};

/// Thin SVD of Y0, optionally truncated. Singular values are descending.
struct SvdFactors {
  CMatrix u;
  RVector sigma;
  CMatrix v;
  Index rank = 0;

  SvdFactors truncated(Index r) const;
};

/// Reduced pencil A = S^{-1} U^H Y1 V, its eigensystem and the
/// un-normalized matrix-pencil modes.
///
/// Column i of left_modes (U S Q), row i of right_modes (Q^{-1} V^H) and
/// eigenvalues[i] always refer to the same mode. Modes are stored in
/// descending |eigenvalue| order.
struct PencilDecomposition {
  CMatrix reduced;
  CMatrix eig_vectors;
  CMatrix eig_vectors_inv;
  CVector eigenvalues;
  CMatrix left_modes;
  CMatrix right_modes;
  Index rank = 0;
  /// Reciprocal 1-norm condition estimate of Q.
  double eig_vectors_rcond = 1.0;

  bool ill_conditioned() const { return eig_vectors_rcond < 1e-12; }
};

/// round(n / 3), ties away from zero. Requires n >= 4.
Index default_pencil_parameter(Index n);

HankelPair build_hankel(const TimeSeries& y, Index l);

SvdFactors svd_y0(const HankelPair& pair, std::optional<Index> rank = std::nullopt);

/// Full pipeline from the Hankel pair: SVD of Y0, truncation, reduced matrix
/// and eigen-decomposition.
PencilDecomposition decompose(const HankelPair& pair, Index rank);

/// Same as above, reusing an already computed (possibly untruncated) SVD.
PencilDecomposition decompose(const HankelPair& pair, const SvdFactors& svd, Index rank);

/// Builds the modes from an explicit eigensystem of the reduced matrix.
/// `svd` must already be truncated to the size of `eig_vectors`. The columns
/// of eig_vectors are used as given (no reordering, no rescaling).
PencilDecomposition assemble_modes(const SvdFactors& svd, const CMatrix& reduced, const CMatrix& eig_vectors,
                                   const CVector& eigenvalues);

}  // namespace samp

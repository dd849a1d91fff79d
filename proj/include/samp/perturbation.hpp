#pragma once

#include <vector>

#include "samp/pencil.hpp"
#include "samp/signal_model.hpp"
#include "samp/types.hpp"

// First-order noise analysis of the pencil modes. Everything here is dense
// and O(L^3); it exists to check the theory numerically, not to run fast.

namespace samp {

/// Vandermonde factorization X0 = Z_L B Z_R of a noiseless Hankel pair.
struct NoiselessFactors {
  CMatrix z_left;      // (N-L) x M, z_left(n, m) = z_m^n
  CMatrix z_right;     // M x L, z_right(m, c) = z_m^c
  CVector amplitudes;  // b
  CVector poles;       // z
  CMatrix p_rows;      // M x (N-L), rows of (Z_L^H Z_L)^{-1} Z_L^H
  CMatrix q_cols;      // L x M, columns of Z_R^H (Z_R Z_R^H)^{-1}
  /// Condition number of Z_R Z_R^H.
  double gram_condition = 1.0;

  Index order() const { return poles.size(); }
  Index pencil_parameter() const { return z_right.cols(); }
  Index mode_length() const { return z_left.rows(); }
  bool ill_conditioned() const { return gram_condition > 1e12; }
};

/// Gamma / xi decomposition of one signal mode's noise column.
struct PerturbationTerms {
  CVector e_left_col;              // E_L^i, length N-L
  CVector gammas;                  // gamma_{i,m} for m != i, in m order
  CVector xi;                      // length N-L
  std::vector<CVector> u_vectors;  // u_m for m != i, length N-L+1
};

NoiselessFactors noiseless_factors(const SignalSpec& spec, Index l);

/// (Q w)[r] = sum_t q[t] w[r + t], r = 0..N-L. This is the Hankel noise
/// matrix W (rows 0..N-L) applied to q.
CVector conv_apply(const CVector& q, const CVector& w);

/// Dense (N-L+1) x N matrix of the same operator, for cross-checks.
CMatrix conv_matrix(const CVector& q, Index n);

/// Full linear convolution, length u.size() + q.size() - 1. Its norm equals
/// |Q^T u|.
CVector full_convolution(const CVector& u, const CVector& q);

/// [0, p^H] - z [p^H, 0]; `p_row` already holds the entries of p^H.
CVector u_vector(const CVector& p_row, Complex z);

/// E_L^i via the gamma / xi decomposition. `i` is zero-based.
PerturbationTerms first_order_noise_column(const NoiselessFactors& factors, const TimeSeries& noise, Index i,
                                           Complex perturbed_pole);

/// E_L^i assembled directly from the noise Hankel matrices W0 and W1.
CVector hankel_form_noise_column(const NoiselessFactors& factors, const TimeSeries& noise, Index i,
                                 Complex perturbed_pole);

/// Eigenvalue of the rank-M noisy pencil nearest to pole i.
Complex matched_perturbed_pole(const NoiselessFactors& factors, const HankelPair& noisy, Index i);

/// Spectral radius of D_i T_L^H delta T_R, where delta is the change from
/// X0^+ X1 to Y0^+ Y1 with Y0^+ truncated to rank M. Values below 1 mean the
/// first-order expansion converges.
double check_spectral_condition(const NoiselessFactors& factors, const HankelPair& noisy, Index i);

struct NoiseTermBounds {
  RVector gamma_bounds;  // one entry per m != i
  double xi_bound = 0.0;
};

/// High-probability bounds on |gamma_{i,m}| and |xi_i|_inf.
NoiseTermBounds noise_term_bounds(const NoiselessFactors& factors, double snr_i, double epsilon, Index i);

/// Right eigensystem with the dual basis: left_h = right^{-1}, so row k of
/// left_h is u_k^H with u_k^H v_k = 1.
struct Eigensystem {
  CVector values;
  CMatrix right;
  CMatrix left_h;
};

Eigensystem eigensystem(const CMatrix& a);

struct EigvecApprox {
  CVector vector;
  Complex perturbed_value;
  double spectral_radius = 0.0;
  bool condition_holds() const { return spectral_radius < 1.0; }
};

/// v_i plus the first-order correction sum_{k != i} a_ik v_k, using the
/// perturbed eigenvalue of A + delta nearest to lambda_i.
EigvecApprox perturbed_eigvec_approx(const Eigensystem& base, const CMatrix& delta, Index i);

/// Exact eigenvector of A + delta paired with lambda_i, scaled so that
/// u_i^H v = 1.
CVector exact_perturbed_eigvec(const Eigensystem& base, const CMatrix& delta, Index i);

/// |lambda - mean_k(mode[k+1] / mode[k])|, skipping zero denominators.
double local_ratio_feature(const CVector& mode, Complex eigenvalue);

}  // namespace samp

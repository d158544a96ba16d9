#ifndef MDLNMF_OBJECTIVE_HPP
#define MDLNMF_OBJECTIVE_HPP

#include <cmath>
#include <numbers>
#include <string>

#include "core.hpp"
#include "distfit.hpp"
#include "errors.hpp"

namespace mdlnmf {

inline void check_factor_shapes(const DataMatrix& v, const FactorPair& f) {
  if (f.w.rows() != v.rows() || f.h.cols() != v.cols() || f.w.cols() != f.h.rows())
    throw ShapeMismatchError(
        "factors " + std::to_string(f.w.rows()) + "x" + std::to_string(f.w.cols()) +
        " * " + std::to_string(f.h.rows()) + "x" + std::to_string(f.h.cols()) +
        " incompatible with data " + std::to_string(v.rows()) + "x" +
        std::to_string(v.cols()));
}

// E = V - W*H.
inline Matrix residual(const DataMatrix& v, const FactorPair& f) {
  check_factor_shapes(v, f);
  return v.values - f.w * f.h;
}

inline DescriptionLength description_length(const Matrix& w, const Matrix& h,
                                            const Matrix& e, const CodeModel& model) {
  DescriptionLength dl;
  dl.l_w = code_length_gamma(entries(w), model.gamma_w, model.delta);
  dl.l_h = code_length_gamma(entries(h), model.gamma_h, model.delta);
  dl.l_e = code_length_gaussian(entries(e), model.gauss_e, model.delta);
  return dl;
}

inline DescriptionLength description_length(const DataMatrix& v, const FactorPair& f,
                                            const CodeModel& model) {
  const Matrix e = residual(v, f);
  return description_length(f.w, f.h, e, model);
}

// Per-element derivative pieces of the three code-length terms, in bits:
//   wTilde_ij = -((alpha-1)/W_ij - beta) / ln 2
//   hTilde_ij = -((a-1)/H_ij - b) / ln 2
//   eTilde_ij = (E_ij - mu) / (sigma^2 ln 2)
struct TildeMatrices {
  Matrix w_tilde;
  Matrix h_tilde;
  Matrix e_tilde;
};

inline TildeMatrices tilde_matrices(const FactorPair& f, const Matrix& e,
                                    const CodeModel& model) {
  constexpr double ln2 = std::numbers::ln2;
  TildeMatrices t;
  t.w_tilde = (-((model.gamma_w.shape - 1.0) * f.w.array().inverse() - model.gamma_w.rate) / ln2).matrix();
  t.h_tilde = (-((model.gamma_h.shape - 1.0) * f.h.array().inverse() - model.gamma_h.rate) / ln2).matrix();
  const double sigma_sq = model.gauss_e.sigma * model.gauss_e.sigma;
  t.e_tilde = ((e.array() - model.gauss_e.mu) / (sigma_sq * ln2)).matrix();
  return t;
}

// Gradients of the total description length with the model parameters held
// fixed. E = V - W*H, so the residual term enters each factor gradient with
// a minus sign through the chain rule.
inline Matrix grad_w(const FactorPair& f, const Matrix& e, const CodeModel& model) {
  if (e.rows() != f.w.rows() || e.cols() != f.h.cols())
    throw ShapeMismatchError("grad_w: residual shape does not match factors");
  const TildeMatrices t = tilde_matrices(f, e, model);
  return t.w_tilde - t.e_tilde * f.h.transpose();
}

inline Matrix grad_h(const FactorPair& f, const Matrix& e, const CodeModel& model) {
  if (e.rows() != f.w.rows() || e.cols() != f.h.cols())
    throw ShapeMismatchError("grad_h: residual shape does not match factors");
  const TildeMatrices t = tilde_matrices(f, e, model);
  return t.h_tilde - f.w.transpose() * t.e_tilde;
}

}  // namespace mdlnmf

#endif  // MDLNMF_OBJECTIVE_HPP

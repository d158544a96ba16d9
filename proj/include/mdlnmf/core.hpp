#ifndef MDLNMF_CORE_HPP
#define MDLNMF_CORE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mdlnmf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Dense non-negative data matrix: m rows (dimensions) by n columns (data
// points). Labels are optional and empty when the source had none.
struct DataMatrix {
  Matrix values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

// The factorization V ~ W*H: W is m x r, H is r x n.
struct FactorPair {
  Matrix w;
  Matrix h;

  Index rank() const { return w.cols(); }
};

// Gamma distribution in shape/rate form.
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;
};

struct GaussianParams {
  double mu = 0.0;
  double sigma = 1.0;
};

// Fitted code-length model: one gamma per factor matrix, a Gaussian for the
// residual, and the precision delta (bin width in data units) the encoding
// is quantized to.
struct CodeModel {
  GammaParams gamma_w;
  GammaParams gamma_h;
  GaussianParams gauss_e;
  double delta = 1.0;
};

// Bit-length breakdown of the encoded message.
struct DescriptionLength {
  double l_w = 0.0;
  double l_h = 0.0;
  double l_e = 0.0;

  double total() const { return l_w + l_h + l_e; }
};

// One solver iteration. Rejected iterations record the trial values that
// were thrown away.
struct TraceEntry {
  long iteration = 0;
  double objective = 0.0;  // bits
  double l_w = 0.0;
  double l_h = 0.0;
  double l_e = 0.0;
  double frobenius_error = 0.0;
  double learning_rate = 0.0;
  bool accepted = true;
};

using RunTrace = std::vector<TraceEntry>;

// View of a matrix as a flat sample sequence (column-major storage order).
inline std::span<const double> entries(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

inline DataMatrix validate_nonneg(const Matrix& values) {
  if (values.rows() < 1 || values.cols() < 1)
    throw DataError("matrix must have at least one row and one column");
  for (Index j = 0; j < values.cols(); ++j) {
    for (Index i = 0; i < values.rows(); ++i) {
      const double x = values(i, j);
      if (!std::isfinite(x)) throw NonFiniteEntryError(i, j);
      if (x < 0.0) throw NegativeEntryError(i, j, x);
    }
  }
  return DataMatrix{values, {}, {}};
}

inline double frobenius_sq(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatchError("frobenius_sq: " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " +
                             std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
  return (a - b).squaredNorm();
}

}  // namespace mdlnmf

#endif  // MDLNMF_CORE_HPP

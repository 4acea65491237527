#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace qcausal {

using complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEigenTol = 1e-10;

/// Dense square complex matrix, row-major.
///
/// All operators in the library (states, gates, projectors, Choi matrices)
/// are values of this type. Instances are immutable from the caller's point
/// of view once built; every operation returns a fresh matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<complex> entries);
  /// Row-major nested initializer, e.g. {{1, 0}, {0, -1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix zeros(std::size_t dim) { return ComplexMatrix(dim); }
  static ComplexMatrix diagonal(std::span<const double> values);
  /// |v><v| for a (not necessarily normalized) column vector v.
  static ComplexMatrix outer(std::span<const complex> v);

  std::size_t dim() const { return dim_; }
  const complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  std::span<const complex> data() const { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conj() const;
  complex trace() const;

  /// max |M_ij - conj(M_ji)|.
  double hermiticity_error() const;
  bool is_hermitian(double tol = kHermitianTol) const { return hermiticity_error() <= tol; }
  /// (M + M^dagger) / 2
  ComplexMatrix hermitian_part() const;

  double frobenius_norm() const;
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, complex s) { return a *= s; }
  friend ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<complex> data_;
};

/// max_ij |a_ij - b_ij|; dimensions must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
/// Tr(a b) without forming the product.
complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Ordered qubit labels. The first label is the most significant bit of the
/// flat matrix index; every module relies on this convention.
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::vector<std::string> labels);
  SubsystemLayout(std::initializer_list<std::string> labels)
      : SubsystemLayout(std::vector<std::string>(labels)) {}

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t dim() const { return std::size_t{1} << labels_.size(); }
  bool contains(const std::string& label) const;
  /// Position of label in the ordering; throws ArgumentError if absent.
  std::size_t index_of(const std::string& label) const;
  /// Bit shift of a label inside the flat index.
  std::size_t shift_of(const std::string& label) const { return size() - 1 - index_of(label); }
  std::string to_string() const;

  friend bool operator==(const SubsystemLayout&, const SubsystemLayout&) = default;

 private:
  std::vector<std::string> labels_;
};

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
/// 4x4 swap on two qubits.
ComplexMatrix swap();
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors);

/// Reduced matrix on `keep`, listed in layout order regardless of the order
/// given. Throws ArgumentError on unknown labels or a dimension mismatch.
ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout,
                            const std::vector<std::string>& keep);

/// Transpose the indices of subsystem `on` only.
ComplexMatrix partial_transpose(const ComplexMatrix& m, const SubsystemLayout& layout,
                                const std::string& on);

/// Reorder subsystems: result layout is `to` (a permutation of `from`).
ComplexMatrix permute_subsystems(const ComplexMatrix& m, const SubsystemLayout& from,
                                 const SubsystemLayout& to);

/// Embed a k-qubit operator acting on `targets` (in the given order) into the
/// full layout, i.e. apply op to those qubits and identity elsewhere, and
/// return op_full * m.
ComplexMatrix apply_left(const ComplexMatrix& op, const ComplexMatrix& m,
                         const SubsystemLayout& layout, const std::vector<std::string>& targets);

/// op_full * m * op_full^dagger for a local operator on `targets`.
ComplexMatrix conjugate(const ComplexMatrix& op, const ComplexMatrix& m,
                        const SubsystemLayout& layout, const std::vector<std::string>& targets);

struct EigenSystem {
  std::vector<double> values;       // ascending
  std::vector<std::vector<complex>> vectors;  // vectors[k] pairs with values[k]
};

/// Cyclic Jacobi on a Hermitian matrix. Throws ContractViolation if the
/// input is not Hermitian within kHermitianTol (scaled by its magnitude).
EigenSystem hermitian_eigensystem(const ComplexMatrix& m);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);

/// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const ComplexMatrix& m);

/// Smallest eigenvalue; convenience for PSD checks.
double min_eigenvalue(const ComplexMatrix& m);

}  // namespace qcausal

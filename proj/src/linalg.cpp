#include "qcausal/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "qcausal/errors.hpp"

namespace qcausal {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<complex> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim_ * dim_) {
    throw ArgumentError("ComplexMatrix: expected " + std::to_string(dim_ * dim_) +
                        " entries, got " + std::to_string(data_.size()));
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<complex>> rows)
    : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw ArgumentError("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const complex> v) {
  ComplexMatrix m(v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r] * std::conj(v[c]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out(*this);
  for (auto& z : out.data_) z = std::conj(z);
  return out;
}

complex ComplexMatrix::trace() const {
  complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::hermiticity_error() const {
  double err = 0.0;
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = r; c < dim_; ++c)
      err = std::max(err, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return err;
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      out(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw ArgumentError("ComplexMatrix +: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw ArgumentError("ComplexMatrix -: dimension mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim_ != b.dim_) throw ArgumentError("ComplexMatrix *: dimension mismatch");
  const std::size_t n = a.dim_;
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const complex ark = a(r, k);
      if (ark == complex{}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw ArgumentError("max_abs_diff: dimension mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw ArgumentError("trace_of_product: dimension mismatch");
  complex t = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t k = 0; k < a.dim(); ++k) t += a(r, k) * b(k, r);
  return t;
}

// ---------------------------------------------------------------------------

SubsystemLayout::SubsystemLayout(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (!seen.insert(l).second) throw ArgumentError("SubsystemLayout: duplicate label '" + l + "'");
  }
}

bool SubsystemLayout::contains(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t SubsystemLayout::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end())
    throw ArgumentError("unknown subsystem label '" + label + "' in layout " + to_string());
  return static_cast<std::size_t>(it - labels_.begin());
}

std::string SubsystemLayout::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < labels_.size(); ++i) os << (i ? "," : "") << labels_[i];
  os << ']';
  return os.str();
}

namespace pauli {
ComplexMatrix I() { return ComplexMatrix::identity(2); }
ComplexMatrix X() { return {{0, 1}, {1, 0}}; }
ComplexMatrix Y() { return {{0, complex(0, -1)}, {complex(0, 1), 0}}; }
ComplexMatrix Z() { return {{1, 0}, {0, -1}}; }
ComplexMatrix swap() {
  return {{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
}
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t ar = 0; ar < na; ++ar)
    for (std::size_t ac = 0; ac < na; ++ac) {
      const complex s = a(ar, ac);
      if (s == complex{}) continue;
      for (std::size_t br = 0; br < nb; ++br)
        for (std::size_t bc = 0; bc < nb; ++bc) out(ar * nb + br, ac * nb + bc) = s * b(br, bc);
    }
  return out;
}

ComplexMatrix kron(std::initializer_list<ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

namespace {

void check_dim(const ComplexMatrix& m, const SubsystemLayout& layout, const char* who) {
  if (m.dim() != layout.dim()) {
    throw ArgumentError(std::string(who) + ": matrix dimension " + std::to_string(m.dim()) +
                        " does not match layout " + layout.to_string());
  }
}

// Scatter the bits of `compact` (most significant first) onto the positions
// given by `shifts`.
std::size_t scatter_bits(std::size_t compact, const std::vector<std::size_t>& shifts) {
  std::size_t out = 0;
  const std::size_t k = shifts.size();
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t bit = (compact >> (k - 1 - i)) & 1U;
    out |= bit << shifts[i];
  }
  return out;
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemLayout& layout,
                            const std::vector<std::string>& keep) {
  check_dim(m, layout, "partial_trace");
  std::vector<bool> kept(layout.size(), false);
  for (const auto& l : keep) kept[layout.index_of(l)] = true;

  std::vector<std::size_t> keep_shifts, trace_shifts;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const std::size_t shift = layout.size() - 1 - i;
    (kept[i] ? keep_shifts : trace_shifts).push_back(shift);
  }
  const std::size_t dk = std::size_t{1} << keep_shifts.size();
  const std::size_t dt = std::size_t{1} << trace_shifts.size();

  ComplexMatrix out(dk);
  for (std::size_t r = 0; r < dk; ++r) {
    const std::size_t rbase = scatter_bits(r, keep_shifts);
    for (std::size_t c = 0; c < dk; ++c) {
      const std::size_t cbase = scatter_bits(c, keep_shifts);
      complex s = 0.0;
      for (std::size_t t = 0; t < dt; ++t) {
        const std::size_t toff = scatter_bits(t, trace_shifts);
        s += m(rbase | toff, cbase | toff);
      }
      out(r, c) = s;
    }
  }
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, const SubsystemLayout& layout,
                                const std::string& on) {
  check_dim(m, layout, "partial_transpose");
  const std::size_t bit = std::size_t{1} << layout.shift_of(on);
  ComplexMatrix out(m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) {
      // swap the `on` bit between row and column index
      const std::size_t rb = r & bit, cb = c & bit;
      const std::size_t r2 = (r & ~bit) | cb;
      const std::size_t c2 = (c & ~bit) | rb;
      out(r2, c2) = m(r, c);
    }
  return out;
}

ComplexMatrix permute_subsystems(const ComplexMatrix& m, const SubsystemLayout& from,
                                 const SubsystemLayout& to) {
  check_dim(m, from, "permute_subsystems");
  if (to.size() != from.size()) throw ArgumentError("permute_subsystems: layout size mismatch");
  // For each position in `to`, the shift of that label inside `from`.
  std::vector<std::size_t> src_shifts;
  for (const auto& l : to.labels()) src_shifts.push_back(from.shift_of(l));
  const std::size_t n = m.dim();
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) map[i] = scatter_bits(i, src_shifts);
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = m(map[r], map[c]);
  return out;
}

ComplexMatrix apply_left(const ComplexMatrix& op, const ComplexMatrix& m,
                         const SubsystemLayout& layout, const std::vector<std::string>& targets) {
  check_dim(m, layout, "apply_left");
  const std::size_t k = targets.size();
  if (op.dim() != (std::size_t{1} << k)) throw ArgumentError("apply_left: operator size mismatch");
  std::vector<std::size_t> shifts;
  std::size_t mask = 0;
  for (const auto& t : targets) {
    shifts.push_back(layout.shift_of(t));
    mask |= std::size_t{1} << shifts.back();
  }
  if (std::popcount(mask) != static_cast<int>(k)) throw ArgumentError("apply_left: repeated target");

  const std::size_t n = m.dim(), dk = op.dim();
  std::vector<std::size_t> local(dk);
  for (std::size_t a = 0; a < dk; ++a) local[a] = scatter_bits(a, shifts);

  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (r & mask) continue;  // r enumerates the "rest" bits only
    for (std::size_t a = 0; a < dk; ++a) {
      const std::size_t row = r | local[a];
      for (std::size_t b = 0; b < dk; ++b) {
        const complex w = op(a, b);
        if (w == complex{}) continue;
        const std::size_t src = r | local[b];
        for (std::size_t c = 0; c < n; ++c) out(row, c) += w * m(src, c);
      }
    }
  }
  return out;
}

ComplexMatrix conjugate(const ComplexMatrix& op, const ComplexMatrix& m,
                        const SubsystemLayout& layout, const std::vector<std::string>& targets) {
  // (O m O^dagger) = O (O m^dagger)^dagger, and m is typically Hermitian but
  // we do not assume it.
  const ComplexMatrix left = apply_left(op, m, layout, targets);
  return apply_left(op, left.adjoint(), layout, targets).adjoint();
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi for complex Hermitian matrices.
//
// Each rotation zeroes A(p,q) with a unitary acting on rows/cols p,q:
//   J = [[c, -s e^{i phi}], [s e^{-i phi}, c]] applied as A <- J^dagger A J,
// where phi = arg A(p,q). This reduces the problem to the real symmetric
// 2x2 case on |A(p,q)|.

namespace {

double off_diagonal_norm(const std::vector<complex>& a, std::size_t n) {
  double s = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (r != c) s += std::norm(a[r * n + c]);
  return std::sqrt(s);
}

constexpr double kJacobiOffTol = 1e-13;
constexpr int kJacobiMaxSweeps = 100;

}  // namespace

EigenSystem hermitian_eigensystem(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  const double scale = std::max(1.0, m.max_abs());
  if (m.hermiticity_error() > kHermitianTol * scale) {
    std::ostringstream os;
    os << "hermitian_eigensystem: input is not Hermitian (error " << m.hermiticity_error() << ")";
    throw ContractViolation(os.str());
  }

  std::vector<complex> a(m.data().begin(), m.data().end());
  // Exact hermitization removes the sub-tolerance asymmetry before rotating.
  for (std::size_t r = 0; r < n; ++r) {
    a[r * n + r] = a[r * n + r].real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const complex h = 0.5 * (a[r * n + c] + std::conj(a[c * n + r]));
      a[r * n + c] = h;
      a[c * n + r] = std::conj(h);
    }
  }
  std::vector<complex> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  const double tol = kJacobiOffTol * scale;
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a, n) < tol) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const complex apq = a[p * n + q];
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const complex phase = apq / mag;  // e^{i phi}
        const double app = a[p * n + p].real();
        const double aqq = a[q * n + q].real();
        // Real symmetric Jacobi on [[app, mag], [mag, aqq]].
        const double theta = (aqq - app) / (2.0 * mag);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // Column rotation: A <- A J, with J(p,p)=c, J(q,p)=-s conj(phase),
        // J(p,q)=s phase, J(q,q)=c.
        const complex jqp = -s * std::conj(phase);
        const complex jpq = s * phase;
        for (std::size_t k = 0; k < n; ++k) {
          const complex akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = akp * c + akq * jqp;
          a[k * n + q] = akp * jpq + akq * c;
        }
        // Row rotation: A <- J^dagger A.
        for (std::size_t k = 0; k < n; ++k) {
          const complex apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk + std::conj(jqp) * aqk;
          a[q * n + k] = std::conj(jpq) * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        a[p * n + p] = a[p * n + p].real();
        a[q * n + q] = a[q * n + q].real();
        for (std::size_t k = 0; k < n; ++k) {
          const complex vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = vkp * c + vkq * jqp;
          v[k * n + q] = vkp * jpq + vkq * c;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a[i * n + i].real() < a[j * n + j].real(); });
  EigenSystem es;
  for (std::size_t i : order) {
    es.values.push_back(a[i * n + i].real());
    std::vector<complex> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k * n + i];
    es.vectors.push_back(std::move(col));
  }
  return es;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  return hermitian_eigensystem(m).values;
}

double trace_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (double ev : hermitian_eigenvalues(m)) s += std::abs(ev);
  return s;
}

double min_eigenvalue(const ComplexMatrix& m) {
  const auto ev = hermitian_eigenvalues(m);
  return ev.empty() ? 0.0 : ev.front();
}

}  // namespace qcausal

#pragma once

// Density matrices, the named two-qubit families and random sampling.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qlab/linalg.hpp"

namespace qlab {

using Rng = std::mt19937_64;

/// Raised when a computed quantity breaks a mathematical invariant.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hermitian, unit-trace, positive semidefinite operator on a tensor product
/// of factors. The first `a_factors` factors form side A, the rest side B.
class DensityMatrix {
 public:
  DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims, std::size_t a_factors = 1)
      : DensityMatrix(std::move(m), std::move(dims), a_factors, Trusted{}) {
    validate_positivity();
  }

  /// Skips the eigenvalue check; shape, hermiticity and trace are still
  /// verified. For states produced by trace-preserving maps of valid states.
  static DensityMatrix trusted(ComplexMatrix m, std::vector<std::size_t> dims,
                               std::size_t a_factors = 1) {
    return DensityMatrix(std::move(m), std::move(dims), a_factors, Trusted{});
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  std::span<const std::size_t> dims() const { return dims_; }
  std::size_t a_factors() const { return a_factors_; }
  std::size_t side() const { return matrix_.rows(); }

  std::size_t dim_a() const {
    return std::accumulate(dims_.begin(), dims_.begin() + static_cast<std::ptrdiff_t>(a_factors_),
                           std::size_t{1}, std::multiplies<>());
  }
  std::size_t dim_b() const { return side() / dim_a(); }
  bool is_bipartite() const { return a_factors_ >= 1 && a_factors_ < dims_.size(); }

  /// Matrix viewed as a plain A|B bipartition with dims (dim_a, dim_b).
  std::vector<std::size_t> bipartite_dims() const { return {dim_a(), dim_b()}; }

  ComplexMatrix reduced_a() const {
    const auto d = bipartite_dims();
    const std::size_t keep[] = {0};
    return partial_trace(matrix_, d, keep);
  }
  ComplexMatrix reduced_b() const {
    const auto d = bipartite_dims();
    const std::size_t keep[] = {1};
    return partial_trace(matrix_, d, keep);
  }

  /// Same matrix with the A|B grouping collapsed to two factors.
  DensityMatrix as_bipartite() const {
    return DensityMatrix(matrix_, bipartite_dims(), 1, Trusted{});
  }

 private:
  struct Trusted {};
  DensityMatrix(ComplexMatrix m, std::vector<std::size_t> dims, std::size_t a_factors, Trusted)
      : matrix_(std::move(m)), dims_(std::move(dims)), a_factors_(a_factors) {
    const std::size_t total =
        std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
    if (!matrix_.is_square() || dims_.empty() || total != matrix_.rows()) {
      throw std::invalid_argument("DensityMatrix: matrix side does not match product of dims");
    }
    if (a_factors_ > dims_.size()) {
      throw std::invalid_argument("DensityMatrix: A factor count exceeds factor count");
    }
    if (!is_hermitian(matrix_)) {
      throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0)) > tol::trace) {
      std::ostringstream os;
      os << "DensityMatrix: trace " << matrix_.trace().real() << " differs from 1";
      throw std::invalid_argument(os.str());
    }
  }

  void validate_positivity() const {
    const auto vals = eigenvalues_hermitian(matrix_);
    if (vals.back() < -tol::psd_clip) {
      std::ostringstream os;
      os << "DensityMatrix: negative eigenvalue " << vals.back();
      throw std::invalid_argument(os.str());
    }
  }

  ComplexMatrix matrix_;
  std::vector<std::size_t> dims_;
  std::size_t a_factors_ = 1;
};

inline std::vector<Complex> basis_ket(std::size_t dim, std::size_t index) {
  std::vector<Complex> k(dim, 0.0);
  k.at(index) = 1.0;
  return k;
}

inline std::vector<Complex> kron_ket(std::span<const Complex> a, std::span<const Complex> b) {
  std::vector<Complex> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x * y);
  return out;
}

/// (|00> + |11>)/sqrt(2)
inline std::vector<Complex> bell_ket() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {r, 0.0, 0.0, r};
}

inline DensityMatrix bell_state() {
  return DensityMatrix::trusted(ComplexMatrix::projector(bell_ket()), {2, 2});
}

inline DensityMatrix maximally_mixed(std::vector<std::size_t> dims) {
  const std::size_t n =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  return DensityMatrix::trusted(ComplexMatrix::identity(n) * (1.0 / static_cast<double>(n)),
                                std::move(dims));
}

inline DensityMatrix product_state(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<std::size_t> dims(a.dims().begin(), a.dims().end());
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return DensityMatrix::trusted(kron(a.matrix(), b.matrix()), std::move(dims), a.dims().size());
}

namespace detail {
inline void require_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}
}  // namespace detail

/// (1 - eta)|00><00| + eta|11><11|
inline DensityMatrix cc_family(double eta) {
  detail::require_unit_interval(eta, "cc_family: eta");
  const double diag[] = {1.0 - eta, 0.0, 0.0, eta};
  return DensityMatrix::trusted(ComplexMatrix::diagonal(diag), {2, 2});
}

/// (eta/3) P+ + (1 - eta) P-, with P+- the projectors onto the symmetric and
/// antisymmetric subspaces of two qubits.
inline DensityMatrix werner(double eta) {
  detail::require_unit_interval(eta, "werner: eta");
  ComplexMatrix swap(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = 1.0;
  const auto id = ComplexMatrix::identity(4);
  const ComplexMatrix p_sym = (id + swap) * 0.5;
  const ComplexMatrix p_anti = (id - swap) * 0.5;
  return DensityMatrix::trusted(p_sym * (eta / 3.0) + p_anti * (1.0 - eta), {2, 2});
}

/// (1 - eta) 1/4 + eta |beta><beta|
inline DensityMatrix isotropic(double eta) {
  detail::require_unit_interval(eta, "isotropic: eta");
  return DensityMatrix::trusted(ComplexMatrix::identity(4) * ((1.0 - eta) / 4.0) +
                                    ComplexMatrix::projector(bell_ket()) * eta,
                                {2, 2});
}

/// (1 - gamma) (|00><00| + |11><11|)/2 + gamma |beta><beta|
inline DensityMatrix mixture_family(double gamma) {
  detail::require_unit_interval(gamma, "mixture_family: gamma");
  const double diag[] = {0.5, 0.0, 0.0, 0.5};
  return DensityMatrix::trusted(ComplexMatrix::diagonal(diag) * (1.0 - gamma) +
                                    ComplexMatrix::projector(bell_ket()) * gamma,
                                {2, 2});
}

/// (1 - a) 1/d + a |psi><psi|
inline DensityMatrix pseudo_pure(double a, std::span<const Complex> psi,
                                 std::vector<std::size_t> dims = {2, 2}) {
  detail::require_unit_interval(a, "pseudo_pure: a");
  double norm = 0.0;
  for (const auto& z : psi) norm += std::norm(z);
  if (std::abs(norm - 1.0) > tol::normalization) {
    throw std::invalid_argument("pseudo_pure: state vector is not normalized");
  }
  const std::size_t d = psi.size();
  if (std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>()) != d) {
    throw std::invalid_argument("pseudo_pure: dims do not match state vector length");
  }
  return DensityMatrix::trusted(ComplexMatrix::identity(d) * ((1.0 - a) / static_cast<double>(d)) +
                                    ComplexMatrix::projector(psi) * a,
                                std::move(dims));
}

/// (|+0><+0| + |-1><-1|)/2
inline DensityMatrix ad_initial_state() {
  const double r = 1.0 / std::numbers::sqrt2;
  const std::vector<Complex> plus{r, r};
  const std::vector<Complex> minus{r, -r};
  const auto k0 = kron_ket(plus, basis_ket(2, 0));
  const auto k1 = kron_ket(minus, basis_ket(2, 1));
  return DensityMatrix::trusted(
      (ComplexMatrix::projector(k0) + ComplexMatrix::projector(k1)) * 0.5, {2, 2});
}

inline std::vector<Complex> random_pure_ket(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> k(dim);
  double norm = 0.0;
  for (auto& z : k) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = Complex(re, im);
    norm += std::norm(z);
  }
  for (auto& z : k) z /= std::sqrt(norm);
  return k;
}

/// Hilbert-Schmidt (Ginibre) ensemble: G G^dagger / tr(G G^dagger) with G a
/// dim x rank matrix of standard complex Gaussians.
inline DensityMatrix random_density(std::vector<std::size_t> dims, std::size_t rank, Rng& rng) {
  const std::size_t dim =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (rank < 1 || rank > dim) {
    throw std::invalid_argument("random_density: rank must lie in [1, dim]");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(dim, rank);
  for (auto& z : g.entries()) {
    const double re = normal(rng);
    const double im = normal(rng);
    z = Complex(re, im);
  }
  ComplexMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  // Exact hermiticity after the rescale.
  for (std::size_t i = 0; i < dim; ++i) {
    rho(i, i) = rho(i, i).real();
    for (std::size_t j = i + 1; j < dim; ++j) rho(j, i) = std::conj(rho(i, j));
  }
  return DensityMatrix::trusted(std::move(rho), std::move(dims));
}

inline DensityMatrix random_density(std::vector<std::size_t> dims, std::size_t rank,
                                    std::uint64_t seed) {
  Rng rng(seed);
  return random_density(std::move(dims), rank, rng);
}

/// True iff rho equals the product of its marginals within 1e-9.
inline bool is_product(const DensityMatrix& rho) {
  if (!rho.is_bipartite()) {
    throw std::invalid_argument("is_product: state is not bipartite");
  }
  return max_abs_diff(rho.matrix(), kron(rho.reduced_a(), rho.reduced_b())) <=
         tol::product_state;
}

/// Exchanges the roles of A and B.
inline DensityMatrix swap_subsystems(const DensityMatrix& rho) {
  const std::size_t da = rho.dim_a();
  const std::size_t db = rho.dim_b();
  ComplexMatrix out(rho.side(), rho.side());
  const auto& m = rho.matrix();
  for (std::size_t a = 0; a < da; ++a)
    for (std::size_t b = 0; b < db; ++b)
      for (std::size_t a2 = 0; a2 < da; ++a2)
        for (std::size_t b2 = 0; b2 < db; ++b2)
          out(b * da + a, b2 * da + a2) = m(a * db + b, a2 * db + b2);
  std::vector<std::size_t> dims(rho.dims().begin() + static_cast<std::ptrdiff_t>(rho.a_factors()),
                                rho.dims().end());
  dims.insert(dims.end(), rho.dims().begin(),
              rho.dims().begin() + static_cast<std::ptrdiff_t>(rho.a_factors()));
  return DensityMatrix::trusted(std::move(out), std::move(dims), rho.dims().size() - rho.a_factors());
}

// ---------------------------------------------------------------------------
// Named families.

enum class Family { cc, werner, isotropic, mixture, bell, ad_initial };

inline std::string_view family_name(Family f) {
  switch (f) {
    case Family::cc: return "cc";
    case Family::werner: return "werner";
    case Family::isotropic: return "isotropic";
    case Family::mixture: return "mixture";
    case Family::bell: return "bell";
    case Family::ad_initial: return "ad0";
  }
  return "unknown";
}

inline Family parse_family(std::string_view name) {
  for (Family f : {Family::cc, Family::werner, Family::isotropic, Family::mixture, Family::bell,
                   Family::ad_initial})
    if (family_name(f) == name) return f;
  throw std::invalid_argument("unknown state family '" + std::string(name) + "'");
}

struct StateFamilyPoint {
  Family family;
  double parameter;
  DensityMatrix state;
};

inline StateFamilyPoint make_family_point(Family family, double parameter) {
  switch (family) {
    case Family::cc: return {family, parameter, cc_family(parameter)};
    case Family::werner: return {family, parameter, werner(parameter)};
    case Family::isotropic: return {family, parameter, isotropic(parameter)};
    case Family::mixture: return {family, parameter, mixture_family(parameter)};
    case Family::bell: return {family, parameter, bell_state()};
    case Family::ad_initial: return {family, parameter, ad_initial_state()};
  }
  throw std::invalid_argument("make_family_point: unknown family");
}

// ---------------------------------------------------------------------------
// Text format:
//   dims: d1 d2            (or "dims: 2 2 | 2 2" for composite sides)
//   re+imj re+imj ...      (one matrix row per line)

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

inline void format_real(std::ostringstream& os, double x) {
  os.precision(17);
  os << x;
}

// Parses "re+imj", "re-imj", "re" or "imj" starting at token[0..].
inline bool parse_complex_token(std::string_view tok, Complex& out) {
  auto parse_double = [](std::string_view s, double& v) {
    if (s.empty()) return false;
    std::string buf(s);
    char* end = nullptr;
    v = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size();
  };
  if (tok.empty()) return false;
  if (tok.back() != 'j') {
    double re = 0.0;
    if (!parse_double(tok, re)) return false;
    out = Complex(re, 0.0);
    return true;
  }
  std::string_view body = tok.substr(0, tok.size() - 1);
  // Split at the last sign that is not at position 0 and not after an exponent marker.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  double re = 0.0;
  double im = 0.0;
  if (split == std::string_view::npos) {
    if (body.empty() || body == "+" || body == "-") {
      im = body == "-" ? -1.0 : 1.0;
    } else if (!parse_double(body, im)) {
      return false;
    }
  } else {
    if (!parse_double(body.substr(0, split), re)) return false;
    std::string_view imag = body.substr(split);
    if (imag == "+" || imag == "-") {
      im = imag == "-" ? -1.0 : 1.0;
    } else if (!parse_double(imag, im)) {
      return false;
    }
  }
  out = Complex(re, im);
  return true;
}

}  // namespace detail

inline std::string format_state(const DensityMatrix& rho) {
  std::ostringstream os;
  os << "dims:";
  for (std::size_t f = 0; f < rho.dims().size(); ++f) {
    if (f == rho.a_factors() && rho.dims().size() > 2) os << " |";
    os << ' ' << rho.dims()[f];
  }
  os << '\n';
  const auto& m = rho.matrix();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      std::ostringstream cell;
      detail::format_real(cell, m(i, j).real());
      const double im = m(i, j).imag();
      cell << (std::signbit(im) ? '-' : '+');
      detail::format_real(cell, std::abs(im));
      cell << 'j';
      os << cell.str();
    }
    os << '\n';
  }
  return os.str();
}

/// Parses the text format; throws ParseError with a 1-based line/column.
inline DensityMatrix parse_state(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : text) {
      if (c == '\n') {
        lines.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) lines.push_back(cur);
  }

  struct Token {
    std::string text;
    std::size_t column;
  };
  auto tokenize = [](const std::string& line) {
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      toks.push_back({line.substr(start, i - start), start + 1});
    }
    return toks;
  };

  std::size_t ln = 0;
  while (ln < lines.size() && tokenize(lines[ln]).empty()) ++ln;
  if (ln >= lines.size()) throw ParseError(1, 1, "empty state file");

  auto header = tokenize(lines[ln]);
  if (header.empty() || header[0].text != "dims:") {
    throw ParseError(ln + 1, header.empty() ? 1 : header[0].column, "expected header 'dims:'");
  }
  std::vector<std::size_t> dims;
  std::size_t a_factors = 0;
  for (std::size_t t = 1; t < header.size(); ++t) {
    if (header[t].text == "|") {
      if (a_factors != 0 || dims.empty()) {
        throw ParseError(ln + 1, header[t].column, "misplaced '|' separator");
      }
      a_factors = dims.size();
      continue;
    }
    char* end = nullptr;
    const long v = std::strtol(header[t].text.c_str(), &end, 10);
    if (*end != '\0' || v < 1) {
      throw ParseError(ln + 1, header[t].column, "dimension must be a positive integer");
    }
    dims.push_back(static_cast<std::size_t>(v));
  }
  if (dims.size() < 2) throw ParseError(ln + 1, 1, "need at least two subsystem dimensions");
  if (a_factors == 0) {
    if (dims.size() != 2) throw ParseError(ln + 1, 1, "more than two dims require a '|' split");
    a_factors = 1;
  }
  const std::size_t side =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
  if (side > kMaxSide) throw ParseError(ln + 1, 1, "total dimension exceeds 16");

  ComplexMatrix m(side, side);
  std::size_t row = 0;
  for (++ln; ln < lines.size(); ++ln) {
    auto toks = tokenize(lines[ln]);
    if (toks.empty()) continue;
    if (row >= side) throw ParseError(ln + 1, toks[0].column, "too many rows");
    if (toks.size() != side) {
      throw ParseError(ln + 1, toks.size() < side ? lines[ln].size() + 1 : toks[side].column,
                       "expected " + std::to_string(side) + " entries, found " +
                           std::to_string(toks.size()));
    }
    for (std::size_t j = 0; j < side; ++j) {
      Complex z;
      if (!detail::parse_complex_token(toks[j].text, z)) {
        throw ParseError(ln + 1, toks[j].column, "malformed complex entry '" + toks[j].text + "'");
      }
      m(row, j) = z;
    }
    ++row;
  }
  if (row != side) {
    throw ParseError(lines.size() + 1, 1,
                     "expected " + std::to_string(side) + " rows, found " + std::to_string(row));
  }
  try {
    return DensityMatrix(std::move(m), std::move(dims), a_factors);
  } catch (const std::invalid_argument& e) {
    throw ParseError(1, 1, e.what());
  }
}

}  // namespace qlab

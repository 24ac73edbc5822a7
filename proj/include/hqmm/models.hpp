#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hqmm/errors.hpp"
#include "hqmm/linalg.hpp"

namespace hqmm {

/// Validation tolerance for user-supplied matrices, which may carry rounded
/// decimals from text files.
inline constexpr double kUserTol = 1e-10;
/// Validation tolerance for internally constructed objects.
inline constexpr double kInternalTol = 1e-12;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

namespace detail {

inline std::string num_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Output alphabet and words
// ---------------------------------------------------------------------------

enum class Symbol : std::uint8_t { A = 0, B = 1 };

inline constexpr char to_char(Symbol s) { return s == Symbol::A ? 'A' : 'B'; }

inline Symbol symbol_from_char(char c) {
  if (c == 'A') return Symbol::A;
  if (c == 'B') return Symbol::B;
  throw DomainError(std::string("invalid symbol character '") + c + "', expected 'A' or 'B'");
}

/// Non-empty output sequence over {A, B}.
struct Word {
  std::vector<Symbol> symbols;

  explicit Word(std::vector<Symbol> syms) : symbols(std::move(syms)) {
    if (symbols.empty()) throw DomainError("a word must contain at least one symbol");
  }

  static Word parse(std::string_view text) {
    std::vector<Symbol> syms;
    syms.reserve(text.size());
    for (char c : text) syms.push_back(symbol_from_char(c));
    return Word(std::move(syms));
  }

  std::string str() const {
    std::string s;
    s.reserve(symbols.size());
    for (Symbol m : symbols) s.push_back(to_char(m));
    return s;
  }

  std::size_t size() const { return symbols.size(); }

  bool operator==(const Word&) const = default;
};

// ---------------------------------------------------------------------------
// Classical machines
// ---------------------------------------------------------------------------

/// Two-state Markov chain with transition matrix
///
///     T = [ p    1-q ]
///         [ 1-p  q   ]
///
/// States are column vectors and T acts from the left, so columns are
/// outgoing distributions. State 0 emits A, state 1 emits B.
class MarkovModel {
 public:
  MarkovModel(double p, double q) : p_(p), q_(q) {
    check_open_unit(p, "p");
    check_open_unit(q, "q");
  }

  double p() const { return p_; }
  double q() const { return q_; }

  Matrix transition() const {
    Matrix t(2, 2);
    t(0, 0) = p_;
    t(0, 1) = 1.0 - q_;
    t(1, 0) = 1.0 - p_;
    t(1, 1) = q_;
    return t;
  }

 private:
  static void check_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
      throw DomainError(std::string(name) + " must lie in the open interval (0,1), got " +
                        detail::num_str(v));
  }

  double p_;
  double q_;
};

/// Column-stochastic square matrix: entries in [0,1], every column summing
/// to 1 within the given tolerance.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix m, double tol = kUserTol) : m_(std::move(m)) {
    validate(m_, tol);
  }

  static void validate(const Matrix& m, double tol) {
    if (m.rows() != m.cols() || m.rows() < 2)
      throw ValidationError("transition matrix must be square with at least 2 states, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double col_sum = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) col_sum += m(i, j);
      if (std::abs(col_sum - 1.0) > tol)
        throw ValidationError("column " + std::to_string(j) + " sums to " +
                              detail::num_str(col_sum) + ", expected 1 (deviation " +
                              detail::num_str(std::abs(col_sum - 1.0)) + ")");
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const double v = m(i, j);
        if (v < -tol || v > 1.0 + tol)
          throw ValidationError("transition matrix entry (" + std::to_string(i) + "," +
                                std::to_string(j) + ") = " + detail::num_str(v) +
                                " lies outside [0,1]");
      }
    }
  }

  const Matrix& matrix() const { return m_; }
  std::size_t n_states() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Hidden Markov machine over {A, B}: per-symbol sub-transition matrices
/// whose sum is column-stochastic. t_a(j, i) is the probability of moving
/// from state i to state j while emitting A.
class HiddenMarkovModel {
 public:
  HiddenMarkovModel(Matrix t_a, Matrix t_b, double tol = kUserTol)
      : t_a_(std::move(t_a)), t_b_(std::move(t_b)) {
    if (t_a_.rows() != t_a_.cols() || t_b_.rows() != t_b_.cols() || t_a_.rows() != t_b_.rows())
      throw ContractError("sub-transition matrices must be square and of equal dimension");
    if (t_a_.rows() < 2) throw ContractError("a hidden Markov machine needs at least 2 states");
    check_nonnegative(t_a_, "t_a", tol);
    check_nonnegative(t_b_, "t_b", tol);
    TransitionMatrix::validate(t_a_ + t_b_, tol);
  }

  std::size_t n_states() const { return t_a_.rows(); }
  const Matrix& t_a() const { return t_a_; }
  const Matrix& t_b() const { return t_b_; }
  const Matrix& sub(Symbol m) const { return m == Symbol::A ? t_a_ : t_b_; }
  Matrix transition() const { return t_a_ + t_b_; }

 private:
  static void check_nonnegative(const Matrix& m, const char* name, double tol) {
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j)
        if (m(i, j) < -tol)
          throw ValidationError(std::string(name) + " has negative entry (" + std::to_string(i) +
                                "," + std::to_string(j) + ") = " + detail::num_str(m(i, j)));
  }

  Matrix t_a_;
  Matrix t_b_;
};

// ---------------------------------------------------------------------------
// Quantum machine
// ---------------------------------------------------------------------------

/// One-qubit hidden quantum machine: a pair of Kraus operators satisfying
/// the completeness relation K_A'K_A + K_B'K_B = I (' denotes the adjoint),
/// so the two outcome probabilities always sum to one.
class HqmmModel {
 public:
  HqmmModel(const Mat2& k_a, const Mat2& k_b, double tol = kUserTol) : k_a_(k_a), k_b_(k_b) {
    const double dev = completeness_deviation(k_a_, k_b_);
    if (dev > tol)
      throw ValidationError("Kraus completeness violated: ||K_A'K_A + K_B'K_B - I||_F = " +
                            detail::num_str(dev));
  }

  /// Frobenius norm of K_A'K_A + K_B'K_B - I.
  static double completeness_deviation(const Mat2& k_a, const Mat2& k_b) {
    const Mat2 s = k_a.adjoint() * k_a + k_b.adjoint() * k_b - Mat2::identity();
    return s.frobenius_norm();
  }

  const Mat2& k_a() const { return k_a_; }
  const Mat2& k_b() const { return k_b_; }
  const Mat2& kraus(Symbol m) const { return m == Symbol::A ? k_a_ : k_b_; }

 private:
  Mat2 k_a_;
  Mat2 k_b_;
};

/// Parameters of the three-parameter Kraus family
///
///     K_A = [ cos(phi)  -a sin(phi) ]   K_B = [ 0  sqrt(1-a^2) sin(theta) ]
///           [ sin(phi)   a cos(phi) ]         [ 0  sqrt(1-a^2) cos(theta) ]
///
/// K_A'K_A = diag(1, a^2) and K_B'K_B = diag(0, 1-a^2), so completeness
/// holds identically in the parameters.
struct RestrictedParams {
  double a = 0.0;
  double phi = 0.0;
  double theta = 0.0;
};

// ---------------------------------------------------------------------------
// State representations
// ---------------------------------------------------------------------------

/// Normalized one-qubit pure state.
class PureState {
 public:
  explicit PureState(Vec2 amplitudes, double tol = kInternalTol) : amps_(amplitudes) {
    const double n = amps_.norm_sq();
    if (std::abs(n - 1.0) > tol)
      throw ValidationError("pure state norm^2 = " + detail::num_str(n) + ", expected 1");
  }

  const Vec2& amplitudes() const { return amps_; }

 private:
  Vec2 amps_;
};

/// One-qubit density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Mat2& m, double tol = kInternalTol) : m_(m) {
    if (std::abs(m_.e[0].imag()) > tol || std::abs(m_.e[3].imag()) > tol ||
        std::abs(m_.e[1] - std::conj(m_.e[2])) > tol)
      throw ValidationError("density matrix is not Hermitian within tolerance");
    if (std::abs(m_.trace().real() - 1.0) > tol)
      throw ValidationError("density matrix trace = " + detail::num_str(m_.trace().real()) +
                            ", expected 1");
    const double lo = hermitian_eigenvalues(m_).first;
    if (lo < -tol)
      throw ValidationError("density matrix has negative eigenvalue " + detail::num_str(lo));
  }

  static DensityMatrix maximally_mixed() { return DensityMatrix(Mat2::diagonal(0.5, 0.5)); }

  const Mat2& matrix() const { return m_; }
  std::pair<double, double> eigenvalues() const { return hermitian_eigenvalues(m_); }

 private:
  Mat2 m_;
};

/// Probability distribution over hidden states.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> probs, double tol = kInternalTol)
      : probs_(std::move(probs)) {
    if (probs_.empty()) throw ContractError("probability vector must be non-empty");
    double total = 0.0;
    for (double v : probs_) {
      if (v < -tol || v > 1.0 + tol)
        throw ValidationError("probability entry " + detail::num_str(v) + " lies outside [0,1]");
      total += v;
    }
    if (std::abs(total - 1.0) > tol)
      throw ValidationError("probabilities sum to " + detail::num_str(total) + ", expected 1");
  }

  static ProbVector uniform(std::size_t n) {
    return ProbVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

// ---------------------------------------------------------------------------
// Constructors and machine-level operations
// ---------------------------------------------------------------------------

inline MarkovModel make_mm(double p, double q) { return {p, q}; }

inline HiddenMarkovModel make_hmm(Matrix t_a, Matrix t_b, double tol = kUserTol) {
  return {std::move(t_a), std::move(t_b), tol};
}

inline HqmmModel make_hqmm(const Mat2& k_a, const Mat2& k_b, double tol = kUserTol) {
  return {k_a, k_b, tol};
}

/// Embeds a Markov chain as a two-state hidden machine: transitions into
/// state 0 emit A and transitions into state 1 emit B, so the output sequence
/// reveals the state path and word probabilities reduce to the plain chain
/// product over transition probabilities.
inline HiddenMarkovModel mm_to_hmm(const MarkovModel& mm) {
  const Matrix t = mm.transition();
  Matrix t_a(2, 2);
  Matrix t_b(2, 2);
  t_a(0, 0) = t(0, 0);
  t_a(0, 1) = t(0, 1);
  t_b(1, 0) = t(1, 0);
  t_b(1, 1) = t(1, 1);
  return HiddenMarkovModel(std::move(t_a), std::move(t_b), kInternalTol);
}

/// Builds the three-parameter machine. Angle 0 is accepted (it is the 2*pi
/// periodic image of the open interval's closure); a = 1 is not, since it
/// degenerates K_B to zero.
inline HqmmModel restricted_hqmm(const RestrictedParams& params) {
  if (!(params.a >= 0.0 && params.a < 1.0))
    throw DomainError("a must lie in [0,1), got " + detail::num_str(params.a));
  if (!(params.phi >= 0.0 && params.phi < kTwoPi))
    throw DomainError("phi must lie in [0,2*pi), got " + detail::num_str(params.phi));
  if (!(params.theta >= 0.0 && params.theta < kTwoPi))
    throw DomainError("theta must lie in [0,2*pi), got " + detail::num_str(params.theta));

  const double a = params.a;
  const double root = std::sqrt(1.0 - a * a);
  Mat2 k_a;
  k_a(0, 0) = std::cos(params.phi);
  k_a(0, 1) = -a * std::sin(params.phi);
  k_a(1, 0) = std::sin(params.phi);
  k_a(1, 1) = a * std::cos(params.phi);
  Mat2 k_b;
  k_b(0, 1) = root * std::sin(params.theta);
  k_b(1, 1) = root * std::cos(params.theta);
  return HqmmModel(k_a, k_b, kInternalTol);
}

/// Measurement-averaged channel K_A rho K_A' + K_B rho K_B' without
/// normalization or validation. Also valid on unnormalized conditional
/// matrices, where the trace carries the accumulated probability.
inline Mat2 channel_apply(const HqmmModel& machine, const Mat2& rho) {
  const Mat2& ka = machine.k_a();
  const Mat2& kb = machine.k_b();
  return ka * rho * ka.adjoint() + kb * rho * kb.adjoint();
}

/// One step of the measurement-averaged evolution. The result is
/// re-Hermitized as (m + m')/2 to suppress floating-point drift.
inline DensityMatrix apply_superoperator(const HqmmModel& machine, const DensityMatrix& rho) {
  Mat2 out = channel_apply(machine, rho.matrix());
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(out, kInternalTol);
}

/// Machine realized by watching a decaying two-level system over windows of
/// length delta_t: "no emission" implements K_A = U_A diag(1, e^{-g dt/2})
/// and "emission" implements K_B = U_B diag(0, sqrt(1 - e^{-g dt})), each
/// followed by a rotation. Equivalent to the restricted family with
/// a = e^{-g dt/2}; both factorizations are self-checked to 1e-12.
inline HqmmModel decay_realization(double gamma, double delta_t, double phi, double theta) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive, got " + detail::num_str(gamma));
  if (!(delta_t > 0.0))
    throw DomainError("delta_t must be positive, got " + detail::num_str(delta_t));

  const auto wrap_angle = [](double x) {
    double r = std::fmod(x, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
  };
  const double a = std::exp(-gamma * delta_t / 2.0);
  const double phi_w = wrap_angle(phi);
  const double theta_w = wrap_angle(theta);
  const HqmmModel machine = restricted_hqmm({a, phi_w, theta_w});

  Mat2 u_a;
  u_a(0, 0) = std::cos(phi_w);
  u_a(0, 1) = -std::sin(phi_w);
  u_a(1, 0) = std::sin(phi_w);
  u_a(1, 1) = std::cos(phi_w);
  Mat2 u_b;
  u_b(0, 0) = std::cos(theta_w);
  u_b(0, 1) = std::sin(theta_w);
  u_b(1, 0) = -std::sin(theta_w);
  u_b(1, 1) = std::cos(theta_w);
  const Mat2 damp_a = Mat2::diagonal(1.0, a);
  const Mat2 damp_b = Mat2::diagonal(0.0, std::sqrt(1.0 - a * a));
  if ((machine.k_a() - u_a * damp_a).frobenius_norm() > 1e-12 ||
      (machine.k_b() - u_b * damp_b).frobenius_norm() > 1e-12)
    throw InternalError("decay realization failed its rotation/damping factorization check");
  return machine;
}

}  // namespace hqmm

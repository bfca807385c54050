#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace gbs {

using Complex = std::complex<double>;

/// Generator families. Conjugation pairs unprimed <-> unprimed_conj and
/// primed <-> primed_conj; the pairing is an involution with no fixed points.
enum class Family : std::uint8_t { unprimed, unprimed_conj, primed, primed_conj };

Family conjugate_family(Family f);

struct Generator {
  Family family;
  int mode;  // 1-based
};

/// Ordered set of named anticommuting generators. The order is total and
/// fixed for the lifetime of the space; monomials are bitmasks over it.
/// Immutable; share via shared_ptr.
class GeneratorSpace {
public:
  using Ptr = std::shared_ptr<const GeneratorSpace>;

  // e_1..e_M
  static Ptr modes_only(int modes);
  // e_1..e_M, e*_1..e*_M
  static Ptr with_conjugates(int modes);
  // e_1..e_M, e'*_1..e'*_M  (the B-function space)
  static Ptr b_rep(int modes);
  // e, e*, e', e'* blocks, M modes each
  static Ptr full(int modes);
  static Ptr custom(std::vector<Generator> generators);

  int count() const { return static_cast<int>(generators_.size()); }
  int modes() const { return modes_; }
  const Generator& generator(int i) const { return generators_[static_cast<size_t>(i)]; }
  /// Index of (family, mode) in this space, -1 if absent.
  int index_of(Family f, int mode) const;
  /// Index of the conjugation partner of generator i, -1 if its family's
  /// partner block is not part of this space.
  int conjugate_partner(int i) const { return partner_[static_cast<size_t>(i)]; }
  /// True when every generator's conjugation partner is present.
  bool conjugation_closed() const { return conjugation_closed_; }
  std::string name(int i) const;

  bool same_as(const GeneratorSpace& other) const;

private:
  explicit GeneratorSpace(std::vector<Generator> gens, int modes);
  std::vector<Generator> generators_;
  std::vector<int> partner_;
  int modes_ = 0;
  bool conjugation_closed_ = false;
};

enum class Parity { even, odd, mixed };

/// Element of the finite Grassmann algebra over a GeneratorSpace: a map from
/// canonically ordered generator subsets (bitmasks) to complex amplitudes.
/// Storage is dense (2^n table) up to kDenseLimit generators, sparse above.
/// Values are immutable in spirit: every operation returns a fresh number,
/// so sharing across threads needs no coordination.
class GrassmannNumber {
public:
  static constexpr int kDenseLimit = 16;

  explicit GrassmannNumber(GeneratorSpace::Ptr space);
  static GrassmannNumber zero(GeneratorSpace::Ptr space);
  static GrassmannNumber scalar(GeneratorSpace::Ptr space, Complex c);
  static GrassmannNumber generator(GeneratorSpace::Ptr space, int index);
  static GrassmannNumber monomial(GeneratorSpace::Ptr space, std::uint32_t mask, Complex c);

  const GeneratorSpace::Ptr& space() const { return space_; }
  bool dense() const { return dense_; }

  Complex coefficient(std::uint32_t mask) const;
  void set_coefficient(std::uint32_t mask, Complex c);
  void add_coefficient(std::uint32_t mask, Complex c);

  /// Visits stored nonzero terms in ascending mask order.
  template <typename F>
  void for_each_term(F&& f) const {
    if (dense_) {
      for (std::uint32_t m = 0; m < dense_store_.size(); ++m) {
        if (dense_store_[m] != Complex{0.0, 0.0}) f(m, dense_store_[m]);
      }
    } else {
      for (const auto& [m, c] : sparse_store_) f(m, c);
    }
  }

  bool is_zero() const;
  int term_count() const;

  GrassmannNumber& operator+=(const GrassmannNumber& rhs);
  GrassmannNumber& operator-=(const GrassmannNumber& rhs);
  GrassmannNumber& operator*=(Complex c);

private:
  void require_dense_mask(std::uint32_t mask) const;
  GeneratorSpace::Ptr space_;
  bool dense_;
  std::vector<Complex> dense_store_;                              // dense mode
  std::vector<std::pair<std::uint32_t, Complex>> sparse_store_;   // sorted by mask
};

GrassmannNumber operator+(const GrassmannNumber& a, const GrassmannNumber& b);
GrassmannNumber operator-(const GrassmannNumber& a, const GrassmannNumber& b);
GrassmannNumber operator-(const GrassmannNumber& a);
GrassmannNumber operator*(const GrassmannNumber& a, const GrassmannNumber& b);
GrassmannNumber operator*(Complex c, const GrassmannNumber& a);
GrassmannNumber operator*(const GrassmannNumber& a, Complex c);

/// Exact equality of all (possibly implicit-zero) coefficients.
bool operator==(const GrassmannNumber& a, const GrassmannNumber& b);

/// Sign of e_S * e_T for disjoint masks: parity of the interleave that sorts
/// the concatenated ascending monomials.
int interleave_sign(std::uint32_t s, std::uint32_t t);

GrassmannNumber even_part(const GrassmannNumber& a);
GrassmannNumber odd_part(const GrassmannNumber& a);
Parity parity(const GrassmannNumber& a);  // zero counts as even

/// Involution: negation of the odd part.
GrassmannNumber involute(const GrassmannNumber& a);

/// Grassmann complex conjugation: maps generators through the pairing,
/// conjugates amplitudes, and reverses products ((abc)* = c*b*a*).
/// Requires a conjugation-closed space.
GrassmannNumber conjugate(const GrassmannNumber& a);

GrassmannNumber formal_left_derivative(const GrassmannNumber& a, int gen_index);
GrassmannNumber formal_right_derivative(const GrassmannNumber& a, int gen_index);

/// Iterated Berezin integral. `written_order` lists the differentials as
/// written; the innermost integral is the rightmost entry, and each single
/// integral follows int de_j (x + y*e_j) = y. Repeated generators are a
/// contract violation.
GrassmannNumber berezin_integrate(const GrassmannNumber& a, std::span<const int> written_order);

double norm(const GrassmannNumber& a);
double distance(const GrassmannNumber& a, const GrassmannNumber& b);

bool approx_equal(const GrassmannNumber& a, const GrassmannNumber& b, double tol = 1e-12);

/// Debug rendering: "(re,im)·e1e3 + ..." with monomials sorted by grade
/// then mask.
std::string to_debug_string(const GrassmannNumber& a, int precision = 6);

namespace detail {
void require_same_space(const GrassmannNumber& a, const GrassmannNumber& b);
void require_valid_generator(const GeneratorSpace& s, int index);
}  // namespace detail

}  // namespace gbs

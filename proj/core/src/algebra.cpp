#include "gbs/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gbs {

Family conjugate_family(Family f) {
  switch (f) {
    case Family::unprimed: return Family::unprimed_conj;
    case Family::unprimed_conj: return Family::unprimed;
    case Family::primed: return Family::primed_conj;
    case Family::primed_conj: return Family::primed;
  }
  throw std::logic_error("bad family");
}

GeneratorSpace::GeneratorSpace(std::vector<Generator> gens, int modes)
    : generators_(std::move(gens)), modes_(modes) {
  if (generators_.empty()) throw std::invalid_argument("GeneratorSpace: no generators");
  if (generators_.size() > 26)
    throw std::invalid_argument("GeneratorSpace: too many generators for bitmask storage");
  partner_.assign(generators_.size(), -1);
  conjugation_closed_ = true;
  for (size_t i = 0; i < generators_.size(); ++i) {
    const auto& g = generators_[i];
    Family pf = conjugate_family(g.family);
    int j = -1;
    for (size_t k = 0; k < generators_.size(); ++k) {
      if (generators_[k].family == pf && generators_[k].mode == g.mode) {
        j = static_cast<int>(k);
        break;
      }
    }
    partner_[i] = j;
    if (j < 0) conjugation_closed_ = false;
  }
}

GeneratorSpace::Ptr GeneratorSpace::custom(std::vector<Generator> generators) {
  int m = 0;
  for (const auto& g : generators) m = std::max(m, g.mode);
  return Ptr(new GeneratorSpace(std::move(generators), m));
}

static std::vector<Generator> family_block(Family f, int modes) {
  std::vector<Generator> out;
  out.reserve(static_cast<size_t>(modes));
  for (int j = 1; j <= modes; ++j) out.push_back({f, j});
  return out;
}

GeneratorSpace::Ptr GeneratorSpace::modes_only(int modes) {
  if (modes < 1) throw std::invalid_argument("modes_only: modes must be >= 1");
  return Ptr(new GeneratorSpace(family_block(Family::unprimed, modes), modes));
}

GeneratorSpace::Ptr GeneratorSpace::with_conjugates(int modes) {
  if (modes < 1) throw std::invalid_argument("with_conjugates: modes must be >= 1");
  auto gens = family_block(Family::unprimed, modes);
  auto conj = family_block(Family::unprimed_conj, modes);
  gens.insert(gens.end(), conj.begin(), conj.end());
  return Ptr(new GeneratorSpace(std::move(gens), modes));
}

GeneratorSpace::Ptr GeneratorSpace::b_rep(int modes) {
  if (modes < 1) throw std::invalid_argument("b_rep: modes must be >= 1");
  auto gens = family_block(Family::unprimed, modes);
  auto pc = family_block(Family::primed_conj, modes);
  gens.insert(gens.end(), pc.begin(), pc.end());
  return Ptr(new GeneratorSpace(std::move(gens), modes));
}

GeneratorSpace::Ptr GeneratorSpace::full(int modes) {
  if (modes < 1) throw std::invalid_argument("full: modes must be >= 1");
  std::vector<Generator> gens;
  for (Family f : {Family::unprimed, Family::unprimed_conj, Family::primed, Family::primed_conj}) {
    auto blk = family_block(f, modes);
    gens.insert(gens.end(), blk.begin(), blk.end());
  }
  return Ptr(new GeneratorSpace(std::move(gens), modes));
}

int GeneratorSpace::index_of(Family f, int mode) const {
  for (size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].family == f && generators_[i].mode == mode) return static_cast<int>(i);
  }
  return -1;
}

std::string GeneratorSpace::name(int i) const {
  const auto& g = generators_[static_cast<size_t>(i)];
  const char* stem = nullptr;
  switch (g.family) {
    case Family::unprimed: stem = "e"; break;
    case Family::unprimed_conj: stem = "e*"; break;
    case Family::primed: stem = "e'"; break;
    case Family::primed_conj: stem = "e'*"; break;
  }
  return std::string(stem) + std::to_string(g.mode);
}

bool GeneratorSpace::same_as(const GeneratorSpace& other) const {
  if (this == &other) return true;
  if (generators_.size() != other.generators_.size()) return false;
  for (size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].family != other.generators_[i].family ||
        generators_[i].mode != other.generators_[i].mode)
      return false;
  }
  return true;
}

namespace detail {

void require_same_space(const GrassmannNumber& a, const GrassmannNumber& b) {
  if (a.space() == b.space()) return;
  if (!a.space()->same_as(*b.space()))
    throw std::invalid_argument("GrassmannNumber: mismatched generator spaces");
}

void require_valid_generator(const GeneratorSpace& s, int index) {
  if (index < 0 || index >= s.count())
    throw std::invalid_argument("generator index out of range");
}

}  // namespace detail

GrassmannNumber::GrassmannNumber(GeneratorSpace::Ptr space) : space_(std::move(space)) {
  if (!space_) throw std::invalid_argument("GrassmannNumber: null space");
  dense_ = space_->count() <= kDenseLimit;
  if (dense_) dense_store_.assign(size_t{1} << space_->count(), Complex{});
}

GrassmannNumber GrassmannNumber::zero(GeneratorSpace::Ptr space) {
  return GrassmannNumber(std::move(space));
}

GrassmannNumber GrassmannNumber::scalar(GeneratorSpace::Ptr space, Complex c) {
  GrassmannNumber g(std::move(space));
  g.set_coefficient(0, c);
  return g;
}

GrassmannNumber GrassmannNumber::generator(GeneratorSpace::Ptr space, int index) {
  detail::require_valid_generator(*space, index);
  GrassmannNumber g(std::move(space));
  g.set_coefficient(std::uint32_t{1} << index, Complex{1.0, 0.0});
  return g;
}

GrassmannNumber GrassmannNumber::monomial(GeneratorSpace::Ptr space, std::uint32_t mask, Complex c) {
  GrassmannNumber g(std::move(space));
  g.set_coefficient(mask, c);
  return g;
}

void GrassmannNumber::require_dense_mask(std::uint32_t mask) const {
  if (mask >> space_->count())
    throw std::invalid_argument("monomial mask uses generators outside the space");
}

Complex GrassmannNumber::coefficient(std::uint32_t mask) const {
  require_dense_mask(mask);
  if (dense_) return dense_store_[mask];
  auto it = std::lower_bound(sparse_store_.begin(), sparse_store_.end(), mask,
                             [](const auto& p, std::uint32_t m) { return p.first < m; });
  if (it != sparse_store_.end() && it->first == mask) return it->second;
  return Complex{};
}

void GrassmannNumber::set_coefficient(std::uint32_t mask, Complex c) {
  require_dense_mask(mask);
  if (dense_) {
    dense_store_[mask] = c;
    return;
  }
  auto it = std::lower_bound(sparse_store_.begin(), sparse_store_.end(), mask,
                             [](const auto& p, std::uint32_t m) { return p.first < m; });
  if (it != sparse_store_.end() && it->first == mask) {
    if (c == Complex{})
      sparse_store_.erase(it);
    else
      it->second = c;
  } else if (c != Complex{}) {
    sparse_store_.insert(it, {mask, c});
  }
}

void GrassmannNumber::add_coefficient(std::uint32_t mask, Complex c) {
  if (c == Complex{}) return;
  if (dense_) {
    require_dense_mask(mask);
    dense_store_[mask] += c;
    return;
  }
  set_coefficient(mask, coefficient(mask) + c);
}

bool GrassmannNumber::is_zero() const {
  if (dense_) {
    for (const auto& c : dense_store_)
      if (c != Complex{}) return false;
    return true;
  }
  return sparse_store_.empty();
}

int GrassmannNumber::term_count() const {
  int n = 0;
  for_each_term([&](std::uint32_t, Complex) { ++n; });
  return n;
}

GrassmannNumber& GrassmannNumber::operator+=(const GrassmannNumber& rhs) {
  detail::require_same_space(*this, rhs);
  rhs.for_each_term([&](std::uint32_t m, Complex c) { add_coefficient(m, c); });
  return *this;
}

GrassmannNumber& GrassmannNumber::operator-=(const GrassmannNumber& rhs) {
  detail::require_same_space(*this, rhs);
  rhs.for_each_term([&](std::uint32_t m, Complex c) { add_coefficient(m, -c); });
  return *this;
}

GrassmannNumber& GrassmannNumber::operator*=(Complex c) {
  if (c == Complex{}) {
    if (dense_)
      std::fill(dense_store_.begin(), dense_store_.end(), Complex{});
    else
      sparse_store_.clear();
    return *this;
  }
  if (dense_) {
    for (auto& v : dense_store_) v *= c;
  } else {
    for (auto& [m, v] : sparse_store_) v *= c;
  }
  return *this;
}

GrassmannNumber operator+(const GrassmannNumber& a, const GrassmannNumber& b) {
  GrassmannNumber out = a;
  out += b;
  return out;
}

GrassmannNumber operator-(const GrassmannNumber& a, const GrassmannNumber& b) {
  GrassmannNumber out = a;
  out -= b;
  return out;
}

GrassmannNumber operator-(const GrassmannNumber& a) {
  GrassmannNumber out = a;
  out *= Complex{-1.0, 0.0};
  return out;
}

GrassmannNumber operator*(Complex c, const GrassmannNumber& a) {
  GrassmannNumber out = a;
  out *= c;
  return out;
}

GrassmannNumber operator*(const GrassmannNumber& a, Complex c) { return c * a; }

int interleave_sign(std::uint32_t s, std::uint32_t t) {
  int sign = 1;
  while (t) {
    int j = std::countr_zero(t);
    if (std::popcount(s >> (j + 1)) & 1) sign = -sign;
    t &= t - 1;
  }
  return sign;
}

GrassmannNumber operator*(const GrassmannNumber& a, const GrassmannNumber& b) {
  detail::require_same_space(a, b);
  GrassmannNumber out(a.space());
  a.for_each_term([&](std::uint32_t s, Complex vs) {
    b.for_each_term([&](std::uint32_t t, Complex vt) {
      if (s & t) return;  // nilpotency
      out.add_coefficient(s | t, static_cast<double>(interleave_sign(s, t)) * vs * vt);
    });
  });
  return out;
}

bool operator==(const GrassmannNumber& a, const GrassmannNumber& b) {
  if (!a.space()->same_as(*b.space())) return false;
  bool eq = true;
  a.for_each_term([&](std::uint32_t m, Complex c) {
    if (b.coefficient(m) != c) eq = false;
  });
  b.for_each_term([&](std::uint32_t m, Complex c) {
    if (a.coefficient(m) != c) eq = false;
  });
  return eq;
}

GrassmannNumber even_part(const GrassmannNumber& a) {
  GrassmannNumber out(a.space());
  a.for_each_term([&](std::uint32_t m, Complex c) {
    if (!(std::popcount(m) & 1)) out.set_coefficient(m, c);
  });
  return out;
}

GrassmannNumber odd_part(const GrassmannNumber& a) {
  GrassmannNumber out(a.space());
  a.for_each_term([&](std::uint32_t m, Complex c) {
    if (std::popcount(m) & 1) out.set_coefficient(m, c);
  });
  return out;
}

Parity parity(const GrassmannNumber& a) {
  bool has_even = false, has_odd = false;
  a.for_each_term([&](std::uint32_t m, Complex) {
    (std::popcount(m) & 1 ? has_odd : has_even) = true;
  });
  if (has_even && has_odd) return Parity::mixed;
  if (has_odd) return Parity::odd;
  return Parity::even;
}

GrassmannNumber involute(const GrassmannNumber& a) {
  GrassmannNumber out(a.space());
  a.for_each_term([&](std::uint32_t m, Complex c) {
    out.set_coefficient(m, (std::popcount(m) & 1) ? -c : c);
  });
  return out;
}

GrassmannNumber conjugate(const GrassmannNumber& a) {
  const auto& sp = *a.space();
  if (!sp.conjugation_closed())
    throw std::invalid_argument("conjugate: space is not closed under the conjugation pairing");
  GrassmannNumber out(a.space());
  a.for_each_term([&](std::uint32_t m, Complex c) {
    // (e_{i1}..e_{ik})* = e*_{ik}..e*_{i1}: accumulate mapped generators in
    // descending original order; interleave signs do the bookkeeping.
    std::uint32_t acc = 0;
    int sign = 1;
    for (int i = sp.count() - 1; i >= 0; --i) {
      if (!(m & (std::uint32_t{1} << i))) continue;
      std::uint32_t mapped = std::uint32_t{1} << sp.conjugate_partner(i);
      sign *= interleave_sign(acc, mapped);
      acc |= mapped;
    }
    out.add_coefficient(acc, static_cast<double>(sign) * std::conj(c));
  });
  return out;
}

GrassmannNumber formal_left_derivative(const GrassmannNumber& a, int gen_index) {
  detail::require_valid_generator(*a.space(), gen_index);
  GrassmannNumber out(a.space());
  const std::uint32_t bit = std::uint32_t{1} << gen_index;
  a.for_each_term([&](std::uint32_t m, Complex c) {
    if (!(m & bit)) return;
    int below = std::popcount(m & (bit - 1));
    out.add_coefficient(m ^ bit, (below & 1) ? -c : c);
  });
  return out;
}

GrassmannNumber formal_right_derivative(const GrassmannNumber& a, int gen_index) {
  detail::require_valid_generator(*a.space(), gen_index);
  GrassmannNumber out(a.space());
  const std::uint32_t bit = std::uint32_t{1} << gen_index;
  a.for_each_term([&](std::uint32_t m, Complex c) {
    if (!(m & bit)) return;
    int above = std::popcount(m >> (gen_index + 1));
    out.add_coefficient(m ^ bit, (above & 1) ? -c : c);
  });
  return out;
}

GrassmannNumber berezin_integrate(const GrassmannNumber& a, std::span<const int> written_order) {
  std::uint32_t seen = 0;
  for (int i : written_order) {
    detail::require_valid_generator(*a.space(), i);
    std::uint32_t bit = std::uint32_t{1} << i;
    if (seen & bit) throw std::invalid_argument("berezin_integrate: repeated generator");
    seen |= bit;
  }
  // innermost integral = rightmost differential; int de_j (x + y e_j) = y
  // is the formal right derivative.
  GrassmannNumber out = a;
  for (auto it = written_order.rbegin(); it != written_order.rend(); ++it) {
    out = formal_right_derivative(out, *it);
  }
  return out;
}

double norm(const GrassmannNumber& a) {
  double s = 0.0;
  a.for_each_term([&](std::uint32_t, Complex c) { s += std::norm(c); });
  return std::sqrt(s);
}

double distance(const GrassmannNumber& a, const GrassmannNumber& b) { return norm(a - b); }

bool approx_equal(const GrassmannNumber& a, const GrassmannNumber& b, double tol) {
  return distance(a, b) <= tol;
}

std::string to_debug_string(const GrassmannNumber& a, int precision) {
  std::vector<std::pair<std::uint32_t, Complex>> terms;
  a.for_each_term([&](std::uint32_t m, Complex c) { terms.push_back({m, c}); });
  if (terms.empty()) return "0";
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
    int px = std::popcount(x.first), py = std::popcount(y.first);
    return px != py ? px < py : x.first < y.first;
  });
  std::ostringstream os;
  os.precision(precision);
  bool first = true;
  for (const auto& [m, c] : terms) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << "," << c.imag() << ")";
    for (int i = 0; i < a.space()->count(); ++i) {
      if (m & (std::uint32_t{1} << i)) os << "·" << a.space()->name(i);
    }
  }
  return os.str();
}

}  // namespace gbs

#include "torusflow/fan.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

std::string cone_name(const std::vector<int>& cone) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < cone.size(); ++k) os << (k ? "," : "") << cone[k];
  os << '}';
  return os.str();
}

std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Matrix whose columns are the listed rays.
std::vector<std::vector<std::int64_t>> ray_matrix(const Fan& fan, const std::vector<int>& cols) {
  std::vector<std::vector<std::int64_t>> m(fan.rank, std::vector<std::int64_t>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (int r = 0; r < fan.rank; ++r) m[r][c] = fan.rays[cols[c]][r];
  return m;
}

}  // namespace

Verdict FanValidation::to_verdict() const {
  Verdict v;
  v.pass = valid;
  v.max_violation = static_cast<double>(violations.size());
  for (const auto& x : violations) v.witnesses.push_back({{"kind", x.kind}, {"message", x.message}});
  return v;
}

std::int64_t integer_determinant(std::vector<std::vector<std::int64_t>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  std::int64_t sign = 1;
  std::int64_t prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m[swap][k] == 0) ++swap;
      if (swap == n) return 0;
      std::swap(m[k], m[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        // Bareiss: the division is exact
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

FanValidation validate_fan(const Fan& fan) {
  FanValidation out;
  auto fail = [&](std::string kind, std::string msg) {
    out.valid = false;
    out.violations.push_back({std::move(kind), std::move(msg)});
  };

  if (fan.rank < 1) {
    fail("rank", "fan rank must be at least 1");
    return out;
  }
  bool rays_ok = true;
  for (std::size_t i = 0; i < fan.rays.size(); ++i) {
    const auto& v = fan.rays[i];
    if (static_cast<int>(v.size()) != fan.rank) {
      fail("rank", "ray " + std::to_string(i) + " has length " + std::to_string(v.size()));
      rays_ok = false;
      continue;
    }
    std::int64_t g = 0;
    for (auto c : v) g = std::gcd(g, c);
    if (g != 1) fail("primitivity", "ray " + std::to_string(i) + " has content " + std::to_string(g));
  }
  if (!rays_ok) return out;

  bool cones_ok = true;
  for (const auto& cone : fan.maximal_cones) {
    std::set<int> distinct(cone.begin(), cone.end());
    bool indices_ok = static_cast<int>(cone.size()) == fan.rank && distinct.size() == cone.size();
    for (int r : cone) indices_ok = indices_ok && r >= 0 && r < static_cast<int>(fan.rays.size());
    if (!indices_ok) {
      fail("index", "maximal cone " + cone_name(cone) + " must list " + std::to_string(fan.rank) +
                        " distinct valid ray indices");
      cones_ok = false;
      continue;
    }
    const auto det = integer_determinant(ray_matrix(fan, cone));
    if (det != 1 && det != -1)
      fail("smoothness", "cone " + cone_name(cone) + " has determinant " + std::to_string(det));
  }
  if (!cones_ok) return out;
  if (fan.maximal_cones.empty()) {
    fail("completeness", "fan has no maximal cones");
    return out;
  }

  // facet -> (cone index, ray opposite the facet)
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> facets;
  for (std::size_t c = 0; c < fan.maximal_cones.size(); ++c) {
    const auto& cone = fan.maximal_cones[c];
    for (std::size_t drop = 0; drop < cone.size(); ++drop) {
      std::vector<int> facet;
      for (std::size_t k = 0; k < cone.size(); ++k)
        if (k != drop) facet.push_back(cone[k]);
      std::sort(facet.begin(), facet.end());
      facets[facet].emplace_back(static_cast<int>(c), cone[drop]);
    }
  }
  for (const auto& [facet, owners] : facets) {
    if (owners.size() != 2) {
      fail("completeness", "facet " + cone_name(facet) + " lies in " + std::to_string(owners.size()) +
                               " maximal cones (expected 2)");
      continue;
    }
    // Opposite rays must sit on opposite sides of the facet hyperplane.
    auto side = [&](int opposite) {
      auto cols = facet;
      cols.push_back(opposite);
      return integer_determinant(ray_matrix(fan, cols));
    };
    const auto s1 = side(owners[0].second);
    const auto s2 = side(owners[1].second);
    if (s1 * s2 >= 0)
      fail("overlap", "cones sharing facet " + cone_name(facet) + " lie on the same side of it");
  }
  return out;
}

std::vector<Weight> dual_basis(const Fan& fan, const std::vector<int>& cone) {
  const int n = fan.rank;
  if (static_cast<int>(cone.size()) != n) throw ModelError("dual_basis: cone size differs from fan rank");
  // Solve M V = I where V has the rays as columns; rows of M are the dual basis.
  // Gauss-Jordan on [V^T | I] gives (V^T)^{-1} = M^T.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n, Rational(0)));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a[r][c] = Rational(fan.rays[cone[r]][c]);
    a[r][n + r] = Rational(1);
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && a[piv][col].numerator() == 0) ++piv;
    if (piv == n) throw ModelError("dual_basis: cone " + cone_name(cone) + " is degenerate");
    std::swap(a[piv], a[col]);
    const Rational inv = Rational(1) / a[col][col];
    for (auto& x : a[col]) x *= inv;
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col].numerator() == 0) continue;
      const Rational f = a[r][col];
      for (int c = 0; c < 2 * n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  // a[.][n..2n) = (V^T)^{-1} = M^T, so m_i = column i of that block.
  std::vector<Weight> out(n, Weight(std::vector<std::int64_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      const Rational& q = a[k][n + i];
      if (q.denominator() != 1) throw ModelError("dual_basis: cone " + cone_name(cone) + " is not unimodular");
      out[i].components[k] = q.numerator();
    }
  }
  return out;
}

std::vector<std::int64_t> cone_counts(const Fan& fan) {
  std::set<std::vector<int>> faces;
  for (const auto& cone : fan.maximal_cones) {
    auto sorted = cone;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t k = sorted.size();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      std::vector<int> face;
      for (std::size_t b = 0; b < k; ++b)
        if (mask & (std::uint64_t{1} << b)) face.push_back(sorted[b]);
      faces.insert(std::move(face));
    }
  }
  std::vector<std::int64_t> d(fan.rank + 1, 0);
  for (const auto& f : faces) ++d.at(f.size());
  return d;
}

std::vector<std::int64_t> h_vector(const Fan& fan) {
  const auto d = cone_counts(fan);
  const std::int64_t n = fan.rank;
  std::vector<std::int64_t> h(n + 1, 0);
  for (std::int64_t k = 0; k <= n; ++k) {
    for (std::int64_t j = k; j <= n; ++j) {
      const std::int64_t sign = ((j - k) % 2 == 0) ? 1 : -1;
      h[k] += sign * binomial(j, k) * d[n - j];
    }
  }
  return h;
}

namespace fans {

Fan projective_space(int n) {
  Fan f;
  f.rank = n;
  for (int i = 0; i < n; ++i) {
    std::vector<std::int64_t> e(n, 0);
    e[i] = 1;
    f.rays.push_back(e);
  }
  f.rays.push_back(std::vector<std::int64_t>(n, -1));
  // Cone 0 omits the ray -(e_1+...+e_n); cone i >= 1 omits e_i.
  for (int omit : std::vector<int>{n}) {
    std::vector<int> cone;
    for (int r = 0; r <= n; ++r)
      if (r != omit) cone.push_back(r);
    f.maximal_cones.push_back(cone);
  }
  for (int i = 0; i < n; ++i) {
    std::vector<int> cone;
    for (int r = 0; r <= n; ++r)
      if (r != i) cone.push_back(r);
    f.maximal_cones.push_back(cone);
  }
  return f;
}

Fan hirzebruch(int a) {
  Fan f;
  f.rank = 2;
  f.rays = {{1, 0}, {0, 1}, {-1, a}, {0, -1}};
  f.maximal_cones = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return f;
}

}  // namespace fans

}  // namespace torusflow

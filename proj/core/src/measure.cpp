#include "cma/measure.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace cma {

Integrand Integrand::exp_moment(int k, int l) {
  return {"rho1^" + std::to_string(k) + "*rho2^" + std::to_string(l),
          [k, l](double r1, double r2) { return std::pow(r1, k) * std::pow(r2, l); }};
}

Integrand Integrand::from_log(std::string name, std::function<double(double, double)> f) {
  return {std::move(name), [f = std::move(f)](double r1, double r2) {
            const double ninf = -std::numeric_limits<double>::infinity();
            return f(r1 > 0 ? std::log(r1) : ninf, r2 > 0 ? std::log(r2) : ninf);
          }};
}

Integrand Integrand::holomorphic(std::string name, double constant_coefficient) {
  return {std::move(name), [constant_coefficient](double, double) { return constant_coefficient; }};
}

Integrand Integrand::one() {
  return {"1", [](double, double) { return 1.0; }};
}

const Quadrature& Quadrature::gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Quadrature>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (slot) return *slot;
  auto q = std::make_unique<Quadrature>();
  q->nodes.resize(n);
  q->weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q->nodes[i] = 0.5 * (1 - x);
    q->weights[i] = 1.0 / ((1 - x * x) * dp * dp);
  }
  slot = std::move(q);
  return *slot;
}

double integrate_law(const CoordLaw& law, const std::function<double(double)>& f, int order) {
  if (law.kind == CoordLaw::Kind::Circle) return f(law.radius);
  // s = rho^2 / R^2 is uniform on (0,1); substitute s = u^4 to tame log terms.
  const auto& q = Quadrature::gauss_legendre(order);
  double sum = 0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    double u = q.nodes[i];
    sum += q.weights[i] * 4 * u * u * u * f(law.radius * u * u);
  }
  return sum;
}

double LogMeasure::total_mass() const { return interior_mass() + boundary_mass; }

double LogMeasure::interior_mass() const {
  double m = pole_mass;
  for (const auto& a : atoms) m += a.mass;
  for (const auto& p : products) m += p.mass;
  return m;
}

double LogMeasure::integrate(const Integrand& f) const {
  return integrate_weighted(f, nullptr);
}

double LogMeasure::integrate_weighted(const Integrand& f,
                                      const std::function<double(double, double)>& weight) const {
  auto g = [&](double r1, double r2) {
    double v = f(r1, r2);
    if (weight) {
      double w = weight(r1, r2);
      if (v == 0 || w == 0) return 0.0;
      v *= w;
    }
    return v;
  };
  double sum = 0;
  for (const auto& a : atoms) {
    if (a.mass != 0) sum += a.mass * g(std::exp(a.x1), std::exp(a.x2));
  }
  if (pole_mass != 0) sum += pole_mass * g(0.0, 0.0);
  for (const auto& p : products) {
    sum += p.mass * integrate_law(p.first, [&](double r1) {
      return integrate_law(p.second, [&](double r2) { return g(r1, r2); });
    });
  }
  return sum;
}

LogMeasure& LogMeasure::operator+=(const LogMeasure& other) {
  atoms.insert(atoms.end(), other.atoms.begin(), other.atoms.end());
  products.insert(products.end(), other.products.begin(), other.products.end());
  pole_mass += other.pole_mass;
  boundary_mass += other.boundary_mass;
  return *this;
}

LogMeasure LogMeasure::scaled(double s) const {
  LogMeasure out = *this;
  for (auto& a : out.atoms) a.mass *= s;
  for (auto& p : out.products) p.mass *= s;
  out.pole_mass *= s;
  out.boundary_mass *= s;
  return out;
}

bool LogMeasure::is_zero(double tol) const { return std::abs(total_mass()) <= tol; }

double LogMeasure::min_mass() const {
  double m = std::min(pole_mass, boundary_mass);
  for (const auto& a : atoms) m = std::min(m, a.mass);
  for (const auto& p : products) m = std::min(m, p.mass);
  return m;
}

Rational ExactMeasure::total_mass() const {
  Rational m = pole_mass + exterior_mass;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

LogMeasure ExactMeasure::to_log() const {
  LogMeasure out;
  for (const auto& a : atoms) out.atoms.push_back({a.x.x.get_d(), a.x.y.get_d(), a.mass.get_d()});
  out.pole_mass = pole_mass.get_d();
  return out;
}

Rational ExactMeasure::mass_at(const QPoint& x) const {
  Rational m = 0;
  for (const auto& a : atoms)
    if (a.x == x) m += a.mass;
  return m;
}

}  // namespace cma

#include "qc/manufactured.hpp"

#include <cmath>
#include <random>

namespace qc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Derivatives of g(t) = sin^3(pi t) through order five.
double g(int order, double t) {
  const double s = std::sin(kPi * t), c = std::cos(kPi * t);
  switch (order) {
    case 0: return s * s * s;
    case 1: return 3.0 * kPi * s * s * c;
    case 2: return 3.0 * kPi * kPi * s * (2.0 * c * c - s * s);
    case 3: return 3.0 * kPi * kPi * kPi * c * (2.0 * c * c - 7.0 * s * s);
    case 4: return 3.0 * kPi * kPi * kPi * kPi * s * (7.0 * s * s - 20.0 * c * c);
    default: return 3.0 * kPi * kPi * kPi * kPi * kPi * c * (61.0 * s * s - 20.0 * c * c);
  }
}

Eigen::Vector3d u_exact(const Eigen::Vector3d& x) {
  return {g(0, x[0]) * g(1, x[1]) * g(0, x[2]), -g(1, x[0]) * g(0, x[1]) * g(0, x[2]), 0.0};
}

Eigen::Vector3d curl1(const Eigen::Vector3d& x) {
  return {g(1, x[0]) * g(0, x[1]) * g(1, x[2]), g(0, x[0]) * g(1, x[1]) * g(1, x[2]),
          -(g(0, x[0]) * g(2, x[1]) + g(2, x[0]) * g(0, x[1])) * g(0, x[2])};
}

Eigen::Matrix3d curl1_jacobian(const Eigen::Vector3d& x) {
  Eigen::Matrix3d J;
  J.row(0) << g(2, x[0]) * g(0, x[1]) * g(1, x[2]), g(1, x[0]) * g(1, x[1]) * g(1, x[2]),
      g(1, x[0]) * g(0, x[1]) * g(2, x[2]);
  J.row(1) << g(1, x[0]) * g(1, x[1]) * g(1, x[2]), g(0, x[0]) * g(2, x[1]) * g(1, x[2]),
      g(0, x[0]) * g(1, x[1]) * g(2, x[2]);
  J.row(2) << -(g(1, x[0]) * g(2, x[1]) + g(3, x[0]) * g(0, x[1])) * g(0, x[2]),
      -(g(0, x[0]) * g(3, x[1]) + g(2, x[0]) * g(1, x[1])) * g(0, x[2]),
      -(g(0, x[0]) * g(2, x[1]) + g(2, x[0]) * g(0, x[1])) * g(1, x[2]);
  return J;
}

Eigen::Vector3d curl2(const Eigen::Vector3d& x) {
  const double gx0 = g(0, x[0]), gx1 = g(1, x[0]), gx2 = g(2, x[0]), gx3 = g(3, x[0]);
  const double gy0 = g(0, x[1]), gy1 = g(1, x[1]), gy2 = g(2, x[1]), gy3 = g(3, x[1]);
  const double gz0 = g(0, x[2]), gz2 = g(2, x[2]);
  return {-(gx0 * gy1 * gz2 + gx0 * gy3 * gz0 + gx2 * gy1 * gz0),
          gx1 * gy0 * gz2 + gx1 * gy2 * gz0 + gx3 * gy0 * gz0, 0.0};
}

Eigen::Vector3d curl3(const Eigen::Vector3d& x) {
  const double gx0 = g(0, x[0]), gx1 = g(1, x[0]), gx2 = g(2, x[0]), gx3 = g(3, x[0]),
               gx4 = g(4, x[0]);
  const double gy0 = g(0, x[1]), gy1 = g(1, x[1]), gy2 = g(2, x[1]), gy3 = g(3, x[1]),
               gy4 = g(4, x[1]);
  const double gz0 = g(0, x[2]), gz1 = g(1, x[2]), gz2 = g(2, x[2]), gz3 = g(3, x[2]);
  return {-(gx1 * gy0 * gz3 + gx1 * gy2 * gz1 + gx3 * gy0 * gz1),
          -(gx0 * gy1 * gz3 + gx0 * gy3 * gz1 + gx2 * gy1 * gz1),
          gx0 * gy2 * gz2 + gx0 * gy4 * gz0 + gx2 * gy0 * gz2 + 2.0 * gx2 * gy2 * gz0 +
              gx4 * gy0 * gz0};
}

Eigen::Vector3d curl4(const Eigen::Vector3d& x) {
  const double gx0 = g(0, x[0]), gx1 = g(1, x[0]), gx2 = g(2, x[0]), gx3 = g(3, x[0]),
               gx4 = g(4, x[0]), gx5 = g(5, x[0]);
  const double gy0 = g(0, x[1]), gy1 = g(1, x[1]), gy2 = g(2, x[1]), gy3 = g(3, x[1]),
               gy4 = g(4, x[1]), gy5 = g(5, x[1]);
  const double gz0 = g(0, x[2]), gz2 = g(2, x[2]), gz4 = g(4, x[2]);
  return {gx0 * gy1 * gz4 + 2.0 * gx0 * gy3 * gz2 + gx0 * gy5 * gz0 + 2.0 * gx2 * gy1 * gz2 +
              2.0 * gx2 * gy3 * gz0 + gx4 * gy1 * gz0,
          -(gx1 * gy0 * gz4 + 2.0 * gx1 * gy2 * gz2 + gx1 * gy4 * gz0 + 2.0 * gx3 * gy0 * gz2 +
            2.0 * gx3 * gy2 * gz0 + gx5 * gy0 * gz0),
          0.0};
}

double p_exact(const Eigen::Vector3d& x) {
  return std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]);
}

Eigen::Vector3d grad_p_exact(const Eigen::Vector3d& x) {
  const double sx = std::sin(kPi * x[0]), cx = std::cos(kPi * x[0]);
  const double sy = std::sin(kPi * x[1]), cy = std::cos(kPi * x[1]);
  const double sz = std::sin(kPi * x[2]), cz = std::cos(kPi * x[2]);
  return {kPi * cx * sy * sz, kPi * sx * cy * sz, kPi * sx * sy * cz};
}

ManufacturedCase base_case() {
  ManufacturedCase mc;
  mc.u = u_exact;
  mc.curl_u = curl1;
  mc.curl_u_jacobian = curl1_jacobian;
  mc.curl2_u = curl2;
  mc.curl3_u = curl3;
  mc.curl4_u = curl4;
  return mc;
}

}  // namespace

ManufacturedCase case_a() {
  ManufacturedCase mc = base_case();
  mc.name = "case_a";
  mc.p = p_exact;
  mc.grad_p = grad_p_exact;
  mc.f = [](const Eigen::Vector3d& x) -> Eigen::Vector3d {
    return curl4(x) + grad_p_exact(x);
  };
  return mc;
}

ManufacturedCase case_b() {
  ManufacturedCase mc = base_case();
  mc.name = "case_b";
  mc.p = [](const Eigen::Vector3d&) { return 0.0; };
  mc.grad_p = [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); };
  mc.f = curl4;
  return mc;
}

namespace {

// Fourth-order central difference of one component of a vector field.
double fd_partial(const VectorField& v, const Eigen::Vector3d& x, int comp, int dir, double h) {
  auto at = [&](double offset) {
    Eigen::Vector3d y = x;
    y[dir] += offset;
    return v(y)[comp];
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

double fd_partial(const ScalarField& s, const Eigen::Vector3d& x, int dir, double h) {
  auto at = [&](double offset) {
    Eigen::Vector3d y = x;
    y[dir] += offset;
    return s(y);
  };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

Eigen::Vector3d fd_curl(const VectorField& v, const Eigen::Vector3d& x, double h) {
  return {fd_partial(v, x, 2, 1, h) - fd_partial(v, x, 1, 2, h),
          fd_partial(v, x, 0, 2, h) - fd_partial(v, x, 2, 0, h),
          fd_partial(v, x, 1, 0, h) - fd_partial(v, x, 0, 1, h)};
}

struct EntryAccum {
  FdCheckEntry entry;
  void add(double err, double scale) {
    entry.max_abs_error = std::max(entry.max_abs_error, err);
    entry.scale = std::max(entry.scale, scale);
  }
};

}  // namespace

FdCheckReport fd_check(const ManufacturedCase& mc, int n_samples, unsigned seed, double step) {
  std::mt19937 rng(seed);
  const double margin = 4.5 * step;
  std::uniform_real_distribution<double> dist(margin, 1.0 - margin);

  EntryAccum curl_u{{"curl_u", 0, 0, 0}};
  EntryAccum curl_jac{{"curl_u_jacobian", 0, 0, 0}};
  EntryAccum curl2_u{{"curl2_u", 0, 0, 0}};
  EntryAccum curl3_u{{"curl3_u", 0, 0, 0}};
  EntryAccum curl4_u{{"curl4_u", 0, 0, 0}};
  EntryAccum grad_p{{"grad_p", 0, 0, 0}};
  EntryAccum div_u{{"div_u", 0, 0, 0}};
  EntryAccum load{{"f", 0, 0, 0}};

  for (int i = 0; i < n_samples; ++i) {
    const Eigen::Vector3d x(dist(rng), dist(rng), dist(rng));

    curl_u.add((fd_curl(mc.u, x, step) - mc.curl_u(x)).cwiseAbs().maxCoeff(),
               mc.curl_u(x).cwiseAbs().maxCoeff());
    Eigen::Matrix3d Jfd;
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d) Jfd(c, d) = fd_partial(mc.curl_u, x, c, d, step);
    curl_jac.add((Jfd - mc.curl_u_jacobian(x)).cwiseAbs().maxCoeff(),
                 mc.curl_u_jacobian(x).cwiseAbs().maxCoeff());
    curl2_u.add((fd_curl(mc.curl_u, x, step) - mc.curl2_u(x)).cwiseAbs().maxCoeff(),
                mc.curl2_u(x).cwiseAbs().maxCoeff());
    curl3_u.add((fd_curl(mc.curl2_u, x, step) - mc.curl3_u(x)).cwiseAbs().maxCoeff(),
                mc.curl3_u(x).cwiseAbs().maxCoeff());
    curl4_u.add((fd_curl(mc.curl3_u, x, step) - mc.curl4_u(x)).cwiseAbs().maxCoeff(),
                mc.curl4_u(x).cwiseAbs().maxCoeff());
    grad_p.add((Eigen::Vector3d(fd_partial(mc.p, x, 0, step), fd_partial(mc.p, x, 1, step),
                                fd_partial(mc.p, x, 2, step)) -
                mc.grad_p(x))
                   .cwiseAbs()
                   .maxCoeff(),
               mc.grad_p(x).cwiseAbs().maxCoeff());
    const double div = fd_partial(mc.u, x, 0, 0, step) + fd_partial(mc.u, x, 1, 1, step) +
                       fd_partial(mc.u, x, 2, 2, step);
    div_u.add(std::abs(div), mc.u(x).cwiseAbs().maxCoeff());
    load.add(((mc.curl4_u(x) + mc.grad_p(x)) - mc.f(x)).cwiseAbs().maxCoeff(),
             mc.f(x).cwiseAbs().maxCoeff());
  }

  FdCheckReport report;
  for (EntryAccum* a :
       {&curl_u, &curl_jac, &curl2_u, &curl3_u, &curl4_u, &grad_p, &div_u, &load}) {
    a->entry.rel_error = a->entry.max_abs_error / std::max(1.0, a->entry.scale);
    report.max_rel_error = std::max(report.max_rel_error, a->entry.rel_error);
    report.entries.push_back(a->entry);
  }
  return report;
}

}  // namespace qc

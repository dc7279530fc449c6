#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "gofd/stiffness.hpp"
#include "line_transforms.hpp"

namespace gofd {

StiffnessKernel nonuniform(FractionalOrder s, int dim, int n_fd, int m, NonUniformMethod method) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("kernel dimension must be 1, 2 or 3");
  if (n_fd < 1) throw std::invalid_argument("n_fd must be at least 1");
  if (m < 2 * n_fd + 1) {
    throw std::invalid_argument("sample count M = " + std::to_string(m) +
                                " must be at least 2 n_fd + 1 = " + std::to_string(2 * n_fd + 1));
  }
  const int outputs = 2 * n_fd + 1;
  const detail::ClusteredNodes nodes(m);

  if (method == NonUniformMethod::Auto) {
    const double total = std::pow(static_cast<double>(m), dim);
    method = total <= static_cast<double>(1 << 24) ? NonUniformMethod::Direct : NonUniformMethod::Gridding;
  }
  std::unique_ptr<detail::LineTransform> transform;
  if (method == NonUniformMethod::Direct) {
    transform = std::make_unique<detail::ClusteredDirectTransform>(nodes, outputs);
  } else {
    transform = std::make_unique<detail::ClusteredGriddingTransform>(nodes, outputs);
  }

  const int half = transform->half_length();
  std::vector<double> sin2(half);
  for (int j = 0; j < half; ++j) {
    const double sn = std::sin(0.5 * nodes.xi[j]);
    sin2[j] = 4.0 * sn * sn;
  }
  const double sv = s.value();
  auto fill = [&](std::span<const int> outer, std::span<double> line) {
    double a0 = 0.0;
    for (int o : outer) a0 += sin2[o];
    for (int j = 0; j < half; ++j) {
      const double a = a0 + sin2[j];
      line[j] = a > 0.0 ? std::pow(a, sv) : 0.0;
    }
  };
  std::vector<double> coeffs = detail::separable_even_transform(dim, *transform, fill);
  const double scale = 1.0 / std::pow(2.0 * kPi, dim);
  for (double& c : coeffs) c *= scale;
  return StiffnessKernel(dim, s, n_fd, Scheme::NonUniform, std::move(coeffs));
}

}  // namespace gofd

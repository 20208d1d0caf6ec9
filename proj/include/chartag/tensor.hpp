#pragma once

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace chartag {

std::string shape_to_string(const std::vector<int>& shape);

// Dense row-major tensor of doubles with a dynamic shape (rank 1..3 in
// practice). Every primitive that produces a Tensor must leave it fully
// finite; check_finite enforces that.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);
  Tensor(std::vector<int> s, std::vector<double> d);

  static Tensor zeros(std::vector<int> s);
  static Tensor full(std::vector<int> s, double v);
  static Tensor scalar(double v);
  static Tensor vec(std::initializer_list<double> xs);
  static Tensor vec(std::vector<double> xs);
  static Tensor mat(std::initializer_list<std::initializer_list<double>> rows);

  int rank() const { return static_cast<int>(shape.size()); }
  int dim(int axis) const;
  std::size_t numel() const { return data.size(); }

  double& at(int i) { return data[static_cast<std::size_t>(i)]; }
  double at(int i) const { return data[static_cast<std::size_t>(i)]; }
  double& at(int i, int j) {
    return data[static_cast<std::size_t>(i) * shape[1] + j];
  }
  double at(int i, int j) const {
    return data[static_cast<std::size_t>(i) * shape[1] + j];
  }
  double& at(int i, int j, int k) {
    return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }
  double at(int i, int j, int k) const {
    return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }

  // Value of a single-element tensor.
  double item() const;

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  std::string shape_str() const { return shape_to_string(shape); }

  double l2_norm() const;

  // Throws NumericError if any entry is NaN or infinite.
  void check_finite(const char* where) const;
};

}  // namespace chartag

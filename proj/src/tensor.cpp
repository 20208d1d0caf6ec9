#include "chartag/tensor.hpp"

#include <cmath>
#include <sstream>

#include "chartag/error.hpp"

namespace chartag {

std::string shape_to_string(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

namespace {

std::size_t checked_numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw DimError("negative dimension in shape " + shape_to_string(shape));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
  data.assign(checked_numel(shape), 0.0);
}

Tensor::Tensor(std::vector<int> s, std::vector<double> d)
    : shape(std::move(s)), data(std::move(d)) {
  if (checked_numel(shape) != data.size()) {
    throw DimError("shape " + shape_to_string(shape) + " does not match data size " +
                   std::to_string(data.size()));
  }
}

Tensor Tensor::zeros(std::vector<int> s) { return Tensor(std::move(s)); }

Tensor Tensor::full(std::vector<int> s, double v) {
  Tensor t(std::move(s));
  for (double& x : t.data) x = v;
  return t;
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::vec(std::initializer_list<double> xs) {
  return Tensor({static_cast<int>(xs.size())}, std::vector<double>(xs));
}

Tensor Tensor::vec(std::vector<double> xs) {
  int n = static_cast<int>(xs.size());
  return Tensor({n}, std::move(xs));
}

Tensor Tensor::mat(std::initializer_list<std::initializer_list<double>> rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows.begin()->size()) : 0;
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(r) * c);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw DimError("ragged matrix literal");
    d.insert(d.end(), row.begin(), row.end());
  }
  return Tensor({r, c}, std::move(d));
}

int Tensor::dim(int axis) const {
  if (axis < 0 || axis >= rank()) {
    throw DimError("axis " + std::to_string(axis) + " out of range for shape " + shape_str());
  }
  return shape[axis];
}

double Tensor::item() const {
  if (numel() != 1) {
    throw DimError("item() requires a single-element tensor, got shape " + shape_str());
  }
  return data[0];
}

double Tensor::l2_norm() const {
  double s = 0.0;
  for (double x : data) s += x * x;
  return std::sqrt(s);
}

void Tensor::check_finite(const char* where) const {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw NumericError(std::string(where) + ": non-finite value at flat index " +
                         std::to_string(i) + " in tensor of shape " + shape_str());
    }
  }
}

}  // namespace chartag

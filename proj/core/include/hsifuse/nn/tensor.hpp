#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsifuse/grid.hpp"

namespace hsifuse::nn {

// Rank-3 double tensor [ch][h][w]. All network math runs at 64-bit so the
// finite-difference gradient suite is meaningful.
struct Tensor {
  int ch = 0;
  int h = 0;
  int w = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int ch_, int h_, int w_, double fill = 0.0)
      : ch(ch_), h(h_), w(w_),
        v(static_cast<std::size_t>(ch_) * h_ * w_, fill) {}

  double& at(int c, int y, int x) {
    return v[(static_cast<std::size_t>(c) * h + y) * w + x];
  }
  double at(int c, int y, int x) const {
    return v[(static_cast<std::size_t>(c) * h + y) * w + x];
  }

  std::size_t size() const { return v.size(); }
};

Tensor from_grid(const Grid3& g);

// Named parameter array. Group prefixes ("phi.", "gamma.", "theta.", "psi.")
// tie each array to its architectural role.
struct ParamSpec {
  std::string name;
  std::vector<int> shape;
  std::size_t count = 0;
};

class ParamStore {
 public:
  int add(const std::string& name, const std::vector<int>& shape);

  int handle(const std::string& name) const;
  const ParamSpec& spec(int h) const { return specs_[h]; }
  std::vector<double>& values(int h) { return values_[h]; }
  const std::vector<double>& values(int h) const { return values_[h]; }
  int count() const { return static_cast<int>(specs_.size()); }

  std::size_t total_scalars() const;

  // Flat views over all parameters in registration order; used by the
  // optimizer and the checkpoint writer.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& flat);

 private:
  std::vector<ParamSpec> specs_;
  std::vector<std::vector<double>> values_;
};

// Gradient buffers parallel to a ParamStore.
class Grads {
 public:
  explicit Grads(const ParamStore& ps);
  std::vector<double>& of(int h) { return g_[h]; }
  const std::vector<double>& of(int h) const { return g_[h]; }
  void zero();
  std::vector<double> flatten() const;
  void accumulate(const Grads& other);  // this += other
  void scale(double s);

 private:
  std::vector<std::vector<double>> g_;
};

}  // namespace hsifuse::nn

#include "hsifuse/nn/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace hsifuse::nn {

Tensor from_grid(const Grid3& g) {
  Tensor t(g.bands, g.h, g.w);
  for (std::size_t i = 0; i < g.data.size(); ++i) t.v[i] = g.data[i];
  return t;
}

int ParamStore::add(const std::string& name, const std::vector<int>& shape) {
  for (const auto& s : specs_)
    if (s.name == name) throw std::runtime_error("duplicate parameter: " + name);
  ParamSpec spec;
  spec.name = name;
  spec.shape = shape;
  spec.count = 1;
  for (const int d : shape) {
    if (d <= 0) throw std::runtime_error("bad shape for parameter: " + name);
    spec.count *= static_cast<std::size_t>(d);
  }
  specs_.push_back(spec);
  values_.emplace_back(spec.count, 0.0);
  return static_cast<int>(specs_.size()) - 1;
}

int ParamStore::handle(const std::string& name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i)
    if (specs_[i].name == name) return static_cast<int>(i);
  throw std::runtime_error("unknown parameter: " + name);
}

std::size_t ParamStore::total_scalars() const {
  std::size_t n = 0;
  for (const auto& s : specs_) n += s.count;
  return n;
}

std::vector<double> ParamStore::flatten() const {
  std::vector<double> flat;
  flat.reserve(total_scalars());
  for (const auto& v : values_) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

void ParamStore::unflatten(const std::vector<double>& flat) {
  if (flat.size() != total_scalars())
    throw std::runtime_error("flat parameter size mismatch");
  std::size_t off = 0;
  for (auto& v : values_) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + v.size()),
              v.begin());
    off += v.size();
  }
}

Grads::Grads(const ParamStore& ps) {
  g_.resize(ps.count());
  for (int h = 0; h < ps.count(); ++h)
    g_[h].assign(ps.spec(h).count, 0.0);
}

void Grads::zero() {
  for (auto& v : g_) std::fill(v.begin(), v.end(), 0.0);
}

std::vector<double> Grads::flatten() const {
  std::vector<double> flat;
  for (const auto& v : g_) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

void Grads::accumulate(const Grads& other) {
  for (std::size_t i = 0; i < g_.size(); ++i)
    for (std::size_t j = 0; j < g_[i].size(); ++j)
      g_[i][j] += other.g_[i][j];
}

void Grads::scale(double s) {
  for (auto& v : g_)
    for (auto& x : v) x *= s;
}

}  // namespace hsifuse::nn

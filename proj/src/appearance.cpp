#include "mot/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mot/errors.hpp"

namespace mot {

Embedding Embedding::normalized(Eigen::VectorXd values) {
  const double norm = values.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericalError("cannot normalize a zero or non-finite embedding");
  }
  values /= norm;
  return Embedding(std::move(values));
}

Embedding Embedding::from_values(Eigen::VectorXd values, double tolerance) {
  const double norm = values.norm();
  if (std::isfinite(norm) && std::abs(norm - 1.0) <= tolerance) return Embedding(std::move(values));
  return normalized(std::move(values));
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw InputError("embedding dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()));
  }
  return 1.0 - a.values().dot(b.values());
}

Embedding ema_update(const Embedding& prev, const Embedding& f, double alpha) {
  if (prev.dim() != f.dim()) throw InputError("embedding dimension mismatch in EMA update");
  if (alpha == 1.0) return prev;
  if (alpha == 0.0) return f;
  return Embedding::normalized(alpha * prev.values() + (1.0 - alpha) * f.values());
}

EmaBank::EmaBank(std::size_t capacity, double momentum) : capacity_(capacity), momentum_(momentum) {
  if (capacity_ == 0) throw InputError("EMA bank capacity must be at least 1");
  if (!(momentum_ >= 0.0 && momentum_ <= 1.0)) throw InputError("EMA momentum must lie in [0, 1]");
}

void EmaBank::push(const Embedding& f) {
  const Embedding& prev = entries_.empty() ? f : entries_.back();
  entries_.push_back(ema_update(prev, f, momentum_));
  while (entries_.size() > capacity_) entries_.pop_front();
}

double EmaBank::min_cosine_distance(const Embedding& f) const {
  if (entries_.empty()) throw PreconditionError("min_cosine_distance on an empty bank");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : entries_) best = std::min(best, cosine_distance(e, f));
  return best;
}

void EmbeddingStore::insert(int frame, int key, Embedding embedding) {
  if (dim_ == 0) dim_ = embedding.dim();
  if (embedding.dim() != dim_) {
    throw InputError("embedding for frame " + std::to_string(frame) + " key " + std::to_string(key) +
                     " has dimension " + std::to_string(embedding.dim()) + ", expected " +
                     std::to_string(dim_));
  }
  if (!table_.emplace(std::make_pair(frame, key), std::move(embedding)).second) {
    throw InputError("duplicate embedding for frame " + std::to_string(frame) + " key " +
                     std::to_string(key));
  }
}

const Embedding* EmbeddingStore::find(int frame, int key) const {
  auto it = table_.find({frame, key});
  return it == table_.end() ? nullptr : &it->second;
}

}  // namespace mot

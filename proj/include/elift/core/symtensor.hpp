#ifndef ELIFT_CORE_SYMTENSOR_HPP
#define ELIFT_CORE_SYMTENSOR_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

namespace elift {

// Bookkeeping for symmetric rank-r tensors in d dimensions: one stored
// component per nondecreasing index tuple, with the multinomial repetition
// count needed for full contractions.
class SymLayout {
public:
  SymLayout() = default;
  SymLayout(int d, int r) : d_(d), r_(r) {
    if (d < 1 || r < 0) throw std::invalid_argument("bad symmetric-tensor shape");
    rfact_ = 1.0;
    for (int k = 2; k <= r; ++k) rfact_ *= k;
    rfact_inv_ = 1.0 / rfact_;
    std::vector<int> tuple(r, 0);
    enumerate(tuple, 0, 0);
    for (size_t s = 0; s < idx_.size(); ++s) pos_[idx_[s]] = static_cast<int>(s);
  }

  int d() const { return d_; }
  int r() const { return r_; }
  int size() const { return static_cast<int>(idx_.size()); }
  const std::vector<int>& tuple(int s) const { return idx_[s]; }
  // Number of distinct permutations of the stored tuple: r!/prod(counts!).
  double mult(int s) const { return mult_[s]; }

  int slot(std::vector<int> ix) const {
    std::sort(ix.begin(), ix.end());
    auto it = pos_.find(ix);
    if (it == pos_.end()) throw std::out_of_range("index tuple outside layout");
    return it->second;
  }

  // Full contraction (1/r!) C^{i1..ir} v_{i1}..v_{ir} from stored components.
  template <typename Comp>
  auto contract(const Comp& comp, const Eigen::VectorXd& v) const {
    auto acc = comp(0) * 0.0;
    for (int s = 0; s < size(); ++s) {
      double mono = mult_[s] * rfact_inv_;
      for (int k : idx_[s]) mono *= v(k);
      acc += comp(s) * mono;
    }
    return acc;
  }

  // Gradient of the full contraction with respect to v.
  template <typename Comp>
  auto contract_grad(const Comp& comp, const Eigen::VectorXd& v, int k) const {
    auto acc = comp(0) * 0.0;
    for (int s = 0; s < size(); ++s) {
      const std::vector<int>& mi = idx_[s];
      for (size_t p = 0; p < mi.size(); ++p) {
        if (mi[p] != k) continue;
        double mono = mult_[s] * rfact_inv_;
        for (size_t j = 0; j < mi.size(); ++j)
          if (j != p) mono *= v(mi[j]);
        acc += comp(s) * mono;
      }
    }
    return acc;
  }

private:
  void enumerate(std::vector<int>& tuple, int depth, int lo) {
    if (depth == r_) {
      idx_.push_back(tuple);
      mult_.push_back(tuple_mult(tuple));
      return;
    }
    for (int i = lo; i < d_; ++i) {
      tuple[depth] = i;
      enumerate(tuple, depth + 1, i);
    }
  }

  double tuple_mult(const std::vector<int>& mi) const {
    double denom = 1.0;
    int run = 1;
    for (size_t j = 1; j <= mi.size(); ++j) {
      if (j < mi.size() && mi[j] == mi[j - 1]) {
        ++run;
      } else {
        for (int k = 2; k <= run; ++k) denom *= k;
        run = 1;
      }
    }
    return rfact_ / denom;
  }

  int d_ = 0;
  int r_ = 0;
  double rfact_ = 1.0;
  double rfact_inv_ = 1.0;
  std::vector<std::vector<int>> idx_;
  std::vector<double> mult_;
  std::map<std::vector<int>, int> pos_;
};

inline long long nsym(int d, int r) {
  long long n = 1;
  for (int k = 1; k <= r; ++k) n = n * (d - 1 + k) / k;
  return n;
}

} // namespace elift

#endif

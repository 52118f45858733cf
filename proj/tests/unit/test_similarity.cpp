#include <algorithm>
#include <random>
#include <string>

#include "doctest.h"

#include "intent/movement.hpp"
#include "intent/similarity.hpp"

using namespace intent;

namespace {

// Reference gestalt matcher on strings: naive cubic search for the longest
// common substring, leftmost in `a` then in `b`, then recurse on both sides.
std::size_t ref_matched(const std::string& a, const std::string& b) {
  std::size_t best = 0, ba = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t k = 0;
      while (i + k < a.size() && j + k < b.size() && a[i + k] == b[j + k]) ++k;
      if (k > best) best = k, ba = i, bb = j;
    }
  if (best == 0) return 0;
  return best + ref_matched(a.substr(0, ba), b.substr(0, bb)) +
         ref_matched(a.substr(ba + best), b.substr(bb + best));
}

double ref_similarity(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return 1.0;
  const auto m = std::max(ref_matched(a, b), ref_matched(b, a));
  return 2.0 * static_cast<double>(m) / static_cast<double>(a.size() + b.size());
}

std::vector<char> chars(const std::string& s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("similarity examples") {
  using M = Movement;
  const std::vector<M> ptp{M::Pick, M::Transport, M::Place}, pp{M::Pick, M::Place};
  CHECK(similarity(ptp, ptp) == 1.0);
  CHECK(similarity(ptp, std::vector<M>{M::Still, M::Walk}) == 0.0);
  CHECK(similarity(ptp, pp) == doctest::Approx(0.8));
  CHECK(similarity(std::vector<M>{}, std::vector<M>{}) == 1.0);
  CHECK(similarity(pp, std::vector<M>{}) == 0.0);
}

TEST_CASE("similarity matches the reference matcher") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> len(0, 12), sym(0, 3);
  for (int n = 0; n < 3000; ++n) {
    std::string a, b;
    for (int i = len(rng); i > 0; --i) a += static_cast<char>('a' + sym(rng));
    for (int i = len(rng); i > 0; --i) b += static_cast<char>('a' + sym(rng));
    const double got = similarity(chars(a), chars(b));
    CHECK_MESSAGE(got == doctest::Approx(ref_similarity(a, b)), a << " vs " << b);
    CHECK(got == doctest::Approx(similarity(chars(b), chars(a))));
    CHECK(similarity(chars(a), chars(a)) == 1.0);
  }
}

#include "synmpst/generator.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace synmpst {

namespace {

class Generator
{
 public:
  Generator(std::mt19937_64 & rng, const GeneratorOptions & opts)
      : rng_(rng), opts_(opts)
  {
  }

  GlobalType top()
  {
    std::vector<Role> roles;
    for (int i = 0; i < opts_.num_roles; ++i)
      roles.push_back(Role{"r" + std::to_string(i)});
    if (opts_.allow_par && roles.size() >= 4 && pick(4) == 0) {
      std::vector<Role> left(roles.begin(), roles.begin() + 2);
      std::vector<Role> right(roles.begin() + 2, roles.begin() + 4);
      return g_par(any(opts_.max_depth - 1, left, {}, std::nullopt),
                   any(opts_.max_depth - 1, right, {}, std::nullopt));
    }
    return any(opts_.max_depth, roles, {}, std::nullopt);
  }

 private:
  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  using Pair = std::pair<std::size_t, std::size_t>;

  // A bound variable together with the participants of its loop's first
  // communication.
  struct Loop
  {
    std::string var;
    Pair head;
  };

  static bool shares_role(const Pair & a, const Pair & b)
  {
    return a.first == b.first || a.first == b.second || a.second == b.first
           || a.second == b.second;
  }

  // Every communication shares a role with the one before it, and a loop is
  // only re-entered from a communication sharing a role with its head.
  // Unchained choices can offer a pair different labels depending on a choice
  // it never observed, which breaks conditional commutativity; unchained loops
  // let a role overtake arbitrarily many iterations and make the LTS infinite.
  // Independent actions still arise from parallel composition.
  GlobalType any(int depth, const std::vector<Role> & roles,
                 const std::vector<Loop> & loops, std::optional<Pair> prev)
  {
    if (depth <= 0 || roles.size() < 2) return leaf(loops, prev);
    int c = pick(10);
    if (c < 6) return comm(depth, roles, loops, prev);
    if (c < 8 && depth >= 2) {
      std::string x = "X" + std::to_string(next_var_++);
      Pair head = choose_pair(roles.size(), prev);
      auto inner = loops;
      inner.push_back({x, head});
      // the body starts with a communication, so x is guarded below it
      return g_mu(x, comm(depth - 1, roles, inner, head, head));
    }
    return leaf(loops, prev);
  }

  GlobalType leaf(const std::vector<Loop> & loops, std::optional<Pair> prev)
  {
    std::vector<const Loop *> reenterable;
    for (const auto & l : loops)
      if (prev && shares_role(*prev, l.head)) reenterable.push_back(&l);
    if (!reenterable.empty() && pick(2) == 0)
      return g_var(reenterable[static_cast<std::size_t>(
                                   pick(static_cast<int>(reenterable.size())))]
                       ->var);
    return g_end();
  }

  Pair choose_pair(std::size_t n, std::optional<Pair> prev)
  {
    const int count = static_cast<int>(n);
    if (!prev) {
      int si = pick(count);
      int ri = pick(count - 1);
      if (ri >= si) ++ri;
      return {static_cast<std::size_t>(si), static_cast<std::size_t>(ri)};
    }
    std::size_t shared = pick(2) == 0 ? prev->first : prev->second;
    auto other = static_cast<std::size_t>(pick(count - 1));
    if (other >= shared) ++other;
    if (pick(2) == 0) return {shared, other};
    return {other, shared};
  }

  GlobalType comm(int depth, const std::vector<Role> & roles,
                  const std::vector<Loop> & loops, std::optional<Pair> prev,
                  std::optional<Pair> fixed = std::nullopt)
  {
    const Pair pair = fixed ? *fixed : choose_pair(roles.size(), prev);
    int nb = 1 + pick(opts_.max_branches);
    std::vector<GBranch> branches;
    for (int i = 0; i < nb; ++i) {
      auto payload = static_cast<PayloadType>(pick(5));
      branches.push_back({Label{"L" + std::to_string(i)}, payload,
                          any(depth - 1, roles, loops, pair)});
    }
    return g_comm(roles[pair.first], roles[pair.second], std::move(branches));
  }

  std::mt19937_64 & rng_;
  const GeneratorOptions & opts_;
  int next_var_ = 0;
};

}  // namespace

GlobalType random_global_type(std::mt19937_64 & rng, const GeneratorOptions & opts)
{
  return Generator(rng, opts).top();
}

}  // namespace synmpst

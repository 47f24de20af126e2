#include "loopdec/samples.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "loopdec/numeric.hpp"

namespace loopdec {

ParityCheckCode sample_tree3() { return ParityCheckCode(3, {{0, 1}, {1, 2}}); }

ParityCheckCode sample_tree7() {
    // bit 3 is a hub: checks {0,1,3}, {3,4}, {2,3,5}, {5,6}
    return ParityCheckCode(7, {{0, 1, 3}, {3, 4}, {2, 3, 5}, {5, 6}});
}

ParityCheckCode sample_hairy_cycle() {
    return ParityCheckCode(6, {{0, 1, 3}, {1, 2, 4}, {2, 0, 5}});
}

ParityCheckCode sample_fused_cycles() {
    return ParityCheckCode(7, {{0, 1, 3}, {1, 2, 4}, {2, 0, 5}, {0, 1, 6}});
}

ParityCheckCode sample_fig14() {
    std::vector<std::vector<int>> checks;
    int pendant = 4;
    for (int x = 0; x < 4; ++x)
        for (int y = x + 1; y < 4; ++y) checks.push_back({x, y, pendant++});
    return ParityCheckCode(pendant, std::move(checks));
}

ParityCheckCode sample_pure_cycle(int n_cycle_bits) {
    if (n_cycle_bits < 2) throw std::invalid_argument("pure cycle needs at least 2 bits");
    std::vector<std::vector<int>> checks;
    for (int k = 0; k < n_cycle_bits; ++k) checks.push_back({k, (k + 1) % n_cycle_bits});
    return ParityCheckCode(n_cycle_bits, std::move(checks));
}

ParityCheckCode sample_rand23(std::uint64_t seed) {
    Rng rng(seed);
    const int n = 9, m = 6;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<int> stubs;
        for (int i = 0; i < n; ++i) {
            stubs.push_back(i);
            stubs.push_back(i);
        }
        for (size_t k = stubs.size(); k > 1; --k)
            std::swap(stubs[k - 1], stubs[rng.next_u64() % k]);
        std::vector<std::vector<int>> checks(m);
        bool ok = true;
        std::set<std::pair<int, int>> pairs;
        for (int a = 0; a < m && ok; ++a) {
            checks[a] = {stubs[3 * a], stubs[3 * a + 1], stubs[3 * a + 2]};
            std::sort(checks[a].begin(), checks[a].end());
            if (checks[a][0] == checks[a][1] || checks[a][1] == checks[a][2]) ok = false;
            for (int x = 0; x < 3 && ok; ++x)
                for (int y = x + 1; y < 3; ++y)
                    if (!pairs.insert({checks[a][x], checks[a][y]}).second) ok = false;
        }
        if (ok) return ParityCheckCode(n, std::move(checks));
    }
    throw std::runtime_error("sample_rand23: no simple configuration found");
}

ParityCheckCode sample_hamming74() {
    return ParityCheckCode(7, {{0, 1, 2, 4}, {0, 1, 3, 5}, {0, 2, 3, 6}});
}

ParityCheckCode sample_single_check(int k) {
    std::vector<int> bits(k);
    for (int i = 0; i < k; ++i) bits[i] = i;
    return ParityCheckCode(k, {bits});
}

std::vector<NamedCode> zcheck_suite() {
    std::vector<NamedCode> out;
    out.push_back({"tree3", sample_tree3()});
    out.push_back({"tree7", sample_tree7()});
    out.push_back({"hairy-cycle", sample_hairy_cycle()});
    out.push_back({"fused-cycles", sample_fused_cycles()});
    out.push_back({"fig14", sample_fig14()});
    out.push_back({"rand23", sample_rand23(7)});
    return out;
}

}  // namespace loopdec
